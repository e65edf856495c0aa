fn main() {
    std::process::exit(tplab::cli::run(std::env::args_os()));
}
