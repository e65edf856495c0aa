//! The `tplab` command line: thin argument parsing and file plumbing over
//! the library modules. No numerical logic lives here.
//!
//! Exit codes: 0 on success, 2 on parameter or I/O errors, 1 when a strict
//! statistical run (`verify-lemmas --strict`, `codec-exp --strict`) fails a
//! tolerance.

use std::ffi::OsString;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstring::BitString;
use crate::bounds;
use crate::channel::{self, TearConfig};
use crate::error::{Error, Result};
use crate::harness::{self, SweepFixed, SweepKind, Table, DEFAULT_SEED};
use crate::oracle::{self, Codebook};
use crate::pilot_codec::CodeSpec;

#[derive(Debug, Parser)]
#[command(
    name = "tplab",
    version,
    about = "Torn-paper channel simulator, pilot-interleaved codec, and bound checker"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Print the analytic bound set at one alpha.
    Bounds {
        #[arg(long)]
        alpha: f64,
        /// Converse-bound partition counts, comma separated.
        #[arg(long = "L", value_delimiter = ',', default_value = "1")]
        ls: Vec<u32>,
        /// Pilot fractions at which to evaluate A(beta).
        #[arg(long = "beta", value_delimiter = ',')]
        betas: Vec<f64>,
        /// Thresholds at which to evaluate the expected coverage.
        #[arg(long = "gamma", value_delimiter = ',')]
        gammas: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate analytic columns over a grid (alpha, beta, or L).
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKindArg,
        /// Either `start:end:step` or a comma-separated list.
        #[arg(long)]
        grid: String,
        /// Fixed alpha (required for beta and L sweeps).
        #[arg(long)]
        alpha: Option<f64>,
        /// Alpha sweeps only: add a Monte Carlo c_1 column with this many
        /// trials per grid point.
        #[arg(long, default_value_t = 0)]
        mc_trials: usize,
        #[arg(long, default_value_t = 1 << 16)]
        mc_n: usize,
        #[arg(long, env = "TPLAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tear (and by default shuffle) an input string; write a fragment dump.
    Tear {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "alpha")]
        p: Option<f64>,
        /// Alternative to --p: tearing probability alpha / log2(n).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, env = "TPLAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// 0/1 input string file; random input derived from the seed when
        /// absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Use the unconstrained channel (round(n p) zero-padded fragments).
        #[arg(long)]
        unconstrained: bool,
        /// Keep fragments in pre-shuffle order.
        #[arg(long)]
        no_shuffle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the `start,len` origin of each fragment.
        #[arg(long)]
        truth_out: Option<PathBuf>,
    },
    /// Construct a pilot-interleaved code and write its JSON description.
    MakeCode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Catalog size M.
        #[arg(short = 'M', long = "catalog-size")]
        catalog_size: usize,
        #[arg(long, env = "TPLAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a message (tuple of catalog indices) into a codeword.
    Encode {
        #[arg(long)]
        code: PathBuf,
        /// Comma-separated catalog indices, one per message slot.
        #[arg(long)]
        message: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode a fragment dump against a code; print the decode report.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        frags: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random-codebook tiling-decoder experiment, or — with --codebook and
    /// --frags — a single tiling decode of stored inputs.
    Oracle {
        #[arg(long, required_unless_present = "codebook")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "codebook")]
        rate: Option<f64>,
        #[arg(long, required_unless_present = "codebook")]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Codebook file, one codeword per line (decode mode).
        #[arg(long, requires = "frags", conflicts_with_all = ["n", "rate", "alpha", "trials"])]
        codebook: Option<PathBuf>,
        /// Fragment dump to decode against the codebook.
        #[arg(long)]
        frags: Option<PathBuf>,
        #[arg(long, env = "TPLAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo checks of the fragment-statistics limits.
    VerifyLemmas {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, env = "TPLAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Exit 1 if any tolerance check fails.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode/tear/decode experiment for a stored code.
    CodecExp {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, conflicts_with = "alpha")]
        p: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, env = "TPLAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Exit 1 if any tolerance check fails.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKindArg {
    Alpha,
    Beta,
    L,
}

impl From<SweepKindArg> for SweepKind {
    fn from(kind: SweepKindArg) -> Self {
        match kind {
            SweepKindArg::Alpha => SweepKind::Alpha,
            SweepKindArg::Beta => SweepKind::Beta,
            SweepKindArg::L => SweepKind::L,
        }
    }
}

/// Parse argv, execute, and map errors to exit codes.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_table(table: &Table, format: Format, out: Option<&Path>) -> Result<()> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    emit(&text, out)
}

/// Parse `start:end:step` (inclusive) or a comma-separated list. Values are
/// snapped to a 1e-9 lattice so stepped grids print cleanly.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let snap = |x: f64| (x * 1e9).round() / 1e9;
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid range must be start:end:step, got {spec:?}")));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 {
            return Err(Error::Parse("grid step must be positive".into()));
        }
        let mut grid = Vec::new();
        let mut i = 0u64;
        loop {
            let value = snap(start + i as f64 * step);
            if value > end + step * 1e-9 {
                break;
            }
            grid.push(value);
            i += 1;
        }
        Ok(grid)
    } else {
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map(snap)
                    .map_err(|e| Error::Parse(format!("bad grid value {s:?}: {e}")))
            })
            .collect()
    }
}

fn parse_message(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad message index {s:?}: {e}")))
        })
        .collect()
}

fn resolve_p(n: usize, p: Option<f64>, alpha: Option<f64>) -> Result<f64> {
    match (p, alpha) {
        (Some(p), None) => Ok(TearConfig::new(n, p, 0)?.p),
        (None, Some(alpha)) => Ok(TearConfig::for_alpha(n, alpha, 0)?.p),
        _ => Err(Error::InvalidParameter(
            "exactly one of --p and --alpha is required".into(),
        )),
    }
}

fn load_code(path: &Path) -> Result<CodeSpec> {
    CodeSpec::from_json(&fs::read_to_string(path)?)
}

fn execute(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Bounds { alpha, ls, betas, gammas, format, out } => {
            let set = bounds::bound_set(alpha, &ls, &betas, &gammas)?;
            match format {
                Format::Json => {
                    let mut text = serde_json::to_string_pretty(&set)?;
                    text.push('\n');
                    emit(&text, out.as_deref())?;
                }
                Format::Csv => {
                    let mut header = vec![
                        "alpha".to_string(),
                        "capacity".to_string(),
                        "det_capacity".to_string(),
                        "interleave_rate".to_string(),
                        "beta_star".to_string(),
                    ];
                    let mut row = vec![
                        harness::fmt_f64(set.alpha),
                        harness::fmt_f64(set.capacity),
                        harness::fmt_f64(set.det_capacity),
                        harness::fmt_f64(set.interleave_rate),
                        harness::fmt_f64(set.beta_star),
                    ];
                    for entry in &set.converse {
                        header.push(format!("converse_L{}", entry.l));
                        row.push(harness::fmt_f64(entry.value));
                    }
                    for entry in &set.coverage_a {
                        header.push(format!("coverage_A_beta{}", entry.at));
                        row.push(harness::fmt_f64(entry.value));
                    }
                    for entry in &set.coverage_expect {
                        header.push(format!("coverage_gamma{}", entry.at));
                        row.push(harness::fmt_f64(entry.value));
                    }
                    emit_table(&Table { header, rows: vec![row] }, Format::Csv, out.as_deref())?;
                }
            }
            Ok(0)
        }
        Cmd::Sweep { kind, grid, alpha, mc_trials, mc_n, seed, workers, format, out } => {
            let grid = parse_grid(&grid)?;
            let fixed = SweepFixed { alpha, mc_trials, mc_n, seed };
            let table =
                harness::run_with_workers(workers, move || harness::sweep(kind.into(), &grid, &fixed))??;
            emit_table(&table, format, out.as_deref())?;
            Ok(0)
        }
        Cmd::Tear { n, p, alpha, seed, input, unconstrained, no_shuffle, out, truth_out } => {
            let p = resolve_p(n, p, alpha)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = match input {
                Some(path) => {
                    let text = fs::read_to_string(&path)?;
                    let x: BitString = text.trim().parse()?;
                    if x.len() != n {
                        return Err(Error::InvalidParameter(format!(
                            "input length {} does not match --n {n}",
                            x.len()
                        )));
                    }
                    x
                }
                None => BitString::random(n, &mut rng),
            };
            let cfg = TearConfig::new(n, p, rng.random())?;
            let torn = if unconstrained {
                channel::unconstrained_tear(&x, &cfg)
            } else {
                channel::tear(&x, &cfg)
            };
            let fs_out = if no_shuffle { torn } else { channel::shuffle(&torn, rng.random()) };
            // the dump header records the user-facing seed, not the derived one
            let header_cfg = TearConfig { n, p, seed };
            let mut buf = Vec::new();
            channel::write_fragment_dump(&mut buf, &header_cfg, &fs_out)?;
            emit(&String::from_utf8(buf).expect("dump is ascii"), out.as_deref())?;
            if let Some(path) = truth_out {
                let mut buf = Vec::new();
                channel::write_truth_sidecar(&mut buf, &fs_out)?;
                fs::write(path, buf)?;
            }
            Ok(0)
        }
        Cmd::MakeCode { n, m, delta, catalog_size, seed, out } => {
            let code = CodeSpec::make_code(n, m, delta, catalog_size, seed)?;
            let mut text = code.to_json()?;
            text.push('\n');
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Cmd::Encode { code, message, out } => {
            let code = load_code(&code)?;
            let u = parse_message(&message)?;
            let cw = code.encode(&u)?;
            emit(&format!("{cw}\n"), out.as_deref())?;
            Ok(0)
        }
        Cmd::Decode { code, frags, out } => {
            let code = load_code(&code)?;
            let file = fs::File::open(&frags)?;
            let (_cfg, fs_in) = channel::read_fragment_dump(BufReader::new(file))?;
            let report = code.decode(&fs_in)?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Cmd::Oracle { n, rate, alpha, gamma, trials, codebook, frags, seed, workers, format, out } => {
            if let Some(cb_path) = codebook {
                let cb = read_codebook(&cb_path)?;
                let frags_path = frags.expect("clap enforces --frags with --codebook");
                let file = fs::File::open(&frags_path)?;
                let (_cfg, fs_in) = channel::read_fragment_dump(BufReader::new(file))?;
                let outcome = oracle::tiling_decode(&cb, &fs_in, gamma)?;
                let text = match outcome {
                    oracle::TilingOutcome::Decoded(i) => {
                        format!("{{\"outcome\":\"decoded\",\"index\":{i}}}\n")
                    }
                    oracle::TilingOutcome::Ambiguous => "{\"outcome\":\"ambiguous\"}\n".into(),
                    oracle::TilingOutcome::NoMatch => "{\"outcome\":\"no_match\"}\n".into(),
                };
                emit(&text, out.as_deref())?;
                return Ok(0);
            }
            let (n, rate, alpha) = (
                n.expect("clap enforces --n"),
                rate.expect("clap enforces --rate"),
                alpha.expect("clap enforces --alpha"),
            );
            let est = harness::run_with_workers(workers, move || {
                harness::oracle_experiment(n, rate, alpha, gamma, trials, seed)
            })??;
            emit_table(&est.to_table(), format, out.as_deref())?;
            Ok(0)
        }
        Cmd::VerifyLemmas { n, alpha, trials, seed, workers, strict, format, out } => {
            let est = harness::run_with_workers(workers, move || {
                harness::verify_lemmas(n, alpha, trials, seed)
            })??;
            emit_table(&est.to_table(), format, out.as_deref())?;
            Ok(if strict && !est.all_pass() { 1 } else { 0 })
        }
        Cmd::CodecExp { code, p, alpha, trials, seed, workers, strict, format, out } => {
            let code = load_code(&code)?;
            let p = resolve_p(code.n(), p, alpha)?;
            let est = harness::run_with_workers(workers, {
                let code = code.clone();
                move || harness::codec_experiment(&code, p, trials, seed)
            })??;
            emit_table(&est.to_table(), format, out.as_deref())?;
            Ok(if strict && !est.all_pass() { 1 } else { 0 })
        }
    }
}

/// Read a codebook file (one codeword per line) — used by scripts that drive
/// [`crate::oracle::tiling_decode`] on stored inputs.
pub fn read_codebook(path: &Path) -> Result<Codebook> {
    let file = fs::File::open(path)?;
    Codebook::read(BufReader::new(file))
}
