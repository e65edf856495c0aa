//! Simulation and coding toolkit for the torn-paper channel: a noise-free
//! channel that cuts a binary codeword at i.i.d. Bernoulli(p) boundaries and
//! outputs the fragments in uniformly random order.
//!
//! The crate provides:
//!
//! * [`bitstring`] — packed immutable binary sequences with exact substring
//!   search and strided subsequence access.
//! * [`channel`] — the tearing/shuffling channel, its unconstrained variant,
//!   and coverage statistics of fragment sets.
//! * [`debruijn`] — binary de Bruijn sequences used as pilot skeletons.
//! * [`pilot_codec`] — the interleaved-pilot code: construction, encoding,
//!   fragment alignment, and erasure-masked decoding.
//! * [`oracle`] — the exhaustive tiling decoder at desk scale.
//! * [`bounds`] — closed-form rates, outer bounds, and the interleaving-rate
//!   optimization.
//! * [`harness`] — seeded Monte Carlo experiments comparing empirical
//!   statistics against the analytic values.
//! * [`cli`] — the `tplab` command-line entry point.

pub mod bitstring;
pub mod bounds;
pub mod channel;
pub mod cli;
pub mod debruijn;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod pilot_codec;

pub use bitstring::BitString;
pub use channel::{FragmentSet, TearConfig};
pub use debruijn::DeBruijnSeq;
pub use error::{Error, Result};
pub use oracle::Codebook;
pub use pilot_codec::{CodeSpec, DecodeReport};
