//! Single-exclusion (SE) systems, Turán systems and covering designs.
//!
//! The crate is organised bottom-up:
//!
//! * [`combinat`]: exact binomials, directed-rounding reals and the classic
//!   lower bounds on Turán numbers.
//! * [`setsys`]: blocks, set systems, exhaustive verifiers and the block-file
//!   format.
//! * [`constructions`]: explicit block families.
//! * [`bounds`]: every closed-form or optimised bound on `S(n,t)`.
//! * [`exact`]: branch-and-bound for exact minimal systems on tiny instances.
//! * [`coding`]: prime-field Reed–Solomon parity-check matrices built from SE
//!   systems, stopping sets and the peeling decoder.
//! * [`report`]: the `(n,d)` sweep and its CSV and plot-script emitters.
//!
//! Data-parallel loops go through [`exec::Strategy`]; with the default
//! `parallel` feature they run on rayon, otherwise sequentially.

pub mod bounds;
pub mod coding;
pub mod combinat;
pub mod constructions;
mod error;
pub mod exact;
pub mod exec;
pub mod report;
pub mod setsys;

pub use error::{Error, Result};
