//! Constructive tools for additive bases.
//!
//! The crate builds B_h[g] sequences, applies the inserting-zeros
//! transformation to their binary expansions, and runs the stage-by-stage
//! construction of an integer set whose order-h representation function
//! matches a prescribed target. Every structural lemma behind the
//! construction has an executable diagnostic in [`prescribe::lemmas`].
//!
//! Modules, bottom-up:
//!
//! - [`numset`]: arbitrary-precision integer sets and the modular norm.
//! - [`repcount`]: exact representation counts and B_h[g] certification.
//! - [`bhseq`]: greedy, Erdős–Turán, and block/dilation constructions.
//! - [`zipt`]: the inserting-zeros transformation and its gamma map.
//! - [`prescribe`]: the recursive construction and lemma diagnostics.
//! - [`cli`]: the command-line front end.

pub mod bhseq;
pub mod cli;
pub mod error;
pub mod numset;
pub mod prescribe;
pub mod repcount;
pub mod zipt;

pub use error::{Error, Result};
pub use numset::{ExtendedCount, IntegerSet};
