//! Polynomial randomized approximation (PRAX) algorithms for emptiness and
//! universality problems over tractable distributions.
//!
//! The crate is organised bottom-up:
//!
//! * [`distributions`] holds the Dirichlet length distributions, finite
//!   distributions with a residual `none` outcome, and the seeded random
//!   source everything draws from.
//! * [`tractable`] defines locally tractable families (size-class
//!   probability, within-class selection, maximum size) and the generic
//!   two-level selector built from them.
//! * [`engine`] runs the sampling decision procedures.
//! * [`domains`] parses problem instances (NFAs, CNF formulas, 2D automata,
//!   Diophantine equations) and wires them to their families.
//! * [`oracle`] contains brute-force references used only for validation.

pub mod distributions;
pub mod domains;
pub mod engine;
mod error;
pub mod oracle;
pub mod tractable;

pub use error::{Error, ParseError, ParseErrorKind, Result};
