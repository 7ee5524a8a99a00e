//! Multi-dimensional graph-based code design by circulant relocation.
//!
//! A one-dimensional parity-check matrix is partitioned into `M` parts and
//! coupled into an `M`-dimensional code. The relocation values are chosen so
//! that the unlabeled absorbing sets of the host are removed.

pub mod absorbing;
pub mod analysis;
pub mod cli;
pub mod cycles;
pub mod designer;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod relocation;
pub mod tanner;

pub use absorbing::{UasConfig, UasInstance};
pub use analysis::{FractionReport, Scalar};
pub use error::{Error, Result};
pub use relocation::{Modulus, RelocationMap};
pub use tanner::{BinaryMatrix, QcMatrix, TannerGraph};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Fraction report in exact arithmetic.
pub type ExactFractionReport = analysis::FractionReport<Rational>;
/// Fraction report in double precision.
pub type FloatFractionReport = analysis::FractionReport<f64>;
