//! Character varieties, A-polynomials and related invariants of one-relator
//! knot groups, computed with exact polynomial algebra and verified
//! numerically.

pub mod algebra;
pub mod boundary;
pub mod charvar;
pub mod error;
pub mod ideal;
pub mod knot;
pub mod matrix;
pub mod puiseux;
pub mod regulator;
pub mod series;
pub mod surgery;
pub mod trace;
pub mod verify;
pub mod word;

pub use algebra::{AlgebraicNumber, MultiPoly, Rational};
pub use error::{AlgebraError, Error, Result};
pub use matrix::Mat2;
pub use trace::{peripheral_trace, trace_poly, TraceEngine};
pub use word::GroupWord;
pub use knot::KnotPresentation;
