//! Numerical analysis on the eigenvalue curve `A(m, l) = 0`: path
//! tracking, the forms `η` and `ξ`, `Vol`/`CS` along paths and the
//! holonomy of the regulator class of a pair of functions.

pub mod forms;
pub mod holonomy;
pub mod loops;
pub mod track;

pub use forms::{detect_rational, integrate_forms, integrate_to_tolerance, vol_cs, FormIntegrals};
pub use holonomy::{holonomy, holonomy_with_error, CurveFunction};
pub use loops::{base_point, close_circle, critical_m_values, loop_library, LoopSpec};
pub use track::{track_path, CurvePath, NumCurve, PathSpec, Piece, Sample};
