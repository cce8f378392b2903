//! Exact arithmetic on multivariate rational polynomials.

pub mod algebraic;
pub mod divide;
pub mod gcd;
pub mod modp;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod resultant;
pub mod roots;

pub use algebraic::{AlgebraicNumber, QuadElem};
pub use divide::{divide_in, pseudo_rem, reduce_mod, Division};
pub use gcd::{gcd, squarefree_part, squarefree_part_in, yun};
pub use parse::parse_poly;
pub use poly::{Monomial, MultiPoly};
pub use rational::Rational;
pub use resultant::resultant;
pub use roots::{roots, Root};
