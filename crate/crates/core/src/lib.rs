//! Exact computer algebra for multiple zeta values: words and Lyndon bases,
//! shuffle and quasi-shuffle algebras, rational series, negative-index
//! polylogarithms, and a weight-graded relation miner.

pub mod bases;
pub mod bridge;
pub mod coeff;
pub mod error;
pub mod linalg;
pub mod ncalg;
pub mod negalog;
pub mod numeric;
pub mod ratseries;
pub mod words;

pub use coeff::{q, qi, Monomial, Poly, Ring, Symbol, Q};
pub use error::{Error, Result};
pub use ncalg::{NCPoly, TruncatedSeries};
pub use words::{Alphabet, Letter, Word};
