//! Exact arithmetic over Q(i) and the numeric kernels behind it.

pub mod float;
pub mod gaussian;
mod modp;
pub mod poly;
pub mod roots;
pub mod snap;

pub use float::{chordal, BigFloat, Complex, ComplexFloat, Real};
pub use gaussian::GaussianRational;
pub use poly::ComplexPoly;
pub use roots::{exact_roots, poly_roots_numeric, NumRoot};
pub use snap::snap_to_exact;
