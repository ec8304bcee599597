//! Exact arithmetic kernel: integer polynomials, certified complex roots,
//! Capelli irreducibility, and exact `log`-linear combinations.

pub mod arith;
mod capelli;
mod loglin;
mod poly;
mod roots;

pub use capelli::capelli_irreducible;
pub use loglin::LogLinear;
pub use poly::{cyclotomic, Poly};
pub use roots::{cauchy_bound, coeffs_to_f64, isolate_roots, poly_roots, RootDisk};
