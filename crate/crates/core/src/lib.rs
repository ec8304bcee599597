//! Heights of small points over ℚ.
//!
//! The crate covers four connected computations:
//!
//! * Weil heights of algebraic numbers built from rationals, roots of unity
//!   and radicals, together with the saturated groups `⟨a⟩_sat` and
//!   `⟨a⟩_{sat,p}` ([`gmheights`]);
//! * `ℚ_p` arithmetic, the `λ`-exponent of a rational and the valuation on
//!   the Kummer towers `K_{r,s} = K(ζ_{p^r}, b^{1/p^s})` ([`padics`],
//!   [`kummer`]);
//! * exact arithmetic on short Weierstrass curves and the Néron–Tate height,
//!   computed both as a sum of local heights and as a doubling limit
//!   ([`elliptic`], [`ntheight`]);
//! * small numerical equidistribution statistics ([`equidist`]) and the
//!   survey driver used by the command-line tool ([`survey`]).
//!
//! Core algebra is written against `num-traits` so that polynomials, curve
//! arithmetic, power series and the floating-point kernels can be used with
//! exact rationals as well as `f32`/`f64`. The aliases below fix the scalar
//! types used throughout the higher-level modules.

pub mod elliptic;
pub mod equidist;
pub mod error;
pub mod gmheights;
pub mod kummer;
pub mod numkernel;
pub mod ntheight;
pub mod padics;
pub mod ser;
pub mod survey;

pub use error::{Error, Result};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Integer polynomial, constant term first.
pub type IntPolynomial = numkernel::Poly<BigInt>;
/// Polynomial with exact rational coefficients.
pub type RatPolynomial = numkernel::Poly<BigRational>;
/// Short Weierstrass curve over ℚ.
pub type RationalCurve = elliptic::EllipticCurve<BigRational>;
/// Exact rational point.
pub type RationalPoint = elliptic::EcPoint<BigRational>;
/// Real point, used for sanity checks on archimedean computations.
pub type RealPoint = elliptic::EcPoint<f64>;
/// Truncated formal group data with rational coefficients.
pub type RationalFormalGroup = elliptic::FormalGroupData<BigRational>;
/// Certified root box in double precision.
pub type RootBox = numkernel::RootDisk<f64>;
