//! Exact computations with CM fields: class groups, CM types and reflex
//! fields, the reciprocity map and field-of-moduli degrees, CM heights, and
//! CM-point censuses in the modular fundamental domain.

pub mod error;
pub mod exact;
pub mod field;
pub mod heights;
pub mod classgroup;
pub mod cm;
pub mod orbit;
pub mod ideal;
pub mod fit;
pub mod siegel;

pub use error::{Error, Result};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision rational.
pub type Rational = BigRational;
/// Integer matrix, the carrier of ideal bases and relation matrices.
pub type IntMatrix = exact::Matrix<BigInt>;
/// Rational matrix.
pub type RatMatrix = exact::Matrix<BigRational>;
/// Integer polynomial.
pub type IntPolynomial = exact::Poly<BigInt>;
/// Rational polynomial.
pub type RatPolynomial = exact::Poly<BigRational>;
