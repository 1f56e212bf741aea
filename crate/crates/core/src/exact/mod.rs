//! Exact arithmetic substrate: integers, polynomials, matrices, balls.

pub mod arith;
pub mod ball;
pub mod fp;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod transc;

pub use ball::{Ball, ComplexBall, Dyadic};
pub use fp::{factor_mod_p, FpPoly};
pub use matrix::{Matrix, Smith};
pub use poly::Poly;
pub use roots::{complex_roots, isolate_roots, RootSet};
pub use scalar::IntScalar;
