//! Exact symbol calculus for functions of Weyl-quantized operators.

pub mod bohr_sommerfeld;
pub mod error;
pub mod functional_calculus;
pub mod graphs;
pub mod lambda_eval;
pub mod phase;
pub mod quadratic;
pub mod scalar;
pub mod star_products;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Coefficient, ComplexCoefficient, GaussianRational, Real};

/// Polynomial symbol with Gaussian-rational coefficients.
pub type Poly = phase::PhasePolynomial<GaussianRational>;
/// Polynomial symbol with rational coefficients.
pub type RealPoly = phase::PhasePolynomial<num_rational::BigRational>;
pub type Series = phase::HbarSeries<Poly>;
pub type Resolvent = phase::ResolventSymbol<GaussianRational>;
