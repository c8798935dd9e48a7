//! Exact arithmetic for symbols on `T*R^N`.
//!
//! Coordinates are `(z^1, …, z^{2N}) = (x_1, …, x_N, p_1, …, p_N)`; in code
//! they are 0-based (`x_j ↦ j`, `p_j ↦ N + j`). The public
//! [`PhasePolynomial::partial_derivative`] takes the 1-based index.

mod contract;
mod parse;
mod polynomial;
mod resolvent;
mod series;
mod tensor;

use std::fmt::Debug;

use num_traits::One;

pub use contract::{bracket_k, contract, poisson_bracket};
pub use parse::{infer_dimension, parse_symbol};
pub use polynomial::{
    random_polynomial, Exponent, PhasePolynomial, PolynomialJson, TermJson, MAX_TOTAL_DEGREE,
};
pub use resolvent::ResolventSymbol;
pub use series::{HbarSeries, SeriesJson, MAX_TRUNCATION_ORDER};
pub(crate) use series::check_order;
pub use tensor::{QuantizationTensor, TensorKind};

use crate::scalar::Coefficient;

/// A commutative algebra of phase-space functions closed under partial
/// differentiation: the minimum the graph contraction needs.
pub trait Symbol: Clone + Debug + PartialEq + Send + Sync {
    type Coeff: Coefficient;

    /// `N` (the algebra lives on `T*R^N`).
    fn dimension(&self) -> usize;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale(&self, c: &Self::Coeff) -> Self;
    /// Partial derivative along the 0-based coordinate `var`.
    fn diff(&self, var: usize) -> Self;

    fn diff_multi(&self, counts: &[u8]) -> Self {
        let mut out = self.clone();
        for (var, &k) in counts.iter().enumerate() {
            for _ in 0..k {
                out = out.diff(var);
            }
        }
        out
    }

    /// Derivatives of order above this along `var` vanish (`None`: unbounded).
    fn max_derivative_order(&self, _var: usize) -> Option<usize> {
        None
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.scale(&-Self::Coeff::one()))
    }
}
