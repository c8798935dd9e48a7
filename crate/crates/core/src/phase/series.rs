use crate::error::{Error, Result};

use serde::{Deserialize, Serialize};

use super::{PhasePolynomial, PolynomialJson, Symbol};
use crate::scalar::Coefficient;

/// Largest supported ℏ truncation order.
pub const MAX_TRUNCATION_ORDER: usize = 8;

/// `Σ_{k ≤ order} ℏ^k c_k`, arithmetic modulo `ℏ^{order+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HbarSeries<T> {
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Symbol> HbarSeries<T> {
    /// A series whose coefficients beyond `coeffs.len()` are zero.
    pub fn new(order: usize, mut coeffs: Vec<T>, zero: &T) -> Result<Self> {
        check_order(order)?;
        coeffs.truncate(order + 1);
        while coeffs.len() < order + 1 {
            coeffs.push(zero.zero_like());
        }
        if coeffs.iter().any(|c| c.dimension() != zero.dimension()) {
            return Err(Error::DimensionMismatch { left: coeffs[0].dimension(), right: zero.dimension() });
        }
        Ok(HbarSeries { order, coeffs })
    }

    /// An ℏ-independent symbol.
    pub fn constant(order: usize, a: T) -> Result<Self> {
        let zero = a.zero_like();
        Self::new(order, vec![a], &zero)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dimension(&self) -> usize {
        self.coeffs[0].dimension()
    }

    /// Coefficient of `ℏ^k` (zero above the truncation order).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.coeffs[0].zero_like())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest `k` with a nonzero `ℏ^k` coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_hbar_independent(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn with_order(&self, order: usize) -> Result<Self> {
        let zero = self.coeffs[0].zero_like();
        Self::new(order, self.coeffs.clone(), &zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let coeffs = (0..=order).map(|k| self.coeffs[k].add_ref(&other.coeffs[k])).collect();
        Ok(HbarSeries { order, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let coeffs = (0..=order).map(|k| self.coeffs[k].sub_ref(&other.coeffs[k])).collect();
        Ok(HbarSeries { order, coeffs })
    }

    pub fn scale(&self, c: &T::Coeff) -> Self {
        HbarSeries { order: self.order, coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect() }
    }

    /// Multiply by `ℏ^k`.
    pub fn shift(&self, k: usize) -> Self {
        let zero = self.coeffs[0].zero_like();
        let coeffs = (0..=self.order)
            .map(|j| if j >= k { self.coeffs[j - k].clone() } else { zero.clone() })
            .collect();
        HbarSeries { order: self.order, coeffs }
    }

    /// Pointwise (commutative) product, truncated.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; order + 1];
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add_ref(&self.coeffs[i].mul_ref(&other.coeffs[j]));
            }
        }
        Ok(HbarSeries { order, coeffs })
    }

    pub fn map<F: Fn(&T) -> T>(&self, f: F) -> Self {
        HbarSeries { order: self.order, coeffs: self.coeffs.iter().map(f).collect() }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch { left: self.dimension(), right: other.dimension() });
        }
        Ok(())
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order > MAX_TRUNCATION_ORDER {
        return Err(Error::Capacity(format!(
            "truncation order {order} exceeds the cap {MAX_TRUNCATION_ORDER}"
        )));
    }
    Ok(())
}

/// `{"order":2,"coeffs":[{…},{…},{…}]}`, coefficient `k` of `ℏ^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub order: usize,
    pub coeffs: Vec<PolynomialJson>,
}

impl<C: Coefficient> HbarSeries<PhasePolynomial<C>> {
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson { order: self.order, coeffs: self.coeffs.iter().map(|c| c.to_json()).collect() }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        let coeffs = json.coeffs.iter().map(PhasePolynomial::from_json).collect::<Result<Vec<_>>>()?;
        let zero = PhasePolynomial::zero(coeffs.first().map_or(1, |c| c.dimension()));
        Self::new(json.order, coeffs, &zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PhasePolynomial;
    use crate::scalar::{Coefficient, GaussianRational};

    type P = PhasePolynomial<GaussianRational>;

    #[test]
    fn product_truncates() {
        let x = P::x(1, 0);
        let zero = P::zero(1);
        let a = HbarSeries::new(2, vec![x.clone(), P::one(1)], &zero).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.coeff(0), &x * &x);
        assert_eq!(sq.coeff(1), x.scale(&GaussianRational::from_i64(2)));
        assert_eq!(sq.coeff(2), P::one(1));
        assert_eq!(sq.coeff(3), zero);
        let cube = sq.mul(&a).unwrap();
        assert_eq!(cube.coeffs().len(), 3);
    }

    #[test]
    fn order_cap() {
        assert!(HbarSeries::constant(9, P::one(1)).is_err());
        assert!(HbarSeries::constant(8, P::one(1)).is_ok());
    }

    #[test]
    fn shift_and_valuation() {
        let a = HbarSeries::constant(4, P::x(1, 0)).unwrap().shift(3);
        assert_eq!(a.valuation(), Some(3));
        assert!(a.shift(2).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let zero = P::zero(1);
        let a = HbarSeries::new(2, vec![P::x(1, 0), P::zero(1), P::p(1, 0)], &zero).unwrap();
        let text = serde_json::to_string(&a.to_json()).unwrap();
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(HbarSeries::from_json(&back).unwrap(), a);
    }
}
