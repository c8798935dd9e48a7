use crate::error::{Error, Result};
use crate::scalar::Coefficient;

use super::{PhasePolynomial, Symbol};

/// `N(z, a) / (a − A(z))^m` with `N = Σ_j numer[j](z)·a^j`.
///
/// Values are kept reduced: `m` is lowered while `a − A` divides `N`.
/// Since `a − A` is monic of degree one in `a`, the reduced form is unique
/// and structural equality coincides with equality of rational functions.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolventSymbol<C> {
    base: PhasePolynomial<C>,
    numer: Vec<PhasePolynomial<C>>,
    power: usize,
}

impl<C: Coefficient> ResolventSymbol<C> {
    pub fn new(base: PhasePolynomial<C>, numer: Vec<PhasePolynomial<C>>, power: usize) -> Result<Self> {
        if numer.iter().any(|n| n.dimension() != base.dimension()) {
            return Err(Error::DimensionMismatch {
                left: numer.iter().map(|n| n.dimension()).find(|&d| d != base.dimension()).unwrap_or(0),
                right: base.dimension(),
            });
        }
        Ok(Self::reduced(base, numer, power))
    }

    /// `P(z) / (a − A)^m`.
    pub fn from_polynomial(base: &PhasePolynomial<C>, p: PhasePolynomial<C>, power: usize) -> Self {
        Self::reduced(base.clone(), vec![p], power)
    }

    /// `1 / (a − A)`.
    pub fn resolvent(base: &PhasePolynomial<C>) -> Self {
        Self::from_polynomial(base, PhasePolynomial::one(base.dimension()), 1)
    }

    /// `a − A`.
    pub fn a_minus_base(base: &PhasePolynomial<C>) -> Self {
        let dim = base.dimension();
        Self::reduced(base.clone(), vec![-base, PhasePolynomial::one(dim)], 0)
    }

    pub fn base(&self) -> &PhasePolynomial<C> {
        &self.base
    }

    /// Coefficients of `a^j` in the numerator.
    pub fn numerator(&self) -> &[PhasePolynomial<C>] {
        &self.numer
    }

    pub fn denominator_power(&self) -> usize {
        self.power
    }

    fn reduced(base: PhasePolynomial<C>, mut numer: Vec<PhasePolynomial<C>>, mut power: usize) -> Self {
        trim(&mut numer);
        if numer.is_empty() {
            return ResolventSymbol { base, numer, power: 0 };
        }
        while power > 0 {
            match divide_by_a_minus(&numer, &base) {
                Some(q) => {
                    numer = q;
                    power -= 1;
                }
                None => break,
            }
        }
        ResolventSymbol { base, numer, power }
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::MixedBases);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let m = self.power.max(other.power);
        let a = raise(&self.numer, &self.base, m - self.power);
        let b = raise(&other.numer, &self.base, m - other.power);
        Ok(Self::reduced(self.base.clone(), add_polys(&a, &b, self.base.dimension()), m))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let prod = mul_polys(&self.numer, &other.numer, self.base.dimension());
        Ok(Self::reduced(self.base.clone(), prod, self.power + other.power))
    }

    /// `∂(N/(a−A)^m) = ∂N/(a−A)^m + m·N·∂A/(a−A)^{m+1}`.
    pub fn derivative(&self, var: usize) -> Self {
        let dim = self.base.dimension();
        let dn: Vec<_> = self.numer.iter().map(|n| n.diff(var)).collect();
        let da = self.base.diff(var);
        let lhs = mul_polys(&dn, &a_minus(&self.base), dim);
        let rhs: Vec<_> = self.numer.iter().map(|n| (n * &da).scale(&C::from_i64(self.power as i64))).collect();
        Self::reduced(self.base.clone(), add_polys(&lhs, &rhs, dim), self.power + 1)
    }

    /// Equality by cross-multiplication, independent of the reduced form.
    pub fn equivalent(&self, other: &Self) -> Result<bool> {
        self.check_base(other)?;
        let m = self.power.max(other.power);
        let mut a = raise(&self.numer, &self.base, m - self.power);
        let mut b = raise(&other.numer, &self.base, m - other.power);
        trim(&mut a);
        trim(&mut b);
        Ok(a == b)
    }

    /// Value at `(z, a)`; `None` at a pole.
    pub fn evaluate(&self, z: &[C], a: &C) -> Result<Option<C>> {
        let mut num = C::zero();
        let mut apow = C::one();
        for n in &self.numer {
            num = num + n.evaluate(z)? * apow.clone();
            apow = apow * a.clone();
        }
        let d = a.clone() - self.base.evaluate(z)?;
        let mut den = C::one();
        for _ in 0..self.power {
            den = den * d.clone();
        }
        Ok(num.checked_div(&den))
    }
}

fn trim<C: Coefficient>(numer: &mut Vec<PhasePolynomial<C>>) {
    while numer.last().is_some_and(|p| p.is_zero()) {
        numer.pop();
    }
}

fn a_minus<C: Coefficient>(base: &PhasePolynomial<C>) -> Vec<PhasePolynomial<C>> {
    vec![-base, PhasePolynomial::one(base.dimension())]
}

fn raise<C: Coefficient>(numer: &[PhasePolynomial<C>], base: &PhasePolynomial<C>, k: usize) -> Vec<PhasePolynomial<C>> {
    let mut out = numer.to_vec();
    let f = a_minus(base);
    for _ in 0..k {
        out = mul_polys(&out, &f, base.dimension());
    }
    out
}

fn add_polys<C: Coefficient>(a: &[PhasePolynomial<C>], b: &[PhasePolynomial<C>], dim: usize) -> Vec<PhasePolynomial<C>> {
    let n = a.len().max(b.len());
    let zero = PhasePolynomial::zero(dim);
    (0..n)
        .map(|j| a.get(j).unwrap_or(&zero) + b.get(j).unwrap_or(&zero))
        .collect()
}

fn mul_polys<C: Coefficient>(a: &[PhasePolynomial<C>], b: &[PhasePolynomial<C>], dim: usize) -> Vec<PhasePolynomial<C>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![PhasePolynomial::zero(dim); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

/// Quotient of `N` by `a − A` if the division is exact.
fn divide_by_a_minus<C: Coefficient>(
    numer: &[PhasePolynomial<C>],
    base: &PhasePolynomial<C>,
) -> Option<Vec<PhasePolynomial<C>>> {
    let d = numer.len() - 1;
    if d == 0 {
        // Degree zero in `a`: divisible only if zero, which `trim` excludes.
        return None;
    }
    let mut q = vec![PhasePolynomial::zero(base.dimension()); d];
    q[d - 1] = numer[d].clone();
    for j in (1..d).rev() {
        q[j - 1] = &numer[j] + &(base * &q[j]);
    }
    let rem = &numer[0] + &(base * &q[0]);
    rem.is_zero().then_some(q)
}

impl<C: Coefficient> Symbol for ResolventSymbol<C> {
    type Coeff = C;

    fn dimension(&self) -> usize {
        self.base.dimension()
    }

    fn zero_like(&self) -> Self {
        ResolventSymbol { base: self.base.clone(), numer: Vec::new(), power: 0 }
    }

    fn one_like(&self) -> Self {
        Self::from_polynomial(&self.base, PhasePolynomial::one(self.base.dimension()), 0)
    }

    fn is_zero(&self) -> bool {
        self.numer.is_empty()
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.checked_add(other).expect("resolvent symbols over different bases")
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("resolvent symbols over different bases")
    }

    fn scale(&self, c: &C) -> Self {
        Self::reduced(self.base.clone(), self.numer.iter().map(|n| n.scale(c)).collect(), self.power)
    }

    fn diff(&self, var: usize) -> Self {
        self.derivative(var)
    }

    fn max_derivative_order(&self, var: usize) -> Option<usize> {
        if self.power == 0 {
            Some(self.numer.iter().map(|n| n.degree_in(var)).max().unwrap_or(0))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    type P = PhasePolynomial<GaussianRational>;
    type R = ResolventSymbol<GaussianRational>;

    fn base() -> P {
        &P::x(1, 0).pow(2) + &P::p(1, 0).pow(2)
    }

    #[test]
    fn resolvent_times_a_minus_a_is_one() {
        let a = base();
        let r = R::resolvent(&a).mul_ref(&R::a_minus_base(&a));
        assert_eq!(r, R::resolvent(&a).one_like());
        assert_eq!(r.denominator_power(), 0);
    }

    #[test]
    fn quotient_rule() {
        let a = base();
        let d = R::resolvent(&a).diff(0);
        let expected = R::from_polynomial(&a, a.diff(0), 2);
        assert_eq!(d, expected);
    }

    #[test]
    fn sum_with_cancellation() {
        let a = base();
        let s = R::resolvent(&a).add_ref(&R::from_polynomial(&a, a.clone(), 2));
        // a/(a−A)²
        let expected = R::new(a.clone(), vec![P::zero(1), P::one(1)], 2).unwrap();
        assert_eq!(s, expected);
        assert!(s.equivalent(&expected).unwrap());
    }

    #[test]
    fn mixed_bases_rejected() {
        let r1 = R::resolvent(&base());
        let r2 = R::resolvent(&P::x(1, 0));
        assert!(matches!(r1.checked_add(&r2), Err(Error::MixedBases)));
    }

    #[test]
    fn evaluation_matches_structure() {
        let a = base();
        let r = R::resolvent(&a).diff(1);
        let z = [GaussianRational::from_i64(1), GaussianRational::from_ratio(1, 2)];
        let av = GaussianRational::from_i64(3);
        // 2p/(a−A)² at x=1, p=1/2: 1/(3 − 5/4)² = 16/49
        assert_eq!(r.evaluate(&z, &av).unwrap(), Some(GaussianRational::from_ratio(16, 49)));
        assert_eq!(R::resolvent(&a).evaluate(&z, &GaussianRational::from_ratio(5, 4)).unwrap(), None);
    }
}
