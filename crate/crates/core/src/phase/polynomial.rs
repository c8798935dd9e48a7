use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Coefficient};

use super::Symbol;

/// Largest total degree a monomial may reach.
pub const MAX_TOTAL_DEGREE: usize = 64;

/// Exponent sequence of length `2N`, ordered `(x1..xN, p1..pN)`.
pub type Exponent = Vec<u8>;

/// Sparse polynomial on `T*R^N` with exact coefficients.
///
/// Terms are kept in a `BTreeMap`, so iteration order (and therefore
/// printing and serialization) is canonical. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhasePolynomial<C> {
    dim: usize,
    terms: BTreeMap<Exponent, C>,
}

impl<C: Coefficient> PhasePolynomial<C> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "phase space dimension must be positive");
        PhasePolynomial { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C::one())
    }

    pub fn constant(dim: usize, c: C) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; 2 * dim], c);
        p
    }

    /// The coordinate `z^{var+1}` (0-based: `x_j` is `j`, `p_j` is `N + j`).
    pub fn variable(dim: usize, var: usize) -> Self {
        assert!(var < 2 * dim);
        let mut e = vec![0; 2 * dim];
        e[var] = 1;
        let mut p = Self::zero(dim);
        p.add_term(e, C::one());
        p
    }

    pub fn x(dim: usize, j: usize) -> Self {
        Self::variable(dim, j)
    }

    pub fn p(dim: usize, j: usize) -> Self {
        Self::variable(dim, dim + j)
    }

    pub fn monomial(dim: usize, exp: Exponent, c: C) -> Result<Self> {
        if exp.len() != 2 * dim {
            return Err(Error::DimensionMismatch { left: exp.len(), right: 2 * dim });
        }
        if exp.iter().map(|&e| e as usize).sum::<usize>() > MAX_TOTAL_DEGREE {
            return Err(Error::Capacity(format!("total degree exceeds {MAX_TOTAL_DEGREE}")));
        }
        let mut p = Self::zero(dim);
        p.add_term(exp, c);
        Ok(p)
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, C)>>(dim: usize, terms: I) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            p = p + Self::monomial(dim, e, c)?;
        }
        Ok(p)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[u8]) -> C {
        self.terms.get(exp).cloned().unwrap_or_else(C::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> C {
        self.coefficient(&vec![0; 2 * self.dim])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&k| k as usize).sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> usize {
        self.terms.keys().map(|e| e[var] as usize).max().unwrap_or(0)
    }

    fn add_term(&mut self, exp: Exponent, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Partial derivative `∂_μ` with the 1-based coordinate index `μ ∈ 1..=2N`.
    pub fn partial_derivative(&self, mu: usize) -> Result<Self> {
        if mu == 0 || mu > 2 * self.dim {
            return Err(Error::IndexOutOfRange { index: mu, dimension: self.dim });
        }
        Ok(self.diff(mu - 1))
    }

    /// Partial derivative with respect to the 0-based coordinate `var`.
    pub fn diff(&self, var: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            let k = e2[var];
            e2[var] -= 1;
            out.terms.insert(e2, c.clone() * C::from_i64(k as i64));
        }
        out
    }

    /// Mixed derivative given as derivative counts per coordinate.
    pub fn diff_multi(&self, counts: &[u8]) -> Self {
        let mut out = Self::zero(self.dim);
        'terms: for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let mut factor: i64 = 1;
            for (var, &k) in counts.iter().enumerate() {
                if e2[var] < k {
                    continue 'terms;
                }
                for j in 0..k {
                    factor *= (e2[var] - j) as i64;
                }
                e2[var] -= k;
            }
            out.terms.insert(e2, c.clone() * C::from_i64(factor));
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        let mut out = Self::zero(self.dim);
        for (e, v) in &self.terms {
            let s = v.clone() * c.clone();
            if !s.is_zero() {
                out.terms.insert(e.clone(), s);
            }
        }
        out
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.total_degree() + other.total_degree() > MAX_TOTAL_DEGREE
            && !self.is_zero()
            && !other.is_zero()
        {
            return Err(Error::Capacity(format!("product degree exceeds {MAX_TOTAL_DEGREE}")));
        }
        let mut acc: HashMap<Exponent, C> = HashMap::with_capacity(self.len() * other.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let v = c1.clone() * c2.clone();
                match acc.get_mut(&e) {
                    Some(s) => *s = s.clone() + v,
                    None => {
                        acc.insert(e, v);
                    }
                }
            }
        }
        Ok(PhasePolynomial {
            dim: self.dim,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Drop monomials of total degree above `max_degree`.
    pub fn truncate_degree(&self, max_degree: usize) -> Self {
        PhasePolynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().map(|&k| k as usize).sum::<usize>() <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exact evaluation at a point of `T*R^N`.
    pub fn evaluate(&self, point: &[C]) -> Result<C> {
        if point.len() != 2 * self.dim {
            return Err(Error::DimensionMismatch { left: point.len(), right: 2 * self.dim });
        }
        let mut total = C::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t = t * v.clone();
                }
            }
            total = total + t;
        }
        Ok(total)
    }

    /// `P(z + shift)`.
    pub fn translate(&self, shift: &[C]) -> Result<Self> {
        if shift.len() != 2 * self.dim {
            return Err(Error::DimensionMismatch { left: shift.len(), right: 2 * self.dim });
        }
        let shifted: Vec<Self> = (0..2 * self.dim)
            .map(|v| Self::variable(self.dim, v) + Self::constant(self.dim, shift[v].clone()))
            .collect();
        self.compose(&shifted)
    }

    /// Substitute `z^v ↦ images[v]`.
    pub fn compose(&self, images: &[Self]) -> Result<Self> {
        if images.len() != 2 * self.dim {
            return Err(Error::DimensionMismatch { left: images.len(), right: 2 * self.dim });
        }
        let dim = images.first().map(|p| p.dim).unwrap_or(self.dim);
        let mut out = PhasePolynomial::zero(dim);
        for (e, c) in &self.terms {
            let mut t = PhasePolynomial::constant(dim, c.clone());
            for (img, &k) in images.iter().zip(e) {
                if k > 0 {
                    t = t.checked_mul(&img.pow(k as usize))?;
                }
            }
            out = out + t;
        }
        Ok(out)
    }

    /// `g(self)` for a univariate polynomial `g` given by ascending coefficients.
    pub fn substitute_into(&self, coeffs: &[C]) -> Self {
        let mut acc = Self::zero(self.dim);
        for c in coeffs.iter().rev() {
            acc = &(&acc * self) + &Self::constant(self.dim, c.clone());
        }
        acc
    }

    pub fn map_coefficients<D: Coefficient, F: Fn(&C) -> D>(&self, f: F) -> PhasePolynomial<D> {
        PhasePolynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Real and imaginary parts as rational polynomials.
    pub fn split_parts(&self) -> (PhasePolynomial<BigRational>, PhasePolynomial<BigRational>) {
        (
            self.map_coefficients(|c| c.exact_parts().0),
            self.map_coefficients(|c| c.exact_parts().1),
        )
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.as_real().is_some())
    }

    /// Variable name for the 0-based coordinate index.
    pub fn variable_name(dim: usize, var: usize) -> String {
        let (base, j) = if var < dim { ("x", var) } else { ("p", var - dim) };
        if dim == 1 {
            base.to_string()
        } else {
            format!("{}{}", base, j + 1)
        }
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            n: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let (re, im) = c.exact_parts();
                    TermJson {
                        exp: e.iter().map(|&k| k as u32).collect(),
                        re: format_rational(&re),
                        im: format_rational(&im),
                    }
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolynomialJson) -> Result<Self> {
        if json.n == 0 {
            return Err(Error::Json("N must be positive".into()));
        }
        let mut p = Self::zero(json.n);
        for t in &json.terms {
            let re = parse_rational(&t.re).ok_or_else(|| Error::Json(format!("bad rational {}", t.re)))?;
            let im = parse_rational(&t.im).ok_or_else(|| Error::Json(format!("bad rational {}", t.im)))?;
            let c = C::from_parts(re, im)
                .ok_or_else(|| Error::Json("imaginary coefficient in a real ring".into()))?;
            let exp = t
                .exp
                .iter()
                .map(|&k| u8::try_from(k).map_err(|_| Error::Capacity("exponent too large".into())))
                .collect::<Result<Vec<u8>>>()?;
            p = p.checked_add(&Self::monomial(json.n, exp, c)?)?;
        }
        Ok(p)
    }
}

/// Wire form `{"N":1,"terms":[{"exp":[2,0],"re":"1/2","im":"0"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub re: String,
    pub im: String,
}

impl<C: Coefficient> Serialize for PhasePolynomial<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de, C: Coefficient> Deserialize<'de> for PhasePolynomial<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = PolynomialJson::deserialize(d)?;
        Self::from_json(&json).map_err(serde::de::Error::custom)
    }
}

impl<C: Coefficient> fmt::Display for PhasePolynomial<C> {
    /// Graded order: highest total degree first, then lexicographically
    /// descending exponents.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: usize = a.iter().map(|&k| k as usize).sum();
            let db: usize = b.iter().map(|&k| k as usize).sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let mut factors = Vec::new();
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(Self::variable_name(self.dim, v)),
                    _ => factors.push(format!("{}^{}", Self::variable_name(self.dim, v), k)),
                }
            }
            let mut ctext = c.to_text();
            let negative = ctext.starts_with('-');
            if negative {
                ctext.remove(0);
            }
            let body = if factors.is_empty() {
                ctext
            } else if ctext == "1" {
                factors.join("*")
            } else {
                format!("{}*{}", ctext, factors.join("*"))
            };
            match (i, negative) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> Add for &PhasePolynomial<C> {
    type Output = PhasePolynomial<C>;
    fn add(self, rhs: Self) -> PhasePolynomial<C> {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl<C: Coefficient> Add for PhasePolynomial<C> {
    type Output = PhasePolynomial<C>;
    fn add(self, rhs: Self) -> PhasePolynomial<C> {
        &self + &rhs
    }
}

impl<C: Coefficient> Sub for &PhasePolynomial<C> {
    type Output = PhasePolynomial<C>;
    fn sub(self, rhs: Self) -> PhasePolynomial<C> {
        self + &(-rhs)
    }
}

impl<C: Coefficient> Sub for PhasePolynomial<C> {
    type Output = PhasePolynomial<C>;
    fn sub(self, rhs: Self) -> PhasePolynomial<C> {
        &self - &rhs
    }
}

impl<C: Coefficient> Neg for &PhasePolynomial<C> {
    type Output = PhasePolynomial<C>;
    fn neg(self) -> PhasePolynomial<C> {
        PhasePolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl<C: Coefficient> Neg for PhasePolynomial<C> {
    type Output = PhasePolynomial<C>;
    fn neg(self) -> PhasePolynomial<C> {
        -&self
    }
}

impl<C: Coefficient> Mul for &PhasePolynomial<C> {
    type Output = PhasePolynomial<C>;
    /// Panics on dimension mismatch or degree overflow; use
    /// [`PhasePolynomial::checked_mul`] to handle those as errors.
    fn mul(self, rhs: Self) -> PhasePolynomial<C> {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl<C: Coefficient> Mul for PhasePolynomial<C> {
    type Output = PhasePolynomial<C>;
    fn mul(self, rhs: Self) -> PhasePolynomial<C> {
        &self * &rhs
    }
}

impl<C: Coefficient> Symbol for PhasePolynomial<C> {
    type Coeff = C;

    fn dimension(&self) -> usize {
        self.dim
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.dim)
    }
    fn one_like(&self) -> Self {
        Self::one(self.dim)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &C) -> Self {
        PhasePolynomial::scale(self, c)
    }
    fn diff(&self, var: usize) -> Self {
        PhasePolynomial::diff(self, var)
    }
    fn diff_multi(&self, counts: &[u8]) -> Self {
        PhasePolynomial::diff_multi(self, counts)
    }
    fn max_derivative_order(&self, var: usize) -> Option<usize> {
        Some(self.degree_in(var))
    }
}

/// Random polynomial with at most `max_terms` monomials of total degree
/// `≤ max_degree` and small integer-over-small-denominator coefficients.
pub fn random_polynomial<C: Coefficient, R: Rng>(
    rng: &mut R,
    dim: usize,
    max_degree: usize,
    max_terms: usize,
) -> PhasePolynomial<C> {
    let mut p = PhasePolynomial::zero(dim);
    let n_terms = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..n_terms {
        let deg = rng.gen_range(0..=max_degree);
        let mut e = vec![0u8; 2 * dim];
        for _ in 0..deg {
            e[rng.gen_range(0..2 * dim)] += 1;
        }
        let num = loop {
            let v: i64 = rng.gen_range(-5..=5);
            if v != 0 {
                break v;
            }
        };
        let den: i64 = rng.gen_range(1..=3);
        let c = C::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)));
        p = &p + &PhasePolynomial::monomial(dim, e, c).expect("valid monomial");
    }
    if p.is_zero() {
        PhasePolynomial::x(dim, 0)
    } else {
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, GaussianRational};
    use num_traits::One;

    type P = PhasePolynomial<GaussianRational>;

    fn x() -> P {
        P::x(1, 0)
    }
    fn p() -> P {
        P::p(1, 0)
    }

    #[test]
    fn power_rule() {
        let x2 = x().pow(2);
        assert_eq!(x2.partial_derivative(1).unwrap(), x().scale(&GaussianRational::from_i64(2)));
        assert!(x2.partial_derivative(2).unwrap().is_zero());
    }

    #[test]
    fn mixed_partials_of_xp() {
        let xp = &x() * &p();
        let a = xp.partial_derivative(1).unwrap().partial_derivative(2).unwrap();
        let b = xp.partial_derivative(2).unwrap().partial_derivative(1).unwrap();
        assert_eq!(a, P::one(1));
        assert_eq!(a, b);
    }

    #[test]
    fn derivative_index_checked() {
        assert!(matches!(x().partial_derivative(0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(x().partial_derivative(3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn degree_capacity_guard() {
        let big = P::monomial(1, vec![40, 0], GaussianRational::one()).unwrap();
        assert!(matches!(big.checked_mul(&big), Err(Error::Capacity(_))));
        assert!(P::monomial(1, vec![65, 0], GaussianRational::one()).is_err());
    }

    #[test]
    fn json_shape() {
        let a = (&x().pow(2) + &p().pow(2)).scale(&GaussianRational::from_ratio(1, 2));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"N":1,"terms":[{"exp":[0,2],"re":"1/2","im":"0"},{"exp":[2,0],"re":"1/2","im":"0"}]}"#
        );
        let back: P = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn display_is_graded() {
        let a = &(&x().pow(2).scale(&GaussianRational::from_ratio(1, 2)) - &p()) + &P::one(1);
        assert_eq!(a.to_string(), "1/2*x^2 - p + 1");
        let z = P::constant(1, GaussianRational::new(ratio(0, 1), ratio(1, 2)));
        assert_eq!(z.to_string(), "1/2*i");
    }

    #[test]
    fn translate_matches_evaluation() {
        let a = &(&x().pow(3) + &(&x() * &p())) + &P::constant(1, GaussianRational::from_i64(2));
        let shift = vec![GaussianRational::from_ratio(1, 3), GaussianRational::from_ratio(-2, 5)];
        let t = a.translate(&shift).unwrap();
        assert_eq!(t.constant_term(), a.evaluate(&shift).unwrap());
    }
}
