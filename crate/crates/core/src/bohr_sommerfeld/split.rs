//! Kinetic-plus-potential symbols `H = μp²/2 + V(x)` with `V` left
//! abstract: polynomials in `p`, `μ = 1/m` and the derivatives `V^{(r)}(x)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::phase::Symbol;
use crate::scalar::format_rational;

/// `μ^mu p^p Π_r (V^{(r)})^{v[r]}`; `v` has no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplitMonomial {
    pub mu: u8,
    pub p: u8,
    pub v: Vec<u8>,
}

impl SplitMonomial {
    fn trimmed(mut self) -> Self {
        while self.v.last() == Some(&0) {
            self.v.pop();
        }
        self
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.v.len().max(other.v.len());
        let v = (0..n)
            .map(|r| self.v.get(r).copied().unwrap_or(0) + other.v.get(r).copied().unwrap_or(0))
            .collect();
        SplitMonomial { mu: self.mu + other.mu, p: self.p + other.p, v }.trimmed()
    }
}

/// Polynomial in `p`, `μ` and `V, V′, V″, …` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSymbol {
    terms: BTreeMap<SplitMonomial, BigRational>,
}

impl SplitSymbol {
    pub fn zero() -> Self {
        SplitSymbol { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(SplitMonomial { mu: 0, p: 0, v: vec![] }, BigRational::one())
    }

    pub fn monomial(m: SplitMonomial, c: BigRational) -> Self {
        let mut s = Self::zero();
        s.add_term(m.trimmed(), c);
        s
    }

    /// `V^{(r)}`.
    pub fn v_derivative(r: usize) -> Self {
        let mut v = vec![0; r + 1];
        v[r] = 1;
        Self::monomial(SplitMonomial { mu: 0, p: 0, v }, BigRational::one())
    }

    /// `μp²/2 + V`.
    pub fn hamiltonian() -> Self {
        let kinetic = Self::monomial(SplitMonomial { mu: 1, p: 2, v: vec![] }, BigRational::new(1.into(), 2.into()));
        kinetic.add_ref(&Self::v_derivative(0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SplitMonomial, &BigRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: SplitMonomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }
}

impl Symbol for SplitSymbol {
    type Coeff = BigRational;

    fn dimension(&self) -> usize {
        1
    }

    fn zero_like(&self) -> Self {
        Self::zero()
    }

    fn one_like(&self) -> Self {
        Self::one()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (m, d) in &self.terms {
            out.add_term(m.clone(), d * c);
        }
        out
    }

    /// `var = 0` is `x` (acting on the `V^{(r)}`), `var = 1` is `p`.
    fn diff(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if var == 1 {
                if m.p > 0 {
                    let mut n = m.clone();
                    n.p -= 1;
                    out.add_term(n, c * BigRational::from_integer(BigInt::from(m.p)));
                }
                continue;
            }
            for (r, &e) in m.v.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut n = m.clone();
                n.v[r] -= 1;
                if n.v.len() <= r + 1 {
                    n.v.push(0);
                }
                n.v[r + 1] += 1;
                out.add_term(n.trimmed(), c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    fn max_derivative_order(&self, var: usize) -> Option<usize> {
        (var == 1).then(|| self.terms.keys().map(|m| m.p as usize).max().unwrap_or(0))
    }
}

fn v_name(r: usize) -> String {
    match r {
        0 => "V".into(),
        1..=3 => format!("V{}", "'".repeat(r)),
        _ => format!("V({r})"),
    }
}

impl fmt::Display for SplitMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let pw = |name: String, e: u8| if e == 1 { name } else { format!("{name}^{e}") };
        if self.mu > 0 {
            parts.push(pw("mu".into(), self.mu));
        }
        if self.p > 0 {
            parts.push(pw("p".into(), self.p));
        }
        for (r, &e) in self.v.iter().enumerate() {
            if e > 0 {
                parts.push(pw(v_name(r), e));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl fmt::Display for SplitSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{}*{}", format_rational(c), m)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `(d/dE)^n ∫_γ μ^mu G dt` with `G` a product of potential derivatives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedKey {
    pub mu: i32,
    pub n: usize,
    pub v: Vec<u8>,
}

impl fmt::Display for ReducedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = SplitMonomial { mu: 0, p: 0, v: self.v.clone() };
        write!(f, "mu^{}*(d/dE)^{} ∫ {} dt", self.mu, self.n, g)
    }
}

/// Normal form of a sum of `weight·(d/dE)^n ∫_γ integrand dt` terms for
/// kinetic-plus-potential `H`, using along the orbit (`I_k[G] = ∫ G p^{2k} dt`)
///
/// - `d/dE I_k[G] = (2k−1)/μ · I_{k−1}[G]` for `k ≥ 1`,
/// - `d/dE I_0[G·V′] = I_0[G′]`,
/// - odd powers of `p` integrate to zero.
///
/// Terms are rewritten until no `p` and no `V′` factor can be removed.
pub fn reduce_action(terms: &[(usize, BigRational, SplitSymbol)]) -> BTreeMap<ReducedKey, BigRational> {
    let mut out: BTreeMap<ReducedKey, BigRational> = BTreeMap::new();
    // (coef, μ power, n, k, G)
    let mut work: Vec<(BigRational, i32, usize, usize, Vec<u8>)> = Vec::new();
    for (n, w, integrand) in terms {
        for (m, c) in integrand.terms() {
            if m.p % 2 == 1 {
                continue;
            }
            work.push((w * c, m.mu as i32, *n, m.p as usize / 2, m.v.clone()));
        }
    }
    while let Some((c, mu, n, k, g)) = work.pop() {
        if c.is_zero() {
            continue;
        }
        if k >= 1 && n >= 1 {
            let f = BigRational::from_integer(BigInt::from(2 * k - 1));
            work.push((c * f, mu - 1, n - 1, k - 1, g));
        } else if k == 0 && n >= 1 && g.get(1).copied().unwrap_or(0) > 0 {
            let mut rest = g.clone();
            rest[1] -= 1;
            let r = SplitSymbol::monomial(SplitMonomial { mu: 0, p: 0, v: rest }, BigRational::one());
            for (m, d) in r.diff(0).terms() {
                work.push((&c * d, mu, n - 1, 0, m.v.clone()));
            }
        } else {
            let key = ReducedKey { mu, n, v: g };
            let e = out.entry(key.clone()).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                out.remove(&key);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::LabeledGraph;
    use crate::lambda_eval::lambda;
    use crate::phase::QuantizationTensor;

    #[test]
    fn derivatives() {
        let h = SplitSymbol::hamiltonian();
        assert_eq!(h.diff(0), SplitSymbol::v_derivative(1));
        let hp = SplitSymbol::monomial(SplitMonomial { mu: 1, p: 1, v: vec![] }, BigRational::one());
        assert_eq!(h.diff(1), hp);
    }

    #[test]
    fn double_edge_is_two_mu_v2() {
        let h = SplitSymbol::hamiltonian();
        let g = LabeledGraph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let l = lambda(&g, &[h.clone(), h], &QuantizationTensor::moyal(1)).unwrap();
        let want = SplitSymbol::monomial(SplitMonomial { mu: 1, p: 0, v: vec![0, 0, 1] }, BigRational::from_integer(2.into()));
        assert_eq!(l, want);
    }

    #[test]
    fn reduction_rules() {
        // d/dE ∫ μ p² V″ dt = ∫ V″ dt
        let t = SplitSymbol::monomial(SplitMonomial { mu: 1, p: 2, v: vec![0, 0, 1] }, BigRational::one());
        let r = reduce_action(&[(1, BigRational::one(), t)]);
        assert_eq!(r.len(), 1);
        assert_eq!(r[&ReducedKey { mu: 0, n: 0, v: vec![0, 0, 1] }], BigRational::one());
        // d/dE ∫ V′V‴ dt = ∫ V⁗ dt
        let t = SplitSymbol::monomial(SplitMonomial { mu: 0, p: 0, v: vec![0, 1, 0, 1] }, BigRational::one());
        let r = reduce_action(&[(1, BigRational::one(), t)]);
        assert_eq!(r[&ReducedKey { mu: 0, n: 0, v: vec![0, 0, 0, 0, 1] }], BigRational::one());
    }
}
