use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{check_order, PhasePolynomial, PolynomialJson};
use crate::scalar::Coefficient;

/// `B = Σ ℏ^e Q_{e,α}(z) ∂^α f(A₀(z))` with `f` kept formal.
///
/// `α` is a multi-index over the arguments of `f` (length 1 for a function
/// of one operator, where it is the derivative order `v`). `A₀` is the
/// ℏ-independent part of the operator symbol. The same type doubles as the
/// commutative algebra of formal expressions in `(ℏ, D₁, …, D_n)` with
/// polynomial coefficients, which is how the connected-graph exponential
/// is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct JetSeries<C> {
    dim: usize,
    vars: usize,
    order: usize,
    terms: BTreeMap<(usize, Vec<u8>), PhasePolynomial<C>>,
}

impl<C: Coefficient> JetSeries<C> {
    pub fn zero(dim: usize, vars: usize, order: usize) -> Result<Self> {
        check_order(order)?;
        Ok(JetSeries { dim, vars, order, terms: BTreeMap::new() })
    }

    /// The unit `1·ℏ⁰·D⁰`.
    pub fn one(dim: usize, vars: usize, order: usize) -> Result<Self> {
        let mut s = Self::zero(dim, vars, order)?;
        s.add_term(0, vec![0; vars], PhasePolynomial::one(dim));
        Ok(s)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Number of arguments of `f`.
    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, Vec<u8>), &PhasePolynomial<C>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Q_{e,v}` for a one-argument series.
    pub fn get(&self, e: usize, v: usize) -> PhasePolynomial<C> {
        self.get_multi(e, &[v as u8])
    }

    pub fn get_multi(&self, e: usize, alpha: &[u8]) -> PhasePolynomial<C> {
        self.terms
            .get(&(e, alpha.to_vec()))
            .cloned()
            .unwrap_or_else(|| PhasePolynomial::zero(self.dim))
    }

    /// Add `p·ℏ^e·D^α`, dropping it beyond the truncation order.
    pub fn add_term(&mut self, e: usize, alpha: Vec<u8>, p: PhasePolynomial<C>) {
        debug_assert_eq!(alpha.len(), self.vars);
        if e > self.order || p.is_zero() {
            return;
        }
        let key = (e, alpha);
        let sum = match self.terms.remove(&key) {
            Some(q) => &q + &p,
            None => p,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        out.terms.retain(|k, _| k.0 <= out.order);
        for ((e, a), p) in &other.terms {
            out.add_term(*e, a.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = JetSeries { terms: BTreeMap::new(), ..*self };
        for ((e, a), p) in &self.terms {
            out.add_term(*e, a.clone(), p.scale(c));
        }
        out
    }

    /// Product in the commutative algebra of `(ℏ, D)` expressions.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let mut out = JetSeries { dim: self.dim, vars: self.vars, order, terms: BTreeMap::new() };
        for ((e1, a1), p1) in &self.terms {
            for ((e2, a2), p2) in &other.terms {
                if e1 + e2 > order {
                    continue;
                }
                let a: Vec<u8> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                out.add_term(e1 + e2, a, p1.checked_mul(p2)?);
            }
        }
        Ok(out)
    }

    /// `exp(X)`; `X` must have no `ℏ⁰` part, so the series is finite.
    pub fn exp(&self) -> Result<Self> {
        if self.terms.keys().any(|k| k.0 == 0) {
            return Err(Error::Unsupported("exp of a series with an ℏ⁰ term".into()));
        }
        let mut result = Self::one(self.dim, self.vars, self.order)?;
        let mut power = result.clone();
        for n in 1..=self.order {
            power = power.mul(self)?.scale(&C::from_ratio(1, n as i64));
            if power.is_zero() {
                break;
            }
            result = result.add(&power)?;
        }
        Ok(result)
    }

    /// Lowest ℏ power present.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn max_derivative(&self) -> usize {
        self.terms.keys().map(|k| k.1.iter().map(|&x| x as usize).sum()).max().unwrap_or(0)
    }

    /// Every coefficient is real (zero imaginary part).
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|p| p.terms().all(|(_, c)| c.as_real().is_some()))
    }

    /// All odd powers of ℏ are absent.
    pub fn odd_orders_vanish(&self) -> bool {
        self.terms.keys().all(|k| k.0 % 2 == 0)
    }

    /// Terms at `ℏ^e` only.
    pub fn at_order(&self, e: usize) -> Vec<(Vec<u8>, PhasePolynomial<C>)> {
        self.terms
            .iter()
            .filter(|(k, _)| k.0 == e)
            .map(|(k, p)| (k.1.clone(), p.clone()))
            .collect()
    }

    pub fn with_order(&self, order: usize) -> Result<Self> {
        check_order(order)?;
        let mut out = self.clone();
        out.order = order;
        out.terms.retain(|k, _| k.0 <= order);
        Ok(out)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.vars != other.vars {
            return Err(Error::DimensionMismatch { left: self.vars, right: other.vars });
        }
        Ok(())
    }

    pub fn to_json(&self) -> JetSeriesJson {
        JetSeriesJson {
            order: self.order,
            vars: (self.vars != 1).then_some(self.vars),
            terms: self
                .terms
                .iter()
                .map(|((e, a), p)| JetTermJson {
                    hbar: *e,
                    deriv: if self.vars == 1 { Deriv::Single(a[0] as usize) } else { Deriv::Multi(a.iter().map(|&x| x as usize).collect()) },
                    poly: p.to_json(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &JetSeriesJson, dim: usize) -> Result<Self> {
        let vars = json.vars.unwrap_or(1);
        let mut out = Self::zero(dim, vars, json.order)?;
        for t in &json.terms {
            let alpha: Vec<u8> = match &t.deriv {
                Deriv::Single(v) => vec![*v as u8],
                Deriv::Multi(v) => v.iter().map(|&x| x as u8).collect(),
            };
            if alpha.len() != vars {
                return Err(Error::DimensionMismatch { left: alpha.len(), right: vars });
            }
            let p = PhasePolynomial::from_json(&t.poly)?;
            if p.dimension() != dim {
                return Err(Error::DimensionMismatch { left: p.dimension(), right: dim });
            }
            out.add_term(t.hbar, alpha, p);
        }
        Ok(out)
    }
}

/// `{"order":4,"terms":[{"hbar":2,"deriv":2,"poly":{…}}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetSeriesJson {
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<usize>,
    pub terms: Vec<JetTermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetTermJson {
    pub hbar: usize,
    pub deriv: Deriv,
    pub poly: PolynomialJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Deriv {
    Single(usize),
    Multi(Vec<usize>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    type J = JetSeries<GaussianRational>;
    type P = PhasePolynomial<GaussianRational>;

    #[test]
    fn exp_of_nilpotent_grade() {
        // exp(ℏ²·x·D) to ℏ⁴ = 1 + ℏ²xD + ℏ⁴x²D²/2
        let mut x = J::zero(1, 1, 4).unwrap();
        x.add_term(2, vec![1], P::x(1, 0));
        let e = x.exp().unwrap();
        assert_eq!(e.get(0, 0), P::one(1));
        assert_eq!(e.get(2, 1), P::x(1, 0));
        assert_eq!(e.get(4, 2), P::x(1, 0).pow(2).scale(&GaussianRational::from_ratio(1, 2)));
        assert_eq!(e.terms().count(), 3);
    }

    #[test]
    fn json_round_trip() {
        let mut s = J::one(1, 1, 4).unwrap();
        s.add_term(2, vec![3], P::p(1, 0).scale(&GaussianRational::from_ratio(-1, 4)));
        let text = serde_json::to_string(&s.to_json()).unwrap();
        assert!(text.contains(r#""hbar":2,"deriv":3"#));
        let back: JetSeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(J::from_json(&back, 1).unwrap(), s);
    }
}
