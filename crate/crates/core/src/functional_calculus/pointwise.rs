//! Pointwise reference: `f(Â) = Σ_k f^{(k)}(a₀)/k! (Â − a₀)^{⋆k}` evaluated
//! at the point where `A₀ = a₀`.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::phase::{HbarSeries, PhasePolynomial, ResolventSymbol};
use crate::scalar::ComplexCoefficient;
use crate::star_products::{moyal, StarConfig};

use super::{labeled_jets, materialize, FunctionJet, JetSeries, Materialized};

type Series<C> = HbarSeries<PhasePolynomial<C>>;

/// `Σ_{e,k} ℏ^e c_{e,k} f^{(k)}(a₀)/k!` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointwiseJets<C> {
    pub a0: C,
    /// `c_{e,k}`: ℏ^e coefficient of `(A − a₀)^{⋆k}` at the point.
    pub terms: BTreeMap<(usize, usize), C>,
}

impl<C: ComplexCoefficient> PointwiseJets<C> {
    /// Value of `B` at the point for a concrete `f` (without `e^{r a₀}` for
    /// the exponential). `None` if `f` is formal.
    pub fn evaluate(&self, f: &FunctionJet<C>, order: usize) -> Option<Vec<C>> {
        let mut out = vec![C::zero(); order + 1];
        for (&(e, k), c) in &self.terms {
            if e <= order {
                let d = f.scaled_derivative(k, &self.a0)?;
                out[e] = out[e].clone() + c.clone() * d * C::from_rational(&inv_factorial(k));
            }
        }
        Some(out)
    }

    /// Same data in the shape of [`JetSeries`] values at the point:
    /// `Q_{e,k}(z₀) = c_{e,k}/k!`.
    pub fn as_jet_values(&self) -> BTreeMap<(usize, usize), C> {
        self.terms
            .iter()
            .map(|(&(e, k), c)| ((e, k), c.clone() * C::from_rational(&inv_factorial(k))))
            .collect()
    }
}

fn inv_factorial(k: usize) -> num_rational::BigRational {
    num_rational::BigRational::new(1.into(), crate::scalar::factorial(k))
}

/// Translate so that `z₀` becomes the origin.
fn translated<C: ComplexCoefficient>(a: &Series<C>, z0: &[C]) -> Result<Series<C>> {
    let coeffs: Vec<_> = a.coeffs().iter().map(|c| c.translate(z0)).collect::<Result<_>>()?;
    HbarSeries::new(a.order(), coeffs, &PhasePolynomial::zero(a.dimension()))
}

/// `(A − a₀)^{⋆m}` at the point, for `m = 0..=max_power`, ℏ coefficients
/// up to `order`.
fn powers_at_point<C: ComplexCoefficient>(
    a: &Series<C>,
    z0: &[C],
    cfg: &StarConfig,
    max_power: usize,
) -> Result<(C, Vec<Vec<C>>)> {
    let order = cfg.truncation_order.min(a.order());
    let dim = a.dimension();
    let t = translated(a, z0)?.with_order(order)?;
    let a0 = t.coeff(0).constant_term();
    let shift = HbarSeries::constant(order, PhasePolynomial::constant(dim, a0.clone()))?;
    let base = t.sub(&shift)?;
    let zero = PhasePolynomial::zero(dim);
    let mut acc = HbarSeries::constant(order, PhasePolynomial::one(dim))?;
    let mut out = Vec::with_capacity(max_power + 1);
    let origin = vec![C::zero(); 2 * dim];
    for m in 0..=max_power {
        if m > 0 {
            acc = moyal(&acc, &base, cfg)?;
            // Degree above order−j at ℏ^j can no longer reach the origin.
            let trimmed: Vec<_> =
                acc.coeffs().iter().enumerate().map(|(j, c)| c.truncate_degree(order - j)).collect();
            acc = HbarSeries::new(order, trimmed, &zero)?;
        }
        out.push(acc.coeffs().iter().map(|c| c.evaluate(&origin)).collect::<Result<_>>()?);
    }
    Ok((a0, out))
}

/// The Taylor expansion of `f` around `a₀ = A₀(z₀)` pushed through star
/// powers, `k ≤ 2·order` (higher powers start beyond the truncation).
pub fn pointwise_jets<C: ComplexCoefficient>(a: &Series<C>, z0: &[C], cfg: &StarConfig) -> Result<PointwiseJets<C>> {
    let order = cfg.truncation_order.min(a.order());
    let (a0, powers) = powers_at_point(a, z0, cfg, 2 * order)?;
    let mut terms = BTreeMap::new();
    for (k, vals) in powers.iter().enumerate() {
        for (e, v) in vals.iter().enumerate() {
            if !v.is_zero() {
                terms.insert((e, k), v.clone());
            }
        }
    }
    Ok(PointwiseJets { a0, terms })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NotaReport {
    pub power: usize,
    /// Lowest ℏ power of `(A − a₀)^{⋆m}` at the point.
    pub valuation: Option<usize>,
    pub required: usize,
    pub holds: bool,
}

/// `(A − a₀)^{⋆m}` vanishes at the point to order `ℏ^{⌈m/2⌉}`.
pub fn nota_check<C: ComplexCoefficient>(
    a: &Series<C>,
    z0: &[C],
    cfg: &StarConfig,
    max_power: usize,
) -> Result<Vec<NotaReport>> {
    let (_, powers) = powers_at_point(a, z0, cfg, max_power)?;
    Ok(powers
        .iter()
        .enumerate()
        .map(|(m, vals)| {
            let valuation = vals.iter().position(|v| !v.is_zero());
            let required = m.div_ceil(2);
            NotaReport { power: m, valuation, required, holds: valuation.is_none_or(|v| v >= required) }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventCheck<C> {
    pub symbol: HbarSeries<ResolventSymbol<C>>,
    pub left_ok: bool,
    pub right_ok: bool,
    /// Lowest ℏ order where `h ⋆ (a − A)` or `(a − A) ⋆ h` differs from 1.
    pub first_failure: Option<usize>,
}

impl<C> ResolventCheck<C> {
    pub fn holds(&self) -> bool {
        self.left_ok && self.right_ok
    }
}

/// Build `h_a` from the graph sum and test `h ⋆ (a − A) = (a − A) ⋆ h = 1`
/// exactly in the algebra of rational functions in `a`.
pub fn resolvent_symbol_check<C: ComplexCoefficient>(a: &Series<C>, cfg: &StarConfig) -> Result<ResolventCheck<C>> {
    let order = cfg.truncation_order.min(a.order());
    let jets: JetSeries<C> = labeled_jets(a, cfg)?;
    let base = a.coeff(0);
    let Materialized::Resolvent(h) = materialize(&jets, &base, &FunctionJet::Resolvent)? else {
        unreachable!("resolvent materializes to a resolvent series")
    };
    let rzero = ResolventSymbol::from_polynomial(&base, PhasePolynomial::zero(a.dimension()), 0);
    let mut coeffs = vec![ResolventSymbol::a_minus_base(&base)];
    for k in 1..=order {
        coeffs.push(ResolventSymbol::from_polynomial(&base, -&a.coeff(k), 0));
    }
    let a_minus = HbarSeries::new(order, coeffs, &rzero)?;
    let left = moyal(&h, &a_minus, cfg)?;
    let right = moyal(&a_minus, &h, cfg)?;
    let one = ResolventSymbol::from_polynomial(&base, PhasePolynomial::one(a.dimension()), 0);
    let bad = |s: &HbarSeries<ResolventSymbol<C>>| {
        (0..=order).find(|&k| if k == 0 { s.coeff(0) != one } else { s.coeff(k) != rzero })
    };
    let (lf, rf) = (bad(&left), bad(&right));
    let first_failure = match (lf, rf) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    Ok(ResolventCheck { symbol: h, left_ok: lf.is_none(), right_ok: rf.is_none(), first_failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Coefficient, GaussianRational};
    use num_traits::Zero;

    type G = GaussianRational;
    type P = PhasePolynomial<G>;

    fn cubic() -> P {
        let x = P::x(1, 0);
        let p = P::p(1, 0);
        &(&x.pow(3) + &(&x * &p.pow(2))) + &p
    }

    #[test]
    fn pointwise_matches_graph_sum() {
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let a = HbarSeries::constant(4, cubic()).unwrap();
        let z0 = [G::from_ratio(1, 2), G::from_i64(-1)];
        let pw = pointwise_jets(&a, &z0, &cfg).unwrap();
        let jets = labeled_jets(&a, &cfg).unwrap();
        let mut graph = BTreeMap::new();
        for ((e, al), q) in jets.terms() {
            let v = q.evaluate(&z0).unwrap();
            if !v.is_zero() {
                graph.insert((*e, al[0] as usize), v);
            }
        }
        assert_eq!(graph, pw.as_jet_values());
    }

    #[test]
    fn nota_low_powers() {
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let a = HbarSeries::constant(4, cubic()).unwrap();
        let r = nota_check(&a, &[G::from_i64(1), G::from_i64(2)], &cfg, 4).unwrap();
        assert!(r.iter().all(|n| n.holds));
    }

    #[test]
    fn resolvent_inverts() {
        let cfg = StarConfig::moyal(1, 4).unwrap();
        let a = HbarSeries::constant(4, cubic()).unwrap();
        let r = resolvent_symbol_check(&a, &cfg).unwrap();
        assert!(r.holds(), "{:?}", r.first_failure);
    }
}
