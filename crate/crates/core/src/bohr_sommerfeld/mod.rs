//! Semiclassical eigenvalues: the universal polynomials `P_{j,l}`, the
//! graph form of the action corrections, their kinetic-plus-potential
//! normal form, and the numerical pipeline with a finite-difference
//! Schrödinger oracle.

mod eigen;
mod oracle;
mod quadrature;
mod split;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use eigen::{bs_eigenvalues, fd_derivative, ActionEvaluator, BsLevel, MAX_BS_ORDER};
pub use oracle::{schrodinger_oracle, OracleResult};
pub use quadrature::{gauss_legendre, Jet, OrbitIntegrand, OrbitProblem};
pub use split::{reduce_action, ReducedKey, SplitMonomial, SplitSymbol};

use crate::error::{Error, Result};
use crate::graphs::{c_coefficient, enumerate_reduced, symmetry_order, ArrowGraph, EnumOptions};
use crate::phase::{contract, parse_symbol, PhasePolynomial, QuantizationTensor, Symbol};
use crate::scalar::{factorial, Coefficient};

/// `H(x, p)` with `N = 1`, optionally in the form `p²/2m + V(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian1D {
    h: PhasePolynomial<BigRational>,
    split: Option<SplitForm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitForm {
    pub mass: BigRational,
    /// Ascending coefficients of `V`.
    pub potential: Vec<BigRational>,
}

impl Hamiltonian1D {
    pub fn new(h: PhasePolynomial<BigRational>) -> Result<Self> {
        if h.dimension() != 1 {
            return Err(Error::DimensionMismatch { left: h.dimension(), right: 1 });
        }
        let split = detect_split(&h);
        Ok(Hamiltonian1D { h, split })
    }

    pub fn from_split(mass: BigRational, potential: Vec<BigRational>) -> Result<Self> {
        if !mass.is_positive() {
            return Err(Error::Unsupported("mass must be positive".into()));
        }
        let x = PhasePolynomial::<BigRational>::x(1, 0);
        let p = PhasePolynomial::<BigRational>::p(1, 0);
        let two_m = &mass * BigRational::from_integer(2.into());
        let kinetic = p.pow(2).scale(&(BigRational::one() / two_m));
        let v = x.substitute_into(&potential);
        Self::new(&kinetic + &v)
    }

    /// `V` given as text in `x`, e.g. `"x^4"` or `"x^2/2"`.
    pub fn parse_split(mass: BigRational, potential: &str) -> Result<Self> {
        Self::from_split(mass, parse_potential(potential)?)
    }

    pub fn symbol(&self) -> &PhasePolynomial<BigRational> {
        &self.h
    }

    pub fn split(&self) -> Option<&SplitForm> {
        self.split.as_ref()
    }
}

/// Ascending coefficients of a polynomial in `x` alone.
pub fn parse_potential(text: &str) -> Result<Vec<BigRational>> {
    let v = parse_symbol::<BigRational>(text, Some(1))?;
    if v.degree_in(1) > 0 {
        return Err(Error::Parse { position: 0, message: "potential must not depend on p".into() });
    }
    let deg = v.degree_in(0);
    Ok((0..=deg).map(|k| v.coefficient(&[k as u8, 0])).collect())
}

fn detect_split(h: &PhasePolynomial<BigRational>) -> Option<SplitForm> {
    let mut kinetic = BigRational::zero();
    let mut potential = vec![BigRational::zero(); h.degree_in(0) + 1];
    for (e, c) in h.terms() {
        match (e[0], e[1]) {
            (0, 2) => kinetic = c.clone(),
            (k, 0) => potential[k as usize] = c.clone(),
            _ => return None,
        }
    }
    if !kinetic.is_positive() {
        return None;
    }
    let mass = BigRational::one() / (kinetic * BigRational::from_integer(2.into()));
    Some(SplitForm { mass, potential })
}

/// `(i/2)^j` for even `j` (odd `j` never contributes).
fn half_i_even(j: usize) -> BigRational {
    debug_assert!(j.is_multiple_of(2));
    
    BigRational::new(BigInt::from(if (j / 2).is_multiple_of(2) { 1 } else { -1 }), BigInt::from(1u64 << j))
}

/// `P_{j,l}(H) = Σ_{reduced Γ, V = l−1, E = j} (i/2)^j (c_Γ/S_Γ) λ_Γ(H)`.
///
/// Zero for odd `j`, where every `c_Γ` vanishes.
pub fn universal_polynomial<T: Symbol>(h: &T, j: usize, l: usize) -> Result<T> {
    if j % 2 == 1 || l < 2 {
        return Ok(h.zero_like());
    }
    let tensor = QuantizationTensor::moyal(h.dimension());
    let mut out = h.zero_like();
    for g in enumerate_reduced(j, EnumOptions::default())? {
        if g.vertex_count() != l - 1 {
            continue;
        }
        let c = c_coefficient(&g)?;
        if c == 0 {
            continue;
        }
        let w = half_i_even(j) * BigRational::new(BigInt::from(c), BigInt::from(symmetry_order(&g)));
        let refs = vec![h; g.vertex_count()];
        let lam = contract(g.edges(), &refs, &tensor);
        out = out.add_ref(&lam.scale(&T::Coeff::from_rational(&w)));
    }
    Ok(out)
}

/// One contribution `weight · (d/dE)^derivative ∫_γ integrand dt` at a
/// fixed power of ℏ.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionTerm<T> {
    pub derivative: usize,
    pub weight: BigRational,
    pub integrand: T,
    pub label: String,
}

/// `S(E) − S₀(E) = Σ_j ℏ^j Σ terms`; `S₁ = π` sits on the left side as the
/// `−1/2` in `2π(n − 1/2)ℏ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSeries<T> {
    pub terms: BTreeMap<usize, Vec<ActionTerm<T>>>,
}

impl<T> ActionSeries<T> {
    pub fn graph_count(&self, j: usize) -> usize {
        self.terms.get(&j).map_or(0, |t| t.len())
    }
}

/// Which graph set expresses the corrections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionForm {
    /// Every reduced graph: `(iℏ/2)^E (−1)^V/V! (c/S) (d/dE)^{V−1} ∫λ_Γ dt`.
    Full,
    /// After integrating by parts on the level curves: only graphs with
    /// every vertex of degree at least two (ℏ² and ℏ⁴).
    Reduced,
}

/// Corrections through `ℏ^order` (`order ∈ {0, 2, 4}`; odd orders vanish).
pub fn action_corrections<T: Symbol>(h: &T, order: usize, form: ActionForm) -> Result<ActionSeries<T>> {
    if order > MAX_BS_ORDER {
        return Err(Error::Unsupported(format!("action corrections are implemented through ℏ^{MAX_BS_ORDER}")));
    }
    match form {
        ActionForm::Full => full_corrections(h, order),
        ActionForm::Reduced => reduced_corrections(h, order),
    }
}

fn full_corrections<T: Symbol>(h: &T, order: usize) -> Result<ActionSeries<T>> {
    let tensor = QuantizationTensor::moyal(h.dimension());
    let mut terms = BTreeMap::new();
    for j in (2..=order).step_by(2) {
        let mut list = Vec::new();
        for g in enumerate_reduced(j, EnumOptions::default())? {
            let c = c_coefficient(&g)?;
            if c == 0 {
                continue;
            }
            let v = g.vertex_count();
            let sign = if v % 2 == 0 { 1 } else { -1 };
            let w = half_i_even(j)
                * BigRational::new(BigInt::from(sign * c), BigInt::from(symmetry_order(&g)) * factorial(v));
            let refs = vec![h; v];
            list.push(ActionTerm {
                derivative: v - 1,
                weight: w,
                integrand: contract(g.edges(), &refs, &tensor),
                label: g.to_string(),
            });
        }
        terms.insert(j, list);
    }
    Ok(ActionSeries { terms })
}

/// The five ℏ⁴ graphs (and one ℏ² graph) with their orientations and
/// weights; `squared` marks the integrand `λ²` of the double edge.
fn reduced_graphs() -> Vec<(usize, usize, BigRational, Vec<(usize, usize)>, usize, bool, &'static str)> {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    vec![
        // (ℏ power, d/dE count, weight, arrows, vertices, squared, label)
        (2, 1, r(-1, 48), vec![(0, 1), (0, 1)], 2, false, "H⇉H"),
        (4, 1, r(1, 16 * 240), vec![(0, 1); 4], 2, false, "4-fold edge"),
        (4, 3, r(1, 16 * 288), vec![(0, 1), (0, 1)], 2, true, "(H⇉H)²"),
        (4, 2, r(-1, 16 * 90), vec![(0, 1), (0, 1), (0, 2), (1, 2)], 3, false, "triangle with double edge"),
        (4, 3, r(1, 16 * 360), vec![(0, 1), (1, 3), (3, 2), (2, 0)], 4, false, "directed 4-cycle"),
        (4, 2, r(-1, 16 * 72), vec![(0, 1), (0, 1), (1, 2), (1, 2)], 3, false, "H⇉H⇉H"),
    ]
}

fn reduced_corrections<T: Symbol>(h: &T, order: usize) -> Result<ActionSeries<T>> {
    let tensor = QuantizationTensor::moyal(h.dimension());
    let mut terms: BTreeMap<usize, Vec<ActionTerm<T>>> = BTreeMap::new();
    for (j, d, w, arrows, v, squared, label) in reduced_graphs() {
        if j > order {
            continue;
        }
        let g = ArrowGraph::new(v, arrows)?;
        let refs = vec![h; v];
        let mut lam = contract(g.arrows(), &refs, &tensor);
        if squared {
            lam = lam.mul_ref(&lam);
        }
        terms.entry(j).or_default().push(ActionTerm { derivative: d, weight: w, integrand: lam, label: label.into() });
    }
    Ok(ActionSeries { terms })
}

/// Normal form (see [`reduce_action`]) of the corrections for the abstract
/// kinetic-plus-potential Hamiltonian, keyed by ℏ power.
pub fn split_normal_form(form: ActionForm, order: usize) -> Result<BTreeMap<usize, BTreeMap<ReducedKey, BigRational>>> {
    let series = action_corrections(&SplitSymbol::hamiltonian(), order, form)?;
    Ok(series
        .terms
        .iter()
        .map(|(j, ts)| {
            let items: Vec<_> = ts.iter().map(|t| (t.derivative, t.weight.clone(), t.integrand.clone())).collect();
            (*j, reduce_action(&items))
        })
        .collect())
}

/// `−(μ/24) d/dE ∫V″ dt` and `μ²/(2⁷3²)[(7/5)(d/dE)³∫V″² dt − (d/dE)²∫V⁗ dt]`.
pub fn split_reference() -> BTreeMap<usize, BTreeMap<ReducedKey, BigRational>> {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let mut two = BTreeMap::new();
    two.insert(ReducedKey { mu: 1, n: 1, v: vec![0, 0, 1] }, r(-1, 24));
    let mut four = BTreeMap::new();
    four.insert(ReducedKey { mu: 2, n: 3, v: vec![0, 0, 2] }, r(7, 5) * r(1, 1152));
    four.insert(ReducedKey { mu: 2, n: 2, v: vec![0, 0, 0, 0, 1] }, r(-1, 1152));
    let mut out = BTreeMap::new();
    out.insert(2, two);
    out.insert(4, four);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional_calculus::labeled_jets;
    use crate::phase::HbarSeries;
    use crate::scalar::{Coefficient, GaussianRational};
    use crate::star_products::StarConfig;

    #[test]
    fn p23_is_minus_eighth_bracket() {
        let h = Hamiltonian1D::parse_split(BigRational::one(), "x^4 + x^3").unwrap();
        assert!(universal_polynomial(h.symbol(), 2, 2).unwrap().is_zero());
        let p23 = universal_polynomial(h.symbol(), 2, 3).unwrap();
        let b2 = crate::phase::bracket_k(h.symbol(), h.symbol(), 2, &QuantizationTensor::moyal(1)).unwrap();
        assert_eq!(p23, b2.scale(&BigRational::new((-1).into(), 8.into())));
        assert!(universal_polynomial(h.symbol(), 2, 5).unwrap().is_zero());
        assert!(universal_polynomial(h.symbol(), 3, 3).unwrap().is_zero());
    }

    #[test]
    fn universal_polynomials_match_resolvent_jets() {
        let h = crate::phase::parse_symbol::<BigRational>("x^3 + x*p^2 + p", Some(1)).unwrap();
        let hc = h.map_coefficients(GaussianRational::from_rational);
        let a = HbarSeries::constant(4, hc).unwrap();
        let jets = labeled_jets(&a, &StarConfig::moyal(1, 4).unwrap()).unwrap();
        for j in [2usize, 4] {
            for l in 2..=3 * j / 2 + 1 {
                let p = universal_polynomial(&h, j, l).unwrap().map_coefficients(GaussianRational::from_rational);
                let q = jets.get(j, l - 1).scale(&GaussianRational::from_rational(&BigRational::from_integer(factorial(l - 1))));
                assert_eq!(p, q, "P_{{{j},{l}}}");
            }
        }
    }

    #[test]
    fn graph_counts() {
        let h = SplitSymbol::hamiltonian();
        let full = action_corrections(&h, 4, ActionForm::Full).unwrap();
        assert_eq!(full.graph_count(2), 2);
        let reduced = action_corrections(&h, 4, ActionForm::Reduced).unwrap();
        assert_eq!(reduced.graph_count(4), 5);
    }

    #[test]
    fn split_form_matches_reference() {
        let want = split_reference();
        assert_eq!(split_normal_form(ActionForm::Reduced, 4).unwrap(), want);
        assert_eq!(split_normal_form(ActionForm::Full, 4).unwrap(), want);
    }

    #[test]
    fn detects_split_form() {
        let h = Hamiltonian1D::parse_split(BigRational::new(1.into(), 2.into()), "x^2/2").unwrap();
        let s = h.split().unwrap();
        assert_eq!(s.mass, BigRational::new(1.into(), 2.into()));
        assert_eq!(s.potential[2], BigRational::new(1.into(), 2.into()));
    }
}
