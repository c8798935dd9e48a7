use std::collections::HashMap;

use crate::error::Result;
use crate::graphs::{
    c_coefficient, enumerate_reduced, reduced_labeled_multisets, symmetry_order, ArrowGraph, EnumOptions,
};
use crate::phase::{contract, HbarSeries, PhasePolynomial, QuantizationTensor};
use crate::scalar::{half_i_pow, ComplexCoefficient};
use crate::star_products::{require_antisymmetric, StarConfig};

use super::JetSeries;

type Series<C> = HbarSeries<PhasePolynomial<C>>;

/// `λ_Γ` with each vertex carrying a graded symbol, expanded over vertex
/// grades: entry `s` collects all grade choices summing to `s`.
///
/// Graphs factor over components; each component is keyed by its induced
/// arrows with vertex order kept, so the memo is valid for any tensor.
pub(crate) struct GradedLambda<'a, C: ComplexCoefficient> {
    symbol: &'a Series<C>,
    tensor: &'a QuantizationTensor,
    budget: usize,
    grades: Vec<usize>,
    memo: HashMap<ArrowGraph, Vec<PhasePolynomial<C>>>,
}

impl<'a, C: ComplexCoefficient> GradedLambda<'a, C> {
    pub fn new(symbol: &'a Series<C>, tensor: &'a QuantizationTensor, budget: usize) -> Self {
        let grades = (0..=budget.min(symbol.order())).filter(|&k| !symbol.coeff(k).is_zero()).collect();
        GradedLambda { symbol, tensor, budget, grades, memo: HashMap::new() }
    }

    pub fn eval(&mut self, g: &ArrowGraph, budget: usize) -> Vec<PhasePolynomial<C>> {
        let dim = self.symbol.dimension();
        let budget = budget.min(self.budget);
        let mut acc = vec![PhasePolynomial::zero(dim); budget + 1];
        acc[0] = PhasePolynomial::one(dim);
        for keep in g.components() {
            let comp = normalize(&g.induced(&keep));
            let val = match self.memo.get(&comp) {
                Some(v) => v.clone(),
                None => {
                    let v = self.component(&comp);
                    self.memo.insert(comp, v.clone());
                    v
                }
            };
            acc = convolve(&acc, &val, budget);
            if acc.iter().all(|p| p.is_zero()) {
                break;
            }
        }
        acc
    }

    fn component(&self, comp: &ArrowGraph) -> Vec<PhasePolynomial<C>> {
        let dim = self.symbol.dimension();
        let mut out = vec![PhasePolynomial::zero(dim); self.budget + 1];
        let v = comp.vertex_count();
        let mut choice = vec![0usize; v];
        loop {
            let s: usize = choice.iter().map(|&i| self.grades[i]).sum();
            if s <= self.budget {
                let verts: Vec<PhasePolynomial<C>> = choice.iter().map(|&i| self.symbol.coeff(self.grades[i])).collect();
                let refs: Vec<&PhasePolynomial<C>> = verts.iter().collect();
                out[s] = &out[s] + &contract(comp.arrows(), &refs, self.tensor);
            }
            if !advance(&mut choice, self.grades.len()) {
                break;
            }
        }
        out
    }
}

fn advance(choice: &mut [usize], base: usize) -> bool {
    for c in choice.iter_mut() {
        *c += 1;
        if *c < base {
            return true;
        }
        *c = 0;
    }
    false
}

fn convolve<C: ComplexCoefficient>(
    a: &[PhasePolynomial<C>],
    b: &[PhasePolynomial<C>],
    budget: usize,
) -> Vec<PhasePolynomial<C>> {
    let dim = a[0].dimension();
    let mut out = vec![PhasePolynomial::zero(dim); budget + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(budget + 1 - i) {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

/// Arrows sorted, vertex numbering kept.
fn normalize(g: &ArrowGraph) -> ArrowGraph {
    let mut a = g.arrows().to_vec();
    a.sort();
    ArrowGraph::new(g.vertex_count(), a).expect("valid")
}

/// Order-preserving normal form of a whole graph: components normalized
/// and sorted. Graphs with equal keys have equal `λ`.
fn component_key(g: &ArrowGraph) -> ArrowGraph {
    let mut comps: Vec<ArrowGraph> = g.components().iter().map(|k| normalize(&g.induced(k))).collect();
    comps.sort();
    let mut arrows = Vec::new();
    let mut off = 0;
    for c in &comps {
        arrows.extend(c.arrows().iter().map(|&(a, b)| (a + off, b + off)));
        off += c.vertex_count();
    }
    ArrowGraph::new(off, arrows).expect("valid")
}

fn rational_weight<C: ComplexCoefficient>(e: usize, num: i128, den: u128) -> C {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    half_i_pow::<C>(e) * C::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
}

fn order_of<C: ComplexCoefficient>(a: &Series<C>, cfg: &StarConfig) -> usize {
    cfg.truncation_order.min(a.order())
}

/// Multiply by `exp(Σ_i (A_i − A_{i,0}) D_i)`, turning `∂^α f(A)` into
/// derivatives at the ℏ-independent part `A₀`.
pub(crate) fn taylor_shift<C: ComplexCoefficient>(raw: JetSeries<C>, symbols: &[&Series<C>]) -> Result<JetSeries<C>> {
    let n = symbols.len();
    let mut delta = JetSeries::zero(raw.dimension(), n, raw.order())?;
    for (i, a) in symbols.iter().enumerate() {
        for k in 1..=raw.order().min(a.order()) {
            let mut alpha = vec![0u8; n];
            alpha[i] = 1;
            delta.add_term(k, alpha, a.coeff(k));
        }
    }
    if delta.is_zero() {
        return Ok(raw);
    }
    raw.mul(&delta.exp()?)
}

/// Sum over reduced labeled graphs of `(1/E!)(iℏ/2)^E λ_Γ(A) f^{(V)}(A)/V!`.
///
/// Works with any tensor (including standard order).
pub fn labeled_jets<C: ComplexCoefficient>(a: &Series<C>, cfg: &StarConfig) -> Result<JetSeries<C>> {
    cfg.tensor.check_dimension(a.dimension())?;
    let order = order_of(a, cfg);
    let dim = a.dimension();
    let mut raw = JetSeries::one(dim, 1, order)?;
    let mut lam = GradedLambda::new(a, &cfg.tensor, order);
    for e in 1..=order {
        let mut grouped: HashMap<ArrowGraph, u64> = HashMap::new();
        for class in reduced_labeled_multisets(e) {
            *grouped.entry(component_key(&class.graph.arrows())).or_default() += class.count;
        }
        let mut keys: Vec<_> = grouped.into_iter().collect();
        keys.sort();
        for (key, count) in keys {
            let v = key.vertex_count();
            let w: C = rational_weight(e, count as i128, (bigfact(e) * bigfact(v)) as u128);
            let vals = lam.eval(&key, order - e);
            for (s, p) in vals.iter().enumerate() {
                raw.add_term(e + s, vec![v as u8], p.scale(&w));
            }
        }
    }
    taylor_shift(raw, &[a])
}

fn bigfact(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Sum over unlabeled reduced graphs of `(iℏ/2)^E (c_Γ/S_Γ) λ_Γ(A) f^{(V)}(A)/V!`.
pub fn unlabeled_jets<C: ComplexCoefficient>(a: &Series<C>, cfg: &StarConfig) -> Result<JetSeries<C>> {
    require_antisymmetric(&cfg.tensor)?;
    cfg.tensor.check_dimension(a.dimension())?;
    let order = order_of(a, cfg);
    let mut raw = JetSeries::one(a.dimension(), 1, order)?;
    let mut lam = GradedLambda::new(a, &cfg.tensor, order);
    for e in 1..=order {
        for g in enumerate_reduced(e, EnumOptions::default())? {
            let c = c_coefficient(&g)?;
            if c == 0 {
                continue;
            }
            let v = g.vertex_count();
            let w: C = rational_weight(e, c, symmetry_order(&g) as u128 * bigfact(v) as u128);
            let vals = lam.eval(&g.to_labeled().arrows(), order - e);
            for (s, p) in vals.iter().enumerate() {
                raw.add_term(e + s, vec![v as u8], p.scale(&w));
            }
        }
    }
    taylor_shift(raw, &[a])
}

/// `exp[Σ_{connected} (iℏ/2)^E (c_Γ/S_Γ) λ_Γ(A) D^V/V!] f(A)`.
pub fn connected_jets<C: ComplexCoefficient>(a: &Series<C>, cfg: &StarConfig) -> Result<JetSeries<C>> {
    let x = connected_exponent(a, cfg)?;
    taylor_shift(x.exp()?, &[a])
}

/// The exponent of the connected-graph form.
pub fn connected_exponent<C: ComplexCoefficient>(a: &Series<C>, cfg: &StarConfig) -> Result<JetSeries<C>> {
    require_antisymmetric(&cfg.tensor)?;
    cfg.tensor.check_dimension(a.dimension())?;
    let order = order_of(a, cfg);
    let mut x = JetSeries::zero(a.dimension(), 1, order)?;
    let mut lam = GradedLambda::new(a, &cfg.tensor, order);
    let opts = EnumOptions { connected_only: true, ..Default::default() };
    for e in 1..=order {
        for g in enumerate_reduced(e, opts)? {
            let c = c_coefficient(&g)?;
            if c == 0 {
                continue;
            }
            let v = g.vertex_count();
            let w: C = rational_weight(e, c, symmetry_order(&g) as u128 * bigfact(v) as u128);
            let vals = lam.eval(&g.to_labeled().arrows(), order - e);
            for (s, p) in vals.iter().enumerate() {
                x.add_term(e + s, vec![v as u8], p.scale(&w));
            }
        }
    }
    Ok(x)
}

/// Several commuting operators: sum over unlabeled reduced graphs and over
/// all vertex assignments `i₁…i_V` of
/// `(iℏ/2)^E (c_Γ/S_Γ) λ_Γ(A_{i₁},…,A_{i_V}) ∂_{i₁}⋯∂_{i_V}F(A)/V!`.
///
/// Commutativity of the operators is the caller's responsibility.
pub fn multifunction_jets<C: ComplexCoefficient>(symbols: &[Series<C>], cfg: &StarConfig) -> Result<JetSeries<C>> {
    require_antisymmetric(&cfg.tensor)?;
    let n = symbols.len();
    assert!(n > 0, "at least one operator");
    let dim = symbols[0].dimension();
    for s in symbols {
        cfg.tensor.check_dimension(s.dimension())?;
    }
    let order = symbols.iter().map(|s| s.order()).fold(cfg.truncation_order, usize::min);
    let mut raw = JetSeries::one(dim, n, order)?;
    let grades: Vec<Vec<usize>> = symbols
        .iter()
        .map(|s| (0..=order).filter(|&k| !s.coeff(k).is_zero()).collect())
        .collect();
    for e in 1..=order {
        for g in enumerate_reduced(e, EnumOptions::default())? {
            let c = c_coefficient(&g)?;
            if c == 0 {
                continue;
            }
            let v = g.vertex_count();
            let w: C = rational_weight(e, c, symmetry_order(&g) as u128 * bigfact(v) as u128);
            let arrows = g.to_labeled().arrows();
            let mut assign = vec![0usize; v];
            loop {
                let mut alpha = vec![0u8; n];
                for &i in &assign {
                    alpha[i] += 1;
                }
                // grade choices per vertex
                let mut pick = vec![0usize; v];
                loop {
                    let s: usize = (0..v).map(|k| grades[assign[k]][pick[k]]).sum();
                    if e + s <= order {
                        let verts: Vec<PhasePolynomial<C>> =
                            (0..v).map(|k| symbols[assign[k]].coeff(grades[assign[k]][pick[k]])).collect();
                        let refs: Vec<&PhasePolynomial<C>> = verts.iter().collect();
                        let lam = contract(arrows.arrows(), &refs, &cfg.tensor);
                        raw.add_term(e + s, alpha.clone(), lam.scale(&w));
                    }
                    if !advance_mixed(&mut pick, &assign, &grades) {
                        break;
                    }
                }
                if !advance(&mut assign, n) {
                    break;
                }
            }
        }
    }
    let refs: Vec<&Series<C>> = symbols.iter().collect();
    taylor_shift(raw, &refs)
}

fn advance_mixed(pick: &mut [usize], assign: &[usize], grades: &[Vec<usize>]) -> bool {
    for (k, p) in pick.iter_mut().enumerate() {
        *p += 1;
        if *p < grades[assign[k]].len() {
            return true;
        }
        *p = 0;
    }
    false
}

