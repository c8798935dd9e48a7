//! Graph polynomials `λ_Γ(A₁,…,A_V)`: one `J` contraction per edge.

use std::collections::HashMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::graphs::{ArrowGraph, LabeledGraph};
use crate::phase::{bracket_k, contract, QuantizationTensor, Symbol};
use crate::scalar::Coefficient;

fn check_assignment<T: Symbol>(v: usize, assign: &[T], j: &QuantizationTensor) -> Result<()> {
    if v == 0 {
        return Err(Error::InvalidGraph("λ of the empty graph needs no vertices; it is 1".into()));
    }
    if assign.len() != v {
        return Err(Error::DimensionMismatch { left: assign.len(), right: v });
    }
    for a in assign {
        j.check_dimension(a.dimension())?;
    }
    Ok(())
}

/// `λ_Γ` with the natural orientation (low label → high label).
pub fn lambda<T: Symbol>(g: &LabeledGraph, assign: &[T], j: &QuantizationTensor) -> Result<T> {
    check_assignment(g.vertex_count(), assign, j)?;
    let refs: Vec<&T> = assign.iter().collect();
    Ok(contract(g.edges(), &refs, j))
}

/// `λ` of an explicitly oriented graph.
pub fn lambda_arrows<T: Symbol>(g: &ArrowGraph, assign: &[T], j: &QuantizationTensor) -> Result<T> {
    check_assignment(g.vertex_count(), assign, j)?;
    let refs: Vec<&T> = assign.iter().collect();
    Ok(contract(g.arrows(), &refs, j))
}

/// `λ_Γ(A, …, A)`.
pub fn lambda_single<T: Symbol>(g: &ArrowGraph, a: &T, j: &QuantizationTensor) -> Result<T> {
    let assign = vec![a.clone(); g.vertex_count()];
    lambda_arrows(g, &assign, j)
}

/// Memoized `λ_Γ(A, …, A)` for one symbol and tensor.
///
/// A graph factors over its connected components; each component is keyed
/// by its induced arrows with vertex order preserved, so the cache is
/// valid for any tensor, antisymmetric or not.
pub struct LambdaCache<'a, T: Symbol> {
    symbol: &'a T,
    tensor: &'a QuantizationTensor,
    memo: HashMap<ArrowGraph, T>,
}

impl<'a, T: Symbol> LambdaCache<'a, T> {
    pub fn new(symbol: &'a T, tensor: &'a QuantizationTensor) -> Result<Self> {
        tensor.check_dimension(symbol.dimension())?;
        Ok(LambdaCache { symbol, tensor, memo: HashMap::new() })
    }

    pub fn eval(&mut self, g: &ArrowGraph) -> T {
        let mut out = self.symbol.one_like();
        for keep in g.components() {
            let comp = g.induced(&keep);
            let val = self.component(&comp);
            if val.is_zero() {
                return val;
            }
            out = out.mul_ref(&val);
        }
        out
    }

    fn component(&mut self, comp: &ArrowGraph) -> T {
        if comp.edge_count() == 0 {
            return self.symbol.clone();
        }
        let mut key = comp.arrows().to_vec();
        key.sort();
        let key = ArrowGraph::new(comp.vertex_count(), key).expect("valid");
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let refs = vec![self.symbol; key.vertex_count()];
        let v = contract(key.arrows(), &refs, self.tensor);
        self.memo.insert(key, v.clone());
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReverseEdgeReport<T> {
    pub base: T,
    /// `(edge, λ after flipping it negates λ)`.
    pub single_flips: Vec<(usize, bool)>,
    /// Flipping every pair of distinct edges leaves `λ` unchanged.
    pub pair_flips_invariant: bool,
}

impl<T> ReverseEdgeReport<T> {
    pub fn holds(&self) -> bool {
        self.single_flips.iter().all(|f| f.1) && self.pair_flips_invariant
    }
}

/// Flip each edge in turn (and each pair of edges) and compare with `λ_Γ`.
pub fn reverse_edge_sign_check<T: Symbol>(
    g: &LabeledGraph,
    assign: &[T],
    j: &QuantizationTensor,
) -> Result<ReverseEdgeReport<T>> {
    let arrows = g.arrows();
    let base = lambda_arrows(&arrows, assign, j)?;
    let neg = base.scale(&-T::Coeff::one());
    let mut single_flips = Vec::new();
    for i in 0..g.edge_count() {
        let flipped = lambda_arrows(&arrows.flip(i), assign, j)?;
        single_flips.push((i, flipped == neg));
    }
    let mut pair_flips_invariant = true;
    for a in 0..g.edge_count() {
        for b in a + 1..g.edge_count() {
            if lambda_arrows(&arrows.flip(a).flip(b), assign, j)? != base {
                pair_flips_invariant = false;
            }
        }
    }
    Ok(ReverseEdgeReport { base, single_flips, pair_flips_invariant })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttachExpansion<T> {
    /// `{λ_Γ(A₁,…,A_V), D}_k`.
    pub lhs: T,
    /// `Σ count · λ_{Γ′}(A₁,…,A_V, D)`.
    pub rhs: T,
    /// Each `Γ′` (vertex `V` added, `k` arrows into it) with its multiplicity.
    pub graphs: Vec<(LabeledGraph, u64)>,
}

/// Expand `k` arrows from the product `λ_Γ` into a new vertex carrying `D`
/// as a sum over graphs with the arrow tails distributed among the
/// existing vertices (Leibniz rule on the contracted product).
pub fn attach_arrows_expand<T: Symbol>(
    g: &LabeledGraph,
    assign: &[T],
    k: usize,
    d: &T,
    j: &QuantizationTensor,
) -> Result<AttachExpansion<T>> {
    let base = lambda(g, assign, j)?;
    let lhs = bracket_k(&base, d, k, j)?;
    let v = g.vertex_count();

    // Tails as non-decreasing sequences; multiplicity k!/∏(count!).
    let mut graphs = Vec::new();
    let mut tails = Vec::with_capacity(k);
    tail_multisets(v, 0, k, &mut tails, &mut |t: &[usize]| {
        let mut edges = g.edges().to_vec();
        edges.extend(t.iter().map(|&s| (s, v)));
        let mut counts = vec![0usize; v];
        for &s in t {
            counts[s] += 1;
        }
        let denom: u64 = counts.iter().map(|&c| (1..=c as u64).product::<u64>()).product();
        let mult = (1..=k as u64).product::<u64>() / denom;
        graphs.push((LabeledGraph::new(v + 1, edges).expect("valid"), mult));
    });

    let mut full = assign.to_vec();
    full.push(d.clone());
    let mut rhs = d.zero_like();
    for (gp, mult) in &graphs {
        let term = lambda(gp, &full, j)?;
        rhs = rhs.add_ref(&term.scale(&T::Coeff::from_i64(*mult as i64)));
    }
    Ok(AttachExpansion { lhs, rhs, graphs })
}

fn tail_multisets<F: FnMut(&[usize])>(v: usize, start: usize, left: usize, cur: &mut Vec<usize>, emit: &mut F) {
    if left == 0 {
        emit(cur);
        return;
    }
    for s in start..v {
        cur.push(s);
        tail_multisets(v, s, left - 1, cur, emit);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PhasePolynomial;
    use crate::scalar::GaussianRational;

    type P = PhasePolynomial<GaussianRational>;

    fn j1() -> QuantizationTensor {
        QuantizationTensor::moyal(1)
    }

    fn x() -> P {
        P::x(1, 0)
    }

    fn p() -> P {
        P::p(1, 0)
    }

    #[test]
    fn canonical_edge() {
        let g = LabeledGraph::new(2, vec![(0, 1)]).unwrap();
        assert_eq!(lambda(&g, &[x(), p()], &j1()).unwrap(), P::one(1));
        let a = &x().pow(3) + &(&x() * &p());
        assert!(lambda(&g, &[a.clone(), a], &j1()).unwrap().is_zero());
    }

    #[test]
    fn cda_contraction_by_hand() {
        // 1→2⇒3 with C=x, D=x²p, A=p²: only C_{,x} J^{xp} D_{,pxx} J^{xp} J^{xp} A_{,pp}
        // survives, 1·1·2·1·1·2 = 4. With D = xp the third derivative vanishes.
        let g = LabeledGraph::new(3, vec![(0, 1), (1, 2), (1, 2)]).unwrap();
        let d = &x().pow(2) * &p();
        let v = lambda(&g, &[x(), d, p().pow(2)], &j1()).unwrap();
        assert_eq!(v, P::constant(1, GaussianRational::from_i64(4)));
        let d0 = &x() * &p();
        assert!(lambda(&g, &[x(), d0, p().pow(2)], &j1()).unwrap().is_zero());
    }

    #[test]
    fn flip_negates() {
        let g = LabeledGraph::new(2, vec![(0, 1)]).unwrap();
        let r = reverse_edge_sign_check(&g, &[x(), p()], &j1()).unwrap();
        assert_eq!(r.base, P::one(1));
        assert!(r.holds());
    }

    #[test]
    fn attach_worked_example() {
        // (C→D) with two arrows into E: shapes (C,C), (C,D)×2, (D,D).
        let g = LabeledGraph::new(2, vec![(0, 1)]).unwrap();
        let c = &x().pow(3) + &p().pow(2);
        let d = &(&x() * &p()).pow(2) + &x();
        let e = &p().pow(3) + &(&x() * &p().pow(2));
        let r = attach_arrows_expand(&g, &[c, d], 2, &e, &j1()).unwrap();
        let mults: Vec<u64> = r.graphs.iter().map(|(_, m)| *m).collect();
        assert_eq!(mults, vec![1, 2, 1]);
        assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn cache_matches_direct() {
        let a = &(&x().pow(3) + &(&x() * &p().pow(2))) + &p();
        let g = ArrowGraph::new(5, vec![(0, 1), (1, 2), (3, 4), (3, 4)]).unwrap();
        let j = j1();
        let mut cache = LambdaCache::new(&a, &j).unwrap();
        assert_eq!(cache.eval(&g), lambda_single(&g, &a, &j).unwrap());
    }
}
