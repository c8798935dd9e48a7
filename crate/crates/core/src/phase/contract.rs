use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::scalar::Coefficient;

use super::{QuantizationTensor, Symbol};

/// Contract a directed multigraph against `J`.
///
/// Every arrow `(tail, head)` stands for one factor `J^{μν}` with `∂_μ`
/// acting on the tail's symbol and `∂_ν` on the head's. Index assignments
/// are summed edge by edge and grouped by the per-vertex derivative
/// multiset, so each distinct derivative of a vertex symbol is computed
/// once per call.
pub fn contract<T: Symbol>(arrows: &[(usize, usize)], vertices: &[&T], tensor: &QuantizationTensor) -> T {
    assert!(!vertices.is_empty(), "contraction needs at least one vertex");
    let nv = vertices.len();
    let dim = vertices[0].dimension();
    let width = 2 * dim;
    let entries: Vec<(usize, usize, T::Coeff)> = tensor
        .nonzero_entries()
        .iter()
        .map(|(m, n, v)| (*m, *n, T::Coeff::from_rational(v)))
        .collect();
    let bounds: Vec<Vec<Option<usize>>> = vertices
        .iter()
        .map(|v| (0..width).map(|var| v.max_derivative_order(var)).collect())
        .collect();

    let mut states: HashMap<Vec<u8>, T::Coeff> = HashMap::new();
    states.insert(vec![0u8; nv * width], T::Coeff::one());
    for &(tail, head) in arrows {
        assert!(tail < nv && head < nv && tail != head, "invalid arrow ({tail}, {head})");
        let mut next: HashMap<Vec<u8>, T::Coeff> = HashMap::with_capacity(states.len() * entries.len());
        for (state, coef) in &states {
            for (mu, nu, val) in &entries {
                let mut s = state.clone();
                let ti = tail * width + mu;
                let hi = head * width + nu;
                s[ti] += 1;
                s[hi] += 1;
                if exceeds(&bounds[tail][*mu], s[ti]) || exceeds(&bounds[head][*nu], s[hi]) {
                    continue;
                }
                let v = coef.clone() * val.clone();
                match next.get_mut(&s) {
                    Some(acc) => *acc = acc.clone() + v,
                    None => {
                        next.insert(s, v);
                    }
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        states = next;
    }

    let mut cache: HashMap<(usize, Vec<u8>), T> = HashMap::new();
    let mut keys: Vec<&Vec<u8>> = states.keys().collect();
    keys.sort();
    let mut total = vertices[0].zero_like();
    'outer: for key in keys {
        let coef = &states[key];
        let mut term: Option<T> = None;
        for (v, sym) in vertices.iter().enumerate() {
            let counts = key[v * width..(v + 1) * width].to_vec();
            let d = cache
                .entry((v, counts.clone()))
                .or_insert_with(|| sym.diff_multi(&counts))
                .clone();
            if d.is_zero() {
                continue 'outer;
            }
            term = Some(match term {
                None => d,
                Some(t) => t.mul_ref(&d),
            });
        }
        if let Some(t) = term {
            total = total.add_ref(&t.scale(coef));
        }
    }
    total
}

fn exceeds(bound: &Option<usize>, count: u8) -> bool {
    matches!(bound, Some(b) if (count as usize) > *b)
}

/// `{C,D}_k = C_{,μ¹…μᵏ} J^{μ¹ν¹}⋯J^{μᵏνᵏ} D_{,ν¹…νᵏ}`; `{C,D}_0 = CD`.
pub fn bracket_k<T: Symbol>(c: &T, d: &T, k: usize, tensor: &QuantizationTensor) -> Result<T> {
    tensor.check_dimension(c.dimension())?;
    tensor.check_dimension(d.dimension())?;
    let arrows = vec![(0, 1); k];
    Ok(contract(&arrows, &[c, d], tensor))
}

/// `{C,D} = C_{,μ} J^{μν} D_{,ν}`.
pub fn poisson_bracket<T: Symbol>(c: &T, d: &T, tensor: &QuantizationTensor) -> Result<T> {
    bracket_k(c, d, 1, tensor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::phase::PhasePolynomial;
    use crate::scalar::GaussianRational;

    type P = PhasePolynomial<GaussianRational>;

    fn j1() -> QuantizationTensor {
        QuantizationTensor::moyal(1)
    }

    #[test]
    fn canonical_bracket() {
        let b = poisson_bracket(&P::x(1, 0), &P::p(1, 0), &j1()).unwrap();
        assert_eq!(b, P::one(1));
    }

    #[test]
    fn self_bracket_vanishes() {
        let a = &(&P::x(1, 0).pow(3) + &(&P::x(1, 0) * &P::p(1, 0))) + &P::p(1, 0).pow(2);
        assert!(poisson_bracket(&a, &a, &j1()).unwrap().is_zero());
    }

    #[test]
    fn bracket_of_squares() {
        // {x², p²} = 2x·2p
        let b = poisson_bracket(&P::x(1, 0).pow(2), &P::p(1, 0).pow(2), &j1()).unwrap();
        assert_eq!(b, (&P::x(1, 0) * &P::p(1, 0)).scale(&GaussianRational::from_i64(4)));
        // {x², p²}_2 = ∂²_x(x²)·J^{xp}J^{xp}·∂²_p(p²) = 2·1·1·2
        let b2 = bracket_k(&P::x(1, 0).pow(2), &P::p(1, 0).pow(2), 2, &j1()).unwrap();
        assert_eq!(b2, P::constant(1, GaussianRational::from_i64(4)));
    }

    #[test]
    fn order_zero_is_product() {
        let c = &P::x(1, 0) + &P::p(1, 0).pow(2);
        let d = &P::x(1, 0).pow(2) - &P::one(1);
        assert_eq!(bracket_k(&c, &d, 0, &j1()).unwrap(), &c * &d);
    }

    #[test]
    fn high_order_bracket_vanishes_past_degree() {
        let c = &P::x(1, 0).pow(2) + &P::p(1, 0);
        let d = P::p(1, 0).pow(5);
        assert!(bracket_k(&c, &d, 3, &j1()).unwrap().is_zero());
    }

    #[test]
    fn dimension_mismatch() {
        let r = bracket_k(&P::x(2, 0), &P::x(2, 1), 1, &j1());
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
