use std::collections::HashMap;

use crate::error::{Error, Result};

use super::{ArrowGraph, UnlabeledGraph};

/// Largest vertex count accepted by the subset recursion behind `c_Γ`.
pub const MAX_C_VERTICES: usize = 20;

/// `c_Γ` for the canonical labeling with natural orientation.
pub fn c_coefficient(g: &UnlabeledGraph) -> Result<i128> {
    c_of_arrows(&g.to_labeled().arrows())
}

/// `Σ_σ ∏_{arrows t→h} (−1)^{[σ(t) > σ(h)]}` over all vertex orderings σ.
///
/// Orderings are built position by position: placing `w` after an already
/// placed set `S` inverts exactly the arrows from `w` into `S`. Summing over
/// subsets gives the full `V!`-term sum in `O(2^V · V)`.
pub fn c_of_arrows(g: &ArrowGraph) -> Result<i128> {
    let v = g.vertex_count();
    if v > MAX_C_VERTICES {
        return Err(Error::Capacity(format!("c_Γ needs V ≤ {MAX_C_VERTICES}, got {v}")));
    }
    if v == 0 {
        return Ok(1);
    }
    let mut out_mask = vec![vec![0usize; v]; v];
    for &(t, h) in g.arrows() {
        out_mask[t][h] += 1;
    }
    let mut f = vec![0i128; 1 << v];
    f[0] = 1;
    for s in 0..(1usize << v) {
        if f[s] == 0 {
            continue;
        }
        for w in 0..v {
            if s & (1 << w) != 0 {
                continue;
            }
            let inverted: usize = (0..v).filter(|&u| s & (1 << u) != 0).map(|u| out_mask[w][u]).sum();
            let sign = if inverted.is_multiple_of(2) { 1 } else { -1 };
            f[s | (1 << w)] += sign * f[s];
        }
    }
    Ok(f[(1 << v) - 1])
}

/// `c_Γ` computed only from the structural facts: odd edge count gives 0,
/// one vertex gives 1, components multiply with a multinomial weight,
/// parallel pairs are erased (with a sign for opposite directions), and
/// otherwise the recursion on which vertex is placed last.
pub fn c_via_facts(g: &UnlabeledGraph) -> i128 {
    c_via_facts_arrows(&g.to_labeled().arrows())
}

pub fn c_via_facts_arrows(g: &ArrowGraph) -> i128 {
    let mut memo = HashMap::new();
    facts(g, &mut memo)
}

fn normalize(g: &ArrowGraph) -> ArrowGraph {
    let mut arrows = g.arrows().to_vec();
    arrows.sort();
    ArrowGraph { v: g.vertex_count(), arrows }
}

fn facts(g: &ArrowGraph, memo: &mut HashMap<ArrowGraph, i128>) -> i128 {
    if g.edge_count() % 2 == 1 {
        return 0;
    }
    if g.vertex_count() <= 1 {
        return 1;
    }
    let key = normalize(g);
    if let Some(&c) = memo.get(&key) {
        return c;
    }
    let comps = g.components();
    let value = if comps.len() > 1 {
        let mut total: i128 = 1;
        let mut placed = 0usize;
        for keep in &comps {
            placed += keep.len();
            total *= binomial_i128(placed, keep.len());
            total *= facts(&g.induced(keep), memo);
            if total == 0 {
                break;
            }
        }
        total
    } else if let Some((i, j, same)) = parallel_pair(g) {
        let arrows: Vec<(usize, usize)> = g
            .arrows()
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i && *k != j)
            .map(|(_, &a)| a)
            .collect();
        let rest = facts(&ArrowGraph { v: g.vertex_count(), arrows }, memo);
        if same {
            rest
        } else {
            -rest
        }
    } else {
        let v = g.vertex_count();
        let mut total = 0;
        for p in 0..v {
            let keep: Vec<usize> = (0..v).filter(|&u| u != p).collect();
            let sub = facts(&g.induced(&keep), memo);
            if g.out_degree(p).is_multiple_of(2) {
                total += sub;
            } else {
                total -= sub;
            }
        }
        total
    };
    memo.insert(key, value);
    value
}

/// Two arrows with the same endpoints: `(i, j, same_direction)`.
fn parallel_pair(g: &ArrowGraph) -> Option<(usize, usize, bool)> {
    let a = g.arrows();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] == a[j] {
                return Some((i, j, true));
            }
            if a[i] == (a[j].1, a[j].0) {
                return Some((i, j, false));
            }
        }
    }
    None
}

fn binomial_i128(n: usize, k: usize) -> i128 {
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as i128 / (j + 1) as i128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{canonicalize, LabeledGraph};

    fn arrows(v: usize, a: &[(usize, usize)]) -> ArrowGraph {
        ArrowGraph::new(v, a.to_vec()).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(c_of_arrows(&arrows(1, &[])).unwrap(), 1);
        assert_eq!(c_of_arrows(&arrows(2, &[(0, 1), (0, 1)])).unwrap(), 2);
        assert_eq!(c_of_arrows(&arrows(3, &[(0, 1), (1, 2)])).unwrap(), -2);
        assert_eq!(c_of_arrows(&arrows(5, &[(0, 1), (1, 2), (2, 3), (3, 4)])).unwrap(), 16);
        assert_eq!(c_of_arrows(&arrows(2, &[(0, 1)])).unwrap(), 0);
    }

    #[test]
    fn disjoint_doubles_multinomial() {
        let g = canonicalize(&LabeledGraph::new(4, vec![(0, 1), (0, 1), (2, 3), (2, 3)]).unwrap());
        assert_eq!(c_coefficient(&g).unwrap(), 24);
        assert_eq!(c_via_facts(&g), 24);
    }

    #[test]
    fn facts_agree_with_subset_sum() {
        let cases = [
            arrows(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            arrows(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]),
            arrows(5, &[(1, 0), (1, 2), (1, 3), (1, 4)]),
            arrows(3, &[(0, 1), (1, 0), (1, 2), (2, 1)]),
        ];
        for g in &cases {
            assert_eq!(c_via_facts_arrows(g), c_of_arrows(g).unwrap(), "{g:?}");
        }
    }

    #[test]
    fn capacity_guard() {
        let big = ArrowGraph::new(21, vec![]).unwrap();
        assert!(matches!(c_of_arrows(&big), Err(Error::Capacity(_))));
    }
}
