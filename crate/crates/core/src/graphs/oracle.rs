//! Brute-force references for the graph invariants.

use super::LabeledGraph;

/// Largest `V!·E!` the brute-force stabilizer count will attempt.
pub const MAX_BRUTE_FORCE_WORK: u64 = 1_000_000;

/// Order of the stabilizer of the edge map under `S_V × S_E`, by checking
/// every pair of permutations. `None` when `V!·E!` exceeds the work cap.
pub fn brute_force_symmetry_order(g: &LabeledGraph) -> Option<u64> {
    let v = g.vertex_count();
    let e = g.edge_count();
    let work = super::factorial_u64(v).checked_mul(super::factorial_u64(e))?;
    if work > MAX_BRUTE_FORCE_WORK {
        return None;
    }
    let edges = g.edges();
    let vperms = permutations(v);
    let eperms = permutations(e);
    let mut count = 0;
    for pi in &vperms {
        let moved: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| (pi[a].min(pi[b]), pi[a].max(pi[b])))
            .collect();
        for tau in &eperms {
            // Edge i is sent to label tau[i]: the relabeled map s' has s'(tau[i]) = pi(s(i)).
            if (0..e).all(|i| moved[i] == edges[tau[i]]) {
                count += 1;
            }
        }
    }
    Some(count)
}

/// `c_Γ` straight from the definition: sum over all `V!` relabelings.
pub fn brute_force_c(g: &LabeledGraph) -> i128 {
    brute_force_c_arrows(g.vertex_count(), g.edges())
}

pub fn brute_force_c_arrows(v: usize, arrows: &[(usize, usize)]) -> i128 {
    let mut total = 0i128;
    for sigma in permutations(v) {
        let inverted = arrows.iter().filter(|&&(t, h)| sigma[t] > sigma[h]).count();
        total += if inverted % 2 == 0 { 1 } else { -1 };
    }
    total
}

/// All permutations of `0..n` (lexicographic).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(0).len(), 1);
    }

    #[test]
    fn stabilizer_of_double_edge() {
        let g = LabeledGraph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        assert_eq!(brute_force_symmetry_order(&g), Some(4));
        assert_eq!(brute_force_c(&g), 2);
    }
}
