use super::{factorial_u64, LabeledGraph};

/// A vertex-labeled multigraph standing for all `count` edge labelings of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledClass {
    pub graph: LabeledGraph,
    /// `E! / ∏ m_e!`.
    pub count: u64,
}

/// All labeled graphs on `n` vertices with `k` edges, grouped by their
/// edge multiset. Summing `count` over the result gives `C(n,2)^k`.
pub fn labeled_edge_multisets(n: usize, k: usize) -> Vec<LabeledClass> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    multisets(&pairs, 0, k, &mut chosen, &mut |edges: &[(usize, usize)]| {
        out.push(make_class(n, edges));
    });
    out
}

/// Labeled graphs with `k` edges and no isolated vertices, any `V`.
pub fn reduced_labeled_multisets(k: usize) -> Vec<LabeledClass> {
    if k == 0 {
        return vec![LabeledClass { graph: LabeledGraph::empty(), count: 1 }];
    }
    let mut out = Vec::new();
    for n in 2..=2 * k {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let mut chosen = Vec::with_capacity(k);
        multisets(&pairs, 0, k, &mut chosen, &mut |edges: &[(usize, usize)]| {
            let mut seen = vec![false; n];
            for &(a, b) in edges {
                seen[a] = true;
                seen[b] = true;
            }
            if seen.iter().all(|&s| s) {
                out.push(make_class(n, edges));
            }
        });
    }
    out
}

fn make_class(n: usize, edges: &[(usize, usize)]) -> LabeledClass {
    let graph = LabeledGraph::new(n, edges.to_vec()).expect("pairs are valid");
    let denom: u64 = graph.multiplicities().values().map(|&m| factorial_u64(m)).product();
    LabeledClass { count: factorial_u64(edges.len()) / denom, graph }
}

fn multisets<F: FnMut(&[(usize, usize)])>(
    pairs: &[(usize, usize)],
    start: usize,
    left: usize,
    chosen: &mut Vec<(usize, usize)>,
    emit: &mut F,
) {
    if left == 0 {
        emit(chosen);
        return;
    }
    for i in start..pairs.len() {
        chosen.push(pairs[i]);
        multisets(pairs, i, left - 1, chosen, emit);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_cover_all_edge_maps() {
        for (n, k) in [(2, 3), (3, 2), (4, 3), (5, 2)] {
            let total: u64 = labeled_edge_multisets(n, k).iter().map(|c| c.count).sum();
            let pairs = (n * (n - 1) / 2) as u64;
            assert_eq!(total, pairs.pow(k as u32));
        }
    }

    #[test]
    fn reduced_two_edges() {
        // V=2: double edge (1 labeling); V=3: three paths (2 labelings each);
        // V=4: three perfect matchings (2 labelings each).
        let classes = reduced_labeled_multisets(2);
        let total: u64 = classes.iter().map(|c| c.count).sum();
        assert_eq!(total, 1 + 6 + 6);
        assert!(classes.iter().all(|c| c.graph.is_reduced()));
    }
}
