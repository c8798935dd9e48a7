use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

use super::{canonicalize_edges, UnlabeledGraph};

/// Largest edge count the enumerators accept.
pub const MAX_ENUM_EDGES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[derive(Default)]
pub struct EnumOptions {
    pub connected_only: bool,
    pub max_v: Option<usize>,
    /// Also list graphs having a component with an odd number of edges.
    /// Their `c_Γ` vanishes, so by default they are skipped.
    pub include_odd_components: bool,
}


/// Connected multigraphs with `e` edges, one per isomorphism class, sorted
/// by `(V, canonical edges)`. `e = 0` yields the single vertex.
pub fn enumerate_connected(e: usize) -> Result<Vec<UnlabeledGraph>> {
    check(e)?;
    let mut level: BTreeSet<UnlabeledGraph> = BTreeSet::new();
    level.insert(UnlabeledGraph::from_canonical(1, Vec::new()));
    for _ in 0..e {
        let mut next = BTreeSet::new();
        for g in &level {
            let v = g.vertex_count();
            for a in 0..v {
                for b in a + 1..v {
                    let mut edges = g.edges().to_vec();
                    edges.push((a, b));
                    next.insert(canonicalize_edges(v, &edges).0);
                }
                let mut edges = g.edges().to_vec();
                edges.push((a, v));
                next.insert(canonicalize_edges(v + 1, &edges).0);
            }
        }
        level = next;
    }
    let mut out: Vec<UnlabeledGraph> = level.into_iter().collect();
    sort_graphs(&mut out);
    Ok(out)
}

/// Reduced graphs (no isolated vertices) with `e` edges.
///
/// The empty graph is the only reduced graph with no edges.
pub fn enumerate_reduced(e: usize, opts: EnumOptions) -> Result<Vec<UnlabeledGraph>> {
    check(e)?;
    let keep_v = |g: &UnlabeledGraph| opts.max_v.is_none_or(|m| g.vertex_count() <= m);
    if e == 0 {
        return Ok(if opts.connected_only { Vec::new() } else { vec![UnlabeledGraph::from_canonical(0, Vec::new())] });
    }
    if opts.connected_only {
        let mut out: Vec<_> = enumerate_connected(e)?.into_iter().filter(|g| keep_v(g)).collect();
        if !opts.include_odd_components && e % 2 == 1 {
            out.clear();
        }
        return Ok(out);
    }
    let mut by_size: BTreeMap<usize, Vec<UnlabeledGraph>> = BTreeMap::new();
    for k in 1..=e {
        if opts.include_odd_components || k % 2 == 0 {
            by_size.insert(k, enumerate_connected(k)?);
        }
    }
    let mut out = Vec::new();
    let mut parts = Vec::new();
    partitions(e, e, &by_size, &mut parts, &mut out);
    out.retain(|g| keep_v(g));
    sort_graphs(&mut out);
    Ok(out)
}

/// Multisets of connected components with edge counts summing to `left`,
/// chosen in non-increasing (size, index) order to avoid repeats.
fn partitions(
    left: usize,
    max_part: usize,
    by_size: &BTreeMap<usize, Vec<UnlabeledGraph>>,
    chosen: &mut Vec<(usize, usize)>,
    out: &mut Vec<UnlabeledGraph>,
) {
    if left == 0 {
        let mut v = 0;
        let mut edges = Vec::new();
        for &(size, idx) in chosen.iter() {
            let g = &by_size[&size][idx];
            edges.extend(g.edges().iter().map(|&(a, b)| (a + v, b + v)));
            v += g.vertex_count();
        }
        out.push(canonicalize_edges(v, &edges).0);
        return;
    }
    for size in (1..=max_part.min(left)).rev() {
        let Some(graphs) = by_size.get(&size) else { continue };
        for idx in 0..graphs.len() {
            if let Some(&(ls, li)) = chosen.last() {
                if ls == size && idx > li {
                    continue;
                }
            }
            chosen.push((size, idx));
            partitions(left - size, size, by_size, chosen, out);
            chosen.pop();
        }
    }
}

fn sort_graphs(gs: &mut [UnlabeledGraph]) {
    gs.sort_by(|a, b| (a.vertex_count(), a.edges()).cmp(&(b.vertex_count(), b.edges())));
}

fn check(e: usize) -> Result<()> {
    if e > MAX_ENUM_EDGES {
        return Err(Error::Capacity(format!("graph enumeration limited to E ≤ {MAX_ENUM_EDGES}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_from_the_table() {
        assert_eq!(enumerate_reduced(2, EnumOptions::default()).unwrap().len(), 2);
        let conn = EnumOptions { connected_only: true, ..Default::default() };
        assert_eq!(enumerate_reduced(4, conn).unwrap().len(), 12);
        assert_eq!(enumerate_reduced(4, EnumOptions::default()).unwrap().len(), 15);
    }

    #[test]
    fn connected_counts() {
        let counts: Vec<usize> = (0..=4).map(|e| enumerate_connected(e).unwrap().len()).collect();
        // single vertex; edge; double, path; triple, path with double, triangle, 3 trees; 12
        assert_eq!(counts, vec![1, 1, 2, 5, 12]);
    }

    #[test]
    fn odd_components_on_request() {
        let opts = EnumOptions { include_odd_components: true, ..Default::default() };
        // double, path, two disjoint edges
        assert_eq!(enumerate_reduced(2, opts).unwrap().len(), 3);
    }

    #[test]
    fn guard() {
        assert!(enumerate_connected(9).is_err());
        assert_eq!(enumerate_reduced(0, EnumOptions::default()).unwrap().len(), 1);
    }
}
