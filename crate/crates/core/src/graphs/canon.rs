use super::{component_labels, LabeledGraph, UnlabeledGraph};

pub(crate) struct CanonicalForm {
    /// `relabel[u]` is the canonical label of vertex `u`.
    pub relabel: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub automorphisms: u64,
}

/// Canonical form of a multigraph given by an edge list.
///
/// The ordering minimizes the upper-triangular multiplicity matrix read
/// column by column, over all orderings compatible with colour refinement.
/// Refinement colours are isomorphism invariants, so the minimum is a
/// canonical form, and the orderings attaining it form one orbit of the
/// automorphism group (whose order is counted on the way).
pub(crate) fn canonical_form(n: usize, edges: &[(usize, usize)]) -> CanonicalForm {
    if n <= 1 {
        return CanonicalForm { relabel: (0..n).collect(), edges: Vec::new(), automorphisms: 1 };
    }
    let mut mult = vec![vec![0u8; n]; n];
    for &(a, b) in edges {
        mult[a][b] += 1;
        mult[b][a] += 1;
    }
    let colors = refine(n, &mult);
    let mut slots: Vec<usize> = (0..n).collect();
    slots.sort_by_key(|&u| colors[u]);
    let slot_color: Vec<usize> = slots.iter().map(|&u| colors[u]).collect();

    let mut search = Search {
        n,
        mult: &mult,
        colors: &colors,
        slot_color,
        seq: Vec::with_capacity(n),
        used: vec![false; n],
        key: Vec::with_capacity(n * (n - 1) / 2),
        best: None,
        best_seq: Vec::new(),
        ties: 0,
    };
    search.run();

    let mut relabel = vec![0; n];
    for (i, &u) in search.best_seq.iter().enumerate() {
        relabel[u] = i;
    }
    let mut out: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (relabel[a], relabel[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    out.sort();
    CanonicalForm { relabel, edges: out, automorphisms: search.ties }
}

fn refine(n: usize, mult: &[Vec<u8>]) -> Vec<usize> {
    let mut colors: Vec<usize> = (0..n).map(|u| mult[u].iter().map(|&m| m as usize).sum()).collect();
    let mut classes = count_classes(&colors);
    loop {
        let sigs: Vec<(usize, Vec<(usize, u8)>)> = (0..n)
            .map(|u| {
                let mut nb: Vec<(usize, u8)> =
                    (0..n).filter(|&w| mult[u][w] > 0).map(|w| (colors[w], mult[u][w])).collect();
                nb.sort();
                (colors[u], nb)
            })
            .collect();
        let mut uniq = sigs.clone();
        uniq.sort();
        uniq.dedup();
        colors = sigs.iter().map(|s| uniq.binary_search(s).expect("present")).collect();
        let c = count_classes(&colors);
        if c == classes {
            return colors;
        }
        classes = c;
    }
}

fn count_classes(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort();
    c.dedup();
    c.len()
}

struct Search<'a> {
    n: usize,
    mult: &'a [Vec<u8>],
    colors: &'a [usize],
    slot_color: Vec<usize>,
    seq: Vec<usize>,
    used: Vec<bool>,
    key: Vec<u8>,
    best: Option<Vec<u8>>,
    best_seq: Vec<usize>,
    ties: u64,
}

impl Search<'_> {
    fn run(&mut self) {
        let k = self.seq.len();
        if k == self.n {
            match &self.best {
                Some(b) if *b == self.key => self.ties += 1,
                _ => {
                    self.best = Some(self.key.clone());
                    self.best_seq = self.seq.clone();
                    self.ties = 1;
                }
            }
            return;
        }
        for u in 0..self.n {
            if self.used[u] || self.colors[u] != self.slot_color[k] {
                continue;
            }
            let before = self.key.len();
            for i in 0..k {
                self.key.push(self.mult[self.seq[i]][u]);
            }
            let keep = match &self.best {
                Some(b) => b[..self.key.len()] >= self.key[..],
                None => true,
            };
            if keep {
                self.used[u] = true;
                self.seq.push(u);
                self.run();
                self.seq.pop();
                self.used[u] = false;
            }
            self.key.truncate(before);
        }
    }
}

/// Canonical form and the vertex relabeling realizing it.
pub fn canonicalize_edges(v: usize, edges: &[(usize, usize)]) -> (UnlabeledGraph, Vec<usize>) {
    let (labels, count) = component_labels(v, edges);
    let mut comps: Vec<(Vec<usize>, Vec<(usize, usize)>, CanonicalForm)> = Vec::with_capacity(count);
    let mut members = vec![Vec::new(); count];
    for (u, &c) in labels.iter().enumerate() {
        members[c].push(u);
    }
    let mut local = vec![0; v];
    for m in &members {
        for (i, &u) in m.iter().enumerate() {
            local[u] = i;
        }
    }
    let mut comp_edges = vec![Vec::new(); count];
    for &(a, b) in edges {
        comp_edges[labels[a]].push((local[a], local[b]));
    }
    for (m, e) in members.into_iter().zip(comp_edges) {
        let form = canonical_form(m.len(), &e);
        comps.push((m, e, form));
    }
    comps.sort_by(|x, y| (x.0.len(), &x.2.edges).cmp(&(y.0.len(), &y.2.edges)));
    let mut relabel = vec![0; v];
    let mut out = Vec::with_capacity(edges.len());
    let mut offset = 0;
    for (m, _, form) in &comps {
        for (i, &u) in m.iter().enumerate() {
            relabel[u] = offset + form.relabel[i];
        }
        out.extend(form.edges.iter().map(|&(a, b)| (a + offset, b + offset)));
        offset += m.len();
    }
    (UnlabeledGraph::from_canonical(v, out), relabel)
}

pub fn canonicalize(g: &LabeledGraph) -> UnlabeledGraph {
    canonicalize_edges(g.vertex_count(), g.edges()).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(v: usize, e: &[(usize, usize)]) -> UnlabeledGraph {
        canonicalize(&LabeledGraph::new(v, e.to_vec()).unwrap())
    }

    #[test]
    fn relabelings_agree() {
        assert_eq!(canon(3, &[(0, 1), (1, 2)]), canon(3, &[(1, 0), (0, 2)]));
        assert_eq!(canon(2, &[(0, 1), (0, 1)]), canon(2, &[(1, 0), (0, 1)]));
        assert_ne!(canon(2, &[(0, 1), (0, 1)]), canon(3, &[(0, 1), (1, 2)]));
        assert_eq!(
            canon(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 1)]),
            canon(5, &[(4, 3), (3, 2), (2, 1), (1, 0), (3, 4)])
        );
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(canonical_form(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).automorphisms, 8);
        assert_eq!(canonical_form(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).automorphisms, 24);
        assert_eq!(canonical_form(3, &[(0, 1), (1, 2)]).automorphisms, 2);
        assert_eq!(canonical_form(4, &[(0, 1), (0, 1), (1, 2), (2, 3)]).automorphisms, 1);
    }

    #[test]
    fn relabel_maps_onto_canonical_edges() {
        let edges = [(3, 1), (1, 2), (2, 0), (0, 1), (1, 2)];
        let (g, relabel) = canonicalize_edges(4, &edges);
        let mut mapped: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| (relabel[a].min(relabel[b]), relabel[a].max(relabel[b])))
            .collect();
        mapped.sort();
        assert_eq!(mapped, g.edges());
    }

    #[test]
    fn isolated_vertices_are_components() {
        let g = canon(3, &[(1, 2), (1, 2)]);
        assert_eq!(g.edges(), &[(1, 2), (1, 2)]);
        assert!(!g.is_reduced());
    }
}
