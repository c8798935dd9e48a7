//! Multigraphs indexing the ℏ-expansion: representations, canonical forms,
//! enumeration, symmetry orders `S_Γ` and sign sums `c_Γ`.
//!
//! Vertices are 0-based in code and 1-based in JSON.

mod canon;
mod coefficient;
mod enumerate;
mod labeled;
pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use canon::{canonicalize, canonicalize_edges};
pub use coefficient::{c_coefficient, c_of_arrows, c_via_facts, c_via_facts_arrows, MAX_C_VERTICES};
pub use enumerate::{enumerate_connected, enumerate_reduced, EnumOptions, MAX_ENUM_EDGES};
pub use labeled::{labeled_edge_multisets, reduced_labeled_multisets, LabeledClass};

/// A graph whose edges carry labels `0..E` and are oriented low → high.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    v: usize,
    edges: Vec<(usize, usize)>,
}

impl LabeledGraph {
    /// Edge `i` joins `edges[i]`; pairs are stored with the smaller vertex first.
    pub fn new(v: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut out = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-edge at vertex {}", a + 1)));
            }
            if a >= v || b >= v {
                return Err(Error::InvalidGraph(format!("edge ({}, {}) outside {v} vertices", a + 1, b + 1)));
            }
            out.push((a.min(b), a.max(b)));
        }
        Ok(LabeledGraph { v, edges: out })
    }

    pub fn empty() -> Self {
        LabeledGraph { v: 0, edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        degrees(self.v, &self.edges)
    }

    /// No isolated vertices.
    pub fn is_reduced(&self) -> bool {
        self.degrees().iter().all(|&d| d > 0)
    }

    pub fn is_connected(&self) -> bool {
        component_labels(self.v, &self.edges).1 <= 1
    }

    pub fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        multiplicities(&self.edges)
    }

    /// Natural orientation as explicit arrows.
    pub fn arrows(&self) -> ArrowGraph {
        ArrowGraph { v: self.v, arrows: self.edges.clone() }
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson { v: self.v, edges: self.edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect() }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        let mut edges = Vec::with_capacity(json.edges.len());
        for [a, b] in &json.edges {
            if *a == 0 || *b == 0 {
                return Err(Error::InvalidGraph("vertices are 1-indexed".into()));
            }
            edges.push((a - 1, b - 1));
        }
        Self::new(json.v, edges)
    }
}

/// A graph with explicitly oriented edges.
///
/// Used wherever a drawing fixes orientations that differ from the
/// natural one (directed cycles, in-stars, …).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowGraph {
    v: usize,
    arrows: Vec<(usize, usize)>,
}

impl ArrowGraph {
    pub fn new(v: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        for &(a, b) in &arrows {
            if a == b || a >= v || b >= v {
                return Err(Error::InvalidGraph(format!("bad arrow ({}, {})", a + 1, b + 1)));
            }
        }
        Ok(ArrowGraph { v, arrows })
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edge_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    /// Reverse arrow `i`.
    pub fn flip(&self, i: usize) -> Self {
        let mut out = self.clone();
        let (a, b) = out.arrows[i];
        out.arrows[i] = (b, a);
        out
    }

    /// Rename vertex `u` to `perm[u]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        ArrowGraph { v: self.v, arrows: self.arrows.iter().map(|&(a, b)| (perm[a], perm[b])).collect() }
    }

    /// Forget orientations.
    pub fn undirected(&self) -> LabeledGraph {
        LabeledGraph::new(self.v, self.arrows.clone()).expect("arrows are valid edges")
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.arrows.iter().filter(|a| a.0 == u).count()
    }

    /// Vertex sets of connected components (isolated vertices included).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let (labels, count) = component_labels(self.v, &self.arrows);
        let mut out = vec![Vec::new(); count];
        for (u, &c) in labels.iter().enumerate() {
            out[c].push(u);
        }
        out
    }

    /// Subgraph induced on `keep` (in the given order), vertices renumbered.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.v];
        for (i, &u) in keep.iter().enumerate() {
            pos[u] = i;
        }
        let arrows = self
            .arrows
            .iter()
            .filter(|(a, b)| pos[*a] != usize::MAX && pos[*b] != usize::MAX)
            .map(|&(a, b)| (pos[a], pos[b]))
            .collect();
        ArrowGraph { v: keep.len(), arrows }
    }
}

/// Isomorphism class of a multigraph, stored in its canonical labeling.
///
/// Equal values are isomorphic graphs. The canonical labeling with natural
/// orientation fixes the sign convention for `c_Γ` and `λ_Γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnlabeledGraph {
    v: usize,
    edges: Vec<(usize, usize)>,
}

impl UnlabeledGraph {
    pub(crate) fn from_canonical(v: usize, edges: Vec<(usize, usize)>) -> Self {
        UnlabeledGraph { v, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, sorted, low vertex first.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        multiplicities(&self.edges)
    }

    /// The canonical labeled representative.
    pub fn to_labeled(&self) -> LabeledGraph {
        LabeledGraph { v: self.v, edges: self.edges.clone() }
    }

    pub fn is_connected(&self) -> bool {
        component_labels(self.v, &self.edges).1 <= 1
    }

    pub fn is_reduced(&self) -> bool {
        degrees(self.v, &self.edges).iter().all(|&d| d > 0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        degrees(self.v, &self.edges)
    }

    pub fn connected_components(&self) -> Vec<UnlabeledGraph> {
        self.to_labeled()
            .arrows()
            .components()
            .iter()
            .map(|keep| canonicalize(&self.to_labeled().arrows().induced(keep).undirected()))
            .collect()
    }

    pub fn invariants(&self) -> Result<GraphInvariants> {
        Ok(GraphInvariants {
            s: symmetry_order(self),
            c: c_coefficient(self)?,
            connected: self.is_connected(),
            reduced: self.is_reduced(),
        })
    }
}

impl fmt::Display for UnlabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V={} [", self.v)?;
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}-{}", a + 1, b + 1)?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphInvariants {
    #[serde(rename = "S")]
    pub s: u64,
    pub c: i128,
    pub connected: bool,
    pub reduced: bool,
}

/// `{"V":3,"edges":[[1,2],[2,3]]}`, 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(rename = "V")]
    pub v: usize,
    pub edges: Vec<[usize; 2]>,
}

/// `S_Γ = |Aut_V(Γ)| · ∏ m_e!`, the order of the stabilizer in `S_V × S_E`.
pub fn symmetry_order(g: &UnlabeledGraph) -> u64 {
    let mut total: u64 = g.multiplicities().values().map(|&m| factorial_u64(m)).product();
    let mut counts: BTreeMap<UnlabeledGraph, usize> = BTreeMap::new();
    for comp in g.connected_components() {
        *counts.entry(comp).or_default() += 1;
    }
    for (comp, k) in counts {
        let aut = canon::canonical_form(comp.v, &comp.edges).automorphisms;
        total *= aut.pow(k as u32) * factorial_u64(k);
    }
    total
}

pub(crate) fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub(crate) fn degrees(v: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut d = vec![0; v];
    for &(a, b) in edges {
        d[a] += 1;
        d[b] += 1;
    }
    d
}

pub(crate) fn multiplicities(edges: &[(usize, usize)]) -> BTreeMap<(usize, usize), usize> {
    let mut m = BTreeMap::new();
    for &(a, b) in edges {
        *m.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    m
}

/// Component index per vertex, and the number of components.
pub(crate) fn component_labels(v: usize, edges: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for &(a, b) in edges {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = vec![usize::MAX; v];
    let mut count = 0;
    let mut out = vec![0; v];
    for u in 0..v {
        let r = find(&mut parent, u);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        out[u] = label[r];
    }
    (out, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let g = LabeledGraph::new(3, vec![(0, 1), (2, 1), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (1, 2)]);
        let j = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(j, r#"{"V":3,"edges":[[1,2],[2,3],[2,3]]}"#);
        let back: GraphJson = serde_json::from_str(&j).unwrap();
        assert_eq!(LabeledGraph::from_json(&back).unwrap(), g);
    }

    #[test]
    fn rejects_self_edges() {
        assert!(LabeledGraph::new(2, vec![(1, 1)]).is_err());
        assert!(LabeledGraph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn components_of_disjoint_doubles() {
        let g = canonicalize(&LabeledGraph::new(4, vec![(0, 1), (0, 1), (2, 3), (2, 3)]).unwrap());
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], comps[1]);
        assert_eq!(comps.iter().map(|c| c.edge_count()).sum::<usize>(), 4);
        let path = canonicalize(&LabeledGraph::new(3, vec![(0, 1), (1, 2)]).unwrap());
        assert_eq!(path.connected_components(), vec![path.clone()]);
    }

    #[test]
    fn table_symmetry_orders() {
        let double = canonicalize(&LabeledGraph::new(2, vec![(0, 1); 2]).unwrap());
        assert_eq!(symmetry_order(&double), 4);
        let quad = canonicalize(&LabeledGraph::new(2, vec![(0, 1); 4]).unwrap());
        assert_eq!(symmetry_order(&quad), 48);
        let cycle = canonicalize(&LabeledGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap());
        assert_eq!(symmetry_order(&cycle), 8);
        let two_doubles = canonicalize(&LabeledGraph::new(4, vec![(0, 1), (0, 1), (2, 3), (2, 3)]).unwrap());
        assert_eq!(symmetry_order(&two_doubles), 32);
    }
}
