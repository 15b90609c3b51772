//! Finite digraphs with implicit degenerate arrows.

mod hom;
mod map;
mod ops;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hom::{box_hom, pair_box_hom, BoxHom, MapSearch};
pub(crate) use hom::hom_digraph;
pub use map::{is_digraph_map, DigraphMap, MapFile};
pub use ops::{
    box_product, disjoint_union, distance, distance_matrix, distances_from, pair_box_product,
    pi0, power_digraph, pushout_along_induced_inclusion, DigraphPair, Distance, Pushout,
};

/// Errors raised while building or combining digraphs and maps.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DigraphError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("vertex index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("no image given for vertex `{0}`")]
    MissingAssignment(String),
    #[error("arrow {from} -> {to} is sent to {image_from} -> {image_to}, which is neither an arrow nor an equality")]
    NotAMap {
        from: String,
        to: String,
        image_from: String,
        image_to: String,
    },
    #[error("maps are not composable")]
    NotComposable,
    #[error("map does not start at the induced subdigraph on the given part: {0}")]
    NotInduced(String),
    #[error("enumeration exceeded the budget of {0} maps")]
    BudgetExceeded(usize),
}

/// A finite digraph on ordered, uniquely labelled vertices.
///
/// Arrows are irreflexive; the degenerate arrow `(v, v)` is implicit and
/// [`Digraph::is_arrow`] answers `true` for it.
#[derive(Clone)]
pub struct Digraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.out == other.out
    }
}

impl Eq for Digraph {}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrows: Vec<(&str, &str)> = self
            .arrows()
            .map(|(u, v)| (self.label(u), self.label(v)))
            .collect();
        f.debug_struct("Digraph")
            .field("vertices", &self.labels)
            .field("arrows", &arrows)
            .finish()
    }
}

/// On-disk JSON form of a digraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphFile {
    pub vertices: Vec<String>,
    pub arrows: Vec<(String, String)>,
}

impl Digraph {
    /// Builds a digraph from labels and labelled arrows, rejecting duplicates,
    /// unknown endpoints and self-loops. Repeated arrows are merged.
    pub fn new<S: Into<String>>(
        vertices: impl IntoIterator<Item = S>,
        arrows: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self, DigraphError> {
        let labels: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(DigraphError::DuplicateVertex(l.clone()));
            }
        }
        let mut pairs = Vec::new();
        for (a, b) in arrows {
            let (a, b): (String, String) = (a.into(), b.into());
            let u = *index.get(&a).ok_or_else(|| DigraphError::UnknownVertex(a.clone()))?;
            let v = *index.get(&b).ok_or(DigraphError::UnknownVertex(b))?;
            if u == v {
                return Err(DigraphError::SelfLoop(a));
            }
            pairs.push((u, v));
        }
        Ok(Self::assemble(labels, index, pairs))
    }

    /// Builds a digraph from labels and index arrows. Arrows of the form
    /// `(v, v)` are rejected.
    pub fn from_indexed(
        labels: Vec<String>,
        arrows: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DigraphError> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(DigraphError::DuplicateVertex(l.clone()));
            }
        }
        let n = labels.len();
        let mut pairs = Vec::new();
        for (u, v) in arrows {
            if u >= n || v >= n {
                return Err(DigraphError::IndexOutOfRange(u.max(v)));
            }
            if u == v {
                return Err(DigraphError::SelfLoop(labels[u].clone()));
            }
            pairs.push((u, v));
        }
        Ok(Self::assemble(labels, index, pairs))
    }

    /// Like [`Digraph::from_indexed`] but silently drops degenerate pairs, as
    /// needed when forming images and quotients.
    pub(crate) fn collapsing(
        labels: Vec<String>,
        arrows: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let filtered: Vec<_> = arrows.into_iter().filter(|(u, v)| u != v).collect();
        Self::from_indexed(labels, filtered).expect("internal construction has unique labels")
    }

    fn assemble(labels: Vec<String>, index: HashMap<String, usize>, pairs: Vec<(usize, usize)>) -> Self {
        let n = labels.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (u, v) in pairs {
            out[u].push(v);
            inc[v].push(u);
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Digraph { labels, index, out, inc }
    }

    /// Vertices labelled `0..n` with the given arrows.
    pub fn unlabelled(n: usize, arrows: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, DigraphError> {
        Self::from_indexed((0..n).map(|i| i.to_string()).collect(), arrows)
    }

    /// The one-vertex digraph.
    pub fn point() -> Self {
        Self::point_labelled("*")
    }

    /// The one-vertex digraph with a chosen label.
    pub fn point_labelled(label: &str) -> Self {
        Self::collapsing(vec![label.to_string()], [])
    }

    /// The empty digraph.
    pub fn empty() -> Self {
        Self::collapsing(Vec::new(), [])
    }

    /// `n` isolated vertices.
    pub fn discrete(n: usize) -> Self {
        Self::collapsing((0..n).map(|i| i.to_string()).collect(), [])
    }

    /// The directed cycle `0 → 1 → … → n−1 → 0`, for `n ≥ 2`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 2, "a directed cycle needs at least two vertices");
        Self::collapsing((0..n).map(|i| i.to_string()).collect(), (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Index of a labelled vertex, or `UnknownVertex`.
    pub fn vertex(&self, label: &str) -> Result<usize, DigraphError> {
        self.index_of(label)
            .ok_or_else(|| DigraphError::UnknownVertex(label.to_string()))
    }

    /// Resolves a list of labels to sorted, deduplicated indices.
    pub fn vertex_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, DigraphError> {
        let mut set = labels
            .iter()
            .map(|l| self.vertex(l.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        set.sort_unstable();
        set.dedup();
        Ok(set)
    }

    /// True for stored arrows and for the implicit degenerate arrow `(u, u)`.
    pub fn is_arrow(&self, u: usize, v: usize) -> bool {
        u == v || self.out[u].binary_search(&v).is_ok()
    }

    /// True only for stored, non-degenerate arrows.
    pub fn has_proper_arrow(&self, u: usize, v: usize) -> bool {
        u != v && self.out[u].binary_search(&v).is_ok()
    }

    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    pub fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.inc[u]
    }

    /// Non-degenerate arrows in lexicographic order.
    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn arrow_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Dense arrow-or-equality table for hot loops.
    pub fn adjacency(&self) -> Adjacency {
        let n = self.len();
        let mut bits = vec![false; n * n];
        for u in 0..n {
            bits[u * n + u] = true;
            for &v in &self.out[u] {
                bits[u * n + v] = true;
            }
        }
        Adjacency { n, bits }
    }

    /// Same vertices, reversed arrows.
    pub fn opposite(&self) -> Self {
        Self::collapsing(self.labels.clone(), self.arrows().map(|(u, v)| (v, u)))
    }

    /// Same vertices, arrows in both directions wherever one exists.
    pub fn symmetrize(&self) -> Self {
        Self::collapsing(
            self.labels.clone(),
            self.arrows().flat_map(|(u, v)| [(u, v), (v, u)]),
        )
    }

    /// Induced subdigraph on `part`, kept in ambient order. Labels are preserved.
    pub fn induced(&self, part: &[usize]) -> Result<Self, DigraphError> {
        let mut sorted = part.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&v| v >= self.len()) {
            return Err(DigraphError::IndexOutOfRange(bad));
        }
        let mut local = vec![usize::MAX; self.len()];
        for (i, &v) in sorted.iter().enumerate() {
            local[v] = i;
        }
        let labels = sorted.iter().map(|&v| self.labels[v].clone()).collect();
        let arrows = self
            .arrows()
            .filter(|&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
            .map(|(u, v)| (local[u], local[v]));
        Ok(Self::collapsing(labels, arrows))
    }

    /// Same digraph with every label passed through `f`.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Result<Self, DigraphError> {
        Self::from_indexed(self.labels.iter().map(|l| f(l)).collect(), self.arrows())
    }

    pub fn to_file(&self) -> DigraphFile {
        DigraphFile {
            vertices: self.labels.clone(),
            arrows: self
                .arrows()
                .map(|(u, v)| (self.labels[u].clone(), self.labels[v].clone()))
                .collect(),
        }
    }

    pub fn from_file(file: &DigraphFile) -> Result<Self, DigraphError> {
        Self::new(
            file.vertices.iter().map(String::as_str),
            file.arrows.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )
    }

    /// Sorted vertex labels of a set of indices.
    pub fn labels_of(&self, set: &[usize]) -> Vec<String> {
        set.iter().map(|&v| self.labels[v].clone()).collect()
    }

    /// True when both digraphs have the same labels and the same arrows, in
    /// possibly different vertex orders.
    pub fn same_labelled(&self, other: &Digraph) -> bool {
        if self.len() != other.len() || self.arrow_count() != other.arrow_count() {
            return false;
        }
        let mut map = Vec::with_capacity(self.len());
        for l in &self.labels {
            match other.index_of(l) {
                Some(i) => map.push(i),
                None => return false,
            }
        }
        self.arrows().all(|(u, v)| other.has_proper_arrow(map[u], map[v]))
    }
}

/// Dense arrow-or-equality matrix.
#[derive(Clone, Debug)]
pub struct Adjacency {
    n: usize,
    bits: Vec<bool>,
}

impl Adjacency {
    #[inline]
    pub fn arrow_or_eq(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.n + v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Digraph::new(["a", "a"], []).unwrap_err(),
            DigraphError::DuplicateVertex("a".into())
        );
        assert_eq!(
            Digraph::new(["a"], [("a", "b")]).unwrap_err(),
            DigraphError::UnknownVertex("b".into())
        );
        assert_eq!(
            Digraph::new(["a"], [("a", "a")]).unwrap_err(),
            DigraphError::SelfLoop("a".into())
        );
    }

    #[test]
    fn degenerate_arrows_are_implicit() {
        let g = Digraph::new(["a", "b"], [("a", "b")]).unwrap();
        assert!(g.is_arrow(0, 0));
        assert!(g.is_arrow(0, 1));
        assert!(!g.is_arrow(1, 0));
        assert!(!g.has_proper_arrow(0, 0));
        assert_eq!(g.arrow_count(), 1);
    }

    #[test]
    fn opposite_is_involution_and_symmetrize_idempotent() {
        let g = Digraph::cycle(4);
        assert_eq!(g.opposite().opposite(), g);
        let s = g.symmetrize();
        assert_eq!(s.symmetrize(), s);
        let i1 = Digraph::unlabelled(2, [(0, 1)]).unwrap();
        assert_eq!(i1.symmetrize().arrow_count(), 2);
    }

    #[test]
    fn file_round_trip() {
        let g = Digraph::cycle(3);
        let json = serde_json::to_string(&g.to_file()).unwrap();
        assert_eq!(json, r#"{"vertices":["0","1","2"],"arrows":[["0","1"],["1","2"],["2","0"]]}"#);
        let back: DigraphFile = serde_json::from_str(&json).unwrap();
        assert_eq!(Digraph::from_file(&back).unwrap(), g);
    }

    #[test]
    fn induced_keeps_arrows_between_part_vertices() {
        let g = Digraph::cycle(4);
        let h = g.induced(&[2, 0, 1]).unwrap();
        assert_eq!(h.labels(), ["0", "1", "2"]);
        assert_eq!(h.arrows().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }
}
