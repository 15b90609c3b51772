//! Small digraphs and named examples shared by tests, suites and the CLI.

use std::collections::{BTreeMap, BTreeSet};

use crate::cover::out_closure;
use crate::digraph::{disjoint_union, Digraph};
use crate::grid::TensorGrid;
use crate::interval::{Interval, Sign};

/// `I_n` with the standard orientation `0 → 1 ← 2 → …`.
pub fn standard_interval(n: usize) -> Digraph {
    Interval::standard(n, Sign::Plus).to_digraph()
}

/// `I_m^{⊗n}` with coordinate labels.
pub fn cube(m: usize, n: usize) -> Digraph {
    TensorGrid::power(&Interval::standard(m, Sign::Plus), n).digraph()
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of digraphs on exactly `n`
/// vertices (`n ≤ 4`), ordered by canonical code.
pub fn isomorphism_classes(n: usize) -> Vec<Digraph> {
    assert!(n <= 4, "exhaustive enumeration is limited to four vertices");
    let slots: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    let slot_of = |u: usize, v: usize| slots.iter().position(|&s| s == (u, v)).expect("proper pair");
    let perms = all_permutations(n);
    let mut canon: BTreeSet<u32> = BTreeSet::new();
    for code in 0u32..(1 << slots.len()) {
        let best = perms
            .iter()
            .map(|p| {
                slots
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| code >> k & 1 == 1)
                    .fold(0u32, |acc, (_, &(u, v))| acc | 1 << slot_of(p[u], p[v]))
            })
            .min()
            .expect("at least one permutation");
        canon.insert(best);
    }
    canon
        .into_iter()
        .map(|code| {
            let arrows = slots.iter().enumerate().filter(|&(k, _)| code >> k & 1 == 1).map(|(_, &a)| a);
            Digraph::unlabelled(n, arrows).expect("slots are proper pairs")
        })
        .collect()
}

/// All isomorphism classes on `1..=max_vertices` vertices.
pub fn small_digraphs(max_vertices: usize) -> Vec<Digraph> {
    (1..=max_vertices).flat_map(isomorphism_classes).collect()
}

/// The square `I₄^{⊗2}`, its boundary and the out-closure of the boundary.
#[derive(Clone, Debug)]
pub struct BoundaryExample {
    pub square: Digraph,
    pub boundary: Vec<usize>,
    pub out_closure: Vec<usize>,
}

impl BoundaryExample {
    pub fn new() -> Self {
        let grid = TensorGrid::power(&Interval::standard(4, Sign::Plus), 2);
        let square = grid.digraph();
        let boundary = grid.boundary();
        let out_closure = out_closure(&square, &boundary);
        BoundaryExample { square, boundary, out_closure }
    }

    /// `Out(∂I₄^{⊗2})` as a digraph of its own.
    pub fn o_digraph(&self) -> Digraph {
        self.square.induced(&self.out_closure).expect("indices come from the square")
    }

    pub fn boundary_digraph(&self) -> Digraph {
        self.square.induced(&self.boundary).expect("indices come from the square")
    }

    /// Rows `{0,1}`, rows `{3,4}`, columns `{0,1}`, columns `{3,4}`, restricted to
    /// the vertices of `g` (labels `(r,c)`).
    pub fn strip_cover(g: &Digraph) -> BTreeMap<String, Vec<String>> {
        let strips: [(&str, fn((usize, usize)) -> bool); 4] = [
            ("rows01", |(r, _)| r <= 1),
            ("rows34", |(r, _)| r >= 3),
            ("cols01", |(_, c)| c <= 1),
            ("cols34", |(_, c)| c >= 3),
        ];
        strips
            .iter()
            .map(|(name, keep)| {
                let labels = g.labels().iter().filter(|l| keep(grid_coords(l))).cloned().collect();
                (name.to_string(), labels)
            })
            .collect()
    }

    /// Columns `≤ 2` and columns `≥ 2` of `g`, as vertex indices. Both are
    /// in-closed in `O`, since column 2 only has arrows leaving it.
    pub fn column_halves(g: &Digraph) -> (Vec<usize>, Vec<usize>) {
        let side = |keep: fn(usize) -> bool| (0..g.len()).filter(|&v| keep(grid_coords(g.label(v)).1)).collect();
        (side(|c| c <= 2), side(|c| c >= 2))
    }
}

/// `(row, column)` of a grid label `(r,c)`.
fn grid_coords(label: &str) -> (usize, usize) {
    let inner = label.trim_start_matches('(').trim_end_matches(')');
    let mut it = inner.split(',').map(|s| s.parse::<usize>().expect("grid label"));
    (it.next().expect("row"), it.next().expect("column"))
}

impl Default for BoundaryExample {
    fn default() -> Self {
        Self::new()
    }
}

/// Named examples, smallest first.
pub fn named_examples() -> Vec<(String, Digraph)> {
    let mut out = vec![("point".to_string(), Digraph::point())];
    for n in 1..=4 {
        out.push((format!("I{n}"), standard_interval(n)));
    }
    for n in 3..=6 {
        out.push((format!("C{n}"), Digraph::cycle(n)));
    }
    out.push(("square".into(), cube(1, 2)));
    out.push(("two-points".into(), Digraph::discrete(2)));
    out.push(("C3+C3".into(), disjoint_union(&Digraph::cycle(3), &Digraph::cycle(3))));
    let ex = BoundaryExample::new();
    out.push(("boundary-I4^2".into(), ex.boundary_digraph()));
    out.push(("O".into(), ex.o_digraph()));
    out
}

/// Looks up a named example.
pub fn named(name: &str) -> Option<Digraph> {
    named_examples().into_iter().find(|(n, _)| n == name).map(|(_, g)| g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_match_known_sequence() {
        // Unlabelled digraphs on n nodes: 1, 3, 16, 218.
        let counts: Vec<usize> = (1..=4).map(|n| isomorphism_classes(n).len()).collect();
        assert_eq!(counts, [1, 3, 16, 218]);
    }

    #[test]
    fn boundary_out_closure_misses_only_the_center() {
        let ex = BoundaryExample::new();
        assert_eq!(ex.boundary.len(), 16);
        assert_eq!(ex.out_closure.len(), 24);
        let o = ex.o_digraph();
        assert!(o.index_of("(2,2)").is_none());
        let cover = BoundaryExample::strip_cover(&o);
        assert_eq!(cover["rows01"].len(), 10);
        assert_eq!(cover["cols34"].len(), 10);
    }
}
