use std::collections::HashMap;
use std::ops::ControlFlow;

use super::ops::DigraphPair;
use super::{Adjacency, Digraph, DigraphError};

#[derive(Clone, Copy)]
enum Dir {
    /// earlier vertex → current vertex
    Forward,
    /// current vertex → earlier vertex
    Backward,
}

/// Backtracking enumerator of digraph maps with per-vertex candidate sets.
///
/// Source vertices are assigned in input order, each candidate is drawn from
/// the neighbourhood of an already assigned neighbour and checked against all
/// assigned neighbours. Maps come out in lexicographic order of assignments.
pub struct MapSearch<'a> {
    source: &'a Digraph,
    target: &'a Digraph,
    adjacency: Adjacency,
    allowed: Vec<Option<Vec<bool>>>,
    earlier: Vec<Vec<(usize, Dir)>>,
    forward_nbhd: Vec<Vec<usize>>,
    backward_nbhd: Vec<Vec<usize>>,
}

impl<'a> MapSearch<'a> {
    pub fn new(source: &'a Digraph, target: &'a Digraph) -> Self {
        let mut earlier = vec![Vec::new(); source.len()];
        for (u, v) in source.arrows() {
            if u < v {
                earlier[v].push((u, Dir::Forward));
            } else {
                earlier[u].push((v, Dir::Backward));
            }
        }
        let nbhd = |list: &[usize], w: usize| {
            let mut n = list.to_vec();
            n.push(w);
            n.sort_unstable();
            n
        };
        MapSearch {
            source,
            target,
            adjacency: target.adjacency(),
            allowed: vec![None; source.len()],
            earlier,
            forward_nbhd: (0..target.len()).map(|w| nbhd(target.out_neighbors(w), w)).collect(),
            backward_nbhd: (0..target.len()).map(|w| nbhd(target.in_neighbors(w), w)).collect(),
        }
    }

    /// Restricts the images of `v` to `candidates` (intersecting with any
    /// earlier restriction).
    pub fn restrict(mut self, v: usize, candidates: &[usize]) -> Self {
        let mut mask = vec![false; self.target.len()];
        for &w in candidates {
            mask[w] = true;
        }
        if let Some(old) = &self.allowed[v] {
            for (m, o) in mask.iter_mut().zip(old) {
                *m &= *o;
            }
        }
        self.allowed[v] = Some(mask);
        self
    }

    /// Restricts every vertex of `part` to land in `candidates`.
    pub fn restrict_all(mut self, part: &[usize], candidates: &[usize]) -> Self {
        for &v in part {
            self = self.restrict(v, candidates);
        }
        self
    }

    /// Calls `f` on every map; stops early on `Break`. Returns the number of
    /// maps visited, or `BudgetExceeded` once more than `budget` are found.
    pub fn for_each(
        &self,
        budget: usize,
        mut f: impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> Result<usize, DigraphError> {
        let mut assignment = vec![0usize; self.source.len()];
        let mut count = 0usize;
        let mut over = false;
        let _ = self.descend(0, &mut assignment, &mut count, budget, &mut over, &mut f);
        if over {
            Err(DigraphError::BudgetExceeded(budget))
        } else {
            Ok(count)
        }
    }

    fn descend(
        &self,
        v: usize,
        assignment: &mut Vec<usize>,
        count: &mut usize,
        budget: usize,
        over: &mut bool,
        f: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if v == self.source.len() {
            *count += 1;
            if *count > budget {
                *over = true;
                return ControlFlow::Break(());
            }
            return f(assignment);
        }
        let all: Vec<usize>;
        let candidates: &[usize] = match self.earlier[v].first() {
            Some(&(w, Dir::Forward)) => &self.forward_nbhd[assignment[w]],
            Some(&(w, Dir::Backward)) => &self.backward_nbhd[assignment[w]],
            None => {
                all = (0..self.target.len()).collect();
                &all
            }
        };
        for &c in candidates {
            if let Some(mask) = &self.allowed[v] {
                if !mask[c] {
                    continue;
                }
            }
            let consistent = self.earlier[v].iter().all(|&(w, dir)| match dir {
                Dir::Forward => self.adjacency.arrow_or_eq(assignment[w], c),
                Dir::Backward => self.adjacency.arrow_or_eq(c, assignment[w]),
            });
            if !consistent {
                continue;
            }
            assignment[v] = c;
            self.descend(v + 1, assignment, count, budget, over, f)?;
        }
        ControlFlow::Continue(())
    }

    /// All maps, in lexicographic order.
    pub fn collect(&self, budget: usize) -> Result<Vec<Vec<usize>>, DigraphError> {
        let mut maps = Vec::new();
        self.for_each(budget, |a| {
            maps.push(a.to_vec());
            ControlFlow::Continue(())
        })?;
        Ok(maps)
    }

    /// Number of maps, stopping once `limit` have been seen.
    pub fn count_up_to(&self, limit: usize) -> usize {
        let mut n = 0;
        let _ = self.for_each(usize::MAX, |_| {
            n += 1;
            if n >= limit {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        n
    }
}

/// A box hom digraph together with the maps naming its vertices.
#[derive(Clone, Debug)]
pub struct BoxHom {
    pub digraph: Digraph,
    pub maps: Vec<Vec<usize>>,
}

impl BoxHom {
    /// Vertex index of a map, if present.
    pub fn index_of(&self, map: &[usize]) -> Option<usize> {
        self.maps.iter().position(|m| m == map)
    }
}

/// Label of a map as the bracketed list of its images.
pub(crate) fn map_label(target: &Digraph, assignment: &[usize]) -> String {
    let parts: Vec<&str> = assignment.iter().map(|&w| target.label(w)).collect();
    format!("[{}]", parts.join(","))
}

/// Vertices are all maps `g → h`; `φ → ψ` whenever `φ(x) → ψ(x)` is an arrow
/// or equality for every `x`.
pub fn box_hom(g: &Digraph, h: &Digraph, vertex_budget: usize) -> Result<BoxHom, DigraphError> {
    hom_digraph(g, h, None, vertex_budget)
}

/// Relative box hom of pairs. Vertices are maps sending the source part into
/// the target part, arrows additionally agree on the source part. The
/// returned pair's part consists of the maps with image inside the target part.
pub fn pair_box_hom(
    p: &DigraphPair,
    q: &DigraphPair,
    vertex_budget: usize,
) -> Result<(DigraphPair, Vec<Vec<usize>>), DigraphError> {
    let hom = hom_digraph(
        &p.ambient,
        &q.ambient,
        Some((&p.part, &q.part)),
        vertex_budget,
    )?;
    let mut in_part = vec![false; q.ambient.len()];
    for &w in &q.part {
        in_part[w] = true;
    }
    let part = (0..hom.maps.len())
        .filter(|&i| hom.maps[i].iter().all(|&w| in_part[w]))
        .collect();
    Ok((
        DigraphPair {
            ambient: hom.digraph,
            part,
        },
        hom.maps,
    ))
}

pub(crate) fn hom_digraph(
    g: &Digraph,
    h: &Digraph,
    rel: Option<(&[usize], &[usize])>,
    budget: usize,
) -> Result<BoxHom, DigraphError> {
    let mut search = MapSearch::new(g, h);
    if let Some((sp, tp)) = rel {
        search = search.restrict_all(sp, tp);
    }
    let maps = search.collect(budget)?;
    let index: HashMap<&[usize], usize> = maps.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    let mut in_part = vec![false; g.len()];
    if let Some((sp, _)) = rel {
        for &v in sp {
            in_part[v] = true;
        }
    }
    let mut arrows = Vec::new();
    for (i, phi) in maps.iter().enumerate() {
        let mut s = MapSearch::new(g, h);
        for x in 0..g.len() {
            if in_part[x] {
                s = s.restrict(x, &[phi[x]]);
            } else {
                let mut nb = h.out_neighbors(phi[x]).to_vec();
                nb.push(phi[x]);
                s = s.restrict(x, &nb);
            }
        }
        s.for_each(usize::MAX, |psi| {
            if let Some(&j) = index.get(psi) {
                if j != i {
                    arrows.push((i, j));
                }
            }
            ControlFlow::Continue(())
        })?;
    }
    let labels = maps.iter().map(|m| map_label(h, m)).collect();
    let digraph = Digraph::from_indexed(labels, arrows)?;
    Ok(BoxHom { digraph, maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::map::is_digraph_map;

    fn interval(n: usize) -> Digraph {
        crate::interval::Interval::standard(n, crate::interval::Sign::Plus).to_digraph()
    }

    fn brute_force(g: &Digraph, h: &Digraph) -> Vec<Vec<usize>> {
        let n = g.len();
        let total = h.len().pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut a = vec![0; n];
            let mut c = code;
            for slot in a.iter_mut().rev() {
                *slot = c % h.len();
                c /= h.len();
            }
            if is_digraph_map(g, h, &a) {
                out.push(a);
            }
        }
        out
    }

    #[test]
    fn hom_i1_i1_has_three_vertices() {
        let i1 = interval(1);
        let hom = box_hom(&i1, &i1, 100).unwrap();
        assert_eq!(hom.maps, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(hom.digraph.arrow_count(), 3);
    }

    #[test]
    fn hom_i2_c3_matches_brute_force() {
        let (i2, c3) = (interval(2), Digraph::cycle(3));
        let hom = box_hom(&i2, &c3, 1000).unwrap();
        assert_eq!(hom.maps, brute_force(&i2, &c3));
        // frozen from the brute-force oracle over 3^3 assignments
        assert_eq!(hom.maps.len(), 12);
    }

    #[test]
    fn hom_from_point_is_target() {
        let g = Digraph::cycle(4);
        let hom = box_hom(&Digraph::point(), &g, 10).unwrap();
        assert_eq!(hom.maps.len(), 4);
        assert_eq!(hom.digraph.arrows().collect::<Vec<_>>(), g.arrows().collect::<Vec<_>>());
    }

    #[test]
    fn budget_is_enforced() {
        let err = box_hom(&Digraph::discrete(3), &Digraph::cycle(3), 26).unwrap_err();
        assert_eq!(err, DigraphError::BudgetExceeded(26));
        assert!(box_hom(&Digraph::discrete(3), &Digraph::cycle(3), 27).is_ok());
    }

    #[test]
    fn search_matches_brute_force_on_small_pairs() {
        let graphs = [interval(2), Digraph::cycle(3), interval(3).opposite(), Digraph::discrete(2)];
        for g in &graphs {
            for h in &graphs {
                let found = MapSearch::new(g, h).collect(usize::MAX).unwrap();
                assert_eq!(found, brute_force(g, h));
            }
        }
    }
}
