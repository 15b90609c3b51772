//! Homotopy classes of digraph maps, cube-group towers, path and loop stages,
//! and directed deformation retracts.

use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::Serialize;
use thiserror::Error;

use crate::cover::{is_in_closed, out_closure};
use crate::digraph::{
    distances_from, hom_digraph, pair_box_hom, BoxHom, Digraph, DigraphError, DigraphMap, DigraphPair,
    Distance, MapSearch,
};
use crate::grid::{GridMap, TensorGrid};
use crate::interval::{sphere_digraph, Interval, IntervalError, TowerKind};
use crate::union_find::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomotopyError {
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("part {0:?} is not in-closed")]
    NotInClosed(Vec<String>),
    #[error("{0}")]
    BadInput(String),
}

impl HomotopyError {
    pub fn is_budget(&self) -> bool {
        matches!(self, HomotopyError::Digraph(DigraphError::BudgetExceeded(_)))
    }
}

/// Constraint on the maps `(G, H) → (G′, H′)` under consideration.
#[derive(Clone, Copy, Debug)]
pub struct PairConstraint<'a> {
    /// `H ⊆ G`, sent into `target_part`.
    pub source_part: &'a [usize],
    pub target_part: &'a [usize],
    /// Whether homotopies must be constant on `source_part`.
    pub relative: bool,
}

/// True iff `φ → ψ` in the (relative) box hom: `φ(x) → ψ(x)` is an arrow
/// or equality everywhere, and `φ = ψ` on `rel_part`.
pub fn one_step_homotopy(phi: &DigraphMap, psi: &DigraphMap, rel_part: Option<&[usize]>) -> bool {
    assert_eq!(phi.source(), psi.source());
    assert_eq!(phi.target(), psi.target());
    one_step(phi.assignment(), psi.assignment(), phi.target(), rel_part.unwrap_or(&[]))
}

fn one_step(phi: &[usize], psi: &[usize], target: &Digraph, rel: &[usize]) -> bool {
    phi.iter().zip(psi).all(|(&a, &b)| target.is_arrow(a, b)) && rel.iter().all(|&h| phi[h] == psi[h])
}

/// Maps partitioned into homotopy classes.
#[derive(Clone, Debug)]
pub struct HomotopyClasses {
    pub maps: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    pub class_count: usize,
    index: HashMap<Vec<usize>, usize>,
}

impl HomotopyClasses {
    /// Index of the first map of each class.
    pub fn representatives(&self) -> Vec<usize> {
        let mut reps = vec![usize::MAX; self.class_count];
        for (i, &c) in self.class_of.iter().enumerate() {
            if reps[c] == usize::MAX {
                reps[c] = i;
            }
        }
        reps
    }

    pub fn map_index(&self, map: &[usize]) -> Option<usize> {
        self.index.get(map).copied()
    }

    pub fn class_of_map(&self, map: &[usize]) -> Option<usize> {
        self.map_index(map).map(|i| self.class_of[i])
    }
}

/// Connected components of the (relative) box hom, computed by enumerating
/// all maps and the one-step homotopies out of each.
pub fn homotopy_classes(
    source: &Digraph,
    target: &Digraph,
    constraint: Option<PairConstraint<'_>>,
    budget: usize,
) -> Result<HomotopyClasses, HomotopyError> {
    let mut search = MapSearch::new(source, target);
    if let Some(c) = constraint {
        search = search.restrict_all(c.source_part, c.target_part);
    }
    let maps = search.collect(budget)?;
    let index: HashMap<Vec<usize>, usize> = maps.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let fixed: &[usize] = match constraint {
        Some(c) if c.relative => c.source_part,
        _ => &[],
    };
    let mut uf = UnionFind::new(maps.len());
    for (i, phi) in maps.iter().enumerate() {
        let mut s = MapSearch::new(source, target);
        if let Some(c) = constraint {
            s = s.restrict_all(c.source_part, c.target_part);
        }
        for x in 0..source.len() {
            let mut nb = target.out_neighbors(phi[x]).to_vec();
            nb.push(phi[x]);
            s = s.restrict(x, &nb);
        }
        for &h in fixed {
            s = s.restrict(h, &[phi[h]]);
        }
        s.for_each(usize::MAX, |psi| {
            if let Some(&j) = index.get(psi) {
                uf.union(i, j);
            }
            ControlFlow::Continue(())
        })?;
    }
    let (class_of, class_count) = uf.labels();
    Ok(HomotopyClasses { maps, class_of, class_count, index })
}

/// Classes at one stage of a cube-group tower.
#[derive(Clone, Debug, Serialize)]
pub struct TowerStage {
    pub stage: usize,
    pub interval: String,
    pub maps: usize,
    pub classes: usize,
}

/// Class map induced by precomposing with a tower shrinking.
#[derive(Clone, Debug, Serialize)]
pub struct TowerTransition {
    pub from_stage: usize,
    pub to_stage: usize,
    pub class_map: Vec<usize>,
    /// Homotopic maps have homotopic images, checked on every map.
    pub well_defined: bool,
    pub injective: bool,
    pub surjective: bool,
}

/// Pointed relative classes of `(J_s, ∂J_s)^{⊗n} → (G, g)` along a tower.
#[derive(Clone, Debug, Serialize)]
pub struct AnTower {
    pub n: usize,
    pub tower: String,
    pub stages: Vec<TowerStage>,
    pub transitions: Vec<TowerTransition>,
    /// First pair of consecutive stages joined by a bijective transition.
    pub stable_window: Option<(usize, usize)>,
    #[serde(skip)]
    pub classes: Vec<HomotopyClasses>,
}

fn cube_classes(
    g: &Digraph,
    base: usize,
    j: &Interval,
    n: usize,
    budget: usize,
) -> Result<(TensorGrid, HomotopyClasses), HomotopyError> {
    let grid = TensorGrid::power(j, n);
    let cube = grid.digraph();
    let boundary = if n == 0 { Vec::new() } else { grid.boundary() };
    let classes = homotopy_classes(
        &cube,
        g,
        Some(PairConstraint { source_part: &boundary, target_part: &[base], relative: true }),
        budget,
    )?;
    Ok((grid, classes))
}

/// Stages `1..=max_stage` of the tower computing `A_n(G, g)`.
pub fn an_tower(
    g: &Digraph,
    base: usize,
    n: usize,
    tower: TowerKind,
    max_stage: usize,
    budget: usize,
) -> Result<AnTower, HomotopyError> {
    if base >= g.len() {
        return Err(DigraphError::IndexOutOfRange(base).into());
    }
    let mut stages = Vec::new();
    let mut all = Vec::new();
    for s in 1..=max_stage {
        let j = tower.stage(s)?;
        let (grid, classes) = cube_classes(g, base, &j, n, budget)?;
        stages.push(TowerStage { stage: s, interval: j.to_string(), maps: classes.maps.len(), classes: classes.class_count });
        all.push((grid, classes));
    }
    let mut transitions = Vec::new();
    for s in 1..max_stage {
        let t = tower.transition(s)?;
        let power = GridMap::tensor(&vec![t; n]);
        let (lower, upper) = (&all[s - 1].1, &all[s].1);
        let mut class_map = vec![usize::MAX; lower.class_count];
        let mut well_defined = true;
        for (i, phi) in lower.maps.iter().enumerate() {
            let pulled: Vec<usize> = power.table.iter().map(|&k| phi[k]).collect();
            let image = upper
                .class_of_map(&pulled)
                .ok_or_else(|| HomotopyError::BadInput("precomposed map left the stage".into()))?;
            let c = lower.class_of[i];
            if class_map[c] == usize::MAX {
                class_map[c] = image;
            } else if class_map[c] != image {
                well_defined = false;
            }
        }
        let mut hit = vec![false; upper.class_count];
        for &c in &class_map {
            hit[c] = true;
        }
        let mut sorted = class_map.clone();
        sorted.sort_unstable();
        sorted.dedup();
        transitions.push(TowerTransition {
            from_stage: s,
            to_stage: s + 1,
            injective: sorted.len() == class_map.len(),
            surjective: hit.iter().all(|&h| h),
            class_map,
            well_defined,
        });
    }
    let stable_window = transitions
        .iter()
        .find(|t| t.injective && t.surjective)
        .map(|t| (t.from_stage, t.to_stage));
    Ok(AnTower {
        n,
        tower: tower.to_string(),
        stages,
        transitions,
        stable_window,
        classes: all.into_iter().map(|(_, c)| c).collect(),
    })
}

/// `Hom⊗(J, G)` with the endpoint evaluations.
#[derive(Clone, Debug)]
pub struct PathStage {
    pub interval: Interval,
    pub hom: BoxHom,
    /// Evaluation at `0`, as an index into `G`.
    pub p0: Vec<usize>,
    /// Evaluation at the last vertex.
    pub p1: Vec<usize>,
}

pub fn path_stage(g: &Digraph, j: &Interval, budget: usize) -> Result<PathStage, HomotopyError> {
    let hom = hom_digraph(&j.to_digraph(), g, None, budget)?;
    let last = j.len();
    let p0 = hom.maps.iter().map(|m| m[0]).collect();
    let p1 = hom.maps.iter().map(|m| m[last]).collect();
    Ok(PathStage { interval: j.clone(), hom, p0, p1 })
}

/// Induced subdigraph of the path stage on paths starting and ending at `base`,
/// with the indices of those paths.
pub fn loop_stage(
    g: &Digraph,
    base: usize,
    j: &Interval,
    budget: usize,
) -> Result<(Digraph, Vec<usize>), HomotopyError> {
    let p = path_stage(g, j, budget)?;
    let fiber: Vec<usize> = (0..p.hom.maps.len())
        .filter(|&i| p.p0[i] == base && p.p1[i] == base)
        .collect();
    Ok((p.hom.digraph.induced(&fiber)?, fiber))
}

/// Comparison of the loop stage with the pointed maps out of the circle.
#[derive(Clone, Debug, Serialize)]
pub struct PullbackReport {
    pub interval: String,
    pub path_vertices: usize,
    pub fiber_vertices: usize,
    pub pointed_circle_maps: usize,
    /// The fiber of `(p0, p1)` over `(g, g)` with its induced arrows equals
    /// the pointed box hom out of `S¹_J`, matched through the quotient `J → S¹_J`.
    pub is_pullback: bool,
}

/// Checks at one finite stage that the loop stage is the pullback of the
/// endpoint evaluations along the base point.
pub fn omega_pullback_check(
    g: &Digraph,
    base: usize,
    j: &Interval,
    budget: usize,
) -> Result<PullbackReport, HomotopyError> {
    let p = path_stage(g, j, budget)?;
    let fiber: Vec<usize> = (0..p.hom.maps.len())
        .filter(|&i| p.p0[i] == base && p.p1[i] == base)
        .collect();
    let pullback = p.hom.digraph.induced(&fiber)?;

    let sphere = sphere_digraph(j, 1)?;
    let pointed_source = DigraphPair::pointed(sphere.digraph.clone(), sphere.base)?;
    let pointed_target = DigraphPair::pointed(g.clone(), base)?;
    let (circle_hom, circle_maps) = pair_box_hom(&pointed_source, &pointed_target, budget)?;
    let quotient: Vec<usize> = (0..j.vertex_count())
        .map(|x| sphere.digraph.index_of(&format!("({x})")).unwrap_or(sphere.base))
        .collect();
    let lifted: Vec<Vec<usize>> = circle_maps
        .iter()
        .map(|m| quotient.iter().map(|&q| m[q]).collect())
        .collect();
    let position: HashMap<&[usize], usize> = fiber
        .iter()
        .enumerate()
        .map(|(local, &i)| (p.hom.maps[i].as_slice(), local))
        .collect();
    let matched: Option<Vec<usize>> = lifted.iter().map(|m| position.get(m.as_slice()).copied()).collect();
    let is_pullback = match matched {
        Some(m) if m.len() == fiber.len() => {
            let mut seen = m.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == m.len()
                && circle_hom.ambient.arrow_count() == pullback.arrow_count()
                && circle_hom.ambient.arrows().all(|(a, b)| pullback.has_proper_arrow(m[a], m[b]))
        }
        _ => false,
    };
    Ok(PullbackReport {
        interval: j.to_string(),
        path_vertices: p.hom.maps.len(),
        fiber_vertices: fiber.len(),
        pointed_circle_maps: circle_maps.len(),
        is_pullback,
    })
}

/// Outcome of one condition with an optional counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    fn from_witness(witness: Option<String>) -> Self {
        Verdict { holds: witness.is_none(), witness }
    }
}

/// Per-condition result of a deformation-retract check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DdrReport {
    /// `η(g) → g` for all `g`.
    pub ddr1: Verdict,
    /// `η` fixes the part.
    pub ddr2: Verdict,
    /// `dist(h, g) = dist(h, η(g)) + 1` for `g` outside and `h` inside the part.
    pub ddr3: Verdict,
    pub definition_holds: bool,
    /// Every vertex reaches the part under iterates of `η`.
    pub iterates_reach_part: Verdict,
    /// Shortest paths from the part factor through the `η`-chain.
    pub paths_factor: Verdict,
    pub reformulation_holds: bool,
    pub agree: bool,
}

/// Checks that `part` is a directed deformation retract of `ambient` via `eta`.
pub fn verify_ddr(ambient: &Digraph, part: &[usize], eta: &DigraphMap) -> Result<DdrReport, HomotopyError> {
    if **eta.source() != *ambient || **eta.target() != *ambient {
        return Err(HomotopyError::BadInput("η must be a self-map of the ambient digraph".into()));
    }
    if !is_in_closed(ambient, part) {
        return Err(HomotopyError::NotInClosed(ambient.labels_of(part)));
    }
    let n = ambient.len();
    let mut in_part = vec![false; n];
    for &h in part {
        in_part[h] = true;
    }
    let e = eta.assignment();
    let lbl = |v: usize| ambient.label(v).to_string();
    let from_part: Vec<(usize, Vec<Distance>)> = part.iter().map(|&h| (h, distances_from(ambient, h))).collect();

    let ddr1 = Verdict::from_witness(
        (0..n).find(|&g| !ambient.is_arrow(e[g], g)).map(|g| format!("no arrow η({}) = {} → {}", lbl(g), lbl(e[g]), lbl(g))),
    );
    let ddr2 = Verdict::from_witness(
        part.iter().find(|&&h| e[h] != h).map(|&h| format!("η moves {} to {}", lbl(h), lbl(e[h]))),
    );
    let mut ddr3_witness = None;
    'outer: for g in (0..n).filter(|&g| !in_part[g]) {
        for (h, d) in &from_part {
            if d[g] != d[e[g]].plus(1) {
                ddr3_witness = Some(format!(
                    "dist({}, {}) = {} but dist({}, η({})) + 1 = {}",
                    lbl(*h), lbl(g), d[g], lbl(*h), lbl(g), d[e[g]].plus(1)
                ));
                break 'outer;
            }
        }
    }
    let ddr3 = Verdict::from_witness(ddr3_witness);
    let definition_holds = ddr1.holds && ddr2.holds && ddr3.holds;

    // reformulation: minimal n(g) with η^n(g) in the part, and shortest paths
    // from the part through η^n(g) → … → g
    let mut reach_witness = None;
    let mut factor_witness = None;
    for g in (0..n).filter(|&g| !in_part[g]) {
        let mut chain = vec![g];
        let mut x = g;
        let mut steps = 0;
        while !in_part[x] && steps <= n {
            x = e[x];
            chain.push(x);
            steps += 1;
        }
        if !in_part[x] {
            reach_witness.get_or_insert_with(|| format!("iterates of η from {} never meet the part", lbl(g)));
            continue;
        }
        let chain_is_path = chain.windows(2).all(|w| ambient.has_proper_arrow(w[1], w[0]));
        for (h, d) in &from_part {
            let ok = match d[g] {
                Distance::Infinite => true,
                Distance::Finite(_) => chain_is_path && d[g] == d[x].plus(steps),
            };
            if !ok && factor_witness.is_none() {
                factor_witness = Some(format!(
                    "no shortest path from {} to {} through η^{}({}) = {}",
                    lbl(*h), lbl(g), steps, lbl(g), lbl(x)
                ));
            }
        }
    }
    let iterates_reach_part = Verdict::from_witness(reach_witness);
    let paths_factor = Verdict::from_witness(factor_witness);
    let reformulation_holds = ddr1.holds && ddr2.holds && iterates_reach_part.holds && paths_factor.holds;
    Ok(DdrReport {
        agree: definition_holds == reformulation_holds,
        ddr1,
        ddr2,
        ddr3,
        definition_holds,
        iterates_reach_part,
        paths_factor,
        reformulation_holds,
    })
}

/// Deformation-retract check of `part` inside its out-closure.
#[derive(Clone, Debug, Serialize)]
pub struct OddrReport {
    pub out_closure: Vec<String>,
    pub ddr: DdrReport,
}

/// `part` is in-closed in `g` and a deformation retract of `Out(part)` via
/// `eta_on_out`, a self-map of the induced subdigraph on `Out(part)`.
pub fn verify_oddr(g: &Digraph, part: &[usize], eta_on_out: &DigraphMap) -> Result<OddrReport, HomotopyError> {
    if !is_in_closed(g, part) {
        return Err(HomotopyError::NotInClosed(g.labels_of(part)));
    }
    let out = out_closure(g, part);
    let o = g.induced(&out)?;
    let local: Vec<usize> = part
        .iter()
        .map(|&h| out.binary_search(&h).expect("part lies in its out-closure"))
        .collect();
    let ddr = verify_ddr(&o, &local, eta_on_out)?;
    Ok(OddrReport { out_closure: g.labels_of(&out), ddr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::box_product;
    use crate::interval::Sign;
    use std::sync::Arc;

    fn interval(n: usize) -> Digraph {
        Interval::standard(n, Sign::Plus).to_digraph()
    }

    #[test]
    fn one_step_examples() {
        let (p, i1) = (Arc::new(Digraph::point()), Arc::new(interval(1)));
        let c0 = DigraphMap::constant(p.clone(), i1.clone(), 0);
        let c1 = DigraphMap::constant(p, i1, 1);
        assert!(one_step_homotopy(&c0, &c0, None));
        assert!(one_step_homotopy(&c0, &c1, None));
        assert!(!one_step_homotopy(&c1, &c0, None));
    }

    #[test]
    fn classes_from_point_are_components() {
        let g = crate::digraph::disjoint_union(&Digraph::cycle(3), &interval(2));
        let c = homotopy_classes(&Digraph::point(), &g, None, 100).unwrap();
        assert_eq!(c.class_count, 2);
    }

    #[test]
    fn pointed_interval_into_c3() {
        let i1 = interval(1);
        let c = homotopy_classes(
            &i1,
            &Digraph::cycle(3),
            Some(PairConstraint { source_part: &[0, 1], target_part: &[0], relative: true }),
            100,
        )
        .unwrap();
        // only the constant map sends both endpoints of I₁ to 0
        assert_eq!(c.maps.len(), 1);
        assert_eq!(c.class_count, 1);
    }

    #[test]
    fn tower_on_point_target_is_trivial() {
        for n in 0..3 {
            let t = an_tower(&Digraph::point(), 0, n, TowerKind::Right, 3, 10_000).unwrap();
            assert!(t.stages.iter().all(|s| s.classes == 1));
        }
        let g = crate::digraph::disjoint_union(&Digraph::cycle(3), &Digraph::point());
        let t = an_tower(&g, 0, 0, TowerKind::Standard, 3, 100).unwrap();
        assert!(t.stages.iter().all(|s| s.classes == 2));
    }

    #[test]
    fn loop_stage_counts() {
        let (l, _) = loop_stage(&Digraph::cycle(3), 0, &Interval::standard(2, Sign::Plus), 1000).unwrap();
        // maps 0→1←2 into C₃ with both ends at 0: f(1) ∈ {0, 1}
        assert_eq!(l.len(), 2);
        let p = path_stage(&Digraph::cycle(3), &Interval::point(), 100).unwrap();
        assert_eq!(p.hom.maps.len(), 3);
        assert_eq!(p.p0, p.p1);
    }

    #[test]
    fn square_retracts_to_corner() {
        let sq = box_product(&interval(1), &interval(1));
        let sq = Arc::new(sq);
        let eta = DigraphMap::new(sq.clone(), sq.clone(), vec![0, 0, 0, 1]).unwrap();
        let r = verify_ddr(&sq, &[0], &eta).unwrap();
        assert!(r.definition_holds && r.reformulation_holds, "{r:?}");
    }

    #[test]
    fn identity_fails_distance_condition() {
        let i1 = Arc::new(interval(1));
        let id = DigraphMap::identity(i1.clone());
        let r = verify_ddr(&i1, &[0], &id).unwrap();
        assert!(!r.ddr3.holds);
        assert!(r.agree);
        assert!(matches!(verify_ddr(&i1, &[1], &id), Err(HomotopyError::NotInClosed(_))));
        let all = verify_ddr(&i1, &[0, 1], &id).unwrap();
        assert!(all.definition_holds);
    }
}
