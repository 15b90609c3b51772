//! Truncated cubical nerves of digraphs, their structure maps, horn and
//! boundary realizations, the horn filler at triple side length and the
//! `ρ` maps used to compare nerves of different side lengths.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::digraph::{Digraph, DigraphError, DigraphMap, MapSearch};
use crate::grid::{GridMap, TensorGrid};
use crate::interval::{central_power, truncation, Interval, IntervalError, Sign, Truncation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NerveError {
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("bad index: {0}")]
    BadIndex(String),
    #[error("side length parameter {0} must be even")]
    Parity(usize),
    #[error("nerves do not match: {0}")]
    Mismatch(String),
}

impl NerveError {
    pub fn is_budget(&self) -> bool {
        matches!(self, NerveError::Digraph(DigraphError::BudgetExceeded(_)))
    }
}

/// A map `J^{⊗n} → G`, stored as a table over the grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeMap {
    pub grid: TensorGrid,
    pub target: Arc<Digraph>,
    pub assignment: Vec<usize>,
}

impl CubeMap {
    pub fn new(j: &Interval, n: usize, target: Arc<Digraph>, assignment: Vec<usize>) -> Result<Self, NerveError> {
        let grid = TensorGrid::power(j, n);
        if assignment.len() != grid.size() {
            return Err(NerveError::BadIndex(format!(
                "a cube of dimension {n} needs {} values, got {}",
                grid.size(),
                assignment.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&a| a >= target.len()) {
            return Err(DigraphError::IndexOutOfRange(bad).into());
        }
        for (a, b) in grid.arrows() {
            if !target.is_arrow(assignment[a], assignment[b]) {
                return Err(DigraphError::NotAMap {
                    from: grid.digraph().label(a).to_string(),
                    to: grid.digraph().label(b).to_string(),
                    image_from: target.label(assignment[a]).to_string(),
                    image_to: target.label(assignment[b]).to_string(),
                }
                .into());
            }
        }
        Ok(CubeMap { grid, target, assignment })
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn precompose(&self, along: &GridMap) -> CubeMap {
        CubeMap {
            grid: along.source.clone(),
            target: self.target.clone(),
            assignment: along.table.iter().map(|&k| self.assignment[k]).collect(),
        }
    }

    /// `∂_{i,ε}`, `1 ≤ i ≤ n`.
    pub fn face(&self, i: usize, eps: u8) -> CubeMap {
        self.precompose(&GridMap::coface(&self.grid, i, eps))
    }

    /// `σ_i`, producing a cube one dimension up.
    pub fn degeneracy(&self, i: usize) -> CubeMap {
        let up = TensorGrid::new(insert_factor(&self.grid, i));
        self.precompose(&GridMap::degeneracy(&up, i))
    }

    /// `γ_{i,ε}`, `1 ≤ i ≤ n`, producing a cube one dimension up.
    pub fn connection(&self, i: usize, eps: u8) -> CubeMap {
        let up = TensorGrid::new(insert_factor(&self.grid, i));
        self.precompose(&GridMap::connection(&up, i, eps))
    }
}

fn insert_factor(grid: &TensorGrid, i: usize) -> Vec<Interval> {
    let mut f = grid.factors().to_vec();
    let j = f.first().cloned().unwrap_or_else(Interval::point);
    f.insert(i - 1, j);
    f
}

/// Which quotient a degenerate cube factors through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Degeneracy {
    Sigma(usize),
    Gamma(usize, u8),
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::Sigma(i) => write!(f, "σ_{i}"),
            Degeneracy::Gamma(i, e) => write!(f, "γ_{i},{e}"),
        }
    }
}

/// A degenerate cube `x = y ∘ q` with `q` a codegeneracy or coconnection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneracyWitness {
    pub kind: Degeneracy,
    /// `y`, as a table over the grid one dimension down.
    pub lower: Vec<usize>,
}

/// Quotient grid maps `J^{⊗n} → J^{⊗n−1}`, degeneracies first.
fn quotients(grid: &TensorGrid) -> Vec<(Degeneracy, GridMap)> {
    let n = grid.dim();
    let mut out: Vec<_> = (1..=n).map(|i| (Degeneracy::Sigma(i), GridMap::degeneracy(grid, i))).collect();
    for i in 1..n {
        for e in 0..2 {
            out.push((Degeneracy::Gamma(i, e), GridMap::connection(grid, i, e)));
        }
    }
    out
}

fn factor_through(assignment: &[usize], q: &GridMap) -> Option<Vec<usize>> {
    let mut lower = vec![usize::MAX; q.target.size()];
    for (v, &w) in q.table.iter().enumerate() {
        if lower[w] == usize::MAX {
            lower[w] = assignment[v];
        } else if lower[w] != assignment[v] {
            return None;
        }
    }
    Some(lower)
}

fn witness_among(assignment: &[usize], qs: &[(Degeneracy, GridMap)]) -> Option<DegeneracyWitness> {
    qs.iter()
        .find_map(|(kind, q)| factor_through(assignment, q).map(|lower| DegeneracyWitness { kind: *kind, lower }))
}

/// `Some(witness)` iff the cube is constant on the fibers of some `σ^i` or
/// `γ^{i,ε}`.
pub fn degenerate_cube_test(c: &CubeMap) -> Option<DegeneracyWitness> {
    witness_among(&c.assignment, &quotients(&c.grid))
}

/// Levels `0..=K` of `N_J G` with all structure maps as index tables.
#[derive(Clone, Debug)]
pub struct TruncatedCubicalSet {
    pub interval: Interval,
    pub target: Arc<Digraph>,
    pub top_dim: usize,
    pub grids: Vec<TensorGrid>,
    /// `cubes[n]`: assignments over `grids[n]`, in enumeration order.
    pub cubes: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    /// `faces[n][2(i−1)+ε][x]` for `n ≥ 1`.
    pub faces: Vec<Vec<Vec<usize>>>,
    /// `degeneracies[n][i−1][y]`, level `n−1 → n`.
    pub degeneracies: Vec<Vec<Vec<usize>>>,
    /// `connections[n][2(i−1)+ε][y]`, level `n−1 → n`, `1 ≤ i ≤ n−1`.
    pub connections: Vec<Vec<Vec<usize>>>,
    pub nondegenerate: Vec<Vec<bool>>,
}

/// Cube counts for one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCount {
    pub dim: usize,
    pub cubes: usize,
    pub nondegenerate: usize,
}

impl TruncatedCubicalSet {
    pub fn level_len(&self, n: usize) -> usize {
        self.cubes[n].len()
    }

    pub fn lookup(&self, n: usize, assignment: &[usize]) -> Option<usize> {
        self.index[n].get(assignment).copied()
    }

    pub fn face(&self, n: usize, i: usize, eps: u8, x: usize) -> usize {
        self.faces[n][2 * (i - 1) + eps as usize][x]
    }

    pub fn degeneracy(&self, n: usize, i: usize, y: usize) -> usize {
        self.degeneracies[n][i - 1][y]
    }

    pub fn connection(&self, n: usize, i: usize, eps: u8, y: usize) -> usize {
        self.connections[n][2 * (i - 1) + eps as usize][y]
    }

    /// For each cube of level `n`, the first degeneracy it factors through
    /// and the index of the lower cube.
    pub fn degeneracy_witnesses(&self, n: usize) -> Vec<Option<(Degeneracy, usize)>> {
        let qs = quotients(&self.grids[n]);
        self.cubes[n]
            .iter()
            .map(|c| {
                witness_among(c, &qs).map(|w| {
                    let lower = self.lookup(n - 1, &w.lower).expect("a degeneracy witness is a cube");
                    (w.kind, lower)
                })
            })
            .collect()
    }

    pub fn nondegenerate_cubes(&self, n: usize) -> Vec<usize> {
        (0..self.cubes[n].len()).filter(|&x| self.nondegenerate[n][x]).collect()
    }

    pub fn counts(&self) -> Vec<LevelCount> {
        (0..=self.top_dim)
            .map(|n| LevelCount {
                dim: n,
                cubes: self.cubes[n].len(),
                nondegenerate: self.nondegenerate[n].iter().filter(|&&b| b).count(),
            })
            .collect()
    }

    pub fn cube(&self, n: usize, x: usize) -> CubeMap {
        CubeMap { grid: self.grids[n].clone(), target: self.target.clone(), assignment: self.cubes[n][x].clone() }
    }

    /// Checks every cubical identity on every composable pair of structure
    /// maps; returns at most `limit` violations.
    pub fn identity_violations(&self, limit: usize) -> Vec<IdentityViolation> {
        let mut out = Vec::new();
        let mut report = |identity: String, dim: usize, cube: usize| {
            if out.len() < limit {
                out.push(IdentityViolation { identity, dim, cube });
            }
        };
        let k = self.top_dim;
        let f = |n, i, e, x| self.face(n, i, e, x);
        let s = |n, i, y| self.degeneracy(n, i, y);
        let g = |n, i, e, y| self.connection(n, i, e, y);
        for n in 2..=k {
            for x in 0..self.level_len(n) {
                for i in 1..n {
                    for j in 1..=i {
                        for (e, e2) in SIGN_PAIRS {
                            if f(n - 1, i, e, f(n, j, e2, x)) != f(n - 1, j, e2, f(n, i + 1, e, x)) {
                                report(format!("∂{i},{e} ∂{j},{e2} = ∂{j},{e2} ∂{},{e}", i + 1), n, x);
                            }
                        }
                    }
                }
            }
            for y in 0..self.level_len(n - 2) {
                for i in 1..n {
                    for j in 1..=i {
                        if s(n, j, s(n - 1, i, y)) != s(n, i + 1, s(n - 1, j, y)) {
                            report(format!("σ{j} σ{i} = σ{} σ{j}", i + 1), n - 2, y);
                        }
                    }
                }
            }
        }
        for n in 1..=k {
            for x in 0..self.level_len(n - 1) {
                for j in 1..=n {
                    for i in 1..=n {
                        for e in 0..2 {
                            let lhs = f(n, i, e, s(n, j, x));
                            let rhs = match j.cmp(&i) {
                                std::cmp::Ordering::Less => s(n - 1, j, f(n - 1, i - 1, e, x)),
                                std::cmp::Ordering::Equal => x,
                                std::cmp::Ordering::Greater => s(n - 1, j - 1, f(n - 1, i, e, x)),
                            };
                            if lhs != rhs {
                                report(format!("∂{i},{e} σ{j}"), n - 1, x);
                            }
                        }
                    }
                }
            }
        }
        for n in 3..=k {
            for y in 0..self.level_len(n - 2) {
                for i in 1..=n - 2 {
                    for j in 1..=i {
                        for (e, e2) in SIGN_PAIRS {
                            if j == i && e != e2 {
                                continue;
                            }
                            let (lhs, rhs) = if j < i {
                                (g(n, j, e, g(n - 1, i, e2, y)), g(n, i + 1, e2, g(n - 1, j, e, y)))
                            } else {
                                (g(n, i, e, g(n - 1, i, e, y)), g(n, i + 1, e, g(n - 1, i, e, y)))
                            };
                            if lhs != rhs {
                                report(format!("γ{j},{e} γ{i},{e2}"), n - 2, y);
                            }
                        }
                    }
                }
            }
        }
        for n in 2..=k {
            for y in 0..self.level_len(n - 1) {
                for j in 1..n {
                    for i in 1..=n {
                        for (e, e2) in SIGN_PAIRS {
                            let lhs = f(n, i, e, g(n, j, e2, y));
                            let rhs = if j + 1 < i {
                                g(n - 1, j, e2, f(n - 1, i - 1, e, y))
                            } else if j > i {
                                g(n - 1, j - 1, e2, f(n - 1, i, e, y))
                            } else if e == e2 {
                                y
                            } else {
                                s(n - 1, j, f(n - 1, j, e, y))
                            };
                            if lhs != rhs {
                                report(format!("∂{i},{e} γ{j},{e2}"), n - 1, y);
                            }
                        }
                    }
                }
            }
            for y in 0..self.level_len(n - 2) {
                for j in 1..n {
                    for i in 1..n {
                        for e in 0..2 {
                            let lhs = g(n, i, e, s(n - 1, j, y));
                            let rhs = match j.cmp(&i) {
                                std::cmp::Ordering::Less => s(n, j, g(n - 1, i - 1, e, y)),
                                std::cmp::Ordering::Equal => s(n, i, s(n - 1, i, y)),
                                std::cmp::Ordering::Greater => s(n, j + 1, g(n - 1, i, e, y)),
                            };
                            if lhs != rhs {
                                report(format!("γ{i},{e} σ{j}"), n - 2, y);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

const SIGN_PAIRS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// A failed cubical identity at a given cube.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityViolation {
    pub identity: String,
    pub dim: usize,
    pub cube: usize,
}

/// Enumerates `N_J G` through dimension `top_dim`. `budget` bounds the total
/// number of cubes over all levels.
pub fn nerve_levels(
    g: Arc<Digraph>,
    j: &Interval,
    top_dim: usize,
    budget: usize,
) -> Result<TruncatedCubicalSet, NerveError> {
    let mut grids = Vec::new();
    let mut cubes = Vec::new();
    let mut index = Vec::new();
    let mut remaining = budget;
    for n in 0..=top_dim {
        let grid = TensorGrid::power(j, n);
        let level = MapSearch::new(&grid.digraph(), &g).collect(remaining).map_err(|e| match e {
            DigraphError::BudgetExceeded(_) => DigraphError::BudgetExceeded(budget),
            other => other,
        })?;
        remaining -= level.len();
        index.push(level.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect::<HashMap<_, _>>());
        cubes.push(level);
        grids.push(grid);
    }
    let lookup = |index: &HashMap<Vec<usize>, usize>, c: Vec<usize>| -> usize {
        *index.get(&c).expect("precomposition of a cube is a cube")
    };
    let mut faces = vec![Vec::new()];
    let mut degeneracies = vec![Vec::new()];
    let mut connections = vec![Vec::new()];
    let mut nondegenerate = Vec::new();
    for n in 0..=top_dim {
        let qs = quotients(&grids[n]);
        nondegenerate.push(cubes[n].iter().map(|c| witness_among(c, &qs).is_none()).collect());
        if n == 0 {
            continue;
        }
        let mut level_faces = Vec::new();
        for i in 1..=n {
            for e in 0..2 {
                let d = GridMap::coface(&grids[n], i, e);
                level_faces.push(
                    cubes[n]
                        .iter()
                        .map(|x| lookup(&index[n - 1], d.table.iter().map(|&k| x[k]).collect()))
                        .collect(),
                );
            }
        }
        faces.push(level_faces);
        let lift = |q: &GridMap| -> Vec<usize> {
            cubes[n - 1]
                .iter()
                .map(|y| lookup(&index[n], q.table.iter().map(|&k| y[k]).collect()))
                .collect()
        };
        degeneracies.push((1..=n).map(|i| lift(&GridMap::degeneracy(&grids[n], i))).collect());
        let mut level_conn = Vec::new();
        for i in 1..n {
            for e in 0..2 {
                level_conn.push(lift(&GridMap::connection(&grids[n], i, e)));
            }
        }
        connections.push(level_conn);
    }
    Ok(TruncatedCubicalSet {
        interval: j.clone(),
        target: g,
        top_dim,
        grids,
        cubes,
        index,
        faces,
        degeneracies,
        connections,
        nondegenerate,
    })
}

/// `N_m G` for the standard interval `I_m` of the given sign.
pub fn standard_nerve(
    g: Arc<Digraph>,
    m: usize,
    sign: Sign,
    top_dim: usize,
    budget: usize,
) -> Result<TruncatedCubicalSet, NerveError> {
    nerve_levels(g, &Interval::standard(m, sign), top_dim, budget)
}

/// A level-wise map between truncated cubical sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicalMap {
    pub levels: Vec<Vec<usize>>,
}

impl CubicalMap {
    pub fn identity(x: &TruncatedCubicalSet) -> Self {
        CubicalMap { levels: x.cubes.iter().map(|l| (0..l.len()).collect()).collect() }
    }

    pub fn then(&self, other: &CubicalMap) -> CubicalMap {
        CubicalMap {
            levels: self
                .levels
                .iter()
                .zip(&other.levels)
                .map(|(a, b)| a.iter().map(|&x| b[x]).collect())
                .collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.levels.iter().all(|l| {
            let mut s = l.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == l.len()
        })
    }

    /// Commutes with all faces, degeneracies and connections.
    pub fn is_natural(&self, source: &TruncatedCubicalSet, target: &TruncatedCubicalSet) -> bool {
        let f = &self.levels;
        (1..=source.top_dim).all(|n| {
            let faces_ok = (0..source.faces[n].len()).all(|t| {
                (0..source.level_len(n)).all(|x| f[n - 1][source.faces[n][t][x]] == target.faces[n][t][f[n][x]])
            });
            let degs_ok = (0..source.degeneracies[n].len()).all(|t| {
                (0..source.level_len(n - 1))
                    .all(|y| f[n][source.degeneracies[n][t][y]] == target.degeneracies[n][t][f[n - 1][y]])
            });
            let conns_ok = (0..source.connections[n].len()).all(|t| {
                (0..source.level_len(n - 1))
                    .all(|y| f[n][source.connections[n][t][y]] == target.connections[n][t][f[n - 1][y]])
            });
            faces_ok && degs_ok && conns_ok
        })
    }
}

/// `N_J φ`: postcomposition with `φ`.
pub fn nerve_functor_map(
    phi: &DigraphMap,
    source: &TruncatedCubicalSet,
    target: &TruncatedCubicalSet,
) -> Result<CubicalMap, NerveError> {
    if source.interval != target.interval || source.top_dim != target.top_dim {
        return Err(NerveError::Mismatch("nerves use different intervals or truncations".into()));
    }
    if **phi.source() != *source.target || **phi.target() != *target.target {
        return Err(NerveError::Mismatch("map does not run between the nerved digraphs".into()));
    }
    let levels = (0..=source.top_dim)
        .map(|n| {
            source.cubes[n]
                .iter()
                .map(|x| {
                    let image: Vec<usize> = x.iter().map(|&v| phi.apply(v)).collect();
                    target.lookup(n, &image).expect("postcomposition of a cube is a cube")
                })
                .collect()
        })
        .collect();
    Ok(CubicalMap { levels })
}

/// Precomposition with `t^{⊗n}` for a shrinking `t : J′ → J`, giving
/// `N_J G → N_{J′} G`.
pub fn precomposition_map(
    t: &crate::interval::IntervalMap,
    lower: &TruncatedCubicalSet,
    upper: &TruncatedCubicalSet,
) -> Result<CubicalMap, NerveError> {
    if t.target != lower.interval || t.source != upper.interval || lower.top_dim != upper.top_dim {
        return Err(NerveError::Mismatch(format!(
            "shrinking {} → {} does not connect nerves of {} and {}",
            t.source, t.target, upper.interval, lower.interval
        )));
    }
    let levels = (0..=lower.top_dim)
        .map(|n| {
            let power = GridMap::tensor(&vec![t.clone(); n]);
            lower.cubes[n]
                .iter()
                .map(|x| {
                    let pulled: Vec<usize> = power.table.iter().map(|&k| x[k]).collect();
                    upper.lookup(n, &pulled).expect("precomposition of a cube is a cube")
                })
                .collect()
        })
        .collect();
    Ok(CubicalMap { levels })
}

/// Comparison `N_m G → N_{m+Δ} G` along a truncation, together with both nerves.
pub fn comparison_map(
    kind: Truncation,
    g: Arc<Digraph>,
    m: usize,
    sign: Sign,
    top_dim: usize,
    budget: usize,
) -> Result<(TruncatedCubicalSet, TruncatedCubicalSet, CubicalMap), NerveError> {
    let t = truncation(kind, m, sign)?;
    let lower = nerve_levels(g.clone(), &t.target, top_dim, budget)?;
    let upper = nerve_levels(g, &t.source, top_dim, budget)?;
    let map = precomposition_map(&t, &lower, &upper)?;
    Ok((lower, upper, map))
}

/// A subdigraph of `I_m^{⊗n}` given by grid vertices.
#[derive(Clone, Debug)]
pub struct Realization {
    pub grid: TensorGrid,
    pub vertices: Vec<usize>,
    pub digraph: Digraph,
}

impl Realization {
    fn from_vertices(grid: TensorGrid, mut vertices: Vec<usize>) -> Result<Self, NerveError> {
        vertices.sort_unstable();
        vertices.dedup();
        let digraph = grid.digraph().induced(&vertices)?;
        Ok(Realization { grid, vertices, digraph })
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

fn check_face_index(n: usize, i: usize) -> Result<(), NerveError> {
    if n == 0 || i == 0 || i > n {
        return Err(NerveError::BadIndex(format!("face index {i} out of range for dimension {n}")));
    }
    Ok(())
}

/// `J^{⊗n}` as a digraph.
pub fn cube_realization(j: &Interval, n: usize) -> Digraph {
    TensorGrid::power(j, n).digraph()
}

/// `|⊓^n_{i,ε}|_m`: vertices with a coordinate `k ≠ i` at an endpoint, or
/// `v_i = (1−ε)·m`.
pub fn horn_realization(m: usize, n: usize, i: usize, eps: u8) -> Result<Realization, NerveError> {
    check_face_index(n, i)?;
    let grid = TensorGrid::power(&Interval::standard(m, Sign::Plus), n);
    let far = (1 - eps as usize) * m;
    let vertices = (0..grid.size())
        .filter(|&v| {
            let c = grid.coords(v);
            c[i - 1] == far || c.iter().enumerate().any(|(k, &x)| k != i - 1 && (x == 0 || x == m))
        })
        .collect();
    Realization::from_vertices(grid, vertices)
}

/// Union of the images of all cofaces `∂^{j,δ}` except `skip`.
pub fn face_union(m: usize, n: usize, skip: Option<(usize, u8)>) -> Result<Realization, NerveError> {
    if n == 0 {
        return Err(NerveError::BadIndex("faces need dimension ≥ 1".into()));
    }
    let grid = TensorGrid::power(&Interval::standard(m, Sign::Plus), n);
    let mut vertices = Vec::new();
    for i in 1..=n {
        for e in 0..2 {
            if skip != Some((i, e)) {
                vertices.extend(GridMap::coface(&grid, i, e).table);
            }
        }
    }
    Realization::from_vertices(grid, vertices)
}

/// `|∂□^n|_m`.
pub fn boundary_realization(m: usize, n: usize) -> Result<Realization, NerveError> {
    face_union(m, n, None)
}

/// The filler `Φ : I_{6m}^{⊗n} → |⊓^n_{i,ε}|_{2m}` and its three checks.
#[derive(Clone, Debug)]
pub struct KanFiller {
    pub m: usize,
    pub n: usize,
    pub i: usize,
    pub eps: u8,
    /// `Φ` as a map into the full grid `I_{2m}^{⊗n}`.
    pub map: GridMap,
    pub horn: Realization,
    pub is_digraph_map: bool,
    pub image_in_horn: bool,
    /// `Φ` agrees with `c^{2m}` coordinatewise on `|⊓^n_{i,ε}|_{6m}`.
    pub restricts_to_clamp: bool,
}

impl KanFiller {
    pub fn holds(&self) -> bool {
        self.is_digraph_map && self.image_in_horn && self.restricts_to_clamp
    }

    /// `Φ` as a digraph map onto the horn; fails if the image leaves the horn.
    pub fn as_digraph_map(&self) -> Result<DigraphMap, NerveError> {
        let position: HashMap<usize, usize> = self.horn.vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let assignment = self
            .map
            .table
            .iter()
            .map(|w| position.get(w).copied().ok_or(NerveError::Mismatch("image leaves the horn".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DigraphMap::new(Arc::new(self.map.source.digraph()), Arc::new(self.horn.digraph.clone()), assignment)?)
    }
}

pub fn kan_filler_phi(m: usize, n: usize, i: usize, eps: u8) -> Result<KanFiller, NerveError> {
    check_face_index(n, i)?;
    if eps > 1 {
        return Err(NerveError::BadIndex(format!("ε = {eps}")));
    }
    let source = TensorGrid::power(&Interval::standard(6 * m, Sign::Plus), n);
    let target = TensorGrid::power(&Interval::standard(2 * m, Sign::Plus), n);
    let clamp = |x: usize| x.saturating_sub(2 * m).min(2 * m);
    let dist = |x: usize| x.abs_diff(x.clamp(2 * m, 4 * m));
    let map = GridMap::from_fn(source.clone(), target, |v| {
        let d = v
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i - 1)
            .map(|(_, &x)| dist(x))
            .max()
            .unwrap_or(0);
        let mut out: Vec<usize> = v.iter().map(|&x| clamp(x)).collect();
        out[i - 1] = if eps == 0 { out[i - 1].max(2 * m - d) } else { out[i - 1].min(d) };
        out
    });
    let horn = horn_realization(2 * m, n, i, eps)?;
    let big_horn = horn_realization(6 * m, n, i, eps)?;
    let is_digraph_map = map.is_digraph_map();
    let image_in_horn = map.table.iter().all(|&w| horn.contains(w));
    let restricts_to_clamp = big_horn.vertices.iter().all(|&v| {
        let image = map.target.coords(map.table[v]);
        image.iter().zip(source.coords(v)).all(|(&a, x)| a == clamp(x))
    });
    Ok(KanFiller { m, n, i, eps, map, horn, is_digraph_map, image_in_horn, restricts_to_clamp })
}

/// Result of filling every horn of a digraph through `Φ`.
#[derive(Clone, Debug, Serialize)]
pub struct KanFillingReport {
    pub n: usize,
    pub m: usize,
    pub horns: usize,
    pub horn_maps: usize,
    pub failures: Vec<String>,
}

impl KanFillingReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every horn map `h : |⊓^n_{i,ε}|_{2m} → G`, checks that `h ∘ Φ` is a
/// digraph map on `I_{6m}^{⊗n}` that restricts to `h ∘ c^{2m}` on the horn.
pub fn check_kan_filling(g: &Digraph, n: usize, m: usize, budget: usize) -> Result<KanFillingReport, NerveError> {
    let mut report = KanFillingReport { n, m, horns: 0, horn_maps: 0, failures: Vec::new() };
    let c = central_power(2 * m, 2 * m, Sign::Plus);
    for i in 1..=n {
        for eps in 0..2u8 {
            let phi = kan_filler_phi(m, n, i, eps)?;
            report.horns += 1;
            let big_horn = horn_realization(6 * m, n, i, eps)?;
            let clamp = GridMap::tensor(&vec![c.clone(); n]);
            let position: HashMap<usize, usize> =
                phi.horn.vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
            let big = phi.map.source.digraph();
            let remaining = budget.saturating_sub(report.horn_maps);
            MapSearch::new(&phi.horn.digraph, g).for_each(remaining, |h| {
                report.horn_maps += 1;
                let at = |w: usize| position.get(&w).map(|&k| h[k]);
                let filled: Option<Vec<usize>> = phi.map.table.iter().map(|&w| at(w)).collect();
                let ok = match filled {
                    Some(f) => {
                        crate::digraph::is_digraph_map(&big, g, &f)
                            && big_horn.vertices.iter().all(|&v| Some(f[v]) == at(clamp.table[v]))
                    }
                    None => false,
                };
                if !ok && report.failures.len() < 10 {
                    report.failures.push(format!("horn ({i},{eps}) map {h:?}"));
                }
                ControlFlow::Continue(())
            })?;
        }
    }
    Ok(report)
}

fn rho_params(m_plus_2: usize, n: usize, j: usize) -> Result<usize, NerveError> {
    let m = m_plus_2
        .checked_sub(2)
        .filter(|&m| m >= 2)
        .ok_or_else(|| NerveError::BadIndex(format!("side length {m_plus_2} must be at least 4")))?;
    if m % 2 == 1 {
        return Err(NerveError::Parity(m));
    }
    if n == 0 || j >= n {
        return Err(NerveError::BadIndex(format!("need 0 ≤ j = {j} < n = {n}")));
    }
    Ok(m)
}

fn std_grid(sides: &[usize]) -> TensorGrid {
    TensorGrid::new(sides.iter().map(|&s| Interval::standard(s, Sign::Plus)).collect())
}

/// Target grid `I_{m+2}^{⊗j+1} ⊗ I_m^{⊗n−j−1}`.
fn rho_target(m: usize, n: usize, j: usize) -> TensorGrid {
    let sides: Vec<usize> = (0..n).map(|k| if k <= j { m + 2 } else { m }).collect();
    std_grid(&sides)
}

fn rho_tuple(m: usize, n: usize, j: usize, v: &[usize]) -> Vec<usize> {
    let r = |k: usize, x: usize| x.min(m + 2 - k);
    (0..n)
        .map(|k| match k.cmp(&j) {
            std::cmp::Ordering::Less => v[k],
            std::cmp::Ordering::Equal => r(v[n], v[k]),
            std::cmp::Ordering::Greater => r(2, v[k]),
        })
        .collect()
}

/// `ρ^n_{m+2,j} : I_{m+2}^{⊗n} ⊗ I_2 → I_{m+2}^{⊗j+1} ⊗ I_m^{⊗n−j−1}`.
pub fn rho(m_plus_2: usize, n: usize, j: usize) -> Result<GridMap, NerveError> {
    let m = rho_params(m_plus_2, n, j)?;
    let mut sides = vec![m + 2; n];
    sides.push(2);
    Ok(GridMap::from_fn(std_grid(&sides), rho_target(m, n, j), |v| rho_tuple(m, n, j, v)))
}

/// `ρ̄^n_{m+2,j} = ρ^n_{m+2,j} ∘ (id^{⊗n} ⊗ r^m)` on `I_{m+2}^{⊗n+1}`.
pub fn rho_bar(m_plus_2: usize, n: usize, j: usize) -> Result<GridMap, NerveError> {
    let m = rho_params(m_plus_2, n, j)?;
    Ok(GridMap::from_fn(std_grid(&vec![m + 2; n + 1]), rho_target(m, n, j), |v| {
        let mut w = v.to_vec();
        w[n] = w[n].min(2);
        rho_tuple(m, n, j, &w)
    }))
}

/// One face identity of `ρ̄`.
#[derive(Clone, Debug, Serialize)]
pub struct RhoCheck {
    pub j: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<u8>,
    pub case: &'static str,
    pub status: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoReport {
    pub n: usize,
    pub m: usize,
    pub maps_are_digraph_maps: bool,
    pub checks: Vec<RhoCheck>,
    pub passed: bool,
}

/// Checks the five face identities of `ρ̄^n_{m+2,j}` for every `j`, `i`, `ε`.
pub fn check_rho_properties(n: usize, m: usize) -> Result<RhoReport, NerveError> {
    let mut checks = Vec::new();
    let mut maps_ok = true;
    let r2 = |x: usize| x.min(m);
    for j in 0..n {
        let rb = rho_bar(m + 2, n, j)?;
        maps_ok &= rb.is_digraph_map() && rho(m + 2, n, j)?.is_digraph_map();
        let full = std_grid(&vec![m + 2; n + 1]);
        if j == 0 {
            checks.push(RhoCheck { j, i: None, eps: None, case: "i", status: "skipped" });
        }
        if j + 1 == n {
            checks.push(RhoCheck { j, i: None, eps: None, case: "ii", status: "skipped" });
        }
        for i in 1..=n + 1 {
            for eps in 0..2u8 {
                let lhs = GridMap::coface(&full, i, eps).then(&rb);
                let (case, holds) = if i == n + 1 {
                    let keep = if eps == 1 { j } else { j + 1 };
                    let ok = (0..lhs.source.size()).all(|x| {
                        let v = lhs.source.coords(x);
                        let expect: Vec<usize> =
                            v.iter().enumerate().map(|(k, &a)| if k < keep { a } else { r2(a) }).collect();
                        lhs.target.coords(lhs.table[x]) == expect
                    });
                    (if eps == 1 { "iv" } else { "v" }, ok)
                } else if i < j + 1 {
                    let rhs = rho_bar(m + 2, n - 1, j - 1)?.then(&GridMap::coface(&rb.target, i, eps));
                    ("i", lhs.agrees_pointwise(&rhs))
                } else if i > j + 1 {
                    let rhs = rho_bar(m + 2, n - 1, j)?.then(&GridMap::coface(&rb.target, i, eps));
                    ("ii", lhs.agrees_pointwise(&rhs))
                } else {
                    let sides: Vec<usize> = (0..n).map(|k| if k < j { m + 2 } else { m }).collect();
                    let q = GridMap::from_fn(lhs.source.clone(), std_grid(&sides), |v| {
                        v.iter().enumerate().map(|(k, &a)| if k < j { a } else { r2(a) }).collect()
                    });
                    let factors = factor_through(&lhs.table, &q).is_some_and(|y| {
                        y.iter().all(|&w| w != usize::MAX)
                            && GridMap { source: q.target.clone(), target: lhs.target.clone(), table: y }
                                .is_digraph_map()
                    });
                    ("iii", factors)
                };
                checks.push(RhoCheck { j, i: Some(i), eps: Some(eps), case, status: if holds { "pass" } else { "fail" } });
            }
        }
    }
    let passed = maps_ok && checks.iter().all(|c| c.status != "fail");
    Ok(RhoReport { n, m, maps_are_digraph_maps: maps_ok, checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::box_product;

    fn i(n: usize) -> Interval {
        Interval::standard(n, Sign::Plus)
    }

    #[test]
    fn point_nerve_has_one_cube_per_level() {
        let x = nerve_levels(Arc::new(Digraph::point()), &i(1), 3, 1000).unwrap();
        assert!(x.cubes.iter().all(|l| l.len() == 1));
        assert_eq!(x.counts()[0].nondegenerate, 1);
        assert!(x.counts()[1..].iter().all(|c| c.nondegenerate == 0));
    }

    #[test]
    fn c3_levels() {
        let x = nerve_levels(Arc::new(Digraph::cycle(3)), &i(1), 2, 1000).unwrap();
        assert_eq!(x.level_len(1), 6);
        assert_eq!(x.counts()[1].nondegenerate, 3);
        // brute force over all 81 corner assignments: the only nondegenerate
        // squares are v, v+1, v+1, v+2 (both paths of length two agree)
        let c3 = Digraph::cycle(3);
        let mut oracle = 0;
        for code in 0..81usize {
            let a: Vec<usize> = (0..4).map(|k| code / 3usize.pow(3 - k) % 3).collect();
            let map = [(0, 1), (0, 2), (1, 3), (2, 3)].iter().all(|&(u, v)| c3.is_arrow(a[u], a[v]));
            let sigma = (a[0] == a[1] && a[2] == a[3]) || (a[0] == a[2] && a[1] == a[3]);
            let gamma = (a[1] == a[2] && a[2] == a[3]) || (a[0] == a[1] && a[1] == a[2]);
            if map && !sigma && !gamma {
                oracle += 1;
            }
        }
        assert_eq!(oracle, 3);
        assert_eq!(x.counts()[2].nondegenerate, 3);
        assert!(x.identity_violations(5).is_empty());
    }

    #[test]
    fn identities_hold_on_square_nerves() {
        let sq = Arc::new(box_product(&i(1).to_digraph(), &i(1).to_digraph()));
        for (m, sign, k) in [(1, Sign::Plus, 3), (2, Sign::Minus, 2)] {
            let x = standard_nerve(sq.clone(), m, sign, k, 200_000).unwrap();
            assert_eq!(x.identity_violations(5), vec![]);
        }
    }

    #[test]
    fn degenerate_test_finds_witnesses() {
        let g = Arc::new(i(1).to_digraph());
        let edge = CubeMap::new(&i(1), 1, g.clone(), vec![0, 1]).unwrap();
        assert!(degenerate_cube_test(&edge).is_none());
        let w = degenerate_cube_test(&edge.degeneracy(2)).unwrap();
        assert_eq!(w.kind, Degeneracy::Sigma(2));
        let w = degenerate_cube_test(&edge.connection(1, 0)).unwrap();
        assert_eq!(w.kind, Degeneracy::Gamma(1, 0));
        assert_eq!(w.lower, vec![0, 1]);
        assert!(CubeMap::new(&i(1), 1, g, vec![1, 0]).is_err());
    }

    #[test]
    fn horn_matches_face_union() {
        for m in [2, 4] {
            for n in 1..=3 {
                for k in 1..=n {
                    for e in 0..2 {
                        let h = horn_realization(m, n, k, e).unwrap();
                        let u = face_union(m, n, Some((k, e))).unwrap();
                        assert_eq!(h.vertices, u.vertices, "m={m} n={n} i={k} ε={e}");
                        assert!(h.vertices.len() < boundary_realization(m, n).unwrap().vertices.len());
                    }
                }
            }
        }
        assert_eq!(horn_realization(4, 1, 1, 0).unwrap().digraph.labels(), ["(4)"]);
        assert!(horn_realization(2, 2, 3, 0).is_err());
    }

    #[test]
    fn filler_checks_pass() {
        for (m, n) in [(1, 2), (1, 3), (2, 2)] {
            for k in 1..=n {
                for e in 0..2 {
                    let f = kan_filler_phi(m, n, k, e).unwrap();
                    assert!(f.holds(), "m={m} n={n} i={k} ε={e}");
                    f.as_digraph_map().unwrap();
                }
            }
        }
        // one-dimensional horns are a single vertex, so Φ is constant there
        let f = kan_filler_phi(1, 1, 1, 0).unwrap();
        assert!(f.holds());
        assert!(f.map.table.iter().all(|&w| w == 2));
    }

    #[test]
    fn rho_picture() {
        let r = rho(4, 1, 0).unwrap();
        let rows: Vec<Vec<usize>> =
            (0..3).map(|t| (0..5).map(|v| r.apply(&[v, t])[0]).collect()).collect();
        assert_eq!(rows, vec![vec![0, 1, 2, 3, 4], vec![0, 1, 2, 3, 3], vec![0, 1, 2, 2, 2]]);
        assert!(r.is_digraph_map());
        assert_eq!(rho(5, 1, 0), Err(NerveError::Parity(3)));
        assert!(rho(4, 1, 1).is_err());
    }

    #[test]
    fn rho_identities() {
        for n in 1..=3 {
            for m in [2, 4] {
                if n == 3 && m == 4 {
                    continue;
                }
                let r = check_rho_properties(n, m).unwrap();
                assert!(r.passed, "{r:?}");
            }
        }
    }

    #[test]
    fn comparison_maps_are_injective_and_natural() {
        let g = Arc::new(Digraph::cycle(3));
        let (lo, hi, map) = comparison_map(Truncation::R, g.clone(), 1, Sign::Plus, 2, 100_000).unwrap();
        assert!(map.is_injective());
        assert!(map.is_natural(&lo, &hi));
        assert_eq!(lo.level_len(0), hi.level_len(0));
        let (lo, hi, map) = comparison_map(Truncation::L, g, 1, Sign::Plus, 2, 100_000).unwrap();
        assert!(map.is_injective() && map.is_natural(&lo, &hi));
    }
}
