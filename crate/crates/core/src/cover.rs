//! In/out closures, closed covers and their nerves.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::{pushout_along_induced_inclusion, Digraph, DigraphError, DigraphMap};
use crate::homology::{
    cubical_homology, homology, induced_homology_map, path_components, ChainComplex, Homology,
    HomologyError, HomologyGroup, SparseColumns,
};
use crate::interval::{Interval, Sign};
use crate::nerve::{nerve_functor_map, nerve_levels, NerveError, TruncatedCubicalSet};
use crate::Budgets;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("members do not cover the vertices {0:?}")]
    NotACover(Vec<String>),
    #[error("members are neither all in-closed nor all out-closed (in-closed: {in_closed:?}, out-closed: {out_closed:?})")]
    MixedClosedness { in_closed: Vec<String>, out_closed: Vec<String> },
    #[error("part {0:?} is not in-closed")]
    NotInClosed(Vec<String>),
    #[error("parts miss the vertices {0:?}")]
    NotAUnion(Vec<String>),
    #[error("member names differ: {0:?} vs {1:?}")]
    IndexMismatch(Vec<String>, Vec<String>),
    #[error("the map does not send member `{0}` into its counterpart")]
    MemberNotPreserved(String),
    #[error("unknown member `{0}`")]
    UnknownMember(String),
}

impl CoverError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            CoverError::Digraph(DigraphError::BudgetExceeded(_))
                | CoverError::Nerve(NerveError::Digraph(DigraphError::BudgetExceeded(_)))
                | CoverError::Homology(HomologyError::BudgetExceeded(_))
        )
    }
}

fn closure(g: &Digraph, part: &[usize], step: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
    let mut seen = vec![false; g.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &v in part {
        if !seen[v] {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in step(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    (0..g.len()).filter(|&v| seen[v]).collect()
}

/// Least in-closed part containing `part`.
pub fn in_closure(g: &Digraph, part: &[usize]) -> Vec<usize> {
    closure(g, part, |v| g.in_neighbors(v).to_vec())
}

/// Least out-closed part containing `part`.
pub fn out_closure(g: &Digraph, part: &[usize]) -> Vec<usize> {
    closure(g, part, |v| g.out_neighbors(v).to_vec())
}

fn normalized(part: &[usize]) -> Vec<usize> {
    let mut p = part.to_vec();
    p.sort_unstable();
    p.dedup();
    p
}

/// Every arrow with target in `part` has its source in `part`.
pub fn is_in_closed(g: &Digraph, part: &[usize]) -> bool {
    in_closure(g, part) == normalized(part)
}

/// Every arrow with source in `part` has its target in `part`.
pub fn is_out_closed(g: &Digraph, part: &[usize]) -> bool {
    out_closure(g, part) == normalized(part)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Closedness {
    InClosed,
    OutClosed,
}

/// On-disk cover: member name to vertex labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFile {
    pub members: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberStatus {
    pub name: String,
    pub vertices: usize,
    pub in_closed: bool,
    pub out_closed: bool,
}

/// Named vertex subsets of one ambient digraph.
#[derive(Clone, Debug)]
pub struct SubdigraphFamily {
    ambient: Arc<Digraph>,
    members: BTreeMap<String, Vec<usize>>,
}

impl SubdigraphFamily {
    pub fn new(ambient: Arc<Digraph>, members: BTreeMap<String, Vec<usize>>) -> Result<Self, CoverError> {
        let mut clean = BTreeMap::new();
        for (name, part) in members {
            if let Some(&bad) = part.iter().find(|&&v| v >= ambient.len()) {
                return Err(DigraphError::IndexOutOfRange(bad).into());
            }
            clean.insert(name, normalized(&part));
        }
        Ok(SubdigraphFamily { ambient, members: clean })
    }

    pub fn from_labels(ambient: Arc<Digraph>, members: &BTreeMap<String, Vec<String>>) -> Result<Self, CoverError> {
        let parts = members
            .iter()
            .map(|(name, labels)| Ok((name.clone(), ambient.vertex_set(labels)?)))
            .collect::<Result<BTreeMap<_, _>, DigraphError>>()?;
        Self::new(ambient, parts)
    }

    pub fn from_file(ambient: Arc<Digraph>, file: &CoverFile) -> Result<Self, CoverError> {
        Self::from_labels(ambient, &file.members)
    }

    pub fn to_file(&self) -> CoverFile {
        CoverFile {
            members: self.members.iter().map(|(n, p)| (n.clone(), self.ambient.labels_of(p))).collect(),
        }
    }

    pub fn ambient(&self) -> &Arc<Digraph> {
        &self.ambient
    }

    pub fn names(&self) -> Vec<String> {
        self.members.keys().cloned().collect()
    }

    pub fn member(&self, name: &str) -> Result<&[usize], CoverError> {
        self.members.get(name).map(Vec::as_slice).ok_or_else(|| CoverError::UnknownMember(name.into()))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn statuses(&self) -> Vec<MemberStatus> {
        self.members
            .iter()
            .map(|(name, p)| MemberStatus {
                name: name.clone(),
                vertices: p.len(),
                in_closed: is_in_closed(&self.ambient, p),
                out_closed: is_out_closed(&self.ambient, p),
            })
            .collect()
    }

    /// In-closed if every member is; otherwise out-closed if every member is.
    pub fn closedness(&self) -> Result<Closedness, CoverError> {
        let st = self.statuses();
        if st.iter().all(|s| s.in_closed) {
            Ok(Closedness::InClosed)
        } else if st.iter().all(|s| s.out_closed) {
            Ok(Closedness::OutClosed)
        } else {
            let pick = |f: fn(&MemberStatus) -> bool| st.iter().filter(|s| f(s)).map(|s| s.name.clone()).collect();
            Err(CoverError::MixedClosedness { in_closed: pick(|s| s.in_closed), out_closed: pick(|s| s.out_closed) })
        }
    }

    /// Vertices outside every member.
    pub fn uncovered(&self) -> Vec<usize> {
        let mut hit = vec![false; self.ambient.len()];
        for p in self.members.values() {
            for &v in p {
                hit[v] = true;
            }
        }
        (0..hit.len()).filter(|&v| !hit[v]).collect()
    }

    fn require_cover(&self) -> Result<(), CoverError> {
        let missing = self.uncovered();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(CoverError::NotACover(self.ambient.labels_of(&missing)))
        }
    }

    /// `⋂_{i∈σ} H_i` for member positions `sigma` (in name order).
    pub fn intersection(&self, sigma: &[usize]) -> Vec<usize> {
        let parts: Vec<&Vec<usize>> = self.members.values().collect();
        let mut acc: Option<Vec<usize>> = None;
        for &i in sigma {
            let p = parts[i];
            acc = Some(match acc {
                None => p.clone(),
                Some(a) => a.into_iter().filter(|v| p.binary_search(v).is_ok()).collect(),
            });
        }
        acc.unwrap_or_else(|| (0..self.ambient.len()).collect())
    }

    /// Members intersected with `part`, re-indexed into the induced subdigraph.
    pub fn restrict(&self, part: &[usize]) -> Result<SubdigraphFamily, CoverError> {
        let part = normalized(part);
        let sub = Arc::new(self.ambient.induced(&part)?);
        let local: HashMap<usize, usize> = part.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let members = self
            .members
            .iter()
            .map(|(n, p)| (n.clone(), p.iter().filter_map(|v| local.get(v).copied()).collect()))
            .collect();
        SubdigraphFamily::new(sub, members)
    }
}

/// `Ner`: nonempty sets of members with nonempty common intersection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NerveComplex {
    pub vertices: Vec<String>,
    /// Faces as sorted member positions, grouped by dimension.
    pub faces: Vec<Vec<Vec<usize>>>,
}

/// Faces of the nerve of `f`, found by extending faces one member at a time.
pub fn nerve_complex(f: &SubdigraphFamily) -> NerveComplex {
    let parts: Vec<&Vec<usize>> = f.members.values().collect();
    let mut faces: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut frontier: Vec<(Vec<usize>, Vec<usize>)> =
        (0..parts.len()).filter(|&i| !parts[i].is_empty()).map(|i| (vec![i], parts[i].clone())).collect();
    while !frontier.is_empty() {
        faces.push(frontier.iter().map(|(s, _)| s.clone()).collect());
        let mut next = Vec::new();
        for (sigma, common) in &frontier {
            let last = *sigma.last().expect("faces are nonempty");
            for j in last + 1..parts.len() {
                let meet: Vec<usize> = common.iter().copied().filter(|v| parts[j].binary_search(v).is_ok()).collect();
                if !meet.is_empty() {
                    let mut s = sigma.clone();
                    s.push(j);
                    next.push((s, meet));
                }
            }
        }
        frontier = next;
    }
    NerveComplex { vertices: f.names(), faces }
}

impl NerveComplex {
    pub fn face_count(&self) -> usize {
        self.faces.iter().map(Vec::len).sum()
    }

    pub fn dim(&self) -> Option<usize> {
        self.faces.len().checked_sub(1)
    }

    pub fn names_of(&self, sigma: &[usize]) -> Vec<String> {
        sigma.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// Every codimension-one face of every face is present.
    pub fn is_downward_closed(&self) -> bool {
        let all: HashSet<&Vec<usize>> = self.faces.iter().flatten().collect();
        self.faces.iter().flatten().filter(|s| s.len() > 1).all(|s| {
            (0..s.len()).all(|k| {
                let mut t = s.clone();
                t.remove(k);
                all.contains(&t)
            })
        })
    }

    /// Arrows of the 1-skeleton as name pairs.
    pub fn edges(&self) -> Vec<(String, String)> {
        self.faces
            .get(1)
            .map(|l| l.iter().map(|s| (self.vertices[s[0]].clone(), self.vertices[s[1]].clone())).collect())
            .unwrap_or_default()
    }

    /// Oriented simplicial chains, untruncated.
    pub fn chain_complex(&self) -> ChainComplex {
        let index: Vec<HashMap<&Vec<usize>, usize>> =
            self.faces.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s, i)).collect()).collect();
        let mut boundaries: Vec<SparseColumns> = vec![Vec::new()];
        for n in 1..self.faces.len() {
            boundaries.push(
                self.faces[n]
                    .iter()
                    .map(|s| {
                        (0..s.len())
                            .map(|k| {
                                let mut t = s.clone();
                                t.remove(k);
                                (index[n - 1][&t], if k % 2 == 0 { 1 } else { -1 })
                            })
                            .collect()
                    })
                    .collect(),
            );
        }
        let mut dims: Vec<usize> = self.faces.iter().map(Vec::len).collect();
        if dims.is_empty() {
            dims.push(0);
        }
        ChainComplex { dims, boundaries, truncated_top: false }
    }

    pub fn homology(&self, max_matrix_dim: usize) -> Result<Homology, HomologyError> {
        homology(&self.chain_complex(), max_matrix_dim)
    }
}

fn n1() -> Interval {
    Interval::standard(1, Sign::Plus)
}

fn nerve_of(g: &Digraph, k: usize, budgets: &Budgets) -> Result<TruncatedCubicalSet, CoverError> {
    Ok(nerve_levels(Arc::new(g.clone()), &n1(), k, budgets.max_cubes)?)
}

/// Cubes of `N₁` of the induced subdigraph on `part`, written in ambient indices.
fn sub_cubes(g: &Digraph, part: &[usize], k: usize, budgets: &Budgets) -> Result<Vec<HashSet<Vec<usize>>>, CoverError> {
    let part = normalized(part);
    let x = nerve_of(&g.induced(&part)?, k, budgets)?;
    Ok(x.cubes.iter().map(|level| level.iter().map(|c| c.iter().map(|&v| part[v]).collect()).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCover {
    pub dim: usize,
    pub cubes: usize,
    pub covered: usize,
}

/// Closure probe with `A = I₁^{⊗k}`: each cube lies in the closure of the image
/// of the anchor vertex, and that closure lies in a member holding the anchor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureProbe {
    pub dim: usize,
    /// `I₁^{⊗k}` is the closure of its anchor vertex.
    pub anchor_generates: bool,
    pub cubes: usize,
    pub inside_anchor_closure: usize,
    pub closure_in_member: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverUnionReport {
    pub closedness: Closedness,
    pub levels: Vec<LevelCover>,
    pub probes: Vec<ClosureProbe>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub passed: bool,
}

fn cube_string(g: &Digraph, c: &[usize]) -> String {
    format!("[{}]", g.labels_of(c).join(" "))
}

/// Checks `N₁G = ⋃ N₁H_i` through dimension `k`.
pub fn check_cover_union(f: &SubdigraphFamily, k: usize, budgets: &Budgets) -> Result<CoverUnionReport, CoverError> {
    f.require_cover()?;
    let closedness = f.closedness()?;
    let g = f.ambient();
    let x = nerve_of(g, k, budgets)?;
    let parts: Vec<&Vec<usize>> = f.members.values().collect();
    let masks: Vec<Vec<bool>> = parts
        .iter()
        .map(|p| {
            let mut m = vec![false; g.len()];
            p.iter().for_each(|&v| m[v] = true);
            m
        })
        .collect();
    let mut levels = Vec::new();
    let mut probes = Vec::new();
    let mut witness = None;
    for n in 0..=k {
        let grid = &x.grids[n];
        let gd = grid.digraph();
        // (1,…,1) generates under in-closure, (0,…,0) under out-closure.
        let anchor = match closedness {
            Closedness::InClosed => grid.index(&vec![1; n]),
            Closedness::OutClosed => grid.index(&vec![0; n]),
        };
        let closure_of = |h: &Digraph, v: usize| match closedness {
            Closedness::InClosed => in_closure(h, &[v]),
            Closedness::OutClosed => out_closure(h, &[v]),
        };
        let anchor_generates = closure_of(&gd, anchor).len() == gd.len();
        let mut covered = 0;
        let mut inside = 0;
        let mut in_member = 0;
        for c in &x.cubes[n] {
            if masks.iter().any(|m| c.iter().all(|&v| m[v])) {
                covered += 1;
            } else if witness.is_none() {
                witness = Some(format!("{n}-cube {} lies in no member", cube_string(g, c)));
            }
            let cl = closure_of(g, c[anchor]);
            if c.iter().all(|v| cl.binary_search(v).is_ok()) {
                inside += 1;
            }
            if parts.iter().any(|p| p.binary_search(&c[anchor]).is_ok() && cl.iter().all(|v| p.binary_search(v).is_ok())) {
                in_member += 1;
            }
        }
        let total = x.cubes[n].len();
        levels.push(LevelCover { dim: n, cubes: total, covered });
        probes.push(ClosureProbe {
            dim: n,
            anchor_generates,
            cubes: total,
            inside_anchor_closure: inside,
            closure_in_member: in_member,
        });
    }
    let passed = levels.iter().all(|l| l.covered == l.cubes)
        && probes.iter().all(|p| p.anchor_generates && p.inside_anchor_closure == p.cubes && p.closure_in_member == p.cubes);
    Ok(CoverUnionReport { closedness, levels, probes, witness, passed })
}

/// Contractibility evidence for one intersection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceEvidence {
    pub members: Vec<String>,
    pub vertices: usize,
    pub components: usize,
    pub homology: Homology,
    /// One component and trivial reduced homology below the truncation.
    pub contractible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NerveVerdict {
    /// All faces look contractible and the homologies agree.
    Consistent,
    /// All faces look contractible yet the homologies differ.
    Inconsistent,
    /// Some face fails the contractibility evidence.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NerveTheoremReport {
    pub closedness: Closedness,
    pub truncation: usize,
    pub nerve_vertices: Vec<String>,
    pub nerve_edges: Vec<(String, String)>,
    pub nerve_faces_by_dim: Vec<usize>,
    pub faces: Vec<FaceEvidence>,
    pub nerve_homology: Vec<HomologyGroup>,
    pub digraph_homology: Vec<HomologyGroup>,
    pub agree: bool,
    pub verdict: NerveVerdict,
}

fn trivial() -> HomologyGroup {
    HomologyGroup { rank: 0, torsion: Vec::new() }
}

fn first_degrees(h: &Homology, k: usize) -> Vec<HomologyGroup> {
    (0..k).map(|n| h.groups.get(n).cloned().unwrap_or_else(trivial)).collect()
}

/// Compares `H_*(N₁G)` with `H_*(Ner)` below degree `k`, after collecting
/// contractibility evidence for every intersection.
pub fn nerve_theorem_pipeline(f: &SubdigraphFamily, k: usize, budgets: &Budgets) -> Result<NerveTheoremReport, CoverError> {
    f.require_cover()?;
    let closedness = f.closedness()?;
    let ner = nerve_complex(f);
    let mut faces = Vec::new();
    for sigma in ner.faces.iter().flatten() {
        let part = f.intersection(sigma);
        let x = nerve_of(&f.ambient().induced(&part)?, k, budgets)?;
        let h = cubical_homology(&x, budgets.max_matrix_dim)?;
        let components = path_components(&x);
        faces.push(FaceEvidence {
            members: ner.names_of(sigma),
            vertices: part.len(),
            components,
            contractible: components == 1 && h.is_acyclic(),
            homology: h,
        });
    }
    let nerve_h = first_degrees(&ner.homology(budgets.max_matrix_dim)?, k);
    let x = nerve_of(f.ambient(), k, budgets)?;
    let digraph_h = first_degrees(&cubical_homology(&x, budgets.max_matrix_dim)?, k);
    let agree = nerve_h == digraph_h;
    let verdict = match (faces.iter().all(|e| e.contractible), agree) {
        (false, _) => NerveVerdict::Inconclusive,
        (true, true) => NerveVerdict::Consistent,
        (true, false) => NerveVerdict::Inconsistent,
    };
    Ok(NerveTheoremReport {
        closedness,
        truncation: k,
        nerve_vertices: ner.vertices.clone(),
        nerve_edges: ner.edges(),
        nerve_faces_by_dim: ner.faces.iter().map(Vec::len).collect(),
        faces,
        nerve_homology: nerve_h,
        digraph_homology: digraph_h,
        agree,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmalgamationLevel {
    pub dim: usize,
    pub whole: usize,
    pub first: usize,
    pub second: usize,
    pub intersection: usize,
    /// `N₁G_n = N₁H_n ∪ N₁H′_n`.
    pub union_matches: bool,
    /// `N₁H_n ∩ N₁H′_n = N₁(H ∩ H′)_n`.
    pub overlap_matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnionPushoutReport {
    pub closedness: Closedness,
    /// Every arrow of `G` lies in `H` or in `H′`.
    pub arrows_covered: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub levels: Vec<AmalgamationLevel>,
    pub passed: bool,
}

/// Checks that `G = H ∪ H′` is a pushout over `H ∩ H′`, for digraphs and for
/// `N₁` through dimension `k`. Both parts must be in-closed, or both out-closed.
pub fn check_union_pushout(
    g: &Digraph,
    h: &[usize],
    h_prime: &[usize],
    k: usize,
    budgets: &Budgets,
) -> Result<UnionPushoutReport, CoverError> {
    let (h, h_prime) = (normalized(h), normalized(h_prime));
    let closedness = if is_in_closed(g, &h) && is_in_closed(g, &h_prime) {
        Closedness::InClosed
    } else if is_out_closed(g, &h) && is_out_closed(g, &h_prime) {
        Closedness::OutClosed
    } else {
        let bad = if is_in_closed(g, &h) { &h_prime } else { &h };
        return Err(CoverError::NotInClosed(g.labels_of(bad)));
    };
    let mut hit = vec![false; g.len()];
    h.iter().chain(&h_prime).for_each(|&v| hit[v] = true);
    let missing: Vec<usize> = (0..g.len()).filter(|&v| !hit[v]).collect();
    if !missing.is_empty() {
        return Err(CoverError::NotAUnion(g.labels_of(&missing)));
    }
    let inside = |p: &[usize], u: usize, v: usize| p.binary_search(&u).is_ok() && p.binary_search(&v).is_ok();
    let stray = g.arrows().find(|&(u, v)| !inside(&h, u, v) && !inside(&h_prime, u, v));
    let witness = stray.map(|(u, v)| format!("arrow {} -> {} lies in neither part", g.label(u), g.label(v)));
    let meet: Vec<usize> = h.iter().copied().filter(|v| h_prime.binary_search(v).is_ok()).collect();
    let whole = sub_cubes(g, &(0..g.len()).collect::<Vec<_>>(), k, budgets)?;
    let first = sub_cubes(g, &h, k, budgets)?;
    let second = sub_cubes(g, &h_prime, k, budgets)?;
    let both = sub_cubes(g, &meet, k, budgets)?;
    let levels: Vec<AmalgamationLevel> = (0..=k)
        .map(|n| {
            let union: HashSet<&Vec<usize>> = first[n].iter().chain(&second[n]).collect();
            let overlap: HashSet<&Vec<usize>> = first[n].intersection(&second[n]).collect();
            AmalgamationLevel {
                dim: n,
                whole: whole[n].len(),
                first: first[n].len(),
                second: second[n].len(),
                intersection: both[n].len(),
                union_matches: union == whole[n].iter().collect(),
                overlap_matches: overlap == both[n].iter().collect(),
            }
        })
        .collect();
    let passed = witness.is_none() && levels.iter().all(|l| l.union_matches && l.overlap_matches);
    Ok(UnionPushoutReport { closedness, arrows_covered: stray.is_none(), witness, levels, passed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeIso {
    pub degree: usize,
    pub source: HomologyGroup,
    pub target: HomologyGroup,
    pub is_iso: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceComparison {
    pub members: Vec<String>,
    pub source_vertices: usize,
    pub target_vertices: usize,
    pub degrees: Vec<DegreeIso>,
    pub iso: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverEquivalenceReport {
    pub truncation: usize,
    pub faces: Vec<FaceComparison>,
    pub global: Vec<DegreeIso>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    pub passed: bool,
}

fn restricted(phi: &DigraphMap, src: &[usize], tgt: &[usize]) -> Result<(Digraph, Digraph, DigraphMap), CoverError> {
    let (s, t) = (Arc::new(phi.source().induced(src)?), Arc::new(phi.target().induced(tgt)?));
    let local: HashMap<usize, usize> = tgt.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let assignment = src.iter().map(|&v| local[&phi.apply(v)]).collect();
    let map = DigraphMap::new(s.clone(), t.clone(), assignment)?;
    Ok(((*s).clone(), (*t).clone(), map))
}

fn compare_degrees(phi: &DigraphMap, k: usize, budgets: &Budgets) -> Result<Vec<DegreeIso>, CoverError> {
    let x = nerve_of(phi.source(), k, budgets)?;
    let y = nerve_of(phi.target(), k, budgets)?;
    let f = nerve_functor_map(phi, &x, &y)?;
    (0..k)
        .map(|n| {
            let m = induced_homology_map(&f, &x, &y, n)?;
            Ok(DegreeIso { degree: n, source: m.source, target: m.target, is_iso: m.is_iso })
        })
        .collect()
}

/// Compares intersections of two matching covers through `φ` on `H_{<k}`, and
/// reports the global map `H_{<k}(N₁G) → H_{<k}(N₁G′)`.
pub fn check_cover_equivalence(
    phi: &DigraphMap,
    f: &SubdigraphFamily,
    f_prime: &SubdigraphFamily,
    k: usize,
    budgets: &Budgets,
) -> Result<CoverEquivalenceReport, CoverError> {
    if f.names() != f_prime.names() {
        return Err(CoverError::IndexMismatch(f.names(), f_prime.names()));
    }
    if **f.ambient() != **phi.source() || **f_prime.ambient() != **phi.target() {
        return Err(CoverError::Digraph(DigraphError::NotComposable));
    }
    f.require_cover()?;
    f_prime.require_cover()?;
    f.closedness()?;
    f_prime.closedness()?;
    for (name, part) in &f.members {
        let target = &f_prime.members[name];
        if part.iter().any(|&v| target.binary_search(&phi.apply(v)).is_err()) {
            return Err(CoverError::MemberNotPreserved(name.clone()));
        }
    }
    let (a, b) = (nerve_complex(f), nerve_complex(f_prime));
    let sigmas: BTreeSet<&Vec<usize>> = a.faces.iter().flatten().chain(b.faces.iter().flatten()).collect();
    let mut faces = Vec::new();
    for sigma in sigmas {
        let (src, tgt) = (f.intersection(sigma), f_prime.intersection(sigma));
        let (_, _, map) = restricted(phi, &src, &tgt)?;
        let degrees = compare_degrees(&map, k, budgets)?;
        faces.push(FaceComparison {
            members: a.names_of(sigma),
            source_vertices: src.len(),
            target_vertices: tgt.len(),
            iso: degrees.iter().all(|d| d.is_iso),
            degrees,
        });
    }
    let global = compare_degrees(phi, k, budgets)?;
    let witness = faces.iter().find(|c| !c.iso).map(|c| c.members.clone());
    let passed = witness.is_none() && global.iter().all(|d| d.is_iso);
    Ok(CoverEquivalenceReport { truncation: k, faces, global, witness, passed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareLevel {
    pub dim: usize,
    pub glued: usize,
    pub target: usize,
    /// `(N₁G ∖ N₁O) ⊔ N₁O′ → N₁G′` is a bijection.
    pub bijective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PushoutClosureReport {
    pub out_closure: Vec<String>,
    /// The comparison `O′ → G′` is an induced inclusion.
    pub embeds: bool,
    pub image: Vec<String>,
    pub out_closure_in_pushout: Vec<String>,
    pub equal: bool,
    pub nerve_square: Vec<SquareLevel>,
    pub passed: bool,
}

/// For in-closed `H ⊆ G` and `φ : H → H′`, checks `O ⊔_H H′ = Out_{G′}(H′)`
/// with `O = Out_G(H)`, and that `N₁` turns the square of inclusions into a
/// pushout through dimension `k`.
pub fn pushout_closure_identity(
    g: &Digraph,
    part: &[usize],
    phi: &DigraphMap,
    k: usize,
    budgets: &Budgets,
) -> Result<PushoutClosureReport, CoverError> {
    let part = normalized(part);
    if !is_in_closed(g, &part) {
        return Err(CoverError::NotInClosed(g.labels_of(&part)));
    }
    let o = out_closure(g, &part);
    let o_digraph = g.induced(&o)?;
    let local: HashMap<usize, usize> = o.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let part_in_o: Vec<usize> = part.iter().map(|v| local[v]).collect();
    let big = pushout_along_induced_inclusion(g, &part, phi)?;
    let small = pushout_along_induced_inclusion(&o_digraph, &part_in_o, phi)?;
    let gp = big.digraph.clone();
    // O′ → G′ from the universal property: O ∖ H through G, H′ through H′.
    let mut compare = vec![usize::MAX; small.digraph.len()];
    for (i, &v) in o.iter().enumerate() {
        compare[small.from_ambient.apply(i)] = big.from_ambient.apply(v);
    }
    for w in 0..phi.target().len() {
        compare[small.from_part.apply(w)] = big.from_part.apply(w);
    }
    let image = normalized(&compare);
    let injective = image.len() == compare.len();
    let induced_ok = injective && gp.induced(&image)?.arrow_count() == small.digraph.arrow_count();
    let maps_arrows = small.digraph.arrows().all(|(u, v)| gp.is_arrow(compare[u], compare[v]));
    let embeds = injective && induced_ok && maps_arrows;
    let h_prime_image: Vec<usize> = (0..phi.target().len()).map(|w| big.from_part.apply(w)).collect();
    let closure = out_closure(&gp, &h_prime_image);
    let equal = closure == image;

    let x_g = nerve_of(g, k, budgets)?;
    let x_gp = nerve_of(&gp, k, budgets)?;
    let x_op = nerve_of(&small.digraph, k, budgets)?;
    let mut in_o = vec![false; g.len()];
    o.iter().for_each(|&v| in_o[v] = true);
    let nerve_square = (0..=k)
        .map(|n| {
            let mut hits = vec![0usize; x_gp.level_len(n)];
            let mut glued = 0;
            let mut land = |c: Vec<usize>| match x_gp.lookup(n, &c) {
                Some(i) => hits[i] += 1,
                None => hits.push(usize::MAX),
            };
            for c in &x_g.cubes[n] {
                if !c.iter().all(|&v| in_o[v]) {
                    glued += 1;
                    land(c.iter().map(|&v| big.from_ambient.apply(v)).collect());
                }
            }
            for c in &x_op.cubes[n] {
                glued += 1;
                land(c.iter().map(|&v| compare[v]).collect());
            }
            SquareLevel { dim: n, glued, target: x_gp.level_len(n), bijective: hits.iter().all(|&h| h == 1) }
        })
        .collect::<Vec<_>>();
    let passed = embeds && equal && nerve_square.iter().all(|l| l.bijective);
    Ok(PushoutClosureReport {
        out_closure: g.labels_of(&o),
        embeds,
        image: gp.labels_of(&image),
        out_closure_in_pushout: gp.labels_of(&closure),
        equal,
        nerve_square,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{cube, standard_interval, BoundaryExample};

    fn budgets() -> Budgets {
        Budgets::default()
    }

    fn family(g: Digraph, members: &[(&str, &[usize])]) -> SubdigraphFamily {
        let m = members.iter().map(|(n, p)| (n.to_string(), p.to_vec())).collect();
        SubdigraphFamily::new(Arc::new(g), m).unwrap()
    }

    fn o_cover() -> SubdigraphFamily {
        let o = BoundaryExample::new().o_digraph();
        let cover = BoundaryExample::strip_cover(&o);
        SubdigraphFamily::from_labels(Arc::new(o), &cover).unwrap()
    }

    #[test]
    fn closures_on_small_intervals() {
        let i2 = standard_interval(2);
        assert_eq!(in_closure(&i2, &[1]), vec![0, 1, 2]);
        assert_eq!(out_closure(&standard_interval(1), &[0]), vec![0, 1]);
        assert!(!is_in_closed(&standard_interval(1), &[1]));
        assert!(is_in_closed(&i2, &[0, 1, 2]));
    }

    #[test]
    fn o_cover_nerve_is_a_four_cycle() {
        let f = o_cover();
        assert_eq!(f.closedness().unwrap(), Closedness::OutClosed);
        let ner = nerve_complex(&f);
        assert_eq!(ner.faces.iter().map(Vec::len).collect::<Vec<_>>(), [4, 4]);
        assert!(ner.is_downward_closed());
        let h = ner.homology(1000).unwrap();
        assert_eq!(h.groups.iter().map(|g| g.rank).collect::<Vec<_>>(), [1, 1]);
    }

    #[test]
    fn small_nerve_complexes() {
        let single = family(standard_interval(1), &[("a", &[0, 1])]);
        assert_eq!(nerve_complex(&single).faces, vec![vec![vec![0]]]);
        let apart = family(Digraph::discrete(2), &[("a", &[0]), ("b", &[1])]);
        assert_eq!(nerve_complex(&apart).faces, vec![vec![vec![0], vec![1]]]);
    }

    #[test]
    fn cover_union_on_o_and_trivial_cover() {
        let r = check_cover_union(&o_cover(), 2, &budgets()).unwrap();
        assert!(r.passed, "{r:?}");
        let whole = family(cube(1, 2), &[("all", &[0, 1, 2, 3])]);
        assert!(check_cover_union(&whole, 2, &budgets()).unwrap().passed);
    }

    #[test]
    fn dropping_a_member_breaks_the_cover() {
        let f = o_cover();
        let mut m = f.members.clone();
        m.remove("rows01");
        let broken = SubdigraphFamily::new(f.ambient().clone(), m).unwrap();
        match check_cover_union(&broken, 2, &budgets()) {
            Err(CoverError::NotACover(v)) => assert!(v.contains(&"(0,2)".to_string())),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_closed_members_are_rejected() {
        let f = family(standard_interval(1), &[("a", &[0]), ("b", &[1])]);
        assert!(matches!(check_cover_union(&f, 1, &budgets()), Err(CoverError::MixedClosedness { .. })));
    }

    #[test]
    fn nerve_theorem_on_o_and_its_boundary() {
        let r = nerve_theorem_pipeline(&o_cover(), 2, &budgets()).unwrap();
        assert_eq!(r.verdict, NerveVerdict::Consistent, "{r:?}");
        assert_eq!(r.digraph_homology.iter().map(|g| g.rank).collect::<Vec<_>>(), [1, 1]);
        let ex = BoundaryExample::new();
        let sq = Arc::new(ex.square.clone());
        let full = SubdigraphFamily::from_labels(sq, &BoundaryExample::strip_cover(&ex.square)).unwrap();
        let restricted = full.restrict(&ex.boundary).unwrap();
        let r = nerve_theorem_pipeline(&restricted, 2, &budgets()).unwrap();
        assert_eq!(r.verdict, NerveVerdict::Consistent);
        assert_eq!(r.nerve_homology.iter().map(|g| g.rank).collect::<Vec<_>>(), [1, 1]);
    }

    #[test]
    fn nerve_theorem_single_member() {
        let f = family(standard_interval(1), &[("a", &[0, 1])]);
        let r = nerve_theorem_pipeline(&f, 2, &budgets()).unwrap();
        assert_eq!(r.verdict, NerveVerdict::Consistent);
        assert_eq!(r.digraph_homology[0].rank, 1);
    }

    #[test]
    fn union_pushout_examples() {
        // b → a, b → c with a, b, c = 0, 1, 2.
        let g = Digraph::unlabelled(3, [(1, 0), (1, 2)]).unwrap();
        assert!(check_union_pushout(&g, &[0, 1], &[1, 2], 2, &budgets()).unwrap().passed);
        assert!(check_union_pushout(&g, &[0, 1, 2], &[0, 1, 2], 2, &budgets()).unwrap().passed);
        let f = o_cover();
        let left: Vec<usize> = [f.member("rows01").unwrap(), f.member("cols01").unwrap()].concat();
        let right: Vec<usize> = [f.member("rows34").unwrap(), f.member("cols34").unwrap()].concat();
        let r = check_union_pushout(f.ambient(), &left, &right, 2, &budgets()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(matches!(
            check_union_pushout(&g, &[0], &[1, 2], 1, &budgets()),
            Err(CoverError::NotInClosed(_))
        ));
        assert!(matches!(
            check_union_pushout(&g, &[1, 0], &[1], 1, &budgets()),
            Err(CoverError::NotAUnion(_))
        ));
    }

    #[test]
    fn boundary_inclusion_is_an_equivalence_through_covers() {
        let ex = BoundaryExample::new();
        let o = Arc::new(ex.o_digraph());
        let b = Arc::new(ex.boundary_digraph());
        let assignment = (0..b.len()).map(|v| o.vertex(b.label(v)).unwrap()).collect();
        let phi = DigraphMap::new(b.clone(), o.clone(), assignment).unwrap();
        let fo = SubdigraphFamily::from_labels(o.clone(), &BoundaryExample::strip_cover(&o)).unwrap();
        let fb = SubdigraphFamily::from_labels(b.clone(), &BoundaryExample::strip_cover(&b)).unwrap();
        let r = check_cover_equivalence(&phi, &fb, &fo, 2, &budgets()).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.global.len(), 2);
    }

    #[test]
    fn collapse_breaks_an_empty_intersection() {
        let two = Arc::new(Digraph::discrete(2));
        let pt = Arc::new(Digraph::point());
        let phi = DigraphMap::constant(two.clone(), pt.clone(), 0);
        let f = family((*two).clone(), &[("a", &[0]), ("b", &[1])]);
        let f2 = family((*pt).clone(), &[("a", &[0]), ("b", &[0])]);
        let r = check_cover_equivalence(&phi, &f, &f2, 2, &budgets()).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witness, Some(vec!["a".to_string(), "b".to_string()]));
        let id = DigraphMap::identity(two.clone());
        assert!(check_cover_equivalence(&id, &f, &f, 2, &budgets()).unwrap().passed);
        let f3 = family((*pt).clone(), &[("x", &[0])]);
        assert!(matches!(check_cover_equivalence(&phi, &f, &f3, 1, &budgets()), Err(CoverError::IndexMismatch(..))));
    }

    #[test]
    fn pushout_closure_identity_cases() {
        let ex = BoundaryExample::new();
        let g = ex.square.clone();
        let h = Arc::new(g.induced(&ex.boundary).unwrap());
        let id = DigraphMap::identity(h.clone());
        let r = pushout_closure_identity(&g, &ex.boundary, &id, 1, &budgets()).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.out_closure.len(), 24);
        let collapse = DigraphMap::constant(h, Arc::new(Digraph::point()), 0);
        let r = pushout_closure_identity(&g, &ex.boundary, &collapse, 2, &budgets()).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.image.len(), 9);
        let i1 = standard_interval(1);
        let single = Arc::new(i1.induced(&[1]).unwrap());
        let err = pushout_closure_identity(&i1, &[1], &DigraphMap::identity(single), 1, &budgets());
        assert!(matches!(err, Err(CoverError::NotInClosed(_))));
    }
}
