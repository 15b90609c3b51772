//! Zigzag intervals, shrinkings between them, and the towers built from them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::{pushout_along_induced_inclusion, Digraph, DigraphError, DigraphMap, DigraphPair};
use crate::grid::TensorGrid;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntervalError {
    #[error("bad index: {0}")]
    BadIndex(String),
    #[error("cannot parse interval `{0}`: expected a word over '>' and '<'")]
    Parse(String),
    #[error("unknown tower kind `{0}`")]
    UnknownTower(String),
    #[error(transparent)]
    Digraph(#[from] DigraphError),
}

/// Direction of the arrow between `k` and `k+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    /// `k → k+1`
    Fwd,
    /// `k+1 → k`
    Bwd,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Fwd => Orientation::Bwd,
            Orientation::Bwd => Orientation::Fwd,
        }
    }
}

/// `+1` for `I_n`, `−1` for `I_n^op`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn neg(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Applies the sign `times` times as a negation count.
    pub fn neg_pow(self, times: usize) -> Self {
        if times.is_multiple_of(2) {
            self
        } else {
            self.neg()
        }
    }
}

impl FromStr for Sign {
    type Err = IntervalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "+1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(IntervalError::Parse(other.to_string())),
        }
    }
}

/// The line digraph on `{0..k}` described by an orientation word of length `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    word: Vec<Orientation>,
}

impl Interval {
    pub fn new(word: Vec<Orientation>) -> Self {
        Interval { word }
    }

    pub fn point() -> Self {
        Interval { word: Vec::new() }
    }

    /// `I_n` (arrows `2i → 2i+1`, `2j+2 → 2j+1`) or its opposite.
    pub fn standard(n: usize, sign: Sign) -> Self {
        let word = (0..n)
            .map(|k| {
                let o = if k % 2 == 0 { Orientation::Fwd } else { Orientation::Bwd };
                match sign {
                    Sign::Plus => o,
                    Sign::Minus => o.flip(),
                }
            })
            .collect();
        Interval { word }
    }

    /// Number of arrows.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.word.len() + 1
    }

    pub fn word(&self) -> &[Orientation] {
        &self.word
    }

    /// Orientation of the step between `k` and `k+1`.
    pub fn step(&self, k: usize) -> Orientation {
        self.word[k]
    }

    /// Arrow-or-equality between vertices `a` and `b`.
    pub fn is_arrow(&self, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        if a + 1 == b {
            return self.word[a] == Orientation::Fwd;
        }
        if b + 1 == a {
            return self.word[b] == Orientation::Bwd;
        }
        false
    }

    pub fn opposite(&self) -> Self {
        Interval { word: self.word.iter().map(|o| o.flip()).collect() }
    }

    /// `J ∨ J′`: the last vertex of `J` is glued to the first of `J′`.
    pub fn wedge(&self, other: &Interval) -> Self {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Interval { word }
    }

    /// Endpoints `{0, k}` (a single vertex for the point).
    pub fn boundary(&self) -> Vec<usize> {
        if self.word.is_empty() {
            vec![0]
        } else {
            vec![0, self.word.len()]
        }
    }

    /// The interval as a digraph on labels `"0".."k"`.
    pub fn to_digraph(&self) -> Digraph {
        let arrows = self.word.iter().enumerate().map(|(k, o)| match o {
            Orientation::Fwd => (k, k + 1),
            Orientation::Bwd => (k + 1, k),
        });
        Digraph::unlabelled(self.vertex_count(), arrows).expect("interval arrows are proper")
    }

    /// `(J, ∂J)` as a pair.
    pub fn to_pair(&self) -> DigraphPair {
        DigraphPair::new(self.to_digraph(), self.boundary()).expect("endpoints are vertices")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("·");
        }
        for o in &self.word {
            f.write_str(match o {
                Orientation::Fwd => ">",
                Orientation::Bwd => "<",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Interval {
    type Err = IntervalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let word = s
            .chars()
            .filter(|c| *c != '·')
            .map(|c| match c {
                '>' => Ok(Orientation::Fwd),
                '<' => Ok(Orientation::Bwd),
                _ => Err(IntervalError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Interval { word })
    }
}

/// A vertex map between intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalMap {
    pub source: Interval,
    pub target: Interval,
    pub assignment: Vec<usize>,
}

impl IntervalMap {
    pub fn identity(j: &Interval) -> Self {
        IntervalMap {
            source: j.clone(),
            target: j.clone(),
            assignment: (0..j.vertex_count()).collect(),
        }
    }

    pub fn apply(&self, k: usize) -> usize {
        self.assignment[k]
    }

    pub fn is_digraph_map(&self) -> bool {
        self.assignment.len() == self.source.vertex_count()
            && self.assignment.iter().all(|&a| a < self.target.vertex_count())
            && (0..self.source.len()).all(|k| {
                let (a, b) = (self.assignment[k], self.assignment[k + 1]);
                match self.source.step(k) {
                    Orientation::Fwd => self.target.is_arrow(a, b),
                    Orientation::Bwd => self.target.is_arrow(b, a),
                }
            })
    }

    pub fn is_monotone(&self) -> bool {
        self.assignment.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.vertex_count()];
        for &a in &self.assignment {
            if a < hit.len() {
                hit[a] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    /// Surjective, monotone digraph map.
    pub fn is_shrinking(&self) -> bool {
        self.is_digraph_map() && self.is_monotone() && self.is_surjective()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &IntervalMap) -> Result<IntervalMap, IntervalError> {
        if self.target != other.source {
            return Err(IntervalError::BadIndex(format!(
                "cannot compose {} → {} with {} → {}",
                self.source, self.target, other.source, other.target
            )));
        }
        Ok(IntervalMap {
            source: self.source.clone(),
            target: other.target.clone(),
            assignment: self.assignment.iter().map(|&k| other.assignment[k]).collect(),
        })
    }

    pub fn to_digraph_map(&self) -> Result<DigraphMap, DigraphError> {
        DigraphMap::new(
            Arc::new(self.source.to_digraph()),
            Arc::new(self.target.to_digraph()),
            self.assignment.clone(),
        )
    }
}

/// The truncation shrinkings between standard intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truncation {
    /// `I_{n+1}^{−ε} → I_n^ε`, collapsing the first arrow.
    L,
    /// `I_{n+1}^ε → I_n^ε`, collapsing the last arrow.
    R,
    /// `l ∘ r : I_{n+2}^{−ε} → I_n^ε`.
    C,
    /// `c ∘ c : I_{n+4}^ε → I_n^ε`.
    C2,
}

impl FromStr for Truncation {
    type Err = IntervalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "l" => Ok(Truncation::L),
            "r" => Ok(Truncation::R),
            "c" => Ok(Truncation::C),
            "c2" | "c²" => Ok(Truncation::C2),
            other => Err(IntervalError::Parse(other.to_string())),
        }
    }
}

/// The truncation of the given kind with target `I_n^sign`, `n ≥ 1`.
pub fn truncation(kind: Truncation, n: usize, sign: Sign) -> Result<IntervalMap, IntervalError> {
    if n == 0 {
        return Err(IntervalError::BadIndex("truncations target I_n with n ≥ 1".into()));
    }
    let map = match kind {
        Truncation::R => IntervalMap {
            source: Interval::standard(n + 1, sign),
            target: Interval::standard(n, sign),
            assignment: (0..=n + 1).map(|k| k.min(n)).collect(),
        },
        Truncation::L => IntervalMap {
            source: Interval::standard(n + 1, sign.neg()),
            target: Interval::standard(n, sign),
            assignment: (0..=n + 1).map(|k| k.saturating_sub(1)).collect(),
        },
        Truncation::C => truncation(Truncation::R, n + 1, sign.neg())?
            .then(&truncation(Truncation::L, n, sign)?)?,
        Truncation::C2 => truncation(Truncation::C, n + 2, sign.neg())?
            .then(&truncation(Truncation::C, n, sign)?)?,
    };
    debug_assert!(map.is_shrinking());
    Ok(map)
}

/// `c^k : I_{n+2k}^{(−1)^k ε} → I_n^ε`, i.e. `x ↦ clamp(x − k, 0, n)`.
pub fn central_power(k: usize, n: usize, sign: Sign) -> IntervalMap {
    IntervalMap {
        source: Interval::standard(n + 2 * k, sign.neg_pow(k)),
        target: Interval::standard(n, sign),
        assignment: (0..=n + 2 * k).map(|x| x.saturating_sub(k).min(n)).collect(),
    }
}

/// `r^k : I_{n+k}^ε → I_n^ε`, i.e. `x ↦ min(x, n)`.
pub fn right_power(k: usize, n: usize, sign: Sign) -> IntervalMap {
    IntervalMap {
        source: Interval::standard(n + k, sign),
        target: Interval::standard(n, sign),
        assignment: (0..=n + k).map(|x| x.min(n)).collect(),
    }
}

/// All shrinkings `j → j_prime`, in lexicographic order of assignments.
///
/// A shrinking is a monotone surjection whose steps are `0` or `+1`; the
/// search walks these lattice paths and keeps the steps that respect
/// orientations.
pub fn enumerate_shrinkings(j: &Interval, j_prime: &Interval) -> Vec<IntervalMap> {
    let (n, m) = (j.len(), j_prime.len());
    let mut out = Vec::new();
    if m > n {
        return out;
    }
    let mut assignment = vec![0usize; n + 1];
    fn walk(
        k: usize,
        j: &Interval,
        jp: &Interval,
        a: &mut Vec<usize>,
        out: &mut Vec<IntervalMap>,
    ) {
        let (n, m) = (j.len(), jp.len());
        if k == n {
            if a[n] == m {
                out.push(IntervalMap { source: j.clone(), target: jp.clone(), assignment: a.clone() });
            }
            return;
        }
        let cur = a[k];
        // stay
        if m - cur < n - k {
            a[k + 1] = cur;
            walk(k + 1, j, jp, a, out);
        }
        // advance, only along a step of the same orientation
        if cur < m && jp.step(cur) == j.step(k) {
            a[k + 1] = cur + 1;
            walk(k + 1, j, jp, a, out);
        }
    }
    walk(0, j, j_prime, &mut assignment, &mut out);
    out
}

/// `I_n^Cant` on `2^n` vertices; the step from `x` to `x+1` changes bit `k` (counted
/// from the most significant) and points forward iff `k` is even.
pub fn cantor_interval(n: usize) -> Result<Interval, IntervalError> {
    if n == 0 || n >= usize::BITS as usize - 1 {
        return Err(IntervalError::BadIndex(format!("Cantor interval needs 1 ≤ n, got {n}")));
    }
    let word = (0..(1usize << n) - 1)
        .map(|x: usize| {
            let k = n - 1 - x.trailing_ones() as usize;
            if k.is_multiple_of(2) { Orientation::Fwd } else { Orientation::Bwd }
        })
        .collect();
    Ok(Interval { word })
}

/// `pr : I_m^Cant → I_n^Cant`, keeping the first `n` bits.
pub fn cantor_projection(m: usize, n: usize) -> Result<IntervalMap, IntervalError> {
    if n == 0 || n > m {
        return Err(IntervalError::BadIndex(format!("projection needs 1 ≤ n ≤ m, got m={m}, n={n}")));
    }
    Ok(IntervalMap {
        source: cantor_interval(m)?,
        target: cantor_interval(n)?,
        assignment: (0..1usize << m).map(|x| x >> (m - n)).collect(),
    })
}

/// The towers of intervals used to form colimits over shrinkings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TowerKind {
    /// `I₁ ←r I₂ ←l I₃^op ←r I₄^op ←l I₅ ←r …`
    Standard,
    /// `I_s ←r I_{s+1}`
    Right,
    /// `I₁ ←l I₂^op ←l I₃ ←l …`
    Left,
    /// `I_{q^{s−1}}` with `x ↦ ⌊x/q⌋`, `q` odd.
    OddDivision(usize),
    /// Cantor intervals with prefix projections.
    Cantor,
}

impl FromStr for TowerKind {
    type Err = IntervalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "st" => Ok(TowerKind::Standard),
            "r" => Ok(TowerKind::Right),
            "l" => Ok(TowerKind::Left),
            "odd" => Ok(TowerKind::OddDivision(3)),
            "cantor" => Ok(TowerKind::Cantor),
            other => match other.strip_prefix("odd") {
                Some(q) => q
                    .parse()
                    .ok()
                    .filter(|q: &usize| q % 2 == 1 && *q >= 3)
                    .map(TowerKind::OddDivision)
                    .ok_or_else(|| IntervalError::UnknownTower(other.to_string())),
                None => Err(IntervalError::UnknownTower(other.to_string())),
            },
        }
    }
}

impl fmt::Display for TowerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerKind::Standard => f.write_str("st"),
            TowerKind::Right => f.write_str("r"),
            TowerKind::Left => f.write_str("l"),
            TowerKind::OddDivision(3) => f.write_str("odd"),
            TowerKind::OddDivision(q) => write!(f, "odd{q}"),
            TowerKind::Cantor => f.write_str("cantor"),
        }
    }
}

impl TowerKind {
    /// The interval at stage `s ≥ 1`.
    pub fn stage(&self, s: usize) -> Result<Interval, IntervalError> {
        if s == 0 {
            return Err(IntervalError::BadIndex("tower stages start at 1".into()));
        }
        Ok(match *self {
            TowerKind::Standard => {
                let sign = if ((s - 1) / 2).is_multiple_of(2) { Sign::Plus } else { Sign::Minus };
                Interval::standard(s, sign)
            }
            TowerKind::Right => Interval::standard(s, Sign::Plus),
            TowerKind::Left => Interval::standard(s, if s % 2 == 1 { Sign::Plus } else { Sign::Minus }),
            TowerKind::OddDivision(q) => {
                let len = u32::try_from(s - 1)
                    .ok()
                    .and_then(|e| q.checked_pow(e))
                    .ok_or_else(|| IntervalError::BadIndex(format!("stage {s} too large")))?;
                Interval::standard(len, Sign::Plus)
            }
            TowerKind::Cantor => cantor_interval(s)?,
        })
    }

    /// The shrinking from stage `s + 1` to stage `s`.
    pub fn transition(&self, s: usize) -> Result<IntervalMap, IntervalError> {
        if s == 0 {
            return Err(IntervalError::BadIndex("tower stages start at 1".into()));
        }
        let map = match *self {
            TowerKind::Standard => {
                let sign = if ((s - 1) / 2).is_multiple_of(2) { Sign::Plus } else { Sign::Minus };
                if s % 2 == 1 {
                    truncation(Truncation::R, s, sign)?
                } else {
                    truncation(Truncation::L, s, sign)?
                }
            }
            TowerKind::Right => truncation(Truncation::R, s, Sign::Plus)?,
            TowerKind::Left => {
                truncation(Truncation::L, s, if s % 2 == 1 { Sign::Plus } else { Sign::Minus })?
            }
            TowerKind::OddDivision(q) => {
                let source = self.stage(s + 1)?;
                IntervalMap {
                    assignment: (0..source.vertex_count()).map(|x| x / q).collect(),
                    source,
                    target: self.stage(s)?,
                }
            }
            TowerKind::Cantor => cantor_projection(s + 1, s)?,
        };
        Ok(map)
    }

    /// Stages `1..=max_stage` whose transition does not run between the
    /// advertised stage intervals or is not a shrinking.
    pub fn signature_mismatches(&self, max_stage: usize) -> Result<Vec<usize>, IntervalError> {
        let mut bad = Vec::new();
        for s in 1..max_stage {
            let t = self.transition(s)?;
            if t.source != self.stage(s + 1)? || t.target != self.stage(s)? || !t.is_shrinking() {
                bad.push(s);
            }
        }
        Ok(bad)
    }
}

/// A digraph with a base vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedDigraph {
    pub digraph: Digraph,
    pub base: usize,
}

/// `S^n_J`: `J^{⊗n}` with `∂J^{⊗n}` collapsed to the base vertex `*`.
/// `S^0_J` is the two-vertex discrete digraph `{*, 1}`.
pub fn sphere_digraph(j: &Interval, n: usize) -> Result<PointedDigraph, IntervalError> {
    if n == 0 {
        let digraph = Digraph::new(["*", "1"], [])?;
        return Ok(PointedDigraph { digraph, base: 0 });
    }
    let grid = TensorGrid::power(j, n);
    let cube = grid.digraph();
    let boundary = grid.boundary();
    let part = Arc::new(cube.induced(&boundary)?);
    let collapse = DigraphMap::constant(part, Arc::new(Digraph::point()), 0);
    let po = pushout_along_induced_inclusion(&cube, &boundary, &collapse)?;
    let base = po.from_part.apply(0);
    Ok(PointedDigraph { digraph: (*po.digraph).clone(), base })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Interval {
        s.parse().unwrap()
    }

    #[test]
    fn standard_words() {
        assert_eq!(Interval::standard(4, Sign::Plus).to_string(), "><><");
        assert_eq!(Interval::standard(3, Sign::Minus).to_string(), "<><");
        assert!(Interval::standard(0, Sign::Minus).is_empty());
        let i4 = Interval::standard(4, Sign::Plus).to_digraph();
        assert_eq!(i4.arrows().collect::<Vec<_>>(), vec![(0, 1), (2, 1), (2, 3), (4, 3)]);
    }

    #[test]
    fn wedge_concatenates() {
        let (a, b) = (parse("><"), parse("<<>"));
        let w = a.wedge(&b);
        assert_eq!(w.len(), 5);
        assert_eq!(&w.word()[..2], a.word());
        assert_eq!(&w.word()[2..], b.word());
    }

    #[test]
    fn truncation_values() {
        let r = truncation(Truncation::R, 1, Sign::Plus).unwrap();
        assert_eq!(r.assignment, vec![0, 1, 1]);
        let l = truncation(Truncation::L, 3, Sign::Plus).unwrap();
        assert_eq!(l.source, Interval::standard(4, Sign::Minus));
        assert_eq!(l.assignment, vec![0, 0, 1, 2, 3]);
        let c2 = truncation(Truncation::C2, 4, Sign::Plus).unwrap();
        let lrlr = truncation(Truncation::R, 7, Sign::Plus)
            .unwrap()
            .then(&truncation(Truncation::L, 6, Sign::Minus).unwrap())
            .unwrap()
            .then(&truncation(Truncation::R, 5, Sign::Minus).unwrap())
            .unwrap()
            .then(&truncation(Truncation::L, 4, Sign::Plus).unwrap())
            .unwrap();
        assert_eq!(c2, lrlr);
        assert_eq!(c2, central_power(2, 4, Sign::Plus));
        assert!(truncation(Truncation::L, 0, Sign::Plus).is_err());
    }

    #[test]
    fn r_is_the_only_shrinking_from_i2_to_i1() {
        let (i2, i1) = (Interval::standard(2, Sign::Plus), Interval::standard(1, Sign::Plus));
        let all = enumerate_shrinkings(&i2, &i1);
        assert_eq!(all, vec![truncation(Truncation::R, 1, Sign::Plus).unwrap()]);
        assert_eq!(enumerate_shrinkings(&i1, &i1), vec![IntervalMap::identity(&i1)]);
        assert!(enumerate_shrinkings(&i1, &i2).is_empty());
    }

    #[test]
    fn cantor_examples() {
        assert_eq!(cantor_interval(1).unwrap().to_string(), ">");
        assert_eq!(cantor_interval(2).unwrap().to_string(), "<><");
        // 000→001←010→011→100→101←110→111
        assert_eq!(cantor_interval(3).unwrap().to_string(), "><>>><>");
        let p32 = cantor_projection(3, 2).unwrap();
        assert!(p32.is_shrinking());
        let p21 = cantor_projection(2, 1).unwrap();
        assert_eq!(p32.then(&p21).unwrap(), cantor_projection(3, 1).unwrap());
        assert!(cantor_projection(2, 3).is_err());
    }

    #[test]
    fn towers_have_consistent_signatures() {
        for kind in [TowerKind::Standard, TowerKind::Right, TowerKind::Left, TowerKind::OddDivision(3), TowerKind::Cantor] {
            assert!(kind.signature_mismatches(4).unwrap().is_empty(), "{kind}");
        }
        let st: Vec<String> = (1..=6).map(|s| TowerKind::Standard.stage(s).unwrap().to_string()).collect();
        assert_eq!(st, [">", "><", "<><", "<><>", "><><>", "><><><"]);
        assert_eq!(TowerKind::Standard.transition(1).unwrap(), truncation(Truncation::R, 1, Sign::Plus).unwrap());
        assert_eq!(TowerKind::Standard.transition(2).unwrap(), truncation(Truncation::L, 2, Sign::Plus).unwrap());
    }

    #[test]
    fn spheres() {
        let i1 = Interval::standard(1, Sign::Plus);
        let i2 = Interval::standard(2, Sign::Plus);
        let s1 = sphere_digraph(&i1, 1).unwrap();
        assert_eq!(s1.digraph.len(), 1);
        assert_eq!(s1.digraph.arrow_count(), 0);
        let s1 = sphere_digraph(&i2, 1).unwrap();
        assert_eq!(s1.digraph.labels(), ["(1)", "*"]);
        assert_eq!(s1.digraph.arrows().collect::<Vec<_>>(), vec![(1, 0)]);
        assert_eq!(s1.base, 1);
        assert_eq!(sphere_digraph(&i2, 2).unwrap().digraph.len(), 2);
        assert_eq!(sphere_digraph(&i2, 0).unwrap().digraph.len(), 2);
    }
}
