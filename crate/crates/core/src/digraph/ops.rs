use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::{Digraph, DigraphError, DigraphMap};
use crate::union_find::UnionFind;

/// A digraph with a distinguished vertex subset, read as an induced subdigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigraphPair {
    pub ambient: Digraph,
    pub part: Vec<usize>,
}

impl DigraphPair {
    /// Sorts and deduplicates `part`, checking its range.
    pub fn new(ambient: Digraph, mut part: Vec<usize>) -> Result<Self, DigraphError> {
        part.sort_unstable();
        part.dedup();
        if let Some(&bad) = part.iter().find(|&&v| v >= ambient.len()) {
            return Err(DigraphError::IndexOutOfRange(bad));
        }
        Ok(DigraphPair { ambient, part })
    }

    /// A pointed digraph.
    pub fn pointed(ambient: Digraph, base: usize) -> Result<Self, DigraphError> {
        Self::new(ambient, vec![base])
    }

    /// The pair `(G, ∅)`.
    pub fn absolute(ambient: Digraph) -> Self {
        DigraphPair { ambient, part: Vec::new() }
    }

    pub fn part_digraph(&self) -> Digraph {
        self.ambient.induced(&self.part).expect("part indices are in range")
    }

    pub fn contains(&self, v: usize) -> bool {
        self.part.binary_search(&v).is_ok()
    }
}

/// Label of a vertex of a box product.
pub(crate) fn pair_label(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// Box product: exactly one coordinate moves along an arrow. Vertex `(g, h)`
/// has index `g * |H| + h`.
pub fn box_product(g: &Digraph, h: &Digraph) -> Digraph {
    let nh = h.len();
    let labels = (0..g.len())
        .flat_map(|a| (0..nh).map(move |b| (a, b)))
        .map(|(a, b)| pair_label(g.label(a), h.label(b)))
        .collect();
    let mut arrows = Vec::new();
    for (a, a2) in g.arrows() {
        for b in 0..nh {
            arrows.push((a * nh + b, a2 * nh + b));
        }
    }
    for a in 0..g.len() {
        for (b, b2) in h.arrows() {
            arrows.push((a * nh + b, a * nh + b2));
        }
    }
    Digraph::collapsing(labels, arrows)
}

/// `(G ⊗ G′, (G ⊗ H′) ∪ (H ⊗ G′))`.
pub fn pair_box_product(p: &DigraphPair, q: &DigraphPair) -> DigraphPair {
    let ambient = box_product(&p.ambient, &q.ambient);
    let nq = q.ambient.len();
    let part = (0..p.ambient.len())
        .flat_map(|a| (0..nq).map(move |b| (a, b)))
        .filter(|&(a, b)| p.contains(a) || q.contains(b))
        .map(|(a, b)| a * nq + b)
        .collect();
    DigraphPair { ambient, part }
}

/// Disjoint union; vertices of the second summand follow those of the first.
/// Labels are tagged `0:` and `1:` to keep them apart.
pub fn disjoint_union(g: &Digraph, h: &Digraph) -> Digraph {
    let off = g.len();
    let labels = g
        .labels()
        .iter()
        .map(|l| format!("0:{l}"))
        .chain(h.labels().iter().map(|l| format!("1:{l}")))
        .collect();
    let arrows = g.arrows().chain(h.arrows().map(|(u, v)| (u + off, v + off)));
    Digraph::collapsing(labels, arrows)
}

/// Result of gluing `H′` to `G` along a map defined on an induced part `H`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub digraph: Arc<Digraph>,
    /// `φ′ : G → G′`, the identity off `H` and `φ` on `H`.
    pub from_ambient: DigraphMap,
    /// `i′ : H′ → G′`.
    pub from_part: DigraphMap,
}

/// Pushout of `G ⊇ H → H′` where `H` is the induced subdigraph on `h_part`.
///
/// Vertices are those of `G ∖ H` in ambient order followed by those of `H′`;
/// arrows are the images of arrows of `G` together with the arrows of `H′`,
/// degenerate images dropped. Labels of `H′` clashing with `G ∖ H` get primes.
pub fn pushout_along_induced_inclusion(
    g: &Digraph,
    h_part: &[usize],
    phi: &DigraphMap,
) -> Result<Pushout, DigraphError> {
    let induced = g.induced(h_part)?;
    if **phi.source() != induced {
        return Err(DigraphError::NotInduced(
            "the map's source differs from the induced subdigraph".into(),
        ));
    }
    let mut part_sorted = h_part.to_vec();
    part_sorted.sort_unstable();
    part_sorted.dedup();
    let mut in_part = vec![usize::MAX; g.len()];
    for (i, &v) in part_sorted.iter().enumerate() {
        in_part[v] = i;
    }
    let h_prime = phi.target();
    let mut labels: Vec<String> = Vec::new();
    let mut position = vec![0usize; g.len()];
    for v in 0..g.len() {
        if in_part[v] == usize::MAX {
            position[v] = labels.len();
            labels.push(g.label(v).to_string());
        }
    }
    let offset = labels.len();
    let mut taken: HashSet<String> = labels.iter().cloned().collect();
    for w in 0..h_prime.len() {
        let mut l = h_prime.label(w).to_string();
        while taken.contains(&l) {
            l.push('\'');
        }
        taken.insert(l.clone());
        labels.push(l);
    }
    for v in 0..g.len() {
        if in_part[v] != usize::MAX {
            position[v] = offset + phi.apply(in_part[v]);
        }
    }
    let arrows = g
        .arrows()
        .map(|(u, v)| (position[u], position[v]))
        .chain(h_prime.arrows().map(|(u, v)| (u + offset, v + offset)));
    let digraph = Arc::new(Digraph::collapsing(labels, arrows));
    let from_ambient = DigraphMap::new(Arc::new(g.clone()), digraph.clone(), position)?;
    let from_part = DigraphMap::new(
        h_prime.clone(),
        digraph.clone(),
        (0..h_prime.len()).map(|w| w + offset).collect(),
    )?;
    Ok(Pushout { digraph, from_ambient, from_part })
}

/// Weak components, each sorted, listed by least vertex.
pub fn pi0(g: &Digraph) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(g.len());
    for (u, v) in g.arrows() {
        uf.union(u, v);
    }
    let (labels, count) = uf.labels();
    let mut blocks = vec![Vec::new(); count];
    for (v, &b) in labels.iter().enumerate() {
        blocks[b].push(v);
    }
    blocks
}

/// Directed distance: a length or the unreachable sentinel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    /// Adds a finite length; the sentinel absorbs.
    pub fn plus(self, k: usize) -> Distance {
        match self {
            Distance::Finite(d) => Distance::Finite(d + k),
            Distance::Infinite => Distance::Infinite,
        }
    }

    pub fn at_most(self, k: usize) -> bool {
        matches!(self, Distance::Finite(d) if d <= k)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(d) => s.serialize_u64(*d as u64),
            Distance::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Breadth-first distances from `u` along arrows.
pub fn distances_from(g: &Digraph, u: usize) -> Vec<Distance> {
    let mut dist = vec![Distance::Infinite; g.len()];
    dist[u] = Distance::Finite(0);
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x].finite().expect("queued vertices are reached");
        for &y in g.out_neighbors(x) {
            if dist[y] == Distance::Infinite {
                dist[y] = Distance::Finite(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Length of a shortest directed path from `u` to `v`.
pub fn distance(g: &Digraph, u: &str, v: &str) -> Result<Distance, DigraphError> {
    let (a, b) = (g.vertex(u)?, g.vertex(v)?);
    Ok(distances_from(g, a)[b])
}

/// All-pairs distances, row `u` holding distances from `u`.
pub fn distance_matrix(g: &Digraph) -> Vec<Vec<Distance>> {
    (0..g.len()).map(|u| distances_from(g, u)).collect()
}

/// `D_k(G)`: arrow `u → v` iff `1 ≤ dist(u, v) ≤ k`.
pub fn power_digraph(g: &Digraph, k: usize) -> Digraph {
    let mut arrows = Vec::new();
    for u in 0..g.len() {
        for (v, d) in distances_from(g, u).into_iter().enumerate() {
            if u != v && d.at_most(k) {
                arrows.push((u, v));
            }
        }
    }
    Digraph::collapsing(g.labels().to_vec(), arrows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{Interval, Sign};

    fn interval(n: usize) -> Digraph {
        Interval::standard(n, Sign::Plus).to_digraph()
    }

    #[test]
    fn square_has_four_arrows() {
        let sq = box_product(&interval(1), &interval(1));
        assert_eq!(sq.len(), 4);
        assert_eq!(sq.arrow_count(), 4);
    }

    #[test]
    fn box_product_arrows_match_double_loop_oracle() {
        let (g, h) = (interval(2), interval(2));
        let p = box_product(&g, &h);
        let mut expected = 0;
        for a in 0..3 {
            for b in 0..3 {
                for a2 in 0..3 {
                    for b2 in 0..3 {
                        let moves_g = g.has_proper_arrow(a, a2) && b == b2;
                        let moves_h = h.has_proper_arrow(b, b2) && a == a2;
                        if moves_g || moves_h {
                            expected += 1;
                            assert!(p.has_proper_arrow(a * 3 + b, a2 * 3 + b2));
                        }
                    }
                }
            }
        }
        assert_eq!(p.arrow_count(), expected);
        assert_eq!(expected, 12);
    }

    #[test]
    fn product_with_point_is_isomorphic() {
        let g = Digraph::cycle(3);
        let p = box_product(&g, &Digraph::point());
        assert_eq!(p.arrows().collect::<Vec<_>>(), g.arrows().collect::<Vec<_>>());
    }

    #[test]
    fn pair_product_of_interval_boundaries() {
        let i2 = DigraphPair::new(interval(2), vec![0, 2]).unwrap();
        let p = pair_box_product(&i2, &i2);
        assert_eq!(p.part.len(), 8);
        assert!(!p.contains(4));
        let empty = pair_box_product(&DigraphPair::absolute(interval(1)), &DigraphPair::absolute(interval(1)));
        assert!(empty.part.is_empty());
    }

    #[test]
    fn gluing_two_arrows_gives_path() {
        let i1 = interval(1);
        let g = disjoint_union(&i1, &i1);
        // identify 0:1 with 1:0 by collapsing the two-vertex part to one point
        let part = vec![g.vertex("0:1").unwrap(), g.vertex("1:0").unwrap()];
        let h = Arc::new(g.induced(&part).unwrap());
        let phi = DigraphMap::constant(h, Arc::new(Digraph::point_labelled("m")), 0);
        let po = pushout_along_induced_inclusion(&g, &part, &phi).unwrap();
        assert_eq!(po.digraph.labels(), ["0:0", "1:1", "m"]);
        assert_eq!(po.digraph.arrows().collect::<Vec<_>>(), vec![(0, 2), (2, 1)]);
    }

    #[test]
    fn pushout_along_identity_is_isomorphic() {
        let g = Digraph::cycle(4);
        let part = vec![1, 2];
        let h = Arc::new(g.induced(&part).unwrap());
        let po = pushout_along_induced_inclusion(&g, &part, &DigraphMap::identity(h)).unwrap();
        assert!(po.digraph.same_labelled(&g));
    }

    #[test]
    fn pushout_rejects_wrong_source() {
        let g = Digraph::cycle(4);
        let wrong = Arc::new(Digraph::discrete(2));
        let phi = DigraphMap::identity(wrong);
        assert!(matches!(
            pushout_along_induced_inclusion(&g, &[0, 1], &phi),
            Err(DigraphError::NotInduced(_))
        ));
    }

    #[test]
    fn distances() {
        let c3 = Digraph::cycle(3);
        assert_eq!(distance(&c3, "0", "2").unwrap(), Distance::Finite(2));
        let i2 = interval(2);
        assert_eq!(distance(&i2, "2", "0").unwrap(), Distance::Infinite);
        assert_eq!(distance(&i2, "2", "1").unwrap(), Distance::Finite(1));
        assert!(matches!(distance(&i2, "9", "1"), Err(DigraphError::UnknownVertex(_))));
        assert!(Distance::Finite(1_000_000) < Distance::Infinite);
    }

    #[test]
    fn powers() {
        let c3 = Digraph::cycle(3);
        assert_eq!(power_digraph(&c3, 1), c3);
        assert_eq!(power_digraph(&c3, 2).arrow_count(), 6);
        // I3 = 0→1←2→3: distances ≤ 2 are 0→1, 2→1, 2→3 only
        assert_eq!(power_digraph(&interval(3), 2).arrow_count(), 3);
    }

    #[test]
    fn components() {
        assert_eq!(pi0(&interval(5)).len(), 1);
        assert_eq!(pi0(&disjoint_union(&interval(1), &interval(1))), vec![vec![0, 1], vec![2, 3]]);
    }
}
