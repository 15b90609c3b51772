//! Box products of intervals as explicit coordinate grids.

use crate::digraph::Digraph;
use crate::interval::{Interval, Orientation};

/// `J₁ ⊗ … ⊗ J_n` with mixed-radix vertex numbering, first coordinate most
/// significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorGrid {
    factors: Vec<Interval>,
    strides: Vec<usize>,
    size: usize,
}

impl TensorGrid {
    pub fn new(factors: Vec<Interval>) -> Self {
        let mut strides = vec![0; factors.len()];
        let mut size = 1usize;
        for k in (0..factors.len()).rev() {
            strides[k] = size;
            size *= factors[k].vertex_count();
        }
        TensorGrid { factors, strides, size }
    }

    /// `J^{⊗n}`.
    pub fn power(j: &Interval, n: usize) -> Self {
        Self::new(vec![j.clone(); n])
    }

    pub fn factors(&self) -> &[Interval] {
        &self.factors
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    /// Number of vertices.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim()];
        for k in 0..self.dim() {
            c[k] = idx / self.strides[k];
            idx %= self.strides[k];
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    /// Arrow-or-equality between two coordinate tuples.
    pub fn is_arrow(&self, a: &[usize], b: &[usize]) -> bool {
        let mut moved = None;
        for k in 0..self.dim() {
            if a[k] != b[k] {
                if moved.is_some() {
                    return false;
                }
                moved = Some(k);
            }
        }
        match moved {
            None => true,
            Some(k) => self.factors[k].is_arrow(a[k], b[k]),
        }
    }

    /// All non-degenerate arrows as index pairs.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for idx in 0..self.size {
            let c = self.coords(idx);
            for k in 0..self.dim() {
                if c[k] < self.factors[k].len() {
                    let next = idx + self.strides[k];
                    match self.factors[k].step(c[k]) {
                        Orientation::Fwd => out.push((idx, next)),
                        Orientation::Bwd => out.push((next, idx)),
                    }
                }
            }
        }
        out
    }

    /// The grid as a digraph with labels `(c₁,…,c_n)`.
    pub fn digraph(&self) -> Digraph {
        let labels = (0..self.size)
            .map(|i| {
                let c: Vec<String> = self.coords(i).iter().map(ToString::to_string).collect();
                format!("({})", c.join(","))
            })
            .collect();
        Digraph::from_indexed(labels, self.arrows()).expect("grid labels are unique")
    }

    /// Vertices with some coordinate at an endpoint of its factor.
    pub fn boundary(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&i| {
                let c = self.coords(i);
                c.iter()
                    .zip(&self.factors)
                    .any(|(&x, j)| x == 0 || x == j.len())
            })
            .collect()
    }

    /// The grid with coordinate `i` (0-based) removed.
    pub fn without(&self, i: usize) -> TensorGrid {
        let mut f = self.factors.clone();
        f.remove(i);
        TensorGrid::new(f)
    }
}

/// A vertex map between grids stored as a lookup table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMap {
    pub source: TensorGrid,
    pub target: TensorGrid,
    pub table: Vec<usize>,
}

impl GridMap {
    /// Tabulates `f` on coordinate tuples.
    pub fn from_fn(source: TensorGrid, target: TensorGrid, f: impl Fn(&[usize]) -> Vec<usize>) -> Self {
        let table = (0..source.size())
            .map(|i| {
                let image = f(&source.coords(i));
                debug_assert_eq!(image.len(), target.dim());
                target.index(&image)
            })
            .collect();
        GridMap { source, target, table }
    }

    pub fn apply(&self, coords: &[usize]) -> Vec<usize> {
        self.target.coords(self.table[self.source.index(coords)])
    }

    /// First source arrow whose image is neither an arrow nor an equality.
    pub fn first_violation(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        self.source.arrows().into_iter().find_map(|(a, b)| {
            let (fa, fb) = (self.target.coords(self.table[a]), self.target.coords(self.table[b]));
            (!self.target.is_arrow(&fa, &fb)).then(|| (self.source.coords(a), self.source.coords(b)))
        })
    }

    pub fn is_digraph_map(&self) -> bool {
        self.first_violation().is_none()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GridMap) -> GridMap {
        assert_eq!(self.target, other.source, "grid maps are not composable");
        GridMap {
            source: self.source.clone(),
            target: other.target.clone(),
            table: self.table.iter().map(|&i| other.table[i]).collect(),
        }
    }

    /// Same tuples pointwise, ignoring which grids the images are read in.
    pub fn agrees_pointwise(&self, other: &GridMap) -> bool {
        self.source.size() == other.source.size()
            && (0..self.source.size()).all(|i| {
                self.target.coords(self.table[i]) == other.target.coords(other.table[i])
            })
    }

    /// Coordinatewise product of interval maps.
    pub fn tensor(maps: &[crate::interval::IntervalMap]) -> GridMap {
        let source = TensorGrid::new(maps.iter().map(|m| m.source.clone()).collect());
        let target = TensorGrid::new(maps.iter().map(|m| m.target.clone()).collect());
        GridMap::from_fn(source, target, |c| c.iter().zip(maps).map(|(&x, m)| m.apply(x)).collect())
    }

    /// `∂^{i,ε}`: inserts `ε · |J_i|` as coordinate `i` (1-based) of `target`.
    pub fn coface(target: &TensorGrid, i: usize, eps: u8) -> GridMap {
        let source = target.without(i - 1);
        let value = if eps == 0 { 0 } else { target.factors()[i - 1].len() };
        GridMap::from_fn(source, target.clone(), |c| {
            let mut v = c.to_vec();
            v.insert(i - 1, value);
            v
        })
    }

    /// `σ^i`: drops coordinate `i` (1-based).
    pub fn degeneracy(source: &TensorGrid, i: usize) -> GridMap {
        GridMap::from_fn(source.clone(), source.without(i - 1), |c| {
            let mut v = c.to_vec();
            v.remove(i - 1);
            v
        })
    }

    /// `γ^{i,ε}`: merges coordinates `i, i+1` (1-based) by max for `ε = 0`
    /// and min for `ε = 1`.
    pub fn connection(source: &TensorGrid, i: usize, eps: u8) -> GridMap {
        GridMap::from_fn(source.clone(), source.without(i), |c| {
            let mut v = c.to_vec();
            let other = v.remove(i);
            v[i - 1] = if eps == 0 { v[i - 1].max(other) } else { v[i - 1].min(other) };
            v
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Sign;

    #[test]
    fn cube_counts() {
        let i4 = Interval::standard(4, Sign::Plus);
        let g = TensorGrid::power(&i4, 2);
        assert_eq!(g.size(), 25);
        assert_eq!(g.boundary().len(), 16);
        let i1 = Interval::standard(1, Sign::Plus);
        let sq = TensorGrid::power(&i1, 2).digraph();
        assert_eq!(sq.labels(), ["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
        assert_eq!(sq.arrow_count(), 4);
        let i2 = Interval::standard(2, Sign::Plus);
        assert_eq!(TensorGrid::power(&i2, 2).arrows().len(), 12);
    }

    #[test]
    fn cofaces_are_digraph_maps() {
        let g = TensorGrid::power(&Interval::standard(3, Sign::Minus), 3);
        for i in 1..=3 {
            for eps in 0..2 {
                let d = GridMap::coface(&g, i, eps);
                assert!(d.is_digraph_map());
                assert_eq!(d.source.dim(), 2);
            }
        }
    }

    #[test]
    fn degeneracies_and_connections_are_digraph_maps() {
        for sign in [Sign::Plus, Sign::Minus] {
            let g = TensorGrid::power(&Interval::standard(4, sign), 3);
            for i in 1..=3 {
                assert!(GridMap::degeneracy(&g, i).is_digraph_map());
            }
            for i in 1..=2 {
                for eps in 0..2 {
                    assert!(GridMap::connection(&g, i, eps).is_digraph_map());
                }
            }
        }
        let g = TensorGrid::power(&Interval::standard(1, Sign::Plus), 2);
        let max = GridMap::connection(&g, 1, 0);
        assert_eq!(max.table, vec![0, 1, 1, 1]);
    }
}
