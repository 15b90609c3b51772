//! Integer homology of truncated cubical nerves: Smith normal form, normalized
//! cubical chains, induced maps, edge-path presentations of `π₁` and the
//! triangulation cross-check.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::nerve::{CubicalMap, Degeneracy, TruncatedCubicalSet};
use crate::union_find::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("invalid cubical set: {0}")]
    InvalidCubicalSet(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("the 1-skeleton is not connected")]
    NotConnected,
    #[error("degree {0} needs the next boundary, which is truncated away")]
    TruncatedDegree(usize),
    #[error("an integer does not fit the output format")]
    Overflow,
    #[error("matrix dimension {0} exceeds the budget")]
    BudgetExceeded(usize),
    #[error("{0}")]
    Mismatch(String),
}

/// Ring operations needed by the Smith kernel. `None` signals overflow.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn abs_cmp(&self, other: &Self) -> Ordering;
    fn is_unit(&self) -> bool;
    fn div_trunc(&self, d: &Self) -> Self;
    fn is_divisible_by(&self, d: &Self) -> bool;
    /// `self − q·b`.
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn negated(&self) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn div_trunc(&self, d: &Self) -> Self {
        self / d
    }
    fn is_divisible_by(&self, d: &Self) -> bool {
        self % d == 0
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn negated(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn div_trunc(&self, d: &Self) -> Self {
        self / d
    }
    fn is_divisible_by(&self, d: &Self) -> bool {
        Zero::is_zero(&(self % d))
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn negated(&self) -> Option<Self> {
        Some(-self)
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[T]>::to_vec).collect()
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&T) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, other: &Matrix<T>) -> Option<Matrix<T>> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::<T>::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j).clone();
                        out.set(i, j, cur.sub_mul(&a.negated()?, b)?);
                    }
                }
            }
        }
        Some(out)
    }

    /// Rows `from..`.
    pub fn rows_from(&self, from: usize) -> Matrix<T> {
        Matrix { rows: self.rows - from, cols: self.cols, data: self.data[from * self.cols..].to_vec() }
    }

    fn row_sub_mul(&mut self, a: usize, b: usize, q: &T) -> Option<()> {
        for j in 0..self.cols {
            let rb = &self.data[b * self.cols + j];
            if !rb.is_zero() {
                let v = self.data[a * self.cols + j].sub_mul(q, rb)?;
                self.data[a * self.cols + j] = v;
            }
        }
        Some(())
    }

    fn col_sub_mul(&mut self, a: usize, b: usize, q: &T) -> Option<()> {
        for i in 0..self.rows {
            let cb = &self.data[i * self.cols + b];
            if !cb.is_zero() {
                let v = self.data[i * self.cols + a].sub_mul(q, cb)?;
                self.data[i * self.cols + a] = v;
            }
        }
        Some(())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn negate_row(&mut self, a: usize) -> Option<()> {
        for j in 0..self.cols {
            let v = self.data[a * self.cols + j].negated()?;
            self.data[a * self.cols + j] = v;
        }
        Some(())
    }

    fn negate_col(&mut self, a: usize) -> Option<()> {
        for i in 0..self.rows {
            let v = self.data[i * self.cols + a].negated()?;
            self.data[i * self.cols + a] = v;
        }
        Some(())
    }
}

/// `U·A·V = D` with `D` diagonal, its diagonal a divisibility chain.
#[derive(Clone, Debug)]
pub struct Smith<T> {
    /// Nonzero diagonal entries, all positive.
    pub invariant_factors: Vec<T>,
    pub rank: usize,
    pub d: Matrix<T>,
    pub transforms: Option<Transforms<T>>,
}

#[derive(Clone, Debug)]
pub struct Transforms<T> {
    pub u: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub v: Matrix<T>,
    pub v_inv: Matrix<T>,
}

struct Reduction<T> {
    a: Matrix<T>,
    t: Option<Transforms<T>>,
    /// Whether `V` and `V⁻¹` are kept up to date.
    track_cols: bool,
}

impl<T: Scalar> Reduction<T> {
    /// `row_a −= q·row_b`.
    fn row_op(&mut self, a: usize, b: usize, q: &T) -> Option<()> {
        self.a.row_sub_mul(a, b, q)?;
        if let Some(t) = &mut self.t {
            t.u.row_sub_mul(a, b, q)?;
            t.u_inv.col_sub_mul(b, a, &q.negated()?)?;
        }
        Some(())
    }

    /// `col_a −= q·col_b`.
    fn col_op(&mut self, a: usize, b: usize, q: &T) -> Option<()> {
        self.a.col_sub_mul(a, b, q)?;
        if let Some(t) = self.t.as_mut().filter(|_| self.track_cols) {
            t.v.col_sub_mul(a, b, q)?;
            t.v_inv.row_sub_mul(b, a, &q.negated()?)?;
        }
        Some(())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.a.swap_rows(a, b);
        if let Some(t) = &mut self.t {
            t.u.swap_rows(a, b);
            t.u_inv.swap_cols(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.a.swap_cols(a, b);
        if let Some(t) = self.t.as_mut().filter(|_| self.track_cols) {
            t.v.swap_cols(a, b);
            t.v_inv.swap_rows(a, b);
        }
    }

    fn negate_row(&mut self, a: usize) -> Option<()> {
        self.a.negate_row(a)?;
        if let Some(t) = &mut self.t {
            t.u.negate_row(a)?;
            t.u_inv.negate_col(a)?;
        }
        Some(())
    }

    /// A unit if there is one, otherwise an entry of least absolute value.
    fn pivot(&self, from: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for j in from..self.a.cols {
            for i in from..self.a.rows {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if x.is_unit() {
                    return Some((i, j));
                }
                if best.is_none_or(|(bi, bj)| x.abs_cmp(self.a.get(bi, bj)) == Ordering::Less) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn run(mut self) -> Option<Smith<T>> {
        let (rows, cols) = (self.a.rows, self.a.cols);
        let mut t = 0;
        while t < rows.min(cols) {
            let Some((pi, pj)) = self.pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..rows {
                    if !self.a.get(i, t).is_zero() {
                        let q = self.a.get(i, t).div_trunc(self.a.get(t, t));
                        self.row_op(i, t, &q)?;
                        clean &= self.a.get(i, t).is_zero();
                    }
                }
                for j in t + 1..cols {
                    if !self.a.get(t, j).is_zero() {
                        let q = self.a.get(t, j).div_trunc(self.a.get(t, t));
                        self.col_op(j, t, &q)?;
                        clean &= self.a.get(t, j).is_zero();
                    }
                }
                if !clean {
                    let smallest = |a: &Matrix<T>, cells: &mut dyn Iterator<Item = (usize, usize)>| {
                        cells
                            .filter(|&(i, j)| !a.get(i, j).is_zero())
                            .min_by(|&(i, j), &(k, l)| a.get(i, j).abs_cmp(a.get(k, l)))
                    };
                    let in_col = smallest(&self.a, &mut (t + 1..rows).map(|i| (i, t)));
                    let in_row = smallest(&self.a, &mut (t + 1..cols).map(|j| (t, j)));
                    match (in_col, in_row) {
                        (Some((i, _)), _) => self.swap_rows(t, i),
                        (None, Some((_, j))) => self.swap_cols(t, j),
                        (None, None) => {}
                    }
                    continue;
                }
                if !self.a.get(t, t).is_unit() {
                    let p = self.a.get(t, t).clone();
                    let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !self.a.get(i, j).is_divisible_by(&p)));
                    if let Some(i) = bad {
                        self.row_op(t, i, &T::from_i64(-1))?;
                        continue;
                    }
                }
                break;
            }
            if self.a.get(t, t).is_negative() {
                self.negate_row(t)?;
            }
            t += 1;
        }
        let invariant_factors = (0..t).map(|k| self.a.get(k, k).clone()).collect();
        Some(Smith { invariant_factors, rank: t, d: self.a, transforms: self.t })
    }
}

/// Smith normal form over a fixed-width or arbitrary-precision scalar;
/// `None` on overflow.
pub fn smith_generic<T: Scalar>(a: &Matrix<T>, track: bool) -> Option<Smith<T>> {
    let t = track.then(|| Transforms {
        u: Matrix::identity(a.rows),
        u_inv: Matrix::identity(a.rows),
        v: Matrix::identity(a.cols),
        v_inv: Matrix::identity(a.cols),
    });
    Reduction { a: a.clone(), t, track_cols: true }.run()
}

/// Smith normal form tracking only `U` and `U⁻¹`; `V` and `V⁻¹` come back
/// empty. Saves the square column transforms of a wide matrix.
fn smith_rows_tracked(a: &Matrix<BigInt>) -> Smith<BigInt> {
    let t = Some(Transforms {
        u: Matrix::identity(a.rows),
        u_inv: Matrix::identity(a.rows),
        v: Matrix::zeros(0, 0),
        v_inv: Matrix::zeros(0, 0),
    });
    Reduction { a: a.clone(), t, track_cols: false }.run().expect("arbitrary precision cannot overflow")
}

fn smith_to_big(s: Smith<i64>) -> Smith<BigInt> {
    let conv = |m: &Matrix<i64>| m.map(|x| BigInt::from(*x));
    Smith {
        invariant_factors: s.invariant_factors.iter().map(|&x| BigInt::from(x)).collect(),
        rank: s.rank,
        d: conv(&s.d),
        transforms: s.transforms.map(|t| Transforms {
            u: conv(&t.u),
            u_inv: conv(&t.u_inv),
            v: conv(&t.v),
            v_inv: conv(&t.v_inv),
        }),
    }
}

/// Smith normal form of an integer matrix: fixed-width arithmetic first,
/// arbitrary precision on overflow.
pub fn smith_normal_form(a: &Matrix<i64>, track: bool) -> Smith<BigInt> {
    match smith_generic(a, track) {
        Some(s) => smith_to_big(s),
        None => smith_generic(&a.map(|x| BigInt::from(*x)), track).expect("arbitrary precision cannot overflow"),
    }
}

/// Sparse columns: `column[j]` lists `(row, coefficient)`.
pub type SparseColumns = Vec<Vec<(usize, i64)>>;

/// Free chain groups `C_0..C_K` with boundaries `C_n → C_{n−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub dims: Vec<usize>,
    /// `boundaries[n]` for `n ≥ 1`; `boundaries[0]` is empty.
    pub boundaries: Vec<SparseColumns>,
    /// The complex stops at `K`, so `H_K` is only an upper bound.
    pub truncated_top: bool,
}

fn dense(rows: usize, cols: &SparseColumns) -> Matrix<i64> {
    let mut m = Matrix::zeros(rows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for &(i, c) in col {
            let cur = *m.get(i, j);
            m.set(i, j, cur + c);
        }
    }
    m
}

fn apply_sparse(cols: &SparseColumns, v: &[(usize, i64)]) -> HashMap<usize, i64> {
    let mut out: HashMap<usize, i64> = HashMap::new();
    for &(j, a) in v {
        for &(i, c) in &cols[j] {
            *out.entry(i).or_insert(0) += a * c;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

impl ChainComplex {
    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    /// `∂_n` as a dense `dim C_{n−1} × dim C_n` matrix (`∂_0` is `0 × dim C_0`).
    pub fn boundary_matrix(&self, n: usize) -> Matrix<i64> {
        if n == 0 {
            Matrix::zeros(0, self.dims[0])
        } else {
            dense(self.dims[n - 1], &self.boundaries[n])
        }
    }

    /// First degree `n` with `∂_{n−1} ∂_n ≠ 0`.
    pub fn boundary_square_violation(&self) -> Option<usize> {
        (2..=self.top()).find(|&n| {
            (0..self.dims[n]).any(|j| !apply_sparse(&self.boundaries[n - 1], &self.boundaries[n][j]).is_empty())
        })
    }
}

/// `ℤ^rank ⊕ ⊕ ℤ/t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("ℤ".into()),
            r => parts.push(format!("ℤ^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("ℤ/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Homology {
    #[serde(rename = "H")]
    pub groups: Vec<HomologyGroup>,
    pub truncated_top: bool,
}

impl Homology {
    /// Groups in degrees below the truncation.
    pub fn reliable(&self) -> &[HomologyGroup] {
        if self.truncated_top {
            &self.groups[..self.groups.len().saturating_sub(1)]
        } else {
            &self.groups
        }
    }

    /// Trivial reduced homology in every reliable degree.
    pub fn is_acyclic(&self) -> bool {
        self.reliable().iter().enumerate().all(|(n, g)| {
            g.torsion.is_empty() && g.rank == usize::from(n == 0)
        })
    }
}

fn to_u64(x: &BigInt) -> Result<u64, HomologyError> {
    x.to_u64().ok_or(HomologyError::Overflow)
}

fn check_budget(c: &ChainComplex, cap: usize) -> Result<(), HomologyError> {
    match c.dims.iter().find(|&&d| d > cap) {
        Some(&d) => Err(HomologyError::BudgetExceeded(d)),
        None => Ok(()),
    }
}

/// Rank and non-unit invariant factors of the matrix with `rows` rows and
/// the given sparse columns.
///
/// Unit pivots split off a `1 ⊕ A′` block, so they are eliminated sparsely
/// first; the leftover block goes through the dense reduction. `None` if the
/// sparse pass overflows.
fn sparse_invariants(rows: usize, columns: &SparseColumns) -> Option<(usize, Vec<BigInt>)> {
    let mut by_row: Vec<HashMap<usize, i64>> = vec![HashMap::new(); rows];
    let mut by_col: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); columns.len()];
    for (j, col) in columns.iter().enumerate() {
        for &(i, v) in col {
            let e = by_row[i].entry(j).or_insert(0);
            *e = e.checked_add(v)?;
        }
    }
    for (i, row) in by_row.iter_mut().enumerate() {
        row.retain(|_, v| *v != 0);
        for &j in row.keys() {
            by_col[j].insert(i);
        }
    }
    let mut order: Vec<usize> = (0..columns.len()).collect();
    order.sort_by_key(|&j| by_col[j].len());
    let mut units = 0;
    let mut progress = true;
    while progress {
        progress = false;
        for &j in &order {
            // the unit entry in the sparsest row keeps fill-in low
            let Some(p) = by_col[j]
                .iter()
                .copied()
                .filter(|&i| by_row[i][&j].abs() == 1)
                .min_by_key(|&i| by_row[i].len())
            else {
                continue;
            };
            let pivot_row: Vec<(usize, i64)> = by_row[p].iter().map(|(&c, &v)| (c, v)).collect();
            let unit = by_row[p][&j];
            let others: Vec<usize> = by_col[j].iter().copied().filter(|&i| i != p).collect();
            for i in others {
                let factor = by_row[i][&j].checked_mul(unit)?;
                for &(c, v) in &pivot_row {
                    let e = by_row[i].entry(c).or_insert(0);
                    *e = e.checked_sub(factor.checked_mul(v)?)?;
                    if *e == 0 {
                        by_row[i].remove(&c);
                        by_col[c].remove(&i);
                    } else {
                        by_col[c].insert(i);
                    }
                }
            }
            for &(c, _) in &pivot_row {
                by_col[c].remove(&p);
            }
            by_row[p].clear();
            units += 1;
            progress = true;
        }
    }
    let live_rows: Vec<usize> = (0..rows).filter(|&i| !by_row[i].is_empty()).collect();
    let live_cols: Vec<usize> = (0..columns.len()).filter(|&j| !by_col[j].is_empty()).collect();
    let col_pos: HashMap<usize, usize> = live_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let mut rest = Matrix::zeros(live_rows.len(), live_cols.len());
    for (r, &i) in live_rows.iter().enumerate() {
        for (&j, &v) in &by_row[i] {
            rest.set(r, col_pos[&j], v);
        }
    }
    let s = smith_normal_form(&rest, false);
    let factors = s.invariant_factors.into_iter().filter(|d| !d.is_one()).collect();
    Some((units + s.rank, factors))
}

fn invariants(c: &ChainComplex, n: usize) -> (usize, Vec<BigInt>) {
    if n == 0 {
        return (0, Vec::new());
    }
    sparse_invariants(c.dims[n - 1], &c.boundaries[n]).unwrap_or_else(|| {
        let s = smith_normal_form(&c.boundary_matrix(n), false);
        (s.rank, s.invariant_factors.into_iter().filter(|d| !d.is_one()).collect())
    })
}

/// `H_n = ker ∂_n / im ∂_{n+1}` for every degree of the complex.
pub fn homology(c: &ChainComplex, max_matrix_dim: usize) -> Result<Homology, HomologyError> {
    check_budget(c, max_matrix_dim)?;
    let k = c.top();
    let reduced: Vec<(usize, Vec<BigInt>)> = (0..=k).map(|n| invariants(c, n)).collect();
    let mut groups = Vec::new();
    for n in 0..=k {
        let (next_rank, torsion) = match reduced.get(n + 1) {
            Some((r, f)) => (*r, f.iter().map(to_u64).collect::<Result<Vec<_>, _>>()?),
            None => (0, Vec::new()),
        };
        groups.push(HomologyGroup { rank: c.dims[n] - reduced[n].0 - next_rank, torsion });
    }
    Ok(Homology { groups, truncated_top: c.truncated_top })
}

/// Normalized chains of a truncated cubical set.
#[derive(Clone, Debug)]
pub struct CubicalChains {
    pub complex: ChainComplex,
    /// `basis[n]`: nondegenerate cubes of level `n`.
    pub basis: Vec<Vec<usize>>,
    position: Vec<Vec<Option<usize>>>,
}

impl CubicalChains {
    /// Basis position of a cube, `None` if degenerate.
    pub fn position(&self, n: usize, cube: usize) -> Option<usize> {
        self.position[n][cube]
    }
}

/// Basis: nondegenerate cubes. `∂c = Σ_i (−1)^i ([∂_{i,1}c] − [∂_{i,0}c])`,
/// degenerate faces dropped.
pub fn normalized_chain_complex(x: &TruncatedCubicalSet) -> Result<CubicalChains, HomologyError> {
    let k = x.top_dim;
    let basis: Vec<Vec<usize>> = (0..=k).map(|n| x.nondegenerate_cubes(n)).collect();
    let position: Vec<Vec<Option<usize>>> = (0..=k)
        .map(|n| {
            let mut p = vec![None; x.level_len(n)];
            for (i, &c) in basis[n].iter().enumerate() {
                p[c] = Some(i);
            }
            p
        })
        .collect();
    let mut boundaries = vec![Vec::new()];
    for n in 1..=k {
        let cols = basis[n]
            .iter()
            .map(|&c| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for i in 1..=n {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    for (e, s) in [(1u8, sign), (0u8, -sign)] {
                        if let Some(p) = position[n - 1][x.face(n, i, e, c)] {
                            *acc.entry(p).or_insert(0) += s;
                        }
                    }
                }
                let mut col: Vec<(usize, i64)> = acc.into_iter().filter(|&(_, v)| v != 0).collect();
                col.sort_unstable();
                col
            })
            .collect();
        boundaries.push(cols);
    }
    let complex = ChainComplex { dims: basis.iter().map(Vec::len).collect(), boundaries, truncated_top: true };
    if let Some(n) = complex.boundary_square_violation() {
        return Err(HomologyError::InvalidCubicalSet(format!("∂∂ ≠ 0 in degree {n}")));
    }
    Ok(CubicalChains { complex, basis, position })
}

/// Homology of the normalized chains of a nerve truncation.
pub fn cubical_homology(x: &TruncatedCubicalSet, max_matrix_dim: usize) -> Result<Homology, HomologyError> {
    homology(&normalized_chain_complex(x)?.complex, max_matrix_dim)
}

/// Cycle and boundary data for one degree, in Smith coordinates.
struct DegreeBasis {
    /// Columns `r..` of `V` span the cycles.
    v: Matrix<BigInt>,
    v_inv: Matrix<BigInt>,
    r: usize,
    p: Matrix<BigInt>,
    p_inv: Matrix<BigInt>,
    /// Invariant factors of the boundaries inside the cycles.
    factors: Vec<BigInt>,
    /// Generator slots: torsion ones (factor > 1), then free ones.
    generators: Vec<usize>,
    group: HomologyGroup,
}

impl DegreeBasis {
    fn new(c: &ChainComplex, n: usize) -> Result<Self, HomologyError> {
        if n >= c.top() {
            return Err(HomologyError::TruncatedDegree(n));
        }
        let s = smith_normal_form(&c.boundary_matrix(n), true);
        let t = s.transforms.expect("tracked");
        let r = s.rank;
        let next = c.boundary_matrix(n + 1).map(|x| BigInt::from(*x));
        let b = t.v_inv.mul(&next).expect("big").rows_from(r);
        let z = b.rows();
        let sb = smith_rows_tracked(&b);
        let tb = sb.transforms.expect("tracked");
        let factors = sb.invariant_factors.clone();
        let torsion_slots: Vec<usize> = (0..factors.len()).filter(|&k| !factors[k].is_one()).collect();
        let free_slots: Vec<usize> = (factors.len()..z).collect();
        let group = HomologyGroup {
            rank: free_slots.len(),
            torsion: torsion_slots.iter().map(|&k| to_u64(&factors[k])).collect::<Result<_, _>>()?,
        };
        let generators = torsion_slots.into_iter().chain(free_slots).collect();
        Ok(DegreeBasis { v: t.v, v_inv: t.v_inv, r, p: tb.u, p_inv: tb.u_inv, factors, generators, group })
    }

    /// Representative cycle of generator `g` in chain coordinates.
    fn cycle(&self, g: usize) -> Vec<BigInt> {
        let slot = self.generators[g];
        let dim = self.v.rows();
        let z = self.p_inv.rows();
        (0..dim)
            .map(|i| (0..z).fold(<BigInt as Zero>::zero(), |acc, k| acc + self.v.get(i, self.r + k) * self.p_inv.get(k, slot)))
            .collect()
    }

    /// Coordinates of a cycle in terms of the generators.
    fn coordinates(&self, chain: &[BigInt]) -> Vec<BigInt> {
        let dim = self.v_inv.cols();
        let z = self.p.rows();
        let w: Vec<BigInt> = (self.r..self.r + z)
            .map(|i| (0..dim).fold(<BigInt as Zero>::zero(), |acc, j| acc + self.v_inv.get(i, j) * &chain[j]))
            .collect();
        self.generators
            .iter()
            .map(|&slot| {
                let y = (0..z).fold(<BigInt as Zero>::zero(), |acc, k| acc + self.p.get(slot, k) * &w[k]);
                match self.factors.get(slot) {
                    Some(d) => y.mod_floor(d),
                    None => y,
                }
            })
            .collect()
    }
}

/// A chain map given on bases: `columns[j]` is the image of basis element `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub levels: Vec<SparseColumns>,
}

/// Chain map of a cubical map on normalized chains.
pub fn chain_map_of(
    f: &CubicalMap,
    source: &CubicalChains,
    target: &CubicalChains,
) -> Result<ChainMap, HomologyError> {
    let levels: Vec<SparseColumns> = source
        .basis
        .iter()
        .enumerate()
        .map(|(n, b)| {
            b.iter()
                .map(|&x| target.position(n, f.levels[n][x]).map(|p| vec![(p, 1)]).unwrap_or_default())
                .collect()
        })
        .collect();
    let map = ChainMap { levels };
    for n in 1..source.basis.len() {
        for j in 0..source.basis[n].len() {
            let lhs = apply_sparse(&target.complex.boundaries[n], &map.levels[n][j]);
            let rhs = apply_sparse(&map.levels[n - 1], &source.complex.boundaries[n][j]);
            if lhs != rhs {
                return Err(HomologyError::NotChainMap(format!("boundary mismatch in degree {n}")));
            }
        }
    }
    Ok(map)
}

/// Map on `H_n` in generator coordinates, torsion generators first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedMap {
    pub degree: usize,
    pub source: HomologyGroup,
    pub target: HomologyGroup,
    /// `matrix[i][j]`: coordinate `i` of the image of source generator `j`.
    pub matrix: Vec<Vec<i64>>,
    pub is_iso: bool,
}

/// The map induced on `H_n` by a chain map.
pub fn induced_on_homology(
    f: &ChainMap,
    source: &ChainComplex,
    target: &ChainComplex,
    n: usize,
) -> Result<InducedMap, HomologyError> {
    let sb = DegreeBasis::new(source, n)?;
    let tb = DegreeBasis::new(target, n)?;
    let mut columns = Vec::new();
    for g in 0..sb.generators.len() {
        let cycle = sb.cycle(g);
        let mut image = vec![<BigInt as Zero>::zero(); target.dims[n]];
        for (j, a) in cycle.iter().enumerate() {
            for &(i, c) in &f.levels[n][j] {
                image[i] += a * c;
            }
        }
        columns.push(tb.coordinates(&image));
    }
    let rows = tb.generators.len();
    let matrix: Vec<Vec<i64>> = (0..rows)
        .map(|i| columns.iter().map(|col| col[i].to_i64().ok_or(HomologyError::Overflow)).collect())
        .collect::<Result<_, _>>()?;
    let is_iso = is_isomorphism(&sb.group, &tb.group, &columns)?;
    Ok(InducedMap { degree: n, source: sb.group, target: tb.group, matrix, is_iso })
}

/// Isomorphism test for a map `ℤ^a ⊕ T → ℤ^b ⊕ T′` in generator coordinates
/// (torsion first). Such a map is block lower triangular, so it is invertible
/// iff the free block is unimodular and the torsion block is bijective.
fn is_isomorphism(src: &HomologyGroup, tgt: &HomologyGroup, columns: &[Vec<BigInt>]) -> Result<bool, HomologyError> {
    if src.rank != tgt.rank || src.torsion != tgt.torsion {
        return Ok(false);
    }
    let t = src.torsion.len();
    let free = Matrix::from_rows(
        (t..t + src.rank).map(|i| (t..t + src.rank).map(|j| columns[j][i].clone()).collect()).collect(),
    );
    if src.rank > 0 {
        let s = smith_generic(&free, false).expect("big");
        if s.rank != src.rank || !s.invariant_factors.iter().all(One::is_one) {
            return Ok(false);
        }
    }
    let order: u64 = src.torsion.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d)).ok_or(HomologyError::Overflow)?;
    if order > 1_000_000 {
        return Err(HomologyError::BudgetExceeded(order as usize));
    }
    let mut seen = std::collections::HashSet::new();
    for code in 0..order {
        let mut rest = code;
        let x: Vec<u64> = src.torsion.iter().map(|&d| {
            let v = rest % d;
            rest /= d;
            v
        }).collect();
        let image: Vec<BigInt> = (0..t)
            .map(|i| {
                let s = (0..t).fold(<BigInt as Zero>::zero(), |acc, j| acc + &columns[j][i] * x[j]);
                s.mod_floor(&BigInt::from(tgt.torsion[i]))
            })
            .collect();
        if !seen.insert(image) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Map induced on `H_n` of normalized chains by a cubical map.
pub fn induced_homology_map(
    f: &CubicalMap,
    source: &TruncatedCubicalSet,
    target: &TruncatedCubicalSet,
    n: usize,
) -> Result<InducedMap, HomologyError> {
    let (sc, tc) = (normalized_chain_complex(source)?, normalized_chain_complex(target)?);
    let map = chain_map_of(f, &sc, &tc)?;
    induced_on_homology(&map, &sc.complex, &tc.complex, n)
}

/// A letter `g^{±1}`.
pub type Letter = (usize, i8);

/// Generators and relators of a finitely presented group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<Letter>>,
}

fn free_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        match out.last() {
            Some(&(g, e)) if g == l.0 && e == -l.1 => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

fn cyclic_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut w = free_reduce(word);
    while w.len() >= 2 && w[0].0 == w[w.len() - 1].0 && w[0].1 == -w[w.len() - 1].1 {
        w.pop();
        w.remove(0);
    }
    w
}

fn inverse(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

impl GroupPresentation {
    pub fn word_to_string(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "1".into();
        }
        word.iter()
            .map(|&(g, e)| if e > 0 { self.generators[g].clone() } else { format!("{}^-1", self.generators[g]) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Free and cyclic reduction plus elimination of generators that occur
    /// exactly once in some relator. Bounded: words longer than
    /// `max_word` are left alone.
    pub fn simplify(&self, max_word: usize) -> GroupPresentation {
        let mut relators: Vec<Vec<Letter>> =
            self.relators.iter().map(|r| cyclic_reduce(r)).filter(|r| !r.is_empty()).collect();
        let mut alive = vec![true; self.generators.len()];
        loop {
            let found = relators.iter().enumerate().find_map(|(ri, r)| {
                if r.len() > max_word {
                    return None;
                }
                r.iter().position(|&(g, _)| r.iter().filter(|&&(h, _)| h == g).count() == 1).map(|pos| (ri, pos))
            });
            let Some((ri, pos)) = found else { break };
            let r = relators.remove(ri);
            let (g, e) = r[pos];
            // r = a g^e b = 1  ⇒  g^e = a⁻¹ b⁻¹ ⇒ g = (b a)^{-e}
            let mut ba: Vec<Letter> = r[pos + 1..].to_vec();
            ba.extend_from_slice(&r[..pos]);
            let replacement = if e > 0 { inverse(&ba) } else { ba };
            relators = relators
                .into_iter()
                .map(|w| {
                    let mut out = Vec::new();
                    for &(h, s) in &w {
                        if h == g {
                            if s > 0 {
                                out.extend_from_slice(&replacement);
                            } else {
                                out.extend(inverse(&replacement));
                            }
                        } else {
                            out.push((h, s));
                        }
                    }
                    cyclic_reduce(&out)
                })
                .filter(|w| !w.is_empty())
                .collect();
            alive[g] = false;
        }
        let renumber: Vec<Option<usize>> = alive
            .iter()
            .scan(0, |next, &a| {
                Some(a.then(|| {
                    *next += 1;
                    *next - 1
                }))
            })
            .collect();
        GroupPresentation {
            generators: (0..self.generators.len()).filter(|&g| alive[g]).map(|g| self.generators[g].clone()).collect(),
            relators: relators
                .into_iter()
                .map(|w| w.into_iter().map(|(g, e)| (renumber[g].expect("eliminated"), e)).collect())
                .collect(),
        }
    }

    /// Abelianization as `ℤ^r ⊕ torsion`, from the exponent-sum matrix.
    pub fn abelianization(&self) -> Result<HomologyGroup, HomologyError> {
        let rows: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|r| {
                let mut row = vec![0i64; self.generators.len()];
                for &(g, e) in r {
                    row[g] += i64::from(e);
                }
                row
            })
            .collect();
        let m = if rows.is_empty() { Matrix::zeros(0, self.generators.len()) } else { Matrix::from_rows(rows) };
        let s = smith_normal_form(&m, false);
        Ok(HomologyGroup {
            rank: self.generators.len() - s.rank,
            torsion: s.invariant_factors.iter().filter(|d| !d.is_one()).map(to_u64).collect::<Result<_, _>>()?,
        })
    }
}

/// Edge-path presentation of `π₁` at a vertex: generators are nondegenerate
/// 1-cubes off a spanning tree, relators the boundary loops of nondegenerate
/// 2-cubes.
pub fn pi1_presentation(x: &TruncatedCubicalSet, base: usize) -> Result<GroupPresentation, HomologyError> {
    if x.top_dim < 2 {
        return Err(HomologyError::TruncatedDegree(1));
    }
    let vertices = x.level_len(0);
    if base >= vertices {
        return Err(HomologyError::Mismatch(format!("no vertex {base}")));
    }
    let edges = x.nondegenerate_cubes(1);
    let ends = |e: usize| (x.face(1, 1, 0, e), x.face(1, 1, 1, e));
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertices];
    for &e in &edges {
        let (s, t) = ends(e);
        adjacency[s].push((t, e));
        adjacency[t].push((s, e));
    }
    let mut seen = vec![false; vertices];
    let mut tree = vec![false; x.level_len(1)];
    let mut queue = VecDeque::from([base]);
    seen[base] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                tree[e] = true;
                queue.push_back(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(HomologyError::NotConnected);
    }
    let mut generator_of = vec![None; x.level_len(1)];
    let mut generators = Vec::new();
    for &e in &edges {
        if !tree[e] {
            generator_of[e] = Some(generators.len());
            let (s, t) = ends(e);
            generators.push(format!("{}→{}", x.target.label(s), x.target.label(t)));
        }
    }
    let letter = |e: usize, sign: i8| generator_of[e].map(|g| (g, sign));
    let relators = x
        .nondegenerate_cubes(2)
        .into_iter()
        .map(|s| {
            let word: Vec<Letter> = [
                letter(x.face(2, 1, 0, s), 1),
                letter(x.face(2, 2, 1, s), 1),
                letter(x.face(2, 1, 1, s), -1),
                letter(x.face(2, 2, 0, s), -1),
            ]
            .into_iter()
            .flatten()
            .collect();
            free_reduce(&word)
        })
        .filter(|w| !w.is_empty())
        .collect();
    Ok(GroupPresentation { generators, relators })
}

/// A nondegenerate simplex of the triangulation: a nondegenerate cube and a
/// strict chain from its initial to its terminal vertex, recorded as the
/// step at which each coordinate switches.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexKey {
    pub cube_dim: usize,
    pub cube: usize,
    pub steps: Vec<u8>,
}

impl SimplexKey {
    pub fn dim(&self) -> usize {
        self.steps.iter().copied().max().unwrap_or(0) as usize
    }
}

/// Nondegenerate simplices by dimension, with their simplicial chain complex.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub simplices: Vec<Vec<SimplexKey>>,
    pub complex: ChainComplex,
}

fn surjections(n: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        let t: Vec<u8> = (0..n)
            .map(|_| {
                let v = rest % k;
                rest /= k;
                (v + 1) as u8
            })
            .collect();
        if (1..=k as u8).all(|s| t.contains(&s)) {
            out.push(t);
        }
    }
    out.sort();
    out
}

struct Triangulator<'a> {
    x: &'a TruncatedCubicalSet,
    witnesses: Vec<Vec<Option<(Degeneracy, usize)>>>,
}

impl Triangulator<'_> {
    /// Pushes a simplex down through degeneracies; `None` if it collapses.
    fn normalize(&self, mut n: usize, mut cube: usize, mut steps: Vec<u8>, k: usize) -> Option<SimplexKey> {
        loop {
            let Some((kind, lower)) = self.witnesses[n][cube] else {
                return Some(SimplexKey { cube_dim: n, cube, steps });
            };
            match kind {
                Degeneracy::Sigma(i) => {
                    steps.remove(i - 1);
                }
                Degeneracy::Gamma(i, e) => {
                    let (a, b) = (steps[i - 1], steps[i]);
                    steps.remove(i);
                    steps[i - 1] = if e == 0 { a.min(b) } else { a.max(b) };
                }
            }
            n -= 1;
            cube = lower;
            if !(1..=k as u8).all(|s| steps.contains(&s)) {
                return None;
            }
        }
    }

    fn face(&self, s: &SimplexKey, j: usize) -> Option<SimplexKey> {
        let k = s.dim();
        let (mut n, mut cube) = (s.cube_dim, s.cube);
        let steps: Vec<u8> = if j > 0 && j < k {
            s.steps.iter().map(|&t| if t as usize > j { t - 1 } else { t }).collect()
        } else {
            let (block, eps) = if j == 0 { (1u8, 1u8) } else { (k as u8, 0u8) };
            for c in (0..s.steps.len()).rev().filter(|&c| s.steps[c] == block) {
                cube = self.x.face(n, c + 1, eps, cube);
                n -= 1;
            }
            s.steps
                .iter()
                .filter(|&&t| t != block)
                .map(|&t| if j == 0 { t - 1 } else { t })
                .collect()
        };
        self.normalize(n, cube, steps, k - 1)
    }
}

/// Triangulation of the truncation: each nondegenerate `n`-cube contributes
/// the interior simplices of the standard subdivision of `(Δ¹)^n`.
pub fn triangulate(x: &TruncatedCubicalSet) -> Result<Triangulation, HomologyError> {
    let k = x.top_dim;
    let tri = Triangulator {
        x,
        witnesses: (0..=k).map(|n| if n == 0 { vec![None; x.level_len(0)] } else { x.degeneracy_witnesses(n) }).collect(),
    };
    let mut simplices: Vec<Vec<SimplexKey>> = vec![Vec::new(); k + 1];
    for n in 0..=k {
        for cube in x.nondegenerate_cubes(n) {
            if n == 0 {
                simplices[0].push(SimplexKey { cube_dim: 0, cube, steps: Vec::new() });
                continue;
            }
            for d in 1..=n {
                for steps in surjections(n, d) {
                    simplices[d].push(SimplexKey { cube_dim: n, cube, steps });
                }
            }
        }
    }
    let index: Vec<HashMap<&SimplexKey, usize>> =
        simplices.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s, i)).collect()).collect();
    let mut boundaries = vec![Vec::new()];
    for d in 1..=k {
        let mut cols = Vec::new();
        for s in &simplices[d] {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for j in 0..=d {
                if let Some(f) = tri.face(s, j) {
                    let p = *index[d - 1]
                        .get(&f)
                        .ok_or_else(|| HomologyError::InvalidCubicalSet(format!("face {f:?} of {s:?} is missing")))?;
                    *acc.entry(p).or_insert(0) += if j % 2 == 0 { 1 } else { -1 };
                }
            }
            let mut col: Vec<(usize, i64)> = acc.into_iter().filter(|&(_, v)| v != 0).collect();
            col.sort_unstable();
            cols.push(col);
        }
        boundaries.push(cols);
    }
    let complex = ChainComplex { dims: simplices.iter().map(Vec::len).collect(), boundaries, truncated_top: true };
    if let Some(n) = complex.boundary_square_violation() {
        return Err(HomologyError::InvalidCubicalSet(format!("simplicial ∂∂ ≠ 0 in degree {n}")));
    }
    Ok(Triangulation { simplices, complex })
}

/// Simplicial homology of the triangulation.
pub fn simplicial_homology(x: &TruncatedCubicalSet, max_matrix_dim: usize) -> Result<Homology, HomologyError> {
    homology(&triangulate(x)?.complex, max_matrix_dim)
}

/// Number of connected components of the 1-skeleton.
pub fn path_components(x: &TruncatedCubicalSet) -> usize {
    let mut uf = UnionFind::new(x.level_len(0));
    if x.top_dim >= 1 {
        for e in 0..x.level_len(1) {
            uf.union(x.face(1, 1, 0, e), x.face(1, 1, 1, e));
        }
    }
    uf.labels().1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{box_product, Digraph};
    use crate::interval::{Interval, Sign};
    use crate::nerve::{nerve_levels, CubicalMap};
    use std::sync::Arc;

    fn nerve(g: Digraph, k: usize) -> TruncatedCubicalSet {
        nerve_levels(Arc::new(g), &Interval::standard(1, Sign::Plus), k, 1_000_000).unwrap()
    }

    fn i(n: usize) -> Digraph {
        Interval::standard(n, Sign::Plus).to_digraph()
    }

    fn check_smith(a: &Matrix<i64>) {
        let s = smith_normal_form(a, true);
        let t = s.transforms.as_ref().unwrap();
        let big = a.map(|x| BigInt::from(*x));
        let d = t.u.mul(&big).unwrap().mul(&t.v).unwrap();
        assert_eq!(d, s.d);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j {
                    assert!(Zero::is_zero(d.get(i, j)));
                }
            }
        }
        for w in s.invariant_factors.windows(2) {
            assert!(Zero::is_zero(&(&w[1] % &w[0])));
        }
        assert_eq!(t.u.mul(&t.u_inv).unwrap(), Matrix::identity(a.rows()));
        assert_eq!(t.v.mul(&t.v_inv).unwrap(), Matrix::identity(a.cols()));
    }

    #[test]
    fn smith_examples() {
        let a = Matrix::from_rows(vec![vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&a, false);
        assert_eq!(s.invariant_factors, vec![BigInt::from(2), BigInt::from(4)]);
        check_smith(&a);
        let z = Matrix::<i64>::zeros(3, 2);
        assert_eq!(smith_normal_form(&z, false).rank, 0);
        check_smith(&Matrix::from_rows(vec![vec![3, 0, 0], vec![0, 2, 0]]));
        check_smith(&Matrix::zeros(0, 4));
    }

    #[test]
    fn smith_falls_back_on_overflow() {
        let big = i64::MAX / 2;
        let a = Matrix::from_rows(vec![vec![big, big - 1], vec![big - 1, big - 3]]);
        assert!(smith_generic(&a, true).is_none() || smith_generic(&a, true).is_some());
        check_smith(&a);
    }

    #[test]
    fn c3_homology() {
        let x = nerve(Digraph::cycle(3), 2);
        let c = normalized_chain_complex(&x).unwrap();
        assert_eq!(c.complex.dims, vec![3, 3, 3]);
        let h = homology(&c.complex, 10_000).unwrap();
        assert_eq!(h.groups[0], HomologyGroup { rank: 1, torsion: vec![] });
        assert_eq!(h.groups[1], HomologyGroup { rank: 1, torsion: vec![] });
        assert!(h.truncated_top);
    }

    #[test]
    fn point_and_square_are_acyclic() {
        let p = cubical_homology(&nerve(Digraph::point(), 3), 10_000).unwrap();
        assert_eq!(p.groups.iter().map(|g| g.rank).collect::<Vec<_>>(), vec![1, 0, 0, 0]);
        let sq = box_product(&i(1), &i(1));
        let h = cubical_homology(&nerve(sq, 3), 10_000).unwrap();
        assert!(h.is_acyclic(), "{h:?}");
    }

    #[test]
    fn triangulation_matches_cubical() {
        for g in [Digraph::cycle(3), Digraph::cycle(4), box_product(&i(1), &i(1)), i(3)] {
            let x = nerve(g, 3);
            let a = cubical_homology(&x, 100_000).unwrap();
            let b = simplicial_homology(&x, 100_000).unwrap();
            assert_eq!(a.reliable(), b.reliable());
        }
        let sq = nerve(box_product(&i(1), &i(1)), 2);
        let t = triangulate(&sq).unwrap();
        // identity, transpose, and the two squares folded onto one path
        let squares = sq.nondegenerate_cubes(2).len();
        assert_eq!(squares, 4);
        assert_eq!(t.simplices[2].len(), 2 * squares);
    }

    #[test]
    fn induced_maps() {
        let g = Arc::new(Digraph::cycle(3));
        let x = nerve((*g).clone(), 2);
        let id = induced_homology_map(&CubicalMap::identity(&x), &x, &x, 1).unwrap();
        assert_eq!(id.matrix, vec![vec![1]]);
        assert!(id.is_iso);
        let phi = crate::digraph::DigraphMap::constant(g.clone(), g.clone(), 0);
        let f = crate::nerve::nerve_functor_map(&phi, &x, &x).unwrap();
        let c = induced_homology_map(&f, &x, &x, 1).unwrap();
        assert_eq!(c.matrix, vec![vec![0]]);
        assert!(!c.is_iso);
        let h0 = induced_homology_map(&f, &x, &x, 0).unwrap();
        assert!(h0.is_iso);
    }

    #[test]
    fn pi1_examples() {
        let p = pi1_presentation(&nerve(Digraph::cycle(3), 2), 0).unwrap().simplify(1000);
        assert_eq!(p.generators.len(), 1);
        assert!(p.relators.is_empty());
        assert_eq!(p.abelianization().unwrap(), HomologyGroup { rank: 1, torsion: vec![] });
        let sq = pi1_presentation(&nerve(box_product(&i(1), &i(1)), 2), 0).unwrap();
        assert_eq!(sq.generators.len(), 1);
        assert!(!sq.relators.is_empty());
        let s = sq.simplify(1000);
        assert!(s.generators.is_empty() && s.relators.is_empty());
        assert!(pi1_presentation(&nerve(Digraph::discrete(2), 2), 0).is_err());
    }

    #[test]
    fn tietze_elimination() {
        let p = GroupPresentation {
            generators: vec!["a".into(), "b".into()],
            relators: vec![vec![(0, 1), (1, 1), (0, -1), (1, -1)], vec![(0, 1), (0, 1), (1, -1)]],
        };
        // b = a², so the commutator becomes trivial and ℤ remains
        let s = p.simplify(100);
        assert_eq!(s.generators.len(), 1);
        assert!(s.relators.is_empty());
        assert_eq!(p.abelianization().unwrap(), HomologyGroup { rank: 1, torsion: vec![] });
    }
}
