//! Exact sparse linear algebra over the rationals.
//!
//! Everything downstream (ranks, kernels, projections, class coordinates)
//! goes through [`Echelon`], an incremental semi-reduced row store: every
//! stored vector has a distinct leading index and a leading coefficient of
//! one. Insertion order fixes the basis that is selected, so results are
//! reproducible across runs.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `a`, `-a` or `a/b`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Sparse vector with entries sorted by index and no stored zeros.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Rational)>,
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, (i, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", i, fmt_rational(v))?;
        }
        f.write_str("]")
    }
}

impl SparseVec {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        Self { entries: vec![(i, Rational::one())] }
    }

    /// Builds a vector from arbitrary `(index, value)` pairs, summing repeats.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(pairs: I) -> Self {
        let mut raw: Vec<(usize, Rational)> = pairs.into_iter().collect();
        raw.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, Rational)> = Vec::with_capacity(raw.len());
        for (i, v) in raw {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        Self { entries }
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Rational {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(i, _)| *i)
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scaled(&self, a: &Rational) -> Self {
        if a.is_zero() {
            return Self::new();
        }
        Self { entries: self.entries.iter().map(|(i, v)| (*i, v * a)).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect() }
    }

    /// `self += a * other`
    pub fn add_scaled(&mut self, a: &Rational, other: &SparseVec) {
        if a.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut lhs = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut rhs = other.entries.iter().peekable();
        loop {
            match (lhs.peek(), rhs.peek()) {
                (Some((i, _)), Some((j, _))) if i < j => out.push(lhs.next().unwrap()),
                (Some((i, _)), Some((j, _))) if i > j => {
                    let (j, w) = rhs.next().unwrap();
                    out.push((*j, w * a));
                }
                (Some(_), Some(_)) => {
                    let (i, v) = lhs.next().unwrap();
                    let (_, w) = rhs.next().unwrap();
                    let s = v + w * a;
                    if !s.is_zero() {
                        out.push((i, s));
                    }
                }
                (Some(_), None) => out.push(lhs.next().unwrap()),
                (None, Some(_)) => {
                    let (j, w) = rhs.next().unwrap();
                    out.push((*j, w * a));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), other);
        out
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        while let (Some((i, v)), Some((j, w))) = (a.peek(), b.peek()) {
            if i < j {
                a.next();
            } else if i > j {
                b.next();
            } else {
                acc += v * w;
                a.next();
                b.next();
            }
        }
        acc
    }

    /// Maps indices through `f`, dropping those mapped to `None`.
    pub fn reindex<F: Fn(usize) -> Option<usize>>(&self, f: F) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().filter_map(|(i, v)| f(*i).map(|j| (j, v.clone()))))
    }
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, cols: vec![SparseVec::new(); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { nrows: n, cols: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.max_index().is_none_or(|m| m < nrows)));
        Self { nrows, cols }
    }

    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, Rational)>>(
        nrows: usize,
        ncols: usize,
        triplets: I,
    ) -> Self {
        let mut buckets: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); ncols];
        for (r, c, v) in triplets {
            buckets[c].push((r, v));
        }
        Self { nrows, cols: buckets.into_iter().map(SparseVec::from_pairs).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.cols[c].get(r)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(SparseVec::is_zero)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut pairs = Vec::new();
        for (j, a) in v.iter() {
            for (i, m) in self.cols[j].iter() {
                pairs.push((i, m * a));
            }
        }
        SparseVec::from_pairs(pairs)
    }

    /// `self * other`
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), other.nrows, "dimension mismatch in compose");
        SparseMatrix { nrows: self.nrows, cols: other.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let triplets = self
            .cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (j, i, v.clone())))
            .collect::<Vec<_>>();
        SparseMatrix::from_triplets(self.ncols(), self.nrows, triplets)
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols(), other.ncols());
        SparseMatrix {
            nrows: self.nrows,
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scaled(&self, a: &Rational) -> SparseMatrix {
        SparseMatrix { nrows: self.nrows, cols: self.cols.iter().map(|c| c.scaled(a)).collect() }
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[SparseMatrix]) -> SparseMatrix {
        let ncols = blocks.first().map_or(0, |b| b.ncols());
        let mut nrows = 0;
        let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); ncols];
        for b in blocks {
            assert_eq!(b.ncols(), ncols);
            for (j, c) in b.cols.iter().enumerate() {
                cols[j].extend(c.iter().map(|(i, v)| (i + nrows, v.clone())));
            }
            nrows += b.nrows;
        }
        SparseMatrix { nrows, cols: cols.into_iter().map(SparseVec::from_pairs).collect() }
    }

    pub fn rank(&self) -> usize {
        rank_of(self.nrows, &self.cols)
    }

    /// Kernel basis: one vector per dependent column, in column order.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut ech = Echelon::tracked(self.nrows);
        let mut out = Vec::new();
        for c in &self.cols {
            if let Insertion::Dependent(Some(rel)) = ech.insert(c.clone()) {
                out.push(rel);
            }
        }
        out
    }

    /// Indices of the columns selected greedily as a basis of the column space.
    pub fn column_basis(&self) -> Vec<usize> {
        let mut ech = Echelon::new(self.nrows);
        (0..self.cols.len())
            .filter(|&j| matches!(ech.insert(self.cols[j].clone()), Insertion::Independent(_)))
            .collect()
    }

    /// Some `x` with `self * x = b`, if one exists.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        let mut ech = Echelon::tracked(self.nrows);
        for c in &self.cols {
            ech.insert(c.clone());
        }
        ech.express(b)
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<Rational>> {
        let mut rows = vec![vec![Rational::zero(); self.ncols()]; self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, v) in c.iter() {
                rows[i][j] = v.clone();
            }
        }
        rows
    }
}

pub fn rank_of(dim: usize, vectors: &[SparseVec]) -> usize {
    let mut ech = Echelon::new(dim);
    vectors.iter().filter(|v| matches!(ech.insert((*v).clone()), Insertion::Independent(_))).count()
}

/// Greedy independent subset, in input order.
pub fn independent_subset(dim: usize, vectors: Vec<SparseVec>) -> Vec<SparseVec> {
    let mut ech = Echelon::new(dim);
    vectors
        .into_iter()
        .filter(|v| matches!(ech.insert(v.clone()), Insertion::Independent(_)))
        .collect()
}

/// `dim(span(a) ∩ span(b))` for independent families `a` and `b`.
pub fn intersection_dim(dim: usize, a: &[SparseVec], b: &[SparseVec]) -> usize {
    let all: Vec<SparseVec> = a.iter().chain(b).cloned().collect();
    a.len() + b.len() - rank_of(dim, &all)
}

/// Basis of `span(a) ∩ span(b)` for independent families `a` and `b`.
pub fn intersection_basis(dim: usize, a: &[SparseVec], b: &[SparseVec]) -> Vec<SparseVec> {
    let mut ech = Echelon::tracked(dim);
    for v in a {
        ech.insert(v.clone());
    }
    let mut out = Vec::new();
    for v in b {
        // relation: sum_i x_i a_i + sum_j y_j b_j = 0, read off the `a` part.
        if let Insertion::Dependent(Some(rel)) = ech.insert(v.clone()) {
            let mut w = SparseVec::new();
            for (k, x) in rel.iter() {
                if k < a.len() {
                    w.add_scaled(x, &a[k]);
                }
            }
            out.push(w);
        }
    }
    independent_subset(dim, out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insertion {
    /// Stored with the given leading index.
    Independent(usize),
    /// Linearly dependent on earlier insertions. With tracking enabled this
    /// carries the relation `sum_k r_k * input_k = 0`, whose coefficient on
    /// the new input is one.
    Dependent(Option<SparseVec>),
}

/// Incremental exact elimination.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<usize>,
    combos: Option<Vec<SparseVec>>,
    inserted: usize,
}

const NO_PIVOT: usize = usize::MAX;

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new(), pivot_row: vec![NO_PIVOT; dim], combos: None, inserted: 0 }
    }

    /// Also records, for every stored row, which combination of inputs produced it.
    pub fn tracked(dim: usize) -> Self {
        Self { combos: Some(Vec::new()), ..Self::new(dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    fn reduce(&self, mut v: SparseVec, mut combo: Option<SparseVec>) -> (SparseVec, Option<SparseVec>) {
        while let Some((i, a)) = v.leading() {
            let r = self.pivot_row[i];
            if r == NO_PIVOT {
                break;
            }
            let a = -a.clone();
            v.add_scaled(&a, &self.rows[r]);
            if let (Some(c), Some(combos)) = (combo.as_mut(), self.combos.as_ref()) {
                c.add_scaled(&a, &combos[r]);
            }
        }
        (v, combo)
    }

    pub fn insert(&mut self, v: SparseVec) -> Insertion {
        debug_assert!(v.max_index().is_none_or(|m| m < self.dim));
        let ordinal = self.inserted;
        self.inserted += 1;
        let combo = self.combos.as_ref().map(|_| SparseVec::unit(ordinal));
        let (v, combo) = self.reduce(v, combo);
        match v.leading() {
            None => Insertion::Dependent(combo),
            Some((i, a)) => {
                let inv = a.recip();
                self.pivot_row[i] = self.rows.len();
                self.rows.push(v.scaled(&inv));
                if let (Some(combos), Some(c)) = (self.combos.as_mut(), combo) {
                    combos.push(c.scaled(&inv));
                }
                Insertion::Independent(i)
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone(), None).0.is_zero()
    }

    /// Coefficients over input ordinals expressing `v`, if `v` lies in the span.
    /// Requires tracking.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.combos.is_some(), "express requires a tracked echelon");
        let (res, combo) = self.reduce(v.clone(), Some(SparseVec::new()));
        if res.is_zero() {
            combo.map(|c| c.neg())
        } else {
            None
        }
    }
}

/// Dense rational Gram matrix solve `G x = b` for positive-definite `G`.
pub fn solve_dense(g: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = g.len();
    let mut a: Vec<Vec<Rational>> = g
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for k in col..=n {
            a[col][k] = &a[col][k] * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..=n {
                    let t = &a[col][k] * &f;
                    a[r][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

pub fn abs_max(v: &SparseVec) -> Rational {
    v.iter().map(|(_, x)| x.abs()).fold(Rational::zero(), |m, x| if x > m { x } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(pairs: &[(usize, i64)]) -> SparseVec {
        SparseVec::from_pairs(pairs.iter().map(|&(i, x)| (i, int(x))))
    }

    #[test]
    fn add_scaled_merges_and_cancels() {
        let mut a = v(&[(0, 1), (2, 3)]);
        a.add_scaled(&int(-1), &v(&[(0, 1), (1, 5)]));
        assert_eq!(a, v(&[(1, -5), (2, 3)]));
    }

    #[test]
    fn rank_kernel_and_solve() {
        // columns: e0, e1, e0+e1
        let m = SparseMatrix::from_columns(2, vec![v(&[(0, 1)]), v(&[(1, 1)]), v(&[(0, 1), (1, 1)])]);
        assert_eq!(m.rank(), 2);
        let ker = m.kernel();
        assert_eq!(ker.len(), 1);
        assert!(m.apply(&ker[0]).is_zero());
        let x = m.solve(&v(&[(0, 2), (1, -3)])).unwrap();
        assert_eq!(m.apply(&x), v(&[(0, 2), (1, -3)]));
        assert_eq!(m.column_basis(), vec![0, 1]);
    }

    #[test]
    fn solve_reports_inconsistency() {
        let m = SparseMatrix::from_columns(2, vec![v(&[(0, 1), (1, 1)])]);
        assert!(m.solve(&v(&[(0, 1)])).is_none());
    }

    #[test]
    fn intersection_of_planes() {
        let a = vec![v(&[(0, 1)]), v(&[(1, 1)])];
        let b = vec![v(&[(1, 1)]), v(&[(2, 1)])];
        assert_eq!(intersection_dim(3, &a, &b), 1);
        let basis = intersection_basis(3, &a, &b);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].indices().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn rational_round_trip() {
        for s in ["0", "-3", "7/2", "-1/3"] {
            assert_eq!(fmt_rational(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_none());
    }

    #[test]
    fn dense_solve() {
        let g = vec![vec![int(2), int(1)], vec![int(1), int(2)]];
        let x = solve_dense(&g, &[int(3), int(3)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
    }
}
