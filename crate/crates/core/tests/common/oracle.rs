//! Brute-force dense Gauss-Jordan elimination over the rationals. Shares no code
//! with the library's sparse echelon; it reads complexes only through their
//! incidence triples and actions only through their signed-permutation images.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use coinvariant::action::{CochainAction, SignedPermutation};
use coinvariant::complex::{CellComplex, GradedSubspace};
use coinvariant::linalg::SparseVec;

pub type Q = BigRational;
pub type Dense = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn rank(mut rows: Dense) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, pivot);
        let inv = Q::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let sub = &f * &rows[r][j];
                    rows[i][j] -= sub;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

pub fn dense(v: &SparseVec, n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n];
    for (i, x) in v.iter() {
        out[i] = x.clone();
    }
    out
}

/// `d_p` as `n_{p+1} x n_p` rows, from the incidence triples.
pub fn coboundary(k: &CellComplex, p: usize) -> Dense {
    let mut m = vec![vec![Q::zero(); k.num_cells(p)]; k.num_cells(p + 1)];
    for (face, coface, c) in k.incidence(p) {
        m[coface][face] += q(c);
    }
    m
}

pub fn apply(m: &Dense, v: &[Q]) -> Vec<Q> {
    m.iter().map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b)).collect()
}

pub fn betti(k: &CellComplex) -> Vec<usize> {
    let top = k.dim();
    let ranks: Vec<usize> = (0..top).map(|p| rank(coboundary(k, p))).collect();
    (0..=top)
        .map(|p| {
            let out = if p < top { ranks[p] } else { 0 };
            let inc = if p > 0 { ranks[p - 1] } else { 0 };
            k.num_cells(p) - out - inc
        })
        .collect()
}

/// Cohomology ranks of a graded subspace given by spanning vectors, assumed d-closed.
pub fn subspace_cohomology(k: &CellComplex, spans: &[Vec<Vec<Q>>]) -> Vec<usize> {
    let top = k.dim();
    (0..=top)
        .map(|p| {
            let dim = rank(spans[p].clone());
            let image = |vs: &[Vec<Q>], p: usize| -> usize {
                if p >= top || vs.is_empty() {
                    return 0;
                }
                let d = coboundary(k, p);
                rank(vs.iter().map(|v| apply(&d, v)).collect())
            };
            let cocycles = dim - image(&spans[p], p);
            let boundaries = if p > 0 { image(&spans[p - 1], p - 1) } else { 0 };
            cocycles - boundaries
        })
        .collect()
}

pub fn spans(k: &CellComplex, s: &GradedSubspace) -> Vec<Vec<Vec<Q>>> {
    (0..=k.dim()).map(|p| s.basis(p).iter().map(|v| dense(v, k.num_cells(p))).collect()).collect()
}

pub fn perm_matrix(g: &SignedPermutation) -> Dense {
    let n = g.len();
    let mut m = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        let (j, s) = g.image(i);
        m[j][i] = q(s as i64);
    }
    m
}

/// Fixed vectors of every generator: `n - rank [g_1 - I; g_2 - I; ...]`.
pub fn invariant_dim(a: &CochainAction, p: usize, n: usize) -> usize {
    let mut rows = Vec::new();
    for g in a.generators() {
        let mut m = perm_matrix(&g.maps[p]);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= Q::one();
        }
        rows.extend(m);
    }
    if rows.is_empty() { n } else { n - rank(rows) }
}

/// `v - g v` over all generators and basis vectors.
pub fn coinvariant_spanning(a: &CochainAction, p: usize, n: usize) -> Vec<Vec<Q>> {
    let mut out = Vec::new();
    for g in a.generators() {
        let m = perm_matrix(&g.maps[p]);
        for i in 0..n {
            let mut v: Vec<Q> = m.iter().map(|row| -row[i].clone()).collect();
            v[i] += Q::one();
            out.push(v);
        }
    }
    out
}

pub fn invariant_spanning(a: &CochainAction, p: usize, n: usize) -> Vec<Vec<Q>> {
    // kernel of the stacked g - I by elimination
    let mut rows = Vec::new();
    for g in a.generators() {
        let mut m = perm_matrix(&g.maps[p]);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= Q::one();
        }
        rows.extend(m);
    }
    kernel(rows, n)
}

pub fn kernel(mut rows: Dense, n: usize) -> Vec<Vec<Q>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, pivot);
        let inv = Q::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..n {
                    let sub = &f * &rows[r][j];
                    rows[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::zero(); n];
            v[free] = Q::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[row][free].clone();
            }
            v
        })
        .collect()
}
