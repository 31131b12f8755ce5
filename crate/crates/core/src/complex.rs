//! Finite cell complexes with integer coboundaries, cochains and graded subspaces.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{independent_subset, int, rank_of, Echelon, Rational, SparseMatrix, SparseVec};

pub type CellId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Cells are simplices oriented by increasing vertex id.
    Simplicial,
    /// Cells are cubes oriented by their sorted axis list at the lowest corner.
    Cubical,
    /// Incidence signs supplied by the author of the complex.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CellShape {
    Simplex(Vec<usize>),
    Cube { corner: Vec<i64>, axes: Vec<usize> },
    /// A translate of a fundamental-domain cell of a periodic complex.
    Lift { cell: usize, translation: Vec<i64> },
    Abstract,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: CellId,
    pub degree: usize,
    pub shape: CellShape,
}

/// Graded cells plus the coboundary `d_p: C^p -> C^{p+1}` in cell coordinates.
///
/// Within a degree, cells are addressed by their position; positions follow
/// increasing cell id.
#[derive(Clone, Debug)]
pub struct CellComplex {
    name: String,
    orientation: Orientation,
    cells: Vec<Vec<Cell>>,
    position: HashMap<CellId, (usize, usize)>,
    coboundary: Vec<SparseMatrix>,
}

impl CellComplex {
    /// Validates and assembles a complex. `incidence` lists `(face, coface, coefficient)`
    /// by cell id; repeated pairs are summed.
    pub fn new(
        name: impl Into<String>,
        orientation: Orientation,
        cells: Vec<Cell>,
        incidence: &[(CellId, CellId, i64)],
    ) -> Result<Self> {
        let name = name.into();
        let top = cells.iter().map(|c| c.degree).max().unwrap_or(0);
        let mut by_degree: Vec<Vec<Cell>> = vec![Vec::new(); top + 1];
        let mut seen = BTreeSet::new();
        for c in cells {
            if !seen.insert(c.id) {
                return Err(Error::InvalidComplex(format!("duplicate cell id {}", c.id)));
            }
            by_degree[c.degree].push(c);
        }
        for cs in &mut by_degree {
            cs.sort_by_key(|c| c.id);
        }
        let mut position = HashMap::new();
        for (p, cs) in by_degree.iter().enumerate() {
            for (k, c) in cs.iter().enumerate() {
                position.insert(c.id, (p, k));
            }
        }
        let mut sums: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
        for &(face, coface, coeff) in incidence {
            let &(pf, kf) = position
                .get(&face)
                .ok_or_else(|| Error::InvalidComplex(format!("incidence references unknown cell {face}")))?;
            let &(pc, kc) = position
                .get(&coface)
                .ok_or_else(|| Error::InvalidComplex(format!("incidence references unknown cell {coface}")))?;
            if pc != pf + 1 {
                return Err(Error::InvalidComplex(format!(
                    "incidence {face} -> {coface} joins degrees {pf} and {pc}"
                )));
            }
            *sums.entry((pf, kf, kc)).or_insert(0) += coeff;
        }
        if orientation != Orientation::Explicit {
            if let Some(((p, kf, kc), c)) = sums.iter().find(|(_, c)| c.abs() > 1) {
                return Err(Error::InvalidComplex(format!(
                    "incidence coefficient {c} between cells {} and {} is outside {{-1, 0, 1}}",
                    by_degree[*p][*kf].id,
                    by_degree[p + 1][*kc].id
                )));
            }
        }
        let coboundary = (0..top)
            .map(|p| {
                SparseMatrix::from_triplets(
                    by_degree[p + 1].len(),
                    by_degree[p].len(),
                    sums.iter()
                        .filter(|((q, _, _), c)| *q == p && **c != 0)
                        .map(|((_, kf, kc), c)| (*kc, *kf, int(*c))),
                )
            })
            .collect::<Vec<_>>();
        let complex = Self { name, orientation, cells: by_degree, position, coboundary };
        for p in 0..top.saturating_sub(1) {
            if !complex.coboundary[p + 1].compose(&complex.coboundary[p]).is_zero() {
                return Err(Error::InvalidComplex(format!("d∘d ≠ 0 from degree {p}")));
            }
        }
        Ok(complex)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Top degree.
    pub fn dim(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn num_cells(&self, p: usize) -> usize {
        self.cells.get(p).map_or(0, Vec::len)
    }

    pub fn total_cells(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn cells(&self, p: usize) -> &[Cell] {
        self.cells.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn cell(&self, p: usize, k: usize) -> &Cell {
        &self.cells[p][k]
    }

    /// `(degree, position)` of a cell id.
    pub fn locate(&self, id: CellId) -> Option<(usize, usize)> {
        self.position.get(&id).copied()
    }

    pub fn find_shape(&self, p: usize, shape: &CellShape) -> Option<usize> {
        self.cells(p).iter().position(|c| &c.shape == shape)
    }

    /// `d_p` as a `|C^{p+1}| x |C^p|` matrix. Requires `p < dim`.
    pub fn coboundary(&self, p: usize) -> Result<&SparseMatrix> {
        self.coboundary.get(p).ok_or(Error::DegreeOutOfRange { degree: p, max: self.dim() })
    }

    /// `d_p`, or the zero map at and beyond the top degree.
    pub fn d(&self, p: usize) -> SparseMatrix {
        match self.coboundary.get(p) {
            Some(m) => m.clone(),
            None => SparseMatrix::zeros(self.num_cells(p + 1), self.num_cells(p)),
        }
    }

    pub fn apply_d(&self, p: usize, v: &SparseVec) -> SparseVec {
        match self.coboundary.get(p) {
            Some(m) => m.apply(v),
            None => SparseVec::new(),
        }
    }

    /// Integer incidence triples `(face position, coface position, coefficient)` of `d_p`.
    pub fn incidence(&self, p: usize) -> Vec<(usize, usize, i64)> {
        let Some(m) = self.coboundary.get(p) else { return Vec::new() };
        let mut out = Vec::new();
        for j in 0..m.ncols() {
            for (i, v) in m.col(j).iter() {
                let c: i64 = v.numer().try_into().expect("incidence coefficients are small integers");
                out.push((j, i, c));
            }
        }
        out
    }

    /// Faces of the `k`-th `p`-cell with nonzero incidence.
    pub fn faces(&self, p: usize, k: usize) -> Vec<usize> {
        if p == 0 {
            return Vec::new();
        }
        let m = &self.coboundary[p - 1];
        (0..m.ncols()).filter(|&j| !m.get(k, j).is_zero()).collect()
    }

    pub fn full_subspace(&self) -> GradedSubspace {
        GradedSubspace {
            basis: (0..=self.dim()).map(|p| (0..self.num_cells(p)).map(SparseVec::unit).collect()).collect(),
            closed: true,
        }
    }

    pub fn cochain(&self, p: usize, values: SparseVec) -> Result<Cochain> {
        Cochain::new(self, p, values)
    }

    /// Rational Betti numbers.
    pub fn betti_numbers(&self) -> Vec<usize> {
        (0..=self.dim()).map(|p| cohomology_rank(self, p, None).expect("full space is closed")).collect()
    }

    /// Number of connected components of the 1-skeleton.
    pub fn components(&self) -> usize {
        cohomology_rank(self, 0, None).expect("full space is closed")
    }
}

/// A `p`-cochain stored by cell position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub values: SparseVec,
}

impl Cochain {
    pub fn new(k: &CellComplex, p: usize, values: SparseVec) -> Result<Self> {
        if p > k.dim() {
            return Err(Error::DegreeOutOfRange { degree: p, max: k.dim() });
        }
        if values.max_index().is_some_and(|m| m >= k.num_cells(p)) {
            return Err(Error::DimensionMismatch(format!(
                "cochain references position {} but degree {p} has {} cells",
                values.max_index().unwrap(),
                k.num_cells(p)
            )));
        }
        Ok(Self { degree: p, values })
    }

    /// Builds a cochain from `(cell id, value)` pairs; every id has to be a `p`-cell.
    pub fn from_ids(k: &CellComplex, p: usize, pairs: &[(CellId, Rational)]) -> Result<Self> {
        let mut entries = Vec::new();
        for (id, v) in pairs {
            match k.locate(*id) {
                Some((q, pos)) if q == p => entries.push((pos, v.clone())),
                Some((q, _)) => {
                    return Err(Error::DimensionMismatch(format!("cell {id} has degree {q}, expected {p}")))
                }
                None => return Err(Error::InvalidComplex(format!("unknown cell {id}"))),
            }
        }
        Self::new(k, p, SparseVec::from_pairs(entries))
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_zero()
    }
}

/// Linearly independent spanning cochains per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSubspace {
    basis: Vec<Vec<SparseVec>>,
    closed: bool,
}

impl GradedSubspace {
    /// Extracts an independent subset of each degree's spanning family (input
    /// order decides which vectors survive) and records whether `d` maps each
    /// degree into the next.
    pub fn from_spanning(k: &CellComplex, spanning: Vec<Vec<SparseVec>>) -> Self {
        let basis: Vec<Vec<SparseVec>> = spanning
            .into_iter()
            .enumerate()
            .map(|(p, vs)| independent_subset(k.num_cells(p), vs))
            .collect();
        let closed = differential_closed(k, &basis);
        Self { basis, closed }
    }

    pub fn basis(&self, p: usize) -> &[SparseVec] {
        self.basis.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn dim(&self, p: usize) -> usize {
        self.basis(p).len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn top(&self) -> usize {
        self.basis.len().saturating_sub(1)
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn contains(&self, k: &CellComplex, p: usize, v: &SparseVec) -> bool {
        self.membership(k, p).contains(v)
    }

    /// Reduced basis of degree `p`, for repeated membership tests.
    pub fn membership(&self, k: &CellComplex, p: usize) -> Echelon {
        let mut ech = Echelon::new(k.num_cells(p));
        for b in self.basis(p) {
            ech.insert(b.clone());
        }
        ech
    }

    /// `self ⊆ other`, degreewise.
    pub fn is_subspace_of(&self, k: &CellComplex, other: &GradedSubspace) -> bool {
        (0..self.basis.len()).all(|p| {
            let mut ech = Echelon::new(k.num_cells(p));
            for b in other.basis(p) {
                ech.insert(b.clone());
            }
            self.basis(p).iter().all(|v| ech.contains(v))
        })
    }
}

fn differential_closed(k: &CellComplex, basis: &[Vec<SparseVec>]) -> bool {
    for p in 0..basis.len() {
        let images: Vec<SparseVec> = basis[p].iter().map(|v| k.apply_d(p, v)).filter(|v| !v.is_zero()).collect();
        if images.is_empty() {
            continue;
        }
        let Some(next) = basis.get(p + 1) else { return false };
        let mut ech = Echelon::new(k.num_cells(p + 1));
        for b in next {
            ech.insert(b.clone());
        }
        if !images.iter().all(|v| ech.contains(v)) {
            return false;
        }
    }
    true
}

/// `dim(ker d_p ∩ S_p) - dim d_{p-1}(S_{p-1})`; the Betti number when `s` is `None`.
pub fn cohomology_rank(k: &CellComplex, p: usize, s: Option<&GradedSubspace>) -> Result<usize> {
    if p > k.dim() {
        return Err(Error::DegreeOutOfRange { degree: p, max: k.dim() });
    }
    let full;
    let s = match s {
        Some(s) => {
            if !s.is_closed() {
                return Err(Error::NotDifferentialClosed);
            }
            s
        }
        None => {
            full = k.full_subspace();
            &full
        }
    };
    let image_rank = |q: usize| -> usize {
        let images: Vec<SparseVec> = s.basis(q).iter().map(|v| k.apply_d(q, v)).collect();
        rank_of(k.num_cells(q + 1), &images)
    };
    let outgoing = image_rank(p);
    let incoming = if p == 0 { 0 } else { image_rank(p - 1) };
    Ok(s.dim(p) - outgoing - incoming)
}

/// Cochains vanishing on a closed collar of boundary cells.
pub fn compact_support_subspace(k: &CellComplex, boundary_cells: &BTreeSet<CellId>) -> Result<GradedSubspace> {
    let mut marked: Vec<Vec<bool>> = (0..=k.dim()).map(|p| vec![false; k.num_cells(p)]).collect();
    for id in boundary_cells {
        let (p, pos) = k.locate(*id).ok_or_else(|| Error::InvalidComplex(format!("unknown cell {id}")))?;
        marked[p][pos] = true;
    }
    for p in 1..=k.dim() {
        for pos in 0..k.num_cells(p) {
            if !marked[p][pos] {
                continue;
            }
            if let Some(f) = k.faces(p, pos).into_iter().find(|&f| !marked[p - 1][f]) {
                return Err(Error::NotACollar { cell: k.cell(p, pos).id, face: k.cell(p - 1, f).id });
            }
        }
    }
    let basis = marked
        .iter()
        .map(|m| m.iter().enumerate().filter(|(_, b)| !**b).map(|(i, _)| SparseVec::unit(i)).collect())
        .collect();
    Ok(GradedSubspace { basis, closed: true })
}

/// Every pair of consecutive coboundaries composes to zero.
pub fn check_d_squared(k: &CellComplex) -> bool {
    (0..k.dim().saturating_sub(1)).all(|p| k.d(p + 1).compose(&k.d(p)).is_zero())
}

/// Cohomology of an arbitrary subspace family needs closure; used by tests and reports.
pub fn ranks(k: &CellComplex, s: Option<&GradedSubspace>) -> Result<Vec<usize>> {
    (0..=k.dim()).map(|p| cohomology_rank(k, p, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    #[test]
    fn single_edge_coboundary_sign() {
        let k = builders::path(2);
        let d0 = k.coboundary(0).unwrap();
        // indicator of v0 maps to -1 on the edge
        assert_eq!(d0.apply(&SparseVec::unit(0)), SparseVec::from_pairs([(0, int(-1))]));
        assert!(matches!(k.coboundary(1), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn hexagon_and_octahedron_ranks() {
        let hex = builders::polygon(6);
        assert_eq!(hex.coboundary(0).unwrap().rank(), 5);
        assert_eq!(hex.betti_numbers(), vec![1, 1]);
        let oct = builders::octahedron();
        assert_eq!(oct.num_cells(1), 12);
        assert_eq!(oct.coboundary(1).unwrap().rank(), 7);
        assert_eq!(oct.coboundary(0).unwrap().rank(), 5);
        assert_eq!(oct.betti_numbers(), vec![1, 0, 1]);
    }

    #[test]
    fn cubical_torus_betti() {
        let t = builders::cubical_torus(&[3, 3]);
        assert!(check_d_squared(&t));
        assert_eq!(t.betti_numbers(), vec![1, 2, 1]);
    }

    #[test]
    fn empty_collar_is_full_space() {
        let hex = builders::polygon(6);
        let s = compact_support_subspace(&hex, &BTreeSet::new()).unwrap();
        assert_eq!(s.dims(), vec![6, 6]);
        assert_eq!(ranks(&hex, Some(&s)).unwrap(), vec![1, 1]);
    }

    #[test]
    fn path_with_endpoint_collar() {
        let k = builders::path(3);
        let end_ids: BTreeSet<CellId> = [k.cell(0, 0).id, k.cell(0, 2).id].into();
        let s = compact_support_subspace(&k, &end_ids).unwrap();
        assert_eq!(s.basis(0), &[SparseVec::unit(1)]);
        assert_eq!(s.dim(1), 2);
        // compactly supported cohomology of an open interval
        assert_eq!(ranks(&k, Some(&s)).unwrap(), vec![0, 1]);

        // endpoints together with their edges do not form a closed collar
        let with_edges: BTreeSet<CellId> =
            [k.cell(0, 0).id, k.cell(0, 2).id, k.cell(1, 0).id, k.cell(1, 1).id].into();
        assert!(matches!(compact_support_subspace(&k, &with_edges), Err(Error::NotACollar { .. })));
    }

    #[test]
    fn non_closed_subspace_is_rejected() {
        let k = builders::path(2);
        let s = GradedSubspace::from_spanning(&k, vec![vec![SparseVec::unit(0)], vec![]]);
        assert!(!s.is_closed());
        assert!(matches!(cohomology_rank(&k, 0, Some(&s)), Err(Error::NotDifferentialClosed)));
    }

    #[test]
    fn bad_d_squared_is_rejected() {
        let cells = vec![
            Cell { id: 0, degree: 0, shape: CellShape::Abstract },
            Cell { id: 1, degree: 1, shape: CellShape::Abstract },
            Cell { id: 2, degree: 2, shape: CellShape::Abstract },
        ];
        let err = CellComplex::new("bad", Orientation::Explicit, cells, &[(0, 1, 1), (1, 2, 1)]);
        assert!(matches!(err, Err(Error::InvalidComplex(_))));
    }
}
