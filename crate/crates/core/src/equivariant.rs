//! Invariant and coinvariant subcomplexes of a finite action, the comparison
//! map `Φ: H(Ω^G) ⊕ H(Ω_G) -> H(Ω)` and the finite-group exact sequence.

use serde::Serialize;

use crate::action::CochainAction;
use crate::cohomology::{Cohomology, ExactTriple, SequenceReport};
use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::linalg::{fmt_rational, frac, intersection_dim, SparseMatrix, SparseVec};
use crate::report::{all_passed, Check};

pub fn invariant_cohomology(k: &CellComplex, a: &CochainAction) -> Result<Vec<usize>> {
    a.order().ok_or(Error::InfiniteGroup)?;
    Ok(Cohomology::new(k, a.invariant_subspace(k)).ranks())
}

pub fn coinvariant_cohomology(k: &CellComplex, a: &CochainAction) -> Result<Vec<usize>> {
    a.order().ok_or(Error::InfiniteGroup)?;
    Ok(Cohomology::new(k, a.coinvariant_subspace(k)).ranks())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiDegree {
    pub degree: usize,
    pub invariant_rank: usize,
    pub coinvariant_rank: usize,
    pub betti: usize,
    /// Columns: invariant classes, then coinvariant classes; rows: `H^p` basis.
    pub matrix: Vec<Vec<String>>,
    pub invariant_image: usize,
    pub coinvariant_image: usize,
    pub fixed_classes: usize,
    pub coinvariant_classes: usize,
    pub bijective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiReport {
    pub title: String,
    pub degrees: Vec<PhiDegree>,
    pub checks: Vec<Check>,
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Every coboundary of `sub` has zero class in `full`, each certified by a primitive.
fn coboundaries_vanish(sub: &Cohomology<'_>, full: &Cohomology<'_>, p: usize) -> (bool, usize) {
    if p == 0 {
        return (true, 0);
    }
    let k = sub.complex();
    let mut n = 0;
    for s in sub.subspace().basis(p - 1) {
        let b = k.apply_d(p - 1, s);
        match full.class_of(p, &b) {
            Some(w) if w.is_zero() && full.verify_witness(p, &b, &w) => n += 1,
            _ => return (false, n),
        }
    }
    (true, n)
}

pub fn phi_map(k: &CellComplex, a: &CochainAction) -> Result<PhiReport> {
    a.order().ok_or(Error::InfiniteGroup)?;
    let full = Cohomology::full(k);
    let inv = Cohomology::new(k, a.invariant_subspace(k));
    let coinv = Cohomology::new(k, a.coinvariant_subspace(k));
    let mut degrees = Vec::new();
    let mut checks = Vec::new();
    for p in 0..=k.dim() {
        let b = full.rank(p);
        let mi = inv.induced_map(p, &full, p, |z| z.clone()).expect("invariant cocycles are cocycles");
        let mc = coinv.induced_map(p, &full, p, |z| z.clone()).expect("coinvariant cocycles are cocycles");
        let cols: Vec<SparseVec> = mi.columns().iter().chain(mc.columns()).cloned().collect();
        let phi = SparseMatrix::from_columns(b, cols);
        let rank = phi.rank();
        let bijective = rank == b && phi.ncols() == b;

        let (wi, ni) = coboundaries_vanish(&inv, &full, p);
        let (wc, nc) = coboundaries_vanish(&coinv, &full, p);
        checks.push(Check::new(
            format!("phi-well-defined-{p}"),
            wi && wc,
            format!("{} coboundary generators certified by primitives", ni + nc),
        ));
        checks.push(Check::new(format!("phi-bijective-{p}"), bijective, format!("rank {rank}, {} + {} -> {b}", inv.rank(p), coinv.rank(p))));

        let induced = a.induced_cohomology_action(&full, p)?;
        let inv_image: Vec<SparseVec> = mi.column_basis().into_iter().map(|j| mi.col(j).clone()).collect();
        let coinv_image: Vec<SparseVec> = mc.column_basis().into_iter().map(|j| mc.col(j).clone()).collect();
        let fixed_match = inv_image.len() == induced.invariant_dim
            && intersection_dim(b, &inv_image, &induced.invariant_classes) == induced.invariant_dim;
        let coinv_match = coinv_image.len() == induced.coinvariant_dim
            && intersection_dim(b, &coinv_image, &induced.coinvariant_classes) == induced.coinvariant_dim;
        checks.push(Check::new(
            format!("invariant-image-is-fixed-classes-{p}"),
            fixed_match,
            format!("image dim {}, fixed classes {}", inv_image.len(), induced.invariant_dim),
        ));
        checks.push(Check::new(
            format!("coinvariant-image-is-coinvariant-classes-{p}"),
            coinv_match,
            format!("image dim {}, coinvariant classes {}", coinv_image.len(), induced.coinvariant_dim),
        ));
        let meet = intersection_dim(b, &inv_image, &coinv_image);
        checks.push(Check::new(
            format!("images-complementary-{p}"),
            meet == 0 && inv_image.len() + coinv_image.len() == b,
            format!("intersection {meet}"),
        ));

        degrees.push(PhiDegree {
            degree: p,
            invariant_rank: inv.rank(p),
            coinvariant_rank: coinv.rank(p),
            betti: b,
            matrix: phi.to_dense_rows().iter().map(|r| r.iter().map(fmt_rational).collect()).collect(),
            invariant_image: inv_image.len(),
            coinvariant_image: coinv_image.len(),
            fixed_classes: induced.invariant_dim,
            coinvariant_classes: induced.coinvariant_dim,
            bijective,
        });
    }
    Ok(PhiReport { title: format!("{}: comparison map", a.name()), degrees, checks })
}

/// `0 -> Ω_G -> Ω -> Ω^G -> 0` with `m = sum_g g` and section `q -> q / |G|`.
pub fn finite_exact_sequence(k: &CellComplex, a: &CochainAction) -> Result<SequenceReport> {
    let order = a.order().ok_or(Error::InfiniteGroup)?;
    let mut projection = Vec::new();
    let mut section = Vec::new();
    for p in 0..=k.dim() {
        projection.push(a.average_matrix(p)?.scaled(&frac(order as i64, 1)));
        section.push(SparseMatrix::identity(k.num_cells(p)).scaled(&frac(1, order as i64)));
    }
    let triple = ExactTriple {
        sub: Cohomology::new(k, a.coinvariant_subspace(k)),
        middle: Cohomology::full(k),
        quotient: Cohomology::new(k, a.invariant_subspace(k)),
        projection,
        section,
    };
    let mut report =
        SequenceReport::from_triple(format!("{}: finite-group exact sequence", a.name()), ["coinvariant", "full", "invariant"], &triple);
    for d in &report.degrees {
        report.checks.push(Check::new(
            format!("rank-sum-{}", d.degree),
            d.sub_rank + d.quotient_rank == d.middle_rank,
            format!("{} + {} vs b = {}", d.quotient_rank, d.sub_rank, d.middle_rank),
        ));
    }
    Ok(report)
}
