//! Diagonal inner products on cochains, the adjoint codifferential, the
//! Laplacian, harmonic cochains and the orthogonal Hodge decomposition.

use num_traits::{One, Zero};

use crate::action::CochainAction;
use crate::complex::{cohomology_rank, CellComplex};
use crate::error::{Error, Result};
use crate::linalg::{independent_subset, intersection_basis, intersection_dim, solve_dense, Echelon, Rational, SparseMatrix, SparseVec};
use crate::report::{Check, CrossPairing, DecompositionReport, Summand};

/// `<a, b>_p = sum_i w_i a_i b_i` with positive weights per cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProduct {
    weights: Vec<Vec<Rational>>,
}

impl InnerProduct {
    pub fn standard(k: &CellComplex) -> Self {
        Self { weights: (0..=k.dim()).map(|p| vec![Rational::one(); k.num_cells(p)]).collect() }
    }

    pub fn diagonal(k: &CellComplex, weights: Vec<Vec<Rational>>) -> Result<Self> {
        if weights.len() != k.dim() + 1 || weights.iter().enumerate().any(|(p, w)| w.len() != k.num_cells(p)) {
            return Err(Error::DimensionMismatch("one weight per cell is required".into()));
        }
        for (p, ws) in weights.iter().enumerate() {
            if let Some(i) = ws.iter().position(|w| *w <= Rational::zero()) {
                return Err(Error::NonPositiveWeight { cell: k.cell(p, i).id });
            }
        }
        Ok(Self { weights })
    }

    pub fn weight(&self, p: usize, i: usize) -> &Rational {
        &self.weights[p][i]
    }

    pub fn is_standard(&self) -> bool {
        self.weights.iter().flatten().all(One::is_one)
    }

    pub fn pair(&self, p: usize, a: &SparseVec, b: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        for (i, x) in a.iter() {
            let y = b.get(i);
            if !y.is_zero() {
                acc += x * y * &self.weights[p][i];
            }
        }
        acc
    }

    fn weigh(&self, p: usize, v: &SparseVec, invert: bool) -> SparseVec {
        SparseVec::from_pairs(v.iter().map(|(i, x)| {
            let w = &self.weights[p][i];
            (i, if invert { x / w } else { x * w })
        }))
    }

    /// Every generator maps each cell to a cell of equal weight.
    pub fn preserved_by(&self, k: &CellComplex, a: &CochainAction) -> Result<()> {
        for g in a.generators() {
            for (p, m) in g.maps.iter().enumerate() {
                for i in 0..m.len() {
                    if self.weights[p][m.image(i).0] != self.weights[p][i] {
                        return Err(Error::InnerProductNotPreserved { degree: p, cell: k.cell(p, i).id });
                    }
                }
            }
        }
        Ok(())
    }
}

/// `δ_p = W_{p-1}^{-1} d_{p-1}^T W_p : C^p -> C^{p-1}`, for `1 <= p <= dim K`.
pub fn codifferential(k: &CellComplex, ip: &InnerProduct, p: usize) -> Result<SparseMatrix> {
    if p == 0 || p > k.dim() {
        return Err(Error::DegreeOutOfRange { degree: p, max: k.dim() });
    }
    let dt = k.d(p - 1).transpose();
    let cols = (0..k.num_cells(p))
        .map(|j| {
            let col = dt.col(j).scaled(ip.weight(p, j));
            ip.weigh(p - 1, &col, true)
        })
        .collect();
    Ok(SparseMatrix::from_columns(k.num_cells(p - 1), cols))
}

/// `Δ_p = δ_{p+1} d_p + d_{p-1} δ_p`
pub fn laplacian(k: &CellComplex, ip: &InnerProduct, p: usize) -> Result<SparseMatrix> {
    if p > k.dim() {
        return Err(Error::DegreeOutOfRange { degree: p, max: k.dim() });
    }
    let n = k.num_cells(p);
    let mut lap = SparseMatrix::zeros(n, n);
    if p < k.dim() {
        lap = add(&lap, &codifferential(k, ip, p + 1)?.compose(&k.d(p)));
    }
    if p > 0 {
        lap = add(&lap, &k.d(p - 1).compose(&codifferential(k, ip, p)?));
    }
    Ok(lap)
}

fn add(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let cols = a.columns().iter().zip(b.columns()).map(|(x, y)| x.add(y)).collect();
    SparseMatrix::from_columns(a.nrows(), cols)
}

/// Exact bases of `ker Δ_p`.
#[derive(Clone, Debug)]
pub struct HarmonicSpace {
    pub basis: Vec<Vec<SparseVec>>,
}

impl HarmonicSpace {
    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn degree(&self, p: usize) -> &[SparseVec] {
        &self.basis[p]
    }

    /// Invariant harmonic cochains and the span of `η - g.η`, `η - g^{-1}.η`.
    pub fn split(&self, k: &CellComplex, a: &CochainAction, p: usize) -> (Vec<SparseVec>, Vec<SparseVec>) {
        let n = k.num_cells(p);
        let inv = intersection_basis(n, &self.basis[p], &a.invariant_basis(p));
        let mut spanning = Vec::new();
        for g in a.generators() {
            let back = g.maps[p].inverse();
            for h in &self.basis[p] {
                spanning.push(h.sub(&g.maps[p].apply(h)));
                spanning.push(h.sub(&back.apply(h)));
            }
        }
        (inv, independent_subset(n, spanning))
    }
}

pub fn harmonic_space(k: &CellComplex, ip: &InnerProduct) -> HarmonicSpace {
    let basis = (0..=k.dim()).map(|p| laplacian(k, ip, p).expect("degree in range").kernel()).collect();
    HarmonicSpace { basis }
}

/// Checks for one degree: `ker Δ = ker d ∩ ker δ`, `dim ker Δ = b_p`, Δ symmetric and adjointness.
pub fn harmonic_checks(k: &CellComplex, ip: &InnerProduct, h: &HarmonicSpace, p: usize) -> Vec<Check> {
    let n = k.num_cells(p);
    let lap = laplacian(k, ip, p).expect("degree in range");
    let delta = (p > 0).then(|| codifferential(k, ip, p).expect("degree in range"));
    let ker_d = if p < k.dim() { k.d(p).kernel() } else { (0..n).map(SparseVec::unit).collect() };
    let ker_delta = match &delta {
        Some(m) => m.kernel(),
        None => (0..n).map(SparseVec::unit).collect(),
    };
    let both = intersection_basis(n, &ker_d, &ker_delta);
    let closed_coclosed = h.basis[p]
        .iter()
        .all(|v| k.apply_d(p, v).is_zero() && delta.as_ref().is_none_or(|m| m.apply(v).is_zero()));
    let mut span = Echelon::new(n);
    for v in &h.basis[p] {
        span.insert(v.clone());
    }
    let reverse = both.iter().all(|v| span.contains(v));
    let betti = cohomology_rank(k, p, None).expect("degree in range");
    let symmetric = (0..n).all(|i| {
        (0..n).all(|j| ip.pair(p, &SparseVec::unit(i), &lap.apply(&SparseVec::unit(j))) == ip.pair(p, &lap.apply(&SparseVec::unit(i)), &SparseVec::unit(j)))
    });
    let adjoint = match p < k.dim() {
        true => {
            let up = codifferential(k, ip, p + 1).expect("degree in range");
            (0..n).all(|i| {
                (0..k.num_cells(p + 1)).all(|j| {
                    let a = SparseVec::unit(i);
                    let b = SparseVec::unit(j);
                    ip.pair(p + 1, &k.apply_d(p, &a), &b) == ip.pair(p, &a, &up.apply(&b))
                })
            })
        }
        false => true,
    };
    vec![
        Check::new(format!("harmonic-closed-coclosed-{p}"), closed_coclosed, format!("{} basis vectors", h.basis[p].len())),
        Check::new(
            format!("kernel-laplacian-equals-closed-coclosed-{p}"),
            reverse && closed_coclosed && both.len() == h.basis[p].len(),
            format!("dim ker Δ = {}, dim(ker d ∩ ker δ) = {}", h.basis[p].len(), both.len()),
        ),
        Check::new(format!("harmonic-dim-equals-betti-{p}"), betti == h.basis[p].len(), format!("{} vs b = {betti}", h.basis[p].len())),
        Check::new(format!("laplacian-symmetric-{p}"), symmetric, ""),
        Check::new(format!("adjointness-{p}"), adjoint, "<dα,β> = <α,δβ> on cell bases"),
    ]
}

/// `ω = dα + δβ + η`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeParts {
    pub exact: SparseVec,
    pub coexact: SparseVec,
    pub harmonic: SparseVec,
    pub exact_potential: SparseVec,
    pub coexact_potential: SparseVec,
}

/// Orthogonal projection of `v` onto the column span of `m` by the normal equations
/// on an independent set of columns. Returns the projection and a preimage.
fn project(ip: &InnerProduct, p: usize, m: &SparseMatrix, v: &SparseVec) -> (SparseVec, SparseVec) {
    let cols = m.column_basis();
    if cols.is_empty() {
        return (SparseVec::new(), SparseVec::new());
    }
    let b: Vec<&SparseVec> = cols.iter().map(|&j| m.col(j)).collect();
    let gram: Vec<Vec<Rational>> = b.iter().map(|x| b.iter().map(|y| ip.pair(p, x, y)).collect()).collect();
    let rhs: Vec<Rational> = b.iter().map(|x| ip.pair(p, x, v)).collect();
    let x = solve_dense(&gram, &rhs).expect("Gram matrix of independent columns is positive definite");
    let mut proj = SparseVec::new();
    let mut pre = Vec::new();
    for ((col, xi), &j) in b.iter().zip(&x).zip(&cols) {
        proj.add_scaled(xi, col);
        pre.push((j, xi.clone()));
    }
    (proj, SparseVec::from_pairs(pre))
}

pub fn hodge_decompose(k: &CellComplex, ip: &InnerProduct, p: usize, w: &SparseVec) -> Result<HodgeParts> {
    if p > k.dim() {
        return Err(Error::DegreeOutOfRange { degree: p, max: k.dim() });
    }
    let (exact, exact_potential) =
        if p > 0 { project(ip, p, &k.d(p - 1), w) } else { (SparseVec::new(), SparseVec::new()) };
    let (coexact, coexact_potential) =
        if p < k.dim() { project(ip, p, &codifferential(k, ip, p + 1)?, w) } else { (SparseVec::new(), SparseVec::new()) };
    let harmonic = w.sub(&exact).sub(&coexact);
    Ok(HodgeParts { exact, coexact, harmonic, exact_potential, coexact_potential })
}

/// Reconstruction, potentials, pairwise orthogonality and harmonicity of the parts.
pub fn decomposition_checks(k: &CellComplex, ip: &InnerProduct, p: usize, w: &SparseVec, parts: &HodgeParts) -> Vec<Check> {
    let rebuilt = parts.exact.add(&parts.coexact).add(&parts.harmonic);
    let exact_ok = p == 0 && parts.exact.is_zero() || p > 0 && k.apply_d(p - 1, &parts.exact_potential) == parts.exact;
    let coexact_ok = p == k.dim() && parts.coexact.is_zero()
        || p < k.dim() && codifferential(k, ip, p + 1).expect("degree in range").apply(&parts.coexact_potential) == parts.coexact;
    let harmonic_ok = laplacian(k, ip, p).expect("degree in range").apply(&parts.harmonic).is_zero();
    let pairs = [
        ip.pair(p, &parts.exact, &parts.coexact),
        ip.pair(p, &parts.exact, &parts.harmonic),
        ip.pair(p, &parts.coexact, &parts.harmonic),
    ];
    vec![
        Check::new("reconstruction", rebuilt == *w, "ω = dα + δβ + η"),
        Check::new("exact-potential", exact_ok, "dα reproduces the exact part"),
        Check::new("coexact-potential", coexact_ok, "δβ reproduces the coexact part"),
        Check::new("harmonic-part", harmonic_ok, "Δη = 0"),
        Check::new(
            "pairwise-orthogonal",
            pairs.iter().all(Zero::is_zero),
            format!("inner products {}", pairs.iter().map(crate::linalg::fmt_rational).collect::<Vec<_>>().join(", ")),
        ),
    ]
}

fn pairing(ip: &InnerProduct, p: usize, (ln, l): (&str, &[SparseVec]), (rn, r): (&str, &[SparseVec])) -> CrossPairing {
    let nonzero = l.iter().map(|a| r.iter().filter(|b| !ip.pair(p, a, b).is_zero()).count()).sum();
    CrossPairing { left: ln.into(), right: rn.into(), checked: l.len() * r.len(), nonzero }
}

fn contained(n: usize, parts: &[&[SparseVec]], whole: &[SparseVec]) -> bool {
    let mut ech = Echelon::new(n);
    for v in whole {
        ech.insert(v.clone());
    }
    parts.iter().all(|ps| ps.iter().all(|v| ech.contains(v)))
}

/// The three equivariant orthogonal decompositions in degree `p`, and
/// `𝓗 ∩ Ω_G = 𝓗_G`.
pub fn equivariant_hodge_check(k: &CellComplex, a: &CochainAction, ip: &InnerProduct, p: usize) -> Result<DecompositionReport> {
    if a.order().is_none() {
        return Err(Error::InfiniteGroup);
    }
    if p > k.dim() {
        return Err(Error::DegreeOutOfRange { degree: p, max: k.dim() });
    }
    ip.preserved_by(k, a)?;
    let n = k.num_cells(p);
    let top = k.dim();
    let delta_up = (p < top).then(|| codifferential(k, ip, p + 1)).transpose()?;
    let image_d = |src: Vec<SparseVec>| -> Vec<SparseVec> {
        if p == 0 {
            return Vec::new();
        }
        independent_subset(n, src.iter().map(|v| k.apply_d(p - 1, v)).collect())
    };
    let image_delta = |src: Vec<SparseVec>| -> Vec<SparseVec> {
        match &delta_up {
            Some(m) => independent_subset(n, src.iter().map(|v| m.apply(v)).collect()),
            None => Vec::new(),
        }
    };

    let coinv = a.coinvariant_basis(p);
    let inv = a.invariant_basis(p);
    let d_coinv = image_d(if p > 0 { a.coinvariant_basis(p - 1) } else { Vec::new() });
    let delta_coinv = image_delta(if p < top { a.coinvariant_basis(p + 1) } else { Vec::new() });
    let d_inv = image_d(if p > 0 { a.invariant_basis(p - 1) } else { Vec::new() });
    let delta_inv = image_delta(if p < top { a.invariant_basis(p + 1) } else { Vec::new() });
    let harm = harmonic_space(k, ip);
    let (h_inv, h_coinv) = harm.split(k, a, p);
    let h = harm.degree(p);

    let mut checks = Vec::new();
    let mut pairings = Vec::new();

    let triple = [("d(coinvariant)", &d_coinv), ("delta(coinvariant)", &delta_coinv), ("harmonic-coinvariant", &h_coinv)];
    let sum1 = d_coinv.len() + delta_coinv.len() + h_coinv.len();
    let inside1 = contained(n, &[&d_coinv, &delta_coinv, &h_coinv], &coinv);
    let before = pairings.len();
    for i in 0..3 {
        for j in i + 1..3 {
            pairings.push(pairing(ip, p, (triple[i].0, triple[i].1), (triple[j].0, triple[j].1)));
        }
    }
    let orth1 = pairings[before..].iter().all(|c| c.nonzero == 0);
    checks.push(Check::new(
        "coinvariant-decomposition",
        sum1 == coinv.len() && inside1 && orth1,
        format!("{} + {} + {} = {sum1} vs dim Ω_G = {}", d_coinv.len(), delta_coinv.len(), h_coinv.len(), coinv.len()),
    ));

    let triple = [("d(invariant)", &d_inv), ("delta(invariant)", &delta_inv), ("harmonic-invariant", &h_inv)];
    let sum2 = d_inv.len() + delta_inv.len() + h_inv.len();
    let inside2 = contained(n, &[&d_inv, &delta_inv, &h_inv], &inv);
    let before = pairings.len();
    for i in 0..3 {
        for j in i + 1..3 {
            pairings.push(pairing(ip, p, (triple[i].0, triple[i].1), (triple[j].0, triple[j].1)));
        }
    }
    let orth2 = pairings[before..].iter().all(|c| c.nonzero == 0);
    checks.push(Check::new(
        "invariant-decomposition",
        sum2 == inv.len() && inside2 && orth2,
        format!("{} + {} + {} = {sum2} vs dim Ω^G = {}", d_inv.len(), delta_inv.len(), h_inv.len(), inv.len()),
    ));

    pairings.push(pairing(ip, p, ("harmonic-coinvariant", &h_coinv), ("harmonic-invariant", &h_inv)));
    let orth3 = pairings.last().is_some_and(|c| c.nonzero == 0);
    let inside3 = contained(n, &[&h_coinv, &h_inv], h);
    checks.push(Check::new(
        "harmonic-decomposition",
        h_coinv.len() + h_inv.len() == h.len() && inside3 && orth3,
        format!("{} + {} vs dim 𝓗 = {}", h_coinv.len(), h_inv.len(), h.len()),
    ));

    let meet = intersection_dim(n, h, &coinv);
    let h_coinv_inside = contained(n, &[&h_coinv], &coinv);
    checks.push(Check::new(
        "harmonic-meets-coinvariant",
        meet == h_coinv.len() && h_coinv_inside,
        format!("dim(𝓗 ∩ Ω_G) = {meet}, dim 𝓗_G = {}", h_coinv.len()),
    ));

    pairings.push(pairing(ip, p, ("coinvariant", &coinv), ("invariant", &inv)));
    let orth4 = pairings.last().is_some_and(|c| c.nonzero == 0);
    checks.push(Check::new(
        "coinvariant-orthogonal-to-invariant",
        orth4 && coinv.len() + inv.len() == n,
        format!("{} + {} vs {n}", coinv.len(), inv.len()),
    ));

    let lap = laplacian(k, ip, p)?;
    let commutes = a.generators().iter().all(|g| {
        let m = g.maps[p].matrix();
        m.compose(&lap) == lap.compose(&m)
    });
    checks.push(Check::new("laplacian-commutes-with-action", commutes, format!("{} generators", a.generators().len())));

    let summands = [
        ("coinvariant", coinv.len()),
        ("invariant", inv.len()),
        ("d(coinvariant)", d_coinv.len()),
        ("delta(coinvariant)", delta_coinv.len()),
        ("harmonic-coinvariant", h_coinv.len()),
        ("d(invariant)", d_inv.len()),
        ("delta(invariant)", delta_inv.len()),
        ("harmonic-invariant", h_inv.len()),
        ("harmonic", h.len()),
    ]
    .into_iter()
    .map(|(name, dim)| Summand { name: name.into(), dim })
    .collect();

    Ok(DecompositionReport {
        title: format!("{}: equivariant Hodge decomposition", a.name()),
        degree: p,
        ambient: format!("C^{p}"),
        ambient_dim: n,
        summands,
        pairings,
        checks,
    })
}
