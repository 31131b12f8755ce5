//! Group actions on cochains by signed cell permutations.
//!
//! The stored map of a generator is its action on cochains: the indicator of a
//! cell goes to the signed indicator of the image cell. Products compose so that
//! `pullback(gh, w) = pullback(h, pullback(g, w))`.

use std::collections::{HashMap, VecDeque};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cohomology::Cohomology;
use crate::complex::{CellComplex, CellShape, GradedSubspace};
use crate::error::{Error, Result};
use crate::linalg::{frac, independent_subset, intersection_dim, int, Echelon, Rational, SparseMatrix, SparseVec};
use crate::report::{Check, CrossPairing, DecompositionReport, Summand};

pub const MAX_GROUP_ORDER: usize = 4096;

/// `e_i -> sign[i] * e_{target[i]}` on one degree's cell positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    target: Vec<usize>,
    sign: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        Self { target: (0..n).collect(), sign: vec![1; n] }
    }

    pub fn new(target: Vec<usize>, sign: Vec<i8>) -> std::result::Result<Self, String> {
        if target.len() != sign.len() {
            return Err("target and sign lists differ in length".into());
        }
        let mut seen = vec![false; target.len()];
        for (i, &t) in target.iter().enumerate() {
            if t >= target.len() {
                return Err(format!("position {i} maps outside the degree"));
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(format!("position {t} is hit twice"));
            }
        }
        if let Some(i) = sign.iter().position(|s| s.abs() != 1) {
            return Err(format!("position {i} has sign {}", sign[i]));
        }
        Ok(Self { target, sign })
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    pub fn image(&self, i: usize) -> (usize, i8) {
        (self.target[i], self.sign[i])
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(v.iter().map(|(i, x)| (self.target[i], x * int(self.sign[i] as i64))))
    }

    /// `self ∘ other`
    pub fn after(&self, other: &SignedPermutation) -> SignedPermutation {
        let (target, sign) = other
            .target
            .iter()
            .zip(&other.sign)
            .map(|(&t, &s)| (self.target[t], s * self.sign[t]))
            .unzip();
        SignedPermutation { target, sign }
    }

    pub fn inverse(&self) -> SignedPermutation {
        let mut target = vec![0; self.len()];
        let mut sign = vec![1; self.len()];
        for (i, (&t, &s)) in self.target.iter().zip(&self.sign).enumerate() {
            target[t] = i;
            sign[t] = s;
        }
        SignedPermutation { target, sign }
    }

    pub fn matrix(&self) -> SparseMatrix {
        let cols = (0..self.len()).map(|i| SparseVec::from_pairs([(self.target[i], int(self.sign[i] as i64))])).collect();
        SparseMatrix::from_columns(self.len(), cols)
    }

    pub fn is_identity(&self) -> bool {
        self.target.iter().enumerate().all(|(i, &t)| i == t) && self.sign.iter().all(|&s| s == 1)
    }
}

/// Per-degree maps of one group element.
pub type ElementMap = Vec<SignedPermutation>;

fn compose(a: &ElementMap, b: &ElementMap) -> ElementMap {
    a.iter().zip(b).map(|(x, y)| x.after(y)).collect()
}

fn invert(a: &ElementMap) -> ElementMap {
    a.iter().map(SignedPermutation::inverse).collect()
}

/// A word in the generators: `(generator index, exponent)` factors, read left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub label: String,
    pub factors: Vec<(usize, i64)>,
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    names: Vec<String>,
    maps: Vec<ElementMap>,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.maps.len()
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Element whose action is `pullback(b) ∘ pullback(a)`.
    pub fn product(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }
}

#[derive(Clone, Debug)]
pub enum GroupSpec {
    Finite(FiniteGroup),
    /// `Z^rank`; generators must commute and elements are exponent vectors.
    FreeAbelian { rank: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupElement {
    Finite(usize),
    Lattice(Vec<i64>),
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub maps: ElementMap,
}

#[derive(Clone, Debug)]
pub struct CochainAction {
    name: String,
    dims: Vec<usize>,
    generators: Vec<Generator>,
    group: GroupSpec,
}

fn validate_generators(k: &CellComplex, generators: &[Generator]) -> Result<()> {
    for g in generators {
        if g.maps.len() != k.dim() + 1 {
            return Err(Error::NotSignedPermutation {
                generator: g.name.clone(),
                reason: format!("maps given for {} degrees, complex has {}", g.maps.len(), k.dim() + 1),
            });
        }
        for (p, m) in g.maps.iter().enumerate() {
            if m.len() != k.num_cells(p) {
                return Err(Error::NotSignedPermutation {
                    generator: g.name.clone(),
                    reason: format!("degree {p} map has {} entries for {} cells", m.len(), k.num_cells(p)),
                });
            }
        }
        for p in 0..k.dim() {
            let lhs = g.maps[p + 1].matrix().compose(&k.d(p));
            let rhs = k.d(p).compose(&g.maps[p].matrix());
            if lhs != rhs {
                return Err(Error::NonCommuting { generator: g.name.clone(), degree: p });
            }
        }
    }
    Ok(())
}

fn word_map(generators: &[Generator], dims: &[usize], factors: &[(usize, i64)]) -> ElementMap {
    let mut acc: ElementMap = dims.iter().map(|&n| SignedPermutation::identity(n)).collect();
    for &(g, e) in factors {
        let step = if e >= 0 { generators[g].maps.clone() } else { invert(&generators[g].maps) };
        for _ in 0..e.unsigned_abs() {
            acc = compose(&step, &acc);
        }
    }
    acc
}

impl CochainAction {
    /// A finite group generated by `generators`. The group is closed by search,
    /// every relation must evaluate to the identity and, if given, the order must match.
    pub fn finite(
        name: impl Into<String>,
        k: &CellComplex,
        generators: Vec<Generator>,
        relations: &[Relation],
        order: Option<usize>,
    ) -> Result<Self> {
        validate_generators(k, &generators)?;
        let dims: Vec<usize> = (0..=k.dim()).map(|p| k.num_cells(p)).collect();
        for r in relations {
            if r.factors.iter().any(|&(g, _)| g >= generators.len()) {
                return Err(Error::UnknownElement(r.label.clone()));
            }
            if !word_map(&generators, &dims, &r.factors).iter().all(SignedPermutation::is_identity) {
                return Err(Error::RelationFailed { relation: r.label.clone() });
            }
        }
        let identity: ElementMap = dims.iter().map(|&n| SignedPermutation::identity(n)).collect();
        let mut names = vec!["e".to_string()];
        let mut maps = vec![identity.clone()];
        let mut index: HashMap<ElementMap, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for g in &generators {
                let next = compose(&g.maps, &maps[e]);
                if index.contains_key(&next) {
                    continue;
                }
                if maps.len() == MAX_GROUP_ORDER {
                    return Err(Error::GroupTooLarge { limit: MAX_GROUP_ORDER });
                }
                names.push(if e == 0 { g.name.clone() } else { format!("{}*{}", names[e], g.name) });
                index.insert(next.clone(), maps.len());
                queue.push_back(maps.len());
                maps.push(next);
            }
        }
        if let Some(n) = order {
            if n != maps.len() {
                return Err(Error::RelationFailed { relation: format!("order {n} (generated group has order {})", maps.len()) });
            }
        }
        let table: Vec<Vec<usize>> =
            maps.iter().map(|a| maps.iter().map(|b| index[&compose(b, a)]).collect()).collect();
        let inverse = maps.iter().map(|a| index[&invert(a)]).collect();
        let group = FiniteGroup { names, maps, table, inverse };
        Ok(Self { name: name.into(), dims, generators, group: GroupSpec::Finite(group) })
    }

    /// `Z^n` acting through commuting generators.
    pub fn free_abelian(name: impl Into<String>, k: &CellComplex, generators: Vec<Generator>) -> Result<Self> {
        validate_generators(k, &generators)?;
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if compose(&a.maps, &b.maps) != compose(&b.maps, &a.maps) {
                    return Err(Error::RelationFailed { relation: format!("{}*{} = {}*{}", a.name, b.name, b.name, a.name) });
                }
            }
        }
        let dims = (0..=k.dim()).map(|p| k.num_cells(p)).collect();
        let rank = generators.len();
        Ok(Self { name: name.into(), dims, generators, group: GroupSpec::FreeAbelian { rank } })
    }

    /// The action of the trivial group.
    pub fn trivial(k: &CellComplex) -> Self {
        Self::finite("trivial", k, Vec::new(), &[], Some(1)).expect("trivial action is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn order(&self) -> Option<usize> {
        match &self.group {
            GroupSpec::Finite(g) => Some(g.order()),
            GroupSpec::FreeAbelian { .. } => None,
        }
    }

    fn finite_group(&self) -> Result<&FiniteGroup> {
        match &self.group {
            GroupSpec::Finite(g) => Ok(g),
            GroupSpec::FreeAbelian { .. } => Err(Error::InfiniteGroup),
        }
    }

    pub fn element(&self, name: &str) -> Result<GroupElement> {
        let g = self.finite_group()?;
        g.names.iter().position(|n| n == name).map(GroupElement::Finite).ok_or_else(|| Error::UnknownElement(name.into()))
    }

    fn element_map(&self, g: &GroupElement) -> Result<ElementMap> {
        match (g, &self.group) {
            (GroupElement::Finite(i), GroupSpec::Finite(fg)) => {
                fg.maps.get(*i).cloned().ok_or_else(|| Error::UnknownElement(format!("#{i}")))
            }
            (GroupElement::Lattice(v), GroupSpec::FreeAbelian { rank }) if v.len() == *rank => {
                let factors: Vec<(usize, i64)> = v.iter().copied().enumerate().collect();
                Ok(word_map(&self.generators, &self.dims, &factors))
            }
            (GroupElement::Lattice(v), _) => Err(Error::UnknownElement(format!("{v:?}"))),
            (GroupElement::Finite(i), _) => Err(Error::UnknownElement(format!("#{i}"))),
        }
    }

    fn check_degree(&self, p: usize, w: &SparseVec) -> Result<()> {
        if p > self.top() {
            return Err(Error::DegreeOutOfRange { degree: p, max: self.top() });
        }
        if w.max_index().is_some_and(|m| m >= self.dims[p]) {
            return Err(Error::DimensionMismatch(format!("cochain index beyond {} cells of degree {p}", self.dims[p])));
        }
        Ok(())
    }

    pub fn pullback(&self, g: &GroupElement, p: usize, w: &SparseVec) -> Result<SparseVec> {
        self.check_degree(p, w)?;
        Ok(self.element_map(g)?[p].apply(w))
    }

    /// `(1/|G|) sum_g g.w`
    pub fn average(&self, p: usize, w: &SparseVec) -> Result<SparseVec> {
        self.check_degree(p, w)?;
        let g = self.finite_group()?;
        let mut acc = SparseVec::new();
        for m in &g.maps {
            acc.add_scaled(&Rational::one(), &m[p].apply(w));
        }
        Ok(acc.scaled(&frac(1, g.order() as i64)))
    }

    pub fn average_matrix(&self, p: usize) -> Result<SparseMatrix> {
        let cols = (0..self.dims[p]).map(|i| self.average(p, &SparseVec::unit(i))).collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::from_columns(self.dims[p], cols))
    }

    /// Stacked `g - id` over generators; its kernel is the invariant space.
    fn difference_stack(&self, p: usize) -> SparseMatrix {
        let id = SparseMatrix::identity(self.dims[p]);
        let blocks: Vec<SparseMatrix> = self.generators.iter().map(|g| g.maps[p].matrix().sub(&id)).collect();
        if blocks.is_empty() {
            SparseMatrix::zeros(0, self.dims[p])
        } else {
            SparseMatrix::vstack(&blocks)
        }
    }

    pub fn invariant_basis(&self, p: usize) -> Vec<SparseVec> {
        let m = self.difference_stack(p);
        if m.nrows() == 0 {
            return (0..self.dims[p]).map(SparseVec::unit).collect();
        }
        m.kernel()
    }

    /// Basis of the span of `v - g.v` and `v - g^{-1}.v` over cells and generators.
    pub fn coinvariant_basis(&self, p: usize) -> Vec<SparseVec> {
        let mut spanning = Vec::new();
        for g in &self.generators {
            let fwd = &g.maps[p];
            let back = fwd.inverse();
            for i in 0..self.dims[p] {
                let e = SparseVec::unit(i);
                spanning.push(e.sub(&fwd.apply(&e)));
                spanning.push(e.sub(&back.apply(&e)));
            }
        }
        independent_subset(self.dims[p], spanning)
    }

    pub fn invariant_subspace(&self, k: &CellComplex) -> GradedSubspace {
        GradedSubspace::from_spanning(k, (0..=self.top()).map(|p| self.invariant_basis(p)).collect())
    }

    pub fn coinvariant_subspace(&self, k: &CellComplex) -> GradedSubspace {
        GradedSubspace::from_spanning(k, (0..=self.top()).map(|p| self.coinvariant_basis(p)).collect())
    }

    /// Checks `V = V^G ⊕ V_G`, `ker m = V_G` and the supporting identities in degree `p`.
    pub fn split_check(&self, k: &CellComplex, p: usize) -> Result<DecompositionReport> {
        self.finite_group()?;
        if p > self.top() {
            return Err(Error::DegreeOutOfRange { degree: p, max: self.top() });
        }
        let n = self.dims[p];
        let inv = self.invariant_basis(p);
        let coinv = self.coinvariant_basis(p);
        let avg = self.average_matrix(p)?;
        let ker_avg = avg.kernel();
        let mut checks = Vec::new();

        checks.push(Check::new(
            "dimension-sum",
            inv.len() + coinv.len() == n,
            format!("{} + {} vs {n}", inv.len(), coinv.len()),
        ));
        let meet = intersection_dim(n, &inv, &coinv);
        checks.push(Check::new("trivial-intersection", meet == 0, format!("dim(V^G ∩ V_G) = {meet}")));

        let mut coinv_span = Echelon::new(n);
        for c in &coinv {
            coinv_span.insert(c.clone());
        }
        let mut ker_span = Echelon::new(n);
        for c in &ker_avg {
            ker_span.insert(c.clone());
        }
        let ker_in = ker_avg.iter().all(|v| coinv_span.contains(v));
        let coinv_in = coinv.iter().all(|v| ker_span.contains(v));
        checks.push(Check::new(
            "kernel-of-average-equals-coinvariants",
            ker_in && coinv_in,
            format!("dim ker m = {}, ker m ⊆ V_G: {ker_in}, V_G ⊆ ker m: {coinv_in}", ker_avg.len()),
        ));

        let residual_ok = (0..n).all(|i| {
            let e = SparseVec::unit(i);
            coinv_span.contains(&e.sub(&avg.apply(&e)))
        });
        checks.push(Check::new("v-minus-average-is-coinvariant", residual_ok, format!("checked on {n} cell indicators")));

        let stable = self.generators.iter().all(|g| coinv.iter().all(|w| coinv_span.contains(&g.maps[p].apply(w))));
        checks.push(Check::new("coinvariants-stable", stable, format!("{} generators", self.generators.len())));

        let idempotent = avg.compose(&avg) == avg;
        checks.push(Check::new("average-idempotent", idempotent, ""));

        let image: Vec<SparseVec> = avg.column_basis().into_iter().map(|j| avg.col(j).clone()).collect();
        let image_is_inv = image.len() == inv.len() && intersection_dim(n, &image, &inv) == inv.len();
        checks.push(Check::new("average-image-is-invariants", image_is_inv, format!("rank m = {}", image.len())));

        let commutes = p == self.top() || {
            let next = self.average_matrix(p + 1)?;
            next.compose(&k.d(p)) == k.d(p).compose(&avg)
        };
        checks.push(Check::new("average-commutes-with-d", commutes, ""));

        let nonzero = inv.iter().map(|a| coinv.iter().filter(|b| !a.dot(b).is_zero()).count()).sum();
        Ok(DecompositionReport {
            title: format!("{}: invariant/coinvariant splitting", self.name),
            degree: p,
            ambient: format!("C^{p}"),
            ambient_dim: n,
            summands: vec![
                Summand { name: "invariant".into(), dim: inv.len() },
                Summand { name: "coinvariant".into(), dim: coinv.len() },
            ],
            pairings: vec![CrossPairing {
                left: "invariant".into(),
                right: "coinvariant".into(),
                checked: inv.len() * coinv.len(),
                nonzero,
            }],
            checks,
        })
    }

    /// Action on `H^p` in the representative basis of `h`.
    pub fn induced_cohomology_action(&self, h: &Cohomology<'_>, p: usize) -> Result<InducedAction> {
        self.finite_group()?;
        let b = h.rank(p);
        let mut matrices = Vec::new();
        for g in &self.generators {
            let m = h
                .induced_map(p, h, p, |z| g.maps[p].apply(z))
                .ok_or_else(|| Error::NonCommuting { generator: g.name.clone(), degree: p })?;
            matrices.push((g.name.clone(), m));
        }
        let id = SparseMatrix::identity(b);
        let invariant_classes = if matrices.is_empty() || b == 0 {
            (0..b).map(SparseVec::unit).collect()
        } else {
            let blocks: Vec<SparseMatrix> = matrices.iter().map(|(_, m)| m.sub(&id)).collect();
            SparseMatrix::vstack(&blocks).kernel()
        };
        let mut spanning = Vec::new();
        for (_, m) in &matrices {
            let inv = crate::linalg::SparseMatrix::from_columns(
                b,
                (0..b).map(|i| m.solve(&SparseVec::unit(i)).expect("group elements act invertibly")).collect(),
            );
            for i in 0..b {
                let e = SparseVec::unit(i);
                spanning.push(e.sub(&m.apply(&e)));
                spanning.push(e.sub(&inv.apply(&e)));
            }
        }
        let coinvariant_classes = independent_subset(b, spanning);
        Ok(InducedAction {
            degree: p,
            betti: b,
            matrices,
            invariant_dim: invariant_classes.len(),
            coinvariant_dim: coinvariant_classes.len(),
            invariant_classes,
            coinvariant_classes,
        })
    }
}

/// Linear action on `H^p` with its fixed and coinvariant class subspaces.
#[derive(Clone, Debug)]
pub struct InducedAction {
    pub degree: usize,
    pub betti: usize,
    pub matrices: Vec<(String, SparseMatrix)>,
    pub invariant_classes: Vec<SparseVec>,
    pub coinvariant_classes: Vec<SparseVec>,
    pub invariant_dim: usize,
    pub coinvariant_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InducedActionSummary {
    pub degree: usize,
    pub betti: usize,
    pub invariant_dim: usize,
    pub coinvariant_dim: usize,
    pub matrices: Vec<(String, Vec<Vec<String>>)>,
}

impl InducedAction {
    pub fn summary(&self) -> InducedActionSummary {
        InducedActionSummary {
            degree: self.degree,
            betti: self.betti,
            invariant_dim: self.invariant_dim,
            coinvariant_dim: self.coinvariant_dim,
            matrices: self
                .matrices
                .iter()
                .map(|(n, m)| {
                    let rows = m.to_dense_rows().iter().map(|r| r.iter().map(crate::linalg::fmt_rational).collect()).collect();
                    (n.clone(), rows)
                })
                .collect(),
        }
    }
}

fn sort_parity(v: &mut [usize]) -> i8 {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

/// Cochain action of a simplicial automorphism given on vertices.
pub fn simplicial_generator(k: &CellComplex, name: &str, vertex_map: &[usize]) -> Result<Generator> {
    let bad = |reason: String| Error::NotSignedPermutation { generator: name.into(), reason };
    let mut maps = Vec::new();
    for p in 0..=k.dim() {
        let mut target = Vec::with_capacity(k.num_cells(p));
        let mut sign = Vec::with_capacity(k.num_cells(p));
        for cell in k.cells(p) {
            let CellShape::Simplex(vs) = &cell.shape else {
                return Err(bad(format!("cell {} is not a simplex", cell.id)));
            };
            let mut img = vs
                .iter()
                .map(|&v| vertex_map.get(v).copied().ok_or_else(|| bad(format!("vertex {v} has no image"))))
                .collect::<Result<Vec<_>>>()?;
            let s = sort_parity(&mut img);
            let pos = k
                .find_shape(p, &CellShape::Simplex(img.clone()))
                .ok_or_else(|| bad(format!("image {img:?} of cell {} is not a simplex", cell.id)))?;
            target.push(pos);
            sign.push(s);
        }
        maps.push(SignedPermutation::new(target, sign).map_err(bad)?);
    }
    Ok(Generator { name: name.into(), maps })
}

/// Cochain action of the affine map `x -> L x + t` on a cubical torus, where
/// `L e_a = linear[a].1 * e_{linear[a].0}`.
pub fn cubical_generator(
    k: &CellComplex,
    sizes: &[usize],
    name: &str,
    linear: &[(usize, i8)],
    translation: &[i64],
) -> Result<Generator> {
    let bad = |reason: String| Error::NotSignedPermutation { generator: name.into(), reason };
    let n = sizes.len();
    if linear.len() != n || translation.len() != n {
        return Err(bad(format!("affine data must have dimension {n}")));
    }
    let mut maps = Vec::new();
    for p in 0..=k.dim() {
        let mut target = Vec::new();
        let mut sign = Vec::new();
        for cell in k.cells(p) {
            let CellShape::Cube { corner, axes } = &cell.shape else {
                return Err(bad(format!("cell {} is not a cube", cell.id)));
            };
            let mut image = translation.to_vec();
            for (a, &c) in corner.iter().enumerate() {
                let (b, s) = linear[a];
                image[b] += s as i64 * c;
            }
            let mut s: i8 = 1;
            let mut img_axes = Vec::new();
            for &a in axes {
                let (b, sa) = linear[a];
                if sa < 0 {
                    image[b] -= 1;
                }
                s *= sa;
                img_axes.push(b);
            }
            s *= sort_parity(&mut img_axes);
            let wrapped: Vec<i64> = image.iter().zip(sizes).map(|(x, &m)| x.rem_euclid(m as i64)).collect();
            let pos = k
                .find_shape(p, &CellShape::Cube { corner: wrapped, axes: img_axes })
                .ok_or_else(|| bad(format!("image of cell {} is missing", cell.id)))?;
            target.push(pos);
            sign.push(s);
        }
        maps.push(SignedPermutation::new(target, sign).map_err(bad)?);
    }
    Ok(Generator { name: name.into(), maps })
}
