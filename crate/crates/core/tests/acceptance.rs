//! Acceptance criteria, one line each. Arithmetic is exact rational throughout, so
//! every numeric comparison has tolerance zero; the only pinned tolerance is the
//! wall-clock budget of criterion 1.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::oracle;
use coinvariant::catalog;
use coinvariant::cohomology::Cohomology;
use coinvariant::complex::{CellComplex, GradedSubspace};
use coinvariant::cover::{
    coinvariant_compact_cohomology, corollary_check, h0_check, theta_class, window_sequence_report, CutoffWeights, PeriodicCover,
    Window, WindowSequence,
};
use coinvariant::equivariant::{coinvariant_cohomology, finite_exact_sequence, invariant_cohomology, phi_map};
use coinvariant::hodge::{decomposition_checks, equivariant_hodge_check, harmonic_space, hodge_decompose, InnerProduct};
use coinvariant::linalg::{int, SparseVec};

/// Criterion 1 runtime budget.
const RUNTIME_BUDGET: Duration = Duration::from_secs(300);
/// Largest radius tried when waiting for window ranks to stabilize.
const MAX_RADIUS: usize = 4;
/// Criterion 10 size bound.
const ORACLE_CELLS: usize = 40;

/// Criteria that cannot hold as stated, with the reason (reported, not hidden).
const KNOWN_FAILING: &[(u32, &str)] = &[(
    2,
    "two-points-swap and two-circle-swap act on disconnected complexes; a closed coinvariant 0-cochain is \
     only locally constant, and the swap-odd one survives",
)];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn actions() -> Vec<(CellComplex, coinvariant::action::CochainAction)> {
    catalog::entries(Some(catalog::EntryKind::Action)).iter().map(|e| catalog::action(e.name).unwrap()).collect()
}

fn complexes() -> Vec<CellComplex> {
    catalog::entries(Some(catalog::EntryKind::Complex)).iter().map(|e| catalog::complex(e.name).unwrap()).collect()
}

fn covers() -> Vec<PeriodicCover> {
    catalog::entries(Some(catalog::EntryKind::Cover)).iter().map(|e| catalog::cover(e.name).unwrap()).collect()
}

/// First radius `R <= MAX_RADIUS` whose ranks agree with `R + 1`.
fn stabilized_radius(cover: &PeriodicCover) -> Option<(usize, Vec<usize>)> {
    (1..=MAX_RADIUS).find_map(|r| {
        let s = coinvariant_compact_cohomology(cover, r).ok()?;
        s.stable.then_some((r, s.ranks))
    })
}

fn probe(n: usize) -> SparseVec {
    SparseVec::from_pairs((0..n).map(|i| (i, int(if i % 3 == 0 { i as i64 + 1 } else { 2 - i as i64 }))))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for n in 1..=3 {
        let cover = PeriodicCover::cubical_lattice(n);
        let expected: Vec<usize> = (0..=n).map(|p| if p == 0 { 0 } else { binom(n, p - 1) }).collect();
        match stabilized_radius(&cover) {
            Some((r, ranks)) => {
                ok &= ranks == expected;
                details.push(format!("n={n}: {ranks:?} at R={r} (expected {expected:?})"));
            }
            None => {
                ok = false;
                details.push(format!("n={n}: not stable by R={MAX_RADIUS}"));
            }
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed <= RUNTIME_BUDGET;
    details.push(format!("{:.1}s of {}s", elapsed.as_secs_f64(), RUNTIME_BUDGET.as_secs()));
    outcome(ok, details.join("; "))
}

fn criterion_2() -> Outcome {
    let mut nonzero = Vec::new();
    let mut count = 0;
    for cover in covers() {
        let (r, _) = stabilized_radius(&cover).unwrap_or((MAX_RADIUS, Vec::new()));
        let window = cover.window(r);
        let seq = WindowSequence::new(&cover, &window, CutoffWeights::domain(&cover)).expect("domain cutoff fits");
        let v = h0_check(&seq);
        count += 1;
        if !v.holds {
            nonzero.push(format!("{} ({})", cover.name(), v.detail));
        }
    }
    for (k, a) in actions() {
        let h0 = coinvariant_cohomology(&k, &a).unwrap()[0];
        count += 1;
        if h0 != 0 {
            nonzero.push(format!("{}: rank {h0} on {} components", a.name(), k.components()));
        }
    }
    let detail = if nonzero.is_empty() {
        format!("H^0 = 0 on all {count}")
    } else {
        format!("H^0 = 0 on {} of {count}; nonzero: {}", count - nonzero.len(), nonzero.join(", "))
    };
    outcome(nonzero.is_empty(), detail)
}

fn criterion_3() -> Outcome {
    let cover = catalog::cover("z-on-r").unwrap();
    let window = cover.window(2);
    let seq = WindowSequence::new(&cover, &window, CutoffWeights::domain(&cover)).unwrap();
    let t = theta_class(&seq).unwrap();
    outcome(t.verdict.holds && t.spans, format!("{}; spans: {}", t.verdict.detail, t.spans))
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (k, a) in actions() {
        for p in 0..=k.dim() {
            let r = a.split_check(&k, p).unwrap();
            checked += 1;
            let n = k.num_cells(p);
            let inv = r.summand_dim("invariant").unwrap_or(0);
            let coinv = r.summand_dim("coinvariant").unwrap_or(0);
            if !r.passed() || inv + coinv != n {
                failures.push(format!("{} degree {p}", a.name()));
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} action-degrees split; failures: {failures:?}"))
}

fn criterion_5() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["octahedron-antipodal", "hexagon-z6", "torus-shift-z3", "torus-rot-z4"] {
        let (k, a) = catalog::action(name).unwrap();
        let ip = InnerProduct::standard(&k);
        let mut pairings = 0;
        for p in 0..=k.dim() {
            let r = equivariant_hodge_check(&k, &a, &ip, p).unwrap();
            let cross_zero = r.pairings.iter().all(|c| c.nonzero == 0);
            pairings += r.pairings.iter().map(|c| c.checked).sum::<usize>();
            let meets = r.checks.iter().any(|c| c.name.starts_with("harmonic-meets-coinvariant") && c.passed);
            ok &= r.passed() && cross_zero && meets;
        }
        details.push(format!("{name}: {pairings} cross pairings"));
    }
    outcome(ok, details.join(", "))
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    for k in complexes() {
        let ip = InnerProduct::standard(&k);
        ok &= harmonic_space(&k, &ip).dims() == k.betti_numbers();
        for p in 0..=k.dim() {
            let w = probe(k.num_cells(p));
            let parts = hodge_decompose(&k, &ip, p, &w).unwrap();
            ok &= decomposition_checks(&k, &ip, p, &w, &parts).iter().all(|c| c.passed);
        }
    }
    let mut details = Vec::new();
    for (name, dims) in [("octahedron", vec![1, 0, 1]), ("hexagon", vec![1, 1]), ("torus-3x3", vec![1, 2, 1])] {
        let k = catalog::complex(name).unwrap();
        let got = harmonic_space(&k, &InnerProduct::standard(&k)).dims();
        ok &= got == dims;
        details.push(format!("{name} {got:?}"));
    }
    outcome(ok, format!("dim ker Δ = b on {} complexes; {}", complexes().len(), details.join(", ")))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut failures = Vec::new();
    for (k, a) in actions() {
        let r = phi_map(&k, &a).unwrap();
        if !r.passed() {
            failures.push(a.name().to_string());
            ok = false;
        }
    }
    let (k, a) = catalog::action("octahedron-antipodal").unwrap();
    let inv = invariant_cohomology(&k, &a).unwrap();
    let coinv = coinvariant_cohomology(&k, &a).unwrap();
    ok &= inv == [1, 0, 0] && coinv == [0, 0, 1];
    outcome(ok, format!("{} actions; octahedron antipodal {inv:?}/{coinv:?}; failures: {failures:?}", actions().len()))
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for (k, a) in actions() {
        let r = finite_exact_sequence(&k, &a).unwrap();
        ok &= r.passed() && r.nodes.iter().all(|n| n.exact);
    }
    details.push(format!("{} finite sequences", actions().len()));
    for cover in covers() {
        let Some((r, _)) = stabilized_radius(&cover) else {
            ok = false;
            details.push(format!("{} unstable", cover.name()));
            continue;
        };
        for cutoff in ["domain", "split"] {
            let rep = window_sequence_report(&cover, r, cutoff).unwrap();
            let nodes = rep.sequence.nodes.len();
            let independent = rep.sequence.checks.iter().filter(|c| c.name.starts_with("cutoff-independence")).all(|c| c.passed);
            ok &= rep.passed() && independent;
            if cutoff == "domain" {
                details.push(format!("{} R={r}: {nodes} nodes", cover.name()));
            }
        }
    }
    outcome(ok, details.join(", "))
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for n in 1..=3 {
        let cover = PeriodicCover::cubical_lattice(n);
        let r = stabilized_radius(&cover).map_or(1, |(r, _)| r);
        let window = cover.window(r);
        let seq = WindowSequence::new(&cover, &window, CutoffWeights::domain(&cover)).unwrap();
        let degrees = corollary_check(&seq).unwrap();
        ok &= degrees.iter().all(|d| d.holds);
        let ranks: Vec<String> = degrees.iter().map(|d| format!("{}={}", d.coinvariant_rank, d.quotient_rank_below)).collect();
        details.push(format!("n={n}: [{}]", ranks.join(", ")));
        if n == 2 {
            // genus-one surrogate: 2g with g = 1
            ok &= degrees.iter().any(|d| d.degree == 2 && d.coinvariant_rank == 2);
        }
    }
    outcome(ok, details.join("; "))
}

/// Ambient coordinates of `compact ∩ ker m` on a window, by dense elimination.
fn window_coinvariant_spans(cover: &PeriodicCover, w: &Window) -> Vec<Vec<Vec<oracle::Q>>> {
    let k = w.complex();
    (0..=k.dim())
        .map(|p| {
            let n = k.num_cells(p);
            let nq = cover.quotient().num_cells(p);
            let basis: Vec<Vec<oracle::Q>> = w.compact().basis(p).iter().map(|v| oracle::dense(v, n)).collect();
            // m applied to each basis vector, as columns of an nq x s matrix
            let mut rows = vec![vec![oracle::q(0); basis.len()]; nq];
            for (j, b) in basis.iter().enumerate() {
                for (i, x) in b.iter().enumerate() {
                    let (c, _) = w.key(p, i);
                    rows[c][j] += x;
                }
            }
            oracle::kernel(rows, basis.len())
                .into_iter()
                .map(|coef| (0..n).map(|i| coef.iter().zip(&basis).fold(oracle::q(0), |acc, (c, b)| acc + c * &b[i])).collect())
                .collect()
        })
        .collect()
}

fn check_subspace(k: &CellComplex, s: &GradedSubspace, spans: &[Vec<Vec<oracle::Q>>], label: &str, bad: &mut Vec<String>) {
    let dims: Vec<usize> = spans.iter().map(|v| oracle::rank(v.clone())).collect();
    if dims != s.dims() {
        bad.push(format!("{label}: dims {:?} vs oracle {dims:?}", s.dims()));
    }
    let ranks = Cohomology::new(k, s.clone()).ranks();
    let expected = oracle::subspace_cohomology(k, spans);
    if ranks != expected {
        bad.push(format!("{label}: ranks {ranks:?} vs oracle {expected:?}"));
    }
}

fn criterion_10() -> Outcome {
    let mut bad = Vec::new();
    let mut complexes_checked = 0;
    let mut subspaces = 0;
    for k in complexes().iter().filter(|k| k.total_cells() <= ORACLE_CELLS) {
        complexes_checked += 1;
        if k.betti_numbers() != oracle::betti(k) {
            bad.push(format!("{} betti", k.name()));
        }
        check_subspace(k, &k.full_subspace(), &oracle::spans(k, &k.full_subspace()), k.name(), &mut bad);
        subspaces += 1;
    }
    for (k, a) in actions().iter().filter(|(k, _)| k.total_cells() <= ORACLE_CELLS) {
        let inv: Vec<_> = (0..=k.dim()).map(|p| oracle::invariant_spanning(a, p, k.num_cells(p))).collect();
        let coinv: Vec<_> = (0..=k.dim()).map(|p| oracle::coinvariant_spanning(a, p, k.num_cells(p))).collect();
        for p in 0..=k.dim() {
            if oracle::invariant_dim(a, p, k.num_cells(p)) != a.invariant_basis(p).len() {
                bad.push(format!("{} invariant dim {p}", a.name()));
            }
        }
        check_subspace(k, &a.invariant_subspace(k), &inv, &format!("{} invariant", a.name()), &mut bad);
        check_subspace(k, &a.coinvariant_subspace(k), &coinv, &format!("{} coinvariant", a.name()), &mut bad);
        subspaces += 2;
    }
    for cover in covers() {
        for r in 1..=8 {
            let w = cover.window(r);
            let k = w.complex();
            if k.total_cells() > ORACLE_CELLS {
                break;
            }
            complexes_checked += 1;
            if k.betti_numbers() != oracle::betti(k) {
                bad.push(format!("{} betti", k.name()));
            }
            check_subspace(k, w.compact(), &oracle::spans(k, w.compact()), &format!("{} compact", k.name()), &mut bad);
            let spans = window_coinvariant_spans(&cover, &w);
            check_subspace(k, &w.coinvariant_subspace(), &spans, &format!("{} coinvariant", k.name()), &mut bad);
            subspaces += 2;
        }
    }
    outcome(bad.is_empty(), format!("{complexes_checked} complexes, {subspaces} subspaces; disagreements: {bad:?}"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "coinvariant compact ranks of Z^n on R^n are C(n, p-1)", criterion_1),
        (2, "H^0 of the coinvariant complex vanishes", criterion_2),
        (3, "theta is nonzero and spans H^1 for Z on R", criterion_3),
        (4, "V = V^G + V_G with ker(average) = V_G", criterion_4),
        (5, "equivariant Hodge decompositions and H_G = H ∩ Ω_G", criterion_5),
        (6, "dim ker Δ = b and exact Hodge reconstruction", criterion_6),
        (7, "Φ bijective with matching image splits", criterion_7),
        (8, "long exact sequences exact at every node, cutoff-independent", criterion_8),
        (9, "rank H^p(coinvariant compact) = rank H^(p-1)(quotient)", criterion_9),
        (10, "oracle agreement on complexes with at most 40 cells", criterion_10),
    ];
    let mut unexpected = 0;
    for (id, title, run) in criteria {
        let o = run();
        let known = KNOWN_FAILING.iter().find(|(k, _)| *k == id).map(|(_, why)| *why);
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status}: {title}: {}", o.detail);
        match (o.passed, known) {
            (false, Some(why)) => println!("             known: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => println!("             note: listed as known-failing but passed"),
            (true, None) => {}
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    }
}
