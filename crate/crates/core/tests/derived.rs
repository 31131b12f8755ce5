//! Frozen values, each recomputed here with the dense oracle before being compared
//! against the library.

mod common;

use common::oracle;
use coinvariant::catalog;
use coinvariant::cohomology::Cohomology;
use coinvariant::cover::{iota_injectivity_check, CutoffWeights, PeriodicCover, WindowSequence};
use coinvariant::equivariant::{coinvariant_cohomology, invariant_cohomology, phi_map};
use coinvariant::hodge::{codifferential, harmonic_space, InnerProduct};

#[test]
fn octahedron_coboundary_ranks() {
    let k = catalog::complex("octahedron").unwrap();
    let frozen = [5, 7];
    for p in 0..2 {
        assert_eq!(oracle::rank(oracle::coboundary(&k, p)), frozen[p]);
        assert_eq!(k.d(p).rank(), frozen[p]);
    }
    assert_eq!(oracle::betti(&k), [1, 0, 1]);
}

#[test]
fn torus_betti() {
    for (name, betti) in [("torus-3x3", vec![1, 2, 1]), ("hexagon", vec![1, 1]), ("octahedron", vec![1, 0, 1])] {
        let k = catalog::complex(name).unwrap();
        assert_eq!(oracle::betti(&k), betti);
        assert_eq!(harmonic_space(&k, &InnerProduct::standard(&k)).dims(), betti);
    }
    let t3 = PeriodicCover::cubical_lattice(3);
    assert_eq!(oracle::betti(t3.quotient()), [1, 3, 3, 1]);
}

#[test]
fn hexagon_codifferential_after_coboundary() {
    let k = catalog::complex("hexagon").unwrap();
    let d = oracle::coboundary(&k, 0);
    // standard pairing: δ is the transpose
    let n = k.num_cells(0);
    let product: oracle::Dense =
        (0..n).map(|i| (0..n).map(|j| d.iter().fold(oracle::q(0), |acc, row| acc + &row[i] * &row[j])).collect()).collect();
    assert_eq!(oracle::rank(product), 5);
    let ip = InnerProduct::standard(&k);
    assert_eq!(codifferential(&k, &ip, 1).unwrap().compose(&k.d(0)).rank(), 5);
}

#[test]
fn split_dimensions() {
    let frozen = [("hexagon-z6", vec![(1, 5), (1, 5)]), ("octahedron-antipodal", vec![(3, 3), (6, 6), (4, 4)])];
    for (name, dims) in frozen {
        let (k, a) = catalog::action(name).unwrap();
        for (p, &(inv, coinv)) in dims.iter().enumerate() {
            let n = k.num_cells(p);
            assert_eq!(oracle::invariant_dim(&a, p, n), inv, "{name} {p}");
            assert_eq!(oracle::rank(oracle::coinvariant_spanning(&a, p, n)), coinv, "{name} {p}");
            assert_eq!((a.invariant_basis(p).len(), a.coinvariant_basis(p).len()), (inv, coinv));
        }
    }
}

#[test]
fn subcomplex_cohomology() {
    let frozen = [
        ("octahedron-antipodal", vec![1, 0, 0], vec![0, 0, 1]),
        ("hexagon-z6", vec![1, 1], vec![0, 0]),
        ("two-circle-swap", vec![1, 1], vec![1, 1]),
    ];
    for (name, inv, coinv) in frozen {
        let (k, a) = catalog::action(name).unwrap();
        let inv_span: Vec<_> = (0..=k.dim()).map(|p| oracle::invariant_spanning(&a, p, k.num_cells(p))).collect();
        let coinv_span: Vec<_> = (0..=k.dim()).map(|p| oracle::coinvariant_spanning(&a, p, k.num_cells(p))).collect();
        assert_eq!(oracle::subspace_cohomology(&k, &inv_span), inv, "{name}");
        assert_eq!(oracle::subspace_cohomology(&k, &coinv_span), coinv, "{name}");
        assert_eq!(invariant_cohomology(&k, &a).unwrap(), inv);
        assert_eq!(coinvariant_cohomology(&k, &a).unwrap(), coinv);
    }
    let (k, a) = catalog::action("two-circle-swap").unwrap();
    let phi = phi_map(&k, &a).unwrap();
    assert_eq!((phi.degrees[1].invariant_image, phi.degrees[1].coinvariant_image), (1, 1));
}

#[test]
fn line_window_by_enumeration() {
    let z = PeriodicCover::cubical_lattice(1);
    let w = z.window(2);
    // vertices t = -2..=3 and edges t = -2..=2 (edge t joins t and t + 1); the end
    // vertices have an edge outside the window, so the interior vertices are -1..=2
    let interior_vertices: Vec<i64> = (0..w.complex().num_cells(0)).filter(|&i| !w.is_collar(0, i)).map(|i| w.key(0, i).1[0]).collect();
    assert_eq!(interior_vertices, [-1, 0, 1, 2]);
    assert_eq!(w.compact_dims(), [4, 5]);
    let spans = oracle::spans(w.complex(), w.compact());
    assert_eq!(oracle::subspace_cohomology(w.complex(), &spans), [0, 1]);
}

#[test]
fn strip_ranks_and_iota() {
    let s = PeriodicCover::strip(2);
    let w = s.window(1);
    let seq = WindowSequence::new(&s, &w, CutoffWeights::domain(&s)).unwrap();
    let compact_spans = oracle::spans(w.complex(), w.compact());
    assert_eq!(oracle::subspace_cohomology(w.complex(), &compact_spans), [0, 0, 1]);
    assert_eq!(seq.compact().ranks(), [0, 0, 1]);
    assert_eq!(seq.coinvariant().ranks(), [0, 0, 1]);
    assert_eq!(Cohomology::new(s.quotient(), s.quotient_compact()).ranks(), [0, 1, 1]);
    // H^2 of the coinvariants is the image of the connecting map and dies in H^2_c
    let iota = iota_injectivity_check(&seq).unwrap();
    let kernels: Vec<usize> = iota.iter().map(|d| d.kernel_dim).collect();
    assert_eq!(kernels, [0, 0, 1]);
    assert!(iota.iter().all(|d| d.certified_kernel_classes == d.kernel_dim));
}
