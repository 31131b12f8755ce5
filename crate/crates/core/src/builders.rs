//! Generators for the bundled complexes: polygons, paths, the octahedral sphere,
//! disjoint circles and periodic cubical grids.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{Cell, CellComplex, CellShape, Orientation};

/// Simplicial complex generated by the given facets, oriented by sorted vertex ids.
///
/// Cell ids run through degree 0 first, then degree 1, and so on; within a
/// degree simplices are ordered lexicographically.
pub fn simplicial(name: &str, facets: &[Vec<usize>]) -> CellComplex {
    let mut simplices: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for f in facets {
        let mut f = f.clone();
        f.sort_unstable();
        f.dedup();
        let n = f.len();
        for mask in 1u64..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
            simplices.insert((s.len() - 1, s));
        }
    }
    let ids: BTreeMap<&Vec<usize>, usize> = simplices.iter().enumerate().map(|(i, (_, s))| (s, i)).collect();
    let cells = simplices
        .iter()
        .enumerate()
        .map(|(i, (deg, s))| Cell { id: i, degree: *deg, shape: CellShape::Simplex(s.clone()) })
        .collect();
    let mut incidence = Vec::new();
    for (_, s) in simplices.iter().filter(|(d, _)| *d > 0) {
        for i in 0..s.len() {
            let mut face = s.clone();
            face.remove(i);
            let sign = if i % 2 == 0 { 1 } else { -1 };
            incidence.push((ids[&face], ids[s], sign));
        }
    }
    CellComplex::new(name, Orientation::Simplicial, cells, &incidence).expect("simplicial complexes are valid")
}

/// Path graph on `n` vertices `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> CellComplex {
    assert!(n >= 2);
    let facets: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
    simplicial(&format!("path-{n}"), &facets)
}

/// Boundary of an `n`-gon, `n >= 3`.
pub fn polygon(n: usize) -> CellComplex {
    assert!(n >= 3);
    let facets: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    let name = if n == 6 { "hexagon".to_string() } else { format!("polygon-{n}") };
    simplicial(&name, &facets)
}

/// `n` isolated vertices.
pub fn points(n: usize) -> CellComplex {
    let facets: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    simplicial(&format!("points-{n}"), &facets)
}

/// Octahedral 2-sphere. Vertex `i` and `i + 3` are antipodal (`±x, ±y, ±z`).
pub fn octahedron() -> CellComplex {
    let mut facets = Vec::new();
    for x in [0, 3] {
        for y in [1, 4] {
            for z in [2, 5] {
                facets.push(vec![x, y, z]);
            }
        }
    }
    simplicial("octahedron", &facets)
}

/// Two disjoint `k`-gons on vertices `0..k` and `k..2k`.
pub fn two_circles(k: usize) -> CellComplex {
    assert!(k >= 3);
    let mut facets = Vec::new();
    for base in [0, k] {
        for i in 0..k {
            facets.push(vec![base + i, base + (i + 1) % k]);
        }
    }
    simplicial("two-circles", &facets)
}

/// Cubical torus: the quotient of the unit grid on `R^n` by `size_1 Z x ... x size_n Z`.
///
/// Cells are `(corner, axes)` with corner coordinates reduced modulo the sizes.
/// With all sizes equal to one this is the single-vertex torus.
pub fn cubical_torus(sizes: &[usize]) -> CellComplex {
    let n = sizes.len();
    assert!(n >= 1 && sizes.iter().all(|&s| s >= 1));
    let corners = grid_points(sizes);
    let mut keyed: Vec<(usize, Vec<i64>, Vec<usize>)> = Vec::new();
    for mask in 0u64..(1 << n) {
        let axes: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        for c in &corners {
            keyed.push((axes.len(), c.clone(), axes.clone()));
        }
    }
    keyed.sort();
    let ids: BTreeMap<(Vec<i64>, Vec<usize>), usize> =
        keyed.iter().enumerate().map(|(i, (_, c, a))| ((c.clone(), a.clone()), i)).collect();
    let cells = keyed
        .iter()
        .enumerate()
        .map(|(i, (deg, c, a))| Cell {
            id: i,
            degree: *deg,
            shape: CellShape::Cube { corner: c.clone(), axes: a.clone() },
        })
        .collect();
    let wrap = |c: &[i64]| -> Vec<i64> { c.iter().zip(sizes).map(|(x, s)| x.rem_euclid(*s as i64)).collect() };
    let mut incidence = Vec::new();
    for (_, corner, axes) in keyed.iter().filter(|(d, _, _)| *d > 0) {
        let me = ids[&(corner.clone(), axes.clone())];
        for (j, &a) in axes.iter().enumerate() {
            let mut face_axes = axes.clone();
            face_axes.remove(j);
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let mut up = corner.clone();
            up[a] += 1;
            incidence.push((ids[&(wrap(&up), face_axes.clone())], me, sign));
            incidence.push((ids[&(corner.clone(), face_axes)], me, -sign));
        }
    }
    let name = format!("torus-{}", sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("x"));
    CellComplex::new(name, Orientation::Cubical, cells, &incidence).expect("cubical tori are valid")
}

pub(crate) fn grid_points(sizes: &[usize]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..s as i64).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts() {
        let oct = octahedron();
        assert_eq!((oct.num_cells(0), oct.num_cells(1), oct.num_cells(2)), (6, 12, 8));
        let t = cubical_torus(&[3, 3]);
        assert_eq!((t.num_cells(0), t.num_cells(1), t.num_cells(2)), (9, 18, 9));
        assert_eq!(two_circles(3).betti_numbers(), vec![2, 2]);
        assert_eq!(points(2).betti_numbers(), vec![2]);
    }

    #[test]
    fn single_vertex_torus_has_zero_coboundary() {
        let t = cubical_torus(&[1, 1, 1]);
        assert_eq!(t.betti_numbers(), vec![1, 3, 3, 1]);
        assert!(t.d(0).is_zero() && t.d(1).is_zero() && t.d(2).is_zero());
    }
}
