//! Bundled complexes, actions and periodic covers.

use serde::Serialize;

use crate::action::{cubical_generator, simplicial_generator, CochainAction, Relation};
use crate::builders;
use crate::complex::CellComplex;
use crate::cover::PeriodicCover;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    Complex,
    Action,
    Cover,
}

impl EntryKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "complex" => Some(Self::Complex),
            "action" => Some(Self::Action),
            "cover" => Some(Self::Cover),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub about: &'static str,
}

const ENTRIES: &[Entry] = &[
    Entry { name: "hexagon", kind: EntryKind::Complex, about: "six-vertex polygon, a circle" },
    Entry { name: "triangle", kind: EntryKind::Complex, about: "boundary of a triangle" },
    Entry { name: "path-3", kind: EntryKind::Complex, about: "path v0 - v1 - v2" },
    Entry { name: "two-points", kind: EntryKind::Complex, about: "two isolated vertices" },
    Entry { name: "octahedron", kind: EntryKind::Complex, about: "octahedral 2-sphere, vertices i and i+3 antipodal" },
    Entry { name: "torus-3x3", kind: EntryKind::Complex, about: "cubical 2-torus, quotient of the unit grid by 3Z x 3Z" },
    Entry { name: "two-circles", kind: EntryKind::Complex, about: "two disjoint triangles" },
    Entry { name: "hexagon-z6", kind: EntryKind::Action, about: "Z/6 rotating the hexagon" },
    Entry { name: "triangle-z3", kind: EntryKind::Action, about: "Z/3 rotating the triangle" },
    Entry { name: "two-points-swap", kind: EntryKind::Action, about: "Z/2 exchanging two points" },
    Entry { name: "octahedron-antipodal", kind: EntryKind::Action, about: "Z/2 antipodal map of the octahedron" },
    Entry { name: "torus-shift-z3", kind: EntryKind::Action, about: "Z/3 translating the 3x3 torus along x" },
    Entry { name: "torus-rot-z4", kind: EntryKind::Action, about: "Z/4 quarter turn of the 3x3 torus" },
    Entry { name: "two-circle-swap", kind: EntryKind::Action, about: "Z/2 exchanging the two circles" },
    Entry { name: "z-on-r", kind: EntryKind::Cover, about: "Z shifting the line, quotient the circle" },
    Entry { name: "z2-on-r2", kind: EntryKind::Cover, about: "Z^2 shifting the plane grid, quotient T^2" },
    Entry { name: "z3-on-r3", kind: EntryKind::Cover, about: "Z^3 shifting the space grid, quotient T^3" },
    Entry { name: "strip", kind: EntryKind::Cover, about: "Z shifting R x [0,2] with boundary lines at infinity" },
];

pub fn entries(kind: Option<EntryKind>) -> Vec<&'static Entry> {
    ENTRIES.iter().filter(|e| kind.is_none_or(|k| e.kind == k)).collect()
}

pub fn complex(name: &str) -> Option<CellComplex> {
    Some(match name {
        "hexagon" => builders::polygon(6),
        "triangle" => builders::polygon(3),
        "path-3" => builders::path(3),
        "two-points" => builders::points(2),
        "octahedron" => builders::octahedron(),
        "torus-3x3" => builders::cubical_torus(&[3, 3]),
        "two-circles" => builders::two_circles(3),
        _ => return None,
    })
}

fn cyclic(name: &str, k: CellComplex, gen: &str, vertex_map: &[usize], order: usize) -> (CellComplex, CochainAction) {
    let g = simplicial_generator(&k, gen, vertex_map).expect("bundled maps are simplicial");
    let rel = Relation { label: format!("{gen}^{order}"), factors: vec![(0, order as i64)] };
    let a = CochainAction::finite(name, &k, vec![g], &[rel], Some(order)).expect("bundled actions are valid");
    (k, a)
}

/// A bundled action together with the complex it acts on.
pub fn action(name: &str) -> Option<(CellComplex, CochainAction)> {
    Some(match name {
        "hexagon-z6" => cyclic(name, builders::polygon(6), "r", &[1, 2, 3, 4, 5, 0], 6),
        "triangle-z3" => cyclic(name, builders::polygon(3), "r", &[1, 2, 0], 3),
        "two-points-swap" => cyclic(name, builders::points(2), "s", &[1, 0], 2),
        "octahedron-antipodal" => cyclic(name, builders::octahedron(), "a", &[3, 4, 5, 0, 1, 2], 2),
        "two-circle-swap" => cyclic(name, builders::two_circles(3), "s", &[3, 4, 5, 0, 1, 2], 2),
        "torus-shift-z3" | "torus-rot-z4" => {
            let t = builders::cubical_torus(&[3, 3]);
            let (gen, linear, order): (&str, [(usize, i8); 2], usize) = if name == "torus-shift-z3" {
                ("s", [(0, 1), (1, 1)], 3)
            } else {
                ("q", [(1, 1), (0, -1)], 4)
            };
            let shift = if order == 3 { [1, 0] } else { [0, 0] };
            let g = cubical_generator(&t, &[3, 3], gen, &linear, &shift).expect("bundled maps are cubical");
            let rel = Relation { label: format!("{gen}^{order}"), factors: vec![(0, order as i64)] };
            let a = CochainAction::finite(name, &t, vec![g], &[rel], Some(order)).expect("bundled actions are valid");
            (t, a)
        }
        _ => return None,
    })
}

pub fn cover(name: &str) -> Option<PeriodicCover> {
    Some(match name {
        "z-on-r" => PeriodicCover::cubical_lattice(1),
        "z2-on-r2" => PeriodicCover::cubical_lattice(2),
        "z3-on-r3" => PeriodicCover::cubical_lattice(3),
        "strip" => PeriodicCover::strip(2),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        for e in entries(None) {
            let ok = match e.kind {
                EntryKind::Complex => complex(e.name).is_some(),
                EntryKind::Action => action(e.name).is_some(),
                EntryKind::Cover => cover(e.name).is_some(),
            };
            assert!(ok, "{}", e.name);
        }
        assert!(entries(None).len() >= 8);
        assert_eq!(entries(Some(EntryKind::Cover)).len(), 4);
    }
}
