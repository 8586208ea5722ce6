//! The hand-assigned A₂ labeling of index 31 (sublattice generated by `5 - ω`),
//! used as a worked reference design. Coordinates are in the basis `{1, ω}`.

use crate::edge::{DirectedEdge, UndirectedEdge};
use crate::error::Result;
use crate::labeling::Labeling;
use crate::lattice::{Lattice, LatticeKind};
use crate::point::LatticePoint;
use crate::sublattice::SimilarSublattice;
use crate::symmetry::SymmetryGroup;

/// Named sublattice points.
pub const SUBLATTICE_POINTS: [(&str, [i64; 2]); 13] = [
    ("O", [0, 0]),
    ("A", [5, -1]),
    ("B", [6, 5]),
    ("C", [1, 6]),
    ("D", [-5, 1]),
    ("E", [-6, -5]),
    ("F", [-1, -6]),
    ("G", [11, 4]),
    ("H", [7, 11]),
    ("I", [-4, 7]),
    ("J", [-11, -4]),
    ("K", [-7, -11]),
    ("L", [4, -7]),
];

/// `(point name, coordinates, undirected edge, directed edge)`.
pub type TableRow = (&'static str, [i64; 2], [&'static str; 2], [&'static str; 2]);

/// One row for every member of the discrete Voronoi set.
pub const TABLE: [TableRow; 31] = [
    ("O", [0, 0], ["O", "O"], ["O", "O"]),
    ("a", [1, 0], ["O", "A"], ["O", "A"]),
    ("b", [1, 1], ["O", "B"], ["O", "B"]),
    ("c", [0, 1], ["O", "C"], ["O", "C"]),
    ("d", [-1, 0], ["O", "D"], ["D", "O"]),
    ("e", [-1, -1], ["O", "E"], ["E", "O"]),
    ("f", [0, -1], ["O", "F"], ["F", "O"]),
    ("g", [3, 2], ["A", "C"], ["A", "C"]),
    ("h", [1, 3], ["B", "D"], ["B", "D"]),
    ("l", [2, -1], ["F", "B"], ["F", "B"]),
    ("j", [-3, -2], ["D", "F"], ["F", "D"]),
    ("k", [-1, -3], ["E", "A"], ["A", "E"]),
    ("i", [-2, 1], ["C", "E"], ["E", "C"]),
    ("n", [2, 1], ["A", "D"], ["A", "D"]),
    ("o", [1, 2], ["B", "E"], ["B", "E"]),
    ("p", [-1, 1], ["C", "F"], ["C", "F"]),
    ("q", [-2, -1], ["A", "D"], ["D", "A"]),
    ("r", [-1, -2], ["B", "E"], ["E", "B"]),
    ("m", [1, -1], ["C", "F"], ["F", "C"]),
    ("x", [0, 2], ["A", "I"], ["I", "A"]),
    ("s", [3, 1], ["D", "G"], ["G", "D"]),
    ("t", [2, 0], ["E", "G"], ["G", "E"]),
    ("u", [2, 3], ["E", "H"], ["H", "E"]),
    ("v", [2, 2], ["F", "H"], ["H", "F"]),
    ("ac", [1, -2], ["C", "L"], ["L", "C"]),
    ("ad", [0, -2], ["D", "L"], ["D", "L"]),
    ("y", [-3, -1], ["A", "J"], ["A", "J"]),
    ("z", [-2, 0], ["B", "J"], ["B", "J"]),
    ("aa", [-2, -3], ["B", "K"], ["B", "K"]),
    ("ab", [-2, -2], ["C", "K"], ["C", "K"]),
    ("w", [-1, 2], ["F", "I"], ["F", "I"]),
];

pub fn sublattice_point(name: &str) -> LatticePoint {
    let (_, c) = SUBLATTICE_POINTS.iter().find(|(n, _)| *n == name).expect("known sublattice point");
    LatticePoint::new(c)
}

pub fn lattice_point(name: &str) -> LatticePoint {
    let (_, c, _, _) = TABLE.iter().find(|(n, ..)| *n == name).expect("known lattice point");
    LatticePoint::new(c)
}

/// Rows as `(λ, undirected label, directed label)`.
pub fn rows() -> Vec<(LatticePoint, UndirectedEdge, DirectedEdge)> {
    TABLE
        .iter()
        .map(|(_, c, [u, v], [f, s])| {
            (
                LatticePoint::new(c),
                UndirectedEdge::new(sublattice_point(u), sublattice_point(v)),
                DirectedEdge::new(sublattice_point(f), sublattice_point(s)),
            )
        })
        .collect()
}

pub fn sublattice() -> SimilarSublattice {
    SimilarSublattice::build(&Lattice::new(LatticeKind::A2), &[5, -1]).expect("index-31 sublattice")
}

/// The hand assignment of edge classes, completed with the closest edge in each
/// class, the coloring rule and the direction rule.
pub fn labeling() -> Result<Labeling> {
    let sub = sublattice();
    let group = SymmetryGroup::for_lattice(sub.lattice());
    let assignment: Vec<(LatticePoint, LatticePoint)> = rows().into_iter().map(|(p, e, _)| (p, e.class_key())).collect();
    Labeling::from_class_assignment(&sub, &group, &assignment)
}
