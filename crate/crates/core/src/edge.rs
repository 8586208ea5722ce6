//! Edges between sublattice points: the labels sent over the two channels.

use crate::error::{Error, Result};
use crate::imat::IMatrix;
use crate::lattice::Lattice;
use crate::point::LatticePoint;
use crate::scalar::Real;
use crate::symmetry::GroupAction;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Unordered pair of sublattice points, stored with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UndirectedEdge {
    lo: LatticePoint,
    hi: LatticePoint,
}

/// Ordered pair: `first` goes to channel 1, `second` to channel 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub first: LatticePoint,
    pub second: LatticePoint,
}

impl DirectedEdge {
    pub fn new(first: LatticePoint, second: LatticePoint) -> Self {
        DirectedEdge { first, second }
    }

    pub fn undirected(&self) -> UndirectedEdge {
        UndirectedEdge::new(self.first.clone(), self.second.clone())
    }

    pub fn reversed(&self) -> DirectedEdge {
        DirectedEdge { first: self.second.clone(), second: self.first.clone() }
    }
}

impl UndirectedEdge {
    pub fn new(p: LatticePoint, q: LatticePoint) -> Self {
        if p <= q {
            UndirectedEdge { lo: p, hi: q }
        } else {
            UndirectedEdge { lo: q, hi: p }
        }
    }

    pub fn zero(dim: usize) -> Self {
        UndirectedEdge { lo: LatticePoint::zero(dim), hi: LatticePoint::zero(dim) }
    }

    pub fn endpoints(&self) -> (&LatticePoint, &LatticePoint) {
        (&self.lo, &self.hi)
    }

    pub fn is_zero(&self) -> bool {
        self.lo == self.hi
    }

    /// `hi - lo`.
    pub fn difference(&self) -> LatticePoint {
        &self.hi - &self.lo
    }

    /// Key shared by all translates of this edge: the lexicographically larger of
    /// the two endpoint differences.
    pub fn class_key(&self) -> LatticePoint {
        self.difference().sign_canonical()
    }

    /// Twice the midpoint, which is always integral.
    pub fn midpoint2(&self) -> LatticePoint {
        &self.lo + &self.hi
    }

    pub fn shift(&self, t: &LatticePoint) -> UndirectedEdge {
        UndirectedEdge { lo: &self.lo + t, hi: &self.hi + t }
    }

    /// Normalized squared length `l²(e)`.
    pub fn sq_length<T: Real>(&self, lattice: &Lattice) -> T {
        lattice.sq_norm(self.difference().coords())
    }

    /// Coloring rule: with `j` the first coordinate where the endpoints differ and
    /// `Δ = |q_j - p_j|`, the color is `⌊(p_j + q_j) / 2Δ⌋ mod 2`.
    pub fn color(&self) -> Result<u8> {
        let (p, q) = (self.lo.coords(), self.hi.coords());
        let j = (0..p.len()).find(|&j| p[j] != q[j]).ok_or(Error::ZeroEdge)?;
        let delta = (q[j] - p[j]).abs();
        Ok((p[j] + q[j]).div_euclid(2 * delta).rem_euclid(2) as u8)
    }
}

impl GroupAction for UndirectedEdge {
    fn act(&self, g: &IMatrix) -> Self {
        UndirectedEdge::new(self.lo.act(g), self.hi.act(g))
    }
}

/// Sign of the first nonzero coordinate.
fn leading_sign(x: &[i64]) -> i64 {
    x.iter().find(|&&v| v != 0).map_or(0, |v| v.signum())
}

/// Whether `λ` is on the `p` side of the edge `{p, q}`: the sign of `⟨p - q, λ - μ⟩`,
/// with ties broken by an orientation that is antisymmetric in both `p - q` and
/// `λ - μ`. In the plane this is the sign of the cross product.
pub fn closer_to_first(lattice: &Lattice, p: &LatticePoint, q: &LatticePoint, lambda: &LatticePoint) -> bool {
    let d = p - q;
    let w2: LatticePoint = &lambda.scale(2) - &(p + q);
    match lattice.dot_int(d.coords(), w2.coords()).cmp(&0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            let (d, w) = (d.coords(), w2.coords());
            let s = if d.len() == 2 {
                (d[0] * w[1] - d[1] * w[0]).signum()
            } else {
                leading_sign(d) * leading_sign(w)
            };
            s > 0
        }
    }
}

/// Direction rule `s_c`: for color 0 the endpoint nearer `λ` is the channel-1
/// label, for color 1 it is the channel-2 label.
pub fn direct_edge(lattice: &Lattice, e: &UndirectedEdge, lambda: &LatticePoint) -> DirectedEdge {
    let (p, q) = e.endpoints();
    let Ok(color) = e.color() else {
        return DirectedEdge::new(p.clone(), q.clone());
    };
    let p_near = closer_to_first(lattice, p, q, lambda);
    if p_near == (color == 0) {
        DirectedEdge::new(p.clone(), q.clone())
    } else {
        DirectedEdge::new(q.clone(), p.clone())
    }
}

/// Point selection rule `g_c`: of the two points `λ` and `2μ - λ` labeled by the
/// undirected version of `de`, returns the one `de` is the directed label of.
pub fn select_point(lattice: &Lattice, de: &DirectedEdge, candidate: &LatticePoint) -> LatticePoint {
    let e = de.undirected();
    if e.is_zero() || direct_edge(lattice, &e, candidate) == *de {
        candidate.clone()
    } else {
        &e.midpoint2() - candidate
    }
}

/// Side distortion `d_s(λ, e)` in exact integer units of `1 / (4·gram_div·L)`:
/// `‖p - q‖²` plus `‖2λ - p - q‖²`, both as integer quadratic forms.
pub fn side_cost_units(lattice: &Lattice, e: &UndirectedEdge, lambda: &LatticePoint) -> i64 {
    let w2 = &lambda.scale(2) - &e.midpoint2();
    lattice.qform(e.difference().coords()) + lattice.qform(w2.coords())
}

/// Converts integer cost units back to a normalized squared distance.
pub fn units_to_distance<T: Real>(lattice: &Lattice, units: i64) -> T {
    T::from_int(units) / T::from_int(4 * lattice.gram_div() * lattice.dim() as i64)
}
