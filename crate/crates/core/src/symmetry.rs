//! Finite symmetry groups used to shrink the labeling assignment problem.
//!
//! Elements are integer matrices acting on lattice coordinates.

use crate::error::{Error, Result};
use crate::imat::IMatrix;
use crate::lattice::{Lattice, LatticeKind};
use crate::point::LatticePoint;
use crate::sublattice::{z8_generators, SimilarSublattice};
use std::collections::BTreeSet;

/// Anything a group element can act on.
pub trait GroupAction: Sized {
    fn act(&self, g: &IMatrix) -> Self;
}

impl GroupAction for LatticePoint {
    fn act(&self, g: &IMatrix) -> Self {
        LatticePoint::from(g.mul_vec(self.coords()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    kind: LatticeKind,
    elements: Vec<IMatrix>,
}

fn generate(gens: &[IMatrix]) -> Vec<IMatrix> {
    let n = gens[0].dim();
    let mut elements = vec![IMatrix::identity(n)];
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let h = elements[i].mul(g);
            if !elements.contains(&h) {
                elements.push(h);
            }
        }
        i += 1;
    }
    elements
}

impl SymmetryGroup {
    /// The standard group for each lattice: `{±1}` for Z, rotations by multiples of
    /// π/3 for A₂ (order 6), and the groups of order 4, 8 and 16 for Z², Z⁴, Z⁸.
    pub fn for_lattice(lattice: &Lattice) -> Self {
        let kind = lattice.kind();
        let elements = match kind {
            LatticeKind::Z1 => vec![IMatrix::identity(1), IMatrix::identity(1).neg()],
            // multiplication by 1 + ω = exp(iπ/3)
            LatticeKind::A2 => generate(&[IMatrix::from_rows(&[&[1, -1], &[1, 0]])]),
            LatticeKind::Z2 => generate(&[IMatrix::from_rows(&[&[0, -1], &[1, 0]])]),
            LatticeKind::Z4 => {
                let r = IMatrix::from_rows(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, -1, 0]]);
                let s = IMatrix::from_rows(&[&[0, 0, -1, 0], &[0, 0, 0, -1], &[1, 0, 0, 0], &[0, 1, 0, 0]]);
                generate(&[r, s])
            }
            LatticeKind::Z8 => {
                let (g1, g8) = z8_generators();
                generate(&[g1, g8])
            }
        };
        SymmetryGroup { kind, elements }
    }

    /// The two-element group `{I, -I}`, valid for every lattice.
    pub fn sign_group(lattice: &Lattice) -> Self {
        let l = lattice.dim();
        SymmetryGroup { kind: lattice.kind(), elements: vec![IMatrix::identity(l), IMatrix::identity(l).neg()] }
    }

    pub fn from_elements(kind: LatticeKind, elements: Vec<IMatrix>) -> Self {
        SymmetryGroup { kind, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[IMatrix] {
        &self.elements
    }

    /// Runs every structural check; `sub`, when given, adds the sublattice checks.
    pub fn validate(&self, lattice: &Lattice, sub: Option<&SimilarSublattice>) -> Result<()> {
        let fail = |what: &str| Err(Error::GroupPropertyViolation(format!("{} group: {what}", self.kind)));
        let l = lattice.dim();
        let id = IMatrix::identity(l);
        if self.elements.iter().any(|g| g.dim() != l) {
            return fail("element of wrong dimension");
        }
        if !self.elements.contains(&id.neg()) {
            return fail("does not contain -I");
        }
        let gram = lattice.gram();
        if self.elements.iter().any(|g| g.transpose().mul(gram).mul(g) != *gram) {
            return fail("not orthogonal");
        }
        if !self.elements.contains(&id) {
            return fail("no identity");
        }
        let distinct: BTreeSet<Vec<Vec<i64>>> = self.elements.iter().map(|g| g.rows()).collect();
        if distinct.len() != self.elements.len() {
            return fail("repeated elements");
        }
        for g in &self.elements {
            if !self.elements.iter().any(|h| g.mul(h) == id) {
                return fail("missing inverse");
            }
            for h in &self.elements {
                if !self.elements.contains(&g.mul(h)) {
                    return fail("not closed under composition");
                }
            }
        }
        if self.elements.iter().any(|g| g.det().abs() != 1) {
            return fail("does not preserve the lattice");
        }
        for g in self.elements.iter().filter(|g| **g != id) {
            if g.sub(&id).det() == 0 {
                return fail("not fixed-point free");
            }
        }
        let shell_gcd = self.shell_gcd(lattice)?;
        if shell_gcd % self.order() as u64 != 0 {
            return fail(&format!("order {} does not divide shell gcd {shell_gcd}", self.order()));
        }
        if let Some(sub) = sub {
            let b = sub.basis();
            for g in &self.elements {
                let image = g.mul(b);
                for j in 0..l {
                    if !sub.contains(&image.column(j)) {
                        return fail("does not preserve the sublattice");
                    }
                }
            }
            // (g - I) invertible modulo N is enough for a free action on Λ/Λ′ \ {0}.
            for g in self.elements.iter().filter(|g| **g != id) {
                if gcd(g.sub(&id).det().abs(), sub.index()) != 1 {
                    return fail(&format!("does not act freely on the nonzero cosets of index {}", sub.index()));
                }
            }
        }
        Ok(())
    }

    fn shell_gcd(&self, lattice: &Lattice) -> Result<u64> {
        let max_norm = match lattice.dim() {
            1 => 16,
            2 => 12,
            4 => 8,
            _ => 4,
        };
        let shells = lattice.shells(max_norm)?;
        Ok(shells.nonempty().iter().filter(|(i, _)| *i > 0).fold(0, |acc, &(_, c)| gcd(acc as i64, c as i64) as u64))
    }

    /// Distinct images of `item`, sorted.
    pub fn orbit<A: GroupAction + Ord + Clone>(&self, item: &A) -> Vec<A> {
        let set: BTreeSet<A> = self.elements.iter().map(|g| item.act(g)).collect();
        set.into_iter().collect()
    }

    /// Partitions `items` into orbits. Each orbit is sorted (its first member is the
    /// representative) and orbits are ordered by representative.
    pub fn orbits<A: GroupAction + Ord + Clone>(&self, items: &[A]) -> Vec<Vec<A>> {
        let pool: BTreeSet<A> = items.iter().cloned().collect();
        let mut seen: BTreeSet<A> = BTreeSet::new();
        let mut out = Vec::new();
        for item in &pool {
            if seen.contains(item) {
                continue;
            }
            let orbit: Vec<A> = self.orbit(item).into_iter().filter(|x| pool.contains(x)).collect();
            seen.extend(orbit.iter().cloned());
            out.push(orbit);
        }
        out.sort();
        out
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
