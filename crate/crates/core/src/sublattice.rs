//! Geometrically similar sublattices `Λ′ = BΛ` and coset arithmetic.
//!
//! `B` holds the sublattice basis in lattice coordinates (one column per basis
//! vector). Similarity is certified exactly by `Bᵀ·Gram·B = m·Gram`; the index is
//! then `N = m^{L/2}`.

use crate::error::{Error, Result};
use crate::imat::IMatrix;
use crate::lattice::{isqrt, Lattice, LatticeKind, DEFAULT_ENUMERATION_CAP};
use crate::point::LatticePoint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarSublattice {
    lattice: Lattice,
    params: Vec<i64>,
    basis: IMatrix,
    norm_scale: i64,
    index: i64,
    inv_num: IMatrix,
    inv_den: i64,
}

fn quaternion_matrix(a: i64, b: i64, c: i64, d: i64) -> IMatrix {
    IMatrix::from_rows(&[&[a, -b, -c, -d], &[b, a, -d, c], &[c, d, a, -b], &[d, -c, b, a]])
}

/// Generators of the order-16 symmetry group used for Z⁸: `(γ₁, γ₈)`.
pub(crate) fn z8_generators() -> (IMatrix, IMatrix) {
    let mut g1 = IMatrix::zeros(8);
    let mut g8 = IMatrix::zeros(8);
    for o in [0, 4] {
        g1.set(o, o + 1, 1);
        g1.set(o + 1, o + 2, 1);
        g1.set(o + 2, o + 3, 1);
        g1.set(o + 3, o, -1);
    }
    for (i, j, v) in [(0, 4, 1), (1, 7, -1), (2, 6, -1), (3, 5, -1), (4, 0, -1), (5, 3, 1), (6, 2, 1), (7, 1, 1)] {
        g8.set(i, j, v);
    }
    (g1, g8)
}

fn z8_basis(a: i64, b: i64, c: i64, d: i64) -> IMatrix {
    let (g1, g8) = z8_generators();
    let v = vec![a, 0, b, 0, c, 0, d, 0];
    let mut cols = Vec::with_capacity(8);
    let mut p = v.clone();
    for _ in 0..4 {
        cols.push(p.clone());
        p = g1.mul_vec(&p);
    }
    let mut p = g8.mul_vec(&v);
    for _ in 0..4 {
        cols.push(p.clone());
        p = g8.mul_vec(&g1.mul_vec(&g8.transpose().mul_vec(&p)));
    }
    IMatrix::from_columns(&cols)
}

fn expected_arity(kind: LatticeKind) -> usize {
    match kind {
        LatticeKind::Z1 => 1,
        LatticeKind::Z2 | LatticeKind::A2 => 2,
        LatticeKind::Z4 | LatticeKind::Z8 => 4,
    }
}

impl SimilarSublattice {
    /// Builds the sublattice for the family parameters: `(n)` for Z, `(a,b)` for
    /// Z² and A₂, `(a,b,c,d)` for Z⁴ and Z⁸.
    pub fn build(lattice: &Lattice, params: &[i64]) -> Result<Self> {
        let kind = lattice.kind();
        if params.len() != expected_arity(kind) {
            return Err(Error::InadmissibleIndex(format!(
                "{kind} takes {} parameters, got {}",
                expected_arity(kind),
                params.len()
            )));
        }
        if params.iter().all(|&p| p == 0) {
            return Err(Error::InadmissibleIndex("parameters are all zero".into()));
        }
        if params.iter().any(|p| p.abs() > 1 << 20) {
            return Err(Error::InadmissibleIndex("parameters too large".into()));
        }
        let sq: i64 = params.iter().map(|p| p * p).sum();
        let (basis, m) = match kind {
            LatticeKind::Z1 => {
                let n = params[0];
                if n < 1 || n % 2 == 0 {
                    return Err(Error::InadmissibleIndex(format!("Z1 needs a positive odd n, got {n}")));
                }
                (IMatrix::from_rows(&[&[n]]), n * n)
            }
            LatticeKind::Z2 => {
                let (a, b) = (params[0], params[1]);
                if sq % 2 == 0 {
                    return Err(Error::InadmissibleIndex(format!("Z2 index {sq} is even")));
                }
                (IMatrix::from_rows(&[&[a, -b], &[b, a]]), sq)
            }
            LatticeKind::A2 => {
                let (a, b) = (params[0], params[1]);
                // u = a + bω, v = ωu = -b + (a - b)ω
                (IMatrix::from_rows(&[&[a, -b], &[b, a - b]]), a * a - a * b + b * b)
            }
            LatticeKind::Z4 => {
                if sq % 2 == 0 {
                    return Err(Error::InadmissibleIndex(format!("Z4 index {} is even", sq * sq)));
                }
                (quaternion_matrix(params[0], params[1], params[2], params[3]), sq)
            }
            LatticeKind::Z8 => (z8_basis(params[0], params[1], params[2], params[3]), sq),
        };
        let gram = lattice.gram();
        if basis.transpose().mul(gram).mul(&basis) != gram.scale(m) {
            return Err(Error::NotSimilar(format!("Bᵀ·Gram·B != {m}·Gram for {kind} {params:?}")));
        }
        let l = lattice.dim() as u32;
        let index = basis.det().abs();
        if l.is_multiple_of(2) && index != m.pow(l / 2) || l == 1 && index * index != m {
            return Err(Error::NotSimilar(format!("determinant {index} inconsistent with scale {m}")));
        }
        let inv_num = gram.adjugate().mul(&basis.transpose()).mul(gram);
        let inv_den = gram.det() * m;
        if basis.mul(&inv_num) != IMatrix::identity(l as usize).scale(inv_den) {
            return Err(Error::NotSimilar("inverse certificate failed".into()));
        }
        Ok(SimilarSublattice {
            lattice: lattice.clone(),
            params: params.to_vec(),
            basis,
            norm_scale: m,
            index,
            inv_num,
            inv_den,
        })
    }

    /// Searches the canonical parameter domain for a representation of `index`.
    pub fn find_params(lattice: &Lattice, index: i64) -> Result<Vec<i64>> {
        let kind = lattice.kind();
        let none = || Error::NoRepresentation { lattice: kind.to_string(), index };
        if index < 1 {
            return Err(Error::InadmissibleIndex(format!("index must be positive, got {index}")));
        }
        match kind {
            LatticeKind::Z1 => {
                if index % 2 == 0 {
                    return Err(Error::InadmissibleIndex(format!("Z1 index {index} is even")));
                }
                Ok(vec![index])
            }
            LatticeKind::Z2 => {
                if index % 2 == 0 {
                    return Err(Error::InadmissibleIndex(format!("Z2 index {index} is even")));
                }
                let r = isqrt(index);
                for b in (0..=r).rev() {
                    let a2 = index - b * b;
                    let a = isqrt(a2);
                    if a * a == a2 && a >= b {
                        // Larger b means smaller a: the first hit is the smallest a.
                        return Ok(vec![a, b]);
                    }
                }
                Err(none())
            }
            LatticeKind::A2 => {
                if index % 6 != 1 {
                    return Err(Error::InadmissibleIndex(format!("A2 index {index} is not 1 mod 6")));
                }
                let r = isqrt(4 * index / 3) + 1;
                for a in 1..=r {
                    for b in (-a + 1)..=0 {
                        if a * a - a * b + b * b == index {
                            return Ok(vec![a, b]);
                        }
                    }
                }
                Err(none())
            }
            LatticeKind::Z4 | LatticeKind::Z8 => {
                let root = if kind == LatticeKind::Z4 { 2 } else { 4 };
                let m = integer_root(index, root).ok_or_else(|| {
                    Error::InadmissibleIndex(format!("{kind} index {index} is not a perfect power {root}"))
                })?;
                if m % 2 == 0 {
                    return Err(Error::InadmissibleIndex(format!("{kind} index {index} is even")));
                }
                four_squares(m).ok_or_else(none)
            }
        }
    }

    pub fn for_index(lattice: &Lattice, index: i64) -> Result<Self> {
        Self::build(lattice, &Self::find_params(lattice, index)?)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn params(&self) -> &[i64] {
        &self.params
    }

    pub fn basis(&self) -> &IMatrix {
        &self.basis
    }

    /// Ratio `m` of squared lengths between `Λ′` and `Λ`.
    pub fn norm_scale(&self) -> i64 {
        self.norm_scale
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// `B⁻¹x` as a fraction with denominator `inv_den * den`.
    pub fn to_sub_coords_rational(&self, num: &[i64], den: i64) -> (Vec<i64>, i64) {
        (self.inv_num.mul_vec(num), self.inv_den * den)
    }

    /// Sublattice coordinates of `x`, if `x ∈ Λ′`.
    pub fn to_sub_coords(&self, x: &[i64]) -> Option<Vec<i64>> {
        let y = self.inv_num.mul_vec(x);
        if y.iter().all(|v| v % self.inv_den == 0) {
            Some(y.into_iter().map(|v| v / self.inv_den).collect())
        } else {
            None
        }
    }

    pub fn from_sub_coords(&self, k: &[i64]) -> LatticePoint {
        LatticePoint::from(self.basis.mul_vec(k))
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.to_sub_coords(x).is_some()
    }

    /// All sublattice points nearest to `num / den`, sorted lexicographically.
    pub fn nearest_all(&self, num: &[i64], den: i64) -> Vec<LatticePoint> {
        let (y, yden) = self.to_sub_coords_rational(num, den);
        let mut out: Vec<LatticePoint> = self
            .lattice
            .nearest_all_rational(&y, yden)
            .iter()
            .map(|k| self.from_sub_coords(k.coords()))
            .collect();
        out.sort();
        out
    }

    /// Splits `λ = λ′ + rep` with `λ′` the nearest sublattice point (lexicographically
    /// smallest on ties) and `rep ∈ V₀(0)`.
    pub fn coset_reduce(&self, p: &LatticePoint) -> (LatticePoint, LatticePoint) {
        let lp = self.nearest_all(p.coords(), 1).swap_remove(0);
        let rep = p - &lp;
        (lp, rep)
    }

    /// Squared covering radius of `Λ′`, unnormalized, as `(num, den)`.
    pub fn covering_radius_sq(&self) -> (i64, i64) {
        let (n, d) = self.lattice.covering_radius_sq();
        (n * self.norm_scale, d)
    }

    /// Normalized covering radius of `Λ′` at unit scale.
    pub fn covering_radius(&self) -> f64 {
        let (n, d) = self.covering_radius_sq();
        (n as f64 / d as f64 / self.dim() as f64).sqrt()
    }

    /// The discrete Voronoi set `V₀(0)`: one representative per coset, ordered by
    /// norm and then lexicographically.
    pub fn discrete_voronoi_set(&self) -> Result<Vec<LatticePoint>> {
        let (n, d) = self.covering_radius_sq();
        let bound = n / d;
        let mut reps = Vec::with_capacity(self.index as usize);
        let mut scanned = 0usize;
        self.lattice.for_each_in_ball(bound, |x| {
            scanned += 1;
            let nearest = self.nearest_all(x, 1);
            if nearest[0].is_zero() {
                reps.push(LatticePoint::new(x));
            }
        });
        if scanned > DEFAULT_ENUMERATION_CAP {
            return Err(Error::ResourceLimit(format!("{scanned} points scanned")));
        }
        if reps.len() as i64 != self.index {
            return Err(Error::PropertyCheckFailed(format!(
                "discrete Voronoi set has {} points, index is {}",
                reps.len(),
                self.index
            )));
        }
        reps.sort_by_key(|p| (self.lattice.norm_index(p.coords()), p.clone()));
        Ok(reps)
    }
}

fn integer_root(n: i64, k: u32) -> Option<i64> {
    let r = (n as f64).powf(1.0 / k as f64).round() as i64;
    (r.saturating_sub(1)..=r + 1).find(|&c| c >= 0 && c.checked_pow(k) == Some(n))
}

/// Lexicographically smallest `(a,b,c,d)` with `a >= b >= c >= d >= 0` and
/// `a²+b²+c²+d² = m`.
fn four_squares(m: i64) -> Option<Vec<i64>> {
    let r = isqrt(m);
    for a in 0..=r {
        for b in 0..=a {
            for c in 0..=b {
                let rest = m - a * a - b * b - c * c;
                if rest < 0 {
                    continue;
                }
                let d = isqrt(rest);
                if d * d == rest && d <= c {
                    return Some(vec![a, b, c, d]);
                }
            }
        }
    }
    None
}
