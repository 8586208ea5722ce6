//! The five supported lattices: Z, Z², Z⁴, Z⁸ and the hexagonal lattice A₂.
//!
//! Points are integer coordinate vectors in the lattice basis. Squared
//! lengths are measured with the dimension-normalized norm
//! `‖x‖² = (1/L) Σ xᵢ²`; exact integer work uses the Gram matrix scaled by
//! `gram_div` so that every entry is an integer.

use crate::error::{Error, Result};
use crate::imat::IMatrix;
use crate::point::LatticePoint;
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LatticeKind {
    Z1,
    Z2,
    Z4,
    Z8,
    A2,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 5] =
        [LatticeKind::Z1, LatticeKind::A2, LatticeKind::Z2, LatticeKind::Z4, LatticeKind::Z8];

    pub fn dim(self) -> usize {
        match self {
            LatticeKind::Z1 => 1,
            LatticeKind::Z2 | LatticeKind::A2 => 2,
            LatticeKind::Z4 => 4,
            LatticeKind::Z8 => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Z1 => "Z1",
            LatticeKind::Z2 => "Z2",
            LatticeKind::Z4 => "Z4",
            LatticeKind::Z8 => "Z8",
            LatticeKind::A2 => "A2",
        }
    }

    pub fn is_cubic(self) -> bool {
        self != LatticeKind::A2
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "Z1" | "Z" => Ok(LatticeKind::Z1),
            "Z2" => Ok(LatticeKind::Z2),
            "Z4" => Ok(LatticeKind::Z4),
            "Z8" => Ok(LatticeKind::Z8),
            "A2" => Ok(LatticeKind::A2),
            other => Err(Error::InvalidInput(format!("unknown lattice '{other}'"))),
        }
    }
}

/// Default cap on the number of points a single ball enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    kind: LatticeKind,
    gram: IMatrix,
    gram_div: i64,
}

impl Lattice {
    pub fn new(kind: LatticeKind) -> Self {
        let l = kind.dim();
        let (gram, gram_div) = match kind {
            LatticeKind::A2 => (IMatrix::from_rows(&[&[2, -1], &[-1, 2]]), 2),
            _ => (IMatrix::identity(l), 1),
        };
        Lattice { kind, gram, gram_div }
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    /// Integer Gram matrix of the basis, equal to `gram_div` times the true Gram matrix.
    pub fn gram(&self) -> &IMatrix {
        &self.gram
    }

    pub fn gram_div(&self) -> i64 {
        self.gram_div
    }

    /// `xᵀ·gram·y`, i.e. `gram_div` times the unnormalized inner product.
    #[inline]
    pub fn dot_int(&self, x: &[i64], y: &[i64]) -> i64 {
        match self.kind {
            LatticeKind::A2 => {
                2 * x[0] * y[0] - x[0] * y[1] - x[1] * y[0] + 2 * x[1] * y[1]
            }
            _ => x.iter().zip(y).map(|(a, b)| a * b).sum(),
        }
    }

    #[inline]
    pub fn qform(&self, x: &[i64]) -> i64 {
        self.dot_int(x, x)
    }

    /// Unnormalized squared norm `L‖x‖²`; always an integer on the lattice.
    #[inline]
    pub fn norm_index(&self, x: &[i64]) -> i64 {
        self.qform(x) / self.gram_div
    }

    /// Dimension-normalized squared norm.
    pub fn sq_norm<T: Real>(&self, x: &[i64]) -> T {
        T::from_int(self.qform(x)) / T::from_int(self.gram_div * self.dim() as i64)
    }

    /// Generator matrix: column `j` is the embedding of basis vector `j`.
    pub fn generator<T: Real>(&self) -> Vec<Vec<T>> {
        match self.kind {
            LatticeKind::A2 => vec![
                vec![T::one(), T::lit(-0.5)],
                vec![T::zero(), T::lit(3f64.sqrt() / 2.0)],
            ],
            _ => {
                let l = self.dim();
                (0..l)
                    .map(|i| (0..l).map(|j| if i == j { T::one() } else { T::zero() }).collect())
                    .collect()
            }
        }
    }

    pub fn fundamental_volume<T: Real>(&self) -> T {
        match self.kind {
            LatticeKind::A2 => T::lit(3f64.sqrt() / 2.0),
            _ => T::one(),
        }
    }

    pub fn embed<T: Real>(&self, p: &[i64]) -> Vec<T> {
        self.embed_rational(p, 1)
    }

    /// Embedding of the rational coordinate vector `num / den`.
    pub fn embed_rational<T: Real>(&self, num: &[i64], den: i64) -> Vec<T> {
        let d = T::from_int(den);
        match self.kind {
            LatticeKind::A2 => {
                let a = T::from_int(num[0]) / d;
                let b = T::from_int(num[1]) / d;
                vec![a - b * T::lit(0.5), b * T::lit(3f64.sqrt() / 2.0)]
            }
            _ => num.iter().map(|&c| T::from_int(c) / d).collect(),
        }
    }

    /// Embedding of a real coordinate vector.
    pub fn embed_real<T: Real>(&self, y: &[T]) -> Vec<T> {
        match self.kind {
            LatticeKind::A2 => vec![y[0] - y[1] * T::lit(0.5), y[1] * T::lit(3f64.sqrt() / 2.0)],
            _ => y.to_vec(),
        }
    }

    /// Nearest lattice point to a real vector. Equidistant candidates resolve to the
    /// lexicographically smallest coordinate vector.
    pub fn nearest_point<T: Real>(&self, x: &[T]) -> LatticePoint {
        let half = T::lit(0.5);
        match self.kind {
            LatticeKind::A2 => {
                let b = x[1] / T::lit(3f64.sqrt() / 2.0);
                let a = x[0] + b * half;
                let (fa, fb) = (a.floor(), b.floor());
                let (ia, ib) = (fa.to_i64().expect("finite input"), fb.to_i64().expect("finite input"));
                let (ra, rb) = (a - fa, b - fb);
                let mut best = (T::infinity(), 0i64, 0i64);
                // Lexicographic iteration order keeps the smallest candidate on ties.
                for da in 0..2i64 {
                    for db in 0..2i64 {
                        let u = ra - T::from_int(da);
                        let v = rb - T::from_int(db);
                        let d = u * u - u * v + v * v;
                        if d < best.0 {
                            best = (d, da, db);
                        }
                    }
                }
                LatticePoint::new(&[ia + best.1, ib + best.2])
            }
            _ => LatticePoint(
                x.iter()
                    .map(|&v| {
                        let f = v.floor();
                        let i = f.to_i64().expect("finite input");
                        if v - f > half {
                            i + 1
                        } else {
                            i
                        }
                    })
                    .collect(),
            ),
        }
    }

    /// All lattice points at minimal distance from the rational point `num / den`
    /// (lattice coordinates), sorted lexicographically.
    pub fn nearest_all_rational(&self, num: &[i64], den: i64) -> Vec<LatticePoint> {
        debug_assert!(den > 0);
        match self.kind {
            LatticeKind::A2 => {
                let q0 = num[0].div_euclid(den);
                let q1 = num[1].div_euclid(den);
                let mut best = i128::MAX;
                let mut out = Vec::with_capacity(3);
                for da in 0..2 {
                    for db in 0..2 {
                        let u = (num[0] - (q0 + da) * den) as i128;
                        let v = (num[1] - (q1 + db) * den) as i128;
                        let d = u * u - u * v + v * v;
                        if d < best {
                            best = d;
                            out.clear();
                        }
                        if d == best {
                            out.push(LatticePoint::new(&[q0 + da, q1 + db]));
                        }
                    }
                }
                out
            }
            _ => {
                let mut out: Vec<LatticePoint> = vec![LatticePoint::zero(0)];
                for &c in num {
                    let q = c.div_euclid(den);
                    let r2 = 2 * c.rem_euclid(den);
                    let choices: &[i64] = if r2 < den {
                        &[0]
                    } else if r2 > den {
                        &[1]
                    } else {
                        &[0, 1]
                    };
                    let mut next = Vec::with_capacity(out.len() * choices.len());
                    for p in &out {
                        for &d in choices {
                            let mut v = p.clone();
                            v.0.push(q + d);
                            next.push(v);
                        }
                    }
                    out = next;
                }
                out
            }
        }
    }

    /// Squared covering radius in unnormalized units, as a fraction `(num, den)`.
    pub fn covering_radius_sq(&self) -> (i64, i64) {
        match self.kind {
            LatticeKind::A2 => (1, 3),
            _ => (self.dim() as i64, 4),
        }
    }

    /// Calls `f` for every lattice point with `L‖x‖² <= max_norm`.
    pub fn for_each_in_ball(&self, max_norm: i64, mut f: impl FnMut(&[i64])) {
        if max_norm < 0 {
            return;
        }
        match self.kind {
            LatticeKind::A2 => {
                // a² - ab + b² >= 3a²/4, and symmetrically for b.
                let r = isqrt(4 * max_norm / 3) + 1;
                for a in -r..=r {
                    for b in -r..=r {
                        if a * a - a * b + b * b <= max_norm {
                            f(&[a, b]);
                        }
                    }
                }
            }
            _ => {
                let l = self.dim();
                let mut x = vec![0i64; l];
                enumerate_cubic(&mut x, 0, max_norm, &mut f);
            }
        }
    }

    pub fn ball(&self, max_norm: i64, cap: usize) -> Result<Vec<LatticePoint>> {
        let mut out = Vec::new();
        let mut over = false;
        self.for_each_in_ball(max_norm, |x| {
            if out.len() < cap {
                out.push(LatticePoint::new(x));
            } else {
                over = true;
            }
        });
        if over {
            return Err(Error::ResourceLimit(format!(
                "ball of norm {max_norm} in {} exceeds {cap} points",
                self.kind
            )));
        }
        Ok(out)
    }

    pub fn shells(&self, max_norm: i64) -> Result<ThetaShells> {
        self.shells_capped(max_norm, DEFAULT_ENUMERATION_CAP)
    }

    /// Exact shell counts `A[i]`, `0 <= i <= max_norm`, by exhaustive enumeration.
    pub fn shells_capped(&self, max_norm: i64, cap: usize) -> Result<ThetaShells> {
        if max_norm < 0 {
            return Err(Error::InvalidInput("max_norm must be nonnegative".into()));
        }
        let estimate = unit_ball_volume(self.dim()) * (max_norm as f64 + 1.0).powf(self.dim() as f64 / 2.0)
            / self.fundamental_volume::<f64>();
        if estimate > 2.0 * cap as f64 {
            return Err(Error::ResourceLimit(format!(
                "about {estimate:.0} points up to norm {max_norm}, cap is {cap}"
            )));
        }
        let mut counts = vec![0u64; max_norm as usize + 1];
        let mut total = 0usize;
        self.for_each_in_ball(max_norm, |x| {
            counts[self.norm_index(x) as usize] += 1;
            total += 1;
        });
        if total > cap {
            return Err(Error::ResourceLimit(format!("{total} points exceeds cap {cap}")));
        }
        Ok(ThetaShells { counts })
    }

    /// Normalized second moment `G(Λ) = ∫_V ‖x‖² dx / ν^{1+2/L}` at unit scale.
    pub fn second_moment<T: Real>(&self) -> T {
        self.second_moment_scaled(T::one())
    }

    /// `G(βΛ)`, computed from the Voronoi cell of the scaled lattice.
    pub fn second_moment_scaled<T: Real>(&self, beta: T) -> T {
        let l = self.dim();
        let (moment, volume) = if l == 2 {
            polygon_cell_moment(&self.relevant_vectors::<T>(beta))
        } else {
            // Cube of side β: each coordinate contributes β²/12 times the volume.
            let vol = beta.powi(l as i32);
            (vol * beta * beta / T::lit(12.0), vol)
        };
        moment / volume.powf(T::one() + T::lit(2.0) / T::from_int(l as i64))
    }

    /// Embedded Voronoi-relevant vectors (planar lattices only), sorted by angle.
    fn relevant_vectors<T: Real>(&self, beta: T) -> Vec<[T; 2]> {
        let coords: &[[i64; 2]] = match self.kind {
            LatticeKind::A2 => &[[1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1]],
            _ => &[[1, 0], [0, 1], [-1, 0], [0, -1]],
        };
        coords
            .iter()
            .map(|c| {
                let e = self.embed::<T>(c);
                [e[0] * beta, e[1] * beta]
            })
            .collect()
    }
}

fn enumerate_cubic(x: &mut [i64], i: usize, budget: i64, f: &mut impl FnMut(&[i64])) {
    if i == x.len() {
        f(x);
        return;
    }
    let r = isqrt(budget);
    for v in -r..=r {
        x[i] = v;
        enumerate_cubic(x, i + 1, budget - v * v, f);
    }
    x[i] = 0;
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Second moment (normalized norm, L = 2) and area of the polygon cut out by the
/// perpendicular bisectors of `rel`, which must be sorted by angle.
fn polygon_cell_moment<T: Real>(rel: &[[T; 2]]) -> (T, T) {
    let n = rel.len();
    let half = T::lit(0.5);
    let vertices: Vec<[T; 2]> = (0..n)
        .map(|k| {
            let (u, v) = (rel[k], rel[(k + 1) % n]);
            // Solve x·u = |u|²/2, x·v = |v|²/2.
            let (cu, cv) = ((u[0] * u[0] + u[1] * u[1]) * half, (v[0] * v[0] + v[1] * v[1]) * half);
            let det = u[0] * v[1] - u[1] * v[0];
            [(cu * v[1] - cv * u[1]) / det, (u[0] * cv - v[0] * cu) / det]
        })
        .collect();
    let mut moment = T::zero();
    let mut area = T::zero();
    for k in 0..n {
        let (a, b) = (vertices[k], vertices[(k + 1) % n]);
        let tri = (a[0] * b[1] - a[1] * b[0]) * half;
        let aa = a[0] * a[0] + a[1] * a[1];
        let bb = b[0] * b[0] + b[1] * b[1];
        let ab = a[0] * b[0] + a[1] * b[1];
        moment = moment + tri / T::lit(6.0) * (aa + bb + ab);
        area = area + tri;
    }
    (moment * half, area)
}

/// Counts `A[i]` of lattice points with unnormalized squared norm `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaShells {
    counts: Vec<u64>,
}

impl ThetaShells {
    pub fn max_norm(&self) -> i64 {
        self.counts.len() as i64 - 1
    }

    pub fn a(&self, i: i64) -> u64 {
        if i < 0 {
            return 0;
        }
        self.counts.get(i as usize).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `S(n) = Σ_{i<=n} A[i]`.
    pub fn s(&self, n: i64) -> u64 {
        self.counts.iter().take((n.max(-1) + 1) as usize).sum()
    }

    /// `(norm, count)` for every nonempty shell.
    pub fn nonempty(&self) -> Vec<(i64, u64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as i64, c))
            .collect()
    }
}

fn ln_gamma_half_integer(twice: usize) -> f64 {
    // ln Γ(twice/2) for twice >= 1.
    if twice.is_multiple_of(2) {
        (1..twice / 2).map(|k| (k as f64).ln()).sum()
    } else {
        // Γ(n + 1/2) = √π · Π_{k<n} (k + 1/2)
        let n = twice / 2;
        0.5 * std::f64::consts::PI.ln() + (0..n).map(|k| (k as f64 + 0.5).ln()).sum::<f64>()
    }
}

/// `ln Γ(L/2 + 1)`.
fn ln_gamma_half_dim_plus_one(l: usize) -> f64 {
    ln_gamma_half_integer(l + 2)
}

/// Volume of the unit Euclidean ball in `l` dimensions.
pub fn unit_ball_volume(l: usize) -> f64 {
    ((l as f64 / 2.0) * std::f64::consts::PI.ln() - ln_gamma_half_dim_plus_one(l)).exp()
}

/// Normalized second moment of the `L`-sphere, `Γ(L/2+1)^{2/L} / ((L+2)π)`.
pub fn sphere_second_moment<T: Real>(l: usize) -> T {
    assert!(l >= 1, "dimension must be positive");
    let lg = ln_gamma_half_dim_plus_one(l);
    T::lit((2.0 * lg / l as f64).exp() / ((l as f64 + 2.0) * std::f64::consts::PI))
}
