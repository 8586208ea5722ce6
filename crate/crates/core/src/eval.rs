//! Closed-form rates and distortions, the side-distortion bounds, edge-length
//! statistics, the high-rate limit check and the tables behind the figures.

use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::lattice::{sphere_second_moment, Lattice, LatticeKind};
use crate::scalar::Real;
use crate::sublattice::SimilarSublattice;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Scale giving side rate `rate` at exponent `a` for a source of entropy `h`:
/// `β^L = 2^{Lh} 2^{-LR(1+a)} / (2^L ν)`.
pub fn beta_for_rate<T: Real>(lat: &Lattice, rate: T, a: T, h: T) -> T {
    let l = T::from_int(lat.dim() as i64);
    let two = T::lit(2.0);
    two.powf(h - rate * (T::one() + a) - T::one()) / lat.fundamental_volume::<T>().powf(T::one() / l)
}

/// `(R₀, R)` in bits per dimension for index `n` on `βΛ`.
pub fn analytic_rates<T: Real>(lat: &Lattice, n: i64, beta: T, h: T) -> (T, T) {
    let l = T::from_int(lat.dim() as i64);
    let log_nu = l * beta.log2() + lat.fundamental_volume::<T>().log2();
    let r0 = h - log_nu / l;
    (r0, r0 - T::from_int(n).log2() / l)
}

/// Central distortion `G(Λ) ν(βΛ)^{2/L}`.
pub fn d0_analytic<T: Real>(lat: &Lattice, beta: T) -> T {
    let l = T::from_int(lat.dim() as i64);
    lat.second_moment::<T>() * lat.fundamental_volume::<T>().powf(T::lit(2.0) / l) * beta * beta
}

/// `(1/N) Σ_{λ∈V₀(0)} d_s(λ)` on `βΛ`.
pub fn excess<T: Real>(lab: &Labeling, beta: T) -> T {
    lab.cost::<T>() / T::from_int(lab.index()) * beta * beta
}

/// `Σ_{λ∈V₀(0)} l²(e)` at unit scale.
fn sum_sq_lengths<T: Real>(lab: &Labeling) -> T {
    lab.base_edges().iter().map(|e| e.sq_length::<T>(lab.lattice())).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich<T> {
    pub lower: T,
    pub mid: T,
    pub upper: T,
}

impl<T: Real> Sandwich<T> {
    pub fn holds(&self) -> bool {
        self.lower <= self.mid && self.mid <= self.upper
    }
}

/// Side distortion with its lower bound `d̄₀ + (1/4N)Σ l²` and the upper bound that
/// replaces every midpoint offset by `r* = 2R(Λ′)`.
pub fn bound_sandwich<T: Real>(lab: &Labeling, beta: T) -> Sandwich<T> {
    let d0 = d0_analytic(lab.lattice(), beta);
    let n = T::from_int(lab.index());
    let b2 = beta * beta;
    let lower = d0 + sum_sq_lengths::<T>(lab) / (T::lit(4.0) * n) * b2;
    let r_star = T::lit(2.0 * lab.sublattice().covering_radius());
    Sandwich { lower, mid: d0 + excess(lab, beta), upper: lower + r_star * r_star * b2 }
}

/// Counts `B_i` of edges with `l²(e) = i N^{2/L} / L` next to the lattice shells `A_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeHistogram {
    pub edges: BTreeMap<i64, u64>,
    pub shells: BTreeMap<i64, u64>,
    pub last_shell: i64,
    /// `B_i = A_i` for every `i` below the last shell.
    pub inner_equal: bool,
    /// `B_K <= A_K` at the last shell.
    pub last_bounded: bool,
}

pub fn edge_histogram(lab: &Labeling) -> Result<EdgeHistogram> {
    let sub = lab.sublattice();
    let lat = lab.lattice();
    let mut edges = BTreeMap::new();
    for e in lab.base_edges() {
        let k = sub.to_sub_coords(e.difference().coords()).expect("edge endpoints lie in the sublattice");
        *edges.entry(lat.norm_index(&k)).or_insert(0u64) += 1;
    }
    let last_shell = *edges.keys().next_back().unwrap_or(&0);
    let theta = lat.shells(last_shell)?;
    let shells: BTreeMap<i64, u64> = theta.nonempty().into_iter().collect();
    let b = |i: i64| edges.get(&i).copied().unwrap_or(0);
    let inner_equal = (0..last_shell).all(|i| b(i) == theta.a(i)) && edges.keys().all(|i| theta.a(*i) > 0);
    let last_bounded = b(last_shell) <= theta.a(last_shell);
    Ok(EdgeHistogram { edges, shells, last_shell, inner_equal, last_bounded })
}

/// Everything known in closed form about one scaled design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport<T> {
    pub lattice: String,
    pub index: i64,
    pub params: Vec<i64>,
    pub beta: T,
    pub a: Option<T>,
    pub d0: T,
    pub excess: T,
    pub ds: T,
    pub lower: T,
    pub upper: T,
    pub r0: T,
    pub r: T,
    pub histogram: EdgeHistogram,
}

pub fn design_report<T: Real>(lab: &Labeling, beta: T, h: T, a: Option<T>) -> Result<DesignReport<T>> {
    let s = bound_sandwich(lab, beta);
    let (r0, r) = analytic_rates(lab.lattice(), lab.index(), beta, h);
    Ok(DesignReport {
        lattice: lab.lattice().kind().name().to_string(),
        index: lab.index(),
        params: lab.sublattice().params().to_vec(),
        beta,
        a,
        d0: d0_analytic(lab.lattice(), beta),
        excess: excess(lab, beta),
        ds: s.mid,
        lower: s.lower,
        upper: s.upper,
        r0,
        r,
        histogram: edge_histogram(lab)?,
    })
}

/// Indices `N <= max` with a similar sublattice usable for labeling.
pub fn admissible_indices(kind: LatticeKind, max: i64) -> Vec<i64> {
    let lat = Lattice::new(kind);
    (1..=max).step_by(2).filter(|&n| SimilarSublattice::find_params(&lat, n).is_ok()).collect()
}

/// Admissible indices `N <= max` equal to a whole number of lattice shells `S(K)`.
pub fn shell_filling_indices(kind: LatticeKind, max: i64) -> Vec<i64> {
    let lat = Lattice::new(kind);
    let mut norms: BTreeMap<i64, i64> = BTreeMap::new();
    // Enough norms to hold `max` points: the ball grows at least linearly in the norm bound.
    let mut bound = 1;
    loop {
        norms.clear();
        lat.for_each_in_ball(bound, |x| *norms.entry(lat.norm_index(x)).or_insert(0) += 1);
        if norms.values().sum::<i64>() > max {
            break;
        }
        bound *= 2;
    }
    let mut out = Vec::new();
    let mut s = 0;
    for c in norms.values() {
        s += c;
        if s > max {
            break;
        }
        if s % 2 == 1 && SimilarSublattice::find_params(&lat, s).is_ok() {
            out.push(s);
        }
    }
    out
}

/// One point of the high-rate limit check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub index: i64,
    pub rate: f64,
    pub beta: f64,
    /// `d̄₀ 2^{2R(1+a)} 4 / 2^{2h}`, which equals `G(Λ)`.
    pub d0_normalized: f64,
    /// `d̃ 2^{2R(1-a)} / 2^{2h}` with `d̃ = (1/4N) Σ l²(e) β²`.
    pub ratio: f64,
    pub limit: f64,
}

/// Sum over the `N` shortest sublattice vectors of their unit-scale `l²`, which
/// must make up whole shells.
fn filled_shell_sq_lengths(sub: &SimilarSublattice) -> Result<f64> {
    let lat = sub.lattice();
    let n = sub.index();
    let mut norms: BTreeMap<i64, i64> = BTreeMap::new();
    let mut bound = 1;
    while norms.values().sum::<i64>() < n {
        norms.clear();
        lat.for_each_in_ball(bound, |x| *norms.entry(lat.norm_index(x)).or_insert(0) += 1);
        bound *= 2;
    }
    let (mut count, mut weighted) = (0i64, 0i128);
    for (&i, &c) in &norms {
        if count >= n {
            break;
        }
        count += c;
        weighted += i as i128 * c as i128;
    }
    if count != n {
        return Err(Error::InadmissibleIndex(format!("{n} does not fill whole shells of {}", lat.kind())));
    }
    Ok(sub.norm_scale() as f64 * weighted as f64 / lat.dim() as f64)
}

/// Normalized side-distortion ratios along an increasing index sequence, with
/// `N = 2^{L(aR+1)}` fixing the rate and `β` following from it.
pub fn asymptotic_limit_check(kind: LatticeKind, indices: &[i64], a: f64, h: f64) -> Result<Vec<AsymptoticRow>> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidInput(format!("exponent a must lie in (0, 1), got {a}")));
    }
    let lat = Lattice::new(kind);
    let l = lat.dim() as f64;
    let g = lat.second_moment::<f64>();
    indices
        .par_iter()
        .map(|&n| {
            let sub = SimilarSublattice::for_index(&lat, n)?;
            let rate = ((n as f64).log2() / l - 1.0) / a;
            let beta = beta_for_rate(&lat, rate, a, h);
            let d_tilde = filled_shell_sq_lengths(&sub)? / (4.0 * n as f64) * beta * beta;
            let d0 = d0_analytic(&lat, beta);
            Ok(AsymptoticRow {
                index: n,
                rate,
                beta,
                d0_normalized: d0 * 2f64.powf(2.0 * rate * (1.0 + a)) * 4.0 / 2f64.powf(2.0 * h),
                ratio: d_tilde * 2f64.powf(2.0 * rate * (1.0 - a)) / 2f64.powf(2.0 * h),
                limit: sphere_second_moment::<f64>(lat.dim()),
            })
            .inspect(|row| debug_assert!((row.d0_normalized - g).abs() < 1e-9 * g))
        })
        .collect()
}

/// Plain text table with a header row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parsed numeric value at `(row, column name)`.
    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        self.rows.get(row)?.get(self.column(name)?)?.parse().ok()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    /// Array of objects keyed by column name.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj = self
                    .header
                    .iter()
                    .zip(r)
                    .map(|(h, v)| {
                        let val = v
                            .parse::<f64>()
                            .ok()
                            .and_then(|f| serde_json::Number::from_f64(f).map(serde_json::Value::Number))
                            .unwrap_or_else(|| serde_json::Value::String(v.clone()));
                        (h.clone(), val)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureKind {
    /// Second-moment ratios per dimension.
    Fig1,
    /// Central vs side distortion for A₂ and Z at a fixed product `Nν`.
    Fig9,
    /// Excess side distortion vs reuse index per dimension for cubic lattices.
    Fig10,
    /// Lower, analytic and upper side distortion for every sweep design.
    Sandwich,
    /// Normalized side-distortion ratios along shell-filling indices.
    Asymptotic,
}

impl FromStr for FigureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fig1" => Ok(FigureKind::Fig1),
            "fig9" => Ok(FigureKind::Fig9),
            "fig10" => Ok(FigureKind::Fig10),
            "sandwich" => Ok(FigureKind::Sandwich),
            "asymptotic" => Ok(FigureKind::Asymptotic),
            other => Err(Error::InvalidInput(format!("unknown figure '{other}'"))),
        }
    }
}

impl fmt::Display for FigureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FigureKind::Fig1 => "fig1",
            FigureKind::Fig9 => "fig9",
            FigureKind::Fig10 => "fig10",
            FigureKind::Sandwich => "sandwich",
            FigureKind::Asymptotic => "asymptotic",
        };
        f.write_str(s)
    }
}

/// Design points of a sweep. Fig. 9 reads `A2` and `Z1`; its `Z1` entries are
/// per-dimension indices `N_Z`, reported as `N_Z²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub indices: BTreeMap<LatticeKind, Vec<i64>>,
    /// The product `N ν(βΛ)` held fixed along each Fig. 9 curve.
    pub nu_product: f64,
    pub a: f64,
    pub entropy: f64,
}

impl Sweep {
    pub fn empty() -> Self {
        Sweep { indices: BTreeMap::new(), nu_product: 1.0, a: 0.5, entropy: 0.0 }
    }

    pub fn default_for(kind: FigureKind) -> Self {
        let mut s = Sweep::empty();
        let odd = |lo: i64, hi: i64| (lo..=hi).step_by(2).collect::<Vec<_>>();
        match kind {
            FigureKind::Fig1 => {}
            FigureKind::Fig9 => {
                s.indices.insert(LatticeKind::A2, admissible_indices(LatticeKind::A2, 200));
                s.indices.insert(LatticeKind::Z1, odd(3, 15));
            }
            FigureKind::Fig10 => {
                s.indices.insert(LatticeKind::Z1, odd(3, 25));
                s.indices.insert(LatticeKind::Z2, admissible_indices(LatticeKind::Z2, 81));
                s.indices.insert(LatticeKind::Z4, vec![9, 25, 49, 81, 625, 2401, 6561]);
                s.indices.insert(LatticeKind::Z8, vec![81, 625, 6561]);
            }
            FigureKind::Sandwich => {
                s.indices.insert(LatticeKind::A2, admissible_indices(LatticeKind::A2, 200));
                s.indices.insert(LatticeKind::Z1, odd(3, 15));
                s.indices.insert(LatticeKind::Z2, admissible_indices(LatticeKind::Z2, 25));
                s.indices.insert(LatticeKind::Z4, vec![9, 25, 49]);
                s.indices.insert(LatticeKind::Z8, vec![81]);
            }
            FigureKind::Asymptotic => {
                for k in [LatticeKind::Z1, LatticeKind::A2] {
                    let all: Vec<i64> = shell_filling_indices(k, 10_000).into_iter().filter(|&n| n > 1).collect();
                    s.indices.insert(k, log_spaced(&all, 25));
                }
            }
        }
        s
    }

    fn points(&self, kinds: &[LatticeKind]) -> Vec<(LatticeKind, i64)> {
        let mut pts: Vec<(LatticeKind, i64)> = kinds
            .iter()
            .flat_map(|k| self.indices.get(k).into_iter().flatten().map(move |&n| (*k, n)))
            .collect();
        pts.sort_by_key(|&(k, n)| (k.dim(), k.name(), n));
        pts.dedup();
        pts
    }
}

/// At most `count` entries of a sorted list, roughly evenly spaced in `log N` and
/// always including both ends.
pub fn log_spaced(sorted: &[i64], count: usize) -> Vec<i64> {
    if sorted.len() <= count || count < 2 {
        return sorted.to_vec();
    }
    let (lo, hi) = ((sorted[0] as f64).ln(), (sorted[sorted.len() - 1] as f64).ln());
    let mut out: Vec<i64> = (0..count)
        .map(|i| {
            let target = lo + (hi - lo) * i as f64 / (count - 1) as f64;
            *sorted
                .iter()
                .min_by(|a, b| {
                    let da = ((**a as f64).ln() - target).abs();
                    let db = ((**b as f64).ln() - target).abs();
                    da.total_cmp(&db)
                })
                .expect("nonempty")
        })
        .collect();
    out.dedup();
    out
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn build(kind: LatticeKind, n: i64) -> Result<Labeling> {
    Labeling::build(&SimilarSublattice::for_index(&Lattice::new(kind), n)?)
}

/// Tabulated data for one figure kind. Rows are ordered by dimension, lattice
/// name and index.
pub fn figure_data(kind: FigureKind, sweep: &Sweep) -> Result<Table> {
    match kind {
        FigureKind::Fig1 => Ok(fig1()),
        FigureKind::Fig9 => fig9(sweep),
        FigureKind::Fig10 => fig10(sweep),
        FigureKind::Sandwich => sandwich_table(sweep),
        FigureKind::Asymptotic => asymptotic_table(sweep),
    }
}

fn fig1() -> Table {
    let mut t = Table::new(&["lattice", "dim", "g_lattice", "g_cubic", "lattice_ratio", "g_sphere", "sphere_ratio"]);
    let mut kinds = LatticeKind::ALL.to_vec();
    kinds.sort_by_key(|k| (k.dim(), k.name()));
    let g1 = sphere_second_moment::<f64>(1);
    for k in kinds {
        let lat = Lattice::new(k);
        let g = lat.second_moment::<f64>();
        let gs = sphere_second_moment::<f64>(k.dim());
        let cubic = 1.0 / 12.0;
        t.rows.push(vec![
            k.name().into(),
            k.dim().to_string(),
            num(g),
            num(cubic),
            num(g / cubic),
            num(gs),
            num(gs / g1),
        ]);
    }
    t
}

fn fig9(sweep: &Sweep) -> Result<Table> {
    let mut t = Table::new(&["lattice", "n_stated", "index", "beta", "nu_product", "d0", "ds"]);
    let c = sweep.nu_product;
    let rows: Result<Vec<Vec<String>>> = sweep
        .points(&[LatticeKind::A2, LatticeKind::Z1])
        .into_par_iter()
        .map(|(kind, n)| {
            let lab = build(kind, n)?;
            let lat = lab.lattice();
            // Z designs act per dimension of a planar product code with index N_Z².
            let stated = if kind == LatticeKind::Z1 { n * n } else { n };
            let planar_volume = if kind == LatticeKind::Z1 { 1.0 } else { lat.fundamental_volume::<f64>() };
            let beta = (c / (stated as f64 * planar_volume)).sqrt();
            let planar_nu = beta * beta * planar_volume;
            let d0 = d0_analytic(lat, beta);
            Ok(vec![
                kind.name().into(),
                stated.to_string(),
                n.to_string(),
                num(beta),
                num(stated as f64 * planar_nu),
                num(d0),
                num(d0 + excess(&lab, beta)),
            ])
        })
        .collect();
    t.rows = rows?;
    Ok(t)
}

fn fig10(sweep: &Sweep) -> Result<Table> {
    let mut t = Table::new(&["lattice", "dim", "index", "reuse_per_dim", "excess", "d0", "ds"]);
    let kinds = [LatticeKind::Z1, LatticeKind::Z2, LatticeKind::Z4, LatticeKind::Z8];
    let rows: Result<Vec<Vec<String>>> = sweep
        .points(&kinds)
        .into_par_iter()
        .map(|(kind, n)| {
            let lab = build(kind, n)?;
            let ex = excess(&lab, 1.0f64);
            let d0 = d0_analytic(lab.lattice(), 1.0f64);
            Ok(vec![
                kind.name().into(),
                kind.dim().to_string(),
                n.to_string(),
                num((n as f64).powf(1.0 / kind.dim() as f64)),
                num(ex),
                num(d0),
                num(d0 + ex),
            ])
        })
        .collect();
    t.rows = rows?;
    Ok(t)
}

fn sandwich_table(sweep: &Sweep) -> Result<Table> {
    let mut t = Table::new(&["lattice", "index", "lower", "ds", "upper", "holds"]);
    let rows: Result<Vec<Vec<String>>> = sweep
        .points(&LatticeKind::ALL)
        .into_par_iter()
        .map(|(kind, n)| {
            let lab = build(kind, n)?;
            let s = bound_sandwich(&lab, 1.0f64);
            Ok(vec![kind.name().into(), n.to_string(), num(s.lower), num(s.mid), num(s.upper), s.holds().to_string()])
        })
        .collect();
    t.rows = rows?;
    Ok(t)
}

fn asymptotic_table(sweep: &Sweep) -> Result<Table> {
    let mut t = Table::new(&["lattice", "index", "rate", "beta", "d0_normalized", "ratio", "limit"]);
    for kind in LatticeKind::ALL.iter().copied().filter(|k| sweep.indices.contains_key(k)) {
        let mut ns = sweep.indices[&kind].clone();
        ns.sort_unstable();
        for row in asymptotic_limit_check(kind, &ns, sweep.a, sweep.entropy)? {
            t.rows.push(vec![
                kind.name().into(),
                row.index.to_string(),
                num(row.rate),
                num(row.beta),
                num(row.d0_normalized),
                num(row.ratio),
                num(row.limit),
            ]);
        }
    }
    Ok(t)
}
