//! Scaled encoder/decoder pipeline over real-valued sources and its Monte-Carlo harness.

use crate::edge::DirectedEdge;
use crate::error::{Error, Result};
use crate::eval;
use crate::labeling::Labeling;
use crate::point::LatticePoint;
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Samples per independently seeded chunk. Chunking depends only on the sample
/// count, so results are identical for any number of worker threads.
const CHUNK: u64 = 1 << 14;

/// A labeling applied to the scaled lattice `βΛ`.
#[derive(Clone, Debug)]
pub struct ScaledDesign<T: Real> {
    labeling: Labeling,
    beta: T,
}

/// Which descriptions reached the decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Received {
    Both,
    Channel1,
    Channel2,
}

impl<T: Real> ScaledDesign<T> {
    pub fn new(labeling: Labeling, beta: T) -> Result<Self> {
        if !(beta > T::zero() && beta.is_finite()) {
            return Err(Error::InvalidInput(format!("scale must be positive and finite, got {beta}")));
        }
        Ok(ScaledDesign { labeling, beta })
    }

    /// Scale chosen for a target side rate `rate` with exponent `a` and source entropy `h`.
    pub fn for_rate(labeling: Labeling, rate: T, a: T, h: T) -> Result<Self> {
        let beta = eval::beta_for_rate(labeling.lattice(), rate, a, h);
        Self::new(labeling, beta)
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.labeling.lattice().dim()
    }

    /// `ν(βΛ) = β^L ν(Λ)`.
    pub fn cell_volume(&self) -> T {
        self.beta.powi(self.dim() as i32) * self.labeling.lattice().fundamental_volume::<T>()
    }

    pub fn quantize(&self, x: &[T]) -> LatticePoint {
        let scaled: Vec<T> = x.iter().map(|&v| v / self.beta).collect();
        self.labeling.lattice().nearest_point(&scaled)
    }

    /// Real-space position of a lattice point of `βΛ`.
    pub fn position(&self, p: &LatticePoint) -> Vec<T> {
        self.labeling.lattice().embed::<T>(p.coords()).into_iter().map(|v| v * self.beta).collect()
    }

    /// Quantized point and its two descriptions.
    pub fn encode_vector(&self, x: &[T]) -> (LatticePoint, DirectedEdge) {
        let lambda = self.quantize(x);
        let de = self.labeling.encode(&lambda);
        (lambda, de)
    }

    pub fn reconstruct(&self, received: Received, payload: &DirectedEdge) -> Result<Vec<T>> {
        let p = match received {
            Received::Both => self.labeling.decode_both(payload)?,
            Received::Channel1 => payload.first.clone(),
            Received::Channel2 => payload.second.clone(),
        };
        Ok(self.position(&p))
    }

    /// Dimension-normalized squared distance between `x` and a point of `βΛ`.
    fn distortion(&self, x: &[T], p: &LatticePoint) -> f64 {
        let y = self.position(p);
        let s: f64 = x.iter().zip(&y).map(|(a, b)| (*a - *b).to_f64().unwrap().powi(2)).sum();
        s / x.len() as f64
    }
}

/// Memoryless source models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SourceModel<T: Real> {
    /// i.i.d. uniform on `[-w, w]` per coordinate.
    Uniform { halfwidth: T },
    /// i.i.d. zero-mean Gaussian.
    Gaussian { sigma: T },
    /// Uniform on the parallelotope spanned by `count` periods of each sublattice
    /// basis vector, so every coset is equally likely and the support tiles
    /// exactly by sublattice cells.
    Periods { count: u32 },
}

impl<T: Real> SourceModel<T> {
    /// Differential entropy per dimension in bits.
    pub fn entropy_bits(&self, design: &ScaledDesign<T>) -> T {
        let two = T::lit(2.0);
        match *self {
            SourceModel::Uniform { halfwidth } => (two * halfwidth).log2(),
            SourceModel::Gaussian { sigma } => {
                T::lit(0.5) * (two * T::lit(std::f64::consts::PI) * T::lit(std::f64::consts::E) * sigma * sigma).log2()
            }
            SourceModel::Periods { count } => {
                let l = T::from_int(design.dim() as i64);
                let cells = T::from_int(count as i64).log2() * l + T::from_int(design.labeling.index()).log2();
                (cells + design.cell_volume().log2()) / l
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            SourceModel::Uniform { halfwidth } => halfwidth > T::zero() && halfwidth.is_finite(),
            SourceModel::Gaussian { sigma } => sigma > T::zero() && sigma.is_finite(),
            SourceModel::Periods { count } => count > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("bad source parameters: {self}")))
        }
    }

    fn sample(&self, design: &ScaledDesign<T>, rng: &mut ChaCha8Rng, out: &mut [T]) {
        match *self {
            SourceModel::Uniform { halfwidth } => {
                for v in out.iter_mut() {
                    *v = T::lit(rng.gen::<f64>() * 2.0 - 1.0) * halfwidth;
                }
            }
            SourceModel::Gaussian { sigma } => {
                for v in out.iter_mut() {
                    *v = T::lit(rng.sample::<f64, _>(StandardNormal)) * sigma;
                }
            }
            SourceModel::Periods { count } => {
                let sub = design.labeling.sublattice();
                let b = sub.basis();
                let l = out.len();
                let u: Vec<f64> = (0..l).map(|_| rng.gen::<f64>() * count as f64).collect();
                let y: Vec<T> = (0..l)
                    .map(|i| T::lit((0..l).map(|j| b.get(i, j) as f64 * u[j]).sum::<f64>()))
                    .collect();
                for (v, e) in out.iter_mut().zip(sub.lattice().embed_real(&y)) {
                    *v = e * design.beta;
                }
            }
        }
    }
}

impl<T: Real> fmt::Display for SourceModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceModel::Uniform { halfwidth } => write!(f, "uniform:{halfwidth}"),
            SourceModel::Gaussian { sigma } => write!(f, "gauss:{sigma}"),
            SourceModel::Periods { count } => write!(f, "periods:{count}"),
        }
    }
}

impl<T: Real> FromStr for SourceModel<T> {
    type Err = Error;

    /// Parses `uniform:W`, `gauss:S` or `periods:K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("source must be uniform:W, gauss:S or periods:K, got '{s}'"));
        let (kind, value) = s.trim().split_once(':').ok_or_else(bad)?;
        let model = match kind.to_ascii_lowercase().as_str() {
            "uniform" => SourceModel::Uniform { halfwidth: T::lit(value.parse::<f64>().map_err(|_| bad())?) },
            "gauss" | "gaussian" => SourceModel::Gaussian { sigma: T::lit(value.parse::<f64>().map_err(|_| bad())?) },
            "periods" => SourceModel::Periods { count: value.parse().map_err(|_| bad())? },
            _ => return Err(bad()),
        };
        model.validate()?;
        Ok(model)
    }
}

/// Empirical and analytic figures of one simulation run. Entropies and rates are
/// in bits per dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema: u32,
    pub lattice: String,
    pub params: Vec<i64>,
    pub index: i64,
    pub beta: f64,
    pub source: String,
    pub n: u64,
    pub seed: u64,
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub ds: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    #[serde(rename = "H0")]
    pub h0: f64,
    /// Label entropies before reduction modulo the support period; equal to
    /// `H1`/`H2` for sources without a periodic support.
    #[serde(rename = "H1_raw")]
    pub h1_raw: f64,
    #[serde(rename = "H2_raw")]
    pub h2_raw: f64,
    pub occupied_cells: u64,
    pub d0_analytic: f64,
    pub ds_analytic: f64,
    #[serde(rename = "R0_analytic")]
    pub r0_analytic: f64,
    #[serde(rename = "R_analytic")]
    pub r_analytic: f64,
}

#[derive(Default)]
struct ChunkStats {
    d: [f64; 3],
    counts: [HashMap<LatticePoint, u64>; 3],
}

impl ChunkStats {
    fn merge(&mut self, other: ChunkStats) {
        for k in 0..3 {
            self.d[k] += other.d[k];
            for (p, c) in other.counts[k].iter() {
                *self.counts[k].entry(p.clone()).or_insert(0) += c;
            }
        }
    }
}

/// Plug-in entropy in bits; terms are summed in sorted order for reproducibility.
fn entropy_bits(counts: &HashMap<LatticePoint, u64>, n: u64) -> f64 {
    let mut c: Vec<u64> = counts.values().copied().collect();
    c.sort_unstable();
    let n = n as f64;
    c.iter()
        .map(|&k| {
            let p = k as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Folds counts of points of `Λ` modulo `count·Λ′`.
fn wrap_counts(lab: &Labeling, counts: &HashMap<LatticePoint, u64>, count: u32) -> HashMap<LatticePoint, u64> {
    let sub = lab.sublattice();
    let mut out = HashMap::new();
    for (p, c) in counts {
        let (lp, rep) = sub.coset_reduce(p);
        let k: Vec<i64> = sub
            .to_sub_coords(lp.coords())
            .expect("nearest sublattice point")
            .into_iter()
            .map(|v| v.rem_euclid(count as i64))
            .collect();
        *out.entry(&sub.from_sub_coords(&k) + &rep).or_insert(0) += c;
    }
    out
}

/// Runs `n` source vectors through the design on the current rayon pool. Chunk `c`
/// draws from the ChaCha stream `c` of `seed`, so the report depends only on
/// `(design, source, n, seed)`.
pub fn simulate<T: Real>(design: &ScaledDesign<T>, source: &SourceModel<T>, n: u64, seed: u64) -> Result<SimulationReport> {
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    source.validate()?;
    let l = design.dim();
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(n - c * CHUNK);
            let mut stats = ChunkStats::default();
            let mut x = vec![T::zero(); l];
            for _ in 0..len {
                source.sample(design, &mut rng, &mut x);
                let (lambda, de) = design.encode_vector(&x);
                stats.d[0] += design.distortion(&x, &lambda);
                stats.d[1] += design.distortion(&x, &de.first);
                stats.d[2] += design.distortion(&x, &de.second);
                for (k, p) in [lambda, de.first, de.second].into_iter().enumerate() {
                    *stats.counts[k].entry(p).or_insert(0) += 1;
                }
            }
            stats
        })
        .collect();
    let mut total = ChunkStats::default();
    for part in parts {
        total.merge(part);
    }
    let nf = n as f64;
    let [d0, d1, d2] = total.d.map(|s| s / nf);
    let lf = l as f64;
    let lab = design.labeling();
    let raw: Vec<f64> = total.counts.iter().map(|c| entropy_bits(c, n) / lf).collect();
    // A support made of whole sublattice periods is read as one period of a
    // periodic source, so labels are compared modulo that period.
    let periodic: Vec<f64> = match *source {
        SourceModel::Periods { count } => {
            total.counts.iter().map(|c| entropy_bits(&wrap_counts(lab, c, count), n) / lf).collect()
        }
        _ => raw.clone(),
    };
    let h = source.entropy_bits(design).to_f64().unwrap();
    let beta = design.beta().to_f64().unwrap();
    let (r0, r) = eval::analytic_rates(lab.lattice(), lab.index(), beta, h);
    let d0_analytic = eval::d0_analytic(lab.lattice(), beta);
    Ok(SimulationReport {
        schema: 1,
        lattice: lab.lattice().kind().name().to_string(),
        params: lab.sublattice().params().to_vec(),
        index: lab.index(),
        beta,
        source: source.to_string(),
        n,
        seed,
        d0,
        d1,
        d2,
        ds: (d1 + d2) / 2.0,
        h1: periodic[1],
        h2: periodic[2],
        h0: periodic[0],
        h1_raw: raw[1],
        h2_raw: raw[2],
        occupied_cells: total.counts[0].len() as u64,
        d0_analytic,
        ds_analytic: d0_analytic + eval::excess(lab, beta),
        r0_analytic: r0,
        r_analytic: r,
    })
}
