use clap::{Args, ValueEnum};
use mdlq::{Error, Lattice, LatticeKind, Result, SimilarSublattice};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every subcommand. A `--config` file holds the same fields
/// as JSON; flags given on the command line take precedence over it.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Lattice: Z1, Z2, Z4, Z8 or A2.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Sublattice index N.
    #[arg(long)]
    pub index: Option<i64>,
    /// Explicit sublattice parameters, comma separated (e.g. 5,-1).
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Design file written by `design`.
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Scale factor applied to the lattice.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Target side rate in bits per dimension (with --a and --entropy).
    #[arg(long)]
    pub rate: Option<f64>,
    /// Exponent a in N = 2^{L(aR+1)}.
    #[arg(long)]
    pub a: Option<f64>,
    /// Source differential entropy in bits per dimension.
    #[arg(long)]
    pub entropy: Option<f64>,
    /// Source: uniform:W, gauss:S or periods:K.
    #[arg(long)]
    pub source: Option<String>,
    /// Number of source vectors to simulate.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; falls back to MDLQ_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Table to evaluate: fig1, fig9, fig10, sandwich or asymptotic.
    #[arg(long)]
    pub figure: Option<String>,
    /// Comma-separated sweep indices for --lattice, replacing the default sweep.
    #[arg(long)]
    pub indices: Option<String>,
    /// The product N·ν held fixed along the fig9 curves.
    #[arg(long)]
    pub nu_product: Option<f64>,
    /// JSON file with default values for any of these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RunConfig {
    /// Loads `--config` if given and applies the flags on top of it.
    pub fn resolve(self) -> Result<RunConfig> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        let mut base: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("malformed config {}: {e}", path.display())))?;
        overlay!(
            base, self, lattice, index, params, design, beta, rate, a, entropy, source, samples, seed, out, format,
            threads, figure, indices, nu_product
        );
        Ok(base)
    }

    pub fn threads(&self) -> Result<Option<usize>> {
        if let Some(t) = self.threads {
            return Ok(Some(t));
        }
        match std::env::var("MDLQ_THREADS") {
            Ok(v) if !v.trim().is_empty() => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidInput(format!("MDLQ_THREADS must be a positive integer, got '{v}'"))),
            _ => Ok(None),
        }
    }

    pub fn lattice_kind(&self) -> Result<LatticeKind> {
        self.lattice.as_deref().ok_or_else(|| Error::InvalidInput("--lattice is required".into()))?.parse()
    }

    /// The sublattice named by `--params`, or else by `--index`.
    pub fn sublattice(&self) -> Result<SimilarSublattice> {
        let lat = Lattice::new(self.lattice_kind()?);
        match (&self.params, self.index) {
            (Some(p), index) => {
                let params = parse_list(p)?;
                let sub = SimilarSublattice::build(&lat, &params)?;
                if let Some(n) = index {
                    if n != sub.index() {
                        return Err(Error::InvalidInput(format!("parameters give index {}, not {n}", sub.index())));
                    }
                }
                Ok(sub)
            }
            (None, Some(n)) => SimilarSublattice::for_index(&lat, n),
            (None, None) => Err(Error::InvalidInput("--index or --params is required".into())),
        }
    }

    /// `Some(β)` from `--beta` or the rate target, `None` when neither is given.
    pub fn scale(&self, lat: &Lattice) -> Result<Option<f64>> {
        let target = [self.rate, self.a, self.entropy];
        match (self.beta, self.rate.is_some()) {
            (Some(_), true) => Err(Error::InvalidInput("--beta and --rate are mutually exclusive".into())),
            (Some(b), false) => Ok(Some(b)),
            (None, true) => match target {
                [Some(r), Some(a), Some(h)] => {
                    if !(a > 0.0 && a < 1.0) {
                        return Err(Error::InvalidInput(format!("--a must lie in (0, 1), got {a}")));
                    }
                    Ok(Some(mdlq::eval::beta_for_rate(lat, r, a, h)))
                }
                _ => Err(Error::InvalidInput("--rate needs --a and --entropy".into())),
            },
            (None, false) => Ok(None),
        }
    }
}

pub fn parse_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| Error::InvalidInput(format!("'{t}' is not an integer"))))
        .collect()
}
