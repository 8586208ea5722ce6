mod config;

use clap::{Parser, Subcommand};
use config::{parse_list, Format, RunConfig};
use mdlq::codec::{simulate, ScaledDesign, SourceModel};
use mdlq::design_file::DesignFile;
use mdlq::eval::{self, figure_data, FigureKind, Sweep};
use mdlq::{Error, Labeling, Lattice, LatticePoint};
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mdlq", version, about = "Two-channel multiple-description lattice vector quantizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an optimal labeling and write its design file.
    Design(RunConfig),
    /// Run a source through a design and report empirical distortions and rates.
    Simulate(RunConfig),
    /// Emit a figure table, or the closed-form report of one design.
    Eval(RunConfig),
    /// Replay every property and bound check on a design file.
    Verify(RunConfig),
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Io(_) => "IoError",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Error::PropertyCheckFailed(_) => 1,
                Error::InvalidInput(_) => 2,
                Error::InadmissibleIndex(_) => 3,
                Error::NotSimilar(_) => 4,
                Error::NoRepresentation { .. } => 5,
                Error::GroupPropertyViolation(_) => 6,
                Error::SizeMismatch(_) => 7,
                Error::AsymmetricEdgeSet(_) => 8,
                Error::ZeroEdge => 9,
                Error::NotALabel(_) => 10,
                Error::ResourceLimit(_) => 11,
            },
            CliError::Io(_) => 12,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => f.write_str(m),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    let (cfg, f): (RunConfig, fn(&RunConfig) -> CliResult<()>) = match command {
        Command::Design(c) => (c, cmd_design),
        Command::Simulate(c) => (c, cmd_simulate),
        Command::Eval(c) => (c, cmd_eval),
        Command::Verify(c) => (c, cmd_verify),
    };
    let cfg = cfg.resolve()?;
    match cfg.threads()? {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidInput(format!("cannot start {t} threads: {e}")))?;
            pool.install(|| f(&cfg))
        }
        None => f(&cfg),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> CliResult<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Status lines go to stdout when the payload goes to a file, else to stderr.
fn status(cfg: &RunConfig, text: &str) {
    if cfg.out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn load_design(cfg: &RunConfig) -> CliResult<Labeling> {
    match &cfg.design {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("cannot read {}: {e}", p.display())))?;
            Ok(DesignFile::from_json(&text)?.to_labeling()?)
        }
        None => Ok(Labeling::build(&cfg.sublattice()?)?),
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Property lines for a labeling; returns whether all passed.
fn property_lines(lab: &Labeling, out: &mut String) -> bool {
    let r = lab.property_report();
    let lines = [
        ("property 1 (reuse index)", &r.reuse),
        ("property 2 (shift covariance and round trip)", &r.shift),
        ("property 3 (midpoint law and balance)", &r.midpoint),
    ];
    for (name, outcome) in lines {
        match outcome {
            None => writeln!(out, "{name}: PASS").unwrap(),
            Some(m) => writeln!(out, "{name}: FAIL ({m})").unwrap(),
        }
    }
    r.passed()
}

fn summary_header(lab: &Labeling, out: &mut String) {
    let sub = lab.sublattice();
    writeln!(out, "lattice {} index {} params {:?}", lab.lattice().kind(), sub.index(), sub.params()).unwrap();
    writeln!(out, "cost sum_ds {} (exact units {})", lab.cost::<f64>(), lab.cost_units()).unwrap();
}

fn cmd_design(cfg: &RunConfig) -> CliResult<()> {
    let lab = Labeling::build(&cfg.sublattice()?)?;
    let mut s = String::new();
    summary_header(&lab, &mut s);
    let ok = property_lines(&lab, &mut s);
    emit(cfg, &DesignFile::from_labeling(&lab).to_json())?;
    status(cfg, &s);
    if ok {
        Ok(())
    } else {
        Err(Error::PropertyCheckFailed("design properties".into()).into())
    }
}

fn cmd_simulate(cfg: &RunConfig) -> CliResult<()> {
    let lab = load_design(cfg)?;
    let beta = cfg.scale(lab.lattice())?.unwrap_or(1.0);
    let design = ScaledDesign::new(lab, beta)?;
    let source: SourceModel<f64> = cfg.source.as_deref().unwrap_or("periods:20").parse()?;
    let report = simulate(&design, &source, cfg.samples.unwrap_or(100_000), cfg.seed.unwrap_or(0))?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(cfg, &text)
}

fn cmd_eval(cfg: &RunConfig) -> CliResult<()> {
    let Some(fig) = cfg.figure.as_deref() else {
        return eval_design(cfg);
    };
    let kind: FigureKind = fig.parse()?;
    let mut sweep = Sweep::default_for(kind);
    if let Some(list) = &cfg.indices {
        sweep.indices.clear();
        sweep.indices.insert(cfg.lattice_kind()?, parse_list(list)?);
    }
    if let Some(a) = cfg.a {
        sweep.a = a;
    }
    if let Some(h) = cfg.entropy {
        sweep.entropy = h;
    }
    if let Some(c) = cfg.nu_product {
        sweep.nu_product = c;
    }
    let table = figure_data(kind, &sweep)?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&table.to_json()).expect("table serializes") + "\n",
    };
    emit(cfg, &text)
}

fn eval_design(cfg: &RunConfig) -> CliResult<()> {
    let lab = load_design(cfg)?;
    let beta = cfg.scale(lab.lattice())?.unwrap_or(1.0);
    let a = if cfg.rate.is_some() { cfg.a } else { None };
    let report = eval::design_report(&lab, beta, cfg.entropy.unwrap_or(0.0), a)?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => {
            let mut t = String::from("lattice,index,beta,d0,excess,ds,lower,upper,r0,r\n");
            writeln!(
                t,
                "{},{},{},{},{},{},{},{},{},{}",
                report.lattice,
                report.index,
                report.beta,
                report.d0,
                report.excess,
                report.ds,
                report.lower,
                report.upper,
                report.r0,
                report.r
            )
            .unwrap();
            t
        }
    };
    emit(cfg, &text)
}

/// Encodes and decodes every lattice point in the smallest ball holding at least
/// `min_points` points.
fn round_trip_ball(lab: &Labeling, min_points: usize) -> mdlq::Result<usize> {
    let lat: &Lattice = lab.lattice();
    let mut r = 1;
    let ball = loop {
        let b = lat.ball(r, mdlq::lattice::DEFAULT_ENUMERATION_CAP)?;
        if b.len() >= min_points {
            break b;
        }
        r *= 2;
    };
    for p in &ball {
        let de = lab.encode(p);
        let back: LatticePoint = lab.decode_both(&de)?;
        if back != *p {
            return Err(Error::PropertyCheckFailed(format!("round trip fails at {p:?}")));
        }
    }
    Ok(ball.len())
}

fn cmd_verify(cfg: &RunConfig) -> CliResult<()> {
    if cfg.design.is_none() {
        return Err(Error::InvalidInput("--design is required".into()).into());
    }
    let lab = load_design(cfg)?;
    let mut s = String::new();
    summary_header(&lab, &mut s);
    let mut ok = property_lines(&lab, &mut s);
    match round_trip_ball(&lab, 10_000) {
        Ok(n) => writeln!(s, "round trip on {n} points: PASS").unwrap(),
        Err(e) => {
            ok = false;
            writeln!(s, "round trip: FAIL ({e})").unwrap();
        }
    }
    let sw = eval::bound_sandwich(&lab, 1.0f64);
    ok &= sw.holds();
    writeln!(s, "bound sandwich {} <= {} <= {}: {}", sw.lower, sw.mid, sw.upper, pass(sw.holds())).unwrap();
    if lab.fills_shells() {
        let h = eval::edge_histogram(&lab)?;
        let good = h.inner_equal && h.last_bounded;
        ok &= good;
        writeln!(s, "edge lengths match lattice shells: {}", pass(good)).unwrap();
    }
    emit(cfg, &s)?;
    if ok {
        Ok(())
    } else {
        Err(Error::PropertyCheckFailed("verification".into()).into())
    }
}
