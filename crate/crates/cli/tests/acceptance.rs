//! One line per acceptance criterion; the test fails if any criterion fails.

use mdlq::edge::{direct_edge, side_cost_units, units_to_distance};
use mdlq::eval::{admissible_indices, asymptotic_limit_check, bound_sandwich, figure_data, shell_filling_indices};
use mdlq::labeling::base_edge_set;
use mdlq::reference;
use mdlq::{
    sphere_second_moment, DirectedEdge, FigureKind, Labeling, Lattice, LatticeKind, LatticePoint, ScaledDesign,
    SimilarSublattice, SourceModel, Sweep, SymmetryGroup, UndirectedEdge,
};
use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

type Outcome = Result<String, String>;

fn p(c: &[i64]) -> LatticePoint {
    LatticePoint::new(c)
}

fn build(kind: LatticeKind, n: i64) -> Result<Labeling, String> {
    let sub = SimilarSublattice::for_index(&Lattice::new(kind), n).map_err(|e| format!("{kind} {n}: {e}"))?;
    Labeling::build(&sub).map_err(|e| format!("{kind} {n}: {e}"))
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let lab = reference::labeling().map_err(|e| e.to_string())?;
    let de = lab.encode(&p(&[18, 10]));
    check(de == DirectedEdge::new(p(&[23, 14]), p(&[17, 9])), || format!("encode(18+10ω) = {de:?}"))?;
    let back = lab.decode_both(&de).map_err(|e| e.to_string())?;
    check(back == p(&[18, 10]), || format!("decode gives {back:?}"))?;
    let (c, l) = (reference::sublattice_point("C"), reference::sublattice_point("L"));
    check(c == p(&[1, 6]) && l == p(&[4, -7]), || "named points".into())?;
    let cl = UndirectedEdge::new(c.clone(), l.clone());
    check(cl.color() == Ok(0), || "color of {C,L}".into())?;
    let ac = reference::lattice_point("ac");
    check(ac == p(&[1, -2]), || "point ac".into())?;
    check(lab.encode(&ac) == DirectedEdge::new(l.clone(), c.clone()), || format!("ac -> {:?}", lab.encode(&ac)))?;
    check(direct_edge(lab.lattice(), &cl, &ac) == DirectedEdge::new(l, c), || "direction rule at ac".into())?;
    let secs = start.elapsed().as_secs_f64();
    check(secs < 1.0, || format!("took {secs:.3} s"))?;
    Ok(format!("{secs:.3} s"))
}

fn property_sweep() -> Vec<(LatticeKind, i64)> {
    let mut v: Vec<(LatticeKind, i64)> = Vec::new();
    v.extend(admissible_indices(LatticeKind::A2, 200).into_iter().map(|n| (LatticeKind::A2, n)));
    v.extend(admissible_indices(LatticeKind::Z2, 49).into_iter().filter(|&n| n >= 5).map(|n| (LatticeKind::Z2, n)));
    v.extend([9, 25, 49].map(|n| (LatticeKind::Z4, n)));
    v.push((LatticeKind::Z8, 81));
    v.extend((3..=15).step_by(2).map(|n| (LatticeKind::Z1, n)));
    v
}

fn properties() -> Outcome {
    let start = Instant::now();
    let sweep = property_sweep();
    let mut min_points = usize::MAX;
    for &(kind, n) in &sweep {
        let lab = build(kind, n)?;
        let r = lab.property_report();
        check(r.passed(), || format!("{kind} {n}: {r:?}"))?;
        let lat = lab.lattice();
        let mut radius = 1;
        let ball = loop {
            let b = lat.ball(radius, 1 << 24).map_err(|e| e.to_string())?;
            if b.len() >= 10_000 {
                break b;
            }
            radius *= 2;
        };
        for x in &ball {
            let de = lab.encode(x);
            let back = lab.decode_both(&de).map_err(|e| format!("{kind} {n}: {e}"))?;
            check(back == *x, || format!("{kind} {n}: round trip fails at {x:?}"))?;
        }
        min_points = min_points.min(ball.len());
    }
    Ok(format!("{} designs, at least {min_points} round trips each, {:.1} s", sweep.len(), start.elapsed().as_secs_f64()))
}

/// Side distortion from real coordinates.
fn side_distortion(lat: &Lattice, lambda: &LatticePoint, e: &UndirectedEdge) -> f64 {
    let (a, b) = e.endpoints();
    let d2 = |q: &LatticePoint| lat.embed::<f64>((lambda - q).coords()).iter().map(|v| v * v).sum::<f64>();
    (d2(a) + d2(b)) / (2.0 * lat.dim() as f64)
}

/// Best side distortion over nearby translates of `{0, class}`.
fn best_translate(sub: &SimilarSublattice, lambda: &LatticePoint, class: &LatticePoint) -> f64 {
    let (num, den) = sub.to_sub_coords_rational(lambda.coords(), 1);
    let center: Vec<i64> = num.iter().map(|v| v.div_euclid(den)).collect();
    let base = UndirectedEdge::new(LatticePoint::zero(class.dim()), class.clone());
    let mut best = f64::INFINITY;
    let window = 3;
    let mut k = vec![-window; center.len()];
    loop {
        let shift: Vec<i64> = center.iter().zip(&k).map(|(c, d)| c + d).collect();
        best = best.min(side_distortion(sub.lattice(), lambda, &base.shift(&sub.from_sub_coords(&shift))));
        let Some(j) = (0..k.len()).find(|&j| k[j] < window) else { break };
        k[j] += 1;
        k[..j].iter_mut().for_each(|v| *v = -window);
        if k.iter().all(|&v| v == -window) {
            break;
        }
    }
    best
}

/// Minimum of `Σ d_s` over all assignments of the base edge classes to the nonzero
/// coset representatives, the zero edge staying on the origin.
fn brute_force_optimum(sub: &SimilarSublattice) -> f64 {
    let reps: Vec<LatticePoint> = sub.discrete_voronoi_set().unwrap().into_iter().filter(|r| !r.is_zero()).collect();
    let mut classes: BTreeMap<LatticePoint, usize> = BTreeMap::new();
    for e in base_edge_set(sub, &SymmetryGroup::sign_group(sub.lattice())).unwrap().edges {
        if !e.is_zero() {
            *classes.entry(e.class_key()).or_default() += 1;
        }
    }
    let keys: Vec<LatticePoint> = classes.keys().cloned().collect();
    let cost: Vec<Vec<f64>> = reps.iter().map(|r| keys.iter().map(|k| best_translate(sub, r, k)).collect()).collect();
    let mut remaining: Vec<usize> = keys.iter().map(|k| classes[k]).collect();
    fn search(i: usize, cost: &[Vec<f64>], remaining: &mut [usize], acc: f64, best: &mut f64) {
        if i == cost.len() {
            *best = best.min(acc);
            return;
        }
        for c in 0..remaining.len() {
            if remaining[c] > 0 {
                remaining[c] -= 1;
                search(i + 1, cost, remaining, acc + cost[i][c], best);
                remaining[c] += 1;
            }
        }
    }
    let mut best = f64::INFINITY;
    search(0, &cost, &mut remaining, 0.0, &mut best);
    best
}

fn optimality() -> Outcome {
    let mut notes = Vec::new();
    for (kind, n) in [(LatticeKind::Z1, 3), (LatticeKind::Z1, 5), (LatticeKind::Z1, 7), (LatticeKind::A2, 7)] {
        let lab = build(kind, n)?;
        let oracle = brute_force_optimum(lab.sublattice());
        let got = lab.cost::<f64>();
        check((got - oracle).abs() < 1e-9, || format!("{kind} {n}: built {got}, brute force {oracle}"))?;
        notes.push(format!("{kind} {n} = {got}"));
    }
    let lab = build(LatticeKind::A2, 31)?;
    let lat = lab.lattice();
    let table: i64 = reference::rows().iter().map(|(pt, e, _)| side_cost_units(lat, e, pt)).sum();
    let table_cost = units_to_distance::<f64>(lat, table);
    let got = lab.cost::<f64>();
    check(got <= table_cost, || format!("A2 31: {got} > hand table {table_cost}"))?;
    notes.push(format!("A2 31 = {got} <= {table_cost}"));
    Ok(notes.join(", "))
}

fn simulation() -> Result<mdlq::SimulationReport, String> {
    let lab = build(LatticeKind::A2, 31)?;
    let design = ScaledDesign::new(lab, 1.0).map_err(|e| e.to_string())?;
    mdlq::codec::simulate(&design, &SourceModel::Periods { count: 20 }, 1_000_000, 2024).map_err(|e| e.to_string())
}

fn distortions(r: &mdlq::SimulationReport, secs: f64) -> Outcome {
    let e0 = (r.d0 - r.d0_analytic).abs() / r.d0_analytic;
    let es = (r.ds - r.ds_analytic).abs() / r.ds_analytic;
    let bal = (r.d1 - r.d2).abs() / r.ds;
    check(e0 < 0.02, || format!("d0 off by {e0:.4}"))?;
    check(es < 0.02, || format!("ds off by {es:.4}"))?;
    check(bal < 0.01, || format!("imbalance {bal:.4}"))?;
    check(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("d0 err {:.3}%, ds err {:.3}%, imbalance {:.3}%, {secs:.1} s", 100.0 * e0, 100.0 * es, 100.0 * bal))
}

fn rate_law(r: &mdlq::SimulationReport) -> Outcome {
    let e1 = r.h1 - r.r_analytic;
    let e2 = r.h2 - r.r_analytic;
    check(e1.abs() < 0.05 && e2.abs() < 0.05, || format!("H1 - R = {e1:.4}, H2 - R = {e2:.4}"))?;
    Ok(format!(
        "R = {:.4}, H1 - R = {e1:+.4}, H2 - R = {e2:+.4} (per period); without wrapping {:+.4}, {:+.4}",
        r.r_analytic,
        r.h1_raw - r.r_analytic,
        r.h2_raw - r.r_analytic
    ))
}

fn sandwich() -> Outcome {
    let mut points: BTreeMap<LatticeKind, Vec<i64>> = BTreeMap::new();
    for kind in [FigureKind::Fig9, FigureKind::Fig10, FigureKind::Sandwich] {
        for (k, ns) in Sweep::default_for(kind).indices {
            points.entry(k).or_default().extend(ns);
        }
    }
    for (k, n) in property_sweep() {
        points.entry(k).or_default().push(n);
    }
    let mut count = 0;
    for (kind, mut ns) in points {
        ns.sort_unstable();
        ns.dedup();
        for n in ns {
            let lab = build(kind, n)?;
            for beta in [0.05, 1.0, 20.0] {
                let s = bound_sandwich(&lab, beta);
                check(s.holds(), || format!("{kind} {n} at beta {beta}: {s:?}"))?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} designs at 3 scales"))
}

fn asymptotic() -> Outcome {
    let mut notes = Vec::new();
    for kind in [LatticeKind::Z1, LatticeKind::A2] {
        let all: Vec<i64> = shell_filling_indices(kind, 10_000).into_iter().filter(|&n| n > 1).collect();
        let (lo, hi) = (all[0], *all.last().unwrap());
        let rows = asymptotic_limit_check(kind, &[lo, hi], 0.5, 0.0).map_err(|e| e.to_string())?;
        let limit = sphere_second_moment::<f64>(kind.dim());
        let (first, last) = (rows[0].ratio, rows[1].ratio);
        let rel = (last - limit).abs() / limit;
        check(rel < 0.10, || format!("{kind} N={hi}: ratio {last} vs {limit}"))?;
        check((last - limit).abs() < (first - limit).abs(), || format!("{kind}: N={lo} gives {first}, N={hi} gives {last}"))?;
        notes.push(format!("{kind} N={lo}: {first:.5}, N={hi}: {last:.5}, limit {limit:.5}"));
    }
    Ok(notes.join("; "))
}

/// Second moment of the hexagonal cell by the midpoint rule, normalized by `ν^{1+2/L}`.
fn a2_second_moment_numeric(steps: usize) -> f64 {
    let normals = [[1.0, 0.0], [-0.5, 3f64.sqrt() / 2.0], [0.5, 3f64.sqrt() / 2.0]];
    let (hx, hy) = (0.5, 1.0 / 3f64.sqrt());
    let (dx, dy) = (2.0 * hx / steps as f64, 2.0 * hy / steps as f64);
    let (mut vol, mut moment) = (0.0, 0.0);
    for i in 0..steps {
        let x = -hx + (i as f64 + 0.5) * dx;
        for j in 0..steps {
            let y = -hy + (j as f64 + 0.5) * dy;
            if normals.iter().all(|n| (x * n[0] + y * n[1]).abs() <= 0.5) {
                vol += dx * dy;
                moment += (x * x + y * y) / 2.0 * dx * dy;
            }
        }
    }
    moment / (vol * vol)
}

fn figure1() -> Outcome {
    let t = figure_data(FigureKind::Fig1, &Sweep::empty()).map_err(|e| e.to_string())?;
    let g_a2 = a2_second_moment_numeric(4000);
    let row = |name: &str| t.rows.iter().position(|r| r[0] == name).ok_or(format!("no row {name}"));
    let a2 = row("A2")?;
    let emitted = t.value(a2, "lattice_ratio").unwrap();
    check((emitted - g_a2 * 12.0).abs() < 12.0 * 1e-4, || format!("A2 ratio {emitted} vs oracle {}", g_a2 * 12.0))?;
    check((t.value(a2, "g_lattice").unwrap() - g_a2).abs() < 1e-4, || "G(A2)".into())?;
    for name in ["Z1", "Z2", "Z4", "Z8"] {
        let r = row(name)?;
        check(t.value(r, "g_lattice") == Some(1.0 / 12.0), || format!("G({name})"))?;
        check(t.value(r, "lattice_ratio") == Some(1.0), || format!("{name} ratio"))?;
    }
    let s = |name: &str| -> Result<f64, String> { Ok(t.value(row(name)?, "sphere_ratio").unwrap()) };
    let (s1, s2, s8) = (s("Z1")?, s("Z2")?, s("Z8")?);
    check(s1 == 1.0 && s8 < s2 && s2 < 1.0, || format!("sphere ratios {s1} {s2} {s8}"))?;
    Ok(format!("G(A2) oracle {g_a2:.6}, ratio {emitted:.5}; sphere ratios L=2 {s2:.4}, L=8 {s8:.4}"))
}

fn cli(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_mdlq"))
        .args(args)
        .env("MDLQ_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    check(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
    Ok(o.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for (i, threads) in ["1", "1", "4"].iter().enumerate() {
        let path = dir.path().join(format!("design{i}.json"));
        cli(&["design", "--lattice", "A2", "--index", "31", "--out", path.to_str().unwrap()], threads)?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    check(files[0] == files[1] && files[1] == files[2], || "design files differ".into())?;
    let design = dir.path().join("design0.json");
    let sim = ["simulate", "--design", design.to_str().unwrap(), "--samples", "200000", "--seed", "99"];
    let runs: Vec<Vec<u8>> = ["1", "1", "3"].iter().map(|t| cli(&sim, t)).collect::<Result<_, _>>()?;
    check(runs[0] == runs[1] && runs[1] == runs[2], || "simulation reports differ".into())?;
    let fig = cli(&["eval", "--figure", "fig10"], "1")?;
    check(fig == cli(&["eval", "--figure", "fig10"], "4")?, || "fig10 tables differ".into())?;
    Ok(format!("design {} bytes, report {} bytes", files[0].len(), runs[0].len()))
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let sim_start = Instant::now();
    let report = simulation();
    let sim_secs = sim_start.elapsed().as_secs_f64();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "worked example", worked_example()),
        (2, "properties and round trips", properties()),
        (3, "optimality oracle", optimality()),
        (4, "empirical vs analytic distortion", report.clone().and_then(|r| distortions(&r, sim_secs))),
        (5, "rate law", report.and_then(|r| rate_law(&r))),
        (6, "bound sandwich", sandwich()),
        (7, "asymptotic constant", asymptotic()),
        (8, "figure 1 table", figure1()),
        (9, "determinism", determinism()),
    ];
    let mut failed = Vec::new();
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS {name} ({detail})"),
            Err(why) => {
                println!("criterion {n}: FAIL {name} ({why})");
                failed.push(*n);
            }
        }
    }
    println!("acceptance: {} of {} passed in {:.1} s", results.len() - failed.len(), results.len(), start.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
