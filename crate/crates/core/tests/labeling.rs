use mdlq::edge::{direct_edge, select_point, side_cost_units, units_to_distance};
use mdlq::labeling::{base_edge_set, closest_edge_in_class};
use mdlq::reference::{lattice_point, rows, sublattice_point};
use mdlq::{DirectedEdge, Labeling, Lattice, LatticeKind, LatticePoint, SimilarSublattice, SymmetryGroup, UndirectedEdge};
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::OnceLock;

fn p(c: &[i64]) -> LatticePoint {
    LatticePoint::new(c)
}

fn edge(a: &[i64], b: &[i64]) -> UndirectedEdge {
    UndirectedEdge::new(p(a), p(b))
}

fn design(kind: LatticeKind, n: i64) -> Labeling {
    Labeling::build(&SimilarSublattice::for_index(&Lattice::new(kind), n).unwrap()).unwrap()
}

const DESIGNS: [(LatticeKind, i64); 9] = [
    (LatticeKind::Z1, 3),
    (LatticeKind::Z1, 7),
    (LatticeKind::Z1, 13),
    (LatticeKind::A2, 7),
    (LatticeKind::A2, 31),
    (LatticeKind::Z2, 5),
    (LatticeKind::Z2, 25),
    (LatticeKind::Z4, 9),
    (LatticeKind::Z8, 81),
];

fn designs() -> &'static Vec<Labeling> {
    static CELL: OnceLock<Vec<Labeling>> = OnceLock::new();
    CELL.get_or_init(|| DESIGNS.iter().map(|&(k, n)| design(k, n)).collect())
}

/// Squared Euclidean length of a lattice vector, from the real embedding.
fn euclid2(lat: &Lattice, x: &[i64]) -> f64 {
    lat.embed::<f64>(x).iter().map(|v| v * v).sum()
}

/// `d_s(λ, {a, b})` as the mean of the two normalized squared distances.
fn side_distortion(lat: &Lattice, lambda: &LatticePoint, e: &UndirectedEdge) -> f64 {
    let (a, b) = e.endpoints();
    let l = lat.dim() as f64;
    (euclid2(lat, (lambda - a).coords()) + euclid2(lat, (lambda - b).coords())) / (2.0 * l)
}

/// Every sublattice point with sublattice coordinates within `radius` of `center`.
fn sub_window(sub: &SimilarSublattice, center: &[i64], radius: i64) -> Vec<LatticePoint> {
    let mut ks = vec![Vec::new()];
    for &c in center {
        ks = ks
            .into_iter()
            .flat_map(|k: Vec<i64>| {
                (c - radius..=c + radius).map(move |v| {
                    let mut k = k.clone();
                    k.push(v);
                    k
                })
            })
            .collect();
    }
    ks.iter().map(|k| sub.from_sub_coords(k)).collect()
}

/// Smallest side distortion over translates of `{0, class}` near `λ`.
fn best_translate(sub: &SimilarSublattice, lambda: &LatticePoint, class: &LatticePoint) -> f64 {
    let (num, den) = sub.to_sub_coords_rational(lambda.coords(), 1);
    let center: Vec<i64> = num.iter().map(|v| v.div_euclid(den)).collect();
    let base = UndirectedEdge::new(LatticePoint::zero(class.dim()), class.clone());
    sub_window(sub, &center, 3)
        .iter()
        .map(|t| side_distortion(sub.lattice(), lambda, &base.shift(t)))
        .fold(f64::INFINITY, f64::min)
}

/// Exhaustive minimum of `Σ d_s` over every assignment of the base edge classes to
/// the nonzero coset representatives; the zero edge is kept on the origin, the
/// only point it can label.
fn brute_force_optimum(sub: &SimilarSublattice) -> f64 {
    let reps: Vec<LatticePoint> = sub.discrete_voronoi_set().unwrap().into_iter().filter(|r| !r.is_zero()).collect();
    let group = SymmetryGroup::sign_group(sub.lattice());
    let mut classes: BTreeMap<LatticePoint, usize> = BTreeMap::new();
    for e in base_edge_set(sub, &group).unwrap().edges.iter().filter(|e| !e.is_zero()) {
        *classes.entry(e.class_key()).or_default() += 1;
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

#[test]
fn base_edge_set_examples() {
    for kind in LatticeKind::ALL {
        let lat = Lattice::new(kind);
        let sub = SimilarSublattice::for_index(&lat, 1).unwrap();
        let base = base_edge_set(&sub, &SymmetryGroup::for_lattice(&lat)).unwrap();
        assert_eq!(base.edges, vec![UndirectedEdge::zero(kind.dim())]);
    }
    let z2 = Lattice::new(LatticeKind::Z2);
    let sub = SimilarSublattice::for_index(&z2, 5).unwrap();
    let base = base_edge_set(&sub, &SymmetryGroup::for_lattice(&z2)).unwrap();
    assert_eq!(base.edges.len(), 5);
    assert!(base.edges[0].is_zero());
    let shortest = sub_window(&sub, &[0, 0], 1).into_iter().filter(|t| z2.qform(t.coords()) == 5).count();
    assert_eq!(shortest, 4);
    assert!(base.edges[1..].iter().all(|e| z2.qform(e.difference().coords()) == 5));
    let z1 = Lattice::new(LatticeKind::Z1);
    let sub = SimilarSublattice::for_index(&z1, 3).unwrap();
    let base = base_edge_set(&sub, &SymmetryGroup::for_lattice(&z1)).unwrap();
    assert_eq!(base.edges, vec![edge(&[0], &[0]), edge(&[-3], &[0]), edge(&[0], &[3])]);
}

#[test]
fn base_edge_set_for_index_31_comes_in_pairs() {
    let sub = mdlq::reference::sublattice();
    let base = base_edge_set(&sub, &SymmetryGroup::for_lattice(sub.lattice())).unwrap();
    assert_eq!(base.edges.len(), 31);
    assert_eq!(base.edges.iter().filter(|e| e.is_zero()).count(), 1);
    let mut classes: BTreeMap<LatticePoint, usize> = BTreeMap::new();
    for e in base.edges.iter().filter(|e| !e.is_zero()) {
        *classes.entry(e.class_key()).or_default() += 1;
    }
    assert_eq!(classes.len(), 15);
    assert!(classes.values().all(|&c| c == 2));
    // Sublattice shells of norm 31, 93, 124 and 217 hold 6, 6, 6 and 12 points.
    let sq: Vec<i64> = base.edges.iter().map(|e| sub.lattice().norm_index(e.difference().coords())).collect();
    assert_eq!(sq.iter().filter(|&&n| n == 31).count(), 6);
    assert!(base.fills_shells);
}

#[test]
fn closest_edge_examples() {
    let sub = mdlq::reference::sublattice();
    let (c, l) = (sublattice_point("C"), sublattice_point("L"));
    let class = UndirectedEdge::new(c.clone(), l.clone()).class_key();
    let got = closest_edge_in_class(&sub, &lattice_point("ac"), &class);
    assert_eq!(got, UndirectedEdge::new(c, l));
    assert_eq!(got.midpoint2(), p(&[5, -1]));
    // At the origin the chosen translate has the midpoint nearest 0.
    for (_, e, _) in rows() {
        let class = e.class_key();
        let got = closest_edge_in_class(&sub, &LatticePoint::zero(2), &class);
        let best = best_translate(&sub, &LatticePoint::zero(2), &class);
        assert!((side_distortion(sub.lattice(), &LatticePoint::zero(2), &got) - best).abs() < 1e-12);
    }
    let z2 = Lattice::new(LatticeKind::Z2);
    let sub = SimilarSublattice::for_index(&z2, 5).unwrap();
    let got = closest_edge_in_class(&sub, &p(&[1, 0]), &p(&[2, 1]));
    let best = best_translate(&sub, &p(&[1, 0]), &p(&[2, 1]));
    assert!((side_distortion(&z2, &p(&[1, 0]), &got) - best).abs() < 1e-12);
    assert_eq!(got.class_key(), p(&[2, 1]));
}

#[test]
fn color_examples() {
    assert_eq!(edge(&[1, 6], &[4, -7]).color().unwrap(), 0);
    assert_eq!(edge(&[17, 9], &[23, 14]).color().unwrap(), 1);
    assert_eq!(edge(&[0, 0], &[2, 1]).color().unwrap(), 0);
    assert_eq!(edge(&[2, 1], &[4, 2]).color().unwrap(), 1);
    assert_eq!(UndirectedEdge::zero(2).color().unwrap_err().name(), "ZeroEdge");
}

#[test]
fn direction_and_selection_examples() {
    let a2 = Lattice::new(LatticeKind::A2);
    let (c, l) = (sublattice_point("C"), sublattice_point("L"));
    let de = direct_edge(&a2, &UndirectedEdge::new(c.clone(), l.clone()), &lattice_point("ac"));
    assert_eq!(de, DirectedEdge::new(l, c));
    let e = edge(&[17, 9], &[23, 14]);
    let de = direct_edge(&a2, &e, &p(&[18, 10]));
    assert_eq!(de, DirectedEdge::new(p(&[23, 14]), p(&[17, 9])));
    assert_eq!(select_point(&a2, &de, &p(&[18, 10])), p(&[18, 10]));
    assert_eq!(select_point(&a2, &de, &p(&[22, 13])), p(&[18, 10]));
    let z = p(&[5, -1]);
    let zero = UndirectedEdge::new(z.clone(), z.clone());
    assert_eq!(direct_edge(&a2, &zero, &z), DirectedEdge::new(z.clone(), z.clone()));
    assert_eq!(select_point(&a2, &DirectedEdge::new(z.clone(), z.clone()), &z), z);
}

#[test]
fn worked_example_round_trip() {
    let lab = design(LatticeKind::A2, 31);
    let sub = lab.sublattice().clone();
    for r in sub.discrete_voronoi_set().unwrap() {
        assert_eq!(lab.decode_both(&lab.encode(&r)).unwrap(), r);
    }
    let z = p(&[5, -1]);
    assert_eq!(lab.decode_both(&DirectedEdge::new(z.clone(), z.clone())).unwrap(), z);
    assert_eq!(lab.encode(&LatticePoint::zero(2)), DirectedEdge::new(LatticePoint::zero(2), LatticePoint::zero(2)));
    let side = DirectedEdge::new(p(&[23, 14]), p(&[17, 9]));
    assert_eq!(lab.decode_side(&side, 1), p(&[23, 14]));
    assert_eq!(lab.decode_side(&side, 2), p(&[17, 9]));
}

#[test]
fn decode_rejects_foreign_labels() {
    let lab = design(LatticeKind::Z1, 3);
    let far = DirectedEdge::new(p(&[0]), p(&[9]));
    assert_eq!(lab.decode_both(&far).unwrap_err().name(), "NotALabel");
    let off = DirectedEdge::new(p(&[1]), p(&[4]));
    assert_eq!(lab.decode_both(&off).unwrap_err().name(), "NotALabel");
}

#[test]
fn single_coset_design() {
    for kind in LatticeKind::ALL {
        let lab = design(kind, 1);
        assert_eq!(lab.cost_units(), 0);
        let x = p(&vec![3; kind.dim()]);
        assert_eq!(lab.encode(&x), DirectedEdge::new(x.clone(), x.clone()));
        assert!(lab.property_report().passed());
    }
}

#[test]
fn z1_index_3_labeling() {
    let lab = design(LatticeKind::Z1, 3);
    // Points ±1 take the class of length 3; d_s(1, {0, 3}) = (1 + 4) / 2.
    assert_eq!(lab.cost_units(), 20);
    assert!((lab.cost::<f64>() - 5.0).abs() < 1e-15);
    assert!((side_distortion(lab.lattice(), &p(&[1]), &edge(&[0], &[3])) - 2.5).abs() < 1e-15);
    assert_eq!(lab.encode_undirected(&p(&[1])), edge(&[0], &[3]));
    assert_eq!(lab.encode_undirected(&p(&[-1])), edge(&[-3], &[0]));
}

#[test]
fn optimal_cost_matches_brute_force() {
    for (kind, n) in [(LatticeKind::Z1, 3), (LatticeKind::Z1, 5), (LatticeKind::Z1, 7), (LatticeKind::A2, 7)] {
        let lab = design(kind, n);
        let oracle = brute_force_optimum(lab.sublattice());
        let got = lab.cost::<f64>();
        assert!((got - oracle).abs() < 1e-9, "{kind} {n}: built {got}, brute force {oracle}");
    }
}

#[test]
fn optimal_cost_beats_hand_labeling() {
    let lab = design(LatticeKind::A2, 31);
    let lat = lab.lattice().clone();
    let literal: i64 = rows().iter().map(|(pt, e, _)| side_cost_units(&lat, e, pt)).sum();
    let hand = mdlq::reference::labeling().unwrap();
    assert!(lab.cost_units() <= hand.cost_units());
    assert!(hand.cost_units() <= literal);
    assert_eq!(units_to_distance::<f64>(&lat, literal), 540.0);
    assert_eq!(lab.cost::<f64>(), 528.0);
}

#[test]
fn designs_pass_every_property() {
    for lab in designs() {
        let r = lab.property_report();
        assert!(r.passed(), "{} {}: {r:?}", lab.lattice().kind(), lab.index());
        lab.verify().unwrap();
    }
}

/// Counts labels of `vertex` among all points near it.
fn reuse_by_enumeration(lab: &Labeling, vertex: &LatticePoint) -> (usize, usize) {
    let lat = lab.lattice();
    let (mut first, mut second) = (0, 0);
    for d in lat.ball(lab.label_radius_norm(), 1 << 22).unwrap() {
        let de = lab.encode(&(vertex + &d));
        first += (de.first == *vertex) as usize;
        second += (de.second == *vertex) as usize;
    }
    (first, second)
}

#[test]
fn reuse_counts_match_enumeration() {
    for lab in designs().iter().filter(|l| l.lattice().dim() <= 4) {
        let sub = lab.sublattice();
        let l = sub.dim();
        let vertices = [vec![0; l], vec![1; l], (0..l as i64).map(|j| 2 - 3 * j).collect()];
        for k in vertices {
            let v = sub.from_sub_coords(&k);
            let counts = lab.reuse_counts(&v);
            assert_eq!((counts.first, counts.second), reuse_by_enumeration(lab, &v), "{} {}", lab.lattice().kind(), lab.index());
            assert_eq!(counts.first as i64, lab.index());
            assert_eq!(counts.second as i64, lab.index());
        }
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

#[test]
fn channel_excess_balances_over_a_period() {
    // Colors repeat when the leading coordinate of an edge moves by twice its
    // leading difference, and N·Zᴸ lies in the sublattice, so the box of side
    // 2·D·N (D the lcm of leading differences) is a period of the labeling.
    let mut checked = 0;
    for lab in designs() {
        let lat = lab.lattice();
        let l = lat.dim();
        let d = lab
            .base_edges()
            .iter()
            .filter(|e| !e.is_zero())
            .map(|e| e.difference().coords().iter().find(|&&v| v != 0).unwrap().abs())
            .fold(1, lcm);
        let side = 2 * d * lab.index();
        if (side as f64).powi(l as i32) > 2e6 {
            continue;
        }
        let (mut s1, mut s2) = (0i64, 0i64);
        let mut x = vec![0i64; l];
        loop {
            let de = lab.encode(&p(&x));
            s1 += lat.qform((&p(&x) - &de.first).coords());
            s2 += lat.qform((&p(&x) - &de.second).coords());
            let Some(j) = (0..l).find(|&j| x[j] + 1 < side) else { break };
            x[j] += 1;
            x[..j].iter_mut().for_each(|v| *v = 0);
        }
        assert_eq!(s1, s2, "{} {}", lat.kind(), lab.index());
        checked += 1;
    }
    assert!(checked >= 5, "only {checked} designs small enough");
}

fn design_strategy() -> impl Strategy<Value = usize> {
    0..DESIGNS.len()
}

fn point_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-60i64..60, 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn round_trip(d in design_strategy(), c in point_strategy()) {
        let lab = &designs()[d];
        let x = p(&c[..lab.lattice().dim()]);
        let de = lab.encode(&x);
        prop_assert_eq!(lab.decode_both(&de).unwrap(), x.clone());
        prop_assert!(lab.sublattice().contains(de.first.coords()));
        prop_assert!(lab.sublattice().contains(de.second.coords()));
    }

    #[test]
    fn shift_covariance(d in design_strategy(), c in point_strategy(), k in prop::collection::vec(-5i64..5, 8)) {
        let lab = &designs()[d];
        let l = lab.lattice().dim();
        let x = p(&c[..l]);
        let t = lab.sublattice().from_sub_coords(&k[..l]);
        let e = lab.encode_undirected(&x);
        prop_assert_eq!(lab.encode_undirected(&(&x + &t)), e.shift(&t));
    }

    #[test]
    fn colors_alternate_along_lines(d in design_strategy(), a in prop::collection::vec(-9i64..9, 8), k in prop::collection::vec(-4i64..4, 8)) {
        let sub = designs()[d].sublattice();
        let l = sub.dim();
        let delta = sub.from_sub_coords(&k[..l]);
        prop_assume!(!delta.is_zero());
        let start = sub.from_sub_coords(&a[..l]);
        let e0 = UndirectedEdge::new(start.clone(), &start + &delta);
        let e1 = e0.shift(&delta);
        let e2 = e1.shift(&delta);
        let (c0, c1, c2) = (e0.color().unwrap(), e1.color().unwrap(), e2.color().unwrap());
        prop_assert_ne!(c0, c1);
        prop_assert_eq!(c0, c2);
    }

    #[test]
    fn parallelogram_identity(d in design_strategy(), lam in point_strategy(), a in point_strategy(), b in point_strategy()) {
        let lat = designs()[d].lattice();
        let l = lat.dim();
        let (lam, a, b) = (p(&lam[..l]), p(&a[..l]), p(&b[..l]));
        let e = UndirectedEdge::new(a.clone(), b.clone());
        let ds: f64 = units_to_distance(lat, side_cost_units(lat, &e, &lam));
        let l2 = euclid2(lat, (&a - &b).coords()) / l as f64;
        let mu: Vec<f64> = lat.embed_rational(e.midpoint2().coords(), 2);
        let x: Vec<f64> = lat.embed(lam.coords());
        let r2: f64 = x.iter().zip(&mu).map(|(u, v)| (u - v) * (u - v)).sum::<f64>() / l as f64;
        let rhs = 0.5 * l2 + 2.0 * r2;
        prop_assert!((2.0 * ds - rhs).abs() <= 1e-12 * rhs.max(1.0), "{} vs {}", 2.0 * ds, rhs);
        prop_assert!((ds - side_distortion(lat, &lam, &e)).abs() <= 1e-12 * ds.max(1.0));
    }

    #[test]
    fn closest_edge_matches_window_search(d in design_strategy(), c in point_strategy(), pick in 0usize..1000) {
        let lab = &designs()[d];
        prop_assume!(lab.lattice().dim() <= 4);
        let sub = lab.sublattice();
        let lam = p(&c[..sub.dim()]);
        prop_assume!(!lam.is_zero());
        let class = lab.base_edges()[pick % lab.base_edges().len()].class_key();
        let got = closest_edge_in_class(sub, &lam, &class);
        prop_assert_eq!(got.class_key(), class.clone());
        let best = best_translate(sub, &lam, &class);
        prop_assert!((side_distortion(sub.lattice(), &lam, &got) - best).abs() < 1e-9);
        // Antisymmetry of the tie rule.
        prop_assert_eq!(closest_edge_in_class(sub, &-&lam, &class), UndirectedEdge::new(-got.endpoints().0, -got.endpoints().1));
    }
}
