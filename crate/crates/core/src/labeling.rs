//! The labeling function `α: Λ → Λ′ × Λ′` and its inverse.
//!
//! A labeling is stored as one base-frame undirected edge per coset
//! representative in `V₀(0)`. Everything else is derived: the shift by the
//! nearest sublattice point, the color of the shifted edge and the direction
//! rule. Decoding inverts this using the fact that the two points an edge
//! labels sum to the sum of its endpoints.

use crate::assignment::transport;
use crate::edge::{direct_edge, select_point, side_cost_units, units_to_distance, DirectedEdge, UndirectedEdge};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::point::LatticePoint;
use crate::scalar::Real;
use crate::sublattice::SimilarSublattice;
use crate::symmetry::{GroupAction, SymmetryGroup};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// The `N` shortest edges `{0, λ′}`, selected by whole shells and, in the last
/// shell, by whole group orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseEdgeSet {
    pub edges: Vec<UndirectedEdge>,
    /// Norm (in units of the sublattice's own shells) of the outermost shell used.
    pub last_shell: i64,
    /// True when the outermost shell is used completely.
    pub fills_shells: bool,
}

/// One matched pair of orbits: every image `g·point` takes the class `g·class`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPair {
    pub point: LatticePoint,
    pub class: LatticePoint,
    pub orbit_size: usize,
}

/// Result of the orbit matching: a class key per representative of `V₀(0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMatching {
    pub classes: Vec<LatticePoint>,
    pub pairs: Vec<OrbitPair>,
    pub cost_units: i64,
}

pub fn base_edge_set(sub: &SimilarSublattice, group: &SymmetryGroup) -> Result<BaseEdgeSet> {
    let lat = sub.lattice();
    let n = sub.index() as u64;
    let l = lat.dim();
    let mut max_norm = 1i64;
    let shells = loop {
        let sh = lat.shells(max_norm)?;
        if sh.s(max_norm) >= n {
            break sh;
        }
        max_norm *= 2;
    };
    let k = (0..=max_norm).find(|&i| shells.s(i) >= n).expect("shell bound reached");
    let inner = shells.s(k - 1);
    let mut edges = Vec::with_capacity(n as usize);
    let mut outer = Vec::new();
    lat.for_each_in_ball(k, |x| {
        let p = sub.from_sub_coords(x);
        if lat.norm_index(x) < k {
            edges.push(UndirectedEdge::new(LatticePoint::zero(l), p));
        } else {
            outer.push(p);
        }
    });
    debug_assert_eq!(edges.len() as u64, inner);
    let mut need = (n - inner) as usize;
    let fills_shells = need == outer.len();
    for orbit in group.orbits(&outer) {
        if need == 0 {
            break;
        }
        if orbit.len() > need {
            return Err(Error::AsymmetricEdgeSet(format!(
                "index {n}: {need} slots left in shell {k}, next orbit has {}",
                orbit.len()
            )));
        }
        need -= orbit.len();
        edges.extend(orbit.into_iter().map(|p| UndirectedEdge::new(LatticePoint::zero(l), p)));
    }
    edges.sort_by_key(|e| (lat.qform(e.difference().coords()), e.clone()));
    Ok(BaseEdgeSet { edges, last_shell: k, fills_shells })
}

/// `α*(λ, [d])`: the translate of `{0, d}` whose midpoint is nearest `λ`. Among
/// equally near translates the offset `λ - μ`, flipped by the sign of `λ`, is
/// minimized lexicographically; the mirrored tie set of `-λ` then yields the
/// mirrored edge, so `α*(-λ) = -α*(λ)` for `λ ≠ 0`.
pub fn closest_edge_in_class(sub: &SimilarSublattice, lambda: &LatticePoint, class: &LatticePoint) -> UndirectedEdge {
    let base = UndirectedEdge::new(LatticePoint::zero(class.dim()), class.clone());
    if class.is_zero() {
        let (lp, _) = sub.coset_reduce(lambda);
        return base.shift(&lp);
    }
    let flip = lambda.coords().iter().find(|&&v| v != 0).is_some_and(|&v| v < 0);
    let w2 = &lambda.scale(2) - class;
    let ties = sub.nearest_all(w2.coords(), 2);
    let t = ties
        .into_iter()
        .min_by_key(|t| {
            let v = &w2 - &t.scale(2);
            if flip {
                -&v
            } else {
                v
            }
        })
        .expect("at least one nearest point");
    base.shift(&t)
}

fn parity_type(sub: &SimilarSublattice, d: &LatticePoint) -> Vec<i64> {
    sub.to_sub_coords(d.coords()).expect("class difference lies in the sublattice").iter().map(|v| v.rem_euclid(2)).collect()
}

/// Exact doubled squared offset `‖2λ - d - 2t‖²` for the best translate of any
/// class whose sublattice coordinates have parity `tau`.
fn offset_units(sub: &SimilarSublattice, lambda: &LatticePoint, tau: &[i64]) -> i64 {
    let w2 = &lambda.scale(2) - &sub.from_sub_coords(tau);
    let t = &sub.nearest_all(w2.coords(), 2)[0];
    sub.lattice().qform((&w2 - &t.scale(2)).coords())
}

/// Group-reduced minimum-cost matching of coset orbits to edge-class orbits.
pub fn optimal_class_matching(
    sub: &SimilarSublattice,
    reps: &[LatticePoint],
    base: &[UndirectedEdge],
    group: &SymmetryGroup,
) -> Result<ClassMatching> {
    let lat = sub.lattice();
    let m = group.order();
    if reps.len() != base.len() {
        return Err(Error::SizeMismatch(format!("{} points vs {} edges", reps.len(), base.len())));
    }
    let index: HashMap<&LatticePoint, usize> = reps.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let coset_of = |p: &LatticePoint| -> Result<usize> {
        let (_, r) = sub.coset_reduce(p);
        index.get(&r).copied().ok_or_else(|| Error::PropertyCheckFailed(format!("{r:?} is not a listed representative")))
    };

    // Orbits of nonzero cosets; each member is reached by exactly one element.
    let mut visited = vec![false; reps.len()];
    let mut point_orbits: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    let mut order: Vec<usize> = (0..reps.len()).filter(|&i| !reps[i].is_zero()).collect();
    order.sort_by(|&a, &b| reps[a].cmp(&reps[b]));
    for &i in &order {
        if visited[i] {
            continue;
        }
        let mut members = Vec::with_capacity(m);
        for (gi, g) in group.elements().iter().enumerate() {
            let j = coset_of(&reps[i].act(g))?;
            if visited[j] {
                return Err(Error::GroupPropertyViolation("group does not act freely on cosets".into()));
            }
            visited[j] = true;
            members.push((gi, j));
        }
        point_orbits.push((i, members));
    }

    // Orbits of nonzero edge classes.
    let mut class_count: BTreeMap<LatticePoint, usize> = BTreeMap::new();
    for e in base.iter().filter(|e| !e.is_zero()) {
        *class_count.entry(e.class_key()).or_default() += 1;
    }
    if class_count.values().any(|&c| c != 2) {
        return Err(Error::AsymmetricEdgeSet("positive-length edges do not come in ± pairs".into()));
    }
    let mut seen: BTreeSet<LatticePoint> = BTreeSet::new();
    let mut class_orbits: Vec<Vec<LatticePoint>> = Vec::new();
    for c in class_count.keys() {
        if seen.contains(c) {
            continue;
        }
        let orbit: BTreeSet<LatticePoint> = group.elements().iter().map(|g| c.act(g).sign_canonical()).collect();
        if orbit.len() * 2 != m || orbit.iter().any(|x| !class_count.contains_key(x)) {
            return Err(Error::GroupPropertyViolation("edge classes are not a union of free orbits".into()));
        }
        seen.extend(orbit.iter().cloned());
        class_orbits.push(orbit.into_iter().collect());
    }
    if class_orbits.len() != point_orbits.len() {
        return Err(Error::SizeMismatch(format!(
            "{} point orbits vs {} edge-class orbits",
            point_orbits.len(),
            class_orbits.len()
        )));
    }

    // Columns sharing the same set of parity types have identical offset costs.
    let types: Vec<Vec<Vec<i64>>> = class_orbits
        .iter()
        .map(|o| {
            let s: BTreeSet<Vec<i64>> = o.iter().map(|c| parity_type(sub, c)).collect();
            s.into_iter().collect()
        })
        .collect();
    let mut signature_groups: BTreeMap<Vec<Vec<i64>>, Vec<usize>> = BTreeMap::new();
    for (ci, t) in types.iter().enumerate() {
        signature_groups.entry(t.clone()).or_default().push(ci);
    }
    let groups: Vec<(Vec<Vec<i64>>, Vec<usize>)> = signature_groups.into_iter().collect();
    let mut offset_cache: HashMap<(usize, Vec<i64>), i64> = HashMap::new();
    let mut offset = |row: usize, tau: &[i64]| -> i64 {
        *offset_cache.entry((row, tau.to_vec())).or_insert_with(|| offset_units(sub, &reps[row], tau))
    };
    let cost: Vec<Vec<i64>> = point_orbits
        .iter()
        .map(|(row, _)| groups.iter().map(|(sig, _)| sig.iter().map(|t| offset(*row, t)).min().unwrap()).collect())
        .collect();
    let capacity: Vec<usize> = groups.iter().map(|(_, cols)| cols.len()).collect();
    let (assign, _) = transport(&cost, &capacity);

    let mut next_col = vec![0usize; groups.len()];
    let mut classes = vec![LatticePoint::zero(lat.dim()); reps.len()];
    let mut pairs = Vec::with_capacity(point_orbits.len());
    for (oi, (row, members)) in point_orbits.iter().enumerate() {
        let gidx = assign[oi];
        let col = groups[gidx].1[next_col[gidx]];
        next_col[gidx] += 1;
        let best = class_orbits[col]
            .iter()
            .min_by_key(|c| (offset(*row, &parity_type(sub, c)), (*c).clone()))
            .unwrap()
            .clone();
        for &(gi, j) in members {
            classes[j] = best.act(&group.elements()[gi]).sign_canonical();
        }
        pairs.push(OrbitPair { point: reps[*row].clone(), class: best, orbit_size: m });
    }
    let cost_units = reps
        .iter()
        .zip(&classes)
        .map(|(p, c)| side_cost_units(lat, &closest_edge_in_class(sub, p, c), p))
        .sum();
    Ok(ClassMatching { classes, pairs, cost_units })
}

/// Counts of how often a sublattice point is used as a channel-1 and channel-2 label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReuseCounts {
    pub first: usize,
    pub second: usize,
}

/// Outcome of each property check; `None` means the check passed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub table: Option<String>,
    /// Every sublattice point is the label of exactly `N` points per channel.
    pub reuse: Option<String>,
    /// Labels shift with sublattice translations, and decoding inverts encoding.
    pub shift: Option<String>,
    /// The two points of an edge sum to its endpoints, with equal per-channel distortions.
    pub midpoint: Option<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.table.is_none() && self.reuse.is_none() && self.shift.is_none() && self.midpoint.is_none()
    }
}

/// A complete labeling for one `(lattice, sublattice)` design.
#[derive(Clone, Debug)]
pub struct Labeling {
    sub: SimilarSublattice,
    group: SymmetryGroup,
    reps: Vec<LatticePoint>,
    edges: Vec<UndirectedEdge>,
    rep_index: HashMap<LatticePoint, usize>,
    class_rows: HashMap<LatticePoint, Vec<usize>>,
    pairs: Vec<OrbitPair>,
    last_shell: Option<i64>,
    fills_shells: bool,
}

impl PartialEq for Labeling {
    fn eq(&self, other: &Self) -> bool {
        self.sub == other.sub && self.reps == other.reps && self.edges == other.edges
    }
}

impl Labeling {
    /// Builds the optimal labeling with the lattice's standard symmetry group.
    pub fn build(sub: &SimilarSublattice) -> Result<Labeling> {
        let group = SymmetryGroup::for_lattice(sub.lattice());
        Self::build_with_group(sub, &group)
    }

    pub fn build_with_group(sub: &SimilarSublattice, group: &SymmetryGroup) -> Result<Labeling> {
        check_index(sub)?;
        group.validate(sub.lattice(), Some(sub))?;
        let reps = sub.discrete_voronoi_set()?;
        let base = base_edge_set(sub, group)?;
        let matching = optimal_class_matching(sub, &reps, &base.edges, group)?;
        let mut lab = Self::assemble(sub, group, reps, &matching.classes, matching.pairs)?;
        lab.last_shell = Some(base.last_shell);
        lab.fills_shells = base.fills_shells;
        let used: BTreeMap<LatticePoint, usize> = lab.class_histogram();
        let expected: BTreeMap<LatticePoint, usize> = base.edges.iter().fold(BTreeMap::new(), |mut acc, e| {
            *acc.entry(e.class_key()).or_default() += 1;
            acc
        });
        if used != expected {
            return Err(Error::PropertyCheckFailed("edge classes differ from the base edge set".into()));
        }
        Ok(lab)
    }

    /// Builds a labeling from an explicit class choice: `assignment` pairs any lattice
    /// point with the class key (difference vector) of the edge class it should take.
    pub fn from_class_assignment(
        sub: &SimilarSublattice,
        group: &SymmetryGroup,
        assignment: &[(LatticePoint, LatticePoint)],
    ) -> Result<Labeling> {
        check_index(sub)?;
        let reps = sub.discrete_voronoi_set()?;
        let index: HashMap<&LatticePoint, usize> = reps.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut classes: Vec<Option<LatticePoint>> = vec![None; reps.len()];
        for (p, c) in assignment {
            if !sub.contains(c.coords()) {
                return Err(Error::InvalidInput(format!("class {c:?} is not a sublattice vector")));
            }
            let (_, r) = sub.coset_reduce(p);
            let i = index[&r];
            if classes[i].replace(c.sign_canonical()).is_some() {
                return Err(Error::InvalidInput(format!("coset of {p:?} assigned twice")));
            }
        }
        let classes: Vec<LatticePoint> = classes
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::InvalidInput(format!("coset of {:?} unassigned", reps[i]))))
            .collect::<Result<_>>()?;
        Self::assemble(sub, group, reps, &classes, Vec::new())
    }

    /// Rebuilds a labeling from stored base-frame edges and validates it.
    pub fn from_table(
        sub: &SimilarSublattice,
        group: &SymmetryGroup,
        table: &[(LatticePoint, UndirectedEdge)],
        pairs: Vec<OrbitPair>,
    ) -> Result<Labeling> {
        check_index(sub)?;
        let reps = sub.discrete_voronoi_set()?;
        let mut by_rep: HashMap<LatticePoint, UndirectedEdge> = HashMap::new();
        for (p, e) in table {
            by_rep.insert(p.clone(), e.clone());
        }
        if by_rep.len() != reps.len() {
            return Err(Error::InvalidInput(format!("table has {} rows, index is {}", by_rep.len(), reps.len())));
        }
        let edges: Vec<UndirectedEdge> = reps
            .iter()
            .map(|r| by_rep.remove(r).ok_or_else(|| Error::InvalidInput(format!("{r:?} missing from table"))))
            .collect::<Result<_>>()?;
        let lab = Self::from_parts(sub, group, reps, edges, pairs)?;
        lab.verify()?;
        Ok(lab)
    }

    fn assemble(
        sub: &SimilarSublattice,
        group: &SymmetryGroup,
        reps: Vec<LatticePoint>,
        classes: &[LatticePoint],
        pairs: Vec<OrbitPair>,
    ) -> Result<Labeling> {
        let edges = reps.iter().zip(classes).map(|(p, c)| closest_edge_in_class(sub, p, c)).collect();
        let lab = Self::from_parts(sub, group, reps, edges, pairs)?;
        lab.verify()?;
        Ok(lab)
    }

    fn from_parts(
        sub: &SimilarSublattice,
        group: &SymmetryGroup,
        reps: Vec<LatticePoint>,
        edges: Vec<UndirectedEdge>,
        pairs: Vec<OrbitPair>,
    ) -> Result<Labeling> {
        let rep_index = reps.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mut class_rows: HashMap<LatticePoint, Vec<usize>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            for p in [e.endpoints().0, e.endpoints().1] {
                if !sub.contains(p.coords()) {
                    return Err(Error::PropertyCheckFailed(format!("endpoint {p:?} is not a sublattice point")));
                }
            }
            class_rows.entry(e.class_key()).or_default().push(i);
        }
        Ok(Labeling {
            sub: sub.clone(),
            group: group.clone(),
            reps,
            edges,
            rep_index,
            class_rows,
            pairs,
            last_shell: None,
            fills_shells: false,
        })
    }

    pub(crate) fn set_shell_info(&mut self, last_shell: Option<i64>, fills_shells: bool) {
        self.last_shell = last_shell;
        self.fills_shells = fills_shells;
    }

    pub fn sublattice(&self) -> &SimilarSublattice {
        &self.sub
    }

    pub fn lattice(&self) -> &Lattice {
        self.sub.lattice()
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn index(&self) -> i64 {
        self.sub.index()
    }

    /// `V₀(0)` in table order.
    pub fn representatives(&self) -> &[LatticePoint] {
        &self.reps
    }

    /// Base-frame undirected edge of each representative.
    pub fn base_edges(&self) -> &[UndirectedEdge] {
        &self.edges
    }

    pub fn orbit_pairs(&self) -> &[OrbitPair] {
        &self.pairs
    }

    /// Outermost sublattice shell of the base edge set, when built from one.
    pub fn last_shell(&self) -> Option<i64> {
        self.last_shell
    }

    pub fn fills_shells(&self) -> bool {
        self.fills_shells
    }

    fn class_histogram(&self) -> BTreeMap<LatticePoint, usize> {
        self.class_rows.iter().map(|(k, v)| (k.clone(), v.len())).collect()
    }

    /// `Σ_{λ∈V₀(0)} d_s(λ)` in exact units of `1/(4·gram_div·L)`.
    pub fn cost_units(&self) -> i64 {
        self.reps.iter().zip(&self.edges).map(|(p, e)| side_cost_units(self.lattice(), e, p)).sum()
    }

    /// `Σ_{λ∈V₀(0)} d_s(λ)` at unit scale.
    pub fn cost<T: Real>(&self) -> T {
        units_to_distance(self.lattice(), self.cost_units())
    }

    /// Undirected label `α_u(λ)`.
    pub fn encode_undirected(&self, lambda: &LatticePoint) -> UndirectedEdge {
        let (lp, rep) = self.sub.coset_reduce(lambda);
        self.edges[self.rep_index[&rep]].shift(&lp)
    }

    /// Directed label `α(λ) = (channel 1, channel 2)`.
    pub fn encode(&self, lambda: &LatticePoint) -> DirectedEdge {
        let e = self.encode_undirected(lambda);
        direct_edge(self.lattice(), &e, lambda)
    }

    /// Inverts [`Labeling::encode`].
    pub fn decode_both(&self, de: &DirectedEdge) -> Result<LatticePoint> {
        let not_label = || Error::NotALabel(format!("{:?} -> {:?}", de.first, de.second));
        let e = de.undirected();
        let (lo, _) = e.endpoints();
        if !self.sub.contains(lo.coords()) || !self.sub.contains(de.second.coords()) {
            return Err(not_label());
        }
        if e.is_zero() {
            return Ok(lo.clone());
        }
        let rows = self.class_rows.get(&e.class_key()).ok_or_else(not_label)?;
        for &r in rows {
            let t = lo - self.edges[r].endpoints().0;
            let candidate = &self.reps[r] + &t;
            let lambda = select_point(self.lattice(), de, &candidate);
            if self.encode(&lambda) == *de {
                return Ok(lambda);
            }
        }
        Err(not_label())
    }

    /// Single-channel reconstruction: the received sublattice point itself.
    pub fn decode_side(&self, de: &DirectedEdge, channel: u8) -> LatticePoint {
        if channel == 1 {
            de.first.clone()
        } else {
            de.second.clone()
        }
    }

    /// Structural checks that hold over the whole lattice because labels are
    /// translation covariant: coset coverage, the midpoint law, opposite
    /// orientations for the two points of each edge, equal per-channel distortion
    /// for those two points, shift covariance and round trips near the origin.
    pub fn verify(&self) -> Result<()> {
        self.check_table()?;
        self.check_midpoint_law()?;
        self.check_shift_covariance()
    }

    /// Every property check, each with its own outcome.
    pub fn property_report(&self) -> PropertyReport {
        let outcome = |r: Result<()>| r.err().map(|e| e.to_string());
        PropertyReport {
            table: outcome(self.check_table()),
            reuse: outcome(self.check_table().and_then(|_| self.check_reuse())),
            shift: outcome(self.check_table().and_then(|_| self.check_shift_covariance())),
            midpoint: outcome(self.check_table().and_then(|_| self.check_midpoint_law())),
        }
    }

    /// One row per coset representative, and the zero edge on the origin only.
    fn check_table(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::PropertyCheckFailed(msg));
        let n = self.index() as usize;
        if self.reps.len() != n || self.edges.len() != n {
            return fail(format!("table has {} rows for index {n}", self.reps.len()));
        }
        for (i, p) in self.reps.iter().enumerate() {
            let (lp, r) = self.sub.coset_reduce(p);
            if !lp.is_zero() || r != *p {
                return fail(format!("row {i}: {p:?} is not a coset representative"));
            }
        }
        let zero_rows: Vec<usize> = (0..n).filter(|&i| self.edges[i].is_zero()).collect();
        if zero_rows.len() != 1 || !self.reps[zero_rows[0]].is_zero() {
            return fail("exactly the origin must take the zero edge".into());
        }
        for (class, rows) in &self.class_rows {
            if !class.is_zero() && rows.len() != 2 {
                return fail(format!("class {class:?} labels {} representatives, expected 2", rows.len()));
            }
        }
        Ok(())
    }

    /// The two points of each edge sum to its endpoints, take opposite
    /// orientations and see equal distortion on each channel.
    fn check_midpoint_law(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::PropertyCheckFailed(msg));
        let lat = self.lattice();
        for (i, (p, e)) in self.reps.iter().zip(&self.edges).enumerate() {
            if e.is_zero() {
                continue;
            }
            let partner = &e.midpoint2() - p;
            if partner == *p {
                return fail(format!("row {i}: λ coincides with the midpoint"));
            }
            if self.encode_undirected(&partner) != *e {
                return fail(format!("row {i}: partner {partner:?} of {p:?} does not share edge {e:?}"));
            }
            let (a, b) = (self.encode(p), self.encode(&partner));
            if a != b.reversed() {
                return fail(format!("row {i}: {p:?} and {partner:?} have the same orientation"));
            }
            let d1a = lat.qform((p - &a.first).coords());
            let d1b = lat.qform((&partner - &b.first).coords());
            let d2a = lat.qform((p - &a.second).coords());
            let d2b = lat.qform((&partner - &b.second).coords());
            if d1a != d1b || d2a != d2b {
                return fail(format!("row {i}: channel distortions of {p:?} and {partner:?} differ"));
            }
        }
        Ok(())
    }

    /// `α_u(λ + λ′) = α_u(λ) + λ′` and `decode_both ∘ encode = id` on a few shifts.
    fn check_shift_covariance(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::PropertyCheckFailed(msg));
        for t in self.test_shifts() {
            for (i, p) in self.reps.iter().enumerate() {
                let q = p + &t;
                if self.encode_undirected(&q) != self.edges[i].shift(&t) {
                    return fail(format!("shift covariance fails at {q:?}"));
                }
                let de = self.encode(&q);
                if self.decode_both(&de)? != q {
                    return fail(format!("round trip fails at {q:?}"));
                }
            }
        }
        Ok(())
    }

    /// Reuse index `N` on both channels at every vertex of one period of the
    /// coloring, `Λ′ / 2Λ′`.
    fn check_reuse(&self) -> Result<()> {
        let l = self.sub.dim();
        let n = self.index() as usize;
        for mask in 0..(1u32 << l) {
            let eps: Vec<i64> = (0..l).map(|j| ((mask >> j) & 1) as i64).collect();
            let v = self.sub.from_sub_coords(&eps);
            let c = self.reuse_counts(&v);
            if c.first != n || c.second != n {
                return Err(Error::PropertyCheckFailed(format!(
                    "vertex {v:?} is reused {} / {} times, expected {n}",
                    c.first, c.second
                )));
            }
        }
        Ok(())
    }

    /// A few sublattice translations: zero, the basis vectors and their negatives,
    /// and one far combination.
    fn test_shifts(&self) -> Vec<LatticePoint> {
        let l = self.sub.dim();
        let b = self.sub.basis();
        let mut out = vec![LatticePoint::zero(l)];
        for j in 0..l {
            let c = LatticePoint::from(b.column(j));
            out.push(-&c);
            out.push(c);
        }
        let far: Vec<i64> = (0..l as i64).map(|j| 3 - 2 * j).collect();
        out.push(self.sub.from_sub_coords(&far));
        out
    }

    /// Largest unnormalized squared distance between a point and either endpoint
    /// of its label.
    pub fn label_radius_norm(&self) -> i64 {
        let lat = self.lattice();
        self.reps
            .iter()
            .zip(&self.edges)
            .flat_map(|(p, e)| {
                let (a, b) = e.endpoints();
                [lat.norm_index((p - a).coords()), lat.norm_index((p - b).coords())]
            })
            .max()
            .unwrap_or(0)
    }

    /// How often `vertex` is the channel-1 and channel-2 label. By shift
    /// covariance the points whose edge contains `vertex` are `rep + vertex - u`
    /// for each row and each endpoint `u` of its edge, so the count is exact.
    pub fn reuse_counts(&self, vertex: &LatticePoint) -> ReuseCounts {
        let mut counts = ReuseCounts { first: 0, second: 0 };
        for (p, e) in self.reps.iter().zip(&self.edges) {
            let (lo, hi) = e.endpoints();
            let ends: &[&LatticePoint] = if e.is_zero() { &[lo] } else { &[lo, hi] };
            for u in ends {
                let de = self.encode(&(p + &(vertex - *u)));
                counts.first += (de.first == *vertex) as usize;
                counts.second += (de.second == *vertex) as usize;
            }
        }
        counts
    }
}

fn check_index(sub: &SimilarSublattice) -> Result<()> {
    if sub.index() % 2 == 0 {
        return Err(Error::InadmissibleIndex(format!("labeling needs an odd index, got {}", sub.index())));
    }
    Ok(())
}
