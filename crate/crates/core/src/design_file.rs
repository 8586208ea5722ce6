//! Versioned JSON form of a labeling.

use crate::edge::UndirectedEdge;
use crate::error::{Error, Result};
use crate::labeling::{Labeling, OrbitPair};
use crate::lattice::{Lattice, LatticeKind};
use crate::point::LatticePoint;
use crate::sublattice::SimilarSublattice;
use crate::symmetry::SymmetryGroup;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

/// One representative of `V₀(0)` with its undirected and directed labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub point: LatticePoint,
    pub edge: [LatticePoint; 2],
    pub directed: [LatticePoint; 2],
}

/// All coordinates are exact integers; `cost_summary` is the only float and is
/// informational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignFile {
    pub schema: u32,
    pub lattice: LatticeKind,
    pub params: Vec<i64>,
    pub index: i64,
    pub norm_scale: i64,
    pub group_order: usize,
    pub last_shell: Option<i64>,
    pub fills_shells: bool,
    /// `Σ d_s` over `V₀(0)` in units of `1/(4·gram_div·L)`.
    pub cost_units: i64,
    /// `Σ d_s` over `V₀(0)` at unit scale.
    pub cost_summary: f64,
    pub orbit_pairs: Vec<OrbitPair>,
    pub table: Vec<TableRow>,
}

impl DesignFile {
    pub fn from_labeling(lab: &Labeling) -> Self {
        let sub = lab.sublattice();
        let table = lab
            .representatives()
            .iter()
            .zip(lab.base_edges())
            .map(|(p, e)| {
                let (lo, hi) = e.endpoints();
                let de = lab.encode(p);
                TableRow { point: p.clone(), edge: [lo.clone(), hi.clone()], directed: [de.first, de.second] }
            })
            .collect();
        DesignFile {
            schema: SCHEMA,
            lattice: lab.lattice().kind(),
            params: sub.params().to_vec(),
            index: sub.index(),
            norm_scale: sub.norm_scale(),
            group_order: lab.group().order(),
            last_shell: lab.last_shell(),
            fills_shells: lab.fills_shells(),
            cost_units: lab.cost_units(),
            cost_summary: lab.cost::<f64>(),
            orbit_pairs: lab.orbit_pairs().to_vec(),
            table,
        }
    }

    /// Rebuilds and validates the labeling. Stored derived values (index, costs,
    /// directed labels) must agree with the recomputed ones.
    pub fn to_labeling(&self) -> Result<Labeling> {
        if self.schema != SCHEMA {
            return Err(Error::InvalidInput(format!("unsupported design schema {}", self.schema)));
        }
        let lat = Lattice::new(self.lattice);
        let sub = SimilarSublattice::build(&lat, &self.params)?;
        if sub.index() != self.index || sub.norm_scale() != self.norm_scale {
            return Err(Error::InvalidInput(format!(
                "stored index {} does not match parameters {:?} (index {})",
                self.index,
                self.params,
                sub.index()
            )));
        }
        let group = SymmetryGroup::for_lattice(&lat);
        if group.order() != self.group_order {
            return Err(Error::InvalidInput(format!("stored group order {} differs from {}", self.group_order, group.order())));
        }
        let rows: Vec<(LatticePoint, UndirectedEdge)> = self
            .table
            .iter()
            .map(|r| (r.point.clone(), UndirectedEdge::new(r.edge[0].clone(), r.edge[1].clone())))
            .collect();
        let mut lab = Labeling::from_table(&sub, &group, &rows, self.orbit_pairs.clone())?;
        lab.set_shell_info(self.last_shell, self.fills_shells);
        if lab.cost_units() != self.cost_units {
            return Err(Error::PropertyCheckFailed(format!(
                "stored cost {} differs from recomputed {}",
                self.cost_units,
                lab.cost_units()
            )));
        }
        for r in &self.table {
            let de = lab.encode(&r.point);
            if [de.first, de.second] != r.directed {
                return Err(Error::PropertyCheckFailed(format!("stored direction of {:?} disagrees", r.point)));
            }
        }
        Ok(lab)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("design serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed design file: {e}")))
    }
}
