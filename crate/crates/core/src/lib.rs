pub mod assignment;
pub mod codec;
pub mod design_file;
pub mod edge;
pub mod error;
pub mod eval;
pub mod imat;
pub mod labeling;
pub mod lattice;
pub mod point;
pub mod reference;
pub mod scalar;
pub mod sublattice;
pub mod symmetry;

pub use edge::{DirectedEdge, UndirectedEdge};
pub use error::{Error, Result};
pub use imat::IMatrix;
pub use labeling::Labeling;
pub use lattice::{sphere_second_moment, unit_ball_volume, Lattice, LatticeKind, ThetaShells};
pub use point::LatticePoint;
pub use scalar::Real;
pub use sublattice::SimilarSublattice;
pub use symmetry::SymmetryGroup;
pub use codec::{Received, SimulationReport};
pub use eval::{FigureKind, Sweep, Table};

pub type ScaledDesign = codec::ScaledDesign<f64>;
pub type ScaledDesignF32 = codec::ScaledDesign<f32>;
pub type SourceModel = codec::SourceModel<f64>;
pub type SourceModelF32 = codec::SourceModel<f32>;
pub type DesignReport = eval::DesignReport<f64>;
pub type Sandwich = eval::Sandwich<f64>;
