//! K-flow of homogeneous 3-geometries.
//!
//! Curvature in the Milnor frame, the flow ODEs in both time conventions, an
//! adaptive integrator with event detection, closed-form oracles, the
//! flat-space principal symbol, and evolution-law checks.

pub mod evolution_checks;
pub mod exact_oracles;
pub mod flow_dynamics;
pub mod integrator;
pub mod linear_analysis;
pub mod milnor_curvature;
pub mod scalar;

pub use flow_dynamics::{FlowConvention, GeometryFamily, Velocity};
pub use integrator::{
    integrate, Equilibration, IntegratorOptions, Sample, StepStats, StopReason, Trajectory,
};
pub use linear_analysis::{SymbolProbe, SymbolVariant};
pub use milnor_curvature::{
    BianchiClass, CurvatureSet, FrameDiagonal, MilnorMetric, StructureConstants,
};
pub use scalar::Scalar;
