//! Sandpile, rotor-router, divisible sandpile and IDLA growth on the
//! Sierpinski gasket graph, with the exact radial theory of the sandpile
//! cluster.

pub mod gasket;
pub mod growth;
pub mod radial;
pub mod render;
pub mod sandpile;

pub use gasket::{
    BallSpec, GasketError, GasketGraph, Sided, SinkSpec, SinkedGraph, VertexId, MAX_LEVEL,
};
pub use growth::{Engine, GrowthError, GrowthOutcome, GrowthRecord, Mechanism, Model};
pub use radial::{RadialError, RadialRecord, RadiusOracle, Via};
pub use render::{Palette, RenderError};
pub use sandpile::{SandpileConfig, SandpileError, StabilizationResult, TileId, TileKind};
