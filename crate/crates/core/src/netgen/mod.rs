//! Parametric road components and synthetic travel demand.

mod demand;
mod network;
mod templates;

pub use demand::{synth_demand, DemandProfile, DemandSchedule};
pub use network::{validate_network, EdgeId, EdgeSpec, NodeId, RoadNetwork, Violation};
pub use templates::{build_template, GeometryOverrides, TemplateKind};

use thiserror::Error;

/// Width of one driving lane, metres.
pub const LANE_WIDTH_M: f64 = 3.5;
/// Marking buffer on the carriageway, metres.
pub const MARKING_BUFFER_M: f64 = 0.5;
/// Narrowest legal sidewalk, metres.
pub const MIN_SIDEWALK_M: f64 = 1.5;

#[derive(Debug, Error)]
pub enum NetgenError {
    #[error("unknown template kind `{0}`")]
    UnknownKind(String),
    #[error("invalid network: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("demand needs at least {min} slots, got {got}")]
    TooFewSlots { min: usize, got: usize },
    #[error("network has no origin/destination pairs")]
    NoOdPairs,
    #[error("invalid demand profile: {0}")]
    Profile(String),
}
