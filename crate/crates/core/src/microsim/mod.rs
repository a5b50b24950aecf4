//! Tick-based microscopic simulation of vehicles on lanes and pedestrians on
//! sidewalks.
//!
//! Vehicles follow a safe-speed rule behind their leader (time headway plus a
//! standstill gap) and queue at junctions when the receiving edge is full.
//! Pedestrians walk at a speed that falls linearly with sidewalk density.

mod edge;
mod summary;
mod world;

pub use edge::{apply_row_config, EdgeRuntime, RowConfig};
pub use summary::{ModeFlow, ObservationRecord, OdFlow, SlotSummary};
pub use world::{observe, PedestrianAgent, VehicleAgent, World};

use thiserror::Error;

use crate::netgen::EdgeId;

/// Vehicle top speed, 30 km/h.
pub const VM_MPS: f64 = 30.0 / 3.6;
/// Pedestrian top walking speed.
pub const PM_MPS: f64 = 1.3;

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub dt_s: f64,
    pub vm_mps: f64,
    pub pm_mps: f64,
    pub time_headway_s: f64,
    pub standstill_gap_m: f64,
    pub accel_mps2: f64,
    pub decel_mps2: f64,
    pub vehicle_length_m: f64,
    /// Density at which walking stops, persons per square metre.
    pub ped_jam_density: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            dt_s: 1.0,
            vm_mps: VM_MPS,
            pm_mps: PM_MPS,
            time_headway_s: 0.60,
            standstill_gap_m: 2.0,
            accel_mps2: 2.5,
            decel_mps2: 4.5,
            vehicle_length_m: 5.0,
            ped_jam_density: 5.4,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("edge {edge}: sidewalk {sidewalk_m:.3} m is below the 1.5 m minimum")]
    InfeasibleSidewalk { edge: EdgeId, sidewalk_m: f64 },
    #[error(
        "edge {edge}: carriageway {carriageway_m:.3} m cannot hold {lanes} lanes plus marking buffer"
    )]
    InfeasibleCarriageway {
        edge: EdgeId,
        carriageway_m: f64,
        lanes: u32,
    },
    #[error("edge {edge}: {what}")]
    Domain { edge: EdgeId, what: String },
    #[error("expected {expected} row configs, got {got}")]
    ConfigCount { expected: usize, got: usize },
    #[error("slot {slot} outside schedule of {slots} slots")]
    SlotOutOfRange { slot: usize, slots: usize },
    #[error("invalid timing: {0}")]
    Timing(String),
}
