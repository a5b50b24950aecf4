//! Dynamic right-of-way control for streets shared by autonomous vehicles and
//! pedestrians.
//!
//! The crate is organised bottom-up:
//!
//! * [`netgen`] builds the parametric road components and bimodal demand.
//! * [`microsim`] is a tick-based microscopic simulator for vehicles on lanes
//!   and pedestrians on sidewalks.
//! * [`rowenv`] turns simulator output into states and rewards and maps raw
//!   actions onto feasible cross-sections.
//! * [`neural`] holds small dense networks with analytic gradients.
//! * [`agents`] implements the centralised (DDPG) and distributive
//!   (per-edge DDPG, "MADDPG") training loops.
//! * [`cli`] wires everything into the `roadshare` command line tool.

// `!(x >= lo)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod agents;
pub mod cli;
pub mod config;
pub mod error;
pub mod metrics;
pub mod microsim;
pub mod neural;
pub mod netgen;
pub mod plot;
pub mod rowenv;
pub mod rng;

pub use error::{Error, Result};
