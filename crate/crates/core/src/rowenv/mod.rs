//! The decision layer on top of the simulator: action mapping, state
//! aggregation, rewards and episode bookkeeping.

mod action;
mod episode;
mod reward;
mod state;

pub use action::{choose_lanes, clip_action, map_action, snap_beta, RowAction};
pub use episode::{epoch_reward, reset, EpisodeSpec, SlotRewards, WARMUP_EPOCHS};
pub use reward::{
    immediate_reward, redistribute_rewards, RewardBreakdown, RewardMode, RewardVariant,
    REWARD_AMPLIFIER,
};
pub use state::{aggregate_state, RowState, StateNorm};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("edge of width {width_m} m with facility ratio {psi} admits no feasible sidewalk proportion")]
    InfeasibleEdge { width_m: f64, psi: f64 },
    #[error("{lanes} lanes leave a sidewalk proportion {beta:.4} below the 1.5 m minimum")]
    InfeasibleLanes { lanes: u32, beta: f64 },
    #[error("no observation records")]
    NoRecords,
    #[error("episode horizon must be at least 3 slots, got {0}")]
    ShortHorizon(usize),
    #[error("incomplete slot coverage: {0}")]
    Coverage(String),
}
