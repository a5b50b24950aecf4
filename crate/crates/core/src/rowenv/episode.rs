use rand::Rng as _;

use super::EnvError;
use crate::rng;

/// Epochs that always start at slot 0 before random starts kick in.
pub const WARMUP_EPOCHS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSpec {
    pub epoch: usize,
    pub start_slot: usize,
    pub horizon: usize,
    pub gamma: f64,
}

/// Picks the start slot of epoch `epoch`: slot 0 during warm-up, then a
/// uniform draw from `[1, horizon - 2]` that depends only on `(epoch, seed)`.
pub fn reset(epoch: usize, seed: u64, horizon: usize, gamma: f64) -> Result<EpisodeSpec, EnvError> {
    if horizon < 3 {
        return Err(EnvError::ShortHorizon(horizon));
    }
    let start_slot = if epoch < WARMUP_EPOCHS {
        0
    } else {
        rng::split(seed, rng::stream::EPISODE, epoch as u64).random_range(1..=horizon - 2)
    };
    Ok(EpisodeSpec {
        epoch,
        start_slot,
        horizon,
        gamma,
    })
}

/// Amplified rewards of every edge for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRewards {
    pub slot: usize,
    pub per_edge: Vec<f64>,
}

/// Mean reward per edge and slot over an episode covering slots
/// `start..horizon`.
pub fn epoch_reward(
    rewards: &[SlotRewards],
    start: usize,
    horizon: usize,
    edges: usize,
) -> Result<f64, EnvError> {
    if start >= horizon || edges == 0 {
        return Err(EnvError::Coverage(format!(
            "start {start}, horizon {horizon}, {edges} edges"
        )));
    }
    let expected = horizon - start;
    if rewards.len() != expected {
        return Err(EnvError::Coverage(format!(
            "expected {expected} slots, got {}",
            rewards.len()
        )));
    }
    let mut total = 0.0;
    for (i, r) in rewards.iter().enumerate() {
        if r.slot != start + i {
            return Err(EnvError::Coverage(format!(
                "slot {} where {} was expected",
                r.slot,
                start + i
            )));
        }
        if r.per_edge.len() != edges {
            return Err(EnvError::Coverage(format!(
                "slot {} has {} edges, expected {edges}",
                r.slot,
                r.per_edge.len()
            )));
        }
        total += r.per_edge.iter().sum::<f64>();
    }
    Ok(total / (expected * edges) as f64)
}
