use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rowenv::{RewardMode, RewardVariant, StateNorm};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Ddpg,
    Maddpg,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Ddpg => "ddpg",
            Algo::Maddpg => "maddpg",
        }
    }

    pub fn reward_mode(self) -> RewardMode {
        match self {
            Algo::Ddpg => RewardMode::Centralised,
            Algo::Maddpg => RewardMode::Distributive,
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ddpg" => Ok(Algo::Ddpg),
            "maddpg" => Ok(Algo::Maddpg),
            other => Err(format!("unknown algorithm `{other}` (expected ddpg or maddpg)")),
        }
    }
}

/// Learning settings. Field defaults are the reference values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub epochs: usize,
    pub minibatch: usize,
    pub buffer_capacity: usize,
    /// Multiplier turning the per-slot gain into the stored reward.
    pub amplifier: f64,
    /// Target-network copy coefficient.
    pub eta: f64,
    pub gamma: f64,
    pub noise_decay: f64,
    pub sigma0: f64,
    /// Noise std is `noise_scale * sigma`; 1/3 reads sigma as a 3-std bound.
    pub noise_scale: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub hidden: Vec<usize>,
    pub huber_delta: f64,
    pub reward_variant: RewardVariant,
    pub state_norm_veh: f64,
    pub state_norm_ped: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        let norm = StateNorm::default();
        Hyperparams {
            epochs: 150,
            minibatch: 64,
            buffer_capacity: 100_000,
            amplifier: 1000.0,
            eta: 0.005,
            gamma: 0.99,
            noise_decay: 0.99,
            sigma0: 0.2,
            noise_scale: 1.0,
            actor_lr: 1e-4,
            critic_lr: 1e-3,
            hidden: vec![64, 64],
            huber_delta: 1.0,
            reward_variant: RewardVariant::Squared,
            state_norm_veh: norm.veh,
            state_norm_ped: norm.ped,
        }
    }
}

impl Hyperparams {
    pub fn state_norm(&self) -> StateNorm {
        StateNorm {
            veh: self.state_norm_veh,
            ped: self.state_norm_ped,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fail = |m: String| Err(Error::Config(m));
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(self.gamma) {
            return fail(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if !(self.noise_decay > 0.0 && self.noise_decay <= 1.0) {
            return fail(format!("noise_decay must lie in (0, 1], got {}", self.noise_decay));
        }
        if !(self.sigma0 > 0.0) {
            return fail(format!("sigma0 must be positive, got {}", self.sigma0));
        }
        if !(self.noise_scale > 0.0) {
            return fail(format!("noise_scale must be positive, got {}", self.noise_scale));
        }
        if self.minibatch == 0 || self.buffer_capacity < self.minibatch {
            return fail(format!(
                "buffer_capacity ({}) must be at least minibatch ({}) and minibatch positive",
                self.buffer_capacity, self.minibatch
            ));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return fail(format!("eta must lie in (0, 1], got {}", self.eta));
        }
        if !(self.amplifier > 0.0) || !(self.actor_lr > 0.0) || !(self.critic_lr > 0.0) {
            return fail("amplifier and learning rates must be positive".into());
        }
        if !(self.huber_delta > 0.0) {
            return fail("huber_delta must be positive".into());
        }
        if self.hidden.contains(&0) {
            return fail("hidden layer widths must be positive".into());
        }
        if !(self.state_norm_veh > 0.0) || !(self.state_norm_ped > 0.0) {
            return fail("state normalisers must be positive".into());
        }
        Ok(())
    }

    pub fn actor_dims(&self) -> Vec<usize> {
        let mut d = vec![2];
        d.extend(&self.hidden);
        d.push(1);
        d
    }

    pub fn critic_dims(&self) -> Vec<usize> {
        let mut d = vec![3];
        d.extend(&self.hidden);
        d.push(1);
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let hp = Hyperparams::default();
        hp.validate().unwrap();
        assert_eq!(hp.actor_dims(), vec![2, 64, 64, 1]);
        assert_eq!(hp.critic_dims(), vec![3, 64, 64, 1]);
    }

    #[test]
    fn rejects_bad_values() {
        for f in [
            |h: &mut Hyperparams| h.gamma = 1.0,
            |h: &mut Hyperparams| h.noise_decay = 0.0,
            |h: &mut Hyperparams| h.sigma0 = 0.0,
            |h: &mut Hyperparams| h.buffer_capacity = 10,
            |h: &mut Hyperparams| h.hidden = vec![0],
        ] {
            let mut hp = Hyperparams::default();
            f(&mut hp);
            assert!(hp.validate().is_err());
        }
    }

    #[test]
    fn algo_names() {
        assert_eq!("maddpg".parse::<Algo>().unwrap(), Algo::Maddpg);
        assert!("ppo".parse::<Algo>().is_err());
        assert_eq!(Algo::Ddpg.to_string(), "ddpg");
    }
}
