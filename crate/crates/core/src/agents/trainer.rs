use std::sync::Arc;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;

use super::{select_action, Algo, Hyperparams, LearnStats, Learner, NoiseProcess, ReplayBuffer, TransitionTuple};
use crate::metrics::EpochMetrics;
use crate::microsim::{RowConfig, SimParams, SlotSummary, World};
use crate::neural::{Mlp, NeuralError};
use crate::netgen::{DemandSchedule, RoadNetwork};
use crate::rng;
use crate::rowenv::{
    aggregate_state, epoch_reward, immediate_reward, map_action, redistribute_rewards, reset, RewardBreakdown,
    RewardMode, SlotRewards,
};
use crate::{Error, Result};

/// Everything the simulator needs for one run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub network: Arc<RoadNetwork>,
    pub schedule: Arc<DemandSchedule>,
    pub sim: SimParams,
    pub obs_interval_s: u32,
}

impl Scenario {
    pub fn slots(&self) -> usize {
        self.schedule.slots
    }

    pub fn num_edges(&self) -> usize {
        self.network.edges.len()
    }

    fn world(&self, seed: u64, epoch: usize) -> Result<World> {
        let world_seed = rng::split(seed, rng::stream::WORLD, epoch as u64).next_u64();
        Ok(World::new(self.network.clone(), self.sim.clone(), world_seed)?)
    }

    fn run_slot(&self, world: &mut World, t: usize, configs: Option<&[RowConfig]>) -> Result<SlotSummary> {
        Ok(world.run_slot(&self.schedule, t, configs, self.schedule.slot_seconds, self.obs_interval_s)?)
    }
}

/// Called after every simulated slot with the summary, the per-edge reward
/// breakdown and the rewards as stored.
pub type SlotObserver<'a> = dyn FnMut(&SlotSummary, &[RewardBreakdown], &[f64]) + 'a;

/// Running speed-ratio sums across a whole epoch.
#[derive(Default)]
struct SpeedAcc {
    veh_n: u64,
    veh_sum: f64,
    ped_n: u64,
    ped_sum: f64,
}

impl SpeedAcc {
    fn add(&mut self, s: &SlotSummary) {
        for r in s.records.iter().flatten() {
            self.veh_n += u64::from(r.veh_count);
            self.veh_sum += r.veh_speed_ratio_sum;
            self.ped_n += u64::from(r.ped_count);
            self.ped_sum += r.ped_speed_ratio_sum;
        }
    }

    /// Mean speeds; an empty mode reports its top speed.
    fn speeds(&self, p: &SimParams) -> (f64, f64) {
        let mean = |n: u64, s: f64| if n == 0 { 1.0 } else { s / n as f64 };
        (
            mean(self.veh_n, self.veh_sum) * p.vm_mps,
            mean(self.ped_n, self.ped_sum) * p.pm_mps,
        )
    }
}

/// Trainer state: networks, buffers, noise and the epoch counter.
///
/// The centralised algorithm holds one learner and one pooled buffer; the
/// distributive one holds a learner and a buffer per edge. Every edge has
/// its own noise stream in both cases.
#[derive(Debug, Clone)]
pub struct Trainer {
    pub algo: Algo,
    pub hp: Hyperparams,
    pub seed: u64,
    pub scenario: Scenario,
    pub learners: Vec<Learner>,
    pub buffers: Vec<ReplayBuffer>,
    pub noise: Vec<NoiseProcess>,
    pub epoch: usize,
    /// Tuples stored during the most recent epoch.
    pub last_epoch_tuples: usize,
}

impl Trainer {
    pub fn new(algo: Algo, hp: Hyperparams, scenario: Scenario, seed: u64) -> Result<Self> {
        hp.validate()?;
        let k = scenario.num_edges();
        let n_learners = match algo {
            Algo::Ddpg => 1,
            Algo::Maddpg => k,
        };
        let learners = (0..n_learners)
            .map(|i| Learner::new(&hp, &mut rng::split(seed, rng::stream::INIT, i as u64)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let buffers = (0..n_learners)
            .map(|i| ReplayBuffer::new(hp.buffer_capacity, rng::split(seed, rng::stream::REPLAY, i as u64)))
            .collect();
        let noise = (0..k)
            .map(|i| {
                NoiseProcess::new(
                    hp.sigma0,
                    hp.noise_decay,
                    hp.noise_scale,
                    rng::split(seed, rng::stream::NOISE, i as u64),
                )
            })
            .collect();
        Ok(Trainer {
            algo,
            hp,
            seed,
            scenario,
            learners,
            buffers,
            noise,
            epoch: 0,
            last_epoch_tuples: 0,
        })
    }

    /// Index of the learner and buffer serving edge `k`.
    fn owner(&self, k: usize) -> usize {
        match self.algo {
            Algo::Ddpg => 0,
            Algo::Maddpg => k,
        }
    }

    /// Online actor that controls edge `k`.
    pub fn actor_for(&self, k: usize) -> Option<&Mlp> {
        (k < self.scenario.num_edges()).then(|| &self.learners[self.owner(k)].actor)
    }

    pub fn sigma(&self) -> f64 {
        self.noise[0].sigma()
    }

    pub fn train_epoch(&mut self) -> Result<EpochMetrics> {
        self.train_epoch_observed(None)
    }

    /// One episode: act, simulate, store and learn slot by slot from the
    /// episode's start slot to the end of the day, then decay the noise.
    pub fn train_epoch_observed(&mut self, mut observer: Option<&mut SlotObserver<'_>>) -> Result<EpochMetrics> {
        let started = Instant::now();
        let horizon = self.scenario.slots();
        let k = self.scenario.num_edges();
        let spec = reset(self.epoch, self.seed, horizon, self.hp.gamma)?;
        let mode = self.algo.reward_mode();
        let norm = self.hp.state_norm();
        let mut world = self.scenario.world(self.seed, self.epoch)?;

        let mut states = vec![[0.0f64; 2]; k];
        let mut slot_rewards = Vec::with_capacity(horizon - spec.start_slot);
        let (mut action_sum, mut lane_sum, mut decisions) = (0.0, 0.0, 0usize);
        let (mut loss_sum, mut loss_n) = (0.0, 0usize);
        let mut speeds = SpeedAcc::default();
        let mut stored = 0usize;

        for t in spec.start_slot..horizon {
            let mut actions = Vec::with_capacity(k);
            for e in 0..k {
                let learner = &self.learners[self.owner(e)];
                let raw = select_action(&learner.actor, &states[e], &mut self.noise[e])?;
                let edge = &self.scenario.network.edges[e];
                actions.push(map_action(e, raw, edge.width_m, edge.facility_ratio)?);
            }
            let configs: Vec<RowConfig> = actions
                .iter()
                .map(|a| RowConfig {
                    beta: a.snapped_beta,
                    lanes: a.lanes,
                })
                .collect();
            let summary = self.scenario.run_slot(&mut world, t, Some(&configs))?;

            let breakdowns: Vec<RewardBreakdown> = (0..k)
                .map(|e| {
                    let edge = &self.scenario.network.edges[e];
                    immediate_reward(
                        &summary.records[e],
                        actions[e].snapped_beta,
                        actions[e].lanes,
                        edge.facility_ratio,
                        self.hp.reward_variant,
                    )
                })
                .collect();
            let amplified: Vec<f64> = breakdowns.iter().map(|b| b.g * self.hp.amplifier).collect();
            let rewards = redistribute_rewards(&amplified, mode);
            let terminal = t + 1 == horizon;
            for e in 0..k {
                let next = aggregate_state(&summary.records[e])?.normalized(&norm);
                let owner = self.owner(e);
                self.buffers[owner].push(TransitionTuple {
                    s: states[e],
                    a: actions[e].clipped,
                    r: rewards[e],
                    s_next: next,
                    terminal,
                });
                stored += 1;
                states[e] = next;
                action_sum += actions[e].clipped;
                lane_sum += f64::from(actions[e].lanes);
                decisions += 1;
            }

            for stats in self.learn_step()?.into_iter().flatten() {
                loss_sum += stats.critic_loss;
                loss_n += 1;
            }

            speeds.add(&summary);
            if let Some(obs) = observer.as_deref_mut() {
                obs(&summary, &breakdowns, &rewards);
            }
            slot_rewards.push(SlotRewards {
                slot: t,
                per_edge: amplified,
            });
        }

        for n in &mut self.noise {
            n.decay();
        }
        let reward = epoch_reward(&slot_rewards, spec.start_slot, horizon, k)?;
        let (drive, walk) = speeds.speeds(&self.scenario.sim);
        let metrics = EpochMetrics {
            epoch: self.epoch,
            algo: self.algo.to_string(),
            scenario: self.scenario.name.clone(),
            seed: self.seed,
            sigma0: self.hp.sigma0,
            start_slot: spec.start_slot,
            epoch_reward: reward,
            mean_action: action_sum / decisions as f64,
            mean_lanes: lane_sum / decisions as f64,
            mean_drive_speed_mps: drive,
            mean_walk_speed_mps: walk,
            mean_critic_loss: if loss_n == 0 { 0.0 } else { loss_sum / loss_n as f64 },
            wall_ms: started.elapsed().as_millis() as u64,
        };
        self.epoch += 1;
        self.last_epoch_tuples = stored;
        Ok(metrics)
    }

    /// One learning step per buffer that holds a full minibatch.
    fn learn_step(&mut self) -> Result<Vec<Option<LearnStats>>> {
        let hp = &self.hp;
        let step = |(learner, buffer): (&mut Learner, &mut ReplayBuffer)| -> std::result::Result<_, NeuralError> {
            match buffer.sample(hp.minibatch) {
                Some(batch) => learner.learn(&batch, hp).map(Some),
                None => Ok(None),
            }
        };
        let out = match self.algo {
            Algo::Ddpg => self.learners.iter_mut().zip(self.buffers.iter_mut()).map(step).collect(),
            Algo::Maddpg => self
                .learners
                .par_iter_mut()
                .zip(self.buffers.par_iter_mut())
                .map(step)
                .collect::<std::result::Result<Vec<_>, _>>(),
        };
        Ok(out?)
    }

    /// Every network keyed by its checkpoint file name.
    pub fn checkpoints(&self) -> Vec<(String, &Mlp)> {
        let mut out = Vec::new();
        for (i, l) in self.learners.iter().enumerate() {
            let who = match self.algo {
                Algo::Ddpg => "shared".to_string(),
                Algo::Maddpg => format!("agent{i}"),
            };
            for (role, net) in [
                ("actor", &l.actor),
                ("critic", &l.critic),
                ("actor_target", &l.actor_target),
                ("critic_target", &l.critic_target),
            ] {
                out.push((format!("{}_{who}_{role}.txt", self.algo), net));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub metrics: Vec<EpochMetrics>,
    pub trainer: Trainer,
}

/// Builds a trainer and runs `hp.epochs` epochs.
pub fn run_training(algo: Algo, hp: Hyperparams, scenario: Scenario, seed: u64) -> Result<TrainingRun> {
    let epochs = hp.epochs;
    let mut trainer = Trainer::new(algo, hp, scenario, seed)?;
    let metrics = (0..epochs)
        .map(|_| trainer.train_epoch())
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainingRun { metrics, trainer })
}

/// One day with every edge kept in its initial layout, reported as a single
/// metrics row.
pub fn run_baseline(scenario: &Scenario, hp: &Hyperparams, seed: u64) -> Result<EpochMetrics> {
    let started = Instant::now();
    let horizon = scenario.slots();
    let k = scenario.num_edges();
    if horizon == 0 || k == 0 {
        return Err(Error::Config("baseline needs at least one slot and one edge".into()));
    }
    let mut world = scenario.world(seed, 0)?;
    let mut speeds = SpeedAcc::default();
    let mut slot_rewards = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let summary = scenario.run_slot(&mut world, t, None)?;
        let amplified: Vec<f64> = scenario
            .network
            .edges
            .iter()
            .map(|e| {
                immediate_reward(
                    &summary.records[e.id],
                    e.init_sidewalk_ratio,
                    e.init_lanes,
                    e.facility_ratio,
                    hp.reward_variant,
                )
                .g * hp.amplifier
            })
            .collect();
        speeds.add(&summary);
        slot_rewards.push(SlotRewards {
            slot: t,
            per_edge: redistribute_rewards(&amplified, RewardMode::Distributive),
        });
    }
    let edges = &scenario.network.edges;
    let (drive, walk) = speeds.speeds(&scenario.sim);
    Ok(EpochMetrics {
        epoch: 0,
        algo: "baseline".into(),
        scenario: scenario.name.clone(),
        seed,
        sigma0: 0.0,
        start_slot: 0,
        epoch_reward: epoch_reward(&slot_rewards, 0, horizon, k)?,
        mean_action: edges.iter().map(|e| e.init_sidewalk_ratio).sum::<f64>() / k as f64,
        mean_lanes: edges.iter().map(|e| f64::from(e.init_lanes)).sum::<f64>() / k as f64,
        mean_drive_speed_mps: drive,
        mean_walk_speed_mps: walk,
        mean_critic_loss: 0.0,
        wall_ms: started.elapsed().as_millis() as u64,
    })
}
