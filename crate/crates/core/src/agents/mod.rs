//! Training loops for the centralised controller (one actor-critic shared by
//! every edge, pooled replay) and the distributive one (an independent
//! actor-critic and replay buffer per edge).

mod buffer;
mod hyper;
mod learn;
mod noise;
mod trainer;

pub use buffer::{ReplayBuffer, TransitionTuple};
pub use hyper::{Algo, Hyperparams};
pub use learn::{
    actor_gradient, actor_update, ActionValue, critic_update, select_action, td_target, LearnStats, Learner,
};
pub use noise::NoiseProcess;
pub use trainer::{run_baseline, run_training, Scenario, SlotObserver, Trainer, TrainingRun};
