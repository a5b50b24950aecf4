use super::{Hyperparams, NoiseProcess, TransitionTuple};
use crate::neural::{huber_loss, soft_update, Adam, AdamConfig, GradientSet, Head, Mlp, NeuralError};
use crate::rng::Rng;

fn critic_input(s: &[f64; 2], a: f64) -> [f64; 3] {
    [s[0], s[1], a]
}

/// Deterministic policy output plus one exploration draw.
pub fn select_action(actor: &Mlp, s: &[f64; 2], noise: &mut NoiseProcess) -> Result<f64, NeuralError> {
    Ok(actor.forward(s)?[0] + noise.sample())
}

/// Bootstrapped regression target; just the reward on the last slot.
pub fn td_target(
    t: &TransitionTuple,
    target_actor: &Mlp,
    target_critic: &Mlp,
    gamma: f64,
) -> Result<f64, NeuralError> {
    if t.terminal || gamma == 0.0 {
        return Ok(t.r);
    }
    let a_next = target_actor.forward(&t.s_next)?[0];
    let q_next = target_critic.forward(&critic_input(&t.s_next, a_next))?[0];
    Ok(t.r + gamma * q_next)
}

/// One optimizer step on the mean Huber loss between `targets` and the
/// critic's estimates. Returns the loss before the step.
pub fn critic_update(
    critic: &mut Mlp,
    opt: &mut Adam,
    batch: &[TransitionTuple],
    targets: &[f64],
    delta: f64,
) -> Result<f64, NeuralError> {
    if batch.len() != targets.len() || batch.is_empty() {
        return Err(NeuralError::Shape(format!(
            "{} tuples but {} targets",
            batch.len(),
            targets.len()
        )));
    }
    let m = batch.len() as f64;
    let mut grads = GradientSet::zeros_like(critic);
    let mut loss = 0.0;
    for (t, y) in batch.iter().zip(targets) {
        let trace = critic.forward_trace(&critic_input(&t.s, t.a))?;
        let (l, dl_dz) = huber_loss(y - trace.output()[0], delta);
        loss += l;
        // z = y - q, so dL/dq = -dL/dz
        let (g, _) = critic.backward(&trace, &[-dl_dz / m])?;
        grads.add_scaled(&g, 1.0);
    }
    opt.step(critic, &grads)?;
    Ok(loss / m)
}

/// Anything that scores a state-action pair and reports `dQ/da`.
pub trait ActionValue {
    fn value_and_action_grad(&self, s: &[f64; 2], a: f64) -> Result<(f64, f64), NeuralError>;
}

impl ActionValue for Mlp {
    fn value_and_action_grad(&self, s: &[f64; 2], a: f64) -> Result<(f64, f64), NeuralError> {
        let trace = self.forward_trace(&critic_input(s, a))?;
        let (_, d_input) = self.backward(&trace, &[1.0])?;
        Ok((trace.output()[0], d_input[2]))
    }
}

/// Gradient of the mean of `Q(s, actor(s))` over `states` with respect to
/// the actor's parameters, and that mean.
pub fn actor_gradient(
    actor: &Mlp,
    critic: &impl ActionValue,
    states: &[[f64; 2]],
) -> Result<(GradientSet, f64), NeuralError> {
    let m = states.len() as f64;
    let mut grads = GradientSet::zeros_like(actor);
    let mut objective = 0.0;
    for s in states {
        let at = actor.forward_trace(s)?;
        let (q, dq_da) = critic.value_and_action_grad(s, at.output()[0])?;
        objective += q;
        let (g, _) = actor.backward(&at, &[dq_da / m])?;
        grads.add_scaled(&g, 1.0);
    }
    Ok((grads, objective / m))
}

/// One ascent step on the mean critic value of the actor's actions. The
/// critic is only read. Returns the objective before the step.
pub fn actor_update(
    actor: &mut Mlp,
    opt: &mut Adam,
    critic: &impl ActionValue,
    states: &[[f64; 2]],
) -> Result<f64, NeuralError> {
    if states.is_empty() {
        return Err(NeuralError::Shape("empty minibatch".into()));
    }
    let (mut grads, objective) = actor_gradient(actor, critic, states)?;
    grads.scale(-1.0);
    opt.step(actor, &grads)?;
    Ok(objective)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnStats {
    pub critic_loss: f64,
    pub actor_objective: f64,
}

/// Actor, critic, their target copies and optimizer states.
#[derive(Debug, Clone)]
pub struct Learner {
    pub actor: Mlp,
    pub critic: Mlp,
    pub actor_target: Mlp,
    pub critic_target: Mlp,
    pub actor_opt: Adam,
    pub critic_opt: Adam,
}

impl Learner {
    pub fn new(hp: &Hyperparams, rng: &mut Rng) -> Result<Self, NeuralError> {
        let mut actor = Mlp::init(&hp.actor_dims(), Head::Sigmoid, rng)?;
        actor.scale_output_layer(1e-3);
        let critic = Mlp::init(&hp.critic_dims(), Head::Identity, rng)?;
        Ok(Learner {
            actor_opt: Adam::new(&actor, AdamConfig::with_lr(hp.actor_lr)),
            critic_opt: Adam::new(&critic, AdamConfig::with_lr(hp.critic_lr)),
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            actor,
            critic,
        })
    }

    /// Critic step, actor step, then both target copies move toward the
    /// online networks.
    pub fn learn(&mut self, batch: &[TransitionTuple], hp: &Hyperparams) -> Result<LearnStats, NeuralError> {
        let targets = batch
            .iter()
            .map(|t| td_target(t, &self.actor_target, &self.critic_target, hp.gamma))
            .collect::<Result<Vec<_>, _>>()?;
        let critic_loss = critic_update(&mut self.critic, &mut self.critic_opt, batch, &targets, hp.huber_delta)?;
        let states: Vec<[f64; 2]> = batch.iter().map(|t| t.s).collect();
        let actor_objective = actor_update(&mut self.actor, &mut self.actor_opt, &self.critic, &states)?;
        soft_update(&mut self.critic_target, &self.critic, hp.eta)?;
        soft_update(&mut self.actor_target, &self.actor, hp.eta)?;
        Ok(LearnStats {
            critic_loss,
            actor_objective,
        })
    }
}
