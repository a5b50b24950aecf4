use super::{GradientSet, Mlp, NeuralError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam moments for one network. Steps descend the gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub config: AdamConfig,
    pub step: u64,
    m: GradientSet,
    v: GradientSet,
}

impl Adam {
    pub fn new(net: &Mlp, config: AdamConfig) -> Self {
        Adam {
            config,
            step: 0,
            m: GradientSet::zeros_like(net),
            v: GradientSet::zeros_like(net),
        }
    }

    /// One bias-corrected update of `net` along `-grads`.
    pub fn step(&mut self, net: &mut Mlp, grads: &GradientSet) -> Result<(), NeuralError> {
        if !grads.matches(net) || !self.m.matches(net) {
            return Err(NeuralError::Shape("gradient or moment shapes differ from the network".into()));
        }
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.config;
        self.step += 1;
        let c1 = 1.0 - beta1.powi(self.step as i32);
        let c2 = 1.0 - beta2.powi(self.step as i32);
        let g = grads.flat();
        for (((p, m), v), g) in net
            .params_mut()
            .zip(self.m.values_mut())
            .zip(self.v.values_mut())
            .zip(g)
        {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

/// Moves every target parameter a fraction `eta` toward the online one.
pub fn soft_update(target: &mut Mlp, online: &Mlp, eta: f64) -> Result<(), NeuralError> {
    if !target.same_shape(online) {
        return Err(NeuralError::Shape(format!(
            "target {:?} vs online {:?}",
            target.dims(),
            online.dims()
        )));
    }
    if eta == 1.0 {
        target.clone_from(online);
        return Ok(());
    }
    for (t, o) in target.params_mut().zip(online.params()) {
        *t += eta * (o - *t);
    }
    Ok(())
}
