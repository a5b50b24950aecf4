use rand_distr::{Distribution, StandardNormal};

use crate::rng::Rng;

/// Zero-mean Gaussian exploration noise with a geometrically shrinking
/// scale.
#[derive(Debug, Clone)]
pub struct NoiseProcess {
    sigma0: f64,
    decay: f64,
    /// Standard deviation is `scale * sigma`.
    scale: f64,
    decays: u32,
    rng: Rng,
}

impl NoiseProcess {
    pub fn new(sigma0: f64, decay: f64, scale: f64, rng: Rng) -> Self {
        NoiseProcess {
            sigma0,
            decay,
            scale,
            decays: 0,
            rng,
        }
    }

    /// Current sigma, `sigma0 * decay^n` after `n` decays.
    pub fn sigma(&self) -> f64 {
        self.sigma0 * self.decay.powi(self.decays as i32)
    }

    pub fn decays(&self) -> u32 {
        self.decays
    }

    pub fn decay(&mut self) {
        self.decays += 1;
    }

    pub fn sample(&mut self) -> f64 {
        let std = self.scale * self.sigma();
        if std == 0.0 {
            return 0.0;
        }
        let z: f64 = StandardNormal.sample(&mut self.rng);
        std * z
    }
}
