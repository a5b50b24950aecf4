use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::NeuralError;

/// Output nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    /// Logistic squash into (0, 1); used by actors.
    Sigmoid,
    /// No squash; used by critics.
    Identity,
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Head::Sigmoid => "sigmoid",
            Head::Identity => "identity",
        })
    }
}

impl FromStr for Head {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sigmoid" => Ok(Head::Sigmoid),
            "identity" => Ok(Head::Identity),
            other => Err(format!("unknown head `{other}`")),
        }
    }
}

/// Dense feed-forward network. Hidden layers use ReLU.
///
/// `weights[l]` is row-major with `dims[l + 1]` rows and `dims[l]` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    dims: Vec<usize>,
    head: Head,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Per-layer parameter gradients, shaped like the owning network.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub layers: Vec<LayerGrad>,
}

/// Everything backward needs from one forward pass.
#[derive(Debug, Clone)]
pub struct Trace {
    dims: Vec<usize>,
    head: Head,
    /// Input of each layer; `inputs[0]` is the network input.
    inputs: Vec<Vec<f64>>,
    /// Pre-activation of each layer.
    pre: Vec<Vec<f64>>,
    output: Vec<f64>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        &self.output
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn affine(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let n_in = x.len();
    b.iter()
        .enumerate()
        .map(|(r, &bias)| {
            let row = &w[r * n_in..(r + 1) * n_in];
            row.iter().zip(x).fold(bias, |acc, (wi, xi)| acc + wi * xi)
        })
        .collect()
}

impl Mlp {
    /// Network with every parameter zero.
    pub fn zeros(dims: &[usize], head: Head) -> Result<Self, NeuralError> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(NeuralError::BadDims(dims.to_vec()));
        }
        let weights = dims.windows(2).map(|p| vec![0.0; p[0] * p[1]]).collect();
        let biases = dims[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(Mlp {
            dims: dims.to_vec(),
            head,
            weights,
            biases,
        })
    }

    /// Weights uniform in `±1/sqrt(fan_in)`, biases zero.
    pub fn init<R: Rng + ?Sized>(dims: &[usize], head: Head, rng: &mut R) -> Result<Self, NeuralError> {
        let mut net = Self::zeros(dims, head)?;
        for (l, w) in net.weights.iter_mut().enumerate() {
            let bound = 1.0 / (dims[l] as f64).sqrt();
            for x in w.iter_mut() {
                *x = rng.random_range(-bound..bound);
            }
        }
        Ok(net)
    }

    /// Multiplies the output layer's weights by `k`.
    pub fn scale_output_layer(&mut self, k: f64) {
        if let Some(w) = self.weights.last_mut() {
            w.iter_mut().for_each(|x| *x *= k);
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn head(&self) -> Head {
        self.head
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn num_params(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    /// All parameters, layer by layer, weights before biases.
    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()))
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights
            .iter_mut()
            .zip(self.biases.iter_mut())
            .flat_map(|(w, b)| w.iter_mut().chain(b.iter_mut()))
    }

    pub fn same_shape(&self, other: &Mlp) -> bool {
        self.dims == other.dims && self.head == other.head
    }

    fn check_input(&self, x: &[f64]) -> Result<(), NeuralError> {
        if x.len() != self.input_dim() {
            return Err(NeuralError::InputDim {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn activate(&self, l: usize, z: &mut [f64]) {
        if l + 1 < self.num_layers() {
            z.iter_mut().for_each(|v| *v = v.max(0.0));
        } else if self.head == Head::Sigmoid {
            z.iter_mut().for_each(|v| *v = sigmoid(*v));
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
        self.check_input(x)?;
        let mut a = x.to_vec();
        for l in 0..self.num_layers() {
            let mut z = affine(&self.weights[l], &self.biases[l], &a);
            self.activate(l, &mut z);
            a = z;
        }
        Ok(a)
    }

    /// Forward pass that keeps the intermediate values for [`Mlp::backward`].
    pub fn forward_trace(&self, x: &[f64]) -> Result<Trace, NeuralError> {
        self.check_input(x)?;
        let mut inputs = Vec::with_capacity(self.num_layers());
        let mut pre = Vec::with_capacity(self.num_layers());
        let mut a = x.to_vec();
        for l in 0..self.num_layers() {
            let z = affine(&self.weights[l], &self.biases[l], &a);
            let mut out = z.clone();
            self.activate(l, &mut out);
            inputs.push(a);
            pre.push(z);
            a = out;
        }
        Ok(Trace {
            dims: self.dims.clone(),
            head: self.head,
            inputs,
            pre,
            output: a,
        })
    }

    /// Gradients of `upstream · output` with respect to every parameter and
    /// to the input. ReLU has derivative 0 at exactly 0.
    pub fn backward(&self, trace: &Trace, upstream: &[f64]) -> Result<(GradientSet, Vec<f64>), NeuralError> {
        if trace.dims != self.dims || trace.head != self.head {
            return Err(NeuralError::TraceMismatch);
        }
        if upstream.len() != self.output_dim() {
            return Err(NeuralError::OutputDim {
                expected: self.output_dim(),
                got: upstream.len(),
            });
        }
        let n = self.num_layers();
        let mut delta: Vec<f64> = match self.head {
            Head::Identity => upstream.to_vec(),
            Head::Sigmoid => upstream
                .iter()
                .zip(&trace.output)
                .map(|(g, y)| g * y * (1.0 - y))
                .collect(),
        };
        let mut layers = vec![
            LayerGrad {
                weights: Vec::new(),
                biases: Vec::new(),
            };
            n
        ];
        for l in (0..n).rev() {
            let x = &trace.inputs[l];
            let n_in = x.len();
            let w = &self.weights[l];
            let mut gw = vec![0.0; w.len()];
            for (r, d) in delta.iter().enumerate() {
                if *d != 0.0 {
                    for (g, xi) in gw[r * n_in..(r + 1) * n_in].iter_mut().zip(x) {
                        *g = d * xi;
                    }
                }
            }
            let mut back = vec![0.0; n_in];
            for (r, d) in delta.iter().enumerate() {
                if *d != 0.0 {
                    for (b, wi) in back.iter_mut().zip(&w[r * n_in..(r + 1) * n_in]) {
                        *b += wi * d;
                    }
                }
            }
            layers[l] = LayerGrad {
                weights: gw,
                biases: delta,
            };
            if l > 0 {
                for (b, z) in back.iter_mut().zip(&trace.pre[l - 1]) {
                    if *z <= 0.0 {
                        *b = 0.0;
                    }
                }
            }
            delta = back;
        }
        Ok((GradientSet { layers }, delta))
    }
}

impl GradientSet {
    pub fn zeros_like(net: &Mlp) -> Self {
        GradientSet {
            layers: net
                .weights
                .iter()
                .zip(&net.biases)
                .map(|(w, b)| LayerGrad {
                    weights: vec![0.0; w.len()],
                    biases: vec![0.0; b.len()],
                })
                .collect(),
        }
    }

    pub fn matches(&self, net: &Mlp) -> bool {
        self.layers.len() == net.num_layers()
            && self
                .layers
                .iter()
                .zip(net.weights.iter().zip(&net.biases))
                .all(|(g, (w, b))| g.weights.len() == w.len() && g.biases.len() == b.len())
    }

    fn values(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|g| g.weights.iter().chain(g.biases.iter()))
    }

    /// Same order as [`Mlp::params`].
    pub fn flat(&self) -> Vec<f64> {
        self.values().copied().collect()
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|g| g.weights.iter_mut().chain(g.biases.iter_mut()))
    }

    /// `self += k * other`; shapes must agree.
    pub fn add_scaled(&mut self, other: &GradientSet, k: f64) {
        for (a, b) in self.values_mut().zip(other.values()) {
            *a += k * b;
        }
    }

    pub fn scale(&mut self, k: f64) {
        self.values_mut().for_each(|v| *v *= k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Straight-line re-implementation used as an oracle.
    fn oracle_forward(net: &Mlp, x: &[f64]) -> Vec<f64> {
        let dims = net.dims();
        let mut a = x.to_vec();
        for l in 0..dims.len() - 1 {
            let mut z = vec![0.0; dims[l + 1]];
            for r in 0..dims[l + 1] {
                let mut s = net.biases[l][r];
                for c in 0..dims[l] {
                    s += net.weights[l][r * dims[l] + c] * a[c];
                }
                z[r] = s;
            }
            if l + 2 < dims.len() {
                for v in &mut z {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            } else if net.head() == Head::Sigmoid {
                for v in &mut z {
                    *v = 1.0 / (1.0 + (-*v).exp());
                }
            }
            a = z;
        }
        a
    }

    #[test]
    fn zero_network_outputs() {
        let critic = Mlp::zeros(&[3, 8, 1], Head::Identity).unwrap();
        assert_eq!(critic.forward(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0]);
        let actor = Mlp::zeros(&[2, 8, 1], Head::Sigmoid).unwrap();
        assert_eq!(actor.forward(&[1.0, 2.0]).unwrap(), vec![0.5]);
    }

    #[test]
    fn forward_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for head in [Head::Identity, Head::Sigmoid] {
            for dims in [vec![2, 5, 1], vec![3, 7, 4, 2], vec![4, 1]] {
                let mut net = Mlp::init(&dims, head, &mut rng).unwrap();
                for b in net.biases.iter_mut().flatten() {
                    *b = rng.random_range(-0.5..0.5);
                }
                for _ in 0..20 {
                    let x: Vec<f64> = (0..dims[0]).map(|_| rng.random_range(-2.0..2.0)).collect();
                    let y = net.forward(&x).unwrap();
                    let o = oracle_forward(&net, &x);
                    for (a, b) in y.iter().zip(&o) {
                        assert!((a - b).abs() < 1e-12);
                    }
                    assert_eq!(net.forward_trace(&x).unwrap().output(), &y[..]);
                }
            }
        }
    }

    #[test]
    fn dimension_errors() {
        let net = Mlp::zeros(&[2, 4, 1], Head::Identity).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(NeuralError::InputDim { .. })));
        let other = Mlp::zeros(&[3, 4, 1], Head::Identity).unwrap();
        let t = other.forward_trace(&[0.0; 3]).unwrap();
        assert_eq!(net.backward(&t, &[1.0]).unwrap_err(), NeuralError::TraceMismatch);
        let t = net.forward_trace(&[0.0; 2]).unwrap();
        assert!(matches!(net.backward(&t, &[1.0, 1.0]), Err(NeuralError::OutputDim { .. })));
        assert!(Mlp::zeros(&[2], Head::Identity).is_err());
    }

    #[test]
    fn zero_network_gradients() {
        let net = Mlp::zeros(&[2, 3, 1], Head::Identity).unwrap();
        let t = net.forward_trace(&[1.0, -1.0]).unwrap();
        let (g, gx) = net.backward(&t, &[1.0]).unwrap();
        // hidden pre-activations are exactly 0, so nothing flows past the ReLU
        assert!(g.layers[0].weights.iter().chain(&g.layers[0].biases).all(|&v| v == 0.0));
        assert!(g.layers[1].weights.iter().all(|&v| v == 0.0));
        assert_eq!(g.layers[1].biases, vec![1.0]);
        assert_eq!(gx, vec![0.0, 0.0]);
    }

    #[test]
    fn single_linear_layer() {
        let mut net = Mlp::zeros(&[3, 2], Head::Identity).unwrap();
        net.weights[0] = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x = [0.5, -1.0, 2.0];
        let t = net.forward_trace(&x).unwrap();
        let (g, gx) = net.backward(&t, &[1.0, -2.0]).unwrap();
        assert_eq!(g.layers[0].weights, vec![0.5, -1.0, 2.0, -1.0, 2.0, -4.0]);
        assert_eq!(g.layers[0].biases, vec![1.0, -2.0]);
        // W^T u
        assert_eq!(gx, vec![1.0 - 8.0, 2.0 - 10.0, 3.0 - 12.0]);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = 1e-5;
        let mut net = Mlp::init(&[2, 16, 16, 1], Head::Identity, &mut rng).unwrap();
        for b in net.biases.iter_mut().flatten() {
            *b = rng.random_range(-0.3..0.3);
        }
        let x = [0.3, -0.7];
        let t = net.forward_trace(&x).unwrap();
        let (g, gx) = net.backward(&t, &[1.0]).unwrap();
        let flat = g.flat();
        let n = net.num_params();
        for _ in 0..100 {
            let i = rng.random_range(0..n);
            let mut plus = net.clone();
            *plus.params_mut().nth(i).unwrap() += h;
            let mut minus = net.clone();
            *minus.params_mut().nth(i).unwrap() -= h;
            let fd = (plus.forward(&x).unwrap()[0] - minus.forward(&x).unwrap()[0]) / (2.0 * h);
            let err = (fd - flat[i]).abs() / fd.abs().max(flat[i].abs()).max(1e-8);
            assert!(err < 1e-4 || (fd - flat[i]).abs() < 1e-9, "param {i}: {fd} vs {}", flat[i]);
        }
        for j in 0..2 {
            let mut xp = x;
            xp[j] += h;
            let mut xm = x;
            xm[j] -= h;
            let fd = (net.forward(&xp).unwrap()[0] - net.forward(&xm).unwrap()[0]) / (2.0 * h);
            assert!((fd - gx[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn actor_output_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut net = Mlp::init(&[2, 8, 1], Head::Sigmoid, &mut rng).unwrap();
        net.scale_output_layer(1e-3);
        let y = net.forward(&[0.2, 0.4]).unwrap()[0];
        assert!((y - 0.5).abs() < 1e-2);
        net.scale_output_layer(1e6);
        for x in [-1e3, 0.0, 1e3] {
            let y = net.forward(&[x, -x]).unwrap()[0];
            assert!((0.0..=1.0).contains(&y));
        }
    }
}
