//! Two-layer Q-network: a single-channel convolution followed by ReLU and
//! an affine output layer with one unit per action.
//!
//! Everything here is hand-written: forward pass, exact gradients of the
//! single-action squared TD error, and Adam.

mod adam;
mod checkpoint;
mod delta;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridworld::Action;

pub use adam::{adam_step, OptimizerConfig};
pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use delta::{BatchGradient, DeltaEval, DeltaForward, SparseInput};

/// Action values, indexed by [`Action::slot`].
pub type QValues = [f64; Action::COUNT];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkArch {
    pub input_h: usize,
    pub input_w: usize,
    pub conv_filters: usize,
    pub conv_kernel: usize,
    pub conv_stride: usize,
    pub conv_padding: usize,
    pub output_dim: usize,
}

impl Default for NetworkArch {
    fn default() -> Self {
        NetworkArch {
            input_h: 20,
            input_w: 20,
            conv_filters: 16,
            conv_kernel: 3,
            conv_stride: 2,
            conv_padding: 0,
            output_dim: Action::COUNT,
        }
    }
}

impl NetworkArch {
    /// Default architecture for an input of the given size.
    pub fn for_input(input_w: usize, input_h: usize) -> Self {
        NetworkArch {
            input_w,
            input_h,
            ..NetworkArch::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(format!("network: {msg}")));
        if self.output_dim != Action::COUNT {
            return bad("output_dim must equal the number of actions (8)");
        }
        if self.conv_filters == 0 || self.conv_kernel == 0 || self.conv_stride == 0 {
            return bad("filters, kernel and stride must be positive");
        }
        if self.input_h + 2 * self.conv_padding < self.conv_kernel
            || self.input_w + 2 * self.conv_padding < self.conv_kernel
        {
            return bad("kernel larger than padded input");
        }
        Ok(())
    }

    pub fn conv_out_h(&self) -> usize {
        (self.input_h + 2 * self.conv_padding - self.conv_kernel) / self.conv_stride + 1
    }

    pub fn conv_out_w(&self) -> usize {
        (self.input_w + 2 * self.conv_padding - self.conv_kernel) / self.conv_stride + 1
    }

    pub fn input_size(&self) -> usize {
        self.input_h * self.input_w
    }

    /// Flattened size of the convolution output, `filters × out_h × out_w`.
    pub fn hidden_size(&self) -> usize {
        self.conv_filters * self.conv_out_h() * self.conv_out_w()
    }

    pub fn kernel_area(&self) -> usize {
        self.conv_kernel * self.conv_kernel
    }

    /// Input cell read by kernel tap `(ky, kx)` at output `(oy, ox)`, or
    /// `None` when it falls in the zero padding.
    #[inline]
    fn tap(&self, oy: usize, ox: usize, ky: usize, kx: usize) -> Option<usize> {
        let iy = (oy * self.conv_stride + ky).checked_sub(self.conv_padding)?;
        let ix = (ox * self.conv_stride + kx).checked_sub(self.conv_padding)?;
        (iy < self.input_h && ix < self.input_w).then(|| iy * self.input_w + ix)
    }
}

/// Every trainable array of the network. Gradients and Adam moments use
/// the same layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights {
    /// `[filter][ky][kx]`
    pub conv_w: Vec<f64>,
    pub conv_b: Vec<f64>,
    /// `[action][hidden]`, hidden laid out `[filter][oy][ox]`
    pub fc_w: Vec<f64>,
    pub fc_b: Vec<f64>,
}

impl Weights {
    pub fn zeros(arch: &NetworkArch) -> Self {
        Weights {
            conv_w: vec![0.0; arch.conv_filters * arch.kernel_area()],
            conv_b: vec![0.0; arch.conv_filters],
            fc_w: vec![0.0; arch.output_dim * arch.hidden_size()],
            fc_b: vec![0.0; arch.output_dim],
        }
    }

    pub fn slices(&self) -> [&[f64]; 4] {
        [&self.conv_w, &self.conv_b, &self.fc_w, &self.fc_b]
    }

    pub fn slices_mut(&mut self) -> [&mut [f64]; 4] {
        [
            &mut self.conv_w,
            &mut self.conv_b,
            &mut self.fc_w,
            &mut self.fc_b,
        ]
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.slices().into_iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fill(&mut self, value: f64) {
        for s in self.slices_mut() {
            s.fill(value);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for s in self.slices_mut() {
            s.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(f64::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mutable access by flat index across all arrays.
    pub fn get_mut(&mut self, mut index: usize) -> Option<&mut f64> {
        for s in self.slices_mut() {
            if index < s.len() {
                return Some(&mut s[index]);
            }
            index -= s.len();
        }
        None
    }

    pub fn get(&self, mut index: usize) -> Option<f64> {
        for s in self.slices() {
            if index < s.len() {
                return Some(s[index]);
            }
            index -= s.len();
        }
        None
    }
}

/// Network weights together with Adam state.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams {
    pub arch: NetworkArch,
    pub weights: Weights,
    pub adam_m: Weights,
    pub adam_v: Weights,
    pub adam_t: u64,
}

impl NetworkParams {
    pub fn zeros(arch: NetworkArch) -> Result<Self> {
        arch.validate()?;
        let weights = Weights::zeros(&arch);
        Ok(NetworkParams {
            arch,
            adam_m: weights.clone(),
            adam_v: weights.clone(),
            weights,
            adam_t: 0,
        })
    }

    /// Weights uniform in `±sqrt(6 / fan_in)` per layer, biases and
    /// moments zero.
    pub fn init(arch: NetworkArch, seed: u64) -> Result<Self> {
        let mut params = NetworkParams::zeros(arch)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conv_limit = (6.0 / arch.kernel_area() as f64).sqrt();
        let fc_limit = (6.0 / arch.hidden_size() as f64).sqrt();
        for w in &mut params.weights.conv_w {
            *w = rng.gen_range(-conv_limit..conv_limit);
        }
        for w in &mut params.weights.fc_w {
            *w = rng.gen_range(-fc_limit..fc_limit);
        }
        Ok(params)
    }

    /// Copy for the target-network role: same weights, fresh optimizer
    /// state.
    pub fn target_copy(&self) -> Self {
        let zeros = Weights::zeros(&self.arch);
        NetworkParams {
            arch: self.arch,
            weights: self.weights.clone(),
            adam_m: zeros.clone(),
            adam_v: zeros,
            adam_t: 0,
        }
    }

    /// Overwrites this network's weights with `src`'s, leaving optimizer
    /// state alone.
    pub fn sync_from(&mut self, src: &NetworkParams) {
        self.weights.clone_from(&src.weights);
    }

    pub fn is_finite(&self) -> bool {
        self.weights.is_finite() && self.adam_m.is_finite() && self.adam_v.is_finite()
    }

    pub fn forward(&self, state: &[f64]) -> Result<QValues> {
        Ok(self.forward_trace(state)?.q)
    }

    pub fn forward_trace(&self, state: &[f64]) -> Result<ForwardTrace> {
        self.check_input(state)?;
        let arch = &self.arch;
        let w = &self.weights;
        let (oh, ow) = (arch.conv_out_h(), arch.conv_out_w());
        let k = arch.conv_kernel;
        let mut pre = vec![0.0; arch.hidden_size()];
        for f in 0..arch.conv_filters {
            let kernel = &w.conv_w[f * k * k..(f + 1) * k * k];
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut acc = w.conv_b[f];
                    for ky in 0..k {
                        for kx in 0..k {
                            if let Some(i) = arch.tap(oy, ox, ky, kx) {
                                acc += kernel[ky * k + kx] * state[i];
                            }
                        }
                    }
                    pre[(f * oh + oy) * ow + ox] = acc;
                }
            }
        }
        let hidden: Vec<f64> = pre.iter().map(|&v| v.max(0.0)).collect();
        let mut q = [0.0; Action::COUNT];
        let n = hidden.len();
        for (a, qa) in q.iter_mut().enumerate() {
            *qa = w.fc_b[a] + dot(&w.fc_w[a * n..(a + 1) * n], &hidden);
        }
        Ok(ForwardTrace { pre, hidden, q })
    }

    /// Gradient of `(td_target - Q(state, action))^2` with respect to every
    /// weight. Only the taken action's output contributes.
    pub fn backward(&self, state: &[f64], action: Action, td_target: f64) -> Result<Weights> {
        let mut grads = Weights::zeros(&self.arch);
        self.accumulate_gradient(state, action, td_target, 1.0, &mut grads)?;
        Ok(grads)
    }

    /// Adds `scale ×` the squared-error gradient into `grads`.
    pub fn accumulate_gradient(
        &self,
        state: &[f64],
        action: Action,
        td_target: f64,
        scale: f64,
        grads: &mut Weights,
    ) -> Result<()> {
        let trace = self.forward_trace(state)?;
        let coeff = scale * 2.0 * (trace.q[action.slot()] - td_target);
        self.backprop_output(state, &trace, action, coeff, grads);
        Ok(())
    }

    /// Backpropagates `d loss / d Q[action] = coeff` through a recorded
    /// forward pass.
    fn backprop_output(
        &self,
        state: &[f64],
        trace: &ForwardTrace,
        action: Action,
        coeff: f64,
        grads: &mut Weights,
    ) {
        if coeff == 0.0 {
            return;
        }
        let arch = &self.arch;
        let n = arch.hidden_size();
        let a = action.slot();
        grads.fc_b[a] += coeff;
        let fc_row = &self.weights.fc_w[a * n..(a + 1) * n];
        for (g, h) in grads.fc_w[a * n..(a + 1) * n].iter_mut().zip(&trace.hidden) {
            *g += coeff * h;
        }
        let (oh, ow) = (arch.conv_out_h(), arch.conv_out_w());
        let k = arch.conv_kernel;
        for f in 0..arch.conv_filters {
            for oy in 0..oh {
                for ox in 0..ow {
                    let u = (f * oh + oy) * ow + ox;
                    if trace.pre[u] <= 0.0 {
                        continue;
                    }
                    let d = coeff * fc_row[u];
                    grads.conv_b[f] += d;
                    for ky in 0..k {
                        for kx in 0..k {
                            if let Some(i) = arch.tap(oy, ox, ky, kx) {
                                grads.conv_w[(f * k + ky) * k + kx] += d * state[i];
                            }
                        }
                    }
                }
            }
        }
    }

    fn check_input(&self, state: &[f64]) -> Result<()> {
        let expected = self.arch.input_size();
        if state.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: state.len(),
            });
        }
        Ok(())
    }
}

/// Intermediate values of one forward pass.
#[derive(Clone, Debug)]
pub struct ForwardTrace {
    /// Convolution pre-activations.
    pub pre: Vec<f64>,
    /// ReLU outputs.
    pub hidden: Vec<f64>,
    pub q: QValues,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators let the compiler vectorize the reduction.
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4 * 4;
    for (ca, cb) in a[..chunks].chunks_exact(4).zip(b[..chunks].chunks_exact(4)) {
        for j in 0..4 {
            acc[j] += ca[j] * cb[j];
        }
    }
    let mut tail = 0.0;
    for (x, y) in a[chunks..].iter().zip(&b[chunks..]) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(q: &QValues) -> Action {
    let mut best = 0;
    for (i, &v) in q.iter().enumerate().skip(1) {
        if v > q[best] {
            best = i;
        }
    }
    Action::from_slot(best)
}
