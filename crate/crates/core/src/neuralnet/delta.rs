//! Forward and backward passes for inputs that differ from a shared
//! reference input in a handful of cells.
//!
//! Grid states are the map background plus a robot marker, so within one
//! training batch every input is the same reference with one to a few
//! cells overridden. Only the convolution units whose receptive field
//! covers an overridden cell change, which makes per-sample work
//! proportional to the number of overrides instead of the network size.
//! The results agree with [`NetworkParams::forward`] and
//! [`NetworkParams::backward`] up to floating-point reassociation.

use super::{NetworkArch, NetworkParams, QValues, Weights};
use crate::gridworld::Action;

/// Cells whose value differs from the reference, as `(cell index, value)`.
/// Each cell may appear at most once.
pub type SparseInput = [(usize, f64)];

/// Reference pass for one parameter set.
pub struct DeltaForward<'a> {
    params: &'a NetworkParams,
    reference: &'a [f64],
    ref_pre: Vec<f64>,
    ref_hidden: Vec<f64>,
    ref_q: QValues,
}

/// Result of evaluating one sparse input.
#[derive(Clone, Debug, Default)]
pub struct DeltaEval {
    pub q: QValues,
    /// Spatial output positions (`oy * out_w + ox`) whose receptive field
    /// covers an override.
    spots: Vec<usize>,
    /// New pre-activations at `spots`, `[spot][filter]`.
    pre: Vec<f64>,
    /// Overrides as `(cell, value - reference)`.
    deltas: Vec<(usize, f64)>,
}

impl<'a> DeltaForward<'a> {
    pub fn new(params: &'a NetworkParams, reference: &'a [f64]) -> crate::error::Result<Self> {
        let trace = params.forward_trace(reference)?;
        Ok(DeltaForward {
            params,
            reference,
            ref_pre: trace.pre,
            ref_hidden: trace.hidden,
            ref_q: trace.q,
        })
    }

    pub fn params(&self) -> &NetworkParams {
        self.params
    }

    pub fn reference_q(&self) -> &QValues {
        &self.ref_q
    }

    pub fn eval(&self, overrides: &SparseInput) -> DeltaEval {
        let mut out = DeltaEval::default();
        self.eval_into(overrides, &mut out);
        out
    }

    /// Like [`eval`](Self::eval) but reuses `out`'s buffers.
    pub fn eval_into(&self, overrides: &SparseInput, out: &mut DeltaEval) {
        let arch = &self.params.arch;
        let w = &self.params.weights;
        let nf = arch.conv_filters;
        let k = arch.conv_kernel;
        let spatial = arch.conv_out_h() * arch.conv_out_w();

        out.spots.clear();
        out.pre.clear();
        out.deltas.clear();
        for &(cell, value) in overrides {
            let d = value - self.reference[cell];
            if d == 0.0 {
                continue;
            }
            out.deltas.push((cell, d));
            for_each_cover(arch, cell, |spot, tap| {
                let slot = match out.spots.iter().position(|&s| s == spot) {
                    Some(slot) => slot,
                    None => {
                        out.spots.push(spot);
                        out.pre
                            .extend((0..nf).map(|f| self.ref_pre[f * spatial + spot]));
                        out.spots.len() - 1
                    }
                };
                let pre = &mut out.pre[slot * nf..(slot + 1) * nf];
                for (f, p) in pre.iter_mut().enumerate() {
                    *p += w.conv_w[f * k * k + tap] * d;
                }
            });
        }

        out.q = self.ref_q;
        let n = arch.hidden_size();
        for (slot, &spot) in out.spots.iter().enumerate() {
            for f in 0..nf {
                let u = f * spatial + spot;
                let change = out.pre[slot * nf + f].max(0.0) - self.ref_hidden[u];
                if change != 0.0 {
                    for (a, q) in out.q.iter_mut().enumerate() {
                        *q += w.fc_w[a * n + u] * change;
                    }
                }
            }
        }
    }
}

/// Calls `visit(spot, tap)` for every output position whose kernel reads
/// `cell`, with `tap = ky * kernel + kx`.
fn for_each_cover(arch: &NetworkArch, cell: usize, mut visit: impl FnMut(usize, usize)) {
    let iy = cell / arch.input_w + arch.conv_padding;
    let ix = cell % arch.input_w + arch.conv_padding;
    let (oh, ow) = (arch.conv_out_h(), arch.conv_out_w());
    let (k, s) = (arch.conv_kernel, arch.conv_stride);
    for ky in 0..k {
        let Some(ry) = iy.checked_sub(ky) else { break };
        if ry % s != 0 || ry / s >= oh {
            continue;
        }
        for kx in 0..k {
            let Some(rx) = ix.checked_sub(kx) else { break };
            if rx % s != 0 || rx / s >= ow {
                continue;
            }
            visit((ry / s) * ow + rx / s, ky * k + kx);
        }
    }
}

/// Accumulates squared-TD-error gradients over a batch of sparse inputs
/// evaluated against one [`DeltaForward`].
pub struct BatchGradient<'f, 'a> {
    forward: &'f DeltaForward<'a>,
    grads: Weights,
    /// Sum of output coefficients per action.
    action_coeff: QValues,
    /// Per-unit pre-activation gradient corrections relative to the
    /// reference activation pattern.
    dpre: Vec<f64>,
}

impl<'f, 'a> BatchGradient<'f, 'a> {
    pub fn new(forward: &'f DeltaForward<'a>) -> Self {
        let arch = &forward.params.arch;
        BatchGradient {
            forward,
            grads: Weights::zeros(arch),
            action_coeff: [0.0; Action::COUNT],
            dpre: vec![0.0; arch.hidden_size()],
        }
    }

    /// Adds the gradient of `scale * (td_target - Q[action])^2` for an
    /// input previously evaluated into `eval`.
    pub fn add(&mut self, eval: &DeltaEval, action: Action, td_target: f64, scale: f64) {
        let coeff = scale * 2.0 * (eval.q[action.slot()] - td_target);
        self.add_output_gradient(eval, action, coeff);
    }

    /// Adds a sample with `d loss / d Q[action] = coeff`.
    pub fn add_output_gradient(&mut self, eval: &DeltaEval, action: Action, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let fw = self.forward;
        let arch = &fw.params.arch;
        let w = &fw.params.weights;
        let nf = arch.conv_filters;
        let k = arch.conv_kernel;
        let n = arch.hidden_size();
        let spatial = arch.conv_out_h() * arch.conv_out_w();
        let a = action.slot();
        let fc_row = &w.fc_w[a * n..(a + 1) * n];

        self.action_coeff[a] += coeff;
        self.grads.fc_b[a] += coeff;

        for (slot, &spot) in eval.spots.iter().enumerate() {
            for f in 0..nf {
                let u = f * spatial + spot;
                let pre = eval.pre[slot * nf + f];
                let hidden = pre.max(0.0);
                self.grads.fc_w[a * n + u] += coeff * (hidden - fw.ref_hidden[u]);
                let active = f64::from(u8::from(pre > 0.0));
                let ref_active = f64::from(u8::from(fw.ref_pre[u] > 0.0));
                self.dpre[u] += coeff * fc_row[u] * (active - ref_active);
            }
        }

        // The reference part of every patch is folded in at `finish`; only
        // the overridden cells' extra contribution is added here.
        for &(cell, d) in &eval.deltas {
            for_each_cover(arch, cell, |spot, tap| {
                let slot = eval.spots.iter().position(|&s| s == spot).unwrap();
                for f in 0..nf {
                    if eval.pre[slot * nf + f] > 0.0 {
                        let u = f * spatial + spot;
                        self.grads.conv_w[f * k * k + tap] += coeff * fc_row[u] * d;
                    }
                }
            });
        }
    }

    pub fn finish(mut self) -> Weights {
        let fw = self.forward;
        let arch = &fw.params.arch;
        let w = &fw.params.weights;
        let n = arch.hidden_size();
        let (oh, ow) = (arch.conv_out_h(), arch.conv_out_w());
        let k = arch.conv_kernel;

        for (a, &c) in self.action_coeff.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = &w.fc_w[a * n..(a + 1) * n];
            let grow = &mut self.grads.fc_w[a * n..(a + 1) * n];
            for (u, (g, &r)) in grow.iter_mut().zip(row).enumerate() {
                *g += c * fw.ref_hidden[u];
                if fw.ref_pre[u] > 0.0 {
                    self.dpre[u] += c * r;
                }
            }
        }

        for f in 0..arch.conv_filters {
            for oy in 0..oh {
                for ox in 0..ow {
                    let d = self.dpre[(f * oh + oy) * ow + ox];
                    if d == 0.0 {
                        continue;
                    }
                    self.grads.conv_b[f] += d;
                    for ky in 0..k {
                        for kx in 0..k {
                            if let Some(i) = arch.tap(oy, ox, ky, kx) {
                                self.grads.conv_w[(f * k + ky) * k + kx] += d * fw.reference[i];
                            }
                        }
                    }
                }
            }
        }
        self.grads
    }
}

impl DeltaEval {
    pub fn argmax(&self) -> Action {
        super::argmax(&self.q)
    }
}
