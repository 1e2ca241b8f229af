use serde::{Deserialize, Serialize};

use super::{NetworkParams, Weights};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && self.beta1 > 0.0
            && (0.0..1.0).contains(&self.beta2)
            && self.beta2 > 0.0
            && self.epsilon >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid optimizer settings {self:?}"
            )))
        }
    }
}

/// One bias-corrected Adam update of `params` along `grads`.
pub fn adam_step(params: &mut NetworkParams, grads: &Weights, opt: &OptimizerConfig) {
    params.adam_t += 1;
    let t = params.adam_t as i32;
    let correct1 = 1.0 - opt.beta1.powi(t);
    let correct2 = 1.0 - opt.beta2.powi(t);
    let step = opt.learning_rate / correct1;
    let NetworkParams {
        weights,
        adam_m,
        adam_v,
        ..
    } = params;
    for (((w, m), v), g) in weights
        .slices_mut()
        .into_iter()
        .zip(adam_m.slices_mut())
        .zip(adam_v.slices_mut())
        .zip(grads.slices())
    {
        assert_eq!(w.len(), g.len(), "gradient shape mismatch");
        for i in 0..w.len() {
            let gi = g[i];
            m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * gi;
            v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * gi * gi;
            w[i] -= step * m[i] / ((v[i] / correct2).sqrt() + opt.epsilon);
        }
    }
}
