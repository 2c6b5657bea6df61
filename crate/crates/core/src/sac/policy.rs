//! Squashed-Gaussian policy head.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::nn::{Mlp, Scalar, Scratch};

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;
/// Numerical floor inside the tanh-squash log-det term.
pub const SQUASH_EPS: f64 = 1e-6;

pub fn policy_input_dim(obs_dim: usize) -> usize {
    obs_dim
}

/// MLP emitting `[mean | log_std]`; actions are `tanh` of Gaussian samples,
/// so every component lies in (-1, 1).
#[derive(Debug, Clone)]
pub struct GaussianPolicy<T> {
    pub net: Mlp<T>,
    pub act_dim: usize,
}

impl<T: Scalar> GaussianPolicy<T> {
    pub fn new(obs_dim: usize, act_dim: usize, hidden: &[usize], rng: &mut impl Rng) -> Self {
        let mut sizes = vec![obs_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(2 * act_dim);
        let mut net = Mlp::new(&sizes, rng);
        // small initial actions
        net.scale_last_layer(0.01);
        GaussianPolicy { net, act_dim }
    }

    /// Deterministic action: `tanh(mean)`.
    pub fn act_deterministic(&self, input: &[T], scratch: &mut Scratch<T>) -> Vec<T> {
        let out = self.net.forward_batch(input, 1, scratch);
        (0..self.act_dim).map(|i| out[i].tanh()).collect()
    }

    /// Stochastic action: `tanh(mean + std * xi)` with `xi ~ N(0, 1)`.
    pub fn act_stochastic(
        &self,
        input: &[T],
        scratch: &mut Scratch<T>,
        rng: &mut impl Rng,
    ) -> Vec<T> {
        let out = self.net.forward_batch(input, 1, scratch);
        (0..self.act_dim)
            .map(|i| {
                let mean = out[i];
                let log_std =
                    out[self.act_dim + i].to_f64().clamp(LOG_STD_MIN, LOG_STD_MAX);
                let xi: f64 = rng.sample(StandardNormal);
                (mean + T::from_f64(log_std.exp() * xi)).tanh()
            })
            .collect()
    }
}

/// Per-sample squashed-Gaussian quantities for a whole batch, produced from
/// the policy head outputs and fixed standard-normal draws (reparameterized).
#[derive(Debug, Clone)]
pub struct SquashedSample<T> {
    /// Actions `tanh(u)`, `(batch, act_dim)`.
    pub actions: Vec<T>,
    /// Pre-squash values `u = mean + std * xi`.
    pub pre_tanh: Vec<T>,
    /// Clamped log-std values actually used.
    pub log_std: Vec<T>,
    /// Mask: 1 where the raw log-std was inside the clamp range.
    pub log_std_active: Vec<bool>,
    /// Per-sample log-probability `log pi(a|s)`, `(batch,)`.
    pub log_prob: Vec<T>,
}

/// Evaluate the squashed sample for `head_out` = `(batch, 2*act_dim)` and
/// noise `xi` = `(batch, act_dim)`.
pub fn squashed_sample<T: Scalar>(
    head_out: &[T],
    xi: &[T],
    batch: usize,
    act_dim: usize,
) -> SquashedSample<T> {
    let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    let mut actions = vec![T::zero(); batch * act_dim];
    let mut pre_tanh = vec![T::zero(); batch * act_dim];
    let mut log_std = vec![T::zero(); batch * act_dim];
    let mut log_std_active = vec![false; batch * act_dim];
    let mut log_prob = vec![T::zero(); batch];
    for b in 0..batch {
        let row = &head_out[b * 2 * act_dim..(b + 1) * 2 * act_dim];
        let mut lp = 0.0;
        for i in 0..act_dim {
            let mean = row[i];
            let raw_ls = row[act_dim + i].to_f64();
            let ls = raw_ls.clamp(LOG_STD_MIN, LOG_STD_MAX);
            let active = raw_ls > LOG_STD_MIN && raw_ls < LOG_STD_MAX;
            let std = ls.exp();
            let x = xi[b * act_dim + i].to_f64();
            let u = mean.to_f64() + std * x;
            let a = u.tanh();
            lp += -0.5 * x * x - ls - half_ln_2pi - (1.0 - a * a + SQUASH_EPS).ln();
            let idx = b * act_dim + i;
            actions[idx] = T::from_f64(a);
            pre_tanh[idx] = T::from_f64(u);
            log_std[idx] = T::from_f64(ls);
            log_std_active[idx] = active;
        }
        log_prob[b] = T::from_f64(lp);
    }
    SquashedSample { actions, pre_tanh, log_std, log_std_active, log_prob }
}
