//! Diagonal Gaussian mixture evaluation shared by both fitters.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{exp, log_sum_exp, LN_2PI};

/// A diagonal mixture with derived quantities cached for fast evaluation.
///
/// Both the marginal and the conditional model evaluate densities through
/// this type, so equal parameters give bit-equal log densities.
#[derive(Debug, Clone)]
pub(crate) struct Mixture {
    k: usize,
    d: usize,
    log_weights: Vec<f64>,
    means: Vec<f64>,
    inv_sigma: Vec<f64>,
    comp_const: Vec<f64>,
    comp: Vec<f64>,
}

impl Mixture {
    pub fn new(k: usize, d: usize) -> Self {
        Self {
            k,
            d,
            log_weights: vec![0.0; k],
            means: vec![0.0; k * d],
            inv_sigma: vec![1.0; k * d],
            comp_const: vec![0.0; k],
            comp: vec![0.0; k],
        }
    }

    pub fn load(&mut self, logits: &[f64], means: &[f64], log_sigmas: &[f64]) {
        let lse = log_sum_exp(logits);
        for (lw, a) in self.log_weights.iter_mut().zip(logits) {
            *lw = a - lse;
        }
        self.means.copy_from_slice(means);
        for (inv, ls) in self.inv_sigma.iter_mut().zip(log_sigmas) {
            *inv = exp(-ls);
        }
        let half_d_ln2pi = 0.5 * self.d as f64 * LN_2PI;
        for k in 0..self.k {
            let sum_ls: f64 = log_sigmas[k * self.d..(k + 1) * self.d].iter().sum();
            self.comp_const[k] = self.log_weights[k] - sum_ls - half_d_ln2pi;
        }
    }

    /// `ln ĝ(x)`; leaves per-component joint log terms for [`Self::grad`].
    pub fn log_density(&mut self, x: &[f64]) -> f64 {
        let d = self.d;
        for k in 0..self.k {
            let mu = &self.means[k * d..(k + 1) * d];
            let inv = &self.inv_sigma[k * d..(k + 1) * d];
            let mut quad = 0.0;
            for j in 0..d {
                let z = (x[j] - mu[j]) * inv[j];
                quad += z * z;
            }
            self.comp[k] = self.comp_const[k] - 0.5 * quad;
        }
        log_sum_exp(&self.comp)
    }

    /// Adds `factor · ∂(−ln ĝ(x))/∂θ` for logits, means and log-sigmas.
    /// Must follow `log_density(x)` which returned `log_g`. Entries where
    /// `frozen_sigma` is true get no log-sigma gradient.
    #[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
    pub fn grad(
        &self,
        x: &[f64],
        log_g: f64,
        factor: f64,
        g_logits: &mut [f64],
        g_means: &mut [f64],
        g_log_sigmas: &mut [f64],
        frozen_sigma: Option<&[bool]>,
    ) {
        let d = self.d;
        for k in 0..self.k {
            let r = exp(self.comp[k] - log_g);
            let w = exp(self.log_weights[k]);
            g_logits[k] -= factor * (r - w);
            if r == 0.0 {
                continue;
            }
            let rf = r * factor;
            for j in 0..d {
                let idx = k * d + j;
                let inv = self.inv_sigma[idx];
                let z = (x[j] - self.means[idx]) * inv;
                g_means[idx] -= rf * z * inv;
                if frozen_sigma.is_none_or(|f| !f[idx]) {
                    g_log_sigmas[idx] -= rf * (z * z - 1.0);
                }
            }
        }
    }
}
