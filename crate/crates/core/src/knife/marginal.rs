use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::adam::Adam;
use super::mixture::Mixture;
use super::{train_epochs, FitTrace, KnifeConfig, Standardizer};
use crate::math::{ln, sqrt};
use crate::{EmbeddingMatrix, Error, Result, RngSeed};

/// Fitted marginal density `ĝ` over the standardized data.
#[derive(Debug, Clone)]
pub struct MarginalKnife {
    modes: usize,
    dim: usize,
    logits: Vec<f64>,
    means: Vec<f64>,
    log_sigmas: Vec<f64>,
    standardizer: Standardizer,
    trace: FitTrace,
}

impl MarginalKnife {
    /// Rebuilds a model from stored parameters (`means`/`log_sigmas` are
    /// `modes × dim`, row-major).
    pub fn from_parts(
        logits: Vec<f64>,
        means: Vec<f64>,
        log_sigmas: Vec<f64>,
        standardizer: Standardizer,
    ) -> Result<Self> {
        let modes = logits.len();
        let dim = standardizer.dim();
        if modes == 0 || dim == 0 {
            return Err(Error::EmptyDataset);
        }
        if means.len() != modes * dim || log_sigmas.len() != modes * dim {
            return Err(Error::ShapeMismatch(alloc::format!(
                "mixture with {modes} modes in {dim} dimensions needs {} means and log-sigmas",
                modes * dim
            )));
        }
        let all = logits.iter().chain(&means).chain(&log_sigmas);
        if all.chain(standardizer.shift()).chain(standardizer.scale()).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite model parameter".into()));
        }
        Ok(Self { modes, dim, logits, means, log_sigmas, standardizer, trace: FitTrace::default() })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn weights(&self) -> Vec<f64> {
        let lse = crate::math::log_sum_exp(&self.logits);
        self.logits.iter().map(|a| crate::math::exp(a - lse)).collect()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn log_sigmas(&self) -> &[f64] {
        &self.log_sigmas
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn trace(&self) -> &FitTrace {
        &self.trace
    }

    pub(crate) fn mixture(&self) -> Mixture {
        let mut m = Mixture::new(self.modes, self.dim);
        m.load(&self.logits, &self.means, &self.log_sigmas);
        m
    }

    /// `ln ĝ(x)` in original coordinates.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: x.len() });
        }
        let mut z = vec![0.0; self.dim];
        self.standardizer.apply(x, &mut z);
        Ok(self.mixture().log_density(&z) - self.standardizer.log_det())
    }
}

/// Fits the marginal mixture on every row of `data`.
pub fn fit_marginal(data: &EmbeddingMatrix, cfg: &KnifeConfig) -> Result<MarginalKnife> {
    cfg.validate()?;
    let rows: Vec<usize> = (0..data.n_rows()).collect();
    fit_rows(data, &rows, cfg, cfg.seed.derive(&[1]))
}

/// `−(1/N) Σ ln ĝ(x_i)` over the rows of `eval`, in original coordinates.
pub fn entropy(model: &MarginalKnife, eval: &EmbeddingMatrix) -> Result<f64> {
    let rows: Vec<usize> = (0..eval.n_rows()).collect();
    entropy_rows(model, eval, &rows)
}

pub(crate) fn entropy_rows(model: &MarginalKnife, eval: &EmbeddingMatrix, rows: &[usize]) -> Result<f64> {
    if eval.dim() != model.dim {
        return Err(Error::DimMismatch { expected: model.dim, got: eval.dim() });
    }
    let mut mixture = model.mixture();
    let mut z = vec![0.0; model.dim];
    let mut sum = 0.0;
    for &r in rows {
        model.standardizer.apply(eval.row(r), &mut z);
        sum += mixture.log_density(&z);
    }
    Ok(-sum / rows.len() as f64 + model.standardizer.log_det())
}

pub(crate) fn fit_rows(
    data: &EmbeddingMatrix,
    rows: &[usize],
    cfg: &KnifeConfig,
    seed: RngSeed,
) -> Result<MarginalKnife> {
    let (k, d) = (cfg.modes, data.dim());
    if rows.len() < k {
        return Err(Error::TooFewRows { needed: k, got: rows.len() });
    }
    let mut trace = FitTrace::default();
    let standardizer = if cfg.standardize {
        Standardizer::fit(data, rows, &mut trace.warnings)
    } else {
        Standardizer::identity(d)
    };
    // Standardized copy of the training rows, indexed by position in `rows`.
    let mut z = vec![0.0; rows.len() * d];
    for (i, &r) in rows.iter().enumerate() {
        standardizer.apply(data.row(r), &mut z[i * d..(i + 1) * d]);
    }

    let (ls_min, ls_max) = cfg.log_sigma_bounds();
    let mut rng = seed.rng();
    let mut params = vec![0.0; k + 2 * k * d];
    {
        let (_, rest) = params.split_at_mut(k);
        let (means, log_sigmas) = rest.split_at_mut(k * d);
        for (slot, pick) in initial_modes(&z, d, k, &mut rng).into_iter().enumerate() {
            means[slot * d..(slot + 1) * d].copy_from_slice(&z[pick * d..(pick + 1) * d]);
        }
        let n = rows.len() as f64;
        for j in 0..d {
            let mean = (0..rows.len()).map(|i| z[i * d + j]).sum::<f64>() / n;
            let var = (0..rows.len()).map(|i| { let c = z[i * d + j] - mean; c * c }).sum::<f64>() / n;
            let ls = ln(sqrt(var)).clamp(ls_min, ls_max);
            for slot in 0..k {
                log_sigmas[slot * d + j] = ls;
            }
        }
    }

    let mut adam = Adam::new(params.len(), cfg.learn_rate);
    let mut grad = vec![0.0; params.len()];
    let mut mixture = Mixture::new(k, d);
    let positions: Vec<usize> = (0..rows.len()).collect();
    train_epochs(&positions, cfg, seed.derive(&[0xba7c4]), &mut trace, |batch| {
        let (logits, rest) = params.split_at(k);
        let (means, log_sigmas) = rest.split_at(k * d);
        mixture.load(logits, means, log_sigmas);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let (g_logits, g_rest) = grad.split_at_mut(k);
        let (g_means, g_ls) = g_rest.split_at_mut(k * d);
        let factor = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for &i in batch {
            let x = &z[i * d..(i + 1) * d];
            let lg = mixture.log_density(x);
            loss -= lg;
            mixture.grad(x, lg, factor, g_logits, g_means, g_ls, None);
        }
        adam.step(&mut params, &grad);
        params[k + k * d..].iter_mut().for_each(|ls| *ls = ls.clamp(ls_min, ls_max));
        loss
    });

    let log_sigmas = params.split_off(k + k * d);
    let means = params.split_off(k);
    Ok(MarginalKnife { modes: k, dim: d, logits: params, means, log_sigmas, standardizer, trace })
}

/// `k` rows in random order, preferring rows whose values differ from the
/// ones already picked; repeats only when fewer than `k` distinct rows exist.
fn initial_modes(z: &[f64], d: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len() / d).collect();
    order.shuffle(rng);
    let mut picks: Vec<usize> = Vec::with_capacity(k);
    for &i in &order {
        let row = &z[i * d..(i + 1) * d];
        if !picks.iter().any(|&p| &z[p * d..(p + 1) * d] == row) {
            picks.push(i);
            if picks.len() == k {
                return picks;
            }
        }
    }
    let rest: Vec<usize> = order.into_iter().filter(|i| !picks.contains(i)).take(k - picks.len()).collect();
    picks.extend(rest);
    picks
}
