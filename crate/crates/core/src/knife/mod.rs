//! Gaussian-mixture estimators of differential entropy and mutual information.
//!
//! The marginal model fits `ĝ(t) = Σ_k w_k Π_j N(t_j; μ_kj, σ_kj²)` by
//! maximum likelihood. The conditional model perturbs the logits, means and
//! log-sigmas of a fitted marginal with offsets predicted from the
//! conditioning variable by a one-hidden-layer tanh network whose output
//! layer starts at zero, so before training the conditional density is the
//! marginal density and the estimate starts at exactly zero.
//!
//! The mutual information estimate is `ĥ(T) − ĥ(T|S)`. Because the
//! conditional family is restricted, the estimate is a predictive
//! (F-)information and is not symmetric in its arguments.

mod adam;
mod conditional;
mod marginal;
mod mixture;
mod standardize;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;

pub use conditional::{fit_conditional, ConditionalKnife};
pub use marginal::{entropy, fit_marginal, MarginalKnife};
pub use standardize::Standardizer;

use crate::{Error, PairedDataset, Result, RngSeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Covariance {
    #[default]
    Diagonal,
}

/// Estimator hyper-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct KnifeConfig {
    /// Mixture modes `K`.
    pub modes: usize,
    pub covariance: Covariance,
    pub learn_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Stop after this many epochs without a new best epoch-mean loss.
    pub patience: usize,
    /// Fraction of rows held out for entropy evaluation; 0 evaluates on the
    /// fitting data.
    pub holdout_fraction: f64,
    pub standardize: bool,
    /// Hidden width of the conditional network.
    pub hidden_width: usize,
    pub sigma_floor: f64,
    pub sigma_ceil: f64,
    pub seed: RngSeed,
}

impl Default for KnifeConfig {
    fn default() -> Self {
        Self {
            modes: 4,
            covariance: Covariance::Diagonal,
            learn_rate: 1e-3,
            epochs: 200,
            batch_size: 128,
            patience: 10,
            holdout_fraction: 0.0,
            standardize: true,
            hidden_width: 64,
            sigma_floor: 1e-4,
            sigma_ceil: 1e4,
            seed: RngSeed(0),
        }
    }
}

impl KnifeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.modes == 0 {
            return bad("modes must be at least 1");
        }
        if !(self.learn_rate > 0.0 && self.learn_rate.is_finite()) {
            return bad("learn_rate must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.hidden_width == 0 {
            return bad("hidden_width must be at least 1");
        }
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return bad("holdout_fraction must lie in [0, 1)");
        }
        if !(self.sigma_floor > 0.0 && self.sigma_floor < self.sigma_ceil && self.sigma_ceil.is_finite()) {
            return bad("need 0 < sigma_floor < sigma_ceil < inf");
        }
        Ok(())
    }

    pub(crate) fn log_sigma_bounds(&self) -> (f64, f64) {
        (crate::math::ln(self.sigma_floor), crate::math::ln(self.sigma_ceil))
    }
}

/// Which variable is predicted from which.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `I(S → T)`: summaries predict sources. The headline score.
    SummaryToSource,
    /// `I(T → S)`: sources predict summaries.
    SourceToSummary,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::SummaryToSource => "S->T",
            Direction::SourceToSummary => "T->S",
        })
    }
}

/// Per-fit training record.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitTrace {
    /// Mean training loss of each epoch, in nats of the standardized data.
    pub epoch_losses: Vec<f64>,
    pub warnings: Vec<String>,
}

impl FitTrace {
    pub fn epochs_run(&self) -> usize {
        self.epoch_losses.len()
    }

    pub fn final_loss(&self) -> f64 {
        self.epoch_losses.last().copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiDiagnostics {
    pub marginal_final_loss: f64,
    pub conditional_final_loss: f64,
    pub marginal_epochs: usize,
    pub conditional_epochs: usize,
    pub train_size: usize,
    pub eval_size: usize,
    pub warnings: Vec<String>,
}

/// Mutual information estimate in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct MiEstimate {
    pub h_marginal: f64,
    pub h_conditional: f64,
    /// `h_marginal − h_conditional`, unclamped.
    pub mi_raw: f64,
    /// `max(0, mi_raw)`.
    pub mi: f64,
    pub direction: Direction,
    pub diagnostics: MiDiagnostics,
}

/// Fitted models behind an [`MiEstimate`], kept for pointwise diagnostics and
/// serialization.
#[derive(Debug, Clone)]
pub struct FittedPair {
    pub marginal: MarginalKnife,
    pub conditional: ConditionalKnife,
    pub eval_rows: Vec<usize>,
}

/// Estimates `I(S → T)` or `I(T → S)` on the paired data.
pub fn estimate_mi(pairs: &PairedDataset, cfg: &KnifeConfig, direction: Direction) -> Result<MiEstimate> {
    estimate_mi_with_models(pairs, cfg, direction).map(|(est, _)| est)
}

/// As [`estimate_mi`], also returning the fitted models.
pub fn estimate_mi_with_models(
    pairs: &PairedDataset,
    cfg: &KnifeConfig,
    direction: Direction,
) -> Result<(MiEstimate, FittedPair)> {
    cfg.validate()?;
    let (target, condition) = match direction {
        Direction::SummaryToSource => (pairs.source(), pairs.summary()),
        Direction::SourceToSummary => (pairs.summary(), pairs.source()),
    };
    let (train, eval) = split_rows(target.n_rows(), cfg)?;
    let marginal = marginal::fit_rows(target, &train, cfg, cfg.seed.derive(&[1]))?;
    let conditional =
        conditional::fit_rows(target, condition, &train, &marginal, cfg, cfg.seed.derive(&[2]))?;

    let h_marginal = marginal::entropy_rows(&marginal, target, &eval)?;
    let h_conditional = conditional.conditional_entropy_rows(target, condition, &eval)?;
    let mi_raw = h_marginal - h_conditional;
    if !mi_raw.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite entropy estimate (h = {h_marginal}, h_cond = {h_conditional})"
        )));
    }
    let mut warnings = marginal.trace().warnings.clone();
    warnings.extend(conditional.trace().warnings.iter().cloned());
    let estimate = MiEstimate {
        h_marginal,
        h_conditional,
        mi_raw,
        mi: mi_raw.max(0.0),
        direction,
        diagnostics: MiDiagnostics {
            marginal_final_loss: marginal.trace().final_loss(),
            conditional_final_loss: conditional.trace().final_loss(),
            marginal_epochs: marginal.trace().epochs_run(),
            conditional_epochs: conditional.trace().epochs_run(),
            train_size: train.len(),
            eval_size: eval.len(),
            warnings,
        },
    };
    Ok((estimate, FittedPair { marginal, conditional, eval_rows: eval }))
}

/// `ln f_[s](t) − ln ĝ(t)`: the per-pair contribution to the estimate.
///
/// Diagnostic only. Per-example values are noisy and have not proven useful
/// as a per-summary quality signal; use the dataset-level estimate for that.
pub fn pointwise_mi(marginal: &MarginalKnife, conditional: &ConditionalKnife, t: &[f64], s: &[f64]) -> Result<f64> {
    if t.len() != marginal.dim() {
        return Err(Error::DimMismatch { expected: marginal.dim(), got: t.len() });
    }
    if s.len() != conditional.condition_dim() {
        return Err(Error::DimMismatch { expected: conditional.condition_dim(), got: s.len() });
    }
    let lf = conditional.log_density(t, s)?;
    let lg = marginal.log_density(t)?;
    Ok(lf - lg)
}

/// Splits row indices into (train, eval). With no holdout both are all rows.
fn split_rows(n: usize, cfg: &KnifeConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    let all: Vec<usize> = (0..n).collect();
    if cfg.holdout_fraction == 0.0 {
        if n < cfg.modes {
            return Err(Error::TooFewRows { needed: cfg.modes, got: n });
        }
        return Ok((all.clone(), all));
    }
    let n_eval = ((n as f64 * cfg.holdout_fraction) as usize).max(1);
    if n < n_eval + cfg.modes {
        return Err(Error::TooFewRows { needed: n_eval + cfg.modes, got: n });
    }
    let mut shuffled = all;
    shuffled.shuffle(&mut cfg.seed.derive(&[0]).rng());
    let mut eval = shuffled[..n_eval].to_vec();
    let mut train = shuffled[n_eval..].to_vec();
    eval.sort_unstable();
    train.sort_unstable();
    Ok((train, eval))
}

/// Epoch loop shared by both fitters: shuffles, batches, and stops on
/// plateau. `step` receives one batch of row indices and returns the summed
/// loss of that batch.
pub(crate) fn train_epochs(
    rows: &[usize],
    cfg: &KnifeConfig,
    seed: RngSeed,
    trace: &mut FitTrace,
    mut step: impl FnMut(&[usize]) -> f64,
) {
    let mut rng = seed.rng();
    let mut order = rows.to_vec();
    let mut best = f64::INFINITY;
    let mut stale = 0;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let total: f64 = order.chunks(cfg.batch_size).map(&mut step).sum();
        let loss = total / order.len() as f64;
        trace.epoch_losses.push(loss);
        if loss < best {
            best = loss;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests;
