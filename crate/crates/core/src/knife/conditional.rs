use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::adam::Adam;
use super::mixture::Mixture;
use super::{train_epochs, FitTrace, KnifeConfig, MarginalKnife, Standardizer};
use crate::math::{sqrt, tanh};
use crate::{EmbeddingMatrix, Error, PairedDataset, Result, RngSeed};

/// Conditional density `f_[s](t)`: a frozen base mixture whose logits, means
/// and log-sigmas are shifted by offsets predicted from `s`.
///
/// Network: `h = tanh(W1·s̃ + b1)`, `o = W2·h + b2`, with `s̃` the
/// standardized condition. `o` is laid out as `[logits (K) | means (K·d) |
/// log-sigmas (K·d)]`.
#[derive(Debug, Clone)]
pub struct ConditionalKnife {
    base: MarginalKnife,
    condition_standardizer: Standardizer,
    hidden: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
    log_sigma_bounds: (f64, f64),
    trace: FitTrace,
}

/// Buffers for one forward/backward pass.
struct Workspace {
    s: Vec<f64>,
    t: Vec<f64>,
    h: Vec<f64>,
    o: Vec<f64>,
    logits: Vec<f64>,
    means: Vec<f64>,
    log_sigmas: Vec<f64>,
    frozen: Vec<bool>,
    g_o: Vec<f64>,
    g_h: Vec<f64>,
    mixture: Mixture,
}

impl ConditionalKnife {
    /// Warm-start model: zero output layer, so `f_[s] = ĝ` for every `s`.
    pub fn warm_start(
        base: MarginalKnife,
        condition_standardizer: Standardizer,
        cfg: &KnifeConfig,
        seed: RngSeed,
    ) -> Result<Self> {
        cfg.validate()?;
        let ds = condition_standardizer.dim();
        let hidden = cfg.hidden_width;
        let n_out = base.modes() * (1 + 2 * base.dim());
        let limit = sqrt(6.0 / (ds + hidden) as f64);
        let mut rng = seed.rng();
        let w1 = (0..hidden * ds).map(|_| rng.random_range(-limit..limit)).collect();
        Ok(Self {
            base,
            condition_standardizer,
            hidden,
            w1,
            b1: vec![0.0; hidden],
            w2: vec![0.0; n_out * hidden],
            b2: vec![0.0; n_out],
            log_sigma_bounds: cfg.log_sigma_bounds(),
            trace: FitTrace::default(),
        })
    }

    /// Rebuilds a model from stored network weights.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        base: MarginalKnife,
        condition_standardizer: Standardizer,
        hidden: usize,
        w1: Vec<f64>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: Vec<f64>,
        log_sigma_bounds: (f64, f64),
    ) -> Result<Self> {
        let ds = condition_standardizer.dim();
        let n_out = base.modes() * (1 + 2 * base.dim());
        if hidden == 0
            || w1.len() != hidden * ds
            || b1.len() != hidden
            || w2.len() != n_out * hidden
            || b2.len() != n_out
        {
            return Err(Error::ShapeMismatch("conditional network weights".into()));
        }
        if w1.iter().chain(&b1).chain(&w2).chain(&b2).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite model parameter".into()));
        }
        Ok(Self {
            base,
            condition_standardizer,
            hidden,
            w1,
            b1,
            w2,
            b2,
            log_sigma_bounds,
            trace: FitTrace::default(),
        })
    }

    pub fn base(&self) -> &MarginalKnife {
        &self.base
    }

    pub fn condition_standardizer(&self) -> &Standardizer {
        &self.condition_standardizer
    }

    pub fn condition_dim(&self) -> usize {
        self.condition_standardizer.dim()
    }

    pub fn hidden_width(&self) -> usize {
        self.hidden
    }

    /// `(W1, b1, W2, b2)`, row-major.
    pub fn weights(&self) -> (&[f64], &[f64], &[f64], &[f64]) {
        (&self.w1, &self.b1, &self.w2, &self.b2)
    }

    pub fn log_sigma_bounds(&self) -> (f64, f64) {
        self.log_sigma_bounds
    }

    pub fn trace(&self) -> &FitTrace {
        &self.trace
    }

    fn n_out(&self) -> usize {
        self.b2.len()
    }

    fn workspace(&self) -> Workspace {
        let (k, d) = (self.base.modes(), self.base.dim());
        Workspace {
            s: vec![0.0; self.condition_dim()],
            t: vec![0.0; d],
            h: vec![0.0; self.hidden],
            o: vec![0.0; self.n_out()],
            logits: vec![0.0; k],
            means: vec![0.0; k * d],
            log_sigmas: vec![0.0; k * d],
            frozen: vec![false; k * d],
            g_o: vec![0.0; self.n_out()],
            g_h: vec![0.0; self.hidden],
            mixture: Mixture::new(k, d),
        }
    }

    /// Loads the mixture for condition `s` (raw coordinates) into `ws`.
    fn forward(&self, s: &[f64], ws: &mut Workspace) {
        let ds = self.condition_dim();
        self.condition_standardizer.apply(s, &mut ws.s);
        for (u, h) in ws.h.iter_mut().enumerate() {
            let row = &self.w1[u * ds..(u + 1) * ds];
            let pre: f64 = self.b1[u] + row.iter().zip(&ws.s).map(|(w, x)| w * x).sum::<f64>();
            *h = tanh(pre);
        }
        let hw = self.hidden;
        for (q, o) in ws.o.iter_mut().enumerate() {
            let row = &self.w2[q * hw..(q + 1) * hw];
            *o = self.b2[q] + row.iter().zip(&ws.h).map(|(w, h)| w * h).sum::<f64>();
        }
        let k = self.base.modes();
        let kd = ws.means.len();
        let (lo, hi) = self.log_sigma_bounds;
        for (dst, (a, off)) in ws.logits.iter_mut().zip(self.base.logits().iter().zip(&ws.o[..k])) {
            *dst = a + off;
        }
        for (dst, (m, off)) in ws.means.iter_mut().zip(self.base.means().iter().zip(&ws.o[k..k + kd])) {
            *dst = m + off;
        }
        for (i, (ls, off)) in self.base.log_sigmas().iter().zip(&ws.o[k + kd..]).enumerate() {
            let raw = ls + off;
            ws.frozen[i] = raw < lo || raw > hi;
            ws.log_sigmas[i] = raw.clamp(lo, hi);
        }
        ws.mixture.load(&ws.logits, &ws.means, &ws.log_sigmas);
    }

    /// `ln f_[s](t)` in original coordinates of `t`.
    pub fn log_density(&self, t: &[f64], s: &[f64]) -> Result<f64> {
        if t.len() != self.base.dim() {
            return Err(Error::DimMismatch { expected: self.base.dim(), got: t.len() });
        }
        if s.len() != self.condition_dim() {
            return Err(Error::DimMismatch { expected: self.condition_dim(), got: s.len() });
        }
        let mut ws = self.workspace();
        self.forward(s, &mut ws);
        self.base.standardizer().apply(t, &mut ws.t);
        Ok(ws.mixture.log_density(&ws.t) - self.base.standardizer().log_det())
    }

    /// `−(1/N) Σ ln f_[s_i](t_i)` over paired rows, in original coordinates.
    pub fn conditional_entropy(&self, pairs: &PairedDataset) -> Result<f64> {
        let rows: Vec<usize> = (0..pairs.n_rows()).collect();
        self.conditional_entropy_rows(pairs.source(), pairs.summary(), &rows)
    }

    pub(crate) fn conditional_entropy_rows(
        &self,
        target: &EmbeddingMatrix,
        condition: &EmbeddingMatrix,
        rows: &[usize],
    ) -> Result<f64> {
        self.check_dims(target, condition)?;
        let mut ws = self.workspace();
        let mut sum = 0.0;
        for &r in rows {
            self.forward(condition.row(r), &mut ws);
            self.base.standardizer().apply(target.row(r), &mut ws.t);
            sum += ws.mixture.log_density(&ws.t);
        }
        Ok(-sum / rows.len() as f64 + self.base.standardizer().log_det())
    }

    fn check_dims(&self, target: &EmbeddingMatrix, condition: &EmbeddingMatrix) -> Result<()> {
        if target.dim() != self.base.dim() {
            return Err(Error::DimMismatch { expected: self.base.dim(), got: target.dim() });
        }
        if condition.dim() != self.condition_dim() {
            return Err(Error::DimMismatch { expected: self.condition_dim(), got: condition.dim() });
        }
        if target.n_rows() != condition.n_rows() {
            return Err(Error::LengthMismatch(target.n_rows(), condition.n_rows()));
        }
        Ok(())
    }

    /// Accumulates the loss gradient of one pair into `grad` (laid out as
    /// `[W1 | b1 | W2 | b2]`) and returns `−ln f_[s](t)` on standardized `t`.
    fn accumulate(&self, t: &[f64], s: &[f64], factor: f64, ws: &mut Workspace, grad: &mut [f64]) -> f64 {
        let (k, d) = (self.base.modes(), self.base.dim());
        let kd = k * d;
        self.forward(s, ws);
        self.base.standardizer().apply(t, &mut ws.t);
        let lg = ws.mixture.log_density(&ws.t);

        ws.g_o.iter_mut().for_each(|g| *g = 0.0);
        {
            let (g_logits, rest) = ws.g_o.split_at_mut(k);
            let (g_means, g_ls) = rest.split_at_mut(kd);
            ws.mixture.grad(&ws.t, lg, factor, g_logits, g_means, g_ls, Some(&ws.frozen));
        }

        let (ds, hw) = (self.condition_dim(), self.hidden);
        let (g_w1, rest) = grad.split_at_mut(hw * ds);
        let (g_b1, rest) = rest.split_at_mut(hw);
        let (g_w2, g_b2) = rest.split_at_mut(self.n_out() * hw);
        ws.g_h.iter_mut().for_each(|g| *g = 0.0);
        for (q, &go) in ws.g_o.iter().enumerate() {
            if go == 0.0 {
                continue;
            }
            g_b2[q] += go;
            let w_row = &self.w2[q * hw..(q + 1) * hw];
            let g_row = &mut g_w2[q * hw..(q + 1) * hw];
            for u in 0..hw {
                g_row[u] += go * ws.h[u];
                ws.g_h[u] += go * w_row[u];
            }
        }
        for u in 0..hw {
            let g_pre = ws.g_h[u] * (1.0 - ws.h[u] * ws.h[u]);
            if g_pre == 0.0 {
                continue;
            }
            g_b1[u] += g_pre;
            for (g, x) in g_w1[u * ds..(u + 1) * ds].iter_mut().zip(&ws.s) {
                *g += g_pre * x;
            }
        }
        -lg
    }

    fn params_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }
}

/// Fits `f_[S](T)` on the pairs, predicting `source` from `summary`.
/// `base` must be the marginal fitted on `pairs.source()`.
pub fn fit_conditional(pairs: &PairedDataset, base: &MarginalKnife, cfg: &KnifeConfig) -> Result<ConditionalKnife> {
    cfg.validate()?;
    let rows: Vec<usize> = (0..pairs.n_rows()).collect();
    fit_rows(pairs.source(), pairs.summary(), &rows, base, cfg, cfg.seed.derive(&[2]))
}

pub(crate) fn fit_rows(
    target: &EmbeddingMatrix,
    condition: &EmbeddingMatrix,
    rows: &[usize],
    base: &MarginalKnife,
    cfg: &KnifeConfig,
    seed: RngSeed,
) -> Result<ConditionalKnife> {
    if rows.len() < cfg.modes {
        return Err(Error::TooFewRows { needed: cfg.modes, got: rows.len() });
    }
    let mut trace = FitTrace::default();
    let condition_standardizer = if cfg.standardize {
        Standardizer::fit(condition, rows, &mut trace.warnings)
    } else {
        Standardizer::identity(condition.dim())
    };
    let mut model = ConditionalKnife::warm_start(base.clone(), condition_standardizer, cfg, seed)?;
    model.check_dims(target, condition)?;
    model.trace = trace;

    let sizes: Vec<usize> = model.params_mut().iter().map(|p| p.len()).collect();
    let n_params: usize = sizes.iter().sum();
    let mut flat = vec![0.0; n_params];
    let mut grad = vec![0.0; n_params];
    let mut adam = Adam::new(n_params, cfg.learn_rate);
    let mut ws = model.workspace();
    let mut trace = core::mem::take(&mut model.trace);

    train_epochs(rows, cfg, seed.derive(&[0xba7c4]), &mut trace, |batch| {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let factor = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for &r in batch {
            loss += model.accumulate(target.row(r), condition.row(r), factor, &mut ws, &mut grad);
        }
        let mut offset = 0;
        for p in model.params_mut() {
            flat[offset..offset + p.len()].copy_from_slice(p);
            offset += p.len();
        }
        adam.step(&mut flat, &grad);
        let mut offset = 0;
        for p in model.params_mut() {
            let len = p.len();
            p.copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        loss
    });
    model.trace = trace;
    Ok(model)
}
