//! The summarizer score: estimated `I(S → T)` between source and summary
//! embeddings, with the reverse direction, normalized MI and a Gaussian
//! baseline reported alongside.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::cosine_agreement;
use crate::knife::{estimate_mi_with_models, Direction, FittedPair, KnifeConfig, MiEstimate};
use crate::math::{ln, sqrt};
use crate::{Error, PairedDataset, Result};

/// Mean paired cosine above which inputs are treated as near-duplicates.
pub const NEAR_DUPLICATE_COSINE: f64 = 0.999;

/// `1 − h(T|S)/h(T)`, reported verbatim with a range flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedMi {
    pub value: f64,
    /// Set when `value ∉ [0, 1]`, which happens whenever a differential
    /// entropy is negative or smaller than the MI.
    pub out_of_range: bool,
}

/// `I/h(T) = 1 − h(T|S)/h(T)`.
pub fn normalized_mi(h_marginal: f64, h_conditional: f64) -> Result<NormalizedMi> {
    if h_marginal == 0.0 {
        return Err(Error::ZeroMarginalEntropy);
    }
    let value = 1.0 - h_conditional / h_marginal;
    Ok(NormalizedMi { value, out_of_range: !(0.0..=1.0).contains(&value) })
}

/// `ln det` of a symmetric positive-definite matrix via Cholesky.
fn log_det_spd(a: &[f64], n: usize) -> Result<f64> {
    let mut l = vec![0.0; n * n];
    let mut log_det = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            let v = a[i * n + j] - dot;
            if i == j {
                if v.is_nan() || v <= 0.0 {
                    return Err(Error::SingularCovariance);
                }
                let d = sqrt(v);
                l[i * n + i] = d;
                log_det += 2.0 * ln(d);
            } else {
                l[i * n + j] = v / l[j * n + j];
            }
        }
    }
    Ok(log_det)
}

/// Adds `ridge · trace/dim` to the diagonal of the `idx × idx` block and
/// returns that block.
fn ridged_block(cov: &[f64], n: usize, idx: &[usize], ridge: f64) -> Vec<f64> {
    let m = idx.len();
    let mut block: Vec<f64> = idx.iter().flat_map(|&i| idx.iter().map(move |&j| cov[i * n + j])).collect();
    let trace: f64 = (0..m).map(|i| block[i * m + i]).sum();
    let bump = ridge * trace / m as f64;
    (0..m).for_each(|i| block[i * m + i] += bump);
    block
}

/// Mutual information of a Gaussian fitted to the joint sample:
/// `½ ln det Σ_T + ½ ln det Σ_S − ½ ln det Σ_TS`.
///
/// Exact for jointly Gaussian data; embedding distributions are usually far
/// from Gaussian, which is why this is a baseline only.
pub fn gaussian_mi(pairs: &PairedDataset, ridge: f64) -> Result<f64> {
    let (t, s) = (pairs.source(), pairs.summary());
    let (dt, ds) = (t.dim(), s.dim());
    let d = dt + ds;
    let n = pairs.n_rows();
    if n <= d {
        return Err(Error::InsufficientSamples { samples: n, dims: d });
    }
    let mut mean = vec![0.0; d];
    for (a, b) in t.rows().zip(s.rows()) {
        for (m, v) in mean.iter_mut().zip(a.iter().chain(b)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for (a, b) in t.rows().zip(s.rows()) {
        for ((c, v), m) in centered.iter_mut().zip(a.iter().chain(b)).zip(&mean) {
            *c = v - m;
        }
        for i in 0..d {
            let ci = centered[i];
            for j in 0..=i {
                cov[i * d + j] += ci * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in 0..=i {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    let all: Vec<usize> = (0..d).collect();
    let t_idx = &all[..dt];
    let s_idx = &all[dt..];
    let ld_t = log_det_spd(&ridged_block(&cov, d, t_idx, ridge), dt)?;
    let ld_s = log_det_spd(&ridged_block(&cov, d, s_idx, ridge), ds)?;
    let ld_joint = log_det_spd(&ridged_block(&cov, d, &all, ridge), d)?;
    Ok(0.5 * (ld_t + ld_s - ld_joint))
}

/// Names echoed into a report.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLabels {
    pub summarizer: String,
    pub dataset: String,
    pub embedder: String,
}

/// Gaussian baseline outcome; unavailability is a result, not an error.
#[derive(Debug, Clone, PartialEq)]
pub enum GaussianBaseline {
    Value(f64),
    Unavailable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosmicReport {
    pub labels: RunLabels,
    /// Headline: `I(S → T)`.
    pub mi_s_to_t: MiEstimate,
    /// Diagnostic: `I(T → S)`.
    pub mi_t_to_s: MiEstimate,
    /// From the headline direction; `None` when `h(T) = 0`.
    pub normalized_mi: Option<NormalizedMi>,
    pub gaussian_mi: GaussianBaseline,
    /// Mean paired cosine, when both sides share a dimension.
    pub mean_cosine: Option<f64>,
    pub near_duplicate: bool,
    pub n_pairs: usize,
    pub config: KnifeConfig,
    pub warnings: Vec<String>,
}

impl CosmicReport {
    /// The headline score in nats.
    pub fn score(&self) -> f64 {
        self.mi_s_to_t.mi
    }
}

pub const GAUSSIAN_RIDGE: f64 = 1e-6;

/// Scores one summarizer on its paired embeddings.
pub fn cosmic_score(pairs: &PairedDataset, cfg: &KnifeConfig, labels: RunLabels) -> Result<CosmicReport> {
    cosmic_score_with_models(pairs, cfg, labels).map(|(report, _)| report)
}

/// As [`cosmic_score`], also returning the fitted models of both directions
/// (`S → T` first).
pub fn cosmic_score_with_models(
    pairs: &PairedDataset,
    cfg: &KnifeConfig,
    labels: RunLabels,
) -> Result<(CosmicReport, [FittedPair; 2])> {
    let (mi_s_to_t, fit_s_to_t) = estimate_mi_with_models(pairs, cfg, Direction::SummaryToSource)?;
    let (mi_t_to_s, fit_t_to_s) = estimate_mi_with_models(pairs, cfg, Direction::SourceToSummary)?;
    let normalized = normalized_mi(mi_s_to_t.h_marginal, mi_s_to_t.h_conditional).ok();
    let gaussian = match gaussian_mi(pairs, GAUSSIAN_RIDGE) {
        Ok(v) => GaussianBaseline::Value(v),
        Err(e) => GaussianBaseline::Unavailable(format!("{e}")),
    };
    let mean_cosine = cosine_agreement(pairs).ok().map(|c| c.mean);
    let near_duplicate = mean_cosine.is_some_and(|c| c > NEAR_DUPLICATE_COSINE);

    let mut warnings = mi_s_to_t.diagnostics.warnings.clone();
    warnings.extend(mi_t_to_s.diagnostics.warnings.iter().cloned());
    if near_duplicate {
        warnings.push(format!(
            "summaries are near-duplicates of the sources (mean cosine > {NEAR_DUPLICATE_COSINE}); \
             the score is dominated by the estimator's variance floor"
        ));
    }
    if normalized.is_some_and(|n| n.out_of_range) {
        warnings.push("normalized MI outside [0, 1]: a differential entropy is negative or below the MI".into());
    }
    let report = CosmicReport {
        labels,
        mi_s_to_t,
        mi_t_to_s,
        normalized_mi: normalized,
        gaussian_mi: gaussian,
        mean_cosine,
        near_duplicate,
        n_pairs: pairs.n_rows(),
        config: cfg.clone(),
        warnings,
    };
    Ok((report, [fit_s_to_t, fit_t_to_s]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use crate::RngSeed;

    #[test]
    fn normalized_examples() {
        assert_eq!(normalized_mi(2.0, 2.0).unwrap(), NormalizedMi { value: 0.0, out_of_range: false });
        assert_eq!(normalized_mi(2.0, 0.0).unwrap(), NormalizedMi { value: 1.0, out_of_range: false });
        // H(T) = I + H(T|S) = 53.97 − 14.49.
        let n = normalized_mi(39.48, -14.49).unwrap();
        assert!((n.value - 1.367).abs() < 5e-4);
        assert!(n.out_of_range);
        assert_eq!(normalized_mi(0.0, 1.0), Err(Error::ZeroMarginalEntropy));
    }

    #[test]
    fn log_det_of_known_matrix() {
        // [[4, 2], [2, 3]] has determinant 8.
        assert!((log_det_spd(&[4.0, 2.0, 2.0, 3.0], 2).unwrap() - ln(8.0)).abs() < 1e-12);
        assert_eq!(log_det_spd(&[1.0, 1.0, 1.0, 1.0], 2), Err(Error::SingularCovariance));
    }

    #[test]
    fn gaussian_baseline_on_gaussian_pairs() {
        let p = synth::correlated_pairs(20_000, 4, 0.8, RngSeed(11));
        let mi = gaussian_mi(&p, GAUSSIAN_RIDGE).unwrap();
        let truth = synth::gaussian_pair_mi(4, 0.8);
        assert!((mi - truth).abs() <= 0.05 * truth, "{mi} vs {truth}");
        let q = synth::correlated_pairs(20_000, 4, 0.0, RngSeed(12));
        assert!(gaussian_mi(&q, GAUSSIAN_RIDGE).unwrap() <= 0.02);
    }

    #[test]
    fn gaussian_baseline_needs_enough_rows() {
        let p = synth::correlated_pairs(8, 4, 0.5, RngSeed(1));
        assert_eq!(gaussian_mi(&p, GAUSSIAN_RIDGE), Err(Error::InsufficientSamples { samples: 8, dims: 8 }));
    }

    #[test]
    fn gaussian_baseline_reports_singular_after_ridge() {
        let p = synth::correlated_pairs(50, 2, 0.5, RngSeed(1));
        let (t, s) = p.into_parts();
        let dup = crate::EmbeddingMatrix::new(t.ids().to_vec(), 2, t.values().iter().map(|_| 1.0).collect()).unwrap();
        let p = crate::validate_pairing(dup, s).unwrap();
        assert_eq!(gaussian_mi(&p, 0.0), Err(Error::SingularCovariance));
    }
}
