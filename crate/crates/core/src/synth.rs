//! Seeded synthetic datasets with known information content.
//!
//! These back the estimator's analytic checks: Gaussian data has closed-form
//! entropy and mutual information, and the noisy-projection family has a
//! known ordering of informativeness.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::math::{ln, sqrt};
use crate::{validate_pairing, EmbeddingMatrix, PairedDataset, RngSeed};

/// `½ ln(2πe)`: entropy of a unit normal in nats.
pub const UNIT_NORMAL_ENTROPY: f64 = 1.418_938_533_204_672_7;

/// Mutual information in nats between `d` independent coordinate pairs each
/// with correlation `rho`: `−(d/2) ln(1 − ρ²)`.
pub fn gaussian_pair_mi(d: usize, rho: f64) -> f64 {
    -0.5 * d as f64 * ln(1.0 - rho * rho)
}

/// MI between `T ~ N(0, I)` and `S = T[..keep] + σ·noise`:
/// `(keep/2) ln(1 + 1/σ²)`.
pub fn noisy_projection_mi(keep: usize, sigma: f64) -> f64 {
    0.5 * keep as f64 * ln(1.0 + 1.0 / (sigma * sigma))
}

fn normals(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// `n × d` standard normal samples.
pub fn standard_normal(n: usize, d: usize, seed: RngSeed) -> EmbeddingMatrix {
    let mut rng = seed.rng();
    EmbeddingMatrix::with_index_ids(d, normals(n * d, &mut rng)).expect("finite samples")
}

/// 1-D equal-weight mixture of `N(μ_i, sd²)`.
pub fn gaussian_mixture_1d(n: usize, means: &[f64], sd: f64, seed: RngSeed) -> EmbeddingMatrix {
    let mut rng = seed.rng();
    let values = (0..n)
        .map(|_| {
            let k = rng.random_range(0..means.len());
            means[k] + sd * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    EmbeddingMatrix::with_index_ids(1, values).expect("finite samples")
}

/// Pairs with `corr(T_j, S_j) = ρ` per dimension and independent
/// dimensions; `ρ = 0` gives independent sides.
pub fn correlated_pairs(n: usize, d: usize, rho: f64, seed: RngSeed) -> PairedDataset {
    let mut rng = seed.rng();
    let t = normals(n * d, &mut rng);
    let noise = normals(n * d, &mut rng);
    let c = sqrt(1.0 - rho * rho);
    let s = t.iter().zip(&noise).map(|(t, e)| rho * t + c * e).collect();
    pair(d, t, d, s)
}

/// `T ~ N(0, I_d)`, `S = T[..keep] + σ·noise`: a summarizer that keeps
/// `keep` coordinates and blurs them.
pub fn noisy_projection(n: usize, d: usize, keep: usize, sigma: f64, seed: RngSeed) -> PairedDataset {
    let mut rng = seed.rng();
    let t = normals(n * d, &mut rng);
    let noise = normals(n * keep, &mut rng);
    let s = (0..n)
        .flat_map(|i| (0..keep).map(move |j| (i, j)))
        .map(|(i, j)| t[i * d + j] + sigma * noise[i * keep + j])
        .collect();
    pair(d, t, keep, s)
}

fn pair(dt: usize, t: Vec<f64>, ds: usize, s: Vec<f64>) -> PairedDataset {
    let source = EmbeddingMatrix::with_index_ids(dt, t).expect("finite samples");
    let summary = EmbeddingMatrix::with_index_ids(ds, s).expect("finite samples");
    validate_pairing(source, summary).expect("aligned ids")
}
