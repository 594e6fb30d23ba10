//! Estimator behaviour on synthetic data with known information content.

use cosmic_core::knife::{entropy, estimate_mi, fit_marginal, Direction, KnifeConfig};
use cosmic_core::synth::{self, UNIT_NORMAL_ENTROPY};
use cosmic_core::RngSeed;

fn cfg(seed: u64) -> KnifeConfig {
    KnifeConfig { seed: RngSeed(seed), ..KnifeConfig::default() }
}

#[test]
fn eight_dim_standard_normal_entropy() {
    let data = synth::standard_normal(5_000, 8, RngSeed(21));
    let h = entropy(&fit_marginal(&data, &cfg(21)).unwrap(), &data).unwrap();
    let truth = 8.0 * UNIT_NORMAL_ENTROPY;
    assert!((h - truth).abs() <= 0.03 * truth, "{h} vs {truth}");
}

#[test]
fn correlated_gaussian_mi_both_directions() {
    let pairs = synth::correlated_pairs(20_000, 4, 0.8, RngSeed(22));
    let truth = synth::gaussian_pair_mi(4, 0.8);
    for dir in [Direction::SummaryToSource, Direction::SourceToSummary] {
        let t = std::time::Instant::now();
        let est = estimate_mi(&pairs, &cfg(22), dir).unwrap();
        eprintln!("{dir}: {est:?} in {:?}", t.elapsed());
        assert!((est.mi - truth).abs() <= 0.10 * truth, "{dir}: {} vs {truth}", est.mi);
    }
}

#[test]
fn independent_gaussians_carry_no_information() {
    let pairs = synth::correlated_pairs(20_000, 4, 0.0, RngSeed(23));
    let est = estimate_mi(&pairs, &cfg(23), Direction::SummaryToSource).unwrap();
    eprintln!("{est:?}");
    assert!(est.mi <= 0.05, "{est:?}");
}

#[test]
fn noisier_projection_scores_lower() {
    let sigmas = [0.1, 0.5, 1.0, 2.0, 4.0];
    let mis: Vec<f64> = sigmas
        .iter()
        .map(|&s| {
            let pairs = synth::noisy_projection(5_000, 4, 2, s, RngSeed(24));
            estimate_mi(&pairs, &cfg(24), Direction::SummaryToSource).unwrap().mi
        })
        .collect();
    eprintln!("{mis:?}");
    assert!(mis.windows(2).all(|w| w[0] > w[1]), "{mis:?}");
}

#[test]
fn per_dimension_affine_maps_barely_move_the_estimate() {
    let pairs = synth::correlated_pairs(5_000, 4, 0.8, RngSeed(25));
    let base = estimate_mi(&pairs, &cfg(25), Direction::SummaryToSource).unwrap().mi;
    let (t, s) = pairs.into_parts();
    let t2 = t.affine(&[5.0, -0.2, 1.0, 30.0], &[1.0, 2.0, -100.0, 0.0]).unwrap();
    let s2 = s.affine(&[-1.0, 0.01, 7.0, 2.0], &[0.0, 0.0, 3.0, -3.0]).unwrap();
    let moved = cosmic_core::validate_pairing(t2, s2).unwrap();
    let est = estimate_mi(&moved, &cfg(25), Direction::SummaryToSource).unwrap().mi;
    assert!((est - base).abs() <= 0.1, "{base} vs {est}");
}
