use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::math::{exp, ln};
use crate::synth::{self, UNIT_NORMAL_ENTROPY};
use crate::EmbeddingMatrix;

fn cfg(seed: u64) -> KnifeConfig {
    KnifeConfig { seed: RngSeed(seed), ..KnifeConfig::default() }
}

/// `−∫ g ln g` for the equal-weight mixture of `N(±5, 1)` by the midpoint
/// rule on [−15, 15] with step 1e-3.
fn bimodal_entropy_by_quadrature() -> f64 {
    let step = 1e-3;
    let n = (30.0 / step) as usize;
    let norm = 1.0 / libm::sqrt(2.0 * core::f64::consts::PI);
    (0..n)
        .map(|i| {
            let x = -15.0 + (i as f64 + 0.5) * step;
            let g = 0.5 * norm * (exp(-0.5 * (x - 5.0) * (x - 5.0)) + exp(-0.5 * (x + 5.0) * (x + 5.0)));
            if g > 0.0 {
                -g * ln(g) * step
            } else {
                0.0
            }
        })
        .sum()
}

#[test]
fn quadrature_oracle_is_sane() {
    // Well-separated modes: h ≈ h(N(0,1)) + ln 2.
    let h = bimodal_entropy_by_quadrature();
    assert!((h - (UNIT_NORMAL_ENTROPY + core::f64::consts::LN_2)).abs() < 1e-4, "{h}");
}

#[test]
fn single_point_surprisal() {
    let model = MarginalKnife::from_parts(vec![0.0], vec![0.0], vec![0.0], Standardizer::identity(1)).unwrap();
    let eval = EmbeddingMatrix::with_index_ids(1, vec![0.0]).unwrap();
    assert!((entropy(&model, &eval).unwrap() - 0.918_938_533_204_672_7).abs() < 1e-15);
    let wrong = EmbeddingMatrix::with_index_ids(2, vec![0.0, 0.0]).unwrap();
    assert_eq!(entropy(&model, &wrong), Err(Error::DimMismatch { expected: 1, got: 2 }));
}

#[test]
fn unit_normal_1d() {
    let data = synth::standard_normal(10_000, 1, RngSeed(1));
    let model = fit_marginal(&data, &cfg(1)).unwrap();
    let h = entropy(&model, &data).unwrap();
    assert!((h - UNIT_NORMAL_ENTROPY).abs() < 0.05, "{h}");
}

#[test]
fn bimodal_1d_matches_quadrature() {
    let data = synth::gaussian_mixture_1d(10_000, &[-5.0, 5.0], 1.0, RngSeed(2));
    let model = fit_marginal(&data, &cfg(2)).unwrap();
    let h = entropy(&model, &data).unwrap();
    let truth = bimodal_entropy_by_quadrature();
    assert!((h - truth).abs() < 0.05, "{h} vs {truth}");
}

#[test]
fn affine_shift_of_entropy() {
    let data = synth::standard_normal(5_000, 2, RngSeed(3));
    let scaled = data.affine(&[3.0, 1.0], &[10.0, -2.0]).unwrap();
    let h0 = entropy(&fit_marginal(&data, &cfg(3)).unwrap(), &data).unwrap();
    let h1 = entropy(&fit_marginal(&scaled, &cfg(3)).unwrap(), &scaled).unwrap();
    assert!((h1 - h0 - ln(3.0)).abs() < 0.05, "{h0} {h1}");
}

#[test]
fn no_pathological_overfit() {
    let data = synth::standard_normal(2_000, 3, RngSeed(4));
    let h = entropy(&fit_marginal(&data, &cfg(4)).unwrap(), &data).unwrap();
    assert!(h >= 3.0 * UNIT_NORMAL_ENTROPY - 0.1, "{h}");
}

#[test]
fn marginal_training_invariants() {
    let data = synth::gaussian_mixture_1d(3_000, &[-2.0, 3.0], 0.7, RngSeed(5));
    let model = fit_marginal(&data, &cfg(5)).unwrap();
    let w: f64 = model.weights().iter().sum();
    assert!((w - 1.0).abs() < 1e-12);
    let (lo, hi) = cfg(5).log_sigma_bounds();
    assert!(model.log_sigmas().iter().all(|ls| (lo..=hi).contains(ls)));
    let losses = &model.trace().epoch_losses;
    assert!(losses.last().unwrap() <= losses.first().unwrap());
}

#[test]
fn sigma_clamped_to_floor() {
    // Heavily repeated values drive σ toward zero.
    let values: Vec<f64> = (0..400).map(|i| if i % 2 == 0 { 0.0 } else { 1.0 }).collect();
    let data = EmbeddingMatrix::with_index_ids(1, values).unwrap();
    let c = KnifeConfig { modes: 2, learn_rate: 0.05, sigma_floor: 1e-2, ..cfg(6) };
    let model = fit_marginal(&data, &c).unwrap();
    let floor = ln(1e-2);
    assert!(model.log_sigmas().iter().all(|ls| *ls >= floor));
    assert!(model.log_sigmas().iter().any(|ls| *ls < floor + 1e-9), "{:?} {:?} {}", model.log_sigmas(), model.means(), model.trace().epochs_run());
}

#[test]
fn constant_dimension_warns_instead_of_failing() {
    let values: Vec<f64> = (0..200).flat_map(|i| [i as f64 / 50.0, 3.0]).collect();
    let data = EmbeddingMatrix::with_index_ids(2, values).unwrap();
    let model = fit_marginal(&data, &cfg(7)).unwrap();
    assert_eq!(model.standardizer().scale()[1], 1.0);
    assert_eq!(model.trace().warnings.len(), 1);
}

#[test]
fn too_few_rows() {
    let data = synth::standard_normal(3, 2, RngSeed(1));
    assert_eq!(fit_marginal(&data, &cfg(1)).unwrap_err(), Error::TooFewRows { needed: 4, got: 3 });
}

#[test]
fn config_validation() {
    for bad in [
        KnifeConfig { modes: 0, ..cfg(0) },
        KnifeConfig { learn_rate: 0.0, ..cfg(0) },
        KnifeConfig { batch_size: 0, ..cfg(0) },
        KnifeConfig { holdout_fraction: 1.0, ..cfg(0) },
        KnifeConfig { sigma_floor: 2.0, sigma_ceil: 1.0, ..cfg(0) },
    ] {
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
    }
}

#[test]
fn warm_start_is_the_marginal() {
    let pairs = synth::correlated_pairs(500, 3, 0.7, RngSeed(8));
    let c = cfg(8);
    let base = fit_marginal(pairs.source(), &c).unwrap();
    let warm = ConditionalKnife::warm_start(base.clone(), Standardizer::identity(3), &c, RngSeed(9)).unwrap();
    assert_eq!(warm.conditional_entropy(&pairs).unwrap(), entropy(&base, pairs.source()).unwrap());
    for i in 0..20 {
        let pmi = pointwise_mi(&base, &warm, pairs.source().row(i), pairs.summary().row(i)).unwrap();
        assert_eq!(pmi, 0.0);
    }
}

#[test]
fn conditional_learns_dependence() {
    let pairs = synth::correlated_pairs(4_000, 2, 0.9, RngSeed(10));
    let c = cfg(10);
    let base = fit_marginal(pairs.source(), &c).unwrap();
    let cond = fit_conditional(&pairs, &base, &c).unwrap();
    let mi = entropy(&base, pairs.source()).unwrap() - cond.conditional_entropy(&pairs).unwrap();
    let truth = synth::gaussian_pair_mi(2, 0.9);
    assert!((mi - truth).abs() < 0.15 * truth, "{mi} vs {truth}");
    let losses = &cond.trace().epoch_losses;
    assert!(losses.last().unwrap() <= losses.first().unwrap());
}

#[test]
fn conditional_dimension_checks() {
    let pairs = synth::correlated_pairs(200, 2, 0.5, RngSeed(11));
    let base = fit_marginal(&synth::standard_normal(200, 3, RngSeed(1)), &cfg(11)).unwrap();
    assert!(matches!(fit_conditional(&pairs, &base, &cfg(11)), Err(Error::DimMismatch { .. })));
}

#[test]
fn pointwise_mean_equals_raw_mi() {
    let pairs = synth::correlated_pairs(1_000, 2, 0.6, RngSeed(12));
    let (est, fitted) = estimate_mi_with_models(&pairs, &cfg(12), Direction::SummaryToSource).unwrap();
    let mean = (0..pairs.n_rows())
        .map(|i| {
            pointwise_mi(&fitted.marginal, &fitted.conditional, pairs.source().row(i), pairs.summary().row(i)).unwrap()
        })
        .sum::<f64>()
        / pairs.n_rows() as f64;
    assert!((mean - est.mi_raw).abs() < 1e-9, "{mean} vs {}", est.mi_raw);
    assert!(pointwise_mi(&fitted.marginal, &fitted.conditional, &[0.0], &[0.0, 0.0]).is_err());
}

#[test]
fn independent_pairs_score_near_zero() {
    let pairs = synth::correlated_pairs(5_000, 2, 0.0, RngSeed(13));
    let est = estimate_mi(&pairs, &cfg(13), Direction::SummaryToSource).unwrap();
    assert!(est.mi <= 0.05, "{est:?}");
    assert!(est.mi >= 0.0);
    assert_eq!(est.mi, est.mi_raw.max(0.0));
}

#[test]
fn identical_sides_exceed_two_nats() {
    let t = synth::standard_normal(3_000, 4, RngSeed(14));
    let pairs = crate::validate_pairing(t.clone(), t).unwrap();
    let short = estimate_mi(&pairs, &KnifeConfig { epochs: 5, ..cfg(14) }, Direction::SummaryToSource).unwrap();
    let full = estimate_mi(&pairs, &cfg(14), Direction::SummaryToSource).unwrap();
    assert!(full.mi > short.mi);
    assert!(full.mi > 2.0, "{full:?}");
    assert!(full.diagnostics.conditional_final_loss < full.diagnostics.marginal_final_loss - 2.0);
}

#[test]
fn holdout_split_evaluates_on_unseen_rows() {
    let pairs = synth::correlated_pairs(1_000, 2, 0.8, RngSeed(15));
    let c = KnifeConfig { holdout_fraction: 0.25, ..cfg(15) };
    let est = estimate_mi(&pairs, &c, Direction::SummaryToSource).unwrap();
    assert_eq!((est.diagnostics.train_size, est.diagnostics.eval_size), (750, 250));
    let truth = synth::gaussian_pair_mi(2, 0.8);
    assert!((est.mi - truth).abs() < 0.25 * truth, "{est:?}");
}

#[test]
fn estimates_are_deterministic() {
    let pairs = synth::correlated_pairs(600, 2, 0.5, RngSeed(16));
    let a = estimate_mi(&pairs, &cfg(16), Direction::SourceToSummary).unwrap();
    let b = estimate_mi(&pairs, &cfg(16), Direction::SourceToSummary).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.mi_raw.to_bits(), b.mi_raw.to_bits());
    let c = estimate_mi(&pairs, &cfg(17), Direction::SourceToSummary).unwrap();
    assert_ne!(a.mi_raw.to_bits(), c.mi_raw.to_bits());
}
