//! Exact finite-alphabet information quantities, and an exhaustive check of
//! the error-rate bounds and the data-processing inequality on random
//! discrete channels.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::Exp1;

use crate::bounds::{prop1_bounds, BoundReport};
use crate::math::{ln, xlnx};
use crate::{Error, Result, RngSeed};

const SUM_TOL: f64 = 1e-12;
const UNIFORM_TOL: f64 = 1e-9;
/// Slack allowed on each side of the bound sandwich.
pub const BOUND_SLACK: f64 = 1e-9;

/// Exact joint distribution `p(c, s)` over `m_c × m_s` outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    m_c: usize,
    m_s: usize,
    p: Vec<f64>,
}

impl DiscreteJoint {
    /// `p` is row-major with concept `c` indexing rows.
    pub fn new(m_c: usize, m_s: usize, p: Vec<f64>) -> Result<Self> {
        if m_c == 0 || m_s == 0 || p.len() != m_c * m_s {
            return Err(Error::NotADistribution(format!("{} entries for a {m_c}×{m_s} joint", p.len())));
        }
        check_distribution(&p)?;
        Ok(Self { m_c, m_s, p })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let m_s = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m_s) {
            return Err(Error::NotADistribution("ragged rows".into()));
        }
        Self::new(rows.len(), m_s, rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    pub fn m_c(&self) -> usize {
        self.m_c
    }

    pub fn m_s(&self) -> usize {
        self.m_s
    }

    pub fn get(&self, c: usize, s: usize) -> f64 {
        self.p[c * self.m_s + s]
    }

    pub fn concept_marginal(&self) -> Vec<f64> {
        self.p.chunks_exact(self.m_s).map(|r| r.iter().sum()).collect()
    }

    pub fn observation_marginal(&self) -> Vec<f64> {
        (0..self.m_s).map(|s| (0..self.m_c).map(|c| self.get(c, s)).sum()).collect()
    }

    /// `H(C | S)` in nats.
    pub fn conditional_entropy(&self) -> f64 {
        let joint: f64 = self.p.iter().map(|&p| -xlnx(p)).sum();
        let obs: f64 = self.observation_marginal().iter().map(|&p| -xlnx(p)).sum();
        (joint - obs).max(0.0)
    }
}

/// Row-stochastic matrix `ch(s, s')`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    rows: Vec<f64>,
}

impl Channel {
    pub fn new(inputs: usize, outputs: usize, rows: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outputs == 0 || rows.len() != inputs * outputs {
            return Err(Error::ShapeMismatch(format!("{} entries for a {inputs}×{outputs} channel", rows.len())));
        }
        for row in rows.chunks_exact(outputs) {
            check_distribution(row)?;
        }
        Ok(Self { inputs, outputs, rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect();
        Self { inputs: n, outputs: n, rows }
    }

    /// Maps every input to output 0.
    pub fn constant(inputs: usize) -> Self {
        Self { inputs, outputs: 1, rows: alloc::vec![1.0; inputs] }
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some(bad) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::NotADistribution(format!("entry {bad}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::NotADistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// `−Σ p ln p` in nats.
pub fn exact_entropy(dist: &[f64]) -> Result<f64> {
    if dist.is_empty() {
        return Err(Error::NotADistribution("empty".into()));
    }
    check_distribution(dist)?;
    Ok(dist.iter().map(|&p| -xlnx(p)).sum())
}

/// `I(C; S) = H(C) − H(C|S)` in nats, clamped at zero against round-off.
pub fn exact_mi(joint: &DiscreteJoint) -> f64 {
    let h_c: f64 = joint.concept_marginal().iter().map(|&p| -xlnx(p)).sum();
    (h_c - joint.conditional_entropy()).max(0.0)
}

/// Bayes error `1 − Σ_s max_c p(c, s)`.
pub fn bayes_error(joint: &DiscreteJoint) -> f64 {
    let hit: f64 = (0..joint.m_s)
        .map(|s| (0..joint.m_c).map(|c| joint.get(c, s)).fold(0.0, f64::max))
        .sum();
    (1.0 - hit).max(0.0)
}

/// Post-processes the observation: `p'(c, s') = Σ_s p(c, s)·ch(s, s')`.
pub fn apply_channel(joint: &DiscreteJoint, ch: &Channel) -> Result<DiscreteJoint> {
    if ch.inputs != joint.m_s {
        return Err(Error::ShapeMismatch(format!(
            "channel has {} inputs, joint has {} observations",
            ch.inputs, joint.m_s
        )));
    }
    let mut p = alloc::vec![0.0; joint.m_c * ch.outputs];
    for c in 0..joint.m_c {
        for s in 0..joint.m_s {
            let pcs = joint.get(c, s);
            for o in 0..ch.outputs {
                p[c * ch.outputs + o] += pcs * ch.rows[s * ch.outputs + o];
            }
        }
    }
    Ok(DiscreteJoint { m_c: joint.m_c, m_s: ch.outputs, p })
}

/// Outcome of checking `R⁻¹(I) ≤ P_e ≤ 1 − e^{−H(C|S)}` on one joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop1Check {
    pub report: BoundReport,
    pub bayes_error: f64,
    /// `bayes_error − lower`; negative means the lower bound was violated.
    pub lower_slack: f64,
    /// `upper − bayes_error`; negative means the upper bound was violated.
    pub upper_slack: f64,
    pub pass: bool,
}

/// Checks both bounds on a joint with uniform concept marginal.
pub fn verify_prop1(joint: &DiscreteJoint) -> Result<Prop1Check> {
    let uniform = 1.0 / joint.m_c as f64;
    let deviation = joint.concept_marginal().iter().map(|p| (p - uniform).abs()).fold(0.0, f64::max);
    if deviation > UNIFORM_TOL {
        return Err(Error::NonUniformConcept(deviation));
    }
    let m = u32::try_from(joint.m_c).map_err(|_| Error::OutOfRange("too many classes".into()))?;
    let h_c = ln(joint.m_c as f64);
    let mi = exact_mi(joint).min(h_c);
    let report = prop1_bounds(mi, m, h_c)?;
    let pe = bayes_error(joint);
    let lower_slack = pe - report.lower;
    let upper_slack = report.upper - pe;
    Ok(Prop1Check {
        report,
        bayes_error: pe,
        lower_slack,
        upper_slack,
        pass: lower_slack >= -BOUND_SLACK && upper_slack >= -BOUND_SLACK,
    })
}

/// Random joint with uniform concept marginal: exponential draws, each row
/// scaled to sum to `1/m_c`.
pub fn random_uniform_joint(m_c: usize, m_s: usize, seed: RngSeed) -> DiscreteJoint {
    let mut rng = seed.rng();
    let mut p: Vec<f64> = (0..m_c * m_s).map(|_| rng.sample::<f64, _>(Exp1) + f64::MIN_POSITIVE).collect();
    for row in p.chunks_exact_mut(m_s) {
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total * m_c as f64);
    }
    DiscreteJoint { m_c, m_s, p }
}

/// Random joint with a generic (non-uniform) concept marginal.
pub fn random_joint(m_c: usize, m_s: usize, seed: RngSeed) -> DiscreteJoint {
    let mut rng = seed.rng();
    let mut p: Vec<f64> = (0..m_c * m_s).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    DiscreteJoint { m_c, m_s, p }
}

pub fn random_channel(inputs: usize, outputs: usize, seed: RngSeed) -> Channel {
    let mut rng = seed.rng();
    let mut rows: Vec<f64> = (0..inputs * outputs).map(|_| rng.sample::<f64, _>(Exp1) + f64::MIN_POSITIVE).collect();
    for row in rows.chunks_exact_mut(outputs) {
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total);
    }
    Channel { inputs, outputs, rows }
}

/// Alphabet sizes drawn from `2..=max_size`.
fn random_sizes(seed: RngSeed, max_size: usize) -> (usize, usize) {
    let mut rng = seed.rng();
    (rng.random_range(2..=max_size), rng.random_range(2..=max_size))
}

/// Aggregate of a randomized bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub trials: usize,
    pub passed: usize,
    pub worst_lower_slack: f64,
    pub worst_upper_slack: f64,
    /// Trial indices that failed.
    pub failures: Vec<usize>,
}

impl SweepReport {
    pub fn all_pass(&self) -> bool {
        self.passed == self.trials
    }
}

/// One trial of the bound sweep: the joint checked in trial `index`.
pub fn sweep_joint(seed: RngSeed, index: usize, max_size: usize) -> DiscreteJoint {
    let trial = seed.derive(&[index as u64]);
    let (m_c, m_s) = random_sizes(trial.derive(&[0]), max_size);
    random_uniform_joint(m_c, m_s, trial.derive(&[1]))
}

/// Checks the bounds on `trials` random uniform-concept joints with
/// alphabet sizes in `2..=max_size`.
pub fn verify_prop1_sweep(trials: usize, seed: RngSeed, max_size: usize) -> Result<SweepReport> {
    let checks = (0..trials)
        .map(|i| verify_prop1(&sweep_joint(seed, i, max_size)))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_sweep(&checks))
}

pub fn summarize_sweep(checks: &[Prop1Check]) -> SweepReport {
    let failures: Vec<usize> = checks.iter().enumerate().filter(|(_, c)| !c.pass).map(|(i, _)| i).collect();
    SweepReport {
        trials: checks.len(),
        passed: checks.len() - failures.len(),
        worst_lower_slack: checks.iter().map(|c| c.lower_slack).fold(f64::INFINITY, f64::min),
        worst_upper_slack: checks.iter().map(|c| c.upper_slack).fold(f64::INFINITY, f64::min),
        failures,
    }
}

/// Aggregate of a randomized data-processing check.
#[derive(Debug, Clone, PartialEq)]
pub struct DpiReport {
    pub trials: usize,
    /// Trials where post-processing raised MI by more than the tolerance.
    pub violations: usize,
    /// Largest `I(after) − I(before)` observed.
    pub worst_increase: f64,
}

/// Applies random channels to random joints and records any MI increase
/// beyond `tol`.
pub fn dpi_sweep(trials: usize, seed: RngSeed, max_size: usize, tol: f64) -> Result<DpiReport> {
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for i in 0..trials {
        let trial = seed.derive(&[i as u64]);
        let (m_c, m_s) = random_sizes(trial.derive(&[0]), max_size);
        let (outputs, _) = random_sizes(trial.derive(&[1]), max_size);
        let joint = random_joint(m_c, m_s, trial.derive(&[2]));
        let ch = random_channel(m_s, outputs, trial.derive(&[3]));
        let increase = exact_mi(&apply_channel(&joint, &ch)?) - exact_mi(&joint);
        worst = worst.max(increase);
        if increase > tol {
            violations += 1;
        }
    }
    Ok(DpiReport { trials, violations, worst_increase: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::binary_entropy;
    use crate::bounds::rd_inverse;
    use proptest::prelude::*;

    const LN2: f64 = core::f64::consts::LN_2;

    fn diag2() -> DiscreteJoint {
        DiscreteJoint::from_rows(&[&[0.5, 0.0], &[0.0, 0.5]]).unwrap()
    }

    fn indep2() -> DiscreteJoint {
        DiscreteJoint::from_rows(&[&[0.25, 0.25], &[0.25, 0.25]]).unwrap()
    }

    fn noisy2() -> DiscreteJoint {
        DiscreteJoint::from_rows(&[&[0.4, 0.1], &[0.1, 0.4]]).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(exact_entropy(&[1.0]).unwrap(), 0.0);
        assert!((exact_entropy(&[0.5, 0.5]).unwrap() - LN2).abs() < 1e-15);
        // −(0.4 ln 0.4 + 0.35 ln 0.35 + 0.25 ln 0.25)
        assert!((exact_entropy(&[0.4, 0.35, 0.25]).unwrap() - 1.080_527_626_604_172).abs() < 1e-12);
        assert!(exact_entropy(&[0.5, 0.6]).is_err());
        assert!(exact_entropy(&[-0.5, 1.5]).is_err());
    }

    #[test]
    fn mi_examples() {
        assert!(exact_mi(&indep2()).abs() < 1e-15);
        assert!((exact_mi(&diag2()) - LN2).abs() < 1e-15);
        let expected = LN2 - binary_entropy(0.2).unwrap();
        assert!((exact_mi(&noisy2()) - expected).abs() < 1e-12);
        assert!((exact_mi(&noisy2()) - 0.192_745).abs() < 1e-6);
    }

    #[test]
    fn bayes_error_examples() {
        assert_eq!(bayes_error(&diag2()), 0.0);
        assert_eq!(bayes_error(&indep2()), 0.5);
        assert!((bayes_error(&noisy2()) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn channel_examples() {
        let j = noisy2();
        assert_eq!(apply_channel(&j, &Channel::identity(2)).unwrap(), j);
        let collapsed = apply_channel(&j, &Channel::constant(2)).unwrap();
        assert_eq!(exact_mi(&collapsed), 0.0);
        assert!(matches!(apply_channel(&j, &Channel::identity(3)), Err(Error::ShapeMismatch(_))));
        assert!(Channel::new(2, 2, alloc::vec![0.5, 0.5, 0.7, 0.7]).is_err());
    }

    #[test]
    fn random_three_by_three_channels_lose_information() {
        for i in 0..1000u64 {
            let j = random_joint(3, 3, RngSeed(i));
            let ch = random_channel(3, 3, RngSeed(i + 10_000));
            assert!(exact_mi(&apply_channel(&j, &ch).unwrap()) <= exact_mi(&j) + 1e-12);
        }
    }

    #[test]
    fn prop1_on_textbook_joints() {
        let c = verify_prop1(&diag2()).unwrap();
        assert!(c.pass);
        assert_eq!((c.report.lower, c.bayes_error, c.report.upper), (0.0, 0.0, 0.0));
        let c = verify_prop1(&indep2()).unwrap();
        assert!(c.pass);
        assert_eq!(c.report.lower, 0.5);
        assert_eq!(c.bayes_error, 0.5);
        assert!((c.report.upper - 0.5).abs() < 1e-15);
    }

    #[test]
    fn prop1_rejects_non_uniform_concepts() {
        let j = DiscreteJoint::from_rows(&[&[0.6, 0.1], &[0.1, 0.2]]).unwrap();
        assert!(matches!(verify_prop1(&j), Err(Error::NonUniformConcept(_))));
    }

    #[test]
    fn prop1_sweep_passes() {
        let r = verify_prop1_sweep(1000, RngSeed(1), 6).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!(r.worst_lower_slack >= -BOUND_SLACK);
        assert!(r.worst_upper_slack >= -BOUND_SLACK);
    }

    // Exhaustive search over a grid of 2×2 and 4×2 uniform-concept channels:
    // any channel whose MI is close to 0.3 nats must respect both bounds.
    #[test]
    fn grid_search_channels_near_fixed_mi_respect_bounds() {
        let h = ln(4.0);
        let target = 0.3;
        let lower = rd_inverse(4, target).unwrap();
        let upper = 1.0 - crate::math::exp(-(h - target));
        let steps = 20;
        let mut found = 0;
        // Each concept row splits its 1/4 mass over two observations.
        for a in 0..=steps {
            for b in 0..=steps {
                for c in 0..=steps {
                    for d in 0..=steps {
                        let f = |k: usize| k as f64 / steps as f64 / 4.0;
                        let rows = [[f(a), 0.25 - f(a)], [f(b), 0.25 - f(b)], [f(c), 0.25 - f(c)], [f(d), 0.25 - f(d)]];
                        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                        let j = DiscreteJoint::new(4, 2, flat).unwrap();
                        let mi = exact_mi(&j);
                        let pe = bayes_error(&j);
                        assert!(rd_inverse(4, mi).unwrap() <= pe + BOUND_SLACK);
                        assert!(pe <= 1.0 - crate::math::exp(-(h - mi)) + BOUND_SLACK);
                        if (mi - target).abs() < 5e-3 {
                            found += 1;
                            assert!(pe >= lower - 5e-3 && pe <= upper + 5e-3);
                        }
                    }
                }
            }
        }
        assert!(found > 0);
    }

    proptest! {
        #[test]
        fn mi_is_bounded_by_marginal_entropies(mc in 2usize..7, ms in 2usize..7, seed in any::<u64>()) {
            let j = random_joint(mc, ms, RngSeed(seed));
            let mi = exact_mi(&j);
            let hc = exact_entropy(&j.concept_marginal()).unwrap_or(0.0);
            let hs = exact_entropy(&j.observation_marginal()).unwrap_or(0.0);
            prop_assert!(mi >= 0.0);
            prop_assert!(mi <= hc.min(hs) + 1e-12);
        }

        #[test]
        fn data_processing(mc in 2usize..7, ms in 2usize..7, mo in 1usize..7, seed in any::<u64>()) {
            let j = random_joint(mc, ms, RngSeed(seed));
            let ch = random_channel(ms, mo, RngSeed(seed).derive(&[9]));
            prop_assert!(exact_mi(&apply_channel(&j, &ch).unwrap()) <= exact_mi(&j) + 1e-12);
        }
    }
}
