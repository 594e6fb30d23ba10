//! Error-rate bounds from mutual information, for a uniform concept over
//! `m` classes under 0-1 loss.
//!
//! The rate–distortion function is `R(D) = ln m − H_b(D) − D ln(m−1)` on
//! `[0, 1 − 1/m]` and zero beyond. Its inverse has no closed form and is
//! found by bisection. Given `I = I(T;S)`:
//!
//! * lower bound on the error rate: `R⁻¹(I)`,
//! * upper bound: `1 − κ·e^I` with `κ = e^{−H}`, i.e. `1 − e^{−(H − I)}`.
//!
//! The upper bound needs `H` to be a discrete entropy; differential
//! entropies of embeddings do not qualify.

use alloc::format;

use crate::math::{exp, ln, xlnx};
use crate::{Error, Result};

const BISECTION_STEPS: usize = 200;

/// `−p ln p − (1−p) ln(1−p)` in nats.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("probability {p} outside [0, 1]")));
    }
    Ok(-xlnx(p) - xlnx(1.0 - p))
}

fn check_classes(m: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 classes, got {m}")));
    }
    Ok(())
}

/// Rate–distortion function `R(D)` of a uniform `m`-ary source under Hamming
/// distortion, in nats.
pub fn rd(m: u32, distortion: f64) -> Result<f64> {
    check_classes(m)?;
    let hb = binary_entropy(distortion)?;
    let mf = f64::from(m);
    if distortion > 1.0 - 1.0 / mf {
        return Ok(0.0);
    }
    let r = ln(mf) - hb - distortion * ln(mf - 1.0);
    Ok(r.max(0.0))
}

/// The distortion `D ∈ [0, 1 − 1/m]` with `R(D) = min(I, ln m)`.
pub fn rd_inverse(m: u32, mi: f64) -> Result<f64> {
    check_classes(m)?;
    if mi.is_nan() || mi < 0.0 {
        return Err(Error::OutOfRange(format!("mutual information {mi} is negative")));
    }
    let mf = f64::from(m);
    if mi >= ln(mf) {
        return Ok(0.0);
    }
    if mi == 0.0 {
        return Ok(1.0 - 1.0 / mf);
    }
    // R is non-increasing: R(lo) ≥ I ≥ R(hi).
    let (mut lo, mut hi) = (0.0_f64, 1.0 - 1.0 / mf);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rd(m, mid)? > mi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Both error-rate bounds at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub mi: f64,
    pub m: u32,
    /// `R⁻¹(I)`.
    pub lower: f64,
    /// `1 − κ·e^I`.
    pub upper: f64,
    /// `e^{−H}`.
    pub kappa: f64,
}

/// Evaluates both bounds for mutual information `mi` (nats), `m` classes and
/// concept entropy `entropy` (nats, `≥ mi`) defining `κ = e^{−entropy}`.
pub fn prop1_bounds(mi: f64, m: u32, entropy: f64) -> Result<BoundReport> {
    if mi < 0.0 || !mi.is_finite() {
        return Err(Error::OutOfRange(format!("mutual information {mi} must be finite and non-negative")));
    }
    if entropy < mi || !entropy.is_finite() {
        return Err(Error::OutOfRange(format!("entropy {entropy} must be at least the mutual information {mi}")));
    }
    let lower = rd_inverse(m, mi)?.clamp(0.0, 1.0);
    let upper = (1.0 - exp(-(entropy - mi))).clamp(0.0, 1.0);
    Ok(BoundReport { mi, m, lower, upper, kappa: exp(-entropy) })
}
