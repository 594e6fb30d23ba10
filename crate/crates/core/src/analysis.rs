//! Agreement and correlation analyses across summarizers.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, PairedDataset, Result};

/// Id → categorical label, e.g. a classifier's outputs on sources or on
/// summaries.
pub type Labels = BTreeMap<String, String>;

/// Id → real value.
pub type Scores = BTreeMap<String, f64>;

/// How often two labelings disagree on the ids they share.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub n_common: usize,
    pub disagreements: usize,
    pub error_rate: f64,
    pub only_in_a: usize,
    pub only_in_b: usize,
    /// `(label in a, label in b) → count` over common ids.
    pub confusion: BTreeMap<(String, String), usize>,
}

/// Expected error rate: fraction of common ids whose labels differ.
pub fn expected_error_rate(a: &Labels, b: &Labels) -> Result<AgreementReport> {
    let mut confusion = BTreeMap::new();
    let mut n_common = 0;
    let mut disagreements = 0;
    for (id, la) in a {
        if let Some(lb) = b.get(id) {
            n_common += 1;
            if la != lb {
                disagreements += 1;
            }
            *confusion.entry((la.clone(), lb.clone())).or_insert(0) += 1;
        }
    }
    if n_common == 0 {
        return Err(Error::NoCommonIds);
    }
    Ok(AgreementReport {
        n_common,
        disagreements,
        error_rate: disagreements as f64 / n_common as f64,
        only_in_a: a.len() - n_common,
        only_in_b: b.len() - n_common,
        confusion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineAgreement {
    /// Mean cosine over rows where both vectors are non-zero.
    pub mean: f64,
    pub rows_used: usize,
    pub zero_rows: usize,
}

/// Mean cosine similarity between paired source and summary embeddings.
pub fn cosine_agreement(pairs: &PairedDataset) -> Result<CosineAgreement> {
    let (t, s) = (pairs.source(), pairs.summary());
    if t.dim() != s.dim() {
        return Err(Error::DimMismatch { expected: t.dim(), got: s.dim() });
    }
    let mut sum = 0.0;
    let mut used = 0;
    for (a, b) in t.rows().zip(s.rows()) {
        let na = sqrt(a.iter().map(|x| x * x).sum());
        let nb = sqrt(b.iter().map(|x| x * x).sum());
        if na == 0.0 || nb == 0.0 {
            continue;
        }
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        sum += (dot / (na * nb)).clamp(-1.0, 1.0);
        used += 1;
    }
    if used == 0 {
        return Err(Error::AllZeroRows);
    }
    Ok(CosineAgreement { mean: sum / used as f64, rows_used: used, zero_rows: pairs.n_rows() - used })
}

/// Why a correlation could not be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Undefined {
    ConstantInput,
    TooFewCommon,
}

/// A correlation coefficient, or the reason it does not exist. Undefined
/// values are never reported as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    Value(f64),
    Undefined(Undefined),
}

impl Coefficient {
    pub fn value(self) -> Option<f64> {
        match self {
            Coefficient::Value(v) => Some(v),
            Coefficient::Undefined(_) => None,
        }
    }
}

fn check_lengths(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < min {
        return Err(Error::TooFewRows { needed: min, got: x.len() });
    }
    if let Some(row) = x.iter().chain(y).position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue { row: row % x.len() });
    }
    Ok(())
}

/// Fractional ranks starting at 1; tied values share their average rank.
pub fn fractional_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = alloc::vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Coefficient {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Coefficient::Undefined(Undefined::ConstantInput);
    }
    Coefficient::Value((sxy / sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation (Pearson correlation of fractional ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Coefficient> {
    check_lengths(x, y, 3)?;
    Ok(pearson(&fractional_ranks(x), &fractional_ranks(y)))
}

/// Kendall's tau-b by pair enumeration.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<Coefficient> {
    check_lengths(x, y, 2)?;
    let n = x.len();
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].partial_cmp(&x[j]).map_or(0, |o| o as i64);
            let dy = y[i].partial_cmp(&y[j]).map_or(0, |o| o as i64);
            if dx == 0 {
                tied_x += 1;
            }
            if dy == 0 {
                tied_y += 1;
            }
            match dx * dy {
                1 => concordant += 1,
                -1 => discordant += 1,
                _ => {}
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom = ((n0 - tied_x) * (n0 - tied_y)) as f64;
    if denom == 0.0 {
        return Ok(Coefficient::Undefined(Undefined::ConstantInput));
    }
    Ok(Coefficient::Value(((concordant - discordant) as f64 / sqrt(denom)).clamp(-1.0, 1.0)))
}

/// One metric/target cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationCell {
    /// Summarizers present in both inputs.
    pub n: usize,
    pub spearman: Coefficient,
    pub kendall_tau_b: Coefficient,
}

/// Metrics as rows, targets (downstream tasks or human judgments) as
/// columns, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub metrics: Vec<String>,
    pub targets: Vec<String>,
    cells: Vec<CorrelationCell>,
}

impl CorrelationReport {
    pub fn cell(&self, metric: usize, target: usize) -> &CorrelationCell {
        &self.cells[metric * self.targets.len() + target]
    }
}

/// Correlates each metric with each target over the summarizers the two
/// share. Keys of every map are summarizer names.
pub fn correlation_report(
    metrics: &[(String, Scores)],
    targets: &[(String, Scores)],
) -> Result<CorrelationReport> {
    let mut cells = Vec::with_capacity(metrics.len() * targets.len());
    for (_, m) in metrics {
        for (_, t) in targets {
            cells.push(correlate_maps(m, t)?);
        }
    }
    Ok(CorrelationReport {
        metrics: metrics.iter().map(|(n, _)| n.clone()).collect(),
        targets: targets.iter().map(|(n, _)| n.clone()).collect(),
        cells,
    })
}

/// Correlation of two id-keyed value maps over their common ids.
pub fn correlate_maps(a: &Scores, b: &Scores) -> Result<CorrelationCell> {
    let common: BTreeSet<&String> = a.keys().filter(|k| b.contains_key(*k)).collect();
    let x: Vec<f64> = common.iter().map(|k| a[*k]).collect();
    let y: Vec<f64> = common.iter().map(|k| b[*k]).collect();
    if x.len() < 3 {
        let undefined = Coefficient::Undefined(Undefined::TooFewCommon);
        return Ok(CorrelationCell { n: x.len(), spearman: undefined, kendall_tau_b: undefined });
    }
    Ok(CorrelationCell { n: x.len(), spearman: spearman(&x, &y)?, kendall_tau_b: kendall_tau_b(&x, &y)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{validate_pairing, EmbeddingMatrix};
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn labels(rows: &[(&str, &str)]) -> Labels {
        rows.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn error_rate_examples() {
        let a = labels(&[("1", "p"), ("2", "n"), ("3", "n"), ("4", "p")]);
        let b = labels(&[("1", "p"), ("2", "n"), ("3", "p"), ("4", "p")]);
        assert_eq!(expected_error_rate(&a, &a).unwrap().error_rate, 0.0);
        let r = expected_error_rate(&a, &b).unwrap();
        assert_eq!(r.error_rate, 0.25);
        assert_eq!(r.confusion[&("n".to_string(), "p".to_string())], 1);
        let c = labels(&[("9", "p")]);
        assert_eq!(expected_error_rate(&a, &c), Err(Error::NoCommonIds));
    }

    #[test]
    fn error_rate_counts_unshared_ids() {
        let a = labels(&[("1", "p"), ("2", "n"), ("x", "n")]);
        let b = labels(&[("1", "n"), ("2", "n"), ("y", "p"), ("z", "p")]);
        let r = expected_error_rate(&a, &b).unwrap();
        assert_eq!((r.n_common, r.only_in_a, r.only_in_b), (2, 1, 2));
        assert_eq!(r.error_rate, 0.5);
    }

    fn pairs(t: Vec<f64>, s: Vec<f64>, d: usize) -> PairedDataset {
        validate_pairing(
            EmbeddingMatrix::with_index_ids(d, t).unwrap(),
            EmbeddingMatrix::with_index_ids(d, s).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn cosine_examples() {
        let t = vec![1.0, 2.0, -3.0, 0.5, 0.0, 4.0];
        let neg: Vec<f64> = t.iter().map(|v| -v).collect();
        assert!((cosine_agreement(&pairs(t.clone(), t.clone(), 3)).unwrap().mean - 1.0).abs() < 1e-15);
        assert!((cosine_agreement(&pairs(t, neg, 3)).unwrap().mean + 1.0).abs() < 1e-15);
        let ortho = cosine_agreement(&pairs(vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0], 2)).unwrap();
        assert_eq!(ortho.mean, 0.0);
        let with_zero = cosine_agreement(&pairs(vec![0.0, 0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0, 1.0], 2)).unwrap();
        assert_eq!((with_zero.rows_used, with_zero.zero_rows), (1, 1));
        assert_eq!(
            cosine_agreement(&pairs(vec![0.0, 0.0], vec![1.0, 0.0], 2)),
            Err(Error::AllZeroRows)
        );
    }

    #[test]
    fn cosine_needs_equal_dims() {
        let p = validate_pairing(
            EmbeddingMatrix::with_index_ids(2, vec![1.0, 2.0]).unwrap(),
            EmbeddingMatrix::with_index_ids(1, vec![1.0]).unwrap(),
        )
        .unwrap();
        assert!(matches!(cosine_agreement(&p), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), Coefficient::Value(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), Coefficient::Value(-1.0));
        // 1 − 6Σd²/(n(n²−1)) with d = ±1 everywhere: 1 − 36/210.
        let r = spearman(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[2.0, 1.0, 4.0, 3.0, 6.0, 5.0]).unwrap();
        assert!((r.value().unwrap() - (1.0 - 36.0 / 210.0)).abs() < 1e-12);
        assert_eq!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(),
            Coefficient::Undefined(Undefined::ConstantInput)
        );
        assert_eq!(spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]), Err(Error::LengthMismatch(2, 3)));
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn kendall_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau_b(&x, &x).unwrap(), Coefficient::Value(1.0));
        assert_eq!(kendall_tau_b(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap(), Coefficient::Value(-1.0));
        // x = [1,1,2,3], y = [1,2,2,3]: C=4, D=0, ties x=1, y=1, n0=6.
        let r = kendall_tau_b(&[1.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 3.0]).unwrap();
        assert!((r.value().unwrap() - 4.0 / 5.0).abs() < 1e-15);
        assert_eq!(
            kendall_tau_b(&[2.0, 2.0], &[1.0, 3.0]).unwrap(),
            Coefficient::Undefined(Undefined::ConstantInput)
        );
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(fractional_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    fn scores(rows: &[(&str, f64)]) -> Scores {
        rows.iter().map(|(a, b)| (a.to_string(), *b)).collect()
    }

    #[test]
    fn report_layout_and_cells() {
        let a = scores(&[("m1", 0.1), ("m2", 0.5), ("m3", 0.3), ("m4", 0.9)]);
        let b = scores(&[("m1", 1.0), ("m2", 3.0), ("m3", 2.0), ("m4", 0.0)]);
        let c = scores(&[("m1", 5.0), ("m2", 1.0), ("m3", 2.0), ("m4", 7.0)]);
        let metrics = vec![("a".to_string(), a.clone()), ("b".to_string(), b.clone()), ("c".to_string(), c.clone())];
        let targets = vec![("a".to_string(), a.clone()), ("t".to_string(), b.clone())];
        let rep = correlation_report(&metrics, &targets).unwrap();
        assert_eq!(rep.metrics, ["a", "b", "c"]);
        assert_eq!(rep.targets, ["a", "t"]);
        assert_eq!(rep.cell(0, 0).spearman, Coefficient::Value(1.0));
        assert_eq!(rep.cell(0, 0).kendall_tau_b, Coefficient::Value(1.0));
        for (i, (_, m)) in metrics.iter().enumerate() {
            for (j, (_, t)) in targets.iter().enumerate() {
                assert_eq!(*rep.cell(i, j), correlate_maps(m, t).unwrap());
            }
        }
    }

    #[test]
    fn report_flags_sparse_overlap() {
        let a = scores(&[("m1", 0.1), ("m2", 0.5)]);
        let b = scores(&[("m1", 1.0), ("m2", 3.0), ("m9", 2.0)]);
        let cell = correlate_maps(&a, &b).unwrap();
        assert_eq!(cell.n, 2);
        assert_eq!(cell.spearman, Coefficient::Undefined(Undefined::TooFewCommon));
    }

    proptest! {
        #[test]
        fn invariant_under_increasing_maps(v in prop::collection::vec((-50i32..50, -50i32..50), 3..12)) {
            let x: Vec<f64> = v.iter().map(|p| f64::from(p.0)).collect();
            let y: Vec<f64> = v.iter().map(|p| f64::from(p.1)).collect();
            let fx: Vec<f64> = x.iter().map(|a| libm::exp(a / 10.0) + 3.0).collect();
            let gy: Vec<f64> = y.iter().map(|b| b * b * b).collect();
            prop_assert_eq!(spearman(&x, &y).unwrap(), spearman(&fx, &gy).unwrap());
            prop_assert_eq!(kendall_tau_b(&x, &y).unwrap(), kendall_tau_b(&fx, &gy).unwrap());
        }

        #[test]
        fn error_rate_is_symmetric(v in prop::collection::vec((0u8..3, 0u8..3, any::<bool>()), 1..30)) {
            let a: Labels = v.iter().enumerate().map(|(i, p)| (i.to_string(), p.0.to_string())).collect();
            let b: Labels = v.iter().enumerate().filter(|(i, p)| p.2 || *i == 0)
                .map(|(i, p)| (i.to_string(), p.1.to_string())).collect();
            let ab = expected_error_rate(&a, &b).unwrap();
            let ba = expected_error_rate(&b, &a).unwrap();
            prop_assert_eq!(ab.error_rate, ba.error_rate);
            prop_assert_eq!(ab.n_common, ba.n_common);
        }

        #[test]
        fn monotone_vectors_agree_in_sign(v in prop::collection::vec(-100i32..100, 3..12), up in any::<bool>()) {
            let x: Vec<f64> = v.iter().map(|a| f64::from(*a)).collect();
            let y: Vec<f64> = x.iter().map(|a| if up { 2.0 * a + 1.0 } else { -a * 3.0 }).collect();
            if let (Coefficient::Value(r), Coefficient::Value(t)) = (spearman(&x, &y).unwrap(), kendall_tau_b(&x, &y).unwrap()) {
                prop_assert_eq!(r.signum(), t.signum());
                prop_assert!(r.abs() > 0.0);
            }
        }
    }
}
