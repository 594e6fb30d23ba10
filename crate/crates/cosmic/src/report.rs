//! Text and CSV renderings of every report the engine produces. All output
//! is deterministic: no timestamps, fixed key order, shortest round-trip
//! float formatting.

use std::fmt::Write;

use cosmic_core::analysis::{AgreementReport, Coefficient, CorrelationReport, Undefined};
use cosmic_core::hierarchy::HierarchyResult;
use cosmic_core::knife::{KnifeConfig, MiEstimate};
use cosmic_core::oracle::SweepReport;
use cosmic_core::scores::{CosmicReport, GaussianBaseline};

pub const REPORT_FORMAT: &str = "cosmic-report/1";

/// Display unit for entropies and MI. Computation is always in nats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }

    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

/// Quotes a CSV field when it contains a delimiter, quote or line break.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn config_lines(cfg: &KnifeConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "modes: {}", cfg.modes);
    let _ = writeln!(out, "covariance: diagonal");
    let _ = writeln!(out, "learn_rate: {}", cfg.learn_rate);
    let _ = writeln!(out, "epochs: {}", cfg.epochs);
    let _ = writeln!(out, "batch_size: {}", cfg.batch_size);
    let _ = writeln!(out, "patience: {}", cfg.patience);
    let _ = writeln!(out, "holdout_fraction: {}", cfg.holdout_fraction);
    let _ = writeln!(out, "standardize: {}", cfg.standardize);
    let _ = writeln!(out, "hidden_width: {}", cfg.hidden_width);
    let _ = writeln!(out, "sigma_floor: {}", cfg.sigma_floor);
    let _ = writeln!(out, "sigma_ceil: {}", cfg.sigma_ceil);
    let _ = writeln!(out, "seed: {}", cfg.seed.0);
    out
}

fn estimate_lines(out: &mut String, est: &MiEstimate, units: Units) {
    let d = &est.diagnostics;
    let _ = writeln!(out, "direction: {}", est.direction);
    let _ = writeln!(out, "mi: {}", units.convert(est.mi));
    let _ = writeln!(out, "mi_raw: {}", units.convert(est.mi_raw));
    let _ = writeln!(out, "h_marginal: {}", units.convert(est.h_marginal));
    let _ = writeln!(out, "h_conditional: {}", units.convert(est.h_conditional));
    let _ = writeln!(out, "marginal_final_loss: {}", d.marginal_final_loss);
    let _ = writeln!(out, "conditional_final_loss: {}", d.conditional_final_loss);
    let _ = writeln!(out, "marginal_epochs: {}", d.marginal_epochs);
    let _ = writeln!(out, "conditional_epochs: {}", d.conditional_epochs);
    let _ = writeln!(out, "train_size: {}", d.train_size);
    let _ = writeln!(out, "eval_size: {}", d.eval_size);
}

fn gaussian_text(g: &GaussianBaseline, units: Units) -> String {
    match g {
        GaussianBaseline::Value(v) => format!("{}", units.convert(*v)),
        GaussianBaseline::Unavailable(why) => format!("unavailable ({why})"),
    }
}

/// Structured text report, self-describing via the embedded config.
pub fn cosmic_text(report: &CosmicReport, units: Units) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format: {REPORT_FORMAT}");
    let _ = writeln!(out, "units: {}", units.name());
    let _ = writeln!(out, "summarizer: {}", report.labels.summarizer);
    let _ = writeln!(out, "dataset: {}", report.labels.dataset);
    let _ = writeln!(out, "embedder: {}", report.labels.embedder);
    let _ = writeln!(out, "n_pairs: {}", report.n_pairs);
    out.push_str("\n[config]\n");
    out.push_str(&config_lines(&report.config));
    out.push_str("\n[score]\n");
    let _ = writeln!(out, "mi: {}", units.convert(report.score()));
    match report.normalized_mi {
        Some(n) => {
            let _ = writeln!(out, "normalized_mi: {}", n.value);
            let _ = writeln!(out, "normalized_mi_out_of_range: {}", n.out_of_range);
        }
        None => out.push_str("normalized_mi: undefined (zero marginal entropy)\n"),
    }
    let _ = writeln!(out, "gaussian_mi: {}", gaussian_text(&report.gaussian_mi, units));
    match report.mean_cosine {
        Some(c) => {
            let _ = writeln!(out, "mean_cosine: {c}");
        }
        None => out.push_str("mean_cosine: n/a (dimensions differ)\n"),
    }
    let _ = writeln!(out, "near_duplicate: {}", report.near_duplicate);
    out.push_str("\n[s_to_t]\n");
    estimate_lines(&mut out, &report.mi_s_to_t, units);
    out.push_str("\n[t_to_s]\n");
    estimate_lines(&mut out, &report.mi_t_to_s, units);
    out.push_str("\n[warnings]\n");
    for w in &report.warnings {
        let _ = writeln!(out, "- {w}");
    }
    out
}

pub const COSMIC_CSV_HEADER: &str = "summarizer,dataset,embedder,n_pairs,units,mi,mi_raw,h_marginal,h_conditional,\
mi_t_to_s,mi_t_to_s_raw,normalized_mi,normalized_mi_out_of_range,gaussian_mi,mean_cosine,near_duplicate,seed";

/// One CSV row (no header) with the columns of [`COSMIC_CSV_HEADER`].
pub fn cosmic_csv_row(report: &CosmicReport, units: Units) -> String {
    let s = &report.mi_s_to_t;
    let t = &report.mi_t_to_s;
    let (nmi, flag) = match report.normalized_mi {
        Some(n) => (n.value.to_string(), n.out_of_range.to_string()),
        None => (String::new(), String::new()),
    };
    let gaussian = match report.gaussian_mi {
        GaussianBaseline::Value(v) => units.convert(v).to_string(),
        GaussianBaseline::Unavailable(_) => String::new(),
    };
    [
        csv_field(&report.labels.summarizer),
        csv_field(&report.labels.dataset),
        csv_field(&report.labels.embedder),
        report.n_pairs.to_string(),
        units.name().to_string(),
        units.convert(s.mi).to_string(),
        units.convert(s.mi_raw).to_string(),
        units.convert(s.h_marginal).to_string(),
        units.convert(s.h_conditional).to_string(),
        units.convert(t.mi).to_string(),
        units.convert(t.mi_raw).to_string(),
        nmi,
        flag,
        gaussian,
        report.mean_cosine.map(|c| c.to_string()).unwrap_or_default(),
        report.near_duplicate.to_string(),
        report.config.seed.0.to_string(),
    ]
    .join(",")
}

pub fn cosmic_csv(report: &CosmicReport, units: Units) -> String {
    format!("{COSMIC_CSV_HEADER}\n{}\n", cosmic_csv_row(report, units))
}

fn coefficient_text(c: Coefficient) -> String {
    match c {
        Coefficient::Value(v) => format!("{v:.4}"),
        Coefficient::Undefined(Undefined::ConstantInput) => "undefined:constant_input".into(),
        Coefficient::Undefined(Undefined::TooFewCommon) => "undefined:too_few_common".into(),
    }
}

/// Long-format CSV: one row per (metric, target) cell.
pub fn correlation_csv(report: &CorrelationReport) -> String {
    let mut out = String::from("metric,target,n,spearman,kendall_tau_b\n");
    for (i, m) in report.metrics.iter().enumerate() {
        for (j, t) in report.targets.iter().enumerate() {
            let c = report.cell(i, j);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                csv_field(m),
                csv_field(t),
                c.n,
                coefficient_text(c.spearman),
                coefficient_text(c.kendall_tau_b)
            );
        }
    }
    out
}

/// Aligned table with metrics as rows and targets as columns; each cell is
/// `ρ / τ`, `-` where undefined.
pub fn correlation_table(report: &CorrelationReport) -> String {
    let cell = |c: Coefficient| c.value().map_or("-".to_string(), |v| format!("{v:+.2}"));
    let mut rows: Vec<Vec<String>> = vec![std::iter::once("metric".to_string())
        .chain(report.targets.iter().map(|t| format!("{t} (rho/tau)")))
        .collect()];
    for (i, m) in report.metrics.iter().enumerate() {
        let mut row = vec![m.clone()];
        for j in 0..report.targets.len() {
            let c = report.cell(i, j);
            row.push(format!("{} / {}", cell(c.spearman), cell(c.kendall_tau_b)));
        }
        rows.push(row);
    }
    let widths: Vec<usize> =
        (0..rows[0].len()).map(|k| rows.iter().map(|r| r[k].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn agreement_text(report: &AgreementReport) -> String {
    let mut out = String::from("format: cosmic-agreement/1\n");
    let _ = writeln!(out, "n_common: {}", report.n_common);
    let _ = writeln!(out, "disagreements: {}", report.disagreements);
    let _ = writeln!(out, "error_rate: {}", report.error_rate);
    let _ = writeln!(out, "only_in_a: {}", report.only_in_a);
    let _ = writeln!(out, "only_in_b: {}", report.only_in_b);
    out.push_str("\n[confusion]\n");
    for ((a, b), n) in &report.confusion {
        let _ = writeln!(out, "{a} -> {b}: {n}");
    }
    out
}

/// `M × M` matrix CSV; header row of names, empty diagonal.
pub fn hierarchy_csv(result: &HierarchyResult, units: Units) -> String {
    let mut out = String::from("from\\to");
    for n in &result.names {
        out.push(',');
        out.push_str(&csv_field(n));
    }
    out.push('\n');
    for (i, n) in result.names.iter().enumerate() {
        out.push_str(&csv_field(n));
        for j in 0..result.len() {
            out.push(',');
            if let Some(v) = result.entry(i, j) {
                out.push_str(&units.convert(v).to_string());
            }
        }
        out.push('\n');
    }
    out
}

pub fn hierarchy_summary(result: &HierarchyResult, units: Units) -> String {
    let mut out = format!("summarizer,avg_outgoing,avg_incoming ({})\n", units.name());
    for (i, n) in result.names.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            csv_field(n),
            units.convert(result.avg_outgoing[i]),
            units.convert(result.avg_incoming[i])
        );
    }
    out
}

/// Pass/fail table grouped by concept alphabet size, then totals.
pub fn sweep_text(groups: &[(u32, SweepReport)], total: &SweepReport) -> String {
    let mut out = String::from("  m  trials  passed  worst_lower_slack  worst_upper_slack\n");
    for (m, r) in groups {
        let _ = writeln!(
            out,
            "{m:>3}  {:>6}  {:>6}  {:>17.3e}  {:>17.3e}",
            r.trials, r.passed, r.worst_lower_slack, r.worst_upper_slack
        );
    }
    let _ = writeln!(out, "{}/{} pass", total.passed, total.trials);
    let _ = writeln!(out, "worst lower slack: {:e}", total.worst_lower_slack);
    let _ = writeln!(out, "worst upper slack: {:e}", total.worst_upper_slack);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn bits_conversion() {
        assert_eq!(Units::Nats.convert(2.0), 2.0);
        assert!((Units::Bits.convert(std::f64::consts::LN_2) - 1.0).abs() < 1e-15);
    }
}
