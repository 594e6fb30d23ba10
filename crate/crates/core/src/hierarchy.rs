//! Directed informativeness between summarizers: `Î(S_i → S_j)` for every
//! ordered pair of summarizers run over the same source documents.
//!
//! Every ordered pair is an independent fit with its own seed derived from
//! `(seed, i, j)` over name-sorted inputs, so results do not depend on input
//! order or on how fits are scheduled across threads.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::knife::{estimate_mi, Direction, KnifeConfig};
use crate::{validate_pairing, EmbeddingMatrix, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyResult {
    /// Sorted summarizer names.
    pub names: Vec<String>,
    /// `M × M`, entry `(i, j)` is `Î(S_i → S_j)`; diagonal is `None`.
    pub matrix: Vec<Option<f64>>,
    /// Row means excluding the diagonal.
    pub avg_outgoing: Vec<f64>,
    /// Column means excluding the diagonal.
    pub avg_incoming: Vec<f64>,
    pub n_fits: usize,
}

impl HierarchyResult {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<f64> {
        self.matrix[i * self.len() + j]
    }
}

/// One ordered pair to fit: `from` conditions, `to` is predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairTask {
    pub from: usize,
    pub to: usize,
}

/// Validated, name-sorted, id-aligned summarizer outputs ready for fitting.
#[derive(Debug, Clone)]
pub struct HierarchyPlan {
    names: Vec<String>,
    sets: Vec<EmbeddingMatrix>,
    cfg: KnifeConfig,
}

impl HierarchyPlan {
    pub fn new(sets: Vec<(String, EmbeddingMatrix)>, cfg: &KnifeConfig) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::TooFewModels(sets.len()));
        }
        cfg.validate()?;
        let mut sets = sets;
        sets.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = sets.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateId(w[0].0.clone()));
        }
        let mut names = Vec::with_capacity(sets.len());
        let mut aligned = Vec::with_capacity(sets.len());
        let mut iter = sets.into_iter();
        let (first_name, first) = iter.next().expect("at least two sets");
        for (name, set) in iter {
            let pairs = validate_pairing(first.clone(), set)
                .map_err(|e| Error::MismatchedIds(format!("`{name}` vs `{first_name}`: {e}")))?;
            let (_, set) = pairs.into_parts();
            names.push(name);
            aligned.push(set);
        }
        names.insert(0, first_name);
        aligned.insert(0, first);
        Ok(Self { names, sets: aligned, cfg: cfg.clone() })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// All `M(M−1)` ordered pairs, row-major.
    pub fn tasks(&self) -> Vec<PairTask> {
        let m = self.names.len();
        (0..m).flat_map(|from| (0..m).filter(move |&to| to != from).map(move |to| PairTask { from, to })).collect()
    }

    /// Fits `Î(S_from → S_to)`.
    pub fn run(&self, task: PairTask) -> Result<f64> {
        let mut cfg = self.cfg.clone();
        cfg.seed = self.cfg.seed.derive(&[task.from as u64, task.to as u64]);
        let pairs = validate_pairing(self.sets[task.to].clone(), self.sets[task.from].clone())?;
        Ok(estimate_mi(&pairs, &cfg, Direction::SummaryToSource)?.mi)
    }

    /// Builds the result from per-task values, in any order.
    pub fn assemble(&self, results: &[(PairTask, f64)]) -> HierarchyResult {
        let m = self.names.len();
        let mut matrix = alloc::vec![None; m * m];
        for (task, v) in results {
            matrix[task.from * m + task.to] = Some(*v);
        }
        let off = (m - 1) as f64;
        let avg_outgoing = (0..m).map(|i| (0..m).filter_map(|j| matrix[i * m + j]).sum::<f64>() / off).collect();
        let avg_incoming = (0..m).map(|j| (0..m).filter_map(|i| matrix[i * m + j]).sum::<f64>() / off).collect();
        HierarchyResult { names: self.names.clone(), matrix, avg_outgoing, avg_incoming, n_fits: results.len() }
    }
}

/// Sequential hierarchy build.
pub fn build_hierarchy(sets: Vec<(String, EmbeddingMatrix)>, cfg: &KnifeConfig) -> Result<HierarchyResult> {
    let plan = HierarchyPlan::new(sets, cfg)?;
    let results = plan
        .tasks()
        .into_iter()
        .map(|t| plan.run(t).map(|v| (t, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(plan.assemble(&results))
}

fn quote(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph: one node per summarizer carrying its average outgoing
/// (`center`) and incoming (`border`) MI, and an edge `i → j` weighted by
/// `Î(S_i → S_j)` for every entry at or above `threshold`.
pub fn export_dot(result: &HierarchyResult, threshold: f64) -> String {
    let m = result.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| result.names[a].cmp(&result.names[b]));
    let mut out = String::from("digraph summarizers {\n");
    for &i in &order {
        let _ = writeln!(
            out,
            "  {} [center=\"{:.6}\", border=\"{:.6}\"];",
            quote(&result.names[i]),
            result.avg_outgoing[i],
            result.avg_incoming[i]
        );
    }
    for &i in &order {
        for &j in &order {
            if let Some(w) = result.entry(i, j).filter(|w| *w >= threshold) {
                let _ = writeln!(
                    out,
                    "  {} -> {} [weight=\"{w:.6}\", label=\"{w:.3}\"];",
                    quote(&result.names[i]),
                    quote(&result.names[j])
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
