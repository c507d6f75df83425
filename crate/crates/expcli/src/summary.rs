use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Family;
use crate::error::Result;

/// One line of a family's CSV summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub family: Family,
    pub size: usize,
    /// Dense ensemble, catalyst mode or `all`.
    pub group: String,
    /// Stoquastization or audited bound.
    pub variant: String,
    /// Instance class (`all`, `equal`, `lower`) or check kind.
    pub class: String,
    pub metric: String,
    pub count: usize,
    pub hits: usize,
    pub ties: usize,
    pub value: f64,
    pub std_error: f64,
    pub bootstrap_2sigma: f64,
    pub median_baseline: Option<f64>,
    pub median_variant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub family: Family,
    pub rows: Vec<SummaryRow>,
    pub records: usize,
    /// Records with at least one failed hard assertion.
    pub hard_failures: usize,
    /// Logged comparisons that are not asserted.
    pub notes: Vec<String>,
}

impl Summary {
    pub fn new(family: Family) -> Self {
        Summary {
            family,
            rows: Vec::new(),
            records: 0,
            hard_failures: 0,
            notes: Vec::new(),
        }
    }

    pub fn find(&self, size: usize, variant: &str, class: &str, metric: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.size == size && r.variant == variant && r.class == class && r.metric == metric)
    }

    pub fn rows_for(&self, metric: &str) -> impl Iterator<Item = &SummaryRow> {
        let metric = metric.to_string();
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Plain-text table for the terminal.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<14} {:>5} {:<8} {:<26} {:<10} {:<22} {:>7} {:>7} {:>5} {:>11} {:>10}",
            "family", "size", "group", "variant", "class", "metric", "count", "hits", "ties", "value", "2sigma"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<14} {:>5} {:<8} {:<26} {:<10} {:<22} {:>7} {:>7} {:>5} {:>11.4e} {:>10.2e}",
                r.family.name(),
                r.size,
                r.group,
                r.variant,
                r.class,
                r.metric,
                r.count,
                r.hits,
                r.ties,
                r.value,
                r.bootstrap_2sigma
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(
            out,
            "{} records, {} with hard-assertion failures",
            self.records, self.hard_failures
        );
        out
    }
}
