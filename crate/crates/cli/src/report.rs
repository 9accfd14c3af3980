//! Reports: deterministic JSON plus a plain-text rendering.

use std::fmt::Write as _;

use equiblow_core::blowup::Ledger;
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Checks {
    /// Exceptional divisions performed on this chart.
    pub xi: usize,
    /// Points of `U` at which the four-term sequence was checked to be a
    /// complex; `None` without a section.
    pub complex: Option<usize>,
    /// `None` when there is no section to compare with.
    pub coinc: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChartReport {
    pub name: String,
    pub vars: Vec<String>,
    pub weights: Vec<Vec<i64>>,
    pub ideal_gb: Vec<String>,
    pub unstable_gb: Option<Vec<String>>,
    pub checks: Checks,
    pub verdicts: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LedgerReport {
    pub xi: usize,
    pub coinc: usize,
    pub weak_model: usize,
    pub gluing: usize,
    pub descent: usize,
    pub complex: usize,
    pub notes: Vec<String>,
}

impl LedgerReport {
    pub fn absorb(&mut self, l: &Ledger) {
        self.xi += l.xi;
        self.coinc += l.coinc;
        self.weak_model += l.weak_model;
        self.gluing += l.gluing;
        self.descent += l.descent;
    }

    pub fn merge(&mut self, other: &LedgerReport, prefix: &str) {
        self.xi += other.xi;
        self.coinc += other.coinc;
        self.weak_model += other.weak_model;
        self.gluing += other.gluing;
        self.descent += other.descent;
        self.complex += other.complex;
        self.notes
            .extend(other.notes.iter().map(|n| format!("{prefix}: {n}")));
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub model: String,
    pub command: String,
    pub charts: Vec<ChartReport>,
    pub ledger: LedgerReport,
    pub version: String,
}

impl Report {
    pub fn new(model: &str, command: &str) -> Self {
        Report {
            model: model.to_string(),
            command: command.to_string(),
            version: VERSION.to_string(),
            ..Report::default()
        }
    }

    pub fn sort(&mut self) {
        self.charts.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.command, self.model);
        for c in &self.charts {
            let _ = writeln!(out, "  {} [{}]", c.name, c.vars.join(", "));
            if !c.weights.is_empty() {
                let _ = writeln!(out, "    weights   {:?}", c.weights);
            }
            if !c.ideal_gb.is_empty() {
                let _ = writeln!(out, "    ideal     ({})", c.ideal_gb.join(", "));
            }
            if let Some(u) = &c.unstable_gb {
                let _ = writeln!(out, "    unstable  ({})", u.join(", "));
            }
            let mut checks = vec![format!("xi {}", c.checks.xi)];
            if let Some(n) = c.checks.complex {
                checks.push(format!("complex {n}"));
            }
            if let Some(b) = c.checks.coinc {
                checks.push(format!("coinc {}", if b { "pass" } else { "FAIL" }));
            }
            let _ = writeln!(out, "    checks    {}", checks.join(", "));
            for v in &c.verdicts {
                let _ = writeln!(out, "    {v}");
            }
        }
        let l = &self.ledger;
        let _ = writeln!(
            out,
            "ledger: xi {} coinc {} weak-model {} gluing {} descent {} complex {}",
            l.xi, l.coinc, l.weak_model, l.gluing, l.descent, l.complex
        );
        for n in &l.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}
