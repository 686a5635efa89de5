//! Inequality records shared by the perturbation report and the converse
//! ledger.

use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Default slack for inequality entries.
pub const MARGIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
    PremiseFailed,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Vacuous => "vacuous",
            Status::PremiseFailed => "premise-failed",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

fn judged(name: &str, lhs: f64, rhs: f64, margin: f64, tol: f64) -> Entry {
    let status = if margin >= -tol { Status::Pass } else { Status::Fail };
    Entry { name: name.to_string(), lhs, rhs, margin, status, note: None }
}

impl Entry {
    /// lhs ≤ rhs.
    pub fn le(name: &str, lhs: f64, rhs: f64) -> Entry {
        let m = if lhs == f64::NEG_INFINITY || rhs == f64::INFINITY { f64::INFINITY } else { rhs - lhs };
        judged(name, lhs, rhs, if m.is_nan() { f64::NEG_INFINITY } else { m }, MARGIN_TOL)
    }

    /// lhs ≥ rhs.
    pub fn ge(name: &str, lhs: f64, rhs: f64) -> Entry {
        let mut e = Entry::le(name, rhs, lhs);
        e.lhs = lhs;
        e.rhs = rhs;
        e
    }

    /// lhs = rhs within `tol`; the margin is −|lhs − rhs|.
    pub fn eq(name: &str, lhs: f64, rhs: f64, tol: f64) -> Entry {
        let d = if lhs == rhs { 0.0 } else { (lhs - rhs).abs() };
        judged(name, lhs, rhs, if d.is_nan() { f64::NEG_INFINITY } else { -d }, tol)
    }

    pub fn vacuous(name: &str, note: &str) -> Entry {
        Entry {
            name: name.to_string(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            status: Status::Vacuous,
            note: Some(note.to_string()),
        }
    }

    /// Mark the entry premise-failed when `ok` is false, keeping its margin.
    pub fn premise(mut self, ok: bool, note: &str) -> Entry {
        if !ok {
            self.status = Status::PremiseFailed;
            self.note = Some(note.to_string());
        }
        self
    }

    pub fn note(mut self, note: &str) -> Entry {
        self.note = Some(note.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Ledger {
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
    pub premise_failed: usize,
}

impl Ledger {
    pub fn new() -> Self {
        Ledger::default()
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, other: Ledger) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for e in &self.entries {
            match e.status {
                Status::Pass => c.pass += 1,
                Status::Fail => c.fail += 1,
                Status::Vacuous => c.vacuous += 1,
                Status::PremiseFailed => c.premise_failed += 1,
            }
        }
        c
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn has_fail(&self) -> bool {
        self.failures().next().is_some()
    }

    /// Fixed-width text table.
    pub fn to_table(&self) -> String {
        let w = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(4).max(4);
        let mut s = String::new();
        let _ = writeln!(s, "{:<w$}  {:>14}  {:>14}  {:>12}  status", "name", "lhs", "rhs", "margin");
        for e in &self.entries {
            let _ = write!(s, "{:<w$}  {:>14.6e}  {:>14.6e}  {:>12.3e}  {}", e.name, e.lhs, e.rhs, e.margin, e.status.as_str());
            if let Some(n) = &e.note {
                let _ = write!(s, "  ({n})");
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_rules() {
        assert!(Entry::le("a", 1.0, 1.0 - 1e-10).passed());
        assert!(!Entry::le("a", 1.0, 0.9).passed());
        assert!(Entry::ge("b", 2.0, 1.0).margin == 1.0);
        assert!(Entry::le("c", 0.0, f64::INFINITY).passed());
        assert!(!Entry::le("d", f64::NAN, 0.0).passed());
        assert!(Entry::eq("e", 1.0, 1.0 + 1e-13, 1e-12).passed());
        let p = Entry::le("f", 2.0, 1.0).premise(false, "typicality");
        assert_eq!(p.status, Status::PremiseFailed);
        let mut l = Ledger::new();
        l.push(p);
        l.push(Entry::vacuous("g", "zero"));
        assert_eq!(l.counts(), Counts { pass: 0, fail: 0, vacuous: 1, premise_failed: 1 });
        assert!(l.to_table().contains("premise-failed"));
        let j = serde_json::to_string(&l).unwrap();
        assert!(j.contains("\"premise-failed\""));
    }
}
