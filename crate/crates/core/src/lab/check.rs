//! Numeric check records and the consolidated acceptance table.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{LabError, Result};

/// Short titles of the acceptance criteria, numbered from 1.
pub const CRITERIA: [&str; 12] = [
    "exact algebra",
    "closed-form recovery",
    "symbol check",
    "rigidity",
    "monotonicity",
    "doubling and identity",
    "bad-scale pigeonhole",
    "covering bounds",
    "dimension fits",
    "nodal measure",
    "stability",
    "screens",
];

/// One measured quantity against its requirement. Criterion `0` marks
/// checks outside the acceptance list.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: usize,
    pub name: String,
    pub measured: f64,
    pub expected: String,
    pub pass: bool,
}

impl Check {
    pub fn new(criterion: usize, name: impl Into<String>, measured: f64, expected: impl Into<String>, pass: bool) -> Self {
        Check { criterion, name: name.into(), measured, expected: expected.into(), pass }
    }

    /// `measured ≤ bound`.
    pub fn at_most(criterion: usize, name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(criterion, name, measured, format!("<= {bound:e}"), measured <= bound)
    }

    /// `measured ≥ bound`.
    pub fn at_least(criterion: usize, name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(criterion, name, measured, format!(">= {bound:e}"), measured >= bound)
    }

    /// Boolean outcome recorded as `1` or `0`.
    pub fn holds(criterion: usize, name: impl Into<String>, ok: bool) -> Self {
        Self::new(criterion, name, if ok { 1.0 } else { 0.0 }, "1", ok)
    }

    pub fn status(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }

    /// `PASS [3] name: measured (expected)` with six significant digits.
    pub fn line(&self) -> String {
        format!("{} [{}] {}: {:.5e} (expected {})", self.status(), self.criterion, self.name, self.measured, self.expected)
    }
}

fn clean(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

/// CSV `criterion,name,measured,expected,status`.
pub fn write_checks(w: &mut impl Write, checks: &[Check]) -> Result<()> {
    writeln!(w, "criterion,name,measured,expected,status")?;
    for c in checks {
        writeln!(w, "{},{},{:.16e},{},{}", c.criterion, clean(&c.name), c.measured, clean(&c.expected), c.status())?;
    }
    Ok(())
}

pub fn read_checks(text: &str) -> Result<Vec<Check>> {
    let mut lines = text.lines();
    if lines.next() != Some("criterion,name,measured,expected,status") {
        return Err(LabError::Format("line 1: not a checks file".into()));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = || LabError::Format(format!("line {}: malformed check record", i + 2));
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 5 {
                return Err(bad());
            }
            let pass = match f[4] {
                "PASS" => true,
                "FAIL" => false,
                _ => return Err(bad()),
            };
            Ok(Check {
                criterion: f[0].parse().map_err(|_| bad())?,
                name: f[1].to_string(),
                measured: f[2].parse().map_err(|_| bad())?,
                expected: f[3].to_string(),
                pass,
            })
        })
        .collect()
}

/// Reads every `checks_*.csv` in `dir`, in file-name order.
pub fn collect_checks(dir: &Path) -> Result<Vec<Check>> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| LabError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("checks_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f)?;
        out.extend(read_checks(&text).map_err(|e| LabError::Format(format!("{}: {e}", f.display())))?);
    }
    Ok(out)
}

/// Consolidated table: one row per criterion with the worst check shown,
/// then other checks. Returns the table and whether every check passed.
pub fn report_table(checks: &[Check]) -> (String, bool) {
    let mut s = String::new();
    let _ = writeln!(s, "{:<3} {:<22} {:<6} {:>7}  {:<44} {:>12}  expected", "#", "criterion", "status", "checks", "representative", "measured");
    let row = |s: &mut String, id: &str, title: &str, group: &[&Check]| {
        if group.is_empty() {
            let _ = writeln!(s, "{id:<3} {title:<22} {:<6} {:>7}", "-", 0);
            return;
        }
        let passed = group.iter().filter(|c| c.pass).count();
        let rep = group.iter().find(|c| !c.pass).unwrap_or(group.last().expect("nonempty"));
        let status = if passed == group.len() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "{id:<3} {title:<22} {status:<6} {:>7}  {:<44} {:>12.5e}  {}",
            format!("{passed}/{}", group.len()),
            rep.name,
            rep.measured,
            rep.expected
        );
    };
    for (i, title) in CRITERIA.iter().enumerate() {
        let group: Vec<&Check> = checks.iter().filter(|c| c.criterion == i + 1).collect();
        row(&mut s, &(i + 1).to_string(), title, &group);
    }
    let other: Vec<&Check> = checks.iter().filter(|c| c.criterion == 0 || c.criterion > CRITERIA.len()).collect();
    if !other.is_empty() {
        row(&mut s, "-", "other checks", &other);
    }
    (s, checks.iter().all(|c| c.pass))
}
