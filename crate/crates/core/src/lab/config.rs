//! Plain-text experiment configuration: `[section]` headers and `key = value` lines.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};

/// Sections and keys with the line each value came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub sections: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

fn line_error(line: usize, msg: impl std::fmt::Display) -> LabError {
    LabError::Format(format!("line {line}: {msg}"))
}

impl RawConfig {
    /// Parses the text; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RawConfig::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| line_error(ln, "unterminated section header"))?.trim();
                if name.is_empty() {
                    return Err(line_error(ln, "empty section name"));
                }
                if cfg.sections.contains_key(name) {
                    return Err(line_error(ln, format!("section [{name}] repeated")));
                }
                cfg.sections.insert(name.to_string(), BTreeMap::new());
                section = Some(name.to_string());
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| line_error(ln, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(line_error(ln, "empty key"));
            }
            let sec = section.as_ref().ok_or_else(|| line_error(ln, "key outside any section"))?;
            let map = cfg.sections.get_mut(sec).expect("section inserted");
            if map.insert(k.to_string(), (ln, v.to_string())).is_some() {
                return Err(line_error(ln, format!("key `{k}` repeated in [{sec}]")));
            }
        }
        Ok(cfg)
    }
}

/// Boundary data of the extension problem.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    /// `x₁²` with the exact solution `x₁² − y²/(1 + a)` on the outer faces.
    ExampleX1Sq,
    /// `sin(π x₁ / L)` with periodic lateral faces.
    Sine,
    /// Smooth compactly supported bump with its exact extension on the outer faces.
    Bump,
    /// Polynomial exchange file.
    Poly(PathBuf),
    /// CSV `x1,…,xn,f` with one row per trace node.
    Samples(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChartSpec {
    Flat,
    /// `g = e^{2φ} δ` with `φ = ε (x₁² − x₂ y)/2` (`x₂ = y` when `n = 1`).
    Conformal(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemBlock {
    pub n: usize,
    pub gamma: f64,
    pub chart: ChartSpec,
    pub boundary: BoundarySpec,
}

impl ProblemBlock {
    /// `a = 1 − 2γ`.
    pub fn a(&self) -> f64 {
        1.0 - 2.0 * self.gamma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridBlock {
    pub h: f64,
    pub l: f64,
    pub y: f64,
    pub doubled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBlock {
    pub r_max: f64,
    /// Ladder ratio `r_{j+1}/r_j`.
    pub ratio: f64,
    pub levels: usize,
    pub eps0: f64,
    pub eps: f64,
    pub tol: f64,
    pub center: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratifyBlock {
    pub k: Vec<usize>,
    pub mu: f64,
    pub j: usize,
    pub window: f64,
    pub eps: f64,
    /// Grid spacing of set extraction.
    pub h: f64,
    pub degree: u32,
    pub tau_harm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemBlock,
    pub grid: GridBlock,
    pub frequency: FrequencyBlock,
    pub stratify: StratifyBlock,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemBlock { n: 1, gamma: 0.5, chart: ChartSpec::Flat, boundary: BoundarySpec::ExampleX1Sq },
            grid: GridBlock { h: 1.0 / 32.0, l: 1.0, y: 1.0, doubled: false },
            frequency: FrequencyBlock { r_max: 0.5, ratio: 0.5, levels: 4, eps0: 0.05, eps: 1e-2, tol: 1e-3, center: vec![0.0] },
            stratify: StratifyBlock { k: vec![0], mu: 0.25, j: 4, window: 0.5, eps: 1e-2, h: 1.0 / 64.0, degree: 2, tau_harm: 1e-3 },
            output_dir: None,
            threads: None,
        }
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("problem", &["n", "gamma", "chart", "boundary"]),
    ("grid", &["h", "L", "Y", "doubled"]),
    ("frequency", &["r_max", "ratio", "levels", "eps0", "eps", "tol", "center"]),
    ("stratify", &["k", "mu", "j", "window", "eps", "h", "degree", "tau_harm"]),
    ("output", &["dir"]),
    ("run", &["threads"]),
];

struct Reader<'a> {
    raw: &'a RawConfig,
    base: &'a Path,
}

impl Reader<'_> {
    fn get(&self, sec: &str, key: &str) -> Option<&(usize, String)> {
        self.raw.sections.get(sec).and_then(|m| m.get(key))
    }

    fn parse<T: std::str::FromStr>(&self, sec: &str, key: &str, default: T) -> Result<T> {
        match self.get(sec, key) {
            None => Ok(default),
            Some((ln, v)) => v.parse().map_err(|_| line_error(*ln, format!("cannot parse `{v}` for {sec}.{key}"))),
        }
    }

    fn check(&self, sec: &str, key: &str, ok: bool, what: &str) -> Result<()> {
        if ok {
            return Ok(());
        }
        let ln = self.get(sec, key).map_or(0, |(l, _)| *l);
        Err(line_error(ln, format!("{sec}.{key}: {what}")))
    }

    fn list<T: std::str::FromStr>(&self, sec: &str, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        match self.get(sec, key) {
            None => Ok(default),
            Some((ln, v)) => v
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| line_error(*ln, format!("cannot parse `{t}` in {sec}.{key}"))))
                .collect(),
        }
    }

    fn path(&self, ln: usize, p: &str) -> Result<PathBuf> {
        let path = self.base.join(p);
        std::fs::metadata(&path).map_err(|e| line_error(ln, format!("cannot read `{}`: {e}", path.display())))?;
        Ok(path)
    }
}

impl ExperimentConfig {
    /// Parses and validates; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        for (sec, keys) in &raw.sections {
            let allowed = KEYS
                .iter()
                .find(|(s, _)| s == sec)
                .map(|(_, k)| *k)
                .ok_or_else(|| {
                    let ln = keys.values().map(|(l, _)| *l).min().unwrap_or(0);
                    line_error(ln.saturating_sub(1), format!("unknown section [{sec}]"))
                })?;
            for (k, (ln, _)) in keys {
                if !allowed.contains(&k.as_str()) {
                    return Err(line_error(*ln, format!("unknown key `{k}` in [{sec}]")));
                }
            }
        }
        let r = Reader { raw: &raw, base };
        let d = ExperimentConfig::default();

        let n: usize = r.parse("problem", "n", d.problem.n)?;
        r.check("problem", "n", (1..=3).contains(&n), "must be 1, 2 or 3")?;
        let gamma: f64 = r.parse("problem", "gamma", d.problem.gamma)?;
        r.check("problem", "gamma", gamma > 0.0 && gamma < 1.0, "must lie in (0, 1)")?;
        let chart = match r.get("problem", "chart") {
            None => ChartSpec::Flat,
            Some((ln, v)) => {
                let toks: Vec<&str> = v.split_whitespace().collect();
                match toks.as_slice() {
                    ["flat"] => ChartSpec::Flat,
                    ["conformal", e] => ChartSpec::Conformal(e.parse().map_err(|_| line_error(*ln, "bad conformal amplitude"))?),
                    _ => return Err(line_error(*ln, "chart must be `flat` or `conformal <eps>`")),
                }
            }
        };
        let boundary = match r.get("problem", "boundary") {
            None => d.problem.boundary.clone(),
            Some((ln, v)) => {
                let toks: Vec<&str> = v.split_whitespace().collect();
                match toks.as_slice() {
                    ["example-x1sq"] => BoundarySpec::ExampleX1Sq,
                    ["sine"] => BoundarySpec::Sine,
                    ["bump"] => BoundarySpec::Bump,
                    ["poly", p] => BoundarySpec::Poly(r.path(*ln, p)?),
                    ["samples", p] => BoundarySpec::Samples(r.path(*ln, p)?),
                    _ => {
                        return Err(line_error(
                            *ln,
                            "boundary must be example-x1sq, sine, bump, `poly <file>` or `samples <file>`",
                        ))
                    }
                }
            }
        };

        let grid = GridBlock {
            h: r.parse("grid", "h", d.grid.h)?,
            l: r.parse("grid", "L", d.grid.l)?,
            y: r.parse("grid", "Y", d.grid.y)?,
            doubled: r.parse::<u8>("grid", "doubled", 0)? == 1,
        };
        r.check("grid", "h", grid.h > 0.0, "must be positive")?;

        let f = &d.frequency;
        let frequency = FrequencyBlock {
            r_max: r.parse("frequency", "r_max", f.r_max)?,
            ratio: r.parse("frequency", "ratio", f.ratio)?,
            levels: r.parse("frequency", "levels", f.levels)?,
            eps0: r.parse("frequency", "eps0", f.eps0)?,
            eps: r.parse("frequency", "eps", f.eps)?,
            tol: r.parse("frequency", "tol", f.tol)?,
            center: r.list("frequency", "center", vec![0.0; n])?,
        };
        r.check("frequency", "ratio", frequency.ratio > 0.0 && frequency.ratio < 1.0, "must lie in (0, 1)")?;
        r.check("frequency", "r_max", frequency.r_max > 0.0, "must be positive")?;
        r.check("frequency", "center", frequency.center.len() == n, "needs n coordinates")?;

        let s = &d.stratify;
        let stratify = StratifyBlock {
            k: r.list("stratify", "k", s.k.clone())?,
            mu: r.parse("stratify", "mu", s.mu)?,
            j: r.parse("stratify", "j", s.j)?,
            window: r.parse("stratify", "window", s.window)?,
            eps: r.parse("stratify", "eps", s.eps)?,
            h: r.parse("stratify", "h", s.h)?,
            degree: r.parse("stratify", "degree", s.degree)?,
            tau_harm: r.parse("stratify", "tau_harm", s.tau_harm)?,
        };
        r.check("stratify", "mu", stratify.mu > 0.0 && stratify.mu < 1.0, "must lie in (0, 1)")?;
        r.check("stratify", "k", stratify.k.iter().all(|&k| k <= n), "ranks must not exceed n")?;
        r.check("stratify", "degree", (1..=8).contains(&stratify.degree), "must lie in 1..=8")?;
        r.check("stratify", "h", stratify.h > 0.0, "must be positive")?;

        let output_dir = r.get("output", "dir").map(|(_, v)| base.join(v));
        let threads = match r.get("run", "threads") {
            None => None,
            Some((ln, v)) => Some(v.parse::<usize>().ok().filter(|&t| t > 0).ok_or_else(|| line_error(*ln, "threads must be a positive integer"))?),
        };
        Ok(ExperimentConfig {
            problem: ProblemBlock { n, gamma, chart, boundary },
            grid,
            frequency,
            stratify,
            output_dir,
            threads,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }
}
