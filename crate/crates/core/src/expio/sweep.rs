//! Sweep configuration documents.
//!
//! Grammar: `key = value` entries separated by newlines or `;`, with `#`
//! comments. Integer lists are comma-separated items, each either a number or
//! a geometric range `lo:hi:mult` (`lo, lo*mult, ...` up to `hi`).
//!
//! | key                | value                        | default |
//! |--------------------|------------------------------|---------|
//! | `W`                | integer list, each >= 1      | required |
//! | `p`                | integer list, each >= 1      | required |
//! | `lambda`           | integer list, each >= 1      | required |
//! | `policy`           | list of `swt`, `mwt`         | `mwt`   |
//! | `threshold`        | list of `on`, `off`          | `on`    |
//! | `replications`     | integer >= 1                 | 1       |
//! | `base_seed`        | integer                      | 0       |
//! | `output`           | path of the per-run CSV      | none    |
//! | `aggregate_output` | path of the summary CSV      | none    |
//!
//! Configurations are enumerated with `W` varying slowest, then `p`,
//! `lambda`, `policy`, `threshold`. Replication `r` of configuration `k`
//! runs with seed `base_seed + k * replications + r`.

use std::path::PathBuf;

use crate::engine::Time;
use crate::error::SweepError;
use crate::workstealing::{ResponsePolicy, SimConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub work: Vec<Time>,
    pub procs: Vec<usize>,
    pub latency: Vec<Time>,
    pub policies: Vec<ResponsePolicy>,
    pub threshold: Vec<bool>,
    pub replications: u64,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    pub aggregate_output: Option<PathBuf>,
}

impl SweepSpec {
    pub fn new(work: Vec<Time>, procs: Vec<usize>, latency: Vec<Time>) -> Self {
        Self {
            work,
            procs,
            latency,
            policies: vec![ResponsePolicy::Mwt],
            threshold: vec![true],
            replications: 1,
            base_seed: 0,
            output: None,
            aggregate_output: None,
        }
    }

    /// Distinct configurations in enumeration order, with seed left at 0.
    pub fn configs(&self) -> Vec<SimConfig> {
        let mut out = Vec::new();
        for &w in &self.work {
            for &p in &self.procs {
                for &l in &self.latency {
                    for &policy in &self.policies {
                        for &threshold in &self.threshold {
                            out.push(SimConfig::new(w, p, l).with_policy(policy).with_threshold(threshold));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn seed_for(&self, config_index: usize, replication: u64) -> u64 {
        self.base_seed
            .wrapping_add((config_index as u64).wrapping_mul(self.replications))
            .wrapping_add(replication)
    }

    /// Every run of the sweep, seeded by the affine schedule.
    pub fn runs(&self) -> Vec<SimConfig> {
        self.configs()
            .into_iter()
            .enumerate()
            .flat_map(|(k, cfg)| (0..self.replications).map(move |r| (k, r, cfg.clone())))
            .map(|(k, r, cfg)| cfg.with_seed(self.seed_for(k, r)))
            .collect()
    }

    fn validate(&self) -> Result<(), SweepError> {
        if self.work.is_empty()
            || self.procs.is_empty()
            || self.latency.is_empty()
            || self.policies.is_empty()
            || self.threshold.is_empty()
        {
            return Err(SweepError::EmptyProduct);
        }
        Ok(())
    }
}

fn parse_int(item: &str) -> Option<u64> {
    let item = item.trim();
    if let Ok(v) = item.parse::<u64>() {
        return Some(v);
    }
    // accept 1e6-style literals when they denote an integer
    let v: f64 = item.parse().ok()?;
    (v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64).then_some(v as u64)
}

fn parse_int_list(value: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for item in value.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err("empty list item".into());
        }
        if item.contains(':') {
            let parts: Vec<&str> = item.split(':').collect();
            let [lo, hi, mult] = parts[..] else {
                return Err(format!("range `{item}` must be lo:hi:mult"));
            };
            let bad = || format!("range `{item}` has a non-integer bound");
            let (lo, hi, mult) = (
                parse_int(lo).ok_or_else(bad)?,
                parse_int(hi).ok_or_else(bad)?,
                parse_int(mult).ok_or_else(bad)?,
            );
            if lo < 1 || mult < 2 || hi < lo {
                return Err(format!("range `{item}` needs 1 <= lo <= hi and mult >= 2"));
            }
            let mut v = lo;
            while v <= hi {
                out.push(v);
                match v.checked_mul(mult) {
                    Some(next) => v = next,
                    None => break,
                }
            }
        } else {
            out.push(parse_int(item).ok_or_else(|| format!("`{item}` is not an integer"))?);
        }
    }
    Ok(out)
}

fn at_least_one(name: &str, values: Vec<u64>) -> Result<Vec<u64>, String> {
    match values.iter().find(|&&v| v < 1) {
        Some(v) => Err(format!("{name} must be at least 1 (got {v})")),
        None => Ok(values),
    }
}

fn parse_switch(item: &str) -> Result<bool, String> {
    match item.trim().to_ascii_lowercase().as_str() {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        other => Err(format!("`{other}` is not on/off")),
    }
}

pub fn parse_sweep(text: &str) -> Result<SweepSpec, SweepError> {
    let mut work = None;
    let mut procs = None;
    let mut latency = None;
    let mut spec = SweepSpec::new(Vec::new(), Vec::new(), Vec::new());

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| SweepError::Parse { line: line_no, message };
        let line = raw_line.split('#').next().unwrap_or("");
        for entry in line.split(';') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{entry}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "W" => work = Some(at_least_one("W", parse_int_list(value).map_err(err)?).map_err(err)?),
                "p" => {
                    let v = at_least_one("p", parse_int_list(value).map_err(err)?).map_err(err)?;
                    procs = Some(v.into_iter().map(|p| p as usize).collect());
                }
                "lambda" => latency = Some(at_least_one("lambda", parse_int_list(value).map_err(err)?).map_err(err)?),
                "policy" => {
                    spec.policies = value
                        .split(',')
                        .map(|s| s.parse::<ResponsePolicy>().map_err(|e| err(e.to_string())))
                        .collect::<Result<_, _>>()?
                }
                "threshold" => {
                    spec.threshold = value
                        .split(',')
                        .map(|s| parse_switch(s).map_err(err))
                        .collect::<Result<_, _>>()?
                }
                "replications" => {
                    spec.replications = parse_int(value)
                        .filter(|&r| r >= 1)
                        .ok_or_else(|| err(format!("replications must be an integer >= 1, got `{value}`")))?
                }
                "base_seed" => {
                    spec.base_seed = parse_int(value).ok_or_else(|| err(format!("`{value}` is not a seed")))?
                }
                "output" => spec.output = Some(PathBuf::from(value)),
                "aggregate_output" => spec.aggregate_output = Some(PathBuf::from(value)),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
    }

    spec.work = work.ok_or(SweepError::MissingKey("W"))?;
    spec.procs = procs.ok_or(SweepError::MissingKey("p"))?;
    spec.latency = latency.ok_or(SweepError::MissingKey("lambda"))?;
    spec.validate()?;
    Ok(spec)
}
