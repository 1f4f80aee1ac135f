use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::Time;
use crate::error::ConfigError;

pub type ProcId = usize;

/// How a victim answers steal requests while a previous grant is in flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponsePolicy {
    /// Single work transfer: at most one outgoing grant at a time; requests
    /// arriving while the channel is busy fail.
    Swt,
    /// Multiple work transfers: every request is served, sequentially, each
    /// halving what is left.
    Mwt,
}

impl fmt::Display for ResponsePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResponsePolicy::Swt => "swt",
            ResponsePolicy::Mwt => "mwt",
        })
    }
}

impl FromStr for ResponsePolicy {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "swt" => Ok(ResponsePolicy::Swt),
            "mwt" => Ok(ResponsePolicy::Mwt),
            other => Err(ConfigError::UnknownPolicy(other.to_string())),
        }
    }
}

/// One scripted victim choice: the next time `thief` steals, it targets `victim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedSteal {
    pub thief: ProcId,
    pub victim: ProcId,
}

/// Full parameterization of one simulation run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub total_work: Time,
    pub num_procs: usize,
    pub latency: Time,
    pub policy: ResponsePolicy,
    pub threshold_enabled: bool,
    pub threshold_value: Time,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub victim_script: Vec<ScriptedSteal>,
}

impl SimConfig {
    /// MWT with the steal threshold at `2 * latency`, seed 0.
    pub fn new(total_work: Time, num_procs: usize, latency: Time) -> Self {
        Self {
            total_work,
            num_procs,
            latency,
            policy: ResponsePolicy::Mwt,
            threshold_enabled: true,
            threshold_value: 2 * latency,
            seed: 0,
            victim_script: Vec::new(),
        }
    }

    pub fn with_policy(mut self, policy: ResponsePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_threshold(mut self, enabled: bool) -> Self {
        self.threshold_enabled = enabled;
        self
    }

    pub fn with_threshold_value(mut self, value: Time) -> Self {
        self.threshold_value = value;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_victim_script(mut self, script: Vec<ScriptedSteal>) -> Self {
        self.victim_script = script;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.total_work < 1 {
            return Err(ConfigError::NonPositive("W"));
        }
        if self.num_procs < 1 {
            return Err(ConfigError::NonPositive("p"));
        }
        if self.latency < 1 {
            return Err(ConfigError::NonPositive("lambda"));
        }
        for step in &self.victim_script {
            if step.thief >= self.num_procs || step.victim >= self.num_procs {
                return Err(ConfigError::ScriptOutOfRange {
                    thief: step.thief,
                    victim: step.victim,
                    num_procs: self.num_procs,
                });
            }
            if step.thief == step.victim {
                return Err(ConfigError::ScriptSelfSteal(step.thief));
            }
        }
        Ok(())
    }
}

/// Parses a victim script: one `thief -> victim` pair per line, 0-based ids.
/// Blank lines and `#` comments are ignored.
pub fn parse_victim_script(text: &str) -> Result<Vec<ScriptedSteal>, ConfigError> {
    let mut steps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || ConfigError::Script {
            line: idx + 1,
            text: raw.to_string(),
        };
        let (thief, victim) = line.split_once("->").ok_or_else(bad)?;
        let thief = thief.trim().parse().map_err(|_| bad())?;
        let victim = victim.trim().parse().map_err(|_| bad())?;
        steps.push(ScriptedSteal { thief, victim });
    }
    Ok(steps)
}
