//! Measured quantities of a run: makespan, steal counters, execution phases,
//! and boxplot summaries across replications.
//!
//! Phases: the startup phase ends when every processor has held work at least
//! once. The shutdown phase starts at the earliest instant, at or after the
//! end of startup, from which fewer than `ceil(p/2)` processors are busy for
//! the rest of the run. The second boundary is a quantitative reading of
//! "most processors are idle" and nothing more.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Time;
use crate::trace::{EventTrace, ProcState};
use crate::workstealing::SimConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimResult {
    pub makespan: Time,
    pub requests_total: u64,
    pub requests_granted: u64,
    pub requests_failed: u64,
    pub startup_end: Time,
    pub shutdown_start: Time,
    pub busy_time: Vec<Time>,
    pub idle_time: Vec<Time>,
    pub config: SimConfig,
    pub seed: u64,
}

impl SimResult {
    pub fn check_consistency(&self) -> Result<(), String> {
        if self.requests_total != self.requests_granted + self.requests_failed {
            return Err(format!(
                "requests {} != granted {} + failed {}",
                self.requests_total, self.requests_granted, self.requests_failed
            ));
        }
        let busy: Time = self.busy_time.iter().sum();
        if busy != self.config.total_work {
            return Err(format!("busy time {busy} != W={}", self.config.total_work));
        }
        for (i, (b, idle)) in self.busy_time.iter().zip(&self.idle_time).enumerate() {
            if b + idle != self.makespan {
                return Err(format!("P{i}: busy {b} + idle {idle} != makespan {}", self.makespan));
            }
        }
        if !(self.startup_end <= self.shutdown_start && self.shutdown_start <= self.makespan) {
            return Err(format!(
                "phases out of order: startup_end {} shutdown_start {} makespan {}",
                self.startup_end, self.shutdown_start, self.makespan
            ));
        }
        Ok(())
    }
}

/// Earliest time at which every processor has been active; the makespan if
/// some processor never received work.
pub fn detect_startup_end(trace: &EventTrace) -> Time {
    let mut active = vec![false; trace.num_procs];
    let mut remaining = trace.num_procs;
    for (t, p, s) in trace.state_changes() {
        if s == ProcState::Working && !active[p] {
            active[p] = true;
            remaining -= 1;
            if remaining == 0 {
                return t;
            }
        }
    }
    trace.makespan()
}

pub fn detect_shutdown_start(trace: &EventTrace) -> Time {
    let startup_end = detect_startup_end(trace);
    let majority = trace.num_procs.div_ceil(2);
    let mut working = vec![false; trace.num_procs];
    let mut busy = 0usize;
    // time from which the busy count has stayed below `majority`
    let mut below_since = Some(0);
    let records: Vec<_> = trace.state_changes().collect();
    let mut i = 0;
    while i < records.len() {
        let t = records[i].0;
        while i < records.len() && records[i].0 == t {
            let (_, p, s) = records[i];
            let now_working = s == ProcState::Working;
            if now_working != working[p] {
                if now_working {
                    busy += 1;
                } else {
                    busy -= 1;
                }
                working[p] = now_working;
            }
            i += 1;
        }
        if busy >= majority {
            below_since = None;
        } else if below_since.is_none() {
            below_since = Some(t);
        }
    }
    below_since.unwrap_or_else(|| trace.makespan()).max(startup_end)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 when n = 1.
    pub stddev: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot summarize an empty sample")]
pub struct EmptySample;

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Boxplot summary. Quartiles are medians of the lower and upper halves,
/// excluding the overall median when `n` is odd.
pub fn summarize(values: &[f64]) -> Result<SummaryStats, EmptySample> {
    if values.is_empty() {
        return Err(EmptySample);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let stddev = if n > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let (q1, q3) = if n == 1 {
        (v[0], v[0])
    } else {
        let half = n / 2;
        (median_sorted(&v[..half]), median_sorted(&v[n - half..]))
    };
    Ok(SummaryStats {
        n,
        mean,
        stddev,
        min: v[0],
        q1,
        median: median_sorted(&v),
        q3,
        max: v[n - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{RecordKind, TraceRecord};
    use crate::workstealing::{run_simulation, ScriptedSteal, SimConfig};

    fn fig1_trace() -> (SimResult, EventTrace) {
        let cfg = SimConfig::new(100, 3, 5).with_threshold(false).with_victim_script(vec![
            ScriptedSteal { thief: 1, victim: 0 },
            ScriptedSteal { thief: 2, victim: 1 },
            ScriptedSteal { thief: 2, victim: 0 },
        ]);
        run_simulation(cfg).unwrap()
    }

    /// Brute-force busy count at every integer instant, straight from the
    /// state-change records.
    fn busy_at(trace: &EventTrace, t: Time) -> usize {
        let mut state = vec![ProcState::Idle; trace.num_procs];
        for (time, p, s) in trace.state_changes() {
            if time <= t {
                state[p] = s;
            }
        }
        state.iter().filter(|s| **s == ProcState::Working).count()
    }

    fn shutdown_by_scan(trace: &EventTrace, startup_end: Time, makespan: Time) -> Time {
        let majority = trace.num_procs.div_ceil(2);
        (startup_end..=makespan)
            .find(|&s| (s..=makespan).all(|t| busy_at(trace, t) < majority))
            .unwrap()
    }

    #[test]
    fn fig1_phases() {
        let (r, trace) = fig1_trace();
        assert_eq!(detect_startup_end(&trace), 20);
        assert_eq!(r.startup_end, 20);
        assert_eq!(r.shutdown_start, shutdown_by_scan(&trace, 20, r.makespan));
        r.check_consistency().unwrap();
    }

    #[test]
    fn single_processor_phases() {
        let (r, trace) = run_simulation(SimConfig::new(500, 1, 9)).unwrap();
        assert_eq!(detect_startup_end(&trace), 0);
        assert_eq!(detect_shutdown_start(&trace), 500);
        assert_eq!(r.makespan, 500);
    }

    #[test]
    fn never_activated_processors() {
        let (r, trace) = run_simulation(SimConfig::new(4, 64, 2)).unwrap();
        let activated = trace
            .state_changes()
            .filter(|&(_, _, s)| s == ProcState::Working)
            .map(|(_, p, _)| p)
            .collect::<std::collections::HashSet<_>>();
        assert!(activated.len() < 64);
        assert_eq!(r.startup_end, r.makespan);
        assert_eq!(r.shutdown_start, r.makespan);
    }

    #[test]
    fn phases_match_brute_force_scan() {
        for seed in 0..40 {
            let cfg = SimConfig::new(300 + seed * 13, 2 + (seed as usize % 7), 1 + seed % 6)
                .with_threshold(seed % 3 == 0)
                .with_seed(seed);
            let (r, trace) = run_simulation(cfg).unwrap();
            assert_eq!(
                r.shutdown_start,
                shutdown_by_scan(&trace, r.startup_end, r.makespan),
                "seed {seed}"
            );
            assert_eq!(r.requests_granted as usize, trace.grants_sent());
            r.check_consistency().unwrap();
        }
    }

    #[test]
    fn empty_trace_defaults() {
        let trace = EventTrace::new(2, 1);
        assert_eq!(detect_startup_end(&trace), 0);
        assert_eq!(detect_shutdown_start(&trace), 0);
        let mut t = EventTrace::new(1, 1);
        t.push(TraceRecord {
            time: 0,
            kind: RecordKind::StateChange(ProcState::Working),
            proc: 0,
            peer: None,
            work_amount: None,
        });
        t.push(TraceRecord {
            time: 8,
            kind: RecordKind::StateChange(ProcState::Idle),
            proc: 0,
            peer: None,
            work_amount: None,
        });
        assert_eq!(detect_shutdown_start(&t), 8);
    }

    #[test]
    fn textbook_quartiles() {
        let s = summarize(&[5.0, 3.0, 1.0, 4.0, 2.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 1.5, 3.0, 4.5, 5.0));
        assert_eq!(s.n, 5);
        assert_eq!(s.mean, 3.0);
        let even = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((even.q1, even.median, even.q3), (1.5, 2.5, 3.5));
    }

    #[test]
    fn single_value() {
        let s = summarize(&[7.0]).unwrap();
        assert_eq!(
            (s.min, s.q1, s.median, s.q3, s.max, s.mean, s.stddev),
            (7.0, 7.0, 7.0, 7.0, 7.0, 7.0, 0.0)
        );
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(summarize(&[]), Err(EmptySample));
    }

    #[test]
    fn uniform_median() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let s = summarize(&v).unwrap();
        assert!((s.median - 0.5).abs() < 0.02);
        assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
    }
}
