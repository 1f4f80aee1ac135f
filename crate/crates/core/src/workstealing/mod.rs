//! Randomized work stealing with constant message latency on a divisible load.
//!
//! Processor 0 starts with all the work. Every idle processor sends a steal
//! request to a uniformly random victim; the request and its answer each take
//! `latency` time units. A victim with enough work keeps the larger half and
//! ships the rest. See [`Simulation`] for the exact decision rules.

mod config;
mod sim;

pub use config::{parse_victim_script, ProcId, ResponsePolicy, ScriptedSteal, SimConfig};
pub use sim::{run_simulation, Message, ProcessorState, Simulation};

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::Time;

/// Splits `w` into `(kept, sent)` with the victim keeping the larger half.
pub fn split_work(w: Time) -> (Time, Time) {
    let sent = w / 2;
    (w - sent, sent)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("processor {thief} has no possible victim (p = {num_procs})")]
pub struct NoVictim {
    pub thief: ProcId,
    pub num_procs: usize,
}

/// Uniform victim selection over one ChaCha8 stream per run, with optional
/// per-thief scripted overrides consumed first.
#[derive(Debug, Clone)]
pub struct VictimSelector {
    rng: ChaCha8Rng,
    num_procs: usize,
    script: Vec<VecDeque<ProcId>>,
}

impl VictimSelector {
    pub fn new(seed: u64, num_procs: usize, script: &[ScriptedSteal]) -> Self {
        let mut queues = vec![VecDeque::new(); num_procs];
        for step in script {
            queues[step.thief].push_back(step.victim);
        }
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            num_procs,
            script: queues,
        }
    }

    pub fn choose_victim(&mut self, thief: ProcId) -> Result<ProcId, NoVictim> {
        if let Some(victim) = self.script.get_mut(thief).and_then(VecDeque::pop_front) {
            return Ok(victim);
        }
        choose_victim(&mut self.rng, thief, self.num_procs)
    }
}

/// Draws a victim uniformly among the `p - 1` processors other than `thief`.
pub fn choose_victim<R: Rng + ?Sized>(rng: &mut R, thief: ProcId, p: usize) -> Result<ProcId, NoVictim> {
    if p < 2 {
        return Err(NoVictim { thief, num_procs: p });
    }
    let r = rng.random_range(0..p - 1);
    Ok(if r >= thief { r + 1 } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_keeps_larger_half() {
        assert_eq!(split_work(95), (48, 47));
        assert_eq!(split_work(38), (19, 19));
        assert_eq!(split_work(0), (0, 0));
        assert_eq!(split_work(1), (1, 0));
        for w in 0..1000 {
            let (k, s) = split_work(w);
            assert_eq!(k + s, w);
            assert_eq!(k, w.div_ceil(2));
        }
    }

    #[test]
    fn single_candidate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(choose_victim(&mut rng, 0, 2), Ok(1));
            assert_eq!(choose_victim(&mut rng, 1, 2), Ok(0));
        }
    }

    #[test]
    fn no_victim_when_alone() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(choose_victim(&mut rng, 0, 1), Err(NoVictim { thief: 0, num_procs: 1 }));
    }

    #[test]
    fn script_overrides_then_falls_back() {
        let mut sel = VictimSelector::new(3, 3, &[ScriptedSteal { thief: 1, victim: 0 }]);
        assert_eq!(sel.choose_victim(1), Ok(0));
        for _ in 0..50 {
            assert_ne!(sel.choose_victim(1).unwrap(), 1);
        }
    }

    #[test]
    fn script_does_not_consume_randomness() {
        let mut plain = VictimSelector::new(9, 8, &[]);
        let mut scripted = VictimSelector::new(9, 8, &[ScriptedSteal { thief: 4, victim: 2 }]);
        assert_eq!(scripted.choose_victim(4), Ok(2));
        for _ in 0..20 {
            assert_eq!(plain.choose_victim(4), scripted.choose_victim(4));
        }
    }

    #[test]
    fn uniform_over_other_processors() {
        // chi-square against the uniform law on 63 cells, and each cell within 5 sigma
        let p = 64;
        let thief = 17;
        let draws = 1_000_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = vec![0u64; p];
        for _ in 0..draws {
            counts[choose_victim(&mut rng, thief, p).unwrap()] += 1;
        }
        assert_eq!(counts[thief], 0);
        let prob = 1.0 / 63.0;
        let expected = draws as f64 * prob;
        let sigma = (draws as f64 * prob * (1.0 - prob)).sqrt();
        let mut chi2 = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            if i == thief {
                continue;
            }
            assert!((c as f64 - expected).abs() < 5.0 * sigma, "victim {i}: {c}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // 62 degrees of freedom; 0.999 quantile is about 103.4
        assert!(chi2 < 103.4, "chi2 = {chi2}");
    }
}
