//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fail.
//!
//! Run with `cargo test -p ws-latency --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ws_latency::expio::write_paje;
use ws_latency::harness::{empirical_limit_latency, mean_of, replicate, LimitSearch};
use ws_latency::metrics::{summarize, SimResult};
use ws_latency::model::{self, FitRow};
use ws_latency::workstealing::{run_simulation, ResponsePolicy, ScriptedSteal, SimConfig, Simulation};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fig1_config() -> SimConfig {
    SimConfig::new(100, 3, 5).with_threshold(false).with_victim_script(vec![
        ScriptedSteal { thief: 1, victim: 0 },
        ScriptedSteal { thief: 2, victim: 1 },
        ScriptedSteal { thief: 2, victim: 0 },
    ])
}

fn golden_trace() -> Outcome {
    let start = Instant::now();
    let mut sim = Simulation::new(fig1_config()).map_err(|e| e.to_string())?;
    let mut snapshots = Vec::new();
    for t in [5, 10, 20] {
        sim.run_until(t);
        snapshots.push(sim.remaining_work());
    }
    let (result, _) = sim.run();
    let elapsed = start.elapsed();
    let expected = vec![vec![48, 0, 0], vec![43, 47, 0], vec![14, 37, 19]];
    if snapshots != expected {
        return Err(format!("snapshots {snapshots:?}, expected {expected:?}"));
    }
    if result.startup_end != 20 {
        return Err(format!("startup_end {}", result.startup_end));
    }
    if elapsed >= Duration::from_millis(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "snapshots {snapshots:?}, startup_end 20, makespan {}, {elapsed:?}",
        result.makespan
    ))
}

fn threshold_pathology() -> Outcome {
    let off = run_simulation(SimConfig::new(150, 2, 100).with_threshold(false))
        .unwrap()
        .0
        .makespan;
    let on = run_simulation(SimConfig::new(150, 2, 100)).unwrap().0.makespan;
    if (off, on) == (225, 150) {
        Ok("makespan 225 without threshold, 150 with".into())
    } else {
        Err(format!("makespans off={off} on={on}, expected 225/150"))
    }
}

fn random_config(rng: &mut ChaCha8Rng, seed: u64) -> SimConfig {
    let work = (10f64.powf(rng.random_range(0.0..5.0)) as u64).clamp(1, 100_000);
    let procs = rng.random_range(1..=64);
    let latency = (10f64.powf(rng.random_range(0.0..2.7)) as u64).clamp(1, 500);
    let policy = if rng.random_bool(0.5) {
        ResponsePolicy::Swt
    } else {
        ResponsePolicy::Mwt
    };
    SimConfig::new(work, procs, latency)
        .with_policy(policy)
        .with_threshold(rng.random_bool(0.5))
        .with_seed(seed)
}

fn check_run(cfg: SimConfig) -> Result<(), String> {
    let mut sim = Simulation::new(cfg.clone()).map_err(|e| e.to_string())?;
    sim.check_invariants()?;
    while sim.step().is_some() {
        sim.check_invariants()?;
    }
    let (result, trace) = sim.run();
    result.check_consistency()?;
    if result.makespan < cfg.total_work.div_ceil(cfg.num_procs as u64) {
        return Err(format!("makespan {} below W/p", result.makespan));
    }
    if result.requests_granted as usize != trace.grants_sent() {
        return Err("granted counter disagrees with trace".into());
    }
    let (again, trace_again) = run_simulation(cfg.clone()).map_err(|e| e.to_string())?;
    let bytes = |r: &SimResult, t| {
        let mut buf = serde_json::to_vec(r).unwrap();
        write_paje(t, cfg.latency, &mut buf).unwrap();
        buf
    };
    if bytes(&result, &trace) != bytes(&again, &trace_again) {
        return Err("replay differs".into());
    }
    Ok(())
}

fn conservation_and_determinism() -> Outcome {
    let start = Instant::now();
    let n = 10_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE55);
    let configs: Vec<SimConfig> = (0..n).map(|i| random_config(&mut rng, i)).collect();
    let failures: Vec<String> = configs
        .into_par_iter()
        .filter_map(|cfg| check_run(cfg.clone()).err().map(|e| format!("{cfg:?}: {e}")))
        .collect();
    let elapsed = start.elapsed();
    if let Some(first) = failures.first() {
        return Err(format!("{} of {n} configs violate: {first}", failures.len()));
    }
    if elapsed >= Duration::from_secs(120) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{n} random configs clean, {elapsed:.1?}"))
}

fn threshold_safety() -> Outcome {
    let mut configs = Vec::new();
    for p in [2, 8, 32] {
        for lambda in [2, 50, 500] {
            for seed in 0..1000 {
                configs.push(SimConfig::new(10_000, p, lambda).with_seed(seed));
            }
        }
    }
    let total = configs.len();
    let violations: Vec<_> = configs
        .into_par_iter()
        .filter_map(|cfg| {
            let r = run_simulation(cfg).unwrap().0;
            (r.makespan > r.config.total_work).then_some((r.config.num_procs, r.config.latency, r.seed, r.makespan))
        })
        .collect();
    if violations.is_empty() {
        Ok(format!("0 violations in {total} runs"))
    } else {
        Err(format!("{} violations, first {:?}", violations.len(), violations[0]))
    }
}

fn ratios(results: &[SimResult]) -> Vec<f64> {
    results
        .iter()
        .map(|r| {
            let c = &r.config;
            model::accuracy_ratio(
                r.makespan as f64,
                c.total_work as f64,
                c.num_procs as f64,
                c.latency as f64,
                model::DEFAULT_C_PRIME,
            )
            .unwrap()
        })
        .collect()
}

fn model_accuracy() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for work in [1_000_000u64, 10_000_000] {
        for procs in [32usize, 64] {
            let runs = replicate(&SimConfig::new(work, procs, 262), 0, 200).unwrap();
            let median = summarize(&ratios(&runs)).unwrap().median;
            ok &= (median - 1.0).abs() <= 0.05;
            lines.push(format!("W={work:e} p={procs}: median ratio {median:.4}"));
        }
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn worst_case_error() -> Outcome {
    let runs = replicate(&SimConfig::new(200_000, 64, 482), 0, 500).unwrap();
    let r = ratios(&runs);
    let mean_error = r.iter().map(|x| (x - 1.0).abs()).sum::<f64>() / r.len() as f64;
    let msg = format!("mean |ratio - 1| = {mean_error:.4} at W/p=3125, lambda=482");
    if mean_error <= 0.13 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const FIT_WORK: [u64; 3] = [100_000, 1_000_000, 10_000_000];
const FIT_PROCS: [usize; 3] = [32, 64, 128];
const FIT_LATENCY: [u64; 5] = [2, 8, 32, 128, 500];

fn cprime_recovery() -> Outcome {
    let mut rows = Vec::new();
    let mut synthetic = Vec::new();
    for &w in &FIT_WORK {
        for &p in &FIT_PROCS {
            for &l in &FIT_LATENCY {
                if w <= 2 * l {
                    continue;
                }
                let runs = replicate(&SimConfig::new(w, p, l), 0, 100).unwrap();
                let (wf, pf, lf) = (w as f64, p as f64, l as f64);
                rows.push(FitRow {
                    work: wf,
                    procs: pf,
                    latency: lf,
                    mean_makespan: mean_of(&runs, |r| r.makespan as f64),
                });
                synthetic.push(FitRow {
                    work: wf,
                    procs: pf,
                    latency: lf,
                    mean_makespan: model::predict_makespan(wf, pf, lf, 1.8).unwrap(),
                });
            }
        }
    }
    let fitted = model::fit_cprime(&rows).map_err(|e| e.to_string())?;
    let noiseless = model::fit_cprime(&synthetic).map_err(|e| e.to_string())?;
    let rel = ((noiseless - 1.8) / 1.8).abs();
    let msg = format!(
        "fitted c' = {fitted:.4} over {} configs; noiseless recovery error {rel:.1e}",
        rows.len()
    );
    if (1.5..=2.1).contains(&fitted) && rel <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn limit_latency_rule() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for &w in &FIT_WORK {
        for &p in &FIT_PROCS {
            let root = model::limit_latency(w as f64, p as f64, model::DEFAULT_C_PRIME, model::DEFAULT_ACCEPT_FACTOR)
                .map_err(|e| e.to_string())?;
            let search = LimitSearch {
                replications: 100,
                time_scale: (32.0 / root).ceil().max(1.0) as u64,
                ..Default::default()
            };
            let empirical = empirical_limit_latency(w, p, &search).unwrap();
            let slope = w as f64 / p as f64 / root;
            let rel = empirical.map(|e| (e - root).abs() / root);
            let good = rel.is_some_and(|r| r <= 0.25) && (400.0..=560.0).contains(&slope);
            ok &= good;
            lines.push(format!(
                "W={w:e} p={p}: root {root:.2}, empirical {}, W/p/root {slope:.0}{}",
                empirical.map_or("none".into(), |e| format!(
                    "{e:.2} ({:+.1}%)",
                    (e - root) / root * 100.0
                )),
                if good { "" } else { " <-- out of tolerance" }
            ));
        }
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn steal_count_nonlinearity() -> Outcome {
    let lambdas = [8u64, 32, 128, 500];
    let means: Vec<f64> = lambdas
        .iter()
        .map(|&l| {
            let runs = replicate(&SimConfig::new(1_000_000, 64, l), 0, 200).unwrap();
            mean_of(&runs, |r| r.requests_total as f64)
        })
        .collect();
    let increasing = means.windows(2).all(|w| w[1] > w[0]);
    let sublinear = means.windows(2).all(|w| w[1] < 4.0 * w[0]);
    let msg = format!(
        "mean requests at lambda {lambdas:?}: {:?}; increasing={increasing}, sub-linear={sublinear}",
        means.iter().map(|m| m.round()).collect::<Vec<_>>()
    );
    if increasing && sublinear {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn mwt_startup_effect() -> Outcome {
    let pairs_per_p = 500u64;
    let mut lines = Vec::new();
    let mut ok = true;
    for p in [8usize, 16, 32] {
        let pairs: Vec<(SimResult, SimResult)> = (0..pairs_per_p)
            .into_par_iter()
            .map(|seed| {
                let base = SimConfig::new(10_000_000, p, 250).with_seed(seed);
                let mwt = run_simulation(base.clone().with_policy(ResponsePolicy::Mwt)).unwrap().0;
                let swt = run_simulation(base.with_policy(ResponsePolicy::Swt)).unwrap().0;
                (mwt, swt)
            })
            .collect();
        let wins = pairs.iter().filter(|(m, s)| m.startup_end <= s.startup_end).count();
        let share = wins as f64 / pairs.len() as f64;
        let gap = pairs
            .iter()
            .map(|(m, s)| (m.makespan as f64 - s.makespan as f64).abs() / s.makespan as f64)
            .sum::<f64>()
            / pairs.len() as f64;
        let good = share >= 0.6 && gap < 0.02;
        ok &= good;
        lines.push(format!(
            "p={p}: MWT startup <= SWT in {:.1}%, mean makespan gap {:.2}%",
            share * 100.0,
            gap * 100.0
        ));
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 golden trace", golden_trace),
        ("2 threshold pathology", threshold_pathology),
        ("3 conservation and determinism", conservation_and_determinism),
        ("4 threshold safety bound", threshold_safety),
        ("5 model accuracy at lambda=262", model_accuracy),
        ("6 worst-case model error", worst_case_error),
        ("7 c' recovery", cprime_recovery),
        ("8 limit-latency rule", limit_latency_rule),
        ("9 steal-count nonlinearity", steal_count_nonlinearity),
        ("10 MWT startup effect", mwt_startup_effect),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
