//! Single versus multiple concurrent work transfers: same seeds, both
//! response policies. Allowing several transfers per victim ends the startup
//! phase sooner while leaving the makespan almost unchanged.

use ws_latency::workstealing::{run_simulation, ResponsePolicy, SimConfig};

fn main() {
    let pairs = 500;
    println!("W=1e7 lambda=250, {pairs} seeds per row");
    for p in [8usize, 16, 32, 64] {
        let mut wins = 0;
        let (mut su_m, mut su_s, mut mk_m, mut mk_s) = (0.0, 0.0, 0.0, 0.0);
        for seed in 0..pairs {
            let base = SimConfig::new(10_000_000, p, 250).with_seed(seed);
            let m = run_simulation(base.clone().with_policy(ResponsePolicy::Mwt)).unwrap().0;
            let s = run_simulation(base.with_policy(ResponsePolicy::Swt)).unwrap().0;
            wins += (m.startup_end <= s.startup_end) as u32;
            su_m += m.startup_end as f64;
            su_s += s.startup_end as f64;
            mk_m += m.makespan as f64;
            mk_s += s.makespan as f64;
        }
        let n = pairs as f64;
        println!(
            "p={p:<3} startup mwt {:>7.0} swt {:>7.0} (mwt earlier or equal in {:.0}%)  makespan mwt {:>8.0} swt {:>8.0}",
            su_m / n,
            su_s / n,
            100.0 * wins as f64 / n,
            mk_m / n,
            mk_s / n
        );
    }
}
