use ionc::sweep::{run_sweep, SweepConfig};
use ionc::synth::SimParams;
use std::time::Instant;

fn main() {
    for (pd, po, sg) in [(0.75, 0.25, 3), (0.75, 0.25, 4), (0.5, 0.25, 3), (0.5, 0.25, 4), (0.1, 0.25, 2)] {
        let cfg = SweepConfig {
            params: SimParams { n_nodes: 8, p_degree: pd, p_overlap: po, s: sg, seed: 7, reps: 5 },
            timeout_s: 300.0,
            workers: 1,
        };
        let t = Instant::now();
        let rep = run_sweep(&cfg).unwrap();
        let counts: Vec<usize> = rep.reps.iter().map(|r| r.stats.map_or(0, |s| s.n_solutions)).collect();
        let explored: Vec<f64> = rep.reps.iter().map(|r| r.stats.map_or(0.0, |s| s.runtime_s)).collect();
        println!("pd={pd} po={po} s={sg}: wall={:.2}s sols={counts:?} virt_s={explored:?}", t.elapsed().as_secs_f64());
    }
}
