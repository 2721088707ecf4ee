use ionc::solver::{solve_each, SolverConfig};
use ionc::synth::{make_case, rng_for_rep, SimParams};
use std::time::Instant;

fn main() {
    let params = SimParams { n_nodes: 8, p_degree: 0.75, p_overlap: 0.25, s: 3, seed: 7, reps: 1 };
    for rep in [0u64, 2, 4] {
        let case = make_case(&params, &mut rng_for_rep(params.seed, rep)).unwrap();
        let cfg = SolverConfig { max_solutions: 0, timeout: None, explore_budget: Some(400_000_000), workers: 1 };
        let t = Instant::now();
        let mut count = 0u64;
        let s = solve_each(&case.instance, &cfg, |_| count += 1).unwrap();
        println!("rep={rep}: wall={:.2}s sols={count} explored={} ({:.1} nodes/sol)", t.elapsed().as_secs_f64(), s.explored, s.explored as f64 / count.max(1) as f64);
    }
}
