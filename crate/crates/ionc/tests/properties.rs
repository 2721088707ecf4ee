//! Cross-module property suites tying the solver's output to independence
//! semantics: separation relations preserved across the solution set,
//! oracle equivalence on random instances, and ground-truth membership.

use ionc::oracle::{brute_force_solve, OracleLimit};
use ionc::projection::latent_project_detail;
use ionc::solver::{solve, SolverConfig};
use ionc::synth::{make_case, rng_for_rep, GeneratedCase, SimParams};
use ionc::{Dag, Instance, SolveStatus, VarSet};

fn no_limits() -> SolverConfig {
    SolverConfig {
        max_solutions: 0,
        timeout: None,
        explore_budget: None,
        workers: 1,
    }
}

fn cases(seed: u64, reps: u64, n: usize, p_degree: f64, p_overlap: f64, s: usize) -> Vec<GeneratedCase> {
    let params = SimParams {
        n_nodes: n,
        p_degree,
        p_overlap,
        s,
        seed,
        reps,
    };
    (0..reps)
        .map(|rep| make_case(&params, &mut rng_for_rep(seed, rep)).unwrap())
        .collect()
}

/// Conditioning sets over `vars \ {x, y}`, every subset.
fn conditioning_sets(vars: VarSet, x: usize, y: usize) -> Vec<VarSet> {
    let others: Vec<usize> = vars.iter().filter(|&v| v != x && v != y).collect();
    (0..(1u64 << others.len()))
        .map(|mask| {
            VarSet::from_iter(
                others
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &v)| v),
            )
        })
        .collect()
}

/// Every pair-label structure drops information when a directed relation and
/// a latent common cause coexist on the same pair (the directed label wins).
/// Instances free of such pairs project exactly, for the ground truth and
/// for a candidate alike.
fn projections_exact(inst: &Instance, g: &Dag) -> bool {
    inst.inputs().iter().all(|input| {
        latent_project_detail(g, input.vars())
            .unwrap()
            .shielded_confounders
            .is_empty()
    })
}

/// Marginal (in)dependence between observed pairs is pinned by the inputs:
/// every solution agrees with the ground truth on d-separation given the
/// empty set, for every co-measured pair.
#[test]
fn marginal_separation_is_preserved_across_the_solution_set() {
    let mut checked = 0usize;
    for (seed, pd) in [(101u64, 0.2), (102, 0.4), (103, 0.6)] {
        for case in cases(seed, 8, 5, pd, 0.5, 2) {
            let out = solve(&case.instance, &no_limits()).unwrap();
            assert_eq!(out.status, SolveStatus::Complete);
            for input in case.instance.inputs() {
                let vars: Vec<usize> = input.vars().iter().collect();
                for i in 0..vars.len() {
                    for j in (i + 1)..vars.len() {
                        let truth = case
                            .ground_truth
                            .d_separated(vars[i], vars[j], VarSet::empty())
                            .unwrap();
                        for h in &out.solutions {
                            assert_eq!(
                                h.d_separated(vars[i], vars[j], VarSet::empty()).unwrap(),
                                truth,
                                "pair ({}, {}) in {:?} vs {:?}",
                                vars[i],
                                vars[j],
                                case.ground_truth,
                                h
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 1000, "suite exercised only {checked} queries");
}

/// On instances whose projections are exact (no shielded confounders, for
/// the ground truth and for the candidate), every solution preserves every
/// d-separation and d-connection relation of the ground truth within each
/// input's variable set, for every conditioning set.
#[test]
fn conditional_separation_is_preserved_when_projections_are_exact() {
    let mut exact_cases = 0usize;
    let mut checked = 0usize;
    for (seed, pd) in [(110u64, 0.1), (111, 0.15), (112, 0.3), (113, 0.45)] {
        for case in cases(seed, 12, 5, pd, 0.5, 2) {
            if !projections_exact(&case.instance, &case.ground_truth) {
                continue;
            }
            exact_cases += 1;
            let out = solve(&case.instance, &no_limits()).unwrap();
            for h in &out.solutions {
                if !projections_exact(&case.instance, h) {
                    continue;
                }
                for input in case.instance.inputs() {
                    let vars: Vec<usize> = input.vars().iter().collect();
                    for i in 0..vars.len() {
                        for j in (i + 1)..vars.len() {
                            for z in conditioning_sets(input.vars(), vars[i], vars[j]) {
                                let truth = case
                                    .ground_truth
                                    .d_separated(vars[i], vars[j], z)
                                    .unwrap();
                                assert_eq!(
                                    h.d_separated(vars[i], vars[j], z).unwrap(),
                                    truth,
                                    "pair ({}, {}) given {z:?}",
                                    vars[i],
                                    vars[j]
                                );
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(exact_cases >= 5, "only {exact_cases} exactly-projectable cases");
    assert!(checked > 2000, "suite exercised only {checked} queries");
}

/// Boundary of the pair-label language: when a directed edge and a latent
/// common cause coexist, the label keeps only the directed relation, so two
/// valid solutions can disagree on a separation query that conditions on the
/// confounded collider. Both graphs below project identically onto both
/// inputs, yet they disagree on A ⊥ Y | X.
#[test]
fn conditional_separation_can_differ_on_collapsed_confounders() {
    // Universe: A=0, X=1, Y=2, L=3.
    let confounded = Dag::new(4, &[(0, 1), (3, 1), (3, 2), (1, 2)]).unwrap();
    let chain = Dag::new(4, &[(0, 1), (1, 2)]).unwrap();

    let observed = VarSet::from_iter([0, 1, 2]);
    let side = VarSet::from_iter([0, 3]);
    let inputs = vec![
        ionc::latent_project(&confounded, observed).unwrap(),
        ionc::latent_project(&confounded, side).unwrap(),
    ];
    let universe = ionc::Universe::new(vec!["A", "X", "Y", "L"]).unwrap();
    let inst = Instance::new(universe, inputs).unwrap();

    let out = solve(&inst, &no_limits()).unwrap();
    assert!(out.contains(&confounded));
    assert!(out.contains(&chain));

    let z = VarSet::from_iter([1]);
    assert!(!confounded.d_separated(0, 2, z).unwrap());
    assert!(chain.d_separated(0, 2, z).unwrap());
    // The collapse is visible in the projection detail.
    assert_eq!(
        latent_project_detail(&confounded, observed)
            .unwrap()
            .shielded_confounders,
        vec![(1, 2)]
    );
}

/// Random-instance differential against the exhaustive oracle (completeness
/// at desk scale), beyond the acceptance sweep's parameter grid.
#[test]
fn solver_matches_oracle_on_random_instances() {
    let limit = OracleLimit::default();
    for (seed, n, pd, po, s) in [
        (121u64, 4usize, 0.5f64, 0.25f64, 2usize),
        (122, 5, 0.3, 0.5, 3),
        (123, 5, 0.7, 0.75, 2),
        (124, 3, 0.5, 0.5, 2),
    ] {
        for case in cases(seed, 10, n, pd, po, s) {
            let fast = solve(&case.instance, &no_limits()).unwrap();
            let slow = brute_force_solve(&case.instance, &limit).unwrap();
            assert_eq!(fast.solutions, slow.solutions);
            assert_eq!(fast.status, slow.status);
            assert!(fast.contains(&case.ground_truth));
        }
    }
}

/// Capped and budgeted runs still return only valid solutions.
#[test]
fn partial_results_remain_valid() {
    for case in cases(131, 5, 6, 0.5, 0.25, 2) {
        for cfg in [
            SolverConfig {
                max_solutions: 3,
                ..no_limits()
            },
            SolverConfig {
                explore_budget: Some(500),
                ..no_limits()
            },
        ] {
            let out = solve(&case.instance, &cfg).unwrap();
            for h in &out.solutions {
                assert!(ionc::check_candidate(&case.instance, h).unwrap());
            }
        }
    }
}
