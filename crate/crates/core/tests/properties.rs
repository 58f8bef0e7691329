//! Invariants over random small instances, checked against the brute-force
//! oracle.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpossp::bounds::{eval_lr, LagrangeMultipliers};
use tpossp::colgen::{solve, CgParams, Mode};
use tpossp::generator::{generate, GeneratorConfig};
use tpossp::oracle::{enumerate_paths, solve_exact, DEFAULT_CAP};
use tpossp::reduction::{optimal_subnetwork, reduce_all};
use tpossp::report::build_report;
use tpossp::{
    add_dummy_schedules, compute_metrics, read_instance, read_solution, validate_instance, validate_solution,
    write_instance, write_solution, DummyConfig, RequestId,
};

fn with_dummies(seed: u64) -> tpossp::Instance {
    add_dummy_schedules(&common::tiny_instance(seed), &DummyConfig::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lagrangian_value_never_exceeds_optimum(seed in 0u64..10_000, kseed in any::<u64>()) {
        let inst = with_dummies(seed);
        let subs = reduce_all(&inst);
        let opt = solve_exact(&inst, DEFAULT_CAP).unwrap().objective();
        let mut rng = ChaCha8Rng::seed_from_u64(kseed);
        let mut kappa = LagrangeMultipliers::zeros(&inst, &subs);
        for k in &mut kappa.kappa_c {
            *k = rng.gen_range(0..5_000);
        }
        for ks in &mut kappa.kappa_s {
            for k in ks.iter_mut() {
                *k = rng.gen_range(0..200_000);
            }
        }
        let lr = eval_lr(&inst, &subs, &kappa).unwrap();
        prop_assert!(lr.bound <= opt, "bound {} optimum {}", lr.bound, opt);
    }

    #[test]
    fn column_generation_brackets_the_optimum(seed in 0u64..10_000, stabilized in any::<bool>()) {
        let base = common::tiny_instance(seed);
        let mode = if stabilized { Mode::Stabilized } else { Mode::Standard };
        let out = solve(&base, &CgParams { mode, ..Default::default() }).unwrap();
        let opt = solve_exact(&out.instance, DEFAULT_CAP).unwrap().objective();
        prop_assert!(validate_solution(&out.instance, &out.solution).is_empty());
        prop_assert!(out.solution.objective() >= opt);
        if out.report.converged {
            prop_assert!(out.report.lp_bound <= opt as f64 + 1e-6 * opt as f64);
        }
    }

    #[test]
    fn reduction_keeps_exactly_the_legs_of_feasible_paths(seed in 0u64..10_000) {
        let inst = with_dummies(seed);
        for r in inst.requests() {
            let sub = optimal_subnetwork(&inst, r.id);
            let mut used: Vec<_> = enumerate_paths(&inst, r.id, DEFAULT_CAP).unwrap()
                .into_iter().flat_map(|p| p.legs).collect();
            used.sort_unstable();
            used.dedup();
            prop_assert_eq!(&sub.legs, &used);
        }
    }

    #[test]
    fn widening_windows_only_adds_legs(seed in 0u64..10_000, widen in 1i64..200) {
        let cfg = common::tiny_config(seed);
        let narrow = generate(&cfg).unwrap();
        let wide = generate(&GeneratorConfig { window_widen: widen, ..cfg }).unwrap();
        for (a, b) in reduce_all(&narrow).iter().zip(reduce_all(&wide).iter()) {
            prop_assert!(a.legs.iter().all(|l| b.contains(*l)));
        }
    }

    #[test]
    fn schedule_rows_add_up_to_the_metrics(seed in 0u64..10_000) {
        let out = solve(&common::tiny_instance(seed), &CgParams::default()).unwrap();
        let m = compute_metrics(&out.instance, &out.solution).unwrap();
        prop_assert_eq!(m.objective, m.schedule_cost + m.mile_cost);
        let rep = build_report("p", &out.instance, &out.solution, Some(&out.report), None).unwrap();
        prop_assert_eq!(rep.schedules.iter().map(|r| r.fixed_cost + r.mile_cost).sum::<i64>(), m.objective);
        prop_assert_eq!(rep.schedules.iter().map(|r| r.empty_miles).sum::<i64>(), m.empty_miles);
        prop_assert_eq!(rep.summary.dummy_count, m.dummy_count);
    }

    #[test]
    fn json_round_trip_is_lossless(seed in 0u64..10_000) {
        let out = solve(&common::tiny_instance(seed), &CgParams::default()).unwrap();
        let bytes = write_instance(&out.instance);
        let inst = read_instance(&bytes).unwrap();
        prop_assert_eq!(write_instance(&inst), bytes);
        prop_assert!(validate_instance(&inst).is_empty());
        let sol = read_solution(&write_solution(&out.solution), &inst).unwrap();
        prop_assert_eq!(sol, out.solution);
    }
}

#[test]
fn dummy_path_always_exists() {
    let inst = with_dummies(3);
    for r in 0..inst.requests().len() {
        let paths = enumerate_paths(&inst, RequestId(r), DEFAULT_CAP).unwrap();
        assert!(!paths.is_empty());
    }
}
