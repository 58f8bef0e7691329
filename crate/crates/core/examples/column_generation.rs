//! Solve a generated instance with the full pipeline and print the
//! column generation log.
//!
//! `cargo run --release --example column_generation -- 7`

use tpossp::colgen::{solve, CgParams};
use tpossp::generator::{generate, GeneratorConfig};
use tpossp::validate_solution;

fn main() -> tpossp::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let cfg =
        GeneratorConfig { hubs: 15, schedules: 60, legs_per_schedule: 4, requests: 30, seed, ..Default::default() };
    let inst = generate(&cfg)?;
    let out = solve(&inst, &CgParams::default())?;
    let rep = &out.report;

    println!("iter  lp objective   pivots  new cols  min reduced cost");
    for it in &rep.iterations {
        println!(
            "{:>4}  {:>12.1}  {:>7}  {:>8}  {:?}",
            it.iteration, it.lp_objective, it.lp_pivots, it.columns_added, it.min_reduced_cost
        );
    }
    println!("stop: {:?}, {} columns (+{} pooled)", rep.stop, rep.columns, rep.pooled_columns);
    println!(
        "integer objective {} vs LP bound {:.1}, gap {:.2}%",
        rep.integer_objective,
        rep.lp_bound,
        100.0 * rep.gap_vs_lp.unwrap_or(0.0)
    );
    let m = &out.solution.metrics;
    println!("{} requests on dummies, {} empty miles", m.dummy_count, m.empty_miles);
    assert!(validate_solution(&out.instance, &out.solution).is_empty());
    Ok(())
}
