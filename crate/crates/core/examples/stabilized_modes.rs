//! Plain against stabilised column generation on the same instances.

use tpossp::colgen::{solve, CgParams, Mode};
use tpossp::generator::{generate, GeneratorConfig};

fn main() -> tpossp::Result<()> {
    println!("seed  mode         iters  columns  lp bound      objective");
    for seed in 1..=4 {
        let cfg =
            GeneratorConfig { hubs: 12, schedules: 50, legs_per_schedule: 4, requests: 25, seed, ..Default::default() };
        let inst = generate(&cfg)?;
        for mode in [Mode::Standard, Mode::Stabilized] {
            let out = solve(&inst, &CgParams { mode, ..Default::default() })?;
            let r = &out.report;
            let weights: Vec<u32> = r.iterations.iter().map(|i| i.weight).collect();
            println!(
                "{seed:>4}  {:<11}  {:>5}  {:>7}  {:>12.1}  {:>9}   weights {:?}",
                format!("{mode:?}"),
                r.iterations.len(),
                r.columns,
                r.lp_bound,
                r.integer_objective,
                weights
            );
        }
    }
    Ok(())
}
