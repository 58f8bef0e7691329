//! Enumerate small instances exactly and compare with column generation.

use tpossp::colgen::{solve, CgParams};
use tpossp::generator::{generate, GeneratorConfig};
use tpossp::oracle::{enumerate_paths, solve_exact, DEFAULT_CAP};
use tpossp::{add_dummy_schedules, DummyConfig};

fn main() -> tpossp::Result<()> {
    let inst = tpossp::samples::micro3();
    for p in enumerate_paths(&inst, tpossp::RequestId(0), DEFAULT_CAP)? {
        println!("micro3 path {:?} mile cost {}", p.legs, p.mile_cost);
    }

    println!("seed  exact      column generation");
    for seed in 0..8 {
        let cfg = GeneratorConfig {
            hubs: 5,
            schedules: 10,
            legs_per_schedule: 3,
            min_legs_per_schedule: 2,
            requests: 6,
            horizon: 720,
            seed,
            ..Default::default()
        };
        let base = generate(&cfg)?;
        let exact = solve_exact(&add_dummy_schedules(&base, &DummyConfig::default()), DEFAULT_CAP)?;
        let cg = solve(&base, &CgParams::default())?;
        println!("{seed:>4}  {:>9}  {:>9}", exact.objective(), cg.solution.objective());
    }
    Ok(())
}
