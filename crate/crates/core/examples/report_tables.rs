//! Plot-ready summary and per-schedule tables as JSON and CSV.

use tpossp::colgen::{solve, CgParams};
use tpossp::generator::{generate, GeneratorConfig};
use tpossp::report::{build_report, to_csv, to_json};

fn main() -> tpossp::Result<()> {
    let cfg =
        GeneratorConfig { hubs: 6, schedules: 8, legs_per_schedule: 3, requests: 6, seed: 2, ..Default::default() };
    let out = solve(&generate(&cfg)?, &CgParams::default())?;
    let rep = build_report("seed-2", &out.instance, &out.solution, Some(&out.report), None)?;

    print!("{}", String::from_utf8_lossy(&to_csv(std::slice::from_ref(&rep.summary))?));
    println!();
    print!("{}", String::from_utf8_lossy(&to_csv(&rep.schedules)?));
    println!();
    let json = to_json(&rep.summary);
    print!("{}", String::from_utf8_lossy(&json));
    Ok(())
}
