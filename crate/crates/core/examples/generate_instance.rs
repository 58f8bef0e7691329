//! Generate a random instance, round-trip it through JSON and validate it.
//!
//! `cargo run --example generate_instance -- 42`

use tpossp::generator::{generate, GeneratorConfig};
use tpossp::{read_instance, validate_instance, write_instance};

fn main() -> tpossp::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg =
        GeneratorConfig { hubs: 12, schedules: 40, legs_per_schedule: 4, requests: 25, seed, ..Default::default() };
    let inst = generate(&cfg)?;

    let bytes = write_instance(&inst);
    let back = read_instance(&bytes)?;
    assert_eq!(write_instance(&back), bytes);

    println!(
        "seed {seed}: {} hubs, {} schedules, {} legs, {} requests, {} bytes of JSON",
        inst.hubs().len(),
        inst.schedules().len(),
        inst.legs().len(),
        inst.requests().len(),
        bytes.len()
    );
    println!("violations: {}", validate_instance(&inst).len());
    for r in inst.requests().iter().take(3) {
        println!(
            "  request {}: hub {} -> hub {}, window [{}, {}], volume {}",
            r.id.0, r.origin.0, r.dest.0, r.earliest, r.latest, r.volume
        );
    }
    Ok(())
}
