//! Route late requests on top of an existing plan without moving it.

use tpossp::colgen::{insert_realtime, solve, CgParams};
use tpossp::generator::{generate, GeneratorConfig};
use tpossp::{validate_solution, Instance, RequestId};

fn main() -> tpossp::Result<()> {
    let cfg = GeneratorConfig {
        hubs: 20,
        schedules: 120,
        legs_per_schedule: 4,
        requests: 48,
        seed: 21,
        ..Default::default()
    };
    let all = generate(&cfg)?;
    let (old, new) = all.requests().split_at(40);
    let base_inst = Instance::new(all.hubs().to_vec(), all.schedules().to_vec(), all.legs().to_vec(), old.to_vec())?;

    let params = CgParams::default();
    let base = solve(&base_inst, &params)?;
    println!("base plan: {} requests, objective {}", old.len(), base.solution.objective());

    let new: Vec<_> =
        new.iter().enumerate().map(|(i, r)| tpossp::Request { id: RequestId(old.len() + i), ..r.clone() }).collect();
    let ins = insert_realtime(&base_inst, &base.solution, &new, &params)?;
    println!(
        "inserted {} requests: objective {}, marginal cost {}",
        new.len(),
        ins.solution.objective(),
        ins.marginal_cost
    );
    let kept = base.solution.paths.iter().zip(&ins.solution.paths).all(|(a, b)| a.legs == b.legs);
    println!("base paths unchanged: {kept}, valid: {}", validate_solution(&ins.instance, &ins.solution).is_empty());
    Ok(())
}
