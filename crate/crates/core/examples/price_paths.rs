//! Price one request: cheapest paths under dual-adjusted leg costs.

use tpossp::pricing::{price_request, DualPrices, PricingOptions, PricingResult};
use tpossp::reduction::optimal_subnetwork;
use tpossp::samples::micro3;
use tpossp::{LegId, RequestId};

fn main() -> tpossp::Result<()> {
    let inst = micro3();
    let sub = optimal_subnetwork(&inst, RequestId(0));

    // The convexity dual is what the request is willing to pay.
    let mut duals = DualPrices::zeros(&inst);
    duals.pi_r[0] = 200_000.0;

    let all = PricingOptions { paths_limit: 5, max_cost_slack: None, critical_only: false, ..Default::default() };
    show("full search", &price_request(&inst, &sub, &duals, &all)?);

    let critical = PricingOptions { paths_limit: 5, ..Default::default() };
    show("critical legs only", &price_request(&inst, &sub, &duals, &critical)?);

    // A congested first leg makes the direct route cheaper.
    duals.pi_c[LegId(0).0] = -5_000.0;
    let res = price_request(&inst, &sub, &duals, &critical)?;
    show("leg 0 congested", &res);
    for (leg, z) in &res.zeta {
        println!("  cheapest completion through leg {}: {z:?}", leg.0);
    }
    Ok(())
}

fn show(label: &str, res: &PricingResult) {
    println!("{label}: best reduced cost {:?}", res.best_reduced_cost);
    for p in &res.paths {
        let legs: Vec<usize> = p.legs.iter().map(|l| l.0).collect();
        println!("  legs {legs:?} mile cost {} reduced cost {}", p.path.mile_cost, p.reduced_cost);
    }
}
