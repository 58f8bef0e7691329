//! The bounded revised simplex on a small LP, then a warm-started resolve.

use tpossp::simplex::{solve_lp, warm_start, LinearProgram, Sense};

fn main() {
    // max 3x + 2y  s.t.  x + y <= 4,  x + 3y <= 6,  0 <= x <= 3,  y >= 0
    let mut lp = LinearProgram::new();
    let x = lp.add_named_var("x", -3.0, 0.0, 3.0);
    let y = lp.add_named_var("y", -2.0, 0.0, f64::INFINITY);
    lp.add_named_row("total", vec![(x, 1.0), (y, 1.0)], Sense::Le, 4.0);
    lp.add_named_row("mix", vec![(x, 1.0), (y, 3.0)], Sense::Le, 6.0);
    print!("{}", lp.to_lp_format());

    let sol = solve_lp(&lp);
    println!("{:?} objective {} x {:?}", sol.status, sol.objective, sol.x);
    println!("row duals {:?}, dual objective {}", sol.duals, sol.dual_objective(&lp));

    lp.set_cost(y, -10.0);
    let again = warm_start(&lp, &sol.basis);
    println!("after cost change: objective {} x {:?} in {} pivots", again.objective, again.x, again.iterations);
}
