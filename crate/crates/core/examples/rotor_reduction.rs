//! Solves the planar rotor on a 2-D Cartesian grid and on the 1-D radial
//! grid of its rotation invariant, then compares the two.

use symdp::dp::{
    backward_induction_full, backward_induction_reduced, lifted_policy, simulate_rollout,
    SolveOptions,
};
use symdp::systems::{Rotor2D, RotorConfig, RotorFrame};

fn main() -> symdp::Result<()> {
    let system = Rotor2D::new(RotorConfig::default())?;
    let frame = RotorFrame::new();
    let options = SolveOptions::default();

    let full_grid = RotorConfig::full_grid(81, 2.0)?;
    let reduced_grid = RotorConfig::reduced_grid(81, 2.0)?;
    let full = backward_induction_full(&system, &full_grid, &options)?;
    let reduced = backward_induction_reduced(&system, &frame, &reduced_grid, &options)?;
    println!(
        "full grid {} nodes, reduced grid {} nodes",
        full_grid.len(),
        reduced_grid.len()
    );

    println!("{:>6} {:>12} {:>12}", "r", "J_0 full", "J_0 reduced");
    for r in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0] {
        let j_full = full.initial_value().interpolate(&[r, 0.0])?;
        let j_reduced = reduced.initial_value().interpolate(&[r])?;
        println!("{r:>6.2} {j_full:>12.6} {j_reduced:>12.6}");
    }

    let x0 = [0.0, 1.6];
    let rollout = simulate_rollout(&system, lifted_policy(&system, &frame, &reduced), &x0, 0)?;
    for (k, x) in rollout.states.iter().enumerate() {
        println!("k={k:<2} x=({:+.4}, {:+.4}) |x|={:.4}", x[0], x[1], x[0].hypot(x[1]));
    }
    println!("realized cost {:.6}", rollout.total_cost);
    Ok(())
}
