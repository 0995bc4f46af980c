//! Two Dubins vehicles steering into a unit-distance formation under heading
//! noise. The DP runs over the relative pose only.

use symdp::dp::{backward_induction_reduced, lifted_policy, simulate_rollout, SolveOptions};
use symdp::symmetry::MovingFrame;
use symdp::systems::dubins::{formation_cost, FORMATION_X0};
use symdp::systems::{DubinsConfig, DubinsFrame, DubinsPair};
use symdp::lie::Se2;

fn main() -> symdp::Result<()> {
    let config = DubinsConfig {
        horizon: 12,
        nodes_per_dim: 3,
        ..DubinsConfig::default()
    };
    let system = DubinsPair::new(config)?;
    let frame = DubinsFrame::new();
    let grid = DubinsConfig::reduced_grid(15, 15, 12, 2.0)?;
    let options = SolveOptions {
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..SolveOptions::default()
    };
    let result = backward_induction_reduced(&system, &frame, &grid, &options)?;
    println!(
        "solved {} stages on {} reduced nodes, {} clamped lookups",
        result.horizon,
        grid.len(),
        result.total_clamped()
    );

    let rollout = simulate_rollout(&system, lifted_policy(&system, &frame, &result), &FORMATION_X0, 3)?;
    for (k, x) in rollout.states.iter().enumerate() {
        let relative = frame.rho(x)?;
        let cost = formation_cost(&Se2::new(relative[2], relative[0], relative[1]));
        println!(
            "k={k:<2} relative (z={:+.3}, y={:+.3}, θ={:.3}) formation cost {cost:.4}",
            relative[0], relative[1], relative[2]
        );
    }
    println!("realized cost {:.4}", rollout.total_cost);
    Ok(())
}
