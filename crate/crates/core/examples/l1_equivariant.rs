//! A planar linear system with an L1 cost solved on the unit circle only;
//! values at other radii follow from `J(αx) = α J(x)`.

use symdp::dp::{backward_induction_equivariant, SolveOptions};
use symdp::symmetry::{lift_equivariant_value, lift_policy_action};
use symdp::systems::{LinearConfig, LinearSystem};
use symdp::dp::ControlSystem;

fn main() -> symdp::Result<()> {
    let system = LinearSystem::l1(LinearConfig::l1_default())?;
    let frame = system.frame();
    let scaling = system.scaling();
    let grid = frame.reduced_grid(360)?;
    let result =
        backward_induction_equivariant(&system, &frame, &scaling, &grid, &SolveOptions::default())?;

    let direction = [0.6, -0.8];
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let x = [alpha * direction[0], alpha * direction[1]];
        let j = lift_equivariant_value(&frame, &scaling, result.initial_value(), &x)?;
        let u = lift_policy_action(&frame, result.policy(0)?, system.inputs(), &x)?;
        println!(
            "‖x‖={alpha:<4} J_0={j:.6} J_0/‖x‖={:.6} u=({:+.4}, {:+.4})",
            j / alpha,
            u[0],
            u[1]
        );
    }
    Ok(())
}
