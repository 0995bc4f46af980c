//! Designs a flip-angle sequence that makes the transverse magnetization
//! sensitive to the relaxation parameter, and compares it with random
//! sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdp::dp::{
    backward_induction_reduced, lifted_policy, simulate_rollout, ControlSystem, SolveOptions,
};
use symdp::systems::mri::EQUILIBRIUM;
use symdp::systems::{MriConfig, MriFrame, MriSystem};

fn main() -> symdp::Result<()> {
    let config = MriConfig {
        horizon: 10,
        alpha_count: 8,
        beta_count: 5,
        ..MriConfig::default()
    };
    let system = MriSystem::new(config)?;
    let frame = MriFrame::new();
    let grid = MriConfig::reduced_grid([4, 6, 7, 7, 7], 4.0)?;
    let result = backward_induction_reduced(&system, &frame, &grid, &SolveOptions::default())?;

    let rollout = simulate_rollout(&system, lifted_policy(&system, &frame, &result), &EQUILIBRIUM, 0)?;
    let designed = system.fisher_information(&rollout.states);
    for (k, x) in rollout.states.iter().enumerate() {
        println!(
            "k={k:<2} m=({:+.3}, {:+.3}, {:+.3}) s=({:+.3}, {:+.3}, {:+.3})",
            x[0], x[1], x[2], x[3], x[4], x[5]
        );
    }

    let inputs = system.inputs();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..100 {
        let seq: Vec<usize> = (0..system.horizon())
            .map(|_| rng.random_range(0..inputs.len()))
            .collect();
        let r = simulate_rollout(&system, |k, _| Ok(inputs[seq[k]].clone()), &EQUILIBRIUM, 0)?;
        best = best.max(system.fisher_information(&r.states));
    }
    println!("fisher information: designed {designed:.3}, best random {best:.3}");
    Ok(())
}
