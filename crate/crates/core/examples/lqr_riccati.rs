//! Grid DP on a scalar LQR problem next to the closed-form Riccati solution.

use symdp::dp::{backward_induction_full, ControlSystem, SolveOptions};
use symdp::grid::{Axis, GridSpec};
use symdp::systems::{LinearConfig, LinearSystem};

fn main() -> symdp::Result<()> {
    let config = LinearConfig::lqr_default();
    let system = LinearSystem::lqr(config.clone())?;
    let grid = GridSpec::new(vec![Axis::new(-2.0, 2.0, 401)?])?;
    let result = backward_induction_full(&system, &grid, &SolveOptions::default())?;

    let (a, b, q, r) = (config.a[0], config.b[0], config.q[0], config.r[0]);
    let mut p = q;
    let mut gains = Vec::new();
    for _ in 0..config.horizon {
        gains.push(a * b * p / (r + b * b * p));
        p = q + a * a * p - (a * b * p).powi(2) / (r + b * b * p);
    }
    let gain = gains.last().copied().unwrap_or(0.0);
    println!("P0 = {p:.6}, first-stage gain {gain:.6}");

    println!("{:>6} {:>10} {:>10} {:>8} {:>8}", "x", "J_0", "P0 x²", "u*", "-Kx");
    for x in [-1.0, -0.5, 0.25, 0.5, 1.0] {
        let j = result.initial_value().interpolate(&[x])?;
        let u = system.inputs()[result.policy(0)?.choice_at(&[x])?][0];
        println!("{x:>6.2} {j:>10.6} {:>10.6} {u:>8.3} {:>8.3}", p * x * x, -gain * x);
    }
    Ok(())
}
