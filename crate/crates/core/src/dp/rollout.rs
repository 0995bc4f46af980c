use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ControlSystem, SolveResult};
use crate::symmetry::{lift_policy_action, MovingFrame, TransformationGroup};
use crate::{Error, Point, Result};

/// One realized trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout<I> {
    /// `x_0..x_N`.
    pub states: Vec<Point>,
    /// `u_0..u_{N-1}`.
    pub inputs: Vec<I>,
    /// `w_0..w_{N-1}`.
    pub noises: Vec<Point>,
    /// `g_0..g_{N-1}` followed by `g_N(x_N)`.
    pub costs: Vec<f64>,
    pub total_cost: f64,
}

/// Simulates the closed loop `x_{k+1} = f_k(x_k, π(k, x_k), w_k)` with noise
/// drawn from the model's distribution by a ChaCha8 generator seeded with
/// `seed`.
pub fn simulate_rollout<S, P>(
    system: &S,
    mut policy: P,
    x0: &[f64],
    seed: u64,
) -> Result<Rollout<S::Input>>
where
    S: ControlSystem,
    P: FnMut(usize, &[f64]) -> Result<S::Input>,
{
    if x0.len() != system.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.state_dim(),
            got: x0.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = system.horizon();
    let mut x = Point::from_slice(x0);
    let mut out = Rollout {
        states: vec![x.clone()],
        inputs: Vec::with_capacity(horizon),
        noises: Vec::with_capacity(horizon),
        costs: Vec::with_capacity(horizon + 1),
        total_cost: 0.0,
    };
    for k in 0..horizon {
        let u = policy(k, &x).map_err(|e| e.at_stage(k))?;
        let w = system.noise().sample(&mut rng);
        let g = system.stage_cost(k, &x, &u, &w);
        x = system.step(k, &x, &u, &w);
        out.total_cost += g;
        out.costs.push(g);
        out.inputs.push(u);
        out.noises.push(w);
        out.states.push(x.clone());
    }
    let g = system.terminal_cost(&x);
    out.total_cost += g;
    out.costs.push(g);
    Ok(out)
}

/// Feedback policy reading the full-space table of stage `k` at the node
/// nearest to `x`.
pub fn table_policy<'a, S: ControlSystem>(
    system: &'a S,
    result: &'a SolveResult,
) -> impl FnMut(usize, &[f64]) -> Result<S::Input> + 'a {
    move |k, x| {
        let choice = result.policy(k)?.choice_at(x)?;
        input_at(system.inputs(), choice)
    }
}

/// Feedback policy lifted from a reduced table:
/// `x ↦ χ_{γ(x)}⁻¹(μ̄_k(ρ(x)))`.
pub fn lifted_policy<'a, S, F>(
    system: &'a S,
    frame: &'a F,
    result: &'a SolveResult,
) -> impl FnMut(usize, &[f64]) -> Result<S::Input> + 'a
where
    S: ControlSystem,
    F: MovingFrame,
    F::Group: TransformationGroup<Input = S::Input>,
{
    move |k, x| lift_policy_action(frame, result.policy(k)?, system.inputs(), x)
}

fn input_at<I: Clone>(inputs: &[I], choice: usize) -> Result<I> {
    inputs.get(choice).cloned().ok_or(Error::IndexOutOfRange {
        index: choice,
        len: inputs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::NoiseModel;

    struct Line {
        noise: NoiseModel,
        horizon: usize,
    }

    impl ControlSystem for Line {
        type Input = Point;
        fn state_dim(&self) -> usize {
            1
        }
        fn horizon(&self) -> usize {
            self.horizon
        }
        fn inputs(&self) -> &[Point] {
            &[]
        }
        fn noise(&self) -> &NoiseModel {
            &self.noise
        }
        fn step(&self, _k: usize, x: &[f64], u: &Point, w: &[f64]) -> Point {
            Point::from_slice(&[x[0] + u[0] + w[0]])
        }
        fn stage_cost(&self, _k: usize, _x: &[f64], _u: &Point, _w: &[f64]) -> f64 {
            0.0
        }
        fn terminal_cost(&self, x: &[f64]) -> f64 {
            x[0] * x[0]
        }
    }

    #[test]
    fn deterministic_single_step() {
        let sys = Line {
            noise: NoiseModel::Deterministic { dim: 1 },
            horizon: 1,
        };
        let r = simulate_rollout(&sys, |_, _| Ok(Point::from_slice(&[-1.0])), &[1.0], 0).unwrap();
        assert_eq!(r.states, vec![Point::from_slice(&[1.0]), Point::from_slice(&[0.0])]);
        assert_eq!(r.total_cost, 0.0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let sys = Line {
            noise: NoiseModel::IsotropicGaussian {
                dim: 1,
                sigma: 0.3,
                nodes_per_dim: 3,
            },
            horizon: 10,
        };
        let zero = |_: usize, _: &[f64]| Ok(Point::from_slice(&[0.0]));
        let a = simulate_rollout(&sys, zero, &[0.0], 42).unwrap();
        let b = simulate_rollout(&sys, zero, &[0.0], 42).unwrap();
        let c = simulate_rollout(&sys, zero, &[0.0], 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.states, c.states);
    }

    #[test]
    fn policy_errors_carry_the_stage() {
        let sys = Line {
            noise: NoiseModel::Deterministic { dim: 1 },
            horizon: 3,
        };
        let err = simulate_rollout(
            &sys,
            |k, _| {
                if k == 2 {
                    Err(Error::InvalidInput("off grid".into()))
                } else {
                    Ok(Point::from_slice(&[0.0]))
                }
            },
            &[0.0],
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Stage { stage: 2, .. }));
    }
}
