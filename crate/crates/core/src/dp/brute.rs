use super::{quadrature_nodes, ControlSystem};
use crate::{Error, Point, Result};

/// Largest tree `brute_force_value` will enumerate.
pub const LEAF_LIMIT: u128 = 10_000_000;

/// Optimal expected cost from `x0` by exhaustive enumeration, with no grid.
///
/// The tree alternates a minimum over the input set with a weighted sum over
/// the quadrature nodes, so it realizes the feedback optimum of the same
/// recursion the grid solvers approximate. `max_depth` bounds the horizon
/// the caller is prepared to enumerate.
pub fn brute_force_value<S: ControlSystem>(system: &S, x0: &[f64], max_depth: usize) -> Result<f64> {
    let horizon = system.horizon();
    if horizon > max_depth {
        return Err(Error::TooDeep { horizon, max_depth });
    }
    if x0.len() != system.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.state_dim(),
            got: x0.len(),
        });
    }
    if horizon > 0 && system.inputs().is_empty() {
        return Err(Error::EmptyInputSet);
    }
    let quad = quadrature_nodes(system.noise())?;
    let branching = (system.inputs().len() * quad.len()) as u128;
    let mut leaves: u128 = 1;
    for _ in 0..horizon {
        leaves = leaves.saturating_mul(branching);
    }
    if leaves > LEAF_LIMIT {
        return Err(Error::TooManyLeaves {
            leaves,
            limit: LEAF_LIMIT,
        });
    }
    descend(system, &quad, 0, x0)
}

fn descend<S: ControlSystem>(
    system: &S,
    quad: &[(f64, Point)],
    k: usize,
    x: &[f64],
) -> Result<f64> {
    if k == system.horizon() {
        let g = system.terminal_cost(x);
        if !g.is_finite() {
            return Err(Error::NonFinite(format!("terminal cost {g} at x={x:?}")));
        }
        return Ok(g);
    }
    let mut best = f64::INFINITY;
    for u in system.inputs() {
        let mut acc = 0.0;
        for (weight, w) in quad {
            let y = system.step(k, x, u, w);
            let g = system.stage_cost(k, x, u, w);
            if !g.is_finite() || y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "k={k} x={x:?} u={u:?} w={w:?} gives f={y:?} g={g}"
                )));
            }
            acc += weight * (g + descend(system, quad, k + 1, &y)?);
        }
        best = best.min(acc);
    }
    Ok(best)
}
