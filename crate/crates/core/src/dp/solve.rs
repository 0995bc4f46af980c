use std::time::Instant;

use rayon::prelude::*;

use super::{quadrature_nodes, ControlSystem, EquivariantScaling};
use crate::grid::{GridSpec, PolicyTable, ValueTable};
use crate::symmetry::{MovingFrame, TransformationGroup};
use crate::{Error, Point, Result};

/// Which tables a solve keeps in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Retain {
    /// `J_0..J_N` and `μ_0..μ_{N-1}`.
    #[default]
    All,
    /// Only `J_0` and `μ_0`; for grids too large to hold every stage.
    Initial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Worker threads used within a stage. Results do not depend on it.
    pub workers: usize,
    pub retain: Retain,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            workers: 1,
            retain: Retain::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageDiagnostics {
    pub stage: usize,
    /// Interpolation queries that fell outside the grid and were clamped.
    pub clamped: u64,
    /// Interpolation queries made for this stage.
    pub evaluations: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Value tables in stage order.
    pub values: Vec<ValueTable>,
    /// Policy tables in stage order.
    pub policies: Vec<PolicyTable>,
    /// One entry per computed stage, terminal stage first.
    pub diagnostics: Vec<StageDiagnostics>,
    pub horizon: usize,
}

impl SolveResult {
    pub fn value(&self, stage: usize) -> Result<&ValueTable> {
        self.values
            .iter()
            .find(|t| t.stage == stage)
            .ok_or_else(|| Error::InvalidInput(format!("value table for stage {stage} not kept")))
    }

    pub fn policy(&self, stage: usize) -> Result<&PolicyTable> {
        self.policies
            .iter()
            .find(|t| t.stage == stage)
            .ok_or_else(|| {
                Error::InvalidInput(format!("policy table for stage {stage} not kept"))
            })
    }

    pub fn initial_value(&self) -> &ValueTable {
        &self.values[0]
    }

    pub fn total_clamped(&self) -> u64 {
        self.diagnostics.iter().map(|d| d.clamped).sum()
    }
}

fn describe(k: usize, x: &[f64], u: &impl std::fmt::Debug, w: &[f64]) -> String {
    format!("k={k} x={x:?} u={u:?} w={w:?}")
}

/// One Q-value `Σ weight · [g + J_{k+1}(map(f)) / divisor]`. `map` sends a
/// next state to the table's coordinates and the divisor applied to the
/// interpolated value.
fn q_value<S, M>(
    system: &S,
    k: usize,
    z: &[f64],
    u: &S::Input,
    quad: &[(f64, Point)],
    next: &ValueTable,
    map: &M,
    clamped: &mut u64,
) -> Result<f64>
where
    S: ControlSystem,
    M: Fn(&[f64]) -> Result<(Point, f64)>,
{
    let mut acc = 0.0;
    for (weight, w) in quad {
        let y = system.step(k, z, u, w);
        let g = system.stage_cost(k, z, u, w);
        if !g.is_finite() || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "{} gives f={y:?} g={g}",
                describe(k, z, u, w)
            )));
        }
        let (coords, divisor) = map(&y)?;
        let (v, c) = next.interpolate_tracked(&coords)?;
        *clamped += c as u64;
        acc += weight * (g + v / divisor);
    }
    Ok(acc)
}

/// `E_w[g_k(x, u, w) + J_{k+1}(f_k(x, u, w))]` for the input with index
/// `u_index`, with the expectation taken by quadrature and `J_{k+1}`
/// interpolated from `next`.
pub fn expected_q<S: ControlSystem>(
    system: &S,
    k: usize,
    x: &[f64],
    u_index: usize,
    next: &ValueTable,
) -> Result<f64> {
    let inputs = system.inputs();
    let u = inputs.get(u_index).ok_or(Error::IndexOutOfRange {
        index: u_index,
        len: inputs.len(),
    })?;
    let quad = quadrature_nodes(system.noise())?;
    let mut clamped = 0;
    q_value(
        system,
        k,
        x,
        u,
        &quad,
        next,
        &|y: &[f64]| Ok((Point::from_slice(y), 1.0)),
        &mut clamped,
    )
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Shared backward recursion. `node_state` maps grid coordinates to the
/// state at which costs and dynamics are evaluated.
fn backward<S, N, M>(
    system: &S,
    grid: &GridSpec,
    options: &SolveOptions,
    node_state: N,
    map: M,
) -> Result<SolveResult>
where
    S: ControlSystem,
    N: Fn(&[f64]) -> Result<Point> + Sync,
    M: Fn(&[f64]) -> Result<(Point, f64)> + Sync,
{
    let inputs = system.inputs();
    let horizon = system.horizon();
    if inputs.is_empty() && horizon > 0 {
        return Err(Error::EmptyInputSet);
    }
    if inputs.len() > u32::MAX as usize {
        return Err(Error::InvalidInput(format!(
            "{} inputs exceed the policy index range",
            inputs.len()
        )));
    }
    let quad = quadrature_nodes(system.noise())?;
    let pool = pool(options.workers)?;
    let len = grid.len();

    let start = Instant::now();
    let mut terminal = vec![0.0; len];
    pool.install(|| {
        terminal
            .par_iter_mut()
            .enumerate()
            .try_for_each(|(i, slot)| -> Result<()> {
                let coords = grid.node_unchecked(i);
                let z = node_state(&coords).map_err(|e| e.at_node(i, &coords))?;
                let g = system.terminal_cost(&z);
                if !g.is_finite() {
                    return Err(Error::NonFinite(format!("terminal cost {g} at x={z:?}"))
                        .at_node(i, &coords));
                }
                *slot = g;
                Ok(())
            })
    })
    .map_err(|e| e.at_stage(horizon))?;
    let mut diagnostics = vec![StageDiagnostics {
        stage: horizon,
        clamped: 0,
        evaluations: 0,
        seconds: start.elapsed().as_secs_f64(),
    }];

    let mut next = ValueTable {
        grid: grid.clone(),
        stage: horizon,
        values: terminal,
    };
    let keep_all = options.retain == Retain::All;
    let mut kept_values = Vec::new();
    let mut policies = Vec::new();
    let per_node = (inputs.len() * quad.len()) as u64;

    for k in (0..horizon).rev() {
        let start = Instant::now();
        let mut values = vec![0.0; len];
        let mut choices = vec![0u32; len];
        let clamped = pool
            .install(|| {
                values
                    .par_iter_mut()
                    .zip(choices.par_iter_mut())
                    .enumerate()
                    .map(|(i, (v, c))| -> Result<u64> {
                        let coords = grid.node_unchecked(i);
                        let z = node_state(&coords).map_err(|e| e.at_node(i, &coords))?;
                        let mut best = f64::INFINITY;
                        let mut arg = 0usize;
                        let mut clamped = 0u64;
                        for (j, u) in inputs.iter().enumerate() {
                            let q = q_value(system, k, &z, u, &quad, &next, &map, &mut clamped)
                                .map_err(|e| e.at_node(i, &coords))?;
                            if !q.is_finite() {
                                return Err(Error::NonFinite(format!(
                                    "Q-value {q} for input {j} at x={z:?}"
                                ))
                                .at_node(i, &coords));
                            }
                            // strict: ties keep the lowest index
                            if q < best {
                                best = q;
                                arg = j;
                            }
                        }
                        *v = best;
                        *c = arg as u32;
                        Ok(clamped)
                    })
                    .try_reduce(|| 0, |a, b| Ok(a + b))
            })
            .map_err(|e| e.at_stage(k))?;
        diagnostics.push(StageDiagnostics {
            stage: k,
            clamped,
            evaluations: per_node * len as u64,
            seconds: start.elapsed().as_secs_f64(),
        });
        let current = ValueTable {
            grid: grid.clone(),
            stage: k,
            values,
        };
        let previous = std::mem::replace(&mut next, current);
        if keep_all {
            kept_values.push(previous);
        }
        if keep_all || k == 0 {
            policies.push(PolicyTable {
                grid: grid.clone(),
                stage: k,
                choices,
            });
        }
    }
    kept_values.push(next);
    kept_values.reverse();
    policies.reverse();
    Ok(SolveResult {
        values: kept_values,
        policies,
        diagnostics,
        horizon,
    })
}

/// Dynamic programming on a grid over the full state space.
pub fn backward_induction_full<S: ControlSystem>(
    system: &S,
    grid: &GridSpec,
    options: &SolveOptions,
) -> Result<SolveResult> {
    if grid.dim() != system.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.state_dim(),
            got: grid.dim(),
        });
    }
    backward(
        system,
        grid,
        options,
        |c: &[f64]| Ok(Point::from_slice(c)),
        |y: &[f64]| Ok((Point::from_slice(y), 1.0)),
    )
}

fn check_reduced<S, F>(system: &S, frame: &F, grid: &GridSpec) -> Result<()>
where
    S: ControlSystem,
    F: MovingFrame,
{
    if system.state_dim() != frame.group().state_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.state_dim(),
            got: frame.group().state_dim(),
        });
    }
    if grid.dim() != frame.reduced_dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.reduced_dim(),
            got: grid.dim(),
        });
    }
    Ok(())
}

/// Dynamic programming on invariant coordinates `x̄ = ρ(x)`. Costs and
/// dynamics are evaluated at the cross-section point `ρ̄⁻¹(x̄)` of each node
/// and successors are mapped back through `ρ`.
pub fn backward_induction_reduced<S, F>(
    system: &S,
    frame: &F,
    grid: &GridSpec,
    options: &SolveOptions,
) -> Result<SolveResult>
where
    S: ControlSystem,
    F: MovingFrame,
    F::Group: TransformationGroup<Input = S::Input>,
{
    check_reduced(system, frame, grid)?;
    backward(
        system,
        grid,
        options,
        |c: &[f64]| frame.rho_bar_inv(c),
        |y: &[f64]| Ok((frame.rho(y)?, 1.0)),
    )
}

/// Reduced recursion for costs equivariant under a scaling symmetry:
/// `J̄_k(x̄) = min_u [g(z, u) + J̄_{k+1}(ρ(f)) / l(γ(f))]` with `z = ρ̄⁻¹(x̄)`.
/// Only deterministic models are supported.
pub fn backward_induction_equivariant<S, F>(
    system: &S,
    frame: &F,
    scaling: &EquivariantScaling,
    grid: &GridSpec,
    options: &SolveOptions,
) -> Result<SolveResult>
where
    S: ControlSystem,
    F: MovingFrame,
    F::Group: TransformationGroup<Input = S::Input>,
{
    if !system.noise().is_deterministic() {
        return Err(Error::Noise(
            "the equivariant solver requires a deterministic noise model".into(),
        ));
    }
    check_reduced(system, frame, grid)?;
    backward(
        system,
        grid,
        options,
        |c: &[f64]| frame.rho_bar_inv(c),
        |y: &[f64]| {
            let g = frame.gamma(y)?;
            Ok((frame.rho(y)?, scaling.factor(&g)))
        },
    )
}
