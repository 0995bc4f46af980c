use super::{MovingFrame, TransformationGroup};
use crate::dp::EquivariantScaling;
use crate::grid::{PolicyTable, ValueTable};
use crate::{Error, Result};

/// `J_k(x) = J̄_k(ρ(x))` for a reduced table over invariant coordinates.
pub fn lift_value<F: MovingFrame>(frame: &F, reduced: &ValueTable, x: &[f64]) -> Result<f64> {
    let r = frame.rho(x)?;
    reduced.interpolate(&r)
}

/// Full-space action `χ_{γ(x)}⁻¹(ū)` where `ū` is the reduced policy's choice
/// at the node nearest to `ρ(x)`.
pub fn lift_policy_action<F: MovingFrame>(
    frame: &F,
    reduced: &PolicyTable,
    inputs: &[<F::Group as TransformationGroup>::Input],
    x: &[f64],
) -> Result<<F::Group as TransformationGroup>::Input> {
    let group = frame.group();
    let g = frame.gamma(x)?;
    let r = frame.rho(x)?;
    let choice = reduced.choice_at(&r)?;
    let reduced_input = inputs.get(choice).ok_or_else(|| {
        Error::Format(format!(
            "policy choice {choice} outside an input set of {}",
            inputs.len()
        ))
    })?;
    Ok(group.act_input(&group.inverse(&g), reduced_input))
}

/// Value lifting for equivariant costs: `J(x) = J̄(ρ(x)) / l(γ(x))`.
pub fn lift_equivariant_value<F: MovingFrame>(
    frame: &F,
    scaling: &EquivariantScaling,
    reduced: &ValueTable,
    x: &[f64],
) -> Result<f64> {
    let g = frame.gamma(x)?;
    let r = frame.rho(x)?;
    Ok(reduced.interpolate(&r)? / scaling.factor(&g))
}
