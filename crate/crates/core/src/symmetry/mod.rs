//! Transformation groups acting on `(state, input, noise)`, moving frames,
//! numeric invariance checks and lifting of reduced solutions.
//!
//! A transformation group supplies the triple `(φ_α, χ_α, ψ_α)` and the group
//! law on its parameters. A moving frame picks, for each state `x`, the group
//! element `γ(x)` that carries `x` onto a cross-section `C`; the invariants
//! `ρ(x) = φ^b_{γ(x)}(x)` are then constant along orbits and serve as reduced
//! coordinates for dynamic programming.

mod check;
mod lift;
pub mod scaling;

pub use check::{
    check_group_axioms, check_system_equivariance, check_system_invariance, verify_moving_frame, InvarianceReport, Residual,
    SampleRng, Sampler,
};
pub use lift::{lift_equivariant_value, lift_policy_action, lift_value};

use crate::dp::ControlInput;
use crate::{Point, Result};

/// Parameters of a group element. Interpretation is group specific: one
/// angle for SO(2), `(θ, z, y)` for SE(2), a positive scale for dilations.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement(pub Point);

impl GroupElement {
    pub fn new(params: &[f64]) -> Self {
        GroupElement(Point::from_slice(params))
    }

    pub fn params(&self) -> &[f64] {
        &self.0
    }
}

/// How `ψ_α` acts on the noise space; the noise-density condition is checked
/// structurally from this.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseAction {
    Identity,
    /// An orthogonal linear map, which preserves isotropic Gaussian densities.
    Orthogonal,
    General,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Parametrized diffeomorphisms `(φ_α, χ_α, ψ_α)` obeying
/// `φ_e = id` and `φ_{a*b} = φ_a ∘ φ_b` (likewise for `χ`, `ψ`).
pub trait TransformationGroup: Sync {
    type Input: ControlInput;

    /// Group dimension `r`.
    fn dim(&self) -> usize;

    /// Dimension `n` of the state space acted on.
    fn state_dim(&self) -> usize;

    fn identity(&self) -> GroupElement;

    fn compose(&self, a: &GroupElement, b: &GroupElement) -> GroupElement;

    fn inverse(&self, a: &GroupElement) -> GroupElement;

    /// `φ_α(x)`.
    fn act_state(&self, a: &GroupElement, x: &[f64]) -> Point;

    /// `χ_α(u)`.
    fn act_input(&self, a: &GroupElement, u: &Self::Input) -> Self::Input;

    /// `ψ_α(w)`.
    fn act_noise(&self, _a: &GroupElement, w: &[f64]) -> Point {
        Point::from_slice(w)
    }

    fn noise_action(&self) -> NoiseAction {
        NoiseAction::Identity
    }

    /// The `r` components `φ^a_α(x)` used in the normalization equation.
    fn split_a(&self, a: &GroupElement, x: &[f64]) -> Point;

    /// The remaining `n - r` components `φ^b_α(x)`.
    fn split_b(&self, a: &GroupElement, x: &[f64]) -> Point;

    fn element_distance(&self, a: &GroupElement, b: &GroupElement) -> f64 {
        max_abs_diff(a.params(), b.params())
    }

    fn state_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        max_abs_diff(x, y)
    }
}

/// Cartan moving frame for a transformation group.
pub trait MovingFrame: Sync {
    type Group: TransformationGroup;

    fn group(&self) -> &Self::Group;

    /// Cross-section level `c` in `C = {x : φ^a_e(x) = c}`.
    fn level(&self) -> &[f64];

    fn reduced_dim(&self) -> usize {
        self.group().state_dim() - self.group().dim()
    }

    /// The group element solving `φ^a_{γ(x)}(x) = c`.
    fn gamma(&self, x: &[f64]) -> Result<GroupElement>;

    /// Invariants `ρ(x) = φ^b_{γ(x)}(x)`.
    fn rho(&self, x: &[f64]) -> Result<Point> {
        let g = self.gamma(x)?;
        Ok(self.group().split_b(&g, x))
    }

    /// The point of `C` with invariants `x̄`.
    fn rho_bar_inv(&self, reduced: &[f64]) -> Result<Point>;

    fn on_cross_section(&self, x: &[f64]) -> bool;

    fn reduced_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        max_abs_diff(a, b)
    }
}
