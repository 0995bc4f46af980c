//! MRI fingerprinting: discrete-time Bloch dynamics driven by RF rotations,
//! augmented with the sensitivities of the magnetization to the longitudinal
//! relaxation parameter `θ₁`. Minimizing the stage cost maximizes the Fisher
//! information about `θ₁` carried by the transverse measurements.
//!
//! Rotations about the field axis act on the transverse magnetization and on
//! the transverse sensitivities simultaneously, and are a symmetry of the
//! problem when they also conjugate the RF pulse.

use std::f64::consts::{PI, TAU};
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{pick, point, random_angle, require, rotate, so2_compose, so2_distance, so2_inverse};
use crate::dp::{ControlSystem, NoiseModel};
use crate::grid::{Axis, GridSpec};
use crate::lie::{wrap_angle, So3};
use crate::symmetry::{GroupElement, MovingFrame, SampleRng, Sampler, TransformationGroup};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MriConfig {
    /// `e^{-Δt/T1}`.
    pub theta1: f64,
    /// `e^{-Δt/T2}`.
    pub theta2: f64,
    /// Measurement-noise variance.
    pub gamma_noise: f64,
    pub horizon: usize,
    /// Number of `a` values, uniform on `[0, 2π)`, in pulses `Rz(a) Ry(b)`.
    pub alpha_count: usize,
    /// Number of `b` values, uniform on `[0, π]`.
    pub beta_count: usize,
    /// Explicit `(a, b)` pairs replacing the product grid when nonempty.
    pub pulses: Vec<[f64; 2]>,
}

impl Default for MriConfig {
    fn default() -> Self {
        MriConfig {
            theta1: 0.99,
            theta2: 0.95,
            gamma_noise: 1.0,
            horizon: 20,
            alpha_count: 16,
            beta_count: 8,
            pulses: Vec::new(),
        }
    }
}

impl MriConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("theta1", self.theta1), ("theta2", self.theta2)] {
            require(v > 0.0 && v < 1.0, || format!("{name} must lie in (0, 1), got {v}"))?;
        }
        require(self.gamma_noise > 0.0 && self.gamma_noise.is_finite(), || {
            format!("gamma_noise must be positive, got {}", self.gamma_noise)
        })?;
        if self.pulses.is_empty() {
            require(self.alpha_count >= 1 && self.beta_count >= 1, || {
                "alpha_count and beta_count must be at least 1".into()
            })?;
        }
        for p in &self.pulses {
            require(p.iter().all(|v| v.is_finite()), || {
                format!("pulse angles must be finite, got {p:?}")
            })?;
        }
        Ok(())
    }

    /// `(a, b)` angle pairs of the input set, `a` varying slowest.
    pub fn pulse_angles(&self) -> Vec<[f64; 2]> {
        if !self.pulses.is_empty() {
            return self.pulses.clone();
        }
        let mut out = Vec::with_capacity(self.alpha_count * self.beta_count);
        for i in 0..self.alpha_count {
            let a = TAU * i as f64 / self.alpha_count as f64;
            for j in 0..self.beta_count {
                let b = if self.beta_count == 1 {
                    0.0
                } else {
                    PI * j as f64 / (self.beta_count - 1) as f64
                };
                out.push([a, b]);
            }
        }
        out
    }

    /// Grid over `(r, x₃, x̄₄, x̄₅, x₆)`: `r ∈ [0, 1]`, `x₃ ∈ [-1, 1]`,
    /// sensitivities in `[-s, s]`.
    pub fn reduced_grid(counts: [usize; 5], sensitivity: f64) -> Result<GridSpec> {
        GridSpec::new(vec![
            Axis::new(0.0, 1.0, counts[0])?,
            Axis::new(-1.0, 1.0, counts[1])?,
            Axis::new(-sensitivity, sensitivity, counts[2])?,
            Axis::new(-sensitivity, sensitivity, counts[3])?,
            Axis::new(-sensitivity, sensitivity, counts[4])?,
        ])
    }
}

/// Equilibrium magnetization with zero sensitivity.
pub const EQUILIBRIUM: [f64; 6] = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0];

/// State `(m₁, m₂, m₃, s₁, s₂, s₃)` with `s = ∂m/∂θ₁`; input `U ∈ SO(3)`.
///
/// ```text
/// m' = U diag(θ₂, θ₂, θ₁) m + (0, 0, 1 − θ₁)
/// s' = U (θ₂ s₁, θ₂ s₂, m₃ + θ₁ s₃) + (0, 0, −1)
/// g  = g_N = −(s₁² + s₂²) / γ
/// ```
#[derive(Debug, Clone)]
pub struct MriSystem {
    config: MriConfig,
    inputs: Vec<So3>,
    noise: NoiseModel,
}

impl MriSystem {
    pub fn new(config: MriConfig) -> Result<Self> {
        config.validate()?;
        let inputs = config
            .pulse_angles()
            .iter()
            .map(|&[a, b]| So3::rz(a).compose(&So3::ry(b)))
            .collect();
        Ok(MriSystem {
            config,
            inputs,
            noise: NoiseModel::Deterministic { dim: 0 },
        })
    }

    pub fn config(&self) -> &MriConfig {
        &self.config
    }

    /// `Σ_{k=0}^{N} (s₁² + s₂²) / γ` along a trajectory.
    pub fn fisher_information(&self, states: &[Point]) -> f64 {
        states.iter().map(|x| -self.terminal_cost(x)).sum()
    }
}

impl ControlSystem for MriSystem {
    type Input = So3;

    fn state_dim(&self) -> usize {
        6
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn inputs(&self) -> &[So3] {
        &self.inputs
    }

    fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    fn step(&self, _k: usize, x: &[f64], u: &So3, _w: &[f64]) -> Point {
        let (t1, t2) = (self.config.theta1, self.config.theta2);
        let m = u.apply(&Vector3::new(t2 * x[0], t2 * x[1], t1 * x[2]));
        let s = u.apply(&Vector3::new(t2 * x[3], t2 * x[4], x[2] + t1 * x[5]));
        point(&[m[0], m[1], m[2] + 1.0 - t1, s[0], s[1], s[2] - 1.0])
    }

    fn stage_cost(&self, _k: usize, x: &[f64], _u: &So3, _w: &[f64]) -> f64 {
        -(x[3] * x[3] + x[4] * x[4]) / self.config.gamma_noise
    }

    fn terminal_cost(&self, x: &[f64]) -> f64 {
        -(x[3] * x[3] + x[4] * x[4]) / self.config.gamma_noise
    }
}

/// Rotation by `α` of `(m₁, m₂)` and `(s₁, s₂)`; pulses are conjugated,
/// `χ_α(U) = Rz(α) U Rz(α)ᵀ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MriGroup;

impl TransformationGroup for MriGroup {
    type Input = So3;

    fn dim(&self) -> usize {
        1
    }

    fn state_dim(&self) -> usize {
        6
    }

    fn identity(&self) -> GroupElement {
        GroupElement::new(&[0.0])
    }

    fn compose(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        so2_compose(a, b)
    }

    fn inverse(&self, a: &GroupElement) -> GroupElement {
        so2_inverse(a)
    }

    fn act_state(&self, a: &GroupElement, x: &[f64]) -> Point {
        let (m1, m2) = rotate(a.0[0], x[0], x[1]);
        let (s1, s2) = rotate(a.0[0], x[3], x[4]);
        point(&[m1, m2, x[2], s1, s2, x[5]])
    }

    fn act_input(&self, a: &GroupElement, u: &So3) -> So3 {
        let r = So3::rz(a.0[0]);
        r.compose(u).compose(&r.inverse())
    }

    /// `x₁ cos α − x₂ sin α`.
    fn split_a(&self, a: &GroupElement, x: &[f64]) -> Point {
        point(&[rotate(a.0[0], x[0], x[1]).0])
    }

    fn split_b(&self, a: &GroupElement, x: &[f64]) -> Point {
        let (_, m2) = rotate(a.0[0], x[0], x[1]);
        let (s1, s2) = rotate(a.0[0], x[3], x[4]);
        point(&[m2, x[2], s1, s2, x[5]])
    }

    fn element_distance(&self, a: &GroupElement, b: &GroupElement) -> f64 {
        so2_distance(a, b)
    }
}

static SINGULAR_HITS: AtomicU64 = AtomicU64::new(0);

/// Frame evaluations at zero transverse magnetization with nonzero
/// transverse sensitivity, where the identity convention is not harmless.
pub fn mri_singular_hits() -> u64 {
    SINGULAR_HITS.load(Ordering::Relaxed)
}

/// Cross-section `{x₁ = 0, x₂ > 0}`, `γ(x) = atan2(x₁, x₂)`.
///
/// At `x₁ = x₂ = 0` the frame returns the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct MriFrame {
    group: MriGroup,
}

impl MriFrame {
    pub fn new() -> Self {
        MriFrame { group: MriGroup }
    }
}

impl MovingFrame for MriFrame {
    type Group = MriGroup;

    fn group(&self) -> &MriGroup {
        &self.group
    }

    fn level(&self) -> &[f64] {
        &[0.0]
    }

    fn gamma(&self, x: &[f64]) -> Result<GroupElement> {
        if x[0] == 0.0 && x[1] == 0.0 {
            if x[3] != 0.0 || x[4] != 0.0 {
                SINGULAR_HITS.fetch_add(1, Ordering::Relaxed);
            }
            return Ok(GroupElement::new(&[0.0]));
        }
        Ok(GroupElement::new(&[wrap_angle(x[0].atan2(x[1]))]))
    }

    /// `(r, x₃, (x₂x₄ − x₁x₅)/r, (x₁x₄ + x₂x₅)/r, x₆)`.
    fn rho(&self, x: &[f64]) -> Result<Point> {
        if x[0] == 0.0 && x[1] >= 0.0 {
            // on the section, or its singular edge: read the invariants off
            let g = self.gamma(x)?;
            return Ok(self.group.split_b(&g, x));
        }
        let r = x[0].hypot(x[1]);
        Ok(point(&[
            r,
            x[2],
            (x[1] * x[3] - x[0] * x[4]) / r,
            (x[0] * x[3] + x[1] * x[4]) / r,
            x[5],
        ]))
    }

    fn rho_bar_inv(&self, reduced: &[f64]) -> Result<Point> {
        if !(reduced[0] >= 0.0) {
            return Err(Error::Singular(format!(
                "transverse magnitude {} is negative",
                reduced[0]
            )));
        }
        Ok(point(&[
            0.0, reduced[0], reduced[1], reduced[2], reduced[3], reduced[4],
        ]))
    }

    fn on_cross_section(&self, x: &[f64]) -> bool {
        x[0] == 0.0 && x[1] >= 0.0
    }
}

/// Magnetization in the unit ball with `r ≥ 0.05`, sensitivities in
/// `[-3, 3]`, pulses from the system's set mixed with random Euler angles.
#[derive(Debug, Clone)]
pub struct MriSampler {
    pub inputs: Vec<So3>,
}

impl MriSampler {
    pub fn new(system: &MriSystem) -> Self {
        MriSampler {
            inputs: system.inputs.clone(),
        }
    }
}

impl Sampler for MriSampler {
    type Input = So3;

    fn state(&self, rng: &mut SampleRng) -> Point {
        use rand::Rng;
        let r = rng.random_range(0.05..0.7);
        let t = random_angle(rng);
        let m3 = rng.random_range(-0.7..0.7);
        let mut s = [0.0; 3];
        for v in &mut s {
            *v = rng.random_range(-3.0..3.0);
        }
        point(&[r * t.cos(), r * t.sin(), m3, s[0], s[1], s[2]])
    }

    fn input(&self, rng: &mut SampleRng) -> So3 {
        use rand::Rng;
        if rng.random_bool(0.5) {
            pick(rng, &self.inputs)
        } else {
            So3::from_euler(
                random_angle(rng),
                rng.random_range(0.0..PI),
                random_angle(rng),
            )
        }
    }

    fn noise(&self, _rng: &mut SampleRng) -> Point {
        Point::new()
    }

    fn element(&self, rng: &mut SampleRng) -> GroupElement {
        GroupElement::new(&[random_angle(rng)])
    }

    fn reduced(&self, rng: &mut SampleRng) -> Point {
        use rand::Rng;
        point(&[
            rng.random_range(0.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        ])
    }
}
