//! Planar rotor: a spiral map with radial pushes, invariant under rotations
//! about the origin. Its reduced problem is one-dimensional in the radius.

use serde::{Deserialize, Serialize};

use super::{
    finite, linspace, pick, point, random_angle, require, rotate, so2_compose, so2_distance,
    so2_inverse,
};
use crate::dp::{ControlSystem, NoiseModel};
use crate::grid::{Axis, GridSpec};
use crate::lie::wrap_angle;
use crate::symmetry::{GroupElement, MovingFrame, SampleRng, Sampler, TransformationGroup};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RotorConfig {
    /// Spiral factor applied to the state before the push.
    pub a: f64,
    /// Rotation per step.
    pub omega: f64,
    /// Radial pushes.
    pub pushes: Vec<f64>,
    pub horizon: usize,
    /// Standard deviation of an extra random rotation; 0 for none.
    pub sigma: f64,
    pub nodes_per_dim: usize,
    /// Adds `asymmetry · x₁` to the stage cost, breaking the symmetry.
    pub asymmetry: f64,
}

impl Default for RotorConfig {
    fn default() -> Self {
        RotorConfig {
            a: 0.9,
            omega: 0.3,
            pushes: linspace(-0.2, 0.2, 9),
            horizon: 8,
            sigma: 0.0,
            nodes_per_dim: 5,
            asymmetry: 0.0,
        }
    }
}

impl RotorConfig {
    pub fn validate(&self) -> Result<()> {
        require(self.a > 0.0 && self.a.is_finite(), || {
            format!("rotor spiral factor must be positive, got {}", self.a)
        })?;
        finite("omega", self.omega)?;
        finite("asymmetry", self.asymmetry)?;
        require(!self.pushes.is_empty(), || "rotor needs at least one push".into())?;
        for &p in &self.pushes {
            finite("push", p)?;
        }
        require(self.sigma >= 0.0 && self.sigma.is_finite(), || {
            format!("sigma must be nonnegative, got {}", self.sigma)
        })
    }

    /// Cartesian grid on `[-extent, extent]²`.
    pub fn full_grid(count: usize, extent: f64) -> Result<GridSpec> {
        GridSpec::new(vec![
            Axis::new(-extent, extent, count)?,
            Axis::new(-extent, extent, count)?,
        ])
    }

    /// Radial grid on `[0, extent]`.
    pub fn reduced_grid(count: usize, extent: f64) -> Result<GridSpec> {
        GridSpec::new(vec![Axis::new(0.0, extent, count)?])
    }
}

/// `f(x, u, w) = Rot(ω + w)(a·x + u·x/‖x‖)`, `g = u²`, `g_N = (‖x‖ − 1)²`.
///
/// The push direction is taken as zero at the origin.
#[derive(Debug, Clone)]
pub struct Rotor2D {
    config: RotorConfig,
    inputs: Vec<Point>,
    noise: NoiseModel,
}

impl Rotor2D {
    pub fn new(config: RotorConfig) -> Result<Self> {
        config.validate()?;
        let inputs = config.pushes.iter().map(|&u| point(&[u])).collect();
        let noise = if config.sigma > 0.0 {
            NoiseModel::IsotropicGaussian {
                dim: 1,
                sigma: config.sigma,
                nodes_per_dim: config.nodes_per_dim,
            }
        } else {
            NoiseModel::Deterministic { dim: 1 }
        };
        noise.validate()?;
        Ok(Rotor2D {
            config,
            inputs,
            noise,
        })
    }

    pub fn config(&self) -> &RotorConfig {
        &self.config
    }
}

impl ControlSystem for Rotor2D {
    type Input = Point;

    fn state_dim(&self) -> usize {
        2
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn inputs(&self) -> &[Point] {
        &self.inputs
    }

    fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    fn step(&self, _k: usize, x: &[f64], u: &Point, w: &[f64]) -> Point {
        let r = x[0].hypot(x[1]);
        let push = if r > 0.0 { u[0] / r } else { 0.0 };
        let scale = self.config.a + push;
        let (a, b) = rotate(self.config.omega + w[0], scale * x[0], scale * x[1]);
        point(&[a, b])
    }

    fn stage_cost(&self, _k: usize, x: &[f64], u: &Point, _w: &[f64]) -> f64 {
        u[0] * u[0] + self.config.asymmetry * x[0]
    }

    fn terminal_cost(&self, x: &[f64]) -> f64 {
        let d = x[0].hypot(x[1]) - 1.0;
        d * d
    }
}

/// Rotations `φ_α(x) = Rot(α)x`; inputs and noise are untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct RotorGroup;

impl TransformationGroup for RotorGroup {
    type Input = Point;

    fn dim(&self) -> usize {
        1
    }

    fn state_dim(&self) -> usize {
        2
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
        let (p, q) = rotate(a.0[0], x[0], x[1]);
        point(&[p, q])
    }

    fn act_input(&self, _a: &GroupElement, u: &Point) -> Point {
        u.clone()
    }

    /// Second coordinate of `Rot(α)x`.
    fn split_a(&self, a: &GroupElement, x: &[f64]) -> Point {
        point(&[rotate(a.0[0], x[0], x[1]).1])
    }

    fn split_b(&self, a: &GroupElement, x: &[f64]) -> Point {
        point(&[rotate(a.0[0], x[0], x[1]).0])
    }

    fn element_distance(&self, a: &GroupElement, b: &GroupElement) -> f64 {
        so2_distance(a, b)
    }
}

/// Frame onto the positive first axis; `ρ(x) = ‖x‖`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RotorFrame {
    group: RotorGroup,
}

impl RotorFrame {
    pub fn new() -> Self {
        RotorFrame { group: RotorGroup }
    }
}

impl MovingFrame for RotorFrame {
    type Group = RotorGroup;

    fn group(&self) -> &RotorGroup {
        &self.group
    }

    fn level(&self) -> &[f64] {
        &[0.0]
    }

    fn gamma(&self, x: &[f64]) -> Result<GroupElement> {
        if x[0] == 0.0 && x[1] == 0.0 {
            return Err(Error::Singular("rotor frame undefined at the origin".into()));
        }
        Ok(GroupElement::new(&[wrap_angle((-x[1]).atan2(x[0]))]))
    }

    /// Closed form, defined at the origin too.
    fn rho(&self, x: &[f64]) -> Result<Point> {
        Ok(point(&[x[0].hypot(x[1])]))
    }

    fn rho_bar_inv(&self, reduced: &[f64]) -> Result<Point> {
        if !(reduced[0] >= 0.0) {
            return Err(Error::Singular(format!(
                "no rotor state with radius {}",
                reduced[0]
            )));
        }
        Ok(point(&[reduced[0], 0.0]))
    }

    fn on_cross_section(&self, x: &[f64]) -> bool {
        x[1].abs() <= 1e-12 && x[0] >= 0.0
    }
}

/// Draws states in the annulus `0.05 ≤ ‖x‖ ≤ 2`.
#[derive(Debug, Clone)]
pub struct RotorSampler {
    pub inputs: Vec<Point>,
    pub sigma: f64,
}

impl RotorSampler {
    pub fn new(system: &Rotor2D) -> Self {
        RotorSampler {
            inputs: system.inputs().to_vec(),
            sigma: system.config.sigma.max(0.1),
        }
    }
}

impl Sampler for RotorSampler {
    type Input = Point;

    fn state(&self, rng: &mut SampleRng) -> Point {
        use rand::Rng;
        let r = rng.random_range(0.05..2.0);
        let t = random_angle(rng);
        point(&[r * t.cos(), r * t.sin()])
    }

    fn input(&self, rng: &mut SampleRng) -> Point {
        pick(rng, &self.inputs)
    }

    fn noise(&self, rng: &mut SampleRng) -> Point {
        use rand::Rng;
        point(&[rng.random_range(-3.0..3.0) * self.sigma])
    }

    fn element(&self, rng: &mut SampleRng) -> GroupElement {
        GroupElement::new(&[random_angle(rng)])
    }

    fn reduced(&self, rng: &mut SampleRng) -> Point {
        use rand::Rng;
        point(&[rng.random_range(0.0..2.0)])
    }
}
