//! Two Dubins vehicles on SE(2) with independent heading noise, rewarded
//! for ending with equal headings at unit distance. Left translations of
//! both vehicles are a symmetry; the reduced state is the pose of the second
//! vehicle seen from the first.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{finite, pick, point, random_angle, require};
use crate::dp::{ControlSystem, NoiseModel};
use crate::grid::{Axis, GridSpec};
use crate::lie::{angle_diff, heading_noise_matrix, wrap_angle, Se2};
use crate::symmetry::{GroupElement, MovingFrame, SampleRng, Sampler, TransformationGroup};
use crate::{Point, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DubinsConfig {
    /// Turning-radius parameter `L`.
    pub turning: f64,
    /// Heading-noise standard deviation; 0 gives the deterministic model.
    pub sigma: f64,
    pub nodes_per_dim: usize,
    pub v_set: Vec<f64>,
    pub s_set: Vec<f64>,
    pub horizon: usize,
}

impl Default for DubinsConfig {
    fn default() -> Self {
        DubinsConfig {
            turning: 1.0,
            sigma: 0.3,
            nodes_per_dim: 5,
            v_set: vec![-0.1, 0.0, 0.1],
            s_set: vec![-1.0, 0.0, 1.0],
            horizon: 30,
        }
    }
}

impl DubinsConfig {
    pub fn validate(&self) -> Result<()> {
        require(self.turning > 0.0 && self.turning.is_finite(), || {
            format!("turning parameter must be positive, got {}", self.turning)
        })?;
        require(self.sigma >= 0.0 && self.sigma.is_finite(), || {
            format!("sigma must be nonnegative, got {}", self.sigma)
        })?;
        require(!self.v_set.is_empty() && !self.s_set.is_empty(), || {
            "v_set and s_set must be nonempty".into()
        })?;
        for &v in &self.v_set {
            finite("speed", v)?;
        }
        for &s in &self.s_set {
            require(s.abs() < FRAC_PI_2, || {
                format!("steering angle {s} outside (-π/2, π/2)")
            })?;
        }
        Ok(())
    }

    /// Grid over `(z̄, ȳ, θ̄)` with `θ̄` periodic on `[0, 2π)`.
    pub fn reduced_grid(nz: usize, ny: usize, ntheta: usize, extent: f64) -> Result<GridSpec> {
        GridSpec::new(vec![
            Axis::new(-extent, extent, nz)?,
            Axis::new(-extent, extent, ny)?,
            Axis::periodic(0.0, TAU, ntheta)?,
        ])
    }
}

/// Initial formation `(z¹, y¹, θ¹, z², y², θ²) = (0.1, 0, π/2, −0.1, 0, 3π/2)`.
pub const FORMATION_X0: [f64; 6] = [0.1, 0.0, FRAC_PI_2, -0.1, 0.0, 3.0 * FRAC_PI_2];

fn agent(x: &[f64], j: usize) -> Se2 {
    Se2::from_pose(&x[3 * j..3 * j + 3])
}

fn pair(a: &Se2, b: &Se2) -> Point {
    let (p, q) = (a.pose(), b.pose());
    point(&[p[0], p[1], p[2], q[0], q[1], q[2]])
}

/// Terminal cost on a relative pose:
/// `arccos(X̄₁₁)² + |√(X̄₁₃² + X̄₂₃²) − 1|`.
pub fn formation_cost(relative: &Se2) -> f64 {
    let heading = relative.theta.cos().clamp(-1.0, 1.0).acos();
    heading * heading + (relative.z.hypot(relative.y) - 1.0).abs()
}

/// State `(z¹, y¹, θ¹, z², y², θ²)`, input `(v¹, s¹, v², s²)`, noise
/// `(w¹, w²)`. Each vehicle moves as `X' = X · M(v, s) · W(w)`.
#[derive(Debug, Clone)]
pub struct DubinsPair {
    config: DubinsConfig,
    inputs: Vec<Point>,
    noise: NoiseModel,
}

impl DubinsPair {
    pub fn new(config: DubinsConfig) -> Result<Self> {
        config.validate()?;
        let mut inputs = Vec::new();
        for &v1 in &config.v_set {
            for &s1 in &config.s_set {
                for &v2 in &config.v_set {
                    for &s2 in &config.s_set {
                        inputs.push(point(&[v1, s1, v2, s2]));
                    }
                }
            }
        }
        let noise = if config.sigma > 0.0 {
            NoiseModel::IsotropicGaussian {
                dim: 2,
                sigma: config.sigma,
                nodes_per_dim: config.nodes_per_dim,
            }
        } else {
            NoiseModel::Deterministic { dim: 2 }
        };
        noise.validate()?;
        Ok(DubinsPair {
            config,
            inputs,
            noise,
        })
    }

    pub fn config(&self) -> &DubinsConfig {
        &self.config
    }

    /// `M(v, s)`; the steering angle was validated at construction.
    pub fn input_matrix(&self, v: f64, s: f64) -> Se2 {
        Se2::new(v / self.config.turning * s.tan(), v, 0.0)
    }

    /// Position of vehicle `j` after one step.
    pub fn advance(&self, x: &Se2, v: f64, s: f64, w: f64) -> Se2 {
        x.compose(&self.input_matrix(v, s))
            .compose(&heading_noise_matrix(w))
    }
}

impl ControlSystem for DubinsPair {
    type Input = Point;

    fn state_dim(&self) -> usize {
        6
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
        let a = self.advance(&agent(x, 0), u[0], u[1], w[0]);
        let b = self.advance(&agent(x, 1), u[2], u[3], w[1]);
        pair(&a, &b)
    }

    fn stage_cost(&self, _k: usize, _x: &[f64], _u: &Point, _w: &[f64]) -> f64 {
        0.0
    }

    fn terminal_cost(&self, x: &[f64]) -> f64 {
        formation_cost(&agent(x, 0).inverse().compose(&agent(x, 1)))
    }
}

/// Left multiplication of both vehicles by `A ∈ SE(2)`; parameters
/// `(θ, z, y)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DubinsGroup;

fn element(a: &GroupElement) -> Se2 {
    Se2::new(a.0[0], a.0[1], a.0[2])
}

fn params(a: &Se2) -> GroupElement {
    GroupElement::new(&[a.theta, a.z, a.y])
}

impl TransformationGroup for DubinsGroup {
    type Input = Point;

    fn dim(&self) -> usize {
        3
    }

    fn state_dim(&self) -> usize {
        6
    }

    fn identity(&self) -> GroupElement {
        params(&Se2::identity())
    }

    fn compose(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        params(&element(a).compose(&element(b)))
    }

    fn inverse(&self, a: &GroupElement) -> GroupElement {
        params(&element(a).inverse())
    }

    fn act_state(&self, a: &GroupElement, x: &[f64]) -> Point {
        let g = element(a);
        pair(&g.compose(&agent(x, 0)), &g.compose(&agent(x, 1)))
    }

    fn act_input(&self, _a: &GroupElement, u: &Point) -> Point {
        u.clone()
    }

    /// Pose of `A X¹`, heading as a signed angle so that the identity sits
    /// at zero rather than at the `2π` seam.
    fn split_a(&self, a: &GroupElement, x: &[f64]) -> Point {
        let p = element(a).compose(&agent(x, 0)).pose();
        point(&[p[0], p[1], angle_diff(p[2], 0.0)])
    }

    /// Pose of `A X²`.
    fn split_b(&self, a: &GroupElement, x: &[f64]) -> Point {
        point(&element(a).compose(&agent(x, 1)).pose())
    }

    fn element_distance(&self, a: &GroupElement, b: &GroupElement) -> f64 {
        element(a).distance(&element(b))
    }

    fn state_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        agent(x, 0)
            .distance(&agent(y, 0))
            .max(agent(x, 1).distance(&agent(y, 1)))
    }
}

/// `γ(X) = (X¹)⁻¹`: the first vehicle is moved to the origin facing along
/// the first axis.
#[derive(Debug, Clone, Copy, Default)]
pub struct DubinsFrame {
    group: DubinsGroup,
}

impl DubinsFrame {
    pub fn new() -> Self {
        DubinsFrame { group: DubinsGroup }
    }
}

impl MovingFrame for DubinsFrame {
    type Group = DubinsGroup;

    fn group(&self) -> &DubinsGroup {
        &self.group
    }

    fn level(&self) -> &[f64] {
        &[0.0, 0.0, 0.0]
    }

    fn gamma(&self, x: &[f64]) -> Result<GroupElement> {
        Ok(params(&agent(x, 0).inverse()))
    }

    fn rho(&self, x: &[f64]) -> Result<Point> {
        Ok(point(&agent(x, 0).inverse().compose(&agent(x, 1)).pose()))
    }

    fn rho_bar_inv(&self, reduced: &[f64]) -> Result<Point> {
        Ok(point(&[
            0.0,
            0.0,
            0.0,
            reduced[0],
            reduced[1],
            wrap_angle(reduced[2]),
        ]))
    }

    fn on_cross_section(&self, x: &[f64]) -> bool {
        agent(x, 0).distance(&Se2::identity()) <= 1e-12
    }

    fn reduced_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        Se2::from_pose(a).distance(&Se2::from_pose(b))
    }
}

/// Positions in `[-2, 2]²`, any headings, inputs from the system's set.
#[derive(Debug, Clone)]
pub struct DubinsSampler {
    pub inputs: Vec<Point>,
    pub sigma: f64,
}

impl DubinsSampler {
    pub fn new(system: &DubinsPair) -> Self {
        DubinsSampler {
            inputs: system.inputs.clone(),
            sigma: if system.config.sigma > 0.0 {
                system.config.sigma
            } else {
                0.3
            },
        }
    }

    fn pose(rng: &mut SampleRng) -> [f64; 3] {
        use rand::Rng;
        [
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            random_angle(rng),
        ]
    }
}

impl Sampler for DubinsSampler {
    type Input = Point;

    fn state(&self, rng: &mut SampleRng) -> Point {
        let (a, b) = (Self::pose(rng), Self::pose(rng));
        point(&[a[0], a[1], a[2], b[0], b[1], b[2]])
    }

    fn input(&self, rng: &mut SampleRng) -> Point {
        pick(rng, &self.inputs)
    }

    fn noise(&self, rng: &mut SampleRng) -> Point {
        let normal = Normal::new(0.0, self.sigma).expect("positive sigma");
        point(&[normal.sample(rng), normal.sample(rng)])
    }

    fn element(&self, rng: &mut SampleRng) -> GroupElement {
        let p = Self::pose(rng);
        GroupElement::new(&[p[2], p[0], p[1]])
    }

    fn reduced(&self, rng: &mut SampleRng) -> Point {
        point(&Self::pose(rng))
    }
}

/// Relative heading `θ² − θ¹` wrapped to `[-π, π)`.
pub fn relative_heading(x: &[f64]) -> f64 {
    angle_diff(x[5], x[2])
}
