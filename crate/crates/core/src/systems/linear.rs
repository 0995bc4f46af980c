//! Linear dynamics `x' = Ax + Bu` with either a quadratic cost (LQR) or an
//! L1 cost. Both are equivariant under dilations, with `l(α) = α²` and
//! `l(α) = α` respectively.

use serde::{Deserialize, Serialize};

use super::{finite, linspace, pick, point, require};
use crate::dp::{ControlSystem, EquivariantScaling, NoiseModel};
use crate::symmetry::scaling::{ScalingGroup, SphereFrame};
use crate::symmetry::{GroupElement, SampleRng, Sampler};
use crate::{Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearCost {
    /// `g = xᵀQx + uᵀRu`, `g_N = xᵀQx`.
    Quadratic,
    /// `g = ‖x‖₁ + ‖u‖₁`, `g_N = ‖x‖₁`.
    L1,
}

/// Evenly spaced values `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Matrices are row-major. The per-coordinate input grid is either
/// `input_values` or `input_range`; the input set is its `n`-fold product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearConfig {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub q: Vec<f64>,
    #[serde(default)]
    pub r: Vec<f64>,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub input_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_range: Option<InputRange>,
}

impl LinearConfig {
    /// Scalar LQR with `A = B = Q = R = 1` and 201 inputs on `[-2, 2]`.
    pub fn lqr_default() -> Self {
        LinearConfig {
            n: 1,
            a: vec![1.0],
            b: vec![1.0],
            q: vec![1.0],
            r: vec![1.0],
            horizon: 3,
            input_values: linspace(-2.0, 2.0, 201),
            input_range: None,
        }
    }

    /// Planar L1 problem with a damped rotation for `A` and `B = I`.
    pub fn l1_default() -> Self {
        let (s, c) = 0.3f64.sin_cos();
        LinearConfig {
            n: 2,
            a: vec![0.95 * c, -0.95 * s, 0.95 * s, 0.95 * c],
            b: vec![1.0, 0.0, 0.0, 1.0],
            q: Vec::new(),
            r: Vec::new(),
            horizon: 4,
            input_values: linspace(-0.5, 0.5, 21),
            input_range: None,
        }
    }

    pub fn validate(&self, cost: LinearCost) -> Result<()> {
        require((1..=2).contains(&self.n), || {
            format!("linear systems support n = 1 or 2, got {}", self.n)
        })?;
        let nn = self.n * self.n;
        for (name, m) in [("a", &self.a), ("b", &self.b)] {
            require(m.len() == nn, || {
                format!("matrix {name} needs {nn} entries, got {}", m.len())
            })?;
            for &v in m {
                finite(name, v)?;
            }
        }
        if cost == LinearCost::Quadratic {
            for (name, m) in [("q", &self.q), ("r", &self.r)] {
                require(m.len() == nn, || {
                    format!("matrix {name} needs {nn} entries, got {}", m.len())
                })?;
                for &v in m {
                    finite(name, v)?;
                }
            }
            require(self.r.iter().step_by(self.n + 1).all(|&d| d > 0.0), || {
                "R must have a positive diagonal".into()
            })?;
        }
        require(
            self.input_values.is_empty() != self.input_range.is_none(),
            || "give exactly one of input_values and input_range".into(),
        )?;
        if let Some(r) = &self.input_range {
            finite("input_range.lo", r.lo)?;
            finite("input_range.hi", r.hi)?;
            require(r.count >= 1 && (r.count == 1 || r.lo < r.hi), || {
                "input_range needs count >= 1 and lo < hi".into()
            })?;
        }
        for &v in &self.input_values {
            finite("input value", v)?;
        }
        Ok(())
    }

    /// Per-coordinate input values.
    pub fn input_set(&self) -> Vec<f64> {
        match &self.input_range {
            Some(r) if r.count == 1 => vec![r.lo],
            Some(r) => linspace(r.lo, r.hi, r.count),
            None => self.input_values.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearSystem {
    config: LinearConfig,
    cost: LinearCost,
    inputs: Vec<Point>,
    noise: NoiseModel,
}

fn matvec(m: &[f64], x: &[f64]) -> Point {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * x[j]).sum())
        .collect()
}

fn quad_form(m: &[f64], x: &[f64]) -> f64 {
    x.iter().zip(matvec(m, x)).map(|(a, b)| a * b).sum()
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

impl LinearSystem {
    pub fn new(config: LinearConfig, cost: LinearCost) -> Result<Self> {
        config.validate(cost)?;
        let values = config.input_set();
        let mut inputs: Vec<Point> = vec![Point::new()];
        for _ in 0..config.n {
            inputs = inputs
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        let noise = NoiseModel::Deterministic { dim: config.n };
        Ok(LinearSystem {
            config,
            cost,
            inputs,
            noise,
        })
    }

    pub fn lqr(config: LinearConfig) -> Result<Self> {
        Self::new(config, LinearCost::Quadratic)
    }

    pub fn l1(config: LinearConfig) -> Result<Self> {
        Self::new(config, LinearCost::L1)
    }

    pub fn config(&self) -> &LinearConfig {
        &self.config
    }

    pub fn cost(&self) -> LinearCost {
        self.cost
    }

    /// Dilations acting on states and inputs.
    pub fn group(&self) -> ScalingGroup {
        ScalingGroup::new(self.config.n).expect("validated dimension")
    }

    pub fn frame(&self) -> SphereFrame {
        SphereFrame::new(self.group())
    }

    /// Degree of homogeneity of the cost.
    pub fn scaling(&self) -> EquivariantScaling {
        let p = match self.cost {
            LinearCost::Quadratic => 2.0,
            LinearCost::L1 => 1.0,
        };
        EquivariantScaling::power(p).expect("finite exponent")
    }
}

impl ControlSystem for LinearSystem {
    type Input = Point;

    fn state_dim(&self) -> usize {
        self.config.n
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

    fn step(&self, _k: usize, x: &[f64], u: &Point, _w: &[f64]) -> Point {
        let ax = matvec(&self.config.a, x);
        let bu = matvec(&self.config.b, u);
        ax.iter().zip(bu.iter()).map(|(p, q)| p + q).collect()
    }

    fn stage_cost(&self, _k: usize, x: &[f64], u: &Point, _w: &[f64]) -> f64 {
        match self.cost {
            LinearCost::Quadratic => quad_form(&self.config.q, x) + quad_form(&self.config.r, u),
            LinearCost::L1 => l1(x) + l1(u),
        }
    }

    fn terminal_cost(&self, x: &[f64]) -> f64 {
        match self.cost {
            LinearCost::Quadratic => quad_form(&self.config.q, x),
            LinearCost::L1 => l1(x),
        }
    }
}

/// Draws states with norm in `[0.3, 1]`, positive scales in `[0.25, 4]`.
#[derive(Debug, Clone)]
pub struct LinearSampler {
    pub n: usize,
    pub inputs: Vec<Point>,
}

impl LinearSampler {
    pub fn new(system: &LinearSystem) -> Self {
        LinearSampler {
            n: system.config.n,
            inputs: system.inputs.clone(),
        }
    }
}

impl Sampler for LinearSampler {
    type Input = Point;

    fn state(&self, rng: &mut SampleRng) -> Point {
        use rand::Rng;
        let r = rng.random_range(0.3..1.0);
        if self.n == 1 {
            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            point(&[s * r])
        } else {
            let t = super::random_angle(rng);
            point(&[r * t.cos(), r * t.sin()])
        }
    }

    fn input(&self, rng: &mut SampleRng) -> Point {
        pick(rng, &self.inputs)
    }

    fn noise(&self, _rng: &mut SampleRng) -> Point {
        Point::from_elem(0.0, self.n)
    }

    fn element(&self, rng: &mut SampleRng) -> GroupElement {
        use rand::Rng;
        GroupElement::new(&[rng.random_range(-2.0f64..2.0).exp2()])
    }

    fn reduced(&self, rng: &mut SampleRng) -> Point {
        use rand::Rng;
        if self.n == 1 {
            point(&[if rng.random_bool(0.5) { 1.0 } else { -1.0 }])
        } else {
            point(&[super::random_angle(rng)])
        }
    }
}
