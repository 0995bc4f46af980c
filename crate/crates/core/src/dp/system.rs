use std::fmt::Debug;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::lie::So3;
use crate::{Error, Point, Result};

/// An element of a finite input set.
pub trait ControlInput: Clone + Debug + Send + Sync {
    /// Largest componentwise difference; used by the invariance checks.
    fn distance(&self, other: &Self) -> f64;

    /// Flat numeric components, as written to rollout CSV files.
    fn components(&self) -> Vec<f64>;
}

impl ControlInput for Point {
    fn distance(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn components(&self) -> Vec<f64> {
        self.to_vec()
    }
}

impl ControlInput for So3 {
    fn distance(&self, other: &Self) -> f64 {
        So3::distance(self, other)
    }

    fn components(&self) -> Vec<f64> {
        // row-major
        let m = self.matrix();
        (0..3).flat_map(|i| (0..3).map(move |j| m[(i, j)])).collect()
    }
}

/// Distribution of the disturbance `w_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel {
    /// `w_k` is the zero vector.
    Deterministic { dim: usize },
    /// `w_k ~ N(0, σ² I)`; expectations use a tensor-product Gauss–Hermite rule
    /// with `nodes_per_dim` nodes per coordinate.
    IsotropicGaussian {
        dim: usize,
        sigma: f64,
        nodes_per_dim: usize,
    },
}

impl NoiseModel {
    pub fn dim(&self) -> usize {
        match *self {
            NoiseModel::Deterministic { dim } | NoiseModel::IsotropicGaussian { dim, .. } => dim,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, NoiseModel::Deterministic { .. })
    }

    pub fn validate(&self) -> Result<()> {
        if let NoiseModel::IsotropicGaussian {
            sigma,
            nodes_per_dim,
            ..
        } = *self
        {
            if nodes_per_dim < 1 {
                return Err(Error::Noise("nodes_per_dim must be at least 1".into()));
            }
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::Noise(format!("sigma must be positive, got {sigma}")));
            }
        }
        Ok(())
    }

    /// Draws one disturbance from the true distribution.
    pub fn sample(&self, rng: &mut impl Rng) -> Point {
        match *self {
            NoiseModel::Deterministic { dim } => Point::from_elem(0.0, dim),
            NoiseModel::IsotropicGaussian { dim, sigma, .. } => {
                let normal = Normal::new(0.0, sigma).expect("validated sigma");
                (0..dim).map(|_| normal.sample(rng)).collect()
            }
        }
    }
}

/// Discrete-time system `x_{k+1} = f_k(x_k, u_k, w_k)` with additive cost
/// `g_N(x_N) + Σ g_k(x_k, u_k, w_k)` and a finite input set.
pub trait ControlSystem: Sync {
    type Input: ControlInput;

    fn state_dim(&self) -> usize;

    fn horizon(&self) -> usize;

    fn inputs(&self) -> &[Self::Input];

    fn noise(&self) -> &NoiseModel;

    fn step(&self, k: usize, x: &[f64], u: &Self::Input, w: &[f64]) -> Point;

    fn stage_cost(&self, k: usize, x: &[f64], u: &Self::Input, w: &[f64]) -> f64;

    fn terminal_cost(&self, x: &[f64]) -> f64;
}

/// Borrows a system with a different horizon.
#[derive(Debug, Clone, Copy)]
pub struct WithHorizon<'a, S> {
    pub system: &'a S,
    pub horizon: usize,
}

impl<'a, S> WithHorizon<'a, S> {
    pub fn new(system: &'a S, horizon: usize) -> Self {
        WithHorizon { system, horizon }
    }
}

impl<S: ControlSystem> ControlSystem for WithHorizon<'_, S> {
    type Input = S::Input;

    fn state_dim(&self) -> usize {
        self.system.state_dim()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn inputs(&self) -> &[Self::Input] {
        self.system.inputs()
    }

    fn noise(&self) -> &NoiseModel {
        self.system.noise()
    }

    fn step(&self, k: usize, x: &[f64], u: &Self::Input, w: &[f64]) -> Point {
        self.system.step(k, x, u, w)
    }

    fn stage_cost(&self, k: usize, x: &[f64], u: &Self::Input, w: &[f64]) -> f64 {
        self.system.stage_cost(k, x, u, w)
    }

    fn terminal_cost(&self, x: &[f64]) -> f64 {
        self.system.terminal_cost(x)
    }
}
