//! Concrete systems: a pair of Dubins vehicles in formation, MRI
//! fingerprinting with sensitivity states, and three small verification
//! problems (a rotationally symmetric 2-D rotor, linear-quadratic regulation
//! and an L1-regularized linear system).

pub mod dubins;
pub mod linear;
pub mod mri;
pub mod rotor;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::lie::wrap_angle;
use crate::symmetry::GroupElement;
use crate::{Error, Point, Result};

pub use dubins::{DubinsConfig, DubinsFrame, DubinsGroup, DubinsPair, DubinsSampler};
pub use linear::{InputRange, LinearConfig, LinearCost, LinearSampler, LinearSystem};
pub use mri::{mri_singular_hits, MriConfig, MriFrame, MriGroup, MriSampler, MriSystem};
pub use rotor::{Rotor2D, RotorConfig, RotorFrame, RotorGroup, RotorSampler};

/// Registered system names and their parameter blocks, as they appear in a
/// run configuration under `[system]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum SystemConfig {
    DubinsPair(DubinsConfig),
    MriFingerprint(MriConfig),
    Rotor2d(RotorConfig),
    Lqr(LinearConfig),
    L1(LinearConfig),
}

impl SystemConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SystemConfig::DubinsPair(_) => "dubins-pair",
            SystemConfig::MriFingerprint(_) => "mri-fingerprint",
            SystemConfig::Rotor2d(_) => "rotor2d",
            SystemConfig::Lqr(_) => "lqr",
            SystemConfig::L1(_) => "l1",
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            SystemConfig::DubinsPair(c) => c.horizon,
            SystemConfig::MriFingerprint(c) => c.horizon,
            SystemConfig::Rotor2d(c) => c.horizon,
            SystemConfig::Lqr(c) | SystemConfig::L1(c) => c.horizon,
        }
    }
}

pub const NAMES: [&str; 5] = ["dubins-pair", "mri-fingerprint", "rotor2d", "lqr", "l1"];

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn rotate(alpha: f64, a: f64, b: f64) -> (f64, f64) {
    let (s, c) = alpha.sin_cos();
    (c * a - s * b, s * a + c * b)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    require(v.is_finite(), || format!("{name} must be finite, got {v}"))
}

/// One-parameter rotation group shared by the rotor and MRI actions.
fn so2_compose(a: &GroupElement, b: &GroupElement) -> GroupElement {
    GroupElement::new(&[wrap_angle(a.0[0] + b.0[0])])
}

fn so2_inverse(a: &GroupElement) -> GroupElement {
    GroupElement::new(&[wrap_angle(-a.0[0])])
}

fn so2_distance(a: &GroupElement, b: &GroupElement) -> f64 {
    crate::lie::angle_diff(a.0[0], b.0[0]).abs()
}

fn random_angle(rng: &mut impl rand::Rng) -> f64 {
    rng.random_range(0.0..TAU)
}

fn pick<T: Clone>(rng: &mut impl rand::Rng, items: &[T]) -> T {
    items[rng.random_range(0..items.len())].clone()
}

fn point(values: &[f64]) -> Point {
    Point::from_slice(values)
}
