//! Dilations `x -> αx`, `u -> αu` (α > 0) and the unit-sphere moving frame,
//! for systems whose costs are equivariant rather than invariant.

use std::f64::consts::TAU;

use super::{GroupElement, MovingFrame, TransformationGroup};
use crate::grid::{Axis, GridSpec};
use crate::lie::{angle_diff, wrap_angle};
use crate::{Error, Point, Result};

/// Positive reals acting by scaling on states and inputs of dimension 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingGroup {
    n: usize,
}

impl ScalingGroup {
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::InvalidInput(format!(
                "scaling reduction supports state dimension 1 or 2, got {n}"
            )));
        }
        Ok(ScalingGroup { n })
    }

    fn direction(&self, x: &[f64]) -> Point {
        if self.n == 1 {
            Point::from_slice(&[x[0].signum()])
        } else {
            Point::from_slice(&[wrap_angle(x[1].atan2(x[0]))])
        }
    }
}

fn scale(a: &GroupElement, x: &[f64]) -> Point {
    x.iter().map(|v| a.0[0] * v).collect()
}

impl TransformationGroup for ScalingGroup {
    type Input = Point;

    fn dim(&self) -> usize {
        1
    }

    fn state_dim(&self) -> usize {
        self.n
    }

    fn identity(&self) -> GroupElement {
        GroupElement::new(&[1.0])
    }

    fn compose(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement::new(&[a.0[0] * b.0[0]])
    }

    fn inverse(&self, a: &GroupElement) -> GroupElement {
        GroupElement::new(&[1.0 / a.0[0]])
    }

    fn act_state(&self, a: &GroupElement, x: &[f64]) -> Point {
        scale(a, x)
    }

    fn act_input(&self, a: &GroupElement, u: &Point) -> Point {
        scale(a, u)
    }

    /// Norm of `αx`.
    fn split_a(&self, a: &GroupElement, x: &[f64]) -> Point {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        Point::from_slice(&[a.0[0] * norm])
    }

    /// Direction of `αx`: its sign in 1-D, its polar angle in 2-D.
    fn split_b(&self, a: &GroupElement, x: &[f64]) -> Point {
        self.direction(&scale(a, x))
    }
}

/// Moving frame onto the unit sphere: `γ(x) = 1/‖x‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereFrame {
    group: ScalingGroup,
    level: [f64; 1],
}

impl SphereFrame {
    pub fn new(group: ScalingGroup) -> Self {
        SphereFrame {
            group,
            level: [1.0],
        }
    }

    /// Default grid over the reduced coordinate: `{-1, +1}` in 1-D, the
    /// periodic polar angle with `count` nodes in 2-D.
    pub fn reduced_grid(&self, count: usize) -> Result<GridSpec> {
        let axis = if self.group.n == 1 {
            Axis::new(-1.0, 1.0, 2)?
        } else {
            Axis::periodic(0.0, TAU, count)?
        };
        GridSpec::new(vec![axis])
    }
}

impl MovingFrame for SphereFrame {
    type Group = ScalingGroup;

    fn group(&self) -> &ScalingGroup {
        &self.group
    }

    fn level(&self) -> &[f64] {
        &self.level
    }

    /// One coordinate in both cases: the sign in 1-D is a discrete axis.
    fn reduced_dim(&self) -> usize {
        1
    }

    fn gamma(&self, x: &[f64]) -> Result<GroupElement> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Singular(format!(
                "scaling frame undefined at {x:?} (norm {norm})"
            )));
        }
        Ok(GroupElement::new(&[1.0 / norm]))
    }

    fn rho(&self, x: &[f64]) -> Result<Point> {
        self.gamma(x)?;
        Ok(self.group.direction(x))
    }

    fn rho_bar_inv(&self, reduced: &[f64]) -> Result<Point> {
        if self.group.n == 1 {
            if reduced[0] == 0.0 || !reduced[0].is_finite() {
                return Err(Error::Singular(format!(
                    "no unit point with sign {}",
                    reduced[0]
                )));
            }
            Ok(Point::from_slice(&[reduced[0].signum()]))
        } else {
            let (s, c) = reduced[0].sin_cos();
            Ok(Point::from_slice(&[c, s]))
        }
    }

    fn on_cross_section(&self, x: &[f64]) -> bool {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        (norm - 1.0).abs() <= 1e-12
    }

    fn reduced_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        if self.group.n == 1 {
            (a[0] - b[0]).abs()
        } else {
            angle_diff(a[0], b[0]).abs()
        }
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn frame_normalizes_to_unit_sphere() {
        let frame = SphereFrame::new(ScalingGroup::new(2).unwrap());
        let x = [3.0, -4.0];
        let g = frame.gamma(&x).unwrap();
        assert_abs_diff_eq!(g.0[0], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(frame.group().split_a(&g, &x)[0], 1.0, epsilon = 1e-15);
        let r = frame.rho(&x).unwrap();
        let z = frame.rho_bar_inv(&r).unwrap();
        assert_abs_diff_eq!(z[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(z[1], -0.8, epsilon = 1e-15);
        assert!(frame.gamma(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn one_dimensional_sphere_is_two_points() {
        let frame = SphereFrame::new(ScalingGroup::new(1).unwrap());
        assert_eq!(frame.rho(&[-2.5]).unwrap().as_slice(), &[-1.0]);
        assert_eq!(frame.rho_bar_inv(&[1.0]).unwrap().as_slice(), &[1.0]);
        let grid = frame.reduced_grid(0).unwrap();
        assert_eq!(grid.len(), 2);
        assert!(ScalingGroup::new(3).is_err());
    }
}
