//! SE(2) and SO(3) arithmetic, the Dubins input and noise matrices, and
//! relative-pose invariants of multi-agent formations.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{Matrix3, Vector3};

use crate::{Error, Result};

/// Maps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed difference `a - b` wrapped into `[-π, π)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    if d >= std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

/// Planar rigid motion in `(θ, z, y)` chart form; `θ` is kept in `[0, 2π)`.
///
/// The matrix realization is
///
/// ```text
/// [cos θ  -sin θ  z]
/// [sin θ   cos θ  y]
/// [  0       0    1]
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Se2 {
    pub theta: f64,
    pub z: f64,
    pub y: f64,
}

impl Se2 {
    pub fn new(theta: f64, z: f64, y: f64) -> Self {
        Se2 {
            theta: wrap_angle(theta),
            z,
            y,
        }
    }

    pub fn identity() -> Self {
        Se2 {
            theta: 0.0,
            z: 0.0,
            y: 0.0,
        }
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &Se2) -> Se2 {
        let (s, c) = self.theta.sin_cos();
        Se2 {
            theta: wrap_angle(self.theta + other.theta),
            z: self.z + c * other.z - s * other.y,
            y: self.y + s * other.z + c * other.y,
        }
    }

    pub fn inverse(&self) -> Se2 {
        let (s, c) = self.theta.sin_cos();
        Se2 {
            theta: wrap_angle(-self.theta),
            z: -(c * self.z + s * self.y),
            y: -(-s * self.z + c * self.y),
        }
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let (s, c) = self.theta.sin_cos();
        Matrix3::new(c, -s, self.z, s, c, self.y, 0.0, 0.0, 1.0)
    }

    /// Reads a homogeneous matrix; the rotation block is trusted to be a
    /// rotation.
    pub fn from_matrix(m: &Matrix3<f64>) -> Se2 {
        Se2::new(m[(1, 0)].atan2(m[(0, 0)]), m[(0, 2)], m[(1, 2)])
    }

    /// Pose components in state order `(z, y, θ)`.
    pub fn pose(&self) -> [f64; 3] {
        [self.z, self.y, self.theta]
    }

    pub fn from_pose(pose: &[f64]) -> Se2 {
        Se2::new(pose[2], pose[0], pose[1])
    }

    /// Distance in the chart with the angle compared modulo 2π.
    pub fn distance(&self, other: &Se2) -> f64 {
        angle_diff(self.theta, other.theta)
            .abs()
            .max((self.z - other.z).abs())
            .max((self.y - other.y).abs())
    }
}

/// Input matrix `M(v, s)` of a Dubins vehicle: advance `v` along the body
/// axis, then turn by `(v / L) tan s`.
pub fn dubins_input_matrix(v: f64, s: f64, turning: f64) -> Result<Se2> {
    if s.abs() >= FRAC_PI_2 {
        return Err(Error::InvalidInput(format!(
            "steering angle {s} outside (-π/2, π/2)"
        )));
    }
    if turning <= 0.0 || !turning.is_finite() {
        return Err(Error::InvalidInput(format!(
            "turning-radius parameter must be positive, got {turning}"
        )));
    }
    Ok(Se2::new(v / turning * s.tan(), v, 0.0))
}

/// Heading noise matrix `W(w)`: pure rotation by `w`.
pub fn heading_noise_matrix(w: f64) -> Se2 {
    Se2::new(w, 0.0, 0.0)
}

/// Poses of `K ≥ 2` agents.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationState {
    agents: Vec<Se2>,
}

impl FormationState {
    pub fn new(agents: Vec<Se2>) -> Result<Self> {
        if agents.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a formation needs at least two agents, got {}",
                agents.len()
            )));
        }
        Ok(FormationState { agents })
    }

    pub fn agents(&self) -> &[Se2] {
        &self.agents
    }

    /// Applies `A` to every agent from the left.
    pub fn left_multiply(&self, a: &Se2) -> FormationState {
        FormationState {
            agents: self.agents.iter().map(|x| a.compose(x)).collect(),
        }
    }
}

/// Relative configurations `(X¹)⁻¹ Xʲ` for `j = 2..K`.
pub fn formation_invariants(state: &FormationState) -> Vec<Se2> {
    let lead = state.agents[0].inverse();
    state.agents[1..].iter().map(|x| lead.compose(x)).collect()
}

static SO3_RENORMALIZATIONS: AtomicU64 = AtomicU64::new(0);

/// Number of times [`So3::compose`] had to re-orthonormalize a product.
pub fn so3_renormalizations() -> u64 {
    SO3_RENORMALIZATIONS.load(Ordering::Relaxed)
}

/// Orthogonality drift above which products are re-orthonormalized.
const SO3_DRIFT: f64 = 1e-9;

/// Rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3(Matrix3<f64>);

impl So3 {
    pub fn identity() -> Self {
        So3(Matrix3::identity())
    }

    /// Wraps a matrix, checking `‖RᵀR − I‖ ≤ 1e-10` and `det = 1 ± 1e-10`.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let r = So3(m);
        if r.orthogonality_error() > 1e-10 || (m.determinant() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!("not a rotation: {m}")));
        }
        Ok(r)
    }

    pub fn rz(a: f64) -> Self {
        let (s, c) = a.sin_cos();
        So3(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    pub fn ry(b: f64) -> Self {
        let (s, c) = b.sin_cos();
        So3(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn rx(d: f64) -> Self {
        let (s, c) = d.sin_cos();
        So3(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    /// `Rz(α) · Ry(β) · Rx(δ)`.
    pub fn from_euler(alpha: f64, beta: f64, delta: f64) -> Self {
        So3(Self::rz(alpha).0 * Self::ry(beta).0 * Self::rx(delta).0)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn compose(&self, other: &So3) -> So3 {
        let product = So3(self.0 * other.0);
        if product.orthogonality_error() > SO3_DRIFT {
            SO3_RENORMALIZATIONS.fetch_add(1, Ordering::Relaxed);
            return product.renormalized();
        }
        product
    }

    pub fn inverse(&self) -> So3 {
        So3(self.0.transpose())
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// Frobenius norm of `RᵀR − I`.
    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).norm()
    }

    /// Nearest rotation in the Frobenius sense.
    pub fn renormalized(&self) -> So3 {
        let svd = self.0.svd(true, true);
        let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
        let mut r = u * v_t;
        if r.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            r = u * v_t;
        }
        So3(r)
    }

    /// Largest entrywise difference.
    pub fn distance(&self, other: &So3) -> f64 {
        (self.0 - other.0).amax()
    }
}
