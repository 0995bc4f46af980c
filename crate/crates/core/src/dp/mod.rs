//! Backward induction over gridded state spaces: the full solver, the
//! reduced solver on invariant coordinates, and the equivariant variant for
//! scaling symmetries. Also the rollout simulator and the exhaustive oracle.

mod brute;
mod quadrature;
mod rollout;
mod solve;
mod system;

pub use brute::{brute_force_value, LEAF_LIMIT};
pub use quadrature::{quadrature_nodes, standard_normal_rule};
pub use rollout::{lifted_policy, table_policy, simulate_rollout, Rollout};
pub use solve::{
    backward_induction_equivariant, backward_induction_full, backward_induction_reduced,
    expected_q, Retain, SolveOptions, SolveResult, StageDiagnostics,
};
pub use system::{ControlInput, ControlSystem, NoiseModel, WithHorizon};

use crate::symmetry::GroupElement;
use crate::{Error, Result};

/// Cost multiplier `l(α) = α^p` for a scaling symmetry under which
/// `J(φ_α(x)) = l(α) J(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivariantScaling {
    exponent: f64,
}

impl EquivariantScaling {
    pub fn power(exponent: f64) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::InvalidInput(format!(
                "scaling exponent must be finite, got {exponent}"
            )));
        }
        Ok(EquivariantScaling { exponent })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn l(&self, alpha: f64) -> f64 {
        if self.exponent == 1.0 {
            alpha
        } else if self.exponent == 2.0 {
            alpha * alpha
        } else {
            alpha.powf(self.exponent)
        }
    }

    /// `l` evaluated at a scaling-group element.
    pub fn factor(&self, g: &GroupElement) -> f64 {
        self.l(g.params()[0])
    }
}
