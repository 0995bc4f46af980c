//! Finite-horizon stochastic dynamic programming on rectangular grids, with
//! symmetry reduction through Cartan moving frames.
//!
//! A control system `x_{k+1} = f_k(x_k, u_k, w_k)` with additive stage costs is
//! solved by backward induction over a gridded state space. When the system is
//! invariant under a transformation group, the recursion can instead run over
//! the invariants `ρ(x)` of a moving frame, on a grid of dimension `n - r`, and
//! the value function and policy are lifted back to the full state space.
//!
//! Module map:
//!
//! - [`grid`]: axes, grids, multilinear interpolation and the `SRDP` table files.
//! - [`symmetry`]: transformation groups, moving frames, numeric invariance
//!   checks and lifting.
//! - [`dp`]: systems, noise quadrature, the full / reduced / equivariant solvers,
//!   rollouts and the brute-force oracle.
//! - [`lie`]: SE(2) and SO(3) arithmetic and formation invariants.
//! - [`systems`]: the shipped example systems.
//! - [`cli`]: run configuration, manifests and the `solve`/`simulate`/`check`/
//!   `export` commands.

pub mod cli;
pub mod dp;
pub mod error;
pub mod grid;
pub mod lie;
pub mod symmetry;
pub mod systems;

pub use error::{Error, Result};

/// Small stack-allocated real vector used for states, noise samples,
/// reduced coordinates and group parameters.
pub type Point = smallvec::SmallVec<[f64; 8]>;

/// Builds a [`Point`] from a slice.
pub fn point(values: &[f64]) -> Point {
    Point::from_slice(values)
}
