//! Gauss–Hermite rules for expectations over Gaussian noise.

use nalgebra::DMatrix;

use super::NoiseModel;
use crate::{Error, Point, Result};

/// Nodes and weights of the `n`-point Gauss–Hermite rule for the standard
/// normal distribution (probabilists' weight `exp(-x²/2) / √(2π)`).
///
/// Computed by Golub–Welsch: the nodes are the eigenvalues of the Jacobi
/// matrix with off-diagonal `√k`, the weights the squared first components of
/// its normalized eigenvectors. The result is symmetrized so that nodes are
/// exactly antisymmetric and weights sum to one.
pub fn standard_normal_rule(n: usize) -> Result<Vec<(f64, f64)>> {
    if n < 1 {
        return Err(Error::Noise("a quadrature rule needs at least one node".into()));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rule = pairs.clone();
    for i in 0..n {
        let j = n - 1 - i;
        rule[i].0 = 0.5 * (pairs[i].0 - pairs[j].0);
        rule[i].1 = 0.5 * (pairs[i].1 + pairs[j].1);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = 0.0;
    }
    let total: f64 = rule.iter().map(|p| p.1).sum();
    for p in &mut rule {
        p.1 /= total;
    }
    Ok(rule)
}

/// Weighted noise samples realizing `E[·]` over the model: a single zero
/// node for deterministic models, the tensor product of 1-D rules scaled to
/// `N(0, σ²)` otherwise. Nodes are ordered row-major over coordinates.
pub fn quadrature_nodes(noise: &NoiseModel) -> Result<Vec<(f64, Point)>> {
    noise.validate()?;
    match *noise {
        NoiseModel::Deterministic { dim } => Ok(vec![(1.0, Point::from_elem(0.0, dim))]),
        NoiseModel::IsotropicGaussian {
            dim,
            sigma,
            nodes_per_dim,
        } => {
            let rule = standard_normal_rule(nodes_per_dim)?;
            let mut nodes = vec![(1.0, Point::new())];
            for _ in 0..dim {
                nodes = nodes
                    .into_iter()
                    .flat_map(|(w, p)| {
                        rule.iter().map(move |&(x, wx)| {
                            let mut q = p.clone();
                            q.push(sigma * x);
                            (w * wx, q)
                        })
                    })
                    .collect();
            }
            Ok(nodes)
        }
    }
}
