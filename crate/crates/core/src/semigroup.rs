//! Diagonal self-adjoint generator and its contraction semigroup.
//!
//! `A e_k = -mu_k e_k` with `mu_k >= 0`; the default is the Dirichlet
//! Laplacian spectrum `mu_k = (k pi)^2` on the unit interval. Self-adjoint
//! diagonal means `A* = A`, so the domain `D(A*)` carries the graph norm
//! `|x|^2 + |A x|^2` and its dual norm weights mode `k` by
//! `(1 + mu_k^2)^{-1/2}`. Those two norms drive every chi-statistic in the
//! crate.

use crate::error::{Error, Result};
use crate::spectral::SpectralVector;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalGenerator {
    mu: Vec<f64>,
}

impl DiagonalGenerator {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidArgument(
                "generator eigenvalues must be finite and nonnegative".into(),
            ));
        }
        Ok(DiagonalGenerator { mu })
    }

    /// Dirichlet heat spectrum `mu_k = (k pi)^2`, `k = 1..n`.
    pub fn dirichlet_heat(n: usize) -> Self {
        DiagonalGenerator {
            mu: (1..=n)
                .map(|k| (k as f64 * std::f64::consts::PI).powi(2))
                .collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        DiagonalGenerator { mu: vec![0.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
}

/// `e^{tA} v`: coefficient-wise decay `e^{-mu_k t} v_k`. Contraction for
/// `t >= 0`; rejects negative times.
pub fn apply_semigroup(t: f64, v: &SpectralVector, gen: &DiagonalGenerator) -> Result<SpectralVector> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "semigroup time must be nonnegative, got {t}"
        )));
    }
    if v.dim() != gen.dim() {
        return Err(Error::DimensionMismatch(format!(
            "semigroup: {} modes vs vector of {}",
            gen.dim(),
            v.dim()
        )));
    }
    let coeffs = gen
        .mu()
        .iter()
        .zip(v.coeffs())
        .map(|(mu, c)| (-mu * t).exp() * c)
        .collect();
    SpectralVector::new(coeffs)
}

/// `A* v = -mu_k v_k`. At finite truncation every vector lies in `D(A*)`.
pub fn apply_generator_adjoint(v: &SpectralVector, gen: &DiagonalGenerator) -> Result<SpectralVector> {
    if v.dim() != gen.dim() {
        return Err(Error::DimensionMismatch(format!(
            "generator adjoint: {} modes vs vector of {}",
            gen.dim(),
            v.dim()
        )));
    }
    SpectralVector::new(
        gen.mu()
            .iter()
            .zip(v.coeffs())
            .map(|(mu, c)| -mu * c)
            .collect(),
    )
}

/// Graph norm on `D(A*)`: `sqrt(sum (1 + mu_k^2) v_k^2)`.
pub fn graph_norm(v: &SpectralVector, gen: &DiagonalGenerator) -> Result<f64> {
    if v.dim() != gen.dim() {
        return Err(Error::DimensionMismatch("graph norm".into()));
    }
    Ok(gen
        .mu()
        .iter()
        .zip(v.coeffs())
        .map(|(mu, c)| (1.0 + mu * mu) * c * c)
        .sum::<f64>()
        .sqrt())
}

/// Dual graph norm on `D(A*)*`: `sqrt(sum v_k^2 / (1 + mu_k^2))`. Always
/// bounded by the `H` norm (embedding constant 1).
pub fn dual_graph_norm(v: &SpectralVector, gen: &DiagonalGenerator) -> Result<f64> {
    if v.dim() != gen.dim() {
        return Err(Error::DimensionMismatch("dual graph norm".into()));
    }
    Ok(gen
        .mu()
        .iter()
        .zip(v.coeffs())
        .map(|(mu, c)| c * c / (1.0 + mu * mu))
        .sum::<f64>()
        .sqrt())
}
