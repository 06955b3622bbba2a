//! The epsilon-regularized estimators that define the calculus: forward
//! integrals, covariations, scalar/tensor/chi quadratic variations, the
//! dual-graph-norm `A(eps)` statistic, reference Ito sums, and Young
//! integrals via refinement.
//!
//! Discretization conventions, shared by every estimator here:
//! - `eps` is an exact grid multiple `m * dt`, `m >= 4`;
//! - paths are extended past the horizon by their boundary values, so an
//!   increment window crossing `T` is clamped;
//! - every curve starts at 0 at `t = 0`;
//! - estimators are exactly bilinear in their path arguments at the
//!   discrete level.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::noise::{fit_slope, holder_exponent_estimate, ScalarPath, VectorPath};
use crate::semigroup::{dual_graph_norm, DiagonalGenerator};
use crate::spectral::{pair_cross, SpectralVector, TensorElement};

/// One estimator curve at a fixed regularization width.
#[derive(Debug, Clone)]
pub struct EpsCurve<T> {
    /// Grid multiple, `eps = m * dt`.
    pub m: usize,
    pub eps: f64,
    /// Node-indexed values; `values[0] = 0`.
    pub values: Vec<T>,
}

impl EpsCurve<f64> {
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("curve nonempty")
    }
}

fn check_eps(grid: &TimeGrid, m: usize) -> Result<()> {
    if m < 1 || m >= grid.steps() {
        return Err(Error::InvalidArgument(format!(
            "epsilon multiple {m} outside 1..{}",
            grid.steps()
        )));
    }
    Ok(())
}

fn common_grid(a: &TimeGrid, b: &TimeGrid) -> Result<TimeGrid> {
    if a != b {
        return Err(Error::DimensionMismatch(
            "estimator arguments live on different grids".into(),
        ));
    }
    Ok(*a)
}

/// Forward integral estimate of a scalar integrand against a scalar
/// integrator: cumulative `sum dt * X(t_j) (Y(t_j + eps) - Y(t_j)) / eps`.
pub fn forward_integral_scalar(
    x: &ScalarPath,
    y: &ScalarPath,
    m: usize,
) -> Result<EpsCurve<f64>> {
    let grid = common_grid(&x.grid, &y.grid)?;
    check_eps(&grid, m)?;
    let dt = grid.dt();
    let eps = m as f64 * dt;
    let w = dt / eps;
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..grid.steps() {
        acc += w * x.values[j] * (y.at(j as i64 + m as i64) - y.values[j]);
        values.push(acc);
    }
    Ok(EpsCurve { m, eps, values })
}

/// Forward integral of a scalar integrand against a vector integrator.
pub fn forward_integral_scalar_vector(
    x: &ScalarPath,
    y: &VectorPath,
    m: usize,
) -> Result<EpsCurve<SpectralVector>> {
    let grid = common_grid(&x.grid, &y.grid)?;
    check_eps(&grid, m)?;
    let dt = grid.dt();
    let eps = m as f64 * dt;
    let w = dt / eps;
    let n = y.dim();
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut acc = SpectralVector::zeros(n);
    values.push(acc.clone());
    for j in 0..grid.steps() {
        let incr = y.at(j as i64 + m as i64).sub(&y.values[j]);
        acc.axpy(w * x.values[j], &incr);
        values.push(acc.clone());
    }
    Ok(EpsCurve { m, eps, values })
}

/// Forward integral of a diagonal-operator-valued integrand against a
/// vector integrator: `sum dt * L(t_j) (Y(t_j + eps) - Y(t_j)) / eps`.
pub fn forward_integral_operator(
    ops: &[crate::spectral::OperatorDiagonal],
    y: &VectorPath,
    m: usize,
) -> Result<EpsCurve<SpectralVector>> {
    if ops.len() != y.grid.n_nodes() {
        return Err(Error::DimensionMismatch(
            "operator integrand node count".into(),
        ));
    }
    check_eps(&y.grid, m)?;
    let dt = y.grid.dt();
    let eps = m as f64 * dt;
    let w = dt / eps;
    let n = y.dim();
    let mut values = Vec::with_capacity(y.grid.n_nodes());
    let mut acc = SpectralVector::zeros(n);
    values.push(acc.clone());
    for j in 0..y.grid.steps() {
        let incr = y.at(j as i64 + m as i64).sub(&y.values[j]);
        acc.axpy(w, &ops[j].apply(&incr)?);
        values.push(acc.clone());
    }
    Ok(EpsCurve { m, eps, values })
}

/// Forward integral of the pairing `<X(t_j), dY>`: scalar curve from two
/// vector paths.
pub fn forward_integral_pairing(
    x: &VectorPath,
    y: &VectorPath,
    m: usize,
) -> Result<EpsCurve<f64>> {
    let grid = common_grid(&x.grid, &y.grid)?;
    check_eps(&grid, m)?;
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch("pairing dimensions".into()));
    }
    let dt = grid.dt();
    let eps = m as f64 * dt;
    let w = dt / eps;
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..grid.steps() {
        let incr = y.at(j as i64 + m as i64).sub(&y.values[j]);
        acc += w * crate::spectral::inner(&x.values[j], &incr)?;
        values.push(acc);
    }
    Ok(EpsCurve { m, eps, values })
}

/// Reference discrete Ito sum `sum X(t_j)(M(t_{j+1}) - M(t_j))`, scalar.
pub fn ito_sum_scalar(x: &ScalarPath, mart: &ScalarPath) -> Result<Vec<f64>> {
    let grid = common_grid(&x.grid, &mart.grid)?;
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..grid.steps() {
        acc += x.values[j] * (mart.values[j + 1] - mart.values[j]);
        values.push(acc);
    }
    Ok(values)
}

/// Ito sum of the pairing `<Z(t_j), dM>` for vector integrand and
/// integrator.
pub fn ito_sum_pairing(z: &VectorPath, mart: &VectorPath) -> Result<Vec<f64>> {
    let grid = common_grid(&z.grid, &mart.grid)?;
    if z.dim() != mart.dim() {
        return Err(Error::DimensionMismatch("ito pairing dimensions".into()));
    }
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..grid.steps() {
        let incr = mart.values[j + 1].sub(&mart.values[j]);
        acc += crate::spectral::inner(&z.values[j], &incr)?;
        values.push(acc);
    }
    Ok(values)
}

/// Covariation estimate of two real paths:
/// cumulative `sum dt (X(t_j+eps) - X(t_j))(Y(t_j+eps) - Y(t_j)) / eps`.
pub fn covariation_eps(x: &ScalarPath, y: &ScalarPath, m: usize) -> Result<EpsCurve<f64>> {
    let grid = common_grid(&x.grid, &y.grid)?;
    check_eps(&grid, m)?;
    let dt = grid.dt();
    let eps = m as f64 * dt;
    let w = dt / eps;
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..grid.steps() {
        let dx = x.at(j as i64 + m as i64) - x.values[j];
        let dy = y.at(j as i64 + m as i64) - y.values[j];
        acc += w * dx * dy;
        values.push(acc);
    }
    Ok(EpsCurve { m, eps, values })
}

/// Which norm squares the increments of a vector path in the scalar
/// quadratic variation estimator.
#[derive(Debug, Clone, Copy)]
pub enum IncrementNorm<'a> {
    /// Ambient Hilbert norm.
    H,
    /// Dual graph norm of the generator domain.
    DualGraph(&'a DiagonalGenerator),
}

/// Scalar quadratic variation of a vector path with the selected norm.
pub fn scalar_qv_eps(
    x: &VectorPath,
    m: usize,
    norm: IncrementNorm<'_>,
) -> Result<EpsCurve<f64>> {
    check_eps(&x.grid, m)?;
    let dt = x.grid.dt();
    let eps = m as f64 * dt;
    let w = dt / eps;
    let mut values = Vec::with_capacity(x.grid.n_nodes());
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..x.grid.steps() {
        let incr = x.at(j as i64 + m as i64).sub(&x.values[j]);
        let nrm = match norm {
            IncrementNorm::H => incr.norm(),
            IncrementNorm::DualGraph(gen) => dual_graph_norm(&incr, gen)?,
        };
        acc += w * nrm * nrm;
        values.push(acc);
    }
    Ok(EpsCurve { m, eps, values })
}

/// Tensor covariation estimate: cumulative
/// `sum dt (dX (x) dY) / eps` as a tensor-element curve.
pub fn tensor_cov_eps(
    x: &VectorPath,
    y: &VectorPath,
    m: usize,
) -> Result<EpsCurve<TensorElement>> {
    let grid = common_grid(&x.grid, &y.grid)?;
    check_eps(&grid, m)?;
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch("tensor covariation dims".into()));
    }
    let dt = grid.dt();
    let eps = m as f64 * dt;
    let w = dt / eps;
    let n = x.dim();
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut acc = TensorElement::zeros(n);
    values.push(acc.clone());
    for j in 0..grid.steps() {
        let dx = x.at(j as i64 + m as i64).sub(&x.values[j]);
        let dy = y.at(j as i64 + m as i64).sub(&y.values[j]);
        acc.axpy(w, &crate::spectral::cross_tensor(&dx, &dy)?);
        values.push(acc.clone());
    }
    Ok(EpsCurve { m, eps, values })
}

/// Chi-covariation estimate: the tensor-covariation integrand paired
/// against a fixed symmetric functional `phi`, accumulated in time.
/// `phi` is given by its coefficient matrix on the ambient basis.
pub fn chi_cov_eps(
    x: &VectorPath,
    y: &VectorPath,
    phi: &TensorElement,
    m: usize,
) -> Result<EpsCurve<f64>> {
    let grid = common_grid(&x.grid, &y.grid)?;
    check_eps(&grid, m)?;
    if x.dim() != y.dim() || x.dim() != phi.dim() {
        return Err(Error::DimensionMismatch("chi covariation dims".into()));
    }
    if !phi.is_symmetric() {
        return Err(Error::NotSymmetric(format!(
            "chi functional, defect {:.3e}",
            phi.symmetry_defect()
        )));
    }
    let dt = grid.dt();
    let eps = m as f64 * dt;
    let w = dt / eps;
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..grid.steps() {
        let dx = x.at(j as i64 + m as i64).sub(&x.values[j]);
        let dy = y.at(j as i64 + m as i64).sub(&y.values[j]);
        acc += w * pair_cross(phi, &dx, &dy)?;
        values.push(acc);
    }
    Ok(EpsCurve { m, eps, values })
}

/// The `A(eps)` statistic over the chi-space built from the generator
/// domain: `sum dt |dX|_* |dY|_* / eps` with the dual graph norm. The full
/// curve is returned; the statistic itself is its terminal value.
pub fn a_eps_curve(
    x: &VectorPath,
    y: &VectorPath,
    gen: &DiagonalGenerator,
    m: usize,
) -> Result<EpsCurve<f64>> {
    let grid = common_grid(&x.grid, &y.grid)?;
    check_eps(&grid, m)?;
    let dt = grid.dt();
    let eps = m as f64 * dt;
    let w = dt / eps;
    let mut values = Vec::with_capacity(grid.n_nodes());
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..grid.steps() {
        let dx = x.at(j as i64 + m as i64).sub(&x.values[j]);
        let dy = y.at(j as i64 + m as i64).sub(&y.values[j]);
        acc += w * dual_graph_norm(&dx, gen)? * dual_graph_norm(&dy, gen)?;
        values.push(acc);
    }
    Ok(EpsCurve { m, eps, values })
}

/// Terminal value of [`a_eps_curve`].
pub fn a_eps_statistic(
    x: &VectorPath,
    y: &VectorPath,
    gen: &DiagonalGenerator,
    m: usize,
) -> Result<f64> {
    Ok(a_eps_curve(x, y, gen, m)?.terminal())
}

/// Options for the Young integral refinement oracle.
#[derive(Debug, Clone, Copy)]
pub struct YoungOpts {
    /// Number of dyadic coarsening levels below the path grid.
    pub levels: usize,
    /// Relative Cauchy tolerance between successive level sums.
    pub tol_rel: f64,
    /// Known geometric rate of the left-sum error per grid doubling
    /// (`2^{1 - 2H}` for an fBm pair with Hurst `H`); fitted from the level
    /// differences when absent.
    pub rate_hint: Option<f64>,
    /// Verify the empirical Hoelder gate `alpha + gamma > 1` first.
    pub holder_gate: bool,
}

impl Default for YoungOpts {
    fn default() -> Self {
        YoungOpts {
            levels: 3,
            tol_rel: 1e-3,
            rate_hint: None,
            holder_gate: true,
        }
    }
}

/// Result of the Young refinement ladder.
#[derive(Debug, Clone)]
pub struct YoungResult {
    /// Left-Riemann sums per level, coarsest first (finest = path grid).
    pub level_sums: Vec<f64>,
    /// Plain left sum at the finest level.
    pub finest: f64,
    /// Converged value: geometric-tail limit of the level sums.
    pub value: f64,
    /// Rate per doubling used for the tail limit.
    pub rate: f64,
    /// Successive |sum difference| relative to the finest sum scale.
    pub cauchy_rel: Vec<f64>,
    /// Empirical Hoelder exponents of integrand and integrator.
    pub holder_exponents: (f64, f64),
}

fn left_sum(x: &ScalarPath, y: &ScalarPath, step: usize) -> f64 {
    let j = x.grid.steps();
    let mut acc = 0.0;
    let mut idx = 0;
    while idx < j {
        let next = (idx + step).min(j);
        acc += x.values[idx] * (y.values[next] - y.values[idx]);
        idx = next;
    }
    acc
}

/// Young integral `int_0^T X d^y Y` by left-Riemann sums on dyadic
/// refinements. The converged value extrapolates the geometric tail of the
/// level sums (plain left sums converge at rate `Pi^{alpha + gamma - 1}`,
/// too slowly to read the limit off the finest level directly).
pub fn young_integral(x: &ScalarPath, y: &ScalarPath, opts: YoungOpts) -> Result<YoungResult> {
    let grid = common_grid(&x.grid, &y.grid)?;
    let holder_scales: Vec<usize> = [4usize, 8, 16, 32, 64]
        .into_iter()
        .filter(|&s| s < grid.steps() / 4)
        .collect();
    let (ax, gy) = if holder_scales.len() >= 3 {
        (
            holder_exponent_estimate(x, &holder_scales).unwrap_or(0.0),
            holder_exponent_estimate(y, &holder_scales).unwrap_or(0.0),
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    if opts.holder_gate && ax.is_finite() && gy.is_finite() && ax + gy <= 1.0 {
        return Err(Error::NoConvergence(format!(
            "Hoelder gate failed: {ax:.3} + {gy:.3} <= 1"
        )));
    }

    let mut level_sums = Vec::with_capacity(opts.levels + 1);
    for l in (0..=opts.levels).rev() {
        let step = 1usize << l;
        if grid.steps() % step != 0 || grid.steps() / step < 2 {
            continue;
        }
        level_sums.push(left_sum(x, y, step));
    }
    if level_sums.len() < 2 {
        return Err(Error::InvalidArgument(
            "Young ladder needs at least two levels".into(),
        ));
    }
    let finest = *level_sums.last().expect("nonempty");
    let scale = finest.abs().max(1e-300);
    let diffs: Vec<f64> = level_sums.windows(2).map(|w| w[1] - w[0]).collect();
    let cauchy_rel: Vec<f64> = diffs.iter().map(|d| d.abs() / scale).collect();

    // geometric rate per doubling: supplied, or fitted from the diffs
    let rate = match opts.rate_hint {
        Some(r) => r,
        None => {
            let pairs: Vec<f64> = diffs
                .windows(2)
                .filter(|w| w[0].abs() > 1e-300)
                .map(|w| (w[1] / w[0]).abs())
                .collect();
            if pairs.is_empty() {
                0.5
            } else {
                pairs.iter().sum::<f64>() / pairs.len() as f64
            }
        }
    };
    let last_diff = *diffs.last().expect("nonempty");
    let converged = cauchy_rel.last().copied().unwrap_or(0.0) <= opts.tol_rel;
    // tail of the geometric series: sum_{k>=1} last_diff * rate^k
    let value = if rate > 0.0 && rate < 0.95 {
        finest + last_diff * rate / (1.0 - rate)
    } else {
        finest
    };
    if !converged && !(rate > 0.0 && rate < 0.95) {
        return Err(Error::NoConvergence(format!(
            "Young sums not Cauchy: last relative gap {:.3e}, rate {rate:.3}",
            cauchy_rel.last().copied().unwrap_or(f64::NAN)
        )));
    }
    Ok(YoungResult {
        level_sums,
        finest,
        value,
        rate,
        cauchy_rel,
        holder_exponents: (ax, gy),
    })
}

/// Per-rung summary of a ladder of estimates.
#[derive(Debug, Clone)]
pub struct LadderStat {
    pub m: usize,
    pub eps: f64,
    pub value: f64,
}

/// Fitted slope of `log value` against `log eps` across rungs; values must
/// be positive.
pub fn ladder_rate(stats: &[LadderStat]) -> Option<f64> {
    if stats.len() < 2 || stats.iter().any(|s| s.value <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = stats.iter().map(|s| s.eps.ln()).collect();
    let ys: Vec<f64> = stats.iter().map(|s| s.value.ln()).collect();
    Some(fit_slope(&xs, &ys))
}
