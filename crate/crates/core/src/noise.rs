//! Driving noises on a uniform time grid: scalar Brownian motion, Q-Wiener
//! processes with trace-class spectra, and fractional Brownian motion with
//! Hurst index above one half.
//!
//! Reproducibility contract: a path is a pure function of
//! `(master_seed, stream, path_index)`. Each path owns its generator, so
//! Monte Carlo batches are bitwise identical regardless of how paths are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::spectral::SpectralVector;

/// Largest step count accepted by the exact fBm sampler.
pub const FBM_MAX_STEPS: usize = 1 << 14;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based split of the master seed: expands
/// `(master, stream, path)` into a full 256-bit ChaCha seed.
pub fn path_rng(master_seed: u64, stream: u64, path_index: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    let mut state = splitmix64(master_seed ^ splitmix64(stream) ^ splitmix64(path_index).rotate_left(17));
    for chunk in seed.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Named sub-streams so different noise kinds drawn from one master seed
/// stay independent.
pub mod streams {
    pub const BROWNIAN: u64 = 1;
    pub const Q_WIENER: u64 = 2;
    pub const FBM: u64 = 3;
    pub const TEST_MARTINGALE: u64 = 4;
}

/// Scalar path on a grid; starts at zero for every noise kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl ScalarPath {
    pub fn from_values(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::DimensionMismatch(format!(
                "path has {} nodes, grid wants {}",
                values.len(),
                grid.n_nodes()
            )));
        }
        Ok(ScalarPath { grid, values })
    }

    /// Value with the boundary extension convention.
    pub fn at(&self, j: i64) -> f64 {
        self.values[self.grid.clamp(j)]
    }

    /// Path restricted to every `step`-th node (same horizon, coarser grid).
    pub fn coarsen(&self, step: usize) -> Result<ScalarPath> {
        if step == 0 || self.grid.steps() % step != 0 {
            return Err(Error::InvalidArgument(format!(
                "coarsening step {step} does not divide {}",
                self.grid.steps()
            )));
        }
        let grid = TimeGrid::new(self.grid.horizon(), self.grid.steps() / step)?;
        let values = self.values.iter().step_by(step).copied().collect();
        ScalarPath::from_values(grid, values)
    }
}

/// Vector-valued path on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPath {
    pub grid: TimeGrid,
    pub values: Vec<SpectralVector>,
}

impl VectorPath {
    pub fn from_values(grid: TimeGrid, values: Vec<SpectralVector>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::DimensionMismatch(format!(
                "path has {} nodes, grid wants {}",
                values.len(),
                grid.n_nodes()
            )));
        }
        Ok(VectorPath { grid, values })
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, |v| v.dim())
    }

    pub fn at(&self, j: i64) -> &SpectralVector {
        &self.values[self.grid.clamp(j)]
    }

    /// Scalar path of one coordinate.
    pub fn mode(&self, k: usize) -> ScalarPath {
        ScalarPath {
            grid: self.grid,
            values: self.values.iter().map(|v| v.coeffs()[k]).collect(),
        }
    }

    /// Scalar path `t -> <X(t), z>`.
    pub fn pair_with(&self, z: &SpectralVector) -> Result<ScalarPath> {
        let values = self
            .values
            .iter()
            .map(|v| crate::spectral::inner(v, z))
            .collect::<Result<Vec<_>>>()?;
        ScalarPath::from_values(self.grid, values)
    }

    /// Path restricted to every `step`-th node; coarse increments are exact
    /// sums of the fine ones, which is what coupled refinement studies need.
    pub fn coarsen(&self, step: usize) -> Result<VectorPath> {
        if step == 0 || self.grid.steps() % step != 0 {
            return Err(Error::InvalidArgument(format!(
                "coarsening step {step} does not divide {}",
                self.grid.steps()
            )));
        }
        let grid = TimeGrid::new(self.grid.horizon(), self.grid.steps() / step)?;
        let values = self.values.iter().step_by(step).cloned().collect();
        VectorPath::from_values(grid, values)
    }
}

/// Eigenvalues of the noise covariance `Q` on the same basis as `H`.
/// Zero eigenvalues switch a mode off; negative ones are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct QSpectrum {
    lambda: Vec<f64>,
}

impl QSpectrum {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidArgument(
                "Q eigenvalues must be finite and nonnegative".into(),
            ));
        }
        Ok(QSpectrum { lambda })
    }

    /// Trace-class surrogate `lambda_k = k^{-alpha}`.
    pub fn power_law(n: usize, alpha: f64) -> Self {
        QSpectrum {
            lambda: (1..=n).map(|k| (k as f64).powf(-alpha)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn trace(&self) -> f64 {
        self.lambda.iter().sum()
    }
}

fn gaussian_increments(rng: &mut ChaCha8Rng, n: usize, sd: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sd * z
        })
        .collect()
}

/// Standard Brownian path: independent centered Gaussian increments of
/// variance `dt`, started at zero.
pub fn sample_brownian(grid: &TimeGrid, master_seed: u64, path_index: u64) -> ScalarPath {
    let mut rng = path_rng(master_seed, streams::BROWNIAN, path_index);
    brownian_from_rng(grid, &mut rng)
}

pub(crate) fn brownian_from_rng(grid: &TimeGrid, rng: &mut ChaCha8Rng) -> ScalarPath {
    let incr = gaussian_increments(rng, grid.steps(), grid.dt().sqrt());
    let mut values = Vec::with_capacity(grid.n_nodes());
    values.push(0.0);
    let mut acc = 0.0;
    for d in incr {
        acc += d;
        values.push(acc);
    }
    ScalarPath { grid: *grid, values }
}

/// Q-Wiener path: mode `k` is `sqrt(lambda_k)` times an independent
/// Brownian path. Modes are drawn in fixed order from the path generator.
pub fn sample_q_wiener(
    grid: &TimeGrid,
    q: &QSpectrum,
    master_seed: u64,
    path_index: u64,
) -> VectorPath {
    let mut rng = path_rng(master_seed, streams::Q_WIENER, path_index);
    let n = q.dim();
    let sqrt_dt = grid.dt().sqrt();
    let mut values = vec![SpectralVector::zeros(n); grid.n_nodes()];
    for k in 0..n {
        let scale = q.lambda()[k].sqrt() * sqrt_dt;
        let mut acc = 0.0;
        for j in 0..grid.steps() {
            let z: f64 = StandardNormal.sample(&mut rng);
            acc += scale * z;
            values[j + 1].coeffs_mut()[k] = acc;
        }
    }
    VectorPath { grid: *grid, values }
}

/// How the exact fBm Gaussian system is factorized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbmMethod {
    /// Levinson-type factorization of the stationary increment covariance:
    /// same Gaussian law as the dense route, O(J) memory, O(J^2) time per
    /// path. Default.
    IncrementToeplitz,
    /// Dense Cholesky factor of the path covariance
    /// `R(s,t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2`, cached across paths.
    /// O(J^2) memory; practical up to a few thousand steps.
    DenseCholesky,
}

/// Exact fractional Brownian motion sampler for `H` in `(1/2, 1)`.
pub struct FbmSampler {
    grid: TimeGrid,
    hurst: f64,
    method: FbmMethod,
    /// Unit-step fGn autocovariance, lags `0..J`.
    acov: Vec<f64>,
    /// Lower Cholesky factor of the path covariance (dense method only).
    chol: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

impl FbmSampler {
    pub fn new(grid: &TimeGrid, hurst: f64, method: FbmMethod) -> Result<Self> {
        if !(hurst > 0.5 && hurst < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "fBm sampler needs H in (0.5, 1); H = {hurst} (H = 0.5 is sample_brownian)"
            )));
        }
        if grid.steps() > FBM_MAX_STEPS {
            return Err(Error::InvalidArgument(format!(
                "fBm grid of {} steps exceeds the dense-factorization cap {}",
                grid.steps(),
                FBM_MAX_STEPS
            )));
        }
        let j = grid.steps();
        let acov: Vec<f64> = (0..=j)
            .map(|k| {
                let k = k as f64;
                0.5 * ((k + 1.0).powf(2.0 * hurst) - 2.0 * k.powf(2.0 * hurst)
                    + (k - 1.0).abs().powf(2.0 * hurst))
            })
            .collect();
        let chol = match method {
            FbmMethod::IncrementToeplitz => None,
            FbmMethod::DenseCholesky => Some(Self::dense_factor(grid, hurst)?),
        };
        Ok(FbmSampler {
            grid: *grid,
            hurst,
            method,
            acov,
            chol,
        })
    }

    fn dense_factor(grid: &TimeGrid, hurst: f64) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
        let j = grid.steps();
        let h2 = 2.0 * hurst;
        let cov = nalgebra::DMatrix::from_fn(j, j, |r, c| {
            let s = grid.node(r + 1);
            let t = grid.node(c + 1);
            0.5 * (s.powf(h2) + t.powf(h2) - (s - t).abs().powf(h2))
        });
        nalgebra::Cholesky::new(cov).ok_or(Error::FactorizationFailed { pivot: 0 })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Draw one exact fBm path for `(master_seed, path_index)`.
    pub fn sample(&self, master_seed: u64, path_index: u64) -> Result<ScalarPath> {
        let mut rng = path_rng(master_seed, streams::FBM, path_index);
        let j = self.grid.steps();
        let z = gaussian_increments(&mut rng, j, 1.0);
        match self.method {
            FbmMethod::DenseCholesky => {
                let zv = nalgebra::DVector::from_vec(z);
                let path = self.chol.as_ref().expect("factor present").l() * zv;
                let mut values = Vec::with_capacity(j + 1);
                values.push(0.0);
                values.extend(path.iter().copied());
                ScalarPath::from_values(self.grid, values)
            }
            FbmMethod::IncrementToeplitz => self.sample_toeplitz(&z),
        }
    }

    /// Levinson recursion on the Toeplitz increment covariance: innovations
    /// form of the Cholesky factor, built on the fly.
    fn sample_toeplitz(&self, z: &[f64]) -> Result<ScalarPath> {
        let j = self.grid.steps();
        let scale = self.grid.dt().powf(self.hurst);
        let g = &self.acov;
        let mut incr = vec![0.0f64; j];
        let mut phi = vec![0.0f64; j];
        let mut phi_prev = vec![0.0f64; j];
        let mut var = g[0];
        incr[0] = var.sqrt() * z[0];
        for n in 1..j {
            // reflection coefficient for order n
            let mut kappa = g[n];
            for k in 0..n - 1 {
                kappa -= phi_prev[k] * g[n - 1 - k];
            }
            kappa /= var;
            phi[n - 1] = kappa;
            for k in 0..n - 1 {
                phi[k] = phi_prev[k] - kappa * phi_prev[n - 2 - k];
            }
            var *= 1.0 - kappa * kappa;
            if !(var > 0.0) {
                return Err(Error::FactorizationFailed { pivot: n });
            }
            let mut mean = 0.0;
            for k in 0..n {
                mean += phi[k] * incr[n - 1 - k];
            }
            incr[n] = mean + var.sqrt() * z[n];
            phi_prev[..n].copy_from_slice(&phi[..n]);
        }
        let mut values = Vec::with_capacity(j + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for d in &incr {
            acc += d * scale;
            values.push(acc);
        }
        ScalarPath::from_values(self.grid, values)
    }
}

/// Hurst/Hoelder regularity estimate: log-log regression of the maximum
/// increment against the scale.
///
/// At every scale the maximum runs over the same number of windows (the
/// count available at the coarsest scale, spread evenly over the path), so
/// the extreme-value factor is scale-independent and drops out of the
/// regression slope.
pub fn holder_exponent_estimate(path: &ScalarPath, scales: &[usize]) -> Result<f64> {
    if scales.len() < 3 {
        return Err(Error::InvalidArgument(
            "holder estimate needs at least 3 scales".into(),
        ));
    }
    let j = path.grid.steps();
    let lmax = *scales.iter().max().expect("nonempty");
    if lmax >= j {
        return Err(Error::InvalidArgument(format!(
            "scale {lmax} too coarse for {j} steps"
        )));
    }
    let windows = (j / lmax).max(2);
    let mut xs = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(scales.len());
    for &l in scales {
        let mut m = 0.0f64;
        for w in 0..windows {
            let start = (w * (j - l)) / (windows - 1).max(1);
            m = m.max((path.values[start + l] - path.values[start]).abs());
        }
        if m == 0.0 {
            return Err(Error::DegeneratePath(format!(
                "no increment at scale {l}"
            )));
        }
        xs.push((l as f64 * path.grid.dt()).ln());
        ys.push(m.ln());
    }
    Ok(fit_slope(&xs, &ys))
}

/// Least-squares slope of `ys` on `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEED: u64 = 0xC0FFEE;

    #[test]
    fn brownian_starts_at_zero_and_is_reproducible() {
        let grid = TimeGrid::new(1.0, 512).unwrap();
        let a = sample_brownian(&grid, SEED, 3);
        let b = sample_brownian(&grid, SEED, 3);
        assert_eq!(a.values[0], 0.0);
        assert_eq!(a.values, b.values);
        let c = sample_brownian(&grid, SEED, 4);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn brownian_increment_variance_concentrates() {
        // chi-square concentration: over 1e5 steps the empirical increment
        // variance sits within dt * (1 +- 3 sqrt(2/1e5)).
        let n = 100_000;
        let grid = TimeGrid::new(100.0, n).unwrap();
        let path = sample_brownian(&grid, SEED, 0);
        let dt = grid.dt();
        let var = path
            .values
            .windows(2)
            .map(|w| (w[1] - w[0]).powi(2))
            .sum::<f64>()
            / n as f64;
        let tol = 3.0 * (2.0 / n as f64).sqrt();
        assert!((var / dt - 1.0).abs() < tol, "var ratio {}", var / dt);
    }

    #[test]
    fn q_wiener_modes_scale_and_vanish() {
        let grid = TimeGrid::new(1.0, 2048).unwrap();
        let q = QSpectrum::power_law(4, 2.0);
        let w = sample_q_wiener(&grid, &q, SEED, 1);
        assert_eq!(w.values[0], SpectralVector::zeros(4));

        // per-mode realized quadratic variation close to lambda_k T
        for k in 0..4 {
            let qv: f64 = w
                .values
                .windows(2)
                .map(|p| (p[1].coeffs()[k] - p[0].coeffs()[k]).powi(2))
                .sum();
            let expect = q.lambda()[k] * grid.horizon();
            let tol = 4.0 * (2.0 / grid.steps() as f64).sqrt() * expect;
            assert!((qv - expect).abs() < tol, "mode {k}: {qv} vs {expect}");
        }

        let zero_q = QSpectrum::new(vec![0.0; 4]).unwrap();
        let wz = sample_q_wiener(&grid, &zero_q, SEED, 1);
        assert!(wz.values.iter().all(|v| v.norm() == 0.0));

        assert!(QSpectrum::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn q_wiener_terminal_second_moment() {
        let grid = TimeGrid::new(1.0, 256).unwrap();
        let q = QSpectrum::power_law(6, 2.0);
        let n_paths = 400;
        let mean_sq: f64 = (0..n_paths)
            .map(|p| sample_q_wiener(&grid, &q, SEED, p).values.last().unwrap().norm().powi(2))
            .sum::<f64>()
            / n_paths as f64;
        let expect = grid.horizon() * q.trace();
        // |W(T)|^2 is a weighted chi-square; 3 standard errors
        let se = expect * (2.0 / n_paths as f64).sqrt() * 1.5;
        assert!((mean_sq - expect).abs() < 3.0 * se, "{mean_sq} vs {expect}");
    }

    #[test]
    fn q_wiener_cross_mode_independence() {
        let grid = TimeGrid::new(1.0, 1024).unwrap();
        let q = QSpectrum::new(vec![1.0, 1.0]).unwrap();
        let n_paths = 300;
        let mut cross = 0.0;
        for p in 0..n_paths {
            let w = sample_q_wiener(&grid, &q, SEED, p);
            let last = w.values.last().unwrap();
            cross += last.coeffs()[0] * last.coeffs()[1];
        }
        cross /= n_paths as f64;
        let se = grid.horizon() / (n_paths as f64).sqrt();
        assert!(cross.abs() < 3.0 * se, "cross covariance {cross}");
    }

    #[test]
    fn fbm_rejects_bad_hurst_and_caps_grid() {
        let grid = TimeGrid::new(1.0, 256).unwrap();
        assert!(FbmSampler::new(&grid, 0.5, FbmMethod::IncrementToeplitz).is_err());
        assert!(FbmSampler::new(&grid, 1.0, FbmMethod::IncrementToeplitz).is_err());
        let too_fine = TimeGrid::new(1.0, FBM_MAX_STEPS * 2).unwrap();
        assert!(FbmSampler::new(&too_fine, 0.75, FbmMethod::IncrementToeplitz).is_err());
    }

    #[test]
    fn fbm_starts_at_zero_and_is_reproducible() {
        let grid = TimeGrid::new(1.0, 256).unwrap();
        let s = FbmSampler::new(&grid, 0.75, FbmMethod::IncrementToeplitz).unwrap();
        let a = s.sample(SEED, 0).unwrap();
        let b = s.sample(SEED, 0).unwrap();
        assert_eq!(a.values[0], 0.0);
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn fbm_increment_variance_matches_hurst_scaling() {
        let grid = TimeGrid::new(1.0, 128).unwrap();
        let h = 0.75;
        let s = FbmSampler::new(&grid, h, FbmMethod::IncrementToeplitz).unwrap();
        let n_paths = 300;
        // disjoint increments at two separations
        for &lag in &[1usize, 8] {
            let tau = lag as f64 * grid.dt();
            let mut acc = 0.0;
            let mut count = 0;
            for p in 0..n_paths {
                let path = s.sample(SEED, p).unwrap();
                let mut j = 0;
                while j + lag <= grid.steps() {
                    acc += (path.values[j + lag] - path.values[j]).powi(2);
                    j += lag;
                }
                count += grid.steps() / lag;
            }
            let var = acc / count as f64;
            let expect = tau.powf(2.0 * h);
            // increments overlap in time across the path, so allow a loose
            // 3-sigma band computed as if independent times a safety factor
            let tol = 3.0 * expect * (2.0 / (n_paths as f64)).sqrt() * 3.0;
            assert!((var - expect).abs() < tol, "lag {lag}: {var} vs {expect}");
        }
    }

    #[test]
    fn fbm_covariance_matches_r() {
        let grid = TimeGrid::new(1.0, 64).unwrap();
        let h = 0.8;
        let s = FbmSampler::new(&grid, h, FbmMethod::IncrementToeplitz).unwrap();
        let n_paths = 2000;
        let (i, j) = (20usize, 48usize);
        let (ti, tj) = (grid.node(i), grid.node(j));
        let mut acc = 0.0;
        for p in 0..n_paths {
            let path = s.sample(SEED, p).unwrap();
            acc += path.values[i] * path.values[j];
        }
        let emp = acc / n_paths as f64;
        let expect = 0.5 * (ti.powf(2.0 * h) + tj.powf(2.0 * h) - (tj - ti).powf(2.0 * h));
        let se = (ti.powf(2.0 * h) * tj.powf(2.0 * h)).sqrt() / (n_paths as f64).sqrt() * 1.5;
        assert!((emp - expect).abs() < 4.0 * se, "{emp} vs {expect}");
    }

    #[test]
    fn fbm_methods_agree_in_law() {
        // Same covariance target: compare terminal variance across methods.
        let grid = TimeGrid::new(1.0, 128).unwrap();
        let h = 0.7;
        let toe = FbmSampler::new(&grid, h, FbmMethod::IncrementToeplitz).unwrap();
        let den = FbmSampler::new(&grid, h, FbmMethod::DenseCholesky).unwrap();
        let n_paths = 1500;
        let var = |s: &FbmSampler, seed: u64| {
            (0..n_paths)
                .map(|p| s.sample(seed, p).unwrap().values.last().unwrap().powi(2))
                .sum::<f64>()
                / n_paths as f64
        };
        let vt = var(&toe, SEED);
        let vd = var(&den, SEED ^ 1);
        let se = (2.0 / n_paths as f64).sqrt() * 1.5;
        assert!((vt - 1.0).abs() < 4.0 * se, "toeplitz var {vt}");
        assert!((vd - 1.0).abs() < 4.0 * se, "dense var {vd}");
    }

    #[test]
    fn holder_estimate_on_known_paths() {
        let grid = TimeGrid::new(1.0, 2048).unwrap();
        let scales = [4usize, 8, 16, 32, 64];

        let linear = ScalarPath::from_values(
            grid,
            (0..grid.n_nodes()).map(|j| grid.node(j)).collect(),
        )
        .unwrap();
        let slope = holder_exponent_estimate(&linear, &scales).unwrap();
        assert!((slope - 1.0).abs() < 1e-10, "linear slope {slope}");

        let n_paths = 60;
        let mean_bm: f64 = (0..n_paths)
            .map(|p| holder_exponent_estimate(&sample_brownian(&grid, SEED, p), &scales).unwrap())
            .sum::<f64>()
            / n_paths as f64;
        assert!((mean_bm - 0.5).abs() < 0.1, "brownian holder {mean_bm}");

        let s = FbmSampler::new(&grid, 0.75, FbmMethod::IncrementToeplitz).unwrap();
        let mean_fbm: f64 = (0..n_paths)
            .map(|p| holder_exponent_estimate(&s.sample(SEED, p).unwrap(), &scales).unwrap())
            .sum::<f64>()
            / n_paths as f64;
        assert!((mean_fbm - 0.75).abs() < 0.05, "fbm holder {mean_fbm}");

        let flat = ScalarPath::from_values(grid, vec![1.0; grid.n_nodes()]).unwrap();
        assert!(matches!(
            holder_exponent_estimate(&flat, &scales),
            Err(Error::DegeneratePath(_))
        ));
    }
}
