//! Run configuration: a flat `key = value` text format, diff-able and
//! hand-editable. Unknown keys and malformed values are rejected with the
//! field name.
//!
//! The pilot-frozen threshold `e1_final_threshold` was calibrated once as
//! 1.5 times the pilot median of the E1 final-rung statistic at this
//! default configuration (master seed 42) and is kept in the config so a
//! recalibration is an explicit, reviewable diff.

use crate::convolution::{ConvolutionSpec, Diffusion, Drift};
use crate::error::{Error, Result};
use crate::grid::{EpsLadder, TimeGrid};
use crate::noise::QSpectrum;
use crate::semigroup::DiagonalGenerator;
use crate::spectral::{OperatorDiagonal, SpectralVector};

pub const ALL_EXPERIMENTS: [&str; 8] = ["E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8"];

/// Diffusion coefficient selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaSpec {
    /// `sigma = scale * Id` (diagonal).
    Diag(f64),
    /// Rank one: reads noise mode 1 and injects along the graph-scaled
    /// range vector `v_k = k * scale`. The range coefficients grow like
    /// `sqrt(mu_k)`, which is what makes the scalar-QV divergence of the
    /// stochastic convolution visible at a fixed regularization width.
    RankOne(f64),
}

/// Drift selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftSpec {
    Zero,
    /// Constant drift of the given size along the first mode.
    ConstMode1(f64),
    /// `b(x) = base e_1 + feedback x` with scalar diagonal feedback.
    Affine { base: f64, feedback: f64 },
}

/// Initial condition selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum X0Spec {
    Zero,
    /// `x0 = amp e_1`.
    Mode1(f64),
    /// `x0_k = amp k^{-rate}`.
    Decay { amp: f64, rate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_modes: usize,
    pub t_horizon: f64,
    pub steps: usize,
    pub eps_multiples: Vec<usize>,
    pub q_alpha: f64,
    pub sigma: SigmaSpec,
    pub b: DriftSpec,
    pub x0: X0Spec,
    pub hurst: f64,
    pub master_seed: u64,
    pub n_paths: usize,
    pub experiments: Vec<String>,
    /// Worker threads for path-level parallelism; 0 means all cores.
    pub threads: usize,

    /// Pilot-frozen final-rung threshold for E1.
    pub e1_final_threshold: f64,
    /// E3 rank-one diffusion scale.
    pub e3_sigma_scale: f64,
    /// E4 runs in the regime where the residual is discretization-dominated.
    pub e4_sigma: f64,
    pub e4_x0: f64,
    /// Regularization radius of the rough E5 observable.
    pub e5_delta: f64,
    /// E8 grid sizes and path counts.
    pub young_steps: usize,
    pub young_paths: usize,
    pub holder_steps: usize,
    pub holder_paths: usize,
    pub frac_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_modes: 8,
            t_horizon: 1.0,
            steps: 1 << 12,
            eps_multiples: vec![4, 16, 64],
            q_alpha: 2.0,
            sigma: SigmaSpec::Diag(0.5),
            b: DriftSpec::Zero,
            x0: X0Spec::Mode1(1.0),
            hurst: 0.75,
            master_seed: 42,
            n_paths: 100,
            experiments: ALL_EXPERIMENTS.iter().map(|s| s.to_string()).collect(),
            threads: 0,
            e1_final_threshold: 0.08,
            e3_sigma_scale: 0.4,
            e4_sigma: 0.05,
            e4_x0: 2.0,
            e5_delta: 0.05,
            young_steps: 1 << 14,
            young_paths: 64,
            holder_steps: 1 << 11,
            holder_paths: 64,
            frac_steps: 1 << 13,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::config("n_modes", "must be positive"));
        }
        if !(self.t_horizon > 0.0) {
            return Err(Error::config("t_horizon", "must be positive"));
        }
        if self.steps < 8 {
            return Err(Error::config("steps", "needs at least 8 grid steps"));
        }
        let grid = self.grid()?;
        EpsLadder::new(self.eps_multiples.clone(), &grid)
            .map_err(|e| Error::config("eps_multiples", e.to_string()))?;
        if !(self.hurst > 0.5 && self.hurst < 1.0) {
            return Err(Error::config("hurst", "must lie in (0.5, 1)"));
        }
        if self.n_paths == 0 {
            return Err(Error::config("n_paths", "needs at least one path"));
        }
        if self.experiments.is_empty() {
            return Err(Error::config("experiments", "experiment list is empty"));
        }
        for e in &self.experiments {
            if !ALL_EXPERIMENTS.contains(&e.as_str()) {
                return Err(Error::config(
                    "experiments",
                    format!("unknown experiment `{e}`"),
                ));
            }
        }
        for &(field, steps) in &[
            ("young_steps", self.young_steps),
            ("holder_steps", self.holder_steps),
            ("frac_steps", self.frac_steps),
        ] {
            if steps < 64 || steps > crate::noise::FBM_MAX_STEPS {
                return Err(Error::config(
                    field,
                    format!("must lie in 64..={}", crate::noise::FBM_MAX_STEPS),
                ));
            }
            if !steps.is_power_of_two() {
                return Err(Error::config(field, "must be a power of two"));
            }
        }
        if self.young_paths == 0 || self.holder_paths == 0 {
            return Err(Error::config("young_paths", "path counts must be positive"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.t_horizon, self.steps)
    }

    pub fn ladder(&self) -> Result<EpsLadder> {
        EpsLadder::new(self.eps_multiples.clone(), &self.grid()?)
    }

    fn x0_vector(&self, n: usize) -> SpectralVector {
        match self.x0 {
            X0Spec::Zero => SpectralVector::zeros(n),
            X0Spec::Mode1(amp) => SpectralVector::basis(n, 0).scale(amp),
            X0Spec::Decay { amp, rate } => SpectralVector::new(
                (1..=n).map(|k| amp * (k as f64).powf(-rate)).collect(),
            )
            .expect("finite"),
        }
    }

    fn drift(&self, n: usize) -> Drift {
        match self.b {
            DriftSpec::Zero => Drift::Zero,
            DriftSpec::ConstMode1(v) => Drift::Constant(SpectralVector::basis(n, 0).scale(v)),
            DriftSpec::Affine { base, feedback } => Drift::Affine {
                base: SpectralVector::basis(n, 0).scale(base),
                feedback: OperatorDiagonal::constant(n, feedback),
            },
        }
    }

    fn diffusion(&self, n: usize) -> Diffusion {
        match self.sigma {
            SigmaSpec::Diag(s) => Diffusion::Diagonal(OperatorDiagonal::constant(n, s)),
            SigmaSpec::RankOne(s) => Diffusion::RankOne {
                read_mode: 0,
                range: SpectralVector::new((1..=n).map(|k| s * k as f64).collect())
                    .expect("finite"),
            },
        }
    }

    /// Process specification at the configured truncation.
    pub fn convolution_spec(&self) -> ConvolutionSpec {
        self.convolution_spec_at(self.n_modes)
    }

    /// Same specification at a different truncation (the mode-growth study
    /// varies `N` with everything else fixed).
    pub fn convolution_spec_at(&self, n: usize) -> ConvolutionSpec {
        ConvolutionSpec {
            x0: self.x0_vector(n),
            drift: self.drift(n),
            diffusion: self.diffusion(n),
            gen: DiagonalGenerator::dirichlet_heat(n),
            q: QSpectrum::power_law(n, self.q_alpha),
        }
    }
}

fn parse_field<T: std::str::FromStr>(field: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::config(field, format!("cannot parse `{raw}`")))
}

fn parse_sigma(raw: &str) -> Result<SigmaSpec> {
    let (kind, arg) = raw
        .split_once(':')
        .ok_or_else(|| Error::config("sigma", "expected `diag:SCALE` or `rank_one:SCALE`"))?;
    let scale: f64 = parse_field("sigma", arg)?;
    match kind.trim() {
        "diag" => Ok(SigmaSpec::Diag(scale)),
        "rank_one" => Ok(SigmaSpec::RankOne(scale)),
        other => Err(Error::config("sigma", format!("unknown kind `{other}`"))),
    }
}

fn parse_drift(raw: &str) -> Result<DriftSpec> {
    let raw = raw.trim();
    if raw == "zero" {
        return Ok(DriftSpec::Zero);
    }
    let mut parts = raw.split(':');
    match parts.next() {
        Some("const_mode1") => Ok(DriftSpec::ConstMode1(parse_field(
            "b",
            parts.next().unwrap_or(""),
        )?)),
        Some("affine") => {
            let base = parse_field("b", parts.next().unwrap_or(""))?;
            let feedback = parse_field("b", parts.next().unwrap_or(""))?;
            Ok(DriftSpec::Affine { base, feedback })
        }
        _ => Err(Error::config(
            "b",
            "expected `zero`, `const_mode1:V` or `affine:BASE:FEEDBACK`",
        )),
    }
}

fn parse_x0(raw: &str) -> Result<X0Spec> {
    let raw = raw.trim();
    if raw == "zero" {
        return Ok(X0Spec::Zero);
    }
    let mut parts = raw.split(':');
    match parts.next() {
        Some("mode1") => Ok(X0Spec::Mode1(parse_field("x0", parts.next().unwrap_or(""))?)),
        Some("decay") => {
            let amp = parse_field("x0", parts.next().unwrap_or(""))?;
            let rate = parse_field("x0", parts.next().unwrap_or(""))?;
            Ok(X0Spec::Decay { amp, rate })
        }
        _ => Err(Error::config(
            "x0",
            "expected `zero`, `mode1:AMP` or `decay:AMP:RATE`",
        )),
    }
}

/// Parse the flat `key = value` format; `#` starts a comment. Fields not
/// present keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                "line",
                format!("line {}: expected `key = value`", lineno + 1),
            )
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "n_modes" => cfg.n_modes = parse_field(key, value)?,
            "t_horizon" => cfg.t_horizon = parse_field(key, value)?,
            "steps" => cfg.steps = parse_field(key, value)?,
            "eps_multiples" => {
                cfg.eps_multiples = value
                    .split(',')
                    .map(|v| parse_field("eps_multiples", v))
                    .collect::<Result<Vec<usize>>>()?;
            }
            "q_alpha" => cfg.q_alpha = parse_field(key, value)?,
            "sigma" => cfg.sigma = parse_sigma(value)?,
            "b" => cfg.b = parse_drift(value)?,
            "x0" => cfg.x0 = parse_x0(value)?,
            "hurst" => cfg.hurst = parse_field(key, value)?,
            "master_seed" => cfg.master_seed = parse_field(key, value)?,
            "n_paths" => cfg.n_paths = parse_field(key, value)?,
            "experiments" => {
                cfg.experiments = value
                    .split(',')
                    .map(|v| v.trim().to_string())
                    .filter(|v| !v.is_empty())
                    .collect();
            }
            "threads" => cfg.threads = parse_field(key, value)?,
            "e1_final_threshold" => cfg.e1_final_threshold = parse_field(key, value)?,
            "e3_sigma_scale" => cfg.e3_sigma_scale = parse_field(key, value)?,
            "e4_sigma" => cfg.e4_sigma = parse_field(key, value)?,
            "e4_x0" => cfg.e4_x0 = parse_field(key, value)?,
            "e5_delta" => cfg.e5_delta = parse_field(key, value)?,
            "young_steps" => cfg.young_steps = parse_field(key, value)?,
            "young_paths" => cfg.young_paths = parse_field(key, value)?,
            "holder_steps" => cfg.holder_steps = parse_field(key, value)?,
            "holder_paths" => cfg.holder_paths = parse_field(key, value)?,
            "frac_steps" => cfg.frac_steps = parse_field(key, value)?,
            other => {
                return Err(Error::config(other, "unknown configuration key"));
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
