//! The verification experiment suite E1-E8.
//!
//! Each experiment draws its Monte Carlo paths from the master seed with a
//! per-path counter split, reduces statistics in fixed path order, and
//! renders its artifacts as in-memory CSV bodies; reruns with a different
//! thread count are byte-identical. Experiments run sequentially, paths
//! within an experiment in parallel.
//!
//! Fixed acceptance constants live in [`criteria`]; the one pilot-frozen
//! threshold (the E1 final rung) comes from the configuration.

use crate::config::{RunConfig, SigmaSpec};
use crate::convolution::{
    compute_remainder, simulate_fractional_extension, simulate_mild, ConvolutionSpec, Diffusion,
    Drift, FractionalMode, RefineOpts,
};
use crate::error::{Error, Result};
use crate::estimators::{
    a_eps_statistic, forward_integral_scalar, ito_sum_scalar, ladder_rate,
    scalar_qv_eps, tensor_cov_eps, young_integral, IncrementNorm, LadderStat, YoungOpts,
};
use crate::grid::TimeGrid;
use crate::noise::{
    holder_exponent_estimate, sample_brownian, sample_q_wiener, FbmMethod, FbmSampler, QSpectrum,
    ScalarPath, VectorPath,
};
use crate::report::{EstimatorCsv, ExperimentResult, SummaryRow};
use crate::semigroup::DiagonalGenerator;
use crate::spectral::SpectralVector;
use crate::testfn::{RoughObservable, SquareObservable};
use crate::verify::{
    analytic_tensor_qv_curve, driving_mode_bm, fukushima_orthogonality, ito_chi_residual,
    ito_mild_residual,
};

/// Acceptance constants fixed by the verification design (as opposed to
/// the pilot-frozen E1 threshold, which lives in the config).
pub mod criteria {
    /// Per-path bound factor on `A(eps)` of the remainder: quadrature slack
    /// over the exact `eps T sup|X|^2` envelope.
    pub const A_EPS_BOUND_FACTOR: f64 = 1.05;
    /// Minimum fitted slope of `log A(eps)` against `log eps`.
    pub const A_EPS_MIN_SLOPE: f64 = 0.8;
    /// Minimum growth of the scalar-QV estimate per truncation doubling.
    pub const QV_GROWTH_MIN: f64 = 1.25;
    /// Window for the Ito-residual decrease factor under dt halving.
    pub const ITO_RATIO_WINDOW: (f64, f64) = (1.5, 3.0);
    /// The trace-omitted control must exceed the full residual by this.
    pub const ITO_CONTROL_FACTOR: f64 = 5.0;
    /// The two Hessian-term discretizations must agree to this.
    pub const RESIDUAL_AGREE_TOL: f64 = 1e-12;
    /// Final orthogonality rung must sit below control over this factor.
    pub const ORTH_CONTROL_FACTOR: f64 = 5.0;
    /// Relative tolerance of the tensor-covariation diagonal at `T`.
    pub const TENSOR_COV_REL_TOL: f64 = 0.10;
    /// Richardson window for the duality-residual order study.
    pub const DUALITY_RATIO_WINDOW: (f64, f64) = (1.7, 2.5);
    /// Relative tolerance of the Young chain-rule identity.
    pub const YOUNG_REL_TOL: f64 = 1e-3;
    /// Absolute tolerance of the Hurst estimate.
    pub const HOLDER_TOL: f64 = 0.05;
}

/// Ordered parallel map over path indices; the reduce order is the index
/// order whatever the scheduling.
#[cfg(feature = "parallel")]
pub fn map_paths<R: Send>(
    n_paths: usize,
    threads: usize,
    f: impl Fn(u64) -> R + Sync + Send,
) -> Vec<R> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| (0..n_paths as u64).into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn map_paths<R: Send>(
    n_paths: usize,
    _threads: usize,
    f: impl Fn(u64) -> R + Sync + Send,
) -> Vec<R> {
    (0..n_paths as u64).map(f).collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn collect_errors<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

// ---------------------------------------------------------------------
// E1: forward integral against the discrete Ito sum
// ---------------------------------------------------------------------

const E1_CLAIM: &str = "forward integral of a predictable integrand coincides with the Ito integral";
const E1_BLOCKS: usize = 16;

pub fn run_e1(cfg: &RunConfig) -> Result<ExperimentResult> {
    let grid = cfg.grid()?;
    let ladder = cfg.ladder()?;
    let rungs: Vec<usize> = ladder.descending().collect();

    let per_path = map_paths(cfg.n_paths, cfg.threads, |p| -> Result<Vec<f64>> {
        let w = sample_brownian(&grid, cfg.master_seed, p);
        // adapted step integrand: the Brownian value frozen at block starts
        let blk = grid.steps() / E1_BLOCKS;
        let x = ScalarPath::from_values(
            grid,
            (0..grid.n_nodes())
                .map(|j| w.values[(j.min(grid.steps() - 1) / blk) * blk])
                .collect(),
        )?;
        let ito = ito_sum_scalar(&x, &w)?;
        let mut sups = Vec::with_capacity(rungs.len());
        for &m in &rungs {
            let fwd = forward_integral_scalar(&x, &w, m)?;
            sups.push(
                fwd.values
                    .iter()
                    .zip(&ito)
                    .fold(0.0f64, |a, (f, i)| a.max((f - i).abs())),
            );
        }
        Ok(sups)
    });
    let per_path = collect_errors(per_path)?;

    let mut detail = EstimatorCsv::new();
    for (p, sups) in per_path.iter().enumerate() {
        for (r, &m) in rungs.iter().enumerate() {
            detail.push("e1_sup_dev", p as u64, ladder.eps(m, &grid), grid.horizon(), sups[r]);
        }
    }

    let medians: Vec<f64> = (0..rungs.len())
        .map(|r| median(&per_path.iter().map(|s| s[r]).collect::<Vec<_>>()))
        .collect();
    let decreasing = strictly_decreasing(&medians);
    let final_ok = *medians.last().expect("rungs") < cfg.e1_final_threshold;

    let mut summary = Vec::new();
    for (r, &m) in rungs.iter().enumerate() {
        summary.push(SummaryRow::info(
            "E1",
            "median_sup_dev",
            Some(ladder.eps(m, &grid)),
            medians[r],
            E1_CLAIM,
        ));
    }
    summary.push(SummaryRow::checked(
        "E1",
        "ladder_strictly_decreasing",
        None,
        decreasing as u64 as f64,
        1.0,
        decreasing,
        E1_CLAIM,
    ));
    summary.push(SummaryRow::checked(
        "E1",
        "final_rung_median",
        Some(ladder.eps(*rungs.last().unwrap(), &grid)),
        *medians.last().unwrap(),
        cfg.e1_final_threshold,
        final_ok,
        E1_CLAIM,
    ));

    Ok(ExperimentResult {
        name: "E1".into(),
        pass: decreasing && final_ok,
        summary,
        detail_csv: vec![("e1_detail.csv".into(), detail.finish())],
    })
}

// ---------------------------------------------------------------------
// E2: the remainder's chi-statistic bound and rate
// ---------------------------------------------------------------------

const E2_CLAIM: &str = "mild remainder has vanishing chi-statistic with per-path bound eps T sup|X|^2";

struct E2Path {
    a_eps: Vec<f64>,
    bound: Vec<f64>,
}

fn e2_single_path(
    spec: &ConvolutionSpec,
    grid: &TimeGrid,
    rungs: &[usize],
    master_seed: u64,
    p: u64,
) -> Result<E2Path> {
    let noise = sample_q_wiener(grid, &spec.q, master_seed, p);
    let path = simulate_mild(spec, &noise)?;
    let y = compute_remainder(&path);
    let sup2 = path.sup_state_norm().powi(2);
    let mut a_eps = Vec::with_capacity(rungs.len());
    let mut bound = Vec::with_capacity(rungs.len());
    for &m in rungs {
        a_eps.push(a_eps_statistic(&y, &y, &spec.gen, m)?);
        bound.push(
            criteria::A_EPS_BOUND_FACTOR * (m as f64 * grid.dt()) * grid.horizon() * sup2,
        );
    }
    Ok(E2Path { a_eps, bound })
}

pub fn run_e2(cfg: &RunConfig) -> Result<ExperimentResult> {
    let grid = cfg.grid()?;
    let ladder = cfg.ladder()?;
    let rungs: Vec<usize> = ladder.descending().collect();
    let spec = cfg.convolution_spec();

    let per_path = collect_errors(map_paths(cfg.n_paths, cfg.threads, |p| {
        e2_single_path(&spec, &grid, &rungs, cfg.master_seed, p)
    }))?;

    let mut detail = EstimatorCsv::new();
    let mut bound_ok = true;
    let mut worst_ratio = 0.0f64;
    for (p, row) in per_path.iter().enumerate() {
        for (r, &m) in rungs.iter().enumerate() {
            detail.push("e2_a_eps", p as u64, ladder.eps(m, &grid), grid.horizon(), row.a_eps[r]);
            detail.push("e2_bound", p as u64, ladder.eps(m, &grid), grid.horizon(), row.bound[r]);
            let ratio = row.a_eps[r] / row.bound[r];
            worst_ratio = worst_ratio.max(ratio);
            bound_ok &= row.a_eps[r] <= row.bound[r];
        }
    }

    let medians: Vec<f64> = (0..rungs.len())
        .map(|r| median(&per_path.iter().map(|s| s.a_eps[r]).collect::<Vec<_>>()))
        .collect();
    let stats: Vec<LadderStat> = rungs
        .iter()
        .zip(&medians)
        .map(|(&m, &v)| LadderStat { m, eps: ladder.eps(m, &grid), value: v })
        .collect();
    let slope = ladder_rate(&stats).unwrap_or(f64::NAN);
    let slope_ok = slope >= criteria::A_EPS_MIN_SLOPE;

    let mut summary = Vec::new();
    for (r, &m) in rungs.iter().enumerate() {
        summary.push(SummaryRow::info(
            "E2",
            "median_a_eps",
            Some(ladder.eps(m, &grid)),
            medians[r],
            E2_CLAIM,
        ));
    }
    summary.push(SummaryRow::checked(
        "E2",
        "per_path_bound_worst_ratio",
        None,
        worst_ratio,
        1.0,
        bound_ok,
        E2_CLAIM,
    ));
    summary.push(SummaryRow::checked(
        "E2",
        "fitted_rate",
        None,
        slope,
        criteria::A_EPS_MIN_SLOPE,
        slope_ok,
        E2_CLAIM,
    ));

    Ok(ExperimentResult {
        name: "E2".into(),
        pass: bound_ok && slope_ok,
        summary,
        detail_csv: vec![("e2_detail.csv".into(), detail.finish())],
    })
}

// ---------------------------------------------------------------------
// E3: scalar-QV divergence with the truncation vs chi-statistic tameness
// ---------------------------------------------------------------------

const E3_CLAIM: &str =
    "scalar QV of the stochastic convolution grows with the truncation while the chi bound holds";
const E3_SIZES: [usize; 3] = [8, 16, 32];

pub fn run_e3(cfg: &RunConfig) -> Result<ExperimentResult> {
    let grid = cfg.grid()?;
    let ladder = cfg.ladder()?;
    let rungs: Vec<usize> = ladder.descending().collect();
    // fixed epsilon: the middle rung of the ladder
    let m_fixed = cfg.eps_multiples[cfg.eps_multiples.len() / 2];

    let mut summary = Vec::new();
    let mut detail = EstimatorCsv::new();
    let mut qv_medians = Vec::new();
    let mut bounds_ok = true;

    for &n in &E3_SIZES {
        // rank-one diffusion reading noise mode 1, graph-scaled range
        let spec = ConvolutionSpec {
            x0: SpectralVector::zeros(n),
            drift: Drift::Zero,
            diffusion: Diffusion::RankOne {
                read_mode: 0,
                range: SpectralVector::new(
                    (1..=n).map(|k| cfg.e3_sigma_scale * k as f64).collect(),
                )?,
            },
            gen: DiagonalGenerator::dirichlet_heat(n),
            q: QSpectrum::power_law(n, cfg.q_alpha),
        };
        let stats = collect_errors(map_paths(cfg.n_paths, cfg.threads, |p| -> Result<(f64, bool)> {
            let noise = sample_q_wiener(&grid, &spec.q, cfg.master_seed, p);
            let path = simulate_mild(&spec, &noise)?;
            // x0 = 0, b = 0: the state is exactly the stochastic convolution
            let qv = scalar_qv_eps(&path.state_path(), m_fixed, IncrementNorm::H)?.terminal();
            let y = compute_remainder(&path);
            let sup2 = path.sup_state_norm().powi(2);
            let mut ok = true;
            for &m in &rungs {
                let a = a_eps_statistic(&y, &y, &spec.gen, m)?;
                let bound = criteria::A_EPS_BOUND_FACTOR
                    * (m as f64 * grid.dt())
                    * grid.horizon()
                    * sup2;
                ok &= a <= bound;
            }
            Ok((qv, ok))
        }))?;
        let qvs: Vec<f64> = stats.iter().map(|s| s.0).collect();
        let qv_med = median(&qvs);
        bounds_ok &= stats.iter().all(|s| s.1);
        for (p, s) in stats.iter().enumerate() {
            detail.push(
                &format!("e3_scalar_qv_n{n}"),
                p as u64,
                ladder.eps(m_fixed, &grid),
                grid.horizon(),
                s.0,
            );
        }
        summary.push(SummaryRow::info(
            "E3",
            &format!("median_scalar_qv_n{n}"),
            Some(ladder.eps(m_fixed, &grid)),
            qv_med,
            E3_CLAIM,
        ));
        qv_medians.push(qv_med);
    }

    let mut growth_ok = true;
    for w in qv_medians.windows(2) {
        let growth = w[1] / w[0];
        growth_ok &= growth >= criteria::QV_GROWTH_MIN;
        summary.push(SummaryRow::checked(
            "E3",
            "qv_growth_per_doubling",
            None,
            growth,
            criteria::QV_GROWTH_MIN,
            growth >= criteria::QV_GROWTH_MIN,
            E3_CLAIM,
        ));
    }
    summary.push(SummaryRow::checked(
        "E3",
        "a_eps_bound_all_sizes",
        None,
        bounds_ok as u64 as f64,
        1.0,
        bounds_ok,
        E3_CLAIM,
    ));

    Ok(ExperimentResult {
        name: "E3".into(),
        pass: growth_ok && bounds_ok,
        summary,
        detail_csv: vec![("e3_detail.csv".into(), detail.finish())],
    })
}

// ---------------------------------------------------------------------
// E4: mild Ito residual with the operator-trace term
// ---------------------------------------------------------------------

const E4_CLAIM: &str = "Ito formula for mild processes with the operator-trace second-order term";

struct E4Path {
    ratio: f64,
    full: f64,
    control: f64,
    chi_gap: f64,
}

pub fn run_e4(cfg: &RunConfig) -> Result<ExperimentResult> {
    let coarse_grid = cfg.grid()?;
    let fine_grid = coarse_grid.refined(2)?;
    let n = cfg.n_modes;
    // the residual order study runs where discretization, not the realized
    // quadratic-variation fluctuation, dominates: small sigma, larger x0
    let spec = ConvolutionSpec {
        x0: SpectralVector::basis(n, 0).scale(cfg.e4_x0),
        drift: Drift::Zero,
        diffusion: Diffusion::scaled_identity(n, cfg.e4_sigma),
        gen: DiagonalGenerator::dirichlet_heat(n),
        q: QSpectrum::power_law(n, cfg.q_alpha),
    };
    let f = SquareObservable {
        z: SpectralVector::basis(n, 0),
    };

    let per_path = collect_errors(map_paths(cfg.n_paths, cfg.threads, |p| -> Result<E4Path> {
        let fine_noise = sample_q_wiener(&fine_grid, &spec.q, cfg.master_seed, p);
        let coarse_noise = fine_noise.coarsen(2)?;
        let coarse = simulate_mild(&spec, &coarse_noise)?;
        let fine = simulate_mild(&spec, &fine_noise)?;
        let rep_c = ito_mild_residual(&coarse, &f)?;
        let rep_f = ito_mild_residual(&fine, &f)?;
        // internal consistency: the Stieltjes pairing against the analytic
        // tensor QV curve reproduces the trace-term discretization
        let chi = ito_chi_residual(&coarse, &f, &analytic_tensor_qv_curve(&coarse))?;
        let chi_gap = rep_c
            .residual
            .iter()
            .zip(&chi.residual)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        Ok(E4Path {
            ratio: rep_c.residual_sup / rep_f.residual_sup,
            full: rep_c.residual_sup,
            control: rep_c.control_sup,
            chi_gap,
        })
    }))?;

    let mut detail = EstimatorCsv::new();
    for (p, row) in per_path.iter().enumerate() {
        detail.push("e4_halving_ratio", p as u64, coarse_grid.dt(), coarse_grid.horizon(), row.ratio);
        detail.push("e4_residual_sup", p as u64, coarse_grid.dt(), coarse_grid.horizon(), row.full);
        detail.push("e4_control_sup", p as u64, coarse_grid.dt(), coarse_grid.horizon(), row.control);
    }

    let ratio_med = median(&per_path.iter().map(|r| r.ratio).collect::<Vec<_>>());
    let full_med = median(&per_path.iter().map(|r| r.full).collect::<Vec<_>>());
    let ctrl_med = median(&per_path.iter().map(|r| r.control).collect::<Vec<_>>());
    let chi_worst = per_path.iter().fold(0.0f64, |a, r| a.max(r.chi_gap));

    let (lo, hi) = criteria::ITO_RATIO_WINDOW;
    let ratio_ok = ratio_med >= lo && ratio_med <= hi;
    let ctrl_ok = ctrl_med >= criteria::ITO_CONTROL_FACTOR * full_med;
    let chi_ok = chi_worst <= criteria::RESIDUAL_AGREE_TOL;

    let summary = vec![
        SummaryRow::checked("E4", "median_halving_ratio", None, ratio_med, lo, ratio_ok, E4_CLAIM),
        SummaryRow::info("E4", "median_residual_sup", None, full_med, E4_CLAIM),
        SummaryRow::checked(
            "E4",
            "control_over_full",
            None,
            ctrl_med / full_med,
            criteria::ITO_CONTROL_FACTOR,
            ctrl_ok,
            E4_CLAIM,
        ),
        SummaryRow::checked(
            "E4",
            "hessian_discretizations_gap",
            None,
            chi_worst,
            criteria::RESIDUAL_AGREE_TOL,
            chi_ok,
            E4_CLAIM,
        ),
    ];

    Ok(ExperimentResult {
        name: "E4".into(),
        pass: ratio_ok && ctrl_ok && chi_ok,
        summary,
        detail_csv: vec![("e4_detail.csv".into(), detail.finish())],
    })
}

// ---------------------------------------------------------------------
// E5: orthogonal decomposition of a C01 observable
// ---------------------------------------------------------------------

const E5_CLAIM: &str =
    "C01 observable of a mild path splits into a martingale plus a martingale-orthogonal part";

pub fn run_e5(cfg: &RunConfig) -> Result<ExperimentResult> {
    let grid = cfg.grid()?;
    let ladder = cfg.ladder()?;
    let rungs: Vec<usize> = ladder.descending().collect();
    let spec = cfg.convolution_spec();
    let f = RoughObservable {
        z: SpectralVector::basis(cfg.n_modes, 0),
        delta: cfg.e5_delta,
        g1: 0.5,
    };

    let per_path = collect_errors(map_paths(cfg.n_paths, cfg.threads, |p| -> Result<(Vec<f64>, Vec<f64>)> {
        let noise = sample_q_wiener(&grid, &spec.q, cfg.master_seed, p);
        let path = simulate_mild(&spec, &noise)?;
        let n_mart = driving_mode_bm(&path, 0)?;
        let rep = fukushima_orthogonality(&path, &f, &n_mart, &ladder)?;
        Ok((
            rep.per_eps.iter().map(|s| s.value).collect(),
            rep.control_per_eps.iter().map(|s| s.value).collect(),
        ))
    }))?;

    let mut detail = EstimatorCsv::new();
    for (p, (orth, ctrl)) in per_path.iter().enumerate() {
        for (r, &m) in rungs.iter().enumerate() {
            detail.push("e5_orthogonality", p as u64, ladder.eps(m, &grid), grid.horizon(), orth[r]);
            detail.push("e5_control", p as u64, ladder.eps(m, &grid), grid.horizon(), ctrl[r]);
        }
    }

    let orth_med: Vec<f64> = (0..rungs.len())
        .map(|r| median(&per_path.iter().map(|s| s.0[r]).collect::<Vec<_>>()))
        .collect();
    let ctrl_final = median(&per_path.iter().map(|s| *s.1.last().unwrap()).collect::<Vec<_>>());
    let decreasing = strictly_decreasing(&orth_med);
    let final_orth = *orth_med.last().unwrap();
    let power_ok = final_orth <= ctrl_final / criteria::ORTH_CONTROL_FACTOR;

    let mut summary = Vec::new();
    for (r, &m) in rungs.iter().enumerate() {
        summary.push(SummaryRow::info(
            "E5",
            "median_orthogonality",
            Some(ladder.eps(m, &grid)),
            orth_med[r],
            E5_CLAIM,
        ));
    }
    summary.push(SummaryRow::checked(
        "E5",
        "ladder_strictly_decreasing",
        None,
        decreasing as u64 as f64,
        1.0,
        decreasing,
        E5_CLAIM,
    ));
    summary.push(SummaryRow::checked(
        "E5",
        "final_vs_control",
        None,
        final_orth / ctrl_final,
        1.0 / criteria::ORTH_CONTROL_FACTOR,
        power_ok,
        E5_CLAIM,
    ));

    Ok(ExperimentResult {
        name: "E5".into(),
        pass: decreasing && power_ok,
        summary,
        detail_csv: vec![("e5_detail.csv".into(), detail.finish())],
    })
}

// ---------------------------------------------------------------------
// E6: tensor covariation against the analytic noise covariance
// ---------------------------------------------------------------------

const E6_CLAIM: &str = "tensor quadratic variation of the noise martingale is t times the noise covariance";
const E6_MIN_PATHS: usize = 200;

pub fn run_e6(cfg: &RunConfig) -> Result<ExperimentResult> {
    let grid = cfg.grid()?;
    let n = cfg.n_modes;
    let spec = cfg.convolution_spec();
    let target = spec.diffusion.noise_cov(&spec.q);
    let m_rung = cfg.eps_multiples[0];
    let n_paths = cfg.n_paths.max(E6_MIN_PATHS);

    let per_path = collect_errors(map_paths(n_paths, cfg.threads, |p| -> Result<Vec<f64>> {
        let noise = sample_q_wiener(&grid, &spec.q, cfg.master_seed, p);
        // the martingale part alone: cumulative sigma-mapped increments
        let mut values = Vec::with_capacity(grid.n_nodes());
        let mut acc = SpectralVector::zeros(n);
        values.push(acc.clone());
        for j in 0..grid.steps() {
            let dw = noise.values[j + 1].sub(&noise.values[j]);
            acc = acc.add(&spec.diffusion.apply(&dw));
            values.push(acc.clone());
        }
        let mart = VectorPath::from_values(grid, values)?;
        let est = tensor_cov_eps(&mart, &mart, m_rung)?;
        let last = est.values.last().expect("curve");
        Ok((0..n).map(|k| last.entry(k, k)).collect())
    }))?;

    let mut detail = EstimatorCsv::new();
    for (p, diag) in per_path.iter().enumerate() {
        for (k, v) in diag.iter().enumerate() {
            detail.push(
                &format!("e6_tensor_diag_mode{}", k + 1),
                p as u64,
                m_rung as f64 * grid.dt(),
                grid.horizon(),
                *v,
            );
        }
    }

    let mut summary = Vec::new();
    let mut all_ok = true;
    for k in 0..n {
        let scale = grid.horizon() * target.entry(k, k);
        if scale <= 0.0 {
            continue;
        }
        let med = median(&per_path.iter().map(|d| d[k]).collect::<Vec<_>>());
        let rel = (med - scale).abs() / scale;
        let ok = rel <= criteria::TENSOR_COV_REL_TOL;
        all_ok &= ok;
        summary.push(SummaryRow::checked(
            "E6",
            &format!("mode{}_rel_dev", k + 1),
            Some(m_rung as f64 * grid.dt()),
            rel,
            criteria::TENSOR_COV_REL_TOL,
            ok,
            E6_CLAIM,
        ));
    }

    Ok(ExperimentResult {
        name: "E6".into(),
        pass: all_ok,
        summary,
        detail_csv: vec![("e6_detail.csv".into(), detail.finish())],
    })
}

// ---------------------------------------------------------------------
// E7: order of the generator-domain duality residual
// ---------------------------------------------------------------------

const E7_CLAIM: &str = "generator-domain duality of the remainder holds at first order in dt";

pub fn run_e7(cfg: &RunConfig) -> Result<ExperimentResult> {
    let coarse_grid = cfg.grid()?;
    let fine_grid = coarse_grid.refined(2)?;
    let spec = cfg.convolution_spec();
    let z = SpectralVector::basis(cfg.n_modes, 0);

    let ratios = collect_errors(map_paths(cfg.n_paths, cfg.threads, |p| -> Result<f64> {
        let fine_noise = sample_q_wiener(&fine_grid, &spec.q, cfg.master_seed, p);
        let coarse_noise = fine_noise.coarsen(2)?;
        let rc = crate::convolution::ondrejat_check(&simulate_mild(&spec, &coarse_noise)?, &z)?;
        let rf = crate::convolution::ondrejat_check(&simulate_mild(&spec, &fine_noise)?, &z)?;
        Ok(rc.max_abs / rf.max_abs)
    }))?;

    let mut detail = EstimatorCsv::new();
    for (p, r) in ratios.iter().enumerate() {
        detail.push("e7_richardson_ratio", p as u64, coarse_grid.dt(), coarse_grid.horizon(), *r);
    }

    let med = median(&ratios);
    let (lo, hi) = criteria::DUALITY_RATIO_WINDOW;
    let ok = med >= lo && med <= hi;
    let summary = vec![SummaryRow::checked(
        "E7",
        "median_richardson_ratio",
        None,
        med,
        lo,
        ok,
        E7_CLAIM,
    )];

    Ok(ExperimentResult {
        name: "E7".into(),
        pass: ok,
        summary,
        detail_csv: vec![("e7_detail.csv".into(), detail.finish())],
    })
}

// ---------------------------------------------------------------------
// E8: the fractional extension
// ---------------------------------------------------------------------

const E8_CLAIM: &str =
    "Young chain rule, zero scalar QV of the fractional convolution, Hurst regularity of the driver";
const E8_FRAC_PATHS: usize = 16;
const E8_HOLDER_SCALES: [usize; 5] = [4, 8, 16, 32, 64];

pub fn run_e8(cfg: &RunConfig) -> Result<ExperimentResult> {
    let mut summary = Vec::new();
    let mut detail = EstimatorCsv::new();

    // (a) Young chain rule at the sampler's resolution cap
    let young_grid = TimeGrid::new(cfg.t_horizon, cfg.young_steps)?;
    let young_sampler = FbmSampler::new(&young_grid, cfg.hurst, FbmMethod::IncrementToeplitz)?;
    let rate = 2.0f64.powf(1.0 - 2.0 * cfg.hurst);
    let young = collect_errors(map_paths(cfg.young_paths, cfg.threads, |p| -> Result<(f64, f64)> {
        let b = young_sampler.sample(cfg.master_seed, p)?;
        let res = young_integral(
            &b,
            &b,
            YoungOpts {
                levels: 3,
                tol_rel: 1e-2,
                rate_hint: Some(rate),
                holder_gate: true,
            },
        )?;
        let target = b.values.last().unwrap().powi(2) / 2.0;
        Ok((
            (res.value - target).abs() / target.abs(),
            (res.finest - target).abs() / target.abs(),
        ))
    }))?;
    for (p, (rel, _)) in young.iter().enumerate() {
        detail.push("e8_young_rel_err", p as u64, young_grid.dt(), young_grid.horizon(), *rel);
    }
    let young_med = median(&young.iter().map(|y| y.0).collect::<Vec<_>>());
    let plain_med = median(&young.iter().map(|y| y.1).collect::<Vec<_>>());
    let young_ok = young_med <= criteria::YOUNG_REL_TOL;
    summary.push(SummaryRow::checked(
        "E8",
        "young_median_rel_err",
        None,
        young_med,
        criteria::YOUNG_REL_TOL,
        young_ok,
        E8_CLAIM,
    ));
    summary.push(SummaryRow::info(
        "E8",
        "young_finest_leftsum_rel_err",
        None,
        plain_med,
        E8_CLAIM,
    ));

    // (b) scalar QV of the fractional convolution term down the ladder
    let frac_grid = TimeGrid::new(cfg.t_horizon, cfg.frac_steps)?;
    let frac_ladder = crate::grid::EpsLadder::new(cfg.eps_multiples.clone(), &frac_grid)?;
    let frac_rungs: Vec<usize> = frac_ladder.descending().collect();
    let frac_sampler = FbmSampler::new(&frac_grid, cfg.hurst, FbmMethod::IncrementToeplitz)?;
    let spec = cfg.convolution_spec();
    let frac = collect_errors(map_paths(E8_FRAC_PATHS, cfg.threads, |p| -> Result<(Vec<f64>, f64, f64)> {
        let noise = sample_q_wiener(&frac_grid, &spec.q, cfg.master_seed, p);
        let path = simulate_mild(&spec, &noise)?;
        let mode = FractionalMode {
            direction: SpectralVector::basis(cfg.n_modes, 0),
            driver: frac_sampler.sample(cfg.master_seed, p)?,
        };
        let ext = simulate_fractional_extension(
            &path,
            &[mode],
            RefineOpts { levels: 3, tol_rel: 2e-3 },
        )?;
        let mut out = Vec::with_capacity(frac_rungs.len());
        for &m in &frac_rungs {
            out.push(scalar_qv_eps(&ext.convolution_term, m, IncrementNorm::H)?.terminal());
        }
        Ok((out, ext.final_rel_gap, ext.forward_backward_gap))
    }))?;
    let frac_med: Vec<f64> = (0..frac_rungs.len())
        .map(|r| median(&frac.iter().map(|s| s.0[r]).collect::<Vec<_>>()))
        .collect();
    summary.push(SummaryRow::info(
        "E8",
        "frac_refinement_rel_gap",
        None,
        median(&frac.iter().map(|s| s.1).collect::<Vec<_>>()),
        E8_CLAIM,
    ));
    summary.push(SummaryRow::info(
        "E8",
        "frac_forward_backward_gap",
        None,
        median(&frac.iter().map(|s| s.2).collect::<Vec<_>>()),
        E8_CLAIM,
    ));
    for (r, &m) in frac_rungs.iter().enumerate() {
        summary.push(SummaryRow::info(
            "E8",
            "frac_term_scalar_qv",
            Some(frac_ladder.eps(m, &frac_grid)),
            frac_med[r],
            E8_CLAIM,
        ));
    }
    let frac_ok = strictly_decreasing(&frac_med);
    summary.push(SummaryRow::checked(
        "E8",
        "frac_qv_strictly_decreasing",
        None,
        frac_ok as u64 as f64,
        1.0,
        frac_ok,
        E8_CLAIM,
    ));

    // (c) Hurst estimate of the driver
    let holder_grid = TimeGrid::new(cfg.t_horizon, cfg.holder_steps)?;
    let holder_sampler = FbmSampler::new(&holder_grid, cfg.hurst, FbmMethod::IncrementToeplitz)?;
    let estimates = collect_errors(map_paths(cfg.holder_paths, cfg.threads, |p| -> Result<f64> {
        holder_exponent_estimate(
            &holder_sampler.sample(cfg.master_seed, p)?,
            &E8_HOLDER_SCALES,
        )
    }))?;
    for (p, e) in estimates.iter().enumerate() {
        detail.push("e8_holder_estimate", p as u64, holder_grid.dt(), holder_grid.horizon(), *e);
    }
    let holder_mean = mean(&estimates);
    let holder_dev = (holder_mean - cfg.hurst).abs();
    let holder_ok = holder_dev <= criteria::HOLDER_TOL;
    summary.push(SummaryRow::checked(
        "E8",
        "holder_mean_abs_dev",
        None,
        holder_dev,
        criteria::HOLDER_TOL,
        holder_ok,
        E8_CLAIM,
    ));

    Ok(ExperimentResult {
        name: "E8".into(),
        pass: young_ok && frac_ok && holder_ok,
        summary,
        detail_csv: vec![("e8_detail.csv".into(), detail.finish())],
    })
}

// ---------------------------------------------------------------------
// runner
// ---------------------------------------------------------------------

/// Run the selected experiments in canonical order.
pub fn run_experiments(cfg: &RunConfig) -> Result<Vec<ExperimentResult>> {
    cfg.validate()?;
    if matches!(cfg.sigma, SigmaSpec::RankOne(_)) && cfg.experiments.iter().any(|e| e != "E3") {
        // the default-path experiments presume a diagonal diffusion; E3
        // builds its own rank-one spec either way
        return Err(Error::config(
            "sigma",
            "rank_one sigma is only meaningful for experiment E3",
        ));
    }
    let mut results = Vec::new();
    for name in crate::config::ALL_EXPERIMENTS {
        if !cfg.experiments.iter().any(|e| e == name) {
            continue;
        }
        let result = match name {
            "E1" => run_e1(cfg)?,
            "E2" => run_e2(cfg)?,
            "E3" => run_e3(cfg)?,
            "E4" => run_e4(cfg)?,
            "E5" => run_e5(cfg)?,
            "E6" => run_e6(cfg)?,
            "E7" => run_e7(cfg)?,
            "E8" => run_e8(cfg)?,
            _ => unreachable!("validated above"),
        };
        results.push(result);
    }
    Ok(results)
}

pub fn all_pass(results: &[ExperimentResult]) -> bool {
    results.iter().all(|r| r.pass)
}
