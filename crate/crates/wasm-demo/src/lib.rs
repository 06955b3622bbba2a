//! Browser bindings for three interactive views of the regularized
//! calculus: simulate a mild path, probe the epsilon ladder of its
//! remainder, and integrate a fractional path against itself.
//!
//! Every entry point returns a JSON string; the page parses it and draws
//! with a plain canvas. All randomness is seed-driven, so the demo is
//! reproducible by construction.

use serde_json::json;
use wasm_bindgen::prelude::*;

use mildcalc::config::RunConfig;
use mildcalc::convolution::{compute_remainder, simulate_mild};
use mildcalc::estimators::{
    a_eps_statistic, scalar_qv_eps, young_integral, IncrementNorm, YoungOpts,
};
use mildcalc::grid::TimeGrid;
use mildcalc::noise::{holder_exponent_estimate, sample_q_wiener, FbmMethod, FbmSampler};

fn err_json(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

fn demo_config(n_modes: usize, sigma: f64, q_alpha: f64, x0_amp: f64, steps: usize, seed: u64) -> RunConfig {
    RunConfig {
        n_modes,
        steps,
        q_alpha,
        sigma: mildcalc::config::SigmaSpec::Diag(sigma),
        x0: mildcalc::config::X0Spec::Mode1(x0_amp),
        master_seed: seed,
        ..RunConfig::default()
    }
}

/// Simulate one mild path; returns node times, the state norm, the
/// remainder norm, and the first four mode curves.
#[wasm_bindgen]
pub fn simulate_path_json(
    n_modes: usize,
    sigma: f64,
    q_alpha: f64,
    x0_amp: f64,
    steps_log2: u32,
    seed: u64,
) -> String {
    let steps = 1usize << steps_log2.clamp(6, 13);
    let cfg = demo_config(n_modes.clamp(1, 64), sigma, q_alpha, x0_amp, steps, seed);
    let run = || -> mildcalc::Result<String> {
        let grid = cfg.grid()?;
        let spec = cfg.convolution_spec();
        let noise = sample_q_wiener(&grid, &spec.q, cfg.master_seed, 0);
        let path = simulate_mild(&spec, &noise)?;
        let y = compute_remainder(&path);
        let t: Vec<f64> = (0..grid.n_nodes()).map(|j| grid.node(j)).collect();
        let norm: Vec<f64> = path.x.iter().map(|v| v.norm()).collect();
        let y_norm: Vec<f64> = y.values.iter().map(|v| v.norm()).collect();
        let modes: Vec<Vec<f64>> = (0..cfg.n_modes.min(4))
            .map(|k| path.x.iter().map(|v| v.coeffs()[k]).collect())
            .collect();
        Ok(json!({
            "t": t,
            "norm": norm,
            "y_norm": y_norm,
            "modes": modes,
        })
        .to_string())
    };
    run().unwrap_or_else(err_json)
}

/// Epsilon-ladder statistics of one realization: the remainder's
/// chi-statistic `A(eps)` with its per-path bound, and the scalar
/// quadratic-variation estimate of the state, per rung.
#[wasm_bindgen]
pub fn ladder_stats_json(
    n_modes: usize,
    sigma: f64,
    q_alpha: f64,
    x0_amp: f64,
    steps_log2: u32,
    seed: u64,
) -> String {
    let steps = 1usize << steps_log2.clamp(8, 13);
    let cfg = demo_config(n_modes.clamp(1, 64), sigma, q_alpha, x0_amp, steps, seed);
    let run = || -> mildcalc::Result<String> {
        let grid = cfg.grid()?;
        let ladder = cfg.ladder()?;
        let spec = cfg.convolution_spec();
        let noise = sample_q_wiener(&grid, &spec.q, cfg.master_seed, 0);
        let path = simulate_mild(&spec, &noise)?;
        let y = compute_remainder(&path);
        let sup2 = path.sup_state_norm().powi(2);
        let mut rows = Vec::new();
        for m in ladder.descending() {
            let eps = ladder.eps(m, &grid);
            let a = a_eps_statistic(&y, &y, &spec.gen, m)?;
            let qv = scalar_qv_eps(&path.state_path(), m, IncrementNorm::H)?.terminal();
            rows.push(json!({
                "m": m,
                "eps": eps,
                "a_eps": a,
                "bound": 1.05 * eps * grid.horizon() * sup2,
                "scalar_qv": qv,
            }));
        }
        Ok(json!({ "rows": rows }).to_string())
    };
    run().unwrap_or_else(err_json)
}

/// Fractional path and the Young chain-rule ladder: level sums of the
/// left-Riemann integral of the path against itself, the extrapolated
/// limit, the chain-rule target, and a Hurst estimate of the path.
#[wasm_bindgen]
pub fn fbm_young_json(hurst: f64, steps_log2: u32, seed: u64) -> String {
    let steps = 1usize << steps_log2.clamp(8, 12);
    let run = || -> mildcalc::Result<String> {
        let grid = TimeGrid::new(1.0, steps)?;
        let sampler = FbmSampler::new(&grid, hurst, FbmMethod::IncrementToeplitz)?;
        let b = sampler.sample(seed, 0)?;
        let res = young_integral(
            &b,
            &b,
            YoungOpts {
                levels: 3,
                tol_rel: 5e-2,
                rate_hint: Some(2.0f64.powf(1.0 - 2.0 * hurst)),
                holder_gate: false,
            },
        )?;
        let target = b.values.last().expect("nonempty").powi(2) / 2.0;
        let holder = holder_exponent_estimate(&b, &[4, 8, 16, 32, 64]).unwrap_or(f64::NAN);
        let t: Vec<f64> = (0..grid.n_nodes()).map(|j| grid.node(j)).collect();
        Ok(json!({
            "t": t,
            "path": b.values,
            "level_sums": res.level_sums,
            "extrapolated": res.value,
            "target": target,
            "holder": holder,
        })
        .to_string())
    };
    run().unwrap_or_else(err_json)
}
