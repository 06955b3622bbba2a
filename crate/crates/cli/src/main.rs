//! Batch harness for the verification suite: simulate paths, run the
//! epsilon-ladder estimator battery, run the experiments E1-E8, and render
//! reports from previous runs.
//!
//! Exit codes: 0 when every selected check passes, 1 when any verdict
//! fails, 2 on configuration or usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mildcalc::config::{parse_config, RunConfig};
use mildcalc::convolution::{compute_remainder, simulate_mild};
use mildcalc::error::Error;
use mildcalc::estimators::{
    a_eps_curve, covariation_eps, forward_integral_scalar, ito_sum_scalar, ladder_rate,
    scalar_qv_eps, tensor_cov_eps, IncrementNorm, LadderStat,
};
use mildcalc::experiments::{all_pass, map_paths, run_experiments};
use mildcalc::noise::{sample_brownian, sample_q_wiener, VectorPath};
use mildcalc::report::{
    fmt_f64, render_report, vector_path_csv, write_artifacts, EstimatorCsv, SummaryRow,
};

#[derive(Parser)]
#[command(
    name = "mildcalc",
    about = "Stochastic calculus via regularization: simulation, estimators and verification experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Configuration file (flat key = value); defaults are used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for path-level parallelism (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate mild paths and dump X, Y, the running stochastic integral
    /// and the driving noise as CSV.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// How many paths to dump.
        #[arg(long, default_value_t = 4)]
        paths: usize,
    },
    /// Run the epsilon-ladder estimator battery against its references.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the verification experiments E1-E8.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated experiment subset, e.g. `E1,E4`.
        #[arg(long)]
        experiments: Option<String>,
    },
    /// Render the convergence report of a previous run.
    Report {
        /// Directory holding a `summary.csv` from `verify`.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_simulate(common: &CommonArgs, paths: usize) -> Result<bool, Error> {
    let cfg = load_config(common)?;
    let grid = cfg.grid()?;
    let spec = cfg.convolution_spec();
    let count = paths.max(1) as u64;

    let sims = map_paths(count as usize, cfg.threads, |p| {
        let noise = sample_q_wiener(&grid, &spec.q, cfg.master_seed, p);
        simulate_mild(&spec, &noise).map(|path| {
            let y = compute_remainder(&path);
            (path, y)
        })
    });
    let sims = sims.into_iter().collect::<Result<Vec<_>, _>>()?;

    std::fs::create_dir_all(&common.out)?;
    let ids: Vec<u64> = (0..count).collect();
    let x_rows: Vec<_> = ids
        .iter()
        .map(|&i| (i, sims[i as usize].0.state_path()))
        .collect();
    let w_rows: Vec<_> = ids.iter().map(|&i| (i, sims[i as usize].0.w.clone())).collect();
    let s_rows: Vec<_> = ids
        .iter()
        .map(|&i| (i, sims[i as usize].0.martingale_part()))
        .collect();

    fn as_refs(rows: &[(u64, VectorPath)]) -> Vec<(u64, &VectorPath)> {
        rows.iter().map(|(i, p)| (*i, p)).collect()
    }
    std::fs::write(common.out.join("x.csv"), {
        let refs = as_refs(&x_rows);
        vector_path_csv(&refs)
    })?;
    std::fs::write(common.out.join("y.csv"), {
        let y_rows: Vec<_> = ids.iter().map(|&i| (i, &sims[i as usize].1)).collect();
        vector_path_csv(&y_rows)
    })?;
    std::fs::write(common.out.join("stoch_int.csv"), {
        let refs = as_refs(&s_rows);
        vector_path_csv(&refs)
    })?;
    std::fs::write(common.out.join("noise.csv"), {
        let refs = as_refs(&w_rows);
        vector_path_csv(&refs)
    })?;
    println!(
        "wrote x.csv, y.csv, stoch_int.csv, noise.csv for {count} paths under {}",
        common.out.display()
    );
    Ok(true)
}

/// Estimator battery: each estimator against its analytic or discrete
/// reference, aggregated as the median sup deviation per rung plus the
/// fitted decay rate of the deviation.
fn cmd_estimate(common: &CommonArgs) -> Result<bool, Error> {
    let cfg = load_config(common)?;
    let grid = cfg.grid()?;
    let ladder = cfg.ladder()?;
    let rungs: Vec<usize> = ladder.descending().collect();
    let spec = cfg.convolution_spec();
    let cov = spec.diffusion.noise_cov(&spec.q);

    struct PathStats {
        forward: Vec<f64>,
        brownian_qv: Vec<f64>,
        remainder_a: Vec<f64>,
        remainder_qv: Vec<f64>,
        tensor_diag1: Vec<f64>,
    }

    let stats = map_paths(cfg.n_paths, cfg.threads, |p| -> Result<PathStats, Error> {
        let w = sample_brownian(&grid, cfg.master_seed, p);
        let noise = sample_q_wiener(&grid, &spec.q, cfg.master_seed, p);
        let path = simulate_mild(&spec, &noise)?;
        let y = compute_remainder(&path);
        let mart = path.martingale_part();
        let ito = ito_sum_scalar(&w, &w)?;
        let mut out = PathStats {
            forward: Vec::new(),
            brownian_qv: Vec::new(),
            remainder_a: Vec::new(),
            remainder_qv: Vec::new(),
            tensor_diag1: Vec::new(),
        };
        for &m in &rungs {
            let fwd = forward_integral_scalar(&w, &w, m)?;
            out.forward.push(
                fwd.values
                    .iter()
                    .zip(&ito)
                    .fold(0.0f64, |a, (f, i)| a.max((f - i).abs())),
            );
            let qv = covariation_eps(&w, &w, m)?;
            out.brownian_qv.push(
                qv.values
                    .iter()
                    .enumerate()
                    .fold(0.0f64, |a, (j, v)| a.max((v - grid.node(j)).abs())),
            );
            out.remainder_a
                .push(a_eps_curve(&y, &y, &spec.gen, m)?.terminal());
            out.remainder_qv
                .push(scalar_qv_eps(&y, m, IncrementNorm::DualGraph(&spec.gen))?.terminal());
            let t_est = tensor_cov_eps(&mart, &mart, m)?;
            let target = grid.horizon() * cov.entry(0, 0);
            out.tensor_diag1
                .push((t_est.values.last().expect("curve").entry(0, 0) - target).abs());
        }
        Ok(out)
    });
    let stats = stats.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut detail = EstimatorCsv::new();
    let mut summary = String::from("estimator,epsilon,median_sup_dev,fitted_rate\n");
    let battery: [(&str, fn(&PathStats) -> &Vec<f64>); 5] = [
        ("forward_vs_ito", |s| &s.forward),
        ("brownian_qv_vs_t", |s| &s.brownian_qv),
        ("remainder_a_eps", |s| &s.remainder_a),
        ("remainder_scalar_qv_dual", |s| &s.remainder_qv),
        ("tensor_diag1_vs_t_cov", |s| &s.tensor_diag1),
    ];
    for (name, get) in battery {
        let mut ladder_stats = Vec::new();
        for (r, &m) in rungs.iter().enumerate() {
            let mut vals: Vec<f64> = stats.iter().map(|s| get(s)[r]).collect();
            vals.sort_by(f64::total_cmp);
            let med = vals[vals.len() / 2];
            for (p, v) in stats.iter().map(|s| get(s)[r]).enumerate() {
                detail.push(name, p as u64, ladder.eps(m, &grid), grid.horizon(), v);
            }
            ladder_stats.push(LadderStat { m, eps: ladder.eps(m, &grid), value: med });
        }
        let rate = ladder_rate(&ladder_stats);
        for s in &ladder_stats {
            summary.push_str(&format!(
                "{},{},{},{}\n",
                name,
                fmt_f64(s.eps),
                fmt_f64(s.value),
                rate.map(fmt_f64).unwrap_or_default()
            ));
        }
    }

    std::fs::create_dir_all(&common.out)?;
    std::fs::write(common.out.join("estimates.csv"), detail.finish())?;
    std::fs::write(common.out.join("estimates_summary.csv"), summary)?;
    println!(
        "wrote estimates.csv and estimates_summary.csv under {}",
        common.out.display()
    );
    Ok(true)
}

fn cmd_verify(common: &CommonArgs, experiments: &Option<String>) -> Result<bool, Error> {
    let mut cfg = load_config(common)?;
    if let Some(list) = experiments {
        cfg.experiments = list
            .split(',')
            .map(|e| e.trim().to_string())
            .filter(|e| !e.is_empty())
            .collect();
        cfg.validate()?;
    }
    let results = run_experiments(&cfg)?;
    write_artifacts(&common.out, &results)?;
    let rows: Vec<SummaryRow> = results.iter().flat_map(|r| r.summary.clone()).collect();
    print!("{}", render_report(&rows));
    for r in &results {
        println!("{}: {}", r.name, if r.pass { "PASS" } else { "FAIL" });
    }
    Ok(all_pass(&results))
}

fn cmd_report(out: &Path) -> Result<bool, Error> {
    let text = std::fs::read_to_string(out.join("summary.csv"))
        .map_err(|e| Error::config("out", format!("no summary.csv under {}: {e}", out.display())))?;
    let mut rows = Vec::new();
    let mut pass = true;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.splitn(7, ',').collect();
        if fields.len() != 7 {
            continue;
        }
        let verdict = match fields[5] {
            "pass" => Some(true),
            "fail" => Some(false),
            _ => None,
        };
        if verdict == Some(false) {
            pass = false;
        }
        rows.push(SummaryRow {
            experiment: fields[0].to_string(),
            statistic: fields[1].to_string(),
            epsilon: fields[2].parse().ok(),
            value: fields[3].parse().unwrap_or(f64::NAN),
            threshold: fields[4].parse().ok(),
            pass: verdict,
            claim: fields[6].to_string(),
        });
    }
    print!("{}", render_report(&rows));
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate { common, paths } => cmd_simulate(common, *paths),
        Command::Estimate { common } => cmd_estimate(common),
        Command::Verify { common, experiments } => cmd_verify(common, experiments),
        Command::Report { out } => cmd_report(out),
    };
    match outcome {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config { .. }) | Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
