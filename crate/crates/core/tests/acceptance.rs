//! Acceptance suite: every criterion checked at its stated tolerance, one
//! pass/fail line per criterion (visible with `--nocapture`, and in the
//! test names themselves).
//!
//! The experiment-backed criteria share a single run of the default
//! configuration; the run is computed once and cached for the process.

use std::sync::OnceLock;

use mildcalc::config::RunConfig;
use mildcalc::experiments::{run_experiments, criteria};
use mildcalc::report::ExperimentResult;
use mildcalc::spectral::{cross_tensor, OperatorDiagonal, SpectralVector, TensorElement};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn suite() -> &'static [ExperimentResult] {
    static RESULTS: OnceLock<Vec<ExperimentResult>> = OnceLock::new();
    RESULTS.get_or_init(|| {
        let cfg = RunConfig::default();
        run_experiments(&cfg).expect("default experiment suite runs")
    })
}

fn experiment(name: &str) -> &'static ExperimentResult {
    suite()
        .iter()
        .find(|r| r.name == name)
        .unwrap_or_else(|| panic!("experiment {name} missing from suite"))
}

fn stat(name: &str, statistic: &str) -> f64 {
    experiment(name)
        .summary
        .iter()
        .find(|r| r.statistic == statistic)
        .unwrap_or_else(|| panic!("{name} lacks statistic {statistic}"))
        .value
}

fn verdict_line(criterion: &str, label: &str, pass: bool) {
    println!(
        "ACCEPTANCE {criterion} [{label}]: {}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_01_cross_norm_and_trace_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024_01);
    let mut randv = |n: usize| {
        SpectralVector::new((0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
    };

    // cross-norm exactness to 1e-12 on random pairs
    for _ in 0..500 {
        let a = randv(4);
        let b = randv(4);
        let u = cross_tensor(&a, &b).unwrap();
        let expect = a.norm() * b.norm();
        assert!(
            (u.projective_norm() - expect).abs() <= 1e-12 * expect.max(1.0),
            "cross-norm defect"
        );
    }

    // |Tr| bounded by the projective norm; Hilbert-Schmidt identity
    for _ in 0..500 {
        let a = randv(4);
        let u = cross_tensor(&a, &a).unwrap();
        assert!(u.nuclear_trace().abs() <= u.projective_norm() + 1e-12);
    }
    let s = OperatorDiagonal::new(vec![1.5, -2.0, 0.25, 3.0]).unwrap();
    let tr_ss: f64 = s.diag().iter().map(|d| d * d).sum();
    assert!((s.hs_norm().powi(2) - tr_ss).abs() <= 1e-12 * tr_ss);

    // randomized decomposition lower bound, 1e4 trials at rank <= 4, N <= 4
    for _ in 0..10_000 {
        let mut u = TensorElement::zeros(4);
        let mut cost = 0.0;
        for _ in 0..4 {
            let x = randv(4);
            let y = randv(4);
            cost += x.norm() * y.norm();
            u = u.add(&cross_tensor(&x, &y).unwrap());
        }
        assert!(
            cost >= u.projective_norm() - 1e-9,
            "decomposition cost {cost} beat the nuclear norm {}",
            u.projective_norm()
        );
    }
    verdict_line("C1", "cross-norm and trace algebra", true);
}

#[test]
fn criterion_02_forward_integral_matches_ito() {
    let e1 = experiment("E1");
    verdict_line("C2", "E1 forward-vs-Ito ladder", e1.pass);
    assert!(
        e1.pass,
        "E1 failed: final rung {} vs threshold {}",
        stat("E1", "final_rung_median"),
        RunConfig::default().e1_final_threshold
    );
}

#[test]
fn criterion_03_remainder_chi_statistic_bound_and_rate() {
    let e2 = experiment("E2");
    let worst = stat("E2", "per_path_bound_worst_ratio");
    let rate = stat("E2", "fitted_rate");
    verdict_line("C3", "E2 per-path A(eps) bound and rate", e2.pass);
    assert!(worst <= 1.0, "per-path bound violated: worst ratio {worst}");
    assert!(
        rate >= criteria::A_EPS_MIN_SLOPE,
        "fitted rate {rate} below {}",
        criteria::A_EPS_MIN_SLOPE
    );
    assert!(e2.pass);
}

#[test]
fn criterion_04_scalar_qv_divergence_contrast() {
    let e3 = experiment("E3");
    let growths: Vec<f64> = e3
        .summary
        .iter()
        .filter(|r| r.statistic == "qv_growth_per_doubling")
        .map(|r| r.value)
        .collect();
    verdict_line("C4", "E3 truncation-growth contrast", e3.pass);
    assert_eq!(growths.len(), 2, "two doublings expected");
    for g in &growths {
        assert!(
            *g >= criteria::QV_GROWTH_MIN,
            "growth {g} below {}",
            criteria::QV_GROWTH_MIN
        );
    }
    assert!(e3.pass);
}

#[test]
fn criterion_05_mild_ito_residual_order_and_trace_power() {
    let e4 = experiment("E4");
    let ratio = stat("E4", "median_halving_ratio");
    let control = stat("E4", "control_over_full");
    verdict_line("C5", "E4 Ito residual halving and trace control", e4.pass);
    let (lo, hi) = criteria::ITO_RATIO_WINDOW;
    assert!(
        ratio >= lo && ratio <= hi,
        "halving ratio {ratio} outside [{lo}, {hi}]"
    );
    assert!(
        control >= criteria::ITO_CONTROL_FACTOR,
        "trace-omitted control factor {control} below {}",
        criteria::ITO_CONTROL_FACTOR
    );
    assert!(e4.pass);
}

#[test]
fn criterion_06_fukushima_orthogonality() {
    let e5 = experiment("E5");
    let final_vs_control = stat("E5", "final_vs_control");
    verdict_line("C6", "E5 orthogonality ladder", e5.pass);
    assert!(
        final_vs_control <= 1.0 / criteria::ORTH_CONTROL_FACTOR,
        "final orthogonality at {final_vs_control} of control"
    );
    assert!(e5.pass);
}

#[test]
fn criterion_07_tensor_covariation_per_mode() {
    let e6 = experiment("E6");
    verdict_line("C7", "E6 tensor covariation vs analytic trace", e6.pass);
    for row in &e6.summary {
        if row.statistic.ends_with("_rel_dev") {
            assert!(
                row.value <= criteria::TENSOR_COV_REL_TOL,
                "{}: {} above {}",
                row.statistic,
                row.value,
                criteria::TENSOR_COV_REL_TOL
            );
        }
    }
    assert!(e6.pass);
}

#[test]
fn criterion_08_duality_residual_order() {
    let e7 = experiment("E7");
    let ratio = stat("E7", "median_richardson_ratio");
    verdict_line("C8", "E7 duality Richardson ratio", e7.pass);
    let (lo, hi) = criteria::DUALITY_RATIO_WINDOW;
    assert!(
        ratio >= lo && ratio <= hi,
        "Richardson ratio {ratio} outside [{lo}, {hi}]"
    );
    assert!(e7.pass);
}

#[test]
fn criterion_09_fractional_extension() {
    let e8 = experiment("E8");
    let young = stat("E8", "young_median_rel_err");
    let holder = stat("E8", "holder_mean_abs_dev");
    verdict_line("C9", "E8 Young identity, zero-QV surrogate, Hurst estimate", e8.pass);
    assert!(
        young <= criteria::YOUNG_REL_TOL,
        "Young relative error {young} above {}",
        criteria::YOUNG_REL_TOL
    );
    assert!(
        holder <= criteria::HOLDER_TOL,
        "Hurst deviation {holder} above {}",
        criteria::HOLDER_TOL
    );
    assert!(e8.pass);
}

#[test]
fn criterion_10_thread_count_determinism() {
    // identical config, different worker counts: byte-identical artifacts
    let base = RunConfig {
        experiments: vec!["E1".into()],
        ..RunConfig::default()
    };
    let run = |threads: usize| {
        let cfg = RunConfig { threads, ..base.clone() };
        let results = run_experiments(&cfg).expect("E1 runs");
        let mut bytes = mildcalc::report::summary_csv(&results[0].summary);
        for (_, body) in &results[0].detail_csv {
            bytes.push_str(body);
        }
        bytes
    };
    let single = run(1);
    let multi = run(4);
    let pass = single == multi;
    verdict_line("C10", "thread-count determinism of artifacts", pass);
    assert!(pass, "artifacts differ between thread counts");
}
