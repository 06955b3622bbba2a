//! Numerical verification of the structural identities of the calculus:
//! the martingale chain rule, the Ito formula with operator-trace term,
//! the Dirichlet-type decomposition of mild paths, and the orthogonality
//! statement that substitutes for the Ito formula when the observable is
//! only once differentiable.
//!
//! Each routine works on a single realization and returns raw statistics;
//! Monte Carlo aggregation and pass verdicts live in the experiment layer.
//! One side of every identity is an analytic oracle (closed-form classical
//! covariations, exact trace terms); estimation only ever enters on the
//! side being verified.

use crate::convolution::MildPath;
use crate::error::{Error, Result};
use crate::estimators::{covariation_eps, ito_sum_pairing, EpsCurve};
use crate::grid::EpsLadder;
use crate::noise::{ScalarPath, VectorPath};
use crate::semigroup::apply_generator_adjoint;
use crate::spectral::{inner, trace_pair, trace_pair_diag, SpectralVector, TensorElement};
use crate::testfn::{Smoothness, TestFunction};

/// Value of one ladder rung.
#[derive(Debug, Clone, Copy)]
pub struct EpsStat {
    pub m: usize,
    pub eps: f64,
    pub value: f64,
}

/// Raw output of a verification routine on one path.
#[derive(Debug, Clone, Default)]
pub struct DecompositionReport {
    /// Node-wise residual curve, when the check produces one.
    pub residual: Option<Vec<f64>>,
    pub residual_sup: Option<f64>,
    /// Primary statistic per ladder rung, largest epsilon first.
    pub per_eps: Vec<EpsStat>,
    /// Control statistic per rung (the quantity that must stay away from
    /// zero for the check to have power), when defined.
    pub control_per_eps: Vec<EpsStat>,
}

fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Cumulative trapezoid of a node-sampled integrand; shared by both Ito
/// residual routines so their common terms agree bitwise.
fn trapezoid_cumsum(f: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * dt;
        out.push(acc);
    }
    out
}

/// Chain rule for stochastic integrals: with `X(t) = int <Z, dM>`, the
/// covariation `[X, N]` equals the Stieltjes integral of `Z` against the
/// classical covariation `[M, N]^cl`. The classical side is supplied
/// analytically by the caller.
pub fn chain_rule_check(
    z: &VectorPath,
    mart: &VectorPath,
    n: &ScalarPath,
    classical_cov: &VectorPath,
    ladder: &EpsLadder,
) -> Result<DecompositionReport> {
    let x_values = ito_sum_pairing(z, mart)?;
    let x = ScalarPath::from_values(z.grid, x_values)?;

    // Stieltjes reference: cumulative sum of <Z(t_j), d[M,N]^cl(t_j)>
    let mut reference = Vec::with_capacity(z.grid.n_nodes());
    let mut acc = 0.0;
    reference.push(0.0);
    for j in 0..z.grid.steps() {
        let d = classical_cov.values[j + 1].sub(&classical_cov.values[j]);
        acc += inner(&z.values[j], &d)?;
        reference.push(acc);
    }

    let mut per_eps = Vec::new();
    for m in ladder.descending() {
        let est = covariation_eps(&x, n, m)?;
        let dev = est
            .values
            .iter()
            .zip(&reference)
            .fold(0.0f64, |a, (e, r)| a.max((e - r).abs()));
        per_eps.push(EpsStat { m, eps: est.eps, value: dev });
    }
    Ok(DecompositionReport {
        per_eps,
        ..Default::default()
    })
}

/// The five discretized right-hand-side terms of the mild Ito formula,
/// cumulated node-wise. Split out so the full residual and the
/// trace-omitted control share every other term exactly.
struct MildItoTerms {
    lhs: Vec<f64>,
    smooth_part: Vec<f64>,
    trace_term: Vec<f64>,
    martingale_term: Vec<f64>,
}

fn mild_ito_terms(path: &MildPath, f: &dyn TestFunction) -> Result<MildItoTerms> {
    if f.smoothness() != Smoothness::C12 {
        return Err(Error::InvalidArgument(
            "mild Ito residual needs a C12 test function".into(),
        ));
    }
    let grid = path.grid;
    let dt = grid.dt();
    let nodes = grid.n_nodes();

    let lhs: Vec<f64> = (0..nodes)
        .map(|j| f.eval(grid.node(j), &path.x[j]))
        .collect();

    let grads: Vec<SpectralVector> = (0..nodes)
        .map(|j| f.grad(grid.node(j), &path.x[j]))
        .collect();

    // d/dt term, generator term and drift term share the trapezoid rule
    let mut smooth_integrand = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let t = grid.node(j);
        let agrad = apply_generator_adjoint(&grads[j], &path.spec.gen)?;
        let b = path.spec.drift.eval(t, &path.x[j]);
        smooth_integrand
            .push(f.dt(t, &path.x[j]) + inner(&agrad, &path.x[j])? + inner(&grads[j], &b)?);
    }
    let smooth_part = trapezoid_cumsum(&smooth_integrand, dt);

    // operator-trace term, exact for the diagonal noise covariance
    let cov_diag = path.spec.diffusion.noise_cov_diag(&path.spec.q);
    let cov_full = path.spec.diffusion.noise_cov(&path.spec.q);
    let mut trace_integrand = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let hess = f.require_hessian(grid.node(j), &path.x[j])?;
        let paired = match &cov_diag {
            Some(d) => trace_pair_diag(d, &hess)?,
            None => trace_pair(&cov_full, &hess)?,
        };
        trace_integrand.push(0.5 * paired);
    }
    let trace_term = trapezoid_cumsum(&trace_integrand, dt);

    // martingale term: left-point Ito sum on the shared noise increments
    let mut martingale_term = Vec::with_capacity(nodes);
    let mut acc = 0.0;
    martingale_term.push(0.0);
    for j in 0..grid.steps() {
        let shock = path.stoch_int[j + 1].sub(&path.stoch_int[j]);
        acc += inner(&grads[j], &shock)?;
        martingale_term.push(acc);
    }

    Ok(MildItoTerms {
        lhs,
        smooth_part,
        trace_term,
        martingale_term,
    })
}

/// Output of the two Ito-formula residual checks.
#[derive(Debug, Clone)]
pub struct ItoResidualReport {
    /// Node-wise residual of the full formula.
    pub residual: Vec<f64>,
    pub residual_sup: f64,
    /// Residual with the operator-trace term omitted (power control).
    pub control_sup: f64,
}

/// Node-wise residual of the mild Ito formula for a `C12` observable:
/// `F(t, X(t)) - F(0, x0)` minus the time, generator, drift, trace and
/// martingale terms, each discretized as in the module docs.
pub fn ito_mild_residual(path: &MildPath, f: &dyn TestFunction) -> Result<ItoResidualReport> {
    let terms = mild_ito_terms(path, f)?;
    let nodes = path.grid.n_nodes();
    let mut residual = Vec::with_capacity(nodes);
    let mut control = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let rhs = terms.smooth_part[j] + terms.trace_term[j] + terms.martingale_term[j];
        let r = terms.lhs[j] - terms.lhs[0] - rhs;
        residual.push(r);
        control.push(r + terms.trace_term[j]);
    }
    Ok(ItoResidualReport {
        residual_sup: sup_abs(&residual),
        control_sup: sup_abs(&control),
        residual,
    })
}

/// Ito formula with the second-order term as a Stieltjes pairing of the
/// Hessian against a supplied bounded-variation tensor curve `C` (the
/// classical tensor quadratic variation of the martingale part).
///
/// Rejects a `C` whose trace is not nondecreasing, the bounded-variation
/// diagnostic for quadratic-variation-type curves.
pub fn ito_chi_residual(
    path: &MildPath,
    f: &dyn TestFunction,
    c_curve: &[TensorElement],
) -> Result<ItoResidualReport> {
    if c_curve.len() != path.grid.n_nodes() {
        return Err(Error::DimensionMismatch(
            "tensor quadratic variation curve length".into(),
        ));
    }
    let mut prev_trace = f64::NEG_INFINITY;
    for c in c_curve {
        let tr = c.nuclear_trace();
        if tr < prev_trace - 1e-12 {
            return Err(Error::InvalidArgument(
                "tensor curve trace is not monotone (not of bounded variation)".into(),
            ));
        }
        prev_trace = tr;
    }

    let terms = mild_ito_terms(path, f)?;
    let grid = path.grid;
    let nodes = grid.n_nodes();

    // trapezoid-weighted Stieltjes pairing 1/2 int <Hess F, dC>
    let mut hessians = Vec::with_capacity(nodes);
    for j in 0..nodes {
        hessians.push(f.require_hessian(grid.node(j), &path.x[j])?);
    }
    let mut hess_term = Vec::with_capacity(nodes);
    let mut acc = 0.0;
    hess_term.push(0.0);
    for j in 0..grid.steps() {
        let dc = c_curve[j + 1].sub(&c_curve[j]);
        let left = trace_pair(&hessians[j], &dc.scale(0.5))?;
        let right = trace_pair(&hessians[j + 1], &dc.scale(0.5))?;
        acc += 0.5 * (left + right);
        hess_term.push(acc);
    }

    let mut residual = Vec::with_capacity(nodes);
    let mut control = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let rhs = terms.smooth_part[j] + hess_term[j] + terms.martingale_term[j];
        let r = terms.lhs[j] - terms.lhs[0] - rhs;
        residual.push(r);
        control.push(r + hess_term[j]);
    }
    Ok(ItoResidualReport {
        residual_sup: sup_abs(&residual),
        control_sup: sup_abs(&control),
        residual,
    })
}

/// Analytic classical tensor quadratic variation of the martingale part of
/// a mild path: `C(t) = t (sigma Q^{1/2})(sigma Q^{1/2})*`.
pub fn analytic_tensor_qv_curve(path: &MildPath) -> Vec<TensorElement> {
    let d = path.spec.diffusion.noise_cov(&path.spec.q);
    (0..path.grid.n_nodes())
        .map(|j| d.scale(path.grid.node(j)))
        .collect()
}

/// Analytic classical covariation `[M, beta_k]^cl(t)` between the
/// martingale part and the unit Brownian motion of noise mode `k`,
/// returned as the vector path `t -> base * t`.
pub fn analytic_cov_with_mode_bm(path: &MildPath, mode: usize) -> Result<VectorPath> {
    let n = path.dim();
    if mode >= n {
        return Err(Error::InvalidArgument(format!("mode {mode} out of range")));
    }
    let sqrt_lambda = path.spec.q.lambda()[mode].sqrt();
    let mut unit = SpectralVector::zeros(n);
    unit.coeffs_mut()[mode] = sqrt_lambda;
    let base = path.spec.diffusion.apply(&unit);
    Ok(VectorPath {
        grid: path.grid,
        values: (0..path.grid.n_nodes())
            .map(|j| base.scale(path.grid.node(j)))
            .collect(),
    })
}

/// Unit Brownian motion of noise mode `k`, recovered from the shared
/// Q-Wiener realization (so it is the martingale actually driving the
/// path). Undriven modes have no recoverable Brownian motion.
pub fn driving_mode_bm(path: &MildPath, mode: usize) -> Result<ScalarPath> {
    let lambda = path.spec.q.lambda()[mode];
    if lambda <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mode {mode} carries no noise"
        )));
    }
    let scale = 1.0 / lambda.sqrt();
    Ok(ScalarPath {
        grid: path.grid,
        values: path.w.values.iter().map(|v| v.coeffs()[mode] * scale).collect(),
    })
}

/// Orthogonality statistic behind the decomposition of `F(t, X(t))` for a
/// once-differentiable `F`: with the candidate martingale part
/// `R(t) = F(0, X(0)) + int <grad F, dM>`, the remainder `A_F = F - R`
/// should lose all covariation with the test martingale `N` down the
/// ladder, while `[F(., X(.)), N]` itself stays away from zero.
pub fn fukushima_orthogonality(
    path: &MildPath,
    f: &dyn TestFunction,
    n: &ScalarPath,
    ladder: &EpsLadder,
) -> Result<DecompositionReport> {
    let grid = path.grid;
    let nodes = grid.n_nodes();
    let f_curve: Vec<f64> = (0..nodes)
        .map(|j| f.eval(grid.node(j), &path.x[j]))
        .collect();

    // R via the left-point Ito sum against the shared noise increments
    let mut a_f = Vec::with_capacity(nodes);
    let mut r = f_curve[0];
    a_f.push(0.0);
    for j in 0..grid.steps() {
        let shock = path.stoch_int[j + 1].sub(&path.stoch_int[j]);
        r += inner(&f.grad(grid.node(j), &path.x[j]), &shock)?;
        a_f.push(f_curve[j + 1] - r);
    }
    let a_path = ScalarPath::from_values(grid, a_f)?;
    let f_path = ScalarPath::from_values(grid, f_curve)?;

    let mut per_eps = Vec::new();
    let mut control_per_eps = Vec::new();
    for m in ladder.descending() {
        let orth = covariation_eps(&a_path, n, m)?;
        per_eps.push(EpsStat { m, eps: orth.eps, value: orth.sup_abs() });
        let ctrl = covariation_eps(&f_path, n, m)?;
        control_per_eps.push(EpsStat { m, eps: ctrl.eps, value: ctrl.sup_abs() });
    }
    Ok(DecompositionReport {
        per_eps,
        control_per_eps,
        ..Default::default()
    })
}

/// Statistics of the Dirichlet-type structure of a mild path
/// `X = M + (V + Y)`: the orthogonal part has a vanishing chi-statistic,
/// the chi-covariation of `X` against a functional panel reduces to the
/// martingale part, and scalar projections of the orthogonal part lose
/// covariation with the driving martingales.
#[derive(Debug, Clone)]
pub struct DirichletReport {
    /// `A(eps)` of the orthogonal part, per rung.
    pub orthogonal_a_eps: Vec<EpsStat>,
    /// Per driven mode `k`: terminal gap
    /// `|[X,X]_chi(e_k (x) e_k) - [M,M]_chi(e_k (x) e_k)|` at the final
    /// rung, with the analytic scale `T sigma_k^2 lambda_k`.
    pub mode_gaps: Vec<(usize, f64, f64)>,
    /// Covariation of `<V + Y, z>` with the mode-1 driving martingale.
    pub projection_cov: Vec<EpsStat>,
}

pub fn dirichlet_structure_report(
    path: &MildPath,
    z: &SpectralVector,
    ladder: &EpsLadder,
) -> Result<DirichletReport> {
    let x = path.state_path();
    let mart = path.martingale_part();
    let orth = path.orthogonal_part();
    let gen = &path.spec.gen;

    let mut orthogonal_a_eps = Vec::new();
    for m in ladder.descending() {
        let a = crate::estimators::a_eps_statistic(&orth, &orth, gen, m)?;
        orthogonal_a_eps.push(EpsStat {
            m,
            eps: m as f64 * path.grid.dt(),
            value: a,
        });
    }

    let m_fin = *ladder.multiples().first().expect("ladder nonempty");
    let cov = path.spec.diffusion.noise_cov(&path.spec.q);
    let mut mode_gaps = Vec::new();
    for k in 0..path.dim() {
        let scale = path.grid.horizon() * cov.entry(k, k);
        if scale <= 0.0 {
            continue;
        }
        let phi = TensorElement::basis(path.dim(), k, k);
        let both = chi_gap(&x, &mart, &phi, m_fin)?;
        mode_gaps.push((k, both, scale));
    }

    let proj = orth.pair_with(z)?;
    let n = driving_mode_bm(path, 0)?;
    let mut projection_cov = Vec::new();
    for m in ladder.descending() {
        let c = covariation_eps(&proj, &n, m)?;
        projection_cov.push(EpsStat { m, eps: c.eps, value: c.sup_abs() });
    }

    Ok(DirichletReport {
        orthogonal_a_eps,
        mode_gaps,
        projection_cov,
    })
}

fn chi_gap(
    x: &VectorPath,
    mart: &VectorPath,
    phi: &TensorElement,
    m: usize,
) -> Result<f64> {
    let full: EpsCurve<f64> = crate::estimators::chi_cov_eps(x, x, phi, m)?;
    let part: EpsCurve<f64> = crate::estimators::chi_cov_eps(mart, mart, phi, m)?;
    Ok((full.terminal() - part.terminal()).abs())
}
