//! Finite truncation of a separable Hilbert space `H`, its tensor square,
//! and the norms and pairings used by the regularized calculus.
//!
//! Elements of `H` are coefficient sequences on a fixed orthonormal basis
//! `e_1..e_N`; `H` is identified with its dual in these coordinates. An
//! element of the tensor square is an `N x N` coefficient matrix which
//! doubles as a nuclear operator. The projective norm of such an element is
//! computed as the nuclear norm (sum of singular values), which is exact on
//! Hilbert tensor squares; the infimum over decompositions survives only as
//! a randomized lower-bound oracle in the tests.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry precondition of trace pairings.
const SYMMETRY_RTOL: f64 = 1e-9;

/// Element of the truncated space `H_N` as coefficients on `e_1..e_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector {
    coeffs: Vec<f64>,
}

impl SpectralVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "spectral vector entries must be finite".into(),
            ));
        }
        Ok(SpectralVector { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        SpectralVector { coeffs: vec![0.0; n] }
    }

    /// Basis vector `e_{k+1}` (zero-based `k`).
    pub fn basis(n: usize, k: usize) -> Self {
        let mut coeffs = vec![0.0; n];
        coeffs[k] = 1.0;
        SpectralVector { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, a: f64) -> Self {
        SpectralVector {
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        SpectralVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        SpectralVector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `self += a * other`, the only in-place op the simulators need.
    pub(crate) fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (s, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += a * o;
        }
    }
}

/// Inner product on `H_N`.
pub fn inner(a: &SpectralVector, b: &SpectralVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "inner product: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y).sum())
}

/// Diagonal operator on the basis, given by its eigenvalue sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorDiagonal {
    diag: Vec<f64>,
}

impl OperatorDiagonal {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument(
                "operator diagonal entries must be finite".into(),
            ));
        }
        Ok(OperatorDiagonal { diag })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        OperatorDiagonal { diag: vec![value; n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(n, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn apply(&self, v: &SpectralVector) -> Result<SpectralVector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "diagonal apply: {} vs {}",
                self.dim(),
                v.dim()
            )));
        }
        Ok(SpectralVector {
            coeffs: self
                .diag
                .iter()
                .zip(v.coeffs())
                .map(|(d, c)| d * c)
                .collect(),
        })
    }

    /// Hilbert-Schmidt norm: `hs_norm(S)^2 = Tr(S S*)`.
    pub fn hs_norm(&self) -> f64 {
        self.diag.iter().map(|d| d * d).sum::<f64>().sqrt()
    }
}

/// Element of the tensor square `H_N (x) H_N` as the coefficient matrix of
/// `e_i (x) e_j`; doubles as the nuclear operator it is isometrically
/// associated with.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorElement {
    mat: DMatrix<f64>,
}

impl TensorElement {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "tensor coefficient matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "tensor entries must be finite".into(),
            ));
        }
        Ok(TensorElement { mat })
    }

    pub fn zeros(n: usize) -> Self {
        TensorElement {
            mat: DMatrix::zeros(n, n),
        }
    }

    pub fn from_diag(d: &OperatorDiagonal) -> Self {
        let n = d.dim();
        let mut mat = DMatrix::zeros(n, n);
        for k in 0..n {
            mat[(k, k)] = d.diag()[k];
        }
        TensorElement { mat }
    }

    /// Rank-one functional `e_i* (x) e_j*` (zero-based indices).
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        let mut mat = DMatrix::zeros(n, n);
        mat[(i, j)] = 1.0;
        TensorElement { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn add(&self, other: &Self) -> Self {
        TensorElement {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        TensorElement {
            mat: &self.mat - &other.mat,
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        TensorElement { mat: &self.mat * a }
    }

    pub(crate) fn axpy(&mut self, a: f64, other: &Self) {
        self.mat.iter_mut().zip(other.mat.iter()).for_each(|(s, o)| *s += a * o);
    }

    /// `max |m_ij - m_ji|` relative to the largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim();
        let scale = self.mat.iter().fold(0.0f64, |a, c| a.max(c.abs())).max(1.0);
        let mut defect = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                defect = defect.max((self.mat[(i, j)] - self.mat[(j, i)]).abs());
            }
        }
        defect / scale
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_defect() <= SYMMETRY_RTOL
    }

    /// Projective norm, computed as the nuclear norm (sum of singular
    /// values); exact on Hilbert tensor squares.
    pub fn projective_norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        let svd = self.mat.clone().svd(false, false);
        svd.singular_values.iter().sum()
    }

    /// Trace of the associated nuclear operator, `sum_k mat[k][k]`.
    /// Satisfies `|nuclear_trace| <= projective_norm`.
    pub fn nuclear_trace(&self) -> f64 {
        self.mat.diagonal().iter().sum()
    }

    /// Frobenius norm of the coefficient matrix (Hilbert-Schmidt norm of the
    /// associated operator).
    pub fn hs_norm(&self) -> f64 {
        self.mat.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Elementary tensor `a (x) b`: coefficient matrix `a_i b_j`. Its projective
/// norm equals `|a| |b|` exactly (cross-norm property).
pub fn cross_tensor(a: &SpectralVector, b: &SpectralVector) -> Result<TensorElement> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cross tensor: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let n = a.dim();
    let mat = DMatrix::from_fn(n, n, |i, j| a.coeffs()[i] * b.coeffs()[j]);
    Ok(TensorElement { mat })
}

fn require_symmetric(u: &TensorElement, what: &str) -> Result<()> {
    if !u.is_symmetric() {
        return Err(Error::NotSymmetric(format!(
            "{what}: symmetry defect {:.3e}",
            u.symmetry_defect()
        )));
    }
    Ok(())
}

/// Pairing of a diagonal functional `L` against a self-adjoint tensor `u`:
/// `Tr(L T_u) = sum_k L_k u_kk`. Rejects asymmetric `u`.
pub fn trace_pair_diag(l: &OperatorDiagonal, u: &TensorElement) -> Result<f64> {
    if l.dim() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trace pairing: {} vs {}",
            l.dim(),
            u.dim()
        )));
    }
    require_symmetric(u, "trace_pair_diag")?;
    Ok(l
        .diag()
        .iter()
        .enumerate()
        .map(|(k, lk)| lk * u.entry(k, k))
        .sum())
}

/// Pairing of a full-matrix functional against a self-adjoint tensor:
/// `Tr(L T_u)`. Linear in both arguments; rejects asymmetric `u`.
pub fn trace_pair(l: &TensorElement, u: &TensorElement) -> Result<f64> {
    if l.dim() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trace pairing: {} vs {}",
            l.dim(),
            u.dim()
        )));
    }
    require_symmetric(u, "trace_pair")?;
    // Tr(L M) with M symmetric: the Frobenius pairing sum_ij L_ij M_ij.
    let mut acc = 0.0;
    for i in 0..l.dim() {
        for j in 0..l.dim() {
            acc += l.entry(i, j) * u.entry(i, j);
        }
    }
    Ok(acc)
}

/// Pairing of a functional `phi` against the elementary tensor `a (x) b`
/// without forming the matrix: `sum_ij phi_ij a_i b_j`.
pub fn pair_cross(phi: &TensorElement, a: &SpectralVector, b: &SpectralVector) -> Result<f64> {
    if phi.dim() != a.dim() || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(
            "functional/vector dimensions differ".into(),
        ));
    }
    let n = phi.dim();
    let mut acc = 0.0;
    for i in 0..n {
        let ai = a.coeffs()[i];
        if ai == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..n {
            row += phi.entry(i, j) * b.coeffs()[j];
        }
        acc += ai * row;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn sv(v: &[f64]) -> SpectralVector {
        SpectralVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn inner_orthonormality_and_direct_sum() {
        let e1 = SpectralVector::basis(4, 0);
        let e2 = SpectralVector::basis(4, 1);
        assert_eq!(inner(&e1, &e1).unwrap(), 1.0);
        assert_eq!(inner(&e1, &e2).unwrap(), 0.0);
        assert_eq!(inner(&sv(&[3.0, 4.0]), &sv(&[1.0, 0.0])).unwrap(), 3.0);
        assert!(inner(&e1, &sv(&[1.0])).is_err());
    }

    #[test]
    fn cross_norm_is_exact() {
        let a = sv(&[3.0, 4.0, 0.0, 0.0]);
        let b = sv(&[1.0, 0.0, 0.0, 0.0]);
        let u = cross_tensor(&a, &b).unwrap();
        assert!((u.projective_norm() - 5.0).abs() < 1e-12);

        let s = 1.0 / 2.0f64.sqrt();
        let u2 = cross_tensor(&sv(&[s, s]), &sv(&[s, -s])).unwrap();
        assert!((u2.projective_norm() - 1.0).abs() < 1e-12);

        let zero = cross_tensor(&SpectralVector::zeros(3), &sv(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(zero.projective_norm(), 0.0);
    }

    #[test]
    fn cross_tensor_entry_layout() {
        let u = cross_tensor(&SpectralVector::basis(3, 0), &SpectralVector::basis(3, 1)).unwrap();
        assert_eq!(u.entry(0, 1), 1.0);
        assert_eq!(u.mat().iter().map(|c| c.abs()).sum::<f64>(), 1.0);
    }

    #[test]
    fn projective_norm_of_rank_two_identity_block() {
        let u = cross_tensor(&SpectralVector::basis(4, 0), &SpectralVector::basis(4, 0))
            .unwrap()
            .add(&cross_tensor(&SpectralVector::basis(4, 1), &SpectralVector::basis(4, 1)).unwrap());
        assert!((u.projective_norm() - 2.0).abs() < 1e-12);

        // Randomized decomposition oracle: rewriting u = sum_i x_i (x) y_i via
        // a random mixing G (x' = XG, y' = Y G^-T keeps the sum) never beats
        // the singular-value sum, and the identity mixing attains it.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = DMatrix::<f64>::from_fn(4, 4, |i, j| if i == j && i < 2 { 1.0 } else { 0.0 });
        let y = x.clone();
        let mut best = f64::INFINITY;
        for trial in 0..2000 {
            let g = if trial == 0 {
                DMatrix::identity(4, 4)
            } else {
                DMatrix::from_fn(4, 4, |_, _| StandardNormal.sample(&mut rng))
            };
            let Some(g_inv) = g.clone().try_inverse() else {
                continue;
            };
            let xp = &x * &g;
            let yp = &y * g_inv.transpose();
            let cost: f64 = (0..4)
                .map(|i| xp.column(i).norm() * yp.column(i).norm())
                .sum();
            assert!(cost >= u.projective_norm() - 1e-9);
            best = best.min(cost);
        }
        assert!((best - u.projective_norm()).abs() < 1e-6);
    }

    #[test]
    fn trace_pairs_and_nuclear_trace() {
        let u = cross_tensor(&SpectralVector::basis(3, 0), &SpectralVector::basis(3, 0)).unwrap();
        assert_eq!(trace_pair_diag(&OperatorDiagonal::identity(3), &u).unwrap(), 1.0);

        let u2 = u.add(&cross_tensor(&SpectralVector::basis(3, 1), &SpectralVector::basis(3, 1)).unwrap());
        let l = OperatorDiagonal::new(vec![2.0, 3.0, 0.0]).unwrap();
        assert_eq!(trace_pair_diag(&l, &u2).unwrap(), 5.0);
        assert_eq!(trace_pair_diag(&l, &TensorElement::zeros(3)).unwrap(), 0.0);

        // trace of a rank-one operator is the inner product
        let a = sv(&[1.0, 2.0, -1.0]);
        let b = sv(&[0.5, 0.25, 2.0]);
        let rank1 = cross_tensor(&a, &b).unwrap();
        assert!((rank1.nuclear_trace() - inner(&a, &b).unwrap()).abs() < 1e-14);

        let d = TensorElement::from_diag(&OperatorDiagonal::new(vec![1.0, 0.5, 0.25]).unwrap());
        assert!((d.nuclear_trace() - 1.75).abs() < 1e-15);

        assert!((OperatorDiagonal::new(vec![1.0, 2.0]).unwrap().hs_norm() - 5.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn trace_pair_rejects_asymmetric() {
        let u = cross_tensor(&SpectralVector::basis(2, 0), &SpectralVector::basis(2, 1)).unwrap();
        assert!(matches!(
            trace_pair_diag(&OperatorDiagonal::identity(2), &u),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn nuclear_trace_bounded_by_projective_norm_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let m = DMatrix::<f64>::from_fn(4, 4, |_, _| StandardNormal.sample(&mut rng));
            let sym = (&m + m.transpose()).scale(0.5);
            let u = TensorElement::new(sym).unwrap();
            assert!(u.nuclear_trace().abs() <= u.projective_norm() + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn prop_cross_norm_exactness(a in proptest::collection::vec(-10.0f64..10.0, 4),
                                     b in proptest::collection::vec(-10.0f64..10.0, 4)) {
            let a = sv(&a);
            let b = sv(&b);
            let u = cross_tensor(&a, &b).unwrap();
            let expect = a.norm() * b.norm();
            prop_assert!((u.projective_norm() - expect).abs() <= 1e-12 * expect.max(1.0));
        }

        #[test]
        fn prop_decomposition_cost_dominates_projective_norm(
            xs in proptest::collection::vec(-2.0f64..2.0, 16),
            ys in proptest::collection::vec(-2.0f64..2.0, 16),
        ) {
            // u = sum of 4 simple tensors in dimension 4
            let mut u = TensorElement::zeros(4);
            let mut cost = 0.0;
            for r in 0..4 {
                let x = sv(&xs[4 * r..4 * r + 4]);
                let y = sv(&ys[4 * r..4 * r + 4]);
                cost += x.norm() * y.norm();
                u = u.add(&cross_tensor(&x, &y).unwrap());
            }
            prop_assert!(cost >= u.projective_norm() - 1e-9);
        }

        #[test]
        fn prop_trace_pair_bilinear(
            l1 in proptest::collection::vec(-3.0f64..3.0, 3),
            l2 in proptest::collection::vec(-3.0f64..3.0, 3),
            v in proptest::collection::vec(-3.0f64..3.0, 3),
            a in -2.0f64..2.0,
        ) {
            let v = sv(&v);
            let u = cross_tensor(&v, &v).unwrap();
            let l1 = OperatorDiagonal::new(l1).unwrap();
            let l2 = OperatorDiagonal::new(l2).unwrap();
            let combined = OperatorDiagonal::new(
                l1.diag().iter().zip(l2.diag()).map(|(x, y)| x + a * y).collect(),
            ).unwrap();
            let lhs = trace_pair_diag(&combined, &u).unwrap();
            let rhs = trace_pair_diag(&l1, &u).unwrap() + a * trace_pair_diag(&l2, &u).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        }
    }
}
