//! Test functions `F(t, x)` fed to the verification routines, with the
//! derivatives each identity needs.
//!
//! The rough family [`RoughObservable`] composes a smooth time factor and a
//! linear functional of the state with a scalar function whose first
//! derivative is continuous but whose difference quotients blow up as the
//! regularization radius shrinks: continuously differentiable in `x` but
//! not twice, exactly the hypothesis gap between the decomposition theorem
//! and the smooth Ito formula.

use crate::error::{Error, Result};
use crate::spectral::{cross_tensor, inner, SpectralVector, TensorElement};

/// Smoothness class of a test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    /// Continuous in time, continuously differentiable in state.
    C01,
    /// Differentiable in time, twice continuously differentiable in state.
    C12,
}

pub trait TestFunction {
    fn eval(&self, t: f64, x: &SpectralVector) -> f64;
    fn dt(&self, t: f64, x: &SpectralVector) -> f64;
    fn grad(&self, t: f64, x: &SpectralVector) -> SpectralVector;
    /// Present iff the function is `C12`.
    fn hessian(&self, t: f64, x: &SpectralVector) -> Option<TensorElement>;
    fn smoothness(&self) -> Smoothness;

    fn require_hessian(&self, t: f64, x: &SpectralVector) -> Result<TensorElement> {
        self.hessian(t, x).ok_or_else(|| {
            Error::InvalidArgument("test function lacks a Hessian (not C12)".into())
        })
    }
}

/// `F(t, x) = c`.
#[derive(Debug, Clone)]
pub struct ConstantObservable {
    pub value: f64,
    pub dim: usize,
}

impl TestFunction for ConstantObservable {
    fn eval(&self, _t: f64, _x: &SpectralVector) -> f64 {
        self.value
    }
    fn dt(&self, _t: f64, _x: &SpectralVector) -> f64 {
        0.0
    }
    fn grad(&self, _t: f64, _x: &SpectralVector) -> SpectralVector {
        SpectralVector::zeros(self.dim)
    }
    fn hessian(&self, _t: f64, _x: &SpectralVector) -> Option<TensorElement> {
        Some(TensorElement::zeros(self.dim))
    }
    fn smoothness(&self) -> Smoothness {
        Smoothness::C12
    }
}

/// `F(t, x) = <x, z>`.
#[derive(Debug, Clone)]
pub struct LinearObservable {
    pub z: SpectralVector,
}

impl TestFunction for LinearObservable {
    fn eval(&self, _t: f64, x: &SpectralVector) -> f64 {
        inner(x, &self.z).expect("dims")
    }
    fn dt(&self, _t: f64, _x: &SpectralVector) -> f64 {
        0.0
    }
    fn grad(&self, _t: f64, _x: &SpectralVector) -> SpectralVector {
        self.z.clone()
    }
    fn hessian(&self, _t: f64, _x: &SpectralVector) -> Option<TensorElement> {
        Some(TensorElement::zeros(self.z.dim()))
    }
    fn smoothness(&self) -> Smoothness {
        Smoothness::C12
    }
}

/// `F(t, x) = <x, z>^2`; Hessian `2 z (x) z`, constant in `x`.
#[derive(Debug, Clone)]
pub struct SquareObservable {
    pub z: SpectralVector,
}

impl TestFunction for SquareObservable {
    fn eval(&self, _t: f64, x: &SpectralVector) -> f64 {
        inner(x, &self.z).expect("dims").powi(2)
    }
    fn dt(&self, _t: f64, _x: &SpectralVector) -> f64 {
        0.0
    }
    fn grad(&self, _t: f64, x: &SpectralVector) -> SpectralVector {
        self.z.scale(2.0 * inner(x, &self.z).expect("dims"))
    }
    fn hessian(&self, _t: f64, _x: &SpectralVector) -> Option<TensorElement> {
        Some(cross_tensor(&self.z, &self.z).expect("square").scale(2.0))
    }
    fn smoothness(&self) -> Smoothness {
        Smoothness::C12
    }
}

/// `F(t, x) = g(t) h(<x, z>)` with `g(t) = 1 + g1 t` and
/// `h'(u) = sqrt(|u| + delta)`.
///
/// `h` is `C1` with the closed form
/// `h(u) = sign(u) (2/3) ((|u| + delta)^{3/2} - delta^{3/2})`, and `h''`
/// jumps at the origin with magnitude `delta^{-1/2}`: the difference
/// quotients of `h'` are unbounded as `delta -> 0`.
#[derive(Debug, Clone)]
pub struct RoughObservable {
    pub z: SpectralVector,
    /// Regularization radius; smaller is rougher.
    pub delta: f64,
    /// Slope of the time factor.
    pub g1: f64,
}

impl RoughObservable {
    fn g(&self, t: f64) -> f64 {
        1.0 + self.g1 * t
    }

    fn h(&self, u: f64) -> f64 {
        let a = u.abs() + self.delta;
        u.signum() * (2.0 / 3.0) * (a.powf(1.5) - self.delta.powf(1.5))
    }

    fn h_prime(&self, u: f64) -> f64 {
        (u.abs() + self.delta).sqrt()
    }
}

impl TestFunction for RoughObservable {
    fn eval(&self, t: f64, x: &SpectralVector) -> f64 {
        self.g(t) * self.h(inner(x, &self.z).expect("dims"))
    }
    fn dt(&self, t: f64, x: &SpectralVector) -> f64 {
        let _ = t;
        self.g1 * self.h(inner(x, &self.z).expect("dims"))
    }
    fn grad(&self, t: f64, x: &SpectralVector) -> SpectralVector {
        self.z
            .scale(self.g(t) * self.h_prime(inner(x, &self.z).expect("dims")))
    }
    fn hessian(&self, _t: f64, _x: &SpectralVector) -> Option<TensorElement> {
        None
    }
    fn smoothness(&self) -> Smoothness {
        Smoothness::C01
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_observable_derivatives() {
        let f = SquareObservable {
            z: SpectralVector::basis(3, 0),
        };
        let x = SpectralVector::new(vec![2.0, 5.0, -1.0]).unwrap();
        assert_eq!(f.eval(0.3, &x), 4.0);
        assert_eq!(f.grad(0.3, &x).coeffs()[0], 4.0);
        let h = f.hessian(0.0, &x).unwrap();
        assert_eq!(h.entry(0, 0), 2.0);
        assert_eq!(h.entry(1, 1), 0.0);
    }

    #[test]
    fn rough_observable_is_c1_with_matching_closed_forms() {
        let f = RoughObservable {
            z: SpectralVector::basis(2, 0),
            delta: 0.05,
            g1: 0.5,
        };
        // h' continuous through the origin
        let eps = 1e-9;
        let left = f.h_prime(-eps);
        let right = f.h_prime(eps);
        assert!((left - right).abs() < 1e-8);
        // finite-difference check of h' away from zero
        for &u in &[-1.3f64, -0.2, 0.4, 2.0] {
            let d = 1e-6;
            let fd = (f.h(u + d) - f.h(u - d)) / (2.0 * d);
            assert!((fd - f.h_prime(u)).abs() < 1e-6, "u = {u}");
        }
        assert!(f.hessian(0.0, &SpectralVector::zeros(2)).is_none());
        assert_eq!(f.smoothness(), Smoothness::C01);
        assert!(f.require_hessian(0.0, &SpectralVector::zeros(2)).is_err());
    }

    #[test]
    fn rough_observable_second_difference_grows_as_delta_shrinks() {
        let z = SpectralVector::basis(1, 0);
        let quotient = |delta: f64| {
            let f = RoughObservable { z: z.clone(), delta, g1: 0.0 };
            let d = 1e-4;
            (f.h_prime(d) - 2.0 * f.h_prime(0.0) + f.h_prime(-d)) / (d * d)
        };
        assert!(quotient(1e-3).abs() > 4.0 * quotient(1e-1).abs());
    }
}
