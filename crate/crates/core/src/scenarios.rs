//! Random inputs shared by the verification suites, the examples and the
//! acceptance tests.

use std::f64::consts::TAU;

use nalgebra::DVector;
use rand::Rng;

use crate::error::Result;
use crate::lie::{exp_matrix, Algebra, AlgebraElement, Group, GroupElement, Spectral};
use crate::loops::{CMatrix, FourierLoop, TruncationConfig, C64};
use crate::paths::{lower_spectral_subspace, ProjectionJField};
use crate::sample;

/// A loop whose modes `|k| ≤ degree` carry Gaussian coefficients.
pub fn random_polynomial_loop<R: Rng>(
    config: TruncationConfig,
    cols: usize,
    degree: usize,
    rng: &mut R,
) -> Result<FourierLoop> {
    let d = degree.min(config.max_mode) as i64;
    FourierLoop::from_modes(
        config,
        cols,
        (-d..=d).map(|k| (k, CMatrix::from_fn(config.dim, cols, |_, _| sample::complex_gaussian(rng)))),
    )
}

/// Skew-Hermitian connection form with modes `|k| ≤ bandwidth` and
/// Gaussian coefficients of size `scale`.
pub fn smooth_connection_form<R: Rng>(
    config: TruncationConfig,
    bandwidth: usize,
    scale: f64,
    rng: &mut R,
) -> Result<FourierLoop> {
    let n = config.dim;
    let mut modes = Vec::new();
    for k in 0..=bandwidth.min(config.max_mode) as i64 {
        let m = CMatrix::from_fn(n, n, |_, _| sample::complex_gaussian(rng) * scale);
        if k == 0 {
            modes.push((0, (&m - m.adjoint()) * C64::new(0.5, 0.0)));
        } else {
            modes.push((k, m.clone()));
            modes.push((-k, -m.adjoint()));
        }
    }
    FourierLoop::from_modes(config, n, modes)
}

/// `σ(t) = t + ε·sin(2πt)/2π` as a phase loop `φ(t) = σ(t) - t`.
pub fn sine_reparametrization(eps: f64, max_mode: usize) -> Result<FourierLoop> {
    let c = C64::new(0.0, -eps / (2.0 * TAU));
    FourierLoop::from_modes(
        TruncationConfig::new(max_mode, 1)?,
        1,
        [(1, CMatrix::from_element(1, 1, c)), (-1, CMatrix::from_element(1, 1, c.conj()))],
    )
}

/// Constant phase loop: rotation of the circle by `shift`.
pub fn rotation_reparametrization(shift: f64, max_mode: usize) -> Result<FourierLoop> {
    FourierLoop::constant(TruncationConfig::new(max_mode, 1)?, CMatrix::from_element(1, 1, C64::new(shift, 0.0)))
}

/// Two logarithms of the same element of `U₃`. The common exponential has
/// a repeated eigenvalue, the second logarithm is rotated inside that
/// eigenspace, and every eigenvalue is shifted by `2πi·m` with
/// `m ∈ [-2, 2]`.
pub fn quotient_pair<R: Rng>(rng: &mut R) -> (AlgebraElement, AlgebraElement) {
    let u = sample::random_unitary(3, rng);
    let a = rng.random_range(-3.0..3.0);
    let b = rng.random_range(-3.0..3.0);
    let base = [a, a, b];
    let shifts =
        |rng: &mut R| -> Vec<f64> { base.iter().map(|x| x + TAU * rng.random_range(-2i32..=2) as f64).collect() };
    let d1 = shifts(rng);
    let d2 = shifts(rng);
    let v2 = sample::random_unitary(2, rng);
    let mut v = CMatrix::identity(3, 3);
    v.view_mut((0, 0), (2, 2)).copy_from(v2.matrix());
    let diag = |d: &[f64]| CMatrix::from_diagonal(&DVector::from_iterator(3, d.iter().map(|x| C64::new(0.0, *x))));
    let q1 = u.matrix().clone();
    let q2 = u.matrix() * &v;
    let xi1 = &q1 * diag(&d1) * q1.adjoint();
    let xi2 = &q2 * diag(&d2) * q2.adjoint();
    (AlgebraElement::project(xi1, Algebra::U), AlgebraElement::project(xi2, Algebra::U))
}

/// Input to the `SO₄` section: a basepoint `g`, a level `r` kept at least
/// `margin` away from the real parts of the eigenvalues of `g` and `h`, and
/// `h = g·exp(ξ)` for a small random `ξ`. The projection between the lower
/// spectral subspaces of `h` and `g` has smallest singular value at least
/// `margin`, so `h` lies in the neighbourhood where the section is defined.
#[derive(Clone, Debug)]
pub struct SoSectionCase {
    pub g: GroupElement,
    pub h: GroupElement,
    pub r: f64,
}

pub fn so_section_case<R: Rng>(m: usize, step: f64, margin: f64, rng: &mut R) -> SoSectionCase {
    let tol = 1e-9;
    let far = |x: &GroupElement, r: f64| {
        Spectral::of_normal(x.matrix(), tol)
            .map(|s| s.values.iter().all(|v| (v.re - r).abs() > margin && (v.re - 1.0).abs() > margin))
            .unwrap_or(false)
    };
    loop {
        let g = sample::random_so(m, rng);
        let r = rng.random_range(-0.9..0.9);
        if !far(&g, r) {
            continue;
        }
        let xi = sample::random_so_algebra(m, step, rng);
        let h = g.mul(&exp_matrix(&xi, 1.0, tol).expect("skew input")).expect("same size");
        let gap = ProjectionJField::new(&g, r, tol)
            .and_then(|field| lower_spectral_subspace(&h, r, tol).map(|b| field.projection_gap(&b)))
            .unwrap_or(0.0);
        if far(&h, r) && gap >= margin {
            return SoSectionCase { g, h: GroupElement::trusted(h.matrix().clone(), Group::SO), r };
        }
    }
}

/// Smooth non-polynomial twist `γ(t) = sin(2πt)`.
pub fn sine_twist(t: f64) -> f64 {
    (TAU * t).sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::group_residual;

    #[test]
    fn quotient_pairs_share_an_exponential() {
        let mut rng = sample::rng(1);
        for _ in 0..10 {
            let (x1, x2) = quotient_pair(&mut rng);
            let g1 = exp_matrix(&x1, 1.0, 1e-9).unwrap();
            let g2 = exp_matrix(&x2, 1.0, 1e-9).unwrap();
            assert!((g1.matrix() - g2.matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn so_cases_are_valid() {
        let mut rng = sample::rng(2);
        let case = so_section_case(4, 0.1, 0.05, &mut rng);
        assert!(group_residual(case.h.matrix(), Group::SO) < 1e-12);
    }

    #[test]
    fn connection_forms_are_skew() {
        let mut rng = sample::rng(3);
        let f = smooth_connection_form(TruncationConfig::new(8, 2).unwrap(), 2, 1.0, &mut rng).unwrap();
        for m in 0..16 {
            let a = f.evaluate(m as f64 / 16.0);
            assert!((&a + a.adjoint()).norm() < 1e-13);
        }
    }
}
