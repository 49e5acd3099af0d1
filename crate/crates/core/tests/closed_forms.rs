//! Closed-form values checked through the public API.

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use loopforge::fock::{FockSpace, ModeSpace, PolarisingOperator};
use loopforge::lie::{
    exp_matrix, log_decompose_so, standard_j0, unitary_structure_from, Algebra, AlgebraElement, Group, GroupElement,
};
use loopforge::loops::{CMatrix, FourierLoop, TruncationConfig, C64};
use loopforge::paths::{self, PathLike, PolynomialPath};
use loopforge::weights::{self, DualVector, WeightSequence};
use loopforge::{sample, Error};
use nalgebra::{DMatrix, DVector};

fn scalar(c: C64) -> CMatrix {
    CMatrix::from_element(1, 1, c)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

#[test]
fn loop_basis_rotates_by_lambda_to_the_p() {
    let c = TruncationConfig::new(5, 1).unwrap();
    let lambda = C64::from_polar(1.0, 0.7);
    for p in -5..=5 {
        let e = FourierLoop::monomial(c, p, scalar(one())).unwrap();
        let r = e.rotate(lambda).unwrap();
        assert_abs_diff_eq!((r.coeff_or_zero(p)[(0, 0)] - lambda.powi(p as i32)).norm(), 0.0, epsilon = 1e-15);
    }
}

#[test]
fn involution_and_shift_move_basis_loops() {
    let c = TruncationConfig::new(5, 1).unwrap();
    for p in -4..=4 {
        let e = FourierLoop::monomial(c, p, scalar(one())).unwrap();
        assert_eq!(e.involute().coeff_or_zero(-p)[(0, 0)], one());
        let s = e.shift(1);
        assert_eq!(s.overflow, 0.0);
        assert_eq!(s.value.coeff_or_zero(p + 1)[(0, 0)], one());
    }
}

#[test]
fn exp_of_pi_j0_is_minus_identity() {
    let xi = AlgebraElement::from_real(standard_j0(2) * PI, 1e-12).unwrap();
    let g = exp_matrix(&xi, 1.0, 1e-12).unwrap();
    assert_abs_diff_eq!((g.matrix() + CMatrix::identity(2, 2)).norm(), 0.0, epsilon = 1e-14);
}

#[test]
fn unitary_structure_of_j0_and_its_multiples_is_j0() {
    for c in [1.0, 3.0] {
        let xi = AlgebraElement::from_real(standard_j0(2) * c, 1e-12).unwrap();
        let j = unitary_structure_from(&xi, 1e-12).unwrap();
        assert_abs_diff_eq!((j.matrix() - standard_j0(2)).norm(), 0.0, epsilon = 1e-14);
    }
}

#[test]
fn minus_identity_is_exp_of_pi_times_a_unitary_structure() {
    let g = GroupElement::from_real(-DMatrix::<f64>::identity(2, 2), 1e-12).unwrap();
    let (xi, j) = log_decompose_so(&g, 1e-12).unwrap();
    assert_abs_diff_eq!((xi.real_matrix() - j.matrix() * PI).norm(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!((exp_matrix(&xi, 1.0, 1e-12).unwrap().matrix() - g.matrix()).norm(), 0.0, epsilon = 1e-12);
    assert!(j.residual() < 1e-14);
}

#[test]
fn left_action_conjugates_the_exponent() {
    let mut rng = sample::rng(11);
    let c = TruncationConfig::new(8, 3).unwrap();
    let g = sample::random_unitary(3, &mut rng);
    let h = sample::random_unitary(3, &mut rng);
    let p = paths::section_un(&g, 0.3, c).unwrap();
    let moved = p.act_left(&h).unwrap();
    let expect = h.matrix() * p.xi().matrix() * h.matrix().adjoint();
    assert_abs_diff_eq!((moved.xi().matrix() - expect).norm(), 0.0, epsilon = 1e-12);
    for m in 0..8 {
        let t = m as f64 / 8.0;
        assert_abs_diff_eq!((moved.evaluate(t) - h.matrix() * p.evaluate(t)).norm(), 0.0, epsilon = 1e-12);
    }
}

#[test]
fn circle_quotients_are_powers_of_z() {
    let c = TruncationConfig::with_tol(8, 1, 1e-10).unwrap();
    let zero = PolynomialPath::eta(AlgebraElement::zero(1, Algebra::U), Group::U, c).unwrap();
    for k in -3i64..=3 {
        let xi = AlgebraElement::new(scalar(C64::new(0.0, 2.0 * PI * k as f64)), Algebra::U, 1e-12).unwrap();
        let alpha = PolynomialPath::eta(xi, Group::U, c).unwrap();
        let q = paths::fibre_quotient(&alpha, &zero, 1e-10).unwrap();
        assert_eq!(q.degree_bound, k.unsigned_abs() as usize);
        assert_abs_diff_eq!((q.value.coeff_or_zero(-k)[(0, 0)] - one()).norm(), 0.0, epsilon = 1e-12);
        assert!(q.value.sub(&FourierLoop::monomial(c, -k, scalar(one())).unwrap()).unwrap().norm() < 1e-12);
    }
}

#[test]
fn weighted_form_is_diagonal() {
    let a = WeightSequence::geometric(2.0, 1.0, 6).unwrap();
    let e1 = DualVector::basis(1, 6).unwrap();
    let e2 = DualVector::basis(2, 6).unwrap();
    assert_eq!(weights::inner_product(&e1, &e2, &a).unwrap(), C64::new(0.0, 0.0));
    assert_abs_diff_eq!(weights::inner_product(&e2, &e2, &a).unwrap().re, 0.25, epsilon = 1e-16);
}

#[test]
fn z_norm_for_halving_weights_is_sqrt_two() {
    let a = WeightSequence::geometric(2.0, 1.0, 10).unwrap();
    assert_abs_diff_eq!(weights::z_operator_norm(&a, 1), 2f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn diamond_of_a_basis_vector_is_a_weighted_monomial() {
    let a = WeightSequence::geometric(3.0, 2.0, 5).unwrap();
    for q in -5..=5 {
        let f = weights::diamond(&DualVector::basis(q, 5).unwrap(), &a).unwrap();
        for k in -5..=5 {
            let expect = if k == -q { a.at(q) } else { 0.0 };
            assert_abs_diff_eq!((f.coeff_or_zero(k)[(0, 0)] - expect).norm(), 0.0, epsilon = 1e-15);
        }
    }
}

#[test]
fn clifford_square_is_the_norm_on_random_states() {
    let mut rng = sample::rng(5);
    let f = FockSpace::new(ModeSpace::new(2, 2, None).unwrap(), 4);
    let v = sample::random_complex_vector(f.modes.dim(), &mut rng);
    let states = f.basis_states(3);
    let mut psi = states[0].clone();
    for s in states.iter().skip(1).step_by(7) {
        psi = psi.add(&s.scale(sample::complex_gaussian(&mut rng)));
    }
    let twice = f.clifford(&v, &f.clifford(&v, &psi).value).value;
    let expect = psi.scale(f.modes.inner(&v, &v));
    assert!(twice.sub(&expect).norm(&f.modes) < 1e-12 * psi.norm(&f.modes) * f.modes.inner(&v, &v).norm());
}

#[test]
fn standard_structure_acts_on_constants_by_j0() {
    let window = 2;
    let op = PolarisingOperator::standard(2, window).unwrap();
    let width = 2 * window + 1;
    // Constants sit at mode 0 of each component.
    let constant = |x: C64, y: C64| {
        let mut v = DVector::zeros(2 * width);
        v[window] = x;
        v[width + window] = y;
        v
    };
    let (x, y) = (C64::new(0.3, -1.0), C64::new(2.0, 0.5));
    let got = op.apply(&constant(x, y));
    // J₀e₂ = e₁ and J₀e₁ = -e₂.
    assert_abs_diff_eq!((got - constant(y, -x)).norm(), 0.0, epsilon = 1e-15);
}

#[test]
fn odd_fibre_has_no_standard_polarisation() {
    let candidate = PolarisingOperator::standard_candidate(3, 2);
    let (square, _) = candidate.invariant_residuals();
    assert!(square > 0.5);
    assert!(matches!(PolarisingOperator::standard(3, 2), Err(Error::NotPolarising(_))));
}
