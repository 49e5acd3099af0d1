//! Seeded random matrices and vectors.
//!
//! All generators take a caller-owned RNG. [`rng_for`] derives an
//! independent stream from a base seed and a label so that checks can be
//! reordered without changing their inputs.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::lie::{complexify, Algebra, AlgebraElement, Group, GroupElement};
use crate::loops::{CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for `label` under `seed`, stable across releases and platforms.
pub fn rng_for(seed: u64, label: &str) -> SeededRng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_complex_vector<R: Rng>(n: usize, rng: &mut R) -> DVector<C64> {
    DVector::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn random_real_vector<R: Rng>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| gaussian(rng))
}

pub fn unit_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
pub fn random_orthogonal<R: Rng>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| gaussian(rng));
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..m {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

pub fn random_so<R: Rng>(m: usize, rng: &mut R) -> GroupElement {
    let mut q = random_orthogonal(m, rng);
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    GroupElement::trusted(complexify(&q), Group::SO)
}

/// Haar-distributed unitary matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> GroupElement {
    let a = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..n {
        let d = r[(c, c)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for row in 0..n {
                q[(row, c)] *= phase;
            }
        }
    }
    GroupElement::trusted(q, Group::U)
}

pub fn random_special_unitary<R: Rng>(n: usize, rng: &mut R) -> GroupElement {
    let u = random_unitary(n, rng);
    let det = u.matrix().determinant();
    let root = C64::from_polar(1.0, -det.arg() / n as f64);
    GroupElement::trusted(u.matrix() * root, Group::SU)
}

/// Skew-Hermitian matrix with Gaussian entries of size `scale`.
pub fn random_skew_hermitian<R: Rng>(n: usize, scale: f64, rng: &mut R) -> AlgebraElement {
    let a = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng) * scale);
    AlgebraElement::project(a, Algebra::U)
}

pub fn random_so_algebra<R: Rng>(m: usize, scale: f64, rng: &mut R) -> AlgebraElement {
    let a = DMatrix::from_fn(m, m, |_, _| gaussian(rng) * scale);
    AlgebraElement::project(complexify(&a), Algebra::SO)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_land_in_their_groups() {
        let mut r = rng(1);
        for n in 1..5 {
            assert!(random_unitary(n, &mut r).residual() < 1e-12);
            assert!(random_special_unitary(n, &mut r).residual() < 1e-12);
            assert!(random_so(n, &mut r).residual() < 1e-12);
            assert!(random_skew_hermitian(n, 3.0, &mut r).residual() < 1e-12);
            assert!(random_so_algebra(n, 3.0, &mut r).residual() < 1e-12);
        }
    }

    #[test]
    fn labelled_streams_are_stable_and_distinct() {
        let a: u64 = rng_for(42, "x").random();
        let b: u64 = rng_for(42, "x").random();
        let c: u64 = rng_for(42, "y").random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
