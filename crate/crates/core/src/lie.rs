//! Matrix groups `U_n`, `SU_n`, `SO_n`, their Lie algebras, and spectral
//! calculus on normal matrices.
//!
//! Every matrix function here goes through a unitary diagonalisation
//! (complex Schur form with the strictly upper part discarded). Inputs that
//! are not normal are rejected.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::loops::{CMatrix, C64};

/// Eigenvalues closer than this are treated as one eigenspace.
pub const EIGEN_GROUPING: f64 = 1e-7;
/// Angular distance at which an eigenvalue counts as sitting on a log cut.
pub const CUT_ANGLE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Group {
    U,
    SU,
    SO,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Algebra {
    U,
    SU,
    SO,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::U => "U",
            Group::SU => "SU",
            Group::SO => "SO",
        }
    }

    pub fn algebra(self) -> Algebra {
        match self {
            Group::U => Algebra::U,
            Group::SU => Algebra::SU,
            Group::SO => Algebra::SO,
        }
    }
}

impl Algebra {
    pub fn name(self) -> &'static str {
        match self {
            Algebra::U => "u",
            Algebra::SU => "su",
            Algebra::SO => "so",
        }
    }
}

pub(crate) fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|c| c.re)
}

pub(crate) fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

fn imag_norm(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.im * c.im).sum::<f64>().sqrt()
}

/// Membership residual of `g` in `group`.
pub fn group_residual(g: &CMatrix, group: Group) -> f64 {
    let n = g.nrows();
    if g.ncols() != n {
        return f64::INFINITY;
    }
    let mut r = (g.adjoint() * g - CMatrix::identity(n, n)).norm();
    if matches!(group, Group::SU | Group::SO) {
        r = r.max((g.determinant() - C64::new(1.0, 0.0)).norm());
    }
    if group == Group::SO {
        r = r.max(imag_norm(g));
    }
    r
}

/// Membership residual of `xi` in `algebra`.
pub fn algebra_residual(xi: &CMatrix, algebra: Algebra) -> f64 {
    if xi.ncols() != xi.nrows() {
        return f64::INFINITY;
    }
    let mut r = (xi.adjoint() + xi).norm();
    if algebra == Algebra::SU {
        r = r.max(xi.trace().norm());
    }
    if algebra == Algebra::SO {
        r = r.max(imag_norm(xi)).max((xi.transpose() + xi).norm());
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    matrix: CMatrix,
    group: Group,
}

impl GroupElement {
    pub fn new(matrix: CMatrix, group: Group, tol: f64) -> Result<Self> {
        let residual = group_residual(&matrix, group);
        if residual > tol {
            return Err(Error::NotInGroup { group: group.name(), residual });
        }
        Ok(Self { matrix, group })
    }

    pub fn from_real(matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        Self::new(complexify(&matrix), Group::SO, tol)
    }

    pub(crate) fn trusted(matrix: CMatrix, group: Group) -> Self {
        let matrix = if group == Group::SO { matrix.map(|c| C64::new(c.re, 0.0)) } else { matrix };
        Self { matrix, group }
    }

    pub fn identity(n: usize, group: Group) -> Self {
        Self { matrix: CMatrix::identity(n, n), group }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn real_matrix(&self) -> DMatrix<f64> {
        real_part(&self.matrix)
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn residual(&self) -> f64 {
        group_residual(&self.matrix, self.group)
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), group: self.group }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.n() != rhs.n() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.n(), rhs.n())));
        }
        let group = if self.group == rhs.group { self.group } else { Group::U };
        Ok(Self { matrix: &self.matrix * &rhs.matrix, group })
    }

    /// Same matrix viewed in the ambient unitary group.
    pub fn as_unitary(&self) -> Self {
        Self { matrix: self.matrix.clone(), group: Group::U }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    matrix: CMatrix,
    algebra: Algebra,
}

impl AlgebraElement {
    pub fn new(matrix: CMatrix, algebra: Algebra, tol: f64) -> Result<Self> {
        let residual = algebra_residual(&matrix, algebra);
        if residual > tol {
            return Err(Error::NotInAlgebra { algebra: algebra.name(), residual });
        }
        Ok(Self { matrix, algebra })
    }

    pub fn from_real(matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        Self::new(complexify(&matrix), Algebra::SO, tol)
    }

    pub fn zero(n: usize, algebra: Algebra) -> Self {
        Self { matrix: CMatrix::zeros(n, n), algebra }
    }

    /// Skew-Hermitian part of `matrix`, tagged `so` when it is real and
    /// `algebra` asks for it.
    pub(crate) fn project(matrix: CMatrix, algebra: Algebra) -> Self {
        let skew = (&matrix - matrix.adjoint()) * C64::new(0.5, 0.0);
        match algebra {
            Algebra::SO => Self { matrix: skew.map(|c| C64::new(c.re, 0.0)), algebra },
            _ => Self { matrix: skew, algebra },
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn real_matrix(&self) -> DMatrix<f64> {
        real_part(&self.matrix)
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn residual(&self) -> f64 {
        algebra_residual(&self.matrix, self.algebra)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { matrix: &self.matrix * C64::new(s, 0.0), algebra: self.algebra }
    }

    /// `Ad_g ξ = g ξ g⁻¹`.
    pub fn adjoint_action(&self, g: &GroupElement) -> Self {
        let algebra = if g.group() == Group::SO || self.algebra != Algebra::SO { self.algebra } else { Algebra::U };
        Self::project(g.matrix() * &self.matrix * g.matrix().adjoint(), algebra)
    }
}

/// Real orthogonal `J` with `J² = -I`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryStructure {
    matrix: DMatrix<f64>,
}

impl UnitaryStructure {
    pub fn new(matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        let m = matrix.nrows();
        if matrix.ncols() != m {
            return Err(Error::DimensionMismatch("unitary structure must be square".into()));
        }
        if m % 2 == 1 {
            return Err(Error::OddDimension(m));
        }
        let id = DMatrix::<f64>::identity(m, m);
        let orth = (matrix.transpose() * &matrix - &id).norm();
        let square = (&matrix * &matrix + &id).norm();
        let residual = orth.max(square);
        if residual > tol {
            return Err(Error::NotInGroup { group: "unitary structures", residual });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn residual(&self) -> f64 {
        let id = DMatrix::<f64>::identity(self.dim(), self.dim());
        let orth = (self.matrix.transpose() * &self.matrix - &id).norm();
        orth.max((&self.matrix * &self.matrix + &id).norm())
    }
}

/// `J₀ = [[0, -1], [1, 0]]` repeated down the diagonal.
pub fn standard_j0(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(m, m);
    for b in 0..m / 2 {
        j[(2 * b + 1, 2 * b)] = 1.0;
        j[(2 * b, 2 * b + 1)] = -1.0;
    }
    j
}

/// Unitary diagonalisation of a normal matrix, with nearby eigenvalues
/// merged so that spectral functions act by a scalar on each cluster.
/// Columns of `q` are eigenvectors; `values[i]` belongs to column `i`.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub q: CMatrix,
    pub values: Vec<C64>,
}

impl Spectral {
    pub fn of_normal(m: &CMatrix, tol: f64) -> Result<Self> {
        let residual = (m * m.adjoint() - m.adjoint() * m).norm();
        if residual > tol {
            return Err(Error::NonNormalInput { residual });
        }
        let (q, t) = m.clone().schur().unpack();
        let mut values: Vec<C64> = t.diagonal().iter().copied().collect();
        merge_clusters(&mut values, EIGEN_GROUPING);
        Ok(Self { q, values })
    }

    pub fn apply<F: Fn(C64) -> C64>(&self, f: F) -> CMatrix {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|v| f(*v)),
        ));
        &self.q * d * self.q.adjoint()
    }

    pub fn try_apply<F: Fn(C64) -> Result<C64>>(&self, f: F) -> Result<CMatrix> {
        let mapped = self.values.iter().map(|v| f(*v)).collect::<Result<Vec<_>>>()?;
        Ok(self.apply_values(&mapped))
    }

    pub fn apply_values(&self, mapped: &[C64]) -> CMatrix {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(mapped));
        &self.q * d * self.q.adjoint()
    }

    /// Orthonormal columns spanning the eigenvectors selected by `keep`.
    pub fn columns_where<F: Fn(C64) -> bool>(&self, keep: F) -> CMatrix {
        let idx: Vec<usize> = (0..self.values.len()).filter(|i| keep(self.values[*i])).collect();
        CMatrix::from_fn(self.q.nrows(), idx.len(), |r, c| self.q[(r, idx[c])])
    }
}

fn merge_clusters(values: &mut [C64], radius: f64) {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (values[i] - values[j]).norm() < radius {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == a {
                        *l = b;
                    }
                }
            }
        }
    }
    let original = values.to_vec();
    for i in 0..n {
        let members: Vec<usize> = (0..n).filter(|j| label[*j] == label[i]).collect();
        let sum: C64 = members.iter().map(|j| original[*j]).sum();
        values[i] = sum / members.len() as f64;
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let w = (theta + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// `exp(tξ)`.
pub fn exp_matrix(xi: &AlgebraElement, t: f64, tol: f64) -> Result<GroupElement> {
    let spec = Spectral::of_normal(xi.matrix(), tol)?;
    let m = spec.apply(|l| (l * t).exp());
    let group = match xi.algebra() {
        Algebra::U => Group::U,
        Algebra::SU => Group::SU,
        Algebra::SO => Group::SO,
    };
    Ok(GroupElement::trusted(m, group))
}

fn sector_value(lambda: C64, sigma: f64) -> Result<C64> {
    let theta = lambda.arg();
    let cut = sigma + PI;
    if wrap_angle(theta - cut).abs() < CUT_ANGLE {
        return Err(Error::EigenvalueOnCut { angle: theta, cut: wrap_angle(cut) });
    }
    let phi = theta + TAU * ((sigma - theta) / TAU).round();
    Ok(C64::new(0.0, phi))
}

/// The sector logarithm `log_s g` for `s = iσ`: eigenvalues of the output
/// lie in `(σ - π, σ + π)·i`.
pub fn log_sector(g: &GroupElement, sigma: f64, tol: f64) -> Result<AlgebraElement> {
    let spec = Spectral::of_normal(g.matrix(), tol)?;
    let m = spec.try_apply(|l| sector_value(l, sigma))?;
    let algebra = if g.group() == Group::SO && sigma == 0.0 { Algebra::SO } else { Algebra::U };
    Ok(AlgebraElement::project(m, algebra))
}

/// `log_0`, the principal sector logarithm.
pub fn log_zero(g: &GroupElement, tol: f64) -> Result<AlgebraElement> {
    log_sector(g, 0.0, tol)
}

/// A logarithm of `g` that is a spectral function of `g`, hence commutes
/// with every other logarithm of `g`. Arguments are taken in `(-π, π]`.
pub fn commuting_log(g: &GroupElement, tol: f64) -> Result<AlgebraElement> {
    let spec = Spectral::of_normal(g.matrix(), tol)?;
    let m = spec.apply(|l| {
        let mut theta = l.arg();
        if theta < -PI + CUT_ANGLE {
            theta += TAU;
        }
        C64::new(0.0, theta)
    });
    let real = imag_norm(&m) <= tol && g.group() == Group::SO;
    Ok(AlgebraElement::project(m, if real { Algebra::SO } else { Algebra::U }))
}

/// `J_ξ`: `+i` on the eigenspaces of `ξ` with eigenvalue `is`, `s > 0`.
pub fn unitary_structure_from(xi: &AlgebraElement, tol: f64) -> Result<UnitaryStructure> {
    let m = xi.n();
    if m % 2 == 1 {
        return Err(Error::ZeroEigenvalue);
    }
    let spec = Spectral::of_normal(xi.matrix(), tol)?;
    if spec.values.iter().any(|v| v.norm() < tol.max(1e-12)) {
        return Err(Error::ZeroEigenvalue);
    }
    let j = spec.apply(|v| C64::new(0.0, v.im.signum()));
    UnitaryStructure::new(real_part(&j), tol.max(1e-10))
}

/// Real orthonormal basis (columns) of the range of a real projector.
pub(crate) fn projector_basis(p: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = nalgebra::SymmetricEigen::new((p + p.transpose()) * 0.5);
    let idx: Vec<usize> = (0..eig.eigenvalues.len()).filter(|i| eig.eigenvalues[*i] > 0.5).collect();
    DMatrix::from_fn(p.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])])
}

/// Pairs consecutive columns `(f₁, f₂)` of `basis` into `J₀` blocks,
/// `J f₁ = f₂`, `J f₂ = -f₁`.
pub(crate) fn pair_structure(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let j0 = standard_j0(basis.ncols());
    basis * j0 * basis.transpose()
}

/// Splits `g ∈ SO_m` without `+1` eigenvalue as `exp(ξ) = g` with
/// `log_0(-g) = ξ - πJ_ξ`.
///
/// Off the `-1` eigenspace of `g` the structure is `-J_L` for
/// `L = log_0(-g)`, so that `ξ` has eigenvalues in `(-π, π]·i`; any
/// structure commuting with `L` would satisfy the identity.
pub fn log_decompose_so(g: &GroupElement, tol: f64) -> Result<(AlgebraElement, UnitaryStructure)> {
    let m = g.n();
    let neg = GroupElement::trusted(-g.matrix(), Group::SO);
    let spec = Spectral::of_normal(neg.matrix(), tol)?;
    let logs = spec.try_apply(|l| sector_value(l, 0.0)).map_err(|_| Error::EigenvalueOne)?;
    let l = real_part(&AlgebraElement::project(logs, Algebra::SO).matrix);
    if m % 2 == 1 {
        return Err(Error::EigenvalueOne);
    }
    let lspec = Spectral::of_normal(&complexify(&l), tol)?;
    let f_cols = lspec.columns_where(|v| v.norm() < EIGEN_GROUPING);
    let j_f = if f_cols.ncols() > 0 {
        pair_structure(&projector_basis(&real_part(&(&f_cols * f_cols.adjoint()))))
    } else {
        DMatrix::zeros(m, m)
    };
    let j_perp = real_part(&lspec.apply(|v| {
        if v.norm() < EIGEN_GROUPING {
            C64::new(0.0, 0.0)
        } else {
            C64::new(0.0, -v.im.signum())
        }
    }));
    let j = &j_f + &j_perp;
    let xi = &l + &j * PI;
    let structure = UnitaryStructure::new(j, tol.max(1e-10))?;
    Ok((AlgebraElement::project(complexify(&xi), Algebra::SO), structure))
}

/// `Q·(J₀ ⊕ … ⊕ J₀)·Qᵀ` for a seeded random orthogonal `Q`.
pub fn random_unitary_structure(m: usize, seed: u64) -> Result<UnitaryStructure> {
    if m % 2 == 1 {
        return Err(Error::OddDimension(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = crate::sample::random_orthogonal(m, &mut rng);
    let j = &q * standard_j0(m) * q.transpose();
    UnitaryStructure::new(j, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_abs_diff_eq;

    const TOL: f64 = 1e-9;

    fn diag(values: &[C64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
    }

    fn i(x: f64) -> C64 {
        C64::new(0.0, x)
    }

    fn j0_rot() -> DMatrix<f64> {
        standard_j0(2)
    }

    #[test]
    fn exp_examples() {
        let zero = AlgebraElement::zero(3, Algebra::U);
        assert_abs_diff_eq!((exp_matrix(&zero, 1.0, TOL).unwrap().matrix() - CMatrix::identity(3, 3)).norm(), 0.0);
        let xi = AlgebraElement::new(diag(&[i(TAU), i(-TAU)]), Algebra::SU, TOL).unwrap();
        let g = exp_matrix(&xi, 1.0, TOL).unwrap();
        assert!((g.matrix() - CMatrix::identity(2, 2)).norm() < 1e-14);
        let pj = AlgebraElement::from_real(j0_rot() * PI, TOL).unwrap();
        let minus = exp_matrix(&pj, 1.0, TOL).unwrap();
        assert!((minus.matrix() + CMatrix::identity(2, 2)).norm() < 1e-14);
        assert_eq!(minus.group(), Group::SO);
    }

    #[test]
    fn exp_rejects_non_normal() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        );
        let xi = AlgebraElement { matrix: m, algebra: Algebra::U };
        assert!(matches!(exp_matrix(&xi, 1.0, TOL), Err(Error::NonNormalInput { .. })));
    }

    #[test]
    fn log_sector_examples() {
        let id = GroupElement::identity(2, Group::U);
        assert!(log_sector(&id, 0.0, TOL).unwrap().matrix().norm() < 1e-15);
        let g = GroupElement::new(diag(&[i(1.0), i(-1.0)]), Group::SU, TOL).unwrap();
        let l = log_sector(&g, 0.0, TOL).unwrap();
        assert!((l.matrix() - diag(&[i(PI / 2.0), i(-PI / 2.0)])).norm() < 1e-14);
        let minus = GroupElement::new(diag(&[C64::new(-1.0, 0.0)]), Group::U, TOL).unwrap();
        let l = log_sector(&minus, PI, TOL).unwrap();
        assert_abs_diff_eq!(l.matrix()[(0, 0)].im, PI, epsilon = 1e-15);
        assert!(matches!(log_sector(&minus, 0.0, TOL), Err(Error::EigenvalueOnCut { .. })));
    }

    #[test]
    fn commuting_log_examples() {
        let id = GroupElement::identity(3, Group::U);
        assert!(commuting_log(&id, TOL).unwrap().matrix().norm() < 1e-15);
        let g = GroupElement::new(diag(&[i(1.0), i(1.0)]), Group::U, TOL).unwrap();
        let l = commuting_log(&g, TOL).unwrap();
        assert!((l.matrix() - diag(&[i(PI / 2.0), i(PI / 2.0)])).norm() < 1e-14);
        let minus = GroupElement::new(-CMatrix::identity(1, 1), Group::U, TOL).unwrap();
        assert_abs_diff_eq!(commuting_log(&minus, TOL).unwrap().matrix()[(0, 0)].im, PI, epsilon = 1e-15);
    }

    #[test]
    fn commuting_log_commutes_with_sector_logs() {
        let mut rng = sample::rng(11);
        for _ in 0..20 {
            let g = sample::random_unitary(3, &mut rng);
            let z = commuting_log(&g, TOL).unwrap();
            for sigma in [0.0, PI / 2.0] {
                if let Ok(x) = log_sector(&g, sigma, TOL) {
                    let c = z.matrix() * x.matrix() - x.matrix() * z.matrix();
                    assert!(c.norm() < TOL, "{}", c.norm());
                }
            }
        }
    }

    #[test]
    fn repeated_eigenvalues_in_a_rotated_basis() {
        let mut rng = sample::rng(3);
        let q = sample::random_unitary(3, &mut rng);
        let g = GroupElement::trusted(
            q.matrix() * diag(&[i(1.0), i(1.0), C64::new(-1.0, 0.0)]) * q.matrix().adjoint(),
            Group::U,
        );
        let z = commuting_log(&g, TOL).unwrap();
        let back = exp_matrix(&z, 1.0, TOL).unwrap();
        assert!((back.matrix() - g.matrix()).norm() < 1e-12);
    }

    #[test]
    fn unitary_structure_examples() {
        let j0 = AlgebraElement::from_real(j0_rot(), TOL).unwrap();
        let j = unitary_structure_from(&j0, TOL).unwrap();
        assert!((j.matrix() - j0_rot()).norm() < 1e-14);
        let three = j0.scale(3.0);
        assert!((unitary_structure_from(&three, TOL).unwrap().matrix() - j0_rot()).norm() < 1e-14);

        let mut block = DMatrix::zeros(4, 4);
        block.view_mut((0, 0), (2, 2)).copy_from(&(j0_rot() * 2.0));
        block.view_mut((2, 2), (2, 2)).copy_from(&(j0_rot() * -5.0));
        let mut expect = DMatrix::zeros(4, 4);
        expect.view_mut((0, 0), (2, 2)).copy_from(&j0_rot());
        expect.view_mut((2, 2), (2, 2)).copy_from(&(-j0_rot()));
        let got = unitary_structure_from(&AlgebraElement::from_real(block, TOL).unwrap(), TOL).unwrap();
        assert!((got.matrix() - expect).norm() < 1e-13);

        let degenerate = AlgebraElement::zero(2, Algebra::SO);
        assert!(matches!(unitary_structure_from(&degenerate, TOL), Err(Error::ZeroEigenvalue)));
    }

    #[test]
    fn structure_commutes_with_input() {
        let mut rng = sample::rng(5);
        for _ in 0..20 {
            let xi = sample::random_so_algebra(4, 2.0, &mut rng);
            let j = unitary_structure_from(&xi, TOL).unwrap();
            let x = xi.real_matrix();
            assert!((&x * j.matrix() - j.matrix() * &x).norm() < 1e-9);
            assert!(j.residual() < 1e-12);
        }
    }

    #[test]
    fn log_decompose_examples() {
        let minus = GroupElement::from_real(-DMatrix::identity(2, 2), TOL).unwrap();
        let (xi, j) = log_decompose_so(&minus, TOL).unwrap();
        assert!((xi.real_matrix() - j.matrix() * PI).norm() < 1e-13);
        assert!((exp_matrix(&xi, 1.0, TOL).unwrap().matrix() - minus.matrix()).norm() < 1e-13);

        let a = PI / 3.0;
        let rot = DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()]);
        let g = GroupElement::from_real(rot, TOL).unwrap();
        let (xi, j) = log_decompose_so(&g, TOL).unwrap();
        assert!((xi.real_matrix() - j0_rot() * a).norm() < 1e-13);
        assert!((j.matrix() - j0_rot()).norm() < 1e-13);
        assert!((unitary_structure_from(&xi, TOL).unwrap().matrix() - j.matrix()).norm() < 1e-13);

        let id = GroupElement::identity(2, Group::SO);
        assert!(matches!(log_decompose_so(&id, TOL), Err(Error::EigenvalueOne)));
    }

    #[test]
    fn random_structure_is_deterministic() {
        let a = random_unitary_structure(2, 9).unwrap();
        assert!(a.residual() < 1e-12);
        assert_eq!(a, random_unitary_structure(2, 9).unwrap());
        assert!(random_unitary_structure(6, 1).unwrap().residual() < 1e-12);
        assert!(matches!(random_unitary_structure(3, 1), Err(Error::OddDimension(3))));
    }
}
