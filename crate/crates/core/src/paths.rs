//! Quasi-periodic paths `α : ℝ → G` with `α(t+1)α(t)⁻¹` constant, and the
//! polynomial ones `exp(tξ)·γ(t)` with `γ` a polynomial loop.
//!
//! The projection `α ↦ α(1)α(0)⁻¹` makes these principal bundles over `G`
//! with fibre the based loop group. This module provides the projection, the
//! left and conjugation actions of `G`, fibre quotients, and explicit local
//! sections for `U_n`, `SU_n` and `SO_n`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lie::{
    complexify, exp_matrix, log_decompose_so, log_sector, log_zero, pair_structure, projector_basis, real_part,
    Algebra, AlgebraElement, Group, GroupElement, Spectral, EIGEN_GROUPING,
};
use crate::loops::{CMatrix, FourierLoop, Truncated, TruncationConfig, C64};

/// Operations shared by both path representations.
pub trait PathLike: Sized {
    fn group(&self) -> Group;
    fn dim(&self) -> usize;
    /// `α(1)α(0)⁻¹`.
    fn project(&self) -> GroupElement;
    /// `t ↦ g·α(t)`.
    fn act_left(&self, g: &GroupElement) -> Result<Self>;
    /// `t ↦ g·α(t)·g⁻¹`.
    fn act_conj(&self, g: &GroupElement) -> Result<Self>;
    fn evaluate(&self, t: f64) -> CMatrix;
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("group element of size {a} acting on paths of size {b}")))
    }
}

/// `exp(tξ)·γ(t)`.
#[derive(Clone, Debug)]
pub struct PolynomialPath {
    xi: AlgebraElement,
    gamma: FourierLoop,
    group: Group,
    degree: usize,
    spectrum: Spectral,
}

/// Residuals of the path invariants on a sample grid.
#[derive(Clone, Copy, Debug, Default)]
pub struct PathResiduals {
    pub group: f64,
    pub periodicity: f64,
    pub tail: f64,
}

impl PathResiduals {
    pub fn max(&self) -> f64 {
        self.group.max(self.periodicity).max(self.tail)
    }
}

impl PolynomialPath {
    pub fn new(xi: AlgebraElement, gamma: FourierLoop, group: Group, degree: usize, tol: f64) -> Result<Self> {
        let n = xi.n();
        if gamma.dim() != n || gamma.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "loop part is {}x{}, algebra element is {n}x{n}",
                gamma.dim(),
                gamma.cols()
            )));
        }
        let tail = gamma.fourier_tail_norm(degree);
        if tail > tol {
            return Err(Error::InvalidConfig(format!("loop part has tail {tail:e} beyond degree {degree}")));
        }
        let spectrum = Spectral::of_normal(xi.matrix(), tol)?;
        Ok(Self { xi, gamma, group, degree, spectrum })
    }

    /// The one-parameter subgroup `η_ξ(t) = exp(tξ)`.
    pub fn eta(xi: AlgebraElement, group: Group, config: TruncationConfig) -> Result<Self> {
        let n = xi.n();
        let config = TruncationConfig { dim: n, ..config };
        let tol = config.tol;
        Self::new(xi, FourierLoop::identity(config), group, 0, tol)
    }

    pub fn xi(&self) -> &AlgebraElement {
        &self.xi
    }

    pub fn gamma(&self) -> &FourierLoop {
        &self.gamma
    }

    /// Declared degree of the loop part.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn config(&self) -> &TruncationConfig {
        self.gamma.config()
    }

    /// `exp(tξ)` alone.
    pub fn eta_at(&self, t: f64) -> CMatrix {
        self.spectrum.apply(|l| (l * t).exp())
    }

    /// Residuals of group membership, quasi-periodicity and loop-part tail
    /// on `samples` equispaced points of `[0, 1)`.
    pub fn residuals(&self, samples: usize) -> PathResiduals {
        let proj = self.project();
        let mut out = PathResiduals { tail: self.gamma.fourier_tail_norm(self.degree), ..Default::default() };
        for m in 0..samples {
            let t = m as f64 / samples as f64;
            let a = self.evaluate(t);
            out.group = out.group.max(crate::lie::group_residual(&a, self.group));
            let step = self.evaluate(t + 1.0) * a.adjoint();
            out.periodicity = out.periodicity.max((step - proj.matrix()).norm());
        }
        out
    }

    /// Right action of a polynomial loop `δ`: `t ↦ α(t)·δ(t)`, staying in
    /// the same fibre.
    pub fn right_mul_loop(&self, delta: &FourierLoop, delta_degree: usize) -> Result<Truncated<Self>> {
        let product = self.gamma.product(delta)?;
        let path = Self {
            xi: self.xi.clone(),
            gamma: product.value,
            group: self.group,
            degree: self.degree + delta_degree,
            spectrum: self.spectrum.clone(),
        };
        Ok(Truncated { value: path, overflow: product.overflow })
    }
}

impl PathLike for PolynomialPath {
    fn group(&self) -> Group {
        self.group
    }

    fn dim(&self) -> usize {
        self.xi.n()
    }

    fn project(&self) -> GroupElement {
        GroupElement::trusted(self.eta_at(1.0), self.group)
    }

    fn act_left(&self, g: &GroupElement) -> Result<Self> {
        check_dims(g.n(), self.dim())?;
        let xi = self.xi.adjoint_action(g);
        let gamma = self.gamma.left_mul(g.matrix())?;
        let tol = self.config().tol;
        Self::new(xi, gamma, self.group, self.degree, tol)
    }

    fn act_conj(&self, g: &GroupElement) -> Result<Self> {
        check_dims(g.n(), self.dim())?;
        let xi = self.xi.adjoint_action(g);
        let gamma = self.gamma.left_mul(g.matrix())?.right_mul(&g.matrix().adjoint())?;
        let tol = self.config().tol;
        Self::new(xi, gamma, self.group, self.degree, tol)
    }

    fn evaluate(&self, t: f64) -> CMatrix {
        self.eta_at(t) * self.gamma.evaluate(t)
    }
}

/// Unitary factor of the polar decomposition.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

pub(crate) fn polar_orthogonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

fn project_to_group(m: &CMatrix, group: Group) -> CMatrix {
    match group {
        Group::SO => complexify(&polar_orthogonal(&real_part(m))),
        Group::U => polar_unitary(m),
        Group::SU => {
            let u = polar_unitary(m);
            let det = u.determinant();
            &u * C64::from_polar(1.0, -det.arg() / m.nrows() as f64)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    Cubic,
}

/// A path known through its values on the grid `m/M`, `m = 0..=M`, with
/// values elsewhere obtained by interpolation and projection to the group.
#[derive(Clone, Debug)]
pub struct PeriodicPathSampled {
    g: GroupElement,
    samples: Vec<CMatrix>,
    order: Interpolation,
}

impl PeriodicPathSampled {
    pub fn new(g: GroupElement, samples: Vec<CMatrix>, order: Interpolation, tol: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooFewSamples { got: samples.len(), need: 2, max_mode: 0 });
        }
        let n = g.n();
        for s in &samples {
            if s.shape() != (n, n) {
                return Err(Error::DimensionMismatch("sample shape".into()));
            }
            let residual = crate::lie::group_residual(s, g.group());
            if residual > tol {
                return Err(Error::NotInGroup { group: g.group().name(), residual });
            }
        }
        let gap = (samples.last().unwrap() * samples[0].adjoint() - g.matrix()).norm();
        if gap > tol {
            return Err(Error::DifferentFibres { gap });
        }
        Ok(Self { g, samples, order })
    }

    pub fn from_path<P: PathLike>(path: &P, intervals: usize, order: Interpolation) -> Self {
        let samples = (0..=intervals).map(|m| path.evaluate(m as f64 / intervals as f64)).collect();
        Self { g: path.project(), samples, order }
    }

    pub fn samples(&self) -> &[CMatrix] {
        &self.samples
    }

    pub fn holonomy_candidate(&self) -> &GroupElement {
        &self.g
    }

    fn intervals(&self) -> usize {
        self.samples.len() - 1
    }

    fn node(&self, i: i64) -> CMatrix {
        let m = self.intervals() as i64;
        if i < 0 {
            self.g.matrix().adjoint() * &self.samples[(i + m) as usize]
        } else if i > m {
            self.g.matrix() * &self.samples[(i - m) as usize]
        } else {
            self.samples[i as usize].clone()
        }
    }

    fn map_samples<F: Fn(&CMatrix) -> CMatrix>(&self, f: F, g: GroupElement) -> Self {
        Self { g, samples: self.samples.iter().map(f).collect(), order: self.order }
    }
}

impl PathLike for PeriodicPathSampled {
    fn group(&self) -> Group {
        self.g.group()
    }

    fn dim(&self) -> usize {
        self.g.n()
    }

    fn project(&self) -> GroupElement {
        let m = self.samples.last().unwrap() * self.samples[0].adjoint();
        GroupElement::trusted(project_to_group(&m, self.group()), self.group())
    }

    fn act_left(&self, g: &GroupElement) -> Result<Self> {
        check_dims(g.n(), self.dim())?;
        let h = GroupElement::trusted(g.matrix() * self.g.matrix() * g.matrix().adjoint(), self.group());
        Ok(self.map_samples(|s| g.matrix() * s, h))
    }

    fn act_conj(&self, g: &GroupElement) -> Result<Self> {
        check_dims(g.n(), self.dim())?;
        let h = GroupElement::trusted(g.matrix() * self.g.matrix() * g.matrix().adjoint(), self.group());
        Ok(self.map_samples(|s| g.matrix() * s * g.matrix().adjoint(), h))
    }

    fn evaluate(&self, t: f64) -> CMatrix {
        let whole = t.floor();
        let frac = t - whole;
        let m = self.intervals();
        let x = frac * m as f64;
        let i = (x.floor() as i64).min(m as i64 - 1);
        let u = x - i as f64;
        let raw = match self.order {
            Interpolation::Linear => self.node(i) * C64::new(1.0 - u, 0.0) + self.node(i + 1) * C64::new(u, 0.0),
            Interpolation::Cubic => {
                let (p0, p1, p2, p3) = (self.node(i - 1), self.node(i), self.node(i + 1), self.node(i + 2));
                let u2 = u * u;
                let u3 = u2 * u;
                let w0 = -0.5 * u3 + u2 - 0.5 * u;
                let w1 = 1.5 * u3 - 2.5 * u2 + 1.0;
                let w2 = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
                let w3 = 0.5 * u3 - 0.5 * u2;
                p0 * C64::new(w0, 0.0) + p1 * C64::new(w1, 0.0) + p2 * C64::new(w2, 0.0) + p3 * C64::new(w3, 0.0)
            }
        };
        let mut value = project_to_group(&raw, self.group());
        let turns = whole as i64;
        for _ in 0..turns.max(0) {
            value = self.g.matrix() * value;
        }
        for _ in 0..(-turns).max(0) {
            value = self.g.matrix().adjoint() * value;
        }
        value
    }
}

/// The loop `γ = α⁻¹β` between two paths over the same point.
#[derive(Clone, Debug)]
pub struct FibreQuotient {
    pub value: FourierLoop,
    /// Degree the loop must have, computed from the spectra of the inputs.
    pub degree_bound: usize,
    /// Spectral mass the samples carried beyond the window.
    pub out_of_window: f64,
}

/// Highest power of `z` in `exp(-tξ₁)exp(tξ₂)` when `exp ξ₁ = exp ξ₂`:
/// the largest `|b - a|/2π` over eigenvalue pairs whose eigenspaces
/// overlap.
pub fn eta_quotient_degree(xi1: &AlgebraElement, xi2: &AlgebraElement, tol: f64) -> Result<usize> {
    let s1 = Spectral::of_normal(xi1.matrix(), tol)?;
    let s2 = Spectral::of_normal(xi2.matrix(), tol)?;
    let mut bound = 0usize;
    for a in distinct(&s1.values) {
        let pa = s1.columns_where(|v| (v - a).norm() < EIGEN_GROUPING);
        for b in distinct(&s2.values) {
            let qb = s2.columns_where(|v| (v - b).norm() < EIGEN_GROUPING);
            let overlap = (pa.adjoint() * &qb).norm();
            if overlap > 1e-6 {
                let gap = ((b - a).im / TAU).abs().round() as usize;
                bound = bound.max(gap);
            }
        }
    }
    Ok(bound)
}

fn distinct(values: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for v in values {
        if out.iter().all(|w| (w - v).norm() >= EIGEN_GROUPING) {
            out.push(*v);
        }
    }
    out
}

/// Samples `α(t)⁻¹β(t)` on `4N+1` points and transforms.
pub fn fibre_quotient(alpha: &PolynomialPath, beta: &PolynomialPath, tol: f64) -> Result<FibreQuotient> {
    check_dims(alpha.dim(), beta.dim())?;
    let gap = (alpha.project().matrix() - beta.project().matrix()).norm();
    if gap > tol {
        return Err(Error::DifferentFibres { gap });
    }
    let config = TruncationConfig { tol, ..*alpha.config() };
    let sampled =
        FourierLoop::sample(config, config.default_samples(), |t| alpha.evaluate(t).adjoint() * beta.evaluate(t))?;
    let degree_bound = alpha.degree() + beta.degree() + eta_quotient_degree(alpha.xi(), beta.xi(), tol)?;
    Ok(FibreQuotient { value: sampled.value, degree_bound, out_of_window: sampled.out_of_window })
}

/// Section of `P_pol U_n → U_n` over the complement of the cut at `-e^{iσ}`:
/// `t ↦ exp(t log_s g)`.
pub fn section_un(g: &GroupElement, sigma: f64, config: TruncationConfig) -> Result<PolynomialPath> {
    let xi = log_sector(&g.as_unitary(), sigma, config.tol)?;
    PolynomialPath::eta(xi, Group::U, config)
}

/// Section for `SU_n`: the `U_n` section corrected by `σ(det α(-t))` where
/// `σ(λ) = I + (λ - 1)vv*`. `v` defaults to the first basis vector.
pub fn section_sun(
    g: &GroupElement,
    sigma: f64,
    v: Option<&DVector<C64>>,
    config: TruncationConfig,
) -> Result<PolynomialPath> {
    let n = g.n();
    let tol = config.tol;
    let v = match v {
        Some(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch("section vector".into()));
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > tol {
                return Err(Error::NonUnitVector { norm });
            }
            v.clone()
        }
        None => {
            let mut e = DVector::zeros(n);
            e[0] = C64::new(1.0, 0.0);
            e
        }
    };
    let xi = log_sector(&g.as_unitary(), sigma, tol)?;
    let k_real = xi.matrix().trace().im / TAU;
    let k = k_real.round();
    if (k - k_real).abs() > 1e-6 {
        return Err(Error::NotInGroup { group: "SU", residual: (k - k_real).abs() });
    }
    let k = k as i64;
    let spec = Spectral::of_normal(xi.matrix(), tol)?;
    let u = spec.q.column(0).into_owned();
    let uu = &u * u.adjoint();
    let vv = &v * v.adjoint();
    let zeta = AlgebraElement::project(xi.matrix() - &uu * C64::new(0.0, TAU * k as f64), Algebra::SU);

    let config = TruncationConfig { dim: n, ..config };
    if k.unsigned_abs() as usize > config.max_mode {
        return Err(Error::ModeOutsideWindow { mode: k, window: config.window() });
    }
    let id = CMatrix::identity(n, n);
    let one = C64::new(1.0, 0.0);
    // (I + (z^k - 1)uu*)(I + (z^-k - 1)vv*)
    let uv = &uu * &vv;
    let mut modes = vec![(0, &id - &uu - &vv + &uv * C64::new(2.0, 0.0))];
    if k == 0 {
        modes[0].1 = id.clone();
    } else {
        modes.push((k, &uu - &uv * one));
        modes.push((-k, &vv - &uv * one));
    }
    let gamma = FourierLoop::from_modes(config, n, modes)?;
    PolynomialPath::new(zeta, gamma, Group::SU, k.unsigned_abs() as usize, tol)
}

/// Orthonormal basis of `E^r_{-1}(h)`: the sum of eigenspaces of `h` whose
/// eigenvalues have real part below `r`.
pub fn lower_spectral_subspace(h: &GroupElement, r: f64, tol: f64) -> Result<DMatrix<f64>> {
    let spec = Spectral::of_normal(h.matrix(), tol)?;
    if spec.values.iter().any(|v| (v.re - r).abs() <= tol) {
        return Err(Error::EigenvalueOnWall { r });
    }
    let cols = spec.columns_where(|v| v.re < r);
    let m = h.n();
    if cols.ncols() == 0 {
        return Ok(DMatrix::zeros(m, 0));
    }
    Ok(projector_basis(&real_part(&(&cols * cols.adjoint()))))
}

/// A smooth choice of unitary structure on `E^r_{-1}(h)` for `h` near a
/// basepoint.
pub trait JField {
    /// `J_h` on `ℝ^m`, zero on the complement of the span of `basis_h`.
    fn structure(&self, basis_h: &DMatrix<f64>) -> Result<DMatrix<f64>>;
}

/// Transports the block pairing of a basis of `E^r_{-1}(g)` to nearby `h` by
/// orthogonal projection followed by polar orthonormalisation.
#[derive(Clone, Debug)]
pub struct ProjectionJField {
    basis_g: DMatrix<f64>,
    tol: f64,
}

impl ProjectionJField {
    pub fn new(g: &GroupElement, r: f64, tol: f64) -> Result<Self> {
        Ok(Self { basis_g: lower_spectral_subspace(g, r, tol)?, tol })
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis_g
    }

    /// Smallest singular value of the projection `E^r_{-1}(h) → E^r_{-1}(g)`.
    pub fn projection_gap(&self, basis_h: &DMatrix<f64>) -> f64 {
        if basis_h.ncols() != self.basis_g.ncols() {
            return 0.0;
        }
        if basis_h.ncols() == 0 {
            return f64::INFINITY;
        }
        let m = self.basis_g.transpose() * basis_h;
        m.singular_values().min()
    }
}

impl JField for ProjectionJField {
    fn structure(&self, basis_h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let sigma = self.projection_gap(basis_h);
        if sigma <= self.tol {
            return Err(Error::ProjectionDegenerate { sigma });
        }
        let m = self.basis_g.nrows();
        if basis_h.ncols() == 0 {
            return Ok(DMatrix::zeros(m, m));
        }
        let proj = self.basis_g.transpose() * basis_h;
        let transported = basis_h * polar_orthogonal(&proj.transpose());
        Ok(pair_structure(&transported))
    }
}

/// Output of [`section_son`], keeping the pieces of the construction.
#[derive(Clone, Debug)]
pub struct SoSection {
    pub path: PolynomialPath,
    /// `J_h`, extended by zero.
    pub j_h: DMatrix<f64>,
    /// `J_ζ`, extended by zero.
    pub j_zeta: DMatrix<f64>,
    /// `log_0(ε(h))` with `ε(h) = h·exp(-πJ_h)`.
    pub log_epsilon: AlgebraElement,
    pub degree_bound: usize,
}

impl SoSection {
    /// `exp(t·log_0 ε(h))·exp(tπJ_h)`, evaluated without the factorisation
    /// through `ξ` and `γ`.
    pub fn defining_formula(&self, t: f64, tol: f64) -> Result<CMatrix> {
        let a = exp_matrix(&self.log_epsilon, t, tol)?;
        let jh = AlgebraElement::project(complexify(&self.j_h), Algebra::SO);
        let b = exp_matrix(&jh, PI * t, tol)?;
        Ok(a.matrix() * b.matrix())
    }
}

/// Local section `β_{r,g}` of `P_pol SO_m → SO_m` on `W_r(g)`.
pub fn section_son(
    h: &GroupElement,
    r: f64,
    g: &GroupElement,
    j_field: &dyn JField,
    config: TruncationConfig,
) -> Result<SoSection> {
    let tol = config.tol;
    let m = h.n();
    check_dims(g.n(), m)?;
    lower_spectral_subspace(g, r, tol)?;
    let basis = lower_spectral_subspace(h, r, tol)?;
    let d = basis.ncols();
    let j_h = j_field.structure(&basis)?;
    let p = &basis * basis.transpose();
    let id = DMatrix::<f64>::identity(m, m);

    let jh_alg = AlgebraElement::project(complexify(&j_h), Algebra::SO);
    let eps = GroupElement::trusted(h.matrix() * exp_matrix(&jh_alg, -PI, tol)?.matrix(), Group::SO);
    let log_eps = log_zero(&eps, tol).map_err(|e| match e {
        Error::EigenvalueOnCut { .. } => Error::EigenvalueMinusOne,
        other => other,
    })?;
    let l = log_eps.real_matrix();

    let (zeta, j_zeta) = if d > 0 {
        let h_e = basis.transpose() * h.real_matrix() * &basis;
        let (z, jz) = log_decompose_so(&GroupElement::trusted(complexify(&h_e), Group::SO), tol)?;
        (&basis * z.real_matrix() * basis.transpose(), &basis * jz.matrix() * basis.transpose())
    } else {
        (DMatrix::zeros(m, m), DMatrix::zeros(m, m))
    };
    let q = &id - &p;
    let xi = &zeta + &q * &l * &q;

    let cfg = TruncationConfig { dim: m, ..config };
    let i = C64::new(0.0, 1.0);
    let half = C64::new(0.5, 0.0);
    let pc = complexify(&p);
    let (jz, jh) = (complexify(&j_zeta), complexify(&j_h));
    let z_plus = (&pc - &jz * i) * half;
    let z_minus = (&pc + &jz * i) * half;
    let h_plus = (&pc - &jh * i) * half;
    let h_minus = (&pc + &jh * i) * half;
    let mut modes = vec![(0, complexify(&q) + &z_plus * &h_plus + &z_minus * &h_minus)];
    let degree_bound = if d > 0 { 1 } else { 0 };
    if d > 0 {
        modes.push((1, &z_minus * &h_plus));
        modes.push((-1, &z_plus * &h_minus));
    }
    let gamma = FourierLoop::from_modes(cfg, m, modes)?;
    let xi = AlgebraElement::project(complexify(&xi), Algebra::SO);
    let path = PolynomialPath::new(xi, gamma, Group::SO, degree_bound, tol)?;
    Ok(SoSection { path, j_h, j_zeta, log_epsilon: log_eps, degree_bound })
}
