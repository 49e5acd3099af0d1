//! Parallel transport along a loop and the polynomial sub-bundle it defines.
//!
//! A [`LoopConnection`] is the pulled-back connection form `A` along a fixed
//! base loop, so that the covariant derivative is `Dα = α' + Aα`. Transport
//! solves `ψ' = -Aψ`; its eigen-decomposition over one period gives the
//! eigenfunctions `z^k v_j` of `D`, which span the polynomial fibre.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::lie::{group_residual, Group, GroupElement, Spectral};
use crate::loops::{CMatrix, FourierLoop, Truncated, TruncationConfig, C64};
use crate::paths::{polar_orthogonal, polar_unitary};

pub const DEFAULT_STEPS: usize = 4096;
/// Integrator steps between projections back onto the group.
pub const PROJECTION_INTERVAL: usize = 64;
/// Largest mode window for eigen-tables; `cosh(2πk)` overflows near 113.
pub const MAX_TABLE_WINDOW: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Debug)]
pub struct LoopConnection {
    field: Field,
    form: FourierLoop,
    steps: usize,
}

impl LoopConnection {
    /// Checks that `A(t)` is skew (and real for [`Field::Real`]) on 64
    /// sample points.
    pub fn new(form: FourierLoop, field: Field, steps: usize) -> Result<Self> {
        let n = form.dim();
        if form.cols() != n {
            return Err(Error::DimensionMismatch("connection form must be square".into()));
        }
        if steps == 0 {
            return Err(Error::InvalidConfig("steps must be positive".into()));
        }
        let tol = form.config().tol;
        for m in 0..64 {
            let a = form.evaluate(m as f64 / 64.0);
            let algebra = if field == Field::Real { crate::lie::Algebra::SO } else { crate::lie::Algebra::U };
            let residual = crate::lie::algebra_residual(&a, algebra);
            if residual > tol {
                return Err(Error::NotInAlgebra { algebra: algebra.name(), residual });
            }
        }
        Ok(Self { field, form, steps })
    }

    pub fn flat(config: TruncationConfig, field: Field) -> Self {
        Self { field, form: FourierLoop::zero(config, config.dim), steps: DEFAULT_STEPS }
    }

    pub fn constant(xi: &CMatrix, field: Field, config: TruncationConfig) -> Result<Self> {
        let config = TruncationConfig { dim: xi.nrows(), ..config };
        Self::new(FourierLoop::constant(config, xi.clone())?, field, DEFAULT_STEPS)
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps.max(1);
        self
    }

    pub fn form(&self) -> &FourierLoop {
        &self.form
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn at(&self, t: f64) -> CMatrix {
        self.form.evaluate(t)
    }

    fn group(&self) -> Group {
        match self.field {
            Field::Real => Group::SO,
            Field::Complex => Group::U,
        }
    }

    fn project(&self, m: &CMatrix) -> CMatrix {
        match self.field {
            Field::Real => crate::lie::complexify(&polar_orthogonal(&crate::lie::real_part(m))),
            Field::Complex => polar_unitary(m),
        }
    }

    /// Block-diagonal connection on the orthogonal direct sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (n1, n2) = (self.dim(), other.dim());
        let n = n1 + n2;
        let max_mode = self.form.max_mode().max(other.form.max_mode());
        let config = TruncationConfig { dim: n, max_mode, ..*self.form.config() };
        let mut modes = BTreeMap::new();
        for (k, c) in self.form.modes() {
            let mut m = CMatrix::zeros(n, n);
            m.view_mut((0, 0), (n1, n1)).copy_from(c);
            modes.insert(k, m);
        }
        for (k, c) in other.form.modes() {
            let m = modes.entry(k).or_insert_with(|| CMatrix::zeros(n, n));
            let mut block = m.view_mut((n1, n1), (n2, n2));
            block += c;
        }
        let field = if self.field == Field::Real && other.field == Field::Real { Field::Real } else { Field::Complex };
        Self::new(FourierLoop::from_modes(config, n, modes)?, field, self.steps.max(other.steps))
    }

    /// Gauge transform by a unitary polynomial loop `u`:
    /// `A ↦ uAu⁻¹ - u'u⁻¹`, so that `D ↦ uDu⁻¹`.
    pub fn gauge(&self, u: &FourierLoop) -> Result<Truncated<Self>> {
        let u_inv = u.adjoint();
        let conj = self.form.product(&u_inv)?;
        let conj2 = u.product(&conj.value)?;
        let drift = u.derivative().product(&u_inv)?;
        let overflow = conj.overflow + conj2.overflow + drift.overflow;
        let form = conj2.value.sub(&drift.value)?;
        Ok(Truncated { value: Self::new(form, Field::Complex, self.steps)?, overflow })
    }
}

fn rk4_step(conn: &LoopConnection, t: f64, h: f64, psi: &CMatrix) -> CMatrix {
    let half = C64::new(h / 2.0, 0.0);
    let full = C64::new(h, 0.0);
    let a0 = conn.at(t);
    let am = conn.at(t + h / 2.0);
    let a1 = conn.at(t + h);
    let k1 = -(&a0 * psi);
    let k2 = -(&am * (psi + &k1 * half));
    let k3 = -(&am * (psi + &k2 * half));
    let k4 = -(&a1 * (psi + &k3 * full));
    psi + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
}

/// Integrates `ψ' = -Aψ` from `ψ(times[0]) = I`, returning `ψ` at every
/// entry of `times` (which must be sorted).
fn transport_at(conn: &LoopConnection, times: &[f64]) -> Vec<CMatrix> {
    let n = conn.dim();
    let mut psi = CMatrix::identity(n, n);
    let mut out = vec![psi.clone()];
    let mut counter = 0usize;
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let steps = ((span.abs() * conn.steps as f64).ceil() as usize).max(1);
        let h = span / steps as f64;
        for s in 0..steps {
            psi = rk4_step(conn, w[0] + s as f64 * h, h, &psi);
            counter += 1;
            if counter.is_multiple_of(PROJECTION_INTERVAL) {
                psi = conn.project(&psi);
            }
        }
        psi = conn.project(&psi);
        out.push(psi.clone());
    }
    out
}

/// `Φ(t₁)Φ(t₀)⁻¹` for the fundamental solution `Φ' = -AΦ`.
pub fn parallel_transport(conn: &LoopConnection, t0: f64, t1: f64) -> GroupElement {
    let psi = transport_at(conn, &[t0, t1]).pop().expect("two time points");
    GroupElement::trusted(psi, conn.group())
}

/// Transport once around the loop.
pub fn holonomy(conn: &LoopConnection) -> GroupElement {
    parallel_transport(conn, 0.0, 1.0)
}

/// `Dα = α' + Aα`, with the product mass that left the window.
pub fn covariant_derivative(conn: &LoopConnection, alpha: &FourierLoop) -> Result<Truncated<FourierLoop>> {
    if alpha.dim() != conn.dim() {
        return Err(Error::DimensionMismatch(format!(
            "section of rank {} under a connection of rank {}",
            alpha.dim(),
            conn.dim()
        )));
    }
    let form = conn.form.rewindow(alpha.max_mode());
    let product = form.value.product(alpha)?;
    let value = alpha.derivative().add(&product.value)?;
    Ok(Truncated { value, overflow: form.overflow + product.overflow })
}

/// Eigenfunctions `z^k v_j` of `D` with eigenvalues `i(s_j + 2πk)`.
#[derive(Clone, Debug)]
pub struct PolFibreBasis {
    pub holonomy: GroupElement,
    /// `s_j ∈ [0, 2π)`.
    pub exponents: Vec<f64>,
    /// Holonomy eigenvectors `w_j` as columns.
    pub base: CMatrix,
    /// The periodic sections `v_j`.
    pub sections: Vec<FourierLoop>,
    /// Tabulated modes are `|k| ≤ window`.
    pub window: usize,
}

/// Coordinates with respect to a [`PolFibreBasis`], keyed by `(j, k)`.
pub type BasisCoords = BTreeMap<(usize, i64), C64>;

impl PolFibreBasis {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn eigenvalue(&self, j: usize, k: i64) -> C64 {
        C64::new(0.0, self.exponents[j] + TAU * k as f64)
    }

    pub fn modes(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        let w = self.window as i64;
        (0..self.rank()).flat_map(move |j| (-w..=w).map(move |k| (j, k)))
    }

    /// `z^k v_j`, with the mass shifted out of the section window.
    pub fn mode_function(&self, j: usize, k: i64) -> Truncated<FourierLoop> {
        self.sections[j].shift(k)
    }

    /// `‖D(z^k v_j) - i(s_j + 2πk)·z^k v_j‖`.
    pub fn eigen_residual(&self, conn: &LoopConnection, j: usize, k: i64) -> Result<f64> {
        let f = self.mode_function(j, k);
        let d = covariant_derivative(conn, &f.value)?;
        let r = d.value.sub(&f.value.scale(self.eigenvalue(j, k)))?.norm();
        Ok((r * r + f.overflow + d.overflow).sqrt())
    }

    /// Synthesises the section `Σ c_{jk} z^k v_j`.
    pub fn synthesize(&self, coords: &BasisCoords) -> Result<FourierLoop> {
        let mut out = FourierLoop::zero(*self.sections[0].config(), 1);
        for ((j, k), c) in coords {
            self.check_mode(*k)?;
            out = out.add(&self.mode_function(*j, *k).value.scale(*c))?;
        }
        Ok(out)
    }

    fn check_mode(&self, k: i64) -> Result<()> {
        if k.unsigned_abs() as usize > self.window {
            Err(Error::ModeOutsideWindow { mode: k, window: self.window as i64 })
        } else {
            Ok(())
        }
    }

    /// Least-squares coordinates of `alpha` in the tabulated modes together
    /// with the relative residual, which measures the distance from the
    /// polynomial fibre.
    pub fn project(&self, alpha: &FourierLoop) -> Result<(BasisCoords, f64)> {
        let cfg = self.sections[0].config();
        let alpha = alpha.rewindow(cfg.max_mode);
        let modes: Vec<(usize, i64)> = self.modes().collect();
        let columns: Vec<DVector<C64>> =
            modes.iter().map(|(j, k)| self.mode_function(*j, *k).value.to_dense()).collect();
        let a = CMatrix::from_columns(&columns);
        let b = alpha.value.to_dense();
        let svd = a.clone().svd(true, true);
        let x = svd.solve(&b, 1e-12).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let residual = (&a * &x - &b).norm();
        let scale = b.norm().max(f64::MIN_POSITIVE);
        let coords = modes.into_iter().zip(x.iter().copied()).collect();
        Ok((coords, (residual * residual + alpha.overflow).sqrt() / scale))
    }
}

/// Builds the eigen-table of `D` from the holonomy. Sections `v_j` live in
/// `config`'s window; tabulated modes are `|k| ≤ window`.
pub fn pol_fibre_basis(conn: &LoopConnection, window: usize, config: TruncationConfig) -> Result<PolFibreBasis> {
    if window > MAX_TABLE_WINDOW {
        return Err(Error::InvalidConfig(format!("table window {window} exceeds {MAX_TABLE_WINDOW}")));
    }
    if window >= config.max_mode {
        return Err(Error::InvalidConfig(format!(
            "table window {window} must be below the section window {}",
            config.max_mode
        )));
    }
    let n = conn.dim();
    let config = TruncationConfig { dim: n, ..config };
    let samples = config.default_samples();
    let times: Vec<f64> = (0..=samples).map(|m| m as f64 / samples as f64).collect();
    let frames = transport_at(conn, &times);
    let holonomy = GroupElement::trusted(frames[samples].clone(), conn.group());

    let spec = Spectral::of_normal(holonomy.matrix(), 1e-8)?;
    let exponents: Vec<f64> = spec
        .values
        .iter()
        .map(|mu| {
            let s = (-mu.arg()).rem_euclid(TAU);
            if s > TAU - 1e-9 {
                0.0
            } else {
                s
            }
        })
        .collect();
    let vconfig = TruncationConfig { dim: n, ..config };
    let mut sections = Vec::with_capacity(n);
    for (j, s) in exponents.iter().enumerate() {
        let w = spec.q.column(j).into_owned();
        let values: Vec<CMatrix> = (0..samples)
            .map(|m| {
                let t = times[m];
                CMatrix::from_column_slice(n, 1, (&frames[m] * &w * C64::from_polar(1.0, s * t)).as_slice())
            })
            .collect();
        sections.push(FourierLoop::from_samples(vconfig, &values)?.value);
    }
    Ok(PolFibreBasis { holonomy, exponents, base: spec.q, sections, window })
}

/// Applies `cos D` in eigencoordinates: `(j, k) ↦ cosh(s_j + 2πk)`.
pub fn cos_d(basis: &PolFibreBasis, coords: &BasisCoords) -> Result<BasisCoords> {
    coords
        .iter()
        .map(|((j, k), c)| {
            basis.check_mode(*k)?;
            let x = basis.exponents[*j] + TAU * *k as f64;
            Ok(((*j, *k), c * x.cosh()))
        })
        .collect()
}

/// The cosine series `Σ_j (-1)^j D^{2j}/(2j)!` on `z^k v_j`, with `D`
/// replaced by its Rayleigh quotient on that function. Returns the factor
/// by which the series scales the function.
pub fn cos_series_factor(conn: &LoopConnection, basis: &PolFibreBasis, j: usize, k: i64) -> Result<C64> {
    basis.check_mode(k)?;
    let f = basis.mode_function(j, k).value;
    let d = covariant_derivative(conn, &f)?.value;
    let num: C64 = d.to_dense().iter().zip(f.to_dense().iter()).map(|(a, b)| a * b.conj()).sum();
    let lambda = num / f.norm().powi(2);
    Ok(cos_series(lambda))
}

/// `Σ_j (-1)^j x^{2j}/(2j)!`, summed until the terms stop mattering.
pub fn cos_series(x: C64) -> C64 {
    let x2 = -(x * x);
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut j = 0.0;
    loop {
        j += 1.0;
        term *= x2 / ((2.0 * j - 1.0) * (2.0 * j));
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() && j > 2.0 * x.norm() {
            return sum;
        }
        if j > 2000.0 {
            return sum;
        }
    }
}

/// Largest relative violation of
/// `cosh(s) ≥ cosh(x + s)/e^{|x|} ≥ ½·min(e^s, e^{-s})` over the table,
/// `x = 2πk`. Non-positive means the sandwich holds.
pub fn cosh_sandwich_violation(basis: &PolFibreBasis) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for (j, k) in basis.modes() {
        let s = basis.exponents[j];
        let x = TAU * k as f64;
        // Both sides in the same exponential form, so the k = 0 equality
        // holds bitwise and large |x| cannot overflow.
        let middle = 0.5 * ((s - (x.abs() - x)).exp() + (-s - (x.abs() + x)).exp());
        let upper = 0.5 * (s.exp() + (-s).exp());
        let lower = 0.5 * s.exp().min((-s).exp());
        worst = worst.max((middle - upper) / upper).max((lower - middle) / lower);
    }
    worst
}

/// Pullback along `σ(t) = t + φ(t)`: `A'(t) = A(σ(t))σ'(t)` and
/// `α'(t) = α(σ(t))`, resampled on `oversample·(2N+1)` points.
pub fn reparametrize(
    conn: &LoopConnection,
    alpha: &FourierLoop,
    phi: &FourierLoop,
    oversample: usize,
) -> Result<(LoopConnection, FourierLoop)> {
    let cfg = *alpha.config();
    let samples = oversample.max(1) * (2 * cfg.max_mode + 1);
    let dphi = phi.derivative();
    let sigma = |t: f64| t + phi.evaluate(t)[(0, 0)].re;
    let dsigma = |t: f64| 1.0 + dphi.evaluate(t)[(0, 0)].re;
    let form_cfg = TruncationConfig { dim: conn.dim(), ..cfg };
    let form = FourierLoop::sample(form_cfg, samples, |t| conn.at(sigma(t)) * C64::new(dsigma(t), 0.0))?.value;
    let moved = FourierLoop::sample(cfg, samples, |t| alpha.evaluate(sigma(t)))?.value;
    let field = conn.field;
    let form = if field == Field::Real { form.into_real().unwrap_or_else(|e| panic!("{e}")) } else { form };
    Ok((LoopConnection { field, form, steps: conn.steps }, moved))
}

/// `max_t |D'(α∘σ)(t) - ((Dα)∘σ)(t)·σ'(t)|` relative to the right-hand
/// side, on a grid offset from the sampling grid.
pub fn chain_rule_residual(
    conn: &LoopConnection,
    alpha: &FourierLoop,
    phi: &FourierLoop,
    oversample: usize,
) -> Result<f64> {
    let (conn2, moved) = reparametrize(conn, alpha, phi, oversample)?;
    let lhs = covariant_derivative(&conn2, &moved)?.value;
    let d_alpha = covariant_derivative(conn, alpha)?.value;
    let dphi = phi.derivative();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for m in 0..97 {
        let t = (m as f64 + 0.37) / 97.0;
        let sigma = t + phi.evaluate(t)[(0, 0)].re;
        let dsigma = 1.0 + dphi.evaluate(t)[(0, 0)].re;
        let rhs = d_alpha.evaluate(sigma) * C64::new(dsigma, 0.0);
        worst = worst.max((lhs.evaluate(t) - &rhs).norm());
        scale = scale.max(rhs.norm());
    }
    Ok(worst / scale)
}

/// Witness that a rank-one sub-bundle with a non-polynomial twist meets the
/// polynomial loops trivially.
#[derive(Clone, Debug)]
pub struct SubbundleReport {
    /// `(k, tail of e^{2πiγ}z^k beyond the window)`.
    pub tails: Vec<(i64, f64)>,
    pub min_tail: f64,
    /// Smallest singular value of `β ↦ tail(e^{2πiγ}β)` on the search span.
    pub sigma_min: f64,
    /// True when some search vector stays polynomial after twisting.
    pub polynomial_preserved: bool,
}

/// Searches `β ∈ span{z^k : |k| ≤ search}` for loops whose twist
/// `e^{2πiγ}β` still has no modes beyond `max_mode`.
pub fn subbundle_counterexample_check<F: Fn(f64) -> f64>(
    twist: F,
    max_mode: usize,
    search: usize,
    tol: f64,
) -> Result<SubbundleReport> {
    let wide = TruncationConfig::with_tol(4 * max_mode.max(search), 1, tol)?;
    let samples = wide.default_samples();
    let mut tails = Vec::new();
    let mut columns = Vec::new();
    for k in -(search as i64)..=(search as i64) {
        let s = FourierLoop::sample(wide, samples, |t| {
            CMatrix::from_element(1, 1, C64::from_polar(1.0, TAU * (twist(t) + k as f64 * t)))
        })?;
        let tail = (s.value.fourier_tail_norm(max_mode).powi(2) + s.out_of_window.powi(2)).sqrt();
        tails.push((k, tail));
        let dense = s.value.to_dense();
        let w = wide.max_mode as i64;
        let tail_part: Vec<C64> = dense
            .iter()
            .enumerate()
            .filter(|(i, _)| ((*i as i64) - w).unsigned_abs() as usize > max_mode)
            .map(|(_, v)| *v)
            .collect();
        columns.push(DVector::from_vec(tail_part));
    }
    let op = CMatrix::from_columns(&columns);
    let sigma_min = op.singular_values().min();
    let min_tail = tails.iter().map(|(_, t)| *t).fold(f64::INFINITY, f64::min);
    Ok(SubbundleReport { tails, min_tail, sigma_min, polynomial_preserved: min_tail <= tol })
}

/// Unitarity (or orthogonality) drift of the transport over one period.
pub fn transport_drift(conn: &LoopConnection) -> f64 {
    group_residual(holonomy(conn).matrix(), conn.group())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{exp_matrix, AlgebraElement};
    use crate::sample;
    use approx::assert_abs_diff_eq;

    fn cfg(n: usize, max_mode: usize) -> TruncationConfig {
        TruncationConfig::new(max_mode, n).unwrap()
    }

    fn diag(values: &[C64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_column_slice(values))
    }

    /// Smooth skew-Hermitian connection form with modes `|k| ≤ 2`.
    fn random_form(n: usize, max_mode: usize, scale: f64, seed: u64) -> FourierLoop {
        let mut rng = sample::rng(seed);
        let c = cfg(n, max_mode);
        let mut modes = Vec::new();
        for k in 0..=2i64 {
            let m = CMatrix::from_fn(n, n, |_, _| sample::complex_gaussian(&mut rng) * scale);
            if k == 0 {
                modes.push((0, (&m - m.adjoint()) * C64::new(0.5, 0.0)));
            } else {
                modes.push((k, m.clone()));
                modes.push((-k, -m.adjoint()));
            }
        }
        FourierLoop::from_modes(c, n, modes).unwrap()
    }

    #[test]
    fn flat_transport_is_identity() {
        let conn = LoopConnection::flat(cfg(2, 4), Field::Complex);
        let p = parallel_transport(&conn, 0.2, 0.9);
        assert!((p.matrix() - CMatrix::identity(2, 2)).norm() < 1e-15);
        assert!((holonomy(&conn).matrix() - CMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn constant_connection_has_closed_form_transport() {
        let mut rng = sample::rng(2);
        let xi = sample::random_skew_hermitian(3, 2.0, &mut rng);
        let conn = LoopConnection::constant(xi.matrix(), Field::Complex, cfg(3, 4)).unwrap();
        let p = parallel_transport(&conn, 0.1, 0.75);
        let expect = exp_matrix(&xi, -0.65, 1e-9).unwrap();
        assert!((p.matrix() - expect.matrix()).norm() < 1e-11);

        let theta = TAU * 0.3;
        let a = diag(&[C64::new(0.0, theta), C64::new(0.0, -theta)]);
        let conn = LoopConnection::constant(&a, Field::Complex, cfg(2, 4)).unwrap();
        let h = holonomy(&conn);
        let expect = diag(&[C64::from_polar(1.0, -theta), C64::from_polar(1.0, theta)]);
        assert!((h.matrix() - expect).norm() < 1e-12);
    }

    #[test]
    fn transport_cocycle() {
        let conn = LoopConnection::new(random_form(2, 8, 1.0, 3), Field::Complex, DEFAULT_STEPS).unwrap();
        for t in [0.17, 0.5, 0.83] {
            let whole = parallel_transport(&conn, 0.0, 1.0);
            let split = parallel_transport(&conn, t, 1.0).mul(&parallel_transport(&conn, 0.0, t)).unwrap();
            assert!((whole.matrix() - split.matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn gauge_change_conjugates_holonomy() {
        let conn = LoopConnection::new(random_form(2, 8, 0.7, 4), Field::Complex, DEFAULT_STEPS).unwrap();
        let mut rng = sample::rng(5);
        let w = sample::random_unitary(2, &mut rng);
        let c = cfg(2, 8);
        let p0 = w.matrix() * diag(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]) * w.matrix().adjoint();
        let p1 = w.matrix() * diag(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]) * w.matrix().adjoint();
        let u = FourierLoop::from_modes(c, 2, [(1, p0), (-2, p1)]).unwrap();
        let gauged = conn.gauge(&u).unwrap();
        assert_eq!(gauged.overflow, 0.0);
        let h = holonomy(&conn);
        let u0 = u.evaluate(0.0);
        let expect = &u0 * h.matrix() * u0.adjoint();
        assert!((holonomy(&gauged.value).matrix() - expect).norm() < 1e-10);
    }

    #[test]
    fn covariant_derivative_examples() {
        let c = cfg(1, 4);
        let conn = LoopConnection::flat(c, Field::Complex);
        let one = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        let k = FourierLoop::constant(c, one.clone()).unwrap();
        assert_eq!(covariant_derivative(&conn, &k).unwrap().value.norm(), 0.0);
        let e3 = FourierLoop::monomial(c, 3, one).unwrap();
        let d = covariant_derivative(&conn, &e3).unwrap().value;
        assert_abs_diff_eq!(d.coeff(3).unwrap()[(0, 0)].im, 3.0 * TAU, epsilon = 1e-13);
        let wrong = FourierLoop::zero(cfg(2, 4), 1);
        assert!(covariant_derivative(&conn, &wrong).is_err());
    }

    #[test]
    fn covariant_leibniz_against_scalars() {
        let n = 2;
        let conn = LoopConnection::new(random_form(n, 16, 1.0, 6), Field::Complex, DEFAULT_STEPS).unwrap();
        let c = cfg(n, 16);
        let mut rng = sample::rng(7);
        let alpha = FourierLoop::from_modes(
            c,
            1,
            (-3..=3).map(|k| (k, CMatrix::from_fn(n, 1, |_, _| sample::complex_gaussian(&mut rng)))),
        )
        .unwrap();
        let f = FourierLoop::from_modes(
            cfg(1, 16),
            1,
            (-2..=2).map(|k| (k, CMatrix::from_element(1, 1, sample::complex_gaussian(&mut rng)))),
        )
        .unwrap();
        let lhs = covariant_derivative(&conn, &f.product(&alpha).unwrap().value).unwrap().value;
        let rhs = f
            .derivative()
            .product(&alpha)
            .unwrap()
            .value
            .add(&f.product(&covariant_derivative(&conn, &alpha).unwrap().value).unwrap().value)
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm() < 1e-10);
    }

    #[test]
    fn flat_fibre_basis() {
        let conn = LoopConnection::flat(cfg(1, 8), Field::Complex);
        let b = pol_fibre_basis(&conn, 3, cfg(1, 8)).unwrap();
        assert_eq!(b.exponents, vec![0.0]);
        assert!(b.sections[0].fourier_tail_norm(0) < 1e-14);
    }

    #[test]
    fn constant_phase_fibre_basis() {
        let theta = 2.0;
        let a = diag(&[C64::new(0.0, theta)]);
        let conn = LoopConnection::constant(&a, Field::Complex, cfg(1, 8)).unwrap();
        let b = pol_fibre_basis(&conn, 3, cfg(1, 8)).unwrap();
        assert_abs_diff_eq!(b.exponents[0], theta, epsilon = 1e-10);
        assert!(b.sections[0].fourier_tail_norm(0) < 1e-10);
        for k in -3..=3 {
            assert!(b.eigen_residual(&conn, 0, k).unwrap() < 1e-9);
        }
    }

    #[test]
    fn random_connection_eigen_table() {
        let conn = LoopConnection::new(random_form(2, 32, 0.8, 8), Field::Complex, DEFAULT_STEPS).unwrap();
        let b = pol_fibre_basis(&conn, 4, cfg(2, 32)).unwrap();
        for s in &b.exponents {
            assert!((0.0..TAU).contains(s));
        }
        for (j, k) in b.modes() {
            let r = b.eigen_residual(&conn, j, k).unwrap();
            assert!(r < 1e-9, "({j}, {k}): {r:e}");
        }
        assert!(cosh_sandwich_violation(&b) <= 1e-14);
    }

    #[test]
    fn cos_d_examples() {
        let conn = LoopConnection::flat(cfg(1, 8), Field::Complex);
        let b = pol_fibre_basis(&conn, 3, cfg(1, 8)).unwrap();
        let mut coords = BasisCoords::new();
        coords.insert((0, 0), C64::new(1.0, 0.0));
        coords.insert((0, 1), C64::new(1.0, 0.0));
        let out = cos_d(&b, &coords).unwrap();
        assert_eq!(out[&(0, 0)], C64::new(1.0, 0.0));
        // (e^{2π} + e^{-2π})/2
        assert_abs_diff_eq!(out[&(0, 1)].re, 267.7467614837482, epsilon = 1e-9);
        coords.insert((0, 4), C64::new(1.0, 0.0));
        assert!(matches!(cos_d(&b, &coords), Err(Error::ModeOutsideWindow { .. })));
    }

    #[test]
    fn cos_series_matches_cosh() {
        for x in [0.0, 1.0, TAU, 20.0] {
            let c = cos_series(C64::new(0.0, x));
            assert!((c.re - x.cosh()).abs() <= 1e-14 * x.cosh());
        }
    }

    #[test]
    fn rotation_keeps_fibre_and_generic_reparametrization_breaks_it() {
        let n = 2;
        let c = cfg(n, 32);
        let conn = LoopConnection::new(random_form(n, 32, 0.6, 9), Field::Complex, DEFAULT_STEPS).unwrap();
        let basis = pol_fibre_basis(&conn, 4, c).unwrap();
        let top = basis.mode_function(0, 4).value;
        let scalar = cfg(1, 32);
        let rotation = FourierLoop::constant(scalar, CMatrix::from_element(1, 1, C64::new(0.3, 0.0))).unwrap();
        let (conn_r, alpha_r) = reparametrize(&conn, &top, &rotation, 4).unwrap();
        let basis_r = pol_fibre_basis(&conn_r, 4, c).unwrap();
        let (_, residual) = basis_r.project(&alpha_r).unwrap();
        assert!(residual < 1e-9, "{residual:e}");

        let eps = 0.1;
        let wiggle = FourierLoop::from_modes(
            scalar,
            1,
            [
                (1, CMatrix::from_element(1, 1, C64::new(0.0, -eps / (2.0 * TAU)))),
                (-1, CMatrix::from_element(1, 1, C64::new(0.0, eps / (2.0 * TAU)))),
            ],
        )
        .unwrap();
        let (conn_s, alpha_s) = reparametrize(&conn, &top, &wiggle, 4).unwrap();
        let basis_s = pol_fibre_basis(&conn_s, 4, c).unwrap();
        let (_, residual) = basis_s.project(&alpha_s).unwrap();
        assert!(residual > 1e-3, "{residual:e}");
        assert!(chain_rule_residual(&conn, &top, &wiggle, 4).unwrap() < 1e-6);
    }

    #[test]
    fn direct_sum_basis_is_blockwise() {
        let a = LoopConnection::new(random_form(1, 16, 0.5, 10), Field::Complex, DEFAULT_STEPS).unwrap();
        let b = LoopConnection::new(random_form(2, 16, 0.5, 11), Field::Complex, DEFAULT_STEPS).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        let c = cfg(3, 16);
        let whole = pol_fibre_basis(&sum, 3, c).unwrap();
        let mut parts: Vec<f64> = pol_fibre_basis(&a, 3, cfg(1, 16)).unwrap().exponents;
        parts.extend(pol_fibre_basis(&b, 3, cfg(2, 16)).unwrap().exponents);
        parts.sort_by(f64::total_cmp);
        let mut got = whole.exponents.clone();
        got.sort_by(f64::total_cmp);
        for (x, y) in parts.iter().zip(&got) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn subbundle_controls_and_witness() {
        let zero = subbundle_counterexample_check(|_| 0.0, 16, 8, 1e-9).unwrap();
        assert!(zero.polynomial_preserved);
        let linear = subbundle_counterexample_check(|t| 2.0 * t, 16, 8, 1e-9).unwrap();
        assert!(linear.polynomial_preserved);
        let wave = subbundle_counterexample_check(|t| (TAU * t).sin(), 16, 8, 1e-9).unwrap();
        assert!(!wave.polynomial_preserved);
        assert!(wave.min_tail > 1e-9);
    }

    #[test]
    fn real_connection_stays_orthogonal() {
        let mut rng = sample::rng(12);
        let xi = sample::random_so_algebra(3, 3.0, &mut rng);
        let conn = LoopConnection::constant(xi.matrix(), Field::Real, cfg(3, 4)).unwrap().with_steps(10_000);
        assert!(transport_drift(&conn) < 1e-9);
        let _ = AlgebraElement::zero(1, crate::lie::Algebra::U);
    }
}
