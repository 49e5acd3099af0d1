//! Truncated Fourier loops.
//!
//! A [`FourierLoop`] is a finite Laurent series `Σ_k c_k z^k` with
//! `z = e^{2πit}` and `|k| ≤ N`, whose coefficients are complex matrices of
//! a fixed shape. Column vectors (`cols == 1`) model loops in `ℂⁿ`; square
//! coefficients model matrix-valued loops such as connection forms or loops
//! in a matrix group.
//!
//! Operations that can push modes out of the window ([`FourierLoop::shift`],
//! [`FourierLoop::product`]) return the dropped mass in a [`Truncated`]
//! wrapper rather than discarding it silently.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::{Complex, DMatrix, DVector};
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Window and dimension shared by a family of loops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationConfig {
    pub max_mode: usize,
    pub dim: usize,
    pub tol: f64,
}

impl TruncationConfig {
    pub fn new(max_mode: usize, dim: usize) -> Result<Self> {
        Self::with_tol(max_mode, dim, DEFAULT_TOL)
    }

    pub fn with_tol(max_mode: usize, dim: usize, tol: f64) -> Result<Self> {
        if max_mode < 1 {
            return Err(Error::InvalidConfig("max_mode must be at least 1".into()));
        }
        if dim < 1 {
            return Err(Error::InvalidConfig("dim must be at least 1".into()));
        }
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidConfig(format!("tolerance {tol} is negative")));
        }
        Ok(Self { max_mode, dim, tol })
    }

    pub fn window(&self) -> i64 {
        self.max_mode as i64
    }

    pub fn contains(&self, k: i64) -> bool {
        k.unsigned_abs() as usize <= self.max_mode
    }

    /// Sample count used by [`FourierLoop::sample`] when none is given.
    pub fn default_samples(&self) -> usize {
        4 * self.max_mode + 1
    }
}

/// A value together with the squared mass that fell outside the window.
#[derive(Clone, Debug)]
pub struct Truncated<T> {
    pub value: T,
    pub overflow: f64,
}

impl<T> Truncated<T> {
    pub fn exact(value: T) -> Self {
        Self { value, overflow: 0.0 }
    }

    /// Returns the value if the overflow mass is at most `tol`.
    pub fn within(self, tol: f64) -> Result<T> {
        if self.overflow <= tol {
            Ok(self.value)
        } else {
            Err(Error::Overflow { mass: self.overflow })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierLoop {
    config: TruncationConfig,
    cols: usize,
    real: bool,
    coeffs: BTreeMap<i64, CMatrix>,
}

/// Result of [`FourierLoop::from_samples`].
#[derive(Clone, Debug)]
pub struct SampledLoop {
    pub value: FourierLoop,
    /// Root of the discrete spectral mass found at frequencies `|k| > N`.
    pub out_of_window: f64,
    pub samples: usize,
}

impl SampledLoop {
    /// True when the samples carried energy the window cannot represent,
    /// either as resolvable high modes or as aliases folded to high bins.
    pub fn band_limit_violated(&self) -> bool {
        self.out_of_window > self.value.config.tol
    }
}

fn frob2(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum()
}

impl FourierLoop {
    pub fn zero(config: TruncationConfig, cols: usize) -> Self {
        Self { config, cols, real: true, coeffs: BTreeMap::new() }
    }

    /// `e^p` for a scalar loop, or `e^p ⊗ v` for a vector `v`.
    pub fn monomial(config: TruncationConfig, p: i64, coeff: CMatrix) -> Result<Self> {
        Self::from_modes(config, coeff.ncols(), [(p, coeff)])
    }

    pub fn constant(config: TruncationConfig, value: CMatrix) -> Result<Self> {
        let real = value.iter().all(|c| c.im == 0.0);
        let mut out = Self::monomial(config, 0, value)?;
        out.real = real;
        Ok(out)
    }

    pub fn identity(config: TruncationConfig) -> Self {
        let n = config.dim;
        let mut out = Self::zero(config, n);
        out.coeffs.insert(0, CMatrix::identity(n, n));
        out
    }

    pub fn from_modes<I>(config: TruncationConfig, cols: usize, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, CMatrix)>,
    {
        let mut coeffs: BTreeMap<i64, CMatrix> = BTreeMap::new();
        for (k, c) in modes {
            if !config.contains(k) {
                return Err(Error::ModeOutsideWindow { mode: k, window: config.window() });
            }
            if c.nrows() != config.dim || c.ncols() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient at mode {k} is {}x{}, expected {}x{}",
                    c.nrows(),
                    c.ncols(),
                    config.dim,
                    cols
                )));
            }
            match coeffs.get_mut(&k) {
                Some(existing) => *existing += c,
                None => {
                    coeffs.insert(k, c);
                }
            }
        }
        Ok(Self { config, cols, real: false, coeffs })
    }

    pub fn config(&self) -> &TruncationConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn max_mode(&self) -> usize {
        self.config.max_mode
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coeff(&self, k: i64) -> Option<&CMatrix> {
        self.coeffs.get(&k)
    }

    pub fn coeff_or_zero(&self, k: i64) -> CMatrix {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| CMatrix::zeros(self.config.dim, self.cols))
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &CMatrix)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Largest residual of the reality condition `c_{-k} = conj(c_k)`.
    pub fn reality_residual(&self) -> f64 {
        let w = self.config.window();
        (0..=w)
            .map(|k| {
                let a = self.coeff_or_zero(k);
                let b = self.coeff_or_zero(-k);
                frob2(&(b - a.map(|c| c.conj()))).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Flags the loop as real after checking conjugate symmetry.
    pub fn into_real(mut self) -> Result<Self> {
        let r = self.reality_residual();
        if r > self.config.tol {
            return Err(Error::InvalidConfig(format!("loop is not real (residual {r:e})")));
        }
        self.real = true;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.config.tol = tol;
        self
    }

    pub fn evaluate(&self, t: f64) -> CMatrix {
        let mut out = CMatrix::zeros(self.config.dim, self.cols);
        for (k, c) in &self.coeffs {
            let phase = C64::from_polar(1.0, TAU * (*k as f64) * t);
            out += c * phase;
        }
        out
    }

    /// `R_λ`: multiplies mode `k` by `λ^k`.
    pub fn rotate(&self, lambda: C64) -> Result<Self> {
        check_unit_with(lambda, self.config.tol)?;
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, c * lambda.powi(*k as i32))).collect();
        let sign_flip = (lambda - C64::new(1.0, 0.0)).norm() <= self.config.tol
            || (lambda + C64::new(1.0, 0.0)).norm() <= self.config.tol;
        Ok(Self { config: self.config, cols: self.cols, real: self.real && sign_flip, coeffs })
    }

    /// Reversal of the circle, `ι e^p = e^{-p}`.
    pub fn involute(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (-k, c.clone())).collect();
        Self { config: self.config, cols: self.cols, real: self.real, coeffs }
    }

    /// Multiplication by `z^q`.
    pub fn shift(&self, q: i64) -> Truncated<Self> {
        let mut overflow = 0.0;
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            let m = k + q;
            if self.config.contains(m) {
                coeffs.insert(m, c.clone());
            } else {
                overflow += frob2(c);
            }
        }
        let real = self.real && q == 0;
        Truncated { value: Self { config: self.config, cols: self.cols, real, coeffs }, overflow }
    }

    /// `d/dt`, acting by `2πik` on mode `k`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| **k != 0)
            .map(|(k, c)| (*k, c * C64::new(0.0, TAU * (*k as f64))))
            .collect();
        Self { config: self.config, cols: self.cols, real: self.real, coeffs }
    }

    /// Cauchy product `f·g` truncated to the window of `g`.
    ///
    /// A `1x1` left factor acts as a scalar on any right factor.
    pub fn product(&self, rhs: &Self) -> Result<Truncated<Self>> {
        if self.config.max_mode != rhs.config.max_mode {
            return Err(Error::WindowMismatch(self.config.max_mode, rhs.config.max_mode));
        }
        let scalar = self.config.dim == 1 && self.cols == 1;
        let (rows, cols) = if scalar {
            (rhs.config.dim, rhs.cols)
        } else if self.cols == rhs.config.dim {
            (self.config.dim, rhs.cols)
        } else {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{} coefficients",
                self.config.dim, self.cols, rhs.config.dim, rhs.cols
            )));
        };
        let config = TruncationConfig { dim: rows, ..rhs.config };
        let mut coeffs: BTreeMap<i64, CMatrix> = BTreeMap::new();
        for (a, fa) in &self.coeffs {
            for (b, gb) in &rhs.coeffs {
                let term = if scalar { gb * fa[(0, 0)] } else { fa * gb };
                coeffs.entry(a + b).and_modify(|acc| *acc += &term).or_insert(term);
            }
        }
        let mut overflow = 0.0;
        coeffs.retain(|k, c| {
            let keep = config.contains(*k);
            if !keep {
                overflow += frob2(c);
            }
            keep
        });
        let real = self.real && rhs.real;
        Ok(Truncated { value: Self { config, cols, real, coeffs }, overflow })
    }

    /// Pointwise conjugate transpose, `t ↦ f(t)*`.
    pub fn adjoint(&self) -> Self {
        let config = TruncationConfig { dim: self.cols, ..self.config };
        let coeffs = self.coeffs.iter().map(|(k, c)| (-k, c.adjoint())).collect();
        Self { config, cols: self.config.dim, real: self.real, coeffs }
    }

    /// Same loop in a window of half-width `max_mode`.
    pub fn rewindow(&self, max_mode: usize) -> Truncated<Self> {
        let config = TruncationConfig { max_mode, ..self.config };
        let mut overflow = 0.0;
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            if config.contains(*k) {
                coeffs.insert(*k, c.clone());
            } else {
                overflow += frob2(c);
            }
        }
        Truncated { value: Self { config, cols: self.cols, real: self.real, coeffs }, overflow }
    }

    pub fn scale(&self, s: C64) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, c * s)).collect();
        Self { config: self.config, cols: self.cols, real: self.real && s.im == 0.0, coeffs }
    }

    /// Left multiplication of every coefficient by a constant matrix.
    pub fn left_mul(&self, m: &CMatrix) -> Result<Self> {
        if m.ncols() != self.config.dim {
            return Err(Error::DimensionMismatch("left factor".into()));
        }
        let config = TruncationConfig { dim: m.nrows(), ..self.config };
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, m * c)).collect();
        Ok(Self { config, cols: self.cols, real: false, coeffs })
    }

    /// Right multiplication of every coefficient by a constant matrix.
    pub fn right_mul(&self, m: &CMatrix) -> Result<Self> {
        if m.nrows() != self.cols {
            return Err(Error::DimensionMismatch("right factor".into()));
        }
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, c * m)).collect();
        Ok(Self { config: self.config, cols: m.ncols(), real: false, coeffs })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.combine(rhs, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.combine(rhs, C64::new(-1.0, 0.0))
    }

    fn combine(&self, rhs: &Self, s: C64) -> Result<Self> {
        if self.config.max_mode != rhs.config.max_mode {
            return Err(Error::WindowMismatch(self.config.max_mode, rhs.config.max_mode));
        }
        if self.config.dim != rhs.config.dim || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch("loop shapes differ".into()));
        }
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &rhs.coeffs {
            let term = c * s;
            coeffs.entry(*k).and_modify(|acc| *acc += &term).or_insert(term);
        }
        Ok(Self { config: self.config, cols: self.cols, real: self.real && rhs.real, coeffs })
    }

    /// `L²` norm, `sqrt(Σ_k ‖c_k‖²)`.
    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(frob2).sum::<f64>().sqrt()
    }

    /// `sqrt(Σ_{|k|>degree} ‖c_k‖²)`; zero exactly when the loop is a
    /// polynomial of degree at most `degree`.
    pub fn fourier_tail_norm(&self, degree: usize) -> f64 {
        self.coeffs
            .iter()
            .filter(|(k, _)| k.unsigned_abs() as usize > degree)
            .map(|(_, c)| frob2(c))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_polynomial(&self, degree: usize) -> bool {
        self.fourier_tail_norm(degree) <= self.config.tol
    }

    /// Smallest `K` whose tail is below tolerance.
    pub fn numerical_degree(&self) -> usize {
        (0..=self.config.max_mode).find(|d| self.is_polynomial(*d)).unwrap_or(self.config.max_mode)
    }

    /// Coefficients flattened column-major per mode, modes ascending over the
    /// whole window.
    pub fn to_dense(&self) -> DVector<C64> {
        let block = self.config.dim * self.cols;
        let w = self.config.window();
        let mut out = DVector::zeros(block * (2 * self.config.max_mode + 1));
        for (k, c) in &self.coeffs {
            let offset = ((k + w) as usize) * block;
            for (i, v) in c.iter().enumerate() {
                out[offset + i] = *v;
            }
        }
        out
    }

    pub fn from_dense(config: TruncationConfig, cols: usize, dense: &DVector<C64>) -> Result<Self> {
        let block = config.dim * cols;
        let width = 2 * config.max_mode + 1;
        if dense.len() != block * width {
            return Err(Error::DimensionMismatch("dense coefficient vector".into()));
        }
        let w = config.window();
        let coeffs = (0..width)
            .map(|i| {
                let c = CMatrix::from_iterator(config.dim, cols, dense.rows(i * block, block).iter().copied());
                (i as i64 - w, c)
            })
            .filter(|(_, c)| c.iter().any(|v| *v != C64::new(0.0, 0.0)))
            .collect();
        Ok(Self { config, cols, real: false, coeffs })
    }

    /// Discrete Fourier coefficients of `M` equispaced samples `x(m/M)`.
    pub fn from_samples(config: TruncationConfig, samples: &[CMatrix]) -> Result<SampledLoop> {
        let m = samples.len();
        let need = 2 * config.max_mode + 1;
        if m < need {
            return Err(Error::TooFewSamples { got: m, need, max_mode: config.max_mode });
        }
        let (rows, cols) = samples[0].shape();
        if rows != config.dim || samples.iter().any(|s| s.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch("sample shapes".into()));
        }
        let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
        let scale = 1.0 / m as f64;
        let mut coeffs: BTreeMap<i64, CMatrix> = BTreeMap::new();
        let mut outside = 0.0;
        let mut buffer = vec![C64::new(0.0, 0.0); m];
        for r in 0..rows {
            for c in 0..cols {
                for (slot, s) in buffer.iter_mut().zip(samples) {
                    *slot = s[(r, c)];
                }
                fft.process(&mut buffer);
                for (j, x) in buffer.iter().enumerate() {
                    let freq = if j <= m / 2 { j as i64 } else { j as i64 - m as i64 };
                    let value = x * scale;
                    if config.contains(freq) {
                        coeffs.entry(freq).or_insert_with(|| CMatrix::zeros(rows, cols))[(r, c)] = value;
                    } else {
                        outside += value.norm_sqr();
                    }
                }
            }
        }
        let value = Self { config, cols, real: false, coeffs };
        Ok(SampledLoop { value, out_of_window: outside.sqrt(), samples: m })
    }

    /// Samples `f` at `samples` equispaced points of `[0, 1)` and transforms.
    pub fn sample<F>(config: TruncationConfig, samples: usize, f: F) -> Result<SampledLoop>
    where
        F: Fn(f64) -> CMatrix,
    {
        let values: Vec<CMatrix> = (0..samples).map(|m| f(m as f64 / samples as f64)).collect();
        Self::from_samples(config, &values)
    }
}

/// Rejects `λ` with `||λ| - 1| > tol`.
pub fn check_unit_with(lambda: C64, tol: f64) -> Result<()> {
    let modulus = lambda.norm();
    if (modulus - 1.0).abs() > tol {
        Err(Error::NotUnitModulus { modulus })
    } else {
        Ok(())
    }
}

pub fn check_unit(lambda: C64) -> Result<()> {
    check_unit_with(lambda, DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(n: usize) -> TruncationConfig {
        TruncationConfig::new(n, 1).unwrap()
    }

    fn one() -> CMatrix {
        CMatrix::from_element(1, 1, C64::new(1.0, 0.0))
    }

    fn scalar_loop(c: TruncationConfig, modes: &[(i64, C64)]) -> FourierLoop {
        FourierLoop::from_modes(c, 1, modes.iter().map(|(k, v)| (*k, CMatrix::from_element(1, 1, *v)))).unwrap()
    }

    #[test]
    fn config_rejects_degenerate_windows() {
        assert!(TruncationConfig::new(0, 1).is_err());
        assert!(TruncationConfig::new(3, 0).is_err());
        assert!(TruncationConfig::with_tol(3, 1, -1.0).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let c = cfg(4);
        let e0 = FourierLoop::constant(c, one()).unwrap();
        assert_abs_diff_eq!(e0.evaluate(0.37)[(0, 0)].re, 1.0, epsilon = 1e-15);
        let e1 = FourierLoop::monomial(c, 1, one()).unwrap();
        let v = e1.evaluate(0.25)[(0, 0)];
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 1.0, epsilon = 1e-15);
        let pair = scalar_loop(c, &[(-1, C64::new(1.0, 0.0)), (1, C64::new(1.0, 0.0))]);
        assert_abs_diff_eq!(pair.evaluate(0.0)[(0, 0)].re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rotate_examples() {
        let c = cfg(4);
        let pair = scalar_loop(c, &[(-1, C64::new(1.0, 0.0)), (1, C64::new(1.0, 0.0))]);
        let r = pair.rotate(C64::i()).unwrap();
        assert_eq!(r.coeff(1).unwrap()[(0, 0)], C64::new(0.0, 1.0));
        assert_abs_diff_eq!(r.coeff(-1).unwrap()[(0, 0)].im, -1.0, epsilon = 1e-15);
        assert_eq!(pair.rotate(C64::new(1.0, 0.0)).unwrap(), pair);
        let lam = C64::from_polar(1.0, 0.7);
        let e3 = FourierLoop::monomial(c, 3, one()).unwrap().rotate(lam).unwrap();
        assert_abs_diff_eq!((e3.coeff(3).unwrap()[(0, 0)] - lam.powi(3)).norm(), 0.0, epsilon = 1e-15);
        assert!(matches!(pair.rotate(C64::new(1.1, 0.0)), Err(Error::NotUnitModulus { .. })));
    }

    #[test]
    fn involute_and_shift_examples() {
        let c = cfg(4);
        let e2 = FourierLoop::monomial(c, 2, one()).unwrap();
        assert!(e2.involute().coeff(-2).is_some());
        let k = FourierLoop::constant(c, one()).unwrap();
        assert_eq!(k.involute(), k);
        let s = e2.shift(1);
        assert!(s.value.coeff(3).is_some());
        assert_eq!(s.overflow, 0.0);
        let top = FourierLoop::monomial(c, 4, one()).unwrap().shift(1);
        assert_eq!(top.value.norm(), 0.0);
        assert_eq!(top.overflow, 1.0);
        let same = e2.shift(0);
        assert_eq!(same.value, e2);
    }

    #[test]
    fn derivative_examples() {
        let c = cfg(4);
        assert_eq!(FourierLoop::constant(c, one()).unwrap().derivative().norm(), 0.0);
        let d1 = FourierLoop::monomial(c, 1, one()).unwrap().derivative();
        assert_abs_diff_eq!(d1.coeff(1).unwrap()[(0, 0)].im, TAU, epsilon = 1e-15);
        let d = scalar_loop(c, &[(-2, C64::new(1.0, 0.0))]).derivative();
        assert_abs_diff_eq!(d.coeff(-2).unwrap()[(0, 0)].im, -2.0 * TAU, epsilon = 1e-14);
    }

    #[test]
    fn product_examples() {
        let c = cfg(4);
        let e1 = FourierLoop::monomial(c, 1, one()).unwrap();
        let sq = e1.product(&e1).unwrap();
        assert_eq!(sq.value.coeff(2).unwrap()[(0, 0)], C64::new(1.0, 0.0));
        let unit = FourierLoop::constant(c, one()).unwrap();
        let g = scalar_loop(c, &[(-3, C64::new(0.5, 1.0)), (2, C64::new(2.0, 0.0))]);
        assert_eq!(unit.product(&g).unwrap().value.sub(&g).unwrap().norm(), 0.0);
        let f = scalar_loop(c, &[(0, C64::new(1.0, 0.0)), (1, C64::new(1.0, 0.0))]);
        let h = scalar_loop(c, &[(0, C64::new(1.0, 0.0)), (-1, C64::new(1.0, 0.0))]);
        let p = f.product(&h).unwrap().value;
        let expect = scalar_loop(c, &[(-1, C64::new(1.0, 0.0)), (0, C64::new(2.0, 0.0)), (1, C64::new(1.0, 0.0))]);
        assert_eq!(p.sub(&expect).unwrap().norm(), 0.0);
    }

    #[test]
    fn product_reports_overflow_and_shape_errors() {
        let c = cfg(2);
        let e2 = FourierLoop::monomial(c, 2, one()).unwrap();
        let out = e2.product(&e2).unwrap();
        assert_eq!(out.overflow, 1.0);
        let vc = TruncationConfig::new(2, 2).unwrap();
        let v = FourierLoop::constant(vc, CMatrix::from_element(2, 1, C64::new(1.0, 0.0))).unwrap();
        assert!(matches!(v.product(&v), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn tail_norm_examples() {
        let c = cfg(4);
        let e2 = FourierLoop::monomial(c, 2, one()).unwrap();
        assert_eq!(e2.fourier_tail_norm(2), 0.0);
        assert_eq!(e2.fourier_tail_norm(1), 1.0);
        let sampled = FourierLoop::sample(TruncationConfig::new(8, 1).unwrap(), 33, |t| {
            CMatrix::from_element(1, 1, C64::from_polar(1.0, TAU * 3.0 * t))
        })
        .unwrap();
        assert!(sampled.value.fourier_tail_norm(3) < 1e-12);
        assert_eq!(sampled.value.numerical_degree(), 3);
    }

    #[test]
    fn from_samples_examples() {
        let c = cfg(4);
        let five = FourierLoop::sample(c, 17, |_| CMatrix::from_element(1, 1, C64::new(5.0, 0.0))).unwrap();
        assert_abs_diff_eq!(five.value.coeff(0).unwrap()[(0, 0)].re, 5.0, epsilon = 1e-14);
        assert!(five.value.fourier_tail_norm(0) < 1e-14);

        let tone = FourierLoop::sample(c, 16, |t| CMatrix::from_element(1, 1, C64::from_polar(1.0, TAU * t))).unwrap();
        assert_abs_diff_eq!(tone.value.coeff(1).unwrap()[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert!(tone.value.fourier_tail_norm(1) < 1e-14);
        assert!(!tone.band_limit_violated());

        assert!(matches!(
            FourierLoop::sample(c, 8, |_| CMatrix::zeros(1, 1)),
            Err(Error::TooFewSamples { got: 8, need: 9, .. })
        ));
    }

    #[test]
    fn out_of_band_tone_is_flagged() {
        let c = cfg(4);
        let six = |t: f64| CMatrix::from_element(1, 1, C64::from_polar(1.0, TAU * 6.0 * t));
        for m in [11, 12, 13, 16] {
            let s = FourierLoop::sample(c, m, six).unwrap();
            assert!(s.band_limit_violated(), "M = {m}");
        }
        // Below eleven samples the tone aliases into the window and the
        // samples coincide with those of an in-window loop.
        let s = FourierLoop::sample(c, 10, six).unwrap();
        assert!(!s.band_limit_violated());
    }

    #[test]
    fn reality_is_tracked() {
        let c = cfg(3);
        let cosine = scalar_loop(c, &[(-1, C64::new(0.5, 0.0)), (1, C64::new(0.5, 0.0))]).into_real().unwrap();
        assert!(cosine.derivative().is_real());
        assert!(cosine.involute().is_real());
        assert!(cosine.product(&cosine).unwrap().value.is_real());
        assert!(cosine.rotate(C64::new(-1.0, 0.0)).unwrap().is_real());
        assert!(!cosine.rotate(C64::i()).unwrap().is_real());
        let bad = scalar_loop(c, &[(1, C64::new(1.0, 0.0))]);
        assert!(bad.into_real().is_err());
    }

    #[test]
    fn dense_round_trip() {
        let c = TruncationConfig::new(3, 2).unwrap();
        let m = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64, j as f64 + 1.0));
        let l = FourierLoop::from_modes(c, 2, [(-3, m.clone()), (1, m.transpose())]).unwrap();
        let back = FourierLoop::from_dense(c, 2, &l.to_dense()).unwrap();
        assert_eq!(back.sub(&l).unwrap().norm(), 0.0);
    }
}
