//! Circle- and involution-invariant inner products on distributions, as
//! weight sequences `a_p = ⟨e_p, e_p⟩`, and the shift operators they carry.
//!
//! Distributions are truncated to modes `|p| ≤ N`. The shift `z` acts on
//! them by `e_p ↦ e_{p-1}`, the transpose of multiplication by `z` on loops.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loops::{CMatrix, FourierLoop, TruncationConfig, C64};
use crate::sample;

/// How the weights decay beyond the window. The window alone cannot decide
/// tail statements such as boundedness of `a_p/a_{p+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayFamily {
    /// `a_p = scale·ρ^{-|p|}`.
    Geometric { rho: f64, scale: f64 },
    /// `a_p = 1/cosh²(2πp)`, the weights produced by `cos D` on a flat line.
    CoshSquared,
    /// Window-only data, with an optional lower bound on `-log(a_{p+1}/a_p)`.
    Custom { rate: Option<f64> },
}

impl DecayFamily {
    pub fn is_rapidly_decreasing(&self) -> bool {
        match self {
            Self::Geometric { rho, .. } => *rho > 1.0,
            Self::CoshSquared => true,
            Self::Custom { rate } => rate.is_some_and(|r| r > 0.0),
        }
    }

    fn rate(&self) -> Option<f64> {
        match self {
            Self::Geometric { rho, .. } => Some(rho.ln()),
            Self::CoshSquared => Some(4.0 * std::f64::consts::PI),
            Self::Custom { rate } => *rate,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    max_mode: usize,
    values: Vec<f64>,
    family: DecayFamily,
}

impl WeightSequence {
    /// `values` lists `a_{-N} … a_N`.
    pub fn new(values: Vec<f64>, family: DecayFamily) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::InvalidConfig("weight table must have odd length 2N+1".into()));
        }
        let max_mode = values.len() / 2;
        for (i, a) in values.iter().enumerate() {
            if !(a.is_finite() && *a > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "weight a_{} = {a} is not positive",
                    i as i64 - max_mode as i64
                )));
            }
            let mirror = values[values.len() - 1 - i];
            if (a - mirror).abs() > 1e-12 * a.max(mirror) {
                return Err(Error::InvalidConfig(format!(
                    "weights are not symmetric at p = {}",
                    i as i64 - max_mode as i64
                )));
            }
        }
        Ok(Self { max_mode, values, family })
    }

    pub fn geometric(rho: f64, scale: f64, max_mode: usize) -> Result<Self> {
        if !(rho > 0.0 && scale > 0.0) {
            return Err(Error::InvalidConfig("geometric weights need rho, scale > 0".into()));
        }
        let n = max_mode as i64;
        let values = (-n..=n).map(|p| scale * rho.powi(-(p.abs() as i32))).collect();
        Self::new(values, DecayFamily::Geometric { rho, scale })
    }

    pub fn cosh_squared(max_mode: usize) -> Self {
        let n = max_mode as i64;
        let values = (-n..=n).map(|p| (std::f64::consts::TAU * p as f64).cosh().powi(-2)).collect();
        Self { max_mode, values, family: DecayFamily::CoshSquared }
    }

    /// The L² weights `a ≡ 1`.
    pub fn flat(max_mode: usize) -> Self {
        Self { max_mode, values: vec![1.0; 2 * max_mode + 1], family: DecayFamily::Custom { rate: None } }
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn family(&self) -> DecayFamily {
        self.family
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, p: i64) -> f64 {
        self.values[(p + self.max_mode as i64) as usize]
    }

    pub fn contains(&self, p: i64) -> bool {
        p.unsigned_abs() as usize <= self.max_mode
    }

    /// `sup_p a_p·(1+|p|)^m` over the window.
    pub fn decay_bound(&self, m: i32) -> f64 {
        self.modes().map(|p| self.at(p) * (1.0 + p.abs() as f64).powi(m)).fold(0.0, f64::max)
    }

    fn modes(&self) -> impl Iterator<Item = i64> {
        let n = self.max_mode as i64;
        -n..=n
    }

    /// Diagonal Gram matrix of the inner product in the basis `e_p`.
    pub fn gram_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.values))
    }

    /// Inverse of [`gram_matrix`](Self::gram_matrix): accepts exactly the
    /// diagonal, positive, symmetric forms.
    pub fn from_gram(gram: &DMatrix<f64>, tol: f64) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
        }
        let off: f64 = gram
            .iter()
            .enumerate()
            .filter(|(i, _)| i % gram.nrows() != i / gram.nrows())
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt();
        if off > tol {
            return Err(Error::InvalidConfig(format!("form is not circle invariant (off-diagonal mass {off:e})")));
        }
        Self::new(gram.diagonal().iter().copied().collect(), DecayFamily::Custom { rate: None })
    }

    pub fn to_json(&self) -> Result<String> {
        let (family, rho) = match self.family {
            DecayFamily::Geometric { rho, .. } => ("geometric", Some(rho)),
            DecayFamily::CoshSquared => ("cosh2", None),
            DecayFamily::Custom { .. } => ("custom", None),
        };
        crate::io::to_json(&WeightFile { family: family.into(), rho, n: self.max_mode, values: self.values.clone() })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: WeightFile = serde_json::from_str(text)?;
        if f.values.len() != 2 * f.n + 1 {
            return Err(Error::Format(format!("expected {} weights, found {}", 2 * f.n + 1, f.values.len())));
        }
        let family = match (f.family.as_str(), f.rho) {
            ("geometric", Some(rho)) => DecayFamily::Geometric { rho, scale: f.values[f.n] },
            ("geometric", None) => return Err(Error::Format("geometric weights need rho".into())),
            ("cosh2", _) => DecayFamily::CoshSquared,
            ("custom", _) => DecayFamily::Custom { rate: None },
            (other, _) => return Err(Error::Format(format!("unknown weight family `{other}`"))),
        };
        Self::new(f.values, family)
    }
}

#[derive(Serialize, Deserialize)]
struct WeightFile {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rho: Option<f64>,
    #[serde(rename = "N")]
    n: usize,
    values: Vec<f64>,
}

/// A truncated distribution `b = Σ b^p e_p`, `|p| ≤ N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualVector {
    max_mode: usize,
    coeffs: Vec<C64>,
}

impl DualVector {
    pub fn zero(max_mode: usize) -> Self {
        Self { max_mode, coeffs: vec![C64::new(0.0, 0.0); 2 * max_mode + 1] }
    }

    pub fn basis(p: i64, max_mode: usize) -> Result<Self> {
        let mut out = Self::zero(max_mode);
        out.set(p, C64::new(1.0, 0.0))?;
        Ok(out)
    }

    /// `coeffs` lists `b^{-N} … b^N`.
    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidConfig("dual vector must have odd length 2N+1".into()));
        }
        Ok(Self { max_mode: coeffs.len() / 2, coeffs })
    }

    pub fn random<R: Rng>(max_mode: usize, rng: &mut R) -> Self {
        Self { max_mode, coeffs: (0..2 * max_mode + 1).map(|_| sample::complex_gaussian(rng)).collect() }
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn at(&self, p: i64) -> C64 {
        if p.unsigned_abs() as usize > self.max_mode {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(p + self.max_mode as i64) as usize]
        }
    }

    pub fn set(&mut self, p: i64, value: C64) -> Result<()> {
        if p.unsigned_abs() as usize > self.max_mode {
            return Err(Error::ModeOutsideWindow { mode: p, window: self.max_mode as i64 });
        }
        self.coeffs[(p + self.max_mode as i64) as usize] = value;
        Ok(())
    }

    fn modes(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let n = self.max_mode as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - n, *c))
    }

    fn map(&self, f: impl Fn(i64, C64) -> C64) -> Self {
        Self { max_mode: self.max_mode, coeffs: self.modes().map(|(p, c)| f(p, c)).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|_, c| c * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_window(self.max_mode, other.max_mode)?;
        Ok(self.map(|p, c| c + other.at(p)))
    }

    /// Smallest `m ≥ 0` with `|b^p|·(1+|p|)^{-m} ≤ bound`, if one below 64
    /// exists.
    pub fn growth_certificate(&self, bound: f64) -> Option<u32> {
        (0..64u32).find(|m| self.modes().all(|(p, c)| c.norm() * (1.0 + p.abs() as f64).powi(-(*m as i32)) <= bound))
    }

    /// `R_λ e^p = λ^p e^p`.
    pub fn rotate(&self, lambda: C64) -> Result<Self> {
        crate::loops::check_unit(lambda)?;
        Ok(self.map(|p, c| c * lambda.powi(p as i32)))
    }

    /// `e_p ↦ e_{-p}`.
    pub fn involute(&self) -> Self {
        self.map(|p, _| self.at(-p))
    }

    /// Conjugate distribution `b̄(f) = conj(b(f̄))`, so `b̄^p = conj(b^{-p})`.
    pub fn loop_conjugate(&self) -> Self {
        self.map(|p, _| self.at(-p).conj())
    }

    /// Applies `z^q`: `e_p ↦ e_{p-q}`, dropping modes that leave the window.
    pub fn shift(&self, q: i64) -> Self {
        self.map(|p, _| self.at(p + q))
    }

    /// Pairing `b(f) = Σ b^p f_p` with a scalar loop.
    pub fn pair(&self, f: &FourierLoop) -> Result<C64> {
        if f.dim() != 1 || f.cols() != 1 {
            return Err(Error::DimensionMismatch("distributions pair with scalar loops".into()));
        }
        check_window(self.max_mode, f.max_mode())?;
        Ok(self.modes().map(|(p, b)| b * f.coeff_or_zero(p)[(0, 0)]).sum())
    }
}

fn check_window(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::WindowMismatch(a, b))
    }
}

/// `⟨b, c⟩_a = Σ b^p conj(c^p) a_p`.
pub fn inner_product(b: &DualVector, c: &DualVector, a: &WeightSequence) -> Result<C64> {
    check_window(b.max_mode, c.max_mode)?;
    check_window(b.max_mode, a.max_mode)?;
    Ok(b.modes().map(|(p, x)| x * c.at(p).conj() * a.at(p)).sum())
}

pub fn weighted_norm(b: &DualVector, a: &WeightSequence) -> Result<f64> {
    Ok(inner_product(b, b, a)?.re.max(0.0).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct Equivalence {
    /// `sup a_p/b_p` over the window.
    pub lower: f64,
    /// `sup b_p/a_p` over the window.
    pub upper: f64,
    pub equivalent: bool,
    /// False when the verdict rests on the window alone.
    pub extrapolated: bool,
}

/// Two weights give equivalent norms iff `a/b` and `b/a` stay bounded.
pub fn equivalence_check(a: &WeightSequence, b: &WeightSequence) -> Result<Equivalence> {
    check_window(a.max_mode, b.max_mode)?;
    let lower = a.modes().map(|p| a.at(p) / b.at(p)).fold(0.0, f64::max);
    let upper = a.modes().map(|p| b.at(p) / a.at(p)).fold(0.0, f64::max);
    let (equivalent, extrapolated) = match (a.family, b.family) {
        (DecayFamily::Geometric { rho: r1, .. }, DecayFamily::Geometric { rho: r2, .. }) => {
            ((r1 - r2).abs() <= 1e-12 * r1.max(r2), true)
        }
        (DecayFamily::CoshSquared, DecayFamily::CoshSquared) => (true, true),
        (DecayFamily::CoshSquared, DecayFamily::Geometric { .. })
        | (DecayFamily::Geometric { .. }, DecayFamily::CoshSquared) => (false, true),
        _ => (true, false),
    };
    Ok(Equivalence { lower, upper, equivalent, extrapolated })
}

/// `sqrt(sup_p a_p/a_{p+q})` over pairs with both modes in the window.
pub fn z_operator_norm(a: &WeightSequence, q: i64) -> f64 {
    a.modes().filter(|p| a.contains(p + q)).map(|p| a.at(p) / a.at(p + q)).fold(0.0, f64::max).sqrt()
}

/// Closed form of `‖z^q‖` over all of `ℤ` for declared families.
pub fn z_operator_norm_family(family: DecayFamily, q: i64) -> Option<f64> {
    let q = q.unsigned_abs() as f64;
    match family {
        DecayFamily::Geometric { rho, .. } => Some(rho.powf(q / 2.0)),
        // cosh(x+y)/cosh(x) increases to e^y.
        DecayFamily::CoshSquared => Some((std::f64::consts::TAU * q).exp()),
        DecayFamily::Custom { .. } => None,
    }
}

/// Matrix of `z^q` in the orthonormal basis `e_p/√a_p`.
pub fn weighted_shift_matrix(a: &WeightSequence, q: i64) -> DMatrix<f64> {
    let n = a.max_mode as i64;
    let dim = 2 * a.max_mode + 1;
    let mut m = DMatrix::zeros(dim, dim);
    for p in -n..=n {
        if a.contains(p - q) {
            m[((p - q + n) as usize, (p + n) as usize)] = (a.at(p - q) / a.at(p)).sqrt();
        }
    }
    m
}

/// Relative gap between [`z_operator_norm`] and the top singular value of
/// [`weighted_shift_matrix`].
pub fn z_norm_svd_gap(a: &WeightSequence, q: i64) -> f64 {
    let formula = z_operator_norm(a, q);
    let svd = weighted_shift_matrix(a, q).singular_values().max();
    (formula - svd).abs() / formula.max(f64::MIN_POSITIVE)
}

/// `s·a + t·b`, which stays in the cone.
pub fn cone_combine(a: &WeightSequence, b: &WeightSequence, s: f64, t: f64) -> Result<WeightSequence> {
    check_window(a.max_mode, b.max_mode)?;
    if !(s >= 0.0 && t >= 0.0 && s + t > 0.0) {
        return Err(Error::InvalidConfig("cone coefficients must be nonnegative and not both zero".into()));
    }
    if t == 0.0 && s == 1.0 {
        return Ok(a.clone());
    }
    if s == 0.0 && t == 1.0 {
        return Ok(b.clone());
    }
    let values = a.values.iter().zip(&b.values).map(|(x, y)| s * x + t * y).collect();
    let family = match (a.family, b.family) {
        (DecayFamily::Geometric { rho: r1, scale: c1 }, DecayFamily::Geometric { rho: r2, scale: c2 }) if r1 == r2 => {
            DecayFamily::Geometric { rho: r1, scale: s * c1 + t * c2 }
        }
        (fa, fb) => {
            let rate = match (fa.rate(), fb.rate()) {
                (Some(x), Some(y)) if s > 0.0 && t > 0.0 => Some(x.min(y)),
                (x, _) if t == 0.0 => x,
                (_, y) if s == 0.0 => y,
                _ => None,
            };
            DecayFamily::Custom { rate }
        }
    };
    WeightSequence::new(values, family)
}

/// `c ⋄ γ_a`: the loop whose mode `-q` is `c^q·a_q`.
pub fn diamond(c: &DualVector, a: &WeightSequence) -> Result<FourierLoop> {
    check_window(c.max_mode, a.max_mode)?;
    let config = TruncationConfig::new(a.max_mode, 1)?;
    FourierLoop::from_modes(config, 1, c.modes().map(|(q, x)| (-q, CMatrix::from_element(1, 1, x * a.at(q)))))
}

/// `J e_p = -i e_p` for `p ≥ 0` and `+i e_p` for `p < 0`.
pub fn polarisation_j(x: &DualVector) -> DualVector {
    x.map(|p, c| c * polarisation_phase(p))
}

pub fn polarisation_phase(p: i64) -> C64 {
    if p >= 0 {
        C64::new(0.0, -1.0)
    } else {
        C64::new(0.0, 1.0)
    }
}

/// Hilbert–Schmidt norm and numerical rank of a commutator.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CommutatorReport {
    pub hs_norm: f64,
    pub rank: usize,
}

/// Matrix of multiplication by a matrix loop on `ℂⁿ`-valued modes `|p| ≤ N`,
/// basis ordered mode-major.
pub fn convolution_matrix(op: &FourierLoop, max_mode: usize) -> CMatrix {
    let n = op.dim();
    let w = max_mode as i64;
    let dim = n * (2 * max_mode + 1);
    let mut m = CMatrix::zeros(dim, dim);
    for (k, c) in op.modes() {
        for p in -w..=w {
            let target = p + k;
            if target.abs() > w {
                continue;
            }
            let (r, col) = (((target + w) as usize) * n, ((p + w) as usize) * n);
            m.view_mut((r, col), (n, op.cols())).copy_from(c);
        }
    }
    m
}

/// `[A, J]` in the orthonormal basis of the weighted space.
pub fn commutator_hs_norm(op: &FourierLoop, a: &WeightSequence) -> Result<CommutatorReport> {
    if op.dim() != op.cols() {
        return Err(Error::DimensionMismatch("operator loop must be square".into()));
    }
    let n = op.dim();
    let w = a.max_mode as i64;
    let m = convolution_matrix(op, a.max_mode);
    let dim = m.nrows();
    let mode = |i: usize| (i / n) as i64 - w;
    let c = CMatrix::from_fn(dim, dim, |r, col| {
        let (pr, pc) = (mode(r), mode(col));
        let scale = (a.at(pr) / a.at(pc)).sqrt();
        m[(r, col)] * (polarisation_phase(pc) - polarisation_phase(pr)) * scale
    });
    let sv = c.singular_values();
    let top = sv.max();
    let rank = sv.iter().filter(|s| **s > 1e-10 * top.max(1.0)).count();
    Ok(CommutatorReport { hs_norm: c.norm(), rank })
}

/// `ζ_t(e_p) = (a_{p-1}/a_p)^{t/2} e_{p-1}` on the window.
pub fn zeta_homotopy(a: &WeightSequence, t: f64) -> DMatrix<f64> {
    let n = a.max_mode as i64;
    let dim = 2 * a.max_mode + 1;
    let mut m = DMatrix::zeros(dim, dim);
    for p in (-n + 1)..=n {
        m[((p - 1 + n) as usize, (p + n) as usize)] = (a.at(p - 1) / a.at(p)).powf(t / 2.0);
    }
    m
}

/// The part of `ζ_t` mapping modes `-N+1..=N` onto `-N..=N-1`; the full
/// truncated shift always loses one mode at each edge.
pub fn zeta_interior(a: &WeightSequence, t: f64) -> DMatrix<f64> {
    let z = zeta_homotopy(a, t);
    let d = z.nrows() - 1;
    z.view((0, 1), (d, d)).into_owned()
}

/// `T z T⁻¹` with `T e_p = √a_p e_p`.
pub fn conjugated_shift(a: &WeightSequence) -> DMatrix<f64> {
    let t = DMatrix::from_diagonal(&DVector::from_iterator(a.values.len(), a.values.iter().map(|x| x.sqrt())));
    let t_inv =
        DMatrix::from_diagonal(&DVector::from_iterator(a.values.len(), a.values.iter().map(|x| x.sqrt().recip())));
    t * zeta_homotopy(a, 0.0) * t_inv
}

/// `(q, ‖z^q‖)` for `q = 0..=qmax`.
pub fn unbounded_growth_witness(a: &WeightSequence, qmax: usize) -> Result<Vec<(i64, f64)>> {
    if qmax > 2 * a.max_mode {
        return Err(Error::InvalidConfig(format!("qmax {qmax} exceeds 2N = {}", 2 * a.max_mode)));
    }
    Ok((0..=qmax as i64).map(|q| (q, z_operator_norm(a, q))).collect())
}

/// True when the norms strictly increase from `q = 1` on.
pub fn strictly_increasing(table: &[(i64, f64)]) -> bool {
    table.iter().filter(|(q, _)| *q >= 1).collect::<Vec<_>>().windows(2).all(|w| w[1].1 > w[0].1)
}
