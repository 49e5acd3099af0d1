//! Property suites with machine-readable reports.
//!
//! Every check draws its randomness from `hash(seed, check name)`, so the
//! report for a given configuration is reproducible byte for byte. Runtimes
//! are recorded only when [`VerifyConfig::timings`] is set.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dirac::{self, DiracConfig, PolynomialSection};
use crate::error::{Error, Result};
use crate::fock::{polarisation_compare, FockSpace, FockVector, ModeSpace, Parity, PolarisingOperator};
use crate::holonomy::{self, Field, LoopConnection};
use crate::io;
use crate::lie::{
    self, commuting_log, exp_matrix, group_residual, log_decompose_so, log_sector, log_zero, unitary_structure_from,
    AlgebraElement, Group, Spectral,
};
use crate::loops::{CMatrix, FourierLoop, TruncationConfig, C64};
use crate::paths::{self, PathLike, PolynomialPath, ProjectionJField};
use crate::sample::{self, SeededRng};
use crate::scenarios::{self, SoSectionCase};
use crate::weights::{self, DualVector, WeightSequence};

/// Smallest window on which the holonomy suite resolves parallel sections.
pub const HOLONOMY_RESOLUTION: usize = 32;
/// Largest window for the non-polynomial twist witness.
pub const SUBBUNDLE_WINDOW: usize = 16;

pub const SUITES: [&str; 7] = ["loops", "lie", "paths", "holonomy", "weights", "fock", "dirac"];

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    #[serde(rename = "N")]
    pub modes: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub fock_window: usize,
    #[serde(rename = "P")]
    pub particle_cap: usize,
    pub seed: u64,
    pub tol: f64,
    pub steps: usize,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { modes: 16, n: 2, fock_window: 6, particle_cap: 6, seed: 42, tol: 1e-9, steps: 4096, timings: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// The property being checked, stated in words.
    pub anchor: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Offending inputs, attached to failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    /// True when no check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        io::to_json(self)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,name,anchor,status,residual,tolerance,runtime_ms,note\n");
        for c in &self.checks {
            let fields = [
                self.suite.clone(),
                c.name.clone(),
                c.anchor.clone(),
                c.status.as_str().to_string(),
                format!("{:.16e}", c.residual),
                format!("{:.16e}", c.tolerance),
                format!("{}", c.runtime_ms),
                c.note.clone().unwrap_or_default(),
            ];
            let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// What a check measured.
enum Outcome {
    /// Passes when `residual ≤ tolerance`.
    Residual {
        residual: f64,
        note: Option<String>,
        witness: Option<Value>,
    },
    /// Passes when `value ≥ threshold`; reported as residual
    /// `max(0, threshold - value)` against tolerance 0.
    AtLeast {
        value: f64,
        threshold: f64,
        witness: Option<Value>,
    },
    Skip(String),
}

impl Outcome {
    fn residual(residual: f64) -> Self {
        Self::Residual { residual, note: None, witness: None }
    }

    fn with_note(residual: f64, note: String) -> Self {
        Self::Residual { residual, note: Some(note), witness: None }
    }

    fn with_witness(residual: f64, witness: Value) -> Self {
        Self::Residual { residual, note: None, witness: Some(witness) }
    }

    /// Residual 0 when `ok`, 1 otherwise, against tolerance 0.
    fn holds(ok: bool, note: String) -> Self {
        Self::Residual { residual: if ok { 0.0 } else { 1.0 }, note: Some(note), witness: None }
    }
}

/// Largest residual seen so far and the input that produced it. A NaN
/// residual sticks, unlike with `f64::max`.
#[derive(Default)]
struct Worst {
    residual: f64,
    witness: Option<Value>,
}

impl Worst {
    fn update(&mut self, residual: f64, witness: impl FnOnce() -> Value) {
        if self.residual.is_nan() {
            return;
        }
        if residual.is_nan() || residual > self.residual || self.witness.is_none() {
            self.residual = residual;
            self.witness = Some(witness());
        }
    }

    fn outcome(self) -> Outcome {
        Outcome::Residual { residual: self.residual, note: None, witness: self.witness }
    }
}

fn matrix_value(m: &CMatrix) -> Value {
    json!({ "rows": m.nrows(), "cols": m.ncols(), "entries": io::matrix_entries(m) })
}

struct Runner<'a> {
    cfg: &'a VerifyConfig,
    checks: Vec<Check>,
}

impl Runner<'_> {
    fn run<F>(&mut self, name: &str, anchor: &str, tolerance: f64, f: F)
    where
        F: FnOnce(&mut SeededRng) -> Result<Outcome>,
    {
        let mut rng = sample::rng_for(self.cfg.seed, name);
        let start = Instant::now();
        let outcome = f(&mut rng);
        let runtime_ms = if self.cfg.timings { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
        let mut check = Check {
            name: name.into(),
            anchor: anchor.into(),
            status: Status::Fail,
            residual: f64::INFINITY,
            tolerance,
            runtime_ms,
            note: None,
            witness: None,
        };
        match outcome {
            Ok(Outcome::Residual { residual, note, witness }) => {
                // Adding 0.0 normalises -0.0 for stable output.
                check.residual = residual + 0.0;
                check.status = if residual <= tolerance { Status::Pass } else { Status::Fail };
                check.note = note;
                if check.status == Status::Fail {
                    check.witness = witness;
                }
            }
            Ok(Outcome::AtLeast { value, threshold, witness }) => {
                check.residual = (threshold - value).max(0.0);
                check.tolerance = 0.0;
                check.status = if value >= threshold { Status::Pass } else { Status::Fail };
                check.note = Some(format!("value {value:.6e}, required at least {threshold:.1e}"));
                if check.status == Status::Fail {
                    check.witness = witness;
                }
            }
            Ok(Outcome::Skip(reason)) => {
                check.status = Status::Skip;
                check.residual = 0.0;
                check.note = Some(reason);
            }
            Err(e) => check.note = Some(e.to_string()),
        }
        self.checks.push(check);
    }
}

/// Runs one suite, or every suite for `"all"`.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut runner = Runner { cfg, checks: Vec::new() };
    let suites: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
    for suite in &suites {
        match *suite {
            "loops" => loops_suite(&mut runner),
            "lie" => lie_suite(&mut runner),
            "paths" => paths_suite(&mut runner),
            "holonomy" => holonomy_suite(&mut runner),
            "weights" => weights_suite(&mut runner),
            "fock" => fock_suite(&mut runner),
            "dirac" => dirac_suite(&mut runner),
            other => return Err(Error::UnknownSuite(other.into())),
        }
    }
    Ok(SuiteReport { suite: name.into(), config: cfg.clone(), checks: runner.checks })
}

fn loop_config(cfg: &VerifyConfig, dim: usize) -> Result<TruncationConfig> {
    TruncationConfig::with_tol(cfg.modes, dim, cfg.tol)
}

fn max_diff(a: &FourierLoop, b: &FourierLoop) -> Result<f64> {
    Ok(a.sub(b)?.norm())
}

fn loops_suite(r: &mut Runner) {
    let cfg = r.cfg.clone();
    let half = cfg.modes / 2;

    r.run(
        "loops.shift_round_trip",
        "z^q followed by z^-q is the identity on loops of degree at most N - |q|",
        cfg.tol,
        |rng| {
            let c = loop_config(&cfg, cfg.n)?;
            let mut worst: f64 = 0.0;
            for q in -(half as i64)..=(half as i64) {
                let f = scenarios::random_polynomial_loop(c, 1, half, rng)?;
                let back = f.shift(q).value.shift(-q).value;
                worst = worst.max(max_diff(&f, &back)? / f.norm());
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run("loops.rotation_homomorphism", "rotation by lambda then mu equals rotation by lambda*mu", 1e-12, |rng| {
        let c = loop_config(&cfg, cfg.n)?;
        let mut worst = Worst::default();
        for _ in 0..20 {
            let f = scenarios::random_polynomial_loop(c, 1, cfg.modes, rng)?;
            let (l, m) = (sample::unit_complex(rng), sample::unit_complex(rng));
            let lhs = f.rotate(m)?.rotate(l)?;
            let rhs = f.rotate(l * m)?;
            worst.update(max_diff(&lhs, &rhs)? / f.norm(), || {
                json!({ "loop": io::loop_to_value(&f).unwrap_or(Value::Null), "lambda": [l.re, l.im], "mu": [m.re, m.im] })
            });
        }
        Ok(worst.outcome())
    });

    r.run(
        "loops.involution",
        "the involution z -> z^-1 squares to the identity and commutes with rotation up to inverting lambda",
        1e-12,
        |rng| {
            let c = loop_config(&cfg, cfg.n)?;
            let f = scenarios::random_polynomial_loop(c, 1, cfg.modes, rng)?;
            let l = sample::unit_complex(rng);
            let twice = max_diff(&f.involute().involute(), &f)?;
            let swap = max_diff(&f.rotate(l)?.involute(), &f.involute().rotate(l.conj())?)?;
            Ok(Outcome::residual((twice + swap) / f.norm()))
        },
    );

    r.run(
        "loops.product_pointwise",
        "the truncated product of band-limited loops evaluates to the pointwise product",
        1e-10,
        |rng| {
            let c = loop_config(&cfg, cfg.n)?;
            let f = scenarios::random_polynomial_loop(TruncationConfig { dim: cfg.n, ..c }, cfg.n, half, rng)?;
            let g = scenarios::random_polynomial_loop(c, 1, half, rng)?;
            let p = f.product(&g)?;
            let mut worst: f64 = 0.0;
            for _ in 0..16 {
                let t: f64 = rng.random();
                let direct = f.evaluate(t) * g.evaluate(t);
                worst = worst.max((p.value.evaluate(t) - &direct).norm() / direct.norm().max(1.0));
            }
            Ok(Outcome::with_note(worst, format!("overflow {:.3e}", p.overflow)))
        },
    );

    r.run("loops.leibniz", "the derivative obeys the product rule for scalar times vector loops", 1e-9, |rng| {
        let c = loop_config(&cfg, cfg.n)?;
        let d = (half / 2).max(1);
        let f = scenarios::random_polynomial_loop(loop_config(&cfg, 1)?, 1, d, rng)?;
        let g = scenarios::random_polynomial_loop(c, 1, d, rng)?;
        let lhs = f.product(&g)?.value.derivative();
        let rhs = f.derivative().product(&g)?.value.add(&f.product(&g.derivative())?.value)?;
        Ok(Outcome::residual(max_diff(&lhs, &rhs)? / (f.norm() * g.norm())))
    });

    r.run(
        "loops.sampling_round_trip",
        "4N+1 equispaced samples of a band-limited loop recover its coefficients",
        1e-12,
        |rng| {
            let c = loop_config(&cfg, cfg.n)?;
            let f = scenarios::random_polynomial_loop(c, 1, cfg.modes, rng)?;
            let s = FourierLoop::sample(c, c.default_samples(), |t| f.evaluate(t))?;
            Ok(Outcome::residual(max_diff(&s.value, &f)? / f.norm() + s.out_of_window))
        },
    );

    r.run(
        "loops.aliasing_flagged",
        "a tone just beyond the window is flagged when sampled below twice its frequency",
        0.0,
        |_| {
            let c = loop_config(&cfg, 1)?;
            let tone = cfg.modes as i64 + 2;
            let m = 2 * cfg.modes + 3;
            let s = FourierLoop::sample(c, m, |t| {
                CMatrix::from_element(1, 1, C64::from_polar(1.0, TAU * tone as f64 * t))
            })?;
            Ok(Outcome::holds(s.band_limit_violated(), format!("mode {tone} sampled at M = {m}")))
        },
    );

    r.run("loops.file_round_trip", "a loop written to a file and read back is bit-identical", 0.0, |rng| {
        let c = loop_config(&cfg, cfg.n)?;
        let f = scenarios::random_polynomial_loop(c, 1, cfg.modes, rng)?.scale(C64::new(1e-3, 0.0));
        let back = io::loop_from_json(&io::loop_to_json(&f)?, cfg.tol)?;
        let mut worst: f64 = 0.0;
        for k in -(cfg.modes as i64)..=(cfg.modes as i64) {
            worst = worst.max((f.coeff_or_zero(k) - back.coeff_or_zero(k)).camax());
        }
        Ok(Outcome::residual(worst))
    });
}

fn lie_suite(r: &mut Runner) {
    let cfg = r.cfg.clone();
    let tol = cfg.tol;

    r.run("lie.sector_log_round_trip", "exp of the sector logarithm returns the group element", tol, |rng| {
        let mut worst = Worst::default();
        for n in 2..=4 {
            for _ in 0..20 {
                let g = sample::random_unitary(n, rng);
                for _ in 0..2 {
                    let sigma = rng.random_range(-PI..PI);
                    let xi = log_sector(&g, sigma, tol)?;
                    let r = (exp_matrix(&xi, 1.0, tol)?.matrix() - g.matrix()).norm();
                    worst.update(r, || json!({ "g": matrix_value(g.matrix()), "sigma": sigma }));
                }
            }
        }
        Ok(worst.outcome())
    });

    r.run(
        "lie.sector_log_strip",
        "eigenvalues of the sector logarithm at s = i*sigma lie within pi of i*sigma",
        tol,
        |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..40 {
                let g = sample::random_unitary(3, rng);
                let sigma = rng.random_range(-PI..PI);
                let xi = log_sector(&g, sigma, tol)?;
                let spec = Spectral::of_normal(xi.matrix(), tol)?;
                for v in &spec.values {
                    worst = worst.max((v.im - sigma).abs() - PI).max(v.re.abs());
                }
            }
            Ok(Outcome::residual(worst.max(0.0)))
        },
    );

    r.run("lie.commuting_log", "the spectral logarithm exponentiates back and commutes with the element", tol, |rng| {
        let mut worst = Worst::default();
        for n in 2..=4 {
            let g = sample::random_unitary(n, rng);
            let xi = commuting_log(&g, tol)?;
            let comm = (xi.matrix() * g.matrix() - g.matrix() * xi.matrix()).norm();
            let r = comm.max((exp_matrix(&xi, 1.0, tol)?.matrix() - g.matrix()).norm());
            worst.update(r, || json!({ "g": matrix_value(g.matrix()) }));
        }
        Ok(worst.outcome())
    });

    r.run(
        "lie.log_decompose_so",
        "g in SO_m splits as exp(xi) with log_0(-g) = xi - pi*J_xi and J_xi a commuting unitary structure",
        1e-8,
        |rng| {
            let mut worst = Worst::default();
            for m in [2, 4, 6] {
                let g = sample::random_so(m, rng);
                let (xi, j) = log_decompose_so(&g, tol)?;
                let jc = lie::complexify(j.matrix());
                let neg = lie::GroupElement::trusted(-g.matrix(), Group::SO);
                let l = log_zero(&neg, tol)?;
                let split = (l.matrix() - (xi.matrix() - &jc * C64::new(PI, 0.0))).norm();
                let expo = (exp_matrix(&xi, 1.0, tol)?.matrix() - g.matrix()).norm();
                let comm = (xi.matrix() * &jc - &jc * xi.matrix()).norm();
                let r = split.max(expo).max(comm).max(j.residual());
                worst.update(r, || json!({ "g": matrix_value(g.matrix()) }));
            }
            Ok(worst.outcome())
        },
    );

    r.run(
        "lie.unitary_structure_from",
        "the sign of the spectrum of an invertible skew matrix is a commuting unitary structure",
        1e-10,
        |rng| {
            let mut worst: f64 = 0.0;
            for m in [2, 4, 6] {
                let xi = sample::random_so_algebra(m, 1.0, rng);
                let j = unitary_structure_from(&xi, tol)?;
                let jc = lie::complexify(j.matrix());
                worst = worst.max(j.residual()).max((xi.matrix() * &jc - &jc * xi.matrix()).norm());
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run(
        "lie.random_unitary_structure",
        "seeded random unitary structures square to -1 and are orthogonal",
        1e-12,
        |rng| {
            let mut worst: f64 = 0.0;
            for m in [2, 4, 8] {
                worst = worst.max(lie::random_unitary_structure(m, rng.random())?.residual());
            }
            Ok(Outcome::residual(worst))
        },
    );
}

/// Residuals of the `SO_m` section at one input.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SonResiduals {
    /// `‖β(1)β(0)⁻¹ - h‖`.
    pub projection: f64,
    /// Largest `‖β(t)ᵀβ(t) - I‖` over 64 samples.
    pub orthogonality: f64,
    /// Fourier tail of `exp(-tξ)·exp(t log_0 ε(h))·exp(tπJ_h)` beyond the
    /// degree bound, sampled independently of the closed form of `γ`.
    pub tail: f64,
    pub degree_bound: usize,
}

pub fn son_section_residuals(case: &SoSectionCase, config: TruncationConfig) -> Result<SonResiduals> {
    let tol = config.tol;
    let field = ProjectionJField::new(&case.g, case.r, tol)?;
    let sec = paths::section_son(&case.h, case.r, &case.g, &field, config)?;
    let projection = (sec.path.project().matrix() - case.h.matrix()).norm();
    let orthogonality =
        (0..64).map(|m| group_residual(&sec.path.evaluate(m as f64 / 64.0), Group::SO)).fold(0.0, f64::max);
    let cfg = TruncationConfig { dim: case.h.n(), ..config };
    let xi = sec.path.xi().clone();
    let mut samples = Vec::new();
    for m in 0..cfg.default_samples() {
        let t = m as f64 / cfg.default_samples() as f64;
        samples.push(exp_matrix(&xi, -t, tol)?.matrix() * sec.defining_formula(t, tol)?);
    }
    let sampled = FourierLoop::from_samples(cfg, &samples)?;
    let tail = (sampled.value.fourier_tail_norm(sec.degree_bound).powi(2) + sampled.out_of_window.powi(2)).sqrt();
    Ok(SonResiduals { projection, orthogonality, tail, degree_bound: sec.degree_bound })
}

/// Fourier tail of `η_{-ξ₁}η_{ξ₂}` beyond its derived degree bound.
pub fn quotient_tail(xi1: &AlgebraElement, xi2: &AlgebraElement, config: TruncationConfig) -> Result<(f64, usize)> {
    let a = PolynomialPath::eta(xi1.clone(), Group::U, config)?;
    let b = PolynomialPath::eta(xi2.clone(), Group::U, config)?;
    let q = paths::fibre_quotient(&a, &b, config.tol)?;
    let tail = (q.value.fourier_tail_norm(q.degree_bound).powi(2) + q.out_of_window.powi(2)).sqrt();
    Ok((tail, q.degree_bound))
}

fn paths_suite(r: &mut Runner) {
    let cfg = r.cfg.clone();
    let tol = cfg.tol;

    r.run("paths.quotient_polynomial", "exp(-t xi1) exp(t xi2) is a polynomial loop of the derived degree when exp(xi1) = exp(xi2)", 1e-8, |rng| {
        let config = TruncationConfig::with_tol(cfg.modes, 3, 1e-8)?;
        let mut worst = Worst::default();
        for _ in 0..20 {
            let (x1, x2) = scenarios::quotient_pair(rng);
            let bound = paths::eta_quotient_degree(&x1, &x2, 1e-8)?;
            if bound >= cfg.modes {
                return Ok(Outcome::Skip(format!("derived degree bound {bound} is not below N = {}", cfg.modes)));
            }
            let (tail, _) = quotient_tail(&x1, &x2, config)?;
            worst.update(tail, || json!({ "xi1": matrix_value(x1.matrix()), "xi2": matrix_value(x2.matrix()), "degree_bound": bound }));
        }
        Ok(worst.outcome())
    });

    r.run("paths.section_un", "the U_n section projects to its input and stays in U_n", tol, |rng| {
        let config = loop_config(&cfg, cfg.n)?;
        let mut worst = Worst::default();
        for _ in 0..10 {
            let g = sample::random_unitary(cfg.n, rng);
            let p = paths::section_un(&g, rng.random_range(-PI..PI), config)?;
            let r = (p.project().matrix() - g.matrix()).norm().max(p.residuals(64).max());
            worst.update(r, || json!({ "g": matrix_value(g.matrix()) }));
        }
        Ok(worst.outcome())
    });

    r.run(
        "paths.section_sun",
        "the SU_n section projects to its input, stays in SU_n and has a polynomial loop part",
        tol,
        |rng| {
            let config = loop_config(&cfg, cfg.n)?;
            let mut worst = Worst::default();
            for _ in 0..10 {
                let g = sample::random_special_unitary(cfg.n, rng);
                let p = paths::section_sun(&g, rng.random_range(-PI..PI), None, config)?;
                let r = (p.project().matrix() - g.matrix()).norm().max(p.residuals(64).max());
                worst.update(r, || json!({ "g": matrix_value(g.matrix()) }));
            }
            Ok(worst.outcome())
        },
    );

    r.run(
        "paths.section_son",
        "the SO_m section projects to h, stays orthogonal and its loop part is polynomial",
        1e-7,
        |rng| {
            let config = TruncationConfig::with_tol(cfg.modes, 4, tol)?;
            let mut worst = SonResiduals::default();
            for _ in 0..20 {
                let case = scenarios::so_section_case(4, 0.1, 0.05, rng);
                let res = son_section_residuals(&case, config)?;
                worst.projection = worst.projection.max(res.projection);
                worst.orthogonality = worst.orthogonality.max(res.orthogonality);
                worst.tail = worst.tail.max(res.tail);
            }
            let residual = worst.projection.max(worst.orthogonality).max(worst.tail);
            Ok(Outcome::with_witness(residual, serde_json::to_value(worst)?))
        },
    );

    r.run(
        "paths.left_action",
        "left translation acts pointwise on the path and by conjugation on its projection",
        1e-10,
        |rng| {
            let config = loop_config(&cfg, cfg.n)?;
            let g = sample::random_unitary(cfg.n, rng);
            let h = sample::random_unitary(cfg.n, rng);
            let p = paths::section_un(&g, 0.0, config)?;
            let moved = p.act_left(&h)?;
            let mut worst = (moved.project().matrix() - h.matrix() * g.matrix() * h.matrix().adjoint()).norm();
            for m in 0..16 {
                let t = m as f64 / 16.0;
                worst = worst.max((moved.evaluate(t) - h.matrix() * p.evaluate(t)).norm());
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run("paths.fibre_quotient_recovers_loop", "the fibre quotient of alpha and alpha*delta is delta", 1e-9, |rng| {
        let config = loop_config(&cfg, cfg.n)?;
        let g = sample::random_unitary(cfg.n, rng);
        let p = paths::section_un(&g, 0.0, config)?;
        let u = sample::random_complex_vector(cfg.n, rng).normalize();
        let uu = &u * u.adjoint();
        let id = CMatrix::identity(cfg.n, cfg.n);
        let delta = FourierLoop::from_modes(config, cfg.n, [(0, &id - &uu), (1, uu)])?;
        let moved = p.right_mul_loop(&delta, 1)?.value;
        let q = paths::fibre_quotient(&p, &moved, tol)?;
        Ok(Outcome::residual(max_diff(&q.value, &delta)? + q.out_of_window))
    });
}

fn holonomy_suite(r: &mut Runner) {
    let cfg = r.cfg.clone();
    let table = (cfg.modes / 4).min(4);
    // Parallel sections are smooth but not band-limited; they are resolved
    // on a finer window than the one that bounds the connection and table.
    let fine = HOLONOMY_RESOLUTION.max(2 * cfg.modes);
    let fine_config = move |dim: usize| TruncationConfig::with_tol(fine, dim, cfg.tol);
    let connection = |rng: &mut SeededRng, scale: f64| -> Result<LoopConnection> {
        let c = loop_config(&cfg, cfg.n)?;
        let form = scenarios::smooth_connection_form(c, 2, scale, rng)?.rewindow(fine).value;
        LoopConnection::new(form, Field::Complex, cfg.steps)
    };
    let guard = move || -> Option<Outcome> {
        (table < 1).then(|| Outcome::Skip(format!("N = {} leaves no room for a mode table", cfg.modes)))
    };

    r.run(
        "holonomy.transport_unitarity",
        "transport over one period stays unitary for |A| up to 10 at 10^4 steps",
        1e-9,
        |rng| {
            let c = loop_config(&cfg, cfg.n)?;
            let form = scenarios::smooth_connection_form(c, 2, 1.0, rng)?;
            let peak = (0..64).map(|m| form.evaluate(m as f64 / 64.0).norm()).fold(0.0, f64::max);
            let form = form.scale(C64::new(10.0 / peak, 0.0));
            let conn = LoopConnection::new(form, Field::Complex, 10_000)?;
            Ok(Outcome::residual(holonomy::transport_drift(&conn)))
        },
    );

    r.run(
        "holonomy.transport_cocycle",
        "transport from 0 to 1 equals transport from t to 1 after transport from 0 to t",
        10.0 * cfg.tol,
        |rng| {
            let conn = connection(rng, 1.0)?;
            let whole = holonomy::parallel_transport(&conn, 0.0, 1.0);
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let t: f64 = rng.random();
                let split =
                    holonomy::parallel_transport(&conn, t, 1.0).mul(&holonomy::parallel_transport(&conn, 0.0, t))?;
                worst = worst.max((whole.matrix() - split.matrix()).norm());
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run(
        "holonomy.constant_closed_form",
        "transport of a constant connection xi is exp(-(t1 - t0) xi)",
        cfg.tol,
        |rng| {
            let xi = sample::random_skew_hermitian(cfg.n, 2.0, rng);
            let conn =
                LoopConnection::constant(xi.matrix(), Field::Complex, fine_config(cfg.n)?)?.with_steps(cfg.steps);
            let (t0, t1): (f64, f64) = (rng.random(), rng.random());
            let p = holonomy::parallel_transport(&conn, t0, t1);
            Ok(Outcome::residual((p.matrix() - exp_matrix(&xi, t0 - t1, cfg.tol)?.matrix()).norm()))
        },
    );

    r.run("holonomy.gauge_conjugation", "a polynomial gauge change u conjugates the holonomy by u(0)", 1e-8, |rng| {
        let conn = connection(rng, 0.7)?;
        let c = fine_config(cfg.n)?;
        let w = sample::random_unitary(cfg.n, rng);
        let e0 = w.matrix().column(0).into_owned();
        let p0 = &e0 * e0.adjoint();
        let p1 = CMatrix::identity(cfg.n, cfg.n) - &p0;
        let u = FourierLoop::from_modes(c, cfg.n, [(1, p0), (0, p1)])?;
        let gauged = conn.gauge(&u)?;
        let u0 = u.evaluate(0.0);
        let expect = &u0 * holonomy::holonomy(&conn).matrix() * u0.adjoint();
        Ok(Outcome::residual((holonomy::holonomy(&gauged.value).matrix() - expect).norm() + gauged.overflow.sqrt()))
    });

    r.run("holonomy.eigen_table", "D(z^k v_j) = i(s_j + 2 pi k) z^k v_j across the mode table", cfg.tol, |rng| {
        if let Some(skip) = guard() {
            return Ok(skip);
        }
        let conn = connection(rng, 0.6)?;
        let basis = holonomy::pol_fibre_basis(&conn, table, fine_config(cfg.n)?)?;
        let mut worst: f64 = 0.0;
        for (j, k) in basis.modes() {
            worst = worst.max(basis.eigen_residual(&conn, j, k)?);
        }
        Ok(Outcome::residual(worst))
    });

    r.run(
        "holonomy.cos_two_routes",
        "cos D scales z^k v_j by cosh(s_j + 2 pi k), matching the cosine series of D",
        1e-8,
        |rng| {
            if let Some(skip) = guard() {
                return Ok(skip);
            }
            let conn = connection(rng, 0.6)?;
            let basis = holonomy::pol_fibre_basis(&conn, table, fine_config(cfg.n)?)?;
            let mut worst: f64 = 0.0;
            let kmax = (table as i64).min(3);
            for j in 0..basis.rank() {
                for k in -kmax..=kmax {
                    let mut coords = holonomy::BasisCoords::new();
                    coords.insert((j, k), C64::new(1.0, 0.0));
                    let exact = holonomy::cos_d(&basis, &coords)?[&(j, k)];
                    let series = holonomy::cos_series_factor(&conn, &basis, j, k)?;
                    worst = worst.max((exact - series).norm() / exact.norm());
                }
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run(
        "holonomy.cosh_sandwich",
        "cosh(s) >= cosh(x + s)/e^|x| >= min(e^s, e^-s)/2 at every tabulated mode",
        0.0,
        |rng| {
            if let Some(skip) = guard() {
                return Ok(skip);
            }
            let conn = connection(rng, 0.6)?;
            let basis = holonomy::pol_fibre_basis(&conn, table, fine_config(cfg.n)?)?;
            Ok(Outcome::residual(holonomy::cosh_sandwich_violation(&basis).max(0.0)))
        },
    );

    r.run(
        "holonomy.chain_rule",
        "D'(alpha o sigma) = ((D alpha) o sigma) sigma' for sigma = t + eps sin(2 pi t)/2 pi",
        1e-6,
        |rng| {
            let conn = connection(rng, 0.6)?;
            let alpha = scenarios::random_polynomial_loop(fine_config(cfg.n)?, 1, 3, rng)?;
            let mut worst: f64 = 0.0;
            for eps in [0.05, 0.1] {
                let phi = scenarios::sine_reparametrization(eps, fine)?;
                worst = worst.max(holonomy::chain_rule_residual(&conn, &alpha, &phi, 4)?);
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run(
        "holonomy.rotation_preserves_fibre",
        "rotating the circle maps polynomial sections to polynomial sections",
        cfg.tol,
        |rng| {
            if let Some(skip) = guard() {
                return Ok(skip);
            }
            let conn = connection(rng, 0.6)?;
            let c = fine_config(cfg.n)?;
            let basis = holonomy::pol_fibre_basis(&conn, table, c)?;
            let top = basis.mode_function(0, table as i64).value;
            let (conn2, moved) =
                holonomy::reparametrize(&conn, &top, &scenarios::rotation_reparametrization(rng.random(), fine)?, 4)?;
            let basis2 = holonomy::pol_fibre_basis(&conn2, table, c)?;
            Ok(Outcome::residual(basis2.project(&moved)?.1))
        },
    );

    r.run(
        "holonomy.reparametrization_breaks_fibre",
        "a generic reparametrization moves a polynomial section out of the polynomial fibre",
        0.0,
        |rng| {
            if let Some(skip) = guard() {
                return Ok(skip);
            }
            let conn = connection(rng, 0.6)?;
            let c = fine_config(cfg.n)?;
            let basis = holonomy::pol_fibre_basis(&conn, table, c)?;
            let top = basis.mode_function(0, table as i64).value;
            let (conn2, moved) =
                holonomy::reparametrize(&conn, &top, &scenarios::sine_reparametrization(0.1, fine)?, 4)?;
            let basis2 = holonomy::pol_fibre_basis(&conn2, table, c)?;
            Ok(Outcome::AtLeast { value: basis2.project(&moved)?.1, threshold: 1e-3, witness: None })
        },
    );

    r.run(
        "holonomy.distinct_connections",
        "connections differing by a non-polynomial reparametrization have different polynomial fibres",
        0.0,
        |rng| {
            if let Some(skip) = guard() {
                return Ok(skip);
            }
            let conn = connection(rng, 0.6)?;
            let c = fine_config(cfg.n)?;
            let phi = scenarios::sine_reparametrization(0.1, fine)?;
            let (conn2, _) = holonomy::reparametrize(&conn, &FourierLoop::zero(c, 1), &phi, 4)?;
            let a = holonomy::pol_fibre_basis(&conn, table, c)?;
            let b = holonomy::pol_fibre_basis(&conn2, table, c)?;
            let gap = b
                .modes()
                .map(|(j, k)| a.project(&b.mode_function(j, k).value).map(|p| p.1))
                .collect::<Result<Vec<_>>>()?;
            // Projection noise sits near 1e-9; three orders above it counts as distinct.
            Ok(Outcome::AtLeast { value: gap.into_iter().fold(0.0, f64::max), threshold: 1e-6, witness: None })
        },
    );

    r.run(
        "holonomy.direct_sum",
        "the fibre basis of a block-diagonal connection is the union of the blockwise bases",
        cfg.tol,
        |rng| {
            if let Some(skip) = guard() {
                return Ok(skip);
            }
            let c1 = fine_config(1)?;
            let c2 = fine_config(cfg.n)?;
            let a =
                LoopConnection::new(scenarios::smooth_connection_form(c1, 2, 0.5, rng)?, Field::Complex, cfg.steps)?;
            let b =
                LoopConnection::new(scenarios::smooth_connection_form(c2, 2, 0.5, rng)?, Field::Complex, cfg.steps)?;
            let sum = a.direct_sum(&b)?;
            let whole = holonomy::pol_fibre_basis(&sum, table, fine_config(cfg.n + 1)?)?;
            let mut parts = holonomy::pol_fibre_basis(&a, table, c1)?.exponents;
            parts.extend(holonomy::pol_fibre_basis(&b, table, c2)?.exponents);
            parts.sort_by(f64::total_cmp);
            let mut got = whole.exponents.clone();
            got.sort_by(f64::total_cmp);
            let worst = parts.iter().zip(&got).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            Ok(Outcome::residual(worst))
        },
    );

    r.run(
        "holonomy.subbundle_counterexample",
        "twisting by e^{2 pi i sin(2 pi t)} moves every z^k with |k| <= N out of the polynomial loops",
        0.0,
        |_| {
            // The tail of e^{2 pi i sin} beyond mode w is about |J_{w+1}(2 pi)|,
            // which drops below any useful tolerance past w = 16.
            let w = cfg.modes.min(SUBBUNDLE_WINDOW);
            let rep = holonomy::subbundle_counterexample_check(scenarios::sine_twist, w, w, cfg.tol)?;
            Ok(Outcome::AtLeast { value: rep.min_tail, threshold: cfg.tol, witness: None })
        },
    );

    r.run("holonomy.subbundle_controls", "zero and integer linear twists keep some z^k polynomial", 0.0, |_| {
        let w = cfg.modes.min(SUBBUNDLE_WINDOW);
        let zero = holonomy::subbundle_counterexample_check(|_| 0.0, w, w, cfg.tol)?;
        let linear = holonomy::subbundle_counterexample_check(|t| 2.0 * t, w, w, cfg.tol)?;
        Ok(Outcome::holds(
            zero.polynomial_preserved && linear.polynomial_preserved,
            format!("min tails {:.1e}, {:.1e}", zero.min_tail, linear.min_tail),
        ))
    });
}

fn weight_families(n: usize) -> Result<Vec<(&'static str, WeightSequence)>> {
    Ok(vec![
        ("geometric(2)", WeightSequence::geometric(2.0, 1.0, n)?),
        ("geometric(e^2pi)", WeightSequence::geometric(TAU.exp(), 1.0, n)?),
        ("cosh^-2", WeightSequence::cosh_squared(n)),
    ])
}

fn weights_suite(r: &mut Runner) {
    let cfg = r.cfg.clone();
    let n = cfg.modes;
    let qmax = 8.min(n as i64);

    r.run(
        "weights.z_norm_svd",
        "sqrt(sup a_p/a_{p+q}) equals the top singular value of the weighted shift",
        1e-12,
        |_| {
            let mut worst: f64 = 0.0;
            for (_, a) in weight_families(n)? {
                for q in -qmax..=qmax {
                    worst = worst.max(weights::z_norm_svd_gap(&a, q));
                }
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run(
        "weights.diamond_pairing",
        "pairing b with the conjugate of c diamond gamma_a gives the weighted inner product",
        1e-12,
        |rng| {
            let a = WeightSequence::geometric(2.0, 1.0, n)?;
            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let b = DualVector::random(n, rng);
                let c = DualVector::random(n, rng);
                let via = b.pair(&weights::diamond(&c.loop_conjugate(), &a)?)?;
                let direct = weights::inner_product(&b, &c, &a)?;
                worst = worst.max((via - direct).norm() / (1.0 + direct.norm()));
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run("weights.invariance", "the weighted form is invariant under rotation and the involution", 1e-12, |rng| {
        let mut worst: f64 = 0.0;
        for (_, a) in weight_families(n)? {
            let b = DualVector::random(n, rng);
            let c = DualVector::random(n, rng);
            let l = sample::unit_complex(rng);
            let base = weights::inner_product(&b, &c, &a)?;
            let scale = 1.0 + weights::weighted_norm(&b, &a)? * weights::weighted_norm(&c, &a)?;
            let rot = weights::inner_product(&b.rotate(l)?, &c.rotate(l)?, &a)?;
            let inv = weights::inner_product(&b.involute(), &c.involute(), &a)?;
            worst = worst.max((rot - base).norm() / scale).max((inv - base).norm() / scale);
        }
        Ok(Outcome::residual(worst))
    });

    r.run("weights.polarisation", "J squares to -1 and is an isometry for every weight", 1e-12, |rng| {
        let mut worst: f64 = 0.0;
        for (_, a) in weight_families(n)? {
            let x = DualVector::random(n, rng);
            let jj = weights::polarisation_j(&weights::polarisation_j(&x)).add(&x)?;
            let n0 = weights::weighted_norm(&x, &a)?;
            let n1 = weights::weighted_norm(&weights::polarisation_j(&x), &a)?;
            worst = worst.max(jj.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)).max((n0 - n1).abs() / n0);
        }
        Ok(Outcome::residual(worst))
    });

    r.run("weights.commutator_rank", "[A, J] has rank at most 2 deg(A) dim for a polynomial loop A", 0.0, |rng| {
        let a = WeightSequence::geometric(2.0, 1.0, n)?;
        let c = loop_config(&cfg, cfg.n)?;
        let u = sample::random_unitary(cfg.n, rng);
        let op = FourierLoop::monomial(c, 2, u.matrix().clone())?;
        let rep = weights::commutator_hs_norm(&op, &a)?;
        let bound = 2 * 2 * cfg.n;
        Ok(Outcome::with_note(
            rep.rank.saturating_sub(bound) as f64,
            format!("rank {} (bound {bound}), HS norm {:.6e}", rep.rank, rep.hs_norm),
        ))
    });

    r.run("weights.zeta_endpoints", "zeta_0 is the shift and zeta_1 is T z T^-1", 1e-12, |_| {
        let mut worst: f64 = 0.0;
        for (_, a) in weight_families(n)? {
            let z0 = weights::zeta_homotopy(&a, 0.0);
            let shift = DMatrix::from_fn(2 * n + 1, 2 * n + 1, |i, j| if j == i + 1 { 1.0 } else { 0.0 });
            let z1 = weights::zeta_homotopy(&a, 1.0);
            let t = weights::conjugated_shift(&a);
            let rel = (&z1 - &t).amax() / t.amax();
            worst = worst.max((z0 - shift).amax()).max(rel);
        }
        Ok(Outcome::residual(worst))
    });

    r.run("weights.zeta_invertible", "zeta_t is invertible between the interior modes for sampled t", 0.0, |_| {
        let a = WeightSequence::geometric(2.0, 1.0, n)?;
        let smallest = (0..=10)
            .map(|i| weights::zeta_interior(&a, i as f64 / 10.0).singular_values().min())
            .fold(f64::INFINITY, f64::min);
        Ok(Outcome::AtLeast { value: smallest, threshold: f64::MIN_POSITIVE, witness: None })
    });

    r.run(
        "weights.growth_witness",
        "|z^q| grows strictly in q for rapidly decreasing weights and equals 2^{q/2} for a_p = 2^-|p|",
        1e-15,
        |_| {
            let mut worst: f64 = 0.0;
            for (_, a) in weight_families(n)? {
                let table = weights::unbounded_growth_witness(&a, qmax as usize)?;
                if !weights::strictly_increasing(&table) {
                    worst = worst.max(1.0);
                }
            }
            let a = WeightSequence::geometric(2.0, 1.0, n)?;
            for (q, norm) in weights::unbounded_growth_witness(&a, qmax as usize)? {
                let expect = 2f64.powf(q as f64 / 2.0);
                worst = worst.max((norm - expect).abs() / expect);
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run("weights.cone", "s a + t b is a weight whose ratio bound is at most the larger of the inputs", 0.0, |rng| {
        let a = WeightSequence::geometric(2.0, 1.0, n)?;
        let b = WeightSequence::geometric(3.0, 1.0, n)?;
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let (s, t) = (rng.random_range(0.1..5.0), rng.random_range(0.1..5.0));
            let c = weights::cone_combine(&a, &b, s, t)?;
            let bound = weights::z_operator_norm(&a, 1).max(weights::z_operator_norm(&b, 1));
            worst = worst.max(weights::z_operator_norm(&c, 1) - bound);
        }
        Ok(Outcome::residual(worst.max(0.0)))
    });

    r.run("weights.equivalence", "geometric weights are equivalent exactly when their ratios agree", 0.0, |_| {
        let a = WeightSequence::geometric(2.0, 1.0, n)?;
        let b = WeightSequence::geometric(2.0, 3.0, n)?;
        let c = WeightSequence::geometric(4.0, 1.0, n)?;
        let ab = weights::equivalence_check(&a, &b)?;
        let ac = weights::equivalence_check(&a, &c)?;
        Ok(Outcome::holds(ab.equivalent && !ac.equivalent, format!("constants ({:.6}, {:.6})", ab.lower, ab.upper)))
    });

    r.run("weights.cone_bijection", "a diagonal positive symmetric form is recovered from its weights", 0.0, |_| {
        let mut worst: f64 = 0.0;
        for (_, a) in weight_families(n)? {
            let back = WeightSequence::from_gram(&a.gram_matrix(), 0.0)?;
            worst = worst.max(back.values().iter().zip(a.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
        }
        Ok(Outcome::residual(worst))
    });
}

fn fock_space(cfg: &VerifyConfig, window: usize) -> Result<FockSpace> {
    Ok(FockSpace::new(ModeSpace::new(cfg.n, window, None)?, cfg.particle_cap))
}

fn fock_suite(r: &mut Runner) {
    let cfg = r.cfg.clone();

    r.run(
        "fock.car_basis_pairs",
        "canonical anticommutation relations hold for every pair of basis modes below the particle cap",
        1e-12,
        |_| {
            // Every basis pair on every state is quadratic in the mode count.
            let f = fock_space(&cfg, cfg.fock_window.min(3))?;
            let mut worst: f64 = 0.0;
            for a in 0..f.modes.dim() {
                for b in 0..f.modes.dim() {
                    worst = worst.max(f.car_check(&f.modes.basis_vector(a), &f.modes.basis_vector(b)).max());
                }
            }
            Ok(Outcome::with_note(worst, format!("window {}", f.modes.window())))
        },
    );

    r.run(
        "fock.car_random",
        "canonical anticommutation relations hold for random one-particle vectors",
        1e-12,
        |rng| {
            let f = fock_space(&cfg, cfg.fock_window)?;
            let u = sample::random_complex_vector(f.modes.dim(), rng);
            let v = sample::random_complex_vector(f.modes.dim(), rng);
            let scale = f.modes.norm(&u) * f.modes.norm(&v);
            Ok(Outcome::residual(f.car_check(&u, &v).max() / scale))
        },
    );

    r.run("fock.clifford_square", "pi(v)^2 = <v, v> on a real spanning set", 1e-12, |_| {
        let f = fock_space(&cfg, cfg.fock_window.min(3))?;
        let mut worst: f64 = 0.0;
        for m in 0..f.modes.dim() {
            let e = f.modes.basis_vector(m);
            worst = worst.max(f.clifford_square_residual(&e));
            worst = worst.max(f.clifford_square_residual(&(e * C64::new(0.0, 1.0))));
        }
        Ok(Outcome::residual(worst))
    });

    r.run("fock.grading", "one Clifford multiplication reverses parity and two preserve it", 0.0, |rng| {
        let f = fock_space(&cfg, cfg.fock_window)?;
        let u = sample::random_complex_vector(f.modes.dim(), rng);
        let v = sample::random_complex_vector(f.modes.dim(), rng);
        let psi = FockVector::wedge(&[0, 1])?.add(&FockVector::vacuum());
        let once = f.clifford(&u, &psi).value;
        let twice = f.clifford(&v, &once).value;
        Ok(Outcome::holds(once.has_parity(Parity::Odd) && twice.has_parity(Parity::Even), "parity scan".into()))
    });

    r.run("fock.polarisation_rank", "J_C - J_R has rank n on L^2(S^1, R^2n) for every window", 0.0, |_| {
        let mut worst: usize = 0;
        let mut ranks = Vec::new();
        for half in std::collections::BTreeSet::from([1, 2, cfg.n]) {
            for k in std::collections::BTreeSet::from([1, 3, cfg.fock_window]) {
                let d = polarisation_compare(
                    &PolarisingOperator::complex(2 * half, k),
                    &PolarisingOperator::standard(2 * half, k)?,
                )?;
                worst = worst.max(d.rank.abs_diff(half));
                ranks.push(format!("2n={} K={k}: {}", 2 * half, d.rank));
            }
        }
        Ok(Outcome::with_note(worst as f64, ranks.join("; ")))
    });

    r.run(
        "fock.odd_fibre_not_polarising",
        "on an odd-dimensional fibre the standard candidate fails J^2 = -1",
        0.0,
        |_| {
            let candidate = PolarisingOperator::standard_candidate(3, cfg.fock_window);
            let (square, _) = candidate.invariant_residuals();
            let rejected = matches!(PolarisingOperator::standard(3, cfg.fock_window), Err(Error::NotPolarising(_)));
            Ok(Outcome::holds(rejected && square > 0.5, format!("|J^2 + I| = {square}")))
        },
    );

    r.run("fock.rotation_homomorphism", "U_lambda U_mu = U_{lambda mu}", 1e-12, |rng| {
        let f = fock_space(&cfg, cfg.fock_window)?;
        let psi = random_fock_state(&f, rng);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let (l, m) = (sample::unit_complex(rng), sample::unit_complex(rng));
            let lhs = f.implement_rotation(l)?.apply(&f.implement_rotation(m)?.apply(&psi));
            let rhs = f.implement_rotation(l * m)?.apply(&psi);
            worst = worst.max(lhs.sub(&rhs).norm(&f.modes) / psi.norm(&f.modes));
        }
        Ok(Outcome::residual(worst))
    });

    r.run("fock.rotation_intertwines", "U_lambda pi(v) U_lambda^-1 = pi(R_lambda v)", 1e-12, |rng| {
        let f = fock_space(&cfg, cfg.fock_window)?;
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let l = sample::unit_complex(rng);
            let u = f.implement_rotation(l)?;
            let v = sample::random_complex_vector(f.modes.dim(), rng);
            let psi = random_fock_state(&f, rng);
            let lhs = u.apply(&f.clifford(&v, &u.inverse().apply(&psi)).value);
            let rhs = f.clifford(&f.modes.rotate(&v, l)?, &psi).value;
            worst = worst.max(lhs.sub(&rhs).norm(&f.modes) / (psi.norm(&f.modes) * f.modes.norm(&v)));
        }
        Ok(Outcome::residual(worst))
    });

    r.run(
        "fock.extension_linear_bounded",
        "the finite-rank Clifford extension is linear and bounded by sum |f_i| |xi_i|",
        1e-12,
        |rng| {
            let f = fock_space(&cfg, cfg.fock_window)?;
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let mut terms = Vec::new();
                let mut bound = 0.0;
                for _ in 0..3 {
                    let func: Vec<DualVector> = (0..cfg.n).map(|_| DualVector::random(cfg.fock_window, rng)).collect();
                    let xi = random_fock_state(&f, rng);
                    bound += f.modes.norm(&f.modes.riesz(&func)?) * xi.norm(&f.modes);
                    terms.push((func, xi));
                }
                let whole = f.finite_rank_clifford_extension(&terms)?.value;
                let norm = whole.norm(&f.modes);
                worst = worst.max((norm - bound).max(0.0) / bound);
                let (func, xi) = terms[0].clone();
                let half = C64::new(0.5, 0.0);
                terms[0] = (func.clone(), xi.scale(half));
                terms.push((func, xi.scale(half)));
                let split = f.finite_rank_clifford_extension(&terms)?.value;
                worst = worst.max(split.sub(&whole).norm(&f.modes) / norm);
            }
            Ok(Outcome::residual(worst))
        },
    );
}

/// A few random basis states at least one particle below the cap.
fn random_fock_state<R: Rng>(f: &FockSpace, rng: &mut R) -> FockVector {
    let dim = f.modes.dim();
    let mut out = FockVector::zero();
    for _ in 0..4 {
        let size = rng.random_range(0..f.cap.min(dim));
        let modes = rand::seq::index::sample(rng, dim, size).into_vec();
        out = out.add(&FockVector::wedge(&modes).expect("distinct modes").scale(sample::complex_gaussian(rng)));
    }
    out
}

fn dirac_suite(r: &mut Runner) {
    let cfg = r.cfg.clone();
    let dcfg = || -> Result<DiracConfig> { Ok(DiracConfig::new(fock_space(&cfg, cfg.fock_window)?)) };

    r.run("dirac.constant_vanishes", "the Dirac operator kills constant sections", 0.0, |rng| {
        let d = dcfg()?;
        let x = dirac::random_point(&d, rng);
        let s = PolynomialSection::constant(FockVector::vacuum());
        Ok(Outcome::residual(dirac::dirac(&s, &d, &x)?.value.norm(&d.space.modes)))
    });

    r.run("dirac.grading_flip", "the Dirac operator maps even sections to odd spinors", 0.0, |rng| {
        let d = dcfg()?;
        let mut bad = 0;
        for _ in 0..50 {
            let s = dirac::random_even_section(&d, 3, 4, rng);
            let x = dirac::random_point(&d, rng);
            if !dirac::dirac(&s, &d, &x)?.value.has_parity(Parity::Odd) {
                bad += 1;
            }
        }
        Ok(Outcome::with_note(bad as f64, "sections with mixed output parity".into()))
    });

    r.run(
        "dirac.two_routes",
        "contraction through the finite-rank extension equals the termwise Clifford sum",
        1e-12,
        |rng| {
            let d = dcfg()?;
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let s = dirac::random_even_section(&d, 3, 4, rng);
                let x = dirac::random_point(&d, rng);
                let a = dirac::dirac(&s, &d, &x)?.value;
                let b = dirac::dirac_naive(&s, &d, &x)?.value;
                worst = worst.max(a.sub(&b).norm(&d.space.modes) / (1.0 + a.norm(&d.space.modes)));
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run("dirac.equivariance", "U_lambda (D s)(x) = (D (lambda s))(lambda x)", 1e-10, |rng| {
        let d = dcfg()?;
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let s = dirac::random_even_section(&d, 2, 3, rng);
            let x = dirac::random_point(&d, rng);
            let l = sample::unit_complex(rng);
            let scale = 1.0 + dirac::dirac(&s, &d, &x)?.value.norm(&d.space.modes);
            worst = worst.max(dirac::equivariance_check(&s, &d, l, &x)? / scale);
        }
        Ok(Outcome::residual(worst))
    });

    r.run(
        "dirac.square_single_direction",
        "on sections depending on one coordinate the Dirac square is the second derivative",
        1e-12,
        |rng| {
            let d = dcfg()?;
            let x = dirac::random_point(&d, rng);
            let psi = FockVector::wedge(&[0])?.add(&FockVector::wedge(&[1, 2])?);
            let mut worst: f64 = 0.0;
            for dir in [dirac::Coord::re(1), dirac::Coord::im(d.space.modes.dim() - 1)] {
                for deg in 1..=3 {
                    let s = PolynomialSection::monomial(&[(dir, deg)], psi.clone())?;
                    let twice = dirac::dirac_section(&dirac::dirac_section(&s, &d)?.value, &d)?;
                    let expect = s.derivative(dir).derivative(dir).evaluate(&x);
                    let got = twice.value.evaluate(&x);
                    worst = worst.max(got.sub(&expect).norm(&d.space.modes) / (1.0 + expect.norm(&d.space.modes)));
                }
            }
            Ok(Outcome::residual(worst))
        },
    );

    r.run("dirac.linearity", "the Dirac operator is linear in the section", 1e-12, |rng| {
        let d = dcfg()?;
        let s1 = dirac::random_even_section(&d, 3, 3, rng);
        let s2 = dirac::random_even_section(&d, 3, 3, rng);
        let x = dirac::random_point(&d, rng);
        let k = sample::complex_gaussian(rng);
        let lhs = dirac::dirac(&s1.add(&s2.scale(k)), &d, &x)?.value;
        let rhs = dirac::dirac(&s1, &d, &x)?.value.add(&dirac::dirac(&s2, &d, &x)?.value.scale(k));
        Ok(Outcome::residual(lhs.sub(&rhs).norm(&d.space.modes) / (1.0 + rhs.norm(&d.space.modes))))
    });
}

/// One-line summary of a report.
pub fn summary(report: &SuiteReport) -> String {
    let count = |s: Status| report.checks.iter().filter(|c| c.status == s).count();
    json!({
        "suite": report.suite,
        "pass": count(Status::Pass),
        "fail": count(Status::Fail),
        "skip": count(Status::Skip),
    })
    .to_string()
}
