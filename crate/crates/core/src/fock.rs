//! Truncated fermionic Fock space over a finite window of loop modes.
//!
//! One-particle modes are `(j, k)` with component `j < n` and `|k| ≤ K`,
//! numbered `j·(2K+1) + (k+K)`. Basis states of `Λ•` are sets of modes,
//! stored as `u64` bitmasks, so at most 64 modes fit in a space. The wedge
//! `e_{m₁} ∧ ⋯ ∧ e_{m_r}` is always taken in increasing mode order.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::UnitaryStructure;
use crate::loops::{check_unit, CMatrix, Truncated, C64};
use crate::weights::{DualVector, WeightSequence};

pub const DEFAULT_PARTICLE_CAP: usize = 8;
pub const MAX_MODES: usize = 64;

/// One-particle vectors are coefficient vectors in the mode basis `e_m`.
pub type OneParticle = DVector<C64>;

#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpace {
    components: usize,
    window: usize,
    weights: Vec<f64>,
}

impl ModeSpace {
    /// Modes with `⟨e_(j,k), e_(j,k)⟩ = a_k`, or 1 without weights.
    pub fn new(components: usize, window: usize, weights: Option<&WeightSequence>) -> Result<Self> {
        let dim = components * (2 * window + 1);
        if components == 0 || dim > MAX_MODES {
            return Err(Error::InvalidConfig(format!("{dim} modes; expected between 1 and {MAX_MODES}")));
        }
        if let Some(a) = weights {
            if a.max_mode() < window {
                return Err(Error::WindowMismatch(a.max_mode(), window));
            }
        }
        let w = window as i64;
        let weights = (0..components).flat_map(|_| (-w..=w).map(|k| weights.map_or(1.0, |a| a.at(k)))).collect();
        Ok(Self { components, window, weights })
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, m: usize) -> f64 {
        self.weights[m]
    }

    pub fn mode_id(&self, j: usize, k: i64) -> Result<usize> {
        if j >= self.components {
            return Err(Error::DimensionMismatch(format!("component {j} of {}", self.components)));
        }
        if k.unsigned_abs() as usize > self.window {
            return Err(Error::ModeOutsideWindow { mode: k, window: self.window as i64 });
        }
        Ok(j * (2 * self.window + 1) + (k + self.window as i64) as usize)
    }

    pub fn mode_of(&self, m: usize) -> (usize, i64) {
        let width = 2 * self.window + 1;
        (m / width, (m % width) as i64 - self.window as i64)
    }

    pub fn basis_vector(&self, m: usize) -> OneParticle {
        let mut v = OneParticle::zeros(self.dim());
        v[m] = C64::new(1.0, 0.0);
        v
    }

    /// `⟨u, v⟩ = Σ u_m conj(v_m) w_m`, linear in `u`.
    pub fn inner(&self, u: &OneParticle, v: &OneParticle) -> C64 {
        u.iter().zip(v.iter()).zip(&self.weights).map(|((a, b), w)| a * b.conj() * *w).sum()
    }

    pub fn norm(&self, v: &OneParticle) -> f64 {
        self.inner(v, v).re.max(0.0).sqrt()
    }

    /// `R_λ e_(j,k) = λ^k e_(j,k)`.
    pub fn rotate(&self, v: &OneParticle, lambda: C64) -> Result<OneParticle> {
        check_unit(lambda)?;
        Ok(OneParticle::from_iterator(
            self.dim(),
            v.iter().enumerate().map(|(m, c)| c * lambda.powi(self.mode_of(m).1 as i32)),
        ))
    }

    /// The vector representing a functional: `⟨u, riesz(f)⟩ = f(u)` where
    /// `f(u) = Σ_j Σ_k f_j^k u_(j,k)`.
    pub fn riesz(&self, f: &[DualVector]) -> Result<OneParticle> {
        if f.len() != self.components {
            return Err(Error::DimensionMismatch(format!(
                "{} functionals for {} components",
                f.len(),
                self.components
            )));
        }
        let mut v = OneParticle::zeros(self.dim());
        for m in 0..self.dim() {
            let (j, k) = self.mode_of(m);
            v[m] = f[j].at(k).conj() / self.weights[m];
        }
        Ok(v)
    }

    /// Inverse of [`riesz`](Self::riesz) on the window.
    pub fn functional_of(&self, v: &OneParticle) -> Vec<DualVector> {
        let w = self.window as i64;
        (0..self.components)
            .map(|j| {
                let coeffs = (-w..=w)
                    .map(|k| {
                        let m = j * (2 * self.window + 1) + (k + w) as usize;
                        v[m].conj() * self.weights[m]
                    })
                    .collect();
                DualVector::from_coeffs(coeffs).expect("odd length")
            })
            .collect()
    }

    /// Norm of a basis state, `Π_{m∈T} w_m`, squared.
    fn state_weight(&self, mask: u64) -> f64 {
        modes_of(mask).map(|m| self.weights[m]).product()
    }
}

fn modes_of(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |m| mask & (1u64 << m) != 0)
}

/// `(-1)^{#{i ∈ T : i < m}}`.
fn sign_below(mask: u64, m: usize) -> f64 {
    if (mask & ((1u64 << m) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockVector {
    amps: BTreeMap<u64, C64>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis_mask(0)
    }

    fn basis_mask(mask: u64) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(mask, C64::new(1.0, 0.0));
        Self { amps }
    }

    /// `e_{m₁} ∧ ⋯ ∧ e_{m_r}` in the given order, reordered canonically.
    /// Repeated modes give zero.
    pub fn wedge(modes: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        let mut sign = 1.0;
        for &m in modes {
            if m >= MAX_MODES {
                return Err(Error::ModeOutsideWindow { mode: m as i64, window: MAX_MODES as i64 - 1 });
            }
            if mask & (1u64 << m) != 0 {
                return Ok(Self::zero());
            }
            // Moving e_m right past the larger modes already present.
            let above = (mask >> m).count_ones();
            if above % 2 == 1 {
                sign = -sign;
            }
            mask |= 1u64 << m;
        }
        Ok(Self::basis_mask(mask).scale(C64::new(sign, 0.0)))
    }

    pub fn amplitude(&self, modes: &[usize]) -> C64 {
        let mask = modes.iter().fold(0u64, |acc, m| acc | (1u64 << m));
        self.amps.get(&mask).copied().unwrap_or_default()
    }

    /// `(sorted modes, amplitude)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, C64)> + '_ {
        self.amps.iter().map(|(mask, a)| (modes_of(*mask).collect(), *a))
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    fn push(&mut self, mask: u64, value: C64) {
        *self.amps.entry(mask).or_default() += value;
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { amps: self.amps.iter().map(|(m, a)| (*m, a * s)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, a) in &other.amps {
            out.push(*m, *a);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn norm(&self, space: &ModeSpace) -> f64 {
        self.amps.iter().map(|(m, a)| a.norm_sqr() * space.state_weight(*m)).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self, space: &ModeSpace) -> C64 {
        self.amps.iter().filter_map(|(m, a)| other.amps.get(m).map(|b| a * b.conj() * space.state_weight(*m))).sum()
    }

    pub fn max_particles(&self) -> usize {
        self.amps.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    /// `None` for mixed states; the zero vector counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut parities = self.amps.iter().filter(|(_, a)| a.norm() > 0.0).map(|(m, _)| m.count_ones() % 2);
        match parities.next() {
            None => Some(Parity::Even),
            Some(p) if parities.all(|q| q == p) => Some(if p == 0 { Parity::Even } else { Parity::Odd }),
            _ => None,
        }
    }

    /// True when every nonzero amplitude has parity `p`.
    pub fn has_parity(&self, p: Parity) -> bool {
        let want = if p == Parity::Even { 0 } else { 1 };
        self.amps.iter().all(|(m, a)| a.norm() == 0.0 || m.count_ones() % 2 == want)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = FockFile {
            tuples: self.amps.keys().map(|m| modes_of(*m).collect()).collect(),
            amps: self.amps.values().map(|a| [a.re, a.im]).collect(),
        };
        crate::io::to_json(&file)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FockFile = serde_json::from_str(text)?;
        if file.tuples.len() != file.amps.len() {
            return Err(Error::Format("tuples and amps differ in length".into()));
        }
        let mut out = Self::zero();
        for (t, [re, im]) in file.tuples.iter().zip(file.amps) {
            if t.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Format(format!("tuple {t:?} is not strictly increasing")));
            }
            if t.iter().any(|m| *m >= MAX_MODES) {
                return Err(Error::Format(format!("tuple {t:?} has a mode beyond {MAX_MODES}")));
            }
            out.push(t.iter().fold(0u64, |acc, m| acc | (1u64 << m)), C64::new(re, im));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct FockFile {
    tuples: Vec<Vec<usize>>,
    amps: Vec<[f64; 2]>,
}

/// A Fock space truncated at `cap` particles.
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub modes: ModeSpace,
    pub cap: usize,
}

impl FockSpace {
    pub fn new(modes: ModeSpace, cap: usize) -> Self {
        Self { modes, cap }
    }

    /// `c(v)ψ = v ∧ ψ`; states pushed past the cap are dropped and their
    /// squared norm reported.
    pub fn create(&self, v: &OneParticle, psi: &FockVector) -> Truncated<FockVector> {
        let mut out = FockVector::zero();
        let mut overflow = 0.0;
        for (&mask, &a) in &psi.amps {
            for (m, vm) in v.iter().enumerate() {
                if *vm == C64::new(0.0, 0.0) || mask & (1u64 << m) != 0 {
                    continue;
                }
                let target = mask | (1u64 << m);
                let value = a * vm * sign_below(mask, m);
                if target.count_ones() as usize > self.cap {
                    overflow += value.norm_sqr() * self.modes.state_weight(target);
                } else {
                    out.push(target, value);
                }
            }
        }
        Truncated { value: out, overflow }
    }

    /// `a(v)ψ`: contraction with `⟨·, v⟩`, antilinear in `v`.
    pub fn annihilate(&self, v: &OneParticle, psi: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (&mask, &a) in &psi.amps {
            for m in modes_of(mask) {
                let vm = v[m];
                if vm == C64::new(0.0, 0.0) {
                    continue;
                }
                let value = a * vm.conj() * self.modes.weight(m) * sign_below(mask, m);
                out.push(mask & !(1u64 << m), value);
            }
        }
        out
    }

    /// `π(v) = c(v) + a(v)`.
    pub fn clifford(&self, v: &OneParticle, psi: &FockVector) -> Truncated<FockVector> {
        let c = self.create(v, psi);
        Truncated { value: c.value.add(&self.annihilate(v, psi)), overflow: c.overflow }
    }

    /// Every basis state with at most `r` particles.
    pub fn basis_states(&self, r: usize) -> Vec<FockVector> {
        let dim = self.modes.dim();
        let mut out = Vec::new();
        let mut stack: Vec<(u64, usize)> = vec![(0, 0)];
        while let Some((mask, next)) = stack.pop() {
            out.push(FockVector::basis_mask(mask));
            if (mask.count_ones() as usize) < r {
                for m in next..dim {
                    stack.push((mask | (1u64 << m), m + 1));
                }
            }
        }
        out
    }

    /// Anticommutator residuals on every basis state the operators keep
    /// below the cap.
    pub fn car_check(&self, u: &OneParticle, v: &OneParticle) -> CarResiduals {
        let uv = self.modes.inner(u, v);
        let mut out = CarResiduals::default();
        if self.cap >= 1 {
            for psi in self.basis_states(self.cap - 1) {
                let ca = self.create(u, &self.annihilate(v, &psi)).value;
                let ac = self.annihilate(v, &self.create(u, &psi).value);
                let r = ca.add(&ac).sub(&psi.scale(uv)).norm(&self.modes);
                out.create_annihilate = out.create_annihilate.max(r);
            }
        }
        if self.cap >= 2 {
            for psi in self.basis_states(self.cap - 2) {
                let cc = self.create(u, &self.create(v, &psi).value).value;
                let cc2 = self.create(v, &self.create(u, &psi).value).value;
                out.create_create = out.create_create.max(cc.add(&cc2).norm(&self.modes));
            }
        }
        for psi in self.basis_states(self.cap) {
            let aa = self.annihilate(u, &self.annihilate(v, &psi));
            let aa2 = self.annihilate(v, &self.annihilate(u, &psi));
            out.annihilate_annihilate = out.annihilate_annihilate.max(aa.add(&aa2).norm(&self.modes));
        }
        out
    }

    /// `max ‖π(v)²ψ - ⟨v,v⟩ψ‖` over basis states below the cap.
    pub fn clifford_square_residual(&self, v: &OneParticle) -> f64 {
        let vv = self.modes.inner(v, v);
        self.basis_states(self.cap.saturating_sub(1))
            .iter()
            .map(|psi| {
                let once = self.clifford(v, psi).value;
                let twice = self.clifford(v, &once).value;
                twice.sub(&psi.scale(vv)).norm(&self.modes)
            })
            .fold(0.0, f64::max)
    }

    /// `Σ π(riesz(f_i)) ξ_i`, each `f_i` given per component.
    pub fn finite_rank_clifford_extension(
        &self,
        terms: &[(Vec<DualVector>, FockVector)],
    ) -> Result<Truncated<FockVector>> {
        let mut out = FockVector::zero();
        let mut overflow = 0.0;
        for (f, xi) in terms {
            let v = self.modes.riesz(f)?;
            let t = self.clifford(&v, xi);
            out = out.add(&t.value);
            overflow += t.overflow;
        }
        Ok(Truncated { value: out, overflow })
    }

    /// Second quantisation `U_λ` of the rotation `R_λ`.
    pub fn implement_rotation(&self, lambda: C64) -> Result<Rotation> {
        check_unit(lambda)?;
        Ok(Rotation { lambda, modes: self.modes.clone() })
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct CarResiduals {
    /// `‖{c(u), a(v)} - ⟨u,v⟩‖`.
    pub create_annihilate: f64,
    /// `‖{c(u), c(v)}‖`.
    pub create_create: f64,
    /// `‖{a(u), a(v)}‖`.
    pub annihilate_annihilate: f64,
}

impl CarResiduals {
    pub fn max(&self) -> f64 {
        self.create_annihilate.max(self.create_create).max(self.annihilate_annihilate)
    }
}

/// `U_λ` multiplies the basis state `T` by `Π_{(j,k)∈T} λ^k`.
#[derive(Clone, Debug)]
pub struct Rotation {
    lambda: C64,
    modes: ModeSpace,
}

impl Rotation {
    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn apply(&self, psi: &FockVector) -> FockVector {
        FockVector {
            amps: psi
                .amps
                .iter()
                .map(|(mask, a)| {
                    let charge: i64 = modes_of(*mask).map(|m| self.modes.mode_of(m).1).sum();
                    (*mask, a * self.lambda.powi(charge as i32))
                })
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self { lambda: self.lambda.conj(), modes: self.modes.clone() }
    }
}

/// A complex structure on the one-particle modes: a phase on each mode with
/// `k ≠ 0` and an arbitrary block on the constants.
#[derive(Clone, Debug)]
pub struct PolarisingOperator {
    components: usize,
    window: usize,
    phases: Vec<C64>,
    constant: CMatrix,
}

impl PolarisingOperator {
    /// `J(v z^k) = -i v z^k` for `k ≥ 0` and `+i v z^k` for `k < 0`.
    pub fn complex(components: usize, window: usize) -> Self {
        let w = window as i64;
        let phases = (-w..=w).map(crate::weights::polarisation_phase).collect();
        let constant = CMatrix::identity(components, components) * C64::new(0.0, -1.0);
        Self { components, window, phases, constant }
    }

    /// `J(v cos kθ) = v sin kθ`, `J(v sin kθ) = -v cos kθ` and `J₀` on
    /// constants, with `J₀e_{2i} = e_{2i-1}` and `J₀e_{2i-1} = -e_{2i}`
    /// (1-based) and `J₀e_m = 0` for a leftover odd index. Check
    /// [`validate`](Self::validate) before use.
    pub fn standard_candidate(components: usize, window: usize) -> Self {
        let mut op = Self::complex(components, window);
        let mut j0 = CMatrix::zeros(components, components);
        for i in 0..components / 2 {
            j0[(2 * i, 2 * i + 1)] = C64::new(1.0, 0.0);
            j0[(2 * i + 1, 2 * i)] = C64::new(-1.0, 0.0);
        }
        op.constant = j0;
        op
    }

    /// The standard unitary structure on `L²(S¹, ℝ^m)`, rejecting odd `m`.
    pub fn standard(components: usize, window: usize) -> Result<Self> {
        let op = Self::standard_candidate(components, window);
        op.validate()?;
        Ok(op)
    }

    /// From a unitary structure on the fibre, used on constants.
    pub fn with_constant_structure(j: &UnitaryStructure, window: usize) -> Self {
        let mut op = Self::complex(j.dim(), window);
        op.constant = crate::lie::complexify(j.matrix());
        op
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.components * (2 * self.window + 1)
    }

    /// Matrix in the mode basis, ordered as in [`ModeSpace`].
    pub fn matrix(&self) -> CMatrix {
        let width = 2 * self.window + 1;
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for j in 0..self.components {
            for (i, phase) in self.phases.iter().enumerate() {
                if i != self.window {
                    m[(j * width + i, j * width + i)] = *phase;
                }
            }
        }
        for r in 0..self.components {
            for c in 0..self.components {
                m[(r * width + self.window, c * width + self.window)] = self.constant[(r, c)];
            }
        }
        m
    }

    pub fn apply(&self, v: &OneParticle) -> OneParticle {
        self.matrix() * v
    }

    /// `‖J² + I‖` and `‖J*J - I‖`.
    pub fn invariant_residuals(&self) -> (f64, f64) {
        let m = self.matrix();
        let id = CMatrix::identity(self.dim(), self.dim());
        ((&m * &m + &id).norm(), (m.adjoint() * &m - id).norm())
    }

    pub fn validate(&self) -> Result<()> {
        let (square, unitary) = self.invariant_residuals();
        if square > 1e-12 || unitary > 1e-12 {
            return Err(Error::NotPolarising(format!("|J² + I| = {square:e}, |J*J - I| = {unitary:e}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PolarisationDiff {
    pub rank: usize,
    pub hs_norm: f64,
}

/// Rank and Hilbert–Schmidt norm of `J₁ - J₂` on the window.
pub fn polarisation_compare(j1: &PolarisingOperator, j2: &PolarisingOperator) -> Result<PolarisationDiff> {
    if j1.window != j2.window {
        return Err(Error::WindowMismatch(j1.window, j2.window));
    }
    if j1.components != j2.components {
        return Err(Error::DimensionMismatch(format!("{} vs {} components", j1.components, j2.components)));
    }
    let d = j1.matrix() - j2.matrix();
    let sv = d.singular_values();
    let rank = sv.iter().filter(|s| **s > 1e-10).count();
    Ok(PolarisationDiff { rank, hs_norm: d.norm() })
}
