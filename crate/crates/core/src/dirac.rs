//! Dirac operator `π ∘ ∇` on the flat model.
//!
//! The loop space is the one-particle space of a [`FockSpace`], viewed as a
//! real vector space with orthonormal directions `ê = e_m/√w_m` and
//! `i·e_m/√w_m`. Coordinates `x_{(m, Re)}`, `x_{(m, Im)}` are taken against
//! these directions. Sections are polynomials in the coordinates with Fock
//! coefficients, and `∇` is exact differentiation.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector, OneParticle};
use crate::loops::{check_unit, Truncated, C64};
use crate::sample;

pub const MAX_DEGREE: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    Re,
    Im,
}

/// A real coordinate direction `(mode id, part)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    pub mode: usize,
    pub part: Part,
}

impl Coord {
    pub fn re(mode: usize) -> Self {
        Self { mode, part: Part::Re }
    }

    pub fn im(mode: usize) -> Self {
        Self { mode, part: Part::Im }
    }

    /// The unit tangent vector `ê` for this direction.
    pub fn tangent(&self, space: &FockSpace) -> OneParticle {
        let mut v = OneParticle::zeros(space.modes.dim());
        let scale = space.modes.weight(self.mode).sqrt().recip();
        v[self.mode] = match self.part {
            Part::Re => C64::new(scale, 0.0),
            Part::Im => C64::new(0.0, scale),
        };
        v
    }
}

/// Exponents, sorted by coordinate, zero exponents omitted.
pub type Monomial = BTreeMap<Coord, u32>;

/// A finitely supported point `Σ (x_Re + i·x_Im)·e_m/√w_m`.
pub type Point = BTreeMap<Coord, f64>;

fn degree(m: &Monomial) -> u32 {
    m.values().sum()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolynomialSection {
    terms: BTreeMap<Monomial, FockVector>,
}

impl PolynomialSection {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(psi: FockVector) -> Self {
        Self::term(Monomial::new(), psi).expect("degree 0")
    }

    pub fn term(monomial: Monomial, psi: FockVector) -> Result<Self> {
        let monomial: Monomial = monomial.into_iter().filter(|(_, e)| *e > 0).collect();
        if degree(&monomial) > MAX_DEGREE {
            return Err(Error::InvalidConfig(format!("degree {} exceeds {MAX_DEGREE}", degree(&monomial))));
        }
        let mut terms = BTreeMap::new();
        terms.insert(monomial, psi);
        Ok(Self { terms })
    }

    /// `Π x_c^{e}·ψ`.
    pub fn monomial(powers: &[(Coord, u32)], psi: FockVector) -> Result<Self> {
        let mut m = Monomial::new();
        for (c, e) in powers {
            *m.entry(*c).or_default() += e;
        }
        Self::term(m, psi)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FockVector)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(degree).max().unwrap_or(0)
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        let mut all: Vec<Coord> = self.terms.keys().flat_map(|m| m.keys().copied()).collect();
        all.sort();
        all.dedup();
        all.into_iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, psi) in &other.terms {
            let entry = out.terms.entry(m.clone()).or_default();
            *entry = entry.add(psi);
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { terms: self.terms.iter().map(|(m, p)| (m.clone(), p.scale(s))).collect() }
    }

    pub fn map_coefficients(&self, f: impl Fn(&FockVector) -> FockVector) -> Self {
        Self { terms: self.terms.iter().map(|(m, p)| (m.clone(), f(p))).collect() }
    }

    pub fn evaluate(&self, x: &Point) -> FockVector {
        self.terms.iter().fold(FockVector::zero(), |acc, (m, psi)| {
            let value: f64 = m.iter().map(|(c, e)| x.get(c).copied().unwrap_or(0.0).powi(*e as i32)).product();
            acc.add(&psi.scale(C64::new(value, 0.0)))
        })
    }

    /// Exact partial derivative `∂_c`.
    pub fn derivative(&self, c: Coord) -> Self {
        let mut out = Self::zero();
        for (m, psi) in &self.terms {
            if let Some(&e) = m.get(&c) {
                let mut lower = m.clone();
                if e == 1 {
                    lower.remove(&c);
                } else {
                    lower.insert(c, e - 1);
                }
                out = out.add(&Self { terms: BTreeMap::from([(lower, psi.scale(C64::new(e as f64, 0.0)))]) });
            }
        }
        out
    }

    fn check_modes(&self, space: &FockSpace) -> Result<()> {
        for c in self.coords() {
            if c.mode >= space.modes.dim() {
                return Err(Error::ModeOutsideWindow { mode: c.mode as i64, window: space.modes.dim() as i64 - 1 });
            }
        }
        Ok(())
    }
}

/// `∇s`: the nonzero partial derivatives of `s`.
pub fn covariant_derivative_flat(s: &PolynomialSection) -> BTreeMap<Coord, PolynomialSection> {
    s.coords().map(|c| (c, s.derivative(c))).collect()
}

#[derive(Clone, Debug)]
pub struct DiracConfig {
    pub space: FockSpace,
    /// Tangent directions entering the sum.
    pub directions: Vec<Coord>,
}

impl DiracConfig {
    /// All `2·dim` real directions of the window.
    pub fn new(space: FockSpace) -> Self {
        let directions = (0..space.modes.dim()).flat_map(|m| [Coord::re(m), Coord::im(m)]).collect();
        Self { space, directions }
    }

    pub fn with_directions(space: FockSpace, directions: Vec<Coord>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidConfig("direction set is empty".into()));
        }
        if let Some(c) = directions.iter().find(|c| c.mode >= space.modes.dim()) {
            return Err(Error::ModeOutsideWindow { mode: c.mode as i64, window: space.modes.dim() as i64 - 1 });
        }
        Ok(Self { space, directions })
    }
}

/// `∂/s(x) = Σ_α π(ê_α)(∂_α s)(x)`, contracted through
/// [`FockSpace::finite_rank_clifford_extension`].
pub fn dirac(s: &PolynomialSection, cfg: &DiracConfig, x: &Point) -> Result<Truncated<FockVector>> {
    s.check_modes(&cfg.space)?;
    let terms: Vec<_> = cfg
        .directions
        .iter()
        .map(|c| {
            let f = cfg.space.modes.functional_of(&c.tangent(&cfg.space));
            (f, s.derivative(*c).evaluate(x))
        })
        .filter(|(_, xi)| !xi.is_empty())
        .collect();
    cfg.space.finite_rank_clifford_extension(&terms)
}

/// The same sum with `π(ê_α)` applied term by term.
pub fn dirac_naive(s: &PolynomialSection, cfg: &DiracConfig, x: &Point) -> Result<Truncated<FockVector>> {
    s.check_modes(&cfg.space)?;
    let mut out = FockVector::zero();
    let mut overflow = 0.0;
    for c in &cfg.directions {
        let t = cfg.space.clifford(&c.tangent(&cfg.space), &s.derivative(*c).evaluate(x));
        out = out.add(&t.value);
        overflow += t.overflow;
    }
    Ok(Truncated { value: out, overflow })
}

/// `∂/s` as a polynomial section, for composing the operator with itself.
pub fn dirac_section(s: &PolynomialSection, cfg: &DiracConfig) -> Result<Truncated<PolynomialSection>> {
    s.check_modes(&cfg.space)?;
    let mut out = PolynomialSection::zero();
    let mut overflow = 0.0;
    for c in &cfg.directions {
        let v = c.tangent(&cfg.space);
        for (m, psi) in s.derivative(*c).terms {
            let t = cfg.space.clifford(&v, &psi);
            overflow += t.overflow;
            out = out.add(&PolynomialSection { terms: BTreeMap::from([(m, t.value)]) });
        }
    }
    Ok(Truncated { value: out, overflow })
}

/// `R_λ x`: the complex coordinate of mode `(j, k)` is multiplied by `λ^k`.
pub fn rotate_point(x: &Point, lambda: C64, space: &FockSpace) -> Result<Point> {
    check_unit(lambda)?;
    let mut out = Point::new();
    for (c, v) in x {
        let mu = lambda.powi(space.modes.mode_of(c.mode).1 as i32);
        let z = match c.part {
            Part::Re => C64::new(*v, 0.0),
            Part::Im => C64::new(0.0, *v),
        } * mu;
        *out.entry(Coord::re(c.mode)).or_default() += z.re;
        *out.entry(Coord::im(c.mode)).or_default() += z.im;
    }
    Ok(out)
}

/// `(λ·s)(x) = U_λ s(R_λ⁻¹x)`.
pub fn rotate_section(s: &PolynomialSection, lambda: C64, space: &FockSpace) -> Result<PolynomialSection> {
    let u = space.implement_rotation(lambda)?;
    let mut out = PolynomialSection::zero();
    for (m, psi) in &s.terms {
        // Substitute each coordinate by its linear expression in R_λ⁻¹x.
        let mut expanded: BTreeMap<Monomial, f64> = BTreeMap::from([(Monomial::new(), 1.0)]);
        for (c, e) in m {
            let mu = lambda.powi(-(space.modes.mode_of(c.mode).1 as i32));
            let (re, im) = (Coord::re(c.mode), Coord::im(c.mode));
            let linear = match c.part {
                Part::Re => [(re, mu.re), (im, -mu.im)],
                Part::Im => [(re, mu.im), (im, mu.re)],
            };
            for _ in 0..*e {
                let mut next = BTreeMap::new();
                for (mono, coef) in &expanded {
                    for (lc, lv) in linear {
                        if lv == 0.0 {
                            continue;
                        }
                        let mut mono = mono.clone();
                        *mono.entry(lc).or_default() += 1;
                        *next.entry(mono).or_default() += coef * lv;
                    }
                }
                expanded = next;
            }
        }
        let rotated = u.apply(psi);
        for (mono, coef) in expanded {
            out = out.add(&PolynomialSection::term(mono, rotated.scale(C64::new(coef, 0.0)))?);
        }
    }
    Ok(out)
}

/// `‖U_λ(∂/s)(x) - (∂/(λ·s))(R_λx)‖`.
pub fn equivariance_check(s: &PolynomialSection, cfg: &DiracConfig, lambda: C64, x: &Point) -> Result<f64> {
    let u = cfg.space.implement_rotation(lambda)?;
    let lhs = u.apply(&dirac(s, cfg, x)?.value);
    let s2 = rotate_section(s, lambda, &cfg.space)?;
    let x2 = rotate_point(x, lambda, &cfg.space)?;
    let rhs = dirac(&s2, cfg, &x2)?.value;
    Ok(lhs.sub(&rhs).norm(&cfg.space.modes))
}

/// A random section of degree at most `max_degree` whose coefficients are
/// even states below the cap.
pub fn random_even_section<R: Rng>(cfg: &DiracConfig, max_degree: u32, terms: usize, rng: &mut R) -> PolynomialSection {
    let dim = cfg.space.modes.dim();
    let mut out = PolynomialSection::zero();
    for _ in 0..terms {
        let deg = rng.random_range(0..=max_degree.min(MAX_DEGREE));
        let mut powers = Vec::new();
        for _ in 0..deg {
            let m = rng.random_range(0..dim);
            powers.push((if rng.random_bool(0.5) { Coord::re(m) } else { Coord::im(m) }, 1));
        }
        let psi = (0..2).fold(FockVector::zero(), |acc, _| {
            acc.add(&random_even_state(dim, cfg.space.cap.saturating_sub(1), rng).scale(sample::complex_gaussian(rng)))
        });
        out = out.add(&PolynomialSection::monomial(&powers, psi).expect("degree capped"));
    }
    out
}

/// A basis state with an even number of particles, at most `max_particles`.
fn random_even_state<R: Rng>(dim: usize, max_particles: usize, rng: &mut R) -> FockVector {
    let size = 2 * rng.random_range(0..=max_particles.min(dim) / 2);
    let modes = rand::seq::index::sample(rng, dim, size).into_vec();
    FockVector::wedge(&modes).expect("distinct modes below 64")
}

pub fn random_point<R: Rng>(cfg: &DiracConfig, rng: &mut R) -> Point {
    (0..cfg.space.modes.dim()).flat_map(|m| [Coord::re(m), Coord::im(m)]).map(|c| (c, sample::gaussian(rng))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ModeSpace, Parity};

    fn cfg(n: usize, k: usize, cap: usize) -> DiracConfig {
        DiracConfig::new(FockSpace::new(ModeSpace::new(n, k, None).unwrap(), cap))
    }

    fn mode(c: &DiracConfig, j: usize, k: i64) -> usize {
        c.space.modes.mode_id(j, k).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let psi = FockVector::vacuum();
        assert!(covariant_derivative_flat(&PolynomialSection::constant(psi.clone())).is_empty());
        let c = Coord::re(3);
        let s = PolynomialSection::monomial(&[(c, 1)], psi.clone()).unwrap();
        let d = covariant_derivative_flat(&s);
        assert_eq!(d.len(), 1);
        assert_eq!(d[&c], PolynomialSection::constant(psi.clone()));
        assert!(s.derivative(Coord::im(3)).terms().next().is_none());
        let q = PolynomialSection::monomial(&[(c, 2)], psi.clone()).unwrap();
        assert_eq!(q.derivative(c), PolynomialSection::monomial(&[(c, 1)], psi.scale(C64::new(2.0, 0.0))).unwrap());
        assert!(PolynomialSection::monomial(&[(c, 4)], FockVector::vacuum()).is_err());
    }

    #[test]
    fn leibniz_on_products() {
        let a = Coord::re(0);
        let b = Coord::im(2);
        let psi = FockVector::vacuum();
        let s = PolynomialSection::monomial(&[(a, 2), (b, 1)], psi.clone()).unwrap();
        let mut x = Point::new();
        x.insert(a, 0.7);
        x.insert(b, -1.3);
        // ∂_a(a²b) = 2ab
        let expect = 2.0 * 0.7 * -1.3;
        assert_eq!(s.derivative(a).evaluate(&x), psi.scale(C64::new(expect, 0.0)));
    }

    #[test]
    fn dirac_examples() {
        let c = cfg(1, 3, 4);
        let x = random_point(&c, &mut sample::rng(1));
        let constant = PolynomialSection::constant(FockVector::vacuum());
        assert!(dirac(&constant, &c, &x).unwrap().value.is_empty());
        let m = mode(&c, 0, 0);
        let s = PolynomialSection::monomial(&[(Coord::re(m), 1)], FockVector::vacuum()).unwrap();
        let out = dirac(&s, &c, &x).unwrap().value;
        assert_eq!(out, FockVector::wedge(&[m]).unwrap());
        let bad = PolynomialSection::monomial(&[(Coord::re(40), 1)], FockVector::vacuum()).unwrap();
        assert!(matches!(dirac(&bad, &c, &x), Err(Error::ModeOutsideWindow { .. })));
    }

    #[test]
    fn grading_flip_and_two_routes() {
        let c = cfg(1, 3, 4);
        let mut rng = sample::rng(2);
        for _ in 0..50 {
            let s = random_even_section(&c, 3, 4, &mut rng);
            let x = random_point(&c, &mut rng);
            let a = dirac(&s, &c, &x).unwrap().value;
            let b = dirac_naive(&s, &c, &x).unwrap().value;
            assert!(a.has_parity(Parity::Odd));
            assert!(a.sub(&b).norm(&c.space.modes) <= 1e-12 * (1.0 + a.norm(&c.space.modes)));
        }
    }

    #[test]
    fn equivariance_examples() {
        let c = cfg(1, 3, 4);
        let mut rng = sample::rng(3);
        let x = random_point(&c, &mut rng);
        let m = mode(&c, 0, 1);
        let s = PolynomialSection::monomial(&[(Coord::re(m), 1)], FockVector::vacuum()).unwrap();
        assert!(equivariance_check(&s, &c, C64::new(1.0, 0.0), &x).unwrap() == 0.0);
        assert!(equivariance_check(&s, &c, C64::new(0.0, 1.0), &x).unwrap() <= 1e-12);
        for _ in 0..20 {
            let s = random_even_section(&c, 2, 3, &mut rng);
            let lambda = sample::unit_complex(&mut rng);
            assert!(equivariance_check(&s, &c, lambda, &x).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn square_is_second_derivative_in_one_direction() {
        let c = cfg(1, 2, 4);
        let mut rng = sample::rng(4);
        let x = random_point(&c, &mut rng);
        let psi = FockVector::wedge(&[0]).unwrap().add(&FockVector::wedge(&[1, 3]).unwrap());
        for dir in [Coord::re(2), Coord::im(4)] {
            for d in 1..=3 {
                let s = PolynomialSection::monomial(&[(dir, d)], psi.clone()).unwrap();
                let once = dirac_section(&s, &c).unwrap();
                let twice = dirac_section(&once.value, &c).unwrap();
                assert_eq!(once.overflow + twice.overflow, 0.0);
                let expect = s.derivative(dir).derivative(dir).evaluate(&x);
                let got = twice.value.evaluate(&x);
                assert!(got.sub(&expect).norm(&c.space.modes) <= 1e-12 * (1.0 + expect.norm(&c.space.modes)));
            }
        }
    }

    #[test]
    fn rotate_point_matches_one_particle_rotation() {
        let c = cfg(1, 2, 3);
        let mut rng = sample::rng(5);
        let x = random_point(&c, &mut rng);
        let lambda = sample::unit_complex(&mut rng);
        let to_vec = |p: &Point| {
            let mut v = OneParticle::zeros(c.space.modes.dim());
            for (coord, val) in p {
                v += coord.tangent(&c.space) * C64::new(*val, 0.0);
            }
            v
        };
        let direct = c.space.modes.rotate(&to_vec(&x), lambda).unwrap();
        assert!((direct - to_vec(&rotate_point(&x, lambda, &c.space).unwrap())).norm() < 1e-14);
    }

    #[test]
    fn dirac_is_linear() {
        let c = cfg(1, 2, 4);
        let mut rng = sample::rng(6);
        let s1 = random_even_section(&c, 3, 3, &mut rng);
        let s2 = random_even_section(&c, 3, 3, &mut rng);
        let x = random_point(&c, &mut rng);
        let k = C64::new(0.3, -1.2);
        let lhs = dirac(&s1.add(&s2.scale(k)), &c, &x).unwrap().value;
        let rhs = dirac(&s1, &c, &x).unwrap().value.add(&dirac(&s2, &c, &x).unwrap().value.scale(k));
        assert!(lhs.sub(&rhs).norm(&c.space.modes) <= 1e-12 * (1.0 + rhs.norm(&c.space.modes)));
    }
}
