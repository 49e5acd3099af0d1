//! The flat-model Dirac operator on polynomial spinor sections.

use loopforge::dirac::{self, DiracConfig};
use loopforge::fock::{FockSpace, ModeSpace, Parity};
use loopforge::sample;

fn main() -> loopforge::Result<()> {
    let cfg = DiracConfig::new(FockSpace::new(ModeSpace::new(1, 3, None)?, 4));
    let mut rng = sample::rng(6);
    let s = dirac::random_even_section(&cfg, 3, 4, &mut rng);
    let x = dirac::random_point(&cfg, &mut rng);

    let a = dirac::dirac(&s, &cfg, &x)?.value;
    let b = dirac::dirac_naive(&s, &cfg, &x)?.value;
    let m = &cfg.space.modes;
    println!("section of degree {} with {} terms", s.degree(), s.terms().count());
    println!("output is odd: {}", a.has_parity(Parity::Odd));
    println!("two routes differ by {:.1e}", a.sub(&b).norm(m));

    let lambda = sample::unit_complex(&mut rng);
    println!("equivariance residual {:.1e}", dirac::equivariance_check(&s, &cfg, lambda, &x)?);
    Ok(())
}
