//! Paths exp(t xi) gamma(t) with polynomial gamma: quotients and local sections.

use loopforge::loops::TruncationConfig;
use loopforge::paths::{self, PathLike, ProjectionJField};
use loopforge::{sample, scenarios, verify};

fn main() -> loopforge::Result<()> {
    let mut rng = sample::rng(2);
    let config = TruncationConfig::new(16, 3)?;

    let (xi1, xi2) = scenarios::quotient_pair(&mut rng);
    let (tail, bound) = verify::quotient_tail(&xi1, &xi2, config)?;
    println!("exp(-t xi1) exp(t xi2): degree bound {bound}, tail beyond it {tail:.1e}");

    let g = sample::random_unitary(3, &mut rng);
    let beta = paths::section_un(&g, 0.0, config)?;
    println!("U3 section: projection residual {:.1e}", (beta.project().matrix() - g.matrix()).norm());

    let s = sample::random_special_unitary(3, &mut rng);
    let beta = paths::section_sun(&s, 0.0, None, config)?;
    println!("SU3 section: loop degree {}, residuals {:.1e}", beta.degree(), beta.residuals(64).max());

    let case = scenarios::so_section_case(4, 0.1, 0.05, &mut rng);
    let field = ProjectionJField::new(&case.g, case.r, 1e-9)?;
    let sec = paths::section_son(&case.h, case.r, &case.g, &field, TruncationConfig::new(16, 4)?)?;
    let res = verify::son_section_residuals(&case, TruncationConfig::new(16, 4)?)?;
    println!(
        "SO4 section at r = {:.3}: degree bound {}, projection {:.1e}, orthogonality {:.1e}, tail {:.1e}",
        case.r, sec.degree_bound, res.projection, res.orthogonality, res.tail
    );
    Ok(())
}
