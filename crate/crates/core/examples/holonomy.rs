//! Parallel transport, the polynomial eigenbasis of D and cos D.

use loopforge::holonomy::{self, BasisCoords, Field, LoopConnection};
use loopforge::loops::{TruncationConfig, C64};
use loopforge::{sample, scenarios};

fn main() -> loopforge::Result<()> {
    let mut rng = sample::rng(3);
    let config = TruncationConfig::new(32, 2)?;
    let form = scenarios::smooth_connection_form(config, 2, 0.6, &mut rng)?;
    let conn = LoopConnection::new(form, Field::Complex, holonomy::DEFAULT_STEPS)?;

    println!("holonomy unitarity drift {:.1e}", holonomy::transport_drift(&conn));
    let basis = holonomy::pol_fibre_basis(&conn, 3, config)?;
    println!("exponents s_j = {:?}", basis.exponents);

    for (j, k) in [(0, 0), (1, 2), (0, -3)] {
        let mut coords = BasisCoords::new();
        coords.insert((j, k), C64::new(1.0, 0.0));
        let exact = holonomy::cos_d(&basis, &coords)?[&(j, k)];
        let series = holonomy::cos_series_factor(&conn, &basis, j, k)?;
        println!(
            "mode ({j}, {k:+}): eigen residual {:.1e}, cosh factor {:.6e}, series {:.6e}",
            basis.eigen_residual(&conn, j, k)?,
            exact.re,
            series.re
        );
    }

    let alpha = scenarios::random_polynomial_loop(config, 1, 3, &mut rng)?;
    let phi = scenarios::sine_reparametrization(0.1, 32)?;
    println!("chain rule residual {:.1e}", holonomy::chain_rule_residual(&conn, &alpha, &phi, 4)?);

    let report = holonomy::subbundle_counterexample_check(scenarios::sine_twist, 16, 16, 1e-9)?;
    println!("non-polynomial twist: smallest tail {:.1e}", report.min_tail);
    Ok(())
}
