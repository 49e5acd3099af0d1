//! Sector logarithms, commuting logarithms and the SO_m decomposition.

use std::f64::consts::PI;

use loopforge::lie::{self, exp_matrix, log_sector, Spectral};
use loopforge::sample;

fn main() -> loopforge::Result<()> {
    let mut rng = sample::rng(1);
    let g = sample::random_unitary(3, &mut rng);
    for sigma in [-2.0, 0.0, 2.0] {
        let xi = log_sector(&g, sigma, 1e-9)?;
        let round = (exp_matrix(&xi, 1.0, 1e-9)?.matrix() - g.matrix()).norm();
        let spectrum = Spectral::of_normal(xi.matrix(), 1e-9)?;
        let ims: Vec<String> = spectrum.values.iter().map(|v| format!("{:+.4}", v.im)).collect();
        println!(
            "sigma {sigma:+.1}: eigenvalues i*[{}] in ({:+.4}, {:+.4}), round trip {round:.1e}",
            ims.join(", "),
            sigma - PI,
            sigma + PI
        );
    }

    let c = lie::commuting_log(&g, 1e-9)?;
    println!("commuting log commutator {:.1e}", (c.matrix() * g.matrix() - g.matrix() * c.matrix()).norm());

    let h = sample::random_so(4, &mut rng);
    let (xi, j) = lie::log_decompose_so(&h, 1e-9)?;
    println!(
        "SO4: exp(xi) = h to {:.1e}, J^2 + 1 = {:.1e}",
        (exp_matrix(&xi, 1.0, 1e-9)?.matrix() - h.matrix()).norm(),
        j.residual()
    );
    Ok(())
}
