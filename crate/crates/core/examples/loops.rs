//! Truncated loops: products, rotation, sampling and the loop file format.

use loopforge::io;
use loopforge::loops::{CMatrix, FourierLoop, TruncationConfig, C64};

fn main() -> loopforge::Result<()> {
    let config = TruncationConfig::new(8, 1)?;
    let z = FourierLoop::monomial(config, 1, CMatrix::from_element(1, 1, C64::new(1.0, 0.0)))?;
    let f = z.add(&z.involute().scale(C64::new(0.5, 0.0)))?;

    let square = f.product(&f)?;
    println!("(z + z^-1/2)^2 has degree {} with overflow {}", square.value.numerical_degree(), square.overflow);

    let lambda = C64::from_polar(1.0, 0.4);
    let rotated = f.rotate(lambda)?;
    println!("rotated value at t = 0: {:.6}", rotated.evaluate(0.0)[(0, 0)]);

    let sampled = FourierLoop::sample(config, config.default_samples(), |t| f.evaluate(t))?;
    println!("sampling recovers the coefficients to {:.1e}", sampled.value.sub(&f)?.norm());

    let narrow = TruncationConfig::new(4, 1)?;
    let far = FourierLoop::sample(narrow, 12, |t| {
        CMatrix::from_element(1, 1, C64::from_polar(1.0, std::f64::consts::TAU * 6.0 * t))
    })?;
    println!("mode 6 sampled at 12 points with N = 4 is flagged: {}", far.band_limit_violated());

    println!("{}", io::loop_to_json(&f)?);
    Ok(())
}
