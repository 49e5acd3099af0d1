//! Weight sequences, the z-norm formula and the growth witness.

use loopforge::sample;
use loopforge::weights::{self, DualVector, WeightSequence};

fn main() -> loopforge::Result<()> {
    let a = WeightSequence::geometric(2.0, 1.0, 16)?;
    for q in [-2, 1, 4] {
        println!(
            "|z^{q}| = {:.12} (formula), SVD gap {:.1e}",
            weights::z_operator_norm(&a, q),
            weights::z_norm_svd_gap(&a, q)
        );
    }

    let mut rng = sample::rng(4);
    let b = DualVector::random(16, &mut rng);
    let c = DualVector::random(16, &mut rng);
    let direct = weights::inner_product(&b, &c, &a)?;
    let via = b.pair(&weights::diamond(&c.loop_conjugate(), &a)?)?;
    println!("inner product {direct:.6} via diamond {via:.6}");

    let table = weights::unbounded_growth_witness(&a, 8)?;
    println!("growth of |z^q|: {table:?}");

    println!("{}", a.to_json()?);
    Ok(())
}
