//! Fock space: CAR, Clifford multiplication, rotations and polarisations.

use loopforge::fock::{polarisation_compare, FockSpace, FockVector, ModeSpace, PolarisingOperator};
use loopforge::loops::C64;
use loopforge::sample;

fn main() -> loopforge::Result<()> {
    let space = FockSpace::new(ModeSpace::new(2, 3, None)?, 6);
    let mut rng = sample::rng(5);
    let u = sample::random_complex_vector(space.modes.dim(), &mut rng);
    let v = sample::random_complex_vector(space.modes.dim(), &mut rng);
    let car = space.car_check(&u, &v);
    println!("{} modes, CAR residuals {car:?}", space.modes.dim());

    let psi = FockVector::wedge(&[0, 3])?.add(&FockVector::vacuum());
    let twice = space.clifford(&u, &space.clifford(&u, &psi).value).value;
    let expect = psi.scale(space.modes.inner(&u, &u));
    println!("pi(u)^2 - <u,u> on psi: {:.1e}", twice.sub(&expect).norm(&space.modes));

    let rot = space.implement_rotation(C64::from_polar(1.0, 0.3))?;
    println!("rotated amplitude of e_0 ^ e_3: {:.6}", rot.apply(&psi).amplitude(&[0, 3]));

    for k in [1, 3, 6] {
        let d = polarisation_compare(&PolarisingOperator::complex(4, k), &PolarisingOperator::standard(4, k)?)?;
        println!("K = {k}: rank(J_C - J_R) = {}, HS norm {:.6}", d.rank, d.hs_norm);
    }
    println!("{}", psi.to_json()?);
    Ok(())
}
