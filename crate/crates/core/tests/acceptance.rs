//! Acceptance criteria. Runs every criterion in sequence, prints one line per
//! criterion and exits non-zero if any fails.

use std::f64::consts::{PI, TAU};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use loopforge::dirac::{self, DiracConfig};
use loopforge::fock::{polarisation_compare, FockSpace, ModeSpace, Parity, PolarisingOperator};
use loopforge::holonomy::{self, BasisCoords, Field, LoopConnection};
use loopforge::lie::{exp_matrix, log_sector, Spectral};
use loopforge::loops::{TruncationConfig, C64};
use loopforge::weights::{self, WeightSequence};
use loopforge::{sample, scenarios, verify};
use rand::Rng;

const SEED: u64 = 20240917;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: f64) -> (bool, String) {
    let s = elapsed.as_secs_f64();
    (s < limit_s, format!("{s:.2} s (limit {limit_s} s)"))
}

fn car_suite() -> Verdict {
    let start = Instant::now();
    let f = FockSpace::new(ModeSpace::new(2, 3, None).unwrap(), 6);
    let dim = f.modes.dim();
    let mut car: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            car = car.max(f.car_check(&f.modes.basis_vector(a), &f.modes.basis_vector(b)).max());
        }
    }
    let mut square: f64 = 0.0;
    for m in 0..dim {
        let e = f.modes.basis_vector(m);
        square = square.max(f.clifford_square_residual(&e));
        square = square.max(f.clifford_square_residual(&(e * C64::new(0.0, 1.0))));
    }
    let (fast, time) = within(start.elapsed(), 10.0);
    verdict(
        car <= 1e-12 && square <= 1e-12 && fast,
        format!("{dim} modes, CAR {:.1e}, pi(v)^2 {square:.1e}, {time}", car + 0.0),
    )
}

fn sector_log() -> Verdict {
    let start = Instant::now();
    let mut rng = sample::rng_for(SEED, "sector_log");
    let (mut round, mut strip): (f64, f64) = (0.0, 0.0);
    for n in 2..=4 {
        for _ in 0..200 {
            let g = sample::random_unitary(n, &mut rng);
            for _ in 0..2 {
                let sigma = rng.random_range(-PI..PI);
                let xi = log_sector(&g, sigma, 1e-9).unwrap();
                round = round.max((exp_matrix(&xi, 1.0, 1e-9).unwrap().matrix() - g.matrix()).norm());
                for v in Spectral::of_normal(xi.matrix(), 1e-9).unwrap().values {
                    strip = strip.max((v.im - sigma).abs() - PI).max(v.re.abs() - 1e-9);
                }
            }
        }
    }
    let (fast, time) = within(start.elapsed(), 5.0);
    verdict(round <= 1e-9 && strip <= 0.0 && fast, format!("round trip {round:.1e}, strip excess {strip:.1e}, {time}"))
}

fn quotient_theorem() -> Verdict {
    let mut rng = sample::rng_for(SEED, "quotient");
    let config = TruncationConfig::with_tol(16, 3, 1e-8).unwrap();
    let (mut worst, mut bound) = (0.0f64, 0usize);
    for _ in 0..100 {
        let (x1, x2) = scenarios::quotient_pair(&mut rng);
        let (tail, d) = verify::quotient_tail(&x1, &x2, config).unwrap();
        worst = worst.max(tail);
        bound = bound.max(d);
    }
    verdict(worst <= 1e-8 && bound < 16, format!("tail {worst:.1e}, largest degree bound {bound}"))
}

fn son_section() -> Verdict {
    let mut rng = sample::rng_for(SEED, "son_section");
    let config = TruncationConfig::with_tol(16, 4, 1e-9).unwrap();
    let (mut proj, mut orth, mut tail) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let case = scenarios::so_section_case(4, 0.1, 0.05, &mut rng);
        let r = verify::son_section_residuals(&case, config).unwrap();
        proj = proj.max(r.projection);
        orth = orth.max(r.orthogonality);
        tail = tail.max(r.tail);
    }
    verdict(
        proj <= 1e-8 && orth <= 1e-8 && tail <= 1e-7,
        format!("projection {proj:.1e}, orthogonality {orth:.1e}, tail {tail:.1e}"),
    )
}

fn z_norm() -> Verdict {
    let families = [
        WeightSequence::geometric(2.0, 1.0, 16).unwrap(),
        WeightSequence::geometric(TAU.exp(), 1.0, 16).unwrap(),
        WeightSequence::cosh_squared(16),
    ];
    let mut worst: f64 = 0.0;
    for a in &families {
        for q in -8..=8 {
            worst = worst.max(weights::z_norm_svd_gap(a, q));
        }
    }
    verdict(worst <= 1e-12, format!("largest relative gap {worst:.1e}"))
}

fn smooth_connection(rng: &mut sample::SeededRng) -> LoopConnection {
    let form = scenarios::smooth_connection_form(TruncationConfig::new(32, 2).unwrap(), 2, 0.6, rng).unwrap();
    LoopConnection::new(form, Field::Complex, holonomy::DEFAULT_STEPS).unwrap()
}

fn cos_eigen_action() -> Verdict {
    let mut rng = sample::rng_for(SEED, "cos");
    let config = TruncationConfig::new(32, 2).unwrap();
    let (mut worst, mut sandwich) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..5 {
        let conn = smooth_connection(&mut rng);
        let basis = holonomy::pol_fibre_basis(&conn, 3, config).unwrap();
        for j in 0..basis.rank() {
            for k in -3..=3 {
                let mut coords = BasisCoords::new();
                coords.insert((j, k), C64::new(1.0, 0.0));
                let exact = holonomy::cos_d(&basis, &coords).unwrap()[&(j, k)];
                let series = holonomy::cos_series_factor(&conn, &basis, j, k).unwrap();
                worst = worst.max((exact - series).norm() / exact.norm());
            }
        }
        sandwich = sandwich.max(holonomy::cosh_sandwich_violation(&basis));
    }
    verdict(worst <= 1e-8 && sandwich <= 0.0, format!("route gap {worst:.1e}, sandwich violation {sandwich:.1e}"))
}

fn chain_rule() -> Verdict {
    let mut rng = sample::rng_for(SEED, "chain_rule");
    let config = TruncationConfig::new(32, 2).unwrap();
    let conn = smooth_connection(&mut rng);
    let alpha = scenarios::random_polynomial_loop(config, 1, 3, &mut rng).unwrap();
    let mut chain: f64 = 0.0;
    for eps in [0.05, 0.1] {
        let phi = scenarios::sine_reparametrization(eps, 32).unwrap();
        chain = chain.max(holonomy::chain_rule_residual(&conn, &alpha, &phi, 4).unwrap());
    }
    let basis = holonomy::pol_fibre_basis(&conn, 4, config).unwrap();
    let (mut kept, mut broken) = (0.0f64, 0.0f64);
    let rotation = scenarios::rotation_reparametrization(rng.random(), 32).unwrap();
    let sine = scenarios::sine_reparametrization(0.1, 32).unwrap();
    for (j, k) in basis.modes() {
        let f = basis.mode_function(j, k).value;
        let (c1, moved1) = holonomy::reparametrize(&conn, &f, &rotation, 4).unwrap();
        kept = kept.max(holonomy::pol_fibre_basis(&c1, 4, config).unwrap().project(&moved1).unwrap().1);
        let (c2, moved2) = holonomy::reparametrize(&conn, &f, &sine, 4).unwrap();
        broken = broken.max(holonomy::pol_fibre_basis(&c2, 4, config).unwrap().project(&moved2).unwrap().1);
    }
    verdict(
        chain <= 1e-6 && kept <= 1e-9 && broken > 1e-3,
        format!("chain rule {chain:.1e}, rotation tail {kept:.1e}, reparametrization tail {broken:.1e}"),
    )
}

fn polarisation_rank() -> Verdict {
    let mut ranks = Vec::new();
    let mut pass = true;
    for n in [1, 2] {
        for k in [1, 3, 6] {
            let d = polarisation_compare(
                &PolarisingOperator::complex(2 * n, k),
                &PolarisingOperator::standard(2 * n, k).unwrap(),
            )
            .unwrap();
            pass &= d.rank == n;
            ranks.push(format!("2n={} K={k}: {}", 2 * n, d.rank));
        }
    }
    verdict(pass, format!("ranks {}", ranks.join(", ")))
}

fn dirac_assembly() -> Verdict {
    let start = Instant::now();
    let mut rng = sample::rng_for(SEED, "dirac");
    let cfg = DiracConfig::new(FockSpace::new(ModeSpace::new(1, 3, None).unwrap(), 4));
    let modes = &cfg.space.modes;
    let (mut flipped, mut routes) = (0usize, 0.0f64);
    for _ in 0..50 {
        let s = dirac::random_even_section(&cfg, 3, 4, &mut rng);
        let x = dirac::random_point(&cfg, &mut rng);
        let a = dirac::dirac(&s, &cfg, &x).unwrap().value;
        let b = dirac::dirac_naive(&s, &cfg, &x).unwrap().value;
        flipped += a.has_parity(Parity::Odd) as usize;
        routes = routes.max(a.sub(&b).norm(modes) / (1.0 + a.norm(modes)));
    }
    let mut equivariance: f64 = 0.0;
    let s = dirac::random_even_section(&cfg, 2, 4, &mut rng);
    let x = dirac::random_point(&cfg, &mut rng);
    for _ in 0..20 {
        let l = sample::unit_complex(&mut rng);
        equivariance = equivariance.max(dirac::equivariance_check(&s, &cfg, l, &x).unwrap());
    }
    let (fast, time) = within(start.elapsed(), 30.0);
    verdict(
        flipped == 50 && routes <= 1e-12 && equivariance <= 1e-10 && fast,
        format!("parity flipped {flipped}/50, routes {routes:.1e}, equivariance {equivariance:.1e}, {time}"),
    )
}

fn growth_witness() -> Verdict {
    let families = [
        WeightSequence::geometric(2.0, 1.0, 16).unwrap(),
        WeightSequence::geometric(TAU.exp(), 1.0, 16).unwrap(),
        WeightSequence::cosh_squared(16),
    ];
    let increasing =
        families.iter().all(|a| weights::strictly_increasing(&weights::unbounded_growth_witness(a, 8).unwrap()));
    let table = weights::unbounded_growth_witness(&families[0], 8).unwrap();
    let worst = table.iter().map(|(q, v)| ((v - 2f64.powf(*q as f64 / 2.0)) / v).abs()).fold(0.0, f64::max);
    verdict(
        increasing && worst <= 2.0 * f64::EPSILON,
        format!("strictly increasing: {increasing}, geometric deviation from 2^(q/2) {worst:.1e}"),
    )
}

fn verify_all_deterministic() -> Verdict {
    let start = Instant::now();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_loopforge"))
            .args(["verify", "all"])
            .env_remove("LOOPFORGE_SEED")
            .output()
            .expect("binary runs")
    };
    let a = run();
    let b = run();
    let per_run = start.elapsed() / 2;
    let (fast, time) = within(per_run, 120.0);
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    verdict(
        identical && a.status.success() && fast,
        format!(
            "identical {identical}, exit {}, {} bytes, per run {time}",
            a.status.code().unwrap_or(-1),
            a.stdout.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("CAR relations and Clifford square at (n, K, cap) = (2, 3, 6)", car_suite),
        ("sector logarithm round trip and strip on U2, U3, U4", sector_log),
        ("quotient of two logarithms of the same element is polynomial", quotient_theorem),
        ("SO4 section projects, stays orthogonal and is polynomial", son_section),
        ("z-norm formula agrees with the SVD of the weighted shift", z_norm),
        ("cos D eigen-action agrees with its cosine series; cosh sandwich holds", cos_eigen_action),
        ("reparametrization chain rule; rotation keeps and sine breaks the fibre", chain_rule),
        ("J_C - J_R has rank n for every window", polarisation_rank),
        ("Dirac grading, two routes and rotation equivariance at (1, 3, 4)", dirac_assembly),
        ("z^q norms grow strictly; geometric family equals 2^(q/2)", growth_witness),
        ("verify all is byte-identical across runs and fast", verify_all_deterministic),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failed += !v.pass as usize;
        println!("criterion {:>2} {}: {name} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
