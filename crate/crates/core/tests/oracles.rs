use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use qwalk::linalg::{hermitian_eigenvalues, CMatrix};
use qwalk::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    let mut m = CMatrix::<f64>::zeros((n, n));
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in 0..i {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

#[test]
fn eigenvalues_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=24 {
        for _ in 0..4 {
            let m = random_hermitian(&mut rng, n);
            let ours = hermitian_eigenvalues(&m);
            let na = DMatrix::from_fn(n, n, |i, j| Complex::new(m[(i, j)].re, m[(i, j)].im));
            let mut theirs: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-11, "n={n}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn eigenvalues_of_walker_states_match_nalgebra() {
    let coin = CoinOperator64::parameterized(0.3, 1.1, 0.9).unwrap();
    let noise = NoiseChannel64::unital_decay(0.4).unwrap();
    let st = evolve_noisy(
        &coin,
        &CoinState64::balanced(0.5),
        &noise,
        &Topology64::line(40),
        40,
        None,
    )
    .unwrap();
    let rho = position_marginal(&st).rho;
    let n = rho.nrows();
    let na = DMatrix::from_fn(n, n, |i, j| Complex::new(rho[(i, j)].re, rho[(i, j)].im));
    let mut theirs: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
    theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (a, b) in hermitian_eigenvalues(&rho).iter().zip(&theirs) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn hadamard_spreads_ballistically() {
    let (_, v100) = variance(
        &position_marginal(
            &evolve_pure(
                &CoinOperator64::hadamard(),
                &CoinState64::plus(),
                &Topology64::line(100),
                100,
            )
            .unwrap(),
        )
        .distribution,
    );
    let (_, v200) = variance(
        &position_marginal(
            &evolve_pure(
                &CoinOperator64::hadamard(),
                &CoinState64::plus(),
                &Topology64::line(200),
                200,
            )
            .unwrap(),
        )
        .distribution,
    );
    let ratio = v200 / v100;
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn closed_form_agrees_with_engine_for_many_coins() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let coin = CoinOperator64::parameterized(
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.15..1.4),
        )
        .unwrap();
        let init = CoinState64::Pure {
            eta: rng.gen_range(0.0..FRAC_PI_2),
            gamma: rng.gen_range(0.0..2.0 * PI),
        };
        for tau in [0, 1, 2, 7, 25] {
            let a = closed_form_state(&coin, &init, tau).unwrap();
            let b = evolve_pure(&coin, &init, &Topology64::line(tau.max(1)), tau).unwrap();
            for i in 0..=tau {
                assert!((a.psi_plus()[i] - b.psi_plus()[i]).norm() < 1e-11);
                assert!((a.psi_minus()[i] - b.psi_minus()[i]).norm() < 1e-11);
            }
        }
    }
}

#[test]
fn decomposition_holds_for_hadamard() {
    let d = position_marginal(
        &evolve_pure(
            &CoinOperator64::hadamard(),
            &CoinState64::plus(),
            &Topology64::line(50),
            50,
        )
        .unwrap(),
    )
    .distribution;
    let t = bias_decomposition(&d, 50).unwrap();
    assert!((t.q - (t.d_vs_half - t.penalty)).abs() < 1e-9);
    assert!((t.penalty - t.penalty_entropy_form).abs() < 1e-9);
}

#[test]
fn unital_decay_turns_hadamard_diffusive() {
    let noise = NoiseChannel64::unital_decay(1.0).unwrap();
    let walk = NoisyWalk::new(&CoinOperator64::hadamard(), &noise, None).unwrap();
    let mut s = JointState64::initial(&CoinState64::plus(), Topology64::line(60), 0).unwrap();
    for tau in 1..=60 {
        walk.step(&mut s).unwrap();
        let (_, v) = variance(&position_marginal(&s).distribution);
        assert!((v - tau as f64).abs() < 1e-9, "tau {tau}: {v}");
    }
}

#[test]
fn loop_quantumness_agrees_between_paths() {
    let spec = LoopSpec64::new(9, 3, 1.0).unwrap();
    let coin = CoinOperator64::parameterized(0.0, 0.0, 1.0).unwrap();
    let noise = NoiseChannel64::unital_decay(0.5).unwrap();
    let st = evolve_noisy(
        &coin,
        &CoinState64::plus(),
        &noise,
        &Topology64::Loop(spec),
        40,
        Some(SinkChannel64::new(spec)),
    )
    .unwrap();
    let family = ClassicalFamily64::Loop { spec, start: 1 };
    let m = position_marginal(&st);
    let r = total_quantumness(&m, &family, 40).unwrap();
    assert!((r.total - r.total_direct).abs() < 1e-9);
    assert!((r.p_plus_star - r.p_plus_star_direct).abs() < 1e-6);
    // A finer scan never finds a better classical walk.
    let best = (0..=20_000)
        .map(|i| {
            kl_divergence(
                &m.distribution,
                &classical_loop_distribution(i as f64 / 20_000.0, &spec, 40, 1).unwrap(),
            )
        })
        .fold(f64::INFINITY, f64::min);
    assert!(r.q_value <= best + 1e-12);
}
