use std::f64::consts::TAU;

use magnoncat::dynamics::*;
use magnoncat::hilbert::*;
use magnoncat::{Complex, Error, Scalar};
use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn dims(q: usize, m: usize) -> SpaceDims {
    SpaceDims::new(q, m).unwrap()
}

fn random_density(rng: &mut ChaCha8Rng, d: SpaceDims) -> DensityMatrix<f64> {
    let n = d.total();
    let g = Array2::from_shape_fn((n, n), |_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = g.dot(&dagger(&g));
    let tr = m.diag().sum().re;
    DensityMatrix::new(Dims::Composite(d), m.mapv(|z| z / tr)).unwrap()
}

fn product(q: &CVector<f64>, m: &CVector<f64>, d: SpaceDims) -> DensityMatrix<f64> {
    DensityMatrix::from_ket(Dims::Composite(d), &kron_vec(q, m)).unwrap()
}

fn noisy() -> NoiseConfig<f64> {
    NoiseConfig { kappa: 0.3, n_th: 0.2, t1: 4.0, t2: 6.0, dephasing: Dephasing::Literal }
}

fn max_abs_diff(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn magnon_lowering(d: SpaceDims) -> CMatrix<f64> {
    kron(&identity(d.qubit), &mode_operators(d.magnon).unwrap().annihilate)
}

fn apply_generator(gen: &Generator<f64>, rho: &DensityMatrix<f64>) -> CMatrix<f64> {
    let n = gen.dim();
    let flat: Vec<C> = rho.matrix().iter().copied().collect();
    let mut scratch = vec![c(0.0, 0.0); n * n];
    let mut out = vec![c(0.0, 0.0); n * n];
    gen.apply(&flat, &mut scratch, &mut out);
    Array2::from_shape_vec((n, n), out).unwrap()
}

#[test]
fn hamiltonian_examples() {
    let d = dims(3, 5);
    let bare = build_hamiltonian(&HamiltonianModel::new(d, 0.0, 0.0, 200.0));
    for i in 0..d.total() {
        for j in 0..d.total() {
            if i != j {
                assert_eq!(bare[[i, j]], c(0.0, 0.0));
            }
        }
    }
    assert_eq!(bare[[d.index(2, 3), d.index(2, 3)]], c(-200.0, 0.0));
    assert_eq!(bare[[d.index(1, 0), d.index(1, 0)]], c(0.0, 0.0));

    let d = dims(2, 2);
    let h = build_hamiltonian(&HamiltonianModel::new(d, 0.0, 0.7, 200.0));
    let block = Array2::from_shape_fn((2, 2), |(a, b)| h[[d.index(1, a), d.index(1, b)]]);
    let vals = f64::eigvalsh(&block).unwrap();
    assert!((vals[0] + 0.7).abs() < 1e-12 && (vals[1] - 0.7).abs() < 1e-12);

    let d = dims(3, 6);
    let h = build_hamiltonian(&HamiltonianModel::new(d, 0.3, 0.5, 200.0));
    for a in 0..6 {
        for b in 0..6 {
            assert_eq!(h[[d.index(0, a), d.index(1, b)]], c(0.0, 0.0));
        }
    }
    assert!(hermiticity_error(&h) == 0.0);
}

#[test]
fn rhs_vanishes_without_dynamics() {
    let d = dims(2, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rho = random_density(&mut rng, d);
    let zero = Array2::from_elem((8, 8), c(0.0, 0.0));
    let rhs = lindblad_rhs(&rho, &zero, &NoiseConfig::none()).unwrap();
    assert!(rhs.iter().all(|z| *z == c(0.0, 0.0)));
}

#[test]
fn rhs_t1_decay_rate() {
    let d = dims(2, 3);
    let rho = product(&basis(2, 1), &basis(3, 0), d);
    let h = build_hamiltonian(&HamiltonianModel::new(d, 0.0, 0.0, 200.0));
    let noise = NoiseConfig { t1: 2.5, ..NoiseConfig::none() };
    let rhs = lindblad_rhs(&rho, &h, &noise).unwrap();
    let nq = kron(&mode_operators::<f64>(2).unwrap().number, &identity(3));
    let rate: C = rhs.dot(&nq).diag().sum();
    assert!((rate.re + 1.0 / 2.5).abs() < 1e-14);
}

#[test]
fn generator_matches_literal_rhs() {
    let d = dims(3, 6);
    let model = HamiltonianModel { magnon_drive: 0.2, ..HamiltonianModel::new(d, 0.4, 0.9, 200.0) };
    let h = build_hamiltonian(&model);
    for dephasing in [Dephasing::Literal, Dephasing::PureFromT2] {
        let noise = NoiseConfig { dephasing, ..noisy() };
        let gen = Generator::new(&h, d, &noise).unwrap();
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density(&mut rng, d);
            let fast = apply_generator(&gen, &rho);
            let slow = lindblad_rhs(&rho, &h, &noise).unwrap();
            assert!(max_abs_diff(&fast, &slow) < 1e-11);
        }
    }
}

#[test]
fn collapse_channels_follow_configuration() {
    let d = dims(3, 4);
    assert!(collapse_operators::<f64>(d, &NoiseConfig::none()).unwrap().is_empty());
    let ops = collapse_operators(d, &noisy()).unwrap();
    assert_eq!(ops.len(), 4);
    assert!((ops[0].0 - TAU * 0.3 * 1.2).abs() < 1e-14);
    assert!((ops[1].0 - TAU * 0.3 * 0.2).abs() < 1e-14);
    assert!((ops[2].0 - 0.25).abs() < 1e-15);
    assert!((ops[3].0 - 1.0 / 6.0).abs() < 1e-15);
    let pure = NoiseConfig { dephasing: Dephasing::PureFromT2, ..noisy() };
    assert!((pure.dephasing_rate() - 2.0 * (1.0 / 6.0 - 1.0 / 8.0)).abs() < 1e-15);
    assert!(NoiseConfig { t1: 0.0, ..noisy() }.validate().is_err());
    assert!(NoiseConfig { kappa: -1.0, ..noisy() }.validate().is_err());
}

#[test]
fn frozen_without_dynamics() {
    let d = dims(2, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rho = random_density(&mut rng, d);
    let model = HamiltonianModel { ec: 0.0, ..HamiltonianModel::new(d, 0.0, 0.0, 0.0) };
    let opts = EvolveOptions { record_every: 10, ..EvolveOptions::new(0.5, 1e-3) };
    let traj = evolve(&rho, &model, &NoiseConfig::none(), &opts, &[&Purity, &MagnonNumber]).unwrap();
    for row in &traj.rows {
        assert_eq!(row, &traj.rows[0]);
    }
    let sym = (rho.matrix() + &dagger(rho.matrix())).mapv(|z| z / 2.0);
    assert_eq!(traj.final_state.matrix(), &sym);
}

#[test]
fn magnon_amplitude_decay() {
    // <m>(t) = alpha0 exp(-pi kappa t - 2 pi i delta t), independent of n_th
    let d = dims(2, 40);
    let (alpha0, kappa, delta) = (c(2.0, 0.5), 1.0, 0.1);
    let rho = product(&basis(2, 0), &coherent_state(alpha0, 40), d);
    let model = HamiltonianModel::new(d, delta, 0.0, 200.0);
    let lower = magnon_lowering(d);
    let re = FnObservable::new("re", |_t: f64, r: &DensityMatrix<f64>| Ok(r.expectation(&lower)?.re));
    let im = FnObservable::new("im", |_t: f64, r: &DensityMatrix<f64>| Ok(r.expectation(&lower)?.im));
    let lifetime = 1.0 / (std::f64::consts::PI * kappa);
    for n_th in [0.0, 0.15] {
        let noise = NoiseConfig { kappa, n_th, ..NoiseConfig::none() };
        let opts = EvolveOptions { record_every: 50, ..EvolveOptions::new(3.0 * lifetime, 1e-3) };
        let traj = evolve(&rho, &model, &noise, &opts, &[&re, &im]).unwrap();
        let exact_start = coherent_state(alpha0, 40);
        let start = inner(&exact_start, &mode_operators(40).unwrap().annihilate.dot(&exact_start));
        for (t, row) in traj.times.iter().zip(&traj.rows) {
            let expect = start * (c(-std::f64::consts::PI * kappa, -TAU * delta) * *t).exp();
            assert!((c(row[0], row[1]) - expect).norm() < 1e-4, "t = {t}");
        }
    }
}

#[test]
fn qubit_relaxation() {
    let d = dims(3, 2);
    let rho = product(&basis(3, 1), &basis(2, 0), d);
    let model = HamiltonianModel::new(d, 0.0, 0.0, 200.0);
    let t1 = 1.5;
    let noise = NoiseConfig { t1, ..NoiseConfig::none() };
    let opts = EvolveOptions { record_every: 100, ..EvolveOptions::new(t1, 1e-3) };
    let level = QubitLevel { level: 1, name: "p1".into() };
    let traj = evolve(&rho, &model, &noise, &opts, &[&level]).unwrap();
    for (t, row) in traj.times.iter().zip(&traj.rows) {
        assert!((row[0] - (-t / t1).exp()).abs() < 1e-5);
    }
    assert!((traj.rows.last().unwrap()[0] - (-1.0f64).exp()).abs() < 1e-5);
}

fn order_check_run(dt: f64) -> f64 {
    let d = dims(2, 20);
    let plus = basis::<f64>(2, 0).mapv(|z| z * 0.5f64.sqrt()) + basis::<f64>(2, 1).mapv(|z| z * 0.5f64.sqrt());
    let rho = product(&plus, &coherent_state(c(0.5, 0.0), 20), d);
    let model = HamiltonianModel::new(d, 0.5, 1.0, 200.0);
    let noise = NoiseConfig { kappa: 0.2, n_th: 0.1, t1: 5.0, t2: 5.0, dephasing: Dephasing::Literal };
    let lower = magnon_lowering(d);
    let re = FnObservable::new("re", |_t: f64, r: &DensityMatrix<f64>| Ok(r.expectation(&lower)?.re));
    let opts = EvolveOptions { record_every: 1_000_000, ..EvolveOptions::new(0.8, dt) };
    *evolve(&rho, &model, &noise, &opts, &[&re]).unwrap().rows.last().unwrap().first().unwrap()
}

#[test]
fn rk4_is_fourth_order() {
    let dt = 8e-4;
    let (a, b, cc) = (order_check_run(dt), order_check_run(dt / 2.0), order_check_run(dt / 4.0));
    let ratio = (a - b) / (b - cc);
    assert!((ratio - 16.0).abs() <= 0.3 * 16.0, "ratio {ratio}");
}

#[test]
fn step_halving_changes_little() {
    let d = dims(3, 30);
    let plus = basis::<f64>(3, 0).mapv(|z| z * 0.5f64.sqrt()) + basis::<f64>(3, 1).mapv(|z| z * 0.5f64.sqrt());
    let rho = product(&plus, &basis(30, 0), d);
    let model = HamiltonianModel::new(d, 0.0, 0.5112549654, 200.0);
    let noise = NoiseConfig { kappa: 0.005, n_th: 0.0083, t1: 20.0, t2: 20.0, dephasing: Dephasing::Literal };
    let run = |dt: f64, every: usize| {
        let opts = EvolveOptions { record_every: every, ..EvolveOptions::new(1.0, dt) };
        evolve(&rho, &model, &noise, &opts, &[&Purity, &MagnonNumber, &QubitNumber]).unwrap()
    };
    let coarse = run(1e-3, 100);
    let fine = run(5e-4, 200);
    assert_eq!(coarse.len(), fine.len());
    for (a, b) in coarse.rows.iter().zip(&fine.rows) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-6);
        }
    }
}

#[test]
fn closed_system_conserves_purity_and_energy() {
    let d = dims(3, 40);
    let plus = basis::<f64>(3, 0).mapv(|z| z * 0.5f64.sqrt()) + basis::<f64>(3, 1).mapv(|z| z * 0.5f64.sqrt());
    let rho = product(&plus, &coherent_state(c(0.3, 0.2), 40), d);
    let model = HamiltonianModel::new(d, 0.15, 0.5, 200.0);
    let h = build_hamiltonian(&model);
    let energy = FnObservable::new("E", |_t: f64, r: &DensityMatrix<f64>| Ok(r.expectation(&h)?.re));
    let opts = EvolveOptions { record_every: 50, ..EvolveOptions::new(1.0, 1e-3) };
    let traj = evolve(&rho, &model, &NoiseConfig::none(), &opts, &[&Purity, &energy]).unwrap();
    let e0 = traj.rows[0][1];
    for row in &traj.rows {
        assert!((row[0] - 1.0).abs() < 1e-8);
        assert!((row[1] - e0).abs() <= 1e-8 * e0.abs().max(1.0));
    }
    assert!((traj.final_state.trace().re - 1.0).abs() < 1e-8);
    assert!(traj.final_state.hermiticity_error() < 1e-10);
}

#[test]
fn uncoupled_subsystems_evolve_independently() {
    let d = dims(3, 25);
    let model = HamiltonianModel::new(d, 0.2, 0.0, 200.0);
    let noise = noisy();
    let opts = EvolveOptions::new(0.6, 1e-3);
    let plus = basis::<f64>(3, 0).mapv(|z| z * 0.6) + basis::<f64>(3, 1).mapv(|z| c(0.0, 0.8) * z.re);
    let alpha = coherent_state(c(1.0, -0.5), 25);
    let thermal = thermal_density(noise.n_th, 25).unwrap();

    let joint = evolve(&product(&plus, &alpha, d), &model, &noise, &opts, &[]).unwrap().final_state;

    // transmon alone: magnon parked in its stationary thermal state
    let q0 = outer(&plus, &plus);
    let park_m = DensityMatrix::from_raw(Dims::Composite(d), kron(&q0, thermal.matrix())).unwrap();
    let q_only = evolve(&park_m, &model, &noise, &opts, &[]).unwrap().final_state;
    let rho_q = partial_trace(&q_only, Subsystem::Qubit).unwrap();
    // magnon alone: transmon parked in its ground state
    let m_only = evolve(&product(&basis(3, 0), &alpha, d), &model, &noise, &opts, &[]).unwrap().final_state;
    let rho_m = partial_trace(&m_only, Subsystem::Magnon).unwrap();

    assert!(max_abs_diff(joint.matrix(), &kron(rho_q.matrix(), rho_m.matrix())) < 1e-10);
}

#[test]
fn unital_noise_never_raises_purity() {
    let d = dims(3, 8);
    let plus = basis::<f64>(3, 0).mapv(|z| z * 0.5f64.sqrt()) + basis::<f64>(3, 1).mapv(|z| z * 0.5f64.sqrt());
    let rho = product(&plus, &coherent_state(c(0.5, 0.0), 8), d);
    let model = HamiltonianModel::new(d, 0.1, 0.4, 200.0);
    let noise = NoiseConfig { t2: 0.5, ..NoiseConfig::none() };
    let opts = EvolveOptions { record_every: 20, ..EvolveOptions::new(1.0, 1e-3) };
    let traj = evolve(&rho, &model, &noise, &opts, &[&Purity]).unwrap();
    for w in traj.rows.windows(2) {
        assert!(w[1][0] <= w[0][0] + 1e-12);
    }
    assert!(traj.rows.last().unwrap()[0] < 0.99);
}

#[test]
fn purity_examples() {
    let pure = DensityMatrix::from_ket(Dims::Single(4), &basis::<f64>(4, 2)).unwrap();
    assert!((purity(&pure) - 1.0).abs() < 1e-15);
    let mixed = DensityMatrix::new(Dims::Single(4), identity::<f64>(4).mapv(|z| z * 0.25)).unwrap();
    assert!((purity(&mixed) - 0.25).abs() < 1e-15);
}

#[test]
fn step_guard_and_snapshots() {
    let d = dims(3, 60);
    let plus = basis::<f64>(3, 0).mapv(|z| z * 0.5f64.sqrt()) + basis::<f64>(3, 1).mapv(|z| z * 0.5f64.sqrt());
    let rho = product(&plus, &basis(60, 0), d);
    let model = HamiltonianModel::new(d, 0.0, 1.0, 200.0);
    let err = evolve(&rho, &model, &NoiseConfig::none(), &EvolveOptions::new(0.1, 2e-2), &[]).unwrap_err();
    assert!(matches!(err, Error::StepTooLarge { .. }));

    let opts = EvolveOptions { snapshot_times: vec![0.0, 0.05, 0.1], ..EvolveOptions::new(0.1, 1e-3) };
    let traj = evolve(&rho, &model, &noisy(), &opts, &[]).unwrap();
    let times: Vec<f64> = traj.snapshots.iter().map(|(t, _)| *t).collect();
    assert_eq!(times.len(), 3);
    assert!((times[1] - 0.05).abs() < 1e-12);

    let wrong = product(&basis(2, 0), &basis(60, 0), dims(2, 60));
    assert!(evolve(&wrong, &model, &NoiseConfig::none(), &EvolveOptions::new(0.1, 1e-3), &[]).is_err());
    let bad_dt = EvolveOptions::new(0.1, 0.0);
    assert!(evolve(&rho, &model, &NoiseConfig::none(), &bad_dt, &[]).is_err());
}

#[test]
fn single_precision_run() {
    let d = dims(2, 10);
    let plus = basis::<f32>(2, 0).mapv(|z| z * 0.5f32.sqrt()) + basis::<f32>(2, 1).mapv(|z| z * 0.5f32.sqrt());
    let rho = DensityMatrix::from_ket(Dims::Composite(d), &kron_vec(&plus, &basis(10, 0))).unwrap();
    let model = HamiltonianModel::new(d, 0.0f32, 0.5, 200.0);
    let traj = evolve(&rho, &model, &NoiseConfig::none(), &EvolveOptions::new(0.2f32, 1e-3), &[&Purity]).unwrap();
    assert!((traj.rows.last().unwrap()[0] - 1.0).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rhs_is_traceless_and_hermitian(seed in any::<u64>(), g in -2.0f64..2.0, delta in -1.0f64..1.0) {
        let d = dims(3, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, d);
        let h = build_hamiltonian(&HamiltonianModel::new(d, delta, g, 200.0));
        let rhs = lindblad_rhs(&rho, &h, &noisy()).unwrap();
        prop_assert!(rhs.diag().sum().norm() < 1e-12);
        prop_assert!(hermiticity_error(&rhs) < 1e-11);
        let gen = Generator::new(&h, d, &noisy()).unwrap();
        let fast = apply_generator(&gen, &rho);
        prop_assert!(fast.diag().sum().norm() < 1e-12);
        prop_assert!(hermiticity_error(&fast) == 0.0);
    }
}
