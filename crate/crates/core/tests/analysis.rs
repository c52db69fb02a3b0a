use std::f64::consts::{FRAC_2_PI, PI};

use magnoncat::analysis::*;
use magnoncat::hilbert::*;
use magnoncat::protocol::{ideal_bell_cat, AnalyticCat};
use magnoncat::{Complex, Scalar};
use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn random_ket(rng: &mut ChaCha8Rng, n: usize) -> CVector<f64> {
    let v = CVector::from_shape_fn(n, |_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let norm = vector_norm(&v);
    v.mapv(|z| z / norm)
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    let g = Array2::from_shape_fn((n, n), |_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = g.dot(&dagger(&g));
    let tr = m.diag().sum().re;
    m.mapv(|z| z / tr)
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    let g = Array2::from_shape_fn((n, n), |_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let herm = (&g + &dagger(&g)).mapv(|z| z / 2.0);
    let (vals, vecs) = f64::eigh(&herm).unwrap();
    Array2::from_shape_fn((n, n), |(r, k)| {
        (0..n).map(|j| vecs[[r, j]] * c(0.0, -vals[j]).exp() * vecs[[k, j]].conj()).sum()
    })
}

fn pure(dims: Dims, psi: &CVector<f64>) -> DensityMatrix<f64> {
    DensityMatrix::from_ket(dims, psi).unwrap()
}

/// `<u|v>` for coherent states.
fn coherent_overlap(u: C, v: C) -> C {
    (-(u.norm_sqr() + v.norm_sqr()) / 2.0 + u.conj() * v).exp()
}

/// Closed-form Wigner function of the untruncated pure state
/// `sum_k c_k |a_k>` built from coherent-state overlaps:
/// `(2/pi) <psi| D(alpha) P D(-alpha) |psi>`, `P|a> = |-a>`.
fn coherent_sum_wigner(terms: &[(C, C)], alpha: C) -> f64 {
    let shifted: Vec<(C, C)> = terms
        .iter()
        .map(|&(amp, a)| {
            // D(-alpha)|a> = exp((alpha^* a - alpha a^*)/2) |a - alpha>
            let phase = ((alpha.conj() * a - alpha * a.conj()) / 2.0).exp();
            (amp * phase, a - alpha)
        })
        .collect();
    let mut acc = c(0.0, 0.0);
    for &(ca, a) in &shifted {
        for &(cb, b) in &shifted {
            acc += ca.conj() * cb * coherent_overlap(a, -b);
        }
    }
    FRAC_2_PI * acc.re
}

fn even_cat_terms(beta: C, theta: f64) -> Vec<(C, C)> {
    let overlap = coherent_overlap(c(0.0, 0.0), beta);
    let norm = (2.0 + 2.0 * (c(0.0, theta).exp() * overlap).re).sqrt();
    vec![(c(1.0 / norm, 0.0), c(0.0, 0.0)), (c(0.0, theta).exp() / norm, beta)]
}

#[test]
fn negativity_examples() {
    let two = SpaceDims::new(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let product = kron_vec(&random_ket(&mut rng, 2), &random_ket(&mut rng, 2));
    assert!(log_negativity(&pure(Dims::Composite(two), &product)).unwrap().abs() < 1e-9);

    let mut bell = CVector::from_elem(4, c(0.0, 0.0));
    bell[0] = c(0.5f64.sqrt(), 0.0);
    bell[3] = c(0.5f64.sqrt(), 0.0);
    assert!((log_negativity(&pure(Dims::Composite(two), &bell)).unwrap() - 1.0).abs() < 1e-9);

    let dims = SpaceDims::new(3, 80).unwrap();
    let cat = AnalyticCat { beta: c(0.0, -6.0), theta: 0.4 };
    let psi = ideal_bell_cat(&cat, dims);
    let en = log_negativity(&pure(Dims::Composite(dims), &psi)).unwrap();
    assert!((en - 1.0).abs() < 1e-3);
}

#[test]
fn negativity_of_mixed_product_is_zero() {
    let dims = SpaceDims::new(3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        let m = kron(&random_density(&mut rng, 3), &random_density(&mut rng, 4));
        let rho = DensityMatrix::new(Dims::Composite(dims), m).unwrap();
        assert!(log_negativity(&rho).unwrap().abs() < 1e-9);
        assert!(log_negativity_wrt(&rho, Subsystem::Magnon).unwrap().abs() < 1e-9);
    }
}

#[test]
fn negativity_is_local_unitary_invariant() {
    let dims = SpaceDims::new(3, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let psi = random_ket(&mut rng, 15);
        let mixed = outer(&psi, &psi).mapv(|z| z * 0.7) + random_density(&mut rng, 15).mapv(|z| z * 0.3);
        let rho = DensityMatrix::new(Dims::Composite(dims), mixed.clone()).unwrap();
        let u = kron(&random_unitary(&mut rng, 3), &random_unitary(&mut rng, 5));
        let rotated = DensityMatrix::new(Dims::Composite(dims), u.dot(&mixed).dot(&dagger(&u))).unwrap();
        let (a, b) = (log_negativity(&rho).unwrap(), log_negativity(&rotated).unwrap());
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn fidelity_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let psi = random_ket(&mut rng, 6);
    let rho = pure(Dims::Single(6), &psi);
    assert!((fidelity_pure(&rho, &psi).unwrap() - 1.0).abs() < 1e-12);

    let e0 = basis::<f64>(6, 0);
    let e1 = basis::<f64>(6, 1);
    let rho1 = pure(Dims::Single(6), &e1);
    assert_eq!(fidelity_pure(&rho1, &e0).unwrap(), 0.0);

    let half = DensityMatrix::new(Dims::Single(6), (outer(&e0, &e0) + outer(&e1, &e1)).mapv(|z| z * 0.5)).unwrap();
    assert!((fidelity_pure(&half, &e0).unwrap() - 0.5f64.sqrt()).abs() < 1e-9);

    assert!(fidelity_pure(&half, &e0.mapv(|z| z * 2.0)).is_err());
    assert!(fidelity_pure(&half, &basis(5, 0)).is_err());
}

#[test]
fn cat_size_examples() {
    assert_eq!(cat_size(c(0.0, 0.0)), 0.0);
    assert!((cat_size(c(0.0, -6.4)) - 40.96).abs() < 1e-12);
    let beta = c(1.3, -2.1);
    assert!((cat_size(beta * c(0.0, 0.7).exp()) - cat_size(beta)).abs() < 1e-12);
}

#[test]
fn vacuum_wigner() {
    let vac = pure(Dims::Single(20), &basis(20, 0));
    assert!((wigner_point(&vac, c(0.0, 0.0)).unwrap() - FRAC_2_PI).abs() < 1e-6);
    assert!((wigner_point(&vac, c(1.0, 0.0)).unwrap() - FRAC_2_PI * (-2.0f64).exp()).abs() < 1e-5);
    let grid = wigner(&vac, &GridSpec::square(4.0, 81)).unwrap();
    assert!((grid.max() - FRAC_2_PI).abs() < 1e-4);
    assert_eq!(grid.argmax(), (0.0, 0.0));
    assert!((grid.riemann_sum() - 1.0).abs() < 1e-3);
}

#[test]
fn cat_wigner_matches_closed_form() {
    let (beta, theta, dim) = (c(0.0, 4.0), 0.0, 80);
    let rho = pure(Dims::Single(dim), &cat_state(beta, theta, ParitySign::Even, dim).unwrap());
    let terms = even_cat_terms(beta, theta);
    for alpha in [c(0.0, 0.0), c(0.3, 2.0), c(-0.1, 1.9), c(1.0, -0.5), c(0.2, 4.1), c(-2.0, 3.0)] {
        let got = wigner_point(&rho, alpha).unwrap();
        let expect = coherent_sum_wigner(&terms, alpha);
        assert!((got - expect).abs() < 1e-8, "alpha = {alpha}: {got} vs {expect}");
    }
    let grid = wigner(&rho, &GridSpec::for_cat(beta)).unwrap();
    assert!(grid.min() < -0.1);
    let sum = grid.riemann_sum();
    assert!((0.95..=1.01).contains(&sum), "{sum}");
    assert!(!grid.truncation_suspect);
}

#[test]
fn wigner_agrees_with_explicit_displacement() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let dim = 30;
    let rho = DensityMatrix::new(Dims::Single(dim), random_density(&mut rng, dim)).unwrap();
    let parity = mode_operators::<f64>(dim).unwrap().parity;
    for alpha in [c(0.2, -0.1), c(-0.4, 0.3), c(0.0, 0.5)] {
        // the truncated operator is only exact deep inside the space, so keep
        // |2 alpha| small and the oracle dimension large
        let big = 120;
        let d = displacement_op(alpha * 2.0, big).unwrap();
        let mut expect = c(0.0, 0.0);
        for n in 0..dim {
            for m in 0..dim {
                expect += rho.matrix()[[n, m]] * d[[m, n]] * parity[[n, n]];
            }
        }
        let got = wigner_point(&rho, alpha).unwrap();
        assert!((got - FRAC_2_PI * expect.re).abs() < 1e-9);
    }
}

#[test]
fn wigner_of_coherent_state_is_gaussian() {
    let a = c(1.5, -0.7);
    let rho = pure(Dims::Single(50), &coherent_state(a, 50));
    for alpha in [a, c(0.0, 0.0), c(2.0, 0.0)] {
        let expect = FRAC_2_PI * (-2.0 * (alpha - a).norm_sqr()).exp();
        assert!((wigner_point(&rho, alpha).unwrap() - expect).abs() < 1e-8);
    }
}

#[test]
fn wigner_rejects_composite_and_keeps_flag() {
    let dims = SpaceDims::new(2, 4).unwrap();
    let joint = pure(Dims::Composite(dims), &basis(8, 0));
    assert!(wigner_point(&joint, c(0.0, 0.0)).is_err());
    let clipped = pure(Dims::Single(10), &coherent_state(c(3.0, 0.0), 10));
    assert!(wigner(&clipped, &GridSpec::square(2.0, 5)).unwrap().truncation_suspect);
    assert!(wigner(&clipped, &GridSpec::square(2.0, 1)).is_err());
}

#[test]
fn wigner_grid_layout() {
    // a state displaced along +im must peak on a positive imaginary row
    let rho = pure(Dims::Single(30), &coherent_state(c(0.0, 1.0), 30));
    let spec = GridSpec { re: (-2.0, 2.0), im: (-2.0, 2.0), n_re: 41, n_im: 21 };
    let grid = wigner(&rho, &spec).unwrap();
    assert_eq!(grid.values.dim(), (21, 41));
    let (x, y) = grid.argmax();
    assert!(x.abs() < 1e-12 && (y - 1.0).abs() < 1e-12);
    let _ = PI;
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fidelities_to_orthonormal_pair_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 5;
        let rho = DensityMatrix::new(Dims::Single(n), random_density(&mut rng, n)).unwrap();
        let u = random_unitary(&mut rng, n);
        let psi = u.column(0).to_owned();
        let perp = u.column(1).to_owned();
        let f1 = fidelity_pure(&rho, &psi).unwrap();
        let f2 = fidelity_pure(&rho, &perp).unwrap();
        prop_assert!(f1 * f1 + f2 * f2 <= 1.0 + 1e-8);
    }

    #[test]
    fn wigner_is_real_and_bounded(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = DensityMatrix::new(Dims::Single(12), random_density(&mut rng, 12)).unwrap();
        let w = wigner_point(&rho, c(re, im)).unwrap();
        prop_assert!(w.abs() <= FRAC_2_PI + 1e-9);
    }
}
