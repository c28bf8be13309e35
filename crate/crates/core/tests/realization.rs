use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectra_forge::realization::*;
use spectra_forge::spectrum::{count_roots, Region};
use spectra_forge::{Error, SolverConfig};

fn sqrt(x: f64) -> f64 {
    x.sqrt()
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let l = rng.gen_range(1..=left);
        sizes.push(l);
        left -= l;
    }
    sizes
}

fn random_weight(rng: &mut ChaCha8Rng) -> f64 {
    let mag = rng.gen_range(0.2..3.0);
    if rng.gen_bool(0.5) { mag } else { -mag }
}

/// Random target with the given group sizes and weights of matching shape.
fn random_instance(rng: &mut ChaCha8Rng, sizes: &[usize]) -> (FrequencyTarget, WeightTable) {
    let n: usize = sizes.iter().sum();
    let groups = sizes
        .iter()
        .map(|&l| (0..l).map(|_| rng.gen_range(0.3..3.0)).collect())
        .collect();
    let rows = (0..sizes.len()).map(|_| (0..n).map(|_| random_weight(rng)).collect()).collect();
    (FrequencyTarget::new(groups).unwrap(), WeightTable::new(rows).unwrap())
}

#[test]
fn index_vector_examples() {
    assert_eq!(index_vectors(1), vec![vec![1]]);
    assert_eq!(index_vectors(2), vec![vec![1, 1], vec![1, -1]]);
    assert_eq!(index_vectors(3), vec![vec![1, 1, 1], vec![1, 1, -1], vec![1, -1, -1]]);
    assert_eq!(cal_i(2), DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]));
    assert!(cal_i(4).determinant().abs() > 1.0);
}

#[test]
fn ib_examples() {
    let d3 = WeightTable::new(vec![vec![1.0, 2.0], vec![1.0, -1.0]]).unwrap();
    let t = FrequencyTarget::new(vec![vec![1.0], vec![sqrt(2.0)]]).unwrap();
    let ib = cal_i_b(&d3, &t).unwrap();
    assert_eq!(ib.matrix, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, -1.0]));
    assert!((ib.matrix.determinant() + 3.0).abs() < 1e-14);
    assert!((det_cal_i_b_lemma(&d3, &t).unwrap().abs() - 3.0).abs() < 1e-14);

    let scalar = FrequencyTarget::scalar(&[1.0, 1.3, 1.7, 2.1]).unwrap();
    let ib = cal_i_b(&WeightTable::ones(4), &scalar).unwrap();
    assert_eq!(ib.matrix, cal_i(4));

    // ℓ = (2, 1): the only minus sign is at (2, 2)
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (t, w) = random_instance(&mut rng, &[2, 1]);
    let ib = cal_i_b(&w, &t).unwrap();
    for i in 0..3 {
        for k in 0..3 {
            let expected = if (i, k) == (1, 1) { -1.0 } else { 1.0 };
            assert_eq!(ib.signs[(i, k)], expected);
        }
    }
}

#[test]
fn lemma_matches_lu_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let sizes = random_partition(&mut rng, n);
        let (t, w) = random_instance(&mut rng, &sizes);
        let lu = cal_i_b(&w, &t).unwrap().matrix.determinant();
        let lemma = det_cal_i_b_lemma(&w, &t).unwrap();
        assert!((lemma.abs() - lu.abs()).abs() <= 1e-10 * lu.abs(), "{sizes:?}: {lemma} vs {lu}");
        // the sign is exact as well
        assert!((lemma - lu).abs() <= 1e-10 * lu.abs());
    }
}

#[test]
fn base_point_examples() {
    let b = base_point(&FrequencyTarget::scalar(&[1.0]).unwrap(), &WeightTable::ones(1)).unwrap();
    assert_eq!(b.amplitudes, vec![1.0]);
    assert_eq!(b.target_angles, vec![vec![1.5 * PI]]);

    let b = base_point(&FrequencyTarget::scalar(&[1.0, sqrt(2.0)]).unwrap(), &WeightTable::ones(2)).unwrap();
    assert!((b.amplitudes[0] - (1.0 + sqrt(2.0)) / 2.0).abs() < 1e-15);
    assert!((b.amplitudes[1] - (1.0 - sqrt(2.0)) / 2.0).abs() < 1e-15);

    let d3 = WeightTable::new(vec![vec![1.0, 2.0], vec![1.0, -1.0]]).unwrap();
    let t = FrequencyTarget::new(vec![vec![1.0], vec![sqrt(2.0)]]).unwrap();
    let b = base_point(&t, &d3).unwrap();
    assert!((b.amplitudes[0] - (1.0 + 2.0 * sqrt(2.0)) / 3.0).abs() < 1e-15);
    assert!((b.amplitudes[1] - (1.0 - sqrt(2.0)) / 3.0).abs() < 1e-15);
}

#[test]
fn base_angles_give_i_times_ib() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let n = rng.gen_range(1..=6);
        let sizes = random_partition(&mut rng, n);
        let (t, w) = random_instance(&mut rng, &sizes);
        let ib = cal_i_b(&w, &t).unwrap();
        let rows = t.row_factors();
        for i in 0..n {
            for k in 0..n {
                let p = w.get(rows[i], k) * Complex64::new(0.0, -ib.target_angles[(i, k)]).exp();
                let expected = Complex64::new(0.0, ib.matrix[(i, k)]);
                assert!((p - expected).norm() < 1e-15 * w.get(rows[i], k).abs().max(1.0));
            }
        }
    }
}

#[test]
fn amplitudes_do_not_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut tested = 0;
    while tested < 100 {
        let n = rng.gen_range(1..=5);
        let sizes = random_partition(&mut rng, n);
        let (t, w) = random_instance(&mut rng, &sizes);
        if !independence_diagnostic(&t.flat(), 10, 1e-9).unwrap().is_empty() {
            continue;
        }
        let b = match base_point(&t, &w) {
            Ok(b) => b,
            // a random weight table can have singular 𝓑; that is a different hypothesis
            Err(Error::SingularIB { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let norm = t.flat().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(b.amplitudes.iter().all(|a| a.abs() > 1e-10 * norm), "{:?}", b.amplitudes);
        tested += 1;
    }
}

#[test]
fn independence_examples() {
    assert!(independence_diagnostic(&[1.0, 2.0], 2, 1e-9).unwrap().contains(&vec![2, -1]));
    assert!(independence_diagnostic(&[1.0, 1.0 + 1e-15], 2, 1e-9).unwrap().contains(&vec![1, -1]));
    // exhaustive scan oracle for (1, √2)
    let w = [1.0, sqrt(2.0)];
    let mut hits = 0;
    for c1 in -10i64..=10 {
        for c2 in -10i64..=10 {
            if (c1, c2) != (0, 0) && ((c1 as f64) * w[0] + (c2 as f64) * w[1]).abs() < 1e-9 * 3f64.sqrt() {
                hits += 1;
            }
        }
    }
    assert_eq!(hits, 0);
    assert!(independence_diagnostic(&w, 10, 1e-9).unwrap().is_empty());
}

#[test]
fn delay_search_matches_grid_scan() {
    let t = FrequencyTarget::scalar(&[1.0, sqrt(2.0)]).unwrap();
    let angles = [1.5 * PI, 1.5 * PI];
    let eps = 0.25;
    let hit = search_column(&t.flat(), &angles, eps, 10_000_000, 0.0, 0).unwrap();
    // independent evaluation of the angles
    for (w, th) in t.flat().iter().zip(angles) {
        let d = (w * hit.tau - th).rem_euclid(2.0 * PI);
        assert!(d.min(2.0 * PI - d) < eps);
    }
    // no window is skipped before the first grid hit
    let mut tau = 1e-3;
    let first = loop {
        if torus_distance(&t.flat(), &angles, tau) < eps {
            break tau;
        }
        tau += 1e-3;
    };
    assert!(hit.tau >= first - 1e-3, "{} before the first grid hit {first}", hit.tau);

    // exact single-frequency hits
    assert_eq!(search_column(&[1.0], &[1.5 * PI], 0.1, 1, 0.0, 0).unwrap().tau, 1.5 * PI);
    assert!((search_column(&[2.0], &[1.5 * PI], 0.1, 1, 0.0, 0).unwrap().tau - 0.75 * PI).abs() < 1e-15);
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..30 {
        let n = rng.gen_range(1..=5);
        let sizes = random_partition(&mut rng, n);
        let (t, w) = random_instance(&mut rng, &sizes);
        let taus: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..20.0)).collect();
        let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let jac = system_jacobian(&taus, &coeffs, &t, &w);
        let split = |r: Vec<Complex64>| -> DVector<f64> {
            DVector::from_fn(2 * n, |i, _| if i < n { r[i].re } else { r[i - n].im })
        };
        let h = 1e-6;
        for col in 0..2 * n {
            let (mut tp, mut tm, mut cp, mut cm) = (taus.clone(), taus.clone(), coeffs.clone(), coeffs.clone());
            if col < n {
                tp[col] += h;
                tm[col] -= h;
            } else {
                cp[col - n] += h;
                cm[col - n] -= h;
            }
            let fd = (split(system_residual(&tp, &cp, &t, &w)) - split(system_residual(&tm, &cm, &t, &w))) / (2.0 * h);
            let exact = jac.column(col);
            let err = (fd - exact).norm();
            assert!(err < 1e-6 * (1.0 + exact.norm()), "column {col}: {err}");
        }
    }
}

/// 𝓣 from its definition: DG_Ψ = first n rows of −J⁻¹K for the system in
/// free angles, then det(DG_Ψ W_1ᵀ … DG_Ψ W_{n−1}ᵀ ωᵀ).
fn transversality_direct(t: &FrequencyTarget, w: &WeightTable) -> f64 {
    let n = t.len();
    let omega = t.flat();
    if n == 1 {
        return omega[0];
    }
    let ib = cal_i_b(w, t).unwrap();
    let a = DMatrix::from_fn(n, n, |i, k| ib.matrix[(i, k)]).lu().solve(&DVector::from_vec(omega.clone())).unwrap();
    let rows = t.row_factors();
    let e = |i: usize, k: usize| Complex64::new(0.0, -ib.target_angles[(i, k)]).exp();
    // unknowns (Ψ, A): angles of the last delay, amplitudes
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    // parameters Φ: angles of delays 1..n−1, block k holds rows 0..n
    let mut kmat = DMatrix::zeros(2 * n, n * (n - 1));
    for i in 0..n {
        for k in 0..n {
            let b = w.get(rows[i], k);
            let d_phi = Complex64::new(0.0, -1.0) * a[k] * b * e(i, k);
            let d_a = b * e(i, k);
            if k == n - 1 {
                jac[(i, i)] = d_phi.re;
                jac[(n + i, i)] = d_phi.im;
            } else {
                kmat[(i, k * n + i)] = d_phi.re;
                kmat[(n + i, k * n + i)] = d_phi.im;
            }
            jac[(i, n + k)] = d_a.re;
            jac[(n + i, n + k)] = d_a.im;
        }
    }
    let dg = -jac.lu().solve(&kmat).unwrap();
    let dg_psi = dg.rows(0, n);
    let om = DVector::from_vec(omega.clone());
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        let col = dg_psi.columns(k * n, n) * &om;
        m.set_column(k, &col);
    }
    m.set_column(n - 1, &om);
    m.determinant()
}

#[test]
fn transversality_closed_form_matches_definition() {
    let two = FrequencyTarget::scalar(&[1.0, sqrt(2.0)]).unwrap();
    let v = transversality_at_base(&two, &WeightTable::ones(2)).unwrap();
    assert!((v - (8.0 + 6.0 * sqrt(2.0))).abs() < 1e-12);
    assert!((transversality_direct(&two, &WeightTable::ones(2)) - v).abs() < 1e-10);
    assert_eq!(transversality_at_base(&FrequencyTarget::scalar(&[1.7]).unwrap(), &WeightTable::ones(1)).unwrap(), 1.7);

    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..60 {
        let n = rng.gen_range(2..=6);
        let sizes = random_partition(&mut rng, n);
        let (t, w) = random_instance(&mut rng, &sizes);
        let Ok(closed) = transversality_at_base(&t, &w) else { continue };
        let direct = transversality_direct(&t, &w);
        assert!(closed != 0.0);
        assert!((closed - direct).abs() <= 1e-8 * direct.abs(), "{sizes:?}: {closed} vs {direct}");
    }
}

#[test]
fn newton_examples() {
    let t = FrequencyTarget::scalar(&[1.0]).unwrap();
    let r = newton_refine(&[1.5 * PI], &[1.0], &t, &WeightTable::ones(1), 1e-12, 10).unwrap();
    assert_eq!(r.newton_iterations, 0);

    let t2 = FrequencyTarget::scalar(&[1.0, sqrt(2.0)]).unwrap();
    assert_eq!(
        newton_refine(&[3.0, 3.0], &[1.0, 1.0], &t2, &WeightTable::ones(2), 1e-12, 10).unwrap_err(),
        Error::SingularJacobian
    );

    let base = base_point(&t2, &WeightTable::ones(2)).unwrap();
    let taus = delay_candidates(&t2, &base, 0.2, 10_000_000).unwrap();
    let r = newton_refine(&taus, &base.amplitudes, &t2, &WeightTable::ones(2), 1e-10, 50).unwrap();
    assert!(r.residual < 1e-10);
    assert!(r.taus.iter().all(|&x| x > 0.0));
    assert!(r.factor(&WeightTable::ones(2), 0).residual_on_targets(&t2.flat()) < 1e-10);
}

fn check_accepted(r: &RealizationResult, t: &FrequencyTarget, w: &WeightTable, tol: f64) {
    assert!(r.taus.iter().all(|&x| x > 0.0));
    assert!(r.coeffs.iter().all(|&a| a != 0.0));
    for (j, g) in t.groups().iter().enumerate() {
        let f = r.factor(w, j);
        for &om in g {
            assert!(f.evaluate(Complex64::new(0.0, om)).norm() < tol);
            assert!(f.evaluate(Complex64::new(0.0, -om)).norm() < tol);
        }
    }
}

#[test]
fn realize_examples() {
    let cfg = SolverConfig::default();
    let t = FrequencyTarget::scalar(&[1.0]).unwrap();
    let r = realize(&t, &WeightTable::ones(1), &cfg).unwrap();
    assert!(r.residual < 1e-12);
    assert_eq!(r.taus, vec![1.5 * PI]);
    assert_eq!(r.coeffs, vec![1.0]);

    let t = FrequencyTarget::scalar(&[1.0, sqrt(2.0), sqrt(3.0)]).unwrap();
    let w = WeightTable::ones(3);
    let r = realize(&t, &w, &cfg).unwrap();
    check_accepted(&r, &t, &w, 1e-9);
    let f = r.factor(&w, 0);
    for om in t.flat() {
        let region = Region::square(Complex64::new(0.0, om), 1e-4).unwrap();
        assert_eq!(count_roots(&f, &region).unwrap(), 1);
    }

    let t = FrequencyTarget::new(vec![vec![1.0], vec![sqrt(2.0)]]).unwrap();
    let w = WeightTable::new(vec![vec![1.0, 2.0], vec![1.0, -1.0]]).unwrap();
    let r = realize(&t, &w, &cfg).unwrap();
    check_accepted(&r, &t, &w, 1e-9);
}

#[test]
fn realize_errors() {
    let cfg = SolverConfig::default();
    let t = FrequencyTarget::new(vec![vec![1.0], vec![2.0]]).unwrap();
    let zero = WeightTable::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    assert_eq!(realize(&t, &zero, &cfg).unwrap_err(), Error::ZeroWeight { factor: 1, column: 2 });
    let singular = WeightTable::new(vec![vec![1.0, 4.0], vec![1.0, 4.0]]).unwrap();
    assert!(matches!(realize(&t, &singular, &cfg).unwrap_err(), Error::SingularIB { .. }));
    let tiny = SolverConfig { budget: 3, epsilon_schedule: vec![0.01], ..cfg };
    let t = FrequencyTarget::scalar(&[1.0, sqrt(2.0), sqrt(3.0)]).unwrap();
    assert!(matches!(realize(&t, &WeightTable::ones(3), &tiny).unwrap_err(), Error::SearchExhausted { .. }));
}

#[test]
fn scaling_covariance_of_realizations() {
    let cfg = SolverConfig::default();
    for omegas in [vec![1.0, sqrt(2.0)], vec![1.0, sqrt(2.0), sqrt(3.0)]] {
        let t = FrequencyTarget::scalar(&omegas).unwrap();
        let w = WeightTable::ones(omegas.len());
        let r = realize(&t, &w, &cfg).unwrap();
        for c in [2.0, 1.0 / 3.0] {
            let s = r.rescaled(c).unwrap();
            let res = s.factor_residual(&s.target, &w);
            assert!(res < 1e-12 + c * r.residual, "c = {c}: {res}");
        }
    }
}

#[test]
fn continuation_examples() {
    let cfg = SolverConfig::default();
    let w = WeightTable::ones(2);
    let t = FrequencyTarget::scalar(&[1.0, sqrt(2.0)]).unwrap();
    let r = realize(&t, &w, &cfg).unwrap();

    let same = continue_realization(&r, &t, &w, 1e-10, 5).unwrap();
    assert_eq!(same.taus, r.taus);
    assert_eq!(same.coeffs, r.coeffs);
    assert_eq!(same.newton_iterations, 0);

    let moved = FrequencyTarget::scalar(&[1.001, sqrt(2.0)]).unwrap();
    let c = continue_realization(&r, &moved, &w, 1e-10, 5).unwrap();
    assert!(c.residual < 1e-10 && c.newton_iterations <= 5);

    let far = FrequencyTarget::scalar(&[1.5, sqrt(2.0)]).unwrap();
    let (done, steps) = continue_with_bisection(&r, &far, &w, 1e-10, 8, 8).unwrap();
    assert!((1..=256).contains(&steps), "{steps} sub-steps");
    check_accepted(&done, &far, &w, 1e-10);

    let other_shape = FrequencyTarget::new(vec![vec![1.0], vec![sqrt(2.0)]]).unwrap();
    assert!(matches!(continue_realization(&r, &other_shape, &w, 1e-10, 5), Err(Error::InvalidInput(_))));
}

proptest! {
    #[test]
    fn residual_scales_with_frequency(
        taus in prop::collection::vec(0.1f64..50.0, 1..5),
        seed in any::<u64>(),
        c in 0.1f64..10.0,
    ) {
        let n = taus.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let omegas: Vec<f64> = (0..n).map(|k| 0.5 + k as f64 + rng.gen_range(0.0..0.9)).collect();
        let t = FrequencyTarget::scalar(&omegas).unwrap();
        let w = WeightTable::ones(n);
        let base = system_residual(&taus, &coeffs, &t, &w);
        let st: Vec<f64> = taus.iter().map(|x| x / c).collect();
        let sc: Vec<f64> = coeffs.iter().map(|x| x * c).collect();
        let scaled = system_residual(&st, &sc, &t.scaled(c).unwrap(), &w);
        for (b, s) in base.iter().zip(&scaled) {
            prop_assert!((s - b * c).norm() <= 1e-12 * c * (1.0 + b.norm() + coeffs.iter().map(|a| a.abs()).sum::<f64>()));
        }
    }
}
