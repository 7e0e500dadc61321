use lqrpid::linalg::{eigenvalues, expm};
use lqrpid::{build_plant_state_space, discretize_plant, discretize_zoh, map_poles_to_z, SecondOrderPlant, StateSpace};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn taylor_exp(m: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..terms {
        term = &term * m / k as f64;
        sum += &term;
    }
    sum
}

/// Open-loop `ẋ = Ax + Bu` under constant `u`, by RK4 with `substeps` per sample.
fn rk4_samples(ss: &StateSpace<f64>, x0: &[f64], u: f64, ts: f64, samples: usize, substeps: usize) -> Vec<DVector<f64>> {
    let a = ss.a();
    let b = DVector::from_column_slice(ss.b().as_slice()) * u;
    let f = |x: &DVector<f64>| a * x + &b;
    let h = ts / substeps as f64;
    let mut x = DVector::from_column_slice(x0);
    let mut out = vec![x.clone()];
    for _ in 0..samples {
        for _ in 0..substeps {
            let k1 = f(&x);
            let k2 = f(&(&x + &k1 * (h / 2.0)));
            let k3 = f(&(&x + &k2 * (h / 2.0)));
            let k4 = f(&(&x + &k3 * h));
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        out.push(x.clone());
    }
    out
}

fn plants() -> [SecondOrderPlant<f64>; 2] {
    [SecondOrderPlant::new(1.0, 0.2, 1.0).unwrap(), SecondOrderPlant::new(1.0, 5.0, 1.0).unwrap()]
}

#[test]
fn expm_matches_taylor_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=6 {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.5..0.5));
        let e = expm(&m).unwrap();
        let t = taylor_exp(&m, 30);
        assert!((&e - &t).abs().max() < 1e-10, "n = {n}");
    }
}

#[test]
fn expm_semigroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-2.0..2.0));
    let whole = expm(&(&m * 1.7)).unwrap();
    let split = expm(&(&m * 0.6)).unwrap() * expm(&(&m * 1.1)).unwrap();
    assert!((&whole - &split).norm() <= 1e-11 * whole.norm());
}

#[test]
fn zoh_matches_fine_rk4_at_sample_instants() {
    for plant in plants() {
        let ss = build_plant_state_space(&plant);
        for ts in [0.1, 0.5, 1.0] {
            let d = discretize_zoh(&ss, ts).unwrap();
            let x0 = [0.3, 1.0, -0.5];
            let u = 0.7;
            let samples = (10.0 / ts) as usize;
            let reference = rk4_samples(&ss, &x0, u, ts, samples, 1000);
            let h = DVector::from_column_slice(d.h().as_slice());
            let mut x = DVector::from_column_slice(&x0);
            for (k, r) in reference.iter().enumerate() {
                assert!((&x - r).abs().max() < 1e-6, "ts {ts} sample {k}");
                x = d.g() * &x + &h * u;
            }
        }
    }
}

#[test]
fn pole_images_are_eigenvalues_of_g() {
    for plant in plants() {
        let ss = build_plant_state_space(&plant);
        let s_poles = ss.poles().unwrap();
        for i in 1..=10 {
            let ts = 0.1 * i as f64;
            let d = discretize_plant(&plant, ts).unwrap();
            let mapped = map_poles_to_z(&s_poles, ts).unwrap();
            let eig = eigenvalues(d.g()).unwrap();
            for z in &mapped {
                let nearest = eig.iter().map(|e| (e - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-9, "ts {ts}: {z} not among {eig:?}");
            }
            // the integrator pole stays at z = 1
            assert!(mapped.iter().any(|z| (z - Complex::new(1.0, 0.0)).norm() < 1e-12));
        }
    }
}

#[test]
fn oscillatory_poles_drift_toward_origin_with_ts() {
    let plant = SecondOrderPlant::new(1.0, 0.2, 1.0).unwrap();
    let radius = |ts: f64| {
        map_poles_to_z(&plant.process_poles(), ts).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max)
    };
    let radii: Vec<f64> = (1..=10).map(|i| radius(0.1 * i as f64)).collect();
    assert!(radii.windows(2).all(|w| w[1] < w[0]));
    for (i, r) in radii.iter().enumerate() {
        let ts = 0.1 * (i + 1) as f64;
        assert!((r - (-0.2 * ts).exp()).abs() < 1e-12);
    }
}
