use lqrpid::fracint::{magnitude_slope_db_per_decade, phase};
use lqrpid::{
    gamma, oustaloup_fractional_integral, oustaloup_synthesize, rl_fractional_integral, simulate_continuous, PidGains,
    Scenario, SecondOrderPlant,
};
use proptest::prelude::*;

fn grid(h: f64, end: f64) -> Vec<f64> {
    (0..=(end / h).round() as usize).map(|k| k as f64 * h).collect()
}

fn last(v: Vec<f64>) -> f64 {
    *v.last().unwrap()
}

#[test]
fn power_rules() {
    let h = 1e-3;
    let t = grid(h, 1.0);
    let one = vec![1.0; t.len()];
    let cases = [
        (one, 0.5, 2.0 / std::f64::consts::PI.sqrt()),
        (t.clone(), 0.5, 1.0 / gamma(2.5)),
        (t.clone(), 1.0, 0.5),
    ];
    for (f, alpha, exact) in cases {
        let v = last(rl_fractional_integral(&f, h, alpha).unwrap());
        assert!((v - exact).abs() / exact < 1e-3, "alpha {alpha}: {v} vs {exact}");
    }
}

#[test]
fn unit_order_square_is_left_rectangle_sum() {
    let h = 1e-3;
    let n = 1000.0;
    let f: Vec<f64> = grid(h, 1.0).iter().map(|x| x * x).collect();
    let v = last(rl_fractional_integral(&f, h, 1.0).unwrap());
    // h·Σ_{j<n} (jh)² = h³(n−1)n(2n−1)/6
    let rect = h * h * h * (n - 1.0) * n * (2.0 * n - 1.0) / 6.0;
    assert!((v - rect).abs() < 1e-14);
    // left-rectangle bias is h/2·(f(1) − f(0)) to first order
    assert!((v - 1.0 / 3.0 + h / 2.0).abs() < h * h);
}

#[test]
fn first_order_convergence() {
    let f = |t: f64| t.cos();
    // I^0.5 cos at t = 1 by a very fine grid as the reference
    let reference = {
        let h = 2e-5;
        last(rl_fractional_integral(&grid(h, 1.0).iter().map(|&t| f(t)).collect::<Vec<_>>(), h, 0.5).unwrap())
    };
    let err = |h: f64| {
        let s: Vec<f64> = grid(h, 1.0).iter().map(|&t| f(t)).collect();
        (last(rl_fractional_integral(&s, h, 0.5).unwrap()) - reference).abs()
    };
    let (e1, e2, e3) = (err(1e-2), err(5e-3), err(2.5e-3));
    let p1 = (e1 / e2).log2();
    let p2 = (e2 / e3).log2();
    assert!(p1 >= 0.9 && p2 >= 0.9, "observed orders {p1}, {p2}");
}

#[test]
fn semigroup() {
    let h = 1e-3;
    let t = grid(h, 1.0);
    for p in 0..=2 {
        let f: Vec<f64> = t.iter().map(|x| x.powi(p)).collect();
        for a in [0.25, 0.5] {
            for b in [0.25, 0.5] {
                let composed = rl_fractional_integral(&rl_fractional_integral(&f, h, a).unwrap(), h, b).unwrap();
                let direct = rl_fractional_integral(&f, h, a + b).unwrap();
                let end = (composed[1000] - direct[1000]).abs() / direct[1000];
                assert!(end < 5e-3, "t^{p}, {a} + {b}: {end:e}");
            }
        }
    }
}

#[test]
fn oustaloup_band_properties() {
    let filt = oustaloup_synthesize(0.5f64, 2, 1e-2, 1e2).unwrap();
    let ph = phase(filt.frequency_response(1.0)).to_degrees();
    assert!((ph - 45.0).abs() <= 2.0, "phase {ph}");
    let slope = magnitude_slope_db_per_decade(&filt, 0.1, 10.0);
    assert!((slope - 10.0).abs() <= 0.5, "slope {slope}");
    // the integrator approximation mirrors it
    let inv = oustaloup_synthesize(-0.5f64, 2, 1e-2, 1e2).unwrap();
    assert!((phase(inv.frequency_response(1.0)).to_degrees() + 45.0).abs() <= 2.0);
    assert!((magnitude_slope_db_per_decade(&inv, 0.1, 10.0) + 10.0).abs() <= 0.5);
}

#[test]
fn oustaloup_realization_tracks_direct_quadrature() {
    // cost integrand: t·e(t)² under PID (2, 2, 1) on the oscillatory plant
    let plant = SecondOrderPlant::new(1.0, 0.2, 1.0).unwrap();
    let trace = simulate_continuous(&plant, &PidGains::new(2.0, 2.0, 1.0), &Scenario::servo(100.0, 1e-3)).unwrap();
    let h = 0.01;
    let phi: Vec<f64> = (0..=10_000).map(|i| {
        let k = 10 * i;
        trace.times[k] * trace.e[k] * trace.e[k]
    }).collect();
    for alpha in [0.5, 1.5] {
        let direct = rl_fractional_integral(&phi, h, alpha).unwrap();
        let filtered = oustaloup_fractional_integral(&phi, h, alpha, 4, 1e-3, 1e2).unwrap();
        let peak = direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // compare once the low-frequency edge of the band has settled
        let worst = direct[2000..]
            .iter()
            .zip(&filtered[2000..])
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(worst / peak < 0.1, "alpha {alpha}: {worst} vs peak {peak}");
    }
}

proptest! {
    #[test]
    fn linear_in_the_signal(
        a in -5.0f64..5.0, b in -5.0f64..5.0,
        f in proptest::collection::vec(-1.0f64..1.0, 50),
        g in proptest::collection::vec(-1.0f64..1.0, 50),
        alpha in 0.1f64..2.0,
    ) {
        let h = 0.05;
        let mix: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let lhs = rl_fractional_integral(&mix, h, alpha).unwrap();
        let fi = rl_fractional_integral(&f, h, alpha).unwrap();
        let gi = rl_fractional_integral(&g, h, alpha).unwrap();
        for k in 0..lhs.len() {
            let rhs = a * fi[k] + b * gi[k];
            prop_assert!((lhs[k] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn nonnegative_input_order_one_is_monotone(f in proptest::collection::vec(0.0f64..3.0, 2..80)) {
        let out = rl_fractional_integral(&f, 0.1, 1.0).unwrap();
        prop_assert!(out.windows(2).all(|w| w[1] >= w[0]));
    }
}
