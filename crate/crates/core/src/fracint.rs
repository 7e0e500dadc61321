//! Riemann–Liouville fractional integrals of sampled signals, and Oustaloup
//! rational approximations of `s^γ`.
//!
//! The direct route discretizes
//!
//! ```text
//! I^α f(t) = 1/Γ(α) ∫₀ᵗ f(τ)(t − τ)^{α−1} dτ
//! ```
//!
//! with product-rectangle weights (f held constant on each cell, the kernel
//! integrated exactly):
//!
//! ```text
//! I[n] = Σ_{j<n} f_j · h^α/Γ(α+1) · ((n−j)^α − (n−j−1)^α)
//! ```
//!
//! which is first-order accurate and reduces to left-rectangle integration at
//! `α = 1`. The Oustaloup route approximates the operator over a frequency
//! band instead; both are exposed so they can be checked against each other.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::scalar::{is_finite, Real};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function (Lanczos, g = 7), exact for small positive integers.
pub fn gamma<T: Real>(x: T) -> T {
    let xf = x.as_f64();
    if xf.fract() == 0.0 && (1.0..=20.0).contains(&xf) {
        let mut acc = 1.0f64;
        for k in 2..(xf as u64) {
            acc *= k as f64;
        }
        return T::lit(acc);
    }
    if x < T::lit(0.5) {
        // reflection
        let pi = T::pi();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    let z = x - T::one();
    let mut a = T::lit(LANCZOS[0]);
    let t = z + T::lit(LANCZOS_G + 0.5);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += T::lit(c) / (z + T::lit(i as f64));
    }
    (T::two_pi()).sqrt() * t.powf(z + T::lit(0.5)) * (-t).exp() * a
}

/// Kernel weights `w[m] = h^α/Γ(α+1)·(m^α − (m−1)^α)` for `m = 1..=len`.
fn kernel_weights<T: Real>(len: usize, h: T, alpha: T) -> Vec<T> {
    let scale = h.powf(alpha) / gamma(alpha + T::one());
    let mut w = Vec::with_capacity(len + 1);
    w.push(T::zero());
    for m in 1..=len {
        let mf = T::lit(m as f64);
        // m^α (1 − (1 − 1/m)^α), written to avoid cancellation for large m
        let diff = if m == 1 || alpha == T::one() {
            T::one()
        } else {
            -mf.powf(alpha) * (alpha * (-T::one() / mf).ln_1p()).exp_m1()
        };
        w.push(scale * diff);
    }
    w
}

fn check_inputs<T: Real>(samples: &[T], h: T, alpha: T) -> Result<()> {
    ensure!(alpha > T::zero() && is_finite(alpha), InvalidParameter, "integration order must be positive");
    ensure!(h > T::zero() && is_finite(h), InvalidParameter, "step must be positive");
    ensure!(samples.len() >= 2, InvalidParameter, "need at least two samples");
    Ok(())
}

/// Fractional integral of order `alpha` at every grid point (`I[0] = 0`).
///
/// Direct `O(n²)` convolution.
pub fn rl_fractional_integral<T: Real>(samples: &[T], h: T, alpha: T) -> Result<Vec<T>> {
    check_inputs(samples, h, alpha)?;
    let n = samples.len();
    let w = kernel_weights(n, h, alpha);
    Ok((0..n)
        .map(|i| {
            samples[..i]
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (j, &f)| acc + f * w[i - j])
        })
        .collect())
}

/// Fractional integral at the last grid point only, in `O(n)`.
pub fn rl_fractional_integral_final<T: Real>(samples: &[T], h: T, alpha: T) -> Result<T> {
    check_inputs(samples, h, alpha)?;
    let n = samples.len() - 1;
    let w = kernel_weights(n, h, alpha);
    Ok(samples[..n]
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (j, &f)| acc + f * w[n - j]))
}

/// Band-limited rational approximation `K ∏ (s + ω'_k)/(s + ω_k)`, `k = −N..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OustaloupFilter<T> {
    pub gamma: T,
    pub n_half: usize,
    pub wb: T,
    pub wh: T,
    /// ω'_k, ascending.
    pub zeros: Vec<T>,
    /// ω_k, ascending.
    pub poles: Vec<T>,
    pub gain: T,
}

/// Synthesizes the order-`2N+1` approximation of `s^γ` over `[wb, wh]` rad/s.
pub fn oustaloup_synthesize<T: Real>(gamma: T, n_half: usize, wb: T, wh: T) -> Result<OustaloupFilter<T>> {
    ensure!(
        gamma > -T::one() && gamma < T::one(),
        InvalidParameter,
        "fractional exponent must lie in (-1, 1)"
    );
    ensure!(
        wb > T::zero() && is_finite(wh) && wb < wh,
        InvalidParameter,
        "band edges must satisfy 0 < wb < wh"
    );
    let n = n_half as i64;
    let order = T::lit((2 * n_half + 1) as f64);
    let ratio = wh / wb;
    let half = T::lit(0.5);
    let mut zeros = Vec::with_capacity(2 * n_half + 1);
    let mut poles = Vec::with_capacity(2 * n_half + 1);
    for k in -n..=n {
        let base = T::lit((k + n) as f64);
        zeros.push(wb * ratio.powf((base + half * (T::one() - gamma)) / order));
        poles.push(wb * ratio.powf((base + half * (T::one() + gamma)) / order));
    }
    Ok(OustaloupFilter { gamma, n_half, wb, wh, zeros, poles, gain: wh.powf(gamma) })
}

impl<T: Real> OustaloupFilter<T> {
    /// `G(jω)`.
    pub fn frequency_response(&self, w: T) -> Complex<T> {
        let jw = Complex::new(T::zero(), w);
        self.zeros
            .iter()
            .zip(&self.poles)
            .fold(Complex::new(self.gain, T::zero()), |acc, (&z, &p)| {
                acc * (jw + Complex::new(z, T::zero())) / (jw + Complex::new(p, T::zero()))
            })
    }

    /// Runs a sampled signal through the filter (bilinear transform per
    /// first-order section, zero initial conditions).
    pub fn filter(&self, samples: &[T], h: T) -> Vec<T> {
        let two_over_h = T::lit(2.0) / h;
        let mut signal: Vec<T> = samples.iter().map(|&x| x * self.gain).collect();
        for (&z, &p) in self.zeros.iter().zip(&self.poles) {
            // a coincident zero/pole pair is the identity
            if z == p {
                continue;
            }
            let b0 = two_over_h + z;
            let b1 = z - two_over_h;
            let a0 = two_over_h + p;
            let a1 = p - two_over_h;
            let mut x_prev = T::zero();
            let mut y_prev = T::zero();
            for v in signal.iter_mut() {
                let x = *v;
                let y = (b0 * x + b1 * x_prev - a1 * y_prev) / a0;
                x_prev = x;
                y_prev = y;
                *v = y;
            }
        }
        signal
    }
}

/// `|z|` for a generic real scalar.
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// Phase of `z` in radians.
pub fn phase<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

/// `d/dω` of `|G(jω)|` in dB per decade, by central difference in `log10 ω`.
pub fn magnitude_slope_db_per_decade<T: Real>(filter: &OustaloupFilter<T>, w_lo: T, w_hi: T) -> T {
    let db = |w: T| T::lit(20.0) * modulus(filter.frequency_response(w)).log10();
    (db(w_hi) - db(w_lo)) / (w_hi.log10() - w_lo.log10())
}

fn cumulative_trapezoid<T: Real>(samples: &[T], h: T) -> Vec<T> {
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = T::zero();
    out.push(acc);
    for w in samples.windows(2) {
        acc += h * (w[0] + w[1]) * half;
        out.push(acc);
    }
    out
}

/// Fractional integral through an Oustaloup filter: `s^{−α}` is split into
/// `⌊α⌋` trapezoid integrations and an Oustaloup section for the fractional
/// part.
pub fn oustaloup_fractional_integral<T: Real>(
    samples: &[T],
    h: T,
    alpha: T,
    n_half: usize,
    wb: T,
    wh: T,
) -> Result<Vec<T>> {
    check_inputs(samples, h, alpha)?;
    let whole = alpha.floor();
    let frac = alpha - whole;
    let mut out = samples.to_vec();
    if frac > T::zero() {
        out = oustaloup_synthesize(-frac, n_half, wb, wh)?.filter(&out, h);
    }
    for _ in 0..(whole.as_f64() as usize) {
        out = cumulative_trapezoid(&out, h);
    }
    Ok(out)
}
