//! Fourier tools for 2π-periodic grid functions.
//!
//! All routines take the `N` samples of one period at `z_j = 2πj/N`
//! (the duplicated endpoint is *not* included). The Nyquist mode is dropped
//! by differentiation and integration, which keeps results real.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Normalized DFT coefficients: `x_j = Σ_k c_k e^{i k z_j}`.
pub fn coefficients(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse of [`coefficients`], keeping the real part.
pub fn synthesize(coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    plan(buf.len(), true).process(&mut buf);
    buf.iter().map(|c| c.re).collect()
}

/// Signed wavenumber of DFT slot `j`; the Nyquist slot maps to `None`.
pub fn wavenumber(j: usize, n: usize) -> Option<i64> {
    if n.is_multiple_of(2) && j == n / 2 {
        None
    } else if j <= n / 2 {
        Some(j as i64)
    } else {
        Some(j as i64 - n as i64)
    }
}

/// Spectral derivative at the grid nodes.
pub fn derivative(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut c = coefficients(samples);
    for (j, cj) in c.iter_mut().enumerate() {
        *cj = match wavenumber(j, n) {
            Some(k) => *cj * Complex64::new(0.0, k as f64),
            None => Complex64::new(0.0, 0.0),
        };
    }
    synthesize(&c)
}

/// Periodic trapezoid rule over one period.
pub fn trapezoid(samples: &[f64]) -> f64 {
    let n = samples.len();
    samples.iter().sum::<f64>() * (2.0 * PI / n as f64)
}

/// Cumulative integral `F(z_j) = ∫_0^{z_j} h` for `j = 0..=N`.
///
/// The mean is integrated exactly and the oscillating modes through their
/// antiderivatives, so `F(z_N)` coincides with [`trapezoid`] while interior
/// values carry spectral accuracy.
pub fn cumulative_integral(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut c = coefficients(samples);
    let mean = c[0].re;
    c[0] = Complex64::new(0.0, 0.0);
    for (j, cj) in c.iter_mut().enumerate().skip(1) {
        *cj = match wavenumber(j, n) {
            Some(k) => *cj / Complex64::new(0.0, k as f64),
            None => Complex64::new(0.0, 0.0),
        };
    }
    let g = synthesize(&c);
    let h = 2.0 * PI / n as f64;
    let mut out: Vec<f64> = (0..n).map(|j| mean * h * j as f64 + g[j] - g[0]).collect();
    out.push(trapezoid(samples));
    out
}

/// Convolution with the periodized Gaussian of standard deviation `sigma`.
pub fn gaussian_smooth(samples: &[f64], sigma: f64) -> Vec<f64> {
    let n = samples.len();
    let mut c = coefficients(samples);
    for (j, cj) in c.iter_mut().enumerate() {
        let k = match wavenumber(j, n) {
            Some(k) => k as f64,
            None => (n / 2) as f64,
        };
        *cj *= (-0.5 * k * k * sigma * sigma).exp();
    }
    synthesize(&c)
}

/// Values of the trigonometric interpolant at `z_j + dt`.
pub fn shift(samples: &[f64], dt: f64) -> Vec<f64> {
    let n = samples.len();
    let mut c = coefficients(samples);
    for (j, cj) in c.iter_mut().enumerate() {
        match wavenumber(j, n) {
            Some(k) => *cj *= Complex64::from_polar(1.0, k as f64 * dt),
            None => *cj = Complex64::new(cj.re * ((n / 2) as f64 * dt).cos(), 0.0),
        }
    }
    synthesize(&c)
}

/// Keeps only the modes `k ≡ 0 (mod m)`: the average over the cyclic group of
/// translations by `2π/m`. The Nyquist mode is discarded.
pub fn project_invariant(samples: &[f64], m: usize) -> Vec<f64> {
    let n = samples.len();
    let mut c = coefficients(samples);
    for (j, cj) in c.iter_mut().enumerate() {
        let keep = matches!(wavenumber(j, n), Some(k) if k.rem_euclid(m as i64) == 0);
        if !keep {
            *cj = Complex64::new(0.0, 0.0);
        }
    }
    synthesize(&c)
}

/// Trigonometric interpolant resampled on a finer grid of `m ≥ N` points.
pub fn resample(samples: &[f64], m: usize) -> Vec<f64> {
    let n = samples.len();
    assert!(m >= n, "resample only refines");
    let c = coefficients(samples);
    let mut padded = vec![Complex64::new(0.0, 0.0); m];
    for (j, cj) in c.iter().enumerate() {
        match wavenumber(j, n) {
            Some(k) => padded[k.rem_euclid(m as i64) as usize] += *cj,
            None => {
                // split the Nyquist term symmetrically so the result stays real
                let half = n / 2;
                padded[half] += *cj * 0.5;
                padded[m - half] += *cj * 0.5;
            }
        }
    }
    synthesize(&padded)
}

/// Closed-form evaluation of the trigonometric interpolant anywhere on ℝ.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    mean: f64,
    /// `(k, c_k)` for `k = 1..N/2`, real series `mean + Σ 2 Re(c_k e^{ikt})`.
    modes: Vec<(f64, Complex64)>,
    nyquist: Option<(f64, f64)>,
}

impl TrigSeries {
    pub fn new(samples: &[f64]) -> Self {
        let n = samples.len();
        let c = coefficients(samples);
        let mut modes = Vec::with_capacity(n / 2);
        let mut nyquist = None;
        for (j, cj) in c.iter().enumerate().take(n / 2 + 1).skip(1) {
            match wavenumber(j, n) {
                Some(k) => modes.push((k as f64, *cj)),
                None => nyquist = Some(((n / 2) as f64, cj.re)),
            }
        }
        Self {
            mean: c[0].re,
            modes,
            nyquist,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = self.mean;
        for &(k, c) in &self.modes {
            let (s, co) = (k * t).sin_cos();
            acc += 2.0 * (c.re * co - c.im * s);
        }
        if let Some((k, a)) = self.nyquist {
            acc += a * (k * t).cos();
        }
        acc
    }

    /// Derivative of the interpolant with the Nyquist term omitted, matching
    /// [`derivative`] at the nodes.
    pub fn eval_derivative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &(k, c) in &self.modes {
            let (s, co) = (k * t).sin_cos();
            acc += -2.0 * k * (c.re * s + c.im * co);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
    }

    #[test]
    fn derivative_of_band_limited_is_exact() {
        let z = grid(64);
        let f: Vec<f64> = z
            .iter()
            .map(|&t| (3.0 * t).sin() + 0.5 * (7.0 * t).cos())
            .collect();
        let df = derivative(&f);
        for (t, d) in z.iter().zip(&df) {
            let exact = 3.0 * (3.0 * t).cos() - 3.5 * (7.0 * t).sin();
            assert!((d - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn cumulative_integral_matches_antiderivative() {
        let z = grid(128);
        let f: Vec<f64> = z.iter().map(|&t| 1.0 + t.cos() + (4.0 * t).sin()).collect();
        let big_f = cumulative_integral(&f);
        for (j, t) in z.iter().enumerate() {
            let exact = t + t.sin() + (1.0 - (4.0 * t).cos()) / 4.0;
            assert!((big_f[j] - exact).abs() < 1e-12, "{j}");
        }
        assert!((big_f[128] - 2.0 * PI).abs() < 1e-12);
        assert_eq!(big_f[128], trapezoid(&f));
    }

    #[test]
    fn shift_and_series_agree() {
        let z = grid(96);
        let f: Vec<f64> = z
            .iter()
            .map(|&t| (2.0 * t + 0.3).sin() - 0.2 * (5.0 * t).cos())
            .collect();
        let series = TrigSeries::new(&f);
        let shifted = shift(&f, 0.7);
        for (t, s) in z.iter().zip(&shifted) {
            assert!((series.eval(t + 0.7) - s).abs() < 1e-12);
            let exact = (2.0 * (t + 0.7) + 0.3).sin() - 0.2 * (5.0 * (t + 0.7)).cos();
            assert!((s - exact).abs() < 1e-12);
        }
        let d = series.eval_derivative(1.234);
        let exact = 2.0 * (2.0f64 * 1.234 + 0.3).cos() + (5.0 * 1.234f64).sin();
        assert!((d - exact).abs() < 1e-12);
    }

    #[test]
    fn projection_keeps_only_multiples() {
        let z = grid(120);
        let f: Vec<f64> = z
            .iter()
            .map(|&t| t.sin() + (3.0 * t).cos() + (6.0 * t).sin())
            .collect();
        let p = project_invariant(&f, 3);
        for (t, v) in z.iter().zip(&p) {
            assert!((v - ((3.0 * t).cos() + (6.0 * t).sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_is_exact_for_band_limited() {
        let f: Vec<f64> = grid(32)
            .iter()
            .map(|&t| (5.0 * t).cos() + t.sin())
            .collect();
        let fine = resample(&f, 256);
        for (t, v) in grid(256).iter().zip(&fine) {
            assert!((v - ((5.0 * t).cos() + t.sin())).abs() < 1e-12);
        }
    }
}
