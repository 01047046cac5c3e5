//! Explicit diffeomorphisms: the map pulling `sin(nz)dx + cos(nz)dy` back to
//! the standard form `dz + x dy`, and the `z`-reparametrization straightening
//! `α_φ` to `α_w`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_map::CircleMap;
use crate::error::{Error, Result};
use crate::solver::ReebCertificate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointR3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PointR3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Half-width of the box the random sample points are drawn from.
pub const SAMPLE_BOX: f64 = 5.0;
/// Tolerance on `|φ̃(t) − y|` for [`phi_inverse`].
pub const INVERSE_TOL: f64 = 1e-10;

/// `(x,y,z) ↦ (z sin(ny) − x cos(ny)/n, z cos(ny) + x sin(ny)/n, y)`.
pub fn std_map(n: f64, p: PointR3) -> Result<PointR3> {
    if n == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let (s, c) = (n * p.y).sin_cos();
    Ok(PointR3 {
        x: p.z * s - p.x * c / n,
        y: p.z * c + p.x * s / n,
        z: p.y,
    })
}

/// Rows `∂(u,v,w)/∂(x,y,z)` of the Jacobian of [`std_map`].
fn std_jacobian(n: f64, p: PointR3) -> [[f64; 3]; 3] {
    let (s, c) = (n * p.y).sin_cos();
    [
        [-c / n, p.z * n * c + p.x * s, s],
        [s / n, -p.z * n * s + p.x * c, c],
        [0.0, 1.0, 0.0],
    ]
}

fn random_points(count: usize, seed: u64) -> Vec<PointR3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            PointR3::new(
                rng.gen_range(-SAMPLE_BOX..SAMPLE_BOX),
                rng.gen_range(-SAMPLE_BOX..SAMPLE_BOX),
                rng.gen_range(-SAMPLE_BOX..SAMPLE_BOX),
            )
        })
        .collect()
}

/// `max |DΨᵀ α̃_n(Ψ(p)) − (dz + x dy)(p)|` over `sample_count` seeded points.
pub fn std_pullback_residual(n: f64, sample_count: usize, seed: u64) -> Result<f64> {
    if n == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let points = random_points(sample_count, seed);
    let residual = points
        .par_iter()
        .map(|&p| {
            let q = std_map(n, p).expect("n is non-zero");
            let form = [(n * q.z).sin(), (n * q.z).cos(), 0.0];
            let j = std_jacobian(n, p);
            let pulled: Vec<f64> = (0..3)
                .map(|col| (0..3).map(|row| form[row] * j[row][col]).sum())
                .collect();
            let target = [0.0, p.x, 1.0];
            (0..3)
                .map(|i| (pulled[i] - target[i]).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(residual)
}

/// `t` with `φ̃(t) = y` for the monotone lift, by bisection on the
/// interpolated lift extended quasi-periodically.
pub fn phi_inverse(phi: &CircleMap, y: f64) -> f64 {
    let w = phi.degree() as f64;
    debug_assert!(w != 0.0);
    let sign = w.signum();
    let g = |t: f64| sign * (phi.evaluate_lift(t) - y);
    let guess = (y - phi.samples()[0]) / w;
    let (mut lo, mut hi) = (guess - TAU, guess + TAU);
    while g(lo) > 0.0 {
        lo -= TAU;
    }
    while g(hi) < 0.0 {
        hi += TAU;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid);
        if v.abs() < 0.01 * INVERSE_TOL {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `max |Ψ*α_φ − α_w|` for `Ψ(x, y, z) = (x, y, φ⁻¹(wz))`.
///
/// The inverse is taken on the interpolated lift while `φ` is evaluated
/// from its trigonometric interpolant, so the residual measures the
/// interpolation error of `φ⁻¹`. `α_φ` has no `dz` part, hence the chain
/// rule factor `w/φ′` only multiplies zero.
pub fn map_straightening_residual(phi: &CircleMap, sample_count: usize, seed: u64) -> f64 {
    let w = phi.degree() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zs: Vec<f64> = (0..sample_count).map(|_| rng.gen_range(0.0..TAU)).collect();
    zs.par_iter()
        .map(|&z| {
            let h = phi_inverse(phi, w * z);
            let dh = w / phi.eval_spectral_derivative(h);
            let value = phi.eval_spectral(h);
            let dz_coefficient = 0.0;
            let pulled = [value.sin(), value.cos(), dz_coefficient * dh];
            let target = [(w * z).sin(), (w * z).cos(), 0.0];
            (0..3)
                .map(|i| (pulled[i] - target[i]).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

pub fn straightening_residual(cert: &ReebCertificate, sample_count: usize, seed: u64) -> f64 {
    map_straightening_residual(&cert.phi.map, sample_count, seed)
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pullback_is_exact_for_any_frequency(n in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0], seed in 0u64..1000) {
            prop_assert!(std_pullback_residual(n, 50, seed).unwrap() < 1e-12);
        }

        #[test]
        fn inverse_round_trip(amp in 0.0f64..0.9, w in prop::sample::select(vec![-2i64, -1, 1, 3]), t in 0.0f64..TAU) {
            let phi = CircleMap::from_fn(512, |z| w as f64 * z + amp * z.sin()).unwrap();
            let y = phi.evaluate_lift(t);
            prop_assert!((phi_inverse(&phi, y) - t).abs() < 1e-9);
            let shifted = phi_inverse(&phi, y + TAU * w as f64);
            prop_assert!((shifted - t - TAU).abs() < 1e-9);
        }
    }
}
