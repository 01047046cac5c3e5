//! Two geodesic fields on open flat manifolds: one that is conformally Reeb
//! although the drawdown condition fails, and one whose contact-transverse
//! partner is not Reeb because it crosses a torus `{z = 0}`.

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the window over which `|z − π|` is smoothed.
pub const BLEND_HALF_WIDTH: f64 = 0.1;
pub const EXAMPLE_EPSILON: f64 = 0.1;

/// Five-point Gauss–Legendre rule on `[−1, 1]`.
const GAUSS: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// `θ` with its derivative on a truncated `z`-range.
pub struct OpenThetaSpec {
    pub theta: RealFn,
    pub dtheta: RealFn,
    pub z_range: (f64, f64),
    /// Number of cells; the grid has `grid + 1` points.
    pub grid: usize,
}

/// `|x|` for `|x| ≥ h`, and `h·p(x/h)` with `p(u) = 15u²/8 − 5u⁴/4 + 3u⁶/8`
/// inside, which is C² across `|x| = h`.
pub fn softabs(x: f64, h: f64) -> f64 {
    if x.abs() >= h {
        return x.abs();
    }
    let u2 = (x / h).powi(2);
    h * u2 * (15.0 / 8.0 - 1.25 * u2 + 0.375 * u2 * u2)
}

pub fn softabs_derivative(x: f64, h: f64) -> f64 {
    if x.abs() >= h {
        return x.signum();
    }
    let u = x / h;
    let u2 = u * u;
    u * (3.75 - 5.0 * u2 + 2.25 * u2 * u2)
}

impl OpenThetaSpec {
    /// `θ(z) = −π + softabs(z − π)`: equal to `−z` below `π − h`, to
    /// `z − 2π` above `π + h`, with `θ(0) = 0` and `θ(π) = −π`.
    pub fn standard(grid: usize) -> Self {
        let h = BLEND_HALF_WIDTH;
        Self {
            theta: Box::new(move |z| -PI + softabs(z - PI, h)),
            dtheta: Box::new(move |z| softabs_derivative(z - PI, h)),
            z_range: (0.0, 2.0 * PI),
            grid,
        }
    }

    pub fn with_range(mut self, z_min: f64, z_max: f64) -> Self {
        self.z_range = (z_min, z_max);
        self
    }

    pub fn nodes(&self) -> Vec<f64> {
        let (a, b) = self.z_range;
        (0..=self.grid)
            .map(|j| a + (b - a) * j as f64 / self.grid as f64)
            .collect()
    }

    pub fn check_anchors(&self) -> Result<()> {
        let t0 = (self.theta)(0.0);
        if !(t0.abs() < 1e-12) {
            return Err(Error::AnchorViolation(format!("θ(0) = {t0}")));
        }
        let tp = (self.theta)(PI);
        if !((tp + PI).abs() < 1e-9) {
            return Err(Error::AnchorViolation(format!("θ(π) = {tp}")));
        }
        if !(self.z_range.0 < self.z_range.1) || self.grid == 0 {
            return Err(Error::AnchorViolation("empty z-range".into()));
        }
        Ok(())
    }

    /// `∫_a^b cos θ` by composite Gauss–Legendre on `panels` panels.
    fn integrate_cos(&self, a: f64, b: f64, panels: usize) -> f64 {
        let w = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let c = a + w * (p as f64 + 0.5);
                GAUSS
                    .iter()
                    .map(|(x, wt)| wt * (self.theta)(c + 0.5 * w * x).cos())
                    .sum::<f64>()
                    * 0.5
                    * w
            })
            .sum()
    }

    /// `F(z_j) = ∫₀^{z_j} cos θ − 1` at every node.
    pub fn primitive(&self) -> Vec<f64> {
        let z = self.nodes();
        let cells: Vec<f64> = z
            .par_windows(2)
            .map(|p| self.integrate_cos(p[0], p[1], 8))
            .collect();
        // cumulative from the leftmost node, then re-based at z = 0
        let mut acc = Vec::with_capacity(z.len());
        acc.push(0.0);
        for c in &cells {
            let last = *acc.last().unwrap();
            acc.push(last + c);
        }
        let (a, _) = self.z_range;
        let offset = if a <= 0.0 {
            -self.integrate_cos(a, 0.0, 64)
        } else {
            self.integrate_cos(0.0, a, 64)
        };
        acc.into_iter().map(|x| x + offset - 1.0).collect()
    }
}

/// Coefficients on the `z`-grid, `β = F dx + y sin θ dz`,
/// `α_θ = sin θ dx + cos θ dy`, `α = β + 2εα_θ`, through their derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleOneForms {
    pub z: Vec<f64>,
    pub theta: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub f: Vec<f64>,
    pub epsilon: f64,
    /// `dβ = A dy∧dz + B dz∧dx` with `(A, B) = (sin θ, cos θ)`.
    pub dbeta: Vec<(f64, f64)>,
    /// `dα` in the same basis, assembled term by term.
    pub dalpha: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleOneReport {
    pub epsilon: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub min_beta_x: f64,
    pub min_alpha_x: f64,
    pub contraction_sup: f64,
    /// `min (1 + 2εθ′)`.
    pub min_factor: f64,
    /// `min dα(∂_z, cos θ ∂_x − sin θ ∂_y)`.
    pub min_plane_determinant: f64,
    pub proportionality_residual: f64,
    pub f_at_pi: f64,
    pub theta_at_zero: f64,
    pub theta_at_pi: f64,
}

fn two_form_pair(omega: (f64, f64), a: [f64; 3], b: [f64; 3]) -> f64 {
    let (aa, bb) = omega;
    aa * (a[1] * b[2] - a[2] * b[1]) + bb * (a[2] * b[0] - a[0] * b[2])
}

/// `i_X ω` for `ω = A dy∧dz + B dz∧dx` and `X = (u, v, 0)`.
fn contract_planar(omega: (f64, f64), u: f64, v: f64) -> [f64; 3] {
    let (a, b) = omega;
    [0.0, 0.0, a * v - b * u]
}

pub fn build_example_i(
    spec: &OpenThetaSpec,
    epsilon: f64,
) -> Result<(ExampleOneForms, ExampleOneReport)> {
    spec.check_anchors()?;
    let z = spec.nodes();
    let theta: Vec<f64> = z.iter().map(|t| (spec.theta)(*t)).collect();
    let dtheta: Vec<f64> = z.iter().map(|t| (spec.dtheta)(*t)).collect();
    let min_factor = dtheta
        .iter()
        .map(|d| 1.0 + 2.0 * epsilon * d)
        .fold(f64::INFINITY, f64::min);
    if !(epsilon > 0.0) || !(min_factor > 0.0) {
        return Err(Error::EpsilonTooLarge {
            eps: epsilon,
            min_factor,
        });
    }
    let f = spec.primitive();
    let dbeta: Vec<(f64, f64)> = theta.iter().map(|t| (t.sin(), t.cos())).collect();
    let dalpha: Vec<(f64, f64)> = theta
        .iter()
        .zip(&dtheta)
        .map(|(t, d)| {
            let (s, c) = t.sin_cos();
            (s + 2.0 * epsilon * d * s, c + 2.0 * epsilon * d * c)
        })
        .collect();

    let n = z.len();
    let mut min_beta_x = f64::INFINITY;
    let mut min_alpha_x = f64::INFINITY;
    let mut contraction_sup = 0.0f64;
    let mut min_det = f64::INFINITY;
    let mut proportionality = 0.0f64;
    for j in 0..n {
        let (s, c) = theta[j].sin_cos();
        let beta_x = f[j] * s;
        let alpha_x = beta_x + 2.0 * epsilon * (s * s + c * c);
        min_beta_x = min_beta_x.min(beta_x);
        min_alpha_x = min_alpha_x.min(alpha_x);
        let i_x = contract_planar(dalpha[j], s, c);
        contraction_sup = i_x.iter().map(|x| x.abs()).fold(contraction_sup, f64::max);
        min_det = min_det.min(two_form_pair(dalpha[j], [0.0, 0.0, 1.0], [c, -s, 0.0]));
        let k = 1.0 + 2.0 * epsilon * dtheta[j];
        proportionality = proportionality
            .max((dalpha[j].0 - k * dbeta[j].0).abs())
            .max((dalpha[j].1 - k * dbeta[j].1).abs());
    }
    let report = ExampleOneReport {
        epsilon,
        z_min: spec.z_range.0,
        z_max: spec.z_range.1,
        min_beta_x,
        min_alpha_x,
        contraction_sup,
        min_factor,
        min_plane_determinant: min_det,
        proportionality_residual: proportionality,
        f_at_pi: spec.integrate_cos(0.0, PI, 256) - 1.0,
        theta_at_zero: (spec.theta)(0.0),
        theta_at_pi: (spec.theta)(PI),
    };
    let forms = ExampleOneForms {
        z,
        theta,
        dtheta,
        f,
        epsilon,
        dbeta,
        dalpha,
    };
    Ok((forms, report))
}

/// `φ(z) = (π/4)·(2/π)·arctan z`, a diffeomorphism `ℝ → (−π/4, π/4)`.
pub fn example_ii_phi(z: f64) -> f64 {
    FRAC_PI_4 * (2.0 / PI) * z.atan()
}

pub fn example_ii_phi_derivative(z: f64) -> f64 {
    FRAC_PI_4 * (2.0 / PI) / (1.0 + z * z)
}

pub const EXAMPLE_II_RANGE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleTwoReport {
    pub z_min: f64,
    pub z_max: f64,
    /// `min ⟨X, Y⟩ = min cos φ`.
    pub min_pairing: f64,
    pub pairing_lower_bound: f64,
    /// `min φ′`, the contact density of `sin φ dx + cos φ dy`.
    pub min_phi_slope: f64,
    pub phi_slope_at_zero: f64,
    pub sup_abs_phi: f64,
    /// `min dz(X)` over sample points of `{z = 0}`.
    pub transversality: f64,
}

/// `X = ∂_y + ∂_z` and `Y = sin φ ∂_x + cos φ ∂_y` on `T² × [−R, R]`, with
/// `R = φ_range_bound`.
pub fn check_example_ii(phi_range_bound: f64, grid: usize) -> ExampleTwoReport {
    let x_field = [0.0, 1.0, 1.0];
    let nodes: Vec<f64> = (0..=grid)
        .map(|j| -phi_range_bound + 2.0 * phi_range_bound * j as f64 / grid as f64)
        .collect();
    let (min_pairing, min_slope, sup_phi) = nodes
        .par_iter()
        .map(|z| {
            let phi = example_ii_phi(*z);
            let y_field = [phi.sin(), phi.cos(), 0.0];
            let pairing: f64 = (0..3).map(|i| x_field[i] * y_field[i]).sum();
            (pairing, example_ii_phi_derivative(*z), phi.abs())
        })
        .reduce(
            || (f64::INFINITY, f64::INFINITY, 0.0),
            |a, b| (a.0.min(b.0), a.1.min(b.1), a.2.max(b.2)),
        );
    // dz(X) does not depend on the point of the torus
    let transversality = x_field[2];
    ExampleTwoReport {
        z_min: -phi_range_bound,
        z_max: phi_range_bound,
        min_pairing,
        pairing_lower_bound: FRAC_PI_4.cos(),
        min_phi_slope: min_slope,
        phi_slope_at_zero: example_ii_phi_derivative(0.0),
        sup_abs_phi: sup_phi,
        transversality,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softabs_is_c2() {
        let h = BLEND_HALF_WIDTH;
        for x in [h, -h] {
            assert!((softabs(x * (1.0 - 1e-12), h) - h).abs() < 1e-12);
            assert!((softabs_derivative(x * (1.0 - 1e-12), h) - x.signum()).abs() < 1e-10);
        }
        assert_eq!(softabs(0.0, h), 0.0);
        assert_eq!(softabs(0.5, h), 0.5);
        let e = 1e-6;
        for x in [-0.07, 0.0, 0.03, 0.0999] {
            let fd = (softabs(x + e, h) - softabs(x - e, h)) / (2.0 * e);
            assert!((fd - softabs_derivative(x, h)).abs() < 1e-8);
        }
    }

    #[test]
    fn exact_profile_has_f_minus_one_at_pi() {
        let spec = OpenThetaSpec {
            theta: Box::new(|z| -z),
            dtheta: Box::new(|_| -1.0),
            z_range: (0.0, PI),
            grid: 100,
        };
        let f = spec.primitive();
        assert!((f[100] + 1.0).abs() < 1e-13);
        assert!((f[50] - ((PI / 2.0).sin() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn standard_example() {
        let spec = OpenThetaSpec::standard(4000);
        let (forms, r) = build_example_i(&spec, EXAMPLE_EPSILON).unwrap();
        assert!(r.theta_at_zero.abs() < 1e-12 && (r.theta_at_pi + PI).abs() < 1e-12);
        assert!(
            r.min_factor > 0.7 && r.min_factor < 0.75,
            "{}",
            r.min_factor
        );
        assert!(r.min_alpha_x >= EXAMPLE_EPSILON - 1e-8);
        assert!(r.min_beta_x >= -EXAMPLE_EPSILON + 1e-8);
        assert!(r.contraction_sup < 1e-10);
        assert!(r.proportionality_residual < 1e-14);
        assert!((r.min_plane_determinant - r.min_factor).abs() < 1e-12);
        // F matches the closed form below the blend window
        for (z, f) in forms.z.iter().zip(&forms.f) {
            if *z < PI - BLEND_HALF_WIDTH {
                assert!((f - (z.sin() - 1.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn example_rejects_large_epsilon_and_bad_anchors() {
        let spec = OpenThetaSpec::standard(400);
        assert!(matches!(
            build_example_i(&spec, 1.0),
            Err(Error::EpsilonTooLarge { .. })
        ));
        let bad = OpenThetaSpec {
            theta: Box::new(|z| 0.1 - z),
            dtheta: Box::new(|_| -1.0),
            z_range: (0.0, PI),
            grid: 10,
        };
        assert!(matches!(
            build_example_i(&bad, 0.1),
            Err(Error::AnchorViolation(_))
        ));
    }

    #[test]
    fn example_two() {
        let r = check_example_ii(EXAMPLE_II_RANGE, 4000);
        assert!(
            r.min_pairing > std::f64::consts::FRAC_1_SQRT_2
                && r.min_pairing > r.pairing_lower_bound
        );
        assert!((r.min_pairing - (20f64.atan() / 2.0).cos()).abs() < 1e-15);
        assert!(r.min_phi_slope > 0.0);
        assert_eq!(r.phi_slope_at_zero, 0.5);
        assert_eq!(r.transversality, 1.0);
        assert!(r.sup_abs_phi < FRAC_PI_4);
    }
}
