//! Monotone angle functions `φ` in the tube `|φ − θ| < π/2`.
//!
//! Levels follow the plateau recursion `c_k = min(c_{k+1}, max I_k)`. The
//! nondecreasing profile is then assembled from three monotone envelopes of
//! the (oriented) lift:
//!
//! * `U(z) = inf_{t ≥ z} θ(t) + π/2 − δ` (equal to `c_k − δ` on plateau `k`),
//! * `L(z) = sup_{t ≤ z} θ(t) − π/2 + δ`,
//! * the running maximum / running minimum of `θ`, offset by the bias `s`.
//!
//! `φ⁺ = min(U, max(L, runmax θ + s))` only increases where it lies above `θ`
//! and `φ⁻ = max(L, min(U, runmin θ − s))` only where it lies below, which is
//! what fixes the sign of `I`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::circle_map::{CircleMap, ExtremaList};
use crate::error::{Error, Result};
use crate::solver;
use crate::spectral;

pub const DEFAULT_DELTA: f64 = PI / 64.0;
pub const DEFAULT_ETA: f64 = 1e-3;

/// Tolerance used when checking `c_k ∈ I_k`.
const INTERVAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bias {
    Neutral,
    Minus,
    Plus,
}

impl Bias {
    fn sign(self) -> f64 {
        match self {
            Bias::Neutral => 0.0,
            Bias::Minus => -1.0,
            Bias::Plus => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOptions {
    pub delta: f64,
    pub eta: f64,
    /// Standard deviation of the Gaussian mollifier (radians of `z`).
    pub smoothing: f64,
    /// Refinement factor of the grid on which the raw profile is mollified.
    pub oversample: usize,
    pub bias_start: f64,
    pub max_escalations: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            eta: DEFAULT_ETA,
            smoothing: 0.02,
            oversample: 8,
            bias_start: 0.05,
            max_escalations: 20,
        }
    }
}

/// Plateau levels for the oriented lift `sign(deg)·θ̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauPlan {
    /// `±1`; the plan describes `orientation·θ̃`, which has positive degree.
    pub orientation: i64,
    pub degree: i64,
    pub extrema: ExtremaList,
    /// `I_k = [θ(a_k) − π/2, θ(b_k) + π/2]`.
    pub intervals: Vec<(f64, f64)>,
    /// Upper levels `c_k`.
    pub levels: Vec<f64>,
    /// Lower levels `max_{l ≤ k} min I_l`, the smallest admissible monotone choice.
    pub lower_levels: Vec<f64>,
}

impl PlateauPlan {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Largest `δ` for which the δ-shrunk level bands stay non-empty.
    pub fn max_delta(&self) -> f64 {
        self.levels
            .iter()
            .zip(&self.lower_levels)
            .map(|(c, l)| 0.5 * (c - l))
            .fold(FRAC_PI_2, f64::min)
    }
}

/// Element of the tube `B` with its construction parameters.
#[derive(Debug, Clone)]
pub struct PhiFunction {
    pub map: CircleMap,
    pub delta: f64,
    pub eta: f64,
    pub bias: Bias,
    /// Final bias offset `s` (0 for the neutral variant).
    pub bias_magnitude: f64,
}

/// Translation `λ` along the fibre composed with rotation `ϕ`, generating a
/// cyclic group of order `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScrewData {
    pub lambda: f64,
    pub rotation: f64,
    pub order: usize,
}

impl ScrewData {
    /// Standard presentation with `λ = 2π/m`.
    pub fn standard(order: usize, rotation: f64) -> Result<Self> {
        let s = Self {
            lambda: TAU / order.max(1) as f64,
            rotation,
            order,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-9;
        if self.order == 0 {
            return Err(Error::InvalidScrew("order must be positive".into()));
        }
        if !(self.lambda > 0.0 && self.lambda <= TAU + TOL) {
            return Err(Error::InvalidScrew(format!(
                "translation {} outside (0, 2π]",
                self.lambda
            )));
        }
        let m = self.order as f64;
        let off = |x: f64| (x / TAU - (x / TAU).round()).abs() * TAU;
        if off(m * self.lambda) > TOL {
            return Err(Error::InvalidScrew(format!(
                "m·λ = {} is not a multiple of 2π",
                m * self.lambda
            )));
        }
        if off(m * self.rotation) > TOL {
            return Err(Error::InvalidScrew(format!(
                "m·ϕ = {} is not a multiple of 2π",
                m * self.rotation
            )));
        }
        if (self.lambda - TAU / m).abs() > TOL {
            return Err(Error::InvalidScrew(format!(
                "only the standard presentation λ = 2π/m is supported (λ = {})",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Values `x_k` for `k ∈ 0..n` extended quasi-periodically by `x_{k+n} = x_k + shift`.
fn cyclic(values: &[f64], shift: f64, k: isize) -> f64 {
    let n = values.len() as isize;
    let q = k.div_euclid(n);
    values[k.rem_euclid(n) as usize] + q as f64 * shift
}

/// `min_{l ≥ k} x_l` over the quasi-periodic extension (window of length n).
fn suffix_min(values: &[f64], shift: f64) -> Vec<f64> {
    let n = values.len() as isize;
    (0..n)
        .map(|k| {
            (k..k + n)
                .map(|l| cyclic(values, shift, l))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// `max_{l ≤ k} x_l` over the quasi-periodic extension.
fn prefix_max(values: &[f64], shift: f64) -> Vec<f64> {
    let n = values.len() as isize;
    (0..n)
        .map(|k| {
            (k - n + 1..=k)
                .map(|l| cyclic(values, shift, l))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Computes `I_k` and the levels of the plateau recursion.
///
/// `ext` are the extrema of `θ` itself; negative degrees are reflected.
pub fn plateau_levels(theta: &CircleMap, ext: &ExtremaList) -> Result<PlateauPlan> {
    let degree = theta.degree();
    if degree == 0 {
        return Err(Error::ZeroDegree);
    }
    let orientation = degree.signum();
    let extrema = if orientation > 0 {
        ext.clone()
    } else {
        ext.reflected(degree)
    };
    let w = degree.abs();
    let shift = TAU * w as f64;
    let intervals: Vec<(f64, f64)> = extrema
        .maxima
        .iter()
        .zip(&extrema.minima)
        .map(|(a, b)| (a.value - FRAC_PI_2, b.value + FRAC_PI_2))
        .collect();
    let uppers: Vec<f64> = intervals.iter().map(|i| i.1).collect();
    let lowers: Vec<f64> = intervals.iter().map(|i| i.0).collect();
    let levels = suffix_min(&uppers, shift);
    let lower_levels = prefix_max(&lowers, shift);
    for (index, (&(lo, _), &level)) in intervals.iter().zip(&levels).enumerate() {
        if level < lo - INTERVAL_TOL * (1.0 + lo.abs()) {
            return Err(Error::InfeasibleIntervals {
                index,
                level,
                lower: lo,
            });
        }
    }
    Ok(PlateauPlan {
        orientation,
        degree: w,
        extrema,
        intervals,
        levels,
        lower_levels,
    })
}

/// Per-segment constants of the oriented profile.
struct Segments {
    a: Vec<f64>,
    b: Vec<f64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
    run_max: Vec<f64>,
    run_min: Vec<f64>,
    shift: f64,
}

impl Segments {
    fn new(plan: &PlateauPlan, delta: f64) -> Self {
        let shift = TAU * plan.degree as f64;
        let ext = &plan.extrema;
        let maxv: Vec<f64> = ext.maxima.iter().map(|c| c.value).collect();
        let minv: Vec<f64> = ext.minima.iter().map(|c| c.value).collect();
        Self {
            a: ext.maxima.iter().map(|c| c.z).collect(),
            b: ext.minima.iter().map(|c| c.z).collect(),
            upper: plan.levels.iter().map(|c| c - delta).collect(),
            lower: plan.lower_levels.iter().map(|c| c + delta).collect(),
            run_max: prefix_max(&maxv, shift),
            run_min: suffix_min(&minv, shift),
            shift,
        }
    }

    fn at(&self, v: &[f64], k: isize) -> f64 {
        cyclic(v, self.shift, k)
    }
}

/// Raw oriented profile at lift value `th` of the point `z` (with `z` already
/// moved into `[a_1, a_1 + 2π)`), on segment `seg` found by the caller.
fn profile_value(
    seg: &Segments,
    k: isize,
    on_plateau: bool,
    th: f64,
    delta: f64,
    s: f64,
    bias: f64,
) -> f64 {
    let (u, l, rmax, rmin) = if on_plateau {
        (
            seg.at(&seg.upper, k),
            seg.at(&seg.lower, k),
            seg.at(&seg.run_max, k),
            seg.at(&seg.run_min, k),
        )
    } else {
        (
            (th + FRAC_PI_2 - delta).min(seg.at(&seg.upper, k + 1)),
            (th - FRAC_PI_2 + delta).max(seg.at(&seg.lower, k)),
            th.max(seg.at(&seg.run_max, k)),
            th.min(seg.at(&seg.run_min, k + 1)),
        )
    };
    let plus = |s: f64| u.min(l.max(rmax + s));
    let minus = |s: f64| l.max(u.min(rmin - s));
    if bias > 0.0 {
        plus(s)
    } else if bias < 0.0 {
        minus(s)
    } else {
        0.5 * (plus(0.0) + minus(0.0))
    }
}

/// Oriented raw profile on the fine grid `z_j = 2πj/M`, returning `M` lift values.
fn raw_profile(theta_fine: &[f64], plan: &PlateauPlan, delta: f64, s: f64, bias: f64) -> Vec<f64> {
    let m = theta_fine.len();
    let h = TAU / m as f64;
    if plan.is_empty() {
        return theta_fine.iter().map(|t| t + bias * s).collect();
    }
    let seg = Segments::new(plan, delta);
    let n = seg.a.len() as isize;
    let a1 = seg.a[0];
    let mut points: Vec<(f64, usize)> = (0..m)
        .map(|j| {
            let z = h * j as f64;
            (if z < a1 { z + TAU } else { z }, j)
        })
        .collect();
    points.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = vec![0.0; m];
    let mut k: isize = 0;
    for (zz, j) in points {
        while k + 1 < n && zz >= seg.a[(k + 1) as usize] {
            k += 1;
        }
        let wrapped = zz >= TAU;
        let th = theta_fine[j] + if wrapped { seg.shift } else { 0.0 };
        let on_plateau = zz <= seg.b[k as usize];
        let v = profile_value(&seg, k, on_plateau, th, delta, s, bias);
        out[j] = v - if wrapped { seg.shift } else { 0.0 };
    }
    out
}

fn check_membership(theta: &CircleMap, phi: &CircleMap, delta: f64, eta: f64) -> Result<()> {
    let sign = theta.degree().signum() as f64;
    let min_slope = phi
        .derivative()
        .iter()
        .map(|d| sign * d)
        .fold(f64::INFINITY, f64::min);
    if !(min_slope >= eta) {
        return Err(Error::NotMonotone { min_slope, eta });
    }
    let sup = phi.sup_distance(theta);
    if !(sup <= FRAC_PI_2 - 0.5 * delta) {
        return Err(Error::TubeViolation {
            required: 0.5 * delta,
            reached: FRAC_PI_2 - sup,
        });
    }
    Ok(())
}

/// One construction pass at fixed bias offset `s`.
fn assemble(
    theta: &CircleMap,
    plan: &PlateauPlan,
    opts: &SynthesisOptions,
    bias: Bias,
    s: f64,
    order: Option<usize>,
) -> Result<CircleMap> {
    let delta = opts.delta;
    if plan.max_delta() < delta {
        return Err(Error::TubeViolation {
            required: delta,
            reached: plan.max_delta(),
        });
    }
    let oriented = if plan.orientation > 0 {
        theta.clone()
    } else {
        theta.negated()
    };
    let n = theta.grid_size();
    let m = n * opts.oversample.max(1);
    let w = plan.degree as f64;
    let hf = TAU / m as f64;
    let theta_fine: Vec<f64> = spectral::resample(&oriented.periodic_part(), m)
        .into_iter()
        .enumerate()
        .map(|(j, p)| p + w * hf * j as f64)
        .collect();
    let s_eff = s.min(FRAC_PI_2 - delta);
    let psi = raw_profile(&theta_fine, plan, delta, s_eff, bias.sign());
    // Blend toward the mean line so that plateaus acquire slope η.
    let rho = (1.0 + 1e-3) * opts.eta / w;
    let periodic: Vec<f64> = psi
        .iter()
        .enumerate()
        .map(|(j, v)| v - w * hf * j as f64)
        .collect();
    let mean = periodic.iter().sum::<f64>() / m as f64;
    let blended: Vec<f64> = periodic
        .iter()
        .map(|p| (1.0 - rho) * (p - mean) + mean)
        .collect();
    let mut smooth = spectral::gaussian_smooth(&blended, opts.smoothing);
    if let Some(order) = order {
        smooth = spectral::project_invariant(&smooth, order);
    }
    let coarse: Vec<f64> = smooth
        .iter()
        .step_by(opts.oversample.max(1))
        .copied()
        .collect();
    let phi = CircleMap::from_periodic(plan.degree, &coarse)?;
    let phi = if plan.orientation > 0 {
        phi
    } else {
        phi.negated()
    };
    check_membership(theta, &phi, delta, opts.eta)?;
    Ok(phi)
}

fn build_inner(
    theta: &CircleMap,
    plan: &PlateauPlan,
    opts: &SynthesisOptions,
    bias: Bias,
    order: Option<usize>,
) -> Result<PhiFunction> {
    let wrap = |map, s| PhiFunction {
        map,
        delta: opts.delta,
        eta: opts.eta,
        bias,
        bias_magnitude: s,
    };
    if bias == Bias::Neutral {
        return Ok(wrap(assemble(theta, plan, opts, bias, 0.0, order)?, 0.0));
    }
    let want = bias.sign();
    let cap = FRAC_PI_2 - opts.delta;
    let mut s = opts.bias_start;
    for escalation in 0..=opts.max_escalations {
        let map = assemble(theta, plan, opts, bias, s, order)?;
        let value = solver::functional_i(theta, &map)?;
        if value * want > 0.0 {
            return Ok(wrap(map, s.min(cap)));
        }
        if s >= cap {
            return Err(Error::MaxBias {
                sign: if want > 0.0 { "positive" } else { "negative" },
                escalations: escalation,
            });
        }
        s *= 2.0;
    }
    Err(Error::MaxBias {
        sign: if want > 0.0 { "positive" } else { "negative" },
        escalations: opts.max_escalations,
    })
}

/// Builds `φ` with the default mollifier settings.
pub fn build_phi(
    theta: &CircleMap,
    plan: &PlateauPlan,
    delta: f64,
    eta: f64,
    bias: Bias,
) -> Result<PhiFunction> {
    let opts = SynthesisOptions {
        delta,
        eta,
        ..SynthesisOptions::default()
    };
    build_phi_with(theta, plan, &opts, bias)
}

pub fn build_phi_with(
    theta: &CircleMap,
    plan: &PlateauPlan,
    opts: &SynthesisOptions,
    bias: Bias,
) -> Result<PhiFunction> {
    build_inner(theta, plan, opts, bias, None)
}

/// `sup_t |θ(t + λ) − θ(t) − ϕ_lift|` where `ϕ_lift = 2π·deg/m`, or an error
/// when the screw rotation is incompatible with the degree.
pub fn equivariance_residual(theta: &CircleMap, screw: &ScrewData) -> Result<f64> {
    screw.validate()?;
    let m = screw.order as f64;
    let lift_rotation = TAU * theta.degree() as f64 / m;
    let diff = screw.rotation - lift_rotation;
    let mismatch = (diff - TAU * (diff / TAU).round()).abs();
    let periodic = theta.periodic_part();
    let shifted = spectral::shift(&periodic, screw.lambda);
    let residual = shifted
        .iter()
        .zip(&periodic)
        .map(|(a, b)| (a - b).abs())
        .fold(mismatch, f64::max);
    Ok(residual)
}

/// `φ` with `φ(t + λ) = φ(t) + 2π·deg/m`, obtained by averaging over the
/// cyclic group, which preserves monotonicity and the tube.
pub fn build_equivariant_phi(
    theta: &CircleMap,
    screw: &ScrewData,
    plan: &PlateauPlan,
    opts: &SynthesisOptions,
    bias: Bias,
) -> Result<PhiFunction> {
    let residual = equivariance_residual(theta, screw)?;
    if residual >= 1e-9 {
        return Err(Error::NotEquivariant { residual });
    }
    build_inner(theta, plan, opts, bias, Some(screw.order))
}

/// Seam residuals `(sup_t |φ(t+λ) − φ(t) − ϕ|, |φ′(λ) − φ′(0)|)`.
pub fn seam_residuals(phi: &CircleMap, screw: &ScrewData) -> (f64, f64) {
    let m = screw.order as f64;
    let lift_rotation = TAU * phi.degree() as f64 / m;
    let periodic = phi.periodic_part();
    let shifted = spectral::shift(&periodic, screw.lambda);
    let value = shifted
        .iter()
        .zip(&periodic)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let lhs = phi.eval_spectral(screw.lambda) - phi.eval_spectral(0.0);
    let value = value.max((lhs - lift_rotation).abs());
    let slope =
        (phi.eval_spectral_derivative(screw.lambda) - phi.eval_spectral_derivative(0.0)).abs();
    (value, slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_map::{find_extrema, DEFAULT_FLAT_TOL, DEFAULT_GRID};

    fn map(f: impl Fn(f64) -> f64) -> CircleMap {
        CircleMap::from_fn(DEFAULT_GRID, f).unwrap()
    }

    fn plan_for(theta: &CircleMap) -> PlateauPlan {
        let ext = find_extrema(theta, DEFAULT_FLAT_TOL).unwrap();
        plateau_levels(theta, &ext).unwrap()
    }

    #[test]
    fn identity_has_empty_plan() {
        let theta = map(|z| z);
        assert!(plan_for(&theta).is_empty());
    }

    #[test]
    fn single_dip_interval() {
        let theta = map(|z| z + 1.5 * z.sin());
        let plan = plan_for(&theta);
        assert_eq!(plan.len(), 1);
        let a = (-2.0f64 / 3.0).acos();
        let b = TAU - a;
        let lo = a + 1.5 * a.sin() - FRAC_PI_2;
        let hi = b + 1.5 * b.sin() + FRAC_PI_2;
        assert!((plan.intervals[0].0 - lo).abs() < 1e-9);
        assert!((plan.intervals[0].1 - hi).abs() < 1e-9);
        assert!((lo - 1.84776).abs() < 1e-4 && (hi - 4.43543).abs() < 1e-4);
        assert_eq!(plan.levels[0], plan.intervals[0].1);
    }

    #[test]
    fn two_dips_follow_recursion() {
        let theta = map(|z| z + 1.3 * (2.0 * z).sin());
        let plan = plan_for(&theta);
        assert_eq!(plan.len(), 2);
        // backward recursion applied directly to the intervals
        let c2 = plan.intervals[1].1;
        let c1 = c2.min(plan.intervals[0].1);
        assert_eq!(plan.levels[1], c2);
        assert_eq!(plan.levels[0], c1);
        assert!(plan.levels[0] <= plan.levels[1]);
        for (c, i) in plan.levels.iter().zip(&plan.intervals) {
            assert!(*c >= i.0 && *c <= i.1);
        }
    }

    #[test]
    fn identity_neutral_is_identity() {
        let theta = map(|z| z);
        let plan = plan_for(&theta);
        let phi = build_phi(&theta, &plan, DEFAULT_DELTA, DEFAULT_ETA, Bias::Neutral).unwrap();
        assert!(phi.map.sup_distance(&theta) < 1e-12);
    }

    #[test]
    fn identity_minus_is_below() {
        let theta = map(|z| z);
        let plan = plan_for(&theta);
        let phi = build_phi(&theta, &plan, DEFAULT_DELTA, DEFAULT_ETA, Bias::Minus).unwrap();
        assert!(phi
            .map
            .samples()
            .iter()
            .zip(theta.samples())
            .all(|(p, t)| p < t));
        assert!(solver::functional_i(&theta, &phi.map).unwrap() < 0.0);
    }

    #[test]
    fn single_dip_phi_is_in_tube() {
        let theta = map(|z| z + 1.5 * z.sin());
        let plan = plan_for(&theta);
        for bias in [Bias::Neutral, Bias::Minus, Bias::Plus] {
            let phi = build_phi(&theta, &plan, DEFAULT_DELTA, DEFAULT_ETA, bias).unwrap();
            assert_eq!(phi.map.degree(), 1);
            let min = phi
                .map
                .derivative()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            assert!(min >= DEFAULT_ETA, "{min}");
            assert!(phi.map.sup_distance(&theta) <= FRAC_PI_2 - DEFAULT_DELTA / 2.0);
        }
    }

    /// Discrete envelopes computed by brute force over the grid.
    #[test]
    fn plateau_values_match_envelope() {
        let theta = map(|z| z + 1.3 * (2.0 * z).sin() + 0.4 * (3.0 * z).cos());
        let plan = plan_for(&theta);
        let n = theta.grid_size();
        let s = theta.samples();
        let ext = |j: usize| s[j % n] + TAU * (j / n) as f64;
        for (k, a) in plan.extrema.maxima.iter().enumerate() {
            let j0 = (a.z / theta.step()).ceil() as usize;
            let inf = (j0..j0 + n).map(ext).fold(f64::INFINITY, f64::min);
            assert!((plan.levels[k] - (inf + FRAC_PI_2)).abs() < 1e-5, "{k}");
        }
    }

    #[test]
    fn negative_degree_reflects() {
        let theta = map(|z| -z - 1.5 * z.sin());
        let plan = plan_for(&theta);
        assert_eq!(plan.orientation, -1);
        let mirror = plan_for(&theta.negated());
        assert_eq!(plan.levels.len(), mirror.levels.len());
        for (a, b) in plan.levels.iter().zip(&mirror.levels) {
            assert!((a - b).abs() < 1e-12);
        }
        for bias in [Bias::Minus, Bias::Plus] {
            let phi = build_phi(&theta, &plan, DEFAULT_DELTA, DEFAULT_ETA, bias).unwrap();
            assert_eq!(phi.map.degree(), -1);
            let i = solver::functional_i(&theta, &phi.map).unwrap();
            assert_eq!(i > 0.0, bias == Bias::Plus);
        }
    }

    #[test]
    fn tube_violation_for_large_delta() {
        let theta = map(|z| z + 2.4 * z.sin());
        let plan = plan_for(&theta);
        let err = build_phi(&theta, &plan, 0.7, DEFAULT_ETA, Bias::Neutral).unwrap_err();
        assert!(matches!(err, Error::TubeViolation { .. }));
    }

    #[test]
    fn screw_validation() {
        assert!(ScrewData::standard(2, PI).is_ok());
        assert!(ScrewData::standard(3, 1.0).is_err());
        assert!(ScrewData {
            lambda: 1.0,
            rotation: 0.0,
            order: 2
        }
        .validate()
        .is_err());
    }

    #[test]
    fn equivariant_examples() {
        let screw = ScrewData::standard(2, PI).unwrap();
        let opts = SynthesisOptions::default();
        let theta = map(|z| z);
        assert!(equivariance_residual(&theta, &screw).unwrap() < 1e-12);

        let theta = map(|z| z + 0.5 * (2.0 * z).sin());
        let plan = plan_for(&theta);
        for bias in [Bias::Minus, Bias::Plus] {
            let phi = build_equivariant_phi(&theta, &screw, &plan, &opts, bias).unwrap();
            let (r, c1) = seam_residuals(&phi.map, &screw);
            assert!(r < 1e-9 && c1 < 1e-6, "{r} {c1}");
        }

        let theta = map(|z| z + 0.5 * z.sin());
        let plan = plan_for(&theta);
        let err = build_equivariant_phi(&theta, &screw, &plan, &opts, Bias::Plus).unwrap_err();
        assert!(matches!(err, Error::NotEquivariant { .. }));
    }
}
