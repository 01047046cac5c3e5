//! Lifted angle functions `θ̃ : [0, 2π] → ℝ` with integer winding degree.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::spectral::{self, TrigSeries};

/// Smallest admissible grid.
pub const MIN_GRID: usize = 64;
/// Default grid size used throughout the toolkit.
pub const DEFAULT_GRID: usize = 2048;
/// Default threshold below which `|θ′|` counts as zero in [`find_extrema`].
pub const DEFAULT_FLAT_TOL: f64 = 1e-9;

const GAP_TOL: f64 = 1e-12;

/// Real lift of a circle map sampled at `z_j = 2πj/N`, `j = 0..=N`.
///
/// `samples[N] − samples[0]` is exactly `2π·degree`.
#[derive(Debug)]
pub struct CircleMap {
    samples: Vec<f64>,
    degree: i64,
    derivative: OnceLock<Vec<f64>>,
    series: OnceLock<TrigSeries>,
    hermite: OnceLock<Vec<(f64, f64)>>,
}

impl Clone for CircleMap {
    fn clone(&self) -> Self {
        Self::from_parts(self.samples.clone(), self.degree)
    }
}

impl CircleMap {
    fn from_parts(samples: Vec<f64>, degree: i64) -> Self {
        Self {
            samples,
            degree,
            derivative: OnceLock::new(),
            series: OnceLock::new(),
            hermite: OnceLock::new(),
        }
    }

    /// Builds a map from `N + 1` lift samples. The endpoint gap must be a
    /// multiple of 2π to 1e−12 and is then snapped exactly.
    pub fn from_lift(mut samples: Vec<f64>) -> Result<Self> {
        if samples.len() < MIN_GRID + 1 {
            return Err(Error::GridTooSmall(samples.len().saturating_sub(1)));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let n = samples.len() - 1;
        let gap = samples[n] - samples[0];
        let degree = (gap / TAU).round();
        let off = gap - degree * TAU;
        if off.abs() > GAP_TOL * (1.0 + gap.abs()) {
            return Err(Error::NonIntegralGap { gap, off });
        }
        samples[n] = samples[0] + degree * TAU;
        Ok(Self::from_parts(samples, degree as i64))
    }

    /// Samples a closed-form lift on the `n`-point grid.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = TAU / n as f64;
        Self::from_lift((0..=n).map(|j| f(h * j as f64)).collect())
    }

    /// `θ̃(z_j) = degree·z_j + periodic[j]` for `N` periodic samples.
    pub fn from_periodic(degree: i64, periodic: &[f64]) -> Result<Self> {
        let n = periodic.len();
        if n < MIN_GRID {
            return Err(Error::GridTooSmall(n));
        }
        let h = TAU / n as f64;
        let w = degree as f64;
        let mut samples: Vec<f64> = periodic
            .iter()
            .enumerate()
            .map(|(j, p)| w * h * j as f64 + p)
            .collect();
        samples.push(periodic[0] + w * TAU);
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self::from_parts(samples, degree))
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn step(&self) -> f64 {
        TAU / self.grid_size() as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.step() * j as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// `θ̃(z_j) − degree·z_j` for `j < N`.
    pub fn periodic_part(&self) -> Vec<f64> {
        let w = self.degree as f64;
        let h = self.step();
        self.samples[..self.grid_size()]
            .iter()
            .enumerate()
            .map(|(j, s)| s - w * h * j as f64)
            .collect()
    }

    /// `θ′` at the `N` nodes: spectral derivative of the periodic part plus
    /// the degree.
    pub fn derivative(&self) -> &[f64] {
        self.derivative.get_or_init(|| {
            let w = self.degree as f64;
            spectral::derivative(&self.periodic_part())
                .into_iter()
                .map(|d| d + w)
                .collect()
        })
    }

    fn series(&self) -> &TrigSeries {
        self.series
            .get_or_init(|| TrigSeries::new(&self.periodic_part()))
    }

    /// Band-limited reconstruction of the lift at any real `t`.
    pub fn eval_spectral(&self, t: f64) -> f64 {
        self.degree as f64 * t + self.series().eval(t)
    }

    pub fn eval_spectral_derivative(&self, t: f64) -> f64 {
        self.degree as f64 + self.series().eval_derivative(t)
    }

    fn hermite_slopes(&self) -> &[(f64, f64)] {
        self.hermite.get_or_init(|| {
            let n = self.grid_size();
            let h = self.step();
            let d = self.derivative();
            (0..n)
                .map(|j| {
                    let secant = (self.samples[j + 1] - self.samples[j]) / h;
                    let (mut ml, mut mr) = (d[j], d[(j + 1) % n]);
                    if secant == 0.0 {
                        return (0.0, 0.0);
                    }
                    // Fritsch–Carlson limiter on the spectral node slopes.
                    let mut a = ml / secant;
                    let mut b = mr / secant;
                    if a < 0.0 {
                        a = 0.0;
                    }
                    if b < 0.0 {
                        b = 0.0;
                    }
                    let r = a * a + b * b;
                    if r > 9.0 {
                        let tau = 3.0 / r.sqrt();
                        a *= tau;
                        b *= tau;
                    }
                    ml = a * secant;
                    mr = b * secant;
                    (ml, mr)
                })
                .collect()
        })
    }

    /// `θ̃(t)` for any real `t`: periodic extension of the lift with
    /// monotonicity-preserving cubic Hermite interpolation between nodes.
    pub fn evaluate_lift(&self, t: f64) -> f64 {
        let n = self.grid_size();
        let h = self.step();
        let mut k = (t / TAU).floor();
        let mut s = t - k * TAU;
        if s >= TAU {
            s -= TAU;
            k += 1.0;
        } else if s < 0.0 {
            s += TAU;
            k -= 1.0;
        }
        let j = ((s / h).floor() as usize).min(n - 1);
        let u = (s - h * j as f64) / h;
        let (ml, mr) = self.hermite_slopes()[j];
        let (y0, y1) = (self.samples[j], self.samples[j + 1]);
        let u2 = u * u;
        let u3 = u2 * u;
        let value = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * h * ml
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * h * mr;
        value + k * TAU * self.degree as f64
    }

    /// Derivative of [`Self::evaluate_lift`].
    pub fn evaluate_lift_derivative(&self, t: f64) -> f64 {
        let n = self.grid_size();
        let h = self.step();
        let s = t.rem_euclid(TAU);
        let j = ((s / h).floor() as usize).min(n - 1);
        let u = (s - h * j as f64) / h;
        let (ml, mr) = self.hermite_slopes()[j];
        let (y0, y1) = (self.samples[j], self.samples[j + 1]);
        let u2 = u * u;
        ((6.0 * u2 - 6.0 * u) * y0
            + (3.0 * u2 - 4.0 * u + 1.0) * h * ml
            + (-6.0 * u2 + 6.0 * u) * y1
            + (3.0 * u2 - 2.0 * u) * h * mr)
            / h
    }

    /// `θ̃ + c`.
    pub fn offset(&self, c: f64) -> Self {
        Self::from_parts(self.samples.iter().map(|s| s + c).collect(), self.degree)
    }

    /// `−θ̃`, the reflection used to reduce negative degrees to positive ones.
    pub fn negated(&self) -> Self {
        Self::from_parts(self.samples.iter().map(|s| -s).collect(), -self.degree)
    }

    /// `(1 − s)·a + s·b` for two maps on the same grid with the same degree.
    pub fn lerp(a: &Self, b: &Self, s: f64) -> Result<Self> {
        if a.samples.len() != b.samples.len() {
            return Err(Error::LengthMismatch {
                expected: a.samples.len(),
                found: b.samples.len(),
            });
        }
        debug_assert_eq!(a.degree, b.degree);
        let samples = a
            .samples
            .iter()
            .zip(&b.samples)
            .map(|(x, y)| (1.0 - s) * x + s * y)
            .collect();
        Ok(Self::from_parts(samples, a.degree))
    }

    /// `sup_j |self_j − other_j|` over the grid.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Unwraps values known modulo 2π into a [`CircleMap`].
///
/// `raw` holds `N + 1` samples including the endpoint `z = 2π`.
pub fn lift_samples(raw: &[f64], degree_hint: Option<i64>) -> Result<CircleMap> {
    if raw.len() < MIN_GRID + 1 {
        return Err(Error::GridTooSmall(raw.len().saturating_sub(1)));
    }
    if let Some(i) = raw.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut lifted = Vec::with_capacity(raw.len());
    lifted.push(raw[0]);
    for (index, pair) in raw.windows(2).enumerate() {
        let jump = pair[1] - pair[0];
        let reduced = jump - TAU * (jump / TAU).round();
        if reduced.abs() >= PI / 2.0 {
            return Err(Error::AmbiguousLift {
                index,
                jump: reduced,
            });
        }
        let prev = lifted[index];
        lifted.push(prev + reduced);
    }
    let n = raw.len() - 1;
    let found = ((lifted[n] - lifted[0]) / TAU).round() as i64;
    if let Some(hint) = degree_hint {
        if hint != found {
            return Err(Error::DegreeMismatch { hint, found });
        }
    }
    lifted[n] = lifted[0] + found as f64 * TAU;
    CircleMap::from_lift(lifted)
}

/// `(θ̃(2π) − θ̃(0)) / 2π`.
pub fn degree(m: &CircleMap) -> i64 {
    m.degree()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub z: f64,
    pub value: f64,
}

/// Alternating local maxima `a_k` and minima `b_k` of a lift.
///
/// Ordered `a_1 < b_1 < … < a_n < b_n < a_1 + 2π` with `a_1 ∈ [0, 2π)`; the
/// last minima may sit past 2π, in which case its value is the lift there.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtremaList {
    pub maxima: Vec<CriticalPoint>,
    pub minima: Vec<CriticalPoint>,
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Max,
    Min,
}

impl ExtremaList {
    pub fn len(&self) -> usize {
        self.maxima.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maxima.is_empty()
    }

    fn from_points(mut points: Vec<(f64, f64, Kind)>, degree: i64) -> Self {
        let shift = TAU * degree as f64;
        for p in points.iter_mut() {
            let k = (p.0 / TAU).floor();
            p.0 -= k * TAU;
            p.1 -= k * shift;
            if p.0 >= TAU {
                p.0 -= TAU;
                p.1 -= shift;
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let Some(first_max) = points.iter().position(|p| p.2 == Kind::Max) else {
            return Self::default();
        };
        points.rotate_left(first_max);
        let len = points.len();
        for p in points.iter_mut().skip(len - first_max) {
            p.0 += TAU;
            p.1 += shift;
        }
        let mut out = Self::default();
        for (z, value, kind) in points {
            let cp = CriticalPoint { z, value };
            match kind {
                Kind::Max => out.maxima.push(cp),
                Kind::Min => out.minima.push(cp),
            }
        }
        out
    }

    /// Extrema of `−θ̃` given the extrema of `θ̃` (degree of `θ̃` supplied).
    pub fn reflected(&self, degree: i64) -> Self {
        let points = self
            .minima
            .iter()
            .map(|c| (c.z, -c.value, Kind::Max))
            .chain(self.maxima.iter().map(|c| (c.z, -c.value, Kind::Min)))
            .collect();
        Self::from_points(points, -degree)
    }
}

fn refine_root(m: &CircleMap, mut lo: f64, mut hi: f64, lo_sign: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if m.eval_spectral_derivative(mid) * lo_sign > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locates the local extrema of `θ̃` from sign changes of `θ′`, refined by
/// bisection on the band-limited derivative.
pub fn find_extrema(m: &CircleMap, flat_tol: f64) -> Result<ExtremaList> {
    let n = m.grid_size();
    let h = m.step();
    let d = m.derivative();
    let sign = |j: usize| -> i8 {
        let v = d[j % n];
        if v.abs() <= flat_tol {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    };
    let Some(start) = (0..n).find(|&j| sign(j) != 0) else {
        return Err(Error::DegenerateCritical { z: 0.0, cells: n });
    };
    let mut points = Vec::new();
    let mut prev = start;
    let mut prev_sign = sign(start);
    for i in start + 1..=start + n {
        let s = sign(i);
        if s == 0 {
            continue;
        }
        let run = i - prev - 1;
        if s != prev_sign {
            let lo = h * prev as f64;
            let hi = h * i as f64;
            let z = refine_root(m, lo, hi, prev_sign as f64);
            let kind = if prev_sign > 0 { Kind::Max } else { Kind::Min };
            points.push((z, m.eval_spectral(z), kind));
        } else if run > 4 {
            return Err(Error::DegenerateCritical {
                z: (h * (prev + 1) as f64).rem_euclid(TAU),
                cells: run,
            });
        }
        prev = i;
        prev_sign = s;
    }
    Ok(ExtremaList::from_points(points, m.degree()))
}
