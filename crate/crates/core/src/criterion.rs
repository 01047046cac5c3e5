//! The drawdown criterion deciding whether a geodesic field is conformally
//! Reeb, with a witness pair on rejection.
//!
//! For `deg θ > 0` the field is accepted iff `θ̃(b) − θ̃(a) > −π` for all
//! `a < b`, i.e. iff the largest drop `sup_{a<b} θ̃(a) − θ̃(b)` stays below π.
//! Negative degrees are handled through `−θ̃`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_map::CircleMap;
use crate::error::{Error, Result};

/// Half-width of the band around π inside which no verdict is issued.
pub const DECISION_TOL: f64 = 1e-7;

/// A pair `a < b` with `drop = θ̃(a) − θ̃(b)` (orientation-adjusted).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrawdownWitness {
    pub a: f64,
    pub b: f64,
    pub drop: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ConformallyReeb,
    NotReeb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReebDecision {
    pub verdict: Verdict,
    pub degree: i64,
    pub max_drawdown: f64,
    /// Populated on rejection when a pair with drop ≥ π exists.
    pub witness: Option<DrawdownWitness>,
    /// Pair realizing `max_drawdown` (present for non-zero degree).
    pub extremal_pair: Option<DrawdownWitness>,
    pub margin: f64,
    pub reason: String,
}

/// Lift values on `[0, 4π]`, oriented so that the degree is non-negative.
fn oriented_extended(m: &CircleMap, orientation: f64) -> Vec<f64> {
    let n = m.grid_size();
    let shift = std::f64::consts::TAU * m.degree() as f64;
    let s = m.samples();
    (0..=2 * n)
        .map(|j| {
            let v = if j <= n { s[j] } else { s[j - n] + shift };
            orientation * v
        })
        .collect()
}

fn orientation(m: &CircleMap) -> Result<f64> {
    match m.degree().signum() {
        0 => Err(Error::ZeroDegree),
        s => Ok(s as f64),
    }
}

fn witness_from(m: &CircleMap, ia: usize, ib: usize, drop: f64) -> DrawdownWitness {
    DrawdownWitness {
        a: m.node(ia),
        b: m.node(ib),
        drop,
    }
}

/// Exhaustive search over grid pairs `a ∈ [0, 2π]`, `b ∈ [a, a + 2π]`.
///
/// Returns the grid supremum of the oriented drop and its maximizing pair.
pub fn max_drawdown(m: &CircleMap) -> Result<(f64, DrawdownWitness)> {
    let sign = orientation(m)?;
    let v = oriented_extended(m, sign);
    let n = m.grid_size();
    let (drop, ia, ib) = (0..=n)
        .into_par_iter()
        .map(|a| {
            let mut best = (0.0, a, a);
            for b in a..=a + n {
                let d = v[a] - v[b];
                if d > best.0 {
                    best = (d, a, b);
                }
            }
            best
        })
        .reduce(
            || (0.0, 0, 0),
            |x, y| {
                if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                    y
                } else {
                    x
                }
            },
        );
    Ok((drop, witness_from(m, ia, ib, drop)))
}

/// Single pass with a running maximum; equal to [`max_drawdown`] on the grid.
pub fn max_drawdown_streaming(m: &CircleMap) -> Result<(f64, DrawdownWitness)> {
    let sign = orientation(m)?;
    let v = oriented_extended(m, sign);
    let n = m.grid_size();
    let mut peak = 0;
    let mut best = (0.0, 0, 0);
    for (b, &vb) in v.iter().enumerate() {
        if b <= n && vb > v[peak] {
            peak = b;
        }
        let d = v[peak] - vb;
        if d > best.0 {
            best = (d, peak, b);
        }
    }
    Ok((best.0, witness_from(m, best.1, best.2, best.0)))
}

/// Moves a grid extremum to the nearby root of `θ′` (band-limited), keeping
/// the grid location when no sign change brackets it.
fn refine_extremum(m: &CircleMap, z: f64, sign: f64, maximum: bool) -> f64 {
    let h = m.step();
    let slope = |t: f64| sign * m.eval_spectral_derivative(t);
    let (mut lo, mut hi) = (z - h, z + h);
    let (slo, shi) = (slope(lo), slope(hi));
    let brackets = if maximum {
        slo >= 0.0 && shi <= 0.0
    } else {
        slo <= 0.0 && shi >= 0.0
    };
    if !brackets {
        return z;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let rising = slope(mid) > 0.0;
        if rising == maximum {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Refines the grid witness to the extrema of the band-limited lift.
fn refine_witness(m: &CircleMap, grid: DrawdownWitness, sign: f64) -> DrawdownWitness {
    if grid.drop <= 0.0 {
        return grid;
    }
    let a = refine_extremum(m, grid.a, sign, true);
    let b = refine_extremum(m, grid.b, sign, false);
    let drop = sign * (m.eval_spectral(a) - m.eval_spectral(b));
    if drop >= grid.drop && a < b {
        DrawdownWitness { a, b, drop }
    } else {
        grid
    }
}

/// Largest oscillation for a degree-zero map, in either direction.
fn degree_zero_swing(m: &CircleMap) -> DrawdownWitness {
    let s = m.samples();
    let n = m.grid_size();
    let (imax, imin) = (0..n).fold((0, 0), |(hi, lo), j| {
        (
            if s[j] > s[hi] { j } else { hi },
            if s[j] < s[lo] { j } else { lo },
        )
    });
    let (a, b) = if imax <= imin {
        (imax, imin)
    } else {
        (imin, imax)
    };
    DrawdownWitness {
        a: m.node(a),
        b: m.node(b),
        drop: s[imax] - s[imin],
    }
}

pub fn decide(m: &CircleMap) -> Result<ReebDecision> {
    decide_with_tol(m, DECISION_TOL)
}

/// Applies the criterion with an explicit borderline tolerance.
pub fn decide_with_tol(m: &CircleMap, tol: f64) -> Result<ReebDecision> {
    let degree = m.degree();
    if degree == 0 {
        let swing = degree_zero_swing(m);
        let witness = (swing.drop >= PI).then_some(swing);
        return Ok(ReebDecision {
            verdict: Verdict::NotReeb,
            degree,
            max_drawdown: swing.drop,
            witness,
            extremal_pair: None,
            margin: PI - swing.drop,
            reason: "degree zero".to_string(),
        });
    }
    let sign = degree.signum() as f64;
    let (_, grid) = max_drawdown(m)?;
    let pair = refine_witness(m, grid, sign);
    let value = pair.drop;
    if (value - PI).abs() < tol {
        return Err(Error::Borderline {
            max_drawdown: value,
            tol,
            degree,
        });
    }
    let accepted = value < PI - tol;
    Ok(ReebDecision {
        verdict: if accepted {
            Verdict::ConformallyReeb
        } else {
            Verdict::NotReeb
        },
        degree,
        max_drawdown: value,
        witness: (!accepted).then_some(pair),
        extremal_pair: Some(pair),
        margin: PI - value,
        reason: if accepted {
            "drawdown below π".to_string()
        } else {
            "drawdown reaches π".to_string()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_map::DEFAULT_GRID;

    fn map(f: impl Fn(f64) -> f64) -> CircleMap {
        CircleMap::from_fn(DEFAULT_GRID, f).unwrap()
    }

    #[test]
    fn identity_has_no_drawdown() {
        let (v, _) = max_drawdown(&map(|z| z)).unwrap();
        assert_eq!(v, 0.0);
    }

    /// Closed-form extrema of `z + A sin z` (roots of `1 + A cos z`) and the drop between them.
    fn sine_oracle(amp: f64) -> (f64, f64, f64) {
        let a = (-1.0 / amp).acos();
        let b = std::f64::consts::TAU - a;
        (a, b, (a + amp * a.sin()) - (b + amp * b.sin()))
    }

    #[test]
    fn single_dip_values() {
        let (oa, ob, od) = sine_oracle(1.5);
        let m = map(|z| z + 1.5 * z.sin());
        let (v, w) = max_drawdown(&m).unwrap();
        assert!((v - od).abs() < 1e-4, "{v}");
        assert!((v - 0.55393).abs() < 1e-4);
        assert!((w.a - oa).abs() < 5e-3 && (w.b - ob).abs() < 5e-3);
        let d = decide(&m).unwrap();
        assert_eq!(d.verdict, Verdict::ConformallyReeb);
        assert!((d.margin - 2.58766).abs() < 1e-4);
        assert!((d.max_drawdown - od).abs() < 1e-10);
        assert!(d.witness.is_none());
        let p = d.extremal_pair.unwrap();
        assert!((p.a - oa).abs() < 1e-8 && (p.b - ob).abs() < 1e-8);
    }

    #[test]
    fn deep_dip_is_rejected() {
        let (oa, ob, od) = sine_oracle(3.5);
        let m = map(|z| z + 3.5 * z.sin());
        let (v, _) = max_drawdown(&m).unwrap();
        assert!((v - od).abs() < 1e-4);
        let d = decide(&m).unwrap();
        assert_eq!(d.verdict, Verdict::NotReeb);
        let w = d.witness.unwrap();
        assert!((w.drop - od).abs() < 1e-10);
        assert!((w.a - oa).abs() < 1e-8 && (w.b - ob).abs() < 1e-8);
    }

    #[test]
    fn degree_zero_is_rejected() {
        let d = decide(&map(|_| 0.7)).unwrap();
        assert_eq!(d.verdict, Verdict::NotReeb);
        assert_eq!(d.reason, "degree zero");
        assert!(d.witness.is_none());
        let d = decide(&map(|z| 2.0 * z.sin())).unwrap();
        assert!(d.witness.unwrap().drop >= PI);
        assert!(matches!(
            max_drawdown(&map(|_| 0.7)),
            Err(Error::ZeroDegree)
        ));
    }

    #[test]
    fn streaming_matches_exhaustive() {
        for f in [
            |z: f64| z + 1.5 * z.sin(),
            |z: f64| -2.0 * z + 1.1 * (3.0 * z).cos(),
            |z: f64| 3.0 * z + 2.0 * (2.0 * z + 0.4).sin() - 0.7 * (5.0 * z).cos(),
        ] {
            let m = map(f);
            let (a, _) = max_drawdown(&m).unwrap();
            let (b, _) = max_drawdown_streaming(&m).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn borderline_is_reported() {
        let d = decide_with_tol(&map(|z| z + 1.5 * z.sin()), 3.0);
        assert!(matches!(d, Err(Error::Borderline { .. })));
    }
}
