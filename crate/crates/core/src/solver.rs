//! The functional `I(φ) = ∫ tan(φ − θ) θ′`, its zero on the segment
//! `[φ⁻, φ⁺]`, the rescaling `f = exp(−∫ tan(φ − θ) θ′)` and the assembled
//! certificate `f X_T = R_{(1/g) α_φ}` with `g = f cos(φ − θ)`.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::circle_map::{find_extrema, CircleMap, DEFAULT_FLAT_TOL};
use crate::criterion::{decide_with_tol, ReebDecision, Verdict, DECISION_TOL};
use crate::error::{Error, Result};
use crate::forms::{contact_density, reeb_residual, ZOneForm, ZVectorField};
use crate::spectral;
use crate::synthesis::{
    build_equivariant_phi, build_phi_with, plateau_levels, Bias, PhiFunction, ScrewData,
    SynthesisOptions,
};

/// Required agreement between the two quadratures of `I`.
pub const AGREEMENT_TOL: f64 = 1e-8;
/// Minimum distance of `|φ − θ|` from π/2 before `tan` is refused.
pub const TAN_GUARD: f64 = 1e-6;
/// Target for `|I(φ*)|`.
pub const BALANCE_TOL: f64 = 1e-10;
pub const MAX_BISECTION: usize = 200;

fn check_grids(theta: &CircleMap, phi: &CircleMap) -> Result<()> {
    if theta.grid_size() != phi.grid_size() {
        return Err(Error::LengthMismatch {
            expected: theta.grid_size(),
            found: phi.grid_size(),
        });
    }
    Ok(())
}

/// `tan(φ − θ)` at the `N` nodes.
fn tangent(theta: &CircleMap, phi: &CircleMap) -> Result<Vec<f64>> {
    check_grids(theta, phi)?;
    let sup = phi.sup_distance(theta);
    if sup >= FRAC_PI_2 - TAN_GUARD {
        return Err(Error::TanOverflow { sup });
    }
    let n = theta.grid_size();
    Ok((0..n)
        .map(|j| (phi.samples()[j] - theta.samples()[j]).tan())
        .collect())
}

/// Both quadratures `(∫ tan(φ−θ) θ′, ∫ tan(φ−θ) φ′)`.
pub fn functional_forms(theta: &CircleMap, phi: &CircleMap) -> Result<(f64, f64)> {
    let t = tangent(theta, phi)?;
    let a: Vec<f64> = t
        .iter()
        .zip(theta.derivative())
        .map(|(x, d)| x * d)
        .collect();
    let b: Vec<f64> = t.iter().zip(phi.derivative()).map(|(x, d)| x * d).collect();
    Ok((spectral::trapezoid(&a), spectral::trapezoid(&b)))
}

/// `I(φ)` in the `θ′` form, after checking it against the `φ′` form.
pub fn functional_i(theta: &CircleMap, phi: &CircleMap) -> Result<f64> {
    let (theta_form, phi_form) = functional_forms(theta, phi)?;
    if !((theta_form - phi_form).abs() <= AGREEMENT_TOL) {
        return Err(Error::QuadratureMismatch {
            theta_form,
            phi_form,
        });
    }
    Ok(theta_form)
}

#[derive(Debug, Clone)]
pub struct Balanced {
    pub phi: PhiFunction,
    /// Weight of `φ⁺` in `(1 − s)φ⁻ + sφ⁺`.
    pub s: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Bisection on `s ↦ I((1 − s)φ⁻ + sφ⁺)`.
///
/// Steps continue past [`BALANCE_TOL`] until the bracket is exhausted so
/// that the periodicity defect of `f` sits near rounding level.
pub fn find_balanced_phi(
    theta: &CircleMap,
    minus: &PhiFunction,
    plus: &PhiFunction,
) -> Result<Balanced> {
    let i_minus = functional_i(theta, &minus.map)?;
    let i_plus = functional_i(theta, &plus.map)?;
    if !(i_minus < 0.0 && i_plus > 0.0) {
        return Err(Error::BadBracket {
            minus: i_minus,
            plus: i_plus,
        });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = (
        i_minus.abs().min(i_plus.abs()),
        if i_minus.abs() < i_plus.abs() {
            0.0
        } else {
            1.0
        },
    );
    let mut iterations = 0;
    while iterations < MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let value = functional_i(theta, &CircleMap::lerp(&minus.map, &plus.map, mid)?)?;
        if value.abs() < best.0 {
            best = (value.abs(), mid);
        }
        if value == 0.0 || value.abs() < 1e-15 {
            break;
        }
        if value < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !(best.0 < BALANCE_TOL) {
        return Err(Error::NoConvergence {
            iterations,
            residual: best.0,
            tol: BALANCE_TOL,
        });
    }
    let s = best.1;
    let map = CircleMap::lerp(&minus.map, &plus.map, s)?;
    Ok(Balanced {
        phi: PhiFunction {
            map,
            delta: minus.delta.min(plus.delta),
            eta: minus.eta.min(plus.eta),
            bias: Bias::Neutral,
            bias_magnitude: 0.0,
        },
        s,
        iterations,
        residual: best.0,
    })
}

/// `f_j = exp(−∫₀^{z_j} tan(φ − θ) θ′)` for `j = 0..=N` and `|f_N − 1|`.
pub fn integrate_log_f(theta: &CircleMap, phi: &CircleMap) -> Result<(Vec<f64>, f64)> {
    let t = tangent(theta, phi)?;
    let h: Vec<f64> = t
        .iter()
        .zip(theta.derivative())
        .map(|(x, d)| x * d)
        .collect();
    let f: Vec<f64> = spectral::cumulative_integral(&h)
        .into_iter()
        .map(|x| (-x).exp())
        .collect();
    let residual = (f[f.len() - 1] - 1.0).abs();
    Ok((f, residual))
}

/// `sup |f′ cos(φ − θ) + f θ′ sin(φ − θ)|` over the nodes.
pub fn verify_ode_residual(theta: &CircleMap, phi: &CircleMap, f: &[f64]) -> f64 {
    let n = theta.grid_size();
    let log_end = f[n].ln();
    let slope = log_end / TAU;
    let trendless: Vec<f64> = (0..n).map(|j| f[j].ln() - slope * theta.node(j)).collect();
    let dlog = spectral::derivative(&trendless);
    let d = theta.derivative();
    (0..n)
        .map(|j| {
            let u = phi.samples()[j] - theta.samples()[j];
            let fp = f[j] * (dlog[j] + slope);
            (fp * u.cos() + f[j] * d[j] * u.sin()).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateOptions {
    pub synthesis: SynthesisOptions,
    pub flat_tol: f64,
    pub decision_tol: f64,
    /// Number of times `δ` may be halved when the tube is too narrow.
    pub delta_halvings: usize,
    pub screw: Option<ScrewData>,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            synthesis: SynthesisOptions::default(),
            flat_tol: DEFAULT_FLAT_TOL,
            decision_tol: DECISION_TOL,
            delta_halvings: 12,
            screw: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub i_residual: f64,
    pub f_periodicity: f64,
    pub ode: f64,
    pub reeb_alpha: f64,
    pub reeb_contraction: f64,
    /// `min sign(deg)·φ′/g²`, the oriented contact density of `(1/g)α_φ`.
    pub min_contact_density: f64,
    pub min_phi_slope: f64,
    pub tube_sup: f64,
    pub quadrature_gap: f64,
}

#[derive(Debug, Clone)]
pub struct ReebCertificate {
    pub theta: CircleMap,
    pub phi: PhiFunction,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub winding: i64,
    pub n_value: f64,
    pub decision: ReebDecision,
    pub residuals: Residuals,
    pub balance_weight: f64,
    pub bisection_steps: usize,
    pub bias_minus: f64,
    pub bias_plus: f64,
    /// `δ` actually used after any halving.
    pub delta: f64,
    /// Whether `θ` was perturbed before locating its extrema.
    pub perturbed: bool,
}

/// Offset of the C⁰-small perturbation applied to degenerate extrema.
const PERTURBATION_PHASE: f64 = 0.5;

fn biased_pair(
    theta: &CircleMap,
    opts: &CertificateOptions,
) -> Result<(PhiFunction, PhiFunction, f64, bool)> {
    let (work, perturbed) = match find_extrema(theta, opts.flat_tol) {
        Ok(ext) => ((theta.clone(), ext), false),
        Err(Error::DegenerateCritical { .. }) => {
            let amp = 10.0 * opts.flat_tol;
            let n = theta.grid_size();
            let p = CircleMap::from_lift(
                (0..=n)
                    .map(|j| theta.samples()[j] + amp * (theta.node(j) + PERTURBATION_PHASE).sin())
                    .collect(),
            )?;
            let ext = find_extrema(&p, opts.flat_tol)?;
            ((p, ext), true)
        }
        Err(e) => return Err(e),
    };
    let (base, ext) = work;
    let plan = plateau_levels(&base, &ext)?;
    let mut syn = opts.synthesis;
    let mut halvings = 0;
    loop {
        let attempt = |bias| match &opts.screw {
            Some(screw) => build_equivariant_phi(&base, screw, &plan, &syn, bias),
            None => build_phi_with(&base, &plan, &syn, bias),
        };
        match attempt(Bias::Minus).and_then(|m| attempt(Bias::Plus).map(|p| (m, p))) {
            Ok((m, p)) => return Ok((m, p, syn.delta, perturbed)),
            Err(Error::TubeViolation { .. }) if halvings < opts.delta_halvings => {
                syn.delta *= 0.5;
                halvings += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Full pipeline from `θ` to a verified Reeb certificate.
pub fn synthesize_certificate(
    theta: &CircleMap,
    opts: &CertificateOptions,
) -> Result<ReebCertificate> {
    let decision = decide_with_tol(theta, opts.decision_tol)?;
    if decision.verdict != Verdict::ConformallyReeb {
        return Err(Error::CriterionFailed(Box::new(decision)));
    }
    let (minus, plus, delta, perturbed) = biased_pair(theta, opts)?;
    let balanced = find_balanced_phi(theta, &minus, &plus)?;
    let mut phi = balanced.phi;
    phi.delta = delta;
    let (f, f_periodicity) = integrate_log_f(theta, &phi.map)?;
    let n = theta.grid_size();
    let g: Vec<f64> = (0..=n)
        .map(|j| f[j] * (phi.map.samples()[j] - theta.samples()[j]).cos())
        .collect();
    debug_assert!(f.iter().all(|x| *x > 0.0) && g.iter().all(|x| *x > 0.0));

    let inv_g: Vec<f64> = g.iter().map(|x| 1.0 / x).collect();
    let alpha = ZOneForm::angle(&phi.map).scaled(&inv_g);
    let field = ZVectorField::geodesic(theta).scaled(&f);
    let (reeb_alpha, reeb_contraction) = reeb_residual(&alpha, &field);
    let sign = theta.degree().signum() as f64;
    let min_contact_density = contact_density(&alpha)
        .into_iter()
        .map(|d| sign * d)
        .fold(f64::INFINITY, f64::min);
    let (theta_form, phi_form) = functional_forms(theta, &phi.map)?;
    let residuals = Residuals {
        i_residual: theta_form.abs(),
        f_periodicity,
        ode: verify_ode_residual(theta, &phi.map, &f),
        reeb_alpha,
        reeb_contraction,
        min_contact_density,
        min_phi_slope: phi
            .map
            .derivative()
            .iter()
            .map(|d| sign * d)
            .fold(f64::INFINITY, f64::min),
        tube_sup: phi.map.sup_distance(theta),
        quadrature_gap: (theta_form - phi_form).abs(),
    };
    let winding = theta.degree();
    Ok(ReebCertificate {
        theta: theta.clone(),
        phi,
        f,
        g,
        winding,
        n_value: TAU * winding as f64,
        decision,
        residuals,
        balance_weight: balanced.s,
        bisection_steps: balanced.iterations,
        bias_minus: minus.bias_magnitude,
        bias_plus: plus.bias_magnitude,
        delta,
        perturbed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_map::DEFAULT_GRID;

    fn map(f: impl Fn(f64) -> f64) -> CircleMap {
        CircleMap::from_fn(DEFAULT_GRID, f).unwrap()
    }

    fn plain(map: CircleMap) -> PhiFunction {
        PhiFunction {
            map,
            delta: 0.0,
            eta: 0.0,
            bias: Bias::Neutral,
            bias_magnitude: 0.0,
        }
    }

    /// Composite Gauss–Legendre oracle for `∫₀^{2π} h`.
    fn gauss(h: impl Fn(f64) -> f64) -> f64 {
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189),
            (-0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.0, 0.568_888_888_888_889),
            (0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.906_179_845_938_664, 0.236_926_885_056_189),
        ];
        let panels = 400;
        let w = TAU / panels as f64;
        (0..panels)
            .map(|p| {
                let c = w * (p as f64 + 0.5);
                nodes
                    .iter()
                    .map(|(x, wt)| wt * h(c + 0.5 * w * x))
                    .sum::<f64>()
                    * 0.5
                    * w
            })
            .sum()
    }

    #[test]
    fn functional_examples() {
        let theta = map(|z| z);
        assert_eq!(functional_i(&theta, &theta).unwrap(), 0.0);
        let phi = map(|z| z + 0.3 * (1.0 + z.sin()));
        let i = functional_i(&theta, &phi).unwrap();
        let oracle = gauss(|t| (0.3 * (1.0 + t.sin())).tan());
        assert!(i > 0.0 && (i - oracle).abs() < 1e-9, "{i} {oracle}");
        let phi = map(|z| z + 0.3 * z.sin());
        assert!(functional_i(&theta, &phi).unwrap().abs() < 1e-12);
        let bad = map(|z| z + FRAC_PI_2 - 3e-7);
        assert!(matches!(
            functional_i(&theta, &bad),
            Err(Error::TanOverflow { .. })
        ));
    }

    #[test]
    fn bisection_examples() {
        let theta = map(|z| z);
        let minus = plain(theta.offset(-0.2));
        let plus = plain(theta.offset(0.2));
        let b = find_balanced_phi(&theta, &minus, &plus).unwrap();
        assert_eq!(b.s, 0.5);
        assert!(b.phi.map.sup_distance(&theta) < 1e-15);
        assert!(matches!(
            find_balanced_phi(&theta, &plus, &minus),
            Err(Error::BadBracket { .. })
        ));
    }

    #[test]
    fn log_f_examples() {
        let theta = map(|z| z);
        let (f, r) = integrate_log_f(&theta, &theta).unwrap();
        assert!(f.iter().all(|x| *x == 1.0) && r == 0.0);
        let phi = map(|z| z + 0.3 * (1.0 + z.sin()));
        let (f, r) = integrate_log_f(&theta, &phi).unwrap();
        let oracle = gauss(|t| (0.3 * (1.0 + t.sin())).tan());
        assert!((f[DEFAULT_GRID] - (-oracle).exp()).abs() < 1e-10);
        assert!((r - (1.0 - (-oracle).exp())).abs() < 1e-10);
    }

    #[test]
    fn ode_examples() {
        let theta = map(|z| z);
        let (f, _) = integrate_log_f(&theta, &theta).unwrap();
        assert_eq!(verify_ode_residual(&theta, &theta, &f), 0.0);
        let phi = map(|z| z + 0.3 * z.sin());
        let (f, _) = integrate_log_f(&theta, &phi).unwrap();
        assert!(verify_ode_residual(&theta, &phi, &f) < 1e-8);
        let theta = CircleMap::from_fn(64, |z| z).unwrap();
        let phi = CircleMap::from_fn(64, |z| z + 0.3 * z.sin()).unwrap();
        let (f, _) = integrate_log_f(&theta, &phi).unwrap();
        assert!(verify_ode_residual(&theta, &phi, &f) < 1e-4);
    }

    #[test]
    fn identity_certificate() {
        let cert = synthesize_certificate(&map(|z| z), &CertificateOptions::default()).unwrap();
        assert_eq!(cert.winding, 1);
        assert!((cert.n_value - TAU).abs() < 1e-15);
        assert!(cert.phi.map.sup_distance(&cert.theta) < 1e-10);
        assert!(cert
            .f
            .iter()
            .chain(&cert.g)
            .all(|x| (x - 1.0).abs() < 1e-10));
        let r = cert.residuals;
        assert!(
            r.i_residual < 1e-10
                && r.f_periodicity < 1e-10
                && r.reeb_alpha < 1e-10
                && r.reeb_contraction < 1e-10
        );
    }

    #[test]
    fn single_dip_certificate() {
        let cert =
            synthesize_certificate(&map(|z| z + 1.5 * z.sin()), &CertificateOptions::default())
                .unwrap();
        let r = cert.residuals;
        assert_eq!(cert.winding, 1);
        assert!(r.i_residual < 1e-10, "{r:?}");
        assert!(r.f_periodicity < 1e-9);
        assert!(r.min_contact_density > 0.0);
        assert!(r.reeb_alpha < 1e-8 && r.reeb_contraction < 1e-7, "{r:?}");
        assert!(cert.bisection_steps <= 60);
        assert!(cert.g.iter().all(|x| *x > 0.0));
    }

    #[test]
    fn rejected_map_has_no_certificate() {
        let err =
            synthesize_certificate(&map(|z| z + 3.5 * z.sin()), &CertificateOptions::default())
                .unwrap_err();
        match err {
            Error::CriterionFailed(d) => assert!(d.witness.unwrap().drop > std::f64::consts::PI),
            e => panic!("{e}"),
        }
    }
}
