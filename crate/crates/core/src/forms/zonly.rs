//! Forms on T³ whose coefficients depend on `z` only.

use std::f64::consts::TAU;

use crate::circle_map::CircleMap;
use crate::error::{Error, Result};
use crate::spectral;
use crate::synthesis::{self, ScrewData};

/// Fibre area of the standard torus.
pub const FIBRE_AREA: f64 = TAU * TAU;

const PERIODIC_TOL: f64 = 1e-12;

fn check_periodic(name: &str, v: &[f64]) -> Result<()> {
    let (first, last) = (v[0], v[v.len() - 1]);
    if (first - last).abs() > PERIODIC_TOL * (1.0 + first.abs()) {
        return Err(Error::PreconditionFailed(format!(
            "{name} is not periodic: {first} vs {last}"
        )));
    }
    Ok(())
}

fn close(mut v: Vec<f64>) -> Vec<f64> {
    v.push(v[0]);
    v
}

fn deriv(v: &[f64]) -> Vec<f64> {
    close(spectral::derivative(&v[..v.len() - 1]))
}

fn sup(v: impl Iterator<Item = f64>) -> f64 {
    v.map(f64::abs).fold(0.0, f64::max)
}

/// `α = p dx + q dy + r dz`, sampled at `N + 1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ZOneForm {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
}

/// `ω = A dy∧dz + B dz∧dx + C dx∧dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTwoForm {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

/// `V = u E₁ + v E₂ + w E₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZVectorField {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl ZOneForm {
    pub fn new(p: Vec<f64>, q: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() || r.len() != p.len() {
            return Err(Error::LengthMismatch {
                expected: p.len(),
                found: if q.len() != p.len() { q.len() } else { r.len() },
            });
        }
        check_periodic("p", &p)?;
        check_periodic("q", &q)?;
        check_periodic("r", &r)?;
        Ok(Self { p, q, r })
    }

    /// From `N` samples per coefficient; the endpoint is appended.
    pub fn from_periodic(p: Vec<f64>, q: Vec<f64>, r: Vec<f64>) -> Self {
        Self {
            p: close(p),
            q: close(q),
            r: close(r),
        }
    }

    /// `sin φ dx + cos φ dy`.
    pub fn angle(phi: &CircleMap) -> Self {
        let n = phi.grid_size();
        let s = &phi.samples()[..n];
        Self::from_periodic(
            s.iter().map(|t| t.sin()).collect(),
            s.iter().map(|t| t.cos()).collect(),
            vec![0.0; n],
        )
    }

    /// `dz`.
    pub fn vertical(n: usize) -> Self {
        Self::from_periodic(vec![0.0; n], vec![0.0; n], vec![1.0; n])
    }

    pub fn grid_size(&self) -> usize {
        self.p.len() - 1
    }

    /// Pointwise product with a function of `z` (`N + 1` samples or `N`).
    pub fn scaled(&self, h: &[f64]) -> Self {
        let n = self.grid_size();
        let m = |v: &[f64]| close((0..n).map(|j| v[j] * h[j]).collect());
        Self {
            p: m(&self.p),
            q: m(&self.q),
            r: m(&self.r),
        }
    }

    /// `s·self + t·other`.
    pub fn combine(&self, s: f64, other: &Self, t: f64) -> Self {
        let f = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| s * x + t * y).collect();
        Self {
            p: f(&self.p, &other.p),
            q: f(&self.q, &other.q),
            r: f(&self.r, &other.r),
        }
    }

    pub fn pairing(&self, v: &ZVectorField) -> Vec<f64> {
        (0..self.p.len())
            .map(|j| self.p[j] * v.u[j] + self.q[j] * v.v[j] + self.r[j] * v.w[j])
            .collect()
    }

    pub fn sup_norm(&self) -> f64 {
        sup(self.p.iter().chain(&self.q).chain(&self.r).copied())
    }
}

impl ZVectorField {
    /// `sin θ E₁ + cos θ E₂`.
    pub fn geodesic(theta: &CircleMap) -> Self {
        let n = theta.grid_size();
        let s = &theta.samples()[..n];
        Self {
            u: close(s.iter().map(|t| t.sin()).collect()),
            v: close(s.iter().map(|t| t.cos()).collect()),
            w: vec![0.0; n + 1],
        }
    }

    pub fn constant(u: f64, v: f64, w: f64, n: usize) -> Self {
        Self {
            u: vec![u; n + 1],
            v: vec![v; n + 1],
            w: vec![w; n + 1],
        }
    }

    pub fn scaled(&self, h: &[f64]) -> Self {
        let n = self.u.len() - 1;
        let m = |v: &[f64]| close((0..n).map(|j| v[j] * h[j]).collect());
        Self {
            u: m(&self.u),
            v: m(&self.v),
            w: m(&self.w),
        }
    }

    pub fn combine(&self, s: f64, other: &Self, t: f64) -> Self {
        let f = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| s * x + t * y).collect();
        Self {
            u: f(&self.u, &other.u),
            v: f(&self.v, &other.v),
            w: f(&self.w, &other.w),
        }
    }
}

/// `A = −q′`, `B = p′`, `C = 0`.
pub fn exterior_derivative_z(alpha: &ZOneForm) -> ZTwoForm {
    ZTwoForm {
        a: deriv(&alpha.q).into_iter().map(|x| -x).collect(),
        b: deriv(&alpha.p),
        c: vec![0.0; alpha.p.len()],
    }
}

/// Coefficient of `dx∧dy∧dz` in `α ∧ dα`.
pub fn contact_density(alpha: &ZOneForm) -> Vec<f64> {
    let d = exterior_derivative_z(alpha);
    (0..alpha.p.len())
        .map(|j| alpha.p[j] * d.a[j] + alpha.q[j] * d.b[j] + alpha.r[j] * d.c[j])
        .collect()
}

/// Density of `d ω` for a two-form `ω` (only `C′` survives in the z-only class).
pub fn two_form_derivative_density(omega: &ZTwoForm) -> Vec<f64> {
    deriv(&omega.c)
}

/// Interior product `i_V ω`.
pub fn contract(v: &ZVectorField, omega: &ZTwoForm) -> ZOneForm {
    let n = v.u.len();
    let (mut x, mut y, mut z) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for j in 0..n {
        let (a, b, c) = (omega.a[j], omega.b[j], omega.c[j]);
        let (u, vv, w) = (v.u[j], v.v[j], v.w[j]);
        x.push(b * w - c * vv);
        y.push(c * u - a * w);
        z.push(a * vv - b * u);
    }
    ZOneForm { p: x, q: y, r: z }
}

/// `(sup |α(V) − 1|, ‖i_V dα‖_∞)`.
pub fn reeb_residual(alpha: &ZOneForm, v: &ZVectorField) -> (f64, f64) {
    let pairing = sup(alpha.pairing(v).into_iter().map(|x| x - 1.0));
    let contraction = contract(v, &exterior_derivative_z(alpha)).sup_norm();
    (pairing, contraction)
}

/// `∫_{T³} α ∧ dα` over the standard torus.
pub fn volume_z(alpha: &ZOneForm) -> f64 {
    let d = contact_density(alpha);
    FIBRE_AREA * spectral::trapezoid(&d[..d.len() - 1])
}

/// `(sup |α(X) − 1|, ‖i_X dα‖_∞)` for the Wadsley conditions.
pub fn wadsley_residual(alpha: &ZOneForm, x: &ZVectorField) -> (f64, f64) {
    reeb_residual(alpha, x)
}

/// Residual threshold for accepting a form as a connection form.
pub const CONNECTION_TOL: f64 = 1e-9;

/// Second connection form `α₁ + (c + μ sin z) dz` for `X_T`.
pub fn shifted_connection_form(theta: &CircleMap, c: f64, mu: f64) -> ZOneForm {
    let n = theta.grid_size();
    let base = ZOneForm::angle(theta);
    let r: Vec<f64> = (0..n).map(|j| c + mu * theta.node(j).sin()).collect();
    ZOneForm {
        p: base.p,
        q: base.q,
        r: close(r),
    }
}

/// `α₁ + c dz + μ(cos θ dx − sin θ dy)`, which pairs to 1 with `X_T` but is
/// not annihilated by `i_X d` unless `μθ′ = 0`.
pub fn rotated_connection_candidate(theta: &CircleMap, c: f64, mu: f64) -> ZOneForm {
    let n = theta.grid_size();
    let s = &theta.samples()[..n];
    ZOneForm::from_periodic(
        s.iter().map(|t| t.sin() + mu * t.cos()).collect(),
        s.iter().map(|t| t.cos() - mu * t.sin()).collect(),
        vec![c; n],
    )
}

/// `|vol(α₁) − vol(α₂)|` for two connection forms of `X_T`, after verifying
/// the Wadsley conditions of both.
pub fn check_connection_volume_independence(theta: &CircleMap, c: f64, mu: f64) -> Result<f64> {
    let x = ZVectorField::geodesic(theta);
    let a1 = ZOneForm::angle(theta);
    let a2 = shifted_connection_form(theta, c, mu);
    compare_connection_forms(&a1, &a2, &x)
}

pub fn compare_connection_forms(a1: &ZOneForm, a2: &ZOneForm, x: &ZVectorField) -> Result<f64> {
    for a in [a1, a2] {
        let (pairing, contraction) = wadsley_residual(a, x);
        if pairing > CONNECTION_TOL || contraction > CONNECTION_TOL {
            return Err(Error::NotConnectionForm {
                pairing,
                contraction,
            });
        }
    }
    Ok((volume_z(a1) - volume_z(a2)).abs())
}

/// Unit kernel direction of `dω` at node `j`, or `None` where `ω` vanishes.
///
/// With `C = 0`, `i_V ω = 0` for `V = (u, v, 0)` iff `V ∥ (A, B)`.
fn kernel_line(omega: &ZTwoForm, j: usize) -> Option<(f64, f64)> {
    let (a, b) = (omega.a[j], omega.b[j]);
    let norm = a.hypot(b);
    (norm > 0.0).then(|| (a / norm, b / norm))
}

/// Minimum of `orientation ·` contact density along `(1 − t)α₀ + tα₁`,
/// `t ∈ {0, 0.1, …, 1}`, without checking any hypothesis.
pub fn gray_segment_min_density(a0: &ZOneForm, a1: &ZOneForm, orientation: f64) -> f64 {
    (0..=10)
        .map(|i| {
            let t = i as f64 / 10.0;
            contact_density(&a0.combine(1.0 - t, a1, t))
                .into_iter()
                .map(|d| orientation * d)
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}

/// [`gray_segment_min_density`] after checking that both forms are contact
/// with equal density sign and that the Reeb lines coincide. The density is
/// oriented by its sign at `z = 0`.
pub fn check_gray_segment(a0: &ZOneForm, a1: &ZOneForm) -> Result<f64> {
    const LINE_TOL: f64 = 1e-9;
    let d0 = contact_density(a0);
    let d1 = contact_density(a1);
    let sign = d0[0].signum();
    for (j, (x, y)) in d0.iter().zip(&d1).enumerate() {
        if *x == 0.0 || *y == 0.0 || x.signum() != sign || y.signum() != sign {
            return Err(Error::PreconditionFailed(format!(
                "contact densities vanish or differ in sign at node {j} ({x}, {y})"
            )));
        }
    }
    let w0 = exterior_derivative_z(a0);
    let w1 = exterior_derivative_z(a1);
    for j in 0..d0.len() {
        match (kernel_line(&w0, j), kernel_line(&w1, j)) {
            (Some(l0), Some(l1)) => {
                let cross = (l0.0 * l1.1 - l0.1 * l1.0).abs();
                if cross > LINE_TOL {
                    return Err(Error::PreconditionFailed(format!(
                        "Reeb lines differ at node {j} (sin angle {cross:e})"
                    )));
                }
            }
            _ => {
                return Err(Error::PreconditionFailed(format!(
                    "dα vanishes at node {j}"
                )));
            }
        }
    }
    Ok(gray_segment_min_density(a0, a1, sign))
}

/// `(vol_torus, vol_quotient)` for the geodesic field of an equivariant `θ`.
pub fn covering_volume(theta: &CircleMap, screw: &ScrewData) -> Result<(f64, f64)> {
    let residual = synthesis::equivariance_residual(theta, screw)?;
    if residual >= 1e-9 {
        return Err(Error::NotEquivariant { residual });
    }
    let vol_torus = volume_z(&ZOneForm::angle(theta));
    let vol_quotient = vol_torus / screw.order as f64;
    let winding = vol_quotient * screw.order as f64 / FIBRE_AREA / TAU;
    assert!(
        (winding - theta.degree() as f64).abs() < 1e-9,
        "volume {vol_torus} does not match the winding {}",
        theta.degree()
    );
    Ok((vol_torus, vol_quotient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const N: usize = 256;

    fn map(f: impl Fn(f64) -> f64) -> CircleMap {
        CircleMap::from_fn(N, f).unwrap()
    }

    fn nodes() -> Vec<f64> {
        (0..=N).map(|j| TAU * j as f64 / N as f64).collect()
    }

    fn assert_close(a: &[f64], b: impl Fn(f64) -> f64, tol: f64) {
        for (x, z) in a.iter().zip(nodes()) {
            assert!((x - b(z)).abs() < tol, "{x} vs {} at {z}", b(z));
        }
    }

    #[test]
    fn derivative_examples() {
        let d = exterior_derivative_z(&ZOneForm::angle(&map(|z| z)));
        assert_close(&d.a, f64::sin, 1e-12);
        assert_close(&d.b, f64::cos, 1e-12);
        assert_close(&d.c, |_| 0.0, 1e-15);
        let d = exterior_derivative_z(&ZOneForm::vertical(N));
        assert!(d.a.iter().chain(&d.b).all(|x| x.abs() < 1e-14));
        let a = ZOneForm::from_periodic(
            (0..N)
                .map(|j| (2.0 * TAU * j as f64 / N as f64).sin())
                .collect(),
            vec![0.0; N],
            vec![0.0; N],
        );
        let d = exterior_derivative_z(&a);
        assert_close(&d.b, |z| 2.0 * (2.0 * z).cos(), 1e-12);
    }

    #[test]
    fn density_examples() {
        let phi = map(|z| z + 0.3 * (2.0 * z).sin());
        let dens = contact_density(&ZOneForm::angle(&phi));
        assert_close(&dens, |z| 1.0 + 0.6 * (2.0 * z).cos(), 1e-12);
        assert!(contact_density(&ZOneForm::vertical(N))
            .iter()
            .all(|x| *x == 0.0));
        let g: Vec<f64> = nodes().iter().map(|z| 1.5 + 0.4 * z.cos()).collect();
        let inv: Vec<f64> = g.iter().map(|x| 1.0 / x).collect();
        let dens = contact_density(&ZOneForm::angle(&phi).scaled(&inv));
        assert_close(
            &dens,
            |z| (1.0 + 0.6 * (2.0 * z).cos()) / (1.5 + 0.4 * z.cos()).powi(2),
            1e-10,
        );
    }

    #[test]
    fn contraction_examples() {
        let theta = map(|z| z);
        let r = contract(
            &ZVectorField::geodesic(&theta),
            &exterior_derivative_z(&ZOneForm::angle(&theta)),
        );
        assert!(r.sup_norm() < 1e-12);
        let dydz = ZTwoForm {
            a: vec![1.0; N + 1],
            b: vec![0.0; N + 1],
            c: vec![0.0; N + 1],
        };
        let r = contract(&ZVectorField::constant(0.0, 0.0, 1.0, N), &dydz);
        assert_eq!((r.p[0], r.q[0], r.r[0]), (0.0, -1.0, 0.0));
        let dxdy = ZTwoForm {
            a: vec![0.0; N + 1],
            b: vec![0.0; N + 1],
            c: vec![1.0; N + 1],
        };
        let r = contract(&ZVectorField::constant(1.0, 0.0, 0.0, N), &dxdy);
        assert_eq!((r.p[0], r.q[0], r.r[0]), (0.0, 1.0, 0.0));
    }

    #[test]
    fn reeb_residual_examples() {
        let theta = map(|z| z);
        let (p, c) = reeb_residual(&ZOneForm::angle(&theta), &ZVectorField::geodesic(&theta));
        assert!(p < 1e-12 && c < 1e-12);
        let (p, _) = reeb_residual(
            &ZOneForm::vertical(N),
            &ZVectorField::constant(0.0, 0.0, 2.0, N),
        );
        assert_eq!(p, 1.0);
    }

    #[test]
    fn volume_examples() {
        let v = volume_z(&ZOneForm::angle(&map(|z| z)));
        assert!((v - TAU.powi(3)).abs() < 1e-10);
        assert!((v - 248.0502).abs() < 1e-4);
        assert_eq!(volume_z(&ZOneForm::vertical(N)), 0.0);
        let v = volume_z(&ZOneForm::angle(&map(|z| 2.0 * z + 0.7 * (5.0 * z).sin())));
        assert!((v - 2.0 * TAU.powi(3)).abs() < 1e-8);
    }

    #[test]
    fn connection_forms() {
        let theta = map(|z| z);
        assert!(check_connection_volume_independence(&theta, 0.3, 0.0).unwrap() < 1e-10);
        assert!(check_connection_volume_independence(&theta, 0.0, 0.2).unwrap() < 1e-10);
        let theta = map(|z| z + 1.5 * z.sin());
        assert!(check_connection_volume_independence(&theta, 0.5, 0.0).unwrap() < 1e-10);
        // the rotated candidate pairs correctly but violates i_X dα = 0
        let x = ZVectorField::geodesic(&theta);
        let cand = rotated_connection_candidate(&theta, 0.0, 0.2);
        let (pairing, contraction) = wadsley_residual(&cand, &x);
        assert!(pairing < 1e-12 && contraction > 0.1);
        let err = compare_connection_forms(&ZOneForm::angle(&theta), &cand, &x).unwrap_err();
        assert!(matches!(err, Error::NotConnectionForm { .. }));
    }

    #[test]
    fn gray_examples() {
        let theta = map(|z| z);
        let a = ZOneForm::angle(&theta);
        let b = a.combine(2.0, &a, 0.0);
        assert!((check_gray_segment(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let flipped = ZOneForm::angle(&theta.negated());
        assert!(matches!(
            check_gray_segment(&a, &flipped),
            Err(Error::PreconditionFailed(_))
        ));
        let doubled = flipped.combine(2.0, &flipped, 0.0);
        assert!((check_gray_segment(&flipped, &doubled).unwrap() - 1.0).abs() < 1e-12);
        assert!((gray_segment_min_density(&flipped, &doubled, 1.0) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn covering_examples() {
        let two = ScrewData::standard(2, PI).unwrap();
        let (t, q) = covering_volume(&map(|z| z), &two).unwrap();
        assert!((t - TAU.powi(3)).abs() < 1e-10 && (q - TAU.powi(3) / 2.0).abs() < 1e-10);
        let one = ScrewData::standard(1, 0.0).unwrap();
        let (t, q) = covering_volume(&map(|z| z), &one).unwrap();
        assert_eq!(t, q);
        let zero = ScrewData::standard(2, 0.0).unwrap();
        let (t, q) = covering_volume(&map(|z| 2.0 * z), &zero).unwrap();
        assert!((t - 2.0 * TAU.powi(3)).abs() < 1e-10 && (q - TAU.powi(3)).abs() < 1e-10);
        assert!(covering_volume(&map(|z| z + 0.5 * z.sin()), &two).is_err());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::corpus::strategies::band_limited;
    use proptest::prelude::*;

    const N: usize = 256;

    fn samples(f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=N).map(|j| f(TAU * j as f64 / N as f64)).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn contraction_is_bilinear(a in -3.0f64..3.0, b in -3.0f64..3.0, c in prop::array::uniform9(-2.0f64..2.0)) {
            let u = ZVectorField { u: samples(|z| c[0] + z.sin()), v: samples(|z| c[1] * z.cos()), w: samples(|_| c[2]) };
            let v = ZVectorField { u: samples(|z| c[3] * (2.0 * z).sin()), v: samples(|_| c[4]), w: samples(|z| c[5] + z.cos()) };
            let omega = ZTwoForm { a: samples(|z| c[6] * z.cos()), b: samples(|z| c[7] + z.sin()), c: samples(|_| c[8]) };
            let lhs = contract(&u.combine(a, &v, b), &omega);
            let rhs = contract(&u, &omega).combine(a, &contract(&v, &omega), b);
            prop_assert!(lhs.combine(1.0, &rhs, -1.0).sup_norm() < 1e-12);
        }

        #[test]
        fn second_derivative_vanishes(theta in band_limited(4.0)) {
            let alpha = ZOneForm::angle(&theta.sample(N).unwrap());
            let dd = two_form_derivative_density(&exterior_derivative_z(&alpha));
            prop_assert!(dd.iter().all(|x| *x == 0.0));
        }

        #[test]
        fn density_is_slope(theta in band_limited(4.0)) {
            // sin θ and cos θ are not band-limited; a finer grid keeps aliasing down
            let n = 4 * N;
            let m = theta.sample(n).unwrap();
            let dens = contact_density(&ZOneForm::angle(&m));
            for j in 0..n {
                prop_assert!((dens[j] - theta.derivative(m.node(j))).abs() < 1e-9);
            }
        }

        #[test]
        fn volume_counts_winding(theta in band_limited(4.0)) {
            let m = theta.sample(N).unwrap();
            let v = volume_z(&ZOneForm::angle(&m));
            prop_assert!((v - TAU * theta.degree as f64 * FIBRE_AREA).abs() < 1e-8);
        }
    }
}
