use std::f64::consts::{FRAC_PI_2, PI, TAU};

use flatreeb::corpus::{equivariant_corpus, random_corpus};
use flatreeb::diffeo::{phi_inverse, straightening_residual};
use flatreeb::forms::{covering_volume, gray_segment_min_density, volume_z, ZOneForm, FIBRE_AREA};
use flatreeb::synthesis::seam_residuals;
use flatreeb::{decide, synthesize_certificate, CertificateOptions, CircleMap, Error, Verdict};

#[test]
fn corpus_certificates_verify() {
    let mut accepted = 0;
    for theta in random_corpus(11, 40) {
        let m = theta.sample(1024).unwrap();
        let d = match decide(&m) {
            Ok(d) => d,
            Err(Error::Borderline { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        if d.verdict == Verdict::NotReeb {
            assert!(d.witness.unwrap().drop >= PI - 1e-6);
            continue;
        }
        accepted += 1;
        let cert = synthesize_certificate(&m, &CertificateOptions::default()).unwrap();
        let r = cert.residuals;
        assert!(r.i_residual < 1e-10 && r.f_periodicity < 1e-9, "{r:?}");
        assert!(r.min_phi_slope >= 0.5 * cert.phi.eta);
        assert!(r.tube_sup <= FRAC_PI_2 - 0.5 * cert.delta);
        assert!(r.min_contact_density > 0.0);
        assert!(r.reeb_alpha < 1e-8 && r.reeb_contraction < 1e-7, "{r:?}");
        let inv: Vec<f64> = cert.g.iter().map(|g| 1.0 / g).collect();
        let a0 = ZOneForm::angle(&cert.phi.map);
        let a1 = a0.scaled(&inv);
        assert!(gray_segment_min_density(&a0, &a1, cert.winding.signum() as f64) > 0.0);
        for j in (0..1024).step_by(97) {
            let t = cert.phi.map.node(j);
            assert!((phi_inverse(&cert.phi.map, cert.phi.map.evaluate_lift(t)) - t).abs() < 1e-9);
        }
        assert!(straightening_residual(&cert, 200, 0) < 1e-6);
    }
    assert!(accepted > 5);
}

#[test]
fn straightening_improves_with_resolution() {
    let residual = |n: usize| {
        let m = CircleMap::from_fn(n, |z| z + 1.5 * z.sin()).unwrap();
        let cert = synthesize_certificate(&m, &CertificateOptions::default()).unwrap();
        straightening_residual(&cert, 500, 1)
    };
    let r: Vec<f64> = [512, 2048, 8192].into_iter().map(residual).collect();
    assert!(r[1] <= 2.0 * r[0] && r[2] <= 2.0 * r[1], "{r:?}");
    assert!(r[1] < 1e-6);
}

#[test]
fn quotient_volume_divides_torus_volume() {
    for order in [2, 3] {
        for case in equivariant_corpus(5, order, 4, 0.8).unwrap() {
            let m = case.theta.sample(1024).unwrap();
            let (torus, quotient) = covering_volume(&m, &case.screw).unwrap();
            assert!((quotient * order as f64 - torus).abs() < 1e-10);
            assert!((torus - TAU * case.theta.degree as f64 * FIBRE_AREA).abs() < 1e-8);
        }
    }
}

#[test]
fn equivariant_certificates_close_up() {
    let mut done = 0;
    for order in [2, 3, 4, 6] {
        for case in equivariant_corpus(9, order, 3, 0.6).unwrap() {
            let m = case.theta.sample(2048).unwrap();
            if !matches!(decide(&m), Ok(d) if d.verdict == Verdict::ConformallyReeb) {
                continue;
            }
            let opts = CertificateOptions {
                screw: Some(case.screw),
                ..CertificateOptions::default()
            };
            let cert = synthesize_certificate(&m, &opts).unwrap();
            let (value, slope) = seam_residuals(&cert.phi.map, &case.screw);
            assert!(value < 1e-9 && slope < 1e-6, "{value} {slope}");
            done += 1;
        }
    }
    assert!(done >= 6);
}

#[test]
fn identity_volume() {
    let m = CircleMap::from_fn(256, |z| z).unwrap();
    assert!((volume_z(&ZOneForm::angle(&m)) - TAU.powi(3)).abs() < 1e-10);
    assert!((TAU.powi(3) - 248.0502).abs() < 1e-4);
}
