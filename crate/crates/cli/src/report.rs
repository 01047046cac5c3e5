//! The `report.json` document and the `curves.csv` table.

use std::fs;
use std::io;
use std::path::Path;

use flatreeb::forms::{contact_density, ZOneForm};
use flatreeb::solver::Residuals;
use flatreeb::{CircleMap, ReebCertificate, ReebDecision};
use serde::{Deserialize, Serialize};

pub const CURVES_HEADER: [&str; 6] = ["z", "theta", "phi", "f", "g", "density"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Ok,
    NotReeb,
    Borderline,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotReeb => 2,
            Status::Borderline => 3,
            Status::Failed => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// `value ≤ tolerance`.
    Upper,
    /// `value ≥ tolerance`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl ResidualRow {
    pub fn upper(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            bound: Bound::Upper,
            pass: value <= tolerance,
        }
    }

    pub fn lower(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            bound: Bound::Lower,
            pass: value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub winding: i64,
    pub n_value: f64,
    pub delta: f64,
    pub eta: f64,
    pub balance_weight: f64,
    pub bisection_steps: usize,
    pub bias_minus: f64,
    pub bias_plus: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub g_min: f64,
    pub g_max: f64,
    pub residuals: Residuals,
}

impl CertificateSummary {
    pub fn from_certificate(c: &ReebCertificate) -> Self {
        let range = |v: &[f64]| {
            v.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    (lo.min(*x), hi.max(*x))
                })
        };
        let (f_min, f_max) = range(&c.f);
        let (g_min, g_max) = range(&c.g);
        Self {
            winding: c.winding,
            n_value: c.n_value,
            delta: c.delta,
            eta: c.phi.eta,
            balance_weight: c.balance_weight,
            bisection_steps: c.bisection_steps,
            bias_minus: c.bias_minus,
            bias_plus: c.bias_plus,
            f_min,
            f_max,
            g_min,
            g_max,
            residuals: c.residuals,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeData {
    pub vol_torus: f64,
    pub vol_quotient: f64,
    pub n_value: f64,
    pub w: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub command: String,
    pub theta_source: Option<String>,
    pub grid: usize,
    pub decision_tol: f64,
    pub flat_tol: f64,
    pub delta: f64,
    pub eta: f64,
    pub seed: u64,
    pub perturbed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub status: Status,
    pub error: Option<ErrorInfo>,
    pub decision: Option<ReebDecision>,
    pub certificate: Option<CertificateSummary>,
    pub volume: Option<VolumeData>,
    pub residuals: Vec<ResidualRow>,
    pub provenance: Provenance,
    /// Command-specific data (straightening, seams, gallery, identity suite).
    pub details: Option<serde_json::Value>,
}

impl Report {
    pub fn new(provenance: Provenance) -> Self {
        Self {
            status: Status::Ok,
            error: None,
            decision: None,
            certificate: None,
            volume: None,
            residuals: Vec::new(),
            provenance,
            details: None,
        }
    }

    pub fn fail(&mut self, kind: &str, message: String) {
        self.status = Status::Failed;
        self.error = Some(ErrorInfo {
            kind: kind.to_string(),
            message,
        });
    }

    /// Downgrades an `Ok` status when a residual exceeds its tolerance.
    pub fn settle(&mut self) {
        if self.status == Status::Ok {
            if let Some(row) = self.residuals.iter().find(|r| !r.pass) {
                let message = format!(
                    "{} = {:e} violates tolerance {:e}",
                    row.name, row.value, row.tolerance
                );
                self.fail("ResidualExceeded", message);
            }
        }
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(dir.join("report.json"), text + "\n")
    }
}

/// Rows `z, θ, φ, f, g, density`; missing columns are left empty.
pub fn write_curves(
    dir: &Path,
    theta: &CircleMap,
    cert: Option<&ReebCertificate>,
) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("curves.csv"))?;
    w.write_record(CURVES_HEADER)?;
    let density = cert.map(|c| {
        let inv: Vec<f64> = c.g.iter().map(|g| 1.0 / g).collect();
        contact_density(&ZOneForm::angle(&c.phi.map).scaled(&inv))
    });
    let fmt = |x: f64| format!("{x:.16e}");
    for j in 0..=theta.grid_size() {
        let mut row = vec![fmt(theta.node(j)), fmt(theta.samples()[j])];
        match (cert, &density) {
            (Some(c), Some(d)) => {
                row.push(fmt(c.phi.map.samples()[j]));
                row.push(fmt(c.f[j]));
                row.push(fmt(c.g[j]));
                row.push(fmt(d[j]));
            }
            _ => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        w.write_record(&row)?;
    }
    w.flush()
}
