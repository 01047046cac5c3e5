//! Command-line front end: parses circle-map expressions, runs the decision
//! and synthesis pipeline and writes `report.json` plus `curves.csv`.

pub mod expr;
pub mod report;

use std::f64::consts::{FRAC_PI_2, TAU};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use flatreeb::circle_map::{lift_samples, DEFAULT_FLAT_TOL, DEFAULT_GRID};
use flatreeb::criterion::DECISION_TOL;
use flatreeb::diffeo::{std_pullback_residual, straightening_residual};
use flatreeb::forms::{
    check_identity_31, covering_volume, volume_z, TrigOneForm, ZOneForm, FIBRE_AREA,
};
use flatreeb::open_models::{build_example_i, check_example_ii, OpenThetaSpec, EXAMPLE_II_RANGE};
use flatreeb::synthesis::{seam_residuals, DEFAULT_DELTA, DEFAULT_ETA};
use flatreeb::{
    decide_with_tol, spectral, synthesize_certificate, CertificateOptions, CircleMap,
    ReebCertificate, ScrewData, SynthesisOptions, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use expr::{parse_theta, ExprError};
use report::{
    write_curves, CertificateSummary, Provenance, Report, ResidualRow, Status, VolumeData,
};

#[derive(Debug, Parser)]
#[command(
    name = "flatreeb",
    version,
    about = "Decide and certify conformally Reeb geodesic fields on the flat 3-torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the drawdown criterion only.
    Check(ThetaArgs),
    /// Decide, build the rescaling certificate and verify it.
    Synthesize(ThetaArgs),
    /// Contact volume of `sin θ dx + cos θ dy`, optionally on a screw quotient.
    Volume(VolumeArgs),
    /// Pullback checks of the straightening diffeomorphisms.
    Straighten(StraightenArgs),
    /// Certificate on the quotient by a screw motion.
    Equivariant(EquivariantArgs),
    /// The two open-manifold examples.
    Examples(ExamplesArgs),
    /// Randomized check of the Stokes-type identity for pairs of one-forms.
    Identity31(IdentityArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output directory for report.json and curves.csv.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ThetaArgs {
    /// Expression such as "z + 1.5*sin(z)".
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "theta_csv",
        required_unless_present = "theta_csv"
    )]
    pub theta: Option<String>,
    /// CSV with columns z,theta on a uniform grid of [0, 2π).
    #[arg(long)]
    pub theta_csv: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    /// Half-width of the band around π in which no verdict is issued.
    #[arg(long, default_value_t = DECISION_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeArgs {
    #[command(flatten)]
    pub theta: ThetaArgs,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub rot: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct StraightenArgs {
    #[command(flatten)]
    pub theta: ThetaArgs,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EquivariantArgs {
    #[command(flatten)]
    pub theta: ThetaArgs,
    #[arg(long)]
    pub order: usize,
    /// Screw rotation in radians; defaults to 2π·deg/order.
    #[arg(long)]
    pub rot: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ExamplesArgs {
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 3)]
    pub bandwidth: i64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Core(#[from] flatreeb::Error),
    #[error("invalid theta CSV: {0}")]
    Csv(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> String {
        let variant = |dbg: String| {
            dbg.split(|c: char| !c.is_alphanumeric())
                .next()
                .unwrap_or("")
                .to_string()
        };
        match self {
            CliError::Expr(e) => variant(format!("{e:?}")),
            CliError::Core(e) => variant(format!("{e:?}")),
            CliError::Csv(_) => "CsvInput".into(),
            CliError::Usage(_) => "Usage".into(),
        }
    }
}

/// Residual tolerances written into the reports.
pub mod tolerances {
    pub const I_RESIDUAL: f64 = 1e-10;
    pub const F_PERIODICITY: f64 = 1e-9;
    pub const QUADRATURE: f64 = 1e-8;
    pub const ODE: f64 = 1e-8;
    pub const REEB_ALPHA: f64 = 1e-8;
    pub const REEB_CONTRACTION: f64 = 1e-7;
    pub const VOLUME: f64 = 1e-8;
    pub const QUOTIENT: f64 = 1e-10;
    pub const STD_PULLBACK: f64 = 1e-12;
    pub const STRAIGHTENING: f64 = 1e-6;
    pub const SEAM: f64 = 1e-9;
    pub const SEAM_SLOPE: f64 = 1e-6;
    pub const IDENTITY: f64 = 1e-10;
    pub const CONTRACTION_OPEN: f64 = 1e-10;
    pub const ALPHA_X_SLACK: f64 = 1e-8;
    #[allow(clippy::approx_constant)]
    pub const PAIRING_BOUND: f64 = 0.70711;
}

/// Reads a uniform `z, theta` table and lifts it.
pub fn read_theta_csv(path: &Path, grid: Option<usize>) -> Result<CircleMap, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Csv(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Csv(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Csv(format!("missing column '{name}'")))
    };
    let (zc, tc) = (col("z")?, col("theta")?);
    let mut z = Vec::new();
    let mut theta = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Csv(e.to_string()))?;
        let parse = |c: usize| {
            rec.get(c)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| CliError::Csv(format!("row {}: bad number", i + 1)))
        };
        z.push(parse(zc)?);
        theta.push(parse(tc)?);
    }
    let n = z.len();
    if n == 0 {
        return Err(CliError::Csv("no rows".into()));
    }
    let h = TAU / n as f64;
    for (j, zj) in z.iter().enumerate() {
        if j > 0 && *zj <= z[j - 1] {
            return Err(CliError::Csv(format!(
                "z not strictly increasing at row {}",
                j + 1
            )));
        }
        if !(0.0..TAU).contains(zj) {
            return Err(CliError::Csv(format!("z = {zj} outside [0, 2π)")));
        }
        if (zj - h * j as f64).abs() > 1e-9 {
            return Err(CliError::Csv(format!(
                "grid is not uniform at row {}",
                j + 1
            )));
        }
    }
    let mut raw = theta;
    raw.push(raw[0]);
    let m = lift_samples(&raw, None)?;
    match grid {
        Some(g) if g != n => {
            if g < n {
                return Err(CliError::Usage(format!(
                    "--grid {g} is coarser than the CSV grid {n}"
                )));
            }
            let periodic = spectral::resample(&m.periodic_part(), g);
            Ok(CircleMap::from_periodic(m.degree(), &periodic)?)
        }
        _ => Ok(m),
    }
}

fn load_theta(args: &ThetaArgs) -> Result<(CircleMap, String), CliError> {
    match (&args.theta, &args.theta_csv) {
        (Some(src), _) => {
            let e = parse_theta(src)?;
            Ok((e.sample(args.grid.unwrap_or(DEFAULT_GRID))?, src.clone()))
        }
        (None, Some(path)) => Ok((read_theta_csv(path, args.grid)?, path.display().to_string())),
        (None, None) => Err(CliError::Usage(
            "one of --theta or --theta-csv is required".into(),
        )),
    }
}

fn provenance(command: &str, args: Option<&ThetaArgs>, common: &CommonArgs) -> Provenance {
    Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        theta_source: args.and_then(|a| {
            a.theta
                .clone()
                .or_else(|| a.theta_csv.as_ref().map(|p| p.display().to_string()))
        }),
        grid: args.and_then(|a| a.grid).unwrap_or(DEFAULT_GRID),
        decision_tol: args.map_or(DECISION_TOL, |a| a.tol),
        flat_tol: DEFAULT_FLAT_TOL,
        delta: args.map_or(DEFAULT_DELTA, |a| a.delta),
        eta: args.map_or(DEFAULT_ETA, |a| a.eta),
        seed: common.seed,
        perturbed: false,
    }
}

fn certificate_options(args: &ThetaArgs, screw: Option<ScrewData>) -> CertificateOptions {
    CertificateOptions {
        synthesis: SynthesisOptions {
            delta: args.delta,
            eta: args.eta,
            ..SynthesisOptions::default()
        },
        decision_tol: args.tol,
        screw,
        ..CertificateOptions::default()
    }
}

/// Decision stage shared by every θ command. `None` means the report
/// already carries a final non-`Ok` status.
fn decide_stage(report: &mut Report, theta: &CircleMap, tol: f64) -> Result<Option<()>, CliError> {
    match decide_with_tol(theta, tol) {
        Ok(d) => {
            let accepted = d.verdict == Verdict::ConformallyReeb;
            report.decision = Some(d);
            if accepted {
                Ok(Some(()))
            } else {
                report.status = Status::NotReeb;
                Ok(None)
            }
        }
        Err(e @ flatreeb::Error::Borderline { .. }) => {
            report.status = Status::Borderline;
            let err = CliError::from(e);
            report.error = Some(report::ErrorInfo {
                kind: err.kind(),
                message: err.to_string(),
            });
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn certificate_rows(report: &mut Report, cert: &ReebCertificate) {
    use tolerances::*;
    let r = cert.residuals;
    report.residuals.extend([
        ResidualRow::upper("i_residual", r.i_residual, I_RESIDUAL),
        ResidualRow::upper("f_periodicity", r.f_periodicity, F_PERIODICITY),
        ResidualRow::upper("quadrature_gap", r.quadrature_gap, QUADRATURE),
        ResidualRow::upper("ode", r.ode, ODE),
        ResidualRow::upper("reeb_alpha", r.reeb_alpha, REEB_ALPHA),
        ResidualRow::upper("reeb_contraction", r.reeb_contraction, REEB_CONTRACTION),
        ResidualRow::lower(
            "min_contact_density",
            r.min_contact_density,
            f64::MIN_POSITIVE,
        ),
        ResidualRow::lower("min_phi_slope", r.min_phi_slope, 0.5 * cert.phi.eta),
        ResidualRow::lower("tube_margin", FRAC_PI_2 - r.tube_sup, 0.5 * cert.delta),
    ]);
    report.certificate = Some(CertificateSummary::from_certificate(cert));
    report.provenance.perturbed = cert.perturbed;
}

fn torus_volume(report: &mut Report, theta: &CircleMap) -> f64 {
    let vol = volume_z(&ZOneForm::angle(theta));
    let w = theta.degree();
    report.residuals.push(ResidualRow::upper(
        "volume_identity",
        (vol - TAU * w as f64 * FIBRE_AREA).abs(),
        tolerances::VOLUME,
    ));
    vol
}

fn screw_for(theta: &CircleMap, order: usize, rot: Option<f64>) -> Result<ScrewData, CliError> {
    let rot = rot.unwrap_or(TAU * theta.degree() as f64 / order.max(1) as f64);
    Ok(ScrewData::standard(order, rot)?)
}

fn run_theta_command(cmd: &Command, args: &ThetaArgs, report: &mut Report) -> Result<(), CliError> {
    let (theta, _) = load_theta(args)?;
    report.provenance.grid = theta.grid_size();
    let out = &args.common.out;
    let mut cert_for_curves = None;
    match cmd {
        Command::Check(_) => {
            if decide_stage(report, &theta, args.tol)?.is_some() {
                let margin = report.decision.as_ref().map_or(0.0, |d| d.margin);
                report
                    .residuals
                    .push(ResidualRow::lower("margin", margin, args.tol));
            }
        }
        Command::Synthesize(_) => {
            if decide_stage(report, &theta, args.tol)?.is_some() {
                let cert = synthesize_certificate(&theta, &certificate_options(args, None))?;
                certificate_rows(report, &cert);
                let vol = torus_volume(report, &theta);
                report.volume = Some(VolumeData {
                    vol_torus: vol,
                    vol_quotient: vol,
                    n_value: cert.n_value,
                    w: cert.winding,
                });
                cert_for_curves = Some(cert);
            }
        }
        Command::Volume(v) => {
            let w = theta.degree();
            let (vol_torus, vol_quotient) = match v.order {
                Some(order) => {
                    let screw = screw_for(&theta, order, v.rot)?;
                    let (t, q) = covering_volume(&theta, &screw)?;
                    report.residuals.push(ResidualRow::upper(
                        "quotient_covering",
                        (q * order as f64 - t).abs(),
                        tolerances::QUOTIENT,
                    ));
                    (t, q)
                }
                None => (
                    volume_z(&ZOneForm::angle(&theta)),
                    volume_z(&ZOneForm::angle(&theta)),
                ),
            };
            torus_volume(report, &theta);
            report.volume = Some(VolumeData {
                vol_torus,
                vol_quotient,
                n_value: TAU * w as f64,
                w,
            });
        }
        Command::Straighten(s) => {
            if decide_stage(report, &theta, args.tol)?.is_some() {
                let cert = synthesize_certificate(&theta, &certificate_options(args, None))?;
                certificate_rows(report, &cert);
                let w = cert.winding as f64;
                let mut std_rows = Vec::new();
                for n in [w, TAU * w] {
                    let r = std_pullback_residual(n, s.samples, args.common.seed)?;
                    report.residuals.push(ResidualRow::upper(
                        &format!("std_pullback(n={n})"),
                        r,
                        tolerances::STD_PULLBACK,
                    ));
                    std_rows.push(json!({ "n": n, "residual": r }));
                }
                let r = straightening_residual(&cert, s.samples, args.common.seed);
                report.residuals.push(ResidualRow::upper(
                    "straightening",
                    r,
                    tolerances::STRAIGHTENING,
                ));
                report.details = Some(json!({
                    "samples": s.samples,
                    "std_pullback": std_rows,
                    "straightening_residual": r,
                }));
                cert_for_curves = Some(cert);
            }
        }
        Command::Equivariant(e) => {
            let screw = screw_for(&theta, e.order, e.rot)?;
            let (t, q) = covering_volume(&theta, &screw)?;
            report.residuals.push(ResidualRow::upper(
                "quotient_covering",
                (q * e.order as f64 - t).abs(),
                tolerances::QUOTIENT,
            ));
            report.volume = Some(VolumeData {
                vol_torus: t,
                vol_quotient: q,
                n_value: TAU * theta.degree() as f64,
                w: theta.degree(),
            });
            if decide_stage(report, &theta, args.tol)?.is_some() {
                let cert = synthesize_certificate(&theta, &certificate_options(args, Some(screw)))?;
                certificate_rows(report, &cert);
                let (value, slope) = seam_residuals(&cert.phi.map, &screw);
                report
                    .residuals
                    .push(ResidualRow::upper("seam", value, tolerances::SEAM));
                report.residuals.push(ResidualRow::upper(
                    "seam_slope",
                    slope,
                    tolerances::SEAM_SLOPE,
                ));
                report.details =
                    Some(json!({ "screw": screw, "seam": value, "seam_slope": slope }));
                cert_for_curves = Some(cert);
            }
        }
        Command::Examples(_) | Command::Identity31(_) => unreachable!("not a θ command"),
    }
    write_curves(out, &theta, cert_for_curves.as_ref())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(())
}

fn run_examples(args: &ExamplesArgs, report: &mut Report) -> Result<(), CliError> {
    use tolerances::*;
    let (_, one) = build_example_i(&OpenThetaSpec::standard(args.grid), args.eps)?;
    let two = check_example_ii(EXAMPLE_II_RANGE, args.grid);
    report.residuals.extend([
        ResidualRow::lower(
            "example_i.min_alpha_x",
            one.min_alpha_x,
            args.eps - ALPHA_X_SLACK,
        ),
        ResidualRow::upper(
            "example_i.contraction",
            one.contraction_sup,
            CONTRACTION_OPEN,
        ),
        ResidualRow::lower("example_i.min_factor", one.min_factor, f64::MIN_POSITIVE),
        ResidualRow::lower(
            "example_i.min_plane_determinant",
            one.min_plane_determinant,
            f64::MIN_POSITIVE,
        ),
        ResidualRow::lower("example_ii.min_pairing", two.min_pairing, PAIRING_BOUND),
        ResidualRow::lower(
            "example_ii.min_phi_slope",
            two.min_phi_slope,
            f64::MIN_POSITIVE,
        ),
        ResidualRow::lower("example_ii.transversality", two.transversality, 1.0),
    ]);
    report.details = Some(json!({ "example_i": one, "example_ii": two }));
    Ok(())
}

fn run_identity(args: &IdentityArgs, report: &mut Report) -> Result<(), CliError> {
    if args.count == 0 || args.bandwidth < 0 {
        return Err(CliError::Usage(
            "need --count ≥ 1 and --bandwidth ≥ 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.common.seed);
    let (mut pointwise, mut integral, mut exact) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..args.count {
        let alpha = TrigOneForm::random(args.bandwidth, &mut rng);
        let beta = TrigOneForm::random(args.bandwidth, &mut rng);
        let r = check_identity_31(&alpha, &beta);
        pointwise = pointwise.max(r.pointwise);
        integral = integral.max(r.integral);
        exact = exact.max(r.exact_term);
    }
    report.residuals.extend([
        ResidualRow::upper("identity.pointwise", pointwise, tolerances::IDENTITY),
        ResidualRow::upper("identity.integral", integral, tolerances::IDENTITY),
        ResidualRow::upper("identity.exact_term", exact, tolerances::IDENTITY),
    ]);
    report.details = Some(json!({ "pairs": args.count, "bandwidth": args.bandwidth }));
    Ok(())
}

/// Runs one command and writes its report; returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let (name, theta_args, common) = match &cli.command {
        Command::Check(a) => ("check", Some(a), &a.common),
        Command::Synthesize(a) => ("synthesize", Some(a), &a.common),
        Command::Volume(a) => ("volume", Some(&a.theta), &a.theta.common),
        Command::Straighten(a) => ("straighten", Some(&a.theta), &a.theta.common),
        Command::Equivariant(a) => ("equivariant", Some(&a.theta), &a.theta.common),
        Command::Examples(a) => ("examples", None, &a.common),
        Command::Identity31(a) => ("identity31", None, &a.common),
    };
    let mut report = Report::new(provenance(name, theta_args, common));
    let result = match (&cli.command, theta_args) {
        (Command::Examples(a), _) => run_examples(a, &mut report),
        (Command::Identity31(a), _) => run_identity(a, &mut report),
        (cmd, Some(args)) => run_theta_command(cmd, args, &mut report),
        (_, None) => unreachable!(),
    };
    if let Err(e) = result {
        report.fail(&e.kind(), e.to_string());
    }
    report.settle();
    if let Err(e) = report.write(&common.out) {
        eprintln!("flatreeb: cannot write report: {e}");
        return 1;
    }
    match (&report.status, &report.error) {
        (Status::Ok, _) => {}
        (status, Some(err)) => eprintln!("flatreeb: {status:?}: {}", err.message),
        (status, None) => eprintln!("flatreeb: {status:?}"),
    }
    report.status.exit_code()
}

/// Parses arguments and runs; usage errors exit with 1, help with 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
