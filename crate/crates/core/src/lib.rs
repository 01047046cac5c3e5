//! Conformally Reeb geodesic flows on the flat 3-torus: decision, synthesis
//! of the rescaling function, and the accompanying contact-form checks.

// Negated comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle_map;
pub mod corpus;
pub mod criterion;
pub mod diffeo;
pub mod error;
pub mod forms;
pub mod open_models;
pub mod solver;
pub mod spectral;
pub mod synthesis;

pub use circle_map::{CircleMap, CriticalPoint, ExtremaList};
pub use corpus::BandLimited;
pub use criterion::{decide, decide_with_tol, DrawdownWitness, ReebDecision, Verdict};
pub use error::{Error, Result};
pub use solver::{synthesize_certificate, CertificateOptions, ReebCertificate};
pub use synthesis::{Bias, PhiFunction, PlateauPlan, ScrewData, SynthesisOptions};
