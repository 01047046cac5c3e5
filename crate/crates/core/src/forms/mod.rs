//! Differential forms on the flat 3-torus.

pub mod trig;
pub mod zonly;

pub use trig::{check_identity_31, IdentityResiduals, TrigOneForm, TrigPoly, TrigTwoForm};
pub use zonly::{
    check_connection_volume_independence, check_gray_segment, contact_density, contract,
    covering_volume, exterior_derivative_z, gray_segment_min_density, reeb_residual, volume_z,
    ZOneForm, ZTwoForm, ZVectorField, FIBRE_AREA,
};
