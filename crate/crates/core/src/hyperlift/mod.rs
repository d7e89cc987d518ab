//! Lifts of the twist hamiltonians to the Poincaré disk: Möbius maps,
//! truncated group enumeration, normalised charts, the assembled `H_v` and
//! its mollified versions.

mod chart;
mod hamiltonian;
mod mobius;
mod report;

pub use chart::{lambda_scale, TransportChart};
pub use hamiltonian::{
    assemble_hv, corrected_hamiltonian, smooth_hv, AssembledHamiltonian, CorrectedHamiltonian, Mollifier,
    SmoothedHamiltonian,
};
pub use mobius::{enumerate_group, octagon_generators, schottky_pair, GroupElement, MobiusMap};
pub use report::{
    analytic_report, smoothing_study, translates_svg, EstimateReport, LengthRow, ReportOptions, SmoothingRow,
    SmoothingStudy,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::twistcore::RoundAnnulus;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperError {
    #[error("|a| = {0} is not inside the unit disk")]
    NotAutomorphism(f64),
    #[error("annulus is not inside the open unit disk")]
    AnnulusOutsideDisk,
    #[error("quadrature did not converge ({0})")]
    Quadrature(&'static str),
    #[error("transport density not positive near angle {phi}")]
    DensityNotPositive { phi: f64 },
    #[error("translates {0} and {1} overlap")]
    RegionOverlap(String, String),
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("enumeration depth {0} is too small for the regression (need at least 4)")]
    InsufficientData(usize),
}

/// Default annulus: centred at 0 with inner radius 0.15 and central
/// radius 0.2, inside the fundamental domain of `schottky_pair(0.8)`.
pub fn default_annulus() -> RoundAnnulus {
    RoundAnnulus::new(Complex64::new(0.0, 0.0), 0.15, (2.0 * 0.04f64 - 0.0225).sqrt()).unwrap()
}

/// Default quadrature tolerance.
pub const QUAD_TOL: f64 = 1e-10;
