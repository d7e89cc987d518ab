//! Twist maps on round annuli and their arrangement in the unit disk.

mod annulus;
mod config;
mod packing;
mod profile;
mod rep;

pub use annulus::{
    double_dehn_twist, jacobian_det, AnnulusTwist, AreaChart, PlaneMap, RoundAnnulus, TwistPart,
};
pub use config::{build_configuration, ConfigOptions, Configuration, Provenance};
pub use packing::{pack_triangulation, tangency_graph, tangency_packing, Circle, PackingOptions, PackingStats};
pub use profile::{make_profile, product_twist, product_twist_lifted, TwistProfile};
pub use rep::{build_representation, Representation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwistError {
    #[error("profile centre {b} outside (-{a}, {a})")]
    ProfileCenter { a: f64, b: f64 },
    #[error("height {t} outside [-{a}, {a}]")]
    OutsideAnnulus { t: f64, a: f64 },
    #[error("invalid annulus radii {r_inner} .. {r_outer}")]
    BadAnnulus { r_inner: f64, r_outer: f64 },
    #[error("circle packing did not converge after {sweeps} sweeps (angle residual {residual:e})")]
    PackingDiverged { sweeps: usize, residual: f64 },
    #[error("circle packing layout is not univalent")]
    PackingLayout,
    #[error("no inflation factor keeps the crossing and disjointness constraints")]
    NoInflation,
    #[error("no free arc on circle {0} for its punctures")]
    NoFreeArc(usize),
    #[error("flood fill found {found} complementary components, expected {expected}; refine the grid")]
    ComplementMismatch { found: usize, expected: usize },
    #[error("complementary component {0} has no grid cell inside the disk")]
    EmptyComponent(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("N = {0}; the representation needs N >= 2")]
    PowerTooSmall(u32),
    #[error("graph is nonplanar and no planar emulator was found")]
    NoEmulator,
    #[error("emulator: {0}")]
    Emulator(String),
}
