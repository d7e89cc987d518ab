//! Flows of hamiltonian fields, evaluation of representations on words, and
//! the numerical checks built on them.

mod action;
mod field;
mod flow;
mod polydisk;
mod verify;

pub use action::{lifted_fields, rep_apply, twist_fields, IntegratedAction, WordAction};
pub use field::{gradient_gap, RotationField, TwistField, ZeroField};
pub use flow::{flow_map, flow_point, hamiltonian_vector, implicit_midpoint, FlowOptions, FlowResult, Scheme};
pub use polydisk::{polydisk_extend, PolydiskField, SliceReport};
pub use verify::{
    default_marked_points, faithfulness_probe, generator_jacobians, jacobian_probe, verify_relations, JacobianStats, PairResidual,
    ProbeOptions, ProbeRow, ProbeTable, RelationTolerances, VerificationReport, Verdict,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::hyperlift::HyperError;
use crate::raagwords::RaagError;
use crate::twistcore::TwistError;

/// A function on the plane with its gradient `H_x + i H_y`.
pub trait HamiltonianField: Send + Sync {
    fn value(&self, z: Complex64) -> f64;
    fn gradient(&self, z: Complex64) -> Complex64;
    /// Points where the field may be nonzero.
    fn in_support(&self, z: Complex64) -> bool;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynError {
    #[error("integrator failed to converge near time {time}")]
    Divergence { time: f64 },
    #[error("point {0} left the numerical domain")]
    Escaped(Complex64),
    #[error("expected {expected} fields, got {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    BadArgument(String),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Raag(#[from] RaagError),
}
