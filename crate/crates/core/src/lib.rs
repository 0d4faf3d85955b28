//! Poncelet n-ellipses in the unit disk.
//!
//! Eigenvalue configurations of cut-off CMV matrices whose numerical range is
//! an elliptical disk, built from prescribed foci, pentagram data or a
//! Brianchon point, and certified independently by numerical-range sampling
//! and tangent-chain closure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod cmv;
pub mod envelope;
pub mod geometry;
pub mod opuc;
pub mod poly;
pub mod solvers;
pub mod tolerance;

pub use num_complex::Complex64 as C64;

pub use blaschke::{BlaschkeError, BlaschkeProduct};
pub use cmv::{CmvError, ComplexMatrix, CutoffCmv};
pub use envelope::{EnvelopeCurve, EnvelopeError, PolygonFamily};
pub use geometry::{Conic, Ellipse, GeometryError, Line, PolygonChain};
pub use opuc::{OpucError, Popuc, VerblunskySeq};
pub use poly::{MonicPoly, Poly, PolyError};
pub use solvers::{PentagonSolutionSet, PonceletConfig, SolverError};
pub use tolerance::Tolerances;

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Opuc(#[from] OpucError),
    #[error(transparent)]
    Cmv(#[from] CmvError),
    #[error(transparent)]
    Blaschke(#[from] BlaschkeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
