//! Umbilic points and half-integer indices of curvature-line flows and
//! Hessian eigen-flows of graph surfaces.
//!
//! The crate computes rotation indices of the singular flows attached to a
//! graph surface `z = f(x, y)`:
//!
//! * the curvature line flow and its umbilics, located by the Cartesian
//!   identifier pair `(d1, d2)` or the polar pair `(delta1, delta2)`;
//! * the eigen-flow of a Hessian matrix and its equi-diagonal points;
//! * the behaviour of both under inversion of the surface and under the
//!   plane inversion that pairs a function with its dual.
//!
//! Derivatives are produced by truncated Taylor arithmetic ([`taylor`]),
//! indices by adaptive winding-number evaluation ([`winding`]), and every
//! closed-form derivative table carried by the surface catalog doubles as a
//! regression oracle against the automatic differentiation path.

pub mod catalog;
pub mod expr;
pub mod export;
pub mod identifiers;
pub mod inversion;
pub mod jets;
pub mod report;
pub mod ribaucour;
pub mod taylor;
pub mod verify;
pub mod winding;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside the field's domain: {0}")]
    Domain(String),
    #[error("non-finite value produced: {0}")]
    NonFinite(String),
    #[error("field vanishes on the curve (min magnitude {min_magnitude:e})")]
    ZeroOnCurve { min_magnitude: f64 },
    #[error("umbilic point on the curve at parameter {t}")]
    UmbilicOnCurve { t: f64 },
    #[error("point is an umbilic (identifiers below tolerance)")]
    Umbilic,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("tangential zero of delta1 along the curve: {0}")]
    TangentZero(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("equi-diagonal point on the curve at parameter {t}")]
    EquiDiagonalOnCurve { t: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
