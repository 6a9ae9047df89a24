//! Structured Grassmannian constellations for noncoherent MIMO.
//!
//! This crate builds unitary space-time constellations on the complex
//! Grassmann manifold Gr(2M, M) by mapping geodesics that depart from the
//! identity point with Weyl-Heisenberg tangent directions. Every designed
//! codeword has at most one nonzero entry per row, so a transmitter needs a
//! single active antenna per time slot and the ML detector can skip the dense
//! matrix product.
//!
//! The main pieces:
//! - [`stiefel`]: Stiefel representatives, tangent vectors, the Riemannian
//!   metric.
//! - [`metrics`]: principal angles and the geodesic/chordal/DP/UB metrics.
//! - [`geodesic`]: geodesic curves and cut instants.
//! - [`basis`]: the 2M^2 g-orthonormal Weyl-Heisenberg tangent directions.
//! - [`diametral`]: diametral-set admissibility and exact max-set search.
//! - [`designer`]: the constellation design algorithm with bit labeling and
//!   the sparse one-nonzero-per-row encoding.
//! - [`sim`]: Rayleigh block-fading Monte Carlo with naive and fast ML
//!   detection.
//! - [`fileio`]: the constellation file container and simulation outputs.
//!
//! Core math is generic over the real scalar type (any [`Real`], i.e. `f32`
//! or `f64`); the simulator and file formats are fixed to `f64`. Concrete
//! `f64` aliases live at the crate root.

pub mod basis;
pub mod designer;
pub mod diametral;
pub mod fileio;
pub mod geodesic;
pub mod metrics;
pub mod sim;
pub mod stiefel;

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;

/// Real scalar the core math is generic over.
pub trait Real: RealField + Copy + num_traits::FromPrimitive + num_traits::ToPrimitive {}
impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for lifting an `f64` literal into the generic scalar.
pub(crate) fn r<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("literal representable in scalar type")
}

/// Dense complex matrix over a real scalar.
pub type CMatrix<R> = DMatrix<Complex<R>>;

pub use designer::{design, Constellation, DesignConfig, DesignCriterion};
pub use stiefel::{StiefelPoint, TangentVector};

/// Concrete `f64` aliases used by the simulator, file formats and CLI.
pub type StiefelPoint64 = StiefelPoint<f64>;
pub type TangentVector64 = TangentVector<f64>;
pub type Constellation64 = Constellation<f64>;
pub type CMatrix64 = CMatrix<f64>;
