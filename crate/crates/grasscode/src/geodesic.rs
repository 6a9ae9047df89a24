//! Geodesic curves on the Grassmannian and their cut instants.
//!
//! For a tangent vector D = Q S V^H (compact SVD) at [U], the geodesic with
//! gamma(0) = [U] and velocity D is
//!
//!   gamma(t) = U V cos(t S) V^H + Q sin(t S) V^H,
//!
//! with cos/sin applied to the diagonal of t S. The geodesic stops being
//! minimizing at the cut instant pi / (2 sigma_1), where sigma_1 is the
//! largest singular value of D.
//!
//! When the base point is [U~; 0] and the direction is [0; D~] with
//! sqrt(M) D~ unitary, all singular values equal 1/sqrt(M) and the curve
//! collapses to the closed form
//!
//!   gamma(t) = [cos(t/sqrt(M)) U~ ; sqrt(M) sin(t/sqrt(M)) D~],
//!
//! which keeps one nonzero entry per row whenever U~ and D~ do.

use crate::stiefel::{StiefelError, StiefelPoint, TangentVector};
use crate::{r, CMatrix, Real};
use num_complex::Complex;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("sqrt(M) * delta_tilde is not unitary (residual {residual})")]
    NotScaledUnitary { residual: f64 },
    #[error(transparent)]
    Stiefel(#[from] StiefelError),
}

/// Evaluates the geodesic through the base of `delta` with velocity `delta`
/// at parameter `t`, via the compact SVD route.
pub fn geodesic_general<R: Real>(delta: &TangentVector<R>, t: R) -> StiefelPoint<R> {
    let svd = delta.data().clone().svd(true, true);
    let q = svd.u.expect("requested U factor");
    let v_t = svd.v_t.expect("requested V^H factor");
    let m = delta.base().m();
    let mut cos_ts = CMatrix::<R>::zeros(m, m);
    let mut sin_ts = CMatrix::<R>::zeros(m, m);
    for i in 0..m {
        let ts = t * svd.singular_values[i];
        cos_ts[(i, i)] = Complex::new(ts.cos(), R::zero());
        sin_ts[(i, i)] = Complex::new(ts.sin(), R::zero());
    }
    let v = v_t.adjoint();
    let data = delta.base().data() * &v * cos_ts * &v_t + q * sin_ts * &v_t;
    // cos^2 + sin^2 keeps the columns orthonormal up to roundoff
    StiefelPoint::validate(data, r(1e-8)).expect("geodesic preserves orthonormality")
}

/// Evaluates the structured geodesic on Gr(2M, M): the base point is
/// `[u_tilde; 0]` and the direction `[0; delta_tilde]` with
/// `sqrt(M) delta_tilde` unitary.
pub fn geodesic_structured<R: Real>(
    u_tilde: &CMatrix<R>,
    delta_tilde: &CMatrix<R>,
    t: R,
) -> Result<StiefelPoint<R>, GeodesicError> {
    let m = u_tilde.nrows();
    assert_eq!(u_tilde.ncols(), m, "u_tilde must be square");
    assert_eq!(delta_tilde.shape(), (m, m), "delta_tilde must be M x M");
    let sqrt_m = r::<R>(m as f64).sqrt();
    let scaled = delta_tilde.map(|z| z.scale(sqrt_m));
    let residual = (scaled.adjoint() * &scaled - CMatrix::<R>::identity(m, m)).norm();
    if residual > r(1e-8) {
        return Err(GeodesicError::NotScaledUnitary {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    let alpha = t / sqrt_m;
    let (c, s) = (alpha.cos(), alpha.sin());
    let mut data = CMatrix::<R>::zeros(2 * m, m);
    for i in 0..m {
        for j in 0..m {
            data[(i, j)] = u_tilde[(i, j)].scale(c);
            data[(m + i, j)] = delta_tilde[(i, j)].scale(sqrt_m * s);
        }
    }
    Ok(StiefelPoint::validate(data, r(1e-8))?)
}

/// Cut instant pi / (2 sigma_1) of a nonzero tangent vector.
pub fn cut_instant<R: Real>(delta: &TangentVector<R>) -> Result<R, StiefelError> {
    let sv = delta.data().singular_values();
    let sigma1 = sv.iter().fold(R::zero(), |a, &b| a.max(b));
    if sigma1 <= R::zero() {
        return Err(StiefelError::ZeroTangent);
    }
    Ok(R::frac_pi_2() / sigma1)
}
