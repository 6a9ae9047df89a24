//! Stiefel representatives, tangent vectors and the Riemannian metric.
//!
//! A point of the complex Grassmannian Gr(T, M) is an M-dimensional subspace
//! of C^T, represented here by a T x M matrix U with orthonormal columns
//! (U^H U = I_M). Two representatives span the same subspace iff their
//! projectors U U^H coincide. The tangent space at [U] is identified with
//! the T x M matrices D satisfying U^H D = 0, and carries the metric
//! g(D1, D2) = Re tr(D1^H D2).

use crate::{r, CMatrix, Real};
use num_complex::Complex;
use thiserror::Error;

/// Default Frobenius tolerance for orthonormality checks.
pub const DEFAULT_ORTH_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StiefelError {
    #[error("matrix columns are not orthonormal (residual {residual})")]
    NotOrthonormal { residual: f64 },
    #[error("dimension mismatch: ({t1}, {m1}) vs ({t2}, {m2})")]
    DimensionMismatch { t1: usize, m1: usize, t2: usize, m2: usize },
    #[error("matrix is {rows}x{cols} but requires more rows than columns")]
    BadShape { rows: usize, cols: usize },
    #[error("matrix is not tangent at the base point (residual {residual})")]
    TangencyViolated { residual: f64 },
    #[error("tangent vectors have different base points")]
    BaseMismatch,
    #[error("tangent vector is zero")]
    ZeroTangent,
}

/// A T x M complex matrix with orthonormal columns, representing a point of
/// Gr(T, M).
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint<R: Real> {
    data: CMatrix<R>,
}

impl<R: Real> StiefelPoint<R> {
    /// Validates `data` as a Stiefel representative: `U^H U = I_M` to within
    /// `tol` in Frobenius norm.
    pub fn validate(data: CMatrix<R>, tol: R) -> Result<Self, StiefelError> {
        if data.nrows() < data.ncols() || data.ncols() == 0 {
            return Err(StiefelError::BadShape { rows: data.nrows(), cols: data.ncols() });
        }
        let gram = data.adjoint() * &data;
        let residual = (gram - CMatrix::<R>::identity(data.ncols(), data.ncols())).norm();
        if residual > tol {
            return Err(StiefelError::NotOrthonormal { residual: residual.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(Self { data })
    }

    /// Same as [`validate`](Self::validate) with the default tolerance.
    pub fn validate_default(data: CMatrix<R>) -> Result<Self, StiefelError> {
        Self::validate(data, r(DEFAULT_ORTH_TOL))
    }

    /// The canonical point `[I_M; 0_M]` of Gr(2M, M).
    pub fn identity_block(m: usize) -> Self {
        let mut data = CMatrix::<R>::zeros(2 * m, m);
        for i in 0..m {
            data[(i, i)] = Complex::new(R::one(), R::zero());
        }
        Self { data }
    }

    pub fn data(&self) -> &CMatrix<R> {
        &self.data
    }

    /// Number of rows T.
    pub fn t(&self) -> usize {
        self.data.nrows()
    }

    /// Subspace dimension M.
    pub fn m(&self) -> usize {
        self.data.ncols()
    }

    /// The orthogonal projector P = U U^H onto the spanned subspace.
    pub fn projector(&self) -> CMatrix<R> {
        &self.data * self.data.adjoint()
    }

    /// Whether `self` and `other` span the same subspace, i.e. their
    /// projectors agree to within `tol` in Frobenius norm.
    pub fn same_subspace(&self, other: &Self, tol: R) -> bool {
        self.t() == other.t()
            && self.m() == other.m()
            && (self.projector() - other.projector()).norm() <= tol
    }

    pub(crate) fn check_dims(&self, other: &Self) -> Result<(), StiefelError> {
        if self.t() != other.t() || self.m() != other.m() {
            return Err(StiefelError::DimensionMismatch {
                t1: self.t(),
                m1: self.m(),
                t2: other.t(),
                m2: other.m(),
            });
        }
        Ok(())
    }
}

/// A tangent vector at a base point: a T x M matrix D with U^H D = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<R: Real> {
    base: StiefelPoint<R>,
    data: CMatrix<R>,
}

impl<R: Real> TangentVector<R> {
    /// Validates `data` as tangent at `base`: `base^H data = 0` to within
    /// `tol` in Frobenius norm.
    pub fn new(base: StiefelPoint<R>, data: CMatrix<R>, tol: R) -> Result<Self, StiefelError> {
        if base.t() != data.nrows() || base.m() != data.ncols() {
            return Err(StiefelError::DimensionMismatch {
                t1: base.t(),
                m1: base.m(),
                t2: data.nrows(),
                m2: data.ncols(),
            });
        }
        let residual = (base.data().adjoint() * &data).norm();
        if residual > tol {
            return Err(StiefelError::TangencyViolated { residual: residual.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(Self { base, data })
    }

    pub fn new_default(base: StiefelPoint<R>, data: CMatrix<R>) -> Result<Self, StiefelError> {
        Self::new(base, data, r(DEFAULT_ORTH_TOL))
    }

    pub fn base(&self) -> &StiefelPoint<R> {
        &self.base
    }

    pub fn data(&self) -> &CMatrix<R> {
        &self.data
    }

    /// g-norm sqrt(Re tr(D^H D)), i.e. the Frobenius norm.
    pub fn g_norm(&self) -> R {
        self.data.norm()
    }

    /// The opposite tangent vector -D at the same base point.
    pub fn negated(&self) -> Self {
        Self { base: self.base.clone(), data: -&self.data }
    }
}

/// Riemannian metric g(D1, D2) = Re tr(D1^H D2) at a shared base point.
pub fn g_inner<R: Real>(d1: &TangentVector<R>, d2: &TangentVector<R>) -> Result<R, StiefelError> {
    if d1.base != d2.base {
        return Err(StiefelError::BaseMismatch);
    }
    Ok((d1.data.adjoint() * &d2.data).trace().re)
}
