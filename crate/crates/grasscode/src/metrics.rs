//! Principal angles and the constellation metrics built on them.
//!
//! The principal angles between two subspaces [U1], [U2] are
//! theta_m = arccos(sigma_m), where sigma_m are the singular values of
//! U1^H U2 (clamped to [0, 1]). From them:
//!
//! - geodesic distance  d_g = (sum theta_m^2)^(1/2), bounded by sqrt(M) pi/2
//! - chordal distance   d_c = (sum sin^2 theta_m)^(1/2), bounded by sqrt(M)
//! - diversity product  DP  = det(I - U1^H U2 U2^H U1) = prod sin^2 theta_m
//! - union bound        UB  = sum_{i<j} DP(X_i, X_j)^(-N)
//!
//! Constellation-level values are minima over unordered pairs (UB is a sum).

use crate::stiefel::{StiefelError, StiefelPoint};
use crate::{r, Real};

/// The M principal angles between two subspaces, sorted ascending, each in
/// [0, pi/2].
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngleVector<R: Real> {
    angles: Vec<R>,
}

impl<R: Real> PrincipalAngleVector<R> {
    pub fn angles(&self) -> &[R] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// d_g = l2 norm of the angle vector.
    pub fn geodesic_distance(&self) -> R {
        self.angles.iter().map(|&a| a * a).fold(R::zero(), |s, x| s + x).sqrt()
    }

    /// d_c = (sum sin^2 theta)^(1/2).
    pub fn chordal_distance(&self) -> R {
        self.angles
            .iter()
            .map(|&a| a.sin() * a.sin())
            .fold(R::zero(), |s, x| s + x)
            .sqrt()
    }

    /// prod sin^2 theta; the angle route to the diversity product.
    pub fn diversity_product(&self) -> R {
        self.angles
            .iter()
            .map(|&a| a.sin() * a.sin())
            .fold(R::one(), |p, x| p * x)
    }
}

/// Principal angles from the singular values of U1^H U2.
pub fn principal_angles<R: Real>(
    u1: &StiefelPoint<R>,
    u2: &StiefelPoint<R>,
) -> Result<PrincipalAngleVector<R>, StiefelError> {
    u1.check_dims(u2)?;
    let gamma = u1.data().adjoint() * u2.data();
    let sv = gamma.singular_values();
    let mut angles: Vec<R> = sv
        .iter()
        .map(|&s| s.clamp(R::zero(), R::one()).acos())
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(PrincipalAngleVector { angles })
}

pub fn geodesic_distance<R: Real>(
    u1: &StiefelPoint<R>,
    u2: &StiefelPoint<R>,
) -> Result<R, StiefelError> {
    Ok(principal_angles(u1, u2)?.geodesic_distance())
}

pub fn chordal_distance<R: Real>(
    u1: &StiefelPoint<R>,
    u2: &StiefelPoint<R>,
) -> Result<R, StiefelError> {
    Ok(principal_angles(u1, u2)?.chordal_distance())
}

/// DP(U1, U2) = det(I_M - U1^H U2 U2^H U1), computed by the determinant
/// route; equals prod sin^2 theta_m.
pub fn diversity_product<R: Real>(
    u1: &StiefelPoint<R>,
    u2: &StiefelPoint<R>,
) -> Result<R, StiefelError> {
    u1.check_dims(u2)?;
    let gamma = u1.data().adjoint() * u2.data();
    let m = u1.m();
    let prod = crate::CMatrix::<R>::identity(m, m) - gamma.adjoint() * gamma;
    Ok(prod.determinant().re.clamp(R::zero(), R::one()))
}

/// The four constellation metrics plus the argmin pair of each minimum.
#[derive(Debug, Clone)]
pub struct ConstellationMetrics<R: Real> {
    pub d_g_min: R,
    pub d_c_min: R,
    pub dp_min: R,
    /// UB for the given N; +infinity when some pair has DP = 0.
    pub ub: R,
    pub n_for_ub: usize,
    pub d_g_argmin: (usize, usize),
    pub d_c_argmin: (usize, usize),
    pub dp_argmin: (usize, usize),
}

/// Minima over all unordered pairs, and the union bound for `n` receive
/// antennas. Requires at least two points of identical shape.
pub fn constellation_metrics<R: Real>(
    points: &[StiefelPoint<R>],
    n: usize,
) -> Result<ConstellationMetrics<R>, StiefelError> {
    assert!(points.len() >= 2, "need at least two constellation points");
    assert!(n >= 1, "need at least one receive antenna");
    let inf = r::<R>(f64::INFINITY);
    let mut out = ConstellationMetrics {
        d_g_min: inf,
        d_c_min: inf,
        dp_min: inf,
        ub: R::zero(),
        n_for_ub: n,
        d_g_argmin: (0, 0),
        d_c_argmin: (0, 0),
        dp_argmin: (0, 0),
    };
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let pa = principal_angles(&points[i], &points[j])?;
            let dg = pa.geodesic_distance();
            let dc = pa.chordal_distance();
            let dp = pa.diversity_product();
            if dg < out.d_g_min {
                out.d_g_min = dg;
                out.d_g_argmin = (i, j);
            }
            if dc < out.d_c_min {
                out.d_c_min = dc;
                out.d_c_argmin = (i, j);
            }
            if dp < out.dp_min {
                out.dp_min = dp;
                out.dp_argmin = (i, j);
            }
            if out.ub < inf {
                if dp <= R::zero() {
                    out.ub = inf;
                } else {
                    out.ub += R::one() / dp.powi(n as i32);
                    if !(out.ub < inf) {
                        out.ub = inf;
                    }
                }
            }
        }
    }
    Ok(out)
}
