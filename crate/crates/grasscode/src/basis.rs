//! The Weyl-Heisenberg tangent basis at [I_M; 0_M].
//!
//! The 2M^2 directions are built from the shift matrix S (cyclic down-shift)
//! and the clock matrix Omega = diag(1, w, ..., w^(M-1)) with w = e^(2 pi i / M):
//!
//!   delta_tilde(a, b, phase) = phase * (1 / sqrt(M)) * S^a * Omega^b,
//!
//! for a, b in 0..M and phase in {1, i}. Every sqrt(M) delta_tilde is a
//! generalized permutation matrix (one nonzero per row and column) and
//! unitary, the family is g-orthonormal, and each member is diametral.
//!
//! Ordering is fixed so downstream searches and labelings are reproducible:
//! k = 2 (a M + b) + (0 for phase 1, 1 for phase i).

use crate::stiefel::{StiefelPoint, TangentVector};
use crate::{r, CMatrix, Real};
use num_complex::Complex;

/// Identifier string for the basis ordering convention, embedded in
/// constellation files.
pub const BASIS_ORDERING_ID: &str = "wh-shift-clock-v1";

/// The phase factor doubling the M^2 shift-clock products to a real basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    One,
    I,
}

impl Phase {
    fn factor<R: Real>(self) -> Complex<R> {
        match self {
            Phase::One => Complex::new(R::one(), R::zero()),
            Phase::I => Complex::new(R::zero(), R::one()),
        }
    }
}

/// One basis tangent direction, with its (a, b, phase) label and both the
/// M x M block and the full 2M x M tangent vector available.
#[derive(Debug, Clone)]
pub struct BasisVector<R: Real> {
    index: usize,
    a: usize,
    b: usize,
    phase: Phase,
    delta_tilde: CMatrix<R>,
}

impl<R: Real> BasisVector<R> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> (usize, usize, Phase) {
        (self.a, self.b, self.phase)
    }

    /// The M x M block; sqrt(M) * delta_tilde is unitary.
    pub fn delta_tilde(&self) -> &CMatrix<R> {
        &self.delta_tilde
    }

    /// The full tangent vector [0; delta_tilde] at [I_M; 0_M].
    pub fn tangent(&self) -> TangentVector<R> {
        let m = self.delta_tilde.nrows();
        let mut data = CMatrix::<R>::zeros(2 * m, m);
        for i in 0..m {
            for j in 0..m {
                data[(m + i, j)] = self.delta_tilde[(i, j)];
            }
        }
        TangentVector::new_default(StiefelPoint::identity_block(m), data)
            .expect("basis block is tangent by construction")
    }
}

/// Cyclic down-shift permutation: S[i, j] = 1 iff i = (j + 1) mod M.
pub fn shift_matrix<R: Real>(m: usize) -> CMatrix<R> {
    let mut s = CMatrix::<R>::zeros(m, m);
    for j in 0..m {
        s[((j + 1) % m, j)] = Complex::new(R::one(), R::zero());
    }
    s
}

/// Clock matrix Omega = diag(1, w, ..., w^(M-1)), w = e^(2 pi i / M).
pub fn clock_matrix<R: Real>(m: usize) -> CMatrix<R> {
    let mut omega = CMatrix::<R>::zeros(m, m);
    let two_pi = R::two_pi();
    for j in 0..m {
        let arg = two_pi * r::<R>(j as f64) / r::<R>(m as f64);
        omega[(j, j)] = Complex::new(arg.cos(), arg.sin());
    }
    omega
}

/// The full g-orthonormal family of 2M^2 basis vectors in canonical order.
pub fn weyl_heisenberg_basis<R: Real>(m: usize) -> Vec<BasisVector<R>> {
    assert!(m >= 1);
    let s = shift_matrix::<R>(m);
    let omega = clock_matrix::<R>(m);
    let inv_sqrt_m = Complex::new(R::one() / r::<R>(m as f64).sqrt(), R::zero());
    let mut out = Vec::with_capacity(2 * m * m);
    let mut s_pow_a = CMatrix::<R>::identity(m, m);
    for a in 0..m {
        let mut product = s_pow_a.clone();
        for b in 0..m {
            for phase in [Phase::One, Phase::I] {
                let factor = phase.factor::<R>() * inv_sqrt_m;
                out.push(BasisVector {
                    index: out.len(),
                    a,
                    b,
                    phase,
                    delta_tilde: product.map(|z| z * factor),
                });
            }
            product *= &omega;
        }
        s_pow_a = &s_pow_a * &s;
    }
    out
}
