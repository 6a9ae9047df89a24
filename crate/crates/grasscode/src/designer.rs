//! Constellation design by geodesic mapping.
//!
//! Given M (so T = 2M) and a power-of-two size L <= 4M^2, the design selects
//! signed Weyl-Heisenberg directions and maps each geodesic at one parameter
//! value:
//!
//! - L = 2: one direction at t = 0 and t = sqrt(M) pi/2 (all angles pi/2).
//! - L = 4 (D >= 4): two pairs of one diametral set at sqrt(M) pi/4 ± x,
//!   with x tuned on a grid.
//! - 2 < L <= D: a size-L diametral set, all pairs at the midpoint.
//! - D < L <= 2D: two disjoint size-L/2 diametral sets at sqrt(M) pi/4 ± x.
//! - otherwise: L/2 vector pairs at the midpoint (all of them when L = 4M^2).
//!
//! The base point is always [I_M; 0_M], so every codeword keeps at most one
//! nonzero entry per row. Bit labels put complementary codewords on opposite
//! directions ±Delta, which have maximal principal angles.

use crate::basis::{weyl_heisenberg_basis, BasisVector};
use crate::diametral::{find_diametral_sets, max_diametral_set, DiametralError};
use crate::geodesic::geodesic_structured;
use crate::metrics::constellation_metrics;
use crate::stiefel::StiefelPoint;
use crate::{r, CMatrix, Real};
use nalgebra::ComplexField;
use num_complex::Complex;
use thiserror::Error;

/// Entry threshold below which a coefficient counts as zero.
pub const SPARSE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("invalid constellation size L = {l} for M = {m}: L must be a power of two with 2 <= L <= 4M^2 = {max}")]
    InvalidSize { m: usize, l: usize, max: usize },
    #[error(transparent)]
    Infeasible(#[from] DiametralError),
    #[error("constellation carries no pairing provenance; labels cannot be derived")]
    StructureMissing,
    #[error("row {row} has {count} nonzero entries; expected at most one")]
    NotRowSparse { row: usize, count: usize },
}

/// Objective for the mapping-parameter adjustment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignCriterion {
    /// Maximize the constellation diversity product (default).
    Dp,
    /// Minimize the union bound for `n_for_ub` receive antennas.
    Ub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignCase {
    I,
    II,
    III,
    IV,
    V,
}

impl std::fmt::Display for DesignCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DesignCase::I => "i",
            DesignCase::II => "ii",
            DesignCase::III => "iii",
            DesignCase::IV => "iv",
            DesignCase::V => "v",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct DesignConfig {
    pub m: usize,
    pub l: usize,
    pub criterion: DesignCriterion,
    /// Receive-antenna count for the UB objective; ignored under DP.
    pub n_for_ub: usize,
    pub x_grid_size: usize,
}

impl DesignConfig {
    pub fn new(m: usize, l: usize) -> Self {
        Self { m, l, criterion: DesignCriterion::Dp, n_for_ub: 2, x_grid_size: 5000 }
    }

    fn validate(&self) -> Result<(), DesignError> {
        let max = 4 * self.m * self.m;
        if self.m == 0 || self.l < 2 || !self.l.is_power_of_two() || self.l > max {
            return Err(DesignError::InvalidSize { m: self.m, l: self.l, max });
        }
        Ok(())
    }
}

/// How the constellation was generated; carries the pairing needed for bit
/// labeling and the chosen mapping parameter.
#[derive(Debug, Clone)]
pub struct Provenance<R: Real> {
    pub case: DesignCase,
    /// Pair nodes in point order: pair p covers points 2p and 2p+1.
    pub pair_nodes: Vec<usize>,
    pub x: Option<R>,
    pub criterion: DesignCriterion,
}

/// Per-row sparse encoding: row -> (column, value), `None` for zero rows.
pub type SparsePoint<R> = Vec<Option<(usize, Complex<R>)>>;

#[derive(Debug, Clone)]
pub struct Constellation<R: Real> {
    pub points: Vec<StiefelPoint<R>>,
    /// Bit label per point, `bits` wide.
    pub labels: Vec<u32>,
    pub bits: u32,
    pub sparse: Option<Vec<SparsePoint<R>>>,
    pub provenance: Option<Provenance<R>>,
}

impl<R: Real> Constellation<R> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Spectral efficiency log2(L) / T in bps/Hz.
    pub fn rate(&self) -> f64 {
        self.bits as f64 / self.points[0].t() as f64
    }
}

/// One evaluated grid point of the mapping sweep.
#[derive(Debug, Clone, Copy)]
pub struct TracePoint<R: Real> {
    pub x: R,
    pub d_g: R,
    pub d_c: R,
    pub dp: R,
    pub ub: R,
}

fn midpoint<R: Real>(m: usize) -> R {
    r::<R>(m as f64).sqrt() * R::frac_pi_4()
}

fn point_at<R: Real>(basis: &[BasisVector<R>], node: usize, negated: bool, t: R) -> StiefelPoint<R> {
    let m = basis[node].delta_tilde().nrows();
    let u_tilde = CMatrix::<R>::identity(m, m);
    let dt = if negated {
        basis[node].delta_tilde().map(|z| -z)
    } else {
        basis[node].delta_tilde().clone()
    };
    geodesic_structured(&u_tilde, &dt, t).expect("basis blocks are scaled-unitary")
}

/// Points for two node families mapped at sqrt(M) pi/4 + x and
/// sqrt(M) pi/4 - x, in pair order (+Delta first).
fn two_family_points<R: Real>(
    basis: &[BasisVector<R>],
    m: usize,
    g1: &[usize],
    g2: &[usize],
    x: R,
) -> Vec<StiefelPoint<R>> {
    let mid = midpoint::<R>(m);
    let mut points = Vec::with_capacity(2 * (g1.len() + g2.len()));
    for &node in g1 {
        points.push(point_at(basis, node, false, mid + x));
        points.push(point_at(basis, node, true, mid + x));
    }
    for &node in g2 {
        points.push(point_at(basis, node, false, mid - x));
        points.push(point_at(basis, node, true, mid - x));
    }
    points
}

/// Grid search of the mapping parameter x over [0, sqrt(M) pi/4), maximizing
/// DP or minimizing UB. Ties keep the smallest x. The trace carries all four
/// metrics per grid point.
pub fn optimize_mapping_x<R: Real>(
    m: usize,
    g1: &[usize],
    g2: &[usize],
    criterion: DesignCriterion,
    n_for_ub: usize,
    grid_size: usize,
) -> (R, Vec<TracePoint<R>>) {
    let basis = weyl_heisenberg_basis::<R>(m);
    let x_max = midpoint::<R>(m);
    let mut trace = Vec::with_capacity(grid_size);
    let mut best_x = R::zero();
    let mut best_score = r::<R>(f64::NEG_INFINITY);
    for i in 0..grid_size {
        let x = x_max * r::<R>(i as f64) / r::<R>(grid_size as f64);
        let points = two_family_points(&basis, m, g1, g2, x);
        let metrics = constellation_metrics(&points, n_for_ub).expect("valid point family");
        let score = match criterion {
            DesignCriterion::Dp => metrics.dp_min,
            DesignCriterion::Ub => -metrics.ub,
        };
        if score > best_score {
            best_score = score;
            best_x = x;
        }
        trace.push(TracePoint {
            x,
            d_g: metrics.d_g_min,
            d_c: metrics.d_c_min,
            dp: metrics.dp_min,
            ub: metrics.ub,
        });
    }
    (best_x, trace)
}

/// Bit labels from the pairing provenance: pair p gets label p on the
/// +Delta point and the bitwise complement of p on the -Delta point, so
/// complementary labels always sit on opposite directions.
pub fn label_bits<R: Real>(constellation: &Constellation<R>) -> Result<Vec<u32>, DesignError> {
    let prov = constellation.provenance.as_ref().ok_or(DesignError::StructureMissing)?;
    let l = constellation.points.len();
    if prov.pair_nodes.len() * 2 != l {
        return Err(DesignError::StructureMissing);
    }
    let mask = (l - 1) as u32;
    let mut labels = Vec::with_capacity(l);
    for p in 0..l / 2 {
        labels.push(p as u32);
        labels.push(p as u32 ^ mask);
    }
    Ok(labels)
}

/// Sparse per-row encoding of a point with at most one nonzero per row.
pub fn sparse_encode<R: Real>(point: &StiefelPoint<R>) -> Result<SparsePoint<R>, DesignError> {
    let thresh = r::<R>(SPARSE_THRESHOLD);
    let mut rows = Vec::with_capacity(point.t());
    for i in 0..point.t() {
        let mut entry = None;
        let mut count = 0usize;
        for j in 0..point.m() {
            let v = point.data()[(i, j)];
            if v.modulus() > thresh {
                count += 1;
                entry = Some((j, v));
            }
        }
        if count > 1 {
            return Err(DesignError::NotRowSparse { row: i, count });
        }
        rows.push(entry);
    }
    Ok(rows)
}

/// Dense reconstruction of a sparse encoding (test and file-format helper).
pub fn sparse_to_dense<R: Real>(sparse: &SparsePoint<R>, m: usize) -> CMatrix<R> {
    let mut out = CMatrix::<R>::zeros(sparse.len(), m);
    for (i, entry) in sparse.iter().enumerate() {
        if let Some((j, v)) = entry {
            out[(i, *j)] = *v;
        }
    }
    out
}

/// Runs the design algorithm end to end.
pub fn design<R: Real>(cfg: &DesignConfig) -> Result<Constellation<R>, DesignError> {
    cfg.validate()?;
    let m = cfg.m;
    let l = cfg.l;
    let basis = weyl_heisenberg_basis::<R>(m);
    let mid = midpoint::<R>(m);
    let (_, d) = max_diametral_set::<R>(m);

    let (case, pair_nodes, x, points) = if l == 2 {
        // Case (i): both endpoints of one geodesic, mutually orthogonal.
        let sqrt_m_half_pi = r::<R>(m as f64).sqrt() * R::frac_pi_2();
        let points = vec![
            point_at(&basis, 0, false, R::zero()),
            point_at(&basis, 0, false, sqrt_m_half_pi),
        ];
        (DesignCase::I, vec![0], None, points)
    } else if l == 4 && d >= 4 {
        // Case (ii): two pairs of one diametral set, tuned split.
        let (set, _) = max_diametral_set::<R>(m);
        let nodes = set.nodes();
        let (g1, g2) = (vec![nodes[0]], vec![nodes[1]]);
        let (x, _) = optimize_mapping_x::<R>(m, &g1, &g2, cfg.criterion, cfg.n_for_ub, cfg.x_grid_size);
        let points = two_family_points(&basis, m, &g1, &g2, x);
        (DesignCase::II, vec![g1[0], g2[0]], Some(x), points)
    } else if l <= d {
        // Case (iii): one diametral set at the midpoint.
        let set = find_diametral_sets::<R>(m, l, 1, false)?.remove(0);
        let nodes = set.nodes();
        let mut points = Vec::with_capacity(l);
        for &node in &nodes {
            points.push(point_at(&basis, node, false, mid));
            points.push(point_at(&basis, node, true, mid));
        }
        (DesignCase::III, nodes, None, points)
    } else if l <= 2 * d {
        // Case (iv): two disjoint diametral sets, tuned split.
        let sets = find_diametral_sets::<R>(m, l / 2, 2, true)?;
        let g1 = sets[0].nodes();
        let g2 = sets[1].nodes();
        let (x, _) = optimize_mapping_x::<R>(m, &g1, &g2, cfg.criterion, cfg.n_for_ub, cfg.x_grid_size);
        let points = two_family_points(&basis, m, &g1, &g2, x);
        let mut pair_nodes = g1.clone();
        pair_nodes.extend_from_slice(&g2);
        (DesignCase::IV, pair_nodes, Some(x), points)
    } else {
        // Case (v): first L/2 vector pairs at the midpoint.
        let nodes: Vec<usize> = (0..l / 2).collect();
        let mut points = Vec::with_capacity(l);
        for &node in &nodes {
            points.push(point_at(&basis, node, false, mid));
            points.push(point_at(&basis, node, true, mid));
        }
        (DesignCase::V, nodes, None, points)
    };

    let mut constellation = Constellation {
        points,
        labels: Vec::new(),
        bits: l.trailing_zeros(),
        sparse: None,
        provenance: Some(Provenance { case, pair_nodes, x, criterion: cfg.criterion }),
    };
    constellation.labels = label_bits(&constellation)?;
    let sparse: Result<Vec<_>, _> = constellation.points.iter().map(sparse_encode).collect();
    constellation.sparse = Some(sparse?);
    Ok(constellation)
}
