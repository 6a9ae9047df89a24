//! Diametral sets over the signed Weyl-Heisenberg basis.
//!
//! A diametral set is a negation-closed subset of {±Delta_k} such that for
//! every pair of members, M Delta_1^H Delta_2 has no eigenvalue equal to 1.
//! Because closure makes ±Delta_k atomic, the search runs over the 2M^2
//! vector-pair nodes: two nodes are compatible iff the spectrum of
//! M Delta_k^H Delta_l avoids both +1 and -1 (negating one member flips the
//! whole spectrum). Maximum sets are found by exact branch-and-bound
//! max-clique with a greedy coloring bound; results are deterministic, with
//! ties broken towards lexicographically smallest node lists.
//!
//! The basis products are generalized permutation matrices, so their
//! eigenvalues are computed exactly from cycle decompositions: a cycle of
//! length l with entry product p contributes the l-th roots of p.

use crate::basis::{weyl_heisenberg_basis, BasisVector};
use crate::{r, CMatrix, Real};
use nalgebra::ComplexField;
use num_complex::Complex;
use thiserror::Error;

/// Default tolerance on |lambda - 1| for eigenvalue admissibility.
pub const DEFAULT_EIG_TOL: f64 = 1e-8;

/// Exact clique search is used up to this many pair nodes (2M^2); beyond, a
/// deterministic greedy build stands in.
pub const MAX_EXACT_NODES: usize = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiametralError {
    #[error("no diametral set(s) satisfying the request exist: {0}")]
    InfeasibleRequest(String),
}

/// A signed basis index: +k or -k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignedIndex {
    pub index: usize,
    pub negated: bool,
}

/// A negation-closed, pairwise-admissible set of signed basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiametralSet {
    pub m: usize,
    pub members: Vec<SignedIndex>,
}

impl DiametralSet {
    fn from_nodes(m: usize, nodes: &[usize]) -> Self {
        let mut members = Vec::with_capacity(2 * nodes.len());
        for &k in nodes {
            members.push(SignedIndex { index: k, negated: false });
            members.push(SignedIndex { index: k, negated: true });
        }
        Self { m, members }
    }

    /// The underlying vector-pair nodes, ascending.
    pub fn nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = self
            .members
            .iter()
            .filter(|s| !s.negated)
            .map(|s| s.index)
            .collect();
        nodes.sort_unstable();
        nodes
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Eigenvalues of a generalized permutation matrix (exactly one nonzero per
/// row and column), from its cycle decomposition.
pub fn gen_perm_eigenvalues<R: Real>(w: &CMatrix<R>) -> Vec<Complex<R>> {
    let m = w.nrows();
    assert_eq!(w.ncols(), m);
    let thresh = r::<R>(1e-9);
    // row index of the single nonzero in each column
    let mut row_of_col = vec![usize::MAX; m];
    for j in 0..m {
        let mut hits = 0;
        for i in 0..m {
            if w[(i, j)].modulus() > thresh {
                row_of_col[j] = i;
                hits += 1;
            }
        }
        assert_eq!(hits, 1, "matrix is not a generalized permutation");
    }
    let mut seen = vec![false; m];
    let mut eigs = Vec::with_capacity(m);
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let mut j = start;
        let mut len = 0usize;
        let mut prod = Complex::new(R::one(), R::zero());
        loop {
            seen[j] = true;
            let i = row_of_col[j];
            prod *= w[(i, j)];
            len += 1;
            j = i;
            if j == start {
                break;
            }
        }
        // l-th roots of the cycle product
        let angle = prod.argument();
        let radius = prod.modulus().powf(R::one() / r(len as f64));
        for k in 0..len {
            let theta = (angle + R::two_pi() * r::<R>(k as f64)) / r(len as f64);
            eigs.push(Complex::new(radius * theta.cos(), radius * theta.sin()));
        }
    }
    eigs
}

fn signed_product<R: Real>(
    d1: &BasisVector<R>,
    neg1: bool,
    d2: &BasisVector<R>,
    neg2: bool,
) -> CMatrix<R> {
    let m = d1.delta_tilde().nrows();
    let mut w = d1.delta_tilde().adjoint() * d2.delta_tilde();
    let mut sign = r::<R>(m as f64);
    if neg1 != neg2 {
        sign = -sign;
    }
    w.apply(|z| *z = z.scale(sign));
    w
}

/// Whether the signed pair satisfies the diametral admissibility condition:
/// no eigenvalue of M Delta_1^H Delta_2 within `tol_eig` of 1.
pub fn pair_admissible<R: Real>(
    d1: &BasisVector<R>,
    neg1: bool,
    d2: &BasisVector<R>,
    neg2: bool,
    tol_eig: R,
) -> bool {
    let w = signed_product(d1, neg1, d2, neg2);
    let one = Complex::new(R::one(), R::zero());
    gen_perm_eigenvalues(&w)
        .iter()
        .all(|lambda| (lambda - one).modulus() > tol_eig)
}

/// Node-compatibility graph over vector pairs: nodes k, l are adjacent iff
/// every signed combination of ±Delta_k, ±Delta_l is admissible, i.e. the
/// spectrum of M Delta_k^H Delta_l avoids both +1 and -1.
pub fn admissibility_graph<R: Real>(basis: &[BasisVector<R>], tol_eig: R) -> Vec<u128> {
    let k = basis.len();
    assert!(k <= 128, "graph bitsets hold at most 128 nodes");
    let one = Complex::new(R::one(), R::zero());
    let mut adj = vec![0u128; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let w = signed_product(&basis[i], false, &basis[j], false);
            let ok = gen_perm_eigenvalues(&w).iter().all(|lambda| {
                (lambda - one).modulus() > tol_eig && (lambda + one).modulus() > tol_eig
            });
            if ok {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    adj
}

/// Exact maximum clique, branch-and-bound with a greedy coloring bound.
/// Deterministic: candidates are explored in ascending node order and the
/// first maximum found is kept.
fn max_clique(adj: &[u128]) -> Vec<usize> {
    fn color_bound(adj: &[u128], mut candidates: u128) -> usize {
        let mut colors = 0;
        while candidates != 0 {
            colors += 1;
            let mut class = candidates;
            while class != 0 {
                let v = class.trailing_zeros() as usize;
                candidates &= !(1u128 << v);
                class &= !(1u128 << v);
                class &= !adj[v];
            }
        }
        colors
    }
    fn expand(adj: &[u128], current: &mut Vec<usize>, candidates: u128, best: &mut Vec<usize>) {
        if candidates == 0 {
            if current.len() > best.len() {
                *best = current.clone();
            }
            return;
        }
        if current.len() + color_bound(adj, candidates) <= best.len() {
            return;
        }
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= !(1u128 << v);
            if current.len() + 1 + rest.count_ones() as usize <= best.len() {
                break;
            }
            current.push(v);
            expand(adj, current, rest & adj[v], best);
            current.pop();
        }
    }
    let mut best = Vec::new();
    let all = if adj.len() == 128 { u128::MAX } else { (1u128 << adj.len()) - 1 };
    expand(adj, &mut Vec::new(), all, &mut best);
    best.sort_unstable();
    best
}

/// Deterministic greedy clique (ascending order), used past the exact cap.
fn greedy_clique(adj: &[u128]) -> Vec<usize> {
    let mut clique = Vec::new();
    let mut candidates = if adj.len() == 128 { u128::MAX } else { (1u128 << adj.len()) - 1 };
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        clique.push(v);
        candidates &= adj[v];
        candidates &= !((1u128 << (v + 1)) - 1);
    }
    clique
}

/// A maximum-cardinality diametral set and its size D = 2 * clique size.
/// Exact for up to [`MAX_EXACT_NODES`] pair nodes.
pub fn max_diametral_set<R: Real>(m: usize) -> (DiametralSet, usize) {
    let basis = weyl_heisenberg_basis::<R>(m);
    let adj = admissibility_graph(&basis, r(DEFAULT_EIG_TOL));
    let clique = if basis.len() <= MAX_EXACT_NODES {
        max_clique(&adj)
    } else {
        greedy_clique(&adj)
    };
    let set = DiametralSet::from_nodes(m, &clique);
    let d = set.len();
    (set, d)
}

/// First-found (lexicographic) cliques of exactly `want` nodes within
/// `allowed`, extending `current` from node `from`.
fn find_clique_lex(
    adj: &[u128],
    allowed: u128,
    from: usize,
    current: &mut Vec<usize>,
    want: usize,
) -> bool {
    if current.len() == want {
        return true;
    }
    for v in from..adj.len() {
        let bit = 1u128 << v;
        if allowed & bit == 0 {
            continue;
        }
        if current.iter().any(|&u| adj[u] & bit == 0) {
            continue;
        }
        current.push(v);
        if find_clique_lex(adj, allowed, v + 1, current, want) {
            return true;
        }
        current.pop();
    }
    false
}

/// Finds `count` diametral sets of the given signed size (first-found in
/// lexicographic node order); with `disjoint`, the sets share no vectors.
pub fn find_diametral_sets<R: Real>(
    m: usize,
    size: usize,
    count: usize,
    disjoint: bool,
) -> Result<Vec<DiametralSet>, DiametralError> {
    assert!(count == 1 || count == 2);
    if size % 2 != 0 || size == 0 {
        return Err(DiametralError::InfeasibleRequest(format!(
            "set size {size} must be even and positive"
        )));
    }
    let basis = weyl_heisenberg_basis::<R>(m);
    let want = size / 2;
    if disjoint && count * want > basis.len() {
        return Err(DiametralError::InfeasibleRequest(format!(
            "{count} disjoint sets of {size} signed vectors exceed the 4M^2 = {} available",
            2 * basis.len()
        )));
    }
    let adj = admissibility_graph(&basis, r::<R>(DEFAULT_EIG_TOL));
    let all = if basis.len() == 128 { u128::MAX } else { (1u128 << basis.len()) - 1 };

    if count == 1 {
        let mut c = Vec::new();
        if !find_clique_lex(&adj, all, 0, &mut c, want) {
            return Err(DiametralError::InfeasibleRequest(format!(
                "no diametral set of {size} signed vectors exists for M = {m}"
            )));
        }
        return Ok(vec![DiametralSet::from_nodes(m, &c)]);
    }

    // count == 2: enumerate first cliques in lex order; for each, try to
    // place the second in the complement (or anywhere when not disjoint).
    fn search_two(
        adj: &[u128],
        all: u128,
        want: usize,
        disjoint: bool,
        from: usize,
        first: &mut Vec<usize>,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        if first.len() == want {
            let allowed = if disjoint {
                let mut used = 0u128;
                for &v in first.iter() {
                    used |= 1 << v;
                }
                all & !used
            } else {
                all
            };
            let mut second = Vec::new();
            if find_clique_lex(adj, allowed, 0, &mut second, want) {
                return Some((first.clone(), second));
            }
            return None;
        }
        for v in from..adj.len() {
            let bit = 1u128 << v;
            if first.iter().any(|&u| adj[u] & bit == 0) {
                continue;
            }
            first.push(v);
            if let Some(found) = search_two(adj, all, want, disjoint, v + 1, first) {
                return Some(found);
            }
            first.pop();
        }
        None
    }

    match search_two(&adj, all, want, disjoint, 0, &mut Vec::new()) {
        Some((c1, c2)) => Ok(vec![
            DiametralSet::from_nodes(m, &c1),
            DiametralSet::from_nodes(m, &c2),
        ]),
        None => Err(DiametralError::InfeasibleRequest(format!(
            "no {} diametral sets of {size} signed vectors exist for M = {m}",
            if disjoint { "two disjoint" } else { "two" }
        ))),
    }
}
