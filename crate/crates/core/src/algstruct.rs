//! Finite-dimensional transitivity: algebra closure, commutant, radical,
//! invariant subspaces and k-fold transitivity of matrix algebras.
//!
//! By Burnside's theorem the only transitive subalgebra of `M_N` is `M_N`
//! itself, so every decision here has an exact answer to check against:
//! `dim span == N^2`.

use faer::c64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::rng::{complex_gaussian, SeedStream};

/// Orthonormal basis (under `tr(a^* b)`) of a unital matrix algebra.
#[derive(Debug, Clone)]
pub struct AlgebraSpan {
    ambient_dim: usize,
    basis: Vec<CMat>,
    generators: Vec<CMat>,
    gap_ratio: f64,
}

impl AlgebraSpan {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    /// Smallest kept residual over largest dropped residual during the
    /// rank decisions; below the flag ratio the dimension is borderline.
    pub fn gap_ratio(&self) -> f64 {
        self.gap_ratio
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim * self.ambient_dim
    }

    /// `||m - proj(m)|| / ||m||`.
    pub fn residual(&self, m: &CMat) -> f64 {
        let v = linalg::vec_of(m);
        let norm = linalg::vnorm(&v);
        if norm == 0.0 {
            return 0.0;
        }
        let mut w = v;
        for b in &self.basis {
            let bv = linalg::vec_of(b);
            let c = linalg::vdot(&bv, &w);
            for (wi, bi) in w.iter_mut().zip(&bv) {
                *wi -= c * bi;
            }
        }
        linalg::vnorm(&w) / norm
    }

    /// Largest [`residual`](Self::residual) of a product of two basis
    /// elements.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.residual(&(a * b)));
            }
        }
        worst
    }

    /// `{I_k (x) B}` acting on `C^k (x) C^N`.
    pub fn ampliation(&self, k: usize) -> AlgebraSpan {
        let id = linalg::identity(k);
        let s = c64::new(1.0 / (k as f64).sqrt(), 0.0);
        AlgebraSpan {
            ambient_dim: k * self.ambient_dim,
            basis: self.basis.iter().map(|b| linalg::scale(&linalg::kron(&id, b), s)).collect(),
            generators: self.generators.iter().map(|g| linalg::kron(&id, g)).collect(),
            gap_ratio: self.gap_ratio,
        }
    }

    fn basis_vecs(&self) -> Vec<Vec<c64>> {
        self.basis.iter().map(linalg::vec_of).collect()
    }
}

struct Gap {
    min_kept: f64,
    max_dropped: f64,
}

impl Gap {
    fn ratio(&self) -> f64 {
        if self.max_dropped == 0.0 {
            f64::INFINITY
        } else {
            self.min_kept / self.max_dropped
        }
    }
}

/// Adds `v` to the orthonormal set if its residual exceeds `tol` relative
/// to `reference`, the norm `v` would have without cancellation (a product
/// of nilpotents can round to a tiny but nonzero vector).
fn absorb(basis: &mut Vec<Vec<c64>>, v: &[c64], reference: f64, tol: f64, gap: &mut Gap) -> bool {
    let norm0 = linalg::vnorm(v).max(reference);
    if norm0 == 0.0 {
        return false;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis.iter() {
            let c = linalg::vdot(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    let norm = linalg::vnorm(&w);
    let rel = norm / norm0;
    if rel <= tol {
        gap.max_dropped = gap.max_dropped.max(rel);
        return false;
    }
    gap.min_kept = gap.min_kept.min(rel);
    basis.push(w.into_iter().map(|x| x / norm).collect());
    true
}

fn check_square(ms: &[CMat], n: usize) -> Result<()> {
    for m in ms {
        if m.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
        }
        if m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
        }
    }
    Ok(())
}

/// Span of all words in the generators, grown by left multiplication until
/// no product adds a new direction.
pub fn close_algebra(generators: &[CMat], ambient_dim: usize) -> Result<AlgebraSpan> {
    check_square(generators, ambient_dim)?;
    let n = ambient_dim;
    let tol = Tolerances::default().rank;
    let mut gap = Gap { min_kept: f64::INFINITY, max_dropped: 0.0 };
    let mut basis: Vec<Vec<c64>> = Vec::new();
    absorb(&mut basis, &linalg::vec_of(&linalg::identity(n)), 0.0, tol, &mut gap);
    let mut frontier: Vec<usize> = Vec::new();
    for g in generators {
        if absorb(&mut basis, &linalg::vec_of(g), 0.0, tol, &mut gap) {
            frontier.push(basis.len() - 1);
        }
    }
    while !frontier.is_empty() && basis.len() < n * n {
        let mut next = Vec::new();
        for &idx in &frontier {
            let b = linalg::mat_of(&basis[idx], n, n);
            for g in generators {
                let reference = linalg::frobenius(g);
                if absorb(&mut basis, &linalg::vec_of(&(g * &b)), reference, tol, &mut gap) {
                    next.push(basis.len() - 1);
                }
            }
        }
        frontier = next;
    }
    Ok(AlgebraSpan {
        ambient_dim: n,
        basis: basis.iter().map(|v| linalg::mat_of(v, n, n)).collect(),
        generators: generators.to_vec(),
        gap_ratio: gap.ratio(),
    })
}

fn transpose(a: &CMat) -> CMat {
    CMat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)])
}

/// Orthonormal basis of `{X : X g = g X}` for every generator.
pub fn commutant(span: &AlgebraSpan) -> Result<Vec<CMat>> {
    let n = span.ambient_dim;
    let id = linalg::identity(n);
    let gens: Vec<CMat> = span
        .generators
        .iter()
        .filter(|g| linalg::frobenius(g) > 0.0)
        .map(|g| linalg::scale(g, c64::new(1.0 / linalg::frobenius(g), 0.0)))
        .collect();
    if gens.is_empty() {
        return Ok((0..n * n).map(|k| linalg::mat_of(&unit(n * n, k), n, n)).collect());
    }
    // vec(X g - g X) = (g^T (x) I - I (x) g) vec(X)
    let blocks: Vec<CMat> = gens.iter().map(|g| linalg::sub(&linalg::kron(&transpose(g), &id), &linalg::kron(&id, g))).collect();
    let stacked = CMat::from_fn(blocks.len() * n * n, n * n, |i, j| blocks[i / (n * n)][(i % (n * n), j)]);
    let ns = linalg::null_space(&stacked, Tolerances::default().rank)?;
    Ok(linalg::columns(&ns.basis).iter().map(|v| linalg::mat_of(v, n, n)).collect())
}

fn unit(len: usize, k: usize) -> Vec<c64> {
    let mut v = vec![c64::new(0.0, 0.0); len];
    v[k] = c64::new(1.0, 0.0);
    v
}

/// Kernel of the trace form `(x, y) -> tr(x y)` on the span, which is the
/// Jacobson radical for subalgebras of `M_N(C)`.
pub fn radical(span: &AlgebraSpan) -> Result<Vec<CMat>> {
    let d = span.dim();
    let n = span.ambient_dim;
    let gram = CMat::from_fn(d, d, |i, j| linalg::trace_of_product(&span.basis[i], &span.basis[j]));
    let ns = linalg::null_space(&gram, Tolerances::default().rank)?;
    let combos: Vec<Vec<c64>> = linalg::columns(&ns.basis)
        .iter()
        .map(|c| {
            let mut acc = vec![c64::new(0.0, 0.0); n * n];
            for (coef, b) in c.iter().zip(span.basis_vecs()) {
                for (a, x) in acc.iter_mut().zip(&b) {
                    *a += coef * x;
                }
            }
            acc
        })
        .collect();
    Ok(linalg::orthonormal_columns(&combos, Tolerances::default().rank)
        .iter()
        .map(|v| linalg::mat_of(v, n, n))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceKind {
    None,
    RadicalImage,
    CommutantEigenspace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceReport {
    pub kind: SubspaceKind,
    /// Orthonormal basis vectors.
    #[serde(with = "crate::cplx::vecvec")]
    pub basis: Vec<Vec<c64>>,
    pub verified: bool,
    /// `max_g ||(I - P) g P|| / ||g||` over the raw generators.
    pub residual: f64,
    pub span_dim: usize,
    pub ambient_dim: usize,
}

impl SubspaceReport {
    pub fn projection(&self) -> CMat {
        linalg::projection_onto(&self.basis, self.ambient_dim)
    }
}

/// Relative leakage `max_g ||(I - P) g Q||_F / ||g||_F` of the subspace
/// spanned by the orthonormal columns `basis`.
pub fn invariance_residual(generators: &[CMat], basis: &[Vec<c64>]) -> f64 {
    if basis.is_empty() {
        return 0.0;
    }
    let dim = basis[0].len();
    let q = linalg::from_columns(basis, dim);
    let p = &q * &linalg::adjoint(&q);
    let leak = linalg::sub(&linalg::identity(dim), &p);
    generators
        .iter()
        .map(|g| {
            let norm = linalg::frobenius(g);
            if norm == 0.0 {
                0.0
            } else {
                linalg::frobenius(&(&leak * &(g * &q))) / norm
            }
        })
        .fold(0.0, f64::max)
}

fn report(span: &AlgebraSpan, kind: SubspaceKind, basis: Vec<Vec<c64>>) -> SubspaceReport {
    let residual = invariance_residual(&span.generators, &basis);
    SubspaceReport {
        kind,
        verified: residual <= Tolerances::default().invariance,
        residual,
        basis,
        span_dim: span.dim(),
        ambient_dim: span.ambient_dim,
    }
}

/// Every invariant subspace the search turns up: the radical image if the
/// radical is nonzero, otherwise the eigenspaces of a random non-scalar
/// commutant element.
fn discover(span: &AlgebraSpan) -> Result<Vec<SubspaceReport>> {
    let n = span.ambient_dim;
    let tol = Tolerances::default();
    let rad = radical(span)?;
    if !rad.is_empty() {
        let cols: Vec<Vec<c64>> = rad.iter().flat_map(linalg::columns).collect();
        let basis = linalg::orthonormal_columns(&cols, 1e-8);
        return Ok(vec![report(span, SubspaceKind::RadicalImage, basis)]);
    }
    let comm = commutant(span)?;
    let nonscalar: Vec<CMat> = comm
        .iter()
        .map(|c| linalg::shift(c, -linalg::normalized_trace(c)))
        .filter(|x| linalg::frobenius(x) > tol.rank)
        .collect();
    if nonscalar.is_empty() {
        return Ok(Vec::new());
    }
    let stream = SeedStream::new(0);
    for attempt in 0..8 {
        let mut rng = stream.rng("algstruct/commutant", attempt);
        let mut x = linalg::zeros(n, n);
        for c in &nonscalar {
            x = linalg::add(&x, &linalg::scale(c, complex_gaussian(&mut rng)));
        }
        let scale = linalg::spectral_norm(&x)?;
        let (values, _) = linalg::eigen(&x)?;
        let mut found: Vec<SubspaceReport> = Vec::new();
        let mut seen: Vec<c64> = Vec::new();
        for &lambda in &values {
            if seen.iter().any(|&s| (s - lambda).norm() <= 1e-6 * scale) {
                continue;
            }
            seen.push(lambda);
            let ns = linalg::null_space(&linalg::shift(&x, -lambda), 1e-8)?;
            let dim = ns.basis.ncols();
            if dim == 0 || dim == n {
                continue;
            }
            let r = report(span, SubspaceKind::CommutantEigenspace, linalg::columns(&ns.basis));
            if r.verified {
                found.push(r);
            }
        }
        if !found.is_empty() {
            return Ok(found);
        }
    }
    Err(Error::Inconsistency(format!(
        "commutant has {} non-scalar directions but no eigenspace verified invariant",
        nonscalar.len()
    )))
}

/// A proper nontrivial invariant subspace, or `kind: None` when there is
/// none, in which case the span must be all of `M_N`.
pub fn find_invariant_subspace(span: &AlgebraSpan) -> Result<SubspaceReport> {
    match discover(span)?.into_iter().next() {
        Some(r) => Ok(r),
        None => {
            let n = span.ambient_dim;
            if span.dim() != n * n {
                return Err(Error::Inconsistency(format!(
                    "no invariant subspace found but the algebra has dimension {} < {}",
                    span.dim(),
                    n * n
                )));
            }
            Ok(SubspaceReport {
                kind: SubspaceKind::None,
                basis: Vec::new(),
                verified: true,
                residual: 0.0,
                span_dim: span.dim(),
                ambient_dim: n,
            })
        }
    }
}

pub fn is_transitive(span: &AlgebraSpan) -> Result<bool> {
    Ok(find_invariant_subspace(span)?.kind == SubspaceKind::None)
}

/// Orthonormal basis of `{(B xi_1, ..., B xi_k) : B in span}`.
pub fn orbit_subspace(span: &AlgebraSpan, tuple: &[Vec<c64>]) -> Vec<Vec<c64>> {
    let vectors: Vec<Vec<c64>> = span
        .basis
        .iter()
        .map(|b| tuple.iter().flat_map(|xi| apply(b, xi)).collect())
        .collect();
    linalg::orthonormal_columns(&vectors, Tolerances::default().rank)
}

fn apply(m: &CMat, v: &[c64]) -> Vec<c64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).fold(c64::new(0.0, 0.0), |acc, j| acc + m[(i, j)] * v[j])).collect()
}

fn orbit_rank(span: &AlgebraSpan, tuple: &[Vec<c64>]) -> Result<usize> {
    let rows = tuple.len() * span.ambient_dim;
    let cols: Vec<Vec<c64>> = span.basis.iter().map(|b| tuple.iter().flat_map(|xi| apply(b, xi)).collect()).collect();
    let m = linalg::from_columns(&cols, rows);
    let sv = linalg::singular_values(&m)?;
    let top = sv.iter().copied().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > Tolerances::default().rank * top).count())
}

/// Whether every `N x N` block of `p` is a multiple of the identity.
pub fn is_block_scalar(p: &CMat, n: usize, tol: f64) -> bool {
    let k = p.nrows() / n;
    (0..k).all(|a| {
        (0..k).all(|b| {
            let blk = linalg::block(p, a * n, b * n, n, n);
            linalg::max_abs(&linalg::shift(&blk, -linalg::normalized_trace(&blk))) <= tol
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFoldReport {
    pub k: usize,
    /// Every invariant subspace found for the ampliation has a projection
    /// in `M_k (x) C I`.
    pub ampliation: bool,
    /// Every sampled tuple has a full orbit.
    pub orbit: bool,
    pub tuples_tested: usize,
    /// First subspace of the ampliation whose projection is not block
    /// scalar.
    pub witness: Option<SubspaceReport>,
}

impl KFoldReport {
    pub fn transitive(&self) -> bool {
        self.ampliation && self.orbit
    }
}

pub fn kfold_transitive(span: &AlgebraSpan, k: usize) -> Result<bool> {
    Ok(kfold_report(span, k, &SeedStream::new(0))?.transitive())
}

/// Decides k-fold transitivity twice: through the invariant subspaces of
/// the ampliation and through orbits of sampled k-tuples. The tuples are
/// the standard basis, 32 Gaussian tuples, and one tuple per eigenvector
/// of a random element of the algebra (an invariant subspace always holds
/// such an eigenvector). The routes must agree.
pub fn kfold_report(span: &AlgebraSpan, k: usize, stream: &SeedStream) -> Result<KFoldReport> {
    let n = span.ambient_dim;
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k = {k} must lie in 1..={n}")));
    }
    let tol = Tolerances::default();
    let amp = span.ampliation(k);
    let subs = discover(&amp)?;
    let witness = subs.into_iter().find(|s| !is_block_scalar(&s.projection(), n, tol.invariance));
    let ampliation = witness.is_none();

    let mut tuples: Vec<Vec<Vec<c64>>> = vec![(0..k).map(|i| unit(n, i)).collect()];
    let mut rng = stream.rng("algstruct/orbit", k as u64);
    let gaussian = |rng: &mut rand_chacha::ChaCha20Rng| -> Vec<c64> { (0..n).map(|_| complex_gaussian(rng)).collect() };
    for _ in 0..32 {
        tuples.push((0..k).map(|_| gaussian(&mut rng)).collect());
    }
    let mut a = linalg::zeros(n, n);
    for b in &span.basis {
        a = linalg::add(&a, &linalg::scale(b, complex_gaussian(&mut rng)));
    }
    let (_, vecs) = linalg::eigen(&a)?;
    for v in linalg::columns(&vecs) {
        let mut t = vec![v];
        t.extend((1..k).map(|_| gaussian(&mut rng)));
        tuples.push(t);
    }
    let mut orbit = true;
    for t in &tuples {
        if orbit_rank(span, t)? < k * n {
            orbit = false;
            break;
        }
    }
    if orbit != ampliation {
        return Err(Error::Inconsistency(format!(
            "k-fold routes disagree at k = {k}: ampliation {ampliation}, orbit {orbit}"
        )));
    }
    Ok(KFoldReport { k, ampliation, orbit, tuples_tested: tuples.len(), witness })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockProjectionReport {
    /// `max(|P^2 - P|, |P - P^*|)`.
    pub projection_residual: f64,
    /// `|(I - P) Z P| / |Z|`; the lemma applies only when this is small.
    pub lat_residual: f64,
    pub in_lat: bool,
    pub range_rank: usize,
    pub range_residual: f64,
    pub fixed_rank: usize,
    pub fixed_residual: f64,
    /// Both subspaces invariant under `X`. Meaningful only when `in_lat`.
    pub lemma_holds: bool,
}

fn check_projection(p: &CMat) -> Result<f64> {
    let r = linalg::max_abs(&linalg::sub(&(p * p), p)).max(linalg::max_abs(&linalg::sub(p, &linalg::adjoint(p))));
    if r > 1e-10 {
        return Err(Error::Precondition(format!("not an orthogonal projection (residual {r:.3e})")));
    }
    Ok(r)
}

/// For a projection `P = [[T1, S], [S^*, T2]]` and `Z = X (+) Y` with
/// `P` invariant under `Z`, the range of `T1` and the kernel of `I - T1`
/// are invariant under `X`.
pub fn block_projection_check(p: &CMat, x: &CMat, y: &CMat) -> Result<BlockProjectionReport> {
    let (h, k) = (x.nrows(), y.nrows());
    check_square(&[x.clone()], h)?;
    check_square(&[y.clone()], k)?;
    check_square(&[p.clone()], h + k)?;
    let projection_residual = check_projection(p)?;
    let mut z = linalg::zeros(h + k, h + k);
    for i in 0..h {
        for j in 0..h {
            z[(i, j)] = x[(i, j)];
        }
    }
    for i in 0..k {
        for j in 0..k {
            z[(h + i, h + j)] = y[(i, j)];
        }
    }
    let tol = Tolerances::default().invariance;
    let leak = linalg::sub(&linalg::identity(h + k), p);
    let lat_residual = linalg::max_abs(&(&(&leak * &z) * p)) / linalg::max_abs(&z).max(1.0);
    let t1 = linalg::block(p, 0, 0, h, h);
    let (vals, vecs) = linalg::hermitian_eigen(&t1)?;
    let cols = linalg::columns(&vecs);
    let range: Vec<Vec<c64>> = cols.iter().zip(&vals).filter(|(_, &v)| v > tol).map(|(c, _)| c.clone()).collect();
    let fixed: Vec<Vec<c64>> = cols.iter().zip(&vals).filter(|(_, &v)| v > 1.0 - tol).map(|(c, _)| c.clone()).collect();
    let range_residual = invariance_residual(std::slice::from_ref(x), &range);
    let fixed_residual = invariance_residual(std::slice::from_ref(x), &fixed);
    Ok(BlockProjectionReport {
        projection_residual,
        lat_residual,
        in_lat: lat_residual <= tol,
        range_rank: range.len(),
        range_residual,
        fixed_rank: fixed.len(),
        fixed_residual,
        lemma_holds: range_residual <= tol && fixed_residual <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalBlock {
    Zero,
    Identity,
    /// `P_ii - P_ii^2` is injective; carries its smallest eigenvalue.
    Injective(f64),
    Violation,
}

/// Classifies each diagonal `N x N` block of a projection in
/// `M_k (x) M_N`: for transitive algebras every block is `0`, `I`, or has
/// `P_ii - P_ii^2` injective.
pub fn diagonal_block_trichotomy(p: &CMat, n: usize) -> Result<Vec<DiagonalBlock>> {
    check_projection(p)?;
    if n == 0 || p.nrows() % n != 0 {
        return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
    }
    let tol = Tolerances::default().invariance;
    (0..p.nrows() / n)
        .map(|i| {
            let (vals, _) = linalg::hermitian_eigen(&linalg::block(p, i * n, i * n, n, n))?;
            Ok(if vals.iter().all(|&v| v.abs() <= tol) {
                DiagonalBlock::Zero
            } else if vals.iter().all(|&v| (v - 1.0).abs() <= tol) {
                DiagonalBlock::Identity
            } else {
                let m = vals.iter().map(|&v| v * (1.0 - v)).fold(f64::INFINITY, f64::min);
                if m > tol {
                    DiagonalBlock::Injective(m)
                } else {
                    DiagonalBlock::Violation
                }
            })
        })
        .collect()
}

/// `||E T - T E||` for a normal `T` and a projection `E` onto a
/// `T`-invariant subspace; such subspaces reduce `T`.
pub fn normal_commutation_check(t: &CMat, e: &CMat) -> Result<f64> {
    check_projection(e)?;
    let tt = &(t * &linalg::adjoint(t));
    let normality = linalg::max_abs(&linalg::sub(tt, &(&linalg::adjoint(t) * t)));
    if normality > 1e-10 * linalg::max_abs(tt).max(1.0) {
        return Err(Error::Precondition(format!("T is not normal (residual {normality:.3e})")));
    }
    let leak = linalg::sub(&linalg::identity(e.nrows()), e);
    let inv = linalg::max_abs(&(&(&leak * t) * e));
    if inv > 1e-10 * linalg::max_abs(t).max(1.0) {
        return Err(Error::Precondition(format!("range of E is not T-invariant (residual {inv:.3e})")));
    }
    linalg::spectral_norm(&linalg::sub(&(e * t), &(t * e)))
}

/// One random generator set for property tests.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: &'static str,
    pub generators: Vec<CMat>,
}

fn ginibre<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> CMat {
    CMat::from_fn(n, m, |_, _| complex_gaussian(rng))
}

fn conjugate(ms: Vec<CMat>, u: &CMat) -> Vec<CMat> {
    let uh = linalg::adjoint(u);
    ms.iter().map(|m| &(u * m) * &uh).collect()
}

/// Draws instance `index` of a mixed family at dimension `n`: generic
/// pairs, single matrices, block triangular and block diagonal algebras,
/// `M_a (x) I_b`, diagonal algebras and nilpotent-plus-scalar algebras,
/// all in a random unitary frame.
pub fn sample_instance(n: usize, stream: &SeedStream, index: u64) -> Instance {
    let mut rng = stream.rng("algstruct/instance", index);
    let u = crate::matmodel::haar_unitary(n, &mut rng);
    let split = if n > 1 { 1 + rng.random_range(0..n - 1) } else { 1 };
    let pick = index % 7;
    let (label, gens): (&'static str, Vec<CMat>) = match pick {
        0 => ("generic_pair", vec![ginibre(n, n, &mut rng), ginibre(n, n, &mut rng)]),
        1 => ("single", vec![ginibre(n, n, &mut rng)]),
        2 => {
            let mk = |rng: &mut rand_chacha::ChaCha20Rng| {
                let mut m = ginibre(n, n, rng);
                for i in split..n {
                    for j in 0..split {
                        m[(i, j)] = c64::new(0.0, 0.0);
                    }
                }
                m
            };
            ("block_triangular", vec![mk(&mut rng), mk(&mut rng)])
        }
        3 => {
            let mk = |rng: &mut rand_chacha::ChaCha20Rng| {
                let mut m = ginibre(n, n, rng);
                for i in 0..n {
                    for j in 0..n {
                        if (i < split) != (j < split) {
                            m[(i, j)] = c64::new(0.0, 0.0);
                        }
                    }
                }
                m
            };
            ("block_diagonal", vec![mk(&mut rng), mk(&mut rng)])
        }
        4 => {
            let a = (2..n).find(|a| n % a == 0).unwrap_or(n);
            let id = linalg::identity(n / a);
            ("tensor", vec![linalg::kron(&ginibre(a, a, &mut rng), &id), linalg::kron(&ginibre(a, a, &mut rng), &id)])
        }
        5 => {
            let d1: Vec<c64> = (0..n).map(|_| complex_gaussian(&mut rng)).collect();
            let d2: Vec<c64> = (0..n).map(|_| complex_gaussian(&mut rng)).collect();
            ("diagonal", vec![linalg::diag(&d1), linalg::diag(&d2)])
        }
        _ => {
            let mut m = ginibre(n, n, &mut rng);
            for i in 0..n {
                for j in 0..=i {
                    m[(i, j)] = c64::new(0.0, 0.0);
                }
            }
            ("strictly_upper", vec![m])
        }
    };
    Instance { label, generators: conjugate(gens, &u) }
}
