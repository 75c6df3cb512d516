//! Seeded random-matrix realizations used as the independent oracle.
//!
//! The free product `(M_2, tr/2) * (M_2, tr/2)` is approximated by two
//! copies of `M_2 (x) I_n` in general position: the second copy is
//! conjugated by a Haar unitary of size `2n`. Two free Haar unitaries
//! stand in for the generators of the free group factor.

use std::collections::BTreeMap;

use faer::c64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::rdiagonal::{OperatorTag, RadialPlanarMeasure};
use crate::rng::{complex_gaussian, SeedStream};
use crate::stats::ks_statistic;

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// columns of `Q` rephased by the diagonal of `R`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    assert!(dim >= 1, "dimension must be positive");
    let mut g = linalg::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            g[(i, j)] = complex_gaussian(rng);
        }
    }
    let qr = g.qr();
    let mut q = qr.compute_Q();
    let r = qr.R();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n == 0.0 { c64::new(1.0, 0.0) } else { d / n };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// The four `2 x 2` unitaries `I, diag(1,-1), [[0,-1],[1,0]], [[0,1],[1,0]]`.
pub fn pauli_basis() -> [CMat; 4] {
    [
        linalg::from_real(&[&[1.0, 0.0], &[0.0, 1.0]]),
        linalg::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]),
        linalg::from_real(&[&[0.0, -1.0], &[1.0, 0.0]]),
        linalg::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]),
    ]
}

/// Matrix units from the `W` basis:
/// `E11 = (W0+W1)/2, E12 = (W3-W2)/2, E21 = (W3+W2)/2, E22 = (W0-W1)/2`.
fn matrix_units(w: &[CMat; 4]) -> [[CMat; 2]; 2] {
    let half = c64::new(0.5, 0.0);
    [
        [linalg::scale(&linalg::add(&w[0], &w[1]), half), linalg::scale(&linalg::sub(&w[3], &w[2]), half)],
        [linalg::scale(&linalg::add(&w[3], &w[2]), half), linalg::scale(&linalg::sub(&w[0], &w[1]), half)],
    ]
}

/// Finite-dimensional realization of `(M_2, tr/2) * (M_2, tr/2)`.
///
/// Immutable after construction; identical seeds give bitwise-identical
/// matrices.
#[derive(Debug, Clone)]
pub struct MatrixModel {
    half_dim: usize,
    seed: u64,
    q: CMat,
    w: [CMat; 4],
    v: [CMat; 4],
    e: [[CMat; 2]; 2],
    f: [[CMat; 2]; 2],
}

pub fn build_m2_free_m2(half_dim: usize, seed: u64) -> MatrixModel {
    assert!(half_dim >= 1, "half dimension must be positive");
    let dim = 2 * half_dim;
    let q = haar_unitary(dim, &mut SeedStream::new(seed).rng("m2_free_m2/Q", 0));
    let qh = linalg::adjoint(&q);
    let id_n = linalg::identity(half_dim);
    let w = pauli_basis().map(|p| linalg::kron(&p, &id_n));
    let v = [
        linalg::identity(dim),
        &(&q * &w[1]) * &qh,
        &(&q * &w[2]) * &qh,
        &(&q * &w[3]) * &qh,
    ];
    let e = matrix_units(&w);
    let f = matrix_units(&v);
    MatrixModel { half_dim, seed, q, w, v, e, f }
}

impl MatrixModel {
    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    pub fn dim(&self) -> usize {
        2 * self.half_dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn w(&self, i: usize) -> &CMat {
        &self.w[i]
    }

    pub fn v(&self, i: usize) -> &CMat {
        &self.v[i]
    }

    /// `E_ij` for `i, j` in `1..=2`.
    pub fn e(&self, i: usize, j: usize) -> &CMat {
        &self.e[i - 1][j - 1]
    }

    /// `F_ij` for `i, j` in `1..=2`.
    pub fn f(&self, i: usize, j: usize) -> &CMat {
        &self.f[i - 1][j - 1]
    }

    /// The Haar unitary conjugating the second copy.
    pub fn conjugator(&self) -> &CMat {
        &self.q
    }

    /// `U = W1 V1`.
    pub fn u(&self) -> CMat {
        &self.w[1] * &self.v[1]
    }

    /// Blocks of `m` relative to the `F` matrix units: `[[F11 m F11, ..]]`
    /// written as `n x n` matrices.
    pub fn f_blocks(&self, m: &CMat) -> [[CMat; 2]; 2] {
        let n = self.half_dim;
        let rotated = &(&linalg::adjoint(&self.q) * m) * &self.q;
        [
            [linalg::block(&rotated, 0, 0, n, n), linalg::block(&rotated, 0, n, n, n)],
            [linalg::block(&rotated, n, 0, n, n), linalg::block(&rotated, n, n, n, n)],
        ]
    }

    /// `(A, B, C)` with `W1 = [[A, B*], [B, C]]` in the `F` units.
    pub fn w1_blocks(&self) -> (CMat, CMat, CMat) {
        let [[a, _], [b, c]] = self.f_blocks(&self.w[1]);
        (a, b, c)
    }

    pub fn metadata(&self) -> ModelMetadata {
        ModelMetadata { seed: self.seed, dim: self.dim(), tag: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub seed: u64,
    pub dim: usize,
    pub tag: Option<OperatorTag>,
}

pub fn realize(tag: OperatorTag, model: &MatrixModel) -> CMat {
    let w1 = model.w(1);
    let e12 = model.e(1, 2);
    let f12 = model.f(1, 2);
    match tag {
        OperatorTag::W1F12 => w1 * f12,
        OperatorTag::E12PlusF12 => linalg::add(e12, f12),
        OperatorTag::E12PlusF12Squared => {
            let s = linalg::add(e12, f12);
            &s * &s
        }
        OperatorTag::W1PlusF12Squared => {
            let s = linalg::add(w1, f12);
            &s * &s
        }
        OperatorTag::W1PlusF12 => linalg::add(w1, f12),
    }
}

/// Residuals of the exact algebraic identities of the model. Every entry
/// should sit at rounding level for every seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// `max_i |W_i^2 - I|, |V_i^2 - I|` for `i = 1, 2, 3`... with `W2^2 = -I`
    /// accounted for.
    pub reflections: f64,
    /// `E11 + E22 = I`, `E12 E21 = E11` and the same for `F`.
    pub matrix_units: f64,
    /// `E12^2 = 0`.
    pub e12_nilpotent: f64,
    /// `(E12 + F12)^2 = E12 F12 + F12 E12`.
    pub nilpotent_sum_square: f64,
    /// `(W1 + F12)^2 = I + W1 F12 + F12 W1`.
    pub reflection_sum_square: f64,
    /// `(U + U*) W1 = W1 (U + U*)` for `U = W1 V1`.
    pub haar_sum_commutator: f64,
    /// `-C B = B A` for the `F`-blocks of `W1`.
    pub block_relation: f64,
    /// `(W1 F12 W1 + F12)^2` is block upper triangular with both diagonal
    /// blocks equal to `B^2`.
    pub nilpotent_triangular: f64,
    /// `(W1 V1 W1 + F12)^2` is block upper triangular with both diagonal
    /// blocks equal to `I + 2 B A`.
    pub reflection_triangular: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [
            self.reflections,
            self.matrix_units,
            self.e12_nilpotent,
            self.nilpotent_sum_square,
            self.reflection_sum_square,
            self.haar_sum_commutator,
            self.block_relation,
            self.nilpotent_triangular,
            self.reflection_triangular,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn identity_residuals(model: &MatrixModel) -> IdentityResiduals {
    let id = linalg::identity(model.dim());
    let n = model.half_dim();
    let id_n = linalg::identity(n);
    let dist = |a: &CMat, b: &CMat| linalg::max_abs(&linalg::sub(a, b));
    let minus_id = linalg::scale(&id, c64::new(-1.0, 0.0));

    let mut reflections = 0.0f64;
    for (i, target) in [(1, &id), (2, &minus_id), (3, &id)] {
        reflections = reflections.max(dist(&(model.w(i) * model.w(i)), target));
        reflections = reflections.max(dist(&(model.v(i) * model.v(i)), target));
    }

    let mut matrix_units = 0.0f64;
    for units in [&model.e, &model.f] {
        matrix_units = matrix_units.max(dist(&linalg::add(&units[0][0], &units[1][1]), &id));
        matrix_units = matrix_units.max(dist(&(&units[0][1] * &units[1][0]), &units[0][0]));
    }

    let e12 = model.e(1, 2);
    let f12 = model.f(1, 2);
    let w1 = model.w(1);
    let v1 = model.v(1);
    let e12_nilpotent = linalg::max_abs(&(e12 * e12));

    let s = linalg::add(e12, f12);
    let nilpotent_sum_square = dist(&(&s * &s), &linalg::add(&(e12 * f12), &(f12 * e12)));

    let t = linalg::add(w1, f12);
    let rhs = linalg::add(&linalg::add(&id, &(w1 * f12)), &(f12 * w1));
    let reflection_sum_square = dist(&(&t * &t), &rhs);

    let u = model.u();
    let sym = linalg::add(&u, &linalg::adjoint(&u));
    let haar_sum_commutator = dist(&(&sym * w1), &(w1 * &sym));

    let (a, b, c) = model.w1_blocks();
    let block_relation = linalg::max_abs(&linalg::add(&(&c * &b), &(&b * &a)));

    let w1f12w1 = &(w1 * f12) * w1;
    let x = linalg::add(&w1f12w1, f12);
    let [[x11, _], [x21, x22]] = model.f_blocks(&(&x * &x));
    let b2 = &b * &b;
    let nilpotent_triangular = linalg::max_abs(&x21).max(dist(&x11, &b2)).max(dist(&x22, &b2));

    let w1v1w1 = &(w1 * v1) * w1;
    let y = linalg::add(&w1v1w1, f12);
    let [[y11, _], [y21, y22]] = model.f_blocks(&(&y * &y));
    let two_ba = linalg::scale(&(&b * &a), c64::new(2.0, 0.0));
    let diag = linalg::add(&id_n, &two_ba);
    let reflection_triangular = linalg::max_abs(&y21).max(dist(&y11, &diag)).max(dist(&y22, &diag));

    IdentityResiduals {
        reflections,
        matrix_units,
        e12_nilpotent,
        nilpotent_sum_square,
        reflection_sum_square,
        haar_sum_commutator,
        block_relation,
        nilpotent_triangular,
        reflection_triangular,
    }
}

/// Eigenvalues of one matrix, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    #[serde(with = "crate::cplx::vec")]
    pub eigenvalues: Vec<c64>,
    pub source: String,
    pub seed: u64,
    pub dim: usize,
}

pub fn spectrum(matrix: &CMat, source: &str, seed: u64) -> Result<SpectrumSample> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
    }
    let eigenvalues = linalg::eigenvalues(matrix)?;
    Ok(SpectrumSample { eigenvalues, source: source.to_string(), seed, dim: matrix.nrows() })
}

/// Default atom-detection threshold: `1e-8 * ||m||`.
pub fn default_zero_threshold(m: &CMat) -> Result<f64> {
    Ok(crate::Tolerances::default().zero_threshold_rel * linalg::spectral_norm(m)?)
}

/// Step CDF of `|lambda - center|`; eigenvalues closer than the threshold
/// count toward the atom at the center.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalRadialCdf {
    pub atom_fraction: f64,
    /// Radii of the non-atom eigenvalues, ascending.
    pub radii: Vec<f64>,
    pub total: usize,
}

impl EmpiricalRadialCdf {
    pub fn eval(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let below = self.radii.partition_point(|&x| x <= r);
        self.atom_fraction + below as f64 / self.total as f64
    }

    /// Corner points `(r, F(r))` of the step function, starting at `(0, F(0))`.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.total as f64;
        let mut out = vec![(0.0, self.atom_fraction)];
        for (i, &r) in self.radii.iter().enumerate() {
            out.push((r, self.atom_fraction + (i + 1) as f64 / n));
        }
        out
    }

    /// KS distance between the radii (atom excluded) and the law's radial
    /// CDF conditioned on missing its center atom.
    pub fn ks_conditional(&self, law: &RadialPlanarMeasure) -> f64 {
        ks_statistic(&self.radii, |r| law.conditional_cdf(r))
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.last().copied().unwrap_or(0.0)
    }
}

pub fn empirical_radial_cdf(sample: &SpectrumSample, center: c64, zero_threshold: f64) -> EmpiricalRadialCdf {
    empirical_radial_cdf_of(sample.eigenvalues.iter().copied(), center, zero_threshold)
}

pub fn empirical_radial_cdf_of(points: impl Iterator<Item = c64>, center: c64, zero_threshold: f64) -> EmpiricalRadialCdf {
    let mut atoms = 0usize;
    let mut radii = Vec::new();
    for z in points {
        let r = (z - center).norm();
        if r < zero_threshold {
            atoms += 1;
        } else {
            radii.push(r);
        }
    }
    radii.sort_by(f64::total_cmp);
    let total = atoms + radii.len();
    EmpiricalRadialCdf { atom_fraction: atoms as f64 / total.max(1) as f64, radii, total }
}

/// Two independent Haar unitaries standing in for the generators `a, b` of
/// a free group.
#[derive(Debug, Clone)]
pub struct FreeGroupModel {
    dim: usize,
    seed: u64,
    ua: CMat,
    ub: CMat,
}

impl FreeGroupModel {
    pub fn new(dim: usize, seed: u64) -> Self {
        let s = SeedStream::new(seed);
        let ua = haar_unitary(dim, &mut s.rng("free_group/a", 0));
        let ub = haar_unitary(dim, &mut s.rng("free_group/b", 0));
        Self { dim, seed, ua, ub }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ua(&self) -> &CMat {
        &self.ua
    }

    pub fn ub(&self) -> &CMat {
        &self.ub
    }
}

/// A source of named generators for [`word_trace`].
pub trait WordAlgebra {
    fn dim(&self) -> usize;
    /// The named generator and whether it is unitary (so negative powers
    /// are allowed).
    fn generator(&self, name: &str) -> Result<(CMat, bool)>;
}

impl WordAlgebra for MatrixModel {
    fn dim(&self) -> usize {
        MatrixModel::dim(self)
    }

    fn generator(&self, name: &str) -> Result<(CMat, bool)> {
        let bytes = name.as_bytes();
        let digit = |b: u8| (b as char).to_digit(10).map(|d| d as usize);
        match bytes {
            [b'W', d] if digit(*d).is_some_and(|d| d < 4) => Ok((self.w[digit(*d).unwrap()].clone(), true)),
            [b'V', d] if digit(*d).is_some_and(|d| d < 4) => Ok((self.v[digit(*d).unwrap()].clone(), true)),
            [k @ (b'E' | b'F'), i, j] => {
                let (i, j) = (digit(*i), digit(*j));
                match (i, j) {
                    (Some(i @ 1..=2), Some(j @ 1..=2)) => {
                        let m = if *k == b'E' { self.e(i, j) } else { self.f(i, j) };
                        Ok((m.clone(), false))
                    }
                    _ => Err(Error::WordSyntax(format!("unknown generator `{name}`"))),
                }
            }
            b"U" => Ok((self.u(), true)),
            _ => Err(Error::WordSyntax(format!("unknown generator `{name}`"))),
        }
    }
}

impl WordAlgebra for FreeGroupModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn generator(&self, name: &str) -> Result<(CMat, bool)> {
        match name {
            "Ua" => Ok((self.ua.clone(), true)),
            "Ub" => Ok((self.ub.clone(), true)),
            "I" => Ok((linalg::identity(self.dim), true)),
            _ => Err(Error::WordSyntax(format!("unknown generator `{name}`"))),
        }
    }
}

/// One factor of a word: `NAME`, `NAME*`, `NAME^k`, optionally wrapped in
/// `c(...)` to subtract its normalized trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordFactor {
    pub name: String,
    pub adjoint: bool,
    pub power: i32,
    pub centered: bool,
}

/// Parses a word such as `"c(W1) c(V1) W1^2 Ub*^-3"`.
///
/// ```text
/// word   := factor (' ' factor)*
/// factor := 'c(' atom ')' | atom
/// atom   := NAME ['*'] ['^' ['-'] DIGITS]
/// ```
pub fn parse_word(spec: &str) -> Result<Vec<WordFactor>> {
    let mut out = Vec::new();
    for token in spec.split_whitespace() {
        let (inner, centered) = match token.strip_prefix("c(") {
            Some(rest) => (
                rest.strip_suffix(')').ok_or_else(|| Error::WordSyntax(format!("unclosed `c(` in `{token}`")))?,
                true,
            ),
            None => (token, false),
        };
        let (head, power) = match inner.split_once('^') {
            Some((h, p)) => (
                h,
                p.parse::<i32>().map_err(|_| Error::WordSyntax(format!("bad exponent in `{token}`")))?,
            ),
            None => (inner, 1),
        };
        let (name, adjoint) = match head.strip_suffix('*') {
            Some(n) => (n, true),
            None => (head, false),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(Error::WordSyntax(format!("bad generator name in `{token}`")));
        }
        out.push(WordFactor { name: name.to_string(), adjoint, power, centered });
    }
    if out.is_empty() {
        return Err(Error::WordSyntax("empty word".into()));
    }
    Ok(out)
}

fn factor_matrix<A: WordAlgebra + ?Sized>(alg: &A, f: &WordFactor) -> Result<CMat> {
    let (mut g, unitary) = alg.generator(&f.name)?;
    if f.adjoint {
        g = linalg::adjoint(&g);
    }
    let mut m = if f.power < 0 {
        if !unitary {
            return Err(Error::WordSyntax(format!("negative power of non-unitary `{}`", f.name)));
        }
        linalg::pow(&linalg::adjoint(&g), f.power.unsigned_abs())
    } else {
        linalg::pow(&g, f.power as u32)
    };
    if f.centered {
        let t = linalg::normalized_trace(&m);
        m = linalg::shift(&m, -t);
    }
    Ok(m)
}

/// Normalized trace of the product described by `spec`.
pub fn word_trace<A: WordAlgebra + ?Sized>(alg: &A, spec: &str) -> Result<c64> {
    let factors = parse_word(spec)?;
    let mut prod: Option<CMat> = None;
    for f in &factors {
        let m = factor_matrix(alg, f)?;
        prod = Some(match prod {
            None => m,
            Some(p) => &p * &m,
        });
    }
    Ok(linalg::normalized_trace(&prod.expect("non-empty word")))
}

/// Finite Laurent polynomial `sum_k c_k U^k` in a unitary.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, c64>,
}

impl LaurentPoly {
    pub fn new(terms: &[(i32, c64)]) -> Self {
        let mut coeffs = BTreeMap::new();
        for &(k, c) in terms {
            *coeffs.entry(k).or_insert(c64::new(0.0, 0.0)) += c;
        }
        Self { coeffs }
    }

    pub fn real(terms: &[(i32, f64)]) -> Self {
        Self::new(&terms.iter().map(|&(k, c)| (k, c64::new(c, 0.0))).collect::<Vec<_>>())
    }

    pub fn one() -> Self {
        Self::real(&[(0, 1.0)])
    }

    pub fn monomial(k: i32) -> Self {
        Self::real(&[(k, 1.0)])
    }

    pub fn constant_term(&self) -> c64 {
        self.coeffs.get(&0).copied().unwrap_or(c64::new(0.0, 0.0))
    }

    /// `tau(p^* q)` for a Haar unitary: `sum_k conj(p_k) q_k`.
    pub fn haar_inner(&self, other: &LaurentPoly) -> c64 {
        self.coeffs
            .iter()
            .filter_map(|(k, p)| other.coeffs.get(k).map(|q| p.conj() * q))
            .fold(c64::new(0.0, 0.0), |a, b| a + b)
    }

    pub fn eval(&self, u: &CMat) -> CMat {
        let n = u.nrows();
        let uh = linalg::adjoint(u);
        let mut out = linalg::zeros(n, n);
        for (&k, &c) in &self.coeffs {
            let p = if k >= 0 { linalg::pow(u, k as u32) } else { linalg::pow(&uh, k.unsigned_abs()) };
            out = linalg::add(&out, &linalg::scale(&p, c));
        }
        out
    }
}

/// How the middle factor `Z` is centered before testing the trace
/// factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Centering {
    /// Use `Z` as given; its Haar trace is zero because the constant term
    /// vanishes.
    Haar,
    /// Subtract the normalized matrix trace as well.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceFactorization {
    #[serde(with = "crate::cplx")]
    pub lhs: c64,
    #[serde(with = "crate::cplx")]
    pub rhs: c64,
    pub gap: f64,
}

/// Compares `tau((A Z B)^* (C Z D))` in the matrix model with the product
/// `tau(A^*C) tau(B^*D) tau(Z^*Z)` evaluated with exact Haar moments.
/// `A..D` are polynomials in `U_b`, `Z` in `U_a`.
pub fn trace_factorization(
    model: &FreeGroupModel,
    [a, b, c, d]: [&LaurentPoly; 4],
    z: &LaurentPoly,
    centering: Centering,
) -> Result<TraceFactorization> {
    if z.constant_term().norm() != 0.0 {
        return Err(Error::Precondition("Z must have zero constant term".into()));
    }
    let ub = model.ub();
    let (am, bm, cm, dm) = (a.eval(ub), b.eval(ub), c.eval(ub), d.eval(ub));
    let mut zm = z.eval(model.ua());
    if centering == Centering::Empirical {
        let t = linalg::normalized_trace(&zm);
        zm = linalg::shift(&zm, -t);
    }
    let left = &(&am * &zm) * &bm;
    let right = &(&cm * &zm) * &dm;
    let lhs = linalg::trace_of_product(&linalg::adjoint(&left), &right) / model.dim() as f64;
    let rhs = a.haar_inner(c) * b.haar_inner(d) * z.haar_inner(z);
    Ok(TraceFactorization { lhs, rhs, gap: (lhs - rhs).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_dim_one_is_a_phase() {
        let u = haar_unitary(1, &mut SeedStream::new(3).rng("t", 0));
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn haar_is_unitary() {
        let u = haar_unitary(64, &mut SeedStream::new(1).rng("t", 0));
        let d = linalg::sub(&(&linalg::adjoint(&u) * &u), &linalg::identity(64));
        assert!(linalg::max_abs(&d) < 1e-12);
    }

    #[test]
    fn model_is_deterministic() {
        let a = build_m2_free_m2(4, 11);
        let b = build_m2_free_m2(4, 11);
        assert_eq!(linalg::vec_of(a.v(1)), linalg::vec_of(b.v(1)));
        let c = build_m2_free_m2(4, 12);
        assert_ne!(linalg::vec_of(a.v(1)), linalg::vec_of(c.v(1)));
    }

    #[test]
    fn model_identities_hold() {
        let m = build_m2_free_m2(8, 5);
        let r = identity_residuals(&m);
        assert!(r.max() < 1e-10, "{r:?}");
        assert_eq!(linalg::max_abs(&(m.e(1, 2) * m.e(1, 2))), 0.0);
        for g in [m.w(1), m.v(1), m.e(1, 2), m.f(1, 2)] {
            assert!(linalg::normalized_trace(g).norm() < 1e-10);
        }
        assert_eq!(linalg::normalized_trace(m.w(1)).norm(), 0.0);
    }

    #[test]
    fn w1f12_small_has_half_rank() {
        let m = build_m2_free_m2(2, 2);
        let t = realize(OperatorTag::W1F12, &m);
        let sv = linalg::singular_values(&t).unwrap();
        assert_eq!(sv.len(), 4);
        assert_eq!(sv.iter().filter(|&&s| s > 1e-12).count(), 2);
    }

    #[test]
    fn spectra_of_simple_matrices() {
        let jordan = linalg::from_real(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let s = spectrum(&jordan, "jordan", 0).unwrap();
        assert!(s.eigenvalues.iter().all(|z| z.norm() < 1e-12));
        let d = linalg::diag(&[1.0, 2.0, 3.0].map(|x| c64::new(x, 0.0)));
        let mut ev: Vec<f64> = spectrum(&d, "diag", 0).unwrap().eigenvalues.iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert_eq!(ev, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn empirical_cdf_with_atom() {
        let sample = SpectrumSample {
            eigenvalues: vec![c64::new(0.0, 0.0), c64::new(0.0, 0.0), c64::new(1.0, 0.0)],
            source: "t".into(),
            seed: 0,
            dim: 3,
        };
        let e = empirical_radial_cdf(&sample, c64::new(0.0, 0.0), 1e-8);
        assert!((e.eval(0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.eval(1.0), 1.0);
    }

    #[test]
    fn word_parsing() {
        let w = parse_word("c(W1) V2*^-3 Ua").unwrap();
        assert_eq!(w.len(), 3);
        assert!(w[0].centered && !w[0].adjoint && w[0].power == 1);
        assert!(w[1].adjoint && w[1].power == -3);
        assert!(parse_word("c(W1").is_err());
        assert!(parse_word("W1^x").is_err());
        assert!(parse_word("").is_err());
    }

    #[test]
    fn word_traces_exact_cases() {
        let m = build_m2_free_m2(4, 9);
        assert_eq!(word_trace(&m, "c(W1)").unwrap().norm(), 0.0);
        assert!(word_trace(&m, "W1 W1").unwrap().re - 1.0 < 1e-15);
        assert!(matches!(word_trace(&m, "E12^-1"), Err(Error::WordSyntax(_))));
        assert!(matches!(word_trace(&m, "X9"), Err(Error::WordSyntax(_))));
    }

    #[test]
    fn trace_factorization_trivial_case() {
        let fg = FreeGroupModel::new(16, 4);
        let one = LaurentPoly::one();
        let r = trace_factorization(&fg, [&one, &one, &one, &one], &LaurentPoly::monomial(1), Centering::Haar).unwrap();
        assert!((r.lhs.re - 1.0).abs() < 1e-12 && r.lhs.im.abs() < 1e-12);
        assert_eq!(r.rhs, c64::new(1.0, 0.0));
        assert!(trace_factorization(&fg, [&one, &one, &one, &one], &one, Centering::Haar).is_err());
    }
}
