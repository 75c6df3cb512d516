//! Brown measure straight from the definition: the regularized
//! log-determinant `L(z) = ln Delta_eps(T - z)` on a grid and its
//! five-point Laplacian, reported as cell masses.

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub epsilon: f64,
}

impl GridSpec {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize, epsilon: f64) -> Result<Self> {
        let g = Self { x_min: x.0, x_max: x.1, y_min: y.0, y_max: y.1, nx, ny, epsilon };
        g.validate()?;
        Ok(g)
    }

    /// `n x n` nodes on `[-h, h]^2` around `center`.
    pub fn square(center: c64, half_width: f64, n: usize, epsilon: f64) -> Result<Self> {
        Self::new(
            (center.re - half_width, center.re + half_width),
            (center.im - half_width, center.im + half_width),
            n,
            n,
            epsilon,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max, self.epsilon].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidGrid("non-finite bound or epsilon".into()));
        }
        if self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::InvalidGrid(format!(
                "empty box [{}, {}] x [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        if self.nx < 3 || self.ny < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3x3 nodes, got {}x{}", self.nx, self.ny)));
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidGrid(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy()
    }

    pub fn node(&self, i: usize, j: usize) -> c64 {
        c64::new(self.x(i), self.y(j))
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `epsilon = 1e-6 * ||T||^2`, the default regularization.
pub fn default_epsilon(t: &CMat) -> Result<f64> {
    let n = linalg::spectral_norm(t)?;
    Ok(crate::Tolerances::default().epsilon_rel * n * n)
}

/// `exp((1/2N) sum ln(sigma_i^2 + eps))`.
pub fn fk_determinant(t: &CMat, epsilon: f64) -> Result<f64> {
    Ok(log_fk(t, epsilon)?.exp())
}

/// Logarithm of [`fk_determinant`]; `-inf` for singular `T` at `eps = 0`.
pub fn log_fk(t: &CMat, epsilon: f64) -> Result<f64> {
    if t.nrows() != t.ncols() {
        return Err(Error::DimensionMismatch { expected: t.nrows(), found: t.ncols() });
    }
    let sv = linalg::singular_values(t)?;
    Ok(log_sum(sv.iter().map(|s| s * s), epsilon, t.nrows()))
}

fn log_sum(squares: impl Iterator<Item = f64>, epsilon: f64, n: usize) -> f64 {
    let mut acc = 0.0;
    for s2 in squares {
        acc += (s2 + epsilon).ln();
    }
    acc / (2 * n) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogDetPath {
    /// One eigensolve, then `(1/2N) sum ln(|lambda_k - z|^2 + eps)`.
    /// Exact at `eps = 0`; for `eps > 0` it regularizes the eigenvalue
    /// counting measure rather than the singular values.
    Schur,
    /// Singular values of `T - z` at every node.
    Svd,
}

impl LogDetPath {
    /// Schur for `eps = 0`, SVD otherwise.
    pub fn auto(epsilon: f64) -> Self {
        if epsilon == 0.0 {
            Self::Schur
        } else {
            Self::Svd
        }
    }
}

impl std::str::FromStr for LogDetPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "schur" => Ok(Self::Schur),
            "svd" => Ok(Self::Svd),
            _ => Err(Error::Parse(format!("unknown path `{s}` (expected schur or svd)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FieldOptions {
    pub path: Option<LogDetPath>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

/// The log-determinant field and, once [`brown_laplacian`] has run, its
/// cell masses. Arrays are indexed `[i * ny + j]` with `i` along x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownField {
    pub grid: GridSpec,
    pub path: LogDetPath,
    pub values: Vec<f64>,
    /// `(nx-2) x (ny-2)` interior cell masses.
    pub laplacian_mass: Option<Vec<f64>>,
    /// Nodes that hit the spectrum and were moved by half a cell.
    pub jittered: Vec<(usize, usize)>,
    /// Nodes whose value is still `-inf` after jittering.
    pub sentinels: Vec<(usize, usize)>,
    /// Magnitude below which negative cell masses are rounding noise.
    pub noise_floor: f64,
}

impl BrownField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.ny + j]
    }

    pub fn mass(&self, i: usize, j: usize) -> Option<f64> {
        let m = self.laplacian_mass.as_ref()?;
        if i == 0 || j == 0 || i + 1 >= self.grid.nx || j + 1 >= self.grid.ny {
            return None;
        }
        Some(m[(i - 1) * (self.grid.ny - 2) + (j - 1)])
    }

    /// `(node, mass)` for every interior node.
    pub fn cells(&self) -> impl Iterator<Item = (c64, f64)> + '_ {
        let g = self.grid;
        (1..g.nx - 1).flat_map(move |i| (1..g.ny - 1).filter_map(move |j| Some((g.node(i, j), self.mass(i, j)?))))
    }

    pub fn total_mass(&self) -> f64 {
        self.cells().map(|(_, m)| m).sum()
    }

    pub fn mass_where(&self, pred: impl Fn(c64) -> bool) -> f64 {
        self.cells().filter(|(z, _)| pred(*z)).map(|(_, m)| m).sum()
    }

    pub fn mass_in_disc(&self, center: c64, radius: f64) -> f64 {
        self.mass_where(|z| (z - center).norm() <= radius)
    }

    /// Masses of the open quadrants around `center`, counter-clockwise from
    /// `re > 0, im > 0`.
    pub fn quadrant_masses(&self, center: c64) -> [f64; 4] {
        let mut q = [0.0; 4];
        for (z, m) in self.cells() {
            let d = z - center;
            let k = match (d.re > 0.0, d.im > 0.0) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            };
            q[k] += m;
        }
        q
    }

    pub fn min_mass(&self) -> f64 {
        self.cells().map(|(_, m)| m).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(feature = "parallel")]
fn map_nodes<F>(n: usize, threads: Option<usize>, f: F) -> Result<Vec<Result<f64>>>
where
    F: Fn(usize) -> Result<f64> + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..n).into_par_iter().map(&f).collect::<Vec<_>>();
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_nodes<F>(n: usize, _threads: Option<usize>, f: F) -> Result<Vec<Result<f64>>>
where
    F: Fn(usize) -> Result<f64>,
{
    Ok((0..n).map(f).collect())
}

pub fn logdet_field(t: &CMat, grid: &GridSpec) -> Result<BrownField> {
    logdet_field_with(t, grid, FieldOptions::default())
}

/// Fills the field at every node. Nodes are independent and each value is
/// summed in a fixed order, so the result does not depend on the thread
/// count.
pub fn logdet_field_with(t: &CMat, grid: &GridSpec, opts: FieldOptions) -> Result<BrownField> {
    grid.validate()?;
    if t.nrows() != t.ncols() {
        return Err(Error::DimensionMismatch { expected: t.nrows(), found: t.ncols() });
    }
    let path = opts.path.unwrap_or(LogDetPath::auto(grid.epsilon));
    let n = t.nrows();
    let eps = grid.epsilon;
    let eigen = match path {
        LogDetPath::Schur => Some(linalg::eigenvalues(t)?),
        LogDetPath::Svd => None,
    };
    let eval = |z: c64| -> Result<f64> {
        match &eigen {
            Some(ev) => Ok(log_sum(ev.iter().map(|l| (l - z).norm_sqr()), eps, n)),
            None => log_fk(&linalg::shift(t, -z), eps),
        }
    };
    let half = c64::new(grid.dx() / 2.0, grid.dy() / 2.0);
    let ny = grid.ny;
    let raw = map_nodes(grid.len(), opts.threads, |k| eval(grid.node(k / ny, k % ny)))?;
    let mut values = Vec::with_capacity(raw.len());
    let mut jittered = Vec::new();
    let mut sentinels = Vec::new();
    for (k, v) in raw.into_iter().enumerate() {
        let mut v = v?;
        if v == f64::NEG_INFINITY {
            let (i, j) = (k / ny, k % ny);
            jittered.push((i, j));
            v = eval(grid.node(i, j) + half)?;
            if v == f64::NEG_INFINITY {
                sentinels.push((i, j));
            }
        }
        values.push(v);
    }
    let scale = linalg::spectral_norm(t)?;
    let noise_floor = noise_floor(grid, &values, scale, path);
    Ok(BrownField { grid: *grid, path, values, laplacian_mass: None, jittered, sentinels, noise_floor })
}

/// Rounding bound for one five-point cell mass: node values carry an error
/// of a few ulps of their size plus the singular-value perturbation
/// `u ||T|| / sqrt(eps)`.
fn noise_floor(grid: &GridSpec, values: &[f64], scale: f64, path: LogDetPath) -> f64 {
    let u = f64::EPSILON;
    let vmax = values.iter().filter(|v| v.is_finite()).fold(0.0f64, |a, v| a.max(v.abs()));
    let sv_term = match path {
        LogDetPath::Svd if grid.epsilon > 0.0 => scale / grid.epsilon.sqrt(),
        _ => 0.0,
    };
    let (dx, dy) = (grid.dx(), grid.dy());
    64.0 * u * (vmax + sv_term + 1.0) * (dx / dy + dy / dx) / (2.0 * std::f64::consts::PI)
}

/// Cell masses `(1/2pi) * lap(L) * dx * dy` at interior nodes.
pub fn brown_laplacian(field: BrownField) -> Result<BrownField> {
    let g = field.grid;
    let bad: Vec<(usize, usize)> = field
        .sentinels
        .iter()
        .copied()
        .filter(|&(i, j)| {
            // a sentinel contaminates every stencil it belongs to
            let interior = |a: usize, n: usize| a >= 1 && a + 1 < n;
            (i.saturating_sub(1)..=(i + 1).min(g.nx - 1)).any(|a| interior(a, g.nx) && interior(j, g.ny))
                || (j.saturating_sub(1)..=(j + 1).min(g.ny - 1)).any(|b| interior(i, g.nx) && interior(b, g.ny))
        })
        .collect();
    if !bad.is_empty() {
        return Err(Error::Sentinel { nodes: bad });
    }
    let (dx, dy) = (g.dx(), g.dy());
    let f = |i: usize, j: usize| field.values[i * g.ny + j];
    let mut mass = Vec::with_capacity((g.nx - 2) * (g.ny - 2));
    for i in 1..g.nx - 1 {
        for j in 1..g.ny - 1 {
            let c = f(i, j);
            let lxx = (f(i + 1, j) - 2.0 * c + f(i - 1, j)) / (dx * dx);
            let lyy = (f(i, j + 1) - 2.0 * c + f(i, j - 1)) / (dy * dy);
            mass.push((lxx + lyy) * dx * dy / (2.0 * std::f64::consts::PI));
        }
    }
    Ok(BrownField { laplacian_mass: Some(mass), ..field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian, SeedStream};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn determinant_examples() {
        assert!((fk_determinant(&linalg::identity(3), 0.0).unwrap() - 1.0).abs() < 1e-14);
        let d = linalg::diag(&[c(1.0, 0.0), c(4.0, 0.0)]);
        assert!((fk_determinant(&d, 0.0).unwrap() - 2.0).abs() < 1e-14);
        let nil = linalg::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(fk_determinant(&nil, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn field_node_examples() {
        let g = GridSpec::new((1.0, 3.0), (-1.0, 1.0), 3, 3, 0.0).unwrap();
        let f = logdet_field(&linalg::zeros(1, 1), &g).unwrap();
        assert!((f.value(1, 1) - 2f64.ln()).abs() < 1e-15);

        let g = GridSpec::new((-2.0, 0.0), (-1.0, 1.0), 3, 3, 0.0).unwrap();
        let t = linalg::diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
        for path in [LogDetPath::Schur, LogDetPath::Svd] {
            let f = logdet_field_with(&t, &g, FieldOptions { path: Some(path), threads: None }).unwrap();
            assert!((f.value(1, 1) - 0.5 * 2f64.ln()).abs() < 1e-14, "{path:?}");
        }
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new((1.0, 0.0), (0.0, 1.0), 3, 3, 0.0).is_err());
        assert!(GridSpec::new((0.0, 1.0), (0.0, 1.0), 2, 3, 0.0).is_err());
        assert!(GridSpec::new((0.0, 1.0), (0.0, 1.0), 3, 3, -1.0).is_err());
    }

    #[test]
    fn coincident_node_is_jittered() {
        let t = linalg::zeros(2, 2);
        let g = GridSpec::square(c(0.0, 0.0), 1.0, 3, 0.0).unwrap();
        let f = logdet_field_with(&t, &g, FieldOptions { path: Some(LogDetPath::Schur), threads: None }).unwrap();
        assert_eq!(f.jittered, vec![(1, 1)]);
        assert!(f.sentinels.is_empty());
        assert!(f.value(1, 1).is_finite());
    }

    #[test]
    fn sentinel_contamination_is_reported() {
        let g = GridSpec::square(c(0.0, 0.0), 1.0, 3, 0.0).unwrap();
        let field = BrownField {
            grid: g,
            path: LogDetPath::Schur,
            values: vec![0.0; 9],
            laplacian_mass: None,
            jittered: vec![],
            sentinels: vec![(1, 1)],
            noise_floor: 0.0,
        };
        assert!(matches!(brown_laplacian(field), Err(Error::Sentinel { .. })));
    }

    #[test]
    fn normal_matrix_mass_splits() {
        let t = linalg::diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let g = GridSpec::new((-0.49, 1.49), (-0.99, 0.99), 100, 100, 1e-9).unwrap();
        let f = brown_laplacian(logdet_field_with(&t, &g, FieldOptions { path: Some(LogDetPath::Schur), threads: None }).unwrap()).unwrap();
        assert!((f.total_mass() - 1.0).abs() < 0.02, "{}", f.total_mass());
        let left = f.mass_where(|z| z.re < 0.5);
        assert!((left - 0.5).abs() < 0.02, "{left}");
    }

    #[test]
    fn thread_count_does_not_change_values() {
        let mut rng = SeedStream::new(1).rng("t", 0);
        let mut t = linalg::zeros(6, 6);
        for j in 0..6 {
            for i in 0..6 {
                t[(i, j)] = complex_gaussian(&mut rng);
            }
        }
        let g = GridSpec::square(c(0.0, 0.0), 2.0, 8, 1e-3).unwrap();
        let a = logdet_field_with(&t, &g, FieldOptions { path: Some(LogDetPath::Svd), threads: Some(1) }).unwrap();
        let b = logdet_field_with(&t, &g, FieldOptions { path: Some(LogDetPath::Svd), threads: Some(3) }).unwrap();
        assert_eq!(a.values, b.values);
    }

    fn random(seed: u64, n: usize) -> CMat {
        let mut rng = SeedStream::new(seed).rng("m", 0);
        let mut t = linalg::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                t[(i, j)] = complex_gaussian(&mut rng);
            }
        }
        t
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn determinant_is_unitarily_invariant(seed in 0u64..1000) {
            let t = random(seed, 5);
            let u = crate::matmodel::haar_unitary(5, &mut SeedStream::new(seed).rng("u", 0));
            let a = fk_determinant(&(&u * &t), 0.0).unwrap();
            let b = fk_determinant(&t, 0.0).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }

        #[test]
        fn determinant_is_multiplicative(seed in 0u64..1000) {
            let a = linalg::shift(&random(seed, 5), c64::new(4.0, 0.0));
            let b = linalg::shift(&random(seed + 7, 5), c64::new(0.0, 4.0));
            let lhs = fk_determinant(&(&a * &b), 0.0).unwrap();
            let rhs = fk_determinant(&a, 0.0).unwrap() * fk_determinant(&b, 0.0).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
        }
    }
}
