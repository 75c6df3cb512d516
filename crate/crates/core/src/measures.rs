//! Probability measures on `[0, inf)` and their multiplicative free
//! transforms.
//!
//! Conventions:
//!
//! ```text
//! psi(z) = integral t z / (1 - t z) dmu(t)
//! chi    = psi^{-1}   (principal branch, z < 1 / max_support)
//! S(w)   = chi(w) (1 + w) / w
//! ```
//!
//! With these, `S` of the Bernoulli law `(1/2)delta_0 + (1/2)delta_1` is
//! `2(w + 1) / (2w + 1)`.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// A compactly supported probability measure on `[0, inf)`: finitely many
/// atoms plus an optional piecewise-linear density.
///
/// Values are immutable once built; atoms are kept sorted with duplicate
/// locations merged, so two measures built from permuted atom lists compare
/// equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct ScalarMeasure {
    atoms: Vec<(f64, f64)>,
    density: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<[f64; 2]>,
    #[serde(default)]
    density: Vec<[f64; 2]>,
}

impl TryFrom<MeasureRepr> for ScalarMeasure {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        ScalarMeasure::new(
            r.atoms.into_iter().map(|[a, b]| (a, b)).collect(),
            r.density.into_iter().map(|[a, b]| (a, b)).collect(),
        )
    }
}

impl From<ScalarMeasure> for MeasureRepr {
    fn from(m: ScalarMeasure) -> Self {
        MeasureRepr {
            atoms: m.atoms.iter().map(|&(a, b)| [a, b]).collect(),
            density: m.density.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

/// Which inverse of psi produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// psi is globally injective (single atom), nothing to choose.
    Unique,
    /// The branch through the origin, on `z < 1 / max_support`.
    Principal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSample {
    pub argument: f64,
    pub value: f64,
    pub branch: Branch,
}

/// How to invert psi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Inversion {
    /// Closed form for purely atomic measures with at most two atoms,
    /// bracketing otherwise.
    #[default]
    Auto,
    /// Always bracket + Newton.
    Numeric,
}

impl ScalarMeasure {
    pub fn new(atoms: Vec<(f64, f64)>, density: Vec<(f64, f64)>) -> Result<Self> {
        Self::with_tolerance(atoms, density, Tolerances::default().mass)
    }

    pub fn with_tolerance(mut atoms: Vec<(f64, f64)>, density: Vec<(f64, f64)>, mass_tol: f64) -> Result<Self> {
        for &(loc, mass) in &atoms {
            if !(loc.is_finite() && loc >= 0.0) {
                return Err(Error::InvalidMeasure(format!("atom location {loc} is not a finite nonnegative real")));
            }
            if !(mass > 0.0 && mass <= 1.0) {
                return Err(Error::InvalidMeasure(format!("atom mass {mass} is not in (0, 1]")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (loc, mass) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == loc => last.1 += mass,
                _ => merged.push((loc, mass)),
            }
        }
        for w in density.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidMeasure("density abscissae must be strictly increasing".into()));
            }
        }
        for &(x, f) in &density {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidMeasure(format!("density abscissa {x} is not a finite nonnegative real")));
            }
            if !(f.is_finite() && f >= 0.0) {
                return Err(Error::InvalidMeasure(format!("density value {f} is negative or not finite")));
            }
        }
        if density.len() == 1 {
            return Err(Error::InvalidMeasure("a density needs at least two samples".into()));
        }
        let m = Self { atoms: merged, density };
        let total = m.atom_mass() + m.continuous_mass();
        if (total - 1.0).abs() > mass_tol {
            return Err(Error::InvalidMeasure(format!("total mass {total} differs from 1")));
        }
        Ok(m)
    }

    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(atoms.to_vec(), Vec::new())
    }

    /// `delta_c`.
    pub fn dirac(c: f64) -> Result<Self> {
        Self::from_atoms(&[(c, 1.0)])
    }

    /// `alpha delta_a + (1 - alpha) delta_0`.
    pub fn bernoulli(alpha: f64, a: f64) -> Result<Self> {
        if alpha == 1.0 {
            return Self::dirac(a);
        }
        Self::from_atoms(&[(0.0, 1.0 - alpha), (a, alpha)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> &[(f64, f64)] {
        &self.density
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn continuous_mass(&self) -> f64 {
        self.integrate_density(|_| 1.0)
    }

    /// `mu({0})`.
    pub fn mass_at_zero(&self) -> f64 {
        self.atoms.first().filter(|a| a.0 == 0.0).map_or(0.0, |a| a.1)
    }

    pub fn max_support(&self) -> f64 {
        let a = self.atoms.last().map_or(0.0, |a| a.0);
        let d = self.density.iter().rev().find(|p| p.1 > 0.0).map_or(0.0, |p| p.0);
        a.max(d)
    }

    pub fn is_dirac(&self) -> bool {
        self.atoms.len() == 1 && self.density.is_empty()
    }

    fn is_small_atomic(&self) -> bool {
        self.density.is_empty() && self.atoms.len() <= 2
    }

    /// Trapezoidal integral of `g(x) f(x)` over the density part.
    fn integrate_density(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.density
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (g(w[0].0) * w[0].1 + g(w[1].0) * w[1].1))
            .sum()
    }

    /// `integral t^k dmu(t)`; exactly 1 for `k = 0`.
    pub fn moment(&self, k: u32) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let atomic: f64 = self.atoms.iter().map(|&(t, m)| m * t.powi(k as i32)).sum();
        atomic + self.integrate_density(|x| x.powi(k as i32))
    }

    /// `integral t^-k dmu(t)`, infinite when there is mass at 0.
    pub fn inverse_moment(&self, k: u32) -> f64 {
        if self.mass_at_zero() > 0.0 || self.density.first().is_some_and(|p| p.0 == 0.0 && p.1 > 0.0) {
            return f64::INFINITY;
        }
        let atomic: f64 = self.atoms.iter().map(|&(t, m)| m * t.powi(-(k as i32))).sum();
        atomic + self.integrate_density(|x| x.powi(-(k as i32)))
    }

    /// Image measure under `t -> t^2`, i.e. the law of `H^2` given the law
    /// of `H`. The continuous part is resampled on the squared grid and
    /// renormalized to its original mass.
    pub fn squared(&self) -> Result<Self> {
        let atoms: Vec<(f64, f64)> = self.atoms.iter().map(|&(t, m)| (t * t, m)).collect();
        if self.density.is_empty() {
            return Self::with_tolerance(atoms, Vec::new(), 1e-12);
        }
        let mut density = Vec::with_capacity(self.density.len());
        for &(x, f) in &self.density {
            if x == 0.0 {
                if f > 0.0 {
                    return Err(Error::InvalidMeasure("density of H must vanish at 0 to push forward under t^2".into()));
                }
                density.push((0.0, 0.0));
            } else {
                density.push((x * x, f / (2.0 * x)));
            }
        }
        let target = self.continuous_mass();
        let probe = Self { atoms: Vec::new(), density: density.clone() };
        let got = probe.continuous_mass();
        if got > 0.0 {
            for p in &mut density {
                p.1 *= target / got;
            }
        }
        Self::with_tolerance(atoms, density, 1e-9)
    }

    /// `psi(z) = integral t z / (1 - t z) dmu(t)`.
    pub fn psi(&self, z: f64) -> Result<f64> {
        let mut acc = 0.0;
        for &(t, m) in &self.atoms {
            let den = 1.0 - t * z;
            if den == 0.0 {
                return Err(Error::Pole { z, atom: t });
            }
            acc += m * t * z / den;
        }
        if !self.density.is_empty() {
            let top = self.max_support();
            if z * top >= 1.0 {
                return Err(Error::Domain {
                    what: "z",
                    value: z,
                    domain: format!("(-inf, {}) for a measure with continuous part", 1.0 / top),
                });
            }
            acc += self.integrate_density(|x| x * z / (1.0 - x * z));
        }
        Ok(acc)
    }

    /// `psi'(z) = integral t / (1 - t z)^2 dmu(t)`.
    pub fn psi_derivative(&self, z: f64) -> f64 {
        let atomic: f64 = self.atoms.iter().map(|&(t, m)| m * t / (1.0 - t * z).powi(2)).sum();
        atomic + self.integrate_density(|x| x / (1.0 - x * z).powi(2))
    }

    /// Infimum of psi over the principal branch, `mu({0}) - 1`.
    pub fn psi_lower_limit(&self) -> f64 {
        self.mass_at_zero() - 1.0
    }

    pub fn chi_inverse(&self, y: f64) -> Result<f64> {
        self.chi_inverse_with(y, Inversion::Auto, &Tolerances::default())
    }

    pub fn chi_sample(&self, y: f64) -> Result<TransformSample> {
        let value = self.chi_inverse(y)?;
        let branch = if self.is_dirac() { Branch::Unique } else { Branch::Principal };
        Ok(TransformSample { argument: y, value, branch })
    }

    /// Solves `psi(z) = y` for `z` on the principal branch.
    pub fn chi_inverse_with(&self, y: f64, method: Inversion, tol: &Tolerances) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::Domain { what: "y", value: y, domain: "finite reals".into() });
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let top = self.max_support();
        if top == 0.0 {
            return Err(Error::OutOfRange { what: "y", value: y, lo: 0.0, hi: 0.0 });
        }
        let lower = self.psi_lower_limit();
        if y <= lower {
            return Err(Error::OutOfRange { what: "y", value: y, lo: lower, hi: f64::INFINITY });
        }
        if method == Inversion::Auto && self.is_small_atomic() {
            if let Some(z) = self.chi_closed_form(y) {
                return Ok(z);
            }
        }
        self.chi_bracketed(y, top, tol)
    }

    /// Root of the at-most-quadratic equation `psi(z) = y` on the principal
    /// branch. Returns `None` when no root lies there.
    fn chi_closed_form(&self, y: f64) -> Option<f64> {
        let top = self.max_support();
        let in_domain = |z: f64| z.is_finite() && z * top < 1.0;
        match self.atoms.as_slice() {
            [(a, _)] => {
                // a z / (1 - a z) = y
                let z = y / (a * (1.0 + y));
                in_domain(z).then_some(z)
            }
            [(a, p), (b, q)] => {
                // a b (1 + y) z^2 - (p a + q b + y (a + b)) z + y = 0
                let qa = a * b * (1.0 + y);
                let qb = -(p * a + q * b + y * (a + b));
                let qc = y;
                let roots: Vec<f64> = if qa == 0.0 {
                    vec![-qc / qb]
                } else {
                    let disc = qb * qb - 4.0 * qa * qc;
                    if disc < 0.0 {
                        return None;
                    }
                    let s = disc.sqrt();
                    let t = -0.5 * (qb + qb.signum() * s);
                    vec![t / qa, qc / t]
                };
                roots
                    .into_iter()
                    .filter(|&z| in_domain(z))
                    .filter_map(|z| self.psi(z).ok().map(|v| (z, (v - y).abs())))
                    .min_by(|u, v| u.1.total_cmp(&v.1))
                    .filter(|&(_, r)| r <= 1e-9 * (1.0 + y.abs()))
                    .map(|(z, _)| z)
            }
            _ => None,
        }
    }

    fn chi_bracketed(&self, y: f64, top: f64, tol: &Tolerances) -> Result<f64> {
        let (mut lo, mut hi) = if y > 0.0 {
            let hi = (1.0 - tol.bracket_margin) / top;
            let at_hi = self.psi(hi)?;
            if at_hi < y {
                return Err(Error::OutOfRange { what: "y", value: y, lo: self.psi_lower_limit(), hi: at_hi });
            }
            (0.0, hi)
        } else {
            let mut lo = -1.0 / top;
            while self.psi(lo)? > y {
                lo *= 2.0;
                if lo < -1e300 {
                    return Err(Error::OutOfRange { what: "y", value: y, lo: self.psi_lower_limit(), hi: 0.0 });
                }
            }
            (lo, 0.0)
        };
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.psi(mid)? < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Newton polish, kept inside the final bracket.
        let mut z = 0.5 * (lo + hi);
        let mut r = self.psi(z)? - y;
        for _ in 0..4 {
            let d = self.psi_derivative(z);
            if r == 0.0 || d <= 0.0 || !d.is_finite() {
                break;
            }
            let next = z - r / d;
            if !(next >= lo && next <= hi) {
                break;
            }
            let r_next = self.psi(next)? - y;
            if r_next.abs() >= r.abs() {
                break;
            }
            z = next;
            r = r_next;
        }
        let r = (self.psi(z)? - y).abs();
        if r > tol.inversion.max(64.0 * f64::EPSILON * y.abs()) {
            return Err(Error::OutOfRange { what: "y", value: y, lo: self.psi_lower_limit(), hi: self.psi(hi)? });
        }
        Ok(z)
    }

    /// Domain of the S-transform used by the R-diagonal recipe:
    /// `(mu({0}) - 1, 0]`.
    pub fn s_domain(&self) -> (f64, f64) {
        (self.mass_at_zero() - 1.0, 0.0)
    }

    pub fn s_transform(&self, w: f64) -> Result<f64> {
        self.s_transform_with(w, Inversion::Auto, &Tolerances::default())
    }

    pub fn s_transform_with(&self, w: f64, method: Inversion, tol: &Tolerances) -> Result<f64> {
        let (lo, hi) = self.s_domain();
        if !(w > lo && w <= hi) {
            return Err(Error::Domain { what: "w", value: w, domain: format!("({lo}, {hi}]") });
        }
        if w == 0.0 {
            let mean = self.moment(1);
            if mean == 0.0 {
                return Err(Error::Domain { what: "w", value: w, domain: "measure with positive mean".into() });
            }
            return Ok(1.0 / mean);
        }
        if method == Inversion::Auto {
            if let Some(s) = self.s_closed_form(w) {
                return Ok(s);
            }
        }
        let z = self.chi_inverse_with(w, method, tol)?;
        Ok(z * (1.0 + w) / w)
    }

    /// `S(w) = (1 + w) / (alpha a + a w)` for `alpha delta_a + (1 - alpha) delta_0`
    /// and `1 / a` for `delta_a`.
    fn s_closed_form(&self, w: f64) -> Option<f64> {
        if !self.density.is_empty() {
            return None;
        }
        match self.atoms.as_slice() {
            [(a, _)] if *a > 0.0 => Some(1.0 / a),
            [(z0, _), (a, alpha)] if *z0 == 0.0 => Some((1.0 + w) / (a * (alpha + w))),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_bernoulli() -> ScalarMeasure {
        ScalarMeasure::bernoulli(0.5, 1.0).unwrap()
    }

    #[test]
    fn moments() {
        assert_eq!(half_bernoulli().moment(3), 0.5);
        assert_eq!(ScalarMeasure::dirac(3.0).unwrap().moment(2), 9.0);
        let m = ScalarMeasure::from_atoms(&[(1.0, 0.5), (4.0, 0.5)]).unwrap();
        assert_eq!(m.moment(2), 8.5);
        assert_eq!(m.moment(0), 1.0);
    }

    #[test]
    fn psi_values() {
        assert!((half_bernoulli().psi(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(half_bernoulli().psi(0.0).unwrap(), 0.0);
        assert!((ScalarMeasure::dirac(1.0).unwrap().psi(0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn psi_pole_is_an_error() {
        let err = ScalarMeasure::dirac(2.0).unwrap().psi(0.5).unwrap_err();
        assert!(matches!(err, Error::Pole { atom, .. } if atom == 2.0));
    }

    #[test]
    fn chi_examples() {
        assert!((half_bernoulli().chi_inverse(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((ScalarMeasure::dirac(1.0).unwrap().chi_inverse(1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chi_out_of_range() {
        // psi > -1/2 on the principal branch of the half Bernoulli law.
        assert!(matches!(half_bernoulli().chi_inverse(-0.6), Err(Error::OutOfRange { .. })));
        assert!(matches!(ScalarMeasure::dirac(0.0).unwrap().chi_inverse(0.1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn s_transform_of_half_bernoulli() {
        let s = half_bernoulli().s_transform(-0.25).unwrap();
        assert!((s - 3.0).abs() < 1e-14);
        let n = half_bernoulli().s_transform_with(-0.25, Inversion::Numeric, &Tolerances::default()).unwrap();
        assert!((n - 3.0).abs() < 1e-12);
    }

    #[test]
    fn s_transform_of_dirac_is_constant() {
        let d = ScalarMeasure::dirac(1.0).unwrap();
        assert_eq!(d.s_transform(0.0).unwrap(), 1.0);
        let s = d.s_transform_with(-1e-6, Inversion::Numeric, &Tolerances::default()).unwrap();
        assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn s_transform_domain() {
        assert!(matches!(half_bernoulli().s_transform(-0.5), Err(Error::Domain { .. })));
        assert!(matches!(half_bernoulli().s_transform(0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn invalid_measures_rejected() {
        assert!(ScalarMeasure::from_atoms(&[(1.0, 0.4)]).is_err());
        assert!(ScalarMeasure::from_atoms(&[(-1.0, 1.0)]).is_err());
        assert!(ScalarMeasure::new(vec![], vec![(1.0, 1.0), (0.5, 1.0)]).is_err());
    }

    #[test]
    fn density_measure_transforms() {
        // Uniform on [0, 1] sampled on a fine grid is exact under trapezoids.
        let density: Vec<(f64, f64)> = (0..=100).map(|i| (i as f64 / 100.0, 1.0)).collect();
        let m = ScalarMeasure::new(vec![], density).unwrap();
        assert!((m.moment(1) - 0.5).abs() < 1e-12);
        let z = m.chi_inverse(0.3).unwrap();
        assert!((m.psi(z).unwrap() - 0.3).abs() < 1e-12);
        let neg = m.chi_inverse(-0.4).unwrap();
        assert!((m.psi(neg).unwrap() + 0.4).abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let m = half_bernoulli();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"atoms":[[0.0,0.5],[1.0,0.5]],"density":[]}"#);
        let back: ScalarMeasure = serde_json::from_str(r#"{"atoms":[[1.0,0.5],[0.0,0.5]]}"#).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ScalarMeasure>(r#"{"atoms":[[1.0,0.5]]}"#).is_err());
    }
}
