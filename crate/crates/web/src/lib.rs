//! Browser bindings. Every export takes plain numbers or JSON text and
//! returns JSON text, so the page needs no generated types.

use brownlab::brownfield::{self, GridSpec};
use brownlab::matmodel;
use brownlab::rdiagonal::{self, catalog_brown, OperatorTag};
use brownlab::{c64, io, linalg, Error};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest half dimension the page may request; the eigensolve is cubic.
pub const MAX_HALF_DIM: usize = 256;
pub const MAX_GRID: usize = 161;

fn parse_tag(tag: &str) -> Result<OperatorTag, Error> {
    tag.parse()
}

fn check_half_dim(half_dim: usize) -> Result<(), Error> {
    if half_dim == 0 || half_dim > MAX_HALF_DIM {
        return Err(Error::Precondition(format!("half dimension must lie in 1..={MAX_HALF_DIM}")));
    }
    Ok(())
}

/// CDF of the Brown measure of an R-diagonal operator whose modulus has
/// the law given as `{"atoms": [[x, mass], ...]}`.
pub fn rdiag_curve_json(measure_json: &str, points: usize) -> Result<String, Error> {
    let mu = io::measure_from_json(measure_json)?;
    let law = rdiagonal::brown_rdiagonal(&mu)?;
    let (inner, outer) = law.support();
    let points = points.clamp(2, 2000);
    let curve: Vec<[f64; 2]> = (0..points)
        .map(|k| {
            let r = outer * k as f64 / (points - 1) as f64;
            [r, law.cdf(r)]
        })
        .collect();
    Ok(json!({ "inner": inner, "outer": outer, "center_atom": law.center_atom(), "curve": curve }).to_string())
}

/// Eigenvalues of a catalogued operator in the matrix model, with the KS
/// distance of their radial profile from the exact law.
pub fn simulate_spectrum_json(tag: &str, half_dim: usize, seed: u64) -> Result<String, Error> {
    let tag = parse_tag(tag)?;
    check_half_dim(half_dim)?;
    let model = matmodel::build_m2_free_m2(half_dim, seed);
    let t = matmodel::realize(tag, &model);
    let ev = linalg::eigenvalues(&t)?;
    let law = catalog_brown(tag);
    let radial = law.radial();
    let thr = brownlab::Tolerances::default().zero_threshold_rel * linalg::spectral_norm(&t)?;
    let emp = matmodel::empirical_radial_cdf_of(ev.iter().map(|&z| law.radial_argument(z)), radial.center(), thr);
    let points: Vec<[f64; 2]> = ev.iter().map(|z| [z.re, z.im]).collect();
    Ok(json!({
        "tag": tag.as_str(),
        "eigenvalues": points,
        "ks": emp.ks_conditional(radial),
        "atom_fraction": emp.atom_fraction,
        "expected_atom_fraction": radial.center_atom(),
    })
    .to_string())
}

/// Brown cell masses of a catalogued operator on a square grid around the
/// origin. `eps <= 0` selects the default regularization.
pub fn brown_field_json(tag: &str, half_dim: usize, seed: u64, grid_n: usize, eps: f64) -> Result<String, Error> {
    let tag = parse_tag(tag)?;
    check_half_dim(half_dim)?;
    if grid_n > MAX_GRID {
        return Err(Error::InvalidGrid(format!("at most {MAX_GRID} nodes per side")));
    }
    let model = matmodel::build_m2_free_m2(half_dim, seed);
    let t = matmodel::realize(tag, &model);
    let eps = if eps > 0.0 { eps } else { brownfield::default_epsilon(&t)? };
    let half_width = 1.1 * linalg::spectral_norm(&t)?;
    let grid = GridSpec::square(c64::new(0.0, 0.0), half_width, grid_n, eps)?;
    let field = brownfield::brown_laplacian(brownfield::logdet_field(&t, &grid)?)?;
    let mass: Vec<f64> = field.laplacian_mass.clone().unwrap_or_default();
    Ok(json!({
        "half_width": half_width,
        "n": grid_n,
        "epsilon": eps,
        "total_mass": field.total_mass(),
        "interior_mass": mass,
    })
    .to_string())
}

fn js(r: Result<String, Error>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn rdiag_curve(measure_json: &str, points: usize) -> Result<String, JsError> {
    js(rdiag_curve_json(measure_json, points))
}

#[wasm_bindgen]
pub fn simulate_spectrum(tag: &str, half_dim: usize, seed: u64) -> Result<String, JsError> {
    js(simulate_spectrum_json(tag, half_dim, seed))
}

#[wasm_bindgen]
pub fn brown_field(tag: &str, half_dim: usize, seed: u64, grid_n: usize, eps: f64) -> Result<String, JsError> {
    js(brown_field_json(tag, half_dim, seed, grid_n, eps))
}
