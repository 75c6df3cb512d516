//! The subcommands. Each reads its inputs, writes its files through
//! [`Outputs`] and returns a summary that is also written as JSON.

use std::path::Path;
use std::time::Instant;

use brownlab::algstruct::{self, KFoldReport, SubspaceKind, SubspaceReport};
use brownlab::brownfield::{self, FieldOptions, GridSpec, LogDetPath};
use brownlab::matmodel::{self, ModelMetadata};
use brownlab::rdiagonal::{self, catalog_brown, OperatorTag, RadialPlanarMeasure};
use brownlab::rng::SeedStream;
use brownlab::verify::{self, CriterionReport, VerifyOptions};
use brownlab::{c64, io, linalg, CMat, Error};
use serde::{Deserialize, Serialize};

use crate::exit::CliError;
use crate::record::Outputs;

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn time<T>(out: &mut Outputs, key: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let v = f();
    out.timings.insert(key.to_string(), start.elapsed().as_secs_f64());
    v
}

/// Radii `0, step, 2 step, ...` below the outer radius, then the outer
/// radius itself. Radii are rounded to 12 decimals so that `k * step`
/// lands on the decimal the user typed.
pub fn cdf_table(m: &RadialPlanarMeasure, step: f64) -> Result<Vec<(f64, f64)>, Error> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Domain { what: "step", value: step, domain: "(0, inf)".into() });
    }
    let outer = m.support().1;
    let mut rows = Vec::new();
    for k in 0.. {
        let r = ((k as f64 * step) * 1e12).round() / 1e12;
        if r >= outer {
            break;
        }
        rows.push((r, m.cdf(r)));
    }
    rows.push((outer, m.cdf(outer)));
    Ok(rows)
}

pub fn rdiag(measure_file: &Path, step: f64, out: &mut Outputs) -> Result<RadialPlanarMeasure, CliError> {
    let mu = io::measure_from_json(&read_text(measure_file)?)?;
    let law = time(out, "rdiag", || rdiagonal::brown_rdiagonal(&mu))?;
    let (inner, outer) = law.support();
    out.notes.push(format!("annulus radii: inner {inner}, outer {outer}; center atom {}", law.center_atom()));
    out.write_json("rdiag.json", &law)?;
    out.write("rdiag_cdf.csv", &io::cdf_csv(&cdf_table(&law, step)?))?;
    Ok(law)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub index: u64,
    pub model: ModelMetadata,
    pub spectrum_file: String,
    pub ks: f64,
    pub atom_fraction: f64,
    pub support_violations: usize,
    /// Normalized trace of the requested word, as `[re, im]`.
    pub word_trace: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub tag: OperatorTag,
    pub dim: usize,
    pub word: Option<String>,
    /// Distance from the center within which an eigenvalue counts toward
    /// the center atom, relative to the matrix norm.
    pub zero_threshold_rel: f64,
    /// Slack added to the outer support radius before a point counts as a
    /// violation.
    pub support_slack: f64,
    pub seeds: Vec<SeedSummary>,
    pub eigenvalues: usize,
    pub ks: f64,
    pub atom_fraction: f64,
    pub expected_atom_fraction: f64,
    pub support_violations: usize,
    pub support_violation_fraction: f64,
}

pub const SUPPORT_SLACK: f64 = 0.05;

pub fn simulate(
    tag: OperatorTag,
    dim: usize,
    seeds: u64,
    word: Option<&str>,
    master: u64,
    out: &mut Outputs,
) -> Result<SimulateSummary, CliError> {
    if dim < 2 || dim % 2 != 0 {
        return Err(Error::Precondition(format!("dim = {dim} must be even and at least 2")).into());
    }
    if seeds == 0 {
        return Err(Error::Precondition("at least one seed is required".into()).into());
    }
    if let Some(w) = word {
        matmodel::parse_word(w)?;
    }
    let law = catalog_brown(tag);
    let radial = law.radial();
    let center = radial.center();
    let limit = radial.support().1 + SUPPORT_SLACK;
    let rel = brownlab::Tolerances::default().zero_threshold_rel;
    let stream = SeedStream::new(master);
    let mut per_seed = Vec::new();
    let mut all: Vec<c64> = Vec::new();
    let mut threshold = 0.0f64;
    for index in 0..seeds {
        let seed = stream.child("simulate", index);
        let (model, t) = time(out, &format!("model_{index}"), || {
            let model = matmodel::build_m2_free_m2(dim / 2, seed);
            let t = matmodel::realize(tag, &model);
            (model, t)
        });
        let sample = time(out, &format!("eigensolve_{index}"), || matmodel::spectrum(&t, tag.as_str(), seed))?;
        let thr = rel * linalg::spectral_norm(&t)?;
        threshold = threshold.max(thr);
        let args: Vec<c64> = sample.eigenvalues.iter().map(|&z| law.radial_argument(z)).collect();
        let emp = matmodel::empirical_radial_cdf_of(args.iter().copied(), center, thr);
        let file = format!("spectrum_{index}.csv");
        out.write(&file, &io::spectrum_csv(&sample))?;
        let word_trace = match word {
            Some(w) => {
                let z = matmodel::word_trace(&model, w)?;
                Some([z.re, z.im])
            }
            None => None,
        };
        per_seed.push(SeedSummary {
            index,
            model: ModelMetadata { tag: Some(tag), ..model.metadata() },
            spectrum_file: file,
            ks: emp.ks_conditional(radial),
            atom_fraction: emp.atom_fraction,
            support_violations: args.iter().filter(|a| (*a - center).norm() > limit).count(),
            word_trace,
        });
        all.extend(args);
    }
    let emp = matmodel::empirical_radial_cdf_of(all.iter().copied(), center, threshold);
    out.write("aggregate_cdf.csv", &io::cdf_csv(&emp.points()))?;
    let violations: usize = per_seed.iter().map(|s| s.support_violations).sum();
    let summary = SimulateSummary {
        tag,
        dim,
        word: word.map(str::to_string),
        zero_threshold_rel: rel,
        support_slack: SUPPORT_SLACK,
        eigenvalues: all.len(),
        ks: emp.ks_conditional(radial),
        atom_fraction: emp.atom_fraction,
        expected_atom_fraction: radial.center_atom(),
        support_violations: violations,
        support_violation_fraction: violations as f64 / all.len() as f64,
        seeds: per_seed,
    };
    out.write_json("simulate.json", &summary)?;
    Ok(summary)
}

pub enum FieldSource<'a> {
    Matrix(&'a Path),
    Tag { tag: OperatorTag, dim: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub source: String,
    pub model: Option<ModelMetadata>,
    pub grid: GridSpec,
    pub path: LogDetPath,
    pub threads: Option<usize>,
    pub total_mass: f64,
    pub min_mass: f64,
    pub noise_floor: f64,
    pub quadrant_masses: [f64; 4],
    pub jittered: Vec<(usize, usize)>,
    pub sentinels: Vec<(usize, usize)>,
}

pub struct FieldRequest {
    pub grid: usize,
    pub epsilon: Option<f64>,
    pub path: Option<LogDetPath>,
    pub half_width: Option<f64>,
    pub center: c64,
    pub threads: Option<usize>,
}

fn mass_csv(field: &brownfield::BrownField) -> String {
    let g = field.grid;
    let mut s = String::from("x,y,mass\n");
    for i in 1..g.nx - 1 {
        for j in 1..g.ny - 1 {
            if let Some(m) = field.mass(i, j) {
                s.push_str(&format!("{},{},{}\n", g.x(i), g.y(j), m));
            }
        }
    }
    s
}

pub fn field(source: FieldSource<'_>, req: &FieldRequest, out: &mut Outputs) -> Result<FieldSummary, CliError> {
    let (t, label, model): (CMat, String, Option<ModelMetadata>) = match source {
        FieldSource::Matrix(path) => {
            let text = read_text(path)?;
            let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            let t = if is_csv { io::matrix_from_csv(&text)? } else { io::matrix_from_json(&text)? };
            (t, path.display().to_string(), None)
        }
        FieldSource::Tag { tag, dim, seed } => {
            if dim < 2 || dim % 2 != 0 {
                return Err(Error::Precondition(format!("dim = {dim} must be even and at least 2")).into());
            }
            let model = matmodel::build_m2_free_m2(dim / 2, seed);
            let meta = ModelMetadata { tag: Some(tag), ..model.metadata() };
            (matmodel::realize(tag, &model), tag.to_string(), Some(meta))
        }
    };
    if t.nrows() != t.ncols() {
        return Err(Error::DimensionMismatch { expected: t.nrows(), found: t.ncols() }.into());
    }
    let epsilon = match req.epsilon {
        Some(e) => e,
        None => brownfield::default_epsilon(&t)?,
    };
    let half_width = match req.half_width {
        Some(h) => h,
        None => 1.1 * linalg::spectral_norm(&t)?.max(f64::MIN_POSITIVE),
    };
    let grid = GridSpec::square(req.center, half_width, req.grid, epsilon)?;
    let opts = FieldOptions { path: req.path, threads: req.threads };
    let raw = time(out, "logdet_field", || brownfield::logdet_field_with(&t, &grid, opts))?;
    let jittered = raw.jittered.clone();
    let sentinels = raw.sentinels.clone();
    if !jittered.is_empty() {
        out.notes.push(format!("{} node(s) hit the spectrum and were moved by half a cell", jittered.len()));
    }
    let field = brownfield::brown_laplacian(raw)?;
    out.write("field.csv", &io::field_csv(&field))?;
    out.write("mass.csv", &mass_csv(&field))?;
    let summary = FieldSummary {
        source: label,
        model,
        grid,
        path: field.path,
        threads: req.threads,
        total_mass: field.total_mass(),
        min_mass: field.min_mass(),
        noise_floor: field.noise_floor,
        quadrant_masses: field.quadrant_masses(req.center),
        jittered,
        sentinels,
    };
    out.write_json("field.json", &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub files: Vec<String>,
    pub ambient_dim: usize,
    pub closure_dim: usize,
    pub full: bool,
    pub gap_ratio: f64,
    pub closure_residual: f64,
    pub transitive: bool,
    /// Invariant subspace certificate, present when not transitive.
    pub subspace: Option<SubspaceReport>,
    pub kfold: Option<KFoldReport>,
}

pub fn algebra(
    files: &[std::path::PathBuf],
    kfold: Option<(usize, u64)>,
    out: &mut Outputs,
) -> Result<AlgebraReport, CliError> {
    if files.is_empty() {
        return Err(Error::Precondition("at least one generator file is required".into()).into());
    }
    let mut gens = Vec::new();
    for f in files {
        let text = read_text(f)?;
        let is_csv = f.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        gens.push(if is_csv { io::matrix_from_csv(&text)? } else { io::matrix_from_json(&text)? });
    }
    let n = gens[0].nrows();
    let span = time(out, "closure", || algstruct::close_algebra(&gens, n))?;
    let sub = time(out, "invariant_subspace", || algstruct::find_invariant_subspace(&span))?;
    let transitive = sub.kind == SubspaceKind::None;
    let kfold = match kfold {
        Some((k, seed)) => {
            Some(time(out, "kfold", || algstruct::kfold_report(&span, k, &SeedStream::new(seed)))?)
        }
        None => None,
    };
    let report = AlgebraReport {
        files: files.iter().map(|f| f.display().to_string()).collect(),
        ambient_dim: n,
        closure_dim: span.dim(),
        full: span.is_full(),
        gap_ratio: span.gap_ratio(),
        closure_residual: span.closure_residual(),
        transitive,
        subspace: (!transitive).then_some(sub),
        kfold,
    };
    out.write_json("algebra.json", &report)?;
    Ok(report)
}

/// Runs the selected criteria, printing one line each. Timings, including
/// the values of runtime checks, go to the run record so that
/// `verify.json` is identical between runs.
pub fn verify(criteria: &[u8], opts: VerifyOptions, out: &mut Outputs) -> Result<Vec<CriterionReport>, CliError> {
    let ids: Vec<u8> = if criteria.is_empty() { verify::CRITERIA.to_vec() } else { criteria.to_vec() };
    if let Some(bad) = ids.iter().find(|id| !verify::CRITERIA.contains(id)) {
        return Err(Error::Precondition(format!("no criterion {bad}")).into());
    }
    let mut reports = Vec::new();
    for id in ids {
        let mut r = verify::run_criterion(id, &opts);
        println!("{}", r.line());
        for n in &r.notes {
            println!("    {n}");
        }
        out.timings.insert(format!("criterion_{id}"), r.seconds);
        r.seconds = 0.0;
        // runtime checks still decide `passed`; their values move to the record
        for c in r.checks.iter().filter(|c| c.name.starts_with("runtime")) {
            out.timings.insert(format!("criterion_{id}_{}", c.name), c.value);
        }
        r.checks.retain(|c| !c.name.starts_with("runtime"));
        reports.push(r);
    }
    out.write_json("verify.json", &reports)?;
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use brownlab::measures::ScalarMeasure;

    #[test]
    fn cdf_table_hits_decimal_radii_and_ends_at_outer() {
        let mu = ScalarMeasure::bernoulli(0.5, 1.0).unwrap();
        let law = rdiagonal::brown_rdiagonal(&mu).unwrap();
        let rows = cdf_table(&law, 0.005).unwrap();
        assert!(rows.iter().any(|&(r, _)| r == 0.5));
        let last = *rows.last().unwrap();
        assert_eq!(last.0, law.support().1);
        assert_eq!(last.1, 1.0);
        assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        assert!(cdf_table(&law, 0.0).is_err());
    }
}
