//! File formats shared by the command line and the tests.
//!
//! Matrices are read from JSON `{"rows": n, "cols": m, "data": [[re, im], ...]}`
//! with `data` in row-major order, or from CSV where each line holds one
//! row as `re,im,re,im,...`. Lines starting with `#` are ignored.

use std::path::Path;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::brownfield::BrownField;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::matmodel::SpectrumSample;
use crate::measures::ScalarMeasure;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    atoms: Vec<[f64; 2]>,
    #[serde(default)]
    density: Vec<[f64; 2]>,
}

/// Parses `{"atoms": [[x, mass], ...], "density": [[x, f], ...]}`. Unlike
/// going through `serde`, a well-formed file with an invalid measure
/// reports `InvalidMeasure` rather than `Parse`.
pub fn measure_from_json(text: &str) -> Result<ScalarMeasure> {
    let raw: MeasureFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("measure JSON: {e}")))?;
    let pairs = |v: Vec<[f64; 2]>| v.into_iter().map(|[a, b]| (a, b)).collect();
    ScalarMeasure::new(pairs(raw.atoms), pairs(raw.density))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Parse(format!(
                "matrix declares {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            c64::new(re, im)
        }))
    }
}

pub fn matrix_from_json(text: &str) -> Result<CMat> {
    let f: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    f.to_matrix()
}

pub fn matrix_to_json(m: &CMat) -> String {
    serde_json::to_string(&MatrixFile::from_matrix(m)).expect("matrix serializes")
}

pub fn matrix_from_csv(text: &str) -> Result<CMat> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<c64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("matrix CSV: {e}")))?;
        if record.len() % 2 != 0 {
            return Err(Error::Parse(format!("matrix CSV row {}: odd number of fields", line + 1)));
        }
        let nums: Vec<f64> = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse(format!("matrix CSV row {}: bad number `{f}`", line + 1))))
            .collect::<Result<_>>()?;
        rows.push(nums.chunks(2).map(|p| c64::new(p[0], p[1])).collect());
    }
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("matrix CSV: empty or ragged rows".into()));
    }
    Ok(CMat::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn matrix_to_csv(m: &CMat) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for i in 0..m.nrows() {
        let rec: Vec<String> = (0..m.ncols()).flat_map(|j| [m[(i, j)].re.to_string(), m[(i, j)].im.to_string()]).collect();
        w.write_record(&rec).expect("in-memory write");
    }
    into_string(w)
}

/// Reads a matrix, choosing the format by extension (`.csv`, otherwise JSON).
pub fn read_matrix(path: &Path) -> Result<CMat> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => matrix_from_csv(&text),
        _ => matrix_from_json(&text),
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn table<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    into_string(w)
}

/// `re,im` per eigenvalue.
pub fn spectrum_csv(sample: &SpectrumSample) -> String {
    table(["re", "im"], sample.eigenvalues.iter().map(|z| [z.re.to_string(), z.im.to_string()]))
}

pub fn spectrum_from_csv(text: &str) -> Result<Vec<c64>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| Error::Parse(format!("spectrum CSV: {e}")))?;
            let get = |k: usize| -> Result<f64> {
                r.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse("spectrum CSV: bad row".into()))
            };
            Ok(c64::new(get(0)?, get(1)?))
        })
        .collect()
}

/// `r,F` rows.
pub fn cdf_csv(points: &[(f64, f64)]) -> String {
    table(["r", "F"], points.iter().map(|(r, f)| [r.to_string(), f.to_string()]))
}

/// `x,y,value,mass` per node; `mass` is empty on the boundary.
pub fn field_csv(field: &BrownField) -> String {
    let g = field.grid;
    let rows = (0..g.nx).flat_map(move |i| {
        (0..g.ny).map(move |j| {
            let mass = field.mass(i, j).map(|m| m.to_string()).unwrap_or_default();
            [g.x(i).to_string(), g.y(j).to_string(), field.value(i, j).to_string(), mass]
        })
    });
    table(["x", "y", "value", "mass"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn measure_errors_keep_their_variant() {
        assert!(matches!(measure_from_json(r#"{"atoms":[[1.0,0.5]]}"#), Err(Error::InvalidMeasure(_))));
        assert!(matches!(measure_from_json(r#"{"atoms":[[1.0,1.0]],"extra":1}"#), Err(Error::Parse(_))));
        let m = measure_from_json(r#"{"atoms":[[1.0,0.5],[0.0,0.5]]}"#).unwrap();
        assert_eq!(m, ScalarMeasure::bernoulli(0.5, 1.0).unwrap());
    }

    #[test]
    fn matrix_formats_round_trip() {
        let m = CMat::from_fn(2, 3, |i, j| c64::new(i as f64 + 0.1, j as f64 - 1.0 / 3.0));
        assert_eq!(matrix_from_json(&matrix_to_json(&m)).unwrap(), m);
        assert_eq!(matrix_from_csv(&matrix_to_csv(&m)).unwrap(), m);
    }

    #[test]
    fn csv_with_comments_and_errors() {
        let m = matrix_from_csv("# 2x2\n1,0,0,0\n0,0,1,0\n").unwrap();
        assert_eq!(m, linalg::identity(2));
        assert!(matrix_from_csv("1,0,0\n").is_err());
        assert!(matrix_from_csv("1,0\n1,0,2,0\n").is_err());
        assert!(matrix_from_json(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
    }

    #[test]
    fn spectrum_round_trip() {
        let s = SpectrumSample { eigenvalues: vec![c64::new(1.5, -2.0), c64::new(0.0, 1e-300)], source: "t".into(), seed: 1, dim: 2 };
        assert_eq!(spectrum_from_csv(&spectrum_csv(&s)).unwrap(), s.eigenvalues);
    }
}
