//! Output directory handling and the run record written beside every run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use brownlab::verify::sha256_hex;

use crate::config::Config;
use crate::exit::CliError;

pub const RECORD_FILE: &str = "run.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command_line: Vec<String>,
    pub master_seed: Option<u64>,
    /// Effective configuration after flags were applied.
    pub config: Config,
    pub wall_time_seconds: f64,
    /// sha256 of every output file, keyed by file name.
    pub digests: BTreeMap<String, String>,
    /// Timings and other values that vary between identical runs.
    pub timings: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// Writes files into one directory and remembers their digests.
pub struct Outputs {
    dir: PathBuf,
    pub digests: BTreeMap<String, String>,
    pub timings: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), digests: BTreeMap::new(), timings: BTreeMap::new(), notes: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.digests.insert(name.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("serializable output") + "\n";
        self.write(name, &text)
    }

    pub fn finish(self, command_line: Vec<String>, config: Config, wall: f64) -> Result<RunRecord, CliError> {
        let record = RunRecord {
            command_line,
            master_seed: config.seed,
            config,
            wall_time_seconds: wall,
            digests: self.digests,
            timings: self.timings,
            notes: self.notes,
        };
        let path = self.dir.join(RECORD_FILE);
        let text = serde_json::to_string_pretty(&record).expect("serializable record") + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(record)
    }
}

#[cfg(test)]
/// Recomputes the digests of a finished run and returns the names whose
/// contents no longer match.
pub fn stale_digests(dir: &Path, record: &RunRecord) -> Result<Vec<String>, CliError> {
    let mut stale = Vec::new();
    for (name, digest) in &record.digests {
        let path = dir.join(name);
        let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        if &sha256_hex(&bytes) != digest {
            stale.push(name.clone());
        }
    }
    Ok(stale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn record_round_trips_and_digests_recompute() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Outputs::create(dir.path()).unwrap();
        out.write("a.csv", "x\n1\n").unwrap();
        out.timings.insert("a".into(), 0.25);
        let record = out.finish(vec!["brownlab".into()], Config::default(), 1.5).unwrap();
        let text = std::fs::read_to_string(dir.path().join(RECORD_FILE)).unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, record);
        assert!(stale_digests(dir.path(), &back).unwrap().is_empty());
        std::fs::write(dir.path().join("a.csv"), "x\n2\n").unwrap();
        assert_eq!(stale_digests(dir.path(), &back).unwrap(), vec!["a.csv".to_string()]);
    }
}
