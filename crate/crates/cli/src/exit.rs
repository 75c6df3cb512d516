//! Error type of the binary and its exit-code table.

use std::path::PathBuf;

use brownlab::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("`{0}` needs a master seed (pass --seed or set `seed` in the config file)")]
    MissingSeed(&'static str),

    #[error("{failed} of {total} criteria failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => core_code(e),
            CliError::Io { .. } => 3,
            CliError::Config(_) => 4,
            CliError::MissingSeed(_) => 15,
            CliError::VerifyFailed { .. } => 16,
        }
    }
}

/// Exit code per library error. Code 2 is left to clap for usage errors.
pub fn core_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 4,
        Error::InvalidMeasure(_) => 5,
        Error::DiracInput { .. } => 6,
        Error::Domain { .. } | Error::OutOfRange { .. } | Error::Pole { .. } => 7,
        Error::UnknownTag(_) | Error::WordSyntax(_) => 8,
        Error::InvalidGrid(_) => 9,
        Error::Sentinel { .. } => 10,
        Error::DimensionMismatch { .. } => 11,
        Error::Eigensolve(_) | Error::Svd(_) => 12,
        Error::Precondition(_) => 13,
        Error::Inconsistency(_) => 14,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use brownlab::algstruct::{close_algebra, kfold_report};
    use brownlab::brownfield::{brown_laplacian, logdet_field, GridSpec};
    use brownlab::linalg::CMat;
    use brownlab::matmodel::parse_word;
    use brownlab::measures::ScalarMeasure;
    use brownlab::rdiagonal::brown_rdiagonal;
    use brownlab::rng::SeedStream;
    use brownlab::c64;

    /// Triggers each variant through the library where an input reaches it.
    /// Eigensolve, Svd and Inconsistency have no known triggering input and
    /// are constructed directly.
    fn one_of_each() -> Vec<Error> {
        let bern = ScalarMeasure::bernoulli(0.5, 1.0).unwrap();
        let grid = GridSpec::square(c64::new(0.0, 0.0), 1.0, 5, 0.0).unwrap();
        let mut t = CMat::zeros(2, 2);
        t[(1, 1)] = c64::new(0.25, 0.25);
        let span = close_algebra(&[CMat::identity(2, 2)], 2).unwrap();
        vec![
            ScalarMeasure::new(vec![(1.0, 0.5)], vec![]).unwrap_err(),
            bern.psi(1.0).unwrap_err(),
            bern.chi_inverse(-1.0).unwrap_err(),
            bern.s_transform(-5.0).unwrap_err(),
            brown_rdiagonal(&ScalarMeasure::dirac(1.0).unwrap()).unwrap_err(),
            Error::Eigensolve("no convergence".into()),
            Error::Svd("no convergence".into()),
            "nope".parse::<brownlab::rdiagonal::OperatorTag>().unwrap_err(),
            parse_word("c(W1").unwrap_err(),
            GridSpec::square(c64::new(0.0, 0.0), 1.0, 2, 0.0).unwrap_err(),
            brown_laplacian(logdet_field(&t, &grid).unwrap()).unwrap_err(),
            close_algebra(&[CMat::identity(3, 3)], 2).unwrap_err(),
            kfold_report(&span, 0, &SeedStream::new(1)).unwrap_err(),
            Error::Inconsistency("routes disagree".into()),
            brownlab::io::matrix_from_json("{").unwrap_err(),
        ]
    }

    #[test]
    fn every_variant_maps_to_a_documented_code() {
        let errs = one_of_each();
        let mut seen = std::collections::HashSet::new();
        for e in &errs {
            let code = core_code(e);
            assert!((3..=16).contains(&code), "{e:?}");
            seen.insert(std::mem::discriminant(e));
        }
        // one entry per enum variant
        assert_eq!(seen.len(), 15, "{errs:#?}");
    }

    #[test]
    fn cli_codes() {
        let io = CliError::io("x", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert_eq!(io.exit_code(), 3);
        assert_eq!(CliError::Config("x".into()).exit_code(), 4);
        assert_eq!(CliError::MissingSeed("simulate").exit_code(), 15);
        assert_eq!(CliError::VerifyFailed { failed: 1, total: 9 }.exit_code(), 16);
    }
}
