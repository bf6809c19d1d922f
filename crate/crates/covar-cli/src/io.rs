//! Input parsing: matrix files in JSON or CSV, splits, conventions, and the
//! mapping from library errors to stable exit codes.

use covar::{Convention, CovarianceMatrix, DisplacementVector, Error, GaussianState, ModeSplit};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID_CM: i32 = 3;
pub const EXIT_DIMENSION: i32 = 4;
pub const EXIT_UNCERTIFIED: i32 = 5;
pub const EXIT_SINGULAR: i32 = 6;
pub const EXIT_PLAN: i32 = 7;

#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(exit_code: i32, message: impl Into<String>) -> Self {
        Self {
            exit_code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }
}

/// Maps library errors onto the documented exit codes.
pub fn from_lib(err: Error) -> CliError {
    let code = match &err {
        Error::UncertaintyViolated { .. }
        | Error::Asymmetric { .. }
        | Error::NotPositiveSemidefinite { .. } => EXIT_INVALID_CM,
        Error::NotSquare { .. }
        | Error::OddDimension { .. }
        | Error::ZeroModes
        | Error::DimensionMismatch { .. }
        | Error::InvalidSplit { .. } => EXIT_DIMENSION,
        Error::CertificationFailed { .. } | Error::EmptyFamily => EXIT_UNCERTIFIED,
        Error::DegenerateInput { .. } => EXIT_SINGULAR,
        Error::InvalidPlan(_) => EXIT_PLAN,
        _ => EXIT_PARSE,
    };
    CliError::new(code, err.to_string())
}

/// On-disk description of a state: matrix plus optional displacement, split
/// and convention tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displacement: Option<Vec<f64>>,
    /// `[n_a, n_b]`; defaults to `1 | (N - 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<[usize; 2]>,
    /// `"gamma"` (default) or `"capital"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
}

impl MatrixFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
        let ext = path
            .extension()
            .and_then(|s| s.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        if ext == "csv" {
            Self::from_csv(&raw)
        } else {
            serde_json::from_str(&raw)
                .map_err(|e| CliError::parse(format!("invalid JSON in {}: {e}", path.display())))
        }
    }

    fn from_csv(raw: &str) -> Result<Self, CliError> {
        let mut matrix = Vec::new();
        for (lineno, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse()).collect();
            let row = row.map_err(|e| CliError::parse(format!("line {}: {e}", lineno + 1)))?;
            matrix.push(row);
        }
        if matrix.is_empty() {
            return Err(CliError::parse("no matrix rows found"));
        }
        Ok(MatrixFile {
            matrix,
            displacement: None,
            split: None,
            convention: None,
        })
    }

    pub fn to_dmatrix(&self) -> Result<DMatrix<f64>, CliError> {
        let rows = self.matrix.len();
        if rows == 0 {
            return Err(CliError::parse("empty matrix"));
        }
        let cols = self.matrix[0].len();
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != cols {
                return Err(CliError::parse(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    row.len()
                )));
            }
        }
        let flat: Vec<f64> = self.matrix.iter().flatten().copied().collect();
        Ok(DMatrix::from_row_slice(rows, cols, &flat))
    }

    pub fn parsed_convention(&self) -> Result<Convention, CliError> {
        match self.convention.as_deref() {
            None | Some("gamma") => Ok(Convention::Gamma),
            Some("capital") | Some("capital_gamma") => Ok(Convention::CapitalGamma),
            Some(other) => Err(CliError::parse(format!(
                "unknown convention {other:?}; use \"gamma\" or \"capital\""
            ))),
        }
    }

    /// Builds the validated state; a command-line split/convention override
    /// wins over the file's own tags.
    pub fn to_state(
        &self,
        convention_override: Option<Convention>,
    ) -> Result<GaussianState, CliError> {
        let m = self.to_dmatrix()?;
        let convention = match convention_override {
            Some(c) => c,
            None => self.parsed_convention()?,
        };
        let cm = CovarianceMatrix::validate(m, convention, covar::tol::UNCERTAINTY)
            .map_err(from_lib)?
            .to_gamma();
        let displacement = match &self.displacement {
            Some(d) => {
                if d.len() != 2 * cm.modes() {
                    return Err(CliError::new(
                        EXIT_DIMENSION,
                        format!(
                            "displacement has {} entries, expected {}",
                            d.len(),
                            2 * cm.modes()
                        ),
                    ));
                }
                DisplacementVector::new(DVector::from_vec(d.clone())).map_err(from_lib)?
            }
            None => DisplacementVector::zeros(cm.modes()),
        };
        GaussianState::new(cm, displacement).map_err(from_lib)
    }

    /// The split from the file or command line, defaulting to `1 | (N-1)`.
    pub fn resolved_split(
        &self,
        cli_split: Option<(usize, usize)>,
        modes: usize,
    ) -> Result<ModeSplit, CliError> {
        let (n_a, n_b) = match (cli_split, self.split) {
            (Some(pair), _) => pair,
            (None, Some([a, b])) => (a, b),
            (None, None) => (1, modes.saturating_sub(1).max(1)),
        };
        let split = ModeSplit::new(n_a, n_b).map_err(from_lib)?;
        split.check(modes).map_err(from_lib)?;
        Ok(split)
    }
}

/// Serializes a state back into the file schema.
pub fn state_to_file(state: &GaussianState, split: Option<[usize; 2]>) -> MatrixFile {
    let m = state.cm.matrix();
    let matrix = (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect();
    MatrixFile {
        matrix,
        displacement: Some(state.displacement.vector().iter().copied().collect()),
        split,
        convention: Some("gamma".to_string()),
    }
}

/// Parses `A:B` into a split pair.
pub fn parse_split(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::parse(format!(
            "split must look like A:B, got {text:?}"
        )));
    }
    let a = parts[0]
        .trim()
        .parse()
        .map_err(|e| CliError::parse(format!("bad split: {e}")))?;
    let b = parts[1]
        .trim()
        .parse()
        .map_err(|e| CliError::parse(format!("bad split: {e}")))?;
    Ok((a, b))
}
