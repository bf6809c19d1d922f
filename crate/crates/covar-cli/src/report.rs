//! Structured JSON reports. Every verdict carries the tolerance it was
//! decided at, and the input hash / seed / tool version make runs
//! attributable.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(input_bytes: &[u8], seed: Option<u64>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(input_bytes);
        let digest = hasher.finalize();
        let input_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            tool: "covar",
            version: env!("CARGO_PKG_VERSION"),
            input_sha256,
            seed,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictWithTol {
    pub verdict: bool,
    pub tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct SimonInvariantsReport {
    pub a: f64,
    pub b: f64,
    pub cd: f64,
    pub det_gamma: f64,
}

#[derive(Debug, Serialize)]
pub struct PptReport {
    pub split: [usize; 2],
    pub pt_symplectic_spectrum: Vec<f64>,
    pub ppt: VerdictWithTol,
    /// Whether the PPT criterion is conclusive for this split.
    pub sufficient: bool,
}

#[derive(Debug, Serialize)]
pub struct NegativityJson {
    /// Natural-log units.
    pub log_negativity: f64,
    pub entangled: VerdictWithTol,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub provenance: Provenance,
    pub modes: usize,
    pub convention: String,
    pub valid: VerdictWithTol,
    pub matrix: Vec<Vec<f64>>,
    pub determinant: f64,
    pub symplectic_spectrum: Vec<f64>,
    pub pure: VerdictWithTol,
    pub squeezed: VerdictWithTol,
    pub min_eigenvalue: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simon_invariants: Option<SimonInvariantsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entanglement: Option<PptReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negativity: Option<NegativityJson>,
}

#[derive(Debug, Serialize)]
pub struct WitnessReport {
    pub provenance: Provenance,
    pub source: String,
    pub certification: String,
    pub str_a: f64,
    pub str_b: f64,
    pub str_total: f64,
    pub certification_tolerance: f64,
    /// `m = tr[Z gamma]`.
    pub value: f64,
    pub expectation_with_displacement: f64,
    /// The state is not p-separable for any p above this.
    pub p_bound: f64,
    pub logneg_lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_parameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_log_negativity: Option<f64>,
    pub witness_matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct SimulateSummary {
    pub provenance: Provenance,
    pub strategy: String,
    pub budgets: Vec<u64>,
    pub repetitions: u32,
    pub exact_pt_min: f64,
    pub rows: Vec<SimulateRow>,
}

#[derive(Debug, Serialize)]
pub struct SimulateRow {
    pub log10_n: f64,
    pub delta_ten: f64,
    pub delta_nine: f64,
    pub mean_pt_min_ten: f64,
    pub mean_pt_min_nine: f64,
    pub invalid_ten: u32,
    pub invalid_nine: u32,
}

pub fn matrix_to_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization")
}
