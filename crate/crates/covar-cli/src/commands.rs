//! Subcommand implementations. Each returns the stdout payload; errors
//! carry the documented exit codes.

use std::path::PathBuf;

use clap::Args;
use covar::measure::Strategy;
use covar::{
    certify_witness, duan_scan, duan_witness, log_negativity, minimal_witness_two_mode,
    simon_invariants, witness_value, Certification, Convention, GaussianState, MeasurementPlan,
    Witness,
};

use crate::io::{
    from_lib, parse_split, state_to_file, CliError, MatrixFile, EXIT_PARSE, EXIT_PLAN,
    EXIT_UNCERTIFIED,
};
use crate::report::{
    matrix_to_rows, to_json, AnalyzeReport, NegativityJson, PptReport, Provenance,
    SimonInvariantsReport, SimulateRow, SimulateSummary, VerdictWithTol, WitnessReport,
};

fn read_input(path: &PathBuf) -> Result<(MatrixFile, Vec<u8>), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    let file = MatrixFile::read(path)?;
    Ok((file, bytes))
}

fn convention_override(text: &Option<String>) -> Result<Option<Convention>, CliError> {
    match text.as_deref() {
        None => Ok(None),
        Some("gamma") => Ok(Some(Convention::Gamma)),
        Some("capital") | Some("capital_gamma") => Ok(Some(Convention::CapitalGamma)),
        Some(other) => Err(CliError::parse(format!(
            "unknown convention {other:?}; use gamma or capital"
        ))),
    }
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// State description (JSON or CSV).
    #[arg(long)]
    input: PathBuf,
    /// Bipartition as A:B mode counts; defaults to the file's split or
    /// 1:(N-1).
    #[arg(long)]
    split: Option<String>,
    /// Convention of the stored matrix: gamma (default) or capital.
    #[arg(long)]
    convention: Option<String>,
}

pub fn analyze(args: AnalyzeArgs) -> Result<String, CliError> {
    let (file, bytes) = read_input(&args.input)?;
    let conv = convention_override(&args.convention)?;
    let state = file.to_state(conv)?;
    let cm = &state.cm;
    let modes = cm.modes();

    let spectrum = cm.symplectic_spectrum();
    let min_eig = cm.min_eigenvalue();

    let mut report = AnalyzeReport {
        provenance: Provenance::new(&bytes, None),
        modes,
        convention: "gamma".to_string(),
        valid: VerdictWithTol {
            verdict: true,
            tolerance: covar::tol::UNCERTAINTY,
        },
        matrix: matrix_to_rows(cm.matrix()),
        determinant: cm.det(),
        symplectic_spectrum: spectrum.values().to_vec(),
        pure: VerdictWithTol {
            verdict: cm.is_pure(),
            tolerance: covar::tol::PURITY,
        },
        squeezed: VerdictWithTol {
            verdict: cm.is_squeezed(),
            tolerance: covar::tol::UNCERTAINTY,
        },
        min_eigenvalue: min_eig,
        simon_invariants: None,
        entanglement: None,
        negativity: None,
    };

    if modes == 2 {
        let inv = simon_invariants(cm).map_err(from_lib)?;
        report.simon_invariants = Some(SimonInvariantsReport {
            a: inv.a,
            b: inv.b,
            cd: inv.cd,
            det_gamma: inv.det_gamma,
        });
    }
    if modes >= 2 {
        let cli_split = args.split.as_deref().map(parse_split).transpose()?;
        let split = file.resolved_split(cli_split, modes)?;
        let negativity = log_negativity(cm, split).map_err(from_lib)?;
        report.entanglement = Some(PptReport {
            split: [split.n_a, split.n_b],
            pt_symplectic_spectrum: negativity.pt_spectrum.values().to_vec(),
            ppt: VerdictWithTol {
                verdict: negativity.pt_spectrum.min() >= 1.0 - covar::tol::UNCERTAINTY,
                tolerance: covar::tol::UNCERTAINTY,
            },
            sufficient: negativity.ppt_sufficient,
        });
        report.negativity = Some(NegativityJson {
            log_negativity: negativity.log_negativity,
            entangled: VerdictWithTol {
                verdict: negativity.entangled,
                tolerance: covar::tol::ENTANGLEMENT,
            },
        });
    }

    Ok(to_json(&report))
}

#[derive(Args)]
pub struct WitnessArgs {
    /// State description (JSON or CSV).
    #[arg(long)]
    input: PathBuf,
    /// Construct the minimal witness for the (two-mode) state.
    #[arg(long, conflicts_with_all = ["duan", "witness_file"])]
    minimal: bool,
    /// Duan-family witness: a parameter value like "a=1.5", or "scan" for
    /// the grid scan with refinement.
    #[arg(long, conflicts_with = "witness_file")]
    duan: Option<String>,
    /// Load the witness matrix from a file and certify it.
    #[arg(long)]
    witness_file: Option<PathBuf>,
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    convention: Option<String>,
}

pub fn witness(args: WitnessArgs) -> Result<String, CliError> {
    let (file, bytes) = read_input(&args.input)?;
    let conv = convention_override(&args.convention)?;
    let state = file.to_state(conv)?;
    let modes = state.cm.modes();
    let cli_split = args.split.as_deref().map(parse_split).transpose()?;
    let split = file.resolved_split(cli_split, modes)?;

    let (witness, source, best_parameter): (Witness, String, Option<f64>) = if args.minimal {
        let (w, _) = minimal_witness_two_mode(&state.cm, split).map_err(from_lib)?;
        (w, "minimal".to_string(), None)
    } else if let Some(spec) = &args.duan {
        if spec == "scan" {
            let scan = duan_scan(&state.cm).map_err(from_lib)?;
            let w = duan_witness(scan.best_a).map_err(from_lib)?;
            (w, "duan:scan".to_string(), Some(scan.best_a))
        } else {
            let a: f64 = spec
                .trim()
                .trim_start_matches("a=")
                .parse()
                .map_err(|e| CliError::parse(format!("bad Duan parameter {spec:?}: {e}")))?;
            let w = duan_witness(a).map_err(from_lib)?;
            (w, format!("duan:a={a}"), Some(a))
        }
    } else if let Some(path) = &args.witness_file {
        let wf = MatrixFile::read(path)?;
        let m = wf.to_dmatrix()?;
        let cert = certify_witness(&m, split).map_err(from_lib)?;
        if cert.class == Certification::NotWitness {
            return Err(CliError::new(
                EXIT_UNCERTIFIED,
                format!(
                    "matrix in {} is not an entanglement witness \
                     (min eigenvalue {:.3e}, str[Z_A]+str[Z_B] = {:.6})",
                    path.display(),
                    cert.min_eigenvalue,
                    cert.str_a + cert.str_b
                ),
            ));
        }
        let w = Witness::new(m, split).map_err(from_lib)?;
        (w, format!("file:{}", path.display()), None)
    } else {
        return Err(CliError::new(
            EXIT_PARSE,
            "choose a witness source: --minimal, --duan <a=V|scan> or --witness-file PATH",
        ));
    };

    let outcome = witness_value(&witness, &state).map_err(from_lib)?;
    let cert = witness.certification();
    let exact_log_negativity = if modes == 2 {
        Some(
            log_negativity(&state.cm, split)
                .map_err(from_lib)?
                .log_negativity,
        )
    } else {
        None
    };

    let report = WitnessReport {
        provenance: Provenance::new(&bytes, None),
        source,
        certification: match cert.class {
            Certification::GlobalWitness => "global_witness".to_string(),
            Certification::SplitWitness => "split_witness".to_string(),
            Certification::NotWitness => "not_witness".to_string(),
        },
        str_a: cert.str_a,
        str_b: cert.str_b,
        str_total: cert.str_total,
        certification_tolerance: covar::tol::CERTIFICATION,
        value: outcome.value,
        expectation_with_displacement: outcome.expectation_with_displacement,
        p_bound: outcome.p_bound,
        logneg_lower_bound: outcome.logneg_lower_bound,
        best_parameter,
        exact_log_negativity,
        witness_matrix: matrix_to_rows(witness.matrix()),
    };
    Ok(to_json(&report))
}

#[derive(Args)]
pub struct ProjectArgs {
    /// State description (JSON or CSV).
    #[arg(long)]
    input: PathBuf,
    /// Projection kind: "coherent", "homodyne:EPS", "homodyne:limit" or
    /// "schur:TARGET_FILE".
    #[arg(long)]
    kind: String,
    /// Homodyne outcome (displacement parameter), default 0.
    #[arg(long, default_value_t = 0.0)]
    outcome: f64,
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    convention: Option<String>,
}

pub fn project(args: ProjectArgs) -> Result<String, CliError> {
    let (file, _) = read_input(&args.input)?;
    let conv = convention_override(&args.convention)?;
    let state = file.to_state(conv)?;
    let modes = state.cm.modes();
    let cli_split = args.split.as_deref().map(parse_split).transpose()?;
    let split = file.resolved_split(cli_split, modes)?;

    let result = if args.kind == "coherent" {
        let target = covar::vacuum_cm(split.n_b).map_err(from_lib)?;
        let d = covar::DisplacementVector::zeros(split.n_b);
        covar::schur_project(&state, split, &target, &d).map_err(from_lib)?
    } else if let Some(rest) = args.kind.strip_prefix("homodyne:") {
        // x-quadrature measurement of the last mode
        if rest == "limit" {
            covar::homodyne_project_limit(&state, modes - 1, args.outcome).map_err(from_lib)?
        } else {
            let eps: f64 = rest
                .parse()
                .map_err(|e| CliError::parse(format!("bad homodyne width {rest:?}: {e}")))?;
            covar::homodyne_project(&state, modes - 1, eps, args.outcome).map_err(from_lib)?
        }
    } else if let Some(path) = args.kind.strip_prefix("schur:") {
        let tf = MatrixFile::read(&PathBuf::from(path))?;
        let target_state = tf.to_state(None)?;
        if target_state.modes() != split.n_b {
            return Err(CliError::new(
                crate::io::EXIT_DIMENSION,
                format!(
                    "target has {} modes but party B holds {}",
                    target_state.modes(),
                    split.n_b
                ),
            ));
        }
        covar::schur_project(&state, split, &target_state.cm, &target_state.displacement)
            .map_err(from_lib)?
    } else {
        return Err(CliError::parse(format!(
            "unknown projection kind {:?}; use coherent, homodyne:EPS, homodyne:limit or schur:FILE",
            args.kind
        )));
    };

    let reduced = GaussianState::new(result.cm, result.displacement).map_err(from_lib)?;
    let out = state_to_file(&reduced, None);
    Ok(to_json(&out))
}

#[derive(Args)]
pub struct SimulateArgs {
    /// True two-mode state (JSON or CSV).
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated total sample budgets.
    #[arg(long, default_value = "100,1000,10000,100000")]
    budgets: String,
    /// Repetitions per budget.
    #[arg(long, default_value_t = 200)]
    reps: u32,
    /// RNG seed; COVAR_SEED provides the default when set.
    #[arg(long)]
    seed: Option<u64>,
    /// Which strategies to run: both, ten or nine. A skipped strategy's CSV
    /// column holds nan.
    #[arg(long, default_value = "both")]
    strategy: String,
    /// Output format: csv (the comparison table) or json (full summary).
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    convention: Option<String>,
}

fn default_seed() -> u64 {
    std::env::var("COVAR_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(17)
}

pub fn simulate(args: SimulateArgs) -> Result<String, CliError> {
    let (file, bytes) = read_input(&args.input)?;
    let conv = convention_override(&args.convention)?;
    let state = file.to_state(conv)?;
    let truth = state.cm;
    let seed = args.seed.unwrap_or_else(default_seed);

    let budgets: Vec<u64> = args
        .budgets
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::new(EXIT_PLAN, format!("bad budget list: {e}")))?;
    if budgets.is_empty() {
        return Err(CliError::new(EXIT_PLAN, "budget list is empty"));
    }
    let (run_ten, run_nine) = match args.strategy.as_str() {
        "both" => (true, true),
        "ten" => (true, false),
        "nine" => (false, true),
        other => {
            return Err(CliError::new(
                EXIT_PLAN,
                format!("unknown strategy {other:?}; use both, ten or nine"),
            ))
        }
    };

    let mut rows = Vec::new();
    let mut exact_pt_min = f64::NAN;
    for (i, &budget) in budgets.iter().enumerate() {
        let budget_seed = seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut row = SimulateRow {
            log10_n: (budget as f64).log10(),
            delta_ten: f64::NAN,
            delta_nine: f64::NAN,
            mean_pt_min_ten: f64::NAN,
            mean_pt_min_nine: f64::NAN,
            invalid_ten: 0,
            invalid_nine: 0,
        };
        if run_ten {
            let plan = MeasurementPlan::new(Strategy::TenEntries, budget, args.reps, budget_seed)
                .map_err(from_lib)?;
            let rep = covar::simulate_strategy(&truth, &plan).map_err(from_lib)?;
            row.delta_ten = rep.deviation;
            row.mean_pt_min_ten = rep.mean_pt_min;
            row.invalid_ten = rep.invalid_repetitions;
            exact_pt_min = rep.exact_pt_min;
        }
        if run_nine {
            let plan = MeasurementPlan::new(Strategy::NineKinds, budget, args.reps, budget_seed)
                .map_err(from_lib)?;
            let rep = covar::simulate_strategy(&truth, &plan).map_err(from_lib)?;
            row.delta_nine = rep.deviation;
            row.mean_pt_min_nine = rep.mean_pt_min;
            row.invalid_nine = rep.invalid_repetitions;
            exact_pt_min = rep.exact_pt_min;
        }
        rows.push(row);
    }

    match args.format.as_str() {
        "csv" => {
            let mut out = String::from("log10_n,delta_ten,delta_nine\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{}\n",
                    covar::measure::fmt_sig(row.log10_n, 6),
                    covar::measure::fmt_sig(row.delta_ten, 6),
                    covar::measure::fmt_sig(row.delta_nine, 6),
                ));
            }
            // trailing newline is supplied by the final println
            Ok(out.trim_end().to_string())
        }
        "json" => {
            let summary = SimulateSummary {
                provenance: Provenance::new(&bytes, Some(seed)),
                strategy: args.strategy.clone(),
                budgets,
                repetitions: args.reps,
                exact_pt_min,
                rows,
            };
            Ok(to_json(&summary))
        }
        other => Err(CliError::new(
            EXIT_PLAN,
            format!("unknown format {other:?}; use csv or json"),
        )),
    }
}
