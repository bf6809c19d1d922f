//! Estimation of two-mode entanglement from homodyne statistics: the
//! nine-kind scheme (local diagonalization, coherent projection, recovery of
//! the invariants) and a seeded Monte-Carlo comparison against the plain
//! ten-entry strategy.
//!
//! Both strategies estimate the Simon invariants and evaluate the
//! closed-form spectra of the covariance matrix and its partial transpose;
//! they differ only in which Gaussian variances are measured. Repetitions
//! draw from independent counter-derived streams, so reports are
//! reproducible bit for bit and independent of evaluation order.

use nalgebra::{DMatrix, Matrix2};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::covariance::{invariants_of_gamma, CovarianceMatrix, SimonInvariants};
use crate::entanglement::{pt_symplectic_spectrum, ModeSplit};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sample::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Measure all ten independent entries of the covariance matrix.
    TenEntries,
    /// Measure the six local entries, project onto a coherent state, and
    /// measure the three entries of the reduced matrix.
    NineKinds,
}

impl Strategy {
    pub fn kinds(self) -> u64 {
        match self {
            Strategy::TenEntries => 10,
            Strategy::NineKinds => 9,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Strategy::TenEntries => "ten_entries",
            Strategy::NineKinds => "nine_kinds",
        }
    }
}

/// Sampling budget for one simulation run. The total budget is divided
/// evenly over the measurement kinds, `floor(total / kinds)` each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementPlan {
    pub strategy: Strategy,
    pub total_samples: u64,
    pub repetitions: u32,
    pub seed: u64,
}

impl MeasurementPlan {
    pub fn new(
        strategy: Strategy,
        total_samples: u64,
        repetitions: u32,
        seed: u64,
    ) -> Result<Self> {
        let plan = Self {
            strategy,
            total_samples,
            repetitions,
            seed,
        };
        if repetitions == 0 {
            return Err(Error::InvalidPlan("repetitions must be at least 1".into()));
        }
        if plan.per_kind_samples() < 2 {
            return Err(Error::InvalidPlan(format!(
                "total budget {total_samples} leaves fewer than 2 samples per kind"
            )));
        }
        Ok(plan)
    }

    pub fn per_kind_samples(&self) -> u64 {
        self.total_samples / self.strategy.kinds()
    }
}

/// Spectra for one sign choice of the coupling determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSpectra {
    pub cd: f64,
    /// Closed-form symplectic spectrum, descending.
    pub spectrum: [f64; 2],
    /// Closed-form partial-transpose spectrum, descending.
    pub pt_spectrum: [f64; 2],
}

/// Closed-form spectrum with negative discriminants clamped to zero; the
/// flag records whether clamping happened (only possible for noisy
/// estimates or exactly degenerate inputs).
fn eigs_clamped(a: f64, b: f64, cd: f64, det_gamma: f64, transposed: bool) -> ([f64; 2], bool) {
    let cd = if transposed { -cd } else { cd };
    let delta = a * a + b * b + 2.0 * cd;
    let disc = delta * delta - 4.0 * det_gamma;
    let mut clamped = false;
    let tiny = 1e-9 * (1.0 + det_gamma.abs());
    let root = if disc < 0.0 {
        if disc < -tiny {
            clamped = true;
        }
        0.0
    } else {
        disc.sqrt()
    };
    let mut take = |v: f64| {
        if v < 0.0 {
            if v < -tiny {
                clamped = true;
            }
            0.0
        } else {
            v.sqrt()
        }
    };
    let hi = take(0.5 * (delta + root));
    let lo = take(0.5 * (delta - root));
    ([hi, lo], clamped)
}

fn both_branches(a: f64, b: f64, det_c_abs: f64, det_gamma: f64) -> ([BranchSpectra; 2], bool) {
    let mut any_clamped = false;
    let mut branch = |cd: f64| {
        let (spectrum, c1) = eigs_clamped(a, b, cd, det_gamma, false);
        let (pt_spectrum, c2) = eigs_clamped(a, b, cd, det_gamma, true);
        any_clamped |= c1 || c2;
        BranchSpectra {
            cd,
            spectrum,
            pt_spectrum,
        }
    };
    let pos = branch(det_c_abs);
    let neg = branch(-det_c_abs);
    ([pos, neg], any_clamped)
}

/// Output of the nine-step pipeline on exact matrix entries.
#[derive(Debug, Clone, PartialEq)]
pub struct NineStepEstimate {
    pub invariants: SimonInvariants,
    /// `|det C|`; the scheme cannot observe the sign.
    pub det_c_abs: f64,
    /// Spectra for both sign choices; flipping the sign exchanges the roles
    /// of the plain and partially transposed spectra.
    pub branches: [BranchSpectra; 2],
    /// Smallest partial-transpose eigenvalue consistent with either branch.
    pub pt_min: f64,
    /// The verdict does not depend on the unknown sign.
    pub entangled: bool,
    /// True when some eigenvalue lies below one, which pins the branch.
    pub sign_resolved: bool,
    /// Index into `branches` of the resolved sign, when `sign_resolved`.
    pub resolved_branch: Option<usize>,
}

struct NinePipeline {
    a: f64,
    b: f64,
    /// The reduced matrix after the coherent projection of the second mode.
    reduced: Matrix2<f64>,
}

impl NinePipeline {
    /// Runs steps 1-4 in exact arithmetic: local determinants, the
    /// diagonalizing local transforms and the coherent projection
    /// `a I - C' C'^T / (b + 1)`.
    fn from_gamma(g: &DMatrix<f64>) -> Result<Self> {
        let a_block = g.view((0, 0), (2, 2)).clone_owned();
        let b_block = g.view((2, 2), (2, 2)).clone_owned();
        let c_block = g.view((0, 2), (2, 2)).clone_owned();
        let det_a = a_block.determinant();
        let det_b = b_block.determinant();
        if det_a <= 0.0 {
            return Err(Error::EstimationStep {
                step: 1,
                detail: format!("first local block has determinant {det_a}"),
            });
        }
        if det_b <= 0.0 {
            return Err(Error::EstimationStep {
                step: 2,
                detail: format!("second local block has determinant {det_b}"),
            });
        }
        let a = det_a.sqrt();
        let b = det_b.sqrt();
        let s_a = linalg::inv_sqrt_pd(&a_block).map_err(|_| Error::EstimationStep {
            step: 3,
            detail: "first local block is numerically singular".into(),
        })? * a.sqrt();
        let s_b = linalg::inv_sqrt_pd(&b_block).map_err(|_| Error::EstimationStep {
            step: 3,
            detail: "second local block is numerically singular".into(),
        })? * b.sqrt();
        let c_mid = &s_a * c_block * s_b.transpose();
        let reduced_dyn = DMatrix::identity(2, 2) * a - &c_mid * c_mid.transpose() / (b + 1.0);
        let reduced = Matrix2::new(
            reduced_dyn[(0, 0)],
            reduced_dyn[(0, 1)],
            reduced_dyn[(1, 0)],
            reduced_dyn[(1, 1)],
        );
        Ok(Self { a, b, reduced })
    }
}

/// Recovers `|det C|` and `det gamma` from the reduced matrix (steps 5-6):
/// `(det C)^2 = (b+1)^2 [(a - g_1)(a - g_3) - g_2^2]` and
/// `det gamma = det[(b+1) gamma'' - a I]`.
fn recover_invariants(a: f64, b: f64, g1: f64, g2: f64, g3: f64) -> (f64, f64, bool) {
    let det_c_sq = (b + 1.0).powi(2) * ((a - g1) * (a - g3) - g2 * g2);
    let clamped = det_c_sq < 0.0;
    let det_c_abs = det_c_sq.max(0.0).sqrt();
    let m = Matrix2::new(
        (b + 1.0) * g1 - a,
        (b + 1.0) * g2,
        (b + 1.0) * g2,
        (b + 1.0) * g3 - a,
    );
    (det_c_abs, m.determinant(), clamped)
}

/// Runs the full nine-step scheme on exact covariance-matrix entries and
/// assembles both sign branches. Degenerate intermediates are reported with
/// the failing step.
pub fn nine_step_estimate(cm: &CovarianceMatrix) -> Result<NineStepEstimate> {
    if cm.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: 2 * cm.modes(),
        });
    }
    let g = cm.gamma_matrix();
    let pipe = NinePipeline::from_gamma(&g)?;
    let (g1, g2, g3) = (
        pipe.reduced[(0, 0)],
        pipe.reduced[(0, 1)],
        pipe.reduced[(1, 1)],
    );
    let (det_c_abs, det_gamma, _) = recover_invariants(pipe.a, pipe.b, g1, g2, g3);
    let (branches, _) = both_branches(pipe.a, pipe.b, det_c_abs, det_gamma);

    let union_min = branches
        .iter()
        .flat_map(|br| br.spectrum.iter().chain(br.pt_spectrum.iter()))
        .fold(f64::INFINITY, |acc, &v| acc.min(v));
    let entangled = union_min < 1.0 - crate::tol::UNCERTAINTY;
    let pt_min = branches[0].pt_spectrum[1].min(branches[1].pt_spectrum[1]);
    let resolved_branch = if entangled {
        // the sub-unit value must belong to the partially transposed
        // spectrum, which identifies the sign
        Some(
            (0..2)
                .min_by(|&i, &j| {
                    branches[i].pt_spectrum[1]
                        .partial_cmp(&branches[j].pt_spectrum[1])
                        .unwrap()
                })
                .unwrap(),
        )
    } else {
        None
    };

    Ok(NineStepEstimate {
        invariants: SimonInvariants {
            a: pipe.a,
            b: pipe.b,
            cd: -det_c_abs,
            det_gamma,
        },
        det_c_abs,
        branches,
        pt_min,
        entangled,
        sign_resolved: resolved_branch.is_some(),
        resolved_branch,
    })
}

/// One repetition's estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionEstimate {
    pub a: f64,
    pub b: f64,
    pub det_c_abs: f64,
    pub det_gamma: f64,
    /// Sign of `det C` when the strategy observes it (ten entries only).
    pub cd_signed: Option<f64>,
    pub branches: [BranchSpectra; 2],
    /// The repetition's estimate of the smallest partial-transpose
    /// eigenvalue.
    pub pt_min_estimate: f64,
    /// False when the estimated matrix failed validity or a closed form had
    /// to be clamped; flagged, never dropped.
    pub valid: bool,
}

/// Monte-Carlo output for one strategy and budget.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub total_samples: u64,
    pub per_kind_samples: u64,
    pub repetitions: u32,
    pub seed: u64,
    /// Eigen-solver value of the target quantity on the true state.
    pub exact_pt_min: f64,
    pub estimates: Vec<RepetitionEstimate>,
    /// `sqrt( sum (est_i - exact)^2 / (M - 1) )`; for a single repetition
    /// the absolute error is reported instead (see
    /// `deviation_is_absolute`).
    pub deviation: f64,
    pub deviation_is_absolute: bool,
    pub mean_pt_min: f64,
    pub invalid_repetitions: u32,
    /// True when every repetition could pin the coupling sign (always true
    /// for the ten-entry strategy).
    pub sign_ambiguity_resolved: bool,
}

/// Unbiased sample variance of `n` draws from a centered Gaussian whose
/// true variance is the targeted matrix entry.
fn sampled_variance<R: Rng>(rng: &mut R, true_variance: f64, n: u64) -> f64 {
    let sd = true_variance.max(0.0).sqrt();
    let normal = Normal::new(0.0, sd).expect("finite standard deviation");
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let x: f64 = normal.sample(rng);
        sum += x;
        sum_sq += x * x;
    }
    let mean = sum / n as f64;
    (sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)
}

/// An off-diagonal entry is measured through the variance of a combined
/// quadrature `(R_i -+ R_j)/sqrt 2`, which a mixing transform places on the
/// diagonal: `(gamma_ii + gamma_jj -+ 2 gamma_ij) / 2`. Both combinations
/// come out of the two ports of the mixer; the simulated experimenter reads
/// the port with the smaller variance. Solving for the off-diagonal entry
/// afterwards reuses the separately estimated diagonals.
#[derive(Clone, Copy)]
struct PairKind {
    variance: f64,
    /// +1 when the difference port was read, -1 for the sum port.
    port: f64,
}

fn pair_kind(g: &DMatrix<f64>, i: usize, j: usize) -> PairKind {
    let diff = 0.5 * (g[(i, i)] + g[(j, j)] - 2.0 * g[(i, j)]);
    let sum = 0.5 * (g[(i, i)] + g[(j, j)] + 2.0 * g[(i, j)]);
    if diff <= sum {
        PairKind {
            variance: diff,
            port: 1.0,
        }
    } else {
        PairKind {
            variance: sum,
            port: -1.0,
        }
    }
}

fn offdiag_from_pair(gii: f64, gjj: f64, kind: PairKind, sampled: f64) -> f64 {
    kind.port * 0.5 * (gii + gjj - 2.0 * sampled)
}

fn simulate_ten<R: Rng>(g: &DMatrix<f64>, rng: &mut R, n: u64) -> RepetitionEstimate {
    let mut v = |t: f64| sampled_variance(rng, t, n);
    let e_diag = [v(g[(0, 0)]), v(g[(1, 1)]), v(g[(2, 2)]), v(g[(3, 3)])];
    let pairs = [(0usize, 1usize), (2, 3), (0, 2), (0, 3), (1, 2), (1, 3)];
    let mut est = DMatrix::zeros(4, 4);
    est[(0, 0)] = e_diag[0];
    est[(1, 1)] = e_diag[1];
    est[(2, 2)] = e_diag[2];
    est[(3, 3)] = e_diag[3];
    for &(i, j) in &pairs {
        let kind = pair_kind(g, i, j);
        let sampled = v(kind.variance);
        let off = offdiag_from_pair(est[(i, i)], est[(j, j)], kind, sampled);
        est[(i, j)] = off;
        est[(j, i)] = off;
    }

    let inv = invariants_of_gamma(&est);
    let cd_signed = inv.cd;
    let det_c_abs = cd_signed.abs();
    let (branches, clamped) = both_branches(inv.a, inv.b, det_c_abs, inv.det_gamma);
    let matched = if cd_signed >= 0.0 { 0 } else { 1 };
    let pt_min_estimate = branches[matched].pt_spectrum[1];
    let valid = !clamped && CovarianceMatrix::new(est).is_ok();
    RepetitionEstimate {
        a: inv.a,
        b: inv.b,
        det_c_abs,
        det_gamma: inv.det_gamma,
        cd_signed: Some(cd_signed),
        branches,
        pt_min_estimate,
        valid,
    }
}

fn simulate_nine<R: Rng>(g: &DMatrix<f64>, rng: &mut R, n: u64) -> RepetitionEstimate {
    let mut v = |t: f64| sampled_variance(rng, t, n);

    // steps 1-2: local blocks from six measured kinds
    let ea1 = v(g[(0, 0)]);
    let ea3 = v(g[(1, 1)]);
    let ka = pair_kind(g, 0, 1);
    let ea2 = offdiag_from_pair(ea1, ea3, ka, v(ka.variance));
    let eb1 = v(g[(2, 2)]);
    let eb3 = v(g[(3, 3)]);
    let kb = pair_kind(g, 2, 3);
    let eb2 = offdiag_from_pair(eb1, eb3, kb, v(kb.variance));

    let a_est = Matrix2::new(ea1, ea2, ea2, ea3);
    let b_est = Matrix2::new(eb1, eb2, eb2, eb3);
    let det_a = a_est.determinant();
    let det_b = b_est.determinant();
    let mut degenerate = det_a <= 0.0 || det_b <= 0.0;
    let a = det_a.max(0.0).sqrt();
    let b = det_b.max(0.0).sqrt();

    // step 3: local transforms from the *estimated* blocks; when an
    // estimate is not positive definite the untransformed state is used and
    // the repetition stays flagged
    let s_local = if degenerate {
        DMatrix::identity(4, 4)
    } else {
        let to_dyn = |m: &Matrix2<f64>| {
            DMatrix::from_row_slice(2, 2, &[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
        };
        let sa = linalg::inv_sqrt_pd(&to_dyn(&a_est));
        let sb = linalg::inv_sqrt_pd(&to_dyn(&b_est));
        match (sa, sb) {
            (Ok(sa), Ok(sb)) => {
                let mut s = DMatrix::zeros(4, 4);
                s.view_mut((0, 0), (2, 2)).copy_from(&(sa * a.sqrt()));
                s.view_mut((2, 2), (2, 2)).copy_from(&(sb * b.sqrt()));
                s
            }
            _ => {
                degenerate = true;
                DMatrix::identity(4, 4)
            }
        }
    };

    // step 4 happens physically: the true state is transformed and the
    // second mode projected onto a coherent state
    let transformed = linalg::symmetrized(&(&s_local * g * s_local.transpose()));
    let ap = transformed.view((0, 0), (2, 2)).clone_owned();
    let bp = transformed.view((2, 2), (2, 2)).clone_owned();
    let cp = transformed.view((0, 2), (2, 2)).clone_owned();
    let kernel = (bp + DMatrix::identity(2, 2))
        .try_inverse()
        .expect("B' + I is positive definite");
    let reduced = linalg::symmetrized(&(ap - &cp * kernel * cp.transpose()));

    // step 5: three measured kinds on the reduced one-mode state
    let g1 = v(reduced[(0, 0)]);
    let g3 = v(reduced[(1, 1)]);
    let kg = pair_kind(&reduced, 0, 1);
    let g2 = offdiag_from_pair(g1, g3, kg, v(kg.variance));

    // steps 5-7: recover the invariants and both sign branches
    let (det_c_abs, det_gamma, det_c_clamped) = recover_invariants(a, b, g1, g2, g3);
    let (branches, spec_clamped) = both_branches(a, b, det_c_abs, det_gamma);
    let pt_min_estimate = branches[0].pt_spectrum[1].min(branches[1].pt_spectrum[1]);
    RepetitionEstimate {
        a,
        b,
        det_c_abs,
        det_gamma,
        cd_signed: None,
        branches,
        pt_min_estimate,
        valid: !degenerate && !det_c_clamped && !spec_clamped,
    }
}

/// Runs the Monte-Carlo simulation of one strategy against a known true
/// state. Deterministic for a given plan; repetitions use independent
/// streams indexed by repetition number.
pub fn simulate_strategy(
    truth: &CovarianceMatrix,
    plan: &MeasurementPlan,
) -> Result<StrategyReport> {
    if truth.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: 2 * truth.modes(),
        });
    }
    let split = ModeSplit::new(1, 1)?;
    let exact_pt_min = pt_symplectic_spectrum(truth, split)?.min();
    let g = truth.gamma_matrix();
    let n = plan.per_kind_samples();

    let tag = match plan.strategy {
        Strategy::TenEntries => 1u64 << 32,
        Strategy::NineKinds => 2u64 << 32,
    };
    let estimates: Vec<RepetitionEstimate> = (0..plan.repetitions)
        .map(|rep| {
            let mut rng = stream_rng(plan.seed, tag | rep as u64);
            match plan.strategy {
                Strategy::TenEntries => simulate_ten(&g, &mut rng, n),
                Strategy::NineKinds => simulate_nine(&g, &mut rng, n),
            }
        })
        .collect();

    let m = plan.repetitions as f64;
    let sq_sum: f64 = estimates
        .iter()
        .map(|e| (e.pt_min_estimate - exact_pt_min).powi(2))
        .sum();
    let (deviation, deviation_is_absolute) = if plan.repetitions == 1 {
        ((estimates[0].pt_min_estimate - exact_pt_min).abs(), true)
    } else {
        ((sq_sum / (m - 1.0)).sqrt(), false)
    };
    let mean_pt_min = estimates.iter().map(|e| e.pt_min_estimate).sum::<f64>() / m;
    let invalid_repetitions = estimates.iter().filter(|e| !e.valid).count() as u32;
    let sign_ambiguity_resolved = match plan.strategy {
        Strategy::TenEntries => true,
        Strategy::NineKinds => estimates.iter().all(|e| {
            e.branches
                .iter()
                .flat_map(|br| br.spectrum.iter().chain(br.pt_spectrum.iter()))
                .any(|&v| v < 1.0)
        }),
    };

    Ok(StrategyReport {
        strategy: plan.strategy,
        total_samples: plan.total_samples,
        per_kind_samples: n,
        repetitions: plan.repetitions,
        seed: plan.seed,
        exact_pt_min,
        estimates,
        deviation,
        deviation_is_absolute,
        mean_pt_min,
        invalid_repetitions,
        sign_ambiguity_resolved,
    })
}

/// One row of the strategy comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub log10_n: f64,
    pub delta_ten: f64,
    pub delta_nine: f64,
}

/// Comparison of both strategies over a list of budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub ten_reports: Vec<StrategyReport>,
    pub nine_reports: Vec<StrategyReport>,
}

impl ComparisonTable {
    /// CSV with header `log10_n,delta_ten,delta_nine`, six significant
    /// digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("log10_n,delta_ten,delta_nine\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_sig(row.log10_n, 6),
                fmt_sig(row.delta_ten, 6),
                fmt_sig(row.delta_nine, 6)
            ));
        }
        out
    }
}

/// Formats with `sig` significant digits, positional where reasonable.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = (x.abs().log10() + 1e-12).floor() as i32;
    if exp < -4 || exp >= sig as i32 {
        format!("{:.*e}", sig - 1, x)
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

/// Runs both strategies for every budget in `budgets` with per-budget
/// derived seeds; deterministic for identical inputs.
pub fn compare_strategies(
    truth: &CovarianceMatrix,
    budgets: &[u64],
    repetitions: u32,
    seed: u64,
) -> Result<ComparisonTable> {
    if budgets.is_empty() {
        return Err(Error::InvalidPlan("budget list is empty".into()));
    }
    let mut rows = Vec::with_capacity(budgets.len());
    let mut ten_reports = Vec::with_capacity(budgets.len());
    let mut nine_reports = Vec::with_capacity(budgets.len());
    for (i, &budget) in budgets.iter().enumerate() {
        let budget_seed = seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let ten = simulate_strategy(
            truth,
            &MeasurementPlan::new(Strategy::TenEntries, budget, repetitions, budget_seed)?,
        )?;
        let nine = simulate_strategy(
            truth,
            &MeasurementPlan::new(Strategy::NineKinds, budget, repetitions, budget_seed)?,
        )?;
        rows.push(ComparisonRow {
            log10_n: (budget as f64).log10(),
            delta_ten: ten.deviation,
            delta_nine: nine.deviation,
        });
        ten_reports.push(ten);
        nine_reports.push(nine);
    }
    Ok(ComparisonTable {
        rows,
        ten_reports,
        nine_reports,
    })
}
