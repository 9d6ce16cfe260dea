//! The `oqc` command line: argument parsing, input loading and the artifact
//! envelope `{inputs, seed, version, results}`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chansim::{self, CqChannel, SimulationMode};
use crate::error::{Error, Result};
use crate::hardens::{self, HardEnsembleParams};
use crate::qcore::{self, haar, DensityOperator, Ensemble, HilbertDim, PureState};
use crate::redist::{self, BasisMode, RedistParams};
use crate::rng::{derived_rng, stream};
use crate::splitsim::{self, ConvexSplitInstance, FeasibleSolution};
use crate::{codec, smooth, verify};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const PROPERTY: i32 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "oqc", version, about = "One-shot quantum communication cost laboratory")]
pub struct RunConfig {
    /// Run seed; every artifact records it.
    #[arg(long, global = true, env = "OQC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Hard ensembles: build and check.
    #[command(subcommand)]
    Ensemble(EnsembleCmd),
    /// Information measures on JSON states.
    #[command(subcommand)]
    Measures(MeasuresCmd),
    /// Smoothed max-relative entropy bounds.
    #[command(subcommand)]
    Smooth(SmoothCmd),
    /// State splitting: feasible solutions, protocol, convex split, combinatorics.
    #[command(subcommand)]
    Split(SplitCmd),
    /// State redistribution example.
    #[command(subcommand)]
    Redist(RedistCmd),
    /// Classical-quantum channel calculators.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Run the full invariant suite.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleCmd {
    /// Sample a hard ensemble and run its concentration checks.
    Build(EnsembleBuildArgs),
    /// Re-run the concentration and entropy checks on a saved ensemble.
    Check(EnsembleCheckArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct EnsembleBuildArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 20)]
    pub max_retries: usize,
    /// Evaluate the d²×d² check beyond the default size cap.
    #[arg(long)]
    pub force_z3: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EnsembleCheckArgs {
    #[arg(long)]
    pub ensemble: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasuresCmd {
    /// Max-relative entropy D_max(rho || sigma).
    Dmax(PairArgs),
    /// Fidelity and purified distance.
    Fidelity(PairArgs),
    /// Von Neumann entropy.
    Entropy(SingleArgs),
    /// Conditional mutual information I(A;C|B).
    Cqmi(CqmiArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    /// Density operator or pure state JSON.
    #[arg(long)]
    pub rho: PathBuf,
    #[arg(long)]
    pub sigma: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SingleArgs {
    #[arg(long)]
    pub rho: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CqmiArgs {
    #[arg(long)]
    pub rho: PathBuf,
    /// Comma-separated register labels.
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub c: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<String>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothCmd {
    /// Closed-form smoothed overlap and the per-state D_max lower bound.
    Overlap(OverlapArgs),
    /// Ensemble-level minimum over side states.
    Qstar(QstarArgs),
    /// Averaged 2^(-D_max) bound over an ensemble.
    AvgBound(AvgBoundArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct OverlapArgs {
    #[arg(long)]
    pub psi: PathBuf,
    #[arg(long)]
    pub omega: PathBuf,
    #[arg(long)]
    pub nu: f64,
    /// Split threshold; defaults to d/4.
    #[arg(long)]
    pub k: Option<f64>,
    /// Also run the (slow) search-based upper estimate.
    #[arg(long)]
    pub upper: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct QstarArgs {
    #[arg(long)]
    pub ensemble: PathBuf,
    #[arg(long)]
    pub nu: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct AvgBoundArgs {
    #[arg(long)]
    pub ensemble: PathBuf,
    /// Side state; maximally mixed when omitted.
    #[arg(long)]
    pub omega: Option<PathBuf>,
    #[arg(long)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitCmd {
    /// Check a feasible solution against an ensemble.
    Validate(ValidateArgs),
    /// Monte Carlo run of the one-way protocol.
    Simulate(SimulateArgs),
    /// Convex-split certificate for an instance.
    ConvexSplit(ConvexSplitArgs),
    /// Ordered factorizations and log-product minima.
    Combinatorics(CombinatoricsArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub ensemble: PathBuf,
    #[arg(long)]
    pub solution: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Ensemble on registers A, C; a four-state product example when omitted.
    #[arg(long)]
    pub ensemble: Option<PathBuf>,
    /// Feasible solution; the identity-coding baseline when omitted.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Write every trial's message bits here as JSON lines.
    #[arg(long)]
    pub dump_transcript: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvexSplitArgs {
    /// Instance JSON; a random qubit instance when omitted.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Slots in the random instance.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CombinatoricsArgs {
    /// Count ordered factorizations of k into r factors.
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    /// Minimize the expected log-product at this budget.
    #[arg(long)]
    pub b: Option<f64>,
    /// With --gamma, evaluate the simple lower bound at this Q* value.
    #[arg(long)]
    pub q_star: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RedistCmd {
    /// Build the state pair and its low-entropy spectrum.
    Build(RedistArgs),
    /// Check that the pair is related by the stated rescaling.
    Verify(RedistArgs),
    /// Entropic quantities of the pair.
    Quantities(RedistArgs),
    /// Parameter calculators for the worst-case bound.
    Params(RedistParamsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisModeArg {
    FixedC,
    RandomC,
}

#[derive(Debug, Args, Serialize)]
pub struct RedistArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub d_a: usize,
    #[arg(long, default_value_t = 4.0)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = BasisModeArg::FixedC)]
    pub mode: BasisModeArg,
}

#[derive(Debug, Args, Serialize)]
pub struct RedistParamsArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// With --delta, evaluate the worst-case bound at this log₂ d.
    #[arg(long)]
    pub log2_d: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelCmd {
    /// Capacity of the channel induced by an ensemble.
    Capacity(CapacityArgs),
    /// One-shot capacity upper bound (C + H(eta))/(1 - eta).
    Upper(UpperArgs),
    /// Simulation-cost lower bound for a mode.
    SimLower(SimLowerArgs),
    /// Smallest dimension where simulation cost exceeds capacity.
    Crossover(CrossoverArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CapacityArgs {
    #[arg(long)]
    pub ensemble: PathBuf,
    /// With --eps, report the hard-ensemble capacity bound.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct UpperArgs {
    #[arg(long)]
    pub capacity: f64,
    #[arg(long)]
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Oneway,
    Rounds,
    Interactive,
}

#[derive(Debug, Args, Serialize)]
pub struct SimLowerArgs {
    #[arg(long, required_unless_present = "log2_d")]
    pub d: Option<f64>,
    /// Dimension given as log₂ d, for sizes beyond f64 integers.
    #[arg(long, conflicts_with = "d")]
    pub log2_d: Option<f64>,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Oneway)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 2)]
    pub rounds: u32,
    /// Report the value even when the admissibility gate fails.
    #[arg(long)]
    pub ungated: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CrossoverArgs {
    #[arg(long, default_value_t = 60.0)]
    pub max_log2_d: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = verify::DEFAULT_INSTANCES)]
    pub instances: usize,
}

/// A computed payload plus the exit status it warrants.
struct Outcome {
    results: Value,
    status: i32,
}

impl Outcome {
    fn ok(results: impl Serialize) -> Result<Self> {
        Ok(Outcome {
            results: serde_json::to_value(results)?,
            status: exit::OK,
        })
    }

    fn checked(results: impl Serialize, passed: bool, failure_status: i32) -> Result<Self> {
        Ok(Outcome {
            results: serde_json::to_value(results)?,
            status: if passed { exit::OK } else { failure_status },
        })
    }
}

/// Reads `T` from a file holding either the bare object or an artifact
/// envelope whose `results.<key>` holds it.
pub fn read_input<T: DeserializeOwned>(path: &Path, key: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    match value.get("results").and_then(|r| r.get(key)) {
        Some(inner) if value.get("version").is_some() => Ok(serde_json::from_value(inner.clone())?),
        _ => Ok(serde_json::from_value(value)?),
    }
}

/// A density operator, or a pure state promoted to one.
fn read_state(path: &Path) -> Result<DensityOperator> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    let value = match value.get("results") {
        Some(r) if value.get("version").is_some() => r.clone(),
        _ => value,
    };
    if value.get("vector").is_some() {
        Ok(serde_json::from_value::<PureState>(value)?.density())
    } else {
        Ok(serde_json::from_value(value)?)
    }
}

fn read_pure(path: &Path) -> Result<PureState> {
    read_input(path, "state")
}

fn labels(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Two qubits `A ⊗ C` holding the four product basis states uniformly.
pub fn example_ensemble() -> Ensemble {
    let dim = HilbertDim::of(&[("A", 2), ("C", 2)]).expect("static layout");
    let states = (0..4)
        .map(|k| PureState::basis(dim.clone(), k).expect("basis index in range"))
        .collect();
    Ensemble::uniform(states).expect("uniform ensemble")
}

fn recover_samples(ens: &Ensemble, delta: f64) -> Result<Vec<PureState>> {
    let d = ens.dim().total();
    let dim = HilbertDim::single("C", d);
    let anchor = (1.0 - delta).sqrt();
    ens.items()
        .iter()
        .map(|(_, s)| {
            let mut v = s.vector().clone();
            v[0] -= qcore::linalg::cr(anchor);
            PureState::normalized(v / qcore::linalg::cr(delta.sqrt()), dim.clone())
        })
        .collect()
}

fn ensemble_cmd(cmd: &EnsembleCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        EnsembleCmd::Build(a) => {
            let params = HardEnsembleParams::new(a.d, a.delta, a.m, a.eps, seed)?;
            let built = hardens::build_hard_ensemble(&params, a.max_retries, a.force_z3)?;
            let entropy = hardens::entropy_bound_check(&built.ensemble, a.delta, built.report.realized_eps())?;
            Outcome::ok(json!({
                "ensemble": built.ensemble,
                "concentration": built.report,
                "attempts": built.attempts,
                "entropy": entropy,
                "prescribed_m": params.prescribed_m(),
            }))
        }
        EnsembleCmd::Check(a) => {
            let ens: Ensemble = read_input(&a.ensemble, "ensemble")?;
            let samples = recover_samples(&ens, a.delta)?;
            let report = hardens::concentration_check(&samples, a.delta, a.eps, false)?;
            let entropy = hardens::entropy_bound_check(&ens, a.delta, report.realized_eps())?;
            let passed = report.all_passed() && entropy.ok;
            Outcome::checked(
                json!({"concentration": report, "entropy": entropy, "passed": passed}),
                passed,
                exit::PROPERTY,
            )
        }
    }
}

fn measures_cmd(cmd: &MeasuresCmd) -> Result<Outcome> {
    match cmd {
        MeasuresCmd::Dmax(a) => {
            let (rho, sigma) = (read_state(&a.rho)?, read_state(&a.sigma)?);
            let v = qcore::dmax(&rho, &sigma)?;
            Outcome::ok(json!({ "dmax": finite_or_label(v) }))
        }
        MeasuresCmd::Fidelity(a) => {
            let (rho, sigma) = (read_state(&a.rho)?, read_state(&a.sigma)?);
            Outcome::ok(json!({
                "fidelity": qcore::fidelity(&rho, &sigma)?,
                "purified_distance": qcore::purified_distance(&rho, &sigma)?,
            }))
        }
        MeasuresCmd::Entropy(a) => {
            let rho = read_state(&a.rho)?;
            Outcome::ok(json!({ "entropy": qcore::von_neumann_entropy(&rho)? }))
        }
        MeasuresCmd::Cqmi(a) => {
            let rho = read_state(&a.rho)?;
            let v = qcore::cqmi(&rho, &labels(&a.a), &labels(&a.c), &labels(&a.b))?;
            Outcome::ok(json!({ "cqmi": v }))
        }
    }
}

/// JSON has no infinities; `+∞` is written as the string "inf".
fn finite_or_label(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn smooth_cmd(cmd: &SmoothCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        SmoothCmd::Overlap(a) => {
            let psi = read_pure(&a.psi)?;
            let omega: DensityOperator = read_input(&a.omega, "omega")?;
            let k = a.k.unwrap_or(omega.d() as f64 / 4.0);
            let split = smooth::split_projectors(&omega, k)?;
            let overlap = qcore::linalg::expectation(&split.qminus, psi.vector());
            let upper = if a.upper {
                Some(finite_or_label(smooth::smooth_dmax_upper_estimate(&psi, &omega, a.nu, seed)?))
            } else {
                None
            };
            Outcome::ok(json!({
                "k": k,
                "rank_minus": split.rank_minus(),
                "rank_plus": split.rank_plus(),
                "overlap": overlap,
                "smoothed_overlap": smooth::smoothed_overlap_closed_form(&psi, &split.qminus, a.nu)?,
                "lower_bound": smooth::smooth_dmax_lower_bound(&psi, &omega, a.nu, k)?,
                "layered_lower_bound": finite_or_label(smooth::layered_smooth_dmax_lower_bound(&psi, &omega, a.nu)?),
                "dmax": qcore::dmax_pure(&psi, &omega)?,
                "upper_estimate": upper,
            }))
        }
        SmoothCmd::Qstar(a) => {
            let ens: Ensemble = read_input(&a.ensemble, "ensemble")?;
            let candidates = smooth::default_candidates(&ens, seed);
            Outcome::ok(smooth::q_star(&ens, a.nu, &candidates, false)?)
        }
        SmoothCmd::AvgBound(a) => {
            let ens: Ensemble = read_input(&a.ensemble, "ensemble")?;
            let omega = match &a.omega {
                Some(p) => read_input(p, "omega")?,
                None => DensityOperator::maximally_mixed(ens.dim().clone()),
            };
            Outcome::ok(smooth::ensemble_avg_2pow_neg_dmax_bound(&ens, &omega, a.nu, a.delta, a.k)?)
        }
    }
}

/// Random qubit instance: `p` drawn with every entry below `1 − δ`, and
/// `ω_i = p_iΨ^i + (1 − p_i)σ_i` so each constraint holds.
fn random_convex_split_instance(n: usize, delta: f64, seed: u64) -> Result<ConvexSplitInstance> {
    if (n as f64) * (1.0 - delta) <= 1.0 {
        return Err(Error::Infeasible(format!("{n} slots cannot all stay below 1 - delta")));
    }
    let dim = HilbertDim::single("C", 2);
    let mut rng = derived_rng(seed, stream::PROTOCOL, 0);
    let p = loop {
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|w| w / total).collect();
        if p.iter().all(|&x| x < 1.0 - delta) {
            break p;
        }
    };
    let mut psi = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    for &pi in &p {
        let target = haar::random_density(&dim, 2, &mut rng);
        let other = haar::random_density(&dim, 2, &mut rng);
        omega.push(DensityOperator::mixture(&[(pi, &target), (1.0 - pi, &other)])?);
        psi.push(target);
    }
    Ok(ConvexSplitInstance { p, psi, omega, delta })
}

fn split_cmd(cmd: &SplitCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        SplitCmd::Validate(a) => {
            let ens: Ensemble = read_input(&a.ensemble, "ensemble")?;
            let sol: FeasibleSolution = read_input(&a.solution, "solution")?;
            let report = splitsim::validate_feasible_solution(&ens, &sol)?;
            let ok = report.ok;
            Outcome::checked(report, ok, exit::VALIDATION)
        }
        SplitCmd::Simulate(a) => {
            let ens = match &a.ensemble {
                Some(p) => read_input(p, "ensemble")?,
                None => example_ensemble(),
            };
            let sol = match &a.solution {
                Some(p) => read_input(p, "solution")?,
                None => splitsim::baseline_solution(&ens, a.r, a.eta)?,
            };
            let report = splitsim::simulate_one_way_protocol(&ens, &sol, a.delta, a.trials, seed)?;
            if let Some(path) = &a.dump_transcript {
                let code = codec::GeometricCode::new(a.delta)?;
                let mut lines = String::new();
                for rec in &report.records {
                    let bits = rec.message(&code)?;
                    let line = json!({ "record": rec, "bits": bits.to_string() });
                    writeln!(lines, "{line}").expect("write to String");
                }
                std::fs::write(path, lines)?;
            }
            Outcome::ok(json!({ "solution": sol, "report": report }))
        }
        SplitCmd::ConvexSplit(a) => {
            let inst = match &a.instance {
                Some(p) => read_input(p, "instance")?,
                None => random_convex_split_instance(a.n, a.delta, seed)?,
            };
            let res = splitsim::convex_split_build(&inst)?;
            let (dmax, budget) = splitsim::convex_split_certificate(&inst, &res)?;
            let ok = dmax <= budget + 1e-9;
            Outcome::checked(
                json!({
                    "instance": inst,
                    "dmax": dmax,
                    "budget": budget,
                    "normalizations": res.normalizations,
                    "typ_zero_cap": res.typ_zero_cap,
                    "coefficients": res.coefficients,
                    "certified": ok,
                }),
                ok,
                exit::PROPERTY,
            )
        }
        SplitCmd::Combinatorics(a) => {
            let mut out = serde_json::Map::new();
            if let Some(k) = a.k {
                out.insert(
                    "ordered_factorizations".into(),
                    json!(splitsim::ordered_factorizations(k, a.r)?.to_string()),
                );
            }
            if let Some(b) = a.b {
                out.insert("min_expected_log_product".into(), serde_json::to_value(splitsim::min_expected_log_product(b, a.r)?)?);
            }
            if let (Some(q), Some(g)) = (a.q_star, a.gamma) {
                out.insert("simple_lower_bound".into(), json!(splitsim::simple_lower_bound(q, g, a.r)?));
            }
            if out.is_empty() {
                return Err(Error::Empty("give --k, --b, or --q-star with --gamma"));
            }
            Outcome::ok(Value::Object(out))
        }
    }
}

fn redist_params(a: &RedistArgs, seed: u64) -> Result<RedistParams> {
    let mode = match a.mode {
        BasisModeArg::FixedC => BasisMode::FixedC,
        BasisModeArg::RandomC => BasisMode::RandomC,
    };
    RedistParams::new(a.d, a.d_a, a.beta, mode, seed)
}

fn redist_cmd(cmd: &RedistCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        RedistCmd::Build(a) => {
            let pair = redist::build_redist_pair(&redist_params(a, seed)?)?;
            Outcome::ok(json!({
                "pair": pair,
                "spectrum": redist::low_entropy_spectrum(a.d, a.beta)?,
            }))
        }
        RedistCmd::Verify(a) => {
            let pair = redist::build_redist_pair(&redist_params(a, seed)?)?;
            let deviation = redist::verify_rescaling(&pair)?;
            let ok = deviation <= 1e-9;
            Outcome::checked(json!({ "max_deviation": deviation, "passed": ok }), ok, exit::PROPERTY)
        }
        RedistCmd::Quantities(a) => {
            let pair = redist::build_redist_pair(&redist_params(a, seed)?)?;
            Outcome::ok(redist::redist_quantities(&pair)?)
        }
        RedistCmd::Params(a) => {
            let mut out = serde_json::Map::new();
            if let (Some(p), Some(eps)) = (a.p, a.eps) {
                out.insert("contradiction".into(), serde_json::to_value(redist::contradiction_params(p, eps)?)?);
            }
            if let (Some(l), Some(delta)) = (a.log2_d, a.delta) {
                out.insert("worst_case".into(), serde_json::to_value(redist::worst_case_redist_bound(l.exp2(), delta)?)?);
            }
            if out.is_empty() {
                return Err(Error::Empty("give --p with --eps, or --log2-d with --delta"));
            }
            Outcome::ok(Value::Object(out))
        }
    }
}

fn channel_cmd(cmd: &ChannelCmd) -> Result<Outcome> {
    match cmd {
        ChannelCmd::Capacity(a) => {
            let ens: Ensemble = read_input(&a.ensemble, "ensemble")?;
            let ch = CqChannel::from_ensemble(&ens)?;
            let capacity = chansim::cq_capacity(&ch)?;
            let d = ens.dim().total() as f64;
            let bound = match (a.delta, a.eps) {
                (Some(delta), Some(eps)) => Some((delta + eps) * d.log2() + qcore::binary_entropy(delta) + 1.0),
                _ => None,
            };
            Outcome::ok(json!({
                "capacity": capacity,
                "inputs": ch.inputs(),
                "d": d,
                "hard_ensemble_bound": bound,
                "within_bound": bound.map(|b| capacity <= b + 1e-9),
            }))
        }
        ChannelCmd::Upper(a) => Outcome::ok(json!({
            "upper": chansim::one_shot_capacity_upper(a.capacity, a.eta)?,
            "binary_entropy_eta": qcore::binary_entropy(a.eta),
        })),
        ChannelCmd::SimLower(a) => {
            let d = match (a.d, a.log2_d) {
                (Some(d), _) => d,
                (None, Some(l)) => l.exp2(),
                (None, None) => return Err(Error::Empty("dimension (--d or --log2-d)")),
            };
            let mode = match a.mode {
                ModeArg::Oneway => SimulationMode::OneWay,
                ModeArg::Rounds => SimulationMode::Rounds(a.rounds),
                ModeArg::Interactive => SimulationMode::Interactive,
            };
            let b = if a.ungated {
                chansim::simulation_cost_lower(d, a.delta, a.eta, mode)?
            } else {
                chansim::simulation_cost_lower_checked(d, a.delta, a.eta, mode)?
            };
            Outcome::ok(b)
        }
        ChannelCmd::Crossover(a) => Outcome::ok(chansim::separation_crossover(a.max_log2_d)?),
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.command {
        Command::Ensemble(c) => ensemble_cmd(c, cfg.seed),
        Command::Measures(c) => measures_cmd(c),
        Command::Smooth(c) => smooth_cmd(c, cfg.seed),
        Command::Split(c) => split_cmd(c, cfg.seed),
        Command::Redist(c) => redist_cmd(c, cfg.seed),
        Command::Channel(c) => channel_cmd(c),
        Command::VerifyAll(a) => {
            let report = verify::verify_all(cfg.seed, a.instances);
            let ok = report.all_passed;
            Outcome::checked(report, ok, exit::PROPERTY)
        }
    }
}

/// `{inputs, seed, version, results}`; serde_json's default map keeps keys sorted.
pub fn envelope(cfg: &RunConfig, results: Value) -> Result<Value> {
    Ok(json!({
        "inputs": serde_json::to_value(&cfg.command)?,
        "seed": cfg.seed,
        "version": VERSION,
        "results": results,
    }))
}

/// Flattens a JSON value into `path,value` rows.
pub fn to_csv(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), x, out);
                }
            }
            Value::String(s) => writeln!(out, "{prefix},\"{}\"", s.replace('"', "\"\"")).expect("write to String"),
            other => writeln!(out, "{prefix},{other}").expect("write to String"),
        }
    }
    let mut out = String::from("key,value\n");
    walk("", value, &mut out);
    out
}

fn emit(cfg: &RunConfig, artifact: &Value) -> Result<()> {
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(artifact)? + "\n",
        Format::Csv => to_csv(artifact),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Parses, runs and writes one command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return status;
        }
    };
    let outcome = match dispatch(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::VALIDATION;
        }
    };
    let written = envelope(&cfg, outcome.results).and_then(|artifact| emit(&cfg, &artifact));
    if let Err(e) = written {
        eprintln!("error: {e}");
        return exit::VALIDATION;
    }
    outcome.status
}
