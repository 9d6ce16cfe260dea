//! Message-level Monte Carlo of the one-way rejection-sampling protocol.
//!
//! The classical transcript distribution is fixed by the solution and `δ`;
//! the output-state error is accounted analytically.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::feasible::{validate_feasible_solution, FeasibleSolution};
use crate::codec::{self, BitString, GeometricCode};
use crate::error::{check_open_unit, Error, Result};
use crate::qcore::Ensemble;
use crate::rng::{derived_rng, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Rejection sampling; flag bit 0.
    G,
    /// Some tuple already carries mass at least `1−δ`; flag bit 1.
    B,
}

#[derive(Debug, Clone, Serialize)]
pub struct CostRecord {
    pub x: usize,
    pub branch: Branch,
    /// Index of the first accepted copy (rejection branch only).
    pub k: Option<u64>,
    pub tuple: Vec<u64>,
    pub bits_total: usize,
    /// `(flag, index code, tuple code)` bit counts.
    pub bits_breakdown: (usize, usize, usize),
}

impl CostRecord {
    /// The exact bits sent for this trial.
    pub fn message(&self, code: &GeometricCode) -> Result<BitString> {
        let mut out = BitString::new();
        out.push(self.branch == Branch::B);
        if let Some(k) = self.k {
            code.encode_into(k, &mut out)?;
        }
        out.extend(&codec::tuple_encode(&self.tuple)?);
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub trials: usize,
    pub delta: f64,
    pub mean_cost: f64,
    pub stderr: f64,
    /// Expected cost by direct summation over `(x, tuple)` and the index code.
    pub exact_expected_cost: f64,
    /// `Σ_x p(x) Σ_t p(x,t) eps² + 2√δ + δ`.
    pub analytic_error_bound: f64,
    pub objective: f64,
    /// `objective + 2r·log₂max(objective, 2) + 4r + 2log₂(4/δ)`.
    pub cost_bound: f64,
    pub histogram: BTreeMap<usize, u64>,
    #[serde(skip)]
    pub records: Vec<CostRecord>,
}

/// Per-input sampling plan derived from a solution.
struct InputPlan {
    /// `(tuple, p)` with positive `p`, in solution order.
    outcomes: Vec<(Vec<u64>, f64)>,
    /// Tuple holding mass at least `1−δ`, if any.
    heavy: Option<(Vec<u64>, f64)>,
}

fn plans(sol: &FeasibleSolution, inputs: usize, delta: f64) -> Vec<InputPlan> {
    sol.by_input(inputs)
        .into_iter()
        .map(|group| {
            let outcomes: Vec<(Vec<u64>, f64)> = group
                .iter()
                .filter(|a| a.p > 0.0)
                .map(|a| (a.tuple.clone(), a.p))
                .collect();
            let heavy = outcomes
                .iter()
                .filter(|(_, p)| *p >= 1.0 - delta)
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .cloned();
            InputPlan { outcomes, heavy }
        })
        .collect()
}

/// Inverse-CDF draw from a finite distribution; falls back to the last entry
/// on round-off.
fn draw_index<R: Rng + ?Sized>(weights: impl Iterator<Item = f64> + Clone, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// First success index for per-trial success probability `q`: `⌈ln U / ln(1−q)⌉`.
pub fn geometric_draw<R: Rng + ?Sized>(q: f64, rng: &mut R) -> u64 {
    // U in (0, 1].
    let u = 1.0 - rng.random::<f64>();
    let k = (u.ln() / (1.0 - q).ln()).ceil();
    if k < 1.0 {
        1
    } else {
        k as u64
    }
}

fn ones(r: usize) -> Vec<u64> {
    vec![1; r]
}

pub fn simulate_one_way_protocol(
    ens: &Ensemble,
    sol: &FeasibleSolution,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<SimulationReport> {
    check_open_unit("delta", delta)?;
    if trials == 0 {
        return Err(Error::Empty("trials"));
    }
    let report = validate_feasible_solution(ens, sol)?;
    if !report.ok {
        return Err(Error::Infeasible(format!(
            "solution fails validation: {}",
            report
                .violations
                .iter()
                .map(|v| v.detail.as_str())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    let probs = ens.probabilities();
    let code = GeometricCode::new(delta)?;
    let plan = plans(sol, probs.len(), delta);
    let mut records = Vec::with_capacity(trials);
    let mut histogram = BTreeMap::new();
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for trial in 0..trials {
        let mut rng = derived_rng(seed, stream::PROTOCOL, trial as u64);
        let x = draw_index(probs.iter().copied(), &mut rng);
        let p = &plan[x];
        let rec = match &p.heavy {
            Some((t, pt)) => {
                let tuple = if rng.random::<f64>() < *pt { t.clone() } else { ones(sol.r) };
                let tbits = codec::tuple_length(&tuple);
                CostRecord {
                    x,
                    branch: Branch::B,
                    k: None,
                    tuple,
                    bits_total: 1 + tbits,
                    bits_breakdown: (1, 0, tbits),
                }
            }
            None => {
                let k = geometric_draw(code.success_prob(), &mut rng);
                let j = draw_index(p.outcomes.iter().map(|(_, w)| *w), &mut rng);
                let tuple = p.outcomes[j].0.clone();
                let kbits = code.length(k);
                let tbits = codec::tuple_length(&tuple);
                CostRecord {
                    x,
                    branch: Branch::G,
                    k: Some(k),
                    tuple,
                    bits_total: 1 + kbits + tbits,
                    bits_breakdown: (1, kbits, tbits),
                }
            }
        };
        let c = rec.bits_total as f64;
        sum += c;
        sum_sq += c * c;
        *histogram.entry(rec.bits_total).or_insert(0) += 1;
        records.push(rec);
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let objective = report.objective;
    let r = sol.r as f64;
    Ok(SimulationReport {
        trials,
        delta,
        mean_cost: mean,
        stderr: (var / n).sqrt(),
        exact_expected_cost: exact_expected_cost(ens, sol, delta)?,
        analytic_error_bound: report.error_budget_used + 2.0 * delta.sqrt() + delta,
        objective,
        cost_bound: objective + 2.0 * r * objective.max(2.0).log2() + 4.0 * r + 2.0 * (4.0 / delta).log2(),
        histogram,
        records,
    })
}

/// Expected message length by direct summation over inputs and tuples, with
/// the index code's expectation summed as a series.
pub fn exact_expected_cost(ens: &Ensemble, sol: &FeasibleSolution, delta: f64) -> Result<f64> {
    let probs = ens.probabilities();
    let code = GeometricCode::new(delta)?;
    let index_bits = code.expected_length();
    let ones_bits = codec::tuple_length(&ones(sol.r)) as f64;
    let mut total = 0.0;
    for (x, p) in plans(sol, probs.len(), delta).iter().enumerate() {
        let per_input = match &p.heavy {
            Some((t, pt)) => 1.0 + pt * codec::tuple_length(t) as f64 + (1.0 - pt) * ones_bits,
            None => {
                1.0 + index_bits
                    + p.outcomes
                        .iter()
                        .map(|(t, w)| w * codec::tuple_length(t) as f64)
                        .sum::<f64>()
            }
        };
        total += probs[x] * per_input;
    }
    Ok(total)
}
