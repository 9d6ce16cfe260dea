//! Feasible solutions of the `Q(η, r)` program and their validator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{self, DensityOperator, Ensemble};

/// Slack used by every feasibility comparison.
pub const FEAS_TOL: f64 = 1e-9;

/// One `(x, tuple)` entry: probability, smoothing radius and the smoothed
/// state certifying the max-relative-entropy constraint.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assignment {
    pub x: usize,
    pub tuple: Vec<u64>,
    pub p: f64,
    pub eps: f64,
    pub witness: DensityOperator,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibleSolution {
    pub r: usize,
    pub eta: f64,
    pub tuples: Vec<Vec<u64>>,
    /// Side state on `C` for each entry of `tuples`.
    pub omega: Vec<DensityOperator>,
    pub assignments: Vec<Assignment>,
}

impl FeasibleSolution {
    pub fn tuple_index(&self, t: &[u64]) -> Option<usize> {
        self.tuples.iter().position(|u| u == t)
    }

    /// Assignments grouped by `x`, in input order.
    pub fn by_input(&self, inputs: usize) -> Vec<Vec<&Assignment>> {
        let mut out = vec![Vec::new(); inputs];
        for a in &self.assignments {
            if a.x < inputs {
                out[a.x].push(a);
            }
        }
        out
    }

    /// `Σ_x p(x) Σ_t p(x,t) log₂Πt`.
    pub fn objective(&self, input_probs: &[f64]) -> f64 {
        self.assignments
            .iter()
            .filter(|a| a.x < input_probs.len())
            .map(|a| input_probs[a.x] * a.p * log_product(&a.tuple))
            .sum()
    }

    /// `Σ_x p(x) Σ_t p(x,t) eps(x,t)²`.
    pub fn error_budget_used(&self, input_probs: &[f64]) -> f64 {
        self.assignments
            .iter()
            .filter(|a| a.x < input_probs.len())
            .map(|a| input_probs[a.x] * a.p * a.eps * a.eps)
            .sum()
    }
}

pub fn log_product(t: &[u64]) -> f64 {
    t.iter().map(|&i| (i as f64).log2()).sum()
}

/// The `C` marginal of every ensemble member: the reduction onto register `C`
/// when the layout has one, else the whole state.
pub fn c_marginals(ens: &Ensemble) -> Result<Vec<DensityOperator>> {
    ens.items()
        .iter()
        .map(|(_, psi)| {
            if psi.dim().has("C") && psi.dim().registers().len() > 1 {
                qcore::reduced_pure(psi, &["C"])
            } else {
                Ok(psi.density())
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Violation {
    pub kind: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub objective: f64,
    pub error_budget_used: f64,
    pub error_budget: f64,
    pub violations: Vec<Violation>,
}

fn violation(out: &mut Vec<Violation>, kind: &str, detail: String) {
    out.push(Violation {
        kind: kind.to_string(),
        detail,
    });
}

/// Checks every constraint of the program; never fails, listing violations instead.
pub fn validate_feasible_solution(ens: &Ensemble, sol: &FeasibleSolution) -> Result<ValidationReport> {
    let marginals = c_marginals(ens)?;
    let c_dim = marginals[0].d();
    let probs = ens.probabilities();
    let mut v = Vec::new();

    if sol.r == 0 {
        violation(&mut v, "structure", "r must be at least 1".into());
    }
    if !(sol.eta > 0.0 && sol.eta < 1.0) {
        violation(&mut v, "structure", format!("eta = {} outside (0,1)", sol.eta));
    }
    if sol.omega.len() != sol.tuples.len() {
        violation(
            &mut v,
            "structure",
            format!("{} tuples but {} side states", sol.tuples.len(), sol.omega.len()),
        );
    }
    for (j, t) in sol.tuples.iter().enumerate() {
        if t.len() != sol.r || t.contains(&0) {
            violation(&mut v, "structure", format!("tuple {t:?} is not an r-tuple of positive integers"));
        }
        if sol.tuples[..j].contains(t) {
            violation(&mut v, "structure", format!("tuple {t:?} listed twice"));
        }
    }
    for (j, w) in sol.omega.iter().enumerate() {
        if w.d() != c_dim {
            violation(&mut v, "dimension", format!("side state {j} has dimension {} not {c_dim}", w.d()));
        } else if !w.is_normalized() {
            violation(&mut v, "structure", format!("side state {j} has trace {}", w.trace()));
        }
    }

    let mut mass: BTreeMap<usize, f64> = BTreeMap::new();
    let mut seen: Vec<(usize, &[u64])> = Vec::new();
    for a in &sol.assignments {
        let tag = format!("x={} t={:?}", a.x, a.tuple);
        if a.x >= probs.len() {
            violation(&mut v, "structure", format!("{tag}: input index out of range"));
            continue;
        }
        if seen.contains(&(a.x, a.tuple.as_slice())) {
            violation(&mut v, "structure", format!("{tag}: assigned twice"));
        }
        seen.push((a.x, a.tuple.as_slice()));
        if !(0.0..=1.0).contains(&a.p) {
            violation(&mut v, "probability", format!("{tag}: p = {}", a.p));
        }
        if !(0.0..=1.0).contains(&a.eps) {
            violation(&mut v, "smoothing", format!("{tag}: eps = {}", a.eps));
        }
        *mass.entry(a.x).or_default() += a.p;
        let Some(j) = sol.tuple_index(&a.tuple) else {
            violation(&mut v, "structure", format!("{tag}: tuple not declared"));
            continue;
        };
        if a.p <= 0.0 {
            continue;
        }
        if a.witness.d() != c_dim || j >= sol.omega.len() || sol.omega[j].d() != c_dim {
            violation(&mut v, "dimension", format!("{tag}: witness or side state dimension"));
            continue;
        }
        let f = qcore::fidelity(&a.witness, &marginals[a.x])?;
        if f < 1.0 - a.eps - FEAS_TOL {
            violation(
                &mut v,
                "smoothing",
                format!("{tag}: fidelity {f} below 1 - eps = {}", 1.0 - a.eps),
            );
        }
        let cap = (-qcore::dmax(&a.witness, &sol.omega[j])?).exp2();
        if a.p > cap + FEAS_TOL {
            violation(
                &mut v,
                "dmax",
                format!("{tag}: p = {} exceeds 2^-Dmax = {cap}", a.p),
            );
        }
    }
    for x in 0..probs.len() {
        let m = mass.get(&x).copied().unwrap_or(0.0);
        if (m - 1.0).abs() > FEAS_TOL {
            violation(&mut v, "normalization", format!("x={x}: probabilities sum to {m}"));
        }
    }
    let used = sol.error_budget_used(&probs);
    let budget = sol.eta * sol.eta;
    if used > budget + FEAS_TOL {
        violation(
            &mut v,
            "error_budget",
            format!("average squared smoothing {used} exceeds eta^2 = {budget}"),
        );
    }
    Ok(ValidationReport {
        ok: v.is_empty(),
        objective: sol.objective(&probs),
        error_budget_used: used,
        error_budget: budget,
        violations: v,
    })
}

/// Inputs ranked by descending probability (ties by index), rank 1 first.
pub fn ranks(probs: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
    let mut rank = vec![0; probs.len()];
    for (pos, &x) in order.iter().enumerate() {
        rank[x] = pos as u64 + 1;
    }
    rank
}

/// Identity coding: input `x` sends `(rank(x), 1, …, 1)` with side state `Ψ^x_C`.
pub fn baseline_solution(ens: &Ensemble, r: usize, eta: f64) -> Result<FeasibleSolution> {
    if r == 0 {
        return Err(Error::OutOfRange {
            name: "r",
            value: 0.0,
            range: "r >= 1",
        });
    }
    let marginals = c_marginals(ens)?;
    let rank = ranks(&ens.probabilities());
    let mut tuples = Vec::new();
    let mut omega = Vec::new();
    let mut assignments = Vec::new();
    for (x, m) in marginals.into_iter().enumerate() {
        let mut t = vec![1u64; r];
        t[0] = rank[x];
        tuples.push(t.clone());
        omega.push(m.clone());
        assignments.push(Assignment {
            x,
            tuple: t,
            p: 1.0,
            eps: 0.0,
            witness: m,
        });
    }
    Ok(FeasibleSolution {
        r,
        eta,
        tuples,
        omega,
        assignments,
    })
}
