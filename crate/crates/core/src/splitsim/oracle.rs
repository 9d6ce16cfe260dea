//! Grid search for small one-round instances of the `Q(η, 1)` program.
//!
//! Side states range over a Bloch-sphere grid (plus the ensemble's own
//! marginals), smoothing is switched off, and indices are filled greedily by
//! captured mass. The result is a validated feasible point, so its objective
//! upper-bounds `Q(η, 1)`; it is an approximation to the optimum, not a
//! certificate of it.

use serde::Serialize;

use super::feasible::{baseline_solution, c_marginals, validate_feasible_solution, Assignment, FeasibleSolution};
use crate::error::{Error, Result};
use crate::qcore::linalg::{c, cr, CMat};
use crate::qcore::{self, DensityOperator, Ensemble, HilbertDim};

pub const MAX_INPUTS: usize = 3;
const MAX_INDICES: usize = 64;
const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub objective: f64,
    pub baseline_objective: f64,
    pub grid_points: usize,
    pub solution: FeasibleSolution,
}

/// Qubit states `(I + x X + y Y + z Z)/2` on a `resolution³` grid inside the ball.
pub fn bloch_grid(resolution: usize, dim: &HilbertDim) -> Vec<DensityOperator> {
    let axis: Vec<f64> = (0..resolution)
        .map(|k| -1.0 + 2.0 * k as f64 / (resolution.max(2) - 1) as f64)
        .collect();
    let mut out = Vec::new();
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                if x * x + y * y + z * z > 1.0 {
                    continue;
                }
                let m = CMat::from_row_slice(
                    2,
                    2,
                    &[cr((1.0 + z) / 2.0), c(x / 2.0, -y / 2.0), c(x / 2.0, y / 2.0), cr((1.0 - z) / 2.0)],
                );
                if let Ok(s) = DensityOperator::new(m, dim.clone()) {
                    out.push(s);
                }
            }
        }
    }
    out
}

pub fn q_oracle_grid(ens: &Ensemble, eta: f64, resolution: usize) -> Result<OracleResult> {
    if ens.len() > MAX_INPUTS {
        return Err(Error::CapExceeded(format!("{} inputs; oracle handles at most {MAX_INPUTS}", ens.len())));
    }
    let marginals = c_marginals(ens)?;
    if marginals[0].d() != 2 {
        return Err(Error::InvalidDim("oracle needs a qubit C register".into()));
    }
    let probs = ens.probabilities();
    let c_dim = marginals[0].dim().clone();
    let mut candidates = bloch_grid(resolution, &c_dim);
    candidates.extend(marginals.iter().cloned());
    let caps: Vec<Vec<f64>> = candidates
        .iter()
        .map(|w| {
            marginals
                .iter()
                .map(|m| qcore::dmax(m, w).map(|v| (-v).exp2()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut need = vec![1.0f64; probs.len()];
    let mut tuples = Vec::new();
    let mut omega = Vec::new();
    let mut assignments = Vec::new();
    for index in 1..=MAX_INDICES as u64 {
        if need.iter().all(|&n| n <= MASS_TOL) {
            break;
        }
        let gain = |g: usize| -> f64 {
            (0..probs.len()).map(|x| probs[x] * need[x].min(caps[g][x])).sum()
        };
        let best = (0..candidates.len())
            .max_by(|&a, &b| gain(a).total_cmp(&gain(b)))
            .ok_or(Error::Empty("oracle grid"))?;
        tuples.push(vec![index]);
        omega.push(candidates[best].clone());
        for x in 0..probs.len() {
            let mut take = need[x].min(caps[best][x]);
            if need[x] - take <= MASS_TOL {
                take = need[x];
            }
            if take > 0.0 {
                assignments.push(Assignment {
                    x,
                    tuple: vec![index],
                    p: take,
                    eps: 0.0,
                    witness: marginals[x].clone(),
                });
                need[x] -= take;
            }
        }
    }
    let greedy = FeasibleSolution {
        r: 1,
        eta,
        tuples,
        omega,
        assignments,
    };
    let baseline = baseline_solution(ens, 1, eta)?;
    let base_rep = validate_feasible_solution(ens, &baseline)?;
    let greedy_rep = validate_feasible_solution(ens, &greedy)?;
    let (solution, objective) = if greedy_rep.ok && greedy_rep.objective < base_rep.objective {
        (greedy, greedy_rep.objective)
    } else {
        (baseline, base_rep.objective)
    };
    Ok(OracleResult {
        objective,
        baseline_objective: base_rep.objective,
        grid_points: candidates.len(),
        solution,
    })
}
