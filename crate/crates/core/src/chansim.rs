//! Classical-quantum channel built from an ensemble, its capacity, and the
//! simulation-cost lower bounds it is compared against.

use serde::Serialize;

use crate::error::{check_open_unit, Error, Result};
use crate::qcore::linalg::{self, cr, CMat};
use crate::qcore::{binary_entropy, spectrum_entropy, DensityOperator, Ensemble, HilbertDim, PureState};

/// `ρ ↦ Σ_j <j|ρ|j> |Ψ_j><Ψ_j|`.
#[derive(Debug, Clone)]
pub struct CqChannel {
    outputs: Vec<PureState>,
}

impl CqChannel {
    pub fn new(outputs: Vec<PureState>) -> Result<Self> {
        let first = outputs.first().ok_or(Error::Empty("channel outputs"))?;
        let d = first.d();
        if let Some(bad) = outputs.iter().find(|o| o.d() != d) {
            return Err(Error::DimensionMismatch(d, bad.d()));
        }
        Ok(CqChannel { outputs })
    }

    pub fn from_ensemble(ens: &Ensemble) -> Result<Self> {
        CqChannel::new(ens.items().iter().map(|(_, s)| s.clone()).collect())
    }

    pub fn inputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn output_dim(&self) -> &HilbertDim {
        self.outputs[0].dim()
    }

    /// `S(Σ_j μ(j) |Ψ_j><Ψ_j|)` for an input distribution `μ`.
    pub fn output_entropy(&self, mu: &[f64]) -> Result<f64> {
        if mu.len() != self.outputs.len() {
            return Err(Error::DimensionMismatch(self.outputs.len(), mu.len()));
        }
        let d = self.output_dim().total();
        let mut m = CMat::zeros(d, d);
        for (w, s) in mu.iter().zip(&self.outputs) {
            m += linalg::projector(s.vector()) * cr(*w);
        }
        let rho = DensityOperator::new(linalg::hermitian_part(&m), self.output_dim().clone())?;
        Ok(spectrum_entropy(&rho.eigen().values))
    }
}

/// Entropy of the uniform output mixture. This is the capacity when the
/// channel is covariant under a group acting transitively on its inputs (the
/// hard-ensemble channels); for other channels it is a lower bound.
pub fn cq_capacity(ch: &CqChannel) -> Result<f64> {
    let m = ch.inputs();
    ch.output_entropy(&vec![1.0 / m as f64; m])
}

/// `δ log₂d + H(δ) + 2`, the capacity bound for a hard-ensemble channel.
pub fn capacity_bound(d: f64, delta: f64) -> f64 {
    delta * d.log2() + binary_entropy(delta) + 2.0
}

/// `(C + H(η))/(1−η)`.
pub fn one_shot_capacity_upper(capacity: f64, eta: f64) -> Result<f64> {
    check_open_unit("eta", eta)?;
    Ok((capacity + binary_entropy(eta)) / (1.0 - eta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimulationMode {
    OneWay,
    Rounds(u32),
    Interactive,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateCheck {
    pub name: &'static str,
    /// `η` must lie strictly below this.
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationLowerBound {
    pub mode: SimulationMode,
    pub d: f64,
    pub delta: f64,
    pub eta: f64,
    /// `log₂(dδ/128)`.
    pub log_term: f64,
    pub value: f64,
    pub gates: Vec<GateCheck>,
    /// The gate that governs the mode passed.
    pub admissible: bool,
}

fn gate(name: &'static str, threshold: f64, eta: f64) -> GateCheck {
    GateCheck {
        name,
        threshold,
        passed: eta < threshold,
    }
}

/// Closed-form lower bound for the selected mode, floored at 0, with every
/// admissibility gate evaluated but not enforced.
pub fn simulation_cost_lower(d: f64, delta: f64, eta: f64, mode: SimulationMode) -> Result<SimulationLowerBound> {
    if d.is_nan() || d <= 4.0 {
        return Err(Error::InvalidDim(format!("d = {d} must exceed 4")));
    }
    check_open_unit("delta", delta)?;
    check_open_unit("eta", eta)?;
    let log_term = (d * delta / 128.0).log2();
    let square = gate("(delta/8)^2", (delta / 8.0).powi(2), eta);
    let (raw, gates, admissible) = match mode {
        SimulationMode::OneWay => {
            let ok = square.passed;
            ((1.0 - eta.sqrt()).powi(2) * log_term, vec![square], ok)
        }
        SimulationMode::Rounds(r) => {
            if r < 2 {
                return Err(Error::OutOfRange {
                    name: "rounds",
                    value: r as f64,
                    range: "r >= 2 (use one-way for r = 1)",
                });
            }
            let ok = square.passed;
            (log_term / (20.0 * (r as f64).log2()), vec![square], ok)
        }
        SimulationMode::Interactive => {
            let fourth = gate("(delta/8)^4", (delta / 8.0).powi(4), eta);
            let tenth = gate("(delta/10)^4", (delta / 10.0).powi(4), eta);
            let ok = fourth.passed;
            let denom = d.log2().log2() - 2.0 * eta.log2();
            (log_term / (30.0 * denom), vec![fourth, tenth], ok)
        }
    };
    Ok(SimulationLowerBound {
        mode,
        d,
        delta,
        eta,
        log_term,
        value: raw.max(0.0),
        gates,
        admissible,
    })
}

/// [`simulation_cost_lower`] that fails when the governing gate does not pass.
pub fn simulation_cost_lower_checked(d: f64, delta: f64, eta: f64, mode: SimulationMode) -> Result<SimulationLowerBound> {
    let b = simulation_cost_lower(d, delta, eta, mode)?;
    if !b.admissible {
        let g = &b.gates[0];
        return Err(Error::Gate(format!("eta = {eta} is not below {} = {}", g.name, g.threshold)));
    }
    Ok(b)
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparationPoint {
    pub log2_d: f64,
    pub delta: f64,
    pub eta: f64,
    pub capacity_bound: f64,
    pub capacity_upper: f64,
    pub simulation_lower: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Crossover {
    /// Smallest integer `log₂ d` with a strict separation.
    pub first_integer: Option<SeparationPoint>,
    /// Continuous crossover `log₂ d*` located by bisection.
    pub log2_d_star: Option<f64>,
    pub max_log2_d: f64,
}

fn separation_at(log2_d: f64) -> Result<SeparationPoint> {
    let d = log2_d.exp2();
    let delta = 1.0 / log2_d;
    let eta = (delta / 8.0).powi(2) / 2.0;
    let cap = capacity_bound(d, delta);
    Ok(SeparationPoint {
        log2_d,
        delta,
        eta,
        capacity_bound: cap,
        capacity_upper: one_shot_capacity_upper(cap, eta)?,
        simulation_lower: simulation_cost_lower(d, delta, eta, SimulationMode::OneWay)?.value,
    })
}

/// Scan of `δ = 1/log₂d`, `η = (δ/8)²/2` for the point where the one-way
/// simulation lower bound overtakes the one-shot capacity upper bound.
pub fn separation_crossover(max_log2_d: f64) -> Result<Crossover> {
    let gap = |l: f64| separation_at(l).map(|p| p.simulation_lower - p.capacity_upper);
    let mut first = None;
    let mut l = 5.0;
    while l <= max_log2_d {
        let p = separation_at(l)?;
        if p.simulation_lower > p.capacity_upper {
            first = Some(p);
            break;
        }
        l += 1.0;
    }
    let star = match &first {
        Some(p) => {
            let (mut lo, mut hi) = (p.log2_d - 1.0, p.log2_d);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if gap(mid)? > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        }
        None => None,
    };
    Ok(Crossover {
        first_integer: first,
        log2_d_star: star,
        max_log2_d,
    })
}
