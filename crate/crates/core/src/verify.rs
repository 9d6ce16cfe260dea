//! Invariant suite run by `oqc verify-all`: inequalities between the
//! measures on random instances plus structural checks of the samplers and
//! codes.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::chansim::{cq_capacity, CqChannel};
use crate::codec::elias;
use crate::error::Result;
use crate::qcore::haar::{haar_state_with, random_density};
use crate::qcore::linalg::c;
use crate::qcore::{
    cqmi, dmax, dmax_pure, fidelity, mutual_information, partial_trace, purified_distance, relative_entropy,
    von_neumann_entropy, DensityOperator, HilbertDim, PureState,
};
use crate::rng::{derived_rng, stream, LabRng};

pub const SLACK: f64 = 1e-9;
pub const DEFAULT_INSTANCES: usize = 500;
const MAX_REPORTED_FAILURES: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub instances: usize,
    pub passed: usize,
    /// Largest amount by which an inequality was violated (0 when none).
    pub max_violation: f64,
    pub failures: Vec<String>,
}

impl PropertyOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.instances
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub instances: usize,
    pub properties: Vec<PropertyOutcome>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn get(&self, name: &str) -> Option<&PropertyOutcome> {
        self.properties.iter().find(|p| p.name == name)
    }
}

struct Tally {
    name: &'static str,
    instances: usize,
    passed: usize,
    max_violation: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            instances: 0,
            passed: 0,
            max_violation: 0.0,
            failures: Vec::new(),
        }
    }

    /// Records `lhs ≤ rhs + SLACK`.
    fn leq(&mut self, index: usize, lhs: f64, rhs: f64) {
        self.record(lhs - rhs, || format!("instance {index}: {lhs} > {rhs}"));
    }

    fn record(&mut self, excess: f64, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if excess.is_nan() || excess > SLACK {
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures.push(describe());
            }
            self.max_violation = self.max_violation.max(if excess.is_nan() { f64::INFINITY } else { excess });
        } else {
            self.passed += 1;
        }
    }

    fn error(&mut self, index: usize, e: crate::Error) {
        self.instances += 1;
        if self.failures.len() < MAX_REPORTED_FAILURES {
            self.failures.push(format!("instance {index}: {e}"));
        }
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            name: self.name,
            instances: self.instances,
            passed: self.passed,
            max_violation: self.max_violation,
            failures: self.failures,
        }
    }
}

fn run(
    name: &'static str,
    seed: u64,
    tag: u64,
    n: usize,
    mut case: impl FnMut(&mut LabRng, usize, &mut Tally) -> Result<()>,
) -> PropertyOutcome {
    let mut t = Tally::new(name);
    for i in 0..n {
        let mut rng = derived_rng(seed, stream::VERIFY, (tag << 32) | i as u64);
        if let Err(e) = case(&mut rng, i, &mut t) {
            t.error(i, e);
        }
    }
    t.finish()
}

fn random_state(rng: &mut LabRng, dim: &HilbertDim) -> DensityOperator {
    let rank = rng.random_range(1..=dim.total());
    random_density(dim, rank, rng)
}

fn full_rank_state(rng: &mut LabRng, dim: &HilbertDim) -> DensityOperator {
    random_density(dim, dim.total(), rng)
}

/// `P(ρ₁,ρ₃) ≤ P(ρ₁,ρ₂) + P(ρ₂,ρ₃)`.
pub fn purified_distance_triangle(seed: u64, n: usize) -> PropertyOutcome {
    run("purified_distance_triangle", seed, 1, n, |rng, i, t| {
        let dim = HilbertDim::single("S", rng.random_range(2..=8));
        let [a, b, cc] = [0; 3].map(|_| random_state(rng, &dim));
        let lhs = purified_distance(&a, &cc)?;
        let rhs = purified_distance(&a, &b)? + purified_distance(&b, &cc)?;
        t.leq(i, lhs, rhs);
        Ok(())
    })
}

/// `F(ρ,σ) ≥ 2^{−D(ρ‖σ)/2} ≥ 2^{−D_max(ρ‖σ)/2}` on full-rank pairs.
pub fn fidelity_entropy_chain(seed: u64, n: usize) -> PropertyOutcome {
    run("fidelity_entropy_chain", seed, 2, n, |rng, i, t| {
        let dim = HilbertDim::single("S", rng.random_range(2..=8));
        let rho = random_state(rng, &dim);
        let sigma = full_rank_state(rng, &dim);
        let f = fidelity(&rho, &sigma)?;
        let from_relative = (-relative_entropy(&rho, &sigma)? / 2.0).exp2();
        let from_max = (-dmax(&rho, &sigma)? / 2.0).exp2();
        let excess = (from_relative - f).max(from_max - from_relative);
        t.record(excess, || {
            format!("instance {i}: F = {f}, 2^(-D/2) = {from_relative}, 2^(-Dmax/2) = {from_max}")
        });
        Ok(())
    })
}

/// Partial trace does not increase `D_max` and does not decrease fidelity.
pub fn partial_trace_monotonicity(seed: u64, n: usize) -> PropertyOutcome {
    run("partial_trace_monotonicity", seed, 3, n, |rng, i, t| {
        let dim = HilbertDim::of(&[("A", rng.random_range(2..=3)), ("B", rng.random_range(2..=3))])?;
        let rho = random_state(rng, &dim);
        let sigma = full_rank_state(rng, &dim);
        let keep: &[&str] = if rng.random::<bool>() { &["A"] } else { &["B"] };
        let (rho_r, sigma_r) = (partial_trace(&rho, keep)?, partial_trace(&sigma, keep)?);
        let dmax_gain = dmax(&rho_r, &sigma_r)? - dmax(&rho, &sigma)?;
        let fid_loss = fidelity(&rho, &sigma)? - fidelity(&rho_r, &sigma_r)?;
        t.record(dmax_gain.max(fid_loss), || {
            format!("instance {i}: dmax increased by {dmax_gain}, fidelity decreased by {fid_loss}")
        });
        Ok(())
    })
}

/// `S(Σ pᵢρᵢ) ≥ Σ pᵢ S(ρᵢ)`.
pub fn entropy_concavity(seed: u64, n: usize) -> PropertyOutcome {
    run("entropy_concavity", seed, 4, n, |rng, i, t| {
        let dim = HilbertDim::single("S", rng.random_range(2..=8));
        let k = rng.random_range(2..=5);
        let states: Vec<DensityOperator> = (0..k).map(|_| random_state(rng, &dim)).collect();
        let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let parts: Vec<(f64, &DensityOperator)> = raw.iter().map(|w| w / total).zip(&states).collect();
        let mixed = von_neumann_entropy(&DensityOperator::mixture(&parts)?)?;
        let mut average = 0.0;
        for (w, s) in &parts {
            average += w * von_neumann_entropy(s)?;
        }
        t.leq(i, average, mixed);
        Ok(())
    })
}

/// `I(A;C|B) ≤ I(AB;C) ≤ 2S(C)`.
pub fn cqmi_entropy_bound(seed: u64, n: usize) -> PropertyOutcome {
    run("cqmi_entropy_bound", seed, 5, n, |rng, i, t| {
        let dim = HilbertDim::of(&[
            ("A", rng.random_range(2..=3)),
            ("B", rng.random_range(2..=3)),
            ("C", 2),
        ])?;
        let rho = random_state(rng, &dim);
        let cond = cqmi(&rho, &["A"], &["C"], &["B"])?;
        let joint = mutual_information(&rho, &["A", "B"], &["C"])?;
        let bound = 2.0 * von_neumann_entropy(&partial_trace(&rho, &["C"])?)?;
        let excess = (cond - joint).max(joint - bound);
        t.record(excess, || format!("instance {i}: {cond} <= {joint} <= {bound} fails"));
        Ok(())
    })
}

/// `log₂<ψ|σ⁻¹|ψ>` agrees with the generic `D_max` route.
pub fn dmax_pure_routes_agree(seed: u64, n: usize) -> PropertyOutcome {
    run("dmax_pure_routes_agree", seed, 6, n, |rng, i, t| {
        let dim = HilbertDim::single("S", rng.random_range(2..=8));
        let psi = haar_state_with(&dim, None, rng)?;
        let sigma = full_rank_state(rng, &dim);
        let direct = dmax_pure(&psi, &sigma)?;
        let generic = dmax(&psi.density(), &sigma)?;
        t.record((direct - generic).abs(), || format!("instance {i}: {direct} vs {generic}"));
        Ok(())
    })
}

/// Constrained Haar samples are unit vectors orthogonal to the anchor.
pub fn haar_orthogonality(seed: u64, n: usize) -> PropertyOutcome {
    run("haar_orthogonality", seed, 7, n, |rng, i, t| {
        let dim = HilbertDim::single("S", rng.random_range(2..=16));
        let anchor = haar_state_with(&dim, None, rng)?;
        let x = haar_state_with(&dim, Some(&anchor), rng)?;
        // Held to round-off rather than SLACK.
        let defect = anchor.inner(&x).norm().max((x.vector().norm() - 1.0).abs());
        t.record(if defect > 1e-12 { defect } else { 0.0 }, || format!("instance {i}: overlap {}", anchor.inner(&x).norm()));
        Ok(())
    })
}

/// Outputs `Zᵏ|ψ>` for the clock matrix `Z`; the uniform input is optimal
/// by covariance, so random inputs never beat it.
pub fn covariant_channel_uniform_optimal(seed: u64, n: usize) -> PropertyOutcome {
    const PROBES: usize = 100;
    run("covariant_channel_uniform_optimal", seed, 8, n, |rng, i, t| {
        let d = rng.random_range(2..=6);
        let dim = HilbertDim::single("B", d);
        let psi = haar_state_with(&dim, None, rng)?;
        let outputs = (0..d)
            .map(|k| {
                let v = psi.vector().map_with_location(|r, _, z| {
                    let angle = std::f64::consts::TAU * (k * r) as f64 / d as f64;
                    z * c(angle.cos(), angle.sin())
                });
                PureState::new(v, dim.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let ch = CqChannel::new(outputs)?;
        let uniform = cq_capacity(&ch)?;
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..PROBES {
            let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let mu: Vec<f64> = raw.iter().map(|w| w / total).collect();
            worst = worst.max(ch.output_entropy(&mu)? - uniform);
        }
        t.record(worst, || format!("instance {i}: random input beats uniform by {worst}"));
        Ok(())
    })
}

/// No Elias codeword for `1..=n` is a prefix of another, and lengths respect
/// the closed-form bound.
pub fn elias_prefix_free(n: usize) -> PropertyOutcome {
    let mut t = Tally::new("elias_prefix_free");
    let words: Vec<String> = (1..=n as u64)
        .map(|k| elias::encode(k).map(|b| b.to_string()).unwrap_or_default())
        .collect();
    let set: HashSet<&str> = words.iter().map(String::as_str).collect();
    for (i, w) in words.iter().enumerate() {
        let k = i as u64 + 1;
        let clash = (1..w.len()).find(|&l| set.contains(&w[..l]));
        let over = if k >= 2 { w.len() as f64 - elias::length_bound(k) } else { 0.0 };
        let excess = if clash.is_some() || w.is_empty() { f64::INFINITY } else { over };
        t.record(excess, || format!("n = {k}: codeword {w} clash {clash:?}, excess length {over}"));
    }
    t.finish()
}

/// Runs every property with `n` random instances each.
pub fn verify_all(seed: u64, n: usize) -> VerifyReport {
    let properties = vec![
        purified_distance_triangle(seed, n),
        fidelity_entropy_chain(seed, n),
        partial_trace_monotonicity(seed, n),
        entropy_concavity(seed, n),
        cqmi_entropy_bound(seed, n),
        dmax_pure_routes_agree(seed, n),
        haar_orthogonality(seed, n),
        covariant_channel_uniform_optimal(seed, (n / 5).max(1)),
        elias_prefix_free(n.max(2) * 8),
    ];
    let all_passed = properties.iter().all(PropertyOutcome::ok);
    VerifyReport {
        seed,
        instances: n,
        properties,
        all_passed,
    }
}
