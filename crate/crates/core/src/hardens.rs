//! The hard ensemble: Haar samples on the complement of `|0>`, embedded as
//! `√(1−δ)|0> + √δ|x_i>` with uniform weights, plus the three matrix
//! concentration checks that make the construction usable.
//!
//! The samples live on the `(d−1)`-dimensional complement `V` of `|0>`, so
//! the Haar moments used as targets are `P/n`, `δP/n` and
//! `(P⊗P + F)/(n(n+1))` with `n = d−1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::haar::haar_state_with;
use crate::qcore::linalg::{self, cr, CMat, CVec};
use crate::qcore::{binary_entropy, von_neumann_entropy, Ensemble, HilbertDim, PureState};
use crate::rng::{derive_seed, derived_rng, stream};

/// Largest `d` for which the `d² × d²` third check runs by default.
pub const Z3_MAX_DIM: usize = 24;
pub const ORTHO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HardEnsembleParams {
    pub d: usize,
    pub delta: f64,
    pub m: usize,
    pub eps: f64,
    pub seed: u64,
}

impl HardEnsembleParams {
    pub fn new(d: usize, delta: f64, m: usize, eps: f64, seed: u64) -> Result<Self> {
        let p = HardEnsembleParams { d, delta, m, eps, seed };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d <= 4 {
            return Err(Error::InvalidDim(format!("d = {} must exceed 4", self.d)));
        }
        // The closed endpoint admits the δ = 1/4 instances used in the checks.
        if !(self.delta > 0.0 && self.delta <= 0.25) {
            return Err(Error::OutOfRange {
                name: "delta",
                value: self.delta,
                range: "(0, 1/4]",
            });
        }
        if self.m == 0 {
            return Err(Error::Empty("sample count m"));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::OutOfRange {
                name: "eps",
                value: self.eps,
                range: "eps > 0",
            });
        }
        Ok(())
    }

    /// Sample count `8d⁵/ε²` under which every check fails with probability
    /// below 1/3.
    pub fn prescribed_m(&self) -> f64 {
        8.0 * (self.d as f64).powi(5) / (self.eps * self.eps)
    }
}

/// `8d⁷`, the ensemble size at `ε = 1/d`, exactly.
pub fn prescribed_size_at_inverse_d(d: u64) -> u128 {
    8 * (d as u128).pow(7)
}

/// The three per-sample matrices: `|x><x|`, `√(δ−δ²)(|x><0| + |0><x|) + δ|x><x|`
/// and `|x><x|⊗|x><x|`.
pub fn z_matrices(x: &PureState, delta: f64) -> Result<(CMat, CMat, CMat)> {
    check_orthogonal(x)?;
    let v = x.vector();
    let d = x.d();
    let z1 = linalg::projector(v);
    let zero = linalg::basis_vector(d, 0);
    let cross = linalg::outer(v, &zero) + linalg::outer(&zero, v);
    let z2 = cross * cr((delta - delta * delta).sqrt()) + &z1 * cr(delta);
    let z3 = linalg::kron(&z1, &z1);
    Ok((z1, z2, z3))
}

fn check_orthogonal(x: &PureState) -> Result<()> {
    let overlap = x.vector()[0].norm();
    if overlap > ORTHO_TOL {
        return Err(Error::NotOrthogonal(overlap));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub d: usize,
    pub m: usize,
    pub delta: f64,
    pub norm1: f64,
    pub norm2: f64,
    /// `None` when the third check was not evaluated.
    pub norm3: Option<f64>,
    pub eps_target: f64,
    pub passed: [Option<bool>; 3],
}

impl ConcentrationReport {
    pub fn norms(&self) -> [Option<f64>; 3] {
        [Some(self.norm1), Some(self.norm2), self.norm3]
    }

    /// Every evaluated check passed.
    pub fn all_passed(&self) -> bool {
        self.passed.iter().all(|p| p.unwrap_or(true))
    }

    /// Largest evaluated deviation.
    pub fn realized_eps(&self) -> f64 {
        self.norms().iter().flatten().fold(0.0, |a, &b| a.max(b))
    }
}

/// Projector onto the complement of `|0>`.
fn complement_projector(d: usize) -> CMat {
    let mut p = linalg::identity(d);
    p[(0, 0)] = linalg::ZERO;
    p
}

/// `P⊗P + F` restricted to `V⊗V`, where `F` swaps the factors.
fn symmetric_target(d: usize) -> CMat {
    let mut t = CMat::zeros(d * d, d * d);
    for i in 1..d {
        for j in 1..d {
            t[(i * d + j, i * d + j)] += linalg::ONE;
            t[(j * d + i, i * d + j)] += linalg::ONE;
        }
    }
    t
}

/// Trace-norm deviations of the three sample means from their Haar values.
/// The `d² × d²` check runs for `d ≤ Z3_MAX_DIM` or when forced.
pub fn concentration_check(samples: &[PureState], delta: f64, eps: f64, force_z3: bool) -> Result<ConcentrationReport> {
    let first = samples.first().ok_or(Error::Empty("samples"))?;
    let d = first.d();
    let m = samples.len();
    let mut cols = CMat::zeros(d, m);
    let mut mean_vec = CVec::zeros(d);
    for (i, x) in samples.iter().enumerate() {
        if x.d() != d {
            return Err(Error::DimensionMismatch(d, x.d()));
        }
        check_orthogonal(x)?;
        cols.set_column(i, x.vector());
        mean_vec += x.vector();
    }
    let inv_m = cr(1.0 / m as f64);
    mean_vec *= inv_m;
    let n = (d - 1) as f64;
    let p = complement_projector(d);

    let z1 = &cols * cols.adjoint() * inv_m;
    let norm1 = linalg::hermitian_trace_norm(&(&z1 - &p * cr(1.0 / n)));

    let zero = linalg::basis_vector(d, 0);
    let cross = linalg::outer(&mean_vec, &zero) + linalg::outer(&zero, &mean_vec);
    let z2 = cross * cr((delta - delta * delta).sqrt()) + &z1 * cr(delta);
    let norm2 = linalg::hermitian_trace_norm(&(z2 - &p * cr(delta / n)));

    let norm3 = if d <= Z3_MAX_DIM || force_z3 {
        let mut doubled = CMat::zeros(d * d, m);
        for (i, x) in samples.iter().enumerate() {
            doubled.set_column(i, &linalg::kron_vec(x.vector(), x.vector()));
        }
        let z3 = &doubled * doubled.adjoint() * inv_m;
        let target = symmetric_target(d) * cr(1.0 / (n * (n + 1.0)));
        Some(linalg::hermitian_trace_norm(&(z3 - target)))
    } else {
        None
    };
    Ok(ConcentrationReport {
        d,
        m,
        delta,
        norm1,
        norm2,
        norm3,
        eps_target: eps,
        passed: [Some(norm1 <= eps), Some(norm2 <= eps), norm3.map(|v| v <= eps)],
    })
}

/// Haar samples on the complement of `|0>`, one derived stream per index.
pub fn sample_complement(d: usize, m: usize, seed: u64) -> Result<Vec<PureState>> {
    let dim = HilbertDim::single("C", d);
    let zero = PureState::basis(dim.clone(), 0)?;
    (0..m)
        .map(|i| haar_state_with(&dim, Some(&zero), &mut derived_rng(seed, stream::HAAR, i as u64)))
        .collect()
}

/// `√(1−δ)|0> + √δ|x>` for each sample, uniformly weighted.
pub fn embed(samples: &[PureState], delta: f64) -> Result<Ensemble> {
    let states = samples
        .iter()
        .map(|x| {
            let mut v = x.vector() * cr(delta.sqrt());
            v[0] += cr((1.0 - delta).sqrt());
            PureState::new(v, x.dim().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::uniform(states)
}

#[derive(Debug, Clone)]
pub struct HardEnsemble {
    pub ensemble: Ensemble,
    /// The underlying `|x_i>`.
    pub samples: Vec<PureState>,
    pub report: ConcentrationReport,
    /// Batches drawn, including the accepted one.
    pub attempts: usize,
}

/// Draws whole batches until all evaluated checks pass at `eps`.
pub fn build_hard_ensemble(params: &HardEnsembleParams, max_retries: usize, force_z3: bool) -> Result<HardEnsemble> {
    params.validate()?;
    let mut last = None;
    for attempt in 0..max_retries.max(1) {
        let batch_seed = derive_seed(params.seed, stream::ENSEMBLE, attempt as u64);
        let samples = sample_complement(params.d, params.m, batch_seed)?;
        let report = concentration_check(&samples, params.delta, params.eps, force_z3)?;
        if report.all_passed() {
            return Ok(HardEnsemble {
                ensemble: embed(&samples, params.delta)?,
                samples,
                report,
                attempts: attempt + 1,
            });
        }
        last = Some(report);
    }
    let report = last.expect("at least one batch");
    Err(Error::RetriesExhausted {
        attempts: max_retries.max(1),
        norms: report.norms(),
        eps: params.eps,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyCheck {
    pub s_avg: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Entropy of the average state against `(δ+ε)log₂d + H(δ) + 1`.
pub fn entropy_bound_check(ens: &Ensemble, delta: f64, eps: f64) -> Result<EntropyCheck> {
    let d = ens.dim().total() as f64;
    let s_avg = von_neumann_entropy(&ens.average_state())?;
    let bound = (delta + eps) * d.log2() + binary_entropy(delta) + 1.0;
    Ok(EntropyCheck {
        s_avg,
        bound,
        ok: s_avg <= bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub d: usize,
    pub sample_counts: Vec<usize>,
    /// Mean of each norm over the repetitions, per sample count.
    pub mean_norms: Vec<[f64; 3]>,
    /// Least-squares slope of `log norm` against `log m`, per check.
    pub slopes: [f64; 3],
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Decay of the three deviations with the sample count.
pub fn concentration_slope(d: usize, delta: f64, counts: &[usize], repeats: usize, seed: u64) -> Result<SlopeReport> {
    if counts.len() < 2 {
        return Err(Error::Empty("need at least two sample counts"));
    }
    let mut mean_norms = Vec::new();
    for (ci, &m) in counts.iter().enumerate() {
        let mut acc = [0.0; 3];
        for r in 0..repeats.max(1) {
            let s = derive_seed(seed, ci as u64, r as u64);
            let rep = concentration_check(&sample_complement(d, m, s)?, delta, 1.0, true)?;
            for (a, v) in acc.iter_mut().zip(rep.norms()) {
                *a += v.unwrap_or(f64::NAN);
            }
        }
        mean_norms.push(acc.map(|a| a / repeats.max(1) as f64));
    }
    let xs: Vec<f64> = counts.iter().map(|&m| (m as f64).ln()).collect();
    let slopes = [0, 1, 2].map(|j| {
        let ys: Vec<f64> = mean_norms.iter().map(|n| n[j].ln()).collect();
        least_squares_slope(&xs, &ys)
    });
    Ok(SlopeReport {
        d,
        sample_counts: counts.to_vec(),
        mean_norms,
        slopes,
    })
}
