//! Truncated convex-split mixtures.
//!
//! For each slot `i`, `τ^{(−i)}` mixes products of `Ψ^j` (bit 0, weight `p_j`)
//! and the complementary states `Ψ'^j` (bit 1, weight `1−p_j`) over the other
//! slots, keeping only strings with few zeros.

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};
use crate::qcore::linalg::{self, cr, CMat, PSD_TOL};
use crate::qcore::{self, DensityOperator, HilbertDim};

/// Largest `dim(C)^{|I|}` materialized.
pub const MAX_TENSOR_DIM: usize = 4096;
const PROB_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexSplitInstance {
    pub p: Vec<f64>,
    pub psi: Vec<DensityOperator>,
    pub omega: Vec<DensityOperator>,
    pub delta: f64,
}

/// `⌈(1/δ)·log₂(1/δ)⌉`.
pub fn typ_zero_cap(delta: f64) -> usize {
    ((1.0 / delta) * (1.0 / delta).log2()).ceil() as usize
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeCoefficient {
    /// Bit string `s` over all slots, 0 meaning `Ψ^i`.
    pub string: Vec<u8>,
    /// Coefficient of `Ψ_s` in `τ`.
    pub q: f64,
    /// `p^s = Π p_i^{s_i}`, the coefficient of `Ψ_s` in `⊗ω_i`.
    pub product_weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexSplitResult {
    pub typ_zero_cap: usize,
    pub tau: DensityOperator,
    pub tau_minus: Vec<DensityOperator>,
    pub normalizations: Vec<f64>,
    /// `Ψ'^i = (ω_i − p_iΨ^i)/(1 − p_i)`.
    pub complements: Vec<DensityOperator>,
    pub coefficients: Vec<TypeCoefficient>,
}

impl ConvexSplitInstance {
    fn check(&self) -> Result<usize> {
        check_open_unit("delta", self.delta)?;
        let n = self.p.len();
        if n == 0 {
            return Err(Error::Empty("convex split index set"));
        }
        if self.psi.len() != n || self.omega.len() != n {
            return Err(Error::DimensionMismatch(n, self.psi.len().min(self.omega.len())));
        }
        let d = self.psi[0].d();
        for s in self.psi.iter().chain(&self.omega) {
            if s.d() != d {
                return Err(Error::DimensionMismatch(d, s.d()));
            }
            if !s.is_normalized() {
                return Err(Error::InvalidTrace(s.trace()));
            }
        }
        let total = (d as f64).powi(n as i32);
        if total > MAX_TENSOR_DIM as f64 {
            return Err(Error::CapExceeded(format!(
                "dim(C)^|I| = {d}^{n} exceeds {MAX_TENSOR_DIM}"
            )));
        }
        for (i, &p) in self.p.iter().enumerate() {
            if !(p > 0.0 && p < 1.0 - self.delta) {
                return Err(Error::InvalidProbabilities(format!(
                    "p[{i}] = {p} outside (0, 1 - delta)"
                )));
            }
        }
        let sum: f64 = self.p.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbabilities(format!("sum = {sum}")));
        }
        Ok(d)
    }

    /// `⊗_i ω_i`.
    pub fn product_omega(&self) -> Result<DensityOperator> {
        self.check()?;
        let m = self
            .omega
            .iter()
            .skip(1)
            .fold(self.omega[0].matrix().clone(), |acc, w| linalg::kron(&acc, w.matrix()));
        DensityOperator::new(m, slot_dim(self.p.len(), self.psi[0].d(), None)?)
    }
}

/// Registers `C1 … Cn`, optionally skipping one slot.
fn slot_dim(n: usize, d: usize, skip: Option<usize>) -> Result<HilbertDim> {
    let labels: Vec<String> = (0..n).filter(|&j| Some(j) != skip).map(|j| format!("C{}", j + 1)).collect();
    HilbertDim::of(&labels.iter().map(|l| (l.as_str(), d)).collect::<Vec<_>>())
}

pub fn convex_split_build(inst: &ConvexSplitInstance) -> Result<ConvexSplitResult> {
    let d = inst.check()?;
    let n = inst.p.len();
    let cap = typ_zero_cap(inst.delta);

    let mut complements = Vec::with_capacity(n);
    for i in 0..n {
        let p = inst.p[i];
        let bound = (-qcore::dmax(&inst.psi[i], &inst.omega[i])?).exp2();
        if p > bound + PROB_TOL {
            return Err(Error::Infeasible(format!(
                "p[{i}] = {p} exceeds 2^-Dmax = {bound}"
            )));
        }
        let rest = (inst.omega[i].matrix() - inst.psi[i].matrix() * cr(p)) / cr(1.0 - p);
        let rest = linalg::hermitian_part(&rest);
        let eig = linalg::HermEigen::new(&rest);
        if eig.min_value() < -PSD_TOL {
            return Err(Error::Infeasible(format!(
                "omega[{i}] - p psi[{i}] has eigenvalue {}",
                eig.min_value()
            )));
        }
        let rest = eig.apply(linalg::clamp_eigen);
        complements.push(DensityOperator::from_parts_unchecked(
            rest,
            inst.psi[i].dim().clone(),
        ));
    }
    // component(j, bit): Ψ^j for bit 0, Ψ'^j for bit 1, with its weight.
    let component = |j: usize, bit: bool| -> (&CMat, f64) {
        if bit {
            (complements[j].matrix(), 1.0 - inst.p[j])
        } else {
            (inst.psi[j].matrix(), inst.p[j])
        }
    };

    // Strings over the other n−1 slots are bitmasks; bit b set means Ψ'.
    let others = n - 1;
    let mut tau_minus = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    let mut tau = CMat::zeros(d.pow(n as u32), d.pow(n as u32));
    for i in 0..n {
        let slots: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let mut norm = 0.0;
        let mut mix = CMat::zeros(d.pow(others as u32), d.pow(others as u32));
        let mut planted = CMat::zeros(tau.nrows(), tau.ncols());
        for mask in 0u32..(1u32 << others) {
            let zero_count = (0..others).filter(|&b| mask & (1 << b) == 0).count();
            if zero_count > cap {
                continue;
            }
            let mut weight = 1.0;
            let mut rest = CMat::identity(1, 1);
            let mut full = CMat::identity(1, 1);
            let mut b = 0;
            for j in 0..n {
                if j == i {
                    full = linalg::kron(&full, inst.psi[i].matrix());
                    continue;
                }
                let (m, w) = component(slots[b], mask & (1 << b) != 0);
                weight *= w;
                rest = linalg::kron(&rest, m);
                full = linalg::kron(&full, m);
                b += 1;
            }
            norm += weight;
            mix += rest * cr(weight);
            planted += full * cr(weight);
        }
        tau_minus.push(DensityOperator::from_parts_unchecked(
            mix / cr(norm),
            slot_dim(n, d, Some(i))?,
        ));
        tau += planted * cr(inst.p[i] / norm);
        norms.push(norm);
    }

    // Coefficients over full strings, from the normalizations alone.
    let mut coefficients = Vec::with_capacity(1 << n);
    for mask in 0u32..(1u32 << n) {
        let s: Vec<u8> = (0..n).map(|j| ((mask >> j) & 1) as u8).collect();
        let product_weight: f64 = (0..n).map(|j| component(j, s[j] == 1).1).product();
        let z = s.iter().filter(|&&b| b == 0).count();
        let q = if z >= 1 && z - 1 <= cap {
            (0..n).filter(|&j| s[j] == 0).map(|j| 1.0 / norms[j]).sum::<f64>() * product_weight
        } else {
            0.0
        };
        coefficients.push(TypeCoefficient {
            string: s,
            q,
            product_weight,
        });
    }

    Ok(ConvexSplitResult {
        typ_zero_cap: cap,
        tau: DensityOperator::from_parts_unchecked(linalg::hermitian_part(&tau), slot_dim(n, d, None)?),
        tau_minus,
        normalizations: norms,
        complements,
        coefficients,
    })
}

/// `Σ_s q(s) Ψ_s`, rebuilt from the coefficient table.
pub fn tau_from_coefficients(inst: &ConvexSplitInstance, res: &ConvexSplitResult) -> CMat {
    let n = inst.p.len();
    let d = inst.psi[0].d();
    let mut out = CMat::zeros(d.pow(n as u32), d.pow(n as u32));
    for c in &res.coefficients {
        if c.q == 0.0 {
            continue;
        }
        let m = (0..n).fold(CMat::identity(1, 1), |acc, j| {
            let part = if c.string[j] == 1 { res.complements[j].matrix() } else { inst.psi[j].matrix() };
            linalg::kron(&acc, part)
        });
        out += m * cr(c.q);
    }
    out
}

/// `D_max(τ || ⊗ω_i)` together with the `2log₂(1/δ)` budget.
pub fn convex_split_certificate(inst: &ConvexSplitInstance, res: &ConvexSplitResult) -> Result<(f64, f64)> {
    let omega = inst.product_omega()?;
    Ok((qcore::dmax(&res.tau, &omega)?, 2.0 * (1.0 / inst.delta).log2()))
}
