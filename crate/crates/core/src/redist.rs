//! Redistribution states with a skewed Schmidt spectrum, their uniform-amplitude
//! (GHZ) companions, and the bound arithmetic around them.
//!
//! Register order is `RA, Rp, B, C, A` with sizes `d_a, d, d, d, d_a`;
//! `R = RA Rp`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::haar::haar_unitary;
use crate::qcore::linalg::{self, cr, CMat, CVec, SUPPORT_TOL};
use crate::qcore::{self, spectrum_entropy, DensityOperator, HilbertDim, PureState};
use crate::rng::{derived_rng, stream};

pub const R_LABELS: [&str; 2] = ["RA", "Rp"];
/// Largest `d` accepted by [`redist_quantities`].
pub const QUANTITIES_MAX_D: usize = 8;
/// Largest `d_a` accepted by [`redist_quantities`].
pub const QUANTITIES_MAX_DA: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BasisMode {
    /// `w_j(a) = w_j`: the `C` basis does not depend on `a`.
    #[default]
    FixedC,
    /// Independent random `C` basis for every `a`.
    RandomC,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RedistParams {
    pub d: usize,
    pub d_a: usize,
    pub beta: f64,
    pub basis_mode: BasisMode,
    pub seed: u64,
}

impl RedistParams {
    pub fn new(d: usize, d_a: usize, beta: f64, basis_mode: BasisMode, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDim(format!("d = {d} must exceed 1")));
        }
        if d_a < 1 {
            return Err(Error::InvalidDim("d_a must be at least 1".into()));
        }
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(Error::OutOfRange {
                name: "beta",
                value: beta,
                range: "beta >= 1",
            });
        }
        Ok(RedistParams {
            d,
            d_a,
            beta,
            basis_mode,
            seed,
        })
    }

    pub fn layout(&self) -> HilbertDim {
        HilbertDim::of(&[("RA", self.d_a), ("Rp", self.d), ("B", self.d), ("C", self.d), ("A", self.d_a)])
            .expect("sizes validated")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LowEntropySpectrum {
    pub values: Vec<f64>,
    pub entropy: f64,
    /// `2 log₂(d)/β`.
    pub bound: f64,
    pub bound_holds: bool,
    /// The bound is guaranteed only when `log₂(d)/β ≥ 2`.
    pub bound_guaranteed: bool,
}

/// `e₂ = … = e_d = 1/(dβ)`, `e₁ = 1 − (d−1)/(dβ)`.
pub fn low_entropy_spectrum(d: usize, beta: f64) -> Result<LowEntropySpectrum> {
    RedistParams::new(d, 1, beta, BasisMode::FixedC, 0)?;
    let df = d as f64;
    let tail = 1.0 / (df * beta);
    let mut values = vec![tail; d];
    values[0] = 1.0 - (df - 1.0) * tail;
    let entropy = spectrum_entropy(&values);
    let bound = 2.0 * df.log2() / beta;
    Ok(LowEntropySpectrum {
        values,
        entropy,
        bound,
        bound_holds: entropy <= bound,
        bound_guaranteed: df.log2() / beta >= 2.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RedistStatePair {
    pub psi: PureState,
    pub ghz: PureState,
    pub spectrum: Vec<f64>,
    #[serde(skip)]
    pub b_bases: Vec<CMat>,
    #[serde(skip)]
    pub c_bases: Vec<CMat>,
}

fn check_spectrum(e: &[f64], d: usize) -> Result<()> {
    if e.len() != d {
        return Err(Error::DimensionMismatch(d, e.len()));
    }
    let sum: f64 = e.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!("spectrum sums to {sum}")));
    }
    if e.windows(2).any(|w| w[1] > w[0]) || e[d - 1] <= 0.0 {
        return Err(Error::InvalidProbabilities("spectrum must be descending and positive".into()));
    }
    Ok(())
}

/// Amplitude vector of `(1/√d_a) Σ_a |a>|a> Σ_j c_j |u_j>|v_j(a)>|w_j(a)>`.
fn assemble(params: &RedistParams, coeffs: &[f64], b_bases: &[CMat], c_bases: &[CMat]) -> CVec {
    let (d, da) = (params.d, params.d_a);
    let mut v = CVec::zeros(da * d * d * d * da);
    let norm = 1.0 / (da as f64).sqrt();
    for a in 0..da {
        for j in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let idx = (((a * d + j) * d + b) * d + c) * da + a;
                    v[idx] += b_bases[a][(b, j)] * c_bases[a][(c, j)] * cr(norm * coeffs[j]);
                }
            }
        }
    }
    v
}

/// Redistribution state for the low-entropy spectrum of `params.beta`.
pub fn build_redist_pair(params: &RedistParams) -> Result<RedistStatePair> {
    let spectrum = low_entropy_spectrum(params.d, params.beta)?.values;
    build_redist_pair_with_spectrum(params, &spectrum)
}

/// Same construction for an explicit descending spectrum.
pub fn build_redist_pair_with_spectrum(params: &RedistParams, spectrum: &[f64]) -> Result<RedistStatePair> {
    check_spectrum(spectrum, params.d)?;
    let d = params.d;
    let mut b_bases = Vec::with_capacity(params.d_a);
    let mut c_bases = Vec::with_capacity(params.d_a);
    for a in 0..params.d_a {
        b_bases.push(haar_unitary(d, &mut derived_rng(params.seed, stream::REDIST, 2 * a as u64)));
        c_bases.push(match params.basis_mode {
            BasisMode::FixedC => linalg::identity(d),
            BasisMode::RandomC => haar_unitary(d, &mut derived_rng(params.seed, stream::REDIST, 2 * a as u64 + 1)),
        });
    }
    let layout = params.layout();
    let amps: Vec<f64> = spectrum.iter().map(|e| e.sqrt()).collect();
    let flat = vec![1.0 / (d as f64).sqrt(); d];
    let psi = PureState::normalized(assemble(params, &amps, &b_bases, &c_bases), layout.clone())?;
    let ghz = PureState::normalized(assemble(params, &flat, &b_bases, &c_bases), layout)?;
    Ok(RedistStatePair {
        psi,
        ghz,
        spectrum: spectrum.to_vec(),
        b_bases,
        c_bases,
    })
}

/// `‖(1/√(d_a d)) X^{-1/2}|Ψ> − |ω>‖` with `X` the given state on `R`
/// (pseudo-inverse on its support).
pub fn rescaling_deviation(psi: &PureState, ghz: &PureState, reference: &DensityOperator) -> Result<f64> {
    let dim = psi.dim();
    let (da, d) = (dim.size_of("RA")?, dim.size_of("Rp")?);
    let r = da * d;
    if reference.d() != r {
        return Err(Error::DimensionMismatch(r, reference.d()));
    }
    let eig = reference.eigen();
    if eig.values.iter().all(|&v| v <= SUPPORT_TOL) {
        return Err(Error::Numerical("reference state has empty support".into()));
    }
    let inv_sqrt = eig.apply(|v| if v > SUPPORT_TOL { 1.0 / v.sqrt() } else { 0.0 });
    let rest = psi.d() / r;
    let block = CMat::from_row_slice(r, rest, psi.vector().as_slice());
    let moved = inv_sqrt * block * cr(1.0 / ((da * d) as f64).sqrt());
    let target = CMat::from_row_slice(r, rest, ghz.vector().as_slice());
    Ok((moved - target).norm())
}

/// Deviation of the rescaling identity for a built pair.
pub fn verify_rescaling(pair: &RedistStatePair) -> Result<f64> {
    let psi_r = qcore::reduced_pure(&pair.psi, &R_LABELS)?;
    rescaling_deviation(&pair.psi, &pair.ghz, &psi_r)
}

#[derive(Debug, Clone, Serialize)]
pub struct RedistQuantities {
    /// `I(R;C|B)_Ψ`.
    pub cqmi_psi: f64,
    /// `S(Ψ_C)`.
    pub s_psi_c: f64,
    /// `D_max(ω_RB ‖ ω_R ⊗ I/d)`, an upper bound on `I_max(R;B)_ω`.
    pub imax_rb_ub: f64,
    /// `(1/d_a) Σ_a I(Rp;BC)_{ω^a}`, the lower bound on `I(R;BC)_ω` used by
    /// the worst-case argument.
    pub i_r_bc_ghz: f64,
    /// `I(R;BC)_ω` of the full companion state.
    pub i_r_bc_ghz_full: f64,
    pub log2_d: f64,
    pub entropies: RedistEntropies,
}

#[derive(Debug, Clone, Serialize)]
pub struct RedistEntropies {
    pub s_rb: f64,
    pub s_bc: f64,
    pub s_b: f64,
    pub s_rbc: f64,
}

/// Entropy of the marginal on `keep`, through whichever side of the pure
/// state is smaller.
fn marginal_entropy(psi: &PureState, keep: &[&str]) -> Result<f64> {
    let dim = psi.dim();
    let kept: usize = keep.iter().map(|l| dim.size_of(l)).product::<Result<usize>>()?;
    let rest: Vec<&str> = dim
        .registers()
        .iter()
        .map(|r| r.label.as_str())
        .filter(|l| !keep.contains(l))
        .collect();
    let side = if rest.is_empty() || kept <= psi.d() / kept { keep.to_vec() } else { rest };
    if side.is_empty() {
        return Ok(0.0);
    }
    Ok(spectrum_entropy(&qcore::reduced_pure(psi, &side)?.eigen().values))
}

pub fn redist_quantities(pair: &RedistStatePair) -> Result<RedistQuantities> {
    let dim = pair.psi.dim();
    let (da, d) = (dim.size_of("RA")?, dim.size_of("Rp")?);
    if d > QUANTITIES_MAX_D || da > QUANTITIES_MAX_DA {
        return Err(Error::CapExceeded(format!(
            "d = {d}, d_a = {da}; limits {QUANTITIES_MAX_D} and {QUANTITIES_MAX_DA}"
        )));
    }
    let psi = &pair.psi;
    let entropies = RedistEntropies {
        s_rb: marginal_entropy(psi, &["RA", "Rp", "B"])?,
        s_bc: marginal_entropy(psi, &["B", "C"])?,
        s_b: marginal_entropy(psi, &["B"])?,
        s_rbc: marginal_entropy(psi, &["RA", "Rp", "B", "C"])?,
    };
    let cqmi_psi = entropies.s_rb + entropies.s_bc - entropies.s_b - entropies.s_rbc;
    let s_psi_c = marginal_entropy(psi, &["C"])?;

    let ghz = &pair.ghz;
    let omega_rb = qcore::reduced_pure(ghz, &["RA", "Rp", "B"])?;
    let omega_r = qcore::reduced_pure(ghz, &R_LABELS)?;
    let flat_b = DensityOperator::maximally_mixed(HilbertDim::single("B", d));
    let imax_rb_ub = qcore::dmax(&omega_rb, &omega_r.tensor(&flat_b)?)?;

    let i_r_bc_ghz_full = marginal_entropy(ghz, &R_LABELS)? + marginal_entropy(ghz, &["B", "C"])?
        - marginal_entropy(ghz, &["RA", "Rp", "B", "C"])?;

    let sub = HilbertDim::of(&[("Rp", d), ("B", d), ("C", d)])?;
    let flat = vec![1.0 / (d as f64).sqrt(); d];
    let mut per_a = 0.0;
    for a in 0..da {
        let mut v = CVec::zeros(d * d * d);
        for j in 0..d {
            for b in 0..d {
                for c in 0..d {
                    v[(j * d + b) * d + c] += pair.b_bases[a][(b, j)] * pair.c_bases[a][(c, j)] * cr(flat[j]);
                }
            }
        }
        let wa = PureState::normalized(v, sub.clone())?;
        per_a += marginal_entropy(&wa, &["Rp"])? + marginal_entropy(&wa, &["B", "C"])?;
    }
    Ok(RedistQuantities {
        cqmi_psi,
        s_psi_c,
        imax_rb_ub,
        i_r_bc_ghz: per_a / da as f64,
        i_r_bc_ghz_full,
        log2_d: (d as f64).log2(),
        entropies,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstCaseBound {
    pub log2_d: f64,
    pub delta: f64,
    /// `max(0, ((1−3δ)/2) log₂d − 1.5)`.
    pub value: f64,
    /// `log₂(d)/6`.
    pub sixth: f64,
    pub exceeds_sixth: bool,
    /// Smallest `log₂ d` above which `value > log₂(d)/6` at this `δ`.
    pub threshold_log2_d: f64,
}

/// `log₂ d` above which the bound exceeds `log₂(d)/6` for every `δ < 1/6`.
pub const UNIFORM_THRESHOLD_LOG2_D: f64 = 18.0;

pub fn worst_case_redist_bound(d: f64, delta: f64) -> Result<WorstCaseBound> {
    if !(delta > 0.0 && delta < 1.0 / 6.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, 1/6)",
        });
    }
    if d.is_nan() || d <= 1.0 {
        return Err(Error::InvalidDim(format!("d = {d} must exceed 1")));
    }
    let l = d.log2();
    let value = ((1.0 - 3.0 * delta) / 2.0 * l - 1.5).max(0.0);
    Ok(WorstCaseBound {
        log2_d: l,
        delta,
        value,
        sixth: l / 6.0,
        exceeds_sixth: value > l / 6.0,
        threshold_log2_d: threshold_log2_d(delta),
    })
}

/// `1.5 / ((1−3δ)/2 − 1/6) = 9/(2 − 9δ)`; tends to 18 as `δ → 1/6`.
pub fn threshold_log2_d(delta: f64) -> f64 {
    9.0 / (2.0 - 9.0 * delta)
}

#[derive(Debug, Clone, Serialize)]
pub struct ContradictionParams {
    pub p: f64,
    pub eps: f64,
    /// `32 ε^{(1−p)/2}`.
    pub mu: f64,
    /// `128/(μ ε^p)`.
    pub beta: f64,
    /// `√μ + √(8βε) = 8√2 ε^{(1−p)/4}`.
    pub error_bound: f64,
    /// `(1/70)^{4/(1−p)}`.
    pub eps_max: f64,
    pub eps_admissible: bool,
    pub error_below_sixth: bool,
    /// Worst-case cost multiplier `2/(μ(1−ε))` applied to the expected cost.
    pub wc_factor: f64,
    /// Worst-case cost over `log₂ d` when the expected cost is
    /// `I(R;C|B)·ε^{-p} ≤ 4 log₂(d)/β · ε^{-p}`.
    pub wc_cost_per_log2_d: f64,
    pub wc_below_eighth: bool,
}

pub fn contradiction_params(p: f64, eps: f64) -> Result<ContradictionParams> {
    crate::error::check_open_unit("p", p)?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "(0, 1/2)",
        });
    }
    let mu = 32.0 * eps.powf((1.0 - p) / 2.0);
    let beta = 128.0 / (mu * eps.powf(p));
    let error_bound = mu.sqrt() + (8.0 * beta * eps).sqrt();
    let eps_max = (1.0f64 / 70.0).powf(4.0 / (1.0 - p));
    let wc_factor = 2.0 / (mu * (1.0 - eps));
    let wc_cost_per_log2_d = wc_factor * 4.0 / beta * eps.powf(-p);
    Ok(ContradictionParams {
        p,
        eps,
        mu,
        beta,
        error_bound,
        eps_max,
        eps_admissible: eps <= eps_max,
        error_below_sixth: error_bound < 1.0 / 6.0,
        wc_factor,
        wc_cost_per_log2_d,
        wc_below_eighth: wc_cost_per_log2_d <= 1.0 / 8.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, da: usize, beta: f64, mode: BasisMode, seed: u64) -> RedistParams {
        RedistParams::new(d, da, beta, mode, seed).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let s = low_entropy_spectrum(4, 2.0).unwrap();
        assert_eq!(s.values, vec![0.625, 0.125, 0.125, 0.125]);
        assert!((s.entropy - 1.548795).abs() < 1e-6);
        assert!(s.bound_holds);

        let s = low_entropy_spectrum(2, 4.0).unwrap();
        assert!((s.entropy - 0.543564).abs() < 1e-6);
        assert!(!s.bound_holds && !s.bound_guaranteed);

        let s = low_entropy_spectrum(1 << 10, 4.0).unwrap();
        assert!(s.bound_guaranteed && s.bound_holds);
        assert!(low_entropy_spectrum(4, 0.5).is_err());
    }

    #[test]
    fn reduced_r_spectrum() {
        let p = params(3, 2, 2.0, BasisMode::RandomC, 1);
        let pair = build_redist_pair(&p).unwrap();
        let mut got = qcore::reduced_pure(&pair.psi, &R_LABELS).unwrap().eigen().values;
        let mut want: Vec<f64> = pair.spectrum.iter().flat_map(|e| [e / 2.0, e / 2.0]).collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let p = params(2, 2, 3.0, BasisMode::FixedC, 9);
        let a = build_redist_pair(&p).unwrap();
        let b = build_redist_pair(&p).unwrap();
        assert_eq!(a.psi.vector(), b.psi.vector());
        let other = build_redist_pair(&params(2, 2, 3.0, BasisMode::FixedC, 10)).unwrap();
        assert_ne!(a.psi.vector(), other.psi.vector());
    }

    #[test]
    fn rescaling_identity_and_controls() {
        for seed in 0..6 {
            let mode = if seed % 2 == 0 { BasisMode::FixedC } else { BasisMode::RandomC };
            let p = params(2 + seed as usize % 3, 1 + seed as usize % 2, 3.0, mode, seed);
            let pair = build_redist_pair(&p).unwrap();
            assert!(verify_rescaling(&pair).unwrap() < 1e-9);
        }
        let p = params(3, 2, 2.0, BasisMode::FixedC, 4);
        let uniform = vec![1.0 / 3.0; 3];
        let pair = build_redist_pair_with_spectrum(&p, &uniform).unwrap();
        assert!((pair.psi.vector() - pair.ghz.vector()).norm() < 1e-12);
        assert!(verify_rescaling(&pair).unwrap() < 1e-12);

        // Rescale a state whose spectrum moved by 1e-3 with the unperturbed map.
        let nominal = build_redist_pair(&p).unwrap();
        let mut e = nominal.spectrum.clone();
        e[0] -= 1e-3;
        e[1] += 1e-3;
        let shifted = build_redist_pair_with_spectrum(&p, &e).unwrap();
        let reference = qcore::reduced_pure(&nominal.psi, &R_LABELS).unwrap();
        assert!(rescaling_deviation(&shifted.psi, &nominal.ghz, &reference).unwrap() > 1e-4);
    }

    #[test]
    fn quantities_fixed_c() {
        let p = params(2, 2, 4.0, BasisMode::FixedC, 2);
        let pair = build_redist_pair(&p).unwrap();
        let q = redist_quantities(&pair).unwrap();
        assert!(q.cqmi_psi <= 2.0 * q.s_psi_c + 1e-9);
        assert!((q.s_psi_c - spectrum_entropy(&pair.spectrum)).abs() < 1e-9);
        assert!((q.imax_rb_ub - 1.0).abs() < 1e-9);
        assert!((q.i_r_bc_ghz - 2.0).abs() < 1e-9);
        assert!(q.i_r_bc_ghz_full >= q.i_r_bc_ghz - 1e-9);
        assert!(q.i_r_bc_ghz_full <= 2.0 + 1.0 + 1e-9);
    }

    #[test]
    fn quantities_cap() {
        let p = params(9, 1, 2.0, BasisMode::FixedC, 2);
        let pair = build_redist_pair(&p).unwrap();
        assert!(matches!(redist_quantities(&pair), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn worst_case_arithmetic() {
        let b = worst_case_redist_bound(2f64.powi(19), 0.1).unwrap();
        assert!((b.value - 5.15).abs() < 1e-12);
        assert!(b.exceeds_sixth);
        let b = worst_case_redist_bound(2f64.powi(10), 0.1).unwrap();
        assert!((b.value - 2.0).abs() < 1e-12);
        assert!((b.sixth - 10.0 / 6.0).abs() < 1e-12);
        let near = 1.0 / 6.0 - 1e-12;
        assert!((threshold_log2_d(near) - UNIFORM_THRESHOLD_LOG2_D).abs() < 1e-6);
        assert!(worst_case_redist_bound(16.0, 1.0 / 6.0).is_err());
    }

    #[test]
    fn contradiction_parameters() {
        let c = contradiction_params(0.5, 1e-16).unwrap();
        assert!((c.mu - 3.2e-3).abs() < 1e-15);
        assert!((c.beta / 4.0e12 - 1.0).abs() < 1e-9);
        assert!((c.error_bound - 8.0 * 2f64.sqrt() * 1e-2).abs() < 1e-12);
        assert!(c.eps_admissible && c.error_below_sixth);
        assert!((c.wc_cost_per_log2_d - 1.0 / (16.0 * (1.0 - 1e-16))).abs() < 1e-12);
        assert!(!contradiction_params(0.5, 1e-14).unwrap().eps_admissible);
        let lim = contradiction_params(1e-12, 1e-9).unwrap();
        assert!((lim.eps_max - 70f64.powi(-4)).abs() < 1e-15);
        assert!(contradiction_params(1.0, 0.1).is_err());
    }
}
