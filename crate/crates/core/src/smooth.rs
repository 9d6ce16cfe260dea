//! One-sided bounds on the smooth max-relative entropy of pure states.
//!
//! The lower bound goes through the spectral split of the side state at a
//! threshold `1/k` and the closed-form minimal overlap of a smoothing ball
//! with the low-eigenvalue subspace. The upper estimate is a seeded search
//! over pure states inside the ball. Neither is the exact smooth quantity.

use rand::Rng;
use serde::Serialize;

use crate::error::{check_open_unit, Error, Result};
use crate::qcore::haar::{gaussian_vector, random_density};
use crate::qcore::linalg::{self, cr, CMat, CVec, HermEigen, SUPPORT_TOL};
use crate::qcore::{DensityOperator, Ensemble, PureState};
use crate::rng::{derived_rng, stream};

/// Tolerance for projector identities.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Random perturbation steps used by [`smooth_dmax_upper_estimate`].
pub const UPPER_SEARCH_STEPS: usize = 10_000;
/// Random side states added by [`default_candidates`].
pub const RANDOM_CANDIDATES: usize = 200;
const LEAK_TOL: f64 = 1e-9;
const GEODESIC_POINTS: usize = 64;

/// Spectral projectors of a side state below (`qminus`) and at or above
/// (`qplus`) the threshold `1/k`.
#[derive(Debug, Clone)]
pub struct SplitProjectorPair {
    pub qminus: CMat,
    pub qplus: CMat,
    pub k: f64,
}

impl SplitProjectorPair {
    pub fn rank_minus(&self) -> usize {
        linalg::trace(&self.qminus).re.round() as usize
    }

    pub fn rank_plus(&self) -> usize {
        linalg::trace(&self.qplus).re.round() as usize
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmoothParams {
    pub nu: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl SmoothParams {
    pub fn new(nu: f64, gamma: f64, eta: f64) -> Result<Self> {
        check_open_unit("nu", nu)?;
        check_open_unit("gamma", gamma)?;
        check_open_unit("eta", eta)?;
        Ok(SmoothParams { nu, gamma, eta })
    }
}

/// Projector onto the span of the selected eigenvector columns.
fn span_projector(eig: &HermEigen, keep: impl Fn(f64) -> bool) -> CMat {
    let n = eig.values.len();
    let mut p = CMat::zeros(n, n);
    for (j, &v) in eig.values.iter().enumerate() {
        if keep(v) {
            p += linalg::projector(&eig.column(j));
        }
    }
    p
}

pub fn split_projectors(omega: &DensityOperator, k: f64) -> Result<SplitProjectorPair> {
    if !(k > 1.0 && k.is_finite()) {
        return Err(Error::OutOfRange {
            name: "k",
            value: k,
            range: "k > 1",
        });
    }
    let eig = omega.eigen();
    let threshold = 1.0 / k;
    Ok(SplitProjectorPair {
        qminus: span_projector(&eig, |v| v < threshold),
        qplus: span_projector(&eig, |v| v >= threshold),
        k,
    })
}

fn check_projector(q: &CMat, d: usize) -> Result<()> {
    if q.nrows() != d || q.ncols() != d {
        return Err(Error::DimensionMismatch(d, q.nrows()));
    }
    let defect = linalg::projector_defect(q);
    if defect > PROJECTOR_TOL {
        return Err(Error::NotProjector(defect));
    }
    Ok(())
}

/// `(√((1−ν)a) − √(bν))²` for `a > ν`, else 0, where `a + b = 1`.
fn overlap_formula(a: f64, nu: f64) -> f64 {
    let a = a.clamp(0.0, 1.0);
    if a <= nu {
        return 0.0;
    }
    let b = 1.0 - a;
    let root = ((1.0 - nu) * a).sqrt() - (b * nu).sqrt();
    root * root
}

/// Minimal `<λ|Q⁻|λ>` over pure `λ` with `|<λ|ψ>|² > 1−ν`.
pub fn smoothed_overlap_closed_form(psi: &PureState, qminus: &CMat, nu: f64) -> Result<f64> {
    check_open_unit("nu", nu)?;
    check_projector(qminus, psi.d())?;
    Ok(overlap_formula(linalg::expectation(qminus, psi.vector()), nu))
}

/// `log₂(k(1−ν)S)` with `S` the smoothed overlap, or 0 when `<ψ|Q⁻|ψ> ≤ 2ν`.
fn lower_bound_from_split(psi: &CVec, qminus: &CMat, k: f64, nu: f64) -> f64 {
    let a = linalg::expectation(qminus, psi);
    if a <= 2.0 * nu {
        return 0.0;
    }
    (k * (1.0 - nu) * overlap_formula(a, nu)).log2()
}

/// Lower bound on `D_max^ν(ψ‖ω)` through the split of `ω` at `1/k`.
pub fn smooth_dmax_lower_bound(psi: &PureState, omega: &DensityOperator, nu: f64, k: f64) -> Result<f64> {
    check_open_unit("nu", nu)?;
    if psi.d() != omega.d() {
        return Err(Error::DimensionMismatch(psi.d(), omega.d()));
    }
    let split = split_projectors(omega, k)?;
    Ok(lower_bound_from_split(psi.vector(), &split.qminus, k, nu))
}

/// Layered form of the same bound. With `t₁ < … < t_m` the distinct nonzero
/// eigenvalues of `ω` and `Q_j = 1[ω ≤ t_j]`, the pseudo-inverse is
/// `Σ_j (1/t_j − 1/t_{j+1}) Q_j`, so the smoothed overlaps of every `Q_j`
/// combine into `log₂((1−ν) Σ_j (1/t_j − 1/t_{j+1}) S^ν(ψ‖Q_j))`. It
/// dominates the single-threshold bound at every `k`. Returns `+∞` when the
/// smoothing ball cannot avoid the kernel of `ω`, and never less than 0.
pub fn layered_smooth_dmax_lower_bound(psi: &PureState, omega: &DensityOperator, nu: f64) -> Result<f64> {
    check_open_unit("nu", nu)?;
    if psi.d() != omega.d() {
        return Err(Error::DimensionMismatch(psi.d(), omega.d()));
    }
    let eig = omega.eigen();
    let overlap = |q: &CMat| overlap_formula(linalg::expectation(q, psi.vector()), nu);
    if overlap(&span_projector(&eig, |v| v <= SUPPORT_TOL)) > 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut levels: Vec<f64> = Vec::new();
    for &t in eig.values.iter().rev() {
        if t > SUPPORT_TOL && levels.last().is_none_or(|&l| t - l > SUPPORT_TOL) {
            levels.push(t);
        }
    }
    let mut total = 0.0;
    for (j, &t) in levels.iter().enumerate() {
        let next = levels.get(j + 1).map_or(0.0, |&u| 1.0 / u);
        let q = span_projector(&eig, |v| v <= t + SUPPORT_TOL);
        total += (1.0 / t - next) * overlap(&q);
    }
    Ok(((1.0 - nu) * total).log2().max(0.0))
}

/// `<λ|ω⁻¹|λ>` through the eigenbasis, `+∞` when `λ` leaks off the support.
struct InverseForm {
    eig: HermEigen,
}

impl InverseForm {
    fn value(&self, v: &CVec) -> f64 {
        let coords = self.eig.vectors.adjoint() * v;
        let mut total = 0.0;
        let mut leak = 0.0;
        for (j, &w) in self.eig.values.iter().enumerate() {
            let mass = coords[j].norm_sqr();
            if w > SUPPORT_TOL {
                total += mass / w;
            } else {
                leak += mass;
            }
        }
        if leak > LEAK_TOL {
            f64::INFINITY
        } else {
            total
        }
    }
}

/// Moves a unit vector onto the cap `|<ψ|λ>| ≥ floor`, keeping its direction
/// orthogonal to `ψ`.
fn onto_cap(psi: &CVec, v: &CVec, floor: f64) -> CVec {
    let overlap = psi.dotc(v);
    let mag = overlap.norm();
    let aligned = if mag > 0.0 { v * (overlap.conj() / cr(mag)) } else { v.clone() };
    if mag >= floor {
        return aligned;
    }
    let mut perp = &aligned - psi * psi.dotc(&aligned);
    let pn = perp.norm();
    if pn < 1e-15 {
        return psi.clone();
    }
    perp /= cr(pn);
    psi * cr(floor) + perp * cr((1.0 - floor * floor).max(0.0).sqrt())
}

/// Great-circle point `cos φ ψ + sin φ w` for unit `w ⟂ ψ`.
fn geodesic(psi: &CVec, w: &CVec, phi: f64) -> CVec {
    psi * cr(phi.cos()) + w * cr(phi.sin())
}

/// Minimum of `log₂<λ|ω⁻¹|λ>` found over pure `λ` with `|<λ|ψ>| ≥ 1−ν`.
///
/// Candidates: geodesics from `ψ` toward each eigenvector of `ω` and toward
/// the descent direction of the quadratic form, then a seeded random search
/// projected onto the ball. An upper bound on `D_max^ν(ψ‖ω)`.
pub fn smooth_dmax_upper_estimate(psi: &PureState, omega: &DensityOperator, nu: f64, seed: u64) -> Result<f64> {
    check_open_unit("nu", nu)?;
    if psi.d() != omega.d() {
        return Err(Error::DimensionMismatch(psi.d(), omega.d()));
    }
    let form = InverseForm { eig: omega.eigen() };
    let p = psi.vector();
    let floor = 1.0 - nu;
    let phi_max = floor.acos();

    let mut best_vec = p.clone();
    let mut best = form.value(p);
    let consider = |v: CVec, best: &mut f64, best_vec: &mut CVec| {
        let f = form.value(&v);
        if f < *best {
            *best = f;
            *best_vec = v;
        }
    };

    let inv = form.eig.apply(|v| if v > SUPPORT_TOL { 1.0 / v } else { 0.0 });
    let mut directions: Vec<CVec> = (0..psi.d()).map(|j| form.eig.column(j)).collect();
    directions.push(-(&inv * p));
    for dir in directions {
        let mut w = &dir - p * p.dotc(&dir);
        let n = w.norm();
        if n < 1e-12 {
            continue;
        }
        w /= cr(n);
        // Phase making the cross term of the quadratic form non-positive.
        let cross = p.dotc(&(&inv * &w));
        if cross.norm() > 0.0 {
            w *= -(cross.conj() / cr(cross.norm()));
        }
        for s in 0..=GEODESIC_POINTS {
            let phi = phi_max * s as f64 / GEODESIC_POINTS as f64;
            consider(geodesic(p, &w, phi), &mut best, &mut best_vec);
        }
    }

    let mut rng = derived_rng(seed, stream::SMOOTH, 0);
    let mut scale = 0.5;
    for _ in 0..UPPER_SEARCH_STEPS {
        let step = gaussian_vector(psi.d(), &mut rng) * cr(scale);
        let mut v = &best_vec + step;
        let n = v.norm();
        if n < 1e-12 {
            continue;
        }
        v /= cr(n);
        let v = onto_cap(p, &v, floor);
        let before = best;
        consider(v, &mut best, &mut best_vec);
        scale = if best < before { (scale * 1.5).min(1.0) } else { (scale * 0.995).max(1e-6) };
    }
    Ok(best.log2())
}

#[derive(Debug, Clone, Serialize)]
pub struct AverageBoundReport {
    /// Upper bound on `E_i 2^{-D_max^ν(Ψ_i‖ω)}`.
    pub bound: f64,
    pub bad_fraction: f64,
    pub k: f64,
    pub nu: f64,
    pub delta: f64,
    /// Rank of the projector `Q` inside the low-eigenvalue subspace, orthogonal to `|0>`.
    pub q_rank: usize,
    pub per_state_lower_bounds: Vec<f64>,
    /// Chebyshev-based prediction for the bad-set mass, `96/d`.
    pub predicted_bad_fraction: f64,
    /// Uniform bound on the good-set terms, `40/(dδ)`.
    pub good_term_bound: f64,
    /// `2^{-log₂(dδ)+6} = 64/(dδ)`.
    pub stated_bound: f64,
}

/// Upper bound on the average `2^{-D_max^ν(Ψ_i‖ω)}` for a fixed `ω`.
///
/// States with `<Ψ_i|Q|Ψ_i> < δ/2` are counted as bad and contribute their
/// full weight; every other state contributes `2^{-L_i}` with `L_i` the
/// per-state lower bound at `k`. `k` defaults to `d/4`.
pub fn ensemble_avg_2pow_neg_dmax_bound(
    ens: &Ensemble,
    omega: &DensityOperator,
    nu: f64,
    delta: f64,
    k: Option<f64>,
) -> Result<AverageBoundReport> {
    check_open_unit("delta", delta)?;
    if !(nu > 0.0 && nu < delta / 8.0) {
        return Err(Error::OutOfRange {
            name: "nu",
            value: nu,
            range: "(0, delta/8)",
        });
    }
    let d = ens.dim().total();
    if omega.d() != d {
        return Err(Error::DimensionMismatch(d, omega.d()));
    }
    let k = k.unwrap_or(d as f64 / 4.0);
    let split = split_projectors(omega, k)?;
    let low = HermEigen::new(&split.qminus);
    let cols: Vec<usize> = (0..d).filter(|&j| low.values[j] > 0.5).collect();
    let basis = CMat::from_fn(d, cols.len(), |r, c| low.vectors[(r, cols[c])]);
    let q_basis = linalg::complement_within(&basis, &linalg::basis_vector(d, 0));
    let q = &q_basis * q_basis.adjoint();

    let mut bound = 0.0;
    let mut bad = 0.0;
    let mut lower = Vec::with_capacity(ens.len());
    for (p, psi) in ens.items() {
        let l = lower_bound_from_split(psi.vector(), &split.qminus, k, nu);
        lower.push(l);
        if linalg::expectation(&q, psi.vector()) < delta / 2.0 {
            bad += p;
            bound += p;
        } else {
            bound += p * (-l).exp2().min(1.0);
        }
    }
    let df = d as f64;
    Ok(AverageBoundReport {
        bound,
        bad_fraction: bad,
        k,
        nu,
        delta,
        q_rank: q_basis.ncols(),
        per_state_lower_bounds: lower,
        predicted_bad_fraction: 96.0 / df,
        good_term_bound: 40.0 / (df * delta),
        stated_bound: 64.0 / (df * delta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// The candidate list is known to contain the maximizing side state.
    Certified,
    /// Finite candidate search; the value is an estimate.
    Heuristic,
}

#[derive(Debug, Clone, Serialize)]
pub struct QStarEstimate {
    pub value: f64,
    pub regime: Regime,
    pub best_candidate: usize,
    /// `Σ_x p(x) 2^{-L_x}` at the best candidate.
    pub best_average: f64,
    pub candidates: usize,
}

/// `−log₂ max_ω Σ_x p(x) 2^{-L(Ψ_x, ω)}` over the supplied side states, with
/// `L` the layered per-state lower bound.
pub fn q_star(ens: &Ensemble, nu: f64, candidates: &[DensityOperator], exhaustive: bool) -> Result<QStarEstimate> {
    check_open_unit("nu", nu)?;
    if candidates.is_empty() {
        return Err(Error::Empty("omega candidates"));
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for (j, omega) in candidates.iter().enumerate() {
        let mut avg = 0.0;
        for (p, psi) in ens.items() {
            let l = layered_smooth_dmax_lower_bound(psi, omega, nu)?;
            avg += p * (-l).exp2().min(1.0);
        }
        if avg > best.0 {
            best = (avg, j);
        }
    }
    Ok(QStarEstimate {
        value: -best.0.log2(),
        regime: if exhaustive { Regime::Certified } else { Regime::Heuristic },
        best_candidate: best.1,
        best_average: best.0,
        candidates: candidates.len(),
    })
}

/// Average state, maximally mixed state, every member, and
/// [`RANDOM_CANDIDATES`] seeded full-rank random states.
pub fn default_candidates(ens: &Ensemble, seed: u64) -> Vec<DensityOperator> {
    let dim = ens.dim().clone();
    let mut out = vec![ens.average_state(), DensityOperator::maximally_mixed(dim.clone())];
    out.extend(ens.items().iter().map(|(_, psi)| psi.density()));
    for j in 0..RANDOM_CANDIDATES {
        let mut rng = derived_rng(seed, stream::SMOOTH, 1 + j as u64);
        let rank = rng.random_range(1..=dim.total());
        out.push(random_density(&dim, rank, &mut rng));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentCheck {
    pub mean: f64,
    pub mean_band: (f64, f64),
    pub second_moment: f64,
    pub second_band: (f64, f64),
    pub ok: bool,
}

/// First and second moments of `<Ψ_i|Q|Ψ_i>` for a projector `Q ⟂ |0>`
/// against their Haar values on the `(d−1)`-dimensional complement of `|0>`,
/// widened by the realized concentration deviations `eps1` (first moment)
/// and `eps3` (second moment).
pub fn projector_moments(ens: &Ensemble, q: &CMat, delta: f64, eps1: f64, eps3: f64) -> Result<MomentCheck> {
    let d = ens.dim().total();
    check_projector(q, d)?;
    let leak = q.column(0).norm();
    if leak > PROJECTOR_TOL {
        return Err(Error::NotOrthogonal(leak));
    }
    let n = (d - 1) as f64;
    let rank = linalg::trace(q).re.round();
    let (mut m1, mut m2) = (0.0, 0.0);
    for (p, psi) in ens.items() {
        let v = linalg::expectation(q, psi.vector());
        m1 += p * v;
        m2 += p * v * v;
    }
    let c1 = delta * rank / n;
    let c2 = delta * delta * rank * (rank + 1.0) / (n * (n + 1.0));
    let mean_band = (c1 - delta * eps1, c1 + delta * eps1);
    let second_band = (c2 - delta * delta * eps3, c2 + delta * delta * eps3);
    let slack = 1e-12;
    let ok = m1 >= mean_band.0 - slack
        && m1 <= mean_band.1 + slack
        && m2 >= second_band.0 - slack
        && m2 <= second_band.1 + slack;
    Ok(MomentCheck {
        mean: m1,
        mean_band,
        second_moment: m2,
        second_band,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::haar::haar_state_with;
    use crate::qcore::linalg::{basis_vector, c, identity};
    use crate::qcore::{dmax_pure, HilbertDim};
    use crate::rng::rng_from_seed;

    fn dim(d: usize) -> HilbertDim {
        HilbertDim::single("S", d)
    }

    fn diag_state(values: &[f64]) -> DensityOperator {
        let d = values.len();
        let m = CMat::from_fn(d, d, |r, col| if r == col { cr(values[r]) } else { linalg::ZERO });
        DensityOperator::new(m, dim(d)).unwrap()
    }

    /// Minimal overlap through the plane spanned by `Q⁻ψ` and `Q⁺ψ`: smallest
    /// `|α|` for which some `β` on the unit ellipse meets the fidelity line.
    fn plane_minimum(a: f64, nu: f64) -> f64 {
        let b = 1.0 - a;
        let target = (1.0 - nu).sqrt();
        let reach = |alpha: f64| alpha * a + (b * (1.0 - alpha * alpha * a)).max(0.0).sqrt();
        if reach(0.0) >= target {
            return 0.0;
        }
        let top = 1.0 / a.sqrt();
        let grid = 20_000;
        let first = (0..=grid)
            .map(|s| top * s as f64 / grid as f64)
            .find(|&al| reach(al) >= target)
            .expect("feasible point");
        let (mut lo, mut hi) = (first - top / grid as f64, first);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if reach(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi * hi * a
    }

    #[test]
    fn split_examples() {
        let d = 6;
        let s = split_projectors(&DensityOperator::maximally_mixed(dim(d)), d as f64 / 2.0).unwrap();
        assert_eq!(s.rank_plus(), 0);
        assert!(linalg::max_abs_diff(&s.qminus, &identity(d)) < 1e-12);

        let pure = PureState::basis(dim(3), 0).unwrap().density();
        let s = split_projectors(&pure, 2.0).unwrap();
        assert!(linalg::max_abs_diff(&s.qplus, &linalg::projector(&basis_vector(3, 0))) < 1e-12);
        assert!(split_projectors(&pure, 1.0).is_err());
    }

    #[test]
    fn split_rank_counts_heavy_eigenvalues() {
        let mut rng = rng_from_seed(1);
        for d in [8, 12, 16] {
            let omega = random_density(&dim(d), d, &mut rng);
            let k = d as f64 / 4.0;
            let s = split_projectors(&omega, k).unwrap();
            let heavy = omega.eigen().values.iter().filter(|&&v| v >= 1.0 / k).count();
            assert_eq!(s.rank_plus(), heavy);
            assert!(s.rank_plus() as f64 <= k);
            let sum = &s.qminus + &s.qplus;
            assert!(linalg::max_abs_diff(&sum, &identity(d)) < 1e-10);
            assert!((&s.qminus * &s.qplus).norm() < 1e-10);
            assert!(linalg::projector_defect(&s.qminus) < 1e-10);
        }
    }

    #[test]
    fn closed_form_examples() {
        let psi = PureState::basis(dim(4), 1).unwrap();
        let q = identity(4);
        let v = smoothed_overlap_closed_form(&psi, &q, 0.2).unwrap();
        assert!((v - 0.8).abs() < 1e-12);

        let mut rng = rng_from_seed(2);
        let psi = haar_state_with(&dim(4), None, &mut rng).unwrap();
        let q = linalg::projector(&basis_vector(4, 0)) + linalg::projector(&basis_vector(4, 2));
        let a = linalg::expectation(&q, psi.vector());
        let v = smoothed_overlap_closed_form(&psi, &q, 1e-12).unwrap();
        assert!((v - a).abs() < 1e-5);

        let bad = q.clone() * cr(0.9);
        assert!(matches!(smoothed_overlap_closed_form(&psi, &bad, 0.1), Err(Error::NotProjector(_))));
    }

    #[test]
    fn closed_form_matches_plane_reduction() {
        let mut rng = rng_from_seed(3);
        for case in 0..200 {
            let d = 3 + case % 4;
            let psi = haar_state_with(&dim(d), None, &mut rng).unwrap();
            let u = crate::qcore::haar::haar_unitary(d, &mut rng);
            let r = 1 + case % (d - 1);
            let q = CMat::from_fn(d, d, |i, j| (0..r).map(|t| u[(i, t)] * u[(j, t)].conj()).sum());
            let nu: f64 = rng.random_range(0.01..0.5);
            let a = linalg::expectation(&q, psi.vector());
            let closed = smoothed_overlap_closed_form(&psi, &q, nu).unwrap();
            let reduced = if a > nu { plane_minimum(a, nu) } else { 0.0 };
            assert!((closed - reduced).abs() < 1e-7, "case {case}: {closed} vs {reduced}");
        }
    }

    #[test]
    fn closed_form_monotone_in_nu() {
        let mut rng = rng_from_seed(4);
        let psi = haar_state_with(&dim(5), None, &mut rng).unwrap();
        let q = identity(5) - linalg::projector(&basis_vector(5, 0));
        let mut last = f64::INFINITY;
        for s in 1..100 {
            let v = smoothed_overlap_closed_form(&psi, &q, s as f64 / 100.0).unwrap();
            assert!(v <= last + 1e-15);
            last = v;
        }
    }

    #[test]
    fn lower_bound_examples() {
        let d = 16;
        let psi = PureState::basis(dim(d), 3).unwrap();
        // Eigenvalue 1/d everywhere: the whole space is below 1/8.
        let omega = DensityOperator::maximally_mixed(dim(d));
        let l = smooth_dmax_lower_bound(&psi, &omega, 0.1, 8.0).unwrap();
        assert!((l - 6.48f64.log2()).abs() < 1e-12);

        // <ψ|Q⁻|ψ> = 2ν exactly.
        let omega = diag_state(&[0.7, 0.1, 0.1, 0.1]);
        let v = CVec::from_vec(vec![cr(0.75f64.sqrt()), cr(0.5), linalg::ZERO, linalg::ZERO]);
        let psi = PureState::new(v, dim(4)).unwrap();
        assert_eq!(smooth_dmax_lower_bound(&psi, &omega, 0.125, 2.0).unwrap(), 0.0);
        assert!(smooth_dmax_lower_bound(&psi, &omega, 0.124, 2.0).unwrap() != 0.0);
    }

    #[test]
    fn layered_bound_dominates_single_threshold() {
        let mut rng = rng_from_seed(7);
        for case in 0..50 {
            let d = 3 + case % 6;
            let psi = haar_state_with(&dim(d), None, &mut rng).unwrap();
            let omega = random_density(&dim(d), d, &mut rng);
            let nu: f64 = rng.random_range(0.001..0.1);
            let layered = layered_smooth_dmax_lower_bound(&psi, &omega, nu).unwrap();
            for &t in &omega.eigen().values {
                if t < 1.0 - 1e-9 {
                    let single = smooth_dmax_lower_bound(&psi, &omega, nu, 1.0 / t * (1.0 - 1e-12)).unwrap();
                    assert!(single <= layered + 1e-9);
                }
            }
            // ν → 0 recovers the pure-state value.
            let exact = dmax_pure(&psi, &omega).unwrap();
            let tight = layered_smooth_dmax_lower_bound(&psi, &omega, 1e-14).unwrap();
            assert!((tight - exact.max(0.0)).abs() < 1e-5, "{tight} vs {exact}");
        }
    }

    #[test]
    fn upper_estimate_examples() {
        let mut rng = rng_from_seed(5);
        let d = 5;
        let psi = haar_state_with(&dim(d), None, &mut rng).unwrap();
        let omega = random_density(&dim(d), d, &mut rng);
        let u = smooth_dmax_upper_estimate(&psi, &omega, 1e-14, 9).unwrap();
        assert!((u - dmax_pure(&psi, &omega).unwrap()).abs() < 1e-6);

        let flat = DensityOperator::maximally_mixed(dim(d));
        for nu in [0.05, 0.3] {
            let u = smooth_dmax_upper_estimate(&psi, &flat, nu, 9).unwrap();
            assert!((u - (d as f64).log2()).abs() < 1e-9);
        }
        let a = smooth_dmax_upper_estimate(&psi, &omega, 0.1, 9).unwrap();
        let b = smooth_dmax_upper_estimate(&psi, &omega, 0.1, 9).unwrap();
        assert_eq!(a, b);
        assert!(a <= dmax_pure(&psi, &omega).unwrap());
    }

    #[test]
    fn sandwich_small_cases() {
        let mut rng = rng_from_seed(6);
        for case in 0..40 {
            let d = 5 + case % 4;
            let psi = haar_state_with(&dim(d), None, &mut rng).unwrap();
            let omega = random_density(&dim(d), d, &mut rng);
            let nu: f64 = rng.random_range(0.01..0.2);
            let lo = smooth_dmax_lower_bound(&psi, &omega, nu, d as f64 / 4.0).unwrap();
            let hi = smooth_dmax_upper_estimate(&psi, &omega, nu, case as u64).unwrap();
            assert!(lo <= hi + 1e-6, "case {case}: {lo} > {hi}");
        }
    }

    #[test]
    fn q_star_examples() {
        let s = PureState::basis(dim(3), 1).unwrap();
        let ens = Ensemble::new(vec![(1.0, s.clone())]).unwrap();
        let est = q_star(&ens, 0.01, &[s.density()], true).unwrap();
        assert!(est.value.abs() < 1e-12);
        assert_eq!(est.regime, Regime::Certified);

        let d2 = dim(2);
        let ens = Ensemble::uniform(vec![
            PureState::basis(d2.clone(), 0).unwrap(),
            PureState::basis(d2.clone(), 1).unwrap(),
        ])
        .unwrap();
        let nu = 1e-6;
        let cands = default_candidates(&ens, 3);
        let est = q_star(&ens, nu, &cands, false).unwrap();
        assert!((est.value - 1.0).abs() < 1e-4, "{}", est.value);
        assert_eq!(est.regime, Regime::Heuristic);
        assert!(q_star(&ens, nu, &[], false).is_err());
    }

    #[test]
    fn average_bound_degenerate_and_flat() {
        let d = 8;
        let delta: f64 = 0.2;
        let v = CVec::from_fn(d, |i, _| match i {
            0 => cr((1.0 - delta).sqrt()),
            3 => c(0.0, delta.sqrt()),
            _ => linalg::ZERO,
        });
        let psi = PureState::new(v, dim(d)).unwrap();
        let ens = Ensemble::new(vec![(0.5, psi.clone()), (0.5, psi.clone())]).unwrap();
        let rep = ensemble_avg_2pow_neg_dmax_bound(&ens, &psi.density(), 0.01, delta, None).unwrap();
        assert!((rep.bound - 1.0).abs() < 1e-12);
        assert!((rep.bad_fraction - 1.0).abs() < 1e-12);

        let flat = DensityOperator::maximally_mixed(dim(d));
        let rep = ensemble_avg_2pow_neg_dmax_bound(&ens, &flat, 0.01, delta, None).unwrap();
        assert_eq!(rep.bad_fraction, 0.0);
        assert_eq!(rep.q_rank, d - 1);
        assert!(rep.bound <= rep.good_term_bound);
        assert!(ensemble_avg_2pow_neg_dmax_bound(&ens, &flat, 0.03, delta, None).is_err());
    }
}
