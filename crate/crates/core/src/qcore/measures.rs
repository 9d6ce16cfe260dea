//! Fidelity, distances, entropies and max-relative entropy. All logs base 2.

use super::linalg::{self, clamp_eigen, CMat, HermEigen, SUPPORT_TOL};
use super::state::{DensityOperator, HilbertDim, PureState};
use crate::error::{Error, Result};

/// Mass of `rho` outside `sigma`'s support above which the support test fails.
const SUPPORT_LEAK_TOL: f64 = 1e-9;

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// Generalized fidelity `‖√ρ√σ‖₁ + √((1−Tr ρ)(1−Tr σ))`, clamped to [0, 1].
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho.d(), sigma.d())?;
    let overlap = linalg::trace_norm(&(linalg::psd_sqrt(rho.matrix()) * linalg::psd_sqrt(sigma.matrix())));
    let defect = ((1.0 - rho.trace()).max(0.0) * (1.0 - sigma.trace()).max(0.0)).sqrt();
    Ok((overlap + defect).clamp(0.0, 1.0))
}

/// `|<ψ|φ>|`, the fidelity of two pure states.
pub fn pure_fidelity(psi: &PureState, phi: &PureState) -> Result<f64> {
    same_dim(psi.d(), phi.d())?;
    Ok(psi.inner(phi).norm().min(1.0))
}

pub fn purified_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// `−Σ λ log λ` over a spectrum, `0 log 0 = 0`.
pub fn spectrum_entropy(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|&v| clamp_eigen(v))
        .filter(|&v| v > 0.0)
        .map(|v| -v * v.log2())
        .sum()
}

/// `H(p) = −p log p − (1−p) log(1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    spectrum_entropy(&[p, 1.0 - p])
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    if !rho.is_normalized() {
        return Err(Error::InvalidTrace(rho.trace()));
    }
    Ok(spectrum_entropy(&rho.eigen().values))
}

/// Entropy of a Hermitian matrix known to be a normalized state.
pub(crate) fn matrix_entropy(m: &CMat) -> f64 {
    spectrum_entropy(&HermEigen::new(m).values)
}

/// Support projection data of `sigma`: eigenvectors with eigenvalue above the
/// support threshold, and those eigenvalues.
struct Support {
    vectors: CMat,
    values: Vec<f64>,
}

fn support(sigma: &CMat) -> Support {
    let eig = HermEigen::new(sigma);
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&j| eig.values[j] > SUPPORT_TOL)
        .collect();
    let n = sigma.nrows();
    let mut vectors = CMat::zeros(n, keep.len());
    for (col, &j) in keep.iter().enumerate() {
        vectors.set_column(col, &eig.vectors.column(j));
    }
    Support {
        vectors,
        values: keep.iter().map(|&j| eig.values[j]).collect(),
    }
}

/// Trace of `rho` outside the span of `vectors`.
fn leakage(rho: &CMat, vectors: &CMat) -> f64 {
    let inside = linalg::trace(&(vectors.adjoint() * rho * vectors)).re;
    linalg::trace(rho).re - inside
}

/// `D_max(ρ||σ)`; `+∞` when `ρ` is not supported inside `σ`.
pub fn dmax(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho.d(), sigma.d())?;
    Ok(dmax_matrices(rho.matrix(), sigma.matrix()))
}

pub(crate) fn dmax_matrices(rho: &CMat, sigma: &CMat) -> f64 {
    let sup = support(sigma);
    if sup.values.is_empty() || leakage(rho, &sup.vectors) > SUPPORT_LEAK_TOL {
        return f64::INFINITY;
    }
    let k = sup.values.len();
    let mut scaled = sup.vectors.clone();
    for (j, &v) in sup.values.iter().enumerate() {
        let s = linalg::cr(1.0 / v.sqrt());
        for r in 0..scaled.nrows() {
            scaled[(r, j)] *= s;
        }
    }
    let reduced = scaled.adjoint() * rho * &scaled;
    debug_assert_eq!(reduced.nrows(), k);
    let top = HermEigen::new(&reduced).max_value();
    if top <= 0.0 {
        return f64::NEG_INFINITY;
    }
    top.log2()
}

/// `log₂<ψ|σ⁻¹|ψ>` for full-rank `σ`; the pure-state route to `D_max`.
pub fn dmax_pure(psi: &PureState, sigma: &DensityOperator) -> Result<f64> {
    same_dim(psi.d(), sigma.d())?;
    let eig = sigma.eigen();
    if eig.min_value() <= SUPPORT_TOL {
        return Ok(dmax_matrices(&linalg::projector(psi.vector()), sigma.matrix()));
    }
    let inv = eig.apply(|v| 1.0 / v);
    Ok(linalg::expectation(&inv, psi.vector()).log2())
}

/// `Tr ρ(log ρ − log σ)`; `+∞` on support violation.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho.d(), sigma.d())?;
    let sup = support(sigma.matrix());
    if sup.values.is_empty() || leakage(rho.matrix(), &sup.vectors) > SUPPORT_LEAK_TOL {
        return Ok(f64::INFINITY);
    }
    let neg_entropy = -spectrum_entropy(&rho.eigen().values);
    let reduced = sup.vectors.adjoint() * rho.matrix() * &sup.vectors;
    let cross: f64 = sup
        .values
        .iter()
        .enumerate()
        .map(|(j, &v)| reduced[(j, j)].re * v.log2())
        .sum();
    Ok(neg_entropy - cross)
}

fn positions(dim: &HilbertDim, labels: &[&str]) -> Result<Vec<usize>> {
    let mut pos = labels
        .iter()
        .map(|l| dim.position(l))
        .collect::<Result<Vec<_>>>()?;
    pos.sort_unstable();
    pos.dedup();
    Ok(pos)
}

fn split_offsets(dim: &HilbertDim, keep: &[&str]) -> Result<(Vec<usize>, Vec<usize>, HilbertDim)> {
    let kp = positions(dim, keep)?;
    if kp.is_empty() {
        return Err(Error::InvalidDim("nothing to keep".into()));
    }
    let tp: Vec<usize> = (0..dim.registers().len()).filter(|p| !kp.contains(p)).collect();
    Ok((dim.offsets(&kp), dim.offsets(&tp), dim.restrict(keep)?))
}

/// Reduced state on the `keep` registers (kept in layout order).
pub fn partial_trace(rho: &DensityOperator, keep: &[&str]) -> Result<DensityOperator> {
    let (ko, to, kdim) = split_offsets(rho.dim(), keep)?;
    let m = rho.matrix();
    let out = CMat::from_fn(ko.len(), ko.len(), |i, j| {
        to.iter().map(|&t| m[(ko[i] + t, ko[j] + t)]).sum()
    });
    Ok(DensityOperator::from_parts_unchecked(linalg::hermitian_part(&out), kdim))
}

/// Reduced state of a pure vector without forming the full projector.
pub fn reduced_pure(psi: &PureState, keep: &[&str]) -> Result<DensityOperator> {
    let (ko, to, kdim) = split_offsets(psi.dim(), keep)?;
    let v = psi.vector();
    let amp = CMat::from_fn(ko.len(), to.len(), |i, t| v[ko[i] + to[t]]);
    let out = &amp * amp.adjoint();
    Ok(DensityOperator::from_parts_unchecked(linalg::hermitian_part(&out), kdim))
}

/// `S` of the marginal on `labels`; the empty group has entropy 0.
fn group_entropy(rho: &DensityOperator, labels: &[&str]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    Ok(matrix_entropy(partial_trace(rho, labels)?.matrix()))
}

fn check_disjoint(groups: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for g in groups {
        for l in *g {
            if seen.contains(l) {
                return Err(Error::InvalidDim(format!("register {l} appears in two groups")));
            }
            seen.push(l);
        }
    }
    Ok(())
}

/// `I(A;B) = S(A) + S(B) − S(AB)`.
pub fn mutual_information(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    if !rho.is_normalized() {
        return Err(Error::InvalidTrace(rho.trace()));
    }
    check_disjoint(&[a, b])?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidDim("empty register group".into()));
    }
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    Ok(group_entropy(rho, a)? + group_entropy(rho, b)? - group_entropy(rho, &ab)?)
}

/// `I(A;C|B) = S(AB) + S(BC) − S(B) − S(ABC)`.
pub fn cqmi(rho: &DensityOperator, a: &[&str], c: &[&str], b: &[&str]) -> Result<f64> {
    if !rho.is_normalized() {
        return Err(Error::InvalidTrace(rho.trace()));
    }
    check_disjoint(&[a, b, c])?;
    if a.is_empty() || c.is_empty() {
        return Err(Error::InvalidDim("empty register group".into()));
    }
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    let bc: Vec<&str> = b.iter().chain(c).copied().collect();
    let abc: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
    Ok(group_entropy(rho, &ab)? + group_entropy(rho, &bc)?
        - group_entropy(rho, b)?
        - group_entropy(rho, &abc)?)
}
