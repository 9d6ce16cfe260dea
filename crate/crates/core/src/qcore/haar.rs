//! Haar-distributed pure states and unitaries, plus random mixed states for tests.

use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{self, c, cr, CMat, CVec};
use super::state::{DensityOperator, HilbertDim, PureState};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Vector of i.i.d. standard complex Gaussians.
pub fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    CVec::from_fn(d, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Haar-random unit vector, optionally orthogonal to a given state.
pub fn haar_state_with<R: Rng + ?Sized>(
    dim: &HilbertDim,
    orthogonal_to: Option<&PureState>,
    rng: &mut R,
) -> Result<PureState> {
    let d = dim.total();
    if let Some(anchor) = orthogonal_to {
        if d < 2 {
            return Err(Error::InvalidDim("orthogonal sampling needs d >= 2".into()));
        }
        if anchor.d() != d {
            return Err(Error::DimensionMismatch(d, anchor.d()));
        }
    }
    loop {
        let mut v = gaussian_vector(d, rng);
        if let Some(anchor) = orthogonal_to {
            let a = anchor.vector();
            let overlap = a.dotc(&v);
            v -= a * overlap;
            // Second pass removes the round-off left by the first.
            let overlap = a.dotc(&v);
            v -= a * overlap;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            return PureState::new(v / cr(norm), dim.clone());
        }
    }
}

/// Seeded entry point: the same `(dim, orthogonal_to, seed)` gives the same vector.
pub fn haar_pure_state(dim: &HilbertDim, orthogonal_to: Option<&PureState>, seed: u64) -> Result<PureState> {
    haar_state_with(dim, orthogonal_to, &mut rng_from_seed(seed))
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase correction
/// on the diagonal of `R`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = gaussian_matrix(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / cr(diag.norm()) } else { linalg::ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random unitary acting as the identity on `|0>` and Haar on its complement.
pub fn haar_unitary_fixing_zero<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let inner = haar_unitary(d - 1, rng);
    let mut u = CMat::zeros(d, d);
    u[(0, 0)] = linalg::ONE;
    u.view_mut((1, 1), (d - 1, d - 1)).copy_from(&inner);
    u
}

/// Random normalized state of the given rank from the induced (Ginibre) measure.
pub fn random_density<R: Rng + ?Sized>(dim: &HilbertDim, rank: usize, rng: &mut R) -> DensityOperator {
    let d = dim.total();
    let g = gaussian_matrix(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityOperator::new(linalg::hermitian_part(&(m / cr(tr))), dim.clone())
        .expect("Ginibre state is a valid density operator")
}
