//! State carriers and their JSON schema.
//!
//! Complex entries serialize as `[re, im]` pairs, matrices row-major, and every
//! object carries a `dim` header listing its registers in tensor order (first
//! register is the most significant index).

use serde::{Deserialize, Serialize};

use super::linalg::{self, c, CMat, CVec, HermEigen, HERMITIAN_TOL, PSD_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub label: String,
    pub size: usize,
}

/// Tensor-factor layout of a Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HilbertDimJson", into = "HilbertDimJson")]
pub struct HilbertDim {
    registers: Vec<Register>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HilbertDimJson {
    total: usize,
    registers: Vec<Register>,
}

impl TryFrom<HilbertDimJson> for HilbertDim {
    type Error = Error;
    fn try_from(j: HilbertDimJson) -> Result<Self> {
        let dim = HilbertDim::new(j.registers)?;
        if dim.total() != j.total {
            return Err(Error::InvalidDim(format!(
                "total {} != product of register sizes {}",
                j.total,
                dim.total()
            )));
        }
        Ok(dim)
    }
}

impl From<HilbertDim> for HilbertDimJson {
    fn from(d: HilbertDim) -> Self {
        HilbertDimJson {
            total: d.total(),
            registers: d.registers,
        }
    }
}

impl HilbertDim {
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        if registers.is_empty() {
            return Err(Error::InvalidDim("no registers".into()));
        }
        for (i, r) in registers.iter().enumerate() {
            if r.size == 0 {
                return Err(Error::InvalidDim(format!("register {} has size 0", r.label)));
            }
            if registers[..i].iter().any(|o| o.label == r.label) {
                return Err(Error::InvalidDim(format!("duplicate register {}", r.label)));
            }
        }
        Ok(HilbertDim { registers })
    }

    /// A single register.
    pub fn single(label: &str, size: usize) -> Self {
        HilbertDim::new(vec![Register {
            label: label.to_string(),
            size,
        }])
        .expect("single register with positive size")
    }

    /// Convenience constructor from `(label, size)` pairs.
    pub fn of(parts: &[(&str, usize)]) -> Result<Self> {
        HilbertDim::new(
            parts
                .iter()
                .map(|&(l, s)| Register {
                    label: l.to_string(),
                    size: s,
                })
                .collect(),
        )
    }

    pub fn total(&self) -> usize {
        self.registers.iter().map(|r| r.size).product()
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.label == label)
            .ok_or_else(|| Error::UnknownRegister(label.to_string()))
    }

    pub fn has(&self, label: &str) -> bool {
        self.registers.iter().any(|r| r.label == label)
    }

    pub fn size_of(&self, label: &str) -> Result<usize> {
        Ok(self.registers[self.position(label)?].size)
    }

    /// Sub-layout with the given registers, in this layout's order.
    pub fn restrict(&self, keep: &[&str]) -> Result<HilbertDim> {
        for k in keep {
            self.position(k)?;
        }
        HilbertDim::new(
            self.registers
                .iter()
                .filter(|r| keep.contains(&r.label.as_str()))
                .cloned()
                .collect(),
        )
    }

    /// Tensor product layout `self ⊗ other`.
    pub fn tensor(&self, other: &HilbertDim) -> Result<HilbertDim> {
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        HilbertDim::new(regs)
    }

    /// Stride of each register in a row-major flattened index.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let n = self.registers.len();
        let mut strides = vec![1; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.registers[i + 1].size;
        }
        strides
    }

    /// Flat offsets contributed by every multi-index over the registers at
    /// `positions`, enumerated in row-major order over those registers.
    pub(crate) fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offs = vec![0usize];
        for &p in positions {
            let size = self.registers[p].size;
            let mut next = Vec::with_capacity(offs.len() * size);
            for &o in &offs {
                for k in 0..size {
                    next.push(o + k * strides[p]);
                }
            }
            offs = next;
        }
        offs
    }
}

/// Hermitian PSD matrix with trace in (0, 1].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DensityJson", into = "DensityJson")]
pub struct DensityOperator {
    matrix: CMat,
    dim: HilbertDim,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityJson {
    dim: HilbertDim,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<DensityJson> for DensityOperator {
    type Error = Error;
    fn try_from(j: DensityJson) -> Result<Self> {
        let d = j.dim.total();
        if j.matrix.len() != d || j.matrix.iter().any(|row| row.len() != d) {
            return Err(Error::DimensionMismatch(d, j.matrix.len()));
        }
        let m = CMat::from_fn(d, d, |r, col| {
            let [re, im] = j.matrix[r][col];
            c(re, im)
        });
        DensityOperator::new(m, j.dim)
    }
}

impl From<DensityOperator> for DensityJson {
    fn from(rho: DensityOperator) -> Self {
        let d = rho.matrix.nrows();
        let matrix = (0..d)
            .map(|r| {
                (0..d)
                    .map(|col| {
                        let z = rho.matrix[(r, col)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        DensityJson {
            dim: rho.dim,
            matrix,
        }
    }
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and the trace range.
    pub fn new(matrix: CMat, dim: HilbertDim) -> Result<Self> {
        let d = dim.total();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(d, matrix.nrows()));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let eig = HermEigen::new(&matrix);
        if eig.min_value() < -PSD_TOL {
            return Err(Error::NotPsd(eig.min_value()));
        }
        let tr = linalg::trace(&matrix).re;
        if !(tr > 0.0 && tr <= 1.0 + 1e-9) {
            return Err(Error::InvalidTrace(tr));
        }
        Ok(DensityOperator {
            matrix: linalg::hermitian_part(&matrix),
            dim,
        })
    }

    /// Single-register state labelled `"S"`.
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        let d = matrix.nrows();
        DensityOperator::new(matrix, HilbertDim::single("S", d))
    }

    /// Skips validation; for matrices that are valid by construction.
    pub(crate) fn from_parts_unchecked(matrix: CMat, dim: HilbertDim) -> Self {
        debug_assert_eq!(matrix.nrows(), dim.total());
        DensityOperator { matrix, dim }
    }

    pub fn maximally_mixed(dim: HilbertDim) -> Self {
        let d = dim.total();
        DensityOperator {
            matrix: linalg::identity(d) * linalg::cr(1.0 / d as f64),
            dim,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> &HilbertDim {
        &self.dim
    }

    pub fn d(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() <= 1e-9
    }

    pub fn eigen(&self) -> HermEigen {
        HermEigen::new(&self.matrix)
    }

    /// Same matrix under a different register layout of equal total size.
    pub fn relabel(&self, dim: HilbertDim) -> Result<Self> {
        if dim.total() != self.d() {
            return Err(Error::DimensionMismatch(self.d(), dim.total()));
        }
        Ok(DensityOperator {
            matrix: self.matrix.clone(),
            dim,
        })
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        Ok(DensityOperator {
            matrix: linalg::kron(&self.matrix, &other.matrix),
            dim: self.dim.tensor(&other.dim)?,
        })
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be non-negative and sum to at most 1.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::Empty("mixture"))?;
        let dim = first.1.dim.clone();
        let mut m = CMat::zeros(dim.total(), dim.total());
        for (w, rho) in parts {
            if rho.d() != dim.total() {
                return Err(Error::DimensionMismatch(dim.total(), rho.d()));
            }
            if *w < 0.0 {
                return Err(Error::InvalidProbabilities(format!("negative weight {w}")));
            }
            m += rho.matrix() * linalg::cr(*w);
        }
        DensityOperator::new(m, dim)
    }
}

/// Unit vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PureJson", into = "PureJson")]
pub struct PureState {
    vector: CVec,
    dim: HilbertDim,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PureJson {
    dim: HilbertDim,
    vector: Vec<[f64; 2]>,
}

fn vec_from_json(d: usize, v: &[[f64; 2]]) -> Result<CVec> {
    if v.len() != d {
        return Err(Error::DimensionMismatch(d, v.len()));
    }
    Ok(CVec::from_iterator(d, v.iter().map(|&[re, im]| c(re, im))))
}

fn vec_to_json(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl TryFrom<PureJson> for PureState {
    type Error = Error;
    fn try_from(j: PureJson) -> Result<Self> {
        let v = vec_from_json(j.dim.total(), &j.vector)?;
        PureState::new(v, j.dim)
    }
}

impl From<PureState> for PureJson {
    fn from(p: PureState) -> Self {
        PureJson {
            vector: vec_to_json(&p.vector),
            dim: p.dim,
        }
    }
}

impl PureState {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(vector: CVec, dim: HilbertDim) -> Result<Self> {
        if vector.len() != dim.total() {
            return Err(Error::DimensionMismatch(dim.total(), vector.len()));
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { vector, dim })
    }

    /// Rescales `vector` to unit norm.
    pub fn normalized(vector: CVec, dim: HilbertDim) -> Result<Self> {
        let norm = vector.norm();
        if norm.is_nan() || norm <= 1e-300 {
            return Err(Error::NotNormalized(norm));
        }
        PureState::new(vector / linalg::cr(norm), dim)
    }

    pub fn basis(dim: HilbertDim, k: usize) -> Result<Self> {
        let d = dim.total();
        if k >= d {
            return Err(Error::DimensionMismatch(d, k));
        }
        PureState::new(linalg::basis_vector(d, k), dim)
    }

    pub fn vector(&self) -> &CVec {
        &self.vector
    }

    pub fn dim(&self) -> &HilbertDim {
        &self.dim
    }

    pub fn d(&self) -> usize {
        self.vector.len()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_parts_unchecked(linalg::projector(&self.vector), self.dim.clone())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> num_complex::Complex64 {
        self.vector.dotc(&other.vector)
    }

    pub fn relabel(&self, dim: HilbertDim) -> Result<Self> {
        PureState::new(self.vector.clone(), dim)
    }
}

/// Finite list of `(p, ψ)` pairs sharing one layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "EnsembleJson", into = "EnsembleJson")]
pub struct Ensemble {
    items: Vec<(f64, PureState)>,
    dim: HilbertDim,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleItemJson {
    p: f64,
    vector: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleJson {
    dim: HilbertDim,
    items: Vec<EnsembleItemJson>,
}

impl TryFrom<EnsembleJson> for Ensemble {
    type Error = Error;
    fn try_from(j: EnsembleJson) -> Result<Self> {
        let d = j.dim.total();
        let items = j
            .items
            .iter()
            .map(|it| Ok((it.p, PureState::new(vec_from_json(d, &it.vector)?, j.dim.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(items)
    }
}

impl From<Ensemble> for EnsembleJson {
    fn from(e: Ensemble) -> Self {
        EnsembleJson {
            items: e
                .items
                .iter()
                .map(|(p, s)| EnsembleItemJson {
                    p: *p,
                    vector: vec_to_json(s.vector()),
                })
                .collect(),
            dim: e.dim,
        }
    }
}

impl Ensemble {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(items: Vec<(f64, PureState)>) -> Result<Self> {
        let dim = items.first().ok_or(Error::Empty("ensemble"))?.1.dim.clone();
        let mut total = 0.0;
        for (p, s) in &items {
            if s.dim != dim {
                return Err(Error::DimensionMismatch(dim.total(), s.d()));
            }
            if p.is_nan() || *p < 0.0 {
                return Err(Error::InvalidProbabilities(format!("p = {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidProbabilities(format!("sum = {total}")));
        }
        Ok(Ensemble { items, dim })
    }

    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let w = 1.0 / states.len().max(1) as f64;
        Ensemble::new(states.into_iter().map(|s| (w, s)).collect())
    }

    pub fn items(&self) -> &[(f64, PureState)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> &HilbertDim {
        &self.dim
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.items.iter().map(|(p, _)| *p).collect()
    }

    /// `Σ p(x) |ψ_x><ψ_x|`.
    pub fn average_state(&self) -> DensityOperator {
        let d = self.dim.total();
        let mut m = CMat::zeros(d, d);
        for (p, s) in &self.items {
            m += linalg::projector(s.vector()) * linalg::cr(*p);
        }
        DensityOperator::from_parts_unchecked(linalg::hermitian_part(&m), self.dim.clone())
    }
}
