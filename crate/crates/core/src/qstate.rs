//! Tripartite pure states on `A ⊗ B ⊗ C`, their coefficient-matrix reshapes,
//! and partial trace / partial transpose of operators on the composite space.
//!
//! Composite indices are i-major: `index(i, j, k) = (i * dB + j) * dC + k`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, c64, ComplexMatrix};

/// Tolerance on `Σ|c|² = 1`.
pub const TAU_NORM: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::DimensionMismatch(format!(
                "dimensions must be positive, got {a}x{b}x{c}"
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn total(&self) -> usize {
        self.a * self.b * self.c
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.b + j) * self.c + k
    }

    pub fn to_vec(&self) -> Vec<usize> {
        vec![self.a, self.b, self.c]
    }

    fn check_operator(&self, x: &ComplexMatrix) -> Result<()> {
        let d = self.total();
        if x.nrows() != d || x.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, dims {self} require {d}x{d}",
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.a, self.b, self.c)
    }
}

impl std::str::FromStr for Dims {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(['x', 'X'])
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParameter(format!("bad dims '{s}': {e}")))?;
        match parts.as_slice() {
            [a, b, c] => Dims::new(*a, *b, *c),
            _ => Err(Error::InvalidParameter(format!(
                "dims must look like AxBxC, got '{s}'"
            ))),
        }
    }
}

/// A normalized pure state `Σ c_{ijk} |ijk⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteState {
    dims: Dims,
    coeffs: Vec<Complex64>,
}

impl TripartiteState {
    /// Validates length and normalization. With `renormalize` the coefficients are
    /// rescaled to unit norm instead of being rejected.
    pub fn new(dims: Dims, mut coeffs: Vec<Complex64>, renormalize: bool) -> Result<Self> {
        if coeffs.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims} need {} coefficients, got {}",
                dims.total(),
                coeffs.len()
            )));
        }
        if coeffs
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "coefficients must be finite".into(),
            ));
        }
        let norm_sq: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        if renormalize {
            if norm_sq == 0.0 {
                return Err(Error::NotNormalized { norm_sq });
            }
            let scale = 1.0 / norm_sq.sqrt();
            coeffs.iter_mut().for_each(|z| *z *= scale);
        } else if (norm_sq - 1.0).abs() > TAU_NORM {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { dims, coeffs })
    }

    /// Basis state `|ijk⟩` (zero-based indices).
    pub fn basis(dims: Dims, i: usize, j: usize, k: usize) -> Self {
        let mut coeffs = vec![c64(0.0, 0.0); dims.total()];
        coeffs[dims.index(i, j, k)] = c64(1.0, 0.0);
        Self { dims, coeffs }
    }

    /// I.i.d. standard complex Gaussian coefficients, normalized.
    pub fn random<R: Rng + ?Sized>(dims: Dims, rng: &mut R) -> Self {
        let coeffs = (0..dims.total())
            .map(|_| c64(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        Self::new(dims, coeffs, true).expect("a Gaussian sample is almost surely nonzero")
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.coeffs[self.dims.index(i, j, k)]
    }

    /// Rotates the A index: `c'_{ijk} = Σ_l conj(u_{li}) c_{ljk}`, i.e. the state written in the
    /// A-basis given by the columns of `u`.
    pub fn rotate_a(&self, u: &ComplexMatrix) -> Result<Self> {
        let d = self.dims;
        if u.nrows() != d.a || u.ncols() != d.a {
            return Err(Error::DimensionMismatch(format!(
                "rotation must be {0}x{0}",
                d.a
            )));
        }
        let mut coeffs = vec![c64(0.0, 0.0); d.total()];
        for i in 0..d.a {
            for l in 0..d.a {
                let w = u[(l, i)].conj();
                for j in 0..d.b {
                    for k in 0..d.c {
                        coeffs[d.index(i, j, k)] += w * self.coeff(l, j, k);
                    }
                }
            }
        }
        Self::new(d, coeffs, false)
    }

    pub fn to_json(&self) -> StateJson {
        StateJson {
            d_a: self.dims.a,
            d_b: self.dims.b,
            d_c: self.dims.c,
            coeffs: self.coeffs.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// On-disk state layout: `{"dA", "dB", "dC", "coeffs": [[re, im], ...]}` in composite index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
    #[serde(rename = "dC")]
    pub d_c: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl StateJson {
    pub fn into_state(self, renormalize: bool) -> Result<TripartiteState> {
        let dims = Dims::new(self.d_a, self.d_b, self.d_c)?;
        let coeffs = self.coeffs.iter().map(|&[re, im]| c64(re, im)).collect();
        TripartiteState::new(dims, coeffs, renormalize)
    }
}

impl Serialize for TripartiteState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TripartiteState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        StateJson::deserialize(d)?
            .into_state(false)
            .map_err(serde::de::Error::custom)
    }
}

/// The `dA` matrices `(Aᵢ)_{jk} = c_{ijk}`, each `dB x dC`.
///
/// Normalization is not enforced here so the same type serves the rescaled
/// block-matrix form of the inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMatrices {
    mats: Vec<ComplexMatrix>,
}

impl CoeffMatrices {
    pub fn new(mats: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::ShapeMismatch(
                "at least one coefficient matrix is required".into(),
            ));
        };
        let shape = first.shape();
        if let Some(bad) = mats.iter().find(|m| m.shape() != shape) {
            return Err(Error::ShapeMismatch(format!(
                "coefficient matrices must share shape {shape:?}, found {:?}",
                bad.shape()
            )));
        }
        Ok(Self { mats })
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// `(dB, dC)`
    pub fn shape(&self) -> (usize, usize) {
        self.mats[0].shape()
    }

    /// `Σᵢ tr Aᵢ*Aᵢ`
    pub fn norm_sq(&self) -> f64 {
        self.mats.iter().map(|m| m.norm_squared()).sum()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            mats: self.mats.iter().map(|m| m * c64(t, 0.0)).collect(),
        }
    }

    /// Replaces every `Aᵢ` by `Aᵢ*`, which exchanges the roles of `Z₁` and `Z₂`.
    pub fn adjoints(&self) -> Self {
        Self {
            mats: self.mats.iter().map(|m| m.adjoint()).collect(),
        }
    }

    /// Frobenius norms `‖Aᵢ‖₂`.
    pub fn frobenius_norms(&self) -> Vec<f64> {
        self.mats.iter().map(|m| m.norm()).collect()
    }
}

pub fn coeff_matrices(s: &TripartiteState) -> CoeffMatrices {
    let d = s.dims();
    let mats = (0..d.a)
        .map(|i| DMatrix::from_fn(d.b, d.c, |j, k| s.coeff(i, j, k)))
        .collect();
    CoeffMatrices { mats }
}

/// `𝒜 = Σᵢ |Aᵢ⟩⟨i|`, shape `(dB·dC) x dA`; column `i` is the row-major vectorization of `Aᵢ`.
pub fn amat(cm: &CoeffMatrices) -> ComplexMatrix {
    let (db, dc) = cm.shape();
    DMatrix::from_fn(db * dc, cm.len(), |row, i| cm.mats[i][(row / dc, row % dc)])
}

/// `ρ = |ψ⟩⟨ψ|`.
pub fn density(s: &TripartiteState) -> ComplexMatrix {
    let n = s.coeffs.len();
    DMatrix::from_fn(n, n, |r, c| s.coeffs[r] * s.coeffs[c].conj())
}

/// `⟨ijk|X^Γ|i'j'k'⟩ = ⟨i'jk|X|ij'k'⟩`.
pub fn partial_transpose_a(x: &ComplexMatrix, dims: Dims) -> Result<ComplexMatrix> {
    dims.check_operator(x)?;
    let bc = dims.b * dims.c;
    let n = dims.total();
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let (i, jk) = (r / bc, r % bc);
        let (ip, jkp) = (c / bc, c % bc);
        x[(ip * bc + jk, i * bc + jkp)]
    }))
}

/// `⟨ik|tr_B X|i'k'⟩ = Σⱼ ⟨ijk|X|i'jk'⟩`, indexed `i * dC + k`.
pub fn partial_trace_b(x: &ComplexMatrix, dims: Dims) -> Result<ComplexMatrix> {
    dims.check_operator(x)?;
    let n = dims.a * dims.c;
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / dims.c, r % dims.c);
        let (ip, kp) = (c / dims.c, c % dims.c);
        (0..dims.b)
            .map(|j| x[(dims.index(i, j, k), dims.index(ip, j, kp))])
            .sum()
    }))
}

/// `⟨ij|tr_C X|i'j'⟩ = Σₖ ⟨ijk|X|i'j'k⟩`, indexed `i * dB + j`.
pub fn partial_trace_c(x: &ComplexMatrix, dims: Dims) -> Result<ComplexMatrix> {
    dims.check_operator(x)?;
    let n = dims.a * dims.b;
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / dims.b, r % dims.b);
        let (ip, jp) = (c / dims.b, c % dims.b);
        (0..dims.c)
            .map(|k| x[(dims.index(i, j, k), dims.index(ip, jp, k))])
            .sum()
    }))
}

/// `N_{A|BC} = ‖𝒜‖₁² − 1`, computed from the singular values of `𝒜` without forming `ρ`.
pub fn negativity_abc(s: &TripartiteState) -> Result<f64> {
    let a = amat(&coeff_matrices(s));
    let trace_norm = matcore::schatten(&a, 1.0)?;
    Ok(trace_norm * trace_norm - 1.0)
}

/// The A-basis (as columns, for [`TripartiteState::rotate_a`]) in which the Gram
/// matrix `𝒜*𝒜` becomes diagonal. Built from the left singular vectors of `𝒜*`;
/// the conjugate appears because the state's A index transforms contragrediently
/// to the columns of `𝒜`.
pub fn orthogonalizing_basis(s: &TripartiteState) -> Result<ComplexMatrix> {
    let a_star = amat(&coeff_matrices(s)).adjoint();
    let (u, _, _) = matcore::svd(&a_star)?;
    Ok(u.map(|z| z.conj()))
}
