//! Dense complex linear algebra: Hermitian spectra, singular values,
//! Schatten (quasi-)norms, Jordan decomposition, modulus and psd square roots.
//!
//! Matrices are stored as `nalgebra` dense matrices; eigen- and singular value
//! decompositions are delegated to `faer`, whose complex solvers stay accurate
//! to roundoff on rank-deficient inputs.

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Relative tolerance on `H - H*` accepted as Hermitian.
pub const TAU_HERM: f64 = 1e-10;
/// Relative tolerance below zero tolerated in a psd input before clamping.
pub const TAU_PSD: f64 = 1e-9;

fn to_faer(m: &ComplexMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> ComplexMatrix {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a complex matrix from real row-major entries.
pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    DMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c64(x, 0.0)))
}

pub fn real_diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c64(values[i], 0.0)
        } else {
            c64(0.0, 0.0)
        }
    })
}

pub fn identity(n: usize) -> ComplexMatrix {
    DMatrix::identity(n, n)
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Real part of the trace.
pub fn trace_re(m: &ComplexMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// I.i.d. standard complex Gaussian entries (real and imaginary parts each `N(0, 1)`).
pub fn random_gaussian<R: rand::Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> ComplexMatrix {
    use rand_distr::{Distribution, StandardNormal};
    DMatrix::from_fn(rows, cols, |_, _| {
        c64(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// `diag(M)`: the matrix with the off-diagonal entries of `M` zeroed.
pub fn diagonal_part(m: &ComplexMatrix) -> ComplexMatrix {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if i == j {
            m[(i, j)]
        } else {
            c64(0.0, 0.0)
        }
    })
}

fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Checks Hermiticity up to `TAU_HERM * max|h|` and returns the symmetrized `(H + H*)/2`.
pub fn hermitian_part(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(h)?;
    let adj = h.adjoint();
    let asymmetry = max_abs(&(h - &adj));
    let tol = TAU_HERM * max_abs(h);
    if asymmetry > tol {
        return Err(Error::NotHermitian { asymmetry, tol });
    }
    Ok((h + adj) * c64(0.5, 0.0))
}

/// Spectrum of a Hermitian matrix, eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the same order as `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// λ↑
    pub fn ascending(&self) -> &[f64] {
        &self.values
    }

    /// λ↓
    pub fn descending(&self) -> Vec<f64> {
        self.values.iter().rev().copied().collect()
    }

    /// `V diag(f(λ)) V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let sym = to_faer(&hermitian_part(h)?);
    let eig = sym
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence("Hermitian eigensolver"))?;
    let diag = eig.S().column_vector();
    let values = (0..diag.nrows()).map(|k| diag[k].re).collect();
    Ok(HermitianEigen {
        values,
        vectors: from_faer(eig.U()),
    })
}

/// Eigenvalues only, ascending.
pub fn eigvals(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let sym = to_faer(&hermitian_part(h)?);
    sym.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence("Hermitian eigensolver"))
}

/// Singular values in non-increasing order.
pub fn singular_values(x: &ComplexMatrix) -> Result<Vec<f64>> {
    to_faer(x)
        .singular_values()
        .map_err(|_| Error::NoConvergence("singular value decomposition"))
}

/// Full SVD `X = U diag(s) V*` with `U`, `V` square unitary and `s` non-increasing.
pub fn svd(x: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let svd = to_faer(x)
        .svd()
        .map_err(|_| Error::NoConvergence("singular value decomposition"))?;
    let diag = svd.S().column_vector();
    let s = (0..diag.nrows()).map(|k| diag[k].re).collect();
    Ok((from_faer(svd.U()), s, from_faer(svd.V())))
}

/// `(Σ σᵢ^q)^{1/q}`; a norm for `q >= 1` and a quasi-norm for `0 < q < 1`.
pub fn schatten(x: &ComplexMatrix, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::NonPositiveQ(q));
    }
    let s = singular_values(x)?;
    Ok(schatten_from_singular(&s, q))
}

pub(crate) fn schatten_from_singular(s: &[f64], q: f64) -> f64 {
    if q == 2.0 {
        return s.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    if q == 1.0 {
        return s.iter().sum();
    }
    let sum: f64 = s.iter().map(|x| x.max(0.0).powf(q)).sum();
    sum.powf(1.0 / q)
}

/// Frobenius norm.
pub fn frobenius(x: &ComplexMatrix) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Trace norm of a Hermitian matrix from its spectrum.
pub fn trace_norm_hermitian(h: &ComplexMatrix) -> Result<f64> {
    Ok(eigvals(h)?.iter().map(|x| x.abs()).sum())
}

/// Jordan decomposition `H = H₊ − H₋` with `H₊, H₋ >= 0` and `H₊H₋ = 0`.
pub fn jordan_parts(h: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = hermitian_eig(h)?;
    Ok((eig.map(|x| x.max(0.0)), eig.map(|x| (-x).max(0.0))))
}

/// `tr H₋`, the summed magnitude of the negative eigenvalues.
pub fn negative_part_trace(h: &ComplexMatrix) -> Result<f64> {
    Ok(eigvals(h)?.iter().map(|&x| (-x).max(0.0)).sum())
}

/// `N(H) = ‖H‖₁ − tr H = 2 tr H₋`.
pub fn negativity(h: &ComplexMatrix) -> Result<f64> {
    Ok(2.0 * negative_part_trace(h)?)
}

/// `|X| = (X*X)^{1/2}`.
pub fn modulus(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let gram = x.adjoint() * x;
    let eig = hermitian_eig(&gram)?;
    Ok(eig.map(|v| v.max(0.0).sqrt()))
}

/// Square root of a psd matrix; eigenvalues down to `-TAU_PSD * max|P|` are clamped to zero.
pub fn psd_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(p)?;
    let tol = TAU_PSD * max_abs(p);
    if eig.min() < -tol {
        return Err(Error::NotPsd {
            min_eig: eig.min(),
            tol,
        });
    }
    Ok(eig.map(|v| v.max(0.0).sqrt()))
}

/// On-disk matrix layout: `{"rows": r, "cols": c, "data": [[re, im], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        if m.rows == 0 || m.cols == 0 {
            return Err(Error::DimensionMismatch(
                "matrix must have at least one row and column".into(),
            ));
        }
        if m.data.len() != m.rows * m.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                m.rows,
                m.cols,
                m.rows * m.cols,
                m.data.len()
            )));
        }
        if m.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(DMatrix::from_row_iterator(
            m.rows,
            m.cols,
            m.data.iter().map(|&[re, im]| c64(re, im)),
        ))
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("matrix serialization is infallible")
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    let parsed: MatrixJson = serde_json::from_str(s)?;
    parsed.try_into()
}

/// Serde adapter so matrices can be embedded in report structs in the shared JSON layout.
pub mod serde_matrix {
    use super::{ComplexMatrix, MatrixJson};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        let m = MatrixJson::deserialize(d)?;
        ComplexMatrix::try_from(m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        DMatrix::from_fn(rows, cols, |_, _| {
            c64(
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            )
        })
    }

    fn assert_vec_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = tol);
        }
    }

    #[test]
    fn eig_small_cases() {
        assert_vec_close(&eigvals(&identity(2)).unwrap(), &[1.0, 1.0], 1e-14);
        assert_vec_close(
            &eigvals(&real_diag(&[3.0, -1.0])).unwrap(),
            &[-1.0, 3.0],
            1e-14,
        );
        let x = from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = hermitian_eig(&x).unwrap();
        assert_vec_close(&e.values, &[-1.0, 1.0], 1e-14);
        assert_vec_close(&e.descending(), &[1.0, -1.0], 1e-14);
    }

    #[test]
    fn eig_errors() {
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let h = from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..8 {
            let g = gaussian(n, n, &mut rng);
            let h = &g + g.adjoint();
            let e = hermitian_eig(&h).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            assert!(max_abs(&(e.reconstruct() - &h)) < 1e-12 * max_abs(&h).max(1.0) * 10.0);
            let vv = e.vectors.adjoint() * &e.vectors;
            assert!(max_abs(&(vv - identity(n))) < 1e-12);
        }
    }

    #[test]
    fn schatten_cases() {
        let z = ComplexMatrix::zeros(3, 2);
        for q in [0.5, 1.0, 2.0, 3.0] {
            assert_eq!(schatten(&z, q).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(
            schatten(&identity(5), 2.0).unwrap(),
            5f64.sqrt(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            schatten(&real_diag(&[4.0, 1.0]), 0.5).unwrap(),
            9.0,
            epsilon = 1e-13
        );
        assert!(matches!(
            schatten(&identity(2), 0.0),
            Err(Error::NonPositiveQ(_))
        ));
        assert!(matches!(
            schatten(&identity(2), -1.0),
            Err(Error::NonPositiveQ(_))
        ));
    }

    #[test]
    fn diagonal_replacement_never_decreases_half_quasinorm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=6 {
            for _ in 0..30 {
                let g = gaussian(d, d, &mut rng);
                let p = &g * g.adjoint();
                let full = schatten(&p, 0.5).unwrap();
                let diag = schatten(&diagonal_part(&p), 0.5).unwrap();
                assert!(diag >= full - TAU_PSD, "d={d}: {diag} < {full}");
            }
        }
        assert_eq!(
            diagonal_part(&from_real(2, 2, &[1.0, 2.0, 3.0, 4.0])),
            real_diag(&[1.0, 4.0])
        );
    }

    #[test]
    fn jordan_cases() {
        let (p, m) = jordan_parts(&real_diag(&[2.0, -3.0])).unwrap();
        assert!(max_abs(&(p - real_diag(&[2.0, 0.0]))) < 1e-14);
        assert!(max_abs(&(m - real_diag(&[0.0, 3.0]))) < 1e-14);

        let psd = real_diag(&[1.0, 2.0]);
        let (p, m) = jordan_parts(&psd).unwrap();
        assert!(max_abs(&(p - &psd)) < 1e-14);
        assert!(max_abs(&m) < 1e-14);

        let x = from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (p, m) = jordan_parts(&x).unwrap();
        assert_abs_diff_eq!(trace_re(&p), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(trace_re(&m), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn negativity_cases() {
        assert_abs_diff_eq!(negativity(&real_diag(&[0.3, 0.7])).unwrap(), 0.0);
        assert_abs_diff_eq!(
            negativity(&real_diag(&[1.0, -1.0])).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        let x = from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_abs_diff_eq!(negativity(&x).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn modulus_cases() {
        let m = modulus(&real_diag(&[-2.0, 3.0])).unwrap();
        assert!(max_abs(&(m - real_diag(&[2.0, 3.0]))) < 1e-14);
        let u = from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]) * c64(0.0, 1.0);
        assert!(max_abs(&(modulus(&u).unwrap() - identity(2))) < 1e-14);
        let m = modulus(&from_real(2, 2, &[0.0, 2.0, 0.0, 0.0])).unwrap();
        assert!(max_abs(&(m - real_diag(&[0.0, 2.0]))) < 1e-14);
    }

    #[test]
    fn psd_sqrt_cases() {
        assert!(max_abs(&(psd_sqrt(&identity(3)).unwrap() - identity(3))) < 1e-14);
        let s = psd_sqrt(&real_diag(&[4.0, 9.0])).unwrap();
        assert!(max_abs(&(s - real_diag(&[2.0, 3.0]))) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = gaussian(2, 2, &mut rng);
        let p = g.adjoint() * &g;
        let s = psd_sqrt(&p).unwrap();
        assert!(max_abs(&(&s * &s - &p)) <= 1e-10);
        assert!(matches!(
            psd_sqrt(&real_diag(&[1.0, -0.1])),
            Err(Error::NotPsd { .. })
        ));
        // roundoff-sized negative tails are clamped
        assert!(psd_sqrt(&real_diag(&[1.0, -1e-12])).is_ok());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = gaussian(2, 3, &mut rng);
        assert_eq!(matrix_from_json(&matrix_to_json(&m)).unwrap(), m);
        assert!(matrix_from_json(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
        assert!(matrix_from_json(r#"{"rows":0,"cols":2,"data":[]}"#).is_err());
        let m = matrix_from_json(r#"{"rows":1,"cols":2,"data":[[1,2],[3,-4]]}"#).unwrap();
        assert_eq!(m[(0, 1)], c64(3.0, -4.0));
    }
}
