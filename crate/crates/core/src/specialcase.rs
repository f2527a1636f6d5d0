//! The certified case `dA = 2`, `A₁ = 𝟙`, `A₂ = B`: the bound
//! `tr Z₋ ≤ √(d/2)‖B‖₂` for `Z = [[𝟙, B], [B*, BB*]]`, its split through
//! `tr √Δ₋` with `Δ = BB* − B*B`, and every spectral step behind the first half.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, c64, identity, max_abs, serde_matrix, ComplexMatrix};
use crate::report::{InequalityReport, TAU_CHECK};

fn ensure_square(b: &ComplexMatrix) -> Result<usize> {
    if b.nrows() != b.ncols() {
        return Err(Error::NotSquare {
            rows: b.nrows(),
            cols: b.ncols(),
        });
    }
    Ok(b.nrows())
}

/// Zero-pads a rectangular matrix to the smallest enclosing square.
pub fn pad_square(b: &ComplexMatrix) -> ComplexMatrix {
    let n = b.nrows().max(b.ncols());
    let mut out = ComplexMatrix::zeros(n, n);
    out.view_mut((0, 0), b.shape()).copy_from(b);
    out
}

/// Assembles a square block matrix from a grid of equally sized square blocks.
pub fn block_matrix(blocks: &[Vec<ComplexMatrix>]) -> ComplexMatrix {
    let m = blocks[0][0].nrows();
    let n = blocks.len();
    let mut out = DMatrix::from_element(n * m, n * m, c64(0.0, 0.0));
    for (i, row) in blocks.iter().enumerate() {
        for (j, blk) in row.iter().enumerate() {
            out.view_mut((i * m, j * m), (m, m)).copy_from(blk);
        }
    }
    out
}

/// `Z = [[𝟙, B], [B*, BB*]]`
pub fn build_special_z(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = ensure_square(b)?;
    Ok(block_matrix(&[
        vec![identity(d), b.clone()],
        vec![b.adjoint(), b * b.adjoint()],
    ]))
}

/// `Δ = BB* − B*B`
pub fn delta(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(b)?;
    Ok(b * b.adjoint() - b.adjoint() * b)
}

/// `(tr √Δ₊, tr √Δ₋)`, summed over the spectrum of `Δ`.
pub fn sqrt_delta_traces(b: &ComplexMatrix) -> Result<(f64, f64)> {
    let ev = matcore::eigvals(&delta(b)?)?;
    let plus = ev.iter().map(|&x| x.max(0.0).sqrt()).sum();
    let minus = ev.iter().map(|&x| (-x).max(0.0).sqrt()).sum();
    Ok((plus, minus))
}

/// `√(d/2)·‖B‖₂`
fn ineqid_rhs(b: &ComplexMatrix) -> f64 {
    (b.nrows() as f64 / 2.0).sqrt() * matcore::frobenius(b)
}

fn square_dims(b: &ComplexMatrix) -> Vec<usize> {
    vec![b.nrows(), b.ncols()]
}

/// `tr Z₋ ≤ √(d/2)·‖B‖₂`
pub fn check_ineqid(b: &ComplexMatrix) -> Result<InequalityReport> {
    let z = build_special_z(b)?;
    let lhs = matcore::negative_part_trace(&z)?;
    Ok(InequalityReport::new("ineqid", lhs, ineqid_rhs(b)).with_dims(&square_dims(b)))
}

/// `tr Z₋ ≤ tr √Δ₋`
pub fn check_ineqid1(b: &ComplexMatrix) -> Result<InequalityReport> {
    let z = build_special_z(b)?;
    let lhs = matcore::negative_part_trace(&z)?;
    let (_, rhs) = sqrt_delta_traces(b)?;
    Ok(InequalityReport::new("ineqid1", lhs, rhs).with_dims(&square_dims(b)))
}

/// `tr √Δ₋ ≤ √(d/2)·‖B‖₂` together with its `Δ₊` counterpart (the same bound for `B*`).
pub fn check_ineqid2(b: &ComplexMatrix) -> Result<(InequalityReport, InequalityReport)> {
    ensure_square(b)?;
    let (plus, minus) = sqrt_delta_traces(b)?;
    let rhs = ineqid_rhs(b);
    let dims = square_dims(b);
    Ok((
        InequalityReport::new("ineqid2", minus, rhs).with_dims(&dims),
        InequalityReport::new("ineqid2_plus", plus, rhs).with_dims(&dims),
    ))
}

fn vstack(top: &ComplexMatrix, bottom: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = top.shape();
    let mut out = ComplexMatrix::zeros(r + bottom.nrows(), c);
    out.view_mut((0, 0), (r, c)).copy_from(top);
    out.view_mut((r, 0), bottom.shape()).copy_from(bottom);
    out
}

/// `√Δ₊` and `√Δ₋` from one eigendecomposition of `Δ`.
fn sqrt_delta_parts(b: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = matcore::hermitian_eig(&delta(b)?)?;
    Ok((
        eig.map(|x| x.max(0.0).sqrt()),
        eig.map(|x| (-x).max(0.0).sqrt()),
    ))
}

fn stacks(
    b: &ComplexMatrix,
    sp: &ComplexMatrix,
    sm: &ComplexMatrix,
) -> (ComplexMatrix, ComplexMatrix) {
    (vstack(b, sp), vstack(&b.adjoint(), sm))
}

/// A `2d x 2d` unitary `U` with `[B*; √Δ₋] = U [B; √Δ₊]`.
///
/// Both stacks share the Gram matrix `B*B + Δ₊ = BB* + Δ₋`, so `U` is the unitary
/// polar factor of `S₂S₁*` (orthogonal Procrustes); the full SVD supplies the
/// completion on the orthogonal complement of the column spaces.
pub fn connecting_unitary(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(b)?;
    let (sp, sm) = sqrt_delta_parts(b)?;
    let (s1, s2) = stacks(b, &sp, &sm);
    procrustes(&s2, &s1)
}

fn procrustes(target: &ComplexMatrix, source: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (u, _, v) = matcore::svd(&(target * source.adjoint()))?;
    Ok(u * v.adjoint())
}

/// `‖[B*; √Δ₋] − U [B; √Δ₊]‖∞` (largest entry modulus).
pub fn unitary_residual(b: &ComplexMatrix, u: &ComplexMatrix) -> Result<f64> {
    let (sp, sm) = sqrt_delta_parts(b)?;
    let (s1, s2) = stacks(b, &sp, &sm);
    Ok(max_abs(&(s2 - u * s1)))
}

/// The lettered steps of the interlacing argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// `λ↑ⱼ(Z) ≥ λ↑ⱼ(E1)` for `j ≤ 2d` (Cauchy interlacing, `Z` is a principal submatrix).
    A,
    /// `E1` and `E2` are unitarily similar.
    B,
    /// `λ↑ⱼ(E2) ≥ λ↑ⱼ(E4)` (Weyl monotonicity, `E2 − E4 = E3 ≥ 0`).
    C,
    /// The `d` smallest eigenvalues of `E4` are `−√μⱼ`.
    D,
    /// `Z` has at most `d` negative eigenvalues.
    E,
    /// `E3` is positive semidefinite.
    F,
}

impl Step {
    pub fn letter(self) -> char {
        match self {
            Step::A => 'a',
            Step::B => 'b',
            Step::C => 'c',
            Step::D => 'd',
            Step::E => 'e',
            Step::F => 'f',
        }
    }
}

/// Every intermediate object of the interlacing argument for one `B`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecialCaseTrace {
    #[serde(with = "serde_matrix")]
    pub b: ComplexMatrix,
    #[serde(with = "serde_matrix")]
    pub z: ComplexMatrix,
    #[serde(with = "serde_matrix")]
    pub delta: ComplexMatrix,
    #[serde(with = "serde_matrix")]
    pub delta_plus: ComplexMatrix,
    #[serde(with = "serde_matrix")]
    pub delta_minus: ComplexMatrix,
    /// Eigenvalues `μⱼ` of `Δ₋`, non-increasing.
    pub mu: Vec<f64>,
    #[serde(with = "serde_matrix")]
    pub u: ComplexMatrix,
    #[serde(with = "serde_matrix")]
    pub e1: ComplexMatrix,
    #[serde(with = "serde_matrix")]
    pub e2: ComplexMatrix,
    #[serde(with = "serde_matrix")]
    pub e3: ComplexMatrix,
    #[serde(with = "serde_matrix")]
    pub e4: ComplexMatrix,
    /// Step reports `a`-`f` in order, followed by the inequality and unitary checks.
    pub reports: Vec<InequalityReport>,
}

impl SpecialCaseTrace {
    pub fn step(&self, step: Step) -> &InequalityReport {
        &self.reports[step as usize]
    }

    pub fn all_hold(&self) -> bool {
        self.reports.iter().all(|r| r.holds)
    }
}

fn max_gap(lower: &[f64], upper: &[f64]) -> f64 {
    lower
        .iter()
        .zip(upper)
        .map(|(l, u)| l - u)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Builds the extended `3d x 3d` matrices and checks steps `a`-`f`.
///
/// Returns [`Error::StepFailed`] for the first step that does not hold; since every
/// step is a theorem, a failure indicates a numerical defect.
pub fn interlacing_trace(b: &ComplexMatrix) -> Result<SpecialCaseTrace> {
    let trace = interlacing_trace_unchecked(b)?;
    for (k, r) in trace.reports.iter().take(6).enumerate() {
        if !r.holds {
            return Err(Error::StepFailed {
                step: (b'a' + k as u8) as char,
                slack: r.slack,
            });
        }
    }
    Ok(trace)
}

/// Like [`interlacing_trace`] but returns the trace even when a step fails.
pub fn interlacing_trace_unchecked(b: &ComplexMatrix) -> Result<SpecialCaseTrace> {
    let d = ensure_square(b)?;
    let id = identity(d);
    let zero = ComplexMatrix::zeros(d, d);
    let bb = b * b.adjoint();

    let z = build_special_z(b)?;
    let delta = delta(b)?;
    let eig = matcore::hermitian_eig(&delta)?;
    let delta_plus = eig.map(|x| x.max(0.0));
    let delta_minus = eig.map(|x| (-x).max(0.0));
    let sp = eig.map(|x| x.max(0.0).sqrt());
    let sm = eig.map(|x| (-x).max(0.0).sqrt());
    let mut mu: Vec<f64> = eig.values.iter().map(|&x| (-x).max(0.0)).collect();
    mu.sort_by(|a, b| b.total_cmp(a));

    let e1 = block_matrix(&[
        vec![id.clone(), zero.clone(), b.clone()],
        vec![zero.clone(), id.clone(), sp.clone()],
        vec![b.adjoint(), sp.clone(), bb.clone()],
    ]);
    let e2 = block_matrix(&[
        vec![id.clone(), zero.clone(), b.adjoint()],
        vec![zero.clone(), id.clone(), sm.clone()],
        vec![b.clone(), sm.clone(), bb.clone()],
    ]);
    let e3 = block_matrix(&[
        vec![id.clone(), zero.clone(), b.adjoint()],
        vec![zero.clone(), id.clone(), zero.clone()],
        vec![b.clone(), zero.clone(), bb.clone()],
    ]);
    let e4 = block_matrix(&[
        vec![zero.clone(), zero.clone(), zero.clone()],
        vec![zero.clone(), zero.clone(), sm.clone()],
        vec![zero.clone(), sm.clone(), zero.clone()],
    ]);

    let lz = matcore::eigvals(&z)?;
    let l1 = matcore::eigvals(&e1)?;
    let l2 = matcore::eigvals(&e2)?;
    let l3 = matcore::eigvals(&e3)?;
    let l4 = matcore::eigvals(&e4)?;

    let scale = 1.0 + max_abs(&e1).max(max_abs(&e2));
    let tol = TAU_CHECK * scale;
    let dims = vec![d, d];
    let rep = |name: &str, lhs: f64, rhs: f64| {
        InequalityReport::with_tol(name, lhs, rhs, tol).with_dims(&dims)
    };

    // (a) λ↑ⱼ(E1) ≤ λ↑ⱼ(Z), j ≤ 2d
    let step_a = rep("step_a_cauchy_interlacing", max_gap(&l1[..2 * d], &lz), 0.0);
    // (b) equal spectra
    let spec_diff = l1
        .iter()
        .zip(&l2)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let step_b = rep("step_b_equal_spectra", spec_diff, 0.0);
    // (c) λ↑ⱼ(E4) ≤ λ↑ⱼ(E2)
    let step_c = rep("step_c_weyl_monotonicity", max_gap(&l4, &l2), 0.0);
    // (d) smallest d eigenvalues of E4 are −√μ↓ⱼ
    let d_diff = l4[..d]
        .iter()
        .zip(&mu)
        .map(|(l, m)| (l + m.sqrt()).abs())
        .fold(0.0, f64::max);
    let step_d = rep("step_d_e4_spectrum", d_diff, 0.0);
    // (e) at most d negative eigenvalues of Z
    let negatives = lz.iter().filter(|&&x| x < -tol).count();
    let step_e = rep("step_e_negative_count", negatives as f64, d as f64);
    // (f) E3 ≥ 0
    let step_f = rep("step_f_e3_psd", -l3[0], 0.0);

    // consequence of (a)-(d): λ↑ⱼ(Z) ≥ −√μ↓ⱼ for j ≤ d
    let lower = mu.iter().map(|m| -m.sqrt()).collect::<Vec<_>>();
    let z_lower = rep("z_eigenvalue_lower_bound", max_gap(&lower, &lz[..d]), 0.0);

    let u = procrustes(&vstack(&b.adjoint(), &sm), &vstack(b, &sp))?;
    let residual = max_abs(&(vstack(&b.adjoint(), &sm) - &u * vstack(b, &sp)));
    let unitarity = max_abs(&(u.adjoint() * &u - identity(2 * d)));

    let mut reports = vec![step_a, step_b, step_c, step_d, step_e, step_f, z_lower];
    reports.push(rep("connecting_unitary_residual", residual, 0.0));
    reports.push(rep("connecting_unitary_unitarity", unitarity, 0.0));
    reports.push(check_ineqid(b)?);
    reports.push(check_ineqid1(b)?);
    let (m, p) = check_ineqid2(b)?;
    reports.push(m);
    reports.push(p);

    Ok(SpecialCaseTrace {
        b: b.clone(),
        z,
        delta,
        delta_plus,
        delta_minus,
        mu,
        u,
        e1,
        e2,
        e3,
        e4,
        reports,
    })
}
