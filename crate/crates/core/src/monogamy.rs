//! Block matrices `Z₁ = (AⱼAᵢ*)ᵢⱼ`, `Z₂ = (Aⱼ*Aᵢ)ᵢⱼ` and the three equivalent
//! forms of the squared-negativity monogamy inequality.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matcore::{self, c64, ComplexMatrix};
use crate::qstate::{self, CoeffMatrices, TripartiteState, TAU_NORM};
use crate::report::InequalityReport;

fn build_blocks(
    cm: &CoeffMatrices,
    block: impl Fn(usize, usize) -> ComplexMatrix,
) -> ComplexMatrix {
    let n = cm.len();
    let first = block(0, 0);
    let m = first.nrows();
    let mut z = DMatrix::from_element(n * m, n * m, c64(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            z.view_mut((i * m, j * m), (m, m)).copy_from(&block(i, j));
        }
    }
    z
}

/// Block `(i, j)` is `AⱼAᵢ*`; size `(dA·dB)²`.
pub fn build_z1(cm: &CoeffMatrices) -> ComplexMatrix {
    let a = cm.mats();
    build_blocks(cm, |i, j| &a[j] * a[i].adjoint())
}

/// Block `(i, j)` is `Aⱼ*Aᵢ`; size `(dA·dC)²`.
pub fn build_z2(cm: &CoeffMatrices) -> ComplexMatrix {
    let a = cm.mats();
    build_blocks(cm, |i, j| a[j].adjoint() * &a[i])
}

/// `Σ_{i≠j} ‖Aᵢ‖₂‖Aⱼ‖₂`
pub fn cross_norm_sum(cm: &CoeffMatrices) -> f64 {
    let norms = cm.frobenius_norms();
    let mut sum = 0.0;
    for (i, x) in norms.iter().enumerate() {
        for (j, y) in norms.iter().enumerate() {
            if i != j {
                sum += x * y;
            }
        }
    }
    sum
}

fn dims_of(cm: &CoeffMatrices) -> Vec<usize> {
    let (b, c) = cm.shape();
    vec![cm.len(), b, c]
}

/// `(‖Z₁‖₁ − tr Z₁)² + (‖Z₂‖₁ − tr Z₂)² ≤ (Σ_{i≠j} ‖Aᵢ‖₂‖Aⱼ‖₂)²`, without normalization.
pub fn ineq4_report(cm: &CoeffMatrices) -> Result<InequalityReport> {
    let n1 = matcore::negativity(&build_z1(cm))?;
    let n2 = matcore::negativity(&build_z2(cm))?;
    let cross = cross_norm_sum(cm);
    Ok(InequalityReport::new("ineq4", n1 * n1 + n2 * n2, cross * cross).with_dims(&dims_of(cm)))
}

/// The two squared terms of the `ineq4` left-hand side, `(N(Z₁)², N(Z₂)²)`.
pub fn ineq4_terms(cm: &CoeffMatrices) -> Result<(f64, f64)> {
    let n1 = matcore::negativity(&build_z1(cm))?;
    let n2 = matcore::negativity(&build_z2(cm))?;
    Ok((n1 * n1, n2 * n2))
}

/// Each squared term of the `ineq4` left-hand side is bounded by the right-hand
/// side on its own: `N(Zₖ) ≤ Σ_{i≠j} ‖Aᵢ‖₂‖Aⱼ‖₂` for `k = 1, 2`.
pub fn ineq4_term_reports(cm: &CoeffMatrices) -> Result<(InequalityReport, InequalityReport)> {
    let (t1, t2) = ineq4_terms(cm)?;
    let cross = cross_norm_sum(cm);
    let dims = dims_of(cm);
    Ok((
        InequalityReport::new("ineq4_term_z1", t1, cross * cross).with_dims(&dims),
        InequalityReport::new("ineq4_term_z2", t2, cross * cross).with_dims(&dims),
    ))
}

fn ensure_normalized(norm_sq: f64) -> Result<()> {
    if (norm_sq - 1.0).abs() > TAU_NORM {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(())
}

/// `(‖Z₁‖₁ − 1)² + (‖Z₂‖₁ − 1)² ≤ (‖𝒜*𝒜‖_{1/2} − 1)²` for a normalized state.
pub fn ineq2_report(s: &TripartiteState) -> Result<InequalityReport> {
    let cm = qstate::coeff_matrices(s);
    ensure_normalized(cm.norm_sq())?;
    let t1 = matcore::trace_norm_hermitian(&build_z1(&cm))? - 1.0;
    let t2 = matcore::trace_norm_hermitian(&build_z2(&cm))? - 1.0;
    let a = qstate::amat(&cm);
    let gram = a.adjoint() * &a;
    let r = matcore::schatten(&gram, 0.5)? - 1.0;
    Ok(InequalityReport::new("ineq2", t1 * t1 + t2 * t2, r * r).with_dims(&s.dims().to_vec()))
}

/// `(‖Z₁‖₁ − 1)² + (‖Z₂‖₁ − 1)² ≤ ((Σᵢ ‖Aᵢ‖₂)² − 1)²`, requiring `Σᵢ tr Aᵢ*Aᵢ = 1`.
pub fn ineq3_report(cm: &CoeffMatrices) -> Result<InequalityReport> {
    ensure_normalized(cm.norm_sq())?;
    let t1 = matcore::trace_norm_hermitian(&build_z1(cm))? - 1.0;
    let t2 = matcore::trace_norm_hermitian(&build_z2(cm))? - 1.0;
    let sum: f64 = cm.frobenius_norms().iter().sum();
    let r = sum * sum - 1.0;
    Ok(InequalityReport::new("ineq3", t1 * t1 + t2 * t2, r * r).with_dims(&dims_of(cm)))
}

/// `N_{A|B} ≤ N_{A|BC}` and `N_{A|C} ≤ N_{A|BC}`.
pub fn monotonicity_report(s: &TripartiteState) -> Result<(InequalityReport, InequalityReport)> {
    let cm = qstate::coeff_matrices(s);
    let n_abc = qstate::negativity_abc(s)?;
    let n_ab = matcore::negativity(&build_z1(&cm))?;
    let n_ac = matcore::negativity(&build_z2(&cm))?;
    let dims = s.dims().to_vec();
    Ok((
        InequalityReport::new("monotonicity_AB", n_ab, n_abc).with_dims(&dims),
        InequalityReport::new("monotonicity_AC", n_ac, n_abc).with_dims(&dims),
    ))
}

/// Triangle step `‖Z₁‖₁ ≤ Σᵢⱼ ‖AⱼAᵢ*‖₁` and Cauchy-Schwarz step
/// `Σᵢⱼ ‖AⱼAᵢ*‖₁ ≤ (Σᵢ ‖Aᵢ‖₂)²`.
pub fn single_term_bound(cm: &CoeffMatrices) -> Result<(InequalityReport, InequalityReport)> {
    let a = cm.mats();
    let z1_norm = matcore::trace_norm_hermitian(&build_z1(cm))?;
    let mut block_sum = 0.0;
    for ai in a {
        for aj in a {
            block_sum += matcore::schatten(&(aj * ai.adjoint()), 1.0)?;
        }
    }
    let frob: f64 = cm.frobenius_norms().iter().sum();
    let dims = dims_of(cm);
    Ok((
        InequalityReport::new("single_term_triangle", z1_norm, block_sum).with_dims(&dims),
        InequalityReport::new("single_term_cauchy_schwarz", block_sum, frob * frob)
            .with_dims(&dims),
    ))
}
