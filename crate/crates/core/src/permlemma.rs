//! Commutative form of the `√Δ₋` bound: for non-increasing `μ ≥ 0` and any
//! permutation `π`,
//!
//! ```text
//! (Σᵢ √(μᵢ − μ_{π(i)})₊)² ≤ (d/2) Σᵢ μᵢ
//! ```
//!
//! proved by splitting the sum along maximal ascending chains of `π`. Also the
//! exhaustive trace-maximization check that lifts it to non-commuting matrices.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, ComplexMatrix};
use crate::report::InequalityReport;

/// Largest `d` for exhaustive sweeps over `S_d`.
pub const D_MAX: usize = 8;

/// A permutation of `{0, …, d−1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let d = image.len();
        let mut seen = vec![false; d];
        for &x in &image {
            if x >= d || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "{image:?} is not a bijection on 0..{d}"
                )));
            }
            seen[x] = true;
        }
        Ok(Self(image))
    }

    /// From the usual one-based image list, e.g. `[3, 4, 2, 1]`.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::InvalidPermutation(format!("{image:?} contains 0")));
        }
        Self::new(image.iter().map(|&x| x - 1).collect())
    }

    pub fn identity(d: usize) -> Self {
        Self((0..d).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|x| x + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    /// All of `S_d` in lexicographic order.
    pub fn all(d: usize) -> impl Iterator<Item = Permutation> {
        (0..d).permutations(d).map(Permutation)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let image = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_based(&image).map_err(serde::de::Error::custom)
    }
}

/// Non-negative values sorted non-increasingly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpectrumVector(Vec<f64>);

impl SpectrumVector {
    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = mu.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
            return Err(Error::NegativeEntry { index, value });
        }
        if let Some(k) = mu.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::NotSorted(k + 1));
        }
        Ok(Self(mu))
    }

    /// Sorts non-increasingly before validating.
    pub fn sorted(mut mu: Vec<f64>) -> Result<Self> {
        mu.sort_by(|a, b| b.total_cmp(a));
        Self::new(mu)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl TryFrom<Vec<f64>> for SpectrumVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpectrumVector> for Vec<f64> {
    fn from(v: SpectrumVector) -> Self {
        v.0
    }
}

/// A strictly ascending index sequence.
pub type Chain = Vec<usize>;

/// Maximal ascending chains of a permutation (zero-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaChains {
    pub chains: Vec<Chain>,
}

impl MaChains {
    pub fn lengths(&self) -> Vec<usize> {
        self.chains.iter().map(Vec::len).collect()
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.chains
            .iter()
            .map(|c| c.iter().map(|x| x + 1).collect())
            .collect()
    }

    /// Every element that is followed by another inside its chain.
    pub fn non_terminal(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .chains
            .iter()
            .flat_map(|c| c[..c.len() - 1].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Maximal paths in the graph with edges `i → π(i)` whenever `π(i) > i`.
///
/// Each node has at most one outgoing and one incoming ascending edge, so the
/// paths are disjoint and uniquely determined.
pub fn ma_chains(pi: &Permutation) -> MaChains {
    let inv = pi.inverse();
    let ascends = |i: usize| pi.apply(i) > i;
    let mut chains = Vec::new();
    for start in 0..pi.len() {
        // a chain starts where an ascending edge leaves and none arrives
        if !ascends(start) || inv.apply(start) < start {
            continue;
        }
        let mut chain = vec![start];
        let mut cur = start;
        while ascends(cur) {
            cur = pi.apply(cur);
            chain.push(cur);
        }
        chains.push(chain);
    }
    MaChains { chains }
}

fn check_len(mu: &SpectrumVector, pi: &Permutation) -> Result<()> {
    if mu.len() != pi.len() {
        return Err(Error::SizeMismatch {
            expected: pi.len(),
            got: mu.len(),
        });
    }
    Ok(())
}

/// `Σᵢ √(μᵢ − μ_{π(i)})₊`
pub fn commutative_lhs(mu: &SpectrumVector, pi: &Permutation) -> Result<f64> {
    check_len(mu, pi)?;
    let m = mu.values();
    Ok((0..m.len())
        .map(|i| (m[i] - m[pi.apply(i)]).max(0.0).sqrt())
        .sum())
}

/// The same sum evaluated chain by chain: `Σ_k Σ_{j<r_k} √(μ_{i_j} − μ_{i_{j+1}})`.
pub fn chain_split_sum(mu: &SpectrumVector, chains: &MaChains) -> f64 {
    let m = mu.values();
    chains
        .chains
        .iter()
        .map(|c| {
            c.windows(2)
                .map(|w| (m[w[0]] - m[w[1]]).max(0.0).sqrt())
                .sum::<f64>()
        })
        .sum()
}

/// `(Σᵢ √(μᵢ − μ_{π(i)})₊)² ≤ (d/2) Σᵢ μᵢ`
pub fn check_commutative(mu: &SpectrumVector, pi: &Permutation) -> Result<InequalityReport> {
    let s = commutative_lhs(mu, pi)?;
    let d = mu.len() as f64;
    Ok(InequalityReport::new("commutative", s * s, d / 2.0 * mu.sum()).with_dims(&[mu.len()]))
}

fn validate_chain(mu: &SpectrumVector, chain: &[usize]) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::InvalidChain("empty chain".into()));
    }
    if let Some(&bad) = chain.iter().find(|&&i| i >= mu.len()) {
        return Err(Error::InvalidChain(format!(
            "index {bad} out of range for d = {}",
            mu.len()
        )));
    }
    if chain.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidChain(format!(
            "{chain:?} is not strictly ascending"
        )));
    }
    Ok(())
}

/// `Σ_{j<r} √(μ_{i_j} − μ_{i_{j+1}}) ≤ √((r/2) Σ_j μ_{i_j})` for one chain.
pub fn chain_bound(mu: &SpectrumVector, chain: &[usize]) -> Result<InequalityReport> {
    validate_chain(mu, chain)?;
    let m = mu.values();
    let lhs: f64 = chain.windows(2).map(|w| (m[w[0]] - m[w[1]]).sqrt()).sum();
    let r = chain.len() as f64;
    let total: f64 = chain.iter().map(|&i| m[i]).sum();
    Ok(
        InequalityReport::new("chain_bound", lhs, (r / 2.0 * total).sqrt())
            .with_dims(&[chain.len()]),
    )
}

/// `(Σⱼ √xⱼ)² ≤ Σⱼ xⱼ/pⱼ` for `x ≥ 0` and a strictly positive probability vector `p`.
pub fn holder_half(x: &[f64], p: &[f64]) -> Result<InequalityReport> {
    if x.len() != p.len() {
        return Err(Error::SizeMismatch {
            expected: p.len(),
            got: x.len(),
        });
    }
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::NegativeEntry { index, value });
    }
    if p.iter().any(|&q| !(q > 0.0)) {
        return Err(Error::NotProbability("entries must be positive".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::NotProbability(format!("entries sum to {total}")));
    }
    let s: f64 = x.iter().map(|v| v.sqrt()).sum();
    let rhs = x.iter().zip(p).map(|(v, q)| v / q).sum();
    Ok(InequalityReport::new("holder_half", s * s, rhs).with_dims(&[x.len()]))
}

/// The weighting used for a chain of length `r > 2`: `xⱼ = μ_{i_j} − μ_{i_{j+1}}`,
/// `p₁ = 2/r`, `p₂ = … = p_{r−1} = 1/r`.
pub fn chain_holder_instance(mu: &SpectrumVector, chain: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
    validate_chain(mu, chain)?;
    if chain.len() < 3 {
        return Err(Error::InvalidChain(
            "the weighted form needs a chain of length at least 3".into(),
        ));
    }
    let m = mu.values();
    let r = chain.len() as f64;
    let x = chain.windows(2).map(|w| m[w[0]] - m[w[1]]).collect();
    let mut p = vec![1.0 / r; chain.len() - 1];
    p[0] = 2.0 / r;
    Ok((x, p))
}

/// `Σ_k √((r_k/2) Σ_{i∈I_k} μᵢ) ≤ √(d/2)·√(Σᵢ μᵢ)`
pub fn final_assembly(mu: &SpectrumVector, chains: &MaChains) -> InequalityReport {
    let m = mu.values();
    let lhs: f64 = chains
        .chains
        .iter()
        .map(|c| (c.len() as f64 / 2.0 * c.iter().map(|&i| m[i]).sum::<f64>()).sqrt())
        .sum();
    let rhs = (mu.len() as f64 / 2.0).sqrt() * mu.sum().sqrt();
    InequalityReport::new("chain_assembly", lhs, rhs).with_dims(&[mu.len()])
}

/// Worst case of [`check_commutative`] over all of `S_d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSummary {
    pub d: usize,
    pub count: usize,
    pub worst_slack: f64,
    pub arg_worst: Permutation,
    pub violations: usize,
}

/// Exhaustive sweep over `S_d`, split into blocks by `π(0)` and run in parallel.
/// Ties are broken by lexicographic order, so the result is schedule-independent.
pub fn sweep_commutative(mu: &SpectrumVector) -> Result<SweepSummary> {
    let d = mu.len();
    if d > D_MAX {
        return Err(Error::TooLarge { d, max: D_MAX });
    }
    if d == 0 {
        return Err(Error::SizeMismatch {
            expected: 1,
            got: 0,
        });
    }
    let blocks: Vec<SweepSummary> = (0..d)
        .into_par_iter()
        .map(|first| {
            let rest: Vec<usize> = (0..d).filter(|&x| x != first).collect();
            let mut best: Option<(f64, Permutation)> = None;
            let mut count = 0;
            let mut violations = 0;
            for tail in rest.iter().copied().permutations(d - 1) {
                let mut image = Vec::with_capacity(d);
                image.push(first);
                image.extend(tail);
                let pi = Permutation(image);
                let r = check_commutative(mu, &pi).expect("lengths match");
                count += 1;
                violations += usize::from(!r.holds);
                if best.as_ref().is_none_or(|(s, _)| r.slack < *s) {
                    best = Some((r.slack, pi));
                }
            }
            let (worst_slack, arg_worst) = best.expect("every block is non-empty");
            SweepSummary {
                d,
                count,
                worst_slack,
                arg_worst,
                violations,
            }
        })
        .collect();

    let count = blocks.iter().map(|b| b.count).sum();
    let violations = blocks.iter().map(|b| b.violations).sum();
    let worst = blocks
        .into_iter()
        .min_by(|a, b| {
            a.worst_slack
                .total_cmp(&b.worst_slack)
                .then_with(|| a.arg_worst.cmp(&b.arg_worst))
        })
        .expect("d >= 1");
    Ok(SweepSummary {
        count,
        violations,
        ..worst
    })
}

/// `tr √((X+Y)₊) ≤ max_{π∈S_d} Σⱼ √(xⱼ + y_{π(j)})₊` with `X = BB*`, `Y = −B*B`,
/// maximized by brute force over `S_d`.
pub fn drury_numeric_check(b: &ComplexMatrix) -> Result<InequalityReport> {
    if b.nrows() != b.ncols() {
        return Err(Error::NotSquare {
            rows: b.nrows(),
            cols: b.ncols(),
        });
    }
    let d = b.nrows();
    if d > D_MAX {
        return Err(Error::TooLarge { d, max: D_MAX });
    }
    let bb = b * b.adjoint();
    let bsb = b.adjoint() * b;
    let lhs: f64 = matcore::eigvals(&(&bb - &bsb))?
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .sum();
    let x: Vec<f64> = matcore::eigvals(&bb)?.into_iter().rev().collect();
    let y: Vec<f64> = matcore::eigvals(&(-bsb))?.into_iter().rev().collect();
    let rhs = Permutation::all(d)
        .map(|pi| {
            (0..d)
                .map(|j| (x[j] + y[pi.apply(j)]).max(0.0).sqrt())
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(InequalityReport::new("drury", lhs, rhs).with_dims(&[d, d]))
}
