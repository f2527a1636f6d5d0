//! Seeded random sampling plus derivative-free local descent, looking for
//! minimal-slack instances of the monogamy inequality and of each proven step.

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, c64, ComplexMatrix};
use crate::monogamy;
use crate::permlemma::{self, Permutation, SpectrumVector};
use crate::qstate::{self, Dims, TripartiteState};
use crate::report::{InequalityReport, TAU_CHECK};
use crate::specialcase;

/// Consecutive rejections before the step scale is halved.
pub const PATIENCE: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Ineq4,
    Ineqid,
    Ineqid1,
    Ineqid2,
    Commutative,
}

impl Target {
    pub const ALL: [Target; 5] = [
        Target::Ineq4,
        Target::Ineqid,
        Target::Ineqid1,
        Target::Ineqid2,
        Target::Commutative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Ineq4 => "ineq4",
            Target::Ineqid => "ineqid",
            Target::Ineqid1 => "ineqid1",
            Target::Ineqid2 => "ineqid2",
            Target::Commutative => "commutative",
        }
    }

    /// Everything except the open conjecture.
    pub fn is_proven(self) -> bool {
        self != Target::Ineq4
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown target '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub target: Target,
    /// Used by [`Target::Ineq4`].
    pub dims: Dims,
    /// Matrix size for the other targets.
    pub d: usize,
    pub trials: usize,
    pub local_steps: usize,
    pub step_scale: f64,
    pub seed: u64,
    pub tol: f64,
}

impl SearchConfig {
    pub fn new(target: Target) -> Self {
        Self {
            target,
            dims: Dims { a: 2, b: 2, c: 2 },
            d: 3,
            trials: 100,
            local_steps: 0,
            step_scale: 0.1,
            seed: 0,
            tol: TAU_CHECK,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step_scale must be positive, got {}",
                self.step_scale
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol must be non-negative, got {}",
                self.tol
            )));
        }
        Dims::new(self.dims.a, self.dims.b, self.dims.c)?;
        if self.target != Target::Ineq4 && self.d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        match self.target {
            Target::Ineq4 => self.dims.to_vec(),
            Target::Commutative => vec![self.d],
            _ => vec![self.d, self.d],
        }
    }
}

/// An input to one of the search targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    State {
        state: TripartiteState,
    },
    Matrix {
        #[serde(with = "matcore::serde_matrix")]
        b: ComplexMatrix,
    },
    Commutative {
        mu: SpectrumVector,
        pi: Permutation,
    },
}

/// Checks `instance` against `target`.
pub fn evaluate(instance: &Instance, target: Target) -> Result<InequalityReport> {
    match (target, instance) {
        (Target::Ineq4, Instance::State { state }) => {
            monogamy::ineq4_report(&qstate::coeff_matrices(state))
        }
        (Target::Ineqid, Instance::Matrix { b }) => specialcase::check_ineqid(b),
        (Target::Ineqid1, Instance::Matrix { b }) => specialcase::check_ineqid1(b),
        (Target::Ineqid2, Instance::Matrix { b }) => Ok(specialcase::check_ineqid2(b)?.0),
        (Target::Commutative, Instance::Commutative { mu, pi }) => {
            permlemma::check_commutative(mu, pi)
        }
        _ => Err(Error::InvalidParameter(format!(
            "target {target} does not accept this instance kind"
        ))),
    }
}

fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

fn exponential_spectrum<R: Rng + ?Sized>(d: usize, rng: &mut R) -> SpectrumVector {
    let gamma = rng.gen_range(0.0..2.0 * d as f64);
    let raw: Vec<f64> = (0..d).map(|_| (-gamma * rng.gen::<f64>()).exp()).collect();
    normalized_spectrum(raw)
}

fn normalized_spectrum(mut mu: Vec<f64>) -> SpectrumVector {
    let total: f64 = mu.iter().sum();
    mu.iter_mut().for_each(|x| *x /= total);
    SpectrumVector::sorted(mu).expect("positive entries")
}

fn sample<R: Rng + ?Sized>(cfg: &SearchConfig, rng: &mut R) -> Instance {
    match cfg.target {
        Target::Ineq4 => Instance::State {
            state: TripartiteState::random(cfg.dims, rng),
        },
        Target::Ineqid | Target::Ineqid1 | Target::Ineqid2 => Instance::Matrix {
            b: matcore::random_gaussian(cfg.d, cfg.d, rng),
        },
        Target::Commutative => {
            let mu = exponential_spectrum(cfg.d, rng);
            let mut image: Vec<usize> = (0..cfg.d).collect();
            image.shuffle(rng);
            Instance::Commutative {
                mu,
                pi: Permutation::new(image).expect("shuffle of 0..d"),
            }
        }
    }
}

/// Deterministic in `(cfg.seed, trial_index)`: each trial reads its own ChaCha stream.
pub fn random_instance(cfg: &SearchConfig, trial_index: u64) -> Instance {
    sample(cfg, &mut trial_rng(cfg.seed, trial_index))
}

fn perturb<R: Rng + ?Sized>(instance: &Instance, scale: f64, rng: &mut R) -> Option<Instance> {
    match instance {
        Instance::State { state } => {
            let coeffs = state
                .coeffs()
                .iter()
                .map(|z| {
                    let n: (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
                    z + c64(n.0, n.1) * scale
                })
                .collect();
            TripartiteState::new(state.dims(), coeffs, true)
                .ok()
                .map(|state| Instance::State { state })
        }
        Instance::Matrix { b } => {
            let noise = matcore::random_gaussian(b.nrows(), b.ncols(), rng);
            Some(Instance::Matrix {
                b: b + noise * c64(scale, 0.0),
            })
        }
        Instance::Commutative { mu, pi } => {
            let raw = mu
                .values()
                .iter()
                .map(|x| {
                    let z: f64 = StandardNormal.sample(rng);
                    x * (scale * z).exp()
                })
                .collect();
            let mut image = pi.image().to_vec();
            if image.len() > 1 && rng.gen_bool(0.5) {
                let i = rng.gen_range(0..image.len());
                let j = rng.gen_range(0..image.len());
                image.swap(i, j);
            }
            let total: f64 = mu.values().iter().sum();
            let mu = if total > 0.0 {
                normalized_spectrum(raw)
            } else {
                mu.clone()
            };
            Some(Instance::Commutative {
                mu,
                pi: Permutation::new(image).ok()?,
            })
        }
    }
}

/// Random perturbation descent: a proposal is accepted only if it lowers the
/// slack, and the step scale halves after [`PATIENCE`] straight rejections.
pub fn local_descend(
    instance: Instance,
    target: Target,
    steps: usize,
    scale: f64,
    seed: u64,
) -> Result<(Instance, InequalityReport)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_report = evaluate(&instance, target)?;
    let mut best = instance;
    let mut scale = scale;
    let mut rejections = 0;
    for _ in 0..steps {
        let accepted = perturb(&best, scale, &mut rng).and_then(|cand| {
            let rep = evaluate(&cand, target).ok()?;
            (rep.slack < best_report.slack).then_some((cand, rep))
        });
        match accepted {
            Some((cand, rep)) => {
                best = cand;
                best_report = rep;
                rejections = 0;
            }
            None => {
                rejections += 1;
                if rejections == PATIENCE {
                    scale /= 2.0;
                    rejections = 0;
                }
            }
        }
    }
    Ok((best, best_report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub target: Target,
    pub seed: u64,
    pub trials: usize,
    pub min_slack: f64,
    pub trial_index: u64,
    /// Trials whose final slack is below `-tol`.
    pub violations: usize,
    pub tol: f64,
    pub report: InequalityReport,
    pub argmin: Instance,
}

impl SearchResult {
    /// Re-evaluates the stored argmin and returns its slack.
    pub fn replay(&self) -> Result<f64> {
        Ok(evaluate(&self.argmin, self.target)?.slack)
    }
}

/// One trial: sample, then descend with a seed drawn from the same stream.
pub fn run_trial(cfg: &SearchConfig, trial_index: u64) -> Result<(Instance, InequalityReport)> {
    let mut rng = trial_rng(cfg.seed, trial_index);
    let start = sample(cfg, &mut rng);
    let descend_seed = rng.gen();
    local_descend(
        start,
        cfg.target,
        cfg.local_steps,
        cfg.step_scale,
        descend_seed,
    )
}

/// Minimum over trials, merged by `(slack, trial_index)`, so the result does not
/// depend on how trials are scheduled across threads.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let tol = cfg.tol;
    let best = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let (inst, rep) = run_trial(cfg, t)?;
            let violations = usize::from(rep.slack < -tol);
            Ok((rep.slack, t, inst, rep, violations))
        })
        .try_reduce_with(|a, b| {
            let violations = a.4 + b.4;
            let keep_a = a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).is_le();
            let mut winner = if keep_a { a } else { b };
            winner.4 = violations;
            Ok::<_, Error>(winner)
        })
        .expect("at least one trial")?;
    let (min_slack, trial_index, argmin, report, violations) = best;
    Ok(SearchResult {
        target: cfg.target,
        seed: cfg.seed,
        trials: cfg.trials,
        min_slack,
        trial_index,
        violations,
        tol,
        report: report
            .recheck(tol)
            .with_seed(cfg.seed)
            .with_dims(&cfg.shape()),
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::from_real;

    fn cfg(target: Target, trials: usize, steps: usize) -> SearchConfig {
        SearchConfig {
            trials,
            local_steps: steps,
            ..SearchConfig::new(target)
        }
    }

    #[test]
    fn instances_are_deterministic() {
        for target in Target::ALL {
            let c = cfg(target, 1, 0);
            assert_eq!(random_instance(&c, 7), random_instance(&c, 7));
            assert_ne!(random_instance(&c, 7), random_instance(&c, 8));
            let other_seed = SearchConfig {
                seed: 1,
                ..c.clone()
            };
            assert_ne!(random_instance(&c, 7), random_instance(&other_seed, 7));
        }
    }

    #[test]
    fn trivial_a_system_has_zero_slack() {
        let c = SearchConfig {
            dims: Dims::new(1, 2, 3).unwrap(),
            ..cfg(Target::Ineq4, 20, 0)
        };
        for t in 0..20 {
            // Z₁, Z₂ are psd here, so the lhs is a squared eigensolver roundoff
            let rep = evaluate(&random_instance(&c, t), Target::Ineq4).unwrap();
            assert_eq!(rep.rhs, 0.0);
            assert!(rep.slack.abs() <= 1e-28, "{}", rep.slack);
        }
    }

    #[test]
    fn small_conjecture_scan() {
        let r = run_search(&cfg(Target::Ineq4, 1000, 0)).unwrap();
        assert!(r.min_slack >= -1e-9);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn descent_never_increases_slack() {
        let b = from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let start = Instance::Matrix { b };
        let initial = evaluate(&start, Target::Ineqid2).unwrap().slack;
        let (_, rep) = local_descend(start, Target::Ineqid2, 200, 0.1, 3).unwrap();
        assert!(rep.slack <= initial);

        for target in Target::ALL {
            let c = cfg(target, 1, 0);
            let start = random_instance(&c, 0);
            let initial = evaluate(&start, target).unwrap().slack;
            let (inst, rep) = local_descend(start, target, 100, 0.2, 11).unwrap();
            assert!(rep.slack <= initial);
            assert_eq!(evaluate(&inst, target).unwrap().slack, rep.slack);
        }
    }

    #[test]
    fn single_trial_equals_one_descent() {
        let c = cfg(Target::Ineqid, 1, 50);
        let r = run_search(&c).unwrap();
        let (inst, rep) = run_trial(&c, 0).unwrap();
        assert_eq!(r.argmin, inst);
        assert_eq!(r.min_slack, rep.slack);
        assert_eq!(r.trial_index, 0);
    }

    #[test]
    fn search_is_deterministic_across_thread_counts() {
        for target in Target::ALL {
            let c = cfg(target, 40, 30);
            let a = run_search(&c).unwrap();
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap();
            let b = pool.install(|| run_search(&c)).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.violations, 0, "{target}");
        }
    }

    #[test]
    fn replay_through_json_reproduces_slack() {
        for target in Target::ALL {
            let r = run_search(&cfg(target, 20, 20)).unwrap();
            let text = serde_json::to_string(&r).unwrap();
            let back: SearchResult = serde_json::from_str(&text).unwrap();
            assert!((back.replay().unwrap() - r.min_slack).abs() <= 1e-12);
        }
    }

    #[test]
    fn mismatched_instance_is_rejected() {
        let inst = random_instance(&cfg(Target::Ineq4, 1, 0), 0);
        assert!(evaluate(&inst, Target::Ineqid).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(cfg(Target::Ineq4, 0, 0).validate().is_err());
        assert!(SearchConfig {
            step_scale: 0.0,
            ..cfg(Target::Ineq4, 1, 0)
        }
        .validate()
        .is_err());
        assert!(SearchConfig {
            d: 0,
            ..cfg(Target::Ineqid, 1, 0)
        }
        .validate()
        .is_err());
        assert_eq!("ineqid2".parse::<Target>().unwrap(), Target::Ineqid2);
        assert!("ineq5".parse::<Target>().is_err());
        assert_eq!(
            serde_json::to_string(&Target::Commutative).unwrap(),
            "\"commutative\""
        );
    }
}
