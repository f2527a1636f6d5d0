//! Smooth isoclinally metaconvex approximants of `f(x) = √(x₊)`.
//!
//! `w(x) = ½(x²+1)^{-1/4}`, `α(x) = 1 + e^{−θx}`, `g(x) = w(α(x)x)`,
//! `h(x) = ∫_{−∞}^x g` and `h_s(x) = h(sx)/√s → f` uniformly as `s → ∞`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::InequalityReport;

const MAX_DEPTH: u32 = 48;

/// Evaluation lattice `lo, lo + step, …, hi` with `n` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite lo < hi, got {lo}:{hi}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs n >= 2, got {n}"
            )));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n)
            .map(|k| {
                if k + 1 == self.n {
                    self.hi
                } else {
                    self.lo + step * k as f64
                }
            })
            .collect()
    }
}

impl std::str::FromStr for Grid {
    type Err = Error;

    /// `lo:hi:n`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidParameter(format!("expected lo:hi:n, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parts[0].trim().parse().map_err(|_| bad())?;
        let hi = parts[1].trim().parse().map_err(|_| bad())?;
        let n = parts[2].trim().parse().map_err(|_| bad())?;
        Grid::new(lo, hi, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IMParams {
    pub theta: f64,
    pub s: f64,
    pub quad_tol: f64,
    pub grid: Grid,
}

impl Default for IMParams {
    fn default() -> Self {
        Self {
            theta: 1.0,
            s: 1.0,
            quad_tol: 1e-10,
            grid: Grid {
                lo: -10.0,
                hi: 10.0,
                n: 2001,
            },
        }
    }
}

impl IMParams {
    pub fn validate(&self) -> Result<()> {
        positive("theta", self.theta)?;
        positive("s", self.s)?;
        positive("quad_tol", self.quad_tol)?;
        Grid::new(self.grid.lo, self.grid.hi, self.grid.n).map(|_| ())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

pub fn w(x: f64) -> f64 {
    0.5 * (x * x + 1.0).powf(-0.25)
}

pub fn w_prime(x: f64) -> f64 {
    -0.25 * x * (x * x + 1.0).powf(-1.25)
}

pub fn alpha(x: f64, theta: f64) -> f64 {
    1.0 + (-theta * x).exp()
}

pub fn alpha_prime(x: f64, theta: f64) -> f64 {
    -theta * (-theta * x).exp()
}

/// `β(x) = α′(x)x + α(x)`, the derivative of `α(x)x`.
pub fn beta(x: f64, theta: f64) -> f64 {
    let e = (-theta * x).exp();
    -theta * x * e + 1.0 + e
}

pub fn g(x: f64, theta: f64) -> f64 {
    let y = alpha(x, theta) * x;
    if y.is_finite() {
        w(y)
    } else {
        0.0
    }
}

pub fn g_prime(x: f64, theta: f64) -> f64 {
    let y = alpha(x, theta) * x;
    let b = beta(x, theta);
    if y.is_finite() && b.is_finite() {
        w_prime(y) * b
    } else {
        0.0
    }
}

/// `f(x) = √(x₊)`
pub fn f(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// Upper bound on `∫_{−∞}^{−T} g`.
///
/// From `g(y) < ½e^{θy/2}/√|y|` the tail is at most `√(π/(2θ)) erfc(√(θT/2))`, and
/// `erfc(z) ≤ e^{−z²}/(z√π)` turns that into `e^{−θT/2}/(θ√T)`.
pub fn tail_bound(t: f64, theta: f64) -> f64 {
    (-theta * t / 2.0).exp() / (theta * t.sqrt())
}

/// Smallest power-of-two cutoff `T >= 1` whose tail bound is below `tol`.
pub fn tail_cutoff(theta: f64, tol: f64) -> f64 {
    let mut t = 1.0;
    while tail_bound(t, theta) >= tol {
        t *= 2.0;
    }
    t
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    (a, b): (f64, f64),
    (fa, fm, fb): (f64, f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if diff.abs() <= 15.0 * tol {
        return Some(left + right + diff / 15.0);
    }
    if depth == 0 || m <= a || m >= b {
        return None;
    }
    Some(
        adaptive(f, (a, m), (fa, flm, fm), left, tol / 2.0, depth - 1)?
            + adaptive(f, (m, b), (fm, frm, fb), right, tol / 2.0, depth - 1)?,
    )
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, (a, b), (fa, fm, fb), whole, tol, MAX_DEPTH)
        .filter(|v| v.is_finite())
        .ok_or(Error::QuadratureFailure { a, b, tol })
}

/// `h(x) = ∫_{−∞}^x g(y) dy`, with the tail beyond the cutoff bounded analytically.
pub fn h(x: f64, theta: f64, quad_tol: f64) -> Result<f64> {
    positive("theta", theta)?;
    positive("quad_tol", quad_tol)?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "h needs finite x, got {x}"
        )));
    }
    let t = tail_cutoff(theta, quad_tol / 2.0).max(1.0 - x);
    integrate(|y| g(y, theta), -t, x, quad_tol / 2.0)
}

/// `h` on non-decreasing points, integrating only between consecutive points.
pub fn h_sorted(xs: &[f64], theta: f64, quad_tol: f64) -> Result<Vec<f64>> {
    if xs.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::InvalidParameter(
            "h_sorted needs non-decreasing points".into(),
        ));
    }
    let Some(&first) = xs.first() else {
        return Ok(Vec::new());
    };
    let segment_tol = quad_tol / 2.0 / xs.len() as f64;
    let mut acc = h(first, theta, quad_tol / 2.0)?;
    let mut out = Vec::with_capacity(xs.len());
    out.push(acc);
    for p in xs.windows(2) {
        acc += integrate(|y| g(y, theta), p[0], p[1], segment_tol)?;
        out.push(acc);
    }
    Ok(out)
}

/// `h_s(x) = h(sx)/√s`
pub fn h_s(x: f64, s: f64, theta: f64, quad_tol: f64) -> Result<f64> {
    positive("s", s)?;
    Ok(h(s * x, theta, quad_tol)? / s.sqrt())
}

/// Largest `|h_s − f|` over one lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupError {
    pub s: f64,
    pub sup_error: f64,
    pub argmax: f64,
}

pub fn sup_error(params: &IMParams) -> Result<SupError> {
    params.validate()?;
    let xs = params.grid.points();
    let scaled: Vec<f64> = xs.iter().map(|x| params.s * x).collect();
    let hs = h_sorted(&scaled, params.theta, params.quad_tol)?;
    let root = params.s.sqrt();
    let (argmax, sup_error) = xs
        .iter()
        .zip(&hs)
        .map(|(&x, &hv)| (x, (hv / root - f(x)).abs()))
        .fold((xs[0], f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    Ok(SupError {
        s: params.s,
        sup_error,
        argmax,
    })
}

/// [`sup_error`] for each scale in `s_list` on the same lattice.
pub fn sup_error_table(params: &IMParams, s_list: &[f64]) -> Result<Vec<SupError>> {
    s_list
        .iter()
        .map(|&s| sup_error(&IMParams { s, ..*params }))
        .collect()
}

/// One level `c` with its roots `g(t₁) = g(t₂) = c`, `t₁ < 0 < t₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelPair {
    pub level: f64,
    pub t1: f64,
    pub t2: f64,
    pub derivative_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImPairReport {
    pub theta: f64,
    pub pairs: Vec<LevelPair>,
    pub min_derivative_sum: f64,
    pub holds: bool,
}

/// Root of `g = c` on the branch from 0 in direction `dir` (±1), by bracketing then bisection.
fn branch_root(c: f64, theta: f64, dir: f64, tol: f64) -> Result<f64> {
    let mut near = 0.0;
    let mut far = dir;
    let mut expansions = 0;
    while g(far, theta) > c {
        near = far;
        far *= 2.0;
        expansions += 1;
        if expansions > 1100 || !far.is_finite() {
            return Err(Error::RootNotBracketed { level: c });
        }
    }
    for _ in 0..200 {
        if (far - near).abs() <= tol * (1.0 + near.abs()) {
            break;
        }
        let mid = 0.5 * (near + far);
        if g(mid, theta) > c {
            near = mid;
        } else {
            far = mid;
        }
    }
    Ok(0.5 * (near + far))
}

/// For `n` levels `c_k = ½(k+1)/(n+1)` solves `g(t₁) = g(t₂) = c_k` and checks
/// `g′(t₁) + g′(t₂) > 0`. `tol` is the relative bisection tolerance on the roots.
pub fn im_pair_check(theta: f64, n: usize, tol: f64) -> Result<ImPairReport> {
    positive("theta", theta)?;
    positive("tol", tol)?;
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let level = 0.5 * (k + 1) as f64 / (n + 1) as f64;
        let t1 = branch_root(level, theta, -1.0, tol)?;
        let t2 = branch_root(level, theta, 1.0, tol)?;
        if !(t1 < 0.0 && t2 > 0.0) {
            return Err(Error::RootNotBracketed { level });
        }
        let derivative_sum = g_prime(t1, theta) + g_prime(t2, theta);
        pairs.push(LevelPair {
            level,
            t1,
            t2,
            derivative_sum,
        });
    }
    let min_derivative_sum = pairs
        .iter()
        .map(|p| p.derivative_sum)
        .fold(f64::INFINITY, f64::min);
    Ok(ImPairReport {
        theta,
        holds: pairs.iter().all(|p| p.derivative_sum > 0.0),
        pairs,
        min_derivative_sum,
    })
}

/// `h′(x) − f′(x) > −e^{−θx}/(4√x) − 1/(8x^{5/2})` for `x > 1`.
pub fn lower_bound_gap(x: f64, theta: f64) -> Result<InequalityReport> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lower bound needs x > 1, got {x}"
        )));
    }
    let gap = g(x, theta) - 0.5 / x.sqrt();
    let bound = -(-theta * x).exp() / (4.0 * x.sqrt()) - 1.0 / (8.0 * x.powf(2.5));
    Ok(InequalityReport::new("im_lower_bound", bound, gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const TOL: f64 = 1e-10;

    #[test]
    fn closed_form_values() {
        assert_eq!(w(0.0), 0.5);
        assert_eq!(alpha(0.0, 1.0), 2.0);
        assert_eq!(g(0.0, 1.0), 0.5);
        assert_eq!(beta(0.0, 1.0), 2.0);
        assert_eq!(beta(0.0, 3.7), 2.0);
        assert_eq!(w_prime(0.0), 0.0);
        assert_eq!(g(-1e4, 1.0), 0.0);
        assert_eq!(g_prime(-1e4, 1.0), 0.0);
        assert_eq!(f(-2.0), 0.0);
        assert_eq!(f(4.0), 2.0);
    }

    #[test]
    fn w_is_dominated_by_inverse_root() {
        for k in 1..=2000 {
            let x = k as f64 * 0.05;
            assert!(w(x) < 0.5 / x.sqrt());
            assert_eq!(w(-x), w(x));
        }
    }

    #[test]
    fn beta_sign_pattern() {
        for theta in [0.3, 1.0, 2.5] {
            for k in 1..=500 {
                let x = k as f64 * 0.04;
                assert!(beta(-x, theta) > 2.0, "theta={theta} x=-{x}");
                assert!(beta(x, theta) < 2.0, "theta={theta} x={x}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let eps = 1e-5;
        for theta in [0.5, 1.0, 2.0] {
            for k in -40..=40 {
                let x = k as f64 * 0.25;
                let fd_w = (w(x + eps) - w(x - eps)) / (2.0 * eps);
                assert_abs_diff_eq!(w_prime(x), fd_w, epsilon = 1e-9);
                let fd_a = (alpha(x + eps, theta) - alpha(x - eps, theta)) / (2.0 * eps);
                assert!((alpha_prime(x, theta) - fd_a).abs() <= 1e-9 * (1.0 + fd_a.abs()));
                let fd_g = (g(x + eps, theta) - g(x - eps, theta)) / (2.0 * eps);
                assert_abs_diff_eq!(g_prime(x, theta), fd_g, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn quadrature_on_known_integrals() {
        assert_abs_diff_eq!(
            integrate(|x: f64| x.cos(), 0.0, 1.0, 1e-12).unwrap(),
            1f64.sin(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            integrate(|x: f64| (-x).exp(), 0.0, 50.0, 1e-12).unwrap(),
            1.0,
            epsilon = 1e-11
        );
        assert_eq!(integrate(|x: f64| x, 2.0, 2.0, 1e-12).unwrap(), 0.0);
        assert!(matches!(
            integrate(|_| f64::NAN, 0.0, 1.0, 1e-12),
            Err(Error::QuadratureFailure { .. })
        ));
    }

    #[test]
    fn tail_bound_dominates_tail_integral() {
        for theta in [0.5, 1.0, 2.0] {
            for t in [1.0, 4.0, 16.0] {
                let numeric = integrate(|y| g(y, theta), -t - 200.0 / theta, -t, 1e-14).unwrap();
                assert!(numeric <= tail_bound(t, theta));
            }
            assert!(tail_bound(tail_cutoff(theta, 1e-11), theta) < 1e-11);
        }
    }

    #[test]
    fn h_at_zero_is_below_closed_tail() {
        for theta in [0.5, 1.0, 2.0] {
            let h0 = h(0.0, theta, TOL).unwrap();
            assert!(h0 > 0.0 && h0 < (std::f64::consts::PI / (2.0 * theta)).sqrt());
        }
        assert!(h(0.0, 1.0, TOL).unwrap() < 1.2533);
    }

    #[test]
    fn h_is_monotone_and_sorted_matches_pointwise() {
        let xs: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.5).collect();
        let fast = h_sorted(&xs, 1.0, TOL).unwrap();
        for (x, hv) in xs.iter().zip(&fast) {
            assert_abs_diff_eq!(*hv, h(*x, 1.0, TOL).unwrap(), epsilon = 2e-10);
        }
        assert!(fast.windows(2).all(|p| p[1] > p[0]));
        assert!(h_sorted(&[1.0, 0.0], 1.0, TOL).is_err());
    }

    #[test]
    fn h_minus_root_is_bounded() {
        let h0 = h(0.0, 1.0, TOL).unwrap();
        let xs: Vec<f64> = (0..=990).map(|k| 1.0 + k as f64 * 0.1).collect();
        for (x, hv) in xs.iter().zip(h_sorted(&xs, 1.0, TOL).unwrap()) {
            assert!((hv - x.sqrt()).abs() <= h0 + 1.0);
            assert!(hv - x.sqrt() < h0);
        }
    }

    #[test]
    fn h_derivative_is_g() {
        let step = 1e-3;
        for k in -20..=20 {
            let x = k as f64 * 0.5;
            // Richardson-extrapolated central difference from short-interval increments
            let d1 = integrate(|y| g(y, 1.0), x - step, x + step, 1e-15).unwrap() / (2.0 * step);
            let d2 =
                integrate(|y| g(y, 1.0), x - step / 2.0, x + step / 2.0, 1e-15).unwrap() / step;
            let rich = (4.0 * d2 - d1) / 3.0;
            assert_abs_diff_eq!(rich, g(x, 1.0), epsilon = 10.0 * TOL);
        }
    }

    #[test]
    fn lower_bound_machinery() {
        for theta in [1.0, 2.0] {
            for k in 1..=400 {
                let x = 1.0 + k as f64 * 0.05;
                assert!(lower_bound_gap(x, theta).unwrap().holds);
            }
        }
        assert!(lower_bound_gap(0.5, 1.0).is_err());
    }

    #[test]
    fn scaling() {
        assert_eq!(h_s(0.7, 1.0, 1.0, TOL).unwrap(), h(0.7, 1.0, TOL).unwrap());
        assert_abs_diff_eq!(
            h_s(0.0, 4.0, 1.0, TOL).unwrap(),
            h(0.0, 1.0, TOL).unwrap() / 2.0,
            epsilon = 1e-15
        );
        assert!(h_s(0.0, -1.0, 1.0, TOL).is_err());
    }

    #[test]
    fn sup_error_decays_with_scale() {
        let params = IMParams::default();
        let table = sup_error_table(&params, &[1.0, 100.0]).unwrap();
        assert!(table[1].sup_error <= table[0].sup_error / 8.0, "{table:?}");
    }

    #[test]
    fn im_pairs_have_positive_curvature_sum() {
        let rep = im_pair_check(1.0, 100, 1e-13).unwrap();
        assert!(rep.holds, "min sum {}", rep.min_derivative_sum);
        assert_eq!(rep.pairs.len(), 100);
        let top = rep.pairs.last().unwrap();
        assert!(top.t1.abs() < 0.2 && top.t2 < 0.2);
        for p in &rep.pairs {
            assert!((g(p.t1, 1.0) - p.level).abs() < 1e-12);
            assert!((g(p.t2, 1.0) - p.level).abs() < 1e-12);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(IMParams::default().validate().is_ok());
        assert!(IMParams {
            theta: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(IMParams {
            quad_tol: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!("1:0:5".parse::<Grid>().is_err());
        assert!("0:1:1".parse::<Grid>().is_err());
        assert_eq!(
            "-1:1:3".parse::<Grid>().unwrap().points(),
            vec![-1.0, 0.0, 1.0]
        );
        assert!(h(f64::NAN, 1.0, TOL).is_err());
    }

    proptest! {
        #[test]
        fn g_is_unimodal(x in 0.0f64..50.0, dx in 1e-3f64..5.0, theta in 0.2f64..3.0) {
            prop_assert!(g(x + dx, theta) <= g(x, theta));
            prop_assert!(g(-x - dx, theta) <= g(-x, theta));
        }
    }
}
