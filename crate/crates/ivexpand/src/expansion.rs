//! Taylor-style expansion of interval-valued functions.
//!
//! A single-variable expansion of order `n` keeps the bracketed series
//! coefficients `[c_lo_k ∨ c_hi_k]` for `k < n` as the polynomial terms and
//! encloses the order-`n` remainder over the segment from the base point to
//! a target. The remainder enclosure follows the integral form: the hull
//! over `θ ∈ [0,1]` of
//!
//! ```text
//! n (1-θ)^(n-1) · [n-th directional series coefficient at a + θ v]
//! ```
//!
//! contains the integral remainder endpoint by endpoint, because a weighted
//! integral over a unit parameter range lies between the extrema of its
//! integrand. The hull is taken over a dense sample grid.
//!
//! The multivariate form stores one term per multi-index up to total
//! degree `s - 1` (value, gH gradient, halved Hessian diagonal and mixed
//! entries) and reuses the directional remainder along the segment.
//!
//! Expansions demand more than pointwise differentiability: every
//! derivative order involved must keep a stable endpoint branch and a
//! monotone spread near the base point. Violations surface as errors when
//! they break the construction and as a cleared `hypotheses_verified` flag
//! when only the remainder-segment checks fail.

use std::fmt;

use crate::calculus::{
    directional_numeric, gradient, hessian, CalculusError, DerivMethod, HessianMethod,
};
use crate::eval::{eval_dual, eval_interval, eval_series};
use crate::expr::Function;
use crate::interval::{hull, Interval};

/// Largest single-variable expansion order.
pub const MAX_ORDER_1D: usize = 12;
/// Largest multivariate expansion degree.
pub const MAX_ORDER_ND: usize = 3;
/// Default sample count for remainder hulls.
pub const REMAINDER_SAMPLES: usize = 257;

const SEGMENT_CHECK_SAMPLES: usize = 33;
const LADDER_SAMPLES: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum ExpansionError {
    Calculus(CalculusError),
    UnsupportedOrder { requested: usize, max: usize },
    /// The spread of the order-`order` derivative is not monotone near the
    /// base point, so the bracketed coefficient ladder does not apply.
    HypothesisViolated { order: usize, detail: String },
    /// The branch selection ties at the listed points.
    BranchSwitch { locations: Vec<Vec<f64>> },
    Dimension { expected: usize, got: usize },
}

impl fmt::Display for ExpansionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpansionError::Calculus(e) => write!(f, "{e}"),
            ExpansionError::UnsupportedOrder { requested, max } => {
                write!(f, "order {requested} exceeds the supported maximum {max}")
            }
            ExpansionError::HypothesisViolated { order, detail } => {
                write!(f, "expansion hypothesis fails at derivative order {order}: {detail}")
            }
            ExpansionError::BranchSwitch { locations } => {
                write!(f, "endpoint branch selection ties at {} point(s)", locations.len())?;
                if let Some(first) = locations.first() {
                    write!(f, ", first at {first:?}")?;
                }
                Ok(())
            }
            ExpansionError::Dimension { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for ExpansionError {}

impl From<CalculusError> for ExpansionError {
    fn from(e: CalculusError) -> ExpansionError {
        ExpansionError::Calculus(e)
    }
}

impl From<crate::eval::EvalError> for ExpansionError {
    fn from(e: crate::eval::EvalError) -> ExpansionError {
        ExpansionError::Calculus(CalculusError::Eval(e))
    }
}

/// One polynomial term: interval coefficient times `Π (x_i - a_i)^alpha_i`.
/// The coefficient already carries the `1/alpha!` factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub alpha: Vec<u32>,
    pub coeff: Interval,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

/// How an attached remainder enclosure was computed.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderMeta {
    /// Target point the enclosure was computed for.
    pub target: Vec<f64>,
    pub samples: usize,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionPolynomial {
    pub base_point: Vec<f64>,
    /// Remainder order: terms cover total degrees `0..order`.
    pub order: usize,
    pub terms: Vec<Term>,
    /// Enclosure of the order-`order` remainder toward the target recorded
    /// in `remainder_meta`. Only valid for that target.
    pub remainder: Option<Interval>,
    pub remainder_meta: Option<RemainderMeta>,
    pub hypotheses_verified: bool,
}

impl ExpansionPolynomial {
    pub fn attach_remainder(&mut self, enc: &RemainderEnclosure, target: &[f64]) {
        debug_assert_eq!(enc.order, self.order);
        self.remainder = Some(enc.value);
        self.remainder_meta = Some(RemainderMeta {
            target: target.to_vec(),
            samples: enc.samples,
            order: enc.order,
        });
        self.hypotheses_verified &= enc.hypotheses_verified;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemainderEnclosure {
    pub value: Interval,
    pub order: usize,
    pub samples: usize,
    /// Spread monotonicity held for every derivative order along the
    /// segment and no branch tie was seen at the sample points.
    pub hypotheses_verified: bool,
}

fn non_finite(context: &'static str) -> ExpansionError {
    ExpansionError::Calculus(CalculusError::NonFinite { context })
}

fn is_monotone(vals: &[f64], tol: f64) -> bool {
    let inc = vals.windows(2).all(|w| w[1] - w[0] >= -tol);
    let dec = vals.windows(2).all(|w| w[1] - w[0] <= tol);
    inc || dec
}

/// Single-variable expansion of order `n` (1 to [`MAX_ORDER_1D`]) around
/// `a`: terms are the bracketed series coefficients for degrees below `n`.
///
/// Sampling near `a` enforces the hypotheses: a branch tie is a
/// [`ExpansionError::BranchSwitch`], a non-monotone derivative spread a
/// [`ExpansionError::HypothesisViolated`] naming the failing order.
pub fn taylor_1d(f: &Function, a: f64, n: usize) -> Result<ExpansionPolynomial, ExpansionError> {
    if f.arity() != 1 {
        return Err(ExpansionError::Dimension { expected: 1, got: f.arity() });
    }
    if n == 0 || n > MAX_ORDER_1D {
        return Err(ExpansionError::UnsupportedOrder { requested: n, max: MAX_ORDER_1D });
    }
    let delta = 1e-3 * (1.0 + a.abs());
    let mut spreads: Vec<Vec<f64>> = vec![Vec::with_capacity(LADDER_SAMPLES); n];
    let mut ties = Vec::new();
    for j in 0..LADDER_SAMPLES {
        let t = a - delta + 2.0 * delta * j as f64 / (LADDER_SAMPLES - 1) as f64;
        let ep = eval_series(f, &[t], &[1.0], n - 1)?;
        if !ep.stable() {
            ties.push(vec![t]);
            continue;
        }
        for k in 0..n {
            spreads[k].push(ep.hi.c[k] - ep.lo.c[k]);
        }
    }
    if !ties.is_empty() {
        return Err(ExpansionError::BranchSwitch { locations: ties });
    }
    for (k, s) in spreads.iter().enumerate() {
        let max_abs = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !is_monotone(s, 1e-9 * (1.0 + max_abs)) {
            return Err(ExpansionError::HypothesisViolated {
                order: k,
                detail: format!("derivative spread changes direction within {delta:.3e} of {a}"),
            });
        }
    }
    let base = eval_series(f, &[a], &[1.0], n - 1)?;
    if !base.stable() {
        return Err(ExpansionError::BranchSwitch { locations: vec![vec![a]] });
    }
    let mut terms = Vec::with_capacity(n);
    for k in 0..n {
        let coeff = Interval::bracket(base.lo.c[k], base.hi.c[k])
            .map_err(|_| non_finite("series coefficient"))?;
        terms.push(Term { alpha: vec![k as u32], coeff });
    }
    Ok(ExpansionPolynomial {
        base_point: vec![a],
        order: n,
        terms,
        remainder: None,
        remainder_meta: None,
        hypotheses_verified: true,
    })
}

/// Multivariate expansion of degree `s` (1 to [`MAX_ORDER_ND`]) around `a`:
/// value, gH gradient, and halved-diagonal Hessian terms.
///
/// Falling back to numeric quotients or finite differences for any
/// derivative clears `hypotheses_verified`; the terms still enclose the
/// respective derivatives.
pub fn taylor_nd(f: &Function, a: &[f64], s: usize) -> Result<ExpansionPolynomial, ExpansionError> {
    let n = f.arity();
    if a.len() != n {
        return Err(ExpansionError::Dimension { expected: n, got: a.len() });
    }
    if s == 0 || s > MAX_ORDER_ND {
        return Err(ExpansionError::UnsupportedOrder { requested: s, max: MAX_ORDER_ND });
    }
    let mut verified = true;
    let mut terms = Vec::new();
    terms.push(Term { alpha: vec![0; n], coeff: eval_interval(f, a)? });
    if s >= 2 {
        let parts = gradient(f, a)?;
        for (i, part) in parts.iter().enumerate() {
            if part.method != DerivMethod::BracketAd {
                verified = false;
            }
            let mut alpha = vec![0u32; n];
            alpha[i] = 1;
            terms.push(Term { alpha, coeff: part.value });
        }
    }
    if s >= 3 {
        let h = hessian(f, a)?;
        if h.method != HessianMethod::SecondOrderDual {
            verified = false;
        }
        for i in 0..n {
            for j in i..n {
                let mut alpha = vec![0u32; n];
                alpha[i] += 1;
                alpha[j] += 1;
                let coeff =
                    if i == j { h.matrix.get(i, j).scale(0.5) } else { h.matrix.get(i, j) };
                terms.push(Term { alpha, coeff });
            }
        }
    }
    Ok(ExpansionPolynomial {
        base_point: a.to_vec(),
        order: s,
        terms,
        remainder: None,
        remainder_meta: None,
        hypotheses_verified: verified,
    })
}

/// Encloses the order-`n` remainder of the expansion of `t -> f(a + t v)`
/// toward `t = 1`, by hulling the weighted integrand over `samples` points
/// of the segment.
///
/// A branch tie along the segment does not by itself invalidate the
/// enclosure: the tied point is probed with the numeric directional
/// quotient, and if the gH derivative exists there the computation
/// proceeds with `hypotheses_verified` cleared. Only a genuinely
/// nonexistent derivative is a hard [`ExpansionError::BranchSwitch`].
/// Series-order ties and non-monotone derivative spreads along the
/// segment likewise clear the flag but keep the enclosure.
pub fn remainder_hull_dir(
    f: &Function,
    a: &[f64],
    v: &[f64],
    n: usize,
    samples: usize,
) -> Result<RemainderEnclosure, ExpansionError> {
    let arity = f.arity();
    if a.len() != arity {
        return Err(ExpansionError::Dimension { expected: arity, got: a.len() });
    }
    if v.len() != arity {
        return Err(ExpansionError::Dimension { expected: arity, got: v.len() });
    }
    if n == 0 || n > crate::calculus::MAX_DIRECTIONAL_ORDER {
        return Err(ExpansionError::UnsupportedOrder {
            requested: n,
            max: crate::calculus::MAX_DIRECTIONAL_ORDER,
        });
    }
    let samples = samples.max(3);
    let point_at = |theta: f64| -> Vec<f64> {
        a.iter().zip(v).map(|(ai, vi)| ai + theta * vi).collect()
    };

    // First-order branch ties along the segment: rescue each tied point
    // with the numeric quotient, which decides whether the gH derivative
    // exists there at all.
    let mut verified = true;
    let mut ties = Vec::new();
    for j in 0..SEGMENT_CHECK_SAMPLES {
        let theta = j as f64 / (SEGMENT_CHECK_SAMPLES - 1) as f64;
        let p = point_at(theta);
        if !eval_dual(f, &p)?.branch_stable {
            ties.push(p);
        }
    }
    if !ties.is_empty() {
        if !ties.iter().all(|p| directional_numeric(f, p, v).is_ok()) {
            return Err(ExpansionError::BranchSwitch { locations: ties });
        }
        verified = false;
    }
    let mut spreads: Vec<Vec<f64>> = vec![Vec::with_capacity(SEGMENT_CHECK_SAMPLES); n + 1];
    for j in 0..SEGMENT_CHECK_SAMPLES {
        let theta = j as f64 / (SEGMENT_CHECK_SAMPLES - 1) as f64;
        let ep = eval_series(f, &point_at(theta), v, n)?;
        if !ep.stable() {
            verified = false;
        }
        for k in 0..=n {
            spreads[k].push(ep.hi.c[k] - ep.lo.c[k]);
        }
    }
    for s in &spreads {
        let max_abs = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !is_monotone(s, 1e-9 * (1.0 + max_abs)) {
            verified = false;
        }
    }

    let mut pieces = Vec::with_capacity(samples);
    for j in 0..samples {
        let theta = j as f64 / (samples - 1) as f64;
        let ep = eval_series(f, &point_at(theta), v, n)?;
        if !ep.stable() {
            verified = false;
        }
        let weight = n as f64 * (1.0 - theta).powi(n as i32 - 1);
        let c = Interval::bracket(ep.lo.c[n], ep.hi.c[n])
            .map_err(|_| non_finite("remainder integrand"))?;
        pieces.push(c.scale(weight));
    }
    let value = hull(&pieces).expect("at least 3 samples");
    Ok(RemainderEnclosure { value, order: n, samples, hypotheses_verified: verified })
}

/// Single-variable remainder enclosure from `a` toward `x` at order `n`,
/// with the default sample count.
pub fn remainder_hull(
    f: &Function,
    a: f64,
    x: f64,
    n: usize,
) -> Result<RemainderEnclosure, ExpansionError> {
    if f.arity() != 1 {
        return Err(ExpansionError::Dimension { expected: 1, got: f.arity() });
    }
    remainder_hull_dir(f, &[a], &[x - a], n, REMAINDER_SAMPLES)
}

/// Magnitudes of the remainder enclosures for orders `1..=n_max`.
pub fn remainder_decay(
    f: &Function,
    a: f64,
    x: f64,
    n_max: usize,
) -> Result<Vec<f64>, ExpansionError> {
    if n_max == 0 {
        return Err(ExpansionError::UnsupportedOrder { requested: 0, max: 1 });
    }
    (1..=n_max).map(|n| Ok(remainder_hull(f, a, x, n)?.value.magnitude())).collect()
}

/// Evaluates the polynomial at `x` by Minkowski sums of the scaled terms,
/// adding the stored remainder when one is attached. The remainder is only
/// meaningful at the target it was computed for.
pub fn eval_polynomial(
    poly: &ExpansionPolynomial,
    x: &[f64],
) -> Result<Interval, ExpansionError> {
    let n = poly.base_point.len();
    if x.len() != n {
        return Err(ExpansionError::Dimension { expected: n, got: x.len() });
    }
    let mut acc = Interval::ZERO;
    for term in &poly.terms {
        let mut w = 1.0f64;
        for (i, &pow) in term.alpha.iter().enumerate() {
            w *= (x[i] - poly.base_point[i]).powi(pow as i32);
        }
        acc = acc + term.coeff.scale(w);
    }
    if let Some(r) = poly.remainder {
        acc = acc + r;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn func(text: &str, arity: usize) -> Function {
        parse(text, arity).unwrap().0
    }

    fn assert_iv(got: Interval, lo: f64, hi: f64, rtol: f64) {
        let want = Interval::bracket(lo, hi).unwrap();
        let tol = rtol * (1.0 + want.magnitude());
        assert!(
            got.hausdorff(want) <= tol,
            "got {got}, want {want}, defect {:.3e}",
            got.hausdorff(want)
        );
    }

    #[test]
    fn coefficients_of_exponential_family() {
        let em1 = (-1.0f64).exp();
        let e2 = (2.0f64).exp();
        let f = func("exp([-1,2]*t)", 1);
        let p = taylor_1d(&f, 1.0, 3).unwrap();
        assert_eq!(p.order, 3);
        assert_eq!(p.terms.len(), 3);
        assert!(p.hypotheses_verified);
        assert!(p.remainder.is_none());
        assert_iv(p.terms[0].coeff, em1, e2, 1e-12);
        assert_iv(p.terms[1].coeff, -em1, 2.0 * e2, 1e-12);
        assert_iv(p.terms[2].coeff, 0.5 * em1, 2.0 * e2, 1e-12);
        for (k, t) in p.terms.iter().enumerate() {
            assert_eq!(t.alpha, vec![k as u32]);
        }
    }

    #[test]
    fn coefficients_of_squared_family_away_from_kink() {
        let f = func("[1,3]*t^2", 1);
        let p = taylor_1d(&f, 1.0, 3).unwrap();
        assert_iv(p.terms[0].coeff, 1.0, 3.0, 1e-12);
        assert_iv(p.terms[1].coeff, 2.0, 6.0, 1e-12);
        assert_iv(p.terms[2].coeff, 1.0, 3.0, 1e-12);
    }

    #[test]
    fn squared_family_fails_hypotheses_at_kink() {
        let f = func("[1,3]*t^2", 1);
        // Order 2 keeps the series below the curvature tie; the value
        // spread 2t^2 is still non-monotone around 0.
        match taylor_1d(&f, 0.0, 2) {
            Err(ExpansionError::HypothesisViolated { order: 0, .. }) => {}
            other => panic!("expected HypothesisViolated at order 0, got {other:?}"),
        }
        // Order 3 sees the curvature tie itself.
        match taylor_1d(&f, 0.0, 3) {
            Err(ExpansionError::BranchSwitch { locations }) => {
                assert!(locations.iter().any(|p| p[0].abs() < 2e-3));
            }
            other => panic!("expected BranchSwitch, got {other:?}"),
        }
    }

    #[test]
    fn order_bounds() {
        let f = func("t", 1);
        assert!(matches!(
            taylor_1d(&f, 0.0, 0),
            Err(ExpansionError::UnsupportedOrder { .. })
        ));
        assert!(matches!(
            taylor_1d(&f, 0.0, MAX_ORDER_1D + 1),
            Err(ExpansionError::UnsupportedOrder { max: MAX_ORDER_1D, .. })
        ));
        let g = func("x1+x2", 2);
        assert!(matches!(taylor_1d(&g, 0.0, 2), Err(ExpansionError::Dimension { .. })));
        assert!(matches!(
            taylor_nd(&g, &[0.0, 0.0], 4),
            Err(ExpansionError::UnsupportedOrder { max: MAX_ORDER_ND, .. })
        ));
        assert!(matches!(
            taylor_nd(&g, &[0.0, 0.0], 0),
            Err(ExpansionError::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn remainder_hull_of_exponential_family() {
        let em1 = (-1.0f64).exp();
        let e2 = (2.0f64).exp();
        let f = func("exp([-1,2]*t)", 1);
        // Order 3 toward 1.5: the weighted integrand peaks at the base.
        let r = remainder_hull(&f, 1.0, 1.5, 3).unwrap();
        assert!(r.hypotheses_verified);
        assert_eq!(r.samples, REMAINDER_SAMPLES);
        assert_iv(r.value, -0.0625 * em1, 0.5 * e2, 1e-9);
        // Order 1 from 0 toward 1: lower endpoint peaks at the base,
        // upper at the target. The endpoint functions cross at the base,
        // which ties the branch selection there; the numeric probe finds
        // the derivative and the enclosure survives unverified.
        let r = remainder_hull(&f, 0.0, 1.0, 1).unwrap();
        assert!(!r.hypotheses_verified);
        assert_iv(r.value, -1.0, 2.0 * e2, 1e-9);
    }

    #[test]
    fn remainder_demotes_on_non_monotone_segment_spread() {
        // The value spread 2t^2 turns around inside the segment from 1
        // toward -2, but no first-order branch tie occurs.
        let f = func("[1,3]*t^2", 1);
        let r = remainder_hull(&f, 1.0, -2.0, 1).unwrap();
        assert!(!r.hypotheses_verified);
        // Series coefficient c1 at t along v = -3 brackets -6t and -18t;
        // over t in [-2, 1] the hull is [-18, 36].
        assert_iv(r.value, -18.0, 36.0, 1e-9);
    }

    #[test]
    fn remainder_survives_rescuable_tie_on_segment() {
        // The selection ties on the x1 = 0 line, but the gH derivative
        // along the direction exists there (the numeric probe confirms),
        // so the enclosure is produced unverified.
        let f = func("[1,2]*x1+[0,1]*x2^2", 2);
        let r = remainder_hull_dir(&f, &[-0.5, 0.0], &[1.0, 0.0], 1, 65).unwrap();
        assert!(!r.hypotheses_verified);
        // c1 brackets the partial along x1, which is [1, 2] everywhere.
        assert_iv(r.value, 1.0, 2.0, 1e-9);
    }

    #[test]
    fn remainder_rejects_nonexistent_derivative_on_segment() {
        // Upper endpoint -1 + |t| kinks at t = 0 while the lower endpoint
        // stays flat, so the lateral gH quotients disagree there.
        let f = func("[-2,-1]+[0,1]*sqrt(t^2)", 1);
        match remainder_hull_dir(&f, &[-0.5], &[1.0], 1, 65) {
            Err(ExpansionError::BranchSwitch { locations }) => {
                assert!(locations.iter().any(|p| p[0].abs() < 1e-12));
            }
            other => panic!("expected BranchSwitch, got {other:?}"),
        }
    }

    #[test]
    fn remainder_magnitudes_collapse_with_order() {
        let f = func("exp([-1,2]*t)", 1);
        let mags = remainder_decay(&f, 1.0, 1.5, 15).unwrap();
        assert_eq!(mags.len(), 15);
        assert!(mags[14] < 1e-3 * mags[0]);
        for w in mags[7..].windows(2) {
            assert!(w[1] < w[0], "tail should strictly decrease: {w:?}");
        }
    }

    #[test]
    fn tensor_terms_of_bilinear_exponential() {
        let e4 = (4.0f64).exp();
        let f = func("[-2,3]*x1*exp([-1,2]*x2)", 2);
        let p = taylor_nd(&f, &[2.0, 2.0], 3).unwrap();
        assert!(p.hypotheses_verified);
        assert_eq!(p.terms.len(), 6);
        let by_alpha = |a: &[u32]| {
            p.terms
                .iter()
                .find(|t| t.alpha == a)
                .unwrap_or_else(|| panic!("missing term {a:?}"))
                .coeff
        };
        assert_iv(by_alpha(&[0, 0]), -4.0 * e4, 6.0 * e4, 1e-12);
        assert_iv(by_alpha(&[1, 0]), -2.0 * e4, 3.0 * e4, 1e-12);
        assert_iv(by_alpha(&[0, 1]), -8.0 * e4, 12.0 * e4, 1e-12);
        assert_iv(by_alpha(&[2, 0]), 0.0, 0.0, 1e-12);
        assert_iv(by_alpha(&[1, 1]), -4.0 * e4, 6.0 * e4, 1e-12);
        assert_iv(by_alpha(&[0, 2]), -8.0 * e4, 12.0 * e4, 1e-12);
    }

    #[test]
    fn polynomial_evaluation_with_and_without_remainder() {
        let em1 = (-1.0f64).exp();
        let e2 = (2.0f64).exp();
        let f = func("exp([-1,2]*t)", 1);
        let mut p = taylor_1d(&f, 1.0, 3).unwrap();
        let bare = eval_polynomial(&p, &[1.5]).unwrap();
        assert_iv(bare, 0.625 * em1, 2.5 * e2, 1e-12);
        let r = remainder_hull(&f, 1.0, 1.5, 3).unwrap();
        p.attach_remainder(&r, &[1.5]);
        assert!(p.hypotheses_verified);
        let meta = p.remainder_meta.as_ref().unwrap();
        assert_eq!(meta.target, vec![1.5]);
        assert_eq!(meta.order, 3);
        let full = eval_polynomial(&p, &[1.5]).unwrap();
        assert_iv(full, 0.5625 * em1, 3.0 * e2, 1e-9);
        // The enclosure contains the true value.
        let truth = eval_interval(&f, &[1.5]).unwrap();
        assert!(truth.is_subset_within(full, 1e-9).unwrap());
    }

    #[test]
    fn tensor_polynomial_evaluation() {
        let e4 = (4.0f64).exp();
        let f = func("[-2,3]*x1*exp([-1,2]*x2)", 2);
        let p = taylor_nd(&f, &[2.0, 2.0], 2).unwrap();
        let v = eval_polynomial(&p, &[2.1, 2.1]).unwrap();
        assert_iv(v, -5.0 * e4, 7.5 * e4, 1e-12);
        assert!(matches!(
            eval_polynomial(&p, &[2.0]),
            Err(ExpansionError::Dimension { .. })
        ));
    }
}
