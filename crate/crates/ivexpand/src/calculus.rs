//! Derivatives of interval-valued functions in the gH sense.
//!
//! Where the endpoint branch selection is stable, the gH partial derivative
//! is the sorted bracket of the endpoint functions' partial derivatives,
//! read directly off a dual-endpoint forward pass. Where the selection
//! ties, that shortcut is invalid and the derivative — when it exists at
//! all — must come from the gH difference quotient
//! `(f(p + h e_i) ⊖ f(p)) / h` evaluated numerically from both sides.
//!
//! The numeric path halves an initial step 20 times per side, extrapolates
//! each endpoint sequence (Richardson, first and second order), and accepts
//! the derivative only when the two one-sided limits agree within a
//! relative tolerance. Disagreement is reported with both lateral estimates
//! as evidence.

use std::fmt;

use crate::eval::{
    branch_stability, eval_dual, eval_hess, eval_interval, eval_series, perturb, EvalError,
};
use crate::expr::Function;
use crate::interval::{matrix_linear_comb, Interval, IntervalError, IntervalMatrix, IntervalVector};

/// Relative scale of the initial difference-quotient step.
pub const NUMERIC_H0_REL: f64 = 1e-2;
/// Number of step halvings per side.
pub const NUMERIC_HALVINGS: usize = 20;
/// Relative agreement required between the two one-sided gH limits.
pub const NUMERIC_CONV_TOL: f64 = 1e-7;
/// Cap on the order accepted by [`directional_derivs`].
pub const MAX_DIRECTIONAL_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum CalculusError {
    Eval(EvalError),
    Dimension { expected: usize, got: usize },
    AxisOutOfRange { axis: usize, arity: usize },
    /// The one-sided gH difference quotients converge to different limits.
    DerivativeUndefined { left: Interval, right: Interval, defect: f64 },
    HessianUndefined { detail: String },
    /// An inner function supplied to the chain rule carries a
    /// non-degenerate interval literal.
    NotRealValued { which: usize },
    /// The product rule requires the interval factor's spread to be
    /// monotone near the point.
    NotMuMonotone { detail: String },
    UnsupportedOrder { requested: usize, max: usize },
    NonFinite { context: &'static str },
}

impl fmt::Display for CalculusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalculusError::Eval(e) => write!(f, "{e}"),
            CalculusError::Dimension { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            CalculusError::AxisOutOfRange { axis, arity } => {
                write!(f, "axis {axis} out of range for arity {arity}")
            }
            CalculusError::DerivativeUndefined { left, right, defect } => write!(
                f,
                "gH derivative does not exist: left limit {left}, right limit {right}, defect {defect:.3e}"
            ),
            CalculusError::HessianUndefined { detail } => {
                write!(f, "Hessian undefined: {detail}")
            }
            CalculusError::NotRealValued { which } => {
                write!(f, "inner function {which} is not real-valued")
            }
            CalculusError::NotMuMonotone { detail } => {
                write!(f, "spread is not monotone: {detail}")
            }
            CalculusError::UnsupportedOrder { requested, max } => {
                write!(f, "order {requested} exceeds the supported maximum {max}")
            }
            CalculusError::NonFinite { context } => {
                write!(f, "non-finite value produced in {context}")
            }
        }
    }
}

impl std::error::Error for CalculusError {}

impl From<EvalError> for CalculusError {
    fn from(e: EvalError) -> CalculusError {
        CalculusError::Eval(e)
    }
}

fn bracket_of(a: f64, b: f64, context: &'static str) -> Result<Interval, CalculusError> {
    Interval::bracket(a, b).map_err(|_| CalculusError::NonFinite { context })
}

/// How a partial derivative value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivMethod {
    BracketAd,
    NumericQuotient,
}

impl DerivMethod {
    pub fn name(self) -> &'static str {
        match self {
            DerivMethod::BracketAd => "bracket-AD",
            DerivMethod::NumericQuotient => "numeric-gH-quotient",
        }
    }
}

/// One-sided gH difference-quotient limits.
#[derive(Debug, Clone, PartialEq)]
pub struct Lateral {
    pub left: Interval,
    pub right: Interval,
}

#[derive(Debug, Clone)]
pub struct PartialResult {
    pub value: Interval,
    pub method: DerivMethod,
    pub branch_stable: bool,
    pub lateral: Option<Lateral>,
}

fn check_point(f: &Function, p: &[f64]) -> Result<(), CalculusError> {
    if p.len() != f.arity() {
        return Err(CalculusError::Dimension { expected: f.arity(), got: p.len() });
    }
    Ok(())
}

fn check_axis(f: &Function, axis: usize) -> Result<(), CalculusError> {
    if axis >= f.arity() {
        return Err(CalculusError::AxisOutOfRange { axis, arity: f.arity() });
    }
    Ok(())
}

/// gH partial derivative along `axis` (zero-based) at `p`.
///
/// With a stable branch selection and finite endpoint gradients this is the
/// bracket of the endpoint partials from one dual pass. Otherwise the
/// numeric difference-quotient path decides whether the derivative exists.
pub fn partial_gh(f: &Function, axis: usize, p: &[f64]) -> Result<PartialResult, CalculusError> {
    check_point(f, p)?;
    check_axis(f, axis)?;
    let d = eval_dual(f, p)?;
    let (dlo, dhi) = (d.lo_grad[axis], d.hi_grad[axis]);
    if d.branch_stable && dlo.is_finite() && dhi.is_finite() {
        return Ok(PartialResult {
            value: Interval::bracket(dlo, dhi).expect("finite endpoint gradients"),
            method: DerivMethod::BracketAd,
            branch_stable: true,
            lateral: None,
        });
    }
    partial_numeric(f, axis, p)
}

/// Extrapolates `seq[k] = q(h0 / 2^k)` to `h -> 0`.
///
/// Two Richardson levels remove the O(h) and O(h^2) error terms; the
/// estimate is then taken from the window where successive second-level
/// values agree best, which keeps late roundoff-dominated entries from
/// polluting the limit.
fn extrapolate(seq: &[f64]) -> f64 {
    let r1: Vec<f64> = (0..seq.len() - 1).map(|k| 2.0 * seq[k + 1] - seq[k]).collect();
    let r2: Vec<f64> = (0..r1.len() - 1).map(|k| (4.0 * r1[k + 1] - r1[k]) / 3.0).collect();
    let mut best = r2[r2.len() - 1];
    let mut best_d = f64::INFINITY;
    for k in 1..r2.len() {
        let d = (r2[k] - r2[k - 1]).abs();
        if d < best_d {
            best_d = d;
            best = r2[k];
        }
    }
    best
}

fn side_limit(
    f: &Function,
    p: &[f64],
    v: &[f64],
    h0: f64,
    sign: f64,
    base: Interval,
) -> Result<Interval, CalculusError> {
    let mut lo_seq = Vec::with_capacity(NUMERIC_HALVINGS + 1);
    let mut hi_seq = Vec::with_capacity(NUMERIC_HALVINGS + 1);
    let mut h = sign * h0;
    for _ in 0..=NUMERIC_HALVINGS {
        let point: Vec<f64> = p.iter().zip(v).map(|(pi, vi)| pi + h * vi).collect();
        let q = eval_interval(f, &point)?.gh_diff(base).scale(1.0 / h);
        lo_seq.push(q.lo());
        hi_seq.push(q.hi());
        h *= 0.5;
    }
    bracket_of(extrapolate(&lo_seq), extrapolate(&hi_seq), "difference quotient")
}

fn numeric_core(
    f: &Function,
    p: &[f64],
    v: &[f64],
    h0: f64,
) -> Result<PartialResult, CalculusError> {
    let d = eval_dual(f, p)?;
    let base = d.value();
    let right = side_limit(f, p, v, h0, 1.0, base)?;
    let left = side_limit(f, p, v, h0, -1.0, base)?;
    let defect = left.hausdorff(right);
    let mag = left.magnitude().max(right.magnitude());
    if defect > NUMERIC_CONV_TOL * (1.0 + mag) {
        return Err(CalculusError::DerivativeUndefined { left, right, defect });
    }
    let value = bracket_of(
        0.5 * (left.lo() + right.lo()),
        0.5 * (left.hi() + right.hi()),
        "difference quotient",
    )?;
    Ok(PartialResult {
        value,
        method: DerivMethod::NumericQuotient,
        branch_stable: d.branch_stable,
        lateral: Some(Lateral { left, right }),
    })
}

/// gH partial derivative from two-sided numeric difference quotients.
///
/// Exists when the left and right extrapolated limits agree within
/// [`NUMERIC_CONV_TOL`] (relative); the returned `lateral` field keeps both
/// one-sided estimates as evidence either way.
pub fn partial_numeric(
    f: &Function,
    axis: usize,
    p: &[f64],
) -> Result<PartialResult, CalculusError> {
    check_point(f, p)?;
    check_axis(f, axis)?;
    let mut v = vec![0.0; f.arity()];
    v[axis] = 1.0;
    numeric_core(f, p, &v, NUMERIC_H0_REL * (1.0 + p[axis].abs()))
}

/// Numeric gH derivative of `t -> f(p + t v)` at `t = 0`, by the same
/// two-sided extrapolated quotients as [`partial_numeric`].
pub fn directional_numeric(
    f: &Function,
    p: &[f64],
    v: &[f64],
) -> Result<PartialResult, CalculusError> {
    check_point(f, p)?;
    if v.len() != f.arity() {
        return Err(CalculusError::Dimension { expected: f.arity(), got: v.len() });
    }
    numeric_core(f, p, v, NUMERIC_H0_REL)
}

/// All gH partials at `p`, one [`PartialResult`] per axis.
pub fn gradient(f: &Function, p: &[f64]) -> Result<Vec<PartialResult>, CalculusError> {
    check_point(f, p)?;
    (0..f.arity()).map(|axis| partial_gh(f, axis, p)).collect()
}

pub fn gradient_intervals(parts: &[PartialResult]) -> IntervalVector {
    IntervalVector::from(parts.iter().map(|p| p.value).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HessianMethod {
    SecondOrderDual,
    FiniteDifferenceFallback,
}

impl HessianMethod {
    pub fn name(self) -> &'static str {
        match self {
            HessianMethod::SecondOrderDual => "second-order-dual",
            HessianMethod::FiniteDifferenceFallback => "finite-difference-fallback",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HessianResult {
    pub matrix: IntervalMatrix,
    pub method: HessianMethod,
}

/// Samples dual stability on boxes shrinking around `p` (3 levels, 5 points
/// per axis). Domain errors at a level fall through to the next smaller
/// box; a tie anywhere reports instability.
fn neighborhood_stable(f: &Function, p: &[f64]) -> Result<bool, CalculusError> {
    let mut last_err = None;
    let mut checked_any = false;
    for level in 0..3u32 {
        let shrink = 8.0f64.powi(level as i32);
        let bounds: Vec<Interval> = p
            .iter()
            .map(|&x| {
                let d = 1e-3 * (1.0 + x.abs()) / shrink;
                Interval::raw(x - d, x + d)
            })
            .collect();
        match branch_stability(f, &bounds, 5) {
            Ok(b) => {
                checked_any = true;
                if !b.stable {
                    return Ok(false);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    if checked_any {
        Ok(true)
    } else {
        Err(CalculusError::Eval(last_err.expect("at least one level ran")))
    }
}

/// Interval Hessian at `p`: the bracket of the endpoint functions' second
/// partials where the branch selection is stable in a neighborhood, else a
/// validated finite-difference fallback over [`partial_gh`] endpoints.
pub fn hessian(f: &Function, p: &[f64]) -> Result<HessianResult, CalculusError> {
    check_point(f, p)?;
    let n = f.arity();
    if neighborhood_stable(f, p)? {
        let ep = eval_hess(f, p)?;
        if ep.stable() {
            let mut entries = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    entries.push(bracket_of(ep.lo.h[i * n + j], ep.hi.h[i * n + j], "hessian")?);
                }
            }
            let matrix = IntervalMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
            return Ok(HessianResult { matrix, method: HessianMethod::SecondOrderDual });
        }
    }
    hessian_fd_fallback(f, p)
}

/// Central differences of the gH partials' endpoints, with a one-sided
/// consistency check: if forward and backward slopes of an endpoint
/// disagree, the endpoint functions are not twice differentiable at `p`.
fn hessian_fd_fallback(f: &Function, p: &[f64]) -> Result<HessianResult, CalculusError> {
    let n = f.arity();
    let mut entries = vec![Interval::ZERO; n * n];
    for i in 0..n {
        let at_p = partial_gh(f, i, p)?;
        for j in 0..n {
            let h = 1e-4 * (1.0 + p[j].abs());
            let plus = partial_gh(f, i, &perturb(p, j, h))?;
            let minus = partial_gh(f, i, &perturb(p, j, -h))?;
            let mut slope = [0.0f64; 2];
            let endpoint_triples = [
                (plus.value.lo(), minus.value.lo(), at_p.value.lo()),
                (plus.value.hi(), minus.value.hi(), at_p.value.hi()),
            ];
            for (which, (pv, mv, cv)) in endpoint_triples.into_iter().enumerate() {
                let central = (pv - mv) / (2.0 * h);
                let fwd = (pv - cv) / h;
                let bwd = (cv - mv) / h;
                if (fwd - bwd).abs() > 1e-3 * (1.0 + central.abs()) {
                    return Err(CalculusError::HessianUndefined {
                        detail: format!(
                            "endpoint slope of partial {i} jumps across axis {j}: forward {fwd:.6e} vs backward {bwd:.6e}"
                        ),
                    });
                }
                slope[which] = central;
            }
            entries[i * n + j] = bracket_of(slope[0], slope[1], "hessian fallback")?;
        }
    }
    let matrix = IntervalMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
    Ok(HessianResult { matrix, method: HessianMethod::FiniteDifferenceFallback })
}

/// Higher-order gH derivatives of `t -> f(a + t v)` at `t = 0`.
#[derive(Debug, Clone)]
pub struct DirectionalDerivs {
    /// `derivs[k]` encloses the k-th gH derivative, `k = 0..=order`.
    pub derivs: Vec<Interval>,
    pub branch_stable: bool,
    pub tie_locations: Vec<usize>,
}

/// Computes `order + 1` directional gH derivatives by propagating endpoint
/// power series along the ray and bracketing `k! * c_k` per order. A branch
/// tie at the base point is reported through the stability flag; the
/// coefficients are still those of the deterministically selected branch.
pub fn directional_derivs(
    f: &Function,
    a: &[f64],
    v: &[f64],
    order: usize,
) -> Result<DirectionalDerivs, CalculusError> {
    check_point(f, a)?;
    if v.len() != f.arity() {
        return Err(CalculusError::Dimension { expected: f.arity(), got: v.len() });
    }
    if order > MAX_DIRECTIONAL_ORDER {
        return Err(CalculusError::UnsupportedOrder {
            requested: order,
            max: MAX_DIRECTIONAL_ORDER,
        });
    }
    let ep = eval_series(f, a, v, order)?;
    let mut derivs = Vec::with_capacity(order + 1);
    let mut fact = 1.0f64;
    for k in 0..=order {
        if k > 0 {
            fact *= k as f64;
        }
        derivs.push(bracket_of(fact * ep.lo.c[k], fact * ep.hi.c[k], "directional derivative")?);
    }
    Ok(DirectionalDerivs { derivs, branch_stable: ep.stable(), tie_locations: ep.ties })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuVerdict {
    MuIncreasing,
    MuDecreasing,
    NonMuMonotonic,
    Unknown,
}

impl MuVerdict {
    pub fn name(self) -> &'static str {
        match self {
            MuVerdict::MuIncreasing => "mu-increasing",
            MuVerdict::MuDecreasing => "mu-decreasing",
            MuVerdict::NonMuMonotonic => "non-mu-monotonic",
            MuVerdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub verdict: MuVerdict,
    /// Points where the spread's directional slope changes sign, located by
    /// bisection between disagreeing grid neighbours.
    pub split_points: Vec<Vec<f64>>,
    /// Total number of grid samples inspected.
    pub evidence_grid: usize,
    /// All sampled slopes were zero within tolerance.
    pub spread_constant: bool,
}

/// Classifies how the spread of `f` varies along `axis` over a box, by
/// sampling the endpoint-gradient gap `s = hi_grad[axis] - lo_grad[axis]`
/// on a uniform grid (at least 3 points per axis). An evaluation failure
/// anywhere yields the `unknown` verdict instead of an error. Samples with
/// a branch tie carry no usable slope and are skipped; if fewer than half
/// the samples remain, the verdict is also `unknown`.
pub fn mu_classify(
    f: &Function,
    axis: usize,
    bounds: &[Interval],
    grid: usize,
) -> Result<MonotonicityReport, CalculusError> {
    check_axis(f, axis)?;
    if bounds.len() != f.arity() {
        return Err(CalculusError::Dimension { expected: f.arity(), got: bounds.len() });
    }
    let n = f.arity();
    let g = grid.max(3);
    let axis_points: Vec<Vec<f64>> = bounds
        .iter()
        .map(|iv| (0..g).map(|i| iv.lo() + iv.spread() * i as f64 / (g - 1) as f64).collect())
        .collect();
    let total = g.pow(n as u32);

    let unknown = |total: usize| MonotonicityReport {
        verdict: MuVerdict::Unknown,
        split_points: Vec::new(),
        evidence_grid: total,
        spread_constant: false,
    };

    // Collect s on the full grid, indexed by the multi-index. A tied
    // sample has no single active branch, hence no usable slope.
    let mut slopes: Vec<Option<f64>> = Vec::with_capacity(total);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let point: Vec<f64> = (0..n).map(|ax| axis_points[ax][idx[ax]]).collect();
        match eval_dual(f, &point) {
            Ok(d) if d.branch_stable => slopes.push(Some(d.hi_grad[axis] - d.lo_grad[axis])),
            Ok(_) => slopes.push(None),
            Err(_) => return Ok(unknown(total)),
        }
        points.push(point);
        for ax in (0..n).rev() {
            idx[ax] += 1;
            if idx[ax] < g {
                break;
            }
            idx[ax] = 0;
        }
    }
    let stable: Vec<f64> = slopes.iter().flatten().copied().collect();
    if stable.len() * 2 < total {
        return Ok(unknown(total));
    }

    let max_abs = stable.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let tol = 1e-10 * (1.0 + max_abs);
    let spread_constant = stable.len() == total && stable.iter().all(|s| s.abs() <= tol);
    if stable.iter().all(|s| *s >= -tol) {
        return Ok(MonotonicityReport {
            verdict: MuVerdict::MuIncreasing,
            split_points: Vec::new(),
            evidence_grid: total,
            spread_constant,
        });
    }
    if stable.iter().all(|s| *s <= tol) {
        return Ok(MonotonicityReport {
            verdict: MuVerdict::MuDecreasing,
            split_points: Vec::new(),
            evidence_grid: total,
            spread_constant,
        });
    }

    // Sign changes: walk each grid line along the classified axis and
    // compare consecutive decisive samples, stepping over flat or tied
    // ones so a kink sitting exactly on a grid point is still caught.
    // With row-major enumeration the stride between neighbours along the
    // axis is g^(n-1-axis).
    let stride = g.pow((n - 1 - axis) as u32);
    let mut split_points = Vec::new();
    for base in 0..total {
        if (base / stride) % g != 0 {
            continue;
        }
        let mut prev: Option<(usize, bool)> = None;
        for k in 0..g {
            let i = base + k * stride;
            let s = match slopes[i] {
                Some(s) if s.abs() > tol => s,
                _ => continue,
            };
            let positive = s > 0.0;
            if let Some((pi, prev_positive)) = prev {
                if prev_positive != positive {
                    split_points.push(bisect_split(f, axis, &points[pi], points[i][axis]));
                }
            }
            prev = Some((i, positive));
        }
    }
    Ok(MonotonicityReport {
        verdict: MuVerdict::NonMuMonotonic,
        split_points,
        evidence_grid: total,
        spread_constant: false,
    })
}

/// Narrows a sign change of the slope gap to a point between `a` (whose
/// slope sign is taken fresh) and coordinate `hi_x` along `axis`. Hitting
/// a branch tie or domain edge stops early: the midpoint reached is the
/// best available location of the switch.
fn bisect_split(f: &Function, axis: usize, a: &[f64], hi_x: f64) -> Vec<f64> {
    let mut probe = a.to_vec();
    let mut lo_x = a[axis];
    let mut hi_x = hi_x;
    let mut s_lo = match eval_dual(f, a) {
        Ok(d) => d.hi_grad[axis] - d.lo_grad[axis],
        Err(_) => 0.0,
    };
    for _ in 0..40 {
        let mid = 0.5 * (lo_x + hi_x);
        probe[axis] = mid;
        match eval_dual(f, &probe) {
            Ok(d) if d.branch_stable => {
                let s_mid = d.hi_grad[axis] - d.lo_grad[axis];
                if (s_mid > 0.0) == (s_lo > 0.0) {
                    lo_x = mid;
                    s_lo = s_mid;
                } else {
                    hi_x = mid;
                }
            }
            _ => break,
        }
    }
    probe[axis] = 0.5 * (lo_x + hi_x);
    probe
}

/// Gradient of `t -> f(u_1(t), ..., u_n(t))` at `a` via the chain rule
/// `Du(a)ᵀ ∇f(u(a))`: real inner functions, interval-valued outer one.
pub fn chain_gradient(
    outer: &Function,
    inners: &[Function],
    a: &[f64],
) -> Result<IntervalVector, CalculusError> {
    if inners.len() != outer.arity() {
        return Err(CalculusError::Dimension { expected: outer.arity(), got: inners.len() });
    }
    let m = inners[0].arity();
    for (j, g) in inners.iter().enumerate() {
        if g.arity() != m {
            return Err(CalculusError::Dimension { expected: m, got: g.arity() });
        }
        if !g.expr().is_real_valued() {
            return Err(CalculusError::NotRealValued { which: j });
        }
    }
    if a.len() != m {
        return Err(CalculusError::Dimension { expected: m, got: a.len() });
    }
    let mut x0 = Vec::with_capacity(inners.len());
    let mut du = Vec::with_capacity(inners.len());
    for g in inners {
        let d = eval_dual(g, a)?;
        x0.push(d.lo_val);
        du.push(d.lo_grad);
    }
    let parts = gradient(outer, &x0)?;
    matrix_linear_comb(&du, &gradient_intervals(&parts))
        .map_err(|e| dimension_from_interval(e, inners.len()))
}

fn dimension_from_interval(e: IntervalError, expected: usize) -> CalculusError {
    match e {
        IntervalError::DimensionMismatch { got, .. } => {
            CalculusError::Dimension { expected, got }
        }
        _ => CalculusError::NonFinite { context: "chain rule combination" },
    }
}

/// Derivative of `g · f` for a real factor `g` and an interval factor `f`
/// whose spread is monotone near `p` (both single-variable):
/// `[(g f_lo)' ∨ (g f_hi)']` evaluated at `p`.
pub fn real_product_derivative(
    g: &Function,
    f: &Function,
    p: f64,
) -> Result<Interval, CalculusError> {
    if g.arity() != 1 {
        return Err(CalculusError::Dimension { expected: 1, got: g.arity() });
    }
    if f.arity() != 1 {
        return Err(CalculusError::Dimension { expected: 1, got: f.arity() });
    }
    if !g.expr().is_real_valued() {
        return Err(CalculusError::NotRealValued { which: 0 });
    }
    let d = 1e-3 * (1.0 + p.abs());
    let box1 = [Interval::raw(p - d, p + d)];
    let report = mu_classify(f, 0, &box1, 9)?;
    match report.verdict {
        MuVerdict::MuIncreasing | MuVerdict::MuDecreasing => {}
        v => {
            return Err(CalculusError::NotMuMonotone {
                detail: format!("classification near {p} is {}", v.name()),
            });
        }
    }
    let gd = eval_dual(g, &[p])?;
    let fd = eval_dual(f, &[p])?;
    let (gv, gs) = (gd.lo_val, gd.lo_grad[0]);
    bracket_of(
        gs * fd.lo_val + gv * fd.lo_grad[0],
        gs * fd.hi_val + gv * fd.hi_grad[0],
        "product rule",
    )
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
    fn stable_partials_use_bracket_ad() {
        let e4 = (4.0f64).exp();
        let f = func("[-2,3]*x1*exp([-1,2]*x2)", 2);
        let d1 = partial_gh(&f, 0, &[2.0, 2.0]).unwrap();
        assert_eq!(d1.method, DerivMethod::BracketAd);
        assert!(d1.branch_stable);
        assert!(d1.lateral.is_none());
        assert_iv(d1.value, -2.0 * e4, 3.0 * e4, 1e-13);
        let d2 = partial_gh(&f, 1, &[2.0, 2.0]).unwrap();
        assert_iv(d2.value, -8.0 * e4, 12.0 * e4, 1e-13);
    }

    #[test]
    fn tied_branch_delegates_to_numeric_quotient() {
        let f = func("[1,2]*x1+[0,1]*x2^2", 2);
        let d = partial_gh(&f, 0, &[0.0, 0.0]).unwrap();
        assert_eq!(d.method, DerivMethod::NumericQuotient);
        assert!(!d.branch_stable);
        assert_iv(d.value, 1.0, 2.0, 1e-7);
        let lat = d.lateral.unwrap();
        assert_iv(lat.left, 1.0, 2.0, 1e-6);
        assert_iv(lat.right, 1.0, 2.0, 1e-6);
        // The other axis also goes numeric at this point and is zero.
        let d2 = partial_gh(&f, 1, &[0.0, 0.0]).unwrap();
        assert_iv(d2.value, 0.0, 0.0, 1e-8);
    }

    #[test]
    fn numeric_quotient_matches_ad_where_stable() {
        let em1 = (-1.0f64).exp();
        let e2 = (2.0f64).exp();
        let f = func("exp([-1,2]*t)", 1);
        let d = partial_numeric(&f, 0, &[1.0]).unwrap();
        assert_eq!(d.method, DerivMethod::NumericQuotient);
        assert!(d.branch_stable);
        assert_iv(d.value, -em1, 2.0 * e2, 1e-9);
    }

    #[test]
    fn numeric_quotient_of_squared_family_at_zero() {
        let f = func("[1,3]*x1^2", 1);
        let d = partial_numeric(&f, 0, &[0.0]).unwrap();
        assert_iv(d.value, 0.0, 0.0, 1e-9);
        // Bracket AD agrees here: both endpoint gradients vanish.
        let a = partial_gh(&f, 0, &[0.0]).unwrap();
        assert_eq!(a.method, DerivMethod::BracketAd);
        assert_iv(a.value, 0.0, 0.0, 1e-15);
    }

    #[test]
    fn directional_numeric_matches_chain_form() {
        let e4 = (4.0f64).exp();
        let f = func("[-2,3]*x1*exp([-1,2]*x2)", 2);
        let d = directional_numeric(&f, &[2.0, 2.0], &[0.1, 0.1]).unwrap();
        // Endpoint branches are smooth here, so the directional derivative
        // is v . grad per endpoint: -e^4 and 1.5 e^4.
        assert_iv(d.value, -e4, 1.5 * e4, 1e-7);
        assert!(d.branch_stable);
    }

    #[test]
    fn one_sided_disagreement_is_undefined() {
        // sqrt(x^2) = |x|: the quotients converge to -1 and +1.
        let f = func("sqrt(x1^2)", 1);
        match partial_gh(&f, 0, &[0.0]) {
            Err(CalculusError::DerivativeUndefined { left, right, defect }) => {
                assert_iv(left, -1.0, -1.0, 1e-6);
                assert_iv(right, 1.0, 1.0, 1e-6);
                assert!(defect > 1.0);
            }
            other => panic!("expected DerivativeUndefined, got {other:?}"),
        }
    }

    #[test]
    fn axis_and_dimension_validation() {
        let f = func("x1+x2", 2);
        assert!(matches!(
            partial_gh(&f, 2, &[0.0, 0.0]),
            Err(CalculusError::AxisOutOfRange { .. })
        ));
        assert!(matches!(
            partial_gh(&f, 0, &[0.0]),
            Err(CalculusError::Dimension { .. })
        ));
    }

    #[test]
    fn gradient_collects_all_axes() {
        let e4 = (4.0f64).exp();
        let f = func("[-2,3]*x1*exp([-1,2]*x2)", 2);
        let g = gradient(&f, &[2.0, 2.0]).unwrap();
        assert_eq!(g.len(), 2);
        assert_iv(g[0].value, -2.0 * e4, 3.0 * e4, 1e-13);
        assert_iv(g[1].value, -8.0 * e4, 12.0 * e4, 1e-13);
        let iv = gradient_intervals(&g);
        assert_eq!(iv.len(), 2);
    }

    #[test]
    fn hessian_of_cubic_exponential_family() {
        // Endpoint functions on x1 <= 0, x2 <= 0: 2 x1^3 e^{x2} (lower)
        // and x1^3 e^{2 x2} (upper).
        let em1 = (-1.0f64).exp();
        let em2 = (-2.0f64).exp();
        let f = func("[1,2]*x1^3*exp([1,2]*x2)", 2);
        let h = hessian(&f, &[-1.0, -1.0]).unwrap();
        assert_eq!(h.method, HessianMethod::SecondOrderDual);
        let m = &h.matrix;
        assert_iv(m.get(0, 0), -12.0 * em1, -6.0 * em2, 1e-13);
        assert_iv(m.get(0, 1), 6.0 * em2, 6.0 * em1, 1e-13);
        assert_iv(m.get(1, 0), 6.0 * em2, 6.0 * em1, 1e-13);
        assert_iv(m.get(1, 1), -2.0 * em1, -4.0 * em2, 1e-13);
        // Exact symmetry from the symmetric second-order dual.
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn hessian_second_partials_of_bilinear_exponential() {
        let e4 = (4.0f64).exp();
        let f = func("[-2,3]*x1*exp([-1,2]*x2)", 2);
        let h = hessian(&f, &[2.0, 2.0]).unwrap();
        assert_eq!(h.method, HessianMethod::SecondOrderDual);
        assert_iv(h.matrix.get(0, 0), 0.0, 0.0, 1e-13);
        assert_iv(h.matrix.get(0, 1), -4.0 * e4, 6.0 * e4, 1e-13);
        assert_iv(h.matrix.get(1, 1), -16.0 * e4, 24.0 * e4, 1e-13);
    }

    #[test]
    fn hessian_with_curvature_tie_is_undefined() {
        // The second derivative branch ties at 0 (curvatures 2 vs 6) and
        // the endpoint slopes of the first partial kink there.
        let f = func("[1,3]*x1^2", 1);
        match hessian(&f, &[0.0]) {
            Err(CalculusError::HessianUndefined { .. }) => {}
            other => panic!("expected HessianUndefined, got {other:?}"),
        }
        // Away from the kink the dual path applies.
        let ok = hessian(&f, &[1.0]).unwrap();
        assert_eq!(ok.method, HessianMethod::SecondOrderDual);
        assert_iv(ok.matrix.get(0, 0), 2.0, 6.0, 1e-12);
    }

    #[test]
    fn directional_ladder_of_exponential_family() {
        let em1 = (-1.0f64).exp();
        let e2 = (2.0f64).exp();
        let f = func("exp([-1,2]*t)", 1);
        let d = directional_derivs(&f, &[1.0], &[1.0], 6).unwrap();
        assert!(d.branch_stable);
        assert_eq!(d.derivs.len(), 7);
        for (k, iv) in d.derivs.iter().enumerate() {
            let a = (-1.0f64).powi(k as i32) * em1;
            let b = (2.0f64).powi(k as i32) * e2;
            assert_iv(*iv, a.min(b), a.max(b), 1e-12);
        }
        // Reversed direction flips the sign pattern.
        let r = directional_derivs(&f, &[1.0], &[-1.0], 1).unwrap();
        assert_iv(r.derivs[1], -2.0 * e2, em1, 1e-12);
    }

    #[test]
    fn directional_order_cap() {
        let f = func("t", 1);
        assert!(directional_derivs(&f, &[0.0], &[1.0], MAX_DIRECTIONAL_ORDER).is_ok());
        assert!(matches!(
            directional_derivs(&f, &[0.0], &[1.0], MAX_DIRECTIONAL_ORDER + 1),
            Err(CalculusError::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn mu_classification_verdicts() {
        let grow = func("exp([-1,2]*t)", 1);
        let b = [Interval::new(0.0, 1.0).unwrap()];
        let r = mu_classify(&grow, 0, &b, 9).unwrap();
        assert_eq!(r.verdict, MuVerdict::MuIncreasing);
        assert!(!r.spread_constant);
        assert_eq!(r.evidence_grid, 9);

        let shrink = func("[1,2]*exp(0-t)", 1);
        let r = mu_classify(&shrink, 0, &b, 9).unwrap();
        assert_eq!(r.verdict, MuVerdict::MuDecreasing);

        let square = func("[1,3]*x1^2", 1);
        let wide = [Interval::new(-1.0, 1.0).unwrap()];
        let r = mu_classify(&square, 0, &wide, 33).unwrap();
        assert_eq!(r.verdict, MuVerdict::NonMuMonotonic);
        assert!(!r.split_points.is_empty());
        for sp in &r.split_points {
            assert!(sp[0].abs() < 1e-6, "split point should sit near 0, got {}", sp[0]);
        }

        let constant = func("[1,2]", 1);
        let r = mu_classify(&constant, 0, &b, 5).unwrap();
        assert_eq!(r.verdict, MuVerdict::MuIncreasing);
        assert!(r.spread_constant);

        // Branch ties on the x1 = 0 plane carry no slope, but the stable
        // samples on either side disagree in sign, which pins the switch
        // to that plane.
        let tie = func("[1,2]*x1+[0,1]*x2^2", 2);
        let b2 = [Interval::new(-1.0, 1.0).unwrap(), Interval::new(-1.0, 1.0).unwrap()];
        let r = mu_classify(&tie, 0, &b2, 5).unwrap();
        assert_eq!(r.verdict, MuVerdict::NonMuMonotonic);
        assert!(!r.split_points.is_empty());
        for sp in &r.split_points {
            assert!(sp[0].abs() < 1e-6, "switch should sit near x1 = 0, got {}", sp[0]);
        }

        // Box leaving the logarithm's domain: unknown.
        let log = func("ln(t)", 1);
        let spanning = [Interval::new(-1.0, 1.0).unwrap()];
        let r = mu_classify(&log, 0, &spanning, 9).unwrap();
        assert_eq!(r.verdict, MuVerdict::Unknown);
    }

    #[test]
    fn chain_rule_against_closed_form() {
        // f(x1,x2) = [1,2]x1 + [0,1]x2, u(t) = (t^2, t^3), a = 1:
        // 2*[1,2] + 3*[0,1] = [2,7].
        let outer = func("[1,2]*x1+[0,1]*x2", 2);
        let inners = [func("t^2", 1), func("t^3", 1)];
        let g = chain_gradient(&outer, &inners, &[1.0]).unwrap();
        assert_eq!(g.len(), 1);
        assert_iv(g[0], 2.0, 7.0, 1e-12);

        // Identity inner function reproduces the outer gradient.
        let outer1 = func("exp([-1,2]*t)", 1);
        let id = [func("t", 1)];
        let g = chain_gradient(&outer1, &id, &[1.0]).unwrap();
        assert_iv(g[0], -(-1.0f64).exp(), 2.0 * (2.0f64).exp(), 1e-12);

        let bad = [func("[0,1]*t", 1), func("t", 1)];
        assert!(matches!(
            chain_gradient(&outer, &bad, &[1.0]),
            Err(CalculusError::NotRealValued { which: 0 })
        ));
    }

    #[test]
    fn product_rule_with_real_factor() {
        // g(t) = t^2, f = exp([-1,2]t) at t = 1:
        // lower (g f_lo)' = 2 e^{-1} - e^{-1} = e^{-1},
        // upper (g f_hi)' = 2 e^2 + 2 e^2 = 4 e^2.
        let g = func("t^2", 1);
        let f = func("exp([-1,2]*t)", 1);
        let d = real_product_derivative(&g, &f, 1.0).unwrap();
        assert_iv(d, (-1.0f64).exp(), 4.0 * (2.0f64).exp(), 1e-12);

        // Constant interval factor: (t * [1,2])' = [1,2].
        let lin = func("t", 1);
        let cst = func("[1,2]", 1);
        let d = real_product_derivative(&lin, &cst, 3.0).unwrap();
        assert_iv(d, 1.0, 2.0, 1e-12);

        // Non-monotone spread near 0 is rejected.
        let sq = func("[1,3]*x1^2", 1);
        assert!(matches!(
            real_product_derivative(&lin, &sq, 0.0),
            Err(CalculusError::NotMuMonotone { .. })
        ));

        // Interval-valued "real" factor is rejected.
        assert!(matches!(
            real_product_derivative(&cst, &f, 1.0),
            Err(CalculusError::NotRealValued { .. })
        ));
    }
}
