//! Dual-endpoint evaluation of expressions.
//!
//! Every expression is evaluated as a pair of real-valued "endpoint
//! functions" (lower, upper). Operations whose result endpoints depend on a
//! min/max choice (products, even powers astride zero, gH-differences)
//! select a branch by comparing candidate values in a fixed order. The
//! selected candidate carries not just a value but a [`Carrier`]: plain
//! `f64` for interval evaluation, first- or second-order duals for
//! derivatives, or a truncated power series for higher-order directional
//! derivatives.
//!
//! A branch *tie* occurs when a losing candidate's value agrees with the
//! winner's within `tie_tol` (relative) while its carrier differs. Ties
//! from coincident candidates (e.g. a degenerate operand producing the same
//! carrier twice) are harmless and not reported. A genuine tie means the
//! endpoint selection — and with it any derivative read off the carriers —
//! is unstable at that point, so results are flagged.

use std::fmt;

use crate::expr::{Expr, Function};
use crate::interval::{Interval, UnaryFn};

/// Default relative tolerance for detecting branch ties.
pub const DEFAULT_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// `ln`/`sqrt` applied to an interval leaving the domain. `node` is the
    /// preorder index of the offending expression node.
    Domain { func: UnaryFn, lo: f64, node: usize },
    /// The evaluation point does not match the function's arity.
    ArityMismatch { expected: usize, got: usize },
    /// Overflow or an indeterminate form: the value is not a bounded
    /// interval.
    NonFinite,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Domain { func, lo, node } => write!(
                f,
                "{} applied outside its domain (lower endpoint {lo}) at node {node}",
                func.name()
            ),
            EvalError::ArityMismatch { expected, got } => {
                write!(f, "point has {got} coordinates but the function takes {expected}")
            }
            EvalError::NonFinite => {
                write!(f, "evaluation overflowed to a non-finite value")
            }
        }
    }
}

impl std::error::Error for EvalError {}

/// Value type propagated through an endpoint function during evaluation.
///
/// Implementations carry the plain value plus whatever derivative data the
/// caller needs. `close_to` decides whether two tied candidates are
/// interchangeable — it must compare the full carrier, not just the value.
pub trait Carrier: Clone {
    fn const_like(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn powi(&self, k: u32) -> Self;
    fn apply(&self, func: UnaryFn) -> Self;
    fn close_to(&self, other: &Self, tol: f64) -> bool;
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

impl Carrier for f64 {
    fn const_like(&self, c: f64) -> f64 {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn add(&self, rhs: &f64) -> f64 {
        self + rhs
    }

    fn sub(&self, rhs: &f64) -> f64 {
        self - rhs
    }

    fn mul(&self, rhs: &f64) -> f64 {
        self * rhs
    }

    fn powi(&self, k: u32) -> f64 {
        f64::powi(*self, k as i32)
    }

    fn apply(&self, func: UnaryFn) -> f64 {
        func.apply(*self)
    }

    fn close_to(&self, other: &f64, tol: f64) -> bool {
        rel_close(*self, *other, tol)
    }
}

/// First-order forward dual: value and gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub g: Vec<f64>,
}

impl Dual {
    pub fn var(x: f64, axis: usize, n: usize) -> Dual {
        let mut g = vec![0.0; n];
        g[axis] = 1.0;
        Dual { v: x, g }
    }

    pub fn constant(c: f64, n: usize) -> Dual {
        Dual { v: c, g: vec![0.0; n] }
    }
}

impl Carrier for Dual {
    fn const_like(&self, c: f64) -> Dual {
        Dual::constant(c, self.g.len())
    }

    fn value(&self) -> f64 {
        self.v
    }

    fn add(&self, rhs: &Dual) -> Dual {
        Dual {
            v: self.v + rhs.v,
            g: self.g.iter().zip(&rhs.g).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, rhs: &Dual) -> Dual {
        Dual {
            v: self.v - rhs.v,
            g: self.g.iter().zip(&rhs.g).map(|(a, b)| a - b).collect(),
        }
    }

    fn mul(&self, rhs: &Dual) -> Dual {
        Dual {
            v: self.v * rhs.v,
            g: self
                .g
                .iter()
                .zip(&rhs.g)
                .map(|(a, b)| self.v * b + rhs.v * a)
                .collect(),
        }
    }

    fn powi(&self, k: u32) -> Dual {
        if k == 0 {
            return self.const_like(1.0);
        }
        let d = (k as f64) * self.v.powi(k as i32 - 1);
        Dual { v: self.v.powi(k as i32), g: self.g.iter().map(|a| d * a).collect() }
    }

    fn apply(&self, func: UnaryFn) -> Dual {
        let (v, d) = match func {
            UnaryFn::Exp => {
                let e = self.v.exp();
                (e, e)
            }
            UnaryFn::Ln => (self.v.ln(), 1.0 / self.v),
            UnaryFn::Sqrt => {
                let s = self.v.sqrt();
                (s, 0.5 / s)
            }
        };
        Dual { v, g: self.g.iter().map(|a| d * a).collect() }
    }

    fn close_to(&self, other: &Dual, tol: f64) -> bool {
        rel_close(self.v, other.v, tol)
            && self.g.iter().zip(&other.g).all(|(a, b)| rel_close(*a, *b, tol))
    }
}

/// Second-order forward dual: value, gradient, and dense Hessian
/// (row-major `n x n`, symmetric by construction).
#[derive(Debug, Clone, PartialEq)]
pub struct Dual2 {
    pub v: f64,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl Dual2 {
    pub fn var(x: f64, axis: usize, n: usize) -> Dual2 {
        let mut g = vec![0.0; n];
        g[axis] = 1.0;
        Dual2 { v: x, g, h: vec![0.0; n * n] }
    }

    pub fn constant(c: f64, n: usize) -> Dual2 {
        Dual2 { v: c, g: vec![0.0; n], h: vec![0.0; n * n] }
    }

    fn n(&self) -> usize {
        self.g.len()
    }

    /// Applies the scalar chain rule `f(u)`: `d1 = f'(u)`, `d2 = f''(u)`.
    fn chain(&self, v: f64, d1: f64, d2: f64) -> Dual2 {
        let n = self.n();
        let g: Vec<f64> = self.g.iter().map(|a| d1 * a).collect();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = d1 * self.h[i * n + j] + d2 * self.g[i] * self.g[j];
            }
        }
        Dual2 { v, g, h }
    }
}

impl Carrier for Dual2 {
    fn const_like(&self, c: f64) -> Dual2 {
        Dual2::constant(c, self.n())
    }

    fn value(&self) -> f64 {
        self.v
    }

    fn add(&self, rhs: &Dual2) -> Dual2 {
        Dual2 {
            v: self.v + rhs.v,
            g: self.g.iter().zip(&rhs.g).map(|(a, b)| a + b).collect(),
            h: self.h.iter().zip(&rhs.h).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, rhs: &Dual2) -> Dual2 {
        Dual2 {
            v: self.v - rhs.v,
            g: self.g.iter().zip(&rhs.g).map(|(a, b)| a - b).collect(),
            h: self.h.iter().zip(&rhs.h).map(|(a, b)| a - b).collect(),
        }
    }

    fn mul(&self, rhs: &Dual2) -> Dual2 {
        let n = self.n();
        let v = self.v * rhs.v;
        let g: Vec<f64> = self
            .g
            .iter()
            .zip(&rhs.g)
            .map(|(a, b)| self.v * b + rhs.v * a)
            .collect();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = self.v * rhs.h[i * n + j]
                    + rhs.v * self.h[i * n + j]
                    + self.g[i] * rhs.g[j]
                    + self.g[j] * rhs.g[i];
            }
        }
        Dual2 { v, g, h }
    }

    fn powi(&self, k: u32) -> Dual2 {
        match k {
            0 => self.const_like(1.0),
            1 => self.clone(),
            _ => {
                let kf = k as f64;
                self.chain(
                    self.v.powi(k as i32),
                    kf * self.v.powi(k as i32 - 1),
                    kf * (kf - 1.0) * self.v.powi(k as i32 - 2),
                )
            }
        }
    }

    fn apply(&self, func: UnaryFn) -> Dual2 {
        match func {
            UnaryFn::Exp => {
                let e = self.v.exp();
                self.chain(e, e, e)
            }
            UnaryFn::Ln => self.chain(self.v.ln(), 1.0 / self.v, -1.0 / (self.v * self.v)),
            UnaryFn::Sqrt => {
                let s = self.v.sqrt();
                self.chain(s, 0.5 / s, -0.25 / (self.v * s))
            }
        }
    }

    fn close_to(&self, other: &Dual2, tol: f64) -> bool {
        rel_close(self.v, other.v, tol)
            && self.g.iter().zip(&other.g).all(|(a, b)| rel_close(*a, *b, tol))
            && self.h.iter().zip(&other.h).all(|(a, b)| rel_close(*a, *b, tol))
    }
}

/// Truncated power series in one parameter: `c[k]` is the coefficient of
/// `t^k`. Drives higher-order directional derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub c: Vec<f64>,
}

impl Series {
    /// Series of `a + v t` truncated to the given length (order + 1).
    pub fn var(a: f64, v: f64, len: usize) -> Series {
        let mut c = vec![0.0; len.max(1)];
        c[0] = a;
        if c.len() > 1 {
            c[1] = v;
        }
        Series { c }
    }

    pub fn constant(value: f64, len: usize) -> Series {
        let mut c = vec![0.0; len.max(1)];
        c[0] = value;
        Series { c }
    }

    fn len(&self) -> usize {
        self.c.len()
    }
}

impl Carrier for Series {
    fn const_like(&self, c: f64) -> Series {
        Series::constant(c, self.len())
    }

    fn value(&self) -> f64 {
        self.c[0]
    }

    fn add(&self, rhs: &Series) -> Series {
        Series { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }

    fn sub(&self, rhs: &Series) -> Series {
        Series { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }

    fn mul(&self, rhs: &Series) -> Series {
        let n = self.len();
        let mut c = vec![0.0; n];
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.c[j] * rhs.c[k - j];
            }
            c[k] = acc;
        }
        Series { c }
    }

    fn powi(&self, k: u32) -> Series {
        let mut acc = self.const_like(1.0);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn apply(&self, func: UnaryFn) -> Series {
        let n = self.len();
        let a = &self.c;
        let mut b = vec![0.0; n];
        match func {
            UnaryFn::Exp => {
                b[0] = a[0].exp();
                for k in 1..n {
                    let mut acc = 0.0;
                    for j in 1..=k {
                        acc += j as f64 * a[j] * b[k - j];
                    }
                    b[k] = acc / k as f64;
                }
            }
            UnaryFn::Ln => {
                b[0] = a[0].ln();
                for k in 1..n {
                    let mut acc = k as f64 * a[k];
                    for j in 1..k {
                        acc -= j as f64 * b[j] * a[k - j];
                    }
                    b[k] = acc / (k as f64 * a[0]);
                }
            }
            UnaryFn::Sqrt => {
                b[0] = a[0].sqrt();
                for k in 1..n {
                    let mut acc = a[k];
                    for j in 1..k {
                        acc -= b[j] * b[k - j];
                    }
                    b[k] = acc / (2.0 * b[0]);
                }
            }
        }
        Series { c: b }
    }

    fn close_to(&self, other: &Series, tol: f64) -> bool {
        self.c.iter().zip(&other.c).all(|(a, b)| rel_close(*a, *b, tol))
    }
}

/// Result of evaluating both endpoint functions with carrier `C`.
#[derive(Debug, Clone)]
pub struct Endpoints<C> {
    pub lo: C,
    pub hi: C,
    /// Preorder node indices where a genuine branch tie occurred.
    pub ties: Vec<usize>,
}

impl<C> Endpoints<C> {
    pub fn stable(&self) -> bool {
        self.ties.is_empty()
    }
}

struct Evaluator<'a, C> {
    vars: &'a [C],
    tie_tol: f64,
    counter: usize,
    ties: Vec<usize>,
}

impl<C: Carrier> Evaluator<'_, C> {
    fn select(&mut self, cands: &[&C], want_max: bool, node: usize) -> C {
        let mut wi = 0;
        for i in 1..cands.len() {
            let better = if want_max {
                cands[i].value() > cands[wi].value()
            } else {
                cands[i].value() < cands[wi].value()
            };
            if better {
                wi = i;
            }
        }
        let w = cands[wi];
        let vtol = self.tie_tol * (1.0 + w.value().abs());
        for (i, c) in cands.iter().enumerate() {
            if i != wi
                && (c.value() - w.value()).abs() <= vtol
                && !c.close_to(w, self.tie_tol)
                && self.ties.last() != Some(&node)
            {
                self.ties.push(node);
            }
        }
        w.clone()
    }

    fn eval(&mut self, e: &Expr) -> Result<(C, C), EvalError> {
        let node = self.counter;
        self.counter += 1;
        match e {
            Expr::Real(v) => {
                let c = self.vars[0].const_like(*v);
                Ok((c.clone(), c))
            }
            Expr::Lit(iv) => {
                Ok((self.vars[0].const_like(iv.lo()), self.vars[0].const_like(iv.hi())))
            }
            Expr::Var(i) => Ok((self.vars[*i].clone(), self.vars[*i].clone())),
            Expr::Add(a, b) => {
                let (al, ah) = self.eval(a)?;
                let (bl, bh) = self.eval(b)?;
                Ok((al.add(&bl), ah.add(&bh)))
            }
            Expr::Sub(a, b) => {
                let (al, ah) = self.eval(a)?;
                let (bl, bh) = self.eval(b)?;
                Ok((al.sub(&bh), ah.sub(&bl)))
            }
            Expr::Mul(a, b) => {
                let (al, ah) = self.eval(a)?;
                let (bl, bh) = self.eval(b)?;
                // Fixed candidate order: lo·lo, lo·hi, hi·lo, hi·hi.
                let c = [al.mul(&bl), al.mul(&bh), ah.mul(&bl), ah.mul(&bh)];
                let refs: Vec<&C> = c.iter().collect();
                let lo = self.select(&refs, false, node);
                let hi = self.select(&refs, true, node);
                Ok((lo, hi))
            }
            Expr::Pow(a, k) => {
                let (al, ah) = self.eval(a)?;
                if *k == 0 {
                    let one = self.vars[0].const_like(1.0);
                    return Ok((one.clone(), one));
                }
                let pl = al.powi(*k);
                let ph = ah.powi(*k);
                if k % 2 == 1 {
                    Ok((pl, ph))
                } else if al.value() < 0.0 && ah.value() > 0.0 {
                    // Zero is attained inside the base interval.
                    let zero = self.vars[0].const_like(0.0);
                    let lo = self.select(&[&pl, &ph, &zero], false, node);
                    let hi = self.select(&[&pl, &ph], true, node);
                    Ok((lo, hi))
                } else {
                    let lo = self.select(&[&pl, &ph], false, node);
                    let hi = self.select(&[&pl, &ph], true, node);
                    Ok((lo, hi))
                }
            }
            Expr::Unary(func, a) => {
                let (al, ah) = self.eval(a)?;
                if !func.domain_contains(al.value()) {
                    return Err(EvalError::Domain { func: *func, lo: al.value(), node });
                }
                Ok((al.apply(*func), ah.apply(*func)))
            }
            Expr::GhDiff(a, b) => {
                let (al, ah) = self.eval(a)?;
                let (bl, bh) = self.eval(b)?;
                let d1 = al.sub(&bl);
                let d2 = ah.sub(&bh);
                let lo = self.select(&[&d1, &d2], false, node);
                let hi = self.select(&[&d1, &d2], true, node);
                Ok((lo, hi))
            }
        }
    }
}

/// Evaluates both endpoint functions with the supplied variable carriers.
pub fn eval_endpoints<C: Carrier>(
    f: &Function,
    vars: &[C],
    tie_tol: f64,
) -> Result<Endpoints<C>, EvalError> {
    if vars.len() != f.arity() {
        return Err(EvalError::ArityMismatch { expected: f.arity(), got: vars.len() });
    }
    let mut ev = Evaluator { vars, tie_tol, counter: 0, ties: Vec::new() };
    let (lo, hi) = ev.eval(f.expr())?;
    if !lo.value().is_finite() || !hi.value().is_finite() {
        return Err(EvalError::NonFinite);
    }
    Ok(Endpoints { lo, hi, ties: ev.ties })
}

/// Interval value of the function at a real point.
pub fn eval_interval(f: &Function, p: &[f64]) -> Result<Interval, EvalError> {
    let ep = eval_endpoints(f, p, DEFAULT_TIE_TOL)?;
    Ok(Interval::raw(ep.lo, ep.hi))
}

/// Endpoint values and gradients from one dual-endpoint forward pass.
#[derive(Debug, Clone)]
pub struct DualEndpoint {
    pub lo_val: f64,
    pub hi_val: f64,
    pub lo_grad: Vec<f64>,
    pub hi_grad: Vec<f64>,
    pub branch_stable: bool,
    pub tie_locations: Vec<usize>,
}

impl DualEndpoint {
    pub fn value(&self) -> Interval {
        Interval::raw(self.lo_val, self.hi_val)
    }
}

/// Evaluates the function and both endpoint gradients at `p`.
pub fn eval_dual(f: &Function, p: &[f64]) -> Result<DualEndpoint, EvalError> {
    let n = f.arity();
    if p.len() != n {
        return Err(EvalError::ArityMismatch { expected: n, got: p.len() });
    }
    let vars: Vec<Dual> = p.iter().enumerate().map(|(i, &x)| Dual::var(x, i, n)).collect();
    let ep = eval_endpoints(f, &vars, DEFAULT_TIE_TOL)?;
    Ok(DualEndpoint {
        lo_val: ep.lo.v,
        hi_val: ep.hi.v,
        lo_grad: ep.lo.g,
        hi_grad: ep.hi.g,
        branch_stable: ep.ties.is_empty(),
        tie_locations: ep.ties,
    })
}

/// Evaluates value, endpoint gradients, and endpoint Hessians at `p`.
pub(crate) fn eval_hess(f: &Function, p: &[f64]) -> Result<Endpoints<Dual2>, EvalError> {
    let n = f.arity();
    if p.len() != n {
        return Err(EvalError::ArityMismatch { expected: n, got: p.len() });
    }
    let vars: Vec<Dual2> = p.iter().enumerate().map(|(i, &x)| Dual2::var(x, i, n)).collect();
    eval_endpoints(f, &vars, DEFAULT_TIE_TOL)
}

/// Evaluates endpoint power series of `t -> f(a + t v)` truncated at
/// `order`, i.e. the coefficients of both endpoint functions along the ray.
pub(crate) fn eval_series(
    f: &Function,
    a: &[f64],
    v: &[f64],
    order: usize,
) -> Result<Endpoints<Series>, EvalError> {
    let n = f.arity();
    if a.len() != n {
        return Err(EvalError::ArityMismatch { expected: n, got: a.len() });
    }
    if v.len() != n {
        return Err(EvalError::ArityMismatch { expected: n, got: v.len() });
    }
    let vars: Vec<Series> =
        a.iter().zip(v).map(|(&ai, &vi)| Series::var(ai, vi, order + 1)).collect();
    eval_endpoints(f, &vars, DEFAULT_TIE_TOL)
}

/// Returns `p` with coordinate `axis` shifted by `h`.
pub fn perturb(p: &[f64], axis: usize, h: f64) -> Vec<f64> {
    assert!(axis < p.len(), "axis {axis} out of range for point of dimension {}", p.len());
    let mut q = p.to_vec();
    q[axis] += h;
    q
}

/// Result of sampling branch stability over a box.
#[derive(Debug, Clone)]
pub struct BranchStability {
    pub stable: bool,
    pub unstable_points: Vec<Vec<f64>>,
    pub samples: usize,
}

/// Samples `eval_dual` on a uniform grid over the box and reports every
/// point where the endpoint branch selection tied.
pub fn branch_stability(
    f: &Function,
    bounds: &[Interval],
    samples_per_axis: usize,
) -> Result<BranchStability, EvalError> {
    let n = f.arity();
    if bounds.len() != n {
        return Err(EvalError::ArityMismatch { expected: n, got: bounds.len() });
    }
    let s = samples_per_axis.max(1);
    let axis_points: Vec<Vec<f64>> = bounds
        .iter()
        .map(|iv| {
            if s == 1 {
                vec![iv.midpoint()]
            } else {
                (0..s)
                    .map(|i| iv.lo() + iv.spread() * i as f64 / (s - 1) as f64)
                    .collect()
            }
        })
        .collect();
    let total: usize = axis_points.iter().map(|v| v.len()).product();
    let mut unstable = Vec::new();
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let point: Vec<f64> = idx.iter().enumerate().map(|(ax, &i)| axis_points[ax][i]).collect();
        let d = eval_dual(f, &point)?;
        if !d.branch_stable {
            unstable.push(point);
        }
        for ax in 0..n {
            idx[ax] += 1;
            if idx[ax] < axis_points[ax].len() {
                break;
            }
            idx[ax] = 0;
        }
    }
    Ok(BranchStability { stable: unstable.is_empty(), unstable_points: unstable, samples: total })
}
