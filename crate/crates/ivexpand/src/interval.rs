//! Closed interval arithmetic with the generalized Hukuhara difference.
//!
//! An [`Interval`] is a nonempty closed bounded set `[lo, hi]` with
//! `lo <= hi`. Arithmetic follows exact range semantics: the result of an
//! operation is the set of all values the operation can take over the
//! operands. No directed rounding is performed; results are correct to
//! floating-point roundoff and all comparisons made by callers are expected
//! to carry tolerances.
//!
//! The gH-difference `a ⊖ b = [min(a.lo - b.lo, a.hi - b.hi), max(..)]`
//! generalizes the Hukuhara difference to arbitrary interval pairs and is
//! the basis of the difference quotients used by the calculus layer.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

/// Errors raised by interval construction and the fallible operations.
#[derive(Debug, Clone, PartialEq)]
pub enum IntervalError {
    /// A bound or scalar argument was NaN or infinite.
    NonFinite { context: &'static str, value: f64 },
    /// `new` was called with `lo > hi`.
    Unordered { lo: f64, hi: f64 },
    /// `hull` was called with an empty list.
    EmptyHull,
    /// A negative tolerance was supplied to a set comparison.
    NegativeTolerance { tol: f64 },
    /// Vector/matrix dimensions do not conform.
    DimensionMismatch { expected: usize, got: usize },
    /// A unary function was applied outside its domain.
    Domain { func: UnaryFn, lo: f64 },
}

impl fmt::Display for IntervalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalError::NonFinite { context, value } => {
                write!(f, "non-finite value {value} in {context}")
            }
            IntervalError::Unordered { lo, hi } => {
                write!(f, "interval bounds out of order: lo={lo} > hi={hi}")
            }
            IntervalError::EmptyHull => write!(f, "hull of an empty interval list"),
            IntervalError::NegativeTolerance { tol } => {
                write!(f, "negative tolerance {tol}")
            }
            IntervalError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            IntervalError::Domain { func, lo } => {
                write!(f, "{}: lower bound {lo} outside domain", func.name())
            }
        }
    }
}

impl std::error::Error for IntervalError {}

/// Monotone elementary functions applied endpoint-wise to intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryFn {
    Exp,
    Ln,
    Sqrt,
}

impl UnaryFn {
    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Exp => "exp",
            UnaryFn::Ln => "ln",
            UnaryFn::Sqrt => "sqrt",
        }
    }

    /// Applies the function to a real argument.
    pub fn apply(self, x: f64) -> f64 {
        match self {
            UnaryFn::Exp => x.exp(),
            UnaryFn::Ln => x.ln(),
            UnaryFn::Sqrt => x.sqrt(),
        }
    }

    /// Whether an interval with the given lower bound lies in the domain.
    pub fn domain_contains(self, lo: f64) -> bool {
        match self {
            UnaryFn::Exp => true,
            UnaryFn::Ln => lo > 0.0,
            UnaryFn::Sqrt => lo >= 0.0,
        }
    }
}

/// A nonempty closed bounded interval `[lo, hi]`, `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Checked constructor: bounds must be finite and ordered.
    pub fn new(lo: f64, hi: f64) -> Result<Interval, IntervalError> {
        if !lo.is_finite() {
            return Err(IntervalError::NonFinite { context: "interval lower bound", value: lo });
        }
        if !hi.is_finite() {
            return Err(IntervalError::NonFinite { context: "interval upper bound", value: hi });
        }
        if lo > hi {
            return Err(IntervalError::Unordered { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Sorting constructor: `[a ∨ b] = [min(a,b), max(a,b)]`.
    pub fn bracket(a: f64, b: f64) -> Result<Interval, IntervalError> {
        if !a.is_finite() {
            return Err(IntervalError::NonFinite { context: "bracket argument", value: a });
        }
        if !b.is_finite() {
            return Err(IntervalError::NonFinite { context: "bracket argument", value: b });
        }
        Ok(Interval { lo: a.min(b), hi: a.max(b) })
    }

    /// Degenerate interval `[v, v]`.
    pub fn point(v: f64) -> Result<Interval, IntervalError> {
        Interval::new(v, v)
    }

    /// Internal constructor for bounds already known to be ordered.
    pub(crate) fn raw(lo: f64, hi: f64) -> Interval {
        debug_assert!(lo <= hi, "raw interval out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Width `hi - lo`; the "spread" whose monotonicity drives endpoint
    /// assignment in the gH calculus.
    pub fn spread(self) -> f64 {
        self.hi - self.lo
    }

    /// `max(|lo|, |hi|)`, the largest absolute value attained.
    pub fn magnitude(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn midpoint(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_degenerate(self) -> bool {
        self.lo == self.hi
    }

    /// Generalized Hukuhara difference
    /// `[min(a.lo - b.lo, a.hi - b.hi), max(a.lo - b.lo, a.hi - b.hi)]`.
    pub fn gh_diff(self, rhs: Interval) -> Interval {
        let d1 = self.lo - rhs.lo;
        let d2 = self.hi - rhs.hi;
        Interval::raw(d1.min(d2), d1.max(d2))
    }

    /// Scalar product `t ⊙ [lo, hi]`, flipping the bounds for `t < 0`.
    pub fn scale(self, t: f64) -> Interval {
        if t >= 0.0 {
            Interval::raw(t * self.lo, t * self.hi)
        } else {
            Interval::raw(t * self.hi, t * self.lo)
        }
    }

    /// Exact range of `x^k` for `x` in the interval (`k >= 0`).
    ///
    /// Even powers with `lo < 0 < hi` attain their minimum 0 in the
    /// interior; odd powers are monotone.
    pub fn int_pow(self, k: u32) -> Interval {
        if k == 0 {
            return Interval::ONE;
        }
        let pl = self.lo.powi(k as i32);
        let ph = self.hi.powi(k as i32);
        if k % 2 == 1 {
            Interval::raw(pl, ph)
        } else if self.lo < 0.0 && 0.0 < self.hi {
            Interval::raw(0.0, pl.max(ph))
        } else {
            Interval::raw(pl.min(ph), pl.max(ph))
        }
    }

    /// Endpoint-wise application of a monotone increasing elementary
    /// function; errors when the interval leaves the function's domain.
    pub fn apply_unary(self, func: UnaryFn) -> Result<Interval, IntervalError> {
        if !func.domain_contains(self.lo) {
            return Err(IntervalError::Domain { func, lo: self.lo });
        }
        Ok(Interval::raw(func.apply(self.lo), func.apply(self.hi)))
    }

    /// Hausdorff distance `max(|a.lo - b.lo|, |a.hi - b.hi|)`.
    pub fn hausdorff(self, rhs: Interval) -> f64 {
        (self.lo - rhs.lo).abs().max((self.hi - rhs.hi).abs())
    }

    /// Whether `self ⊆ outer` up to an outward widening of `outer` by
    /// `tol >= 0` on both sides.
    pub fn is_subset_within(self, outer: Interval, tol: f64) -> Result<bool, IntervalError> {
        if tol < 0.0 || tol.is_nan() {
            return Err(IntervalError::NegativeTolerance { tol });
        }
        Ok(outer.lo - tol <= self.lo && self.hi <= outer.hi + tol)
    }
}

impl Add for Interval {
    type Output = Interval;

    /// Minkowski sum `[a.lo + b.lo, a.hi + b.hi]`.
    fn add(self, rhs: Interval) -> Interval {
        Interval::raw(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;

    /// Minkowski difference `a ⊕ (-1) ⊙ b` (not the gH-difference).
    fn sub(self, rhs: Interval) -> Interval {
        Interval::raw(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval::raw(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;

    /// Exact product range: min and max of the four endpoint products,
    /// evaluated in the fixed order lo·lo, lo·hi, hi·lo, hi·hi.
    fn mul(self, rhs: Interval) -> Interval {
        let c = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        let mut lo = c[0];
        let mut hi = c[0];
        for &v in &c[1..] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Interval::raw(lo, hi)
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        rhs.scale(self)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?},{:?}]", self.lo, self.hi)
    }
}

/// Smallest interval containing every item in the list.
pub fn hull(items: &[Interval]) -> Result<Interval, IntervalError> {
    let first = items.first().ok_or(IntervalError::EmptyHull)?;
    let mut lo = first.lo;
    let mut hi = first.hi;
    for it in &items[1..] {
        lo = lo.min(it.lo);
        hi = hi.max(it.hi);
    }
    Ok(Interval::raw(lo, hi))
}

/// Real linear combination `Σ p[i] ⊙ q[i]` of an interval vector.
pub fn linear_comb(p: &[f64], q: &IntervalVector) -> Result<Interval, IntervalError> {
    if p.len() != q.len() {
        return Err(IntervalError::DimensionMismatch { expected: q.len(), got: p.len() });
    }
    let mut acc = Interval::ZERO;
    for (c, iv) in p.iter().zip(q.iter()) {
        if !c.is_finite() {
            return Err(IntervalError::NonFinite { context: "linear_comb coefficient", value: *c });
        }
        acc = acc + iv.scale(*c);
    }
    Ok(acc)
}

/// Transposed real-matrix action `Aᵀ q`: `a` has one row per entry of `q`,
/// and the j-th output is `Σᵢ a[i][j] ⊙ q[i]`.
pub fn matrix_linear_comb(
    a: &[Vec<f64>],
    q: &IntervalVector,
) -> Result<IntervalVector, IntervalError> {
    if a.len() != q.len() {
        return Err(IntervalError::DimensionMismatch { expected: q.len(), got: a.len() });
    }
    let cols = a.first().map_or(0, |row| row.len());
    for row in a {
        if row.len() != cols {
            return Err(IntervalError::DimensionMismatch { expected: cols, got: row.len() });
        }
    }
    let mut out = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut acc = Interval::ZERO;
        for (row, iv) in a.iter().zip(q.iter()) {
            let c = row[j];
            if !c.is_finite() {
                return Err(IntervalError::NonFinite {
                    context: "matrix_linear_comb coefficient",
                    value: c,
                });
            }
            acc = acc + iv.scale(c);
        }
        out.push(acc);
    }
    Ok(IntervalVector::from(out))
}

/// A fixed-length vector of intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalVector(Vec<Interval>);

impl IntervalVector {
    pub fn new(items: Vec<Interval>) -> IntervalVector {
        IntervalVector(items)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }
}

impl From<Vec<Interval>> for IntervalVector {
    fn from(v: Vec<Interval>) -> IntervalVector {
        IntervalVector(v)
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;

    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

/// A dense row-major matrix of intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntervalMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j]
    }
}
