//! Calculus of interval-valued functions under generalized Hukuhara (gH)
//! differentiability.
//!
//! An interval-valued function assigns a closed bounded interval to every
//! point of its real domain. This crate provides:
//!
//! * closed interval arithmetic, the gH-difference, and interval
//!   vectors/matrices ([`interval`]);
//! * a small expression language for interval-valued functions with a
//!   parser and canonical printer ([`expr`]);
//! * evaluation of expressions over intervals, including a dual-endpoint
//!   forward-mode differentiation pass that tracks which endpoint branch is
//!   active and whether that selection is stable ([`eval`]);
//! * gH partial derivatives (exact where endpoint differentiability holds,
//!   numeric gH difference quotients where it does not), gradients,
//!   Hessians, higher-order directional derivatives, spread-monotonicity
//!   classification, and chain/product rules ([`calculus`]);
//! * Taylor-style interval expansions with sampled remainder enclosures
//!   ([`expansion`]);
//! * an independent verification suite that checks the library against
//!   finite-difference oracles and structural identities ([`verify`]).
//!
//! Endpoint conventions follow the usual gH calculus: derivatives are
//! reported as the sorted bracket of the endpoint-function derivatives, and
//! spread-monotonicity (how the interval's width varies) decides which
//! endpoint carries which bound.

pub mod calculus;
pub mod eval;
pub mod expansion;
pub mod expr;
pub mod interval;
pub mod jsonout;
pub mod verify;

pub use expr::{parse, Function};
pub use interval::{Interval, IntervalMatrix, IntervalVector};
