//! Deterministic random corpus of interval expressions.
//!
//! The generator draws small expression trees over `+`, `*`, integer
//! powers up to 3, and a single non-nested `exp`, with interval literal
//! endpoints in [-3, 3] and evaluation points in [-1.5, 1.5] per axis.
//! Candidates are rejected until the drawn point is branch-stable,
//! values stay below 1e4, and endpoint series coefficients through order
//! 3 stay below 1e6, so finite-difference oracles remain well
//! conditioned. Everything is a pure function of the seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{mu_classify, MuVerdict};
use crate::eval::{eval_dual, eval_series};
use crate::expr::{compose, Expr, Function};
use crate::interval::Interval;

/// Seed used by the acceptance checks and the CLI default.
pub const CORPUS_SEED: u64 = 0x5EED;

const VALUE_BOUND: f64 = 1e4;
const COEFF_BOUND: f64 = 1e6;

/// An expression with a branch-stable, well-conditioned evaluation point.
#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub f: Function,
    pub point: Vec<f64>,
}

/// A single-variable expression with an evaluation segment.
#[derive(Debug, Clone)]
pub struct MvtCase {
    pub f: Function,
    pub alpha: f64,
    pub beta: f64,
}

/// Real inner functions feeding an interval-valued outer function.
#[derive(Debug, Clone)]
pub struct ChainCase {
    pub outer: Function,
    pub inners: Vec<Function>,
    pub point: Vec<f64>,
}

/// A real factor, an interval factor, and a point where the interval
/// factor's spread is monotone.
#[derive(Debug, Clone)]
pub struct ProductCase {
    pub real: Function,
    pub f: Function,
    pub point: f64,
}

pub struct CorpusGen {
    rng: ChaCha8Rng,
}

impl CorpusGen {
    pub fn new(seed: u64) -> CorpusGen {
        CorpusGen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn leaf(&mut self, arity: usize, real_only: bool) -> Expr {
        match self.rng.gen_range(0..4u32) {
            0 | 1 => Expr::Var(self.rng.gen_range(0..arity)),
            2 => Expr::Real(self.rng.gen_range(-3.0..3.0)),
            _ => {
                if real_only {
                    Expr::Real(self.rng.gen_range(-3.0..3.0))
                } else {
                    let a: f64 = self.rng.gen_range(-3.0..3.0);
                    let b: f64 = self.rng.gen_range(-3.0..3.0);
                    Expr::Lit(Interval::bracket(a, b).expect("finite endpoints"))
                }
            }
        }
    }

    fn tree(&mut self, depth: usize, arity: usize, real_only: bool, allow_exp: bool) -> Expr {
        if depth == 0 {
            return self.leaf(arity, real_only);
        }
        match self.rng.gen_range(0..100u32) {
            0..=29 => {
                let l = self.tree(depth - 1, arity, real_only, allow_exp);
                let r = self.tree(depth - 1, arity, real_only, allow_exp);
                l.add(r)
            }
            30..=59 => {
                let l = self.tree(depth - 1, arity, real_only, allow_exp);
                let r = self.tree(depth - 1, arity, real_only, allow_exp);
                l.mul(r)
            }
            60..=74 => {
                let base = self.tree(depth - 1, arity, real_only, allow_exp);
                let k = self.rng.gen_range(2..=3u32);
                base.pow(k)
            }
            75..=89 if allow_exp => self.tree(depth - 1, arity, real_only, false).exp(),
            _ => self.leaf(arity, real_only),
        }
    }

    fn function(&mut self, depth: usize, arity: usize, real_only: bool) -> Function {
        loop {
            let ast = self.tree(depth, arity, real_only, true);
            if ast.max_var().is_none() {
                continue;
            }
            return Function::new(ast, arity).expect("variables within arity by construction");
        }
    }

    fn point(&mut self, arity: usize) -> Vec<f64> {
        (0..arity).map(|_| self.rng.gen_range(-1.5..1.5)).collect()
    }

    /// Branch-stable, bounded, with per-axis series coefficients through
    /// order 3 bounded as well.
    fn admissible(f: &Function, point: &[f64]) -> bool {
        let d = match eval_dual(f, point) {
            Ok(d) => d,
            Err(_) => return false,
        };
        if !d.branch_stable {
            return false;
        }
        let vals_ok = d.lo_val.abs() <= VALUE_BOUND && d.hi_val.abs() <= VALUE_BOUND;
        let grads_ok = d
            .lo_grad
            .iter()
            .chain(&d.hi_grad)
            .all(|g| g.is_finite() && g.abs() <= COEFF_BOUND);
        if !vals_ok || !grads_ok || !d.lo_val.is_finite() || !d.hi_val.is_finite() {
            return false;
        }
        for axis in 0..f.arity() {
            let mut v = vec![0.0; f.arity()];
            v[axis] = 1.0;
            let ep = match eval_series(f, point, &v, 3) {
                Ok(ep) => ep,
                Err(_) => return false,
            };
            if !ep.stable() {
                return false;
            }
            let bounded = ep
                .lo
                .c
                .iter()
                .chain(&ep.hi.c)
                .all(|c| c.is_finite() && c.abs() <= COEFF_BOUND);
            if !bounded {
                return false;
            }
            // The finite-difference oracle probes at step 1e-5 per axis;
            // keep its third-order truncation two decades under the check
            // tolerance relative to the slope.
            let h = 1e-5 * (1.0 + point[axis].abs());
            for c in [&ep.lo.c, &ep.hi.c] {
                if h * h * c[3].abs() > 1e-8 * (1.0 + c[1].abs()) {
                    return false;
                }
            }
        }
        true
    }

    /// Next derivative-check case: expression of arity 1 or 2 with an
    /// admissible point.
    pub fn next_case(&mut self) -> CorpusCase {
        loop {
            let arity = self.rng.gen_range(1..=2usize);
            let f = self.function(4, arity, false);
            let point = self.point(arity);
            if Self::admissible(&f, &point) {
                return CorpusCase { f, point };
            }
        }
    }

    /// Next mean-value case: a single-variable expression bounded along
    /// the whole segment.
    pub fn next_mvt_case(&mut self) -> MvtCase {
        'outer: loop {
            let f = self.function(3, 1, false);
            let a: f64 = self.rng.gen_range(-1.5..1.5);
            let b: f64 = self.rng.gen_range(-1.5..1.5);
            if (b - a).abs() < 0.1 {
                continue;
            }
            let (alpha, beta) = if a < b { (a, b) } else { (b, a) };
            for j in 0..9 {
                let t = alpha + (beta - alpha) * j as f64 / 8.0;
                let d = match eval_dual(&f, &[t]) {
                    Ok(d) => d,
                    Err(_) => continue 'outer,
                };
                let ok = d.lo_val.is_finite()
                    && d.hi_val.is_finite()
                    && d.lo_val.abs() <= VALUE_BOUND
                    && d.hi_val.abs() <= VALUE_BOUND
                    && d.lo_grad[0].abs() <= COEFF_BOUND
                    && d.hi_grad[0].abs() <= COEFF_BOUND;
                if !ok {
                    continue 'outer;
                }
            }
            return MvtCase { f, alpha, beta };
        }
    }

    /// Next chain-rule case. The identity between the chained gradient and
    /// the gradient of the composition needs the inner slopes to pull all
    /// spread gaps the same way, so misaligned candidates are rejected.
    pub fn next_chain_case(&mut self) -> ChainCase {
        loop {
            let n = self.rng.gen_range(1..=2usize);
            let outer = self.function(3, n, false);
            let inners: Vec<Function> = (0..n).map(|_| self.function(2, 1, true)).collect();
            let a = self.point(1);
            let composite = match compose(&outer, &inners) {
                Some(c) => c,
                None => continue,
            };
            if !Self::admissible(&composite, &a) {
                continue;
            }
            let mut x0 = Vec::with_capacity(n);
            let mut slopes = Vec::with_capacity(n);
            let mut inner_ok = true;
            for g in &inners {
                match eval_dual(g, &a) {
                    Ok(d) if d.lo_val.is_finite() && d.lo_grad[0].is_finite() => {
                        x0.push(d.lo_val);
                        slopes.push(d.lo_grad[0]);
                    }
                    _ => {
                        inner_ok = false;
                        break;
                    }
                }
            }
            if !inner_ok || !Self::admissible(&outer, &x0) {
                continue;
            }
            let od = eval_dual(&outer, &x0).expect("admissible point evaluates");
            let pulls: Vec<f64> = (0..n)
                .map(|j| slopes[j] * (od.hi_grad[j] - od.lo_grad[j]))
                .collect();
            let scale = pulls.iter().fold(0.0f64, |m, p| m.max(p.abs()));
            let tol = 1e-12 * (1.0 + scale);
            let has_pos = pulls.iter().any(|p| *p > tol);
            let has_neg = pulls.iter().any(|p| *p < -tol);
            if has_pos && has_neg {
                continue;
            }
            return ChainCase { outer, inners, point: a };
        }
    }

    /// Next product-rule case: real factor times an interval factor whose
    /// spread is monotone near the point.
    pub fn next_product_case(&mut self) -> ProductCase {
        loop {
            let real = self.function(3, 1, true);
            let f = self.function(3, 1, false);
            let p: f64 = self.rng.gen_range(-1.5..1.5);
            if !Self::admissible(&f, &[p]) || !Self::admissible(&real, &[p]) {
                continue;
            }
            let product_ast = real.expr().clone().mul(f.expr().clone());
            let product = Function::new(product_ast, 1).expect("arity preserved");
            if !Self::admissible(&product, &[p]) {
                continue;
            }
            let d = 1e-3 * (1.0 + p.abs());
            let bounds = [Interval::new(p - d, p + d).expect("finite box")];
            match mu_classify(&f, 0, &bounds, 9) {
                Ok(r) if matches!(r.verdict, MuVerdict::MuIncreasing | MuVerdict::MuDecreasing) => {
                    return ProductCase { real, f, point: p };
                }
                _ => continue,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let mut g1 = CorpusGen::new(CORPUS_SEED);
        let mut g2 = CorpusGen::new(CORPUS_SEED);
        for _ in 0..20 {
            let a = g1.next_case();
            let b = g2.next_case();
            assert_eq!(a.f.to_string(), b.f.to_string());
            assert_eq!(a.point, b.point);
        }
        let m1 = g1.next_mvt_case();
        let m2 = g2.next_mvt_case();
        assert_eq!(m1.f.to_string(), m2.f.to_string());
        assert_eq!((m1.alpha, m1.beta), (m2.alpha, m2.beta));
    }

    #[test]
    fn cases_are_admissible() {
        let mut gen = CorpusGen::new(CORPUS_SEED);
        for _ in 0..50 {
            let c = gen.next_case();
            let d = eval_dual(&c.f, &c.point).unwrap();
            assert!(d.branch_stable);
            assert!(d.lo_val.abs() <= VALUE_BOUND && d.hi_val.abs() <= VALUE_BOUND);
            for g in d.lo_grad.iter().chain(&d.hi_grad) {
                assert!(g.is_finite() && g.abs() <= COEFF_BOUND);
            }
        }
    }

    #[test]
    fn mvt_cases_are_ordered_segments() {
        let mut gen = CorpusGen::new(7);
        for _ in 0..10 {
            let c = gen.next_mvt_case();
            assert!(c.alpha < c.beta);
            assert_eq!(c.f.arity(), 1);
        }
    }

    #[test]
    fn chain_cases_compose_with_real_inners() {
        let mut gen = CorpusGen::new(11);
        for _ in 0..10 {
            let c = gen.next_chain_case();
            assert_eq!(c.inners.len(), c.outer.arity());
            assert!(c.inners.iter().all(|g| g.expr().is_real_valued()));
            assert!(compose(&c.outer, &c.inners).is_some());
        }
    }

    #[test]
    fn product_cases_have_monotone_spread() {
        let mut gen = CorpusGen::new(13);
        for _ in 0..10 {
            let c = gen.next_product_case();
            assert!(c.real.expr().is_real_valued());
            let d = 1e-3 * (1.0 + c.point.abs());
            let bounds = [Interval::new(c.point - d, c.point + d).unwrap()];
            let r = mu_classify(&c.f, 0, &bounds, 9).unwrap();
            assert!(matches!(r.verdict, MuVerdict::MuIncreasing | MuVerdict::MuDecreasing));
        }
    }
}
