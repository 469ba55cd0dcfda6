//! Independent verification of the calculus.
//!
//! The checks here deliberately avoid the code paths they validate:
//! derivatives are compared against plain finite differences of the
//! interval evaluator's endpoints, inclusion laws are tested by direct
//! set comparison, and algebraic identities are evaluated on both sides
//! through different routes. Each check condenses into a [`Report`] with
//! the worst relative defect it measured.
//!
//! Cases that fail a check's precondition (a branch tie at the sample
//! point, a derivative that does not exist on a grid) are skipped and
//! counted rather than failed: the theorems say nothing about them.

pub mod corpus;

use rayon::prelude::*;

use crate::calculus::{
    chain_gradient, gradient, partial_gh, partial_numeric, real_product_derivative,
    CalculusError,
};
use crate::eval::{eval_dual, eval_interval, perturb};
use crate::expansion::{
    eval_polynomial, remainder_hull, remainder_hull_dir, taylor_1d, taylor_nd, REMAINDER_SAMPLES,
};
use crate::expr::{compose, parse, Function};
use crate::interval::{hull, Interval};
use corpus::{ChainCase, CorpusCase, MvtCase, ProductCase};

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct Report {
    pub check_id: String,
    pub passed: bool,
    /// Worst relative defect observed across the non-skipped samples.
    pub measured: f64,
    pub tolerance: f64,
    /// Comparisons actually made.
    pub samples: usize,
    /// Cases whose preconditions failed.
    pub skipped: usize,
    pub skip_reason: Option<String>,
    /// Descriptions of failing cases, capped.
    pub witnesses: Vec<String>,
}

const MAX_WITNESSES: usize = 8;

fn rel_defect(a: Interval, b: Interval) -> f64 {
    a.hausdorff(b) / (1.0 + a.magnitude().max(b.magnitude()))
}

/// How far `inner` sticks out of `outer`, relative to the outer magnitude.
fn inclusion_defect(inner: Interval, outer: Interval) -> f64 {
    let excess = (outer.lo() - inner.lo()).max(inner.hi() - outer.hi()).max(0.0);
    excess / (1.0 + outer.magnitude())
}

enum CaseOutcome {
    Measured(f64, Option<String>),
    Skipped(String),
}

fn aggregate(check_id: &str, tol: f64, outcomes: Vec<CaseOutcome>) -> Report {
    let mut measured = 0.0f64;
    let mut samples = 0;
    let mut skipped = 0;
    let mut skip_reason = None;
    let mut witnesses = Vec::new();
    let mut passed = true;
    for o in outcomes {
        match o {
            CaseOutcome::Measured(d, witness) => {
                samples += 1;
                measured = measured.max(d);
                if d > tol || witness.is_some() {
                    passed = false;
                    if witnesses.len() < MAX_WITNESSES {
                        witnesses
                            .push(witness.unwrap_or_else(|| format!("defect {d:.3e} above tolerance")));
                    }
                }
            }
            CaseOutcome::Skipped(reason) => {
                skipped += 1;
                skip_reason.get_or_insert(reason);
            }
        }
    }
    Report {
        check_id: check_id.to_string(),
        passed,
        measured,
        tolerance: tol,
        samples,
        skipped,
        skip_reason,
        witnesses,
    }
}

/// Central finite difference of the interval evaluator's endpoints: an
/// oracle for the gH partial derivative wherever the branch selection is
/// stable around `p`.
pub fn oracle_endpoint_fd(
    f: &Function,
    axis: usize,
    p: &[f64],
) -> Result<Interval, CalculusError> {
    let h = 1e-5 * (1.0 + p[axis].abs());
    let plus = eval_interval(f, &perturb(p, axis, h))?;
    let minus = eval_interval(f, &perturb(p, axis, -h))?;
    Interval::bracket((plus.lo() - minus.lo()) / (2.0 * h), (plus.hi() - minus.hi()) / (2.0 * h))
        .map_err(|_| CalculusError::NonFinite { context: "finite-difference oracle" })
}

/// Compares [`partial_gh`] against the finite-difference oracle on every
/// axis of every case. Cases with a branch tie at the point are skipped:
/// the bracket form is not claimed there.
pub fn check_bracket_theorem(cases: &[CorpusCase], tol: f64) -> Report {
    let outcomes: Vec<CaseOutcome> = cases
        .par_iter()
        .map(|case| {
            let d = match eval_dual(&case.f, &case.point) {
                Ok(d) => d,
                Err(e) => return CaseOutcome::Skipped(format!("evaluation failed: {e}")),
            };
            if !d.branch_stable {
                return CaseOutcome::Skipped("branch tie at evaluation point".to_string());
            }
            let mut worst = 0.0f64;
            for axis in 0..case.f.arity() {
                let got = match partial_gh(&case.f, axis, &case.point) {
                    Ok(r) => r.value,
                    Err(e) => {
                        return CaseOutcome::Measured(
                            f64::INFINITY,
                            Some(format!("{} at {:?}: {e}", case.f, case.point)),
                        );
                    }
                };
                let want = match oracle_endpoint_fd(&case.f, axis, &case.point) {
                    Ok(iv) => iv,
                    Err(e) => return CaseOutcome::Skipped(format!("oracle failed: {e}")),
                };
                worst = worst.max(rel_defect(got, want));
            }
            let witness = (worst > tol)
                .then(|| format!("{} at {:?}: defect {worst:.3e}", case.f, case.point));
            CaseOutcome::Measured(worst, witness)
        })
        .collect();
    aggregate("bracket-vs-fd", tol, outcomes)
}

const MVT_GRID: usize = 257;

/// Verifies the mean-value inclusion: the gH difference of the endpoint
/// values is contained in segment length times the hull of gH derivatives
/// sampled on a dense grid. Cases where the derivative fails to exist at
/// a grid point are skipped.
pub fn check_mvt(cases: &[MvtCase], tol: f64) -> Report {
    let outcomes: Vec<CaseOutcome> = cases
        .par_iter()
        .map(|case| {
            let fa = match eval_interval(&case.f, &[case.alpha]) {
                Ok(v) => v,
                Err(e) => return CaseOutcome::Skipped(format!("evaluation failed: {e}")),
            };
            let fb = match eval_interval(&case.f, &[case.beta]) {
                Ok(v) => v,
                Err(e) => return CaseOutcome::Skipped(format!("evaluation failed: {e}")),
            };
            let lhs = fb.gh_diff(fa);
            let mut derivs = Vec::with_capacity(MVT_GRID);
            for j in 0..MVT_GRID {
                let t = case.alpha
                    + (case.beta - case.alpha) * j as f64 / (MVT_GRID - 1) as f64;
                match partial_gh(&case.f, 0, &[t]) {
                    Ok(r) => derivs.push(r.value),
                    Err(e) => {
                        return CaseOutcome::Skipped(format!(
                            "derivative unavailable at {t}: {e}"
                        ));
                    }
                }
            }
            let rhs = hull(&derivs).expect("nonempty grid").scale(case.beta - case.alpha);
            let defect = inclusion_defect(lhs, rhs);
            let witness = (defect > tol).then(|| {
                format!(
                    "{} on [{}, {}]: {lhs} not within {rhs}",
                    case.f, case.alpha, case.beta
                )
            });
            CaseOutcome::Measured(defect, witness)
        })
        .collect();
    aggregate("mean-value-inclusion", tol, outcomes)
}

/// Checks that the true range at `x` is contained in the expansion around
/// `a` evaluated at `x` with its remainder attached.
pub fn check_expansion_inclusion(
    f: &Function,
    a: &[f64],
    x: &[f64],
    order: usize,
    tol: f64,
) -> Report {
    let outcome = expansion_case(f, a, x, order, tol);
    aggregate("expansion-inclusion", tol, vec![outcome])
}

fn expansion_case(f: &Function, a: &[f64], x: &[f64], order: usize, tol: f64) -> CaseOutcome {
    let built = if f.arity() == 1 {
        taylor_1d(f, a[0], order).and_then(|poly| {
            let r = remainder_hull(f, a[0], x[0], order)?;
            Ok((poly, r))
        })
    } else {
        taylor_nd(f, a, order).and_then(|poly| {
            let v: Vec<f64> = x.iter().zip(a).map(|(xi, ai)| xi - ai).collect();
            let r = remainder_hull_dir(f, a, &v, order, REMAINDER_SAMPLES)?;
            Ok((poly, r))
        })
    };
    let (poly, rem) = match built {
        Ok(p) => p,
        Err(e) => return CaseOutcome::Skipped(format!("expansion unavailable: {e}")),
    };
    let partial = match eval_polynomial(&poly, x) {
        Ok(v) => v,
        Err(e) => {
            return CaseOutcome::Measured(
                f64::INFINITY,
                Some(format!("polynomial evaluation failed: {e}")),
            );
        }
    };
    let truth = match eval_interval(f, x) {
        Ok(v) => v,
        Err(e) => return CaseOutcome::Skipped(format!("evaluation failed: {e}")),
    };
    // What the partial sum misses must lie inside the remainder hull.
    let delta = truth.gh_diff(partial);
    let defect = inclusion_defect(delta, rem.value);
    let witness = (defect > tol).then(|| {
        format!(
            "{f} around {a:?} at {x:?} order {order}: residue {delta} not within {}",
            rem.value
        )
    });
    CaseOutcome::Measured(defect, witness)
}

/// One algebraic identity to verify.
pub enum AlgebraInput {
    /// Derivative of a sum whose operands' spreads move the same way:
    /// both sides are the Minkowski sum of the derivatives.
    SumEqual { f: Function, g: Function, point: f64 },
    /// Derivative of a sum whose operands' spreads move opposite ways:
    /// the right-hand side combines through a gH difference.
    SumDifferent { f: Function, g: Function, point: f64 },
    /// Derivative of a real factor times an interval factor.
    Product { real: Function, f: Function, point: f64 },
    /// Chained gradient against the gradient of the composition.
    Chain { outer: Function, inners: Vec<Function>, point: Vec<f64> },
}

impl AlgebraInput {
    pub fn from_chain_case(c: &ChainCase) -> AlgebraInput {
        AlgebraInput::Chain {
            outer: c.outer.clone(),
            inners: c.inners.clone(),
            point: c.point.clone(),
        }
    }

    pub fn from_product_case(c: &ProductCase) -> AlgebraInput {
        AlgebraInput::Product { real: c.real.clone(), f: c.f.clone(), point: c.point }
    }
}

fn algebra_defect(input: &AlgebraInput) -> Result<f64, String> {
    match input {
        AlgebraInput::SumEqual { f, g, point } | AlgebraInput::SumDifferent { f, g, point } => {
            let sum_ast = f.expr().clone().add(g.expr().clone());
            let sum = Function::new(sum_ast, 1).map_err(|e| e.to_string())?;
            let lhs = partial_gh(&sum, 0, &[*point]).map_err(|e| e.to_string())?.value;
            let df = partial_gh(f, 0, &[*point]).map_err(|e| e.to_string())?.value;
            let dg = partial_gh(g, 0, &[*point]).map_err(|e| e.to_string())?.value;
            let rhs = match input {
                AlgebraInput::SumEqual { .. } => df + dg,
                _ => df.gh_diff(dg.scale(-1.0)),
            };
            Ok(rel_defect(lhs, rhs))
        }
        AlgebraInput::Product { real, f, point } => {
            let prod_ast = real.expr().clone().mul(f.expr().clone());
            let prod = Function::new(prod_ast, 1).map_err(|e| e.to_string())?;
            let lhs = partial_gh(&prod, 0, &[*point]).map_err(|e| e.to_string())?.value;
            let rhs = real_product_derivative(real, f, *point).map_err(|e| e.to_string())?;
            Ok(rel_defect(lhs, rhs))
        }
        AlgebraInput::Chain { outer, inners, point } => {
            let composite =
                compose(outer, inners).ok_or_else(|| "composition arity mismatch".to_string())?;
            let direct = gradient(&composite, point).map_err(|e| e.to_string())?;
            let chained = chain_gradient(outer, inners, point).map_err(|e| e.to_string())?;
            let mut worst = 0.0f64;
            for (d, c) in direct.iter().zip(chained.iter()) {
                worst = worst.max(rel_defect(d.value, *c));
            }
            Ok(worst)
        }
    }
}

/// Evaluates both sides of each identity and reports the worst relative
/// defect under the given id.
pub fn check_algebra_rules(check_id: &str, inputs: &[AlgebraInput], tol: f64) -> Report {
    let outcomes: Vec<CaseOutcome> = inputs
        .par_iter()
        .map(|input| match algebra_defect(input) {
            Ok(d) => {
                let witness = (d > tol).then(|| format!("identity defect {d:.3e}"));
                CaseOutcome::Measured(d, witness)
            }
            Err(e) => CaseOutcome::Measured(f64::INFINITY, Some(e)),
        })
        .collect();
    aggregate(check_id, tol, outcomes)
}

/// `exp([-1,2] t)`: smooth endpoint exponentials with a growing spread.
pub fn example_exp_affine() -> Function {
    parse("exp([-1,2]*t)", 1).expect("fixed text parses").0
}

/// `[-2,3] x1 exp([-1,2] x2)`: bilinear in the first axis, exponential in
/// the second.
pub fn example_bilinear_exp() -> Function {
    parse("[-2,3]*x1*exp([-1,2]*x2)", 2).expect("fixed text parses").0
}

/// `[1,2] x1^3 exp([1,2] x2)`: cubic times exponential, smooth around
/// negative coordinates.
pub fn example_cubic_exp() -> Function {
    parse("[1,2]*x1^3*exp([1,2]*x2)", 2).expect("fixed text parses").0
}

/// `[1,2] x1 + [0,1] x2^2`: branch selection ties on the x1 = 0 plane
/// while the gH partial still exists there.
pub fn example_tie_case() -> Function {
    parse("[1,2]*x1+[0,1]*x2^2", 2).expect("fixed text parses").0
}

/// `[1,3] x1^2`: spread 2x^2 turns around at the origin.
pub fn example_sym_square() -> Function {
    parse("[1,3]*x1^2", 1).expect("fixed text parses").0
}

fn closed_form_report(check_id: &str, tol: f64, pairs: &[(Interval, Interval)]) -> Report {
    let outcomes = pairs
        .iter()
        .map(|(got, want)| {
            let d = rel_defect(*got, *want);
            let witness = (d > tol).then(|| format!("got {got}, want {want}"));
            CaseOutcome::Measured(d, witness)
        })
        .collect();
    aggregate(check_id, tol, outcomes)
}

fn report_failure(check_id: &str, tol: f64, witness: String) -> Report {
    aggregate(check_id, tol, vec![CaseOutcome::Measured(f64::INFINITY, Some(witness))])
}

/// Re-derives the closed-form examples and checks every published value
/// at 1e-9 relative tolerance.
pub fn run_closed_form_suite() -> Vec<Report> {
    let tol = 1e-9;
    let mut reports = Vec::new();
    let em1 = (-1.0f64).exp();
    let em2 = (-2.0f64).exp();
    let e2 = (2.0f64).exp();
    let e4 = (4.0f64).exp();
    let bracket = |a: f64, b: f64| Interval::bracket(a, b).expect("finite closed form");

    // Derivative ladder of the exponential family at 1.
    let ee = example_exp_affine();
    match crate::calculus::directional_derivs(&ee, &[1.0], &[1.0], 6) {
        Ok(d) => {
            let pairs: Vec<(Interval, Interval)> = (0..=6)
                .map(|k| {
                    let a = (-1.0f64).powi(k as i32) * em1;
                    let b = (2.0f64).powi(k as i32) * e2;
                    (d.derivs[k], bracket(a, b))
                })
                .collect();
            reports.push(closed_form_report("ladder-exponential", tol, &pairs));
        }
        Err(e) => reports.push(report_failure("ladder-exponential", tol, e.to_string())),
    }

    // Tensor terms of the bilinear exponential at (2, 2).
    let ef = example_bilinear_exp();
    match taylor_nd(&ef, &[2.0, 2.0], 3) {
        Ok(p) => {
            let want: Vec<(Vec<u32>, Interval)> = vec![
                (vec![0, 0], bracket(-4.0 * e4, 6.0 * e4)),
                (vec![1, 0], bracket(-2.0 * e4, 3.0 * e4)),
                (vec![0, 1], bracket(-8.0 * e4, 12.0 * e4)),
                (vec![2, 0], Interval::ZERO),
                (vec![1, 1], bracket(-4.0 * e4, 6.0 * e4)),
                (vec![0, 2], bracket(-8.0 * e4, 12.0 * e4)),
            ];
            let mut pairs = Vec::new();
            let mut missing = None;
            for (alpha, w) in &want {
                match p.terms.iter().find(|t| &t.alpha == alpha) {
                    Some(t) => pairs.push((t.coeff, *w)),
                    None => missing = Some(format!("missing term {alpha:?}")),
                }
            }
            reports.push(match missing {
                None => closed_form_report("tensor-bilinear", tol, &pairs),
                Some(m) => report_failure("tensor-bilinear", tol, m),
            });
        }
        Err(e) => reports.push(report_failure("tensor-bilinear", tol, e.to_string())),
    }

    // Hessian of the cubic exponential at (-1, -1).
    let ec = example_cubic_exp();
    match crate::calculus::hessian(&ec, &[-1.0, -1.0]) {
        Ok(h) => {
            let pairs = vec![
                (h.matrix.get(0, 0), bracket(-12.0 * em1, -6.0 * em2)),
                (h.matrix.get(0, 1), bracket(6.0 * em2, 6.0 * em1)),
                (h.matrix.get(1, 0), bracket(6.0 * em2, 6.0 * em1)),
                (h.matrix.get(1, 1), bracket(-2.0 * em1, -4.0 * em2)),
            ];
            reports.push(closed_form_report("hessian-cubic", tol, &pairs));
        }
        Err(e) => reports.push(report_failure("hessian-cubic", tol, e.to_string())),
    }

    // The tie case: bracket AD must flag the origin, the numeric quotient
    // must still find [1, 2].
    let tie = example_tie_case();
    let tie_report = match (eval_dual(&tie, &[0.0, 0.0]), partial_numeric(&tie, 0, &[0.0, 0.0])) {
        (Ok(d), Ok(r)) if !d.branch_stable => {
            closed_form_report("tie-case-numeric", 1e-6, &[(r.value, bracket(1.0, 2.0))])
        }
        (Ok(d), Ok(_)) if d.branch_stable => report_failure(
            "tie-case-numeric",
            1e-6,
            "expected a branch tie at the origin".to_string(),
        ),
        (a, b) => report_failure("tie-case-numeric", 1e-6, format!("{a:?} / {b:?}")),
    };
    reports.push(tie_report);

    // Chain rule closed form: [1,2]x1 + [0,1]x2 over (t^2, t^3) at 1.
    let chain_report = (|| -> Result<Report, String> {
        let outer = parse("[1,2]*x1+[0,1]*x2", 2).map_err(|e| e.to_string())?.0;
        let inners =
            vec![parse("t^2", 1).map_err(|e| e.to_string())?.0, parse("t^3", 1).map_err(|e| e.to_string())?.0];
        let g = chain_gradient(&outer, &inners, &[1.0]).map_err(|e| e.to_string())?;
        Ok(closed_form_report("chain-closed-form", tol, &[(g[0], bracket(2.0, 7.0))]))
    })()
    .unwrap_or_else(|e| report_failure("chain-closed-form", tol, e));
    reports.push(chain_report);

    // Mean value inclusion for the exponential family on [0, 1].
    reports.push({
        let mut r = check_mvt(
            &[MvtCase { f: example_exp_affine(), alpha: 0.0, beta: 1.0 }],
            tol,
        );
        r.check_id = "mvt-exponential".to_string();
        if r.skipped > 0 {
            r.passed = false;
        }
        r
    });

    // Sum rules: aligned spreads add by Minkowski, opposed spreads
    // combine by gH difference ([0,1]t plus [0,1](1-t) is constant).
    let sum_report = (|| -> Result<Report, String> {
        let f = parse("[0,1]*t", 1).map_err(|e| e.to_string())?.0;
        let g_same = parse("[1,2]*t", 1).map_err(|e| e.to_string())?.0;
        let g_diff = parse("[0,1]*(1-t)", 1).map_err(|e| e.to_string())?.0;
        let inputs = vec![
            AlgebraInput::SumEqual { f: f.clone(), g: g_same, point: 0.5 },
            AlgebraInput::SumDifferent { f, g: g_diff, point: 0.5 },
        ];
        Ok(check_algebra_rules("sum-rules", &inputs, tol))
    })()
    .unwrap_or_else(|e| report_failure("sum-rules", tol, e));
    reports.push(sum_report);

    // Product rule: t^2 times the exponential family at 1.
    let product_report = (|| -> Result<Report, String> {
        let real = parse("t^2", 1).map_err(|e| e.to_string())?.0;
        let inputs = vec![AlgebraInput::Product { real, f: example_exp_affine(), point: 1.0 }];
        Ok(check_algebra_rules("product-rule", &inputs, tol))
    })()
    .unwrap_or_else(|e| report_failure("product-rule", tol, e));
    reports.push(product_report);

    // Expansion inclusion for the exponential family.
    reports.push(check_expansion_inclusion(&ee, &[1.0], &[1.5], 3, tol));

    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use corpus::{CorpusGen, CORPUS_SEED};

    #[test]
    fn oracle_agrees_with_bracket_ad_on_smooth_example() {
        let f = example_bilinear_exp();
        for axis in 0..2 {
            let got = partial_gh(&f, axis, &[2.0, 2.0]).unwrap().value;
            let want = oracle_endpoint_fd(&f, axis, &[2.0, 2.0]).unwrap();
            assert!(rel_defect(got, want) < 1e-6, "axis {axis}: {got} vs {want}");
        }
    }

    #[test]
    fn bracket_check_passes_on_seeded_corpus() {
        let mut gen = CorpusGen::new(CORPUS_SEED);
        let cases: Vec<_> = (0..100).map(|_| gen.next_case()).collect();
        let r = check_bracket_theorem(&cases, 1e-6);
        assert!(r.passed, "witnesses: {:?}", r.witnesses);
        assert_eq!(r.samples, 100);
        assert_eq!(r.skipped, 0);
        assert!(r.measured <= 1e-6);
    }

    #[test]
    fn bracket_check_skips_tied_point() {
        let cases = vec![CorpusCase { f: example_tie_case(), point: vec![0.0, 0.0] }];
        let r = check_bracket_theorem(&cases, 1e-6);
        assert_eq!(r.skipped, 1);
        assert_eq!(r.samples, 0);
        assert!(r.passed);
        assert!(r.skip_reason.unwrap().contains("branch tie"));
    }

    #[test]
    fn mvt_check_on_closed_form_and_corpus() {
        let em1 = (-1.0f64).exp();
        let e2 = (2.0f64).exp();
        // Closed form: gH difference of endpoint values sits inside the
        // derivative hull [-1, 2 e^2].
        let lhs = eval_interval(&example_exp_affine(), &[1.0])
            .unwrap()
            .gh_diff(eval_interval(&example_exp_affine(), &[0.0]).unwrap());
        assert!(rel_defect(lhs, Interval::bracket(em1 - 1.0, e2 - 1.0).unwrap()) < 1e-12);
        let r = check_mvt(&[MvtCase { f: example_exp_affine(), alpha: 0.0, beta: 1.0 }], 1e-9);
        assert!(r.passed);
        assert_eq!(r.samples, 1);

        let mut gen = CorpusGen::new(CORPUS_SEED);
        let cases: Vec<_> = (0..30).map(|_| gen.next_mvt_case()).collect();
        let r = check_mvt(&cases, 1e-9);
        assert!(r.passed, "witnesses: {:?}", r.witnesses);
        assert!(r.samples + r.skipped == 30);
    }

    #[test]
    fn expansion_inclusion_on_both_families() {
        let ee = example_exp_affine();
        for &x in &[1.1, 1.25, 1.5] {
            for order in 1..=3 {
                let r = check_expansion_inclusion(&ee, &[1.0], &[x], order, 1e-9);
                assert!(r.passed, "1d x={x} order={order}: {:?}", r.witnesses);
                assert_eq!(r.samples, 1);
            }
        }
        let ef = example_bilinear_exp();
        for x in [[2.1, 2.1], [2.5, 2.0], [2.0, 2.4]] {
            for order in 1..=3 {
                let r = check_expansion_inclusion(&ef, &[2.0, 2.0], &x, order, 1e-9);
                assert!(r.passed, "nd x={x:?} order={order}: {:?}", r.witnesses);
            }
        }
    }

    #[test]
    fn algebra_rules_on_closed_forms_and_corpus() {
        let f = parse("[0,1]*t", 1).unwrap().0;
        let g = parse("[0,1]*(1-t)", 1).unwrap().0;
        // Both sides of the opposed-spread sum rule are [0, 0].
        let sum = Function::new(f.expr().clone().add(g.expr().clone()), 1).unwrap();
        let direct = partial_gh(&sum, 0, &[0.5]).unwrap().value;
        assert!(rel_defect(direct, Interval::ZERO) < 1e-12);
        let r = check_algebra_rules(
            "sum-different",
            &[AlgebraInput::SumDifferent { f, g, point: 0.5 }],
            1e-9,
        );
        assert!(r.passed, "witnesses: {:?}", r.witnesses);

        let mut gen = CorpusGen::new(CORPUS_SEED);
        let mut inputs = Vec::new();
        for _ in 0..10 {
            inputs.push(AlgebraInput::from_chain_case(&gen.next_chain_case()));
        }
        for _ in 0..10 {
            inputs.push(AlgebraInput::from_product_case(&gen.next_product_case()));
        }
        let r = check_algebra_rules("algebra-corpus", &inputs, 1e-6);
        assert!(r.passed, "witnesses: {:?}", r.witnesses);
        assert_eq!(r.samples, 20);
    }

    #[test]
    fn closed_form_suite_passes() {
        for r in run_closed_form_suite() {
            assert!(
                r.passed,
                "{} failed: measured {:.3e}, witnesses {:?}",
                r.check_id, r.measured, r.witnesses
            );
        }
    }
}
