//! Command line front end for the interval calculus library.
//!
//! Exit codes: 0 success, 2 input or parse problem, 3 a requested
//! quantity does not exist or could not be computed, 4 verification
//! checks ran but at least one failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ivexpand::calculus::{
    gradient, hessian, mu_classify, partial_gh, MonotonicityReport, PartialResult,
};
use ivexpand::expansion::{
    eval_polynomial, remainder_hull, remainder_hull_dir, taylor_1d, taylor_nd,
    ExpansionPolynomial, REMAINDER_SAMPLES,
};
use ivexpand::eval::eval_interval;
use ivexpand::expr::Function;
use ivexpand::interval::Interval;
use ivexpand::jsonout;
use ivexpand::verify::corpus::{CorpusCase, CorpusGen};
use ivexpand::verify::{
    check_algebra_rules, check_bracket_theorem, check_mvt, run_closed_form_suite, AlgebraInput,
    Report,
};

#[derive(Parser)]
#[command(
    name = "ivexpand",
    version,
    about = "Calculus and Taylor-style expansion of interval-valued functions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct ExprArgs {
    /// Expression, e.g. "exp([-1,2]*t)" or "[-2,3]*x1*exp([-1,2]*x2)"
    #[arg(long, allow_hyphen_values = true)]
    expr: String,
    /// Number of variables; inferred from the highest index used when omitted
    #[arg(long)]
    arity: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the interval value at a point
    Eval {
        #[command(flatten)]
        fx: ExprArgs,
        /// Evaluation point as comma-separated reals, e.g. "1" or "-2,2"
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// gH partial derivative with respect to one variable at a point
    Diff {
        #[command(flatten)]
        fx: ExprArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Variable index, 1-based
        #[arg(long, default_value_t = 1)]
        wrt: usize,
    },
    /// All gH partial derivatives at a point
    Grad {
        #[command(flatten)]
        fx: ExprArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Interval Hessian at a point
    Hess {
        #[command(flatten)]
        fx: ExprArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Classify how the interval's spread varies along one variable over a box
    Mono {
        #[command(flatten)]
        fx: ExprArgs,
        /// Box as semicolon-separated "lo,hi" pairs, e.g. "-1,1;0,2"
        #[arg(long = "box", allow_hyphen_values = true)]
        bounds: String,
        #[arg(long, default_value_t = 1)]
        wrt: usize,
        /// Grid points per axis
        #[arg(long, default_value_t = 33)]
        grid: usize,
    },
    /// Interval Taylor polynomial, optionally with a remainder toward a target
    Expand {
        #[command(flatten)]
        fx: ExprArgs,
        /// Expansion point as comma-separated reals
        #[arg(long, allow_hyphen_values = true)]
        about: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Attach a remainder enclosure valid on the segment toward this point
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
    },
    /// Run the verification suite: closed forms plus a seeded random corpus
    Check {
        /// Corpus seed, decimal or 0x-prefixed hex
        #[arg(long, value_parser = parse_seed, default_value = "0x5EED")]
        seed: u64,
        /// Number of random derivative cases; other corpora scale with it
        #[arg(long, default_value_t = 200)]
        cases: usize,
        /// File of extra expressions, one per line, fed to the derivative check
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Failure {
        Failure { code: 2, message: message.to_string() }
    }

    fn math(message: impl ToString) -> Failure {
        Failure { code: 3, message: message.to_string() }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli.cmd, cli.format) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Print one line to stdout, exiting quietly when the reader has gone away
/// (stdout piped into something like `head` that closed early).
fn out(line: impl std::fmt::Display) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if writeln!(stdout, "{line}").is_err() {
        std::process::exit(0);
    }
}

/// IVEXPAND_THREADS caps the worker pool; 0 or unset means automatic.
fn init_threads() {
    if let Ok(v) = std::env::var("IVEXPAND_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            Err(_) => eprintln!("warning: ignoring non-numeric IVEXPAND_THREADS={v}"),
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).map_err(|e| e.to_string())
    } else {
        t.parse().map_err(|e: std::num::ParseIntError| e.to_string())
    }
}

fn run(cmd: Cmd, format: Format) -> Result<ExitCode, Failure> {
    match cmd {
        Cmd::Eval { fx, at } => cmd_eval(&fx, &at, format),
        Cmd::Diff { fx, at, wrt } => cmd_diff(&fx, &at, wrt, format),
        Cmd::Grad { fx, at } => cmd_grad(&fx, &at, format),
        Cmd::Hess { fx, at } => cmd_hess(&fx, &at, format),
        Cmd::Mono { fx, bounds, wrt, grid } => cmd_mono(&fx, &bounds, wrt, grid, format),
        Cmd::Expand { fx, about, order, target } => {
            cmd_expand(&fx, &about, order, target.as_deref(), format)
        }
        Cmd::Check { seed, cases, corpus } => cmd_check(seed, cases, corpus.as_deref(), format),
    }
}

// Parsing of command line values into library inputs.

/// The parser wants the arity up front, so when none is given the text is
/// first read against a generous bound and then retightened to the highest
/// variable actually used.
fn parse_function(args: &ExprArgs) -> Result<(Function, Vec<String>), Failure> {
    const PROBE_ARITY: usize = 64;
    if args.arity == Some(0) {
        return Err(Failure::input("arity must be at least 1"));
    }
    let arity = args.arity.unwrap_or(PROBE_ARITY);
    let (f, warns) = ivexpand::parse(&args.expr, arity).map_err(Failure::input)?;
    let f = match args.arity {
        Some(_) => f,
        None => {
            let tight = f.expr().max_var().map_or(1, |m| m + 1);
            Function::new(f.expr().clone(), tight).expect("variables fit the tight arity")
        }
    };
    Ok((f, warns.iter().map(|w| w.to_string()).collect()))
}

fn parse_reals(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            let x: f64 = t
                .trim()
                .parse()
                .map_err(|e| Failure::input(format!("bad {what} component {t:?}: {e}")))?;
            if !x.is_finite() {
                return Err(Failure::input(format!("{what} component {t:?} is not finite")));
            }
            Ok(x)
        })
        .collect()
}

fn parse_point(s: &str, arity: usize) -> Result<Vec<f64>, Failure> {
    let p = parse_reals(s, "point")?;
    if p.len() != arity {
        return Err(Failure::input(format!(
            "point has {} components but the expression takes {arity}",
            p.len()
        )));
    }
    Ok(p)
}

fn parse_box(s: &str, arity: usize) -> Result<Vec<Interval>, Failure> {
    let boxes: Vec<Interval> = s
        .split(';')
        .map(|pair| {
            let ends = parse_reals(pair, "box")?;
            if ends.len() != 2 {
                return Err(Failure::input(format!(
                    "box axis {pair:?} must be two comma-separated reals"
                )));
            }
            Interval::new(ends[0], ends[1])
                .map_err(|_| Failure::input(format!("box axis {pair:?} has lo > hi")))
        })
        .collect::<Result<_, _>>()?;
    if boxes.len() != arity {
        return Err(Failure::input(format!(
            "box has {} axes but the expression takes {arity}",
            boxes.len()
        )));
    }
    Ok(boxes)
}

fn check_wrt(wrt: usize, arity: usize) -> Result<usize, Failure> {
    if wrt == 0 || wrt > arity {
        return Err(Failure::input(format!("--wrt {wrt} is outside 1..={arity}")));
    }
    Ok(wrt - 1)
}

// Rendering helpers.

/// Text mode shows six significant digits.
fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if (1e-4..1e7).contains(&a) {
        let digits = (5 - a.log10().floor() as i64).max(0) as usize;
        format!("{x:.digits$}")
    } else {
        format!("{x:.5e}")
    }
}

fn fmt_iv(iv: Interval) -> String {
    format!("[{}, {}]", fmt_g(iv.lo()), fmt_g(iv.hi()))
}

fn defect_json(x: f64) -> Value {
    if x.is_finite() {
        jsonout::number(x)
    } else {
        Value::String(format!("{x}"))
    }
}

fn point_json(p: &[f64]) -> Value {
    Value::Array(p.iter().map(|&x| jsonout::number(x)).collect())
}

fn partial_json(r: &PartialResult) -> Value {
    let lateral = match &r.lateral {
        Some(l) => json!({
            "left": jsonout::interval(l.left),
            "right": jsonout::interval(l.right),
        }),
        None => Value::Null,
    };
    json!({
        "value": jsonout::interval(r.value),
        "method": r.method.name(),
        "branch_stable": r.branch_stable,
        "lateral": lateral,
    })
}

fn emit(
    format: Format,
    command: &str,
    input: Value,
    result: Value,
    warnings: &[String],
    text: String,
) -> Result<ExitCode, Failure> {
    match format {
        Format::Json => {
            let doc = json!({
                "command": command,
                "input": input,
                "result": result,
                "warnings": warnings,
            });
            out(jsonout::render(&doc));
        }
        Format::Text => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            out(text);
        }
    }
    Ok(ExitCode::SUCCESS)
}

// Command handlers.

fn cmd_eval(fx: &ExprArgs, at: &str, format: Format) -> Result<ExitCode, Failure> {
    let (f, warnings) = parse_function(fx)?;
    let p = parse_point(at, f.arity())?;
    let v = eval_interval(&f, &p).map_err(Failure::math)?;
    emit(
        format,
        "eval",
        json!({"expr": f.to_string(), "arity": f.arity(), "at": point_json(&p)}),
        json!({"value": jsonout::interval(v)}),
        &warnings,
        format!("value: {}", fmt_iv(v)),
    )
}

fn cmd_diff(fx: &ExprArgs, at: &str, wrt: usize, format: Format) -> Result<ExitCode, Failure> {
    let (f, mut warnings) = parse_function(fx)?;
    let p = parse_point(at, f.arity())?;
    let axis = check_wrt(wrt, f.arity())?;
    let r = partial_gh(&f, axis, &p).map_err(Failure::math)?;
    if !r.branch_stable {
        warnings.push(
            "branch selection ties at the evaluation point; value taken from numeric gH \
             difference quotients"
                .to_string(),
        );
    }
    let mut text = format!("derivative: {}\nmethod: {}", fmt_iv(r.value), r.method.name());
    if let Some(l) = &r.lateral {
        text.push_str(&format!("\nlateral: left {}, right {}", fmt_iv(l.left), fmt_iv(l.right)));
    }
    emit(
        format,
        "diff",
        json!({"expr": f.to_string(), "arity": f.arity(), "at": point_json(&p), "wrt": wrt}),
        partial_json(&r),
        &warnings,
        text,
    )
}

fn cmd_grad(fx: &ExprArgs, at: &str, format: Format) -> Result<ExitCode, Failure> {
    let (f, mut warnings) = parse_function(fx)?;
    let p = parse_point(at, f.arity())?;
    let parts = gradient(&f, &p).map_err(Failure::math)?;
    for (i, r) in parts.iter().enumerate() {
        if !r.branch_stable {
            warnings.push(format!(
                "branch selection ties along x{}; that component comes from numeric gH \
                 difference quotients",
                i + 1
            ));
        }
    }
    let text = parts
        .iter()
        .enumerate()
        .map(|(i, r)| format!("d/dx{}: {} ({})", i + 1, fmt_iv(r.value), r.method.name()))
        .collect::<Vec<_>>()
        .join("\n");
    emit(
        format,
        "grad",
        json!({"expr": f.to_string(), "arity": f.arity(), "at": point_json(&p)}),
        json!({"components": parts.iter().map(partial_json).collect::<Vec<_>>()}),
        &warnings,
        text,
    )
}

fn cmd_hess(fx: &ExprArgs, at: &str, format: Format) -> Result<ExitCode, Failure> {
    let (f, warnings) = parse_function(fx)?;
    let p = parse_point(at, f.arity())?;
    let h = hessian(&f, &p).map_err(Failure::math)?;
    let n = f.arity();
    let rows: Vec<Value> = (0..n)
        .map(|i| Value::Array((0..n).map(|j| jsonout::interval(h.matrix.get(i, j))).collect()))
        .collect();
    let mut text = String::new();
    for i in 0..n {
        let row =
            (0..n).map(|j| fmt_iv(h.matrix.get(i, j))).collect::<Vec<_>>().join("  ");
        text.push_str(&row);
        if i + 1 < n {
            text.push('\n');
        }
    }
    text.push_str(&format!("\nmethod: {}", h.method.name()));
    emit(
        format,
        "hess",
        json!({"expr": f.to_string(), "arity": f.arity(), "at": point_json(&p)}),
        json!({"matrix": rows, "method": h.method.name()}),
        &warnings,
        text,
    )
}

fn cmd_mono(
    fx: &ExprArgs,
    bounds: &str,
    wrt: usize,
    grid: usize,
    format: Format,
) -> Result<ExitCode, Failure> {
    let (f, warnings) = parse_function(fx)?;
    let boxes = parse_box(bounds, f.arity())?;
    let axis = check_wrt(wrt, f.arity())?;
    let rep: MonotonicityReport = mu_classify(&f, axis, &boxes, grid).map_err(Failure::math)?;
    let mut text = format!("verdict: {}", rep.verdict.name());
    if rep.spread_constant {
        text.push_str("\nspread is constant over the box");
    }
    for sp in &rep.split_points {
        text.push_str(&format!(
            "\nsplit near: ({})",
            sp.iter().map(|&x| fmt_g(x)).collect::<Vec<_>>().join(", ")
        ));
    }
    let boxes_json: Vec<Value> = boxes.iter().map(|&iv| jsonout::interval(iv)).collect();
    emit(
        format,
        "mono",
        json!({
            "expr": f.to_string(),
            "arity": f.arity(),
            "box": boxes_json,
            "wrt": wrt,
            "grid": grid,
        }),
        json!({
            "verdict": rep.verdict.name(),
            "split_points": rep.split_points.iter().map(|sp| point_json(sp)).collect::<Vec<_>>(),
            "evidence_grid": rep.evidence_grid,
            "spread_constant": rep.spread_constant,
        }),
        &warnings,
        text,
    )
}

fn term_alpha_text(alpha: &[u32]) -> String {
    if alpha.len() == 1 {
        format!("order {}", alpha[0])
    } else {
        format!("alpha ({})", alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
    }
}

fn cmd_expand(
    fx: &ExprArgs,
    about: &str,
    order: usize,
    target: Option<&str>,
    format: Format,
) -> Result<ExitCode, Failure> {
    let (f, mut warnings) = parse_function(fx)?;
    let a = parse_point(about, f.arity())?;
    let mut poly: ExpansionPolynomial = if f.arity() == 1 {
        taylor_1d(&f, a[0], order).map_err(Failure::math)?
    } else {
        taylor_nd(&f, &a, order).map_err(Failure::math)?
    };
    let mut enclosure: Option<Interval> = None;
    let mut x: Option<Vec<f64>> = None;
    if let Some(tgt) = target {
        let xt = parse_point(tgt, f.arity())?;
        let r = if f.arity() == 1 {
            remainder_hull(&f, a[0], xt[0], order).map_err(Failure::math)?
        } else {
            let v: Vec<f64> = xt.iter().zip(&a).map(|(xi, ai)| xi - ai).collect();
            remainder_hull_dir(&f, &a, &v, order, REMAINDER_SAMPLES).map_err(Failure::math)?
        };
        poly.attach_remainder(&r, &xt);
        enclosure = Some(eval_polynomial(&poly, &xt).map_err(Failure::math)?);
        x = Some(xt);
    }
    if !poly.hypotheses_verified {
        warnings.push(
            "spread-monotonicity hypotheses could not be confirmed by sampling; the \
             remainder enclosure is reported without that guarantee"
                .to_string(),
        );
    }

    let mut text = format!(
        "expansion about ({}) to order {}",
        a.iter().map(|&v| fmt_g(v)).collect::<Vec<_>>().join(", "),
        poly.order
    );
    for t in &poly.terms {
        text.push_str(&format!("\n{}: {}", term_alpha_text(&t.alpha), fmt_iv(t.coeff)));
    }
    if let Some(r) = poly.remainder {
        text.push_str(&format!("\nremainder: {}", fmt_iv(r)));
    }
    if let Some(encl) = enclosure {
        text.push_str(&format!("\nenclosure at target: {}", fmt_iv(encl)));
    }
    text.push_str(&format!("\nhypotheses verified: {}", poly.hypotheses_verified));

    let terms_json: Vec<Value> = poly
        .terms
        .iter()
        .map(|t| {
            json!({
                "alpha": t.alpha,
                "coeff": jsonout::interval(t.coeff),
            })
        })
        .collect();
    let mut input = json!({
        "expr": f.to_string(),
        "arity": f.arity(),
        "about": point_json(&a),
        "order": order,
    });
    if let Some(xt) = &x {
        input["target"] = point_json(xt);
    }
    emit(
        format,
        "expand",
        input,
        json!({
            "base_point": point_json(&poly.base_point),
            "order": poly.order,
            "terms": terms_json,
            "remainder": poly.remainder.map_or(Value::Null, jsonout::interval),
            "enclosure_at_target": enclosure.map_or(Value::Null, jsonout::interval),
            "hypotheses_verified": poly.hypotheses_verified,
        }),
        &warnings,
        text,
    )
}

fn report_json(r: &Report) -> Value {
    json!({
        "check_id": r.check_id,
        "passed": r.passed,
        "measured": defect_json(r.measured),
        "tolerance": jsonout::number(r.tolerance),
        "samples": r.samples,
        "skipped": r.skipped,
        "skip_reason": r.skip_reason,
        "witnesses": r.witnesses,
    })
}

fn report_text(r: &Report) -> String {
    let mut line = format!(
        "{} {}: worst defect {:.3e} (tolerance {:.1e}, {} cases, {} skipped)",
        if r.passed { "PASS" } else { "FAIL" },
        r.check_id,
        r.measured,
        r.tolerance,
        r.samples,
        r.skipped,
    );
    for w in &r.witnesses {
        line.push_str(&format!("\n  witness: {w}"));
    }
    line
}

/// Expressions from a user corpus file are paired with seeded points; the
/// derivative check itself skips any point where the bracket form is not
/// claimed.
fn file_corpus_cases(path: &std::path::Path, seed: u64) -> Result<Vec<CorpusCase>, Failure> {
    use rand::{Rng, SeedableRng};
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut cases = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (f, _) = ivexpand::parse(line, 64)
            .map_err(|e| Failure::input(format!("{} line {}: {e}", path.display(), lineno + 1)))?;
        let arity = f.expr().max_var().map_or(1, |m| m + 1);
        let f = Function::new(f.expr().clone(), arity).expect("variables fit the tight arity");
        for _ in 0..5 {
            let point: Vec<f64> = (0..arity).map(|_| rng.gen_range(-1.5..1.5)).collect();
            cases.push(CorpusCase { f: f.clone(), point });
        }
    }
    Ok(cases)
}

fn cmd_check(
    seed: u64,
    cases: usize,
    corpus: Option<&std::path::Path>,
    format: Format,
) -> Result<ExitCode, Failure> {
    let mut reports = run_closed_form_suite();

    let mut gen = CorpusGen::new(seed);
    let bracket: Vec<CorpusCase> = (0..cases).map(|_| gen.next_case()).collect();
    reports.push(check_bracket_theorem(&bracket, 1e-6));

    let mvt: Vec<_> = (0..cases / 2).map(|_| gen.next_mvt_case()).collect();
    reports.push(check_mvt(&mvt, 1e-9));

    let chain: Vec<AlgebraInput> = (0..cases / 8)
        .map(|_| AlgebraInput::from_chain_case(&gen.next_chain_case()))
        .collect();
    reports.push(check_algebra_rules("chain-rule-corpus", &chain, 1e-6));

    let product: Vec<AlgebraInput> = (0..cases / 8)
        .map(|_| AlgebraInput::from_product_case(&gen.next_product_case()))
        .collect();
    reports.push(check_algebra_rules("product-rule-corpus", &product, 1e-6));

    if let Some(path) = corpus {
        let file_cases = file_corpus_cases(path, seed)?;
        reports.push(check_bracket_theorem(&file_cases, 1e-6));
    }

    let failed = reports.iter().filter(|r| !r.passed).count();
    match format {
        Format::Json => {
            let doc = json!({
                "command": "check",
                "input": {"seed": seed, "cases": cases},
                "result": {
                    "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
                    "failed": failed,
                },
                "warnings": [],
            });
            out(jsonout::render(&doc));
        }
        Format::Text => {
            for r in &reports {
                out(report_text(r));
            }
            out(format!(
                "{} of {} checks passed (seed {seed:#x})",
                reports.len() - failed,
                reports.len()
            ));
        }
    }
    if failed > 0 {
        Ok(ExitCode::from(4))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

// Keep the default seed visible in --help output and in sync with the
// library constant.
#[cfg(test)]
mod tests {
    use super::*;
    use ivexpand::verify::corpus::CORPUS_SEED;

    #[test]
    fn default_seed_matches_library() {
        assert_eq!(parse_seed("0x5EED").unwrap(), CORPUS_SEED);
    }

    #[test]
    fn seed_parses_decimal_and_hex() {
        assert_eq!(parse_seed("24301").unwrap(), 0x5EED);
        assert_eq!(parse_seed("0X10").unwrap(), 16);
        assert!(parse_seed("zz").is_err());
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(7.3890560989), "7.38906");
        assert_eq!(fmt_g(20084.7), "20084.7");
        assert_eq!(fmt_g(1.5e-9), "1.50000e-9");
    }

    #[test]
    fn cli_declares_all_subcommands() {
        use clap::CommandFactory;
        let cmd = Cli::command();
        let names: Vec<_> = cmd.get_subcommands().map(|c| c.get_name().to_string()).collect();
        for want in ["eval", "diff", "grad", "hess", "mono", "expand", "check"] {
            assert!(names.iter().any(|n| n == want), "missing subcommand {want}");
        }
    }
}
