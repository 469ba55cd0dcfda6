//! Expression language for interval-valued functions.
//!
//! Grammar (whitespace insignificant, `*` required, no implicit products):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := base ("^" INT)?
//! base   := NUMBER | "[" NUMBER "," NUMBER "]" | VAR
//!         | FUNC "(" expr ")" | "ghdiff" "(" expr "," expr ")" | "(" expr ")"
//! VAR    := "x" INT | "t"            (t is shorthand for x1)
//! FUNC   := "exp" | "ln" | "sqrt"
//! ```
//!
//! `+` and `*` are the Minkowski sum and the exact interval product; `-` is
//! the Minkowski difference `a ⊕ (-1)⊙b`, not the gH-difference, which has
//! its own named form `ghdiff(a, b)`. `^` binds tighter than `*`, which
//! binds tighter than `+`/`-`; the additive and multiplicative operators
//! associate to the left. Numbers may carry a sign where an operand is
//! expected. An interval literal written with reversed bounds is accepted,
//! normalized, and reported as a warning.

use std::fmt;

use crate::interval::{Interval, UnaryFn};

/// Expression tree. Variables are stored zero-based; the surface syntax
/// `x1..xN` is one-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Real(f64),
    Lit(Interval),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Unary(UnaryFn, Box<Expr>),
    GhDiff(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn pow(self, k: u32) -> Expr {
        Expr::Pow(Box::new(self), k)
    }

    pub fn exp(self) -> Expr {
        Expr::Unary(UnaryFn::Exp, Box::new(self))
    }

    pub fn ln(self) -> Expr {
        Expr::Unary(UnaryFn::Ln, Box::new(self))
    }

    pub fn sqrt(self) -> Expr {
        Expr::Unary(UnaryFn::Sqrt, Box::new(self))
    }

    pub fn gh(self, rhs: Expr) -> Expr {
        Expr::GhDiff(Box::new(self), Box::new(rhs))
    }

    /// Largest zero-based variable index used, if any variable occurs.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Real(_) | Expr::Lit(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::GhDiff(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Pow(a, _) | Expr::Unary(_, a) => a.max_var(),
        }
    }

    /// Whether every interval literal in the tree is degenerate, i.e. the
    /// expression is real-valued by construction.
    pub fn is_real_valued(&self) -> bool {
        match self {
            Expr::Real(_) | Expr::Var(_) => true,
            Expr::Lit(iv) => iv.is_degenerate(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::GhDiff(a, b) => {
                a.is_real_valued() && b.is_real_valued()
            }
            Expr::Pow(a, _) | Expr::Unary(_, a) => a.is_real_valued(),
        }
    }

    /// Replaces every `Var(i)` with `subs[i]`. Returns `None` when a
    /// variable index has no substitute.
    pub fn substitute(&self, subs: &[Expr]) -> Option<Expr> {
        Some(match self {
            Expr::Real(v) => Expr::Real(*v),
            Expr::Lit(iv) => Expr::Lit(*iv),
            Expr::Var(i) => subs.get(*i)?.clone(),
            Expr::Add(a, b) => a.substitute(subs)?.add(b.substitute(subs)?),
            Expr::Sub(a, b) => a.substitute(subs)?.sub(b.substitute(subs)?),
            Expr::Mul(a, b) => a.substitute(subs)?.mul(b.substitute(subs)?),
            Expr::Pow(a, k) => a.substitute(subs)?.pow(*k),
            Expr::Unary(f, a) => Expr::Unary(*f, Box::new(a.substitute(subs)?)),
            Expr::GhDiff(a, b) => a.substitute(subs)?.gh(b.substitute(subs)?),
        })
    }
}

/// An expression together with the declared number of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    ast: Expr,
    arity: usize,
}

impl Function {
    /// Pairs an expression with its arity, checking every variable index.
    pub fn new(ast: Expr, arity: usize) -> Result<Function, ParseError> {
        if arity == 0 {
            return Err(ParseError::InvalidArity);
        }
        if let Some(max) = ast.max_var() {
            if max >= arity {
                return Err(ParseError::VarOutOfRange { var: max + 1, arity, line: 0, col: 0 });
            }
        }
        Ok(Function { ast, arity })
    }

    pub fn expr(&self) -> &Expr {
        &self.ast
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

/// Substitutes the inner functions for the outer function's variables.
/// `outer` must take exactly `inners.len()` variables and all inner
/// functions must share one arity.
pub fn compose(outer: &Function, inners: &[Function]) -> Option<Function> {
    if outer.arity() != inners.len() || inners.is_empty() {
        return None;
    }
    let m = inners[0].arity();
    if inners.iter().any(|g| g.arity() != m) {
        return None;
    }
    let subs: Vec<Expr> = inners.iter().map(|g| g.expr().clone()).collect();
    let ast = outer.expr().substitute(&subs)?;
    Function::new(ast, m).ok()
}

// Printing uses binding strengths: additive 1, multiplicative 2, power 3,
// atoms 4. A child is parenthesized when its strength is below the context
// requirement, which reproduces the left-associative parse exactly.
fn strength(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

fn fmt_prec(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wrap = strength(e) < min;
    if wrap {
        write!(f, "(")?;
    }
    match e {
        Expr::Real(v) => {
            if *v < 0.0 || v.is_sign_negative() {
                write!(f, "({:?})", v)?;
            } else {
                write!(f, "{:?}", v)?;
            }
        }
        Expr::Lit(iv) => write!(f, "{iv}")?,
        Expr::Var(i) => write!(f, "x{}", i + 1)?,
        Expr::Add(a, b) => {
            fmt_prec(a, 1, f)?;
            write!(f, "+")?;
            fmt_prec(b, 2, f)?;
        }
        Expr::Sub(a, b) => {
            fmt_prec(a, 1, f)?;
            write!(f, "-")?;
            fmt_prec(b, 2, f)?;
        }
        Expr::Mul(a, b) => {
            fmt_prec(a, 2, f)?;
            write!(f, "*")?;
            fmt_prec(b, 3, f)?;
        }
        Expr::Pow(a, k) => {
            fmt_prec(a, 4, f)?;
            write!(f, "^{k}")?;
        }
        Expr::Unary(func, a) => {
            write!(f, "{}(", func.name())?;
            fmt_prec(a, 1, f)?;
            write!(f, ")")?;
        }
        Expr::GhDiff(a, b) => {
            write!(f, "ghdiff(")?;
            fmt_prec(a, 1, f)?;
            write!(f, ",")?;
            fmt_prec(b, 1, f)?;
            write!(f, ")")?;
        }
    }
    if wrap {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 1, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    Syntax { line: u32, col: u32, message: String },
    VarOutOfRange { var: usize, arity: usize, line: u32, col: u32 },
    InvalidArity,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { line, col, message } => {
                write!(f, "syntax error at {line}:{col}: {message}")
            }
            ParseError::VarOutOfRange { var, arity, line, col } => {
                write!(f, "variable x{var} at {line}:{col} exceeds arity {arity}")
            }
            ParseError::InvalidArity => write!(f, "arity must be at least 1"),
        }
    }
}

impl std::error::Error for ParseError {}

/// Non-fatal findings produced while parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseWarning {
    /// An interval literal was written `[hi, lo]` and has been sorted.
    IntervalNormalized { line: u32, col: u32, given_lo: f64, given_hi: f64 },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::IntervalNormalized { line, col, given_lo, given_hi } => write!(
                f,
                "interval literal at {line}:{col} has reversed bounds [{given_lo},{given_hi}]; normalized to [{given_hi},{given_lo}]"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { text: String, value: f64 },
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { text, .. } => format!("number `{text}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let step = |i: &mut usize, col: &mut u32| {
            *i += 1;
            *col += 1;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => step(&mut i, &mut col),
            '+' => {
                out.push(Spanned { tok: Tok::Plus, line: tline, col: tcol });
                step(&mut i, &mut col);
            }
            '-' => {
                out.push(Spanned { tok: Tok::Minus, line: tline, col: tcol });
                step(&mut i, &mut col);
            }
            '*' => {
                out.push(Spanned { tok: Tok::Star, line: tline, col: tcol });
                step(&mut i, &mut col);
            }
            '^' => {
                out.push(Spanned { tok: Tok::Caret, line: tline, col: tcol });
                step(&mut i, &mut col);
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, line: tline, col: tcol });
                step(&mut i, &mut col);
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, line: tline, col: tcol });
                step(&mut i, &mut col);
            }
            '[' => {
                out.push(Spanned { tok: Tok::LBracket, line: tline, col: tcol });
                step(&mut i, &mut col);
            }
            ']' => {
                out.push(Spanned { tok: Tok::RBracket, line: tline, col: tcol });
                step(&mut i, &mut col);
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, line: tline, col: tcol });
                step(&mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    step(&mut i, &mut col);
                }
                if i < chars.len() && chars[i] == '.' {
                    step(&mut i, &mut col);
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        step(&mut i, &mut col);
                    }
                }
                // An exponent marker counts only when digits (optionally
                // signed) follow; otherwise `2exp(..)` would lex wrong.
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while i < j {
                            step(&mut i, &mut col);
                        }
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            step(&mut i, &mut col);
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    message: format!("malformed number `{text}`"),
                })?;
                if !value.is_finite() {
                    return Err(ParseError::Syntax {
                        line: tline,
                        col: tcol,
                        message: format!("number `{text}` out of range"),
                    });
                }
                out.push(Spanned { tok: Tok::Num { text, value }, line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    step(&mut i, &mut col);
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(text), line: tline, col: tcol });
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    arity: usize,
    warnings: Vec<ParseWarning>,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, at: &Spanned, message: String) -> ParseError {
        ParseError::Syntax { line: at.line, col: at.col, message }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Spanned, ParseError> {
        let t = self.bump();
        if std::mem::discriminant(&t.tok) == std::mem::discriminant(&want) {
            Ok(t)
        } else {
            Err(self.err(&t, format!("expected {what}, found {}", t.tok.describe())))
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(self.parse_term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(self.parse_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.parse_factor()?;
        while matches!(self.peek().tok, Tok::Star) {
            self.bump();
            acc = acc.mul(self.parse_factor()?);
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_base()?;
        if matches!(self.peek().tok, Tok::Caret) {
            self.bump();
            let t = self.bump();
            let k = match &t.tok {
                Tok::Num { text, .. } if !text.contains(['.', 'e', 'E']) => {
                    text.parse::<u32>().ok().filter(|k| *k <= 65_535).ok_or_else(|| {
                        self.err(&t, format!("exponent `{text}` too large"))
                    })?
                }
                other => {
                    return Err(self.err(
                        &t,
                        format!("exponent must be a nonnegative integer, found {}", other.describe()),
                    ));
                }
            };
            Ok(base.pow(k))
        } else {
            Ok(base)
        }
    }

    /// A number where an operand is expected, with an optional sign.
    fn parse_signed_number(&mut self) -> Result<f64, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Num { value, .. } => Ok(*value),
            Tok::Minus => match self.bump() {
                Spanned { tok: Tok::Num { value, .. }, .. } => Ok(-value),
                other => Err(self.err(&other, format!("expected number after `-`, found {}", other.tok.describe()))),
            },
            Tok::Plus => match self.bump() {
                Spanned { tok: Tok::Num { value, .. }, .. } => Ok(value),
                other => Err(self.err(&other, format!("expected number after `+`, found {}", other.tok.describe()))),
            },
            other => Err(self.err(&t, format!("expected number, found {}", other.describe()))),
        }
    }

    fn parse_base(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num { .. } | Tok::Minus | Tok::Plus => {
                let v = self.parse_signed_number()?;
                Ok(Expr::Real(v))
            }
            Tok::LBracket => {
                self.bump();
                let a = self.parse_signed_number()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.parse_signed_number()?;
                self.expect(Tok::RBracket, "`]`")?;
                if a > b {
                    self.warnings.push(ParseWarning::IntervalNormalized {
                        line: t.line,
                        col: t.col,
                        given_lo: a,
                        given_hi: b,
                    });
                }
                let iv = Interval::bracket(a, b).map_err(|e| self.err(&t, e.to_string()))?;
                Ok(Expr::Lit(iv))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "t" => self.var_ref(1, &t),
                    "exp" | "ln" | "sqrt" => {
                        let func = match name.as_str() {
                            "exp" => UnaryFn::Exp,
                            "ln" => UnaryFn::Ln,
                            _ => UnaryFn::Sqrt,
                        };
                        self.expect(Tok::LParen, "`(`")?;
                        let arg = self.parse_expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Expr::Unary(func, Box::new(arg)))
                    }
                    "ghdiff" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let a = self.parse_expr()?;
                        self.expect(Tok::Comma, "`,`")?;
                        let b = self.parse_expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(a.gh(b))
                    }
                    other if other.starts_with('x') && other[1..].chars().all(|c| c.is_ascii_digit()) && other.len() > 1 => {
                        let idx: usize = other[1..].parse().map_err(|_| {
                            self.err(&t, format!("variable index in `{other}` too large"))
                        })?;
                        self.var_ref(idx, &t)
                    }
                    other => Err(self.err(&t, format!("unknown identifier `{other}`"))),
                }
            }
            other => Err(self.err(&t, format!("expected expression, found {}", other.describe()))),
        }
    }

    fn var_ref(&self, one_based: usize, at: &Spanned) -> Result<Expr, ParseError> {
        if one_based == 0 {
            return Err(self.err(at, "variable indices start at x1".into()));
        }
        if one_based > self.arity {
            return Err(ParseError::VarOutOfRange {
                var: one_based,
                arity: self.arity,
                line: at.line,
                col: at.col,
            });
        }
        Ok(Expr::Var(one_based - 1))
    }
}

/// Parses an expression over `arity` variables. Returns the function and
/// any normalization warnings.
pub fn parse(text: &str, arity: usize) -> Result<(Function, Vec<ParseWarning>), ParseError> {
    if arity == 0 {
        return Err(ParseError::InvalidArity);
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, arity, warnings: Vec::new() };
    let ast = p.parse_expr()?;
    let trailing = p.peek().clone();
    if !matches!(trailing.tok, Tok::Eof) {
        return Err(p.err(&trailing, format!("unexpected trailing {}", trailing.tok.describe())));
    }
    let func = Function::new(ast, arity)?;
    Ok((func, p.warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, arity: usize) -> Expr {
        parse(text, arity).unwrap().0.ast
    }

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn variables_and_shorthand() {
        assert_eq!(p("x1", 1), Expr::Var(0));
        assert_eq!(p("t", 1), Expr::Var(0));
        assert_eq!(p("x3", 3), Expr::Var(2));
        assert_eq!(p("t", 2), Expr::Var(0));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            p("x1+x2*x1^2", 2),
            Expr::Var(0).add(Expr::Var(1).mul(Expr::Var(0).pow(2)))
        );
        assert_eq!(p("x1-x2-x1", 2), Expr::Var(0).sub(Expr::Var(1)).sub(Expr::Var(0)));
        assert_eq!(p("x1*x2*x1", 2), Expr::Var(0).mul(Expr::Var(1)).mul(Expr::Var(0)));
        assert_eq!(p("(x1+x2)*x1", 2), Expr::Var(0).add(Expr::Var(1)).mul(Expr::Var(0)));
        assert_eq!(p("(x1^2)^3", 1), Expr::Var(0).pow(2).pow(3));
    }

    #[test]
    fn literals_and_functions() {
        assert_eq!(p("[-1,2]*x1", 1), Expr::Lit(iv(-1.0, 2.0)).mul(Expr::Var(0)));
        assert_eq!(p("exp([-1,2]*t)", 1), Expr::Lit(iv(-1.0, 2.0)).mul(Expr::Var(0)).exp());
        assert_eq!(p("ghdiff(x1,x2)", 2), Expr::Var(0).gh(Expr::Var(1)));
        assert_eq!(p("sqrt(x1)", 1), Expr::Var(0).sqrt());
        assert_eq!(p("ln(x1)", 1), Expr::Var(0).ln());
        assert_eq!(p("2.5e2", 1), Expr::Real(250.0));
        assert_eq!(p("1e-3", 1), Expr::Real(1e-3));
        assert_eq!(p("-3", 1), Expr::Real(-3.0));
        assert_eq!(p("2*exp(x1)", 1), Expr::Real(2.0).mul(Expr::Var(0).exp()));
        assert_eq!(p("[1.5e0,2.5e0]", 1), Expr::Lit(iv(1.5, 2.5)));
    }

    #[test]
    fn reversed_interval_literal_is_normalized_with_warning() {
        let (f, warns) = parse("[2,-1]*x1", 1).unwrap();
        assert_eq!(f.expr(), &Expr::Lit(iv(-1.0, 2.0)).mul(Expr::Var(0)));
        assert_eq!(warns.len(), 1);
        assert!(matches!(
            warns[0],
            ParseWarning::IntervalNormalized { line: 1, col: 1, .. }
        ));
        let (_, clean) = parse("[-1,2]*x1", 1).unwrap();
        assert!(clean.is_empty());
    }

    #[test]
    fn signed_numbers_only_where_operands_start() {
        assert_eq!(p("x1--3", 1), Expr::Var(0).sub(Expr::Real(-3.0)));
        assert_eq!(p("3*-2", 1), Expr::Real(3.0).mul(Expr::Real(-2.0)));
        assert!(parse("-x1", 1).is_err());
        assert!(parse("x1^-2", 1).is_err());
    }

    #[test]
    fn error_positions() {
        match parse("x1 +\n* x2", 2) {
            Err(ParseError::Syntax { line: 2, col: 1, .. }) => {}
            other => panic!("expected syntax error at 2:1, got {other:?}"),
        }
        match parse("x3", 2) {
            Err(ParseError::VarOutOfRange { var: 3, arity: 2, line: 1, col: 1 }) => {}
            other => panic!("expected var range error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(parse("", 1).is_err());
        assert!(parse("x1 +", 1).is_err());
        assert!(parse("(x1", 1).is_err());
        assert!(parse("foo(x1)", 1).is_err());
        assert!(parse("x1^2.5", 1).is_err());
        assert!(parse("x0", 1).is_err());
        assert!(parse("[1,2", 1).is_err());
        assert!(parse("1e999", 1).is_err());
        assert!(parse("x1 x2", 2).is_err());
        assert!(parse("ghdiff(x1)", 1).is_err());
        assert!(parse("exp(x1,x2)", 2).is_err());
        assert!(parse("x1 ? 2", 1).is_err());
        assert!(parse("x1", 0).is_err());
        assert!(parse("x1^70000", 1).is_err());
    }

    #[test]
    fn composition_substitutes_variables() {
        let outer = parse("x1+[0,1]*x2", 2).unwrap().0;
        let inner1 = parse("t^2", 1).unwrap().0;
        let inner2 = parse("t^3", 1).unwrap().0;
        let composed = compose(&outer, &[inner1, inner2]).unwrap();
        assert_eq!(composed.arity(), 1);
        assert_eq!(
            composed.expr(),
            &Expr::Var(0).pow(2).add(Expr::Lit(iv(0.0, 1.0)).mul(Expr::Var(0).pow(3)))
        );
        let bad = parse("x1", 1).unwrap().0;
        assert!(compose(&outer, &[bad]).is_none());
    }

    #[test]
    fn real_valuedness_is_structural() {
        assert!(p("x1^2+3", 1).is_real_valued());
        assert!(p("[2,2]*x1", 1).is_real_valued());
        assert!(!p("[1,2]*x1", 1).is_real_valued());
        assert!(!p("exp([0,1]*x1)", 1).is_real_valued());
    }

    #[test]
    fn display_examples() {
        assert_eq!(p("x1 + x2 * x1 ^ 2", 2).to_string(), "x1+x2*x1^2");
        assert_eq!(p("(x1+x2)*x1", 2).to_string(), "(x1+x2)*x1");
        assert_eq!(p("ghdiff(x1, [1,2])", 1).to_string(), "ghdiff(x1,[1.0,2.0])");
        assert_eq!(p("x1--3", 1).to_string(), "x1-(-3.0)");
        assert_eq!(p("exp([-1,2]*t)", 1).to_string(), "exp([-1.0,2.0]*x1)");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_expr(vars: usize) -> impl Strategy<Value = Expr> {
            let leaf = prop_oneof![
                (-100.0f64..100.0).prop_map(Expr::Real),
                (0..vars).prop_map(Expr::Var),
                (-10.0f64..10.0, -10.0f64..10.0)
                    .prop_map(|(a, b)| Expr::Lit(Interval::bracket(a, b).unwrap())),
            ];
            leaf.prop_recursive(4, 48, 3, |inner| {
                prop_oneof![
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
                    (inner.clone(), 0u32..6).prop_map(|(a, k)| a.pow(k)),
                    inner.clone().prop_map(|a| a.exp()),
                    inner.clone().prop_map(|a| a.ln()),
                    inner.clone().prop_map(|a| a.sqrt()),
                    (inner.clone(), inner).prop_map(|(a, b)| a.gh(b)),
                ]
            })
        }

        proptest! {
            #[test]
            fn print_parse_roundtrip(e in arb_expr(3)) {
                let text = e.to_string();
                let (f, warns) = parse(&text, 3).expect("printed form must reparse");
                prop_assert_eq!(f.expr(), &e, "text was: {}", text);
                prop_assert!(warns.is_empty());
            }
        }
    }
}
