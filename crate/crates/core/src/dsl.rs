//! Expression language for Lagrangians `L(z, z̄, η, η̄)`.
//!
//! ```text
//! file    := letdecl* "L" "=" expr
//! letdecl := "let" IDENT "=" expr
//! expr    := expr ("+"|"-") term | term
//! term    := term ("*"|"/") factor | factor
//! factor  := base ("^" REAL)?
//! base    := "-" base | "(" expr ")" | CALL | IDENT | NUMBER | "i"
//! CALL    := ("exp"|"log"|"sqrt"|"conj"|"abs2"|"re"|"im") "(" expr ")"
//! ```
//!
//! `z1, z2` are the base coordinates and `e1, e2` the fiber coordinates;
//! `conj(..)` produces the barred variables. `#` starts a comment.

use std::fmt;

use num_complex::Complex64;

use crate::jet::{JetError, WJet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DslErrorKind {
    Lex,
    Parse,
    UnknownIdentifier,
    Arity,
    UnusedLet,
}

impl fmt::Display for DslErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DslErrorKind::Lex => "lex error",
            DslErrorKind::Parse => "parse error",
            DslErrorKind::UnknownIdentifier => "unknown identifier",
            DslErrorKind::Arity => "arity error",
            DslErrorKind::UnusedLet => "unused let",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{kind} at line {line}, column {col}: {message}")]
pub struct DslError {
    pub kind: DslErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

fn err(kind: DslErrorKind, pos: Pos, message: impl Into<String>) -> DslError {
    DslError {
        kind,
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Num(x) => format!("number {x}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Eq => "'='".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| err(DslErrorKind::Lex, pos, format!("malformed number '{text}'")))?;
            col += i - start;
            out.push((Tok::Num(v), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            _ => {
                return Err(err(
                    DslErrorKind::Lex,
                    pos,
                    format!("unexpected character '{c}'"),
                ))
            }
        };
        out.push((t, pos));
        i += 1;
        col += 1;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Conj,
    Abs2,
    Re,
    Im,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "conj" => Func::Conj,
            "abs2" => Func::Abs2,
            "re" => Func::Re,
            "im" => Func::Im,
            _ => return None,
        })
    }
}

/// Coordinate referenced by an expression: 0 = z1, 1 = z2, 2 = e1, 3 = e2.
pub const VAR_NAMES: [&str; 4] = ["z1", "z2", "e1", "e2"];

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Imag,
    Var(usize),
    Let(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl Expr {
    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Whether the expression mentions one of the given coordinates.
    pub fn uses_var(&self, vars: &[usize]) -> bool {
        let mut hit = false;
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                hit |= vars.contains(v);
            }
        });
        hit
    }
}

/// A validated program: `let` bindings in order, then the body for `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub lets: Vec<(String, Expr)>,
    pub body: Expr,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    lets: Vec<(String, Pos)>,
    used: Vec<bool>,
}

const RESERVED: [&str; 7] = ["z1", "z2", "e1", "e2", "i", "L", "let"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    #[allow(dead_code)]
    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Pos, DslError> {
        let (t, p) = self.bump();
        if t == want {
            Ok(p)
        } else {
            Err(err(
                DslErrorKind::Parse,
                p,
                format!("expected {what}, found {}", t.describe()),
            ))
        }
    }

    fn file(&mut self) -> Result<Program, DslError> {
        let mut lets = Vec::new();
        while matches!(self.peek(), Tok::Ident(s) if s == "let") {
            self.bump();
            let (t, p) = self.bump();
            let name = match t {
                Tok::Ident(s) => s,
                t => {
                    return Err(err(
                        DslErrorKind::Parse,
                        p,
                        format!("expected a name after 'let', found {}", t.describe()),
                    ))
                }
            };
            if RESERVED.contains(&name.as_str()) || Func::from_name(&name).is_some() {
                return Err(err(DslErrorKind::Parse, p, format!("'{name}' is reserved")));
            }
            if self.lets.iter().any(|(n, _)| *n == name) {
                return Err(err(
                    DslErrorKind::Parse,
                    p,
                    format!("'{name}' is already bound"),
                ));
            }
            self.expect(Tok::Eq, "'='")?;
            let e = self.expr()?;
            self.lets.push((name.clone(), p));
            self.used.push(false);
            lets.push((name, e));
        }
        let (t, p) = self.bump();
        if t != Tok::Ident("L".into()) {
            return Err(err(
                DslErrorKind::Parse,
                p,
                format!("expected 'L = ...', found {}", t.describe()),
            ));
        }
        self.expect(Tok::Eq, "'='")?;
        let body = self.expr()?;
        let (t, p) = self.bump();
        if t != Tok::Eof {
            return Err(err(
                DslErrorKind::Parse,
                p,
                format!("unexpected {} after the L expression", t.describe()),
            ));
        }
        for (k, u) in self.used.iter().enumerate() {
            if !u {
                let (name, p) = &self.lets[k];
                return Err(err(
                    DslErrorKind::UnusedLet,
                    *p,
                    format!("'{name}' is bound but never used"),
                ));
            }
        }
        Ok(Program { lets, body })
    }

    fn binary_rhs(&mut self, op_pos: Pos, op: &str, term: bool) -> Result<Expr, DslError> {
        if *self.peek() == Tok::Eof {
            return Err(err(
                DslErrorKind::Parse,
                op_pos,
                format!("operator '{op}' is missing its right operand"),
            ));
        }
        if term {
            self.term()
        } else {
            self.factor()
        }
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    let (_, p) = self.bump();
                    let rhs = self.binary_rhs(p, "+", true)?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    let (_, p) = self.bump();
                    let rhs = self.binary_rhs(p, "-", true)?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let (_, p) = self.bump();
                    let rhs = self.binary_rhs(p, "*", false)?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    let (_, p) = self.bump();
                    let rhs = self.binary_rhs(p, "/", false)?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, DslError> {
        let b = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(b);
        }
        let (_, cp) = self.bump();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            (Tok::Num(x), _) => Ok(Expr::Pow(Box::new(b), if neg { -x } else { x })),
            (Tok::Eof, _) => Err(err(DslErrorKind::Parse, cp, "'^' is missing its exponent")),
            (t, p) => Err(err(
                DslErrorKind::Parse,
                p,
                format!("exponent must be a real literal, found {}", t.describe()),
            )),
        }
    }

    fn base(&mut self) -> Result<Expr, DslError> {
        let (t, p) = self.bump();
        match t {
            Tok::Minus => Ok(Expr::Neg(Box::new(self.base()?))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Num(x) => Ok(Expr::Num(x)),
            Tok::Ident(name) => self.ident(name, p),
            t => Err(err(
                DslErrorKind::Parse,
                p,
                format!("expected an operand, found {}", t.describe()),
            )),
        }
    }

    fn ident(&mut self, name: String, p: Pos) -> Result<Expr, DslError> {
        if let Some(f) = Func::from_name(&name) {
            if *self.peek() != Tok::LParen {
                return Err(err(
                    DslErrorKind::Parse,
                    p,
                    format!("'{name}' must be called as {name}(...)"),
                ));
            }
            self.bump();
            let mut args = Vec::new();
            if *self.peek() != Tok::RParen {
                args.push(self.expr()?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
            }
            self.expect(Tok::RParen, "')'")?;
            if args.len() != 1 {
                return Err(err(
                    DslErrorKind::Arity,
                    p,
                    format!("'{name}' takes 1 argument, got {}", args.len()),
                ));
            }
            return Ok(Expr::Call(f, Box::new(args.pop().unwrap())));
        }
        if *self.peek() == Tok::LParen {
            return Err(err(
                DslErrorKind::UnknownIdentifier,
                p,
                format!("unknown function '{name}'"),
            ));
        }
        if name == "i" {
            return Ok(Expr::Imag);
        }
        if let Some(v) = VAR_NAMES.iter().position(|n| *n == name) {
            return Ok(Expr::Var(v));
        }
        if let Some(k) = self.lets.iter().position(|(n, _)| *n == name) {
            self.used[k] = true;
            return Ok(Expr::Let(k));
        }
        Err(err(
            DslErrorKind::UnknownIdentifier,
            p,
            format!("'{name}' is not defined"),
        ))
    }
}

/// Parses a full metric file.
pub fn parse_program(src: &str) -> Result<Program, DslError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
        lets: Vec::new(),
        used: Vec::new(),
    };
    p.file()
}

/// Parses a single expression in the base coordinates (no `let`, no fiber variables allowed
/// if `base_only`).
pub fn parse_expression(src: &str, base_only: bool) -> Result<Expr, DslError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
        lets: Vec::new(),
        used: Vec::new(),
    };
    let e = p.expr()?;
    let (t, pos) = p.bump();
    if t != Tok::Eof {
        return Err(err(
            DslErrorKind::Parse,
            pos,
            format!("unexpected {}", t.describe()),
        ));
    }
    if base_only && e.uses_var(&[2, 3]) {
        return Err(err(
            DslErrorKind::UnknownIdentifier,
            Pos { line: 1, col: 1 },
            "fiber coordinates e1, e2 are not allowed here",
        ));
    }
    Ok(e)
}

/// Arithmetic needed to evaluate a program.
pub trait DslValue: Clone {
    fn lift(&self, c: Complex64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, o: &Self) -> Result<Self, JetError>;
    fn conj(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Result<Self, JetError>;
    fn sqrt(&self) -> Result<Self, JetError>;
    fn powf(&self, p: f64) -> Result<Self, JetError>;
    fn powi(&self, n: i32) -> Result<Self, JetError>;
}

impl DslValue for WJet {
    fn lift(&self, c: Complex64) -> Self {
        WJet::constant(self.order(), c)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self, JetError> {
        self.div_jet(o)
    }
    fn conj(&self) -> Self {
        WJet::conj(self)
    }
    fn exp(&self) -> Self {
        WJet::exp(self)
    }
    fn ln(&self) -> Result<Self, JetError> {
        WJet::ln(self)
    }
    fn sqrt(&self) -> Result<Self, JetError> {
        WJet::sqrt(self)
    }
    fn powf(&self, p: f64) -> Result<Self, JetError> {
        WJet::powf(self, p)
    }
    fn powi(&self, n: i32) -> Result<Self, JetError> {
        WJet::powi(self, n)
    }
}

fn positive_real(v: Complex64, func: &'static str) -> Result<f64, JetError> {
    if v.re > 0.0 && v.im.abs() <= 1e-8 * v.re && v.re.is_finite() {
        Ok(v.re)
    } else {
        Err(JetError::Branch { func, value: v })
    }
}

/// Plain values on the real slice, where the barred variables are the conjugates.
impl DslValue for Complex64 {
    fn lift(&self, c: Complex64) -> Self {
        c
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self, JetError> {
        if o.norm() > 1e-300 {
            Ok(self / o)
        } else {
            Err(JetError::ZeroDivisor)
        }
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn ln(&self) -> Result<Self, JetError> {
        Ok(Complex64::new(positive_real(*self, "log")?.ln(), 0.0))
    }
    fn sqrt(&self) -> Result<Self, JetError> {
        Ok(Complex64::new(positive_real(*self, "sqrt")?.sqrt(), 0.0))
    }
    fn powf(&self, p: f64) -> Result<Self, JetError> {
        Ok(Complex64::new(positive_real(*self, "pow")?.powf(p), 0.0))
    }
    fn powi(&self, n: i32) -> Result<Self, JetError> {
        if n < 0 && self.norm() <= 1e-300 {
            return Err(JetError::ZeroDivisor);
        }
        Ok(Complex64::powi(self, n))
    }
}

impl Program {
    /// Evaluates `L` given values for `z1, z2, e1, e2`.
    pub fn eval<T: DslValue>(&self, vars: &[T; 4]) -> Result<T, JetError> {
        let mut bound: Vec<T> = Vec::with_capacity(self.lets.len());
        for (_, e) in &self.lets {
            let v = eval_expr(e, vars, &bound)?;
            bound.push(v);
        }
        eval_expr(&self.body, vars, &bound)
    }
}

/// Evaluates a free-standing expression (no let bindings).
pub fn eval_standalone<T: DslValue>(e: &Expr, vars: &[T; 4]) -> Result<T, JetError> {
    eval_expr(e, vars, &[])
}

fn eval_expr<T: DslValue>(e: &Expr, vars: &[T; 4], bound: &[T]) -> Result<T, JetError> {
    let one = vars[0].lift(Complex64::new(1.0, 0.0));
    Ok(match e {
        Expr::Num(x) => one.lift(Complex64::new(*x, 0.0)),
        Expr::Imag => one.lift(Complex64::new(0.0, 1.0)),
        Expr::Var(v) => vars[*v].clone(),
        Expr::Let(k) => bound[*k].clone(),
        Expr::Neg(a) => eval_expr(a, vars, bound)?.neg(),
        Expr::Add(a, b) => eval_expr(a, vars, bound)?.add(&eval_expr(b, vars, bound)?),
        Expr::Sub(a, b) => eval_expr(a, vars, bound)?.sub(&eval_expr(b, vars, bound)?),
        Expr::Mul(a, b) => eval_expr(a, vars, bound)?.mul(&eval_expr(b, vars, bound)?),
        Expr::Div(a, b) => eval_expr(a, vars, bound)?.div(&eval_expr(b, vars, bound)?)?,
        Expr::Pow(a, p) => {
            let x = eval_expr(a, vars, bound)?;
            if p.fract() == 0.0 && p.abs() <= 64.0 {
                x.powi(*p as i32)?
            } else {
                x.powf(*p)?
            }
        }
        Expr::Call(f, a) => {
            let x = eval_expr(a, vars, bound)?;
            match f {
                Func::Exp => x.exp(),
                Func::Log => x.ln()?,
                Func::Sqrt => x.sqrt()?,
                Func::Conj => x.conj(),
                Func::Abs2 => x.mul(&x.conj()),
                Func::Re => x.add(&x.conj()).mul(&one.lift(Complex64::new(0.5, 0.0))),
                Func::Im => x.sub(&x.conj()).mul(&one.lift(Complex64::new(0.0, -0.5))),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_euclidean() {
        let p = parse_program("L = e1*conj(e1) + e2*conj(e2)").unwrap();
        let v = p
            .eval(&[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(2.0, 0.0),
            ])
            .unwrap();
        assert_eq!(v, Complex64::new(6.0, 0.0));
    }

    #[test]
    fn let_bindings_and_comments() {
        let src = "# Antonelli-Shimada, sigma = 0\nlet s = 0\nL = exp(2*s) * sqrt(abs2(e1)^2 + abs2(e2)^2)";
        let p = parse_program(src).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let v = p.eval(&[one, one, one, one]).unwrap();
        assert!((v.re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dangling_operator_reports_its_position() {
        let e = parse_program("L = e1 +").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::Parse);
        assert_eq!((e.line, e.col), (1, 8));
    }

    #[test]
    fn error_kinds() {
        assert_eq!(
            parse_program("L = e1 $ e2").unwrap_err().kind,
            DslErrorKind::Lex
        );
        let e = parse_program("L = e1*q").unwrap_err();
        assert_eq!((e.kind, e.col), (DslErrorKind::UnknownIdentifier, 8));
        assert_eq!(
            parse_program("L = exp(e1, e2)").unwrap_err().kind,
            DslErrorKind::Arity
        );
        assert_eq!(
            parse_program("L = sqrt()").unwrap_err().kind,
            DslErrorKind::Arity
        );
        let e = parse_program("let a = 1\nlet b = 2\nL = a*abs2(e1)").unwrap_err();
        assert_eq!((e.kind, e.line, e.col), (DslErrorKind::UnusedLet, 2, 5));
        assert_eq!(parse_program("e1").unwrap_err().kind, DslErrorKind::Parse);
        assert_eq!(
            parse_program("let z1 = 2\nL = z1").unwrap_err().kind,
            DslErrorKind::Parse
        );
        assert_eq!(
            parse_program("L = foo(e1)").unwrap_err().kind,
            DslErrorKind::UnknownIdentifier
        );
    }

    #[test]
    fn exponent_and_unary_minus() {
        let p = parse_program("L = -e1^2").unwrap();
        let x = Complex64::new(3.0, 0.0);
        assert_eq!(p.eval(&[x, x, x, x]).unwrap(), Complex64::new(9.0, 0.0));
        let p = parse_program("L = e1^-1 + 2.5e-1 + i*0").unwrap();
        assert_eq!(
            p.eval(&[x, x, x, x]).unwrap(),
            Complex64::new(1.0 / 3.0 + 0.25, 0.0)
        );
    }

    #[test]
    fn re_and_im() {
        let p = parse_program("L = re(z1) + i*im(z1)").unwrap();
        let z = Complex64::new(0.3, -0.7);
        assert_eq!(p.eval(&[z, z, z, z]).unwrap(), z);
    }

    #[test]
    fn base_only_expressions() {
        assert!(parse_expression("log(1 - abs2(z1))", true).is_ok());
        assert!(parse_expression("abs2(e1)", true).is_err());
    }
}
