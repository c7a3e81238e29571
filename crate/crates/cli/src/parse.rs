//! Map expressions: `z`, Gaussian-rational literals, named parameters,
//! `+ - * / ^`, parentheses and unary minus.
//!
//! Precedence from tightest: `^` (right-associative, nonnegative integer
//! exponent), unary `-`, `* /`, `+ -`. A number directly followed by `i` is
//! imaginary, and `3/2i` is the single literal `(3/2)·i`.

use std::collections::BTreeMap;
use std::fmt;

use deckmap::algebra::{ComplexPoly, GaussianRational};
use deckmap::ratmap::RationalMap;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnboundParameter(String),
    ZeroDenominator,
    BadExponent(String),
    Constant,
}

/// Error with the byte offset in the source where it was detected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

impl ParseError {
    fn new(kind: ParseErrorKind, position: usize) -> Self {
        ParseError { kind, position }
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax(_) => "syntax-error",
            ParseErrorKind::UnboundParameter(_) => "unbound-parameter",
            ParseErrorKind::ZeroDenominator => "zero-denominator",
            ParseErrorKind::BadExponent(_) => "bad-exponent",
            ParseErrorKind::Constant => "constant-map",
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error at {}: {m}", self.position),
            ParseErrorKind::UnboundParameter(p) => write!(f, "unbound parameter `{p}` at {}", self.position),
            ParseErrorKind::ZeroDenominator => write!(f, "division by zero at {}", self.position),
            ParseErrorKind::BadExponent(m) => write!(f, "bad exponent at {}: {m}", self.position),
            ParseErrorKind::Constant => write!(f, "expression is constant, not a map"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(GaussianRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

impl<'a> Lexer<'a> {
    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    /// `digits[.digits]`, returning the text.
    fn decimal(&mut self) -> Result<&'a str, ParseError> {
        let start = self.pos;
        self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            if self.digits() == 0 {
                return Err(ParseError::new(ParseErrorKind::Syntax("digits expected after `.`".into()), self.pos));
            }
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    /// An `i` that ends a literal, not the start of an identifier.
    fn imaginary_suffix_at(&self, p: usize) -> bool {
        self.src.get(p) == Some(&b'i') && !self.src.get(p + 1).is_some_and(|&b| is_ident_byte(b))
    }

    fn number(&mut self) -> Result<GaussianRational, ParseError> {
        let start = self.pos;
        let text = self.decimal()?;
        let value: GaussianRational =
            text.parse().map_err(|_| ParseError::new(ParseErrorKind::Syntax(format!("bad number `{text}`")), start))?;
        // `a/bi` is one imaginary literal
        if self.src.get(self.pos) == Some(&b'/') {
            let save = self.pos;
            self.pos += 1;
            let dstart = self.pos;
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                let dtext = self.decimal()?;
                if self.imaginary_suffix_at(self.pos) {
                    let d: GaussianRational = dtext.parse().unwrap();
                    if d.is_zero() {
                        return Err(ParseError::new(ParseErrorKind::ZeroDenominator, dstart));
                    }
                    self.pos += 1;
                    return Ok(value / d * GaussianRational::i());
                }
            }
            self.pos = save;
        }
        if self.imaginary_suffix_at(self.pos) {
            self.pos += 1;
            return Ok(value * GaussianRational::i());
        }
        Ok(value)
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = self.src.get(self.pos) else { return Ok((Tok::End, start)) };
        let single = |t| Ok((t, start));
        match b {
            b'+' => {
                self.pos += 1;
                single(Tok::Plus)
            }
            b'-' => {
                self.pos += 1;
                single(Tok::Minus)
            }
            b'*' => {
                self.pos += 1;
                single(Tok::Star)
            }
            b'/' => {
                self.pos += 1;
                single(Tok::Slash)
            }
            b'^' => {
                self.pos += 1;
                single(Tok::Caret)
            }
            b'(' => {
                self.pos += 1;
                single(Tok::LParen)
            }
            b')' => {
                self.pos += 1;
                single(Tok::RParen)
            }
            b'0'..=b'9' | b'.' => Ok((Tok::Num(self.number()?), start)),
            _ if b.is_ascii_alphabetic() || b == b'_' => {
                while self.pos < self.src.len() && is_ident_byte(self.src[self.pos]) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                Ok((Tok::Ident(name), start))
            }
            _ => {
                let ch = std::str::from_utf8(&self.src[start..]).ok().and_then(|s| s.chars().next()).unwrap_or('?');
                Err(ParseError::new(ParseErrorKind::Syntax(format!("unexpected character `{ch}`")), start))
            }
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
    let mut out = Vec::new();
    loop {
        let t = lx.next()?;
        let end = t.0 == Tok::End;
        out.push(t);
        if end {
            return Ok(out);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Z,
    Num(GaussianRational),
    Param { name: String, pos: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div { lhs: Box<Expr>, rhs: Box<Expr>, pos: usize },
    Pow(Box<Expr>, u32),
}

const UNARY_BP: u8 = 5;

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.i].clone();
        if t.0 != Tok::End {
            self.i += 1;
        }
        t
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            Tok::Num(v) => format!("`{v}`"),
            Tok::Ident(n) => format!("`{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        };
        ParseError::new(ParseErrorKind::Syntax(format!("expected {what}, found {found}")), self.pos())
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let (t, pos) = self.bump();
        let base = match t {
            Tok::Num(v) => {
                let ok = v.im.is_zero() && v.re.is_integer() && !v.re.is_negative();
                if !ok {
                    return Err(ParseError::new(ParseErrorKind::BadExponent(format!("`{v}` is not a nonnegative integer")), pos));
                }
                u32::try_from(v.re.to_integer())
                    .map_err(|_| ParseError::new(ParseErrorKind::BadExponent("exponent too large".into()), pos))?
            }
            Tok::Minus => {
                return Err(ParseError::new(ParseErrorKind::BadExponent("negative exponent".into()), pos));
            }
            _ => {
                return Err(ParseError::new(ParseErrorKind::BadExponent("integer literal expected".into()), pos));
            }
        };
        if *self.peek() == Tok::Caret {
            let cpos = self.pos();
            self.bump();
            let e = self.exponent()?;
            return base
                .checked_pow(e)
                .ok_or_else(|| ParseError::new(ParseErrorKind::BadExponent("exponent too large".into()), cpos));
        }
        Ok(base)
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let (t, pos) = self.bump();
        let mut lhs = match t {
            Tok::Num(v) => Expr::Num(v),
            Tok::Ident(name) => match name.as_str() {
                "z" => Expr::Z,
                "i" => Expr::Num(GaussianRational::i()),
                _ => Expr::Param { name, pos },
            },
            Tok::Minus => Expr::Neg(Box::new(self.expr(UNARY_BP)?)),
            Tok::LParen => {
                let e = self.expr(0)?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                e
            }
            _ => {
                self.i -= usize::from(t != Tok::End);
                return Err(self.unexpected("an operand"));
            }
        };
        loop {
            let (lbp, rbp) = match self.peek() {
                Tok::Plus | Tok::Minus => (1, 2),
                Tok::Star | Tok::Slash => (3, 4),
                Tok::Caret => (7, 6),
                Tok::End | Tok::RParen => break,
                _ => return Err(self.unexpected("an operator")),
            };
            if lbp < min_bp {
                break;
            }
            let (op, opos) = self.bump();
            lhs = match op {
                Tok::Caret => Expr::Pow(Box::new(lhs), self.exponent()?),
                Tok::Plus => Expr::Add(Box::new(lhs), Box::new(self.expr(rbp)?)),
                Tok::Minus => Expr::Sub(Box::new(lhs), Box::new(self.expr(rbp)?)),
                Tok::Star => Expr::Mul(Box::new(lhs), Box::new(self.expr(rbp)?)),
                Tok::Slash => Expr::Div { lhs: Box::new(lhs), rhs: Box::new(self.expr(rbp)?), pos: opos },
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, i: 0 };
    let e = p.expr(0)?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(e)
}

/// Reduced quotient of polynomials.
#[derive(Clone)]
struct Frac {
    num: ComplexPoly,
    den: ComplexPoly,
}

impl Frac {
    fn reduced(num: ComplexPoly, den: ComplexPoly) -> Frac {
        if num.is_zero() {
            return Frac { num, den: ComplexPoly::one() };
        }
        match ComplexPoly::gcd(&num, &den) {
            Ok(g) if !g.is_constant() => Frac {
                num: num.exact_div(&g).expect("gcd divides"),
                den: den.exact_div(&g).expect("gcd divides"),
            },
            _ => Frac { num, den },
        }
    }

    fn constant(c: GaussianRational) -> Frac {
        Frac { num: ComplexPoly::constant(c), den: ComplexPoly::one() }
    }
}

fn eval(e: &Expr, params: &BTreeMap<String, GaussianRational>) -> Result<Frac, ParseError> {
    Ok(match e {
        Expr::Z => Frac { num: ComplexPoly::z(), den: ComplexPoly::one() },
        Expr::Num(v) => Frac::constant(v.clone()),
        Expr::Param { name, pos } => match params.get(name) {
            Some(v) => Frac::constant(v.clone()),
            None => return Err(ParseError::new(ParseErrorKind::UnboundParameter(name.clone()), *pos)),
        },
        Expr::Neg(a) => {
            let a = eval(a, params)?;
            Frac { num: -&a.num, den: a.den }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (a, b) = (eval(a, params)?, eval(b, params)?);
            let l = &a.num * &b.den;
            let r = &b.num * &a.den;
            let num = if matches!(e, Expr::Add(..)) { &l + &r } else { &l - &r };
            Frac::reduced(num, &a.den * &b.den)
        }
        Expr::Mul(a, b) => {
            let (a, b) = (eval(a, params)?, eval(b, params)?);
            Frac::reduced(&a.num * &b.num, &a.den * &b.den)
        }
        Expr::Div { lhs, rhs, pos } => {
            let (a, b) = (eval(lhs, params)?, eval(rhs, params)?);
            if b.num.is_zero() {
                return Err(ParseError::new(ParseErrorKind::ZeroDenominator, *pos));
            }
            Frac::reduced(&a.num * &b.den, &a.den * &b.num)
        }
        Expr::Pow(a, n) => {
            let a = eval(a, params)?;
            Frac { num: a.num.pow(*n), den: a.den.pow(*n) }
        }
    })
}

/// Parses `src` into an exact map in canonical form, substituting `params`.
pub fn parse_map(src: &str, params: &BTreeMap<String, GaussianRational>) -> Result<RationalMap, ParseError> {
    let e = parse_expr(src)?;
    let f = eval(&e, params)?;
    let map = RationalMap::new(f.num, f.den).map_err(|_| ParseError::new(ParseErrorKind::ZeroDenominator, 0))?;
    if map.degree() == 0 {
        return Err(ParseError::new(ParseErrorKind::Constant, 0));
    }
    Ok(map)
}

/// Parses `name=value` with `value` a Gaussian-rational literal expression such as `3/5`, `-2+i` or `1/4i`.
pub fn parse_binding(s: &str) -> Result<(String, GaussianRational), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let name = name.trim();
    if name.is_empty() || !name.bytes().all(is_ident_byte) || name == "z" || name == "i" {
        return Err(format!("bad parameter name `{name}`"));
    }
    let e = parse_expr(value).map_err(|e| e.to_string())?;
    let f = eval(&e, &BTreeMap::new()).map_err(|e| e.to_string())?;
    if !f.num.is_constant() || !f.den.is_constant() {
        return Err(format!("parameter `{name}` must be a constant"));
    }
    let num = f.num.coeff(0);
    let den = f.den.coeff(0);
    let value = if den.is_one() { num } else { num / den };
    Ok((name.to_string(), value))
}
