//! Text form of polynomials and rational functions.
//!
//! The grammar is the usual infix one: identifiers, integer literals,
//! `+ - * /`, unary minus, `^` with an integer exponent (`x^-2` and
//! `x^(-2)` are both accepted) and parentheses. Rational literals are written
//! as quotients, `3/4`. The tokenizer also knows the punctuation used by
//! session files so that front ends can reuse it.

use std::fmt::{self, Display, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::poly::{Monomial, MultiPoly};
use crate::ratfunc::RatFunc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn error(self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.col, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Arrow,
    /// `--` directly followed by a letter, as in `--order`.
    Flag(String),
    Eof,
}

impl Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Flag(s) => write!(f, "`--{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Splits `src` into tokens. `#` starts a comment that runs to the end of
/// the line. The result always ends with [`Tok::Eof`].
pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let advance = |n: usize, col: &mut usize, i: &mut usize| {
            *col += n;
            *i += n;
        };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut col, &mut i);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<BigInt>().expect("ascii digits");
            out.push(Token { tok: Tok::Int(n), pos });
            continue;
        }
        let next = chars.get(i + 1).copied();
        if c == '-' && next == Some('>') {
            out.push(Token { tok: Tok::Arrow, pos });
            advance(2, &mut col, &mut i);
            continue;
        }
        if c == '-' && next == Some('-') && chars.get(i + 2).is_some_and(|c| c.is_ascii_alphabetic()) {
            let start = i + 2;
            let mut j = start;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            out.push(Token { tok: Tok::Flag(chars[start..j].iter().collect()), pos });
            let n = j - i;
            advance(n, &mut col, &mut i);
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            _ => return Err(pos.error(format!("unexpected character `{c}`"))),
        };
        out.push(Token { tok, pos });
        advance(1, &mut col, &mut i);
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

/// Parsed expression; every node keeps the position where it starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt, Pos),
    Var(String, Pos),
    Neg(Box<Expr>, Pos),
    Add(Box<Expr>, Box<Expr>, Pos),
    Sub(Box<Expr>, Box<Expr>, Pos),
    Mul(Box<Expr>, Box<Expr>, Pos),
    Div(Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, i64, Pos),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Int(_, p)
            | Expr::Var(_, p)
            | Expr::Neg(_, p)
            | Expr::Add(_, _, p)
            | Expr::Sub(_, _, p)
            | Expr::Mul(_, _, p)
            | Expr::Div(_, _, p)
            | Expr::Pow(_, _, p) => *p,
        }
    }

    /// Evaluates in `ctx`. Unknown names and divisions by zero are reported
    /// at the offending sub-expression.
    pub fn eval(&self, ctx: &Context) -> Result<RatFunc> {
        match self {
            Expr::Int(n, _) => Ok(RatFunc::constant(ctx, n.clone().into())),
            Expr::Var(name, pos) => match ctx.index_of(name) {
                Some(i) => Ok(RatFunc::var(ctx, i)),
                None => Err(pos.error(format!("undefined variable `{name}`"))),
            },
            Expr::Neg(a, _) => Ok(-&a.eval(ctx)?),
            Expr::Add(a, b, _) => Ok(&a.eval(ctx)? + &b.eval(ctx)?),
            Expr::Sub(a, b, _) => Ok(&a.eval(ctx)? - &b.eval(ctx)?),
            Expr::Mul(a, b, _) => Ok(&a.eval(ctx)? * &b.eval(ctx)?),
            Expr::Div(a, b, _) => {
                let num = a.eval(ctx)?;
                let den = b.eval(ctx)?;
                num.checked_div(&den).map_err(|_| b.pos().error("division by zero"))
            }
            Expr::Pow(a, e, pos) => {
                let base = a.eval(ctx)?;
                base.pow(*e).map_err(|_| pos.error("zero raised to a negative power"))
            }
        }
    }
}

/// Recursive-descent parser over a token stream.
pub struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, at: 0 }
    }

    pub fn from_source(src: &str) -> Result<Self> {
        Ok(Parser::new(tokenize(src)?))
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    pub fn peek_nth(&self, n: usize) -> &Token {
        let i = (self.at + n).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    pub fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    /// Consumes the next token if it equals `tok`.
    pub fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Pos> {
        let t = self.bump();
        if &t.tok == tok {
            Ok(t.pos)
        } else {
            Err(t.pos.error(format!("expected {tok}, found {}", t.tok)))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Pos)> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.pos)),
            other => Err(t.pos.error(format!("expected identifier, found {other}"))),
        }
    }

    pub fn expect_int(&mut self) -> Result<(i64, Pos)> {
        let t = self.bump();
        let negative = t.tok == Tok::Minus;
        let t = if negative { self.bump() } else { t };
        match &t.tok {
            Tok::Int(n) => {
                let n = if negative { -n } else { n.clone() };
                let v = n.to_i64().ok_or_else(|| t.pos.error("integer out of range"))?;
                Ok((v, t.pos))
            }
            other => Err(t.pos.error(format!("expected integer, found {other}"))),
        }
    }

    pub fn error_here(&self, msg: impl Into<String>) -> Error {
        self.peek().pos.error(msg)
    }

    pub fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            let pos = self.peek().pos;
            if self.eat(&Tok::Plus) {
                let rhs = self.parse_term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs), pos);
            } else if self.eat(&Tok::Minus) {
                let rhs = self.parse_term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            let pos = self.peek().pos;
            if self.eat(&Tok::Star) {
                let rhs = self.parse_unary()?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs), pos);
            } else if self.eat(&Tok::Slash) {
                let rhs = self.parse_unary()?;
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        let pos = self.peek().pos;
        if self.eat(&Tok::Minus) {
            let inner = self.parse_unary()?;
            return Ok(Expr::Neg(Box::new(inner), pos));
        }
        if self.eat(&Tok::Plus) {
            return self.parse_unary();
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        let pos = self.peek().pos;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let e = if self.eat(&Tok::LParen) {
            let (e, _) = self.expect_int()?;
            self.expect(&Tok::RParen)?;
            e
        } else {
            self.expect_int()?.0
        };
        if self.peek().tok == Tok::Caret {
            return Err(self.error_here("chained exponents need parentheses"));
        }
        Ok(Expr::Pow(Box::new(base), e, pos))
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let t = self.bump();
        match t.tok {
            Tok::Int(n) => Ok(Expr::Int(n, t.pos)),
            Tok::Ident(s) => Ok(Expr::Var(s, t.pos)),
            Tok::LParen => {
                let e = self.parse_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            other => Err(t.pos.error(format!("expected expression, found {other}"))),
        }
    }
}

fn parse_complete(src: &str) -> Result<Expr> {
    let mut p = Parser::from_source(src)?;
    let e = p.parse_expr()?;
    if !p.at_eof() {
        let t = p.peek();
        return Err(t.pos.error(format!("unexpected {} after expression", t.tok)));
    }
    Ok(e)
}

pub fn parse_ratfunc(src: &str, ctx: &Context) -> Result<RatFunc> {
    parse_complete(src)?.eval(ctx)
}

/// Parses a polynomial; a non-trivial denominator is an error.
pub fn parse_poly(src: &str, ctx: &Context) -> Result<MultiPoly> {
    let f = parse_ratfunc(src, ctx)?;
    if !f.is_polynomial() {
        return Err(Error::Parse { line: 1, col: 1, msg: format!("`{src}` is not a polynomial") });
    }
    Ok(f.into_parts().0)
}

fn write_monomial(out: &mut String, ctx: &Context, m: &Monomial) {
    let mut first = true;
    for &v in ctx.display_order() {
        let e = m.exponents()[v];
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(ctx.var_name(v));
        if e > 1 {
            let _ = write!(out, "^{e}");
        }
    }
}

impl Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms().iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let a = c.abs();
            if m.is_one() {
                let _ = write!(out, "{a}");
            } else {
                if !a.is_one() {
                    let _ = write!(out, "{a}*");
                }
                write_monomial(&mut out, self.ctx(), m);
            }
        }
        f.write_str(&out)
    }
}

impl Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den().is_one() {
            return write!(f, "{}", self.num());
        }
        if self.num().num_terms() > 1 {
            write!(f, "({})", self.num())?;
        } else {
            write!(f, "{}", self.num())?;
        }
        let den = self.den();
        let single_factor =
            den.num_terms() == 1 && den.terms()[0].0.exponents().iter().filter(|e| !e.is_zero()).count() == 1;
        if single_factor {
            write!(f, "/{den}")
        } else {
            write!(f, "/({den})")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(&["x", "y"]).unwrap()
    }

    fn show(s: &str) -> String {
        parse_ratfunc(s, &ctx()).unwrap().to_string()
    }

    #[test]
    fn prints_canonically() {
        assert_eq!(show("y + x"), "x + y");
        assert_eq!(show("x*x - 1"), "x^2 - 1");
        assert_eq!(show("4/3*x - y^2*x"), "-x*y^2 + 4/3*x");
        assert_eq!(show("-(x - 1)/(y - 1)^2"), "(-x + 1)/(y^2 - 2*y + 1)");
        assert_eq!(show("x / (2*y)"), "1/2*x/y");
        assert_eq!(show("1/(x*y)"), "1/(x*y)");
        assert_eq!(show("0"), "0");
        assert_eq!(show("-7/2"), "-7/2");
    }

    #[test]
    fn negative_exponents() {
        assert_eq!(show("x^-2"), show("1/x^2"));
        assert_eq!(show("((x+1))^(-2)*(x+1)^3"), "x + 1");
    }

    #[test]
    fn reprint_is_a_fixpoint() {
        for s in ["(x^2*y - 3)/(2*x + y^2)", "x/(y^2 - 1) - 1/3", "-x^3*y^-1", "((x-1)*(y-1)+1)"] {
            let once = show(s);
            assert_eq!(show(&once), once);
        }
    }

    #[test]
    fn extended_context_prints_new_variable_first() {
        let ext = ctx().extend(&["t"]).unwrap();
        let f = parse_ratfunc("x*t^2", &ext).unwrap();
        assert_eq!(f.to_string(), "t^2*x");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            parse_ratfunc("x +\n  * y", &ctx()).unwrap_err(),
            Error::Parse { line: 2, col: 3, msg: "expected expression, found `*`".into() }
        );
        let err = parse_ratfunc("x + z", &ctx()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, col: 5, .. }));
        assert!(parse_ratfunc("x / (y - y)", &ctx()).is_err());
        assert!(parse_ratfunc("x ^ y", &ctx()).is_err());
        assert!(parse_ratfunc("(x", &ctx()).is_err());
    }

    #[test]
    fn tokenizes_session_punctuation() {
        let toks: Vec<Tok> =
            tokenize("der D { x -> 2*x; } --order 8 # note").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(toks[3], Tok::Ident("x".into()));
        assert_eq!(toks[4], Tok::Arrow);
        assert!(toks.contains(&Tok::Flag("order".into())));
        assert_eq!(toks.last(), Some(&Tok::Eof));
    }
}
