//! Polynomial expressions: `+ - * / ^`, parentheses, integer literals and identifiers.
//!
//! Identifiers are resolved by the caller. A name such as `x*1` is read as one starred
//! variable: a letter run followed immediately by `*` and a digit.

use std::fmt;

use bvw::poly::{Poly, Var};
use bvw::scalars::RadicalScalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                advance(&mut i, &mut line, &mut col);
            }
            out.push(Token {
                tok: Tok::Num(s.parse().expect("digits")),
                line: l0,
                col: c0,
            });
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                advance(&mut i, &mut line, &mut col);
            }
            let letters_only = s.chars().all(char::is_alphabetic);
            if letters_only
                && i + 1 < chars.len()
                && chars[i] == '*'
                && chars[i + 1].is_ascii_digit()
            {
                s.push('*');
                advance(&mut i, &mut line, &mut col);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    advance(&mut i, &mut line, &mut col);
                }
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l0,
                col: c0,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                line: l0,
                col: c0,
            });
            advance(&mut i, &mut line, &mut col);
        } else {
            return Err(ParseError {
                line,
                col,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a, R> {
    toks: Vec<Token>,
    pos: usize,
    resolve: &'a R,
}

impl<R: Fn(&str) -> Option<Var>> Parser<'_, R> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek().tok == Tok::Op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.product()?;
            } else if self.eat('-') {
                acc = &acc - &self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek().tok == Tok::Op('/') {
                self.pos += 1;
                let at = self.pos;
                let d = self.unary()?;
                let q = constant_of(&d).filter(|q| !q.is_zero());
                let Some(q) = q else {
                    self.pos = at;
                    return self.err("divisor must be a nonzero rational constant");
                };
                acc = acc.scale_rational(&q.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().tok.clone() {
                Tok::Num(k) => {
                    let Ok(k) = u32::try_from(&k) else {
                        return self.err("exponent too large");
                    };
                    if k > 64 {
                        return self.err("exponent too large");
                    }
                    self.pos += 1;
                    Ok(base.pow(k))
                }
                _ => self.err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek().tok.clone() {
            Tok::Num(k) => {
                self.pos += 1;
                Ok(Poly::constant(RadicalScalar::from_rational(
                    BigRational::from_integer(k),
                )))
            }
            Tok::Ident(name) => match (self.resolve)(&name) {
                Some(v) => {
                    self.pos += 1;
                    Ok(Poly::var(v))
                }
                None => self.err(format!("unknown identifier '{name}'")),
            },
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Tok::End => self.err("unexpected end of input"),
            Tok::Op(c) => self.err(format!("unexpected '{c}'")),
        }
    }
}

fn constant_of(p: &Poly) -> Option<BigRational> {
    if p.is_zero() {
        return Some(BigRational::zero());
    }
    let mut terms = p.terms();
    let (m, c) = terms.next()?;
    (terms.next().is_none() && m.is_one() && c.is_rational()).then(|| c.rational_part())
}

pub fn parse_with(src: &str, resolve: &impl Fn(&str) -> Option<Var>) -> Result<Poly, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        resolve,
    };
    let out = p.sum()?;
    if p.peek().tok != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(out)
}

/// Parses an expression in BV variable names (x1, C2, x*3, B*1, ...), for any n.
pub fn parse_poly(src: &str, n: usize) -> Result<Poly, ParseError> {
    parse_with(src, &|name| {
        let v: Var = name.parse().ok()?;
        (v.index >= 1 && (v.index as usize) <= n * n).then_some(v)
    })
}

/// Parses a univariate polynomial in `t` and returns its coefficients, lowest degree first.
pub fn parse_univariate(src: &str) -> Result<Vec<BigRational>, ParseError> {
    // t is carried by a stand-in even variable while parsing.
    let stand_in = Var::x(1);
    let p = parse_with(src, &|name| (name == "t").then_some(stand_in))?;
    let mut coeffs = vec![BigRational::zero(); p.max_poly_degree() as usize + 1];
    for (m, c) in p.terms() {
        if !c.is_rational() {
            return Err(ParseError {
                line: 1,
                col: 1,
                message: "coefficients must be rational".into(),
            });
        }
        coeffs[m.exponent(stand_in) as usize] = c.rational_part();
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    if coeffs.iter().all(Zero::is_zero) {
        coeffs.clear();
    }
    Ok(coeffs)
}
