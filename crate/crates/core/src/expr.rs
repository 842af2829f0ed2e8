//! A small closed-form grammar for exponents and grid functions:
//! constants, coordinates, `|x-y|`, `+`, `*`, `min`, `max`.
//!
//! Identifiers: `x`/`x0`, `x1` are the coordinates of the first point,
//! `y`/`y0`, `y1` those of the second point, and `dist` (or `|x-y|`) their
//! Euclidean distance. A leading `-` negates a factor.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::Point;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Coordinate `axis` of the first (`second == false`) or second point.
    Coord {
        second: bool,
        axis: usize,
    },
    Dist,
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

/// Closed real interval used for guaranteed enclosures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    fn add(self, o: Self) -> Self {
        Interval::new(self.lo + o.lo, self.hi + o.hi)
    }

    fn mul(self, o: Self) -> Self {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }

    fn min(self, o: Self) -> Self {
        Interval::new(self.lo.min(o.lo), self.hi.min(o.hi))
    }

    fn max(self, o: Self) -> Self {
        Interval::new(self.lo.max(o.lo), self.hi.max(o.hi))
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Expression(format!(
                "unexpected trailing input at token {} in {src:?}",
                p.pos
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, x: Point, y: Point) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Coord { second, axis } => {
                if *second {
                    y[*axis]
                } else {
                    x[*axis]
                }
            }
            Expr::Dist => ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt(),
            Expr::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Expr::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Expr::Min(a, b) => a.eval(x, y).min(b.eval(x, y)),
            Expr::Max(a, b) => a.eval(x, y).max(b.eval(x, y)),
        }
    }

    /// Enclosure of the expression when both points range over `boxes` and
    /// their distance over `dist`.
    pub fn enclose(&self, boxes: [Interval; 2], dist: Interval) -> Interval {
        match self {
            Expr::Const(c) => Interval::point(*c),
            Expr::Coord { axis, .. } => boxes[*axis],
            Expr::Dist => dist,
            Expr::Add(a, b) => a.enclose(boxes, dist).add(b.enclose(boxes, dist)),
            Expr::Mul(a, b) => a.enclose(boxes, dist).mul(b.enclose(boxes, dist)),
            Expr::Min(a, b) => a.enclose(boxes, dist).min(b.enclose(boxes, dist)),
            Expr::Max(a, b) => a.enclose(boxes, dist).max(b.enclose(boxes, dist)),
        }
    }

    /// True if the expression reads the second point (or the distance).
    pub fn uses_second_point(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Coord { second, .. } => *second,
            Expr::Dist => true,
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                a.uses_second_point() || b.uses_second_point()
            }
        }
    }

    pub fn max_axis(&self) -> Option<usize> {
        match self {
            Expr::Coord { axis, .. } => Some(*axis),
            Expr::Const(_) | Expr::Dist => None,
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                match (a.max_axis(), b.max_axis()) {
                    (Some(i), Some(j)) => Some(i.max(j)),
                    (i, j) => i.or(j),
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Coord { second, axis } => write!(f, "{}{axis}", if *second { "y" } else { "x" }),
            Expr::Dist => write!(f, "dist"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Comma,
    Bar,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' | '\u{2212}' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' | '\u{d7}' => {
                out.push(Token::Star);
                i += 1
            }
            '(' => {
                out.push(Token::LParen);
                i += 1
            }
            ')' => {
                out.push(Token::RParen);
                i += 1
            }
            ',' => {
                out.push(Token::Comma);
                i += 1
            }
            '|' => {
                out.push(Token::Bar);
                i += 1
            }
            c if c.is_ascii_digit() || c == '.' => {
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
                    .map_err(|_| Error::Expression(format!("bad number {text:?}")))?;
                out.push(Token::Num(v));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(Error::Expression(format!(
                    "unexpected character {other:?} in {src:?}"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(Error::Expression(format!(
                "expected {want:?}, found {other:?}"
            ))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Const(v)),
            Some(Token::Minus) => match self.factor()? {
                Expr::Const(v) => Ok(Expr::Const(-v)),
                e => Ok(Expr::Mul(Box::new(Expr::Const(-1.0)), Box::new(e))),
            },
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Bar) => {
                let a = self.next();
                self.expect(Token::Minus)?;
                let b = self.next();
                self.expect(Token::Bar)?;
                match (a, b) {
                    (Some(Token::Ident(a)), Some(Token::Ident(b))) if a == "x" && b == "y" => {
                        Ok(Expr::Dist)
                    }
                    _ => Err(Error::Expression(
                        "only |x-y| is supported between bars".into(),
                    )),
                }
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "min" | "max" => {
                    self.expect(Token::LParen)?;
                    let a = self.expr()?;
                    self.expect(Token::Comma)?;
                    let b = self.expr()?;
                    self.expect(Token::RParen)?;
                    Ok(if name == "min" {
                        Expr::Min(Box::new(a), Box::new(b))
                    } else {
                        Expr::Max(Box::new(a), Box::new(b))
                    })
                }
                "dist" => Ok(Expr::Dist),
                "x" | "x0" => Ok(Expr::Coord {
                    second: false,
                    axis: 0,
                }),
                "x1" => Ok(Expr::Coord {
                    second: false,
                    axis: 1,
                }),
                "y" | "y0" => Ok(Expr::Coord {
                    second: true,
                    axis: 0,
                }),
                "y1" => Ok(Expr::Coord {
                    second: true,
                    axis: 1,
                }),
                other => Err(Error::Expression(format!("unknown identifier {other:?}"))),
            },
            other => Err(Error::Expression(format!("unexpected token {other:?}"))),
        }
    }
}
