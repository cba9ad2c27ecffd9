//! Closed-form coefficient expressions over the plane.
//!
//! Coefficient functions H(x) enter the equation, the diagnostics and the
//! solution checkpoints as strings like `1 + 0.25*x1 + 0.1*sin(x2)`. The
//! grammar is deliberately small:
//!
//! - variables `x1`, `x2`, numeric literals, the constant `pi`
//! - binary `+  -  *  /`, unary minus, parentheses
//! - functions `exp`, `log`, `sin`, `cos`
//!
//! Parsed expressions evaluate pointwise and differentiate symbolically, so
//! gradients and Hessians of a coefficient are exact rather than re-derived
//! by finite differences at every call site.

use std::fmt;

/// Expression tree over (x1, x2).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Variable index: 0 for x1, 1 for x2.
    Var(u8),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

/// Parse failure, with the byte offset into the source string.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message} (at byte {position})")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        Self { position, message: message.into() }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(ParseError::new(self.pos, "expected closing ')'"))
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(ParseError::new(self.pos, format!("unexpected character '{}'", c as char))),
            None => Err(ParseError::new(self.pos, "unexpected end of expression")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && matches!(self.src[self.pos], b'0'..=b'9' | b'.') {
            self.pos += 1;
        }
        // Exponent suffix: 1e-3, 2.5E+4.
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // Not an exponent after all ("2*exp(x1)" reaching the 'e' of exp
                // cannot happen here, but "1e" alone should fail cleanly).
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| ParseError::new(start, format!("malformed number '{text}'")))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        match name {
            "x1" => Ok(Expr::Var(0)),
            "x2" => Ok(Expr::Var(1)),
            "pi" => Ok(Expr::Num(std::f64::consts::PI)),
            "exp" | "log" | "sin" | "cos" => {
                if self.peek() != Some(b'(') {
                    return Err(ParseError::new(self.pos, format!("'{name}' requires parentheses")));
                }
                self.pos += 1;
                let arg = Box::new(self.expr()?);
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(match name {
                        "exp" => Expr::Exp(arg),
                        "log" => Expr::Log(arg),
                        "sin" => Expr::Sin(arg),
                        _ => Expr::Cos(arg),
                    })
                } else {
                    Err(ParseError::new(self.pos, "expected closing ')'"))
                }
            }
            _ => Err(ParseError::new(start, format!("unknown identifier '{name}'"))),
        }
    }
}

impl Expr {
    /// Parse an expression; the whole string must be consumed.
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(ParseError::new(p.pos, "trailing characters after expression"));
        }
        Ok(e)
    }

    /// Evaluate at the point (x1, x2).
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(0) => x1,
            Expr::Var(_) => x2,
            Expr::Neg(a) => -a.eval(x1, x2),
            Expr::Add(a, b) => a.eval(x1, x2) + b.eval(x1, x2),
            Expr::Sub(a, b) => a.eval(x1, x2) - b.eval(x1, x2),
            Expr::Mul(a, b) => a.eval(x1, x2) * b.eval(x1, x2),
            Expr::Div(a, b) => a.eval(x1, x2) / b.eval(x1, x2),
            Expr::Exp(a) => a.eval(x1, x2).exp(),
            Expr::Log(a) => a.eval(x1, x2).ln(),
            Expr::Sin(a) => a.eval(x1, x2).sin(),
            Expr::Cos(a) => a.eval(x1, x2).cos(),
        }
    }

    /// Symbolic partial derivative with respect to variable `var` (0 or 1).
    pub fn diff(&self, var: u8) -> Expr {
        use Expr::*;
        match self {
            Num(_) => Num(0.0),
            Var(v) => Num(if *v == var { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.diff(var)),
            Add(a, b) => add(a.diff(var), b.diff(var)),
            Sub(a, b) => sub(a.diff(var), b.diff(var)),
            Mul(a, b) => add(
                mul(a.diff(var), (**b).clone()),
                mul((**a).clone(), b.diff(var)),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.diff(var), (**b).clone()),
                    mul((**a).clone(), b.diff(var)),
                ),
                mul((**b).clone(), (**b).clone()),
            ),
            Exp(a) => mul(Exp(a.clone()), a.diff(var)),
            Log(a) => div(a.diff(var), (**a).clone()),
            Sin(a) => mul(Cos(a.clone()), a.diff(var)),
            Cos(a) => neg(mul(Sin(a.clone()), a.diff(var))),
        }
    }

    /// Replace x1 and x2 by the given expressions throughout.
    pub fn substitute(&self, r1: &Expr, r2: &Expr) -> Expr {
        use Expr::*;
        match self {
            Num(v) => Num(*v),
            Var(0) => r1.clone(),
            Var(_) => r2.clone(),
            Neg(a) => neg(a.substitute(r1, r2)),
            Add(a, b) => add(a.substitute(r1, r2), b.substitute(r1, r2)),
            Sub(a, b) => sub(a.substitute(r1, r2), b.substitute(r1, r2)),
            Mul(a, b) => mul(a.substitute(r1, r2), b.substitute(r1, r2)),
            Div(a, b) => div(a.substitute(r1, r2), b.substitute(r1, r2)),
            Exp(a) => Exp(Box::new(a.substitute(r1, r2))),
            Log(a) => Log(Box::new(a.substitute(r1, r2))),
            Sin(a) => Sin(Box::new(a.substitute(r1, r2))),
            Cos(a) => Cos(Box::new(a.substitute(r1, r2))),
        }
    }
}

// Smart constructors fold constants and drop additive/multiplicative
// identities, keeping second derivatives from ballooning.
fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => Expr::Num(-v),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        (Expr::Num(x), b) if x == 0.0 => b,
        (a, Expr::Num(y)) if y == 0.0 => a,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
        (a, Expr::Num(y)) if y == 0.0 => a,
        (Expr::Num(x), b) if x == 0.0 => neg(b),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
        (Expr::Num(x), _) | (_, Expr::Num(x)) if x == 0.0 => Expr::Num(0.0),
        (Expr::Num(x), b) if x == 1.0 => b,
        (a, Expr::Num(y)) if y == 1.0 => a,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), _) if x == 0.0 => Expr::Num(0.0),
        (a, Expr::Num(y)) if y == 1.0 => a,
        (Expr::Num(x), Expr::Num(y)) if y != 0.0 => Expr::Num(x / y),
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(0) => write!(f, "x1"),
            Expr::Var(_) => write!(f, "x2"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates_linear_coefficient() {
        let e = Expr::parse("1 + 0.25*x1 - 0.1*x2").unwrap();
        let v = e.eval(2.0, 3.0);
        assert!((v - (1.0 + 0.5 - 0.3)).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn function_calls_and_precedence() {
        let e = Expr::parse("exp(x1*x2)/2 + sin(pi*x1)").unwrap();
        let v = e.eval(0.5, 0.4);
        let want = (0.2f64).exp() / 2.0 + (std::f64::consts::PI * 0.5).sin();
        assert!((v - want).abs() < 1e-14, "got {v}, want {want}");
    }

    #[test]
    fn scientific_notation_literals() {
        let e = Expr::parse("1e-3 + 2.5E+1*x1").unwrap();
        assert!((e.eval(2.0, 0.0) - 50.001).abs() < 1e-12);
    }

    #[test]
    fn symbolic_gradient_matches_finite_differences() {
        let e = Expr::parse("exp(0.3*x1) * (1 + x2*x2) / (2 + cos(x1 - x2))").unwrap();
        let dx1 = e.diff(0);
        let dx2 = e.diff(1);
        let h = 1e-6;
        for &(a, b) in &[(0.2, -0.7), (1.3, 0.9), (-0.4, 0.1)] {
            let fd1 = (e.eval(a + h, b) - e.eval(a - h, b)) / (2.0 * h);
            let fd2 = (e.eval(a, b + h) - e.eval(a, b - h)) / (2.0 * h);
            assert!(
                (dx1.eval(a, b) - fd1).abs() < 1e-6 * (1.0 + fd1.abs()),
                "d/dx1 at ({a},{b}): symbolic {} vs fd {}",
                dx1.eval(a, b),
                fd1
            );
            assert!(
                (dx2.eval(a, b) - fd2).abs() < 1e-6 * (1.0 + fd2.abs()),
                "d/dx2 at ({a},{b}): symbolic {} vs fd {}",
                dx2.eval(a, b),
                fd2
            );
        }
    }

    #[test]
    fn second_derivatives_stay_consistent() {
        let e = Expr::parse("log(2 + x1*x1 + x2*x2)").unwrap();
        let dxx = e.diff(0).diff(0);
        let dxy = e.diff(0).diff(1);
        let dyx = e.diff(1).diff(0);
        let (a, b) = (0.6, -0.3);
        assert!(
            (dxy.eval(a, b) - dyx.eval(a, b)).abs() < 1e-13,
            "mixed partials disagree"
        );
        let h = 1e-5;
        let fd = (e.eval(a + h, b) - 2.0 * e.eval(a, b) + e.eval(a - h, b)) / (h * h);
        assert!((dxx.eval(a, b) - fd).abs() < 1e-4, "dxx {} vs fd {}", dxx.eval(a, b), fd);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("(1 + x1").is_err());
        assert!(Expr::parse("foo(x1)").is_err());
        assert!(Expr::parse("x3").is_err());
        assert!(Expr::parse("1 2").is_err());
        let err = Expr::parse("1 + bogus").unwrap_err();
        assert_eq!(err.position, 4, "error should point at the identifier");
    }

    #[test]
    fn display_round_trips_through_parser() {
        let e = Expr::parse("1 + 0.25*x1 + exp(x2/3)").unwrap();
        let back = Expr::parse(&e.to_string()).unwrap();
        assert!((e.eval(0.7, -0.2) - back.eval(0.7, -0.2)).abs() < 1e-15);
    }
}
