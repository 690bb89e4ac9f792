//! Minimal analytic-expression grammar for config descriptors: binary
//! `+ - * / ^` (with `^` right-associative), unary minus, the functions
//! `sin cos sinh cosh exp`, the constants `pi` and `e`, and the variables
//! `x` and `y`. Hand-written recursive descent; no implicit multiplication.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := NUMBER | FUNC '(' expr ')' | 'pi' | 'e' | 'x' | 'y' | '(' expr ')'
//! ```

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
}

impl Func {
    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
            Func::Exp => v.exp(),
        }
    }
}

/// Parsed expression tree over the variables `(x, y)`.
#[derive(Clone, Debug)]
pub enum Expr {
    Num(f64),
    X,
    Y,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Fun(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Y => y,
            Expr::Neg(a) => -a.eval(x, y),
            Expr::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Expr::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Expr::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Expr::Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Expr::Pow(a, b) => a.eval(x, y).powf(b.eval(x, y)),
            Expr::Fun(f, a) => f.apply(a.eval(x, y)),
        }
    }
}

/// Parse failure with a byte offset into the source string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {}", self.message, self.position)
    }
}

impl std::error::Error for ParseError {}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error("empty expression"));
    }
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            // Right-associative; the exponent may carry a unary minus.
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        // Scientific exponent, only when unambiguously one: 'e'/'E'
        // followed by digits or a signed digit run.
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| ParseError { position: start, message: format!("invalid number '{text}'") })
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        let func = match name {
            "x" => return Ok(Expr::X),
            "y" => return Ok(Expr::Y),
            "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
            "e" => return Ok(Expr::Num(std::f64::consts::E)),
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            _ => {
                return Err(ParseError {
                    position: start,
                    message: format!(
                        "unknown name '{name}' (expected x, y, pi, e, sin, cos, sinh, cosh, exp)"
                    ),
                })
            }
        };
        self.expect(b'(')?;
        let arg = self.expr()?;
        self.expect(b')')?;
        Ok(Expr::Fun(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, x: f64, y: f64) -> f64 {
        parse(src).unwrap().eval(x, y)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1+2*3", 0.0, 0.0), 7.0);
        assert_eq!(eval("(1+2)*3", 0.0, 0.0), 9.0);
        assert_eq!(eval("2^3^2", 0.0, 0.0), 512.0); // right-associative
        assert_eq!(eval("8/4/2", 0.0, 0.0), 1.0); // left-associative
        assert_eq!(eval("1-2-3", 0.0, 0.0), -4.0);
        assert_eq!(eval("2*3^2", 0.0, 0.0), 18.0);
    }

    #[test]
    fn unary_minus_binds_below_power() {
        assert_eq!(eval("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(eval("(-2)^2", 0.0, 0.0), 4.0);
        assert_eq!(eval("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(eval("--3", 0.0, 0.0), 3.0);
        assert_eq!(eval("4*-2", 0.0, 0.0), -8.0);
    }

    #[test]
    fn functions_constants_variables() {
        assert!((eval("sin(pi/2)", 0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((eval("cos(0)", 0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((eval("exp(1) - e", 0.0, 0.0)).abs() < 1e-15);
        assert!((eval("sinh(1)", 0.0, 0.0) - 1.0f64.sinh()).abs() < 1e-15);
        assert!((eval("cosh(2*x)", 0.3, 0.0) - 0.6f64.cosh()).abs() < 1e-15);
        assert_eq!(eval("x*y + y", 2.0, 3.0), 9.0);
        assert_eq!(eval("1 + 0.3*sin(2*pi*x)*sin(2*pi*y)", 0.25, 0.25), 1.3);
    }

    #[test]
    fn number_formats() {
        assert_eq!(eval("1e3", 0.0, 0.0), 1000.0);
        assert_eq!(eval("2.5E-2", 0.0, 0.0), 0.025);
        assert_eq!(eval("7.", 0.0, 0.0), 7.0);
        assert_eq!(eval("1e3 + 2", 0.0, 0.0), 1002.0);
        // '2e' is the number 2 followed by the constant e: no implicit
        // multiplication, so it must fail as trailing input.
        assert!(parse("2e").is_err());
    }

    #[test]
    fn whitespace_is_free() {
        assert_eq!(eval("  1 +\t2 * ( 3 - 1 ) ", 0.0, 0.0), 5.0);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("").unwrap_err().message, "empty expression");
        assert_eq!(parse("   ").unwrap_err().message, "empty expression");

        let e = parse("1 + bogus").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(e.message.contains("unknown name 'bogus'"), "{}", e.message);

        let e = parse("sin x").unwrap_err();
        assert!(e.message.contains("expected '('"));

        let e = parse("(1+2").unwrap_err();
        assert!(e.message.contains("expected ')'"));

        let e = parse("1 2").unwrap_err();
        assert!(e.message.contains("trailing input"));

        let e = parse("1+").unwrap_err();
        assert!(e.message.contains("unexpected end"));

        let e = parse("1 + #2").unwrap_err();
        assert!(e.message.contains("unexpected character '#'"));

        let e = parse("1 # 2").unwrap_err();
        assert!(e.message.contains("trailing input"));
    }
}
