//! Recursive-descent parser for chart expressions.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' uint)?
//! base   := rational | ident | '(' expr ')' | '-' factor
//! ```

use num_bigint::BigInt;

use super::{Chart, MultiPoly, Rational, RationalFunction};
use crate::error::{Error, Result};

/// Parses an expression into a normalized rational function on `chart`.
pub fn parse_expression(text: &str, chart: &Chart) -> Result<RationalFunction> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, chart };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses an expression that must reduce to a polynomial.
pub fn parse_polynomial(text: &str, chart: &Chart) -> Result<MultiPoly> {
    let f = parse_expression(text, chart)?;
    if !f.is_polynomial() {
        return Err(Error::InvalidArgument(format!("`{text}` is not a polynomial")));
    }
    Ok(f.numerator().clone())
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: message.to_string() }
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

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.factor()?;
                acc = acc.checked_div(&d).map_err(|e| match e {
                    Error::DivisionByZero => Error::Syntax { offset: at, message: "division by zero".into() },
                    e => e,
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<RationalFunction> {
        let base = self.base()?;
        if self.eat(b'^') {
            self.skip_ws();
            let n = self.uint()?;
            let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                Ok(RationalFunction::constant(self.chart, Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.chart.index_of(name) {
                    Some(i) => Ok(RationalFunction::var(self.chart, i)),
                    None => Err(Error::UnknownIdentifier(name.to_string())),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an unsigned integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(s.parse().expect("digits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(names: &[&str]) -> Chart {
        Chart::new(names).unwrap()
    }

    #[test]
    fn polynomial_terms() {
        let c = chart(&["q", "p"]);
        let f = parse_expression("q^2 + p^2", &c).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.numerator().num_terms(), 2);
    }

    #[test]
    fn rational_with_denominator() {
        let c = chart(&["u", "v"]);
        let f = parse_expression("-4/(1 + u^2 + v^2)", &c).unwrap();
        assert_eq!(f.denominator(), &parse_polynomial("u^2 + v^2 + 1", &c).unwrap());
        assert_eq!(f.numerator().constant_value(), Some(Rational::from_integer((-4).into())));
    }

    #[test]
    fn cancels_common_factor() {
        let c = chart(&["x", "y"]);
        let f = parse_expression("(x^2 - y^2)/(x + y)", &c).unwrap();
        assert_eq!(f, parse_expression("x - y", &c).unwrap());
    }

    #[test]
    fn rational_literal_and_precedence() {
        let c = chart(&["x"]);
        let f = parse_expression("1/2*x^2 - -3", &c).unwrap();
        assert_eq!(f.to_string(), "1/2*x^2 + 3");
    }

    #[test]
    fn unknown_identifier() {
        let c = chart(&["x"]);
        assert_eq!(parse_expression("x + y", &c), Err(Error::UnknownIdentifier("y".into())));
    }

    #[test]
    fn syntax_errors() {
        let c = chart(&["x"]);
        for bad in ["", "x +", "(x", "x^", "x^-1", "x $ 2", "x)"] {
            assert!(matches!(parse_expression(bad, &c), Err(Error::Syntax { .. })), "{bad}");
        }
        assert!(matches!(parse_expression("x/0", &c), Err(Error::Syntax { .. })));
    }

    #[test]
    fn display_round_trips() {
        let c = chart(&["u", "v"]);
        for s in ["-4/(1 + u^2 + v^2)", "u/(u^2 + v^2)", "-1/2*u + v^3", "(u - v)/(2*u*v)", "3/u", "-u/v^2", "0"] {
            let f = parse_expression(s, &c).unwrap();
            let g = parse_expression(&f.to_string(), &c).unwrap();
            assert_eq!(f, g, "{s} -> {f}");
        }
    }
}
