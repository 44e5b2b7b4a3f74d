use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::{Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

/// Parses a polynomial in `x1..xm`. The names `x`, `y`, `z` are accepted as
/// aliases for `x1`, `x2`, `x3`. Division is allowed by nonzero constants only.
pub fn parse_poly(src: &str, nvars: usize) -> Result<Poly, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, nvars };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.power()?;
                    let c = d.constant_value().filter(|c| !c.is_zero()).ok_or(ParseError {
                        pos: at,
                        msg: "division by a non-constant or zero".into(),
                    })?;
                    acc = acc.scale(&(Rational::from_integer(1.into()) / c));
                }
                // implicit multiplication such as `2x` or `x y`
                Some(c) if c.is_ascii_alphanumeric() || c == b'(' => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| ParseError { pos: start, msg: "expected exponent".into() })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = s.parse().unwrap();
                Ok(Poly::constant(self.nvars, Rational::from_integer(n)))
            }
            Some(b'x') | Some(b'y') | Some(b'z') => {
                let start = self.pos;
                let c = self.src[self.pos];
                self.pos += 1;
                let dstart = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let idx = if self.pos > dstart {
                    if c != b'x' {
                        return Err(ParseError { pos: start, msg: "unknown variable".into() });
                    }
                    let k: usize = std::str::from_utf8(&self.src[dstart..self.pos]).unwrap().parse().unwrap();
                    if k == 0 {
                        return Err(ParseError { pos: start, msg: "variables are numbered from 1".into() });
                    }
                    k - 1
                } else {
                    (c - b'x') as usize
                };
                if idx >= self.nvars {
                    return Err(ParseError {
                        pos: start,
                        msg: format!("variable x{} outside ring with {} variables", idx + 1, self.nvars),
                    });
                }
                Ok(Poly::var(self.nvars, idx))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_and_precedence() {
        let a = parse_poly("x*y + 2*x^2 - 1/2", 2).unwrap();
        let b = parse_poly("x1*x2 + 2*x1^2 - 1/2", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly("-(x - 1)^2", 1).unwrap().to_string(), "-x1^2 + 2*x1 - 1");
        assert_eq!(parse_poly("3x", 1).unwrap().to_string(), "3*x1");
    }

    #[test]
    fn errors_report_position() {
        assert_eq!(parse_poly("x3", 2).unwrap_err().pos, 0);
        assert_eq!(parse_poly("x + ", 1).unwrap_err().pos, 4);
        assert!(parse_poly("x / y", 2).is_err());
        assert!(parse_poly("x )", 1).is_err());
    }
}
