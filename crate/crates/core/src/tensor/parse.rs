//! Word expressions: `3*(x1)*u1 ⊗ u2 - (y)*D + 1`. Letters are `(poly)*g`,
//! `g`, or a bare `(poly)` standing for `(poly)*D`; generators are written
//! `D`, `u<i>` or `g_<i>` (with `g_0 = D`); letters are joined by `⊗` or `.`.

use num_traits::One;

use super::TensorElement;
use crate::poly::{parse_poly, ParseError, Poly, Rational};

pub fn parse_tensor(src: &str, n_gens: usize, nvars: usize) -> Result<TensorElement, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut p = P { src, chars, i: 0, n_gens, nvars };
    let out = p.expr()?;
    p.ws();
    if p.i < p.chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct P<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
    n_gens: usize,
    nvars: usize,
}

impl P<'_> {
    fn pos(&self) -> usize {
        self.chars.get(self.i).map(|c| c.0).unwrap_or(self.src.len())
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos(), msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.i < self.chars.len() && self.chars[self.i].1.is_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.i).map(|c| c.1)
    }

    fn expr(&mut self) -> Result<TensorElement, ParseError> {
        let mut sign = Rational::one();
        match self.peek() {
            Some('-') => {
                self.i += 1;
                sign = -sign;
            }
            Some('+') => self.i += 1,
            _ => {}
        }
        let mut acc = self.term()?.scale(&sign);
        loop {
            match self.peek() {
                Some('+') => {
                    self.i += 1;
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.i += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn number(&mut self) -> Option<Rational> {
        self.ws();
        let start = self.i;
        while self.i < self.chars.len() && self.chars[self.i].1.is_ascii_digit() {
            self.i += 1;
        }
        if self.i == start {
            return None;
        }
        let s: String = self.chars[start..self.i].iter().map(|c| c.1).collect();
        let mut q = Rational::from_integer(s.parse().unwrap());
        if self.peek() == Some('/') {
            let save = self.i;
            self.i += 1;
            self.ws();
            let ds = self.i;
            while self.i < self.chars.len() && self.chars[self.i].1.is_ascii_digit() {
                self.i += 1;
            }
            if self.i == ds {
                self.i = save;
            } else {
                let d: String = self.chars[ds..self.i].iter().map(|c| c.1).collect();
                q /= Rational::from_integer(d.parse().unwrap());
            }
        }
        Some(q)
    }

    fn term(&mut self) -> Result<TensorElement, ParseError> {
        let coeff = match self.number() {
            Some(q) => {
                if self.peek() == Some('*') {
                    self.i += 1;
                } else {
                    // a bare number is a multiple of the unit
                    return Ok(TensorElement::one(self.nvars).scale(&q));
                }
                q
            }
            None => Rational::one(),
        };
        let mut acc = self.letter()?;
        while matches!(self.peek(), Some('⊗') | Some('.')) {
            self.i += 1;
            acc = acc.multiply(&self.letter()?);
        }
        Ok(acc.scale(&coeff))
    }

    fn letter(&mut self) -> Result<TensorElement, ParseError> {
        let mut coeff = Poly::one(self.nvars);
        let mut bare_poly = false;
        if self.peek() == Some('(') {
            let open = self.i;
            let mut depth = 0;
            let mut j = self.i;
            while j < self.chars.len() {
                match self.chars[j].1 {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                j += 1;
            }
            if j == self.chars.len() {
                return Err(self.err("unbalanced parenthesis"));
            }
            let inner_start = self.chars[open].0 + 1;
            let inner_end = self.chars[j].0;
            coeff = parse_poly(&self.src[inner_start..inner_end], self.nvars)
                .map_err(|e| ParseError { pos: inner_start + e.pos, msg: e.msg })?;
            self.i = j + 1;
            if self.peek() == Some('*') {
                self.i += 1;
            } else {
                bare_poly = true;
            }
        }
        if bare_poly {
            return Ok(TensorElement::scalar(&coeff));
        }
        let gen = self.generator()?;
        Ok(TensorElement::letter(&coeff, gen))
    }

    fn generator(&mut self) -> Result<usize, ParseError> {
        self.ws();
        let at = self.pos();
        let c = self.chars.get(self.i).map(|c| c.1);
        let idx = match c {
            Some('D') => {
                self.i += 1;
                0
            }
            Some('u') | Some('g') => {
                self.i += 1;
                if c == Some('g') {
                    if self.chars.get(self.i).map(|c| c.1) != Some('_') {
                        return Err(self.err("expected '_' after 'g'"));
                    }
                    self.i += 1;
                } else if self.chars.get(self.i).map(|c| c.1) == Some('_') {
                    self.i += 1;
                }
                let start = self.i;
                while self.i < self.chars.len() && self.chars[self.i].1.is_ascii_digit() {
                    self.i += 1;
                }
                if start == self.i {
                    return Err(self.err("expected generator index"));
                }
                let s: String = self.chars[start..self.i].iter().map(|c| c.1).collect();
                s.parse::<usize>().unwrap()
            }
            _ => return Err(self.err("expected a generator")),
        };
        if idx >= self.n_gens {
            return Err(ParseError { pos: at, msg: format!("generator index {} out of range", idx) });
        }
        Ok(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_words() {
        let t = parse_tensor("u2 ⊗ u1", 3, 2).unwrap();
        assert_eq!(t.to_string(), "u2 ⊗ u1");
        let t = parse_tensor("3*(x + y)*u1 . D - 1/2", 3, 2).unwrap();
        assert_eq!(t.num_terms(), 3);
        let s = parse_tensor("(x)", 3, 2).unwrap();
        assert_eq!(s, TensorElement::scalar(&parse_poly("x", 2).unwrap()));
        assert!(parse_tensor("u3", 3, 2).is_err());
        assert_eq!(parse_tensor("g_0", 3, 2).unwrap(), TensorElement::generator(2, 0));
    }
}
