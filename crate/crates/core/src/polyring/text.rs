//! Text form of polynomials.
//!
//! Output: terms `c*x^a*y^b*z^c` joined by `+`, graded-lex descending,
//! coefficients as canonical field elements (extension elements are written
//! as polynomials in `g` and parenthesized when they have several terms).
//! Input accepts `+ - * ^ ( )`, integers, the variable names and `g`.

use std::fmt;

use super::{grlex, Mono, Polynomial, MAX_VARS};
use crate::error::{Error, Result};
use crate::gf::Field;

pub const DEFAULT_VARS: [&str; MAX_VARS] = ["x", "y", "z", "u", "v", "w"];

impl Polynomial {
    pub fn to_text(&self, names: &[&str]) -> String {
        assert!(names.len() >= self.nvars());
        let mut terms: Vec<(&Mono, _)> = self.terms().collect();
        terms.sort_by(|a, b| grlex(b.0, a.0));
        if terms.is_empty() {
            return "0".into();
        }
        let f = self.field();
        let parts: Vec<String> = terms
            .into_iter()
            .map(|(m, &c)| {
                let mono: Vec<String> = (0..self.nvars())
                    .filter(|&i| m[i] > 0)
                    .map(|i| match m[i] {
                        1 => names[i].to_string(),
                        e => format!("{}^{e}", names[i]),
                    })
                    .collect();
                let cs = f.fmt_elem(c);
                if mono.is_empty() {
                    return if cs.contains('+') { format!("({cs})") } else { cs };
                }
                let mono = mono.join("*");
                if c == f.one() {
                    mono
                } else if cs.contains('+') {
                    format!("({cs})*{mono}")
                } else {
                    format!("{cs}*{mono}")
                }
            })
            .collect();
        parts.join("+")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&DEFAULT_VARS))
    }
}

/// Parses with the default variable names `x, y, z, u, v, w`.
pub fn parse_polynomial(s: &str, field: &Field, nvars: usize) -> Result<Polynomial> {
    parse_polynomial_vars(s, field, &DEFAULT_VARS[..nvars])
}

pub fn parse_polynomial_vars(s: &str, field: &Field, names: &[&str]) -> Result<Polynomial> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
        field,
        names,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a Field,
    names: &'a [&'a str],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let t = self.unary()?;
            acc = &acc * &t;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            if e > u16::MAX as u128 {
                return Err(self.err("exponent too large"));
            }
            return Ok(base.pow(e as u64));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u128> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u128>()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "integer too large".into(),
            })
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let nv = self.names.len();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.uint()?;
                let r = (v % self.field.p() as u128) as i64;
                Ok(Polynomial::constant(self.field, nv, self.field.from_i64(r)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if let Some(i) = self.names.iter().position(|&n| n == name) {
                    return Ok(Polynomial::var(self.field, nv, i));
                }
                if name == "g" {
                    if self.field.k() == 1 {
                        return Err(Error::Parse {
                            pos: start,
                            msg: "generator 'g' used over a prime field".into(),
                        });
                    }
                    return Ok(Polynomial::constant(self.field, nv, self.field.generator()));
                }
                Err(Error::Parse {
                    pos: start,
                    msg: format!("unknown symbol '{name}'"),
                })
            }
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
        }
    }
}
