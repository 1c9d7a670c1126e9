//! Text form of series, e.g. `t^-5 + 2*t^-1 + 1 + O(t^2)`.
//!
//! Coefficients are integers (read modulo `p`) or polynomials in the field
//! generator `g`, e.g. `(g + 1)*t^-3` or `2*g^2*t`. Printing is canonical:
//! terms ascend by exponent, non-monomial coefficients are parenthesized, and
//! a finite precision is always written as a trailing `O(t^N)`.

use std::collections::BTreeMap;

use super::gf::{FqElem, GaloisField};
use super::series::LaurentSeries;
use crate::error::{Error, Result};

pub fn format_coeff(fld: &GaloisField, c: FqElem) -> String {
    if let Some(k) = fld.prime_value(c) {
        return k.to_string();
    }
    let coords = fld.coords(c);
    let monos: Vec<String> = coords
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &d)| d != 0)
        .map(|(j, &d)| {
            let power = match j {
                0 => String::new(),
                1 => "g".to_string(),
                _ => format!("g^{j}"),
            };
            match (d, j) {
                (_, 0) => d.to_string(),
                (1, _) => power,
                _ => format!("{d}*{power}"),
            }
        })
        .collect();
    if monos.len() == 1 {
        monos.into_iter().next().unwrap()
    } else {
        format!("({})", monos.join(" + "))
    }
}

fn format_term(fld: &GaloisField, e: i64, c: FqElem) -> String {
    let power = if e == 1 { "t".to_string() } else { format!("t^{e}") };
    match (e, c == FqElem::ONE) {
        (0, _) => format_coeff(fld, c),
        (_, true) => power,
        _ => format!("{}*{}", format_coeff(fld, c), power),
    }
}

pub fn format_series(s: &LaurentSeries) -> String {
    let fld = s.field();
    let mut parts: Vec<String> = s.terms().map(|(e, c)| format_term(fld, e, c)).collect();
    match s.prec() {
        Some(n) => parts.push(if n == 1 { "O(t)".to_string() } else { format!("O(t^{n})") }),
        None if parts.is_empty() => parts.push("0".to_string()),
        None => {}
    }
    parts.join(" + ")
}

/// Parses a series. Without an explicit `O(t^N)` term the series gets
/// precision `default_prec` (`None` meaning exact).
pub fn parse_series(fld: &GaloisField, text: &str, default_prec: Option<i64>) -> Result<LaurentSeries> {
    let mut parser = Parser { fld, chars: text.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let (poly, big_o) = parser.sum(true)?;
    if parser.pos != parser.chars.len() {
        return Err(parser.error("trailing input"));
    }
    let prec = big_o.or(default_prec);
    Ok(LaurentSeries::from_terms(fld, poly, prec))
}

type Poly = BTreeMap<i64, FqElem>;

struct Parser<'a> {
    fld: &'a GaloisField,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        let rest: String = self.chars[self.pos.min(self.chars.len())..].iter().collect();
        Error::Parse(format!("{msg} at position {} (remaining: {rest:?})", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn add_into(&self, acc: &mut Poly, other: Poly, negate: bool) {
        for (e, c) in other {
            let c = if negate { self.fld.neg(c) } else { c };
            let sum = self.fld.add(acc.get(&e).copied().unwrap_or(FqElem::ZERO), c);
            if sum.is_zero() {
                acc.remove(&e);
            } else {
                acc.insert(e, sum);
            }
        }
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::new();
        for (&ea, &ca) in a {
            for (&eb, &cb) in b {
                let term = Poly::from([(ea + eb, self.fld.mul(ca, cb))]);
                self.add_into(&mut out, term, false);
            }
        }
        out
    }

    /// `sum := ['+'|'-'] term (('+'|'-') term)*`; `O(...)` only at top level.
    fn sum(&mut self, top: bool) -> Result<(Poly, Option<i64>)> {
        let mut acc = Poly::new();
        let mut big_o: Option<i64> = None;
        let mut negate = self.eat('-');
        if !negate {
            self.eat('+');
        }
        loop {
            if top && self.peek() == Some('O') {
                let n = self.big_o()?;
                big_o = Some(big_o.map_or(n, |m| m.min(n)));
            } else {
                let term = self.term()?;
                self.add_into(&mut acc, term, negate);
            }
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                break;
            }
        }
        Ok((acc, big_o))
    }

    fn big_o(&mut self) -> Result<i64> {
        self.pos += 1;
        if !self.eat('(') || !self.eat('t') {
            return Err(self.error("expected O(t^N)"));
        }
        let n = if self.eat('^') { self.signed_int()? } else { 1 };
        if !self.eat(')') {
            return Err(self.error("expected ')' closing O(...)"));
        }
        Ok(n)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let rhs = self.factor()?;
            acc = self.mul(&acc, &rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let (inner, _) = self.sum(false)?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                inner
            }
            Some('t') => {
                self.pos += 1;
                let e = if self.eat('^') { self.signed_int()? } else { 1 };
                return Ok(Poly::from([(e, FqElem::ONE)]));
            }
            Some('g') => {
                self.pos += 1;
                if self.fld.degree() == 1 {
                    return Err(self.error("'g' is only available over extension fields"));
                }
                Poly::from([(0, self.fld.g())])
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.unsigned_int()?;
                let c = self.fld.from_int(n);
                if c.is_zero() {
                    Poly::new()
                } else {
                    Poly::from([(0, c)])
                }
            }
            _ => return Err(self.error("expected a coefficient, g, t or '('")),
        };
        if self.eat('^') {
            let k = self.unsigned_int()?;
            let mut acc = Poly::from([(0, FqElem::ONE)]);
            for _ in 0..k {
                acc = self.mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn unsigned_int(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| self.error("integer out of range"))
    }

    fn signed_int(&mut self) -> Result<i64> {
        if self.eat('-') {
            Ok(-self.unsigned_int()?)
        } else {
            self.eat('+');
            self.unsigned_int()
        }
    }
}
