//! Recursive-descent parser and canonical printer for polynomial expressions.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := (coeff | var | '(' expr ')') ('^' nat)?
//! coeff  := '(' rat ('+'|'-') rat 'i' ')' | rat
//! rat    := int ('/' nat)?
//! ```

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Monomial, PolyError, Polynomial, Ring};
use crate::coeff::GaussianRational;

pub fn parse_poly(text: &str, ring: &Arc<Ring>) -> Result<Polynomial, PolyError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ring,
    };
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
    ring: &'a Arc<Ring>,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Syntax {
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let negate_first = self.eat(b'-');
        let mut acc = self.term()?;
        if negate_first {
            acc = -acc;
        }
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

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        let base = match self.peek() {
            None => return Err(self.err("unexpected end of input")),
            Some(b'(') => {
                let save = self.pos;
                match self.complex_coeff() {
                    Some(c) => Polynomial::constant(self.ring, c?),
                    None => {
                        self.pos = save + 1;
                        let inner = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.err("expected `)`"));
                        }
                        inner
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => Polynomial::constant(self.ring, self.rat()?.into()),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.variable()?,
            Some(_) => return Err(self.err("expected a number, variable or `(`")),
        };
        if self.eat(b'^') {
            let e = self.nat()?;
            let e = u32::try_from(&e).map_err(|_| self.err("exponent too large"))?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    /// Tries `(rat ± rat i)`; returns `None` (without consuming) if the input
    /// does not have that shape, so the caller can parse a parenthesised expression.
    fn complex_coeff(&mut self) -> Option<Result<GaussianRational, PolyError>> {
        let start = self.pos;
        let restore = |p: &mut Self| {
            p.pos = start;
            None
        };
        if !self.eat(b'(') {
            return restore(self);
        }
        let re_neg = self.eat(b'-');
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return restore(self);
        }
        let re = match self.rat() {
            Ok(r) => r,
            Err(e) => return Some(Err(e)),
        };
        let im_neg = if self.eat(b'+') {
            false
        } else if self.eat(b'-') {
            true
        } else {
            return restore(self);
        };
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return restore(self);
        }
        let im = match self.rat() {
            Ok(r) => r,
            Err(e) => return Some(Err(e)),
        };
        // `i` must be a standalone token directly after the imaginary part.
        if self.peek() != Some(b'i') {
            return restore(self);
        }
        let after = self.src.get(self.pos + 1).copied();
        if matches!(after, Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            return restore(self);
        }
        self.pos += 1;
        if !self.eat(b')') {
            return restore(self);
        }
        let re = if re_neg { -re } else { re };
        let im = if im_neg { -im } else { im };
        Some(Ok(GaussianRational::new(re, im)))
    }

    fn nat(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digit string parses"))
    }

    fn rat(&mut self) -> Result<BigRational, PolyError> {
        let num = self.nat()?;
        if self.eat(b'/') {
            let at = {
                self.skip_ws();
                self.pos
            };
            let den = self.nat()?;
            if den.is_zero() {
                return Err(PolyError::ZeroDenominator { pos: at });
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    fn variable(&mut self) -> Result<Polynomial, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        match self.ring.index_of(name) {
            Some(i) => Ok(Polynomial::var(self.ring, i)),
            None => Err(PolyError::UnknownVariable {
                name: name.to_string(),
                pos: start,
            }),
        }
    }
}

fn write_monomial(m: &Monomial, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{}", names[i])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

pub(super) fn write_poly(p: &Polynomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    let names = p.ring().names();
    for (idx, (m, c)) in p.terms().iter().enumerate() {
        let negative = c.is_real() && c.re().is_negative();
        if idx == 0 {
            if negative {
                write!(f, "-")?;
            }
        } else if negative {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let shown = if negative { -c } else { c.clone() };
        if m.is_one() {
            write!(f, "{shown}")?;
        } else {
            if !shown.is_one() {
                write!(f, "{shown}*")?;
            }
            write_monomial(m, names, f)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<Ring> {
        Ring::new(&["z", "w"]).unwrap()
    }

    #[test]
    fn parses_and_prints_canonically() {
        let r = ring();
        let p = parse_poly("w^3 + w*z^5", &r).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.to_string(), "z^5*w + w^3");
        assert_eq!(parse_poly("z^2", &r).unwrap().to_string(), "z^2");
        let q = parse_poly("3*z^2*w - 1/2*w", &r).unwrap();
        assert_eq!(q.to_string(), "3*z^2*w - 1/2*w");
    }

    #[test]
    fn complex_coefficients() {
        let r = ring();
        let p = parse_poly("(1/2+3/4i)*z*w", &r).unwrap();
        assert_eq!(p.len(), 1);
        let c = &p.terms()[0].1;
        assert_eq!(c.re(), &BigRational::new(1.into(), 2.into()));
        assert_eq!(c.im(), &BigRational::new(3.into(), 4.into()));
        assert_eq!(p.to_string(), "(1/2+3/4i)*z*w");
        let q = parse_poly("(1+2)*z", &r).unwrap();
        assert_eq!(q.to_string(), "3*z");
        let neg = parse_poly("(-1-1i)", &r).unwrap();
        assert_eq!(neg.to_string(), "(-1-1i)");
    }

    #[test]
    fn parenthesised_powers_expand() {
        let r = ring();
        assert_eq!(
            parse_poly("(z+w)^2", &r).unwrap(),
            parse_poly("z^2 + 2*z*w + w^2", &r).unwrap()
        );
        assert_eq!(parse_poly("-z + z", &r).unwrap().to_string(), "0");
    }

    #[test]
    fn errors_carry_positions() {
        let r = ring();
        assert!(matches!(
            parse_poly("z + x", &r),
            Err(PolyError::UnknownVariable { pos: 4, .. })
        ));
        assert!(matches!(
            parse_poly("1/0*z", &r),
            Err(PolyError::ZeroDenominator { pos: 2 })
        ));
        assert!(matches!(parse_poly("z +", &r), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_poly("z w", &r), Err(PolyError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_poly("(z", &r), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn print_parse_round_trip() {
        let r = ring();
        for s in ["-z^2 + (2-1i)*z*w - 7/3", "z", "1", "-1", "(0+1i)*w^4"] {
            let p = parse_poly(s, &r).unwrap();
            let again = parse_poly(&p.to_string(), &r).unwrap();
            assert_eq!(p, again, "{s}");
            assert_eq!(p.to_string(), again.to_string());
        }
    }
}
