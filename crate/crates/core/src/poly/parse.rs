use num_bigint::BigInt;
use num_traits::Zero;

use super::{MultiPoly, Rational, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i]
                .parse()
                .map_err(|_| err(start, "bad integer"))?;
            out.push((start, Tok::Num(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(err(i, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    ring: &'a Ring,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = if self.eat('-') {
            -self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.factor()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                let at = self.offset();
                self.pos += 1;
                let d = self.factor()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(err(at, "division only by nonzero constants"));
                }
                acc = acc.scale(&d.constant_term().recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if self.eat('^') {
            let at = self.offset();
            if self.peek() == Some(&Tok::Op('-')) {
                return Err(err(at, "negative exponent"));
            }
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| err(at, "exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(err(at, "expected integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.ring, Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match self.ring.index_of(&name) {
                    Some(i) => Ok(self.ring.var(i)),
                    None => Err(err(at, format!("undeclared variable `{name}`"))),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(err(self.offset(), "expected `)`"));
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => Err(err(at, format!("unexpected `{c}`"))),
            None => Err(err(at, "unexpected end of input")),
        }
    }
}

/// Parse a polynomial over `ring`. Accepts `+ - * / ^` and parentheses;
/// division is only allowed by nonzero constants.
pub fn parse_poly(text: &str, ring: &Ring) -> Result<MultiPoly> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        ring,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(p.offset(), "trailing input"));
    }
    debug_assert!(out.terms().values().all(|c| !c.is_zero()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{frac, rat, Monomial};

    fn xyz() -> Ring {
        Ring::new(&["x", "y", "z"]).unwrap()
    }

    #[test]
    fn parses_spec_forms() {
        let r = xyz();
        let p = parse_poly("x*y - 2*z^2", &r).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&Monomial(vec![1, 1, 0])), rat(1));
        assert_eq!(p.coeff(&Monomial(vec![0, 0, 2])), rat(-2));
        assert!(parse_poly("0", &r).unwrap().terms().is_empty());
        assert_eq!(parse_poly("x*y*z", &r).unwrap().num_terms(), 1);
        let q = parse_poly("3/4*x - (y + z)^2", &r).unwrap();
        assert_eq!(q.coeff(&Monomial(vec![1, 0, 0])), frac(3, 4));
        assert_eq!(q.coeff(&Monomial(vec![0, 1, 1])), rat(-2));
    }

    #[test]
    fn errors_carry_positions() {
        let r = xyz();
        match parse_poly("x + w", &r) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse_poly("x^-2", &r) {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 2);
                assert!(msg.contains("negative"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_poly("x +", &r),
            Err(Error::Parse { pos: 3, .. })
        ));
        assert!(matches!(
            parse_poly("x y", &r),
            Err(Error::Parse { pos: 2, .. })
        ));
        assert!(matches!(
            parse_poly("x / y", &r),
            Err(Error::Parse { pos: 2, .. })
        ));
        assert!(matches!(parse_poly("(x", &r), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_poly("x # y", &r),
            Err(Error::Parse { pos: 2, .. })
        ));
        assert!(matches!(
            parse_poly("", &r),
            Err(Error::Parse { pos: 0, .. })
        ));
    }
}
