//! Sparse multivariate polynomials with exact rational coefficients.

mod order;
mod parse;

pub use order::{Monomial, MonomialOrder};
pub use parse::parse_poly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Ordered list of variable names. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Ring {
    vars: Arc<[String]>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for n in names {
            let n = n.as_ref();
            let ok = n
                .chars()
                .next()
                .map(|c| c.is_ascii_alphabetic() || c == '_')
                .unwrap_or(false)
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::precondition(format!("invalid variable name `{n}`")));
            }
            if !seen.insert(n.to_string()) {
                return Err(Error::precondition(format!("duplicate variable `{n}`")));
            }
        }
        Ok(Ring {
            vars: names.iter().map(|s| s.as_ref().to_string()).collect(),
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::precondition(format!("unknown variable `{name}`")))
    }

    pub fn var(&self, i: usize) -> MultiPoly {
        MultiPoly::monomial(self, Monomial::var(self.nvars(), i), Rational::one())
    }

    pub fn var_named(&self, name: &str) -> Result<MultiPoly> {
        Ok(self.var(self.var_index(name)?))
    }

    pub fn zero(&self) -> MultiPoly {
        MultiPoly::zero(self)
    }

    pub fn one(&self) -> MultiPoly {
        MultiPoly::constant(self, Rational::one())
    }

    pub fn parse(&self, text: &str) -> Result<MultiPoly> {
        parse_poly(text, self)
    }

    /// This ring with extra variables appended.
    pub fn extend<S: AsRef<str>>(&self, extra: &[S]) -> Result<Ring> {
        let mut names: Vec<String> = self.vars.to_vec();
        names.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Ring::new(&names)
    }

    /// A name not yet used in this ring, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        if self.index_of(base).is_none() {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|c| self.index_of(c).is_none())
            .unwrap()
    }
}

/// A polynomial over a [`Ring`]. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    ring: Ring,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(ring: &Ring) -> Self {
        MultiPoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, c: Rational) -> Self {
        Self::monomial(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.len(), ring.nvars(), "monomial length mismatch");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = MultiPoly::zero(ring);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Rational> {
        self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.ring.nvars()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    /// Terms sorted descending in `order`.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    /// Scale so that the leading coefficient in `order` is one.
    pub fn monic(&self, order: MonomialOrder) -> MultiPoly {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial_derivative(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.add_term(m2, c * rat(e as i64));
        }
        out
    }

    pub fn derivative(&self, var: &str) -> Result<MultiPoly> {
        Ok(self.partial_derivative(self.ring.var_index(var)?))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.ring.nvars() {
            return Err(Error::precondition(format!(
                "point has {} coordinates, ring has {} variables",
                point.len(),
                self.ring.nvars()
            )));
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Replace variable `i` by `images[i]`; all images share one target ring.
    pub fn substitute(&self, images: &[MultiPoly], target: &Ring) -> MultiPoly {
        assert_eq!(
            images.len(),
            self.ring.nvars(),
            "substitution arity mismatch"
        );
        let mut powers: Vec<Vec<MultiPoly>> = vec![vec![target.one()]; images.len()];
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Set some variables to constants, staying in the same ring.
    pub fn specialize(&self, values: &[(usize, Rational)]) -> MultiPoly {
        let images: Vec<MultiPoly> = (0..self.ring.nvars())
            .map(|i| match values.iter().find(|(j, _)| *j == i) {
                Some((_, c)) => MultiPoly::constant(&self.ring, c.clone()),
                None => self.ring.var(i),
            })
            .collect();
        self.substitute(&images, &self.ring)
    }

    /// Move into `target` by matching variable names. Fails if a variable
    /// that occurs in `self` is missing from `target`.
    pub fn to_ring(&self, target: &Ring) -> Result<MultiPoly> {
        if &self.ring == target {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self
            .ring
            .vars()
            .iter()
            .map(|v| target.index_of(v))
            .collect();
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.nvars()];
            for (i, &x) in m.0.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e[j] += x,
                    None => {
                        return Err(Error::precondition(format!(
                            "variable `{}` does not exist in target ring",
                            self.ring.vars()[i]
                        )))
                    }
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Whether variable `i` occurs.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    /// Largest power of variable `i` dividing every term.
    pub fn var_valuation(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).min().unwrap_or(0)
    }

    /// Exact division by `x_i^e`, if every term is divisible.
    pub fn div_var_power(&self, i: usize, e: u32) -> Option<MultiPoly> {
        if e == 0 {
            return Some(self.clone());
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.0[i] < e {
                return None;
            }
            let mut m2 = m.clone();
            m2.0[i] -= e;
            terms.insert(m2, c.clone());
        }
        Some(MultiPoly {
            ring: self.ring.clone(),
            terms,
        })
    }

    fn check_ring(&self, other: &MultiPoly) {
        assert!(
            self.ring == other.ring,
            "ring mismatch: {:?} vs {:?}",
            self.ring.vars(),
            other.ring.vars()
        );
    }

    /// Canonical text in degrevlex, the same form accepted by the parser.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_ring(rhs);
        let mut out = MultiPoly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, ring: &Ring, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{}", ring.vars()[i])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self
            .sorted_terms(MonomialOrder::DegRevLex)
            .into_iter()
            .enumerate()
        {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write_monomial(f, &self.ring, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod strategies {
    use super::*;
    use proptest::prelude::*;

    pub fn rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| frac(n, d))
    }

    pub fn poly(ring: Ring, max_terms: usize, max_exp: u32) -> impl Strategy<Value = MultiPoly> {
        let n = ring.nvars();
        proptest::collection::vec(
            (proptest::collection::vec(0..=max_exp, n), rational()),
            0..=max_terms,
        )
        .prop_map(move |ts| {
            MultiPoly::from_terms(&ring, ts.into_iter().map(|(e, c)| (Monomial(e), c)))
        })
    }

    pub fn xyz() -> Ring {
        Ring::new(&["x", "y", "z"]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::strategies::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn derivative_examples() {
        let r = xyz();
        let p = r.parse("x*y*z").unwrap();
        assert_eq!(p.derivative("x").unwrap(), r.parse("y*z").unwrap());
        let r2 = Ring::new(&["x", "y"]).unwrap();
        let q = r2.parse("1/2*x^2*y^2").unwrap();
        assert_eq!(q.derivative("y").unwrap(), r2.parse("x^2*y").unwrap());
        assert!(r2.parse("7").unwrap().derivative("x").unwrap().is_zero());
        assert!(q.derivative("w").is_err());
    }

    #[test]
    fn evaluate_examples() {
        let r = xyz();
        let yz = r.parse("y*z").unwrap();
        assert_eq!(yz.evaluate(&[rat(1), rat(0), rat(0)]).unwrap(), rat(0));
        let r2 = Ring::new(&["x", "y"]).unwrap();
        assert_eq!(
            r2.parse("x*y")
                .unwrap()
                .evaluate(&[rat(2), rat(3)])
                .unwrap(),
            rat(6)
        );
        assert_eq!(
            r2.parse("x^2*y^2/2")
                .unwrap()
                .evaluate(&[rat(1), rat(0)])
                .unwrap(),
            rat(0)
        );
        assert!(yz.evaluate(&[rat(1)]).is_err());
    }

    #[test]
    fn display_is_degrevlex() {
        let r = xyz();
        let p = r.parse("-2*z^2 + y*x").unwrap();
        assert_eq!(p.to_string(), "x*y - 2*z^2");
        assert_eq!(r.parse("0").unwrap().to_string(), "0");
        assert_eq!(r.parse("-x + 1/3").unwrap().to_string(), "-x + 1/3");
    }

    #[test]
    fn substitution_and_division() {
        let r = Ring::new(&["x", "y"]).unwrap();
        let c = Ring::new(&["xi", "T"]).unwrap();
        let xi = c.var(0);
        let t = c.var(1);
        let img = vec![xi.clone(), &xi * &t];
        let p = r.parse("x*y").unwrap().substitute(&img, &c);
        assert_eq!(p, c.parse("xi^2*T").unwrap());
        assert_eq!(p.var_valuation(0), 2);
        assert_eq!(p.div_var_power(0, 1).unwrap(), c.parse("xi*T").unwrap());
        assert!(p.div_var_power(1, 2).is_none());
    }

    proptest! {
        #[test]
        fn ring_axioms(p in poly(xyz(), 5, 3), q in poly(xyz(), 5, 3), s in poly(xyz(), 5, 3)) {
            prop_assert_eq!(&(&p + &q) * &s, &(&p * &s) + &(&q * &s));
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p * &q) * &s, &p * &(&q * &s));
            prop_assert!((&p - &p).is_zero());
        }

        #[test]
        fn print_parse_roundtrip(p in poly(xyz(), 6, 4)) {
            let back = parse_poly(&p.to_string(), p.ring()).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn leibniz(p in poly(xyz(), 5, 3), q in poly(xyz(), 5, 3), v in 0usize..3) {
            let lhs = (&p * &q).partial_derivative(v);
            let rhs = &(&p.partial_derivative(v) * &q) + &(&p * &q.partial_derivative(v));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn schwarz(p in poly(xyz(), 6, 4), a in 0usize..3, b in 0usize..3) {
            prop_assert_eq!(
                p.partial_derivative(a).partial_derivative(b),
                p.partial_derivative(b).partial_derivative(a)
            );
        }

        #[test]
        fn evaluation_is_a_homomorphism(p in poly(xyz(), 4, 3), q in poly(xyz(), 4, 3),
                                        pt in proptest::collection::vec(rational(), 3)) {
            let pq = (&p * &q).evaluate(&pt).unwrap();
            prop_assert_eq!(pq, p.evaluate(&pt).unwrap() * q.evaluate(&pt).unwrap());
        }
    }
}
