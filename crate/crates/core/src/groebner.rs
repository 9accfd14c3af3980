//! Ideals, reduced Groebner bases (Buchberger with sugar selection and the
//! Gebauer-Moeller criteria), normal forms, membership certificates,
//! saturation and elimination.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Monomial, MonomialOrder, MultiPoly, Rational, Ring};

/// Resource caps for one Groebner basis computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_basis: usize,
    pub max_degree: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_basis: 2000,
            max_degree: 40,
        }
    }
}

impl Budget {
    pub fn with_max_basis(max_basis: usize) -> Self {
        Budget {
            max_basis,
            ..Budget::default()
        }
    }
}

/// A finitely generated ideal. Zero generators are dropped on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    ring: Ring,
    gens: Vec<MultiPoly>,
}

impl Ideal {
    pub fn new(ring: &Ring, gens: impl IntoIterator<Item = MultiPoly>) -> Self {
        let gens: Vec<MultiPoly> = gens
            .into_iter()
            .filter(|g| !g.is_zero())
            .inspect(|g| assert!(g.ring() == ring, "generator from a different ring"))
            .collect();
        Ideal {
            ring: ring.clone(),
            gens,
        }
    }

    pub fn zero(ring: &Ring) -> Self {
        Ideal::new(ring, [])
    }

    pub fn unit(ring: &Ring) -> Self {
        Ideal::new(ring, [ring.one()])
    }

    pub fn parse<S: AsRef<str>>(ring: &Ring, gens: &[S]) -> Result<Self> {
        let gens = gens
            .iter()
            .map(|g| ring.parse(g.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(ring, gens))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn gens(&self) -> &[MultiPoly] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        assert!(self.ring == other.ring);
        Ideal::new(&self.ring, self.gens.iter().chain(&other.gens).cloned())
    }

    pub fn product(&self, other: &Ideal) -> Ideal {
        assert!(self.ring == other.ring);
        let mut g = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                g.push(a * b);
            }
        }
        Ideal::new(&self.ring, g)
    }

    pub fn square(&self) -> Ideal {
        let mut g = Vec::new();
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i..] {
                g.push(a * b);
            }
        }
        Ideal::new(&self.ring, g)
    }

    pub fn to_ring(&self, target: &Ring) -> Result<Ideal> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.to_ring(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(target, gens))
    }

    pub fn groebner(&self, order: MonomialOrder, budget: Budget) -> Result<GroebnerBasis> {
        Ok(buchberger_impl(self, order, budget, false)?.0)
    }

    pub fn gb(&self, budget: Budget) -> Result<GroebnerBasis> {
        self.groebner(MonomialOrder::DegRevLex, budget)
    }
}

/// A reduced Groebner basis: monic, minimal, tail reduced, sorted by
/// ascending leading monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Ring,
    order: MonomialOrder,
    basis: Vec<MultiPoly>,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn basis(&self) -> &[MultiPoly] {
        &self.basis
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn ideal(&self) -> Ideal {
        Ideal::new(&self.ring, self.basis.iter().cloned())
    }

    pub fn normal_form(&self, p: &MultiPoly) -> MultiPoly {
        assert!(p.ring() == &self.ring, "ring mismatch in normal_form");
        let reducers: Vec<Dp> = self
            .basis
            .iter()
            .map(|g| Dp::from_poly(g, self.order))
            .collect();
        let (r, _) = reduce_full(Dp::from_poly(p, self.order), &reducers, self.order, false);
        r.to_poly(&self.ring)
    }

    pub fn contains(&self, p: &MultiPoly) -> bool {
        self.normal_form(p).is_zero()
    }

    pub fn contains_ideal(&self, i: &Ideal) -> bool {
        i.gens().iter().all(|g| self.contains(g))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.basis.iter().map(|g| g.to_string()).collect()
    }
}

/// Distributive representation: terms sorted ascending, leading term last.
#[derive(Clone, Debug)]
struct Dp {
    terms: Vec<(Monomial, Rational)>,
}

impl Dp {
    fn from_poly(p: &MultiPoly, order: MonomialOrder) -> Dp {
        let mut terms: Vec<_> = p
            .terms()
            .iter()
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        terms.sort_by(|a, b| order.cmp(&a.0, &b.0));
        Dp { terms }
    }

    fn to_poly(&self, ring: &Ring) -> MultiPoly {
        MultiPoly::from_terms(ring, self.terms.iter().cloned())
    }

    fn lm(&self) -> &Monomial {
        &self.terms.last().unwrap().0
    }

    fn lc(&self) -> &Rational {
        &self.terms.last().unwrap().1
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    fn scale(&mut self, c: &Rational) {
        for t in &mut self.terms {
            t.1 *= c;
        }
    }

    /// `self - c * m * other`
    fn sub_scaled(&self, c: &Rational, m: &Monomial, other: &Dp, order: MonomialOrder) -> Dp {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        let shifted = |k: usize| -> (Monomial, Rational) {
            let (om, oc) = &other.terms[k];
            (om.mul(m), -(oc * c))
        };
        while i < self.terms.len() || j < other.terms.len() {
            if j == other.terms.len() {
                out.push(self.terms[i].clone());
                i += 1;
                continue;
            }
            let b = shifted(j);
            if i == self.terms.len() {
                out.push(b);
                j += 1;
                continue;
            }
            match order.cmp(&self.terms[i].0, &b.0) {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &self.terms[i].1 + b.1;
                    if !s.is_zero() {
                        out.push((b.0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Dp { terms: out }
    }
}

struct Step {
    reducer: usize,
    coeff: Rational,
    mono: Monomial,
}

/// Full reduction of `p` modulo `reducers`. Returns the remainder and, when
/// requested, the list of reduction steps.
fn reduce_full(mut p: Dp, reducers: &[Dp], order: MonomialOrder, record: bool) -> (Dp, Vec<Step>) {
    let mut rem: Vec<(Monomial, Rational)> = Vec::new();
    let mut steps = Vec::new();
    while !p.is_zero() {
        let lm = p.lm().clone();
        let hit = reducers
            .iter()
            .enumerate()
            .find(|(_, g)| !g.is_zero() && g.lm().divides(&lm));
        match hit {
            Some((j, g)) => {
                let c = p.lc() / g.lc();
                let m = g.lm().quotient_of(&lm).unwrap();
                p = p.sub_scaled(&c, &m, g, order);
                if record {
                    steps.push(Step {
                        reducer: j,
                        coeff: c,
                        mono: m,
                    });
                }
            }
            None => rem.push(p.terms.pop().unwrap()),
        }
    }
    rem.reverse();
    (Dp { terms: rem }, steps)
}

struct Elem {
    poly: Dp,
    sugar: u32,
    cof: Vec<MultiPoly>,
    active: bool,
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

struct Engine<'a> {
    ring: &'a Ring,
    order: MonomialOrder,
    budget: Budget,
    track: bool,
    ngens: usize,
    elems: Vec<Elem>,
    pairs: Vec<Pair>,
}

impl<'a> Engine<'a> {
    fn apply_steps(&self, cof: &mut Vec<MultiPoly>, steps: &[Step]) {
        for s in steps {
            let src = &self.elems[s.reducer].cof;
            for (c, g) in cof.iter_mut().zip(src) {
                *c = &*c - &g.mul_monomial(&s.mono, &s.coeff);
            }
        }
    }

    fn active_reducers(&self) -> Vec<Dp> {
        self.elems
            .iter()
            .map(|e| {
                if e.active {
                    e.poly.clone()
                } else {
                    Dp { terms: Vec::new() }
                }
            })
            .collect()
    }

    fn reduce(&self, p: Dp, cof: &mut Vec<MultiPoly>) -> Dp {
        let reducers = self.active_reducers();
        let (r, steps) = reduce_full(p, &reducers, self.order, self.track);
        if self.track {
            self.apply_steps(cof, &steps);
        }
        r
    }

    fn normalize(&self, p: &mut Dp, cof: &mut [MultiPoly]) {
        if p.is_zero() {
            return;
        }
        let inv = p.lc().recip();
        if inv.is_one() {
            return;
        }
        p.scale(&inv);
        for c in cof.iter_mut() {
            *c = c.scale(&inv);
        }
    }

    fn check_budget(&self, p: &Dp) -> Result<()> {
        let live = self.elems.iter().filter(|e| e.active).count();
        if live + 1 > self.budget.max_basis {
            return Err(Error::Budget(format!(
                "basis would exceed {} polynomials",
                self.budget.max_basis
            )));
        }
        let d = p.degree();
        if d > self.budget.max_degree {
            return Err(Error::Budget(format!(
                "basis element of degree {d} exceeds cap {}",
                self.budget.max_degree
            )));
        }
        Ok(())
    }

    /// Gebauer-Moeller update for a new element at index `h`.
    fn insert(&mut self, h: usize) {
        let lh = self.elems[h].poly.lm().clone();
        let sh = self.elems[h].sugar;
        let candidates: Vec<Pair> = (0..h)
            .filter(|&g| self.elems[g].active)
            .map(|g| {
                let lg = self.elems[g].poly.lm();
                let lcm = lh.lcm(lg);
                let sugar = (sh + lcm.degree() - lh.degree())
                    .max(self.elems[g].sugar + lcm.degree() - lg.degree());
                Pair {
                    i: g,
                    j: h,
                    lcm,
                    sugar,
                }
            })
            .collect();

        // Criterion M: drop pairs whose lcm is properly divided by another lcm.
        let survivors: Vec<&Pair> = candidates
            .iter()
            .filter(|p| {
                !candidates
                    .iter()
                    .any(|q| q.lcm != p.lcm && q.lcm.divides(&p.lcm))
            })
            .collect();
        // Criterion F plus the product criterion: one pair per lcm class,
        // and none if some pair of the class has coprime leading monomials.
        let mut kept: Vec<Pair> = Vec::new();
        let mut seen: BTreeSet<Monomial> = BTreeSet::new();
        for p in &survivors {
            if !seen.insert(p.lcm.clone()) {
                continue;
            }
            let class_coprime = survivors
                .iter()
                .filter(|q| q.lcm == p.lcm)
                .any(|q| self.elems[q.i].poly.lm().coprime(&lh));
            if !class_coprime {
                kept.push((*p).clone());
            }
        }

        // Old pairs made redundant by h.
        let elems = &self.elems;
        self.pairs.retain(|p| {
            if !lh.divides(&p.lcm) {
                return true;
            }
            let li = lh.lcm(elems[p.i].poly.lm());
            let lj = lh.lcm(elems[p.j].poly.lm());
            li == p.lcm || lj == p.lcm
        });
        self.pairs.extend(kept);

        for g in 0..h {
            if self.elems[g].active && lh.divides(self.elems[g].poly.lm()) {
                self.elems[g].active = false;
            }
        }
    }

    fn add(&mut self, poly: Dp, sugar: u32, cof: Vec<MultiPoly>) -> Result<Option<usize>> {
        if poly.is_zero() {
            return Ok(None);
        }
        self.check_budget(&poly)?;
        self.elems.push(Elem {
            poly,
            sugar,
            cof,
            active: true,
        });
        let h = self.elems.len() - 1;
        self.insert(h);
        Ok(Some(h))
    }

    fn pick(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let order = self.order;
        let (best, _) = self.pairs.iter().enumerate().min_by(|(_, a), (_, b)| {
            a.sugar
                .cmp(&b.sugar)
                .then_with(|| order.cmp(&a.lcm, &b.lcm))
                .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
        })?;
        Some(self.pairs.swap_remove(best))
    }

    fn unit_elem(&self) -> Option<usize> {
        self.elems
            .iter()
            .position(|e| e.active && e.poly.lm().is_one())
    }

    fn run(&mut self) -> Result<()> {
        while let Some(p) = self.pick() {
            if self.unit_elem().is_some() {
                break;
            }
            let (gi, gj) = (&self.elems[p.i], &self.elems[p.j]);
            let mi = gi.poly.lm().quotient_of(&p.lcm).unwrap();
            let mj = gj.poly.lm().quotient_of(&p.lcm).unwrap();
            let ci = gj.poly.lc().clone();
            let cj = gi.poly.lc().clone();
            let zero = Dp { terms: Vec::new() };
            let s = zero
                .sub_scaled(&(-ci.clone()), &mi, &gi.poly, self.order)
                .sub_scaled(&cj, &mj, &gj.poly, self.order);
            let mut cof = Vec::new();
            if self.track {
                cof = gi
                    .cof
                    .iter()
                    .zip(&gj.cof)
                    .map(|(a, b)| &a.mul_monomial(&mi, &ci) - &b.mul_monomial(&mj, &cj))
                    .collect();
            }
            let mut r = self.reduce(s, &mut cof);
            self.normalize(&mut r, &mut cof);
            self.add(r, p.sugar, cof)?;
        }
        Ok(())
    }

    /// Minimal, tail reduced, monic basis with cofactors.
    fn finish(mut self) -> (Vec<MultiPoly>, Vec<Vec<MultiPoly>>) {
        if let Some(u) = self.unit_elem() {
            let e = &self.elems[u];
            let c = e.poly.lc().recip();
            let cof = e.cof.iter().map(|p| p.scale(&c)).collect();
            return (vec![self.ring.one()], vec![cof]);
        }
        let live: Vec<usize> = (0..self.elems.len())
            .filter(|&i| self.elems[i].active)
            .collect();
        // Minimize: drop elements whose leading monomial is divisible by another.
        let mut keep: Vec<usize> = Vec::new();
        for &i in &live {
            let li = self.elems[i].poly.lm();
            let redundant = live.iter().any(|&j| {
                j != i && {
                    let lj = self.elems[j].poly.lm();
                    lj.divides(li) && (lj != li || j < i)
                }
            });
            if !redundant {
                keep.push(i);
            }
        }
        for e in self.elems.iter_mut() {
            e.active = false;
        }
        for &i in &keep {
            self.elems[i].active = true;
        }
        let mut out_polys = Vec::new();
        for &i in &keep {
            let lead = self.elems[i].poly.terms.last().unwrap().clone();
            let mut tail = self.elems[i].poly.clone();
            tail.terms.pop();
            let mut cof = self.elems[i].cof.clone();
            let mut red = self.reduce(tail, &mut cof);
            red.terms.push(lead);
            self.normalize(&mut red, &mut cof);
            out_polys.push((red, cof));
        }
        let order = self.order;
        out_polys.sort_by(|a, b| order.cmp(a.0.lm(), b.0.lm()));
        out_polys
            .into_iter()
            .map(|(p, c)| (p.to_poly(self.ring), c))
            .unzip()
    }
}

fn buchberger_impl(
    ideal: &Ideal,
    order: MonomialOrder,
    budget: Budget,
    track: bool,
) -> Result<(GroebnerBasis, Vec<Vec<MultiPoly>>)> {
    let ring = ideal.ring();
    let ngens = ideal.gens().len();
    let mut eng = Engine {
        ring,
        order,
        budget,
        track,
        ngens,
        elems: Vec::new(),
        pairs: Vec::new(),
    };
    for (k, g) in ideal.gens().iter().enumerate() {
        let mut cof = Vec::new();
        if track {
            cof = (0..eng.ngens)
                .map(|i| if i == k { ring.one() } else { ring.zero() })
                .collect();
        }
        let sugar = g.total_degree().unwrap_or(0);
        let dp = Dp::from_poly(g, order);
        if dp.degree() > budget.max_degree {
            return Err(Error::Budget(format!(
                "input of degree {} exceeds cap {}",
                dp.degree(),
                budget.max_degree
            )));
        }
        let mut r = eng.reduce(dp, &mut cof);
        eng.normalize(&mut r, &mut cof);
        eng.add(r, sugar, cof)?;
    }
    eng.run()?;
    let (basis, cofs) = eng.finish();
    Ok((
        GroebnerBasis {
            ring: ring.clone(),
            order,
            basis,
        },
        cofs,
    ))
}

/// Reduced Groebner basis of `ideal` in `order`.
pub fn buchberger(ideal: &Ideal, order: MonomialOrder, budget: Budget) -> Result<GroebnerBasis> {
    ideal.groebner(order, budget)
}

pub fn normal_form(p: &MultiPoly, gb: &GroebnerBasis) -> MultiPoly {
    gb.normal_form(p)
}

/// Equality of ideals, decided by comparing reduced Groebner bases.
pub fn ideal_equal(i: &Ideal, j: &Ideal, order: MonomialOrder, budget: Budget) -> Result<bool> {
    if i.ring() != j.ring() {
        return Err(Error::precondition("ideal_equal: rings differ"));
    }
    Ok(i.groebner(order, budget)?.basis == j.groebner(order, budget)?.basis)
}

/// Quotients `q` with `p = sum q_i * g_i` over the generators of `ideal`, or
/// `None` when `p` is not a member. The result is re-expanded and checked.
pub fn lift_certificate(
    p: &MultiPoly,
    ideal: &Ideal,
    budget: Budget,
) -> Result<Option<Vec<MultiPoly>>> {
    let ring = ideal.ring();
    let n = ideal.gens().len();
    if p.is_zero() {
        return Ok(Some(vec![ring.zero(); n]));
    }
    let order = MonomialOrder::DegRevLex;
    let (gb, cofs) = buchberger_impl(ideal, order, budget, true)?;
    let reducers: Vec<Dp> = gb.basis.iter().map(|g| Dp::from_poly(g, order)).collect();
    let (r, steps) = reduce_full(Dp::from_poly(p, order), &reducers, order, true);
    if !r.is_zero() {
        return Ok(None);
    }
    let mut q = vec![ring.zero(); n];
    for s in &steps {
        for (qi, c) in q.iter_mut().zip(&cofs[s.reducer]) {
            *qi = &*qi + &c.mul_monomial(&s.mono, &s.coeff);
        }
    }
    let mut back = ring.zero();
    for (qi, g) in q.iter().zip(ideal.gens()) {
        back = &back + &(qi * g);
    }
    if &back != p {
        return Err(Error::theorem(
            "lift-certificate",
            format!("re-expansion gives {back}, expected {p}"),
        ));
    }
    Ok(Some(q))
}

/// `I : h^inf`, via elimination of `t` from `I + (t*h - 1)`.
pub fn saturate(ideal: &Ideal, h: &MultiPoly, budget: Budget) -> Result<Ideal> {
    if h.is_zero() {
        return Err(Error::precondition("saturate: h must be nonzero"));
    }
    let ring = ideal.ring();
    if h.is_constant() {
        return Ok(ideal.groebner(MonomialOrder::DegRevLex, budget)?.ideal());
    }
    let t = ring.fresh_name("t");
    let mut names = vec![t];
    names.extend(ring.vars().iter().cloned());
    let big = Ring::new(&names)?;
    let mut gens = ideal
        .gens()
        .iter()
        .map(|g| g.to_ring(&big))
        .collect::<Result<Vec<_>>>()?;
    gens.push(&(&big.var(0) * &h.to_ring(&big)?) - &big.one());
    let gb = Ideal::new(&big, gens).groebner(MonomialOrder::Elimination(1), budget)?;
    let kept = gb
        .basis()
        .iter()
        .filter(|g| !g.involves(0))
        .map(|g| g.to_ring(ring))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ideal::new(ring, kept))
}

/// `I` intersected with the polynomial ring in the remaining variables.
/// The result lives in that smaller ring.
pub fn eliminate<S: AsRef<str>>(ideal: &Ideal, vars: &[S], budget: Budget) -> Result<Ideal> {
    let ring = ideal.ring();
    let elim: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
    for v in &elim {
        ring.var_index(v)?;
    }
    let rest: Vec<String> = ring
        .vars()
        .iter()
        .filter(|v| !elim.contains(v))
        .cloned()
        .collect();
    let mut names = elim.clone();
    names.extend(rest.iter().cloned());
    let big = Ring::new(&names)?;
    let small = Ring::new(&rest)?;
    let m = elim.len();
    let gb = ideal
        .to_ring(&big)?
        .groebner(MonomialOrder::Elimination(m), budget)?;
    let kept = gb
        .basis()
        .iter()
        .filter(|g| (0..m).all(|i| !g.involves(i)))
        .map(|g| g.to_ring(&small))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ideal::new(&small, kept))
}

/// Independent check of the Groebner property and reducedness: every
/// S-polynomial reduces to zero, elements are monic and no term of any
/// element is divisible by the leading monomial of another.
pub fn verify_groebner(gb: &GroebnerBasis) -> bool {
    let order = gb.order;
    let ds: Vec<Dp> = gb.basis.iter().map(|g| Dp::from_poly(g, order)).collect();
    for (i, a) in ds.iter().enumerate() {
        if !a.lc().is_one() {
            return false;
        }
        for (j, b) in ds.iter().enumerate() {
            if i != j && a.terms.iter().any(|(m, _)| b.lm().divides(m)) {
                return false;
            }
        }
    }
    for i in 0..ds.len() {
        for j in (i + 1)..ds.len() {
            let lcm = ds[i].lm().lcm(ds[j].lm());
            let mi = ds[i].lm().quotient_of(&lcm).unwrap();
            let mj = ds[j].lm().quotient_of(&lcm).unwrap();
            let s = Dp { terms: Vec::new() }
                .sub_scaled(&-Rational::one(), &mi, &ds[i], order)
                .sub_scaled(&Rational::one(), &mj, &ds[j], order);
            if !reduce_full(s, &ds, order, false).0.is_zero() {
                return false;
            }
        }
    }
    true
}
