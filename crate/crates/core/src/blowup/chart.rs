//! Affine charts of the blowup of `V` along the fixed locus of a subtorus,
//! and intrinsic ideals on them.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::groebner::{eliminate, saturate, Budget, GroebnerBasis, Ideal};
use crate::poly::{Monomial, MultiPoly, Ring};
use crate::torus::{decompose, fixed_locus, Subtorus, WeightMatrix};

/// One chart, indexed by a moving coordinate `x_k` (the pivot). Chart
/// coordinates sit at the positions of the parent coordinates they replace:
/// `xi` at `k`, `T_i` at each other moving `i`, fixed coordinates unchanged.
#[derive(Clone, Debug)]
pub struct BlowupChart {
    pub name: String,
    pub parent: Ring,
    pub center: Subtorus,
    pub pivot: usize,
    pub moving: Vec<usize>,
    pub ring: Ring,
    /// Image of each parent coordinate under the blowup map.
    pub images: Vec<MultiPoly>,
    pub weights: WeightMatrix,
}

impl BlowupChart {
    /// Position of the exceptional coordinate `xi`.
    pub fn exceptional(&self) -> usize {
        self.pivot
    }

    pub fn xi(&self) -> MultiPoly {
        self.ring.var(self.pivot)
    }

    pub fn is_moving(&self, i: usize) -> bool {
        self.moving.contains(&i)
    }

    pub fn pullback(&self, p: &MultiPoly) -> MultiPoly {
        p.substitute(&self.images, &self.ring)
    }

    /// Images of the parent coordinates as exponent vectors.
    pub fn monomial_images(&self) -> Vec<Monomial> {
        self.images
            .iter()
            .map(|p| {
                p.terms()
                    .keys()
                    .next()
                    .expect("coordinate images are monomials")
                    .clone()
            })
            .collect()
    }

    pub fn pullback_monomial(&self, m: &Monomial) -> Monomial {
        let imgs = self.monomial_images();
        let mut out = Monomial::one(self.ring.nvars());
        for (i, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                out = out.mul(&imgs[i]);
            }
        }
        out
    }

    pub fn exceptional_divide(&self, p: &MultiPoly) -> Result<MultiPoly> {
        exceptional_divide(p, self)
    }
}

/// The charts of the blowup along `V^R`, one per `R`-moving coordinate.
pub fn make_charts(ring: &Ring, w: &WeightMatrix, r: &Subtorus) -> Result<Vec<BlowupChart>> {
    if w.n() != ring.nvars() {
        return Err(Error::precondition(
            "weight matrix and ring disagree on the number of variables",
        ));
    }
    let moving = fixed_locus(w, r);
    if moving.is_empty() {
        return Err(Error::EmptyBlowup);
    }
    let names = ring.vars();
    let mut charts = Vec::new();
    for &k in &moving {
        let mut taken: HashSet<String> = (0..ring.nvars())
            .filter(|i| !moving.contains(i))
            .map(|i| names[i].clone())
            .collect();
        let mut fresh = |base: String| {
            let mut c = base.clone();
            let mut j = 1;
            while taken.contains(&c) {
                c = format!("{base}_{j}");
                j += 1;
            }
            taken.insert(c.clone());
            c
        };
        let mut chart_names = names.to_vec();
        chart_names[k] = fresh(format!("xi_{}", names[k]));
        for &i in &moving {
            if i != k {
                chart_names[i] = fresh(format!("T_{}", names[i]));
            }
        }
        let cring = Ring::new(&chart_names)?;
        let xi = cring.var(k);
        let images: Vec<MultiPoly> = (0..ring.nvars())
            .map(|i| {
                if i == k || !moving.contains(&i) {
                    cring.var(i)
                } else {
                    &xi * &cring.var(i)
                }
            })
            .collect();
        let wk = w.column(k);
        let cols: Vec<Vec<i64>> = (0..ring.nvars())
            .map(|i| {
                let c = w.column(i);
                if i != k && moving.contains(&i) {
                    c.iter().zip(&wk).map(|(a, b)| a - b).collect()
                } else {
                    c
                }
            })
            .collect();
        charts.push(BlowupChart {
            name: format!("chart_{}", names[k]),
            parent: ring.clone(),
            center: r.clone(),
            pivot: k,
            moving: moving.clone(),
            ring: cring,
            images,
            weights: WeightMatrix::from_columns(w.k(), &cols),
        });
    }
    Ok(charts)
}

/// `p / xi` for the pullback `p` of a moving element.
pub fn exceptional_divide(p: &MultiPoly, chart: &BlowupChart) -> Result<MultiPoly> {
    p.div_var_power(chart.pivot, 1).ok_or_else(|| {
        Error::theorem(
            "xi-divisibility",
            format!(
                "pullback {p} of a moving element is not divisible by {}",
                chart.ring.vars()[chart.pivot]
            ),
        )
    })
}

/// Fails unless every `R`-isotypic piece of every generator lies in `I`.
pub fn check_invariant(
    ideal: &Ideal,
    w: &WeightMatrix,
    r: &Subtorus,
    budget: Budget,
) -> Result<()> {
    let rw = w.restrict(r);
    let mut gb: Option<GroebnerBasis> = None;
    for g in ideal.gens() {
        let pieces = decompose(g, &rw);
        if pieces.len() < 2 {
            continue;
        }
        if gb.is_none() {
            gb = Some(ideal.gb(budget)?);
        }
        for piece in pieces {
            if !gb.as_ref().unwrap().contains(&piece.part) {
                return Err(Error::precondition(format!(
                    "ideal is not invariant: the weight {:?} piece {} of {} is not in the ideal",
                    piece.weight, piece.part, g
                )));
            }
        }
    }
    Ok(())
}

/// The intrinsic ideal on one chart together with its reduced basis.
#[derive(Clone, Debug)]
pub struct IntrinsicIdeal {
    pub ideal: Ideal,
    pub gb: GroebnerBasis,
    /// Exceptional divisions performed (all of them succeeded).
    pub divisions: usize,
}

/// Pullbacks of the fixed pieces and `xi^{-1}` times pullbacks of the
/// moving pieces of a weight-homogeneous generating set.
pub fn intrinsic_ideal(
    ideal: &Ideal,
    chart: &BlowupChart,
    w: &WeightMatrix,
    r: &Subtorus,
    budget: Budget,
) -> Result<IntrinsicIdeal> {
    check_invariant(ideal, w, r, budget)?;
    let rw = w.restrict(r);
    let mut gens = Vec::new();
    let mut divisions = 0;
    for g in ideal.gens() {
        for piece in decompose(g, &rw) {
            let pulled = chart.pullback(&piece.part);
            if piece.weight.iter().all(|&x| x == 0) {
                gens.push(pulled);
            } else {
                gens.push(exceptional_divide(&pulled, chart)?);
                divisions += 1;
            }
        }
    }
    let ideal = Ideal::new(&chart.ring, gens);
    let gb = ideal.gb(budget)?;
    Ok(IntrinsicIdeal {
        ideal,
        gb,
        divisions,
    })
}

/// Compare two charts' ideals on their overlap. Chart `b`'s coordinates
/// are written in chart `a`'s with `s = 1/T_{k,l}`, `s` is eliminated, and
/// the result is compared with `I_a` saturated by `T_{k,l}`.
pub fn charts_glue(
    a: &BlowupChart,
    ia: &Ideal,
    b: &BlowupChart,
    ib: &Ideal,
    budget: Budget,
) -> Result<bool> {
    let (k, l) = (a.pivot, b.pivot);
    if a.parent != b.parent || a.moving != b.moving || k == l {
        return Err(Error::precondition(
            "charts_glue needs two distinct charts of one blowup",
        ));
    }
    let s = a.ring.fresh_name("s");
    let big = a.ring.extend(&[s.clone()])?;
    let sv = big.var(a.ring.nvars());
    let images: Vec<MultiPoly> = (0..b.ring.nvars())
        .map(|p| {
            if p == l {
                &big.var(k) * &big.var(l)
            } else if p == k {
                sv.clone()
            } else if a.moving.contains(&p) {
                &big.var(p) * &sv
            } else {
                big.var(p)
            }
        })
        .collect();
    let mut gens: Vec<MultiPoly> = ib
        .gens()
        .iter()
        .map(|g| g.substitute(&images, &big))
        .collect();
    gens.push(&(&sv * &big.var(l)) - &big.one());
    let moved = eliminate(&Ideal::new(&big, gens), &[s], budget)?.to_ring(&a.ring)?;
    let here = saturate(ia, &a.ring.var(l), budget)?;
    Ok(moved.gb(budget)?.basis() == here.gb(budget)?.basis())
}

/// Whether every term of `p` has weight `target` under `w`.
pub(crate) fn has_weight(p: &MultiPoly, w: &WeightMatrix, target: &[i64]) -> bool {
    p.terms().keys().all(|m| w.exponent_weight(m) == target)
}
