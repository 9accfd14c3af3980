//! GIT stability on blowup charts.
//!
//! A chart of a Kirwan blowup along the fixed locus of `R` sees two kinds of
//! points. On the exceptional divisor (`xi = 0`) a point is semistable iff
//! its image in the projectivised normal fibre is Hilbert-Mumford semistable
//! for `R`. Off the divisor a point is unstable iff some one-parameter
//! subgroup of `R` drives it into an unstable point of the divisor. Points
//! over an unstable point of an earlier stage are unstable too; a
//! [`StabilityNode`] chains these rules back to the root.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::groebner::{Budget, GroebnerBasis, Ideal};
use crate::lp::{self, LinearSystem};
use crate::poly::{rat, Monomial, MultiPoly, Rational, Ring};

/// Whether the projective point with nonzero coordinates `support` is
/// semistable for fibre weights `weights` (one column per coordinate):
/// 0 lies in the convex hull of the weights on the support.
pub fn hm_fiber_semistable(support: &[usize], weights: &[Vec<i64>]) -> bool {
    let d = weights.first().map(Vec::len).unwrap_or(0);
    let pts: Vec<Vec<i64>> = support.iter().map(|&i| weights[i].clone()).collect();
    lp::zero_in_hull(&pts, d)
}

/// Limit as `t -> 0` of `lambda(t) . point` where coordinate `i` has weight
/// `weights[i]`: exists iff every coordinate with negative pairing vanishes.
pub fn one_ps_limit(
    point: &[Rational],
    lambda: &[i64],
    weights: &[Vec<i64>],
) -> Option<Vec<Rational>> {
    let mut out = Vec::with_capacity(point.len());
    for (p, w) in point.iter().zip(weights) {
        let s: i64 = lambda.iter().zip(w).map(|(a, b)| a * b).sum();
        if s < 0 && !p.is_zero() {
            return None;
        }
        out.push(if s > 0 { Rational::zero() } else { p.clone() });
    }
    Some(out)
}

/// The stability rule introduced by one blowup chart, in the coordinates of
/// the chart. `weights[i]` is the weight of parent coordinate `i` for the
/// blown-up subtorus (zero for fixed coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartRule {
    pub pivot: usize,
    pub moving: Vec<usize>,
    pub weights: Vec<Vec<i64>>,
}

/// A one-parameter subgroup exhibiting instability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Number of blowups between the root and the stage whose rule fails.
    pub level: usize,
    pub lambda: Vec<i64>,
    /// Parent coordinates that stay nonzero in the exceptional fibre limit.
    pub limit_support: Vec<usize>,
    /// The limit in the queried chart, when it exists there.
    pub limit: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub semistable: bool,
    pub witness: Option<Witness>,
}

impl ChartRule {
    fn rank(&self) -> usize {
        self.weights.first().map(Vec::len).unwrap_or(0)
    }

    fn fibre_points(&self, idx: &[usize]) -> Vec<Vec<i64>> {
        idx.iter().map(|&i| self.weights[i].clone()).collect()
    }

    /// The nonzero coordinates of the normal-fibre point over a chart point
    /// with this support (only meaningful off `xi = 0` for `M`).
    fn fibre_support(&self, support: &[usize]) -> Vec<usize> {
        let mut f = vec![self.pivot];
        f.extend(
            self.moving
                .iter()
                .copied()
                .filter(|&i| i != self.pivot && support.contains(&i)),
        );
        f.sort_unstable();
        f
    }

    /// A destabilizing subgroup for a chart point with this support, if
    /// the rule of this stage declares it unstable.
    pub fn destabilize(&self, support: &[usize]) -> Option<(Vec<i64>, Vec<usize>)> {
        let d = self.rank();
        let f = self.fibre_support(support);
        if !support.contains(&self.pivot) {
            if hm_fiber_semistable(&f, &self.weights) {
                return None;
            }
            let l = lp::find_direction(d, &[], &self.fibre_points(&f), &[])?;
            return Some((lp::primitive_integer(&l), f));
        }
        // Off the divisor: search the possible limit faces F of M.
        let m = f;
        for mask in 1u32..(1u32 << m.len()) {
            let face: Vec<usize> = (0..m.len())
                .filter(|&j| mask & (1 << j) != 0)
                .map(|j| m[j])
                .collect();
            if hm_fiber_semistable(&face, &self.weights) {
                continue;
            }
            let mut sys = LinearSystem::new(d + 1);
            for &i in &m {
                let mut row: Vec<Rational> = self.weights[i].iter().map(|&x| rat(x)).collect();
                row.push(-Rational::one());
                if face.contains(&i) {
                    sys.equal(row, Rational::zero());
                } else {
                    sys.at_least(row, Rational::one());
                }
            }
            let mut c = vec![Rational::zero(); d];
            c.push(Rational::one());
            sys.at_least(c, Rational::one());
            if let Some(x) = sys.solve() {
                return Some((lp::primitive_integer(&x[..d]), face));
            }
        }
        None
    }

    /// Generators of the closure of the unstable set of this stage (rank 1).
    fn unstable_generators(&self, ring: &Ring) -> Vec<MultiPoly> {
        let sign = self.weights[self.pivot][0].signum();
        self.moving
            .iter()
            .filter(|&&i| i != self.pivot && self.weights[i][0].signum() == -sign)
            .map(|&i| ring.var(i))
            .collect()
    }
}

/// One link of the stability chain: the rule of a chart together with the
/// monomial images of the parent coordinates.
#[derive(Debug)]
pub struct StabilityNode {
    pub ring: Ring,
    pub rule: Option<ChartRule>,
    pub parent: Option<(Arc<StabilityNode>, Vec<Monomial>)>,
}

impl StabilityNode {
    /// Everything is semistable on an affine ambient space.
    pub fn root(ring: &Ring) -> Arc<Self> {
        Arc::new(StabilityNode {
            ring: ring.clone(),
            rule: None,
            parent: None,
        })
    }

    pub fn child(
        parent: &Arc<StabilityNode>,
        ring: &Ring,
        images: Vec<Monomial>,
        rule: ChartRule,
    ) -> Arc<Self> {
        Arc::new(StabilityNode {
            ring: ring.clone(),
            rule: Some(rule),
            parent: Some((parent.clone(), images)),
        })
    }

    pub fn depth(&self) -> usize {
        self.parent.as_ref().map_or(0, |(p, _)| p.depth() + 1)
    }

    fn parent_support(images: &[Monomial], support: &[usize]) -> Vec<usize> {
        images
            .iter()
            .enumerate()
            .filter(|(_, m)| {
                m.0.iter()
                    .enumerate()
                    .all(|(j, &e)| e == 0 || support.contains(&j))
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn semistable(&self, support: &[usize]) -> bool {
        self.first_failure(support).is_none()
    }

    /// The deepest failing rule along the chain, as (level, lambda, face).
    fn first_failure(&self, support: &[usize]) -> Option<(usize, Vec<i64>, Vec<usize>)> {
        if let Some(rule) = &self.rule {
            if let Some((l, f)) = rule.destabilize(support) {
                return Some((self.depth(), l, f));
            }
        }
        let (p, images) = self.parent.as_ref()?;
        p.first_failure(&Self::parent_support(images, support))
    }

    /// Verdict with witness for a rational point of this chart.
    pub fn point_semistable(&self, point: &[Rational]) -> Result<StabilityVerdict> {
        if point.len() != self.ring.nvars() {
            return Err(Error::precondition(format!(
                "point has {} coordinates, chart has {}",
                point.len(),
                self.ring.nvars()
            )));
        }
        let support: Vec<usize> = (0..point.len()).filter(|&i| !point[i].is_zero()).collect();
        let Some((level, lambda, face)) = self.first_failure(&support) else {
            return Ok(StabilityVerdict {
                semistable: true,
                witness: None,
            });
        };
        let limit = if level == self.depth() {
            let rule = self.rule.as_ref().expect("failing level has a rule");
            one_ps_limit(point, &lambda, &self.chart_weights(rule))
        } else {
            None
        };
        Ok(StabilityVerdict {
            semistable: false,
            witness: Some(Witness {
                level,
                lambda,
                limit_support: face,
                limit,
            }),
        })
    }

    /// Weights of the chart coordinates for the blown-up subtorus.
    fn chart_weights(&self, rule: &ChartRule) -> Vec<Vec<i64>> {
        let wk = &rule.weights[rule.pivot];
        (0..rule.weights.len())
            .map(|i| {
                if i == rule.pivot {
                    wk.clone()
                } else if rule.moving.contains(&i) {
                    rule.weights[i].iter().zip(wk).map(|(a, b)| a - b).collect()
                } else {
                    rule.weights[i].clone()
                }
            })
            .collect()
    }

    /// The ideal of the closure of the unstable locus of this chart. Only
    /// for rank-one groups; the root has nothing unstable.
    pub fn unstable_ideal(&self) -> Result<Ideal> {
        let Some(rule) = &self.rule else {
            return Ok(Ideal::unit(&self.ring));
        };
        if rule.rank() != 1 {
            return Err(Error::Unsupported(
                "unstable ideal needs a rank-one torus; use point_semistable".into(),
            ));
        }
        let local = if rule.moving.is_empty() {
            Ideal::unit(&self.ring)
        } else {
            let gens = rule.unstable_generators(&self.ring);
            if gens.is_empty() {
                Ideal::zero(&self.ring)
            } else {
                Ideal::new(&self.ring, gens)
            }
        };
        let (p, images) = self.parent.as_ref().expect("a rule has a parent");
        let up = p.unstable_ideal()?;
        if up.gens().iter().any(|g| g.is_constant() && !g.is_zero()) {
            return Ok(local);
        }
        let imgs: Vec<MultiPoly> = images
            .iter()
            .map(|m| MultiPoly::monomial(&self.ring, m.clone(), Rational::one()))
            .collect();
        let pulled = Ideal::new(
            &self.ring,
            up.gens().iter().map(|g| g.substitute(&imgs, &self.ring)),
        );
        Ok(local.product(&pulled))
    }
}

/// `V(scheme) \ V(unstable)` on one chart.
#[derive(Clone, Debug)]
pub struct SemistableLocus {
    pub scheme: GroebnerBasis,
    pub unstable: GroebnerBasis,
}

impl SemistableLocus {
    pub fn contains(&self, point: &[Rational]) -> Result<bool> {
        let on = |gb: &GroebnerBasis| -> Result<bool> {
            for g in gb.basis() {
                if !g.evaluate(point)?.is_zero() {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        Ok(on(&self.scheme)? && !on(&self.unstable)?)
    }

    /// Whether the locus is visibly empty: the scheme is empty or contained
    /// in the unstable set.
    pub fn is_empty(&self) -> bool {
        self.scheme.is_unit()
            || self
                .unstable
                .basis()
                .iter()
                .all(|g| self.scheme.contains(g))
    }
}

pub fn semistable_locus(
    intrinsic: &Ideal,
    node: &StabilityNode,
    budget: Budget,
) -> Result<SemistableLocus> {
    Ok(SemistableLocus {
        scheme: intrinsic.gb(budget)?,
        unstable: node.unstable_ideal()?.gb(budget)?,
    })
}
