//! Brute-force reference implementations used to cross-check the fast
//! paths: one-parameter subgroups from a box, ranks from minors, and
//! lifts of jets from a Groebner basis in the unknown coefficients.

use num_traits::{One, Zero};

use crate::blowup::LocalModel;
use crate::dcrit::SmallExtension;
use crate::error::Result;
use crate::groebner::{Budget, Ideal};
use crate::linalg::Matrix;
use crate::poly::{MonomialOrder, MultiPoly, Rational, Ring};
use crate::stability::one_ps_limit;

fn box_bound(weights: &[Vec<i64>]) -> i64 {
    2 * weights
        .iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or(0)
        .max(1)
}

/// Every nonzero integer vector in `[-b, b]^k`.
pub fn cocharacters_in_box(k: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-b..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

fn indicator(support: &[usize], n: usize) -> Vec<Rational> {
    (0..n)
        .map(|i| {
            if support.contains(&i) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

/// A point with the given support is semistable for the weights of its
/// coordinates unless some one-parameter subgroup sends it to zero.
pub fn hm_semistable_by_limits(support: &[usize], weights: &[Vec<i64>]) -> bool {
    let Some(k) = weights.first().map(Vec::len) else {
        return false;
    };
    let p = indicator(support, weights.len());
    if k == 0 {
        return !support.is_empty();
    }
    !cocharacters_in_box(k, box_bound(weights))
        .iter()
        .any(|l| one_ps_limit(&p, l, weights).is_some_and(|q| q.iter().all(Zero::is_zero)))
}

/// The orbit of a point with the given support is closed unless some
/// one-parameter subgroup has a limit outside the orbit.
pub fn orbit_closed_by_limits(support: &[usize], weights: &[Vec<i64>]) -> bool {
    let Some(k) = weights.first().map(Vec::len) else {
        return true;
    };
    if k == 0 {
        return true;
    }
    let p = indicator(support, weights.len());
    !cocharacters_in_box(k, box_bound(weights)).iter().any(|l| {
        one_ps_limit(&p, l, weights)
            .is_some_and(|q| q.iter().filter(|x| !x.is_zero()).count() < support.len())
    })
}

fn det(m: &[Vec<Rational>]) -> Rational {
    match m.len() {
        0 => Rational::one(),
        1 => m[0][0].clone(),
        n => {
            let mut total = Rational::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let t = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    total += t;
                } else {
                    total -= t;
                }
            }
            total
        }
    }
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if n < size {
        return vec![];
    }
    let mut out = subsets(n - 1, size);
    for mut s in subsets(n - 1, size - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// The size of the largest nonvanishing minor.
pub fn rank_by_minors(m: &Matrix) -> usize {
    let rows = m.to_rows();
    for size in (1..=m.rows().min(m.cols())).rev() {
        for rs in subsets(m.rows(), size) {
            for cs in subsets(m.cols(), size) {
                let sub: Vec<Vec<Rational>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect())
                    .collect();
                if !det(&sub).is_zero() {
                    return size;
                }
            }
        }
    }
    0
}

/// Search for the next coefficients `c` with `omega(g + c e^m) = 0` to
/// order `m` by treating `c` as unknowns and computing a Groebner basis.
/// Returns one solution if the system is consistent.
pub fn exhaustive_lift(
    m: &LocalModel,
    ext: &SmallExtension,
    budget: Budget,
) -> Result<Option<Vec<Rational>>> {
    let n = m.n();
    let names: Vec<String> = (0..n)
        .map(|i| format!("c{i}"))
        .chain(["e".to_string()])
        .collect();
    let ring = Ring::new(&names)?;
    let e = ring.var(n);
    let images: Vec<MultiPoly> = (0..n)
        .map(|i| {
            let mut p = &ring.var(i) * &e.pow(ext.m as u32);
            for (d, c) in ext.coords[i].iter().enumerate() {
                p = &p + &e.pow(d as u32).scale(c);
            }
            p
        })
        .collect();
    let mut eqs = Vec::new();
    for s in &m.section {
        let q = s.substitute(&images, &ring);
        for d in 0..=ext.m {
            let mut coeff = ring.zero();
            for (mono, c) in q.terms() {
                if mono.0[n] as usize == d {
                    let mut mm = mono.clone();
                    mm.0[n] = 0;
                    coeff.add_term(mm, c.clone());
                }
            }
            eqs.push(coeff);
        }
    }
    let gb = Ideal::new(&ring, eqs.iter().cloned()).groebner(MonomialOrder::Lex, budget)?;
    if gb.is_unit() {
        return Ok(None);
    }
    // The unknowns enter linearly, so the reduced lex basis is triangular
    // in them; set the free ones to zero.
    let mut sol = vec![Rational::zero(); n];
    for g in gb.basis() {
        if let Some((lead, _)) = g.leading_term(MonomialOrder::Lex) {
            if let Some(i) = (0..n).find(|&i| lead.0[i] > 0) {
                let rest: Vec<(usize, Rational)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (j, Rational::zero()))
                    .collect();
                sol[i] = -g.specialize(&rest).constant_term();
            }
        }
    }
    debug_assert!(eqs.iter().all(|q| q
        .evaluate(&[sol.clone(), vec![Rational::zero()]].concat())
        .is_ok_and(|v| v.is_zero())));
    Ok(Some(sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dcrit::{dcritical_chart, lift_once, obstruction_assignment};
    use crate::lp::{zero_in_hull, zero_in_relint};
    use crate::poly::rat;
    use crate::stability::hm_fiber_semistable;
    use crate::torus::{orbit_is_closed, WeightMatrix};
    use proptest::prelude::*;

    #[test]
    fn minors_agree_with_elimination() {
        let m = Matrix::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank_by_minors(&m), 2);
        assert_eq!(rank_by_minors(&Matrix::zeros(2, 3)), 0);
        assert_eq!(rank_by_minors(&Matrix::identity(3)), 3);
    }

    #[test]
    fn small_fibers() {
        assert!(hm_semistable_by_limits(&[0, 1], &[vec![1], vec![-1]]));
        assert!(!hm_semistable_by_limits(&[0], &[vec![1], vec![-1]]));
        assert!(!hm_semistable_by_limits(&[0, 1], &[vec![2], vec![3]]));
        assert!(orbit_closed_by_limits(&[0, 1], &[vec![1], vec![-1]]));
        assert!(!orbit_closed_by_limits(&[0], &[vec![1], vec![-1]]));
    }

    #[test]
    fn lifts() {
        let ring = Ring::new(&["x"]).unwrap();
        let w = WeightMatrix::trivial(1);
        let cubic = dcritical_chart(&ring.parse("1/3*x^3").unwrap(), &w)
            .unwrap()
            .model;
        let ext = SmallExtension::new(2, vec![vec![rat(0), rat(1)]]).unwrap();
        assert_eq!(
            exhaustive_lift(&cubic, &ext, Budget::default()).unwrap(),
            None
        );
        let quad = dcritical_chart(&ring.parse("1/2*x^2").unwrap(), &w)
            .unwrap()
            .model;
        let ext = SmallExtension::new(2, vec![vec![rat(0), rat(0)]]).unwrap();
        assert_eq!(
            exhaustive_lift(&quad, &ext, Budget::default()).unwrap(),
            Some(vec![rat(0)])
        );
    }

    fn weight_columns(k: usize, n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(proptest::collection::vec(-2i64..=2, k), n)
    }

    proptest! {
        #[test]
        fn hm_rule_matches_limits(k in 1usize..=2, cols in weight_columns(2, 3), mask in 0u32..8) {
            let cols: Vec<Vec<i64>> = cols.into_iter().map(|c| c[..k].to_vec()).collect();
            let support: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
            prop_assert_eq!(hm_fiber_semistable(&support, &cols), hm_semistable_by_limits(&support, &cols));
            let pts: Vec<Vec<i64>> = support.iter().map(|&i| cols[i].clone()).collect();
            prop_assert_eq!(zero_in_hull(&pts, k), hm_semistable_by_limits(&support, &cols));
        }

        #[test]
        fn closed_orbit_rule_matches_limits(k in 1usize..=2, cols in weight_columns(2, 4), mask in 0u32..16) {
            let cols: Vec<Vec<i64>> = cols.into_iter().map(|c| c[..k].to_vec()).collect();
            let support: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            let w = WeightMatrix::from_columns(k, &cols);
            prop_assert_eq!(orbit_is_closed(&support, &w), orbit_closed_by_limits(&support, &cols));
            let pts: Vec<Vec<i64>> = support.iter().map(|&i| cols[i].clone()).collect();
            prop_assert_eq!(zero_in_relint(&pts, k) || pts.is_empty(), orbit_closed_by_limits(&support, &cols));
        }

        #[test]
        fn rank_agrees(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 1..4)) {
            let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect());
            prop_assert_eq!(m.rank(), rank_by_minors(&m));
        }

        #[test]
        fn obstruction_matches_lift_search(a in -2i64..=2, b in -2i64..=2, c in -2i64..=2) {
            let ring = Ring::new(&["x", "y"]).unwrap();
            let w = WeightMatrix::new(2, vec![vec![1, -1]]).unwrap();
            let m = dcritical_chart(&ring.parse("1/2*x^2*y^2").unwrap(), &w).unwrap().model;
            let ext = SmallExtension::new(2, vec![vec![rat(a), rat(b)], vec![rat(0), rat(c)]]).unwrap();
            let obs = obstruction_assignment(&m, &ext);
            prop_assume!(obs.is_ok());
            let obs = obs.unwrap();
            let lift = exhaustive_lift(&m, &ext, Budget::default()).unwrap();
            prop_assert_eq!(obs.liftable, lift.is_some());
            prop_assert_eq!(lift_once(&m, &ext).unwrap().is_some(), lift.is_some());
        }
    }
}
