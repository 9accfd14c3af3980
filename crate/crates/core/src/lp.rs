//! Exact feasibility for small linear systems (phase-one simplex with
//! Bland's rule) and the convex-hull tests built on it.

use num_traits::{One, Signed, Zero};

use crate::poly::{rat, Rational};

/// Constraints `a . x = b` and `a . x >= b` over free variables `x`.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pub nvars: usize,
    pub eq: Vec<(Vec<Rational>, Rational)>,
    pub ge: Vec<(Vec<Rational>, Rational)>,
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        LinearSystem {
            nvars,
            ..Default::default()
        }
    }

    pub fn equal(&mut self, a: Vec<Rational>, b: Rational) -> &mut Self {
        assert_eq!(a.len(), self.nvars);
        self.eq.push((a, b));
        self
    }

    pub fn at_least(&mut self, a: Vec<Rational>, b: Rational) -> &mut Self {
        assert_eq!(a.len(), self.nvars);
        self.ge.push((a, b));
        self
    }

    /// A feasible point, if any.
    pub fn solve(&self) -> Option<Vec<Rational>> {
        // Standard form: x = p - q, slack s >= 0 for each inequality,
        // then one artificial per row.
        let n = self.nvars;
        let ns = self.ge.len();
        let rows: Vec<(Vec<Rational>, Rational)> = self
            .eq
            .iter()
            .map(|(a, b)| {
                let mut r: Vec<Rational> = a.iter().cloned().chain(a.iter().map(|x| -x)).collect();
                r.extend(std::iter::repeat(Rational::zero()).take(ns));
                (r, b.clone())
            })
            .chain(self.ge.iter().enumerate().map(|(k, (a, b))| {
                let mut r: Vec<Rational> = a.iter().cloned().chain(a.iter().map(|x| -x)).collect();
                r.extend((0..ns).map(|j| {
                    if j == k {
                        -Rational::one()
                    } else {
                        Rational::zero()
                    }
                }));
                (r, b.clone())
            }))
            .collect();
        let m = rows.len();
        let nstd = 2 * n + ns;
        if m == 0 {
            return Some(vec![Rational::zero(); n]);
        }
        let width = nstd + m + 1;
        let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
        let mut basis = Vec::with_capacity(m);
        for (i, (a, b)) in rows.into_iter().enumerate() {
            let flip = b.is_negative();
            let mut row: Vec<Rational> = a.into_iter().map(|x| if flip { -x } else { x }).collect();
            row.extend((0..m).map(|j| {
                if j == i {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row.push(if flip { -b } else { b });
            t.push(row);
            basis.push(nstd + i);
        }
        // Objective: minimise the sum of artificials, written as reduced costs.
        let mut obj = vec![Rational::zero(); width];
        for row in &t {
            for j in 0..width {
                if j < nstd || j == width - 1 {
                    obj[j] -= &row[j];
                }
            }
        }
        t.push(obj);

        loop {
            let z = &t[m];
            let Some(enter) = (0..nstd + m).find(|&j| z[j].is_negative()) else {
                break;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..m {
                if t[i][enter].is_positive() {
                    let ratio = &t[i][width - 1] / &t[i][enter];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (pr, _) = leave?; // unbounded cannot happen in phase one
            let inv = t[pr][enter].recip();
            for v in t[pr].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = t[pr].clone();
            for (i, row) in t.iter_mut().enumerate() {
                if i != pr && !row[enter].is_zero() {
                    let f = row[enter].clone();
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= &f * p;
                    }
                }
            }
            basis[pr] = enter;
        }
        if !t[m][width - 1].is_zero() {
            return None;
        }
        let mut std_x = vec![Rational::zero(); nstd];
        for (i, &b) in basis.iter().enumerate() {
            if b < nstd {
                std_x[b] = t[i][width - 1].clone();
            }
        }
        let x: Vec<Rational> = (0..n).map(|j| &std_x[j] - &std_x[n + j]).collect();
        debug_assert!(self.check(&x));
        Some(x)
    }

    pub fn check(&self, x: &[Rational]) -> bool {
        let dot = |a: &[Rational]| {
            a.iter()
                .zip(x)
                .fold(Rational::zero(), |acc, (p, q)| acc + p * q)
        };
        self.eq.iter().all(|(a, b)| dot(a) == *b) && self.ge.iter().all(|(a, b)| dot(a) >= *b)
    }
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

/// Whether 0 lies in the convex hull of `points` (all of dimension `d`).
pub fn zero_in_hull(points: &[Vec<i64>], d: usize) -> bool {
    if points.is_empty() {
        return false;
    }
    let mut sys = LinearSystem::new(points.len());
    for c in 0..d {
        sys.equal(points.iter().map(|p| rat(p[c])).collect(), Rational::zero());
    }
    sys.equal(vec![Rational::one(); points.len()], Rational::one());
    for i in 0..points.len() {
        let mut e = vec![Rational::zero(); points.len()];
        e[i] = Rational::one();
        sys.at_least(e, Rational::zero());
    }
    sys.solve().is_some()
}

/// Whether 0 lies in the relative interior of the convex hull of `points`,
/// i.e. there is a strictly positive linear dependency. True for no points.
pub fn zero_in_relint(points: &[Vec<i64>], d: usize) -> bool {
    if points.is_empty() {
        return true;
    }
    let mut sys = LinearSystem::new(points.len());
    for c in 0..d {
        sys.equal(points.iter().map(|p| rat(p[c])).collect(), Rational::zero());
    }
    for i in 0..points.len() {
        let mut e = vec![Rational::zero(); points.len()];
        e[i] = Rational::one();
        sys.at_least(e, Rational::one());
    }
    sys.solve().is_some()
}

/// A cocharacter `lambda` (rational, scaled to integers) with prescribed
/// pairings: `<lambda, p> = 0` on `zero`, `>= 1` on `positive`, and
/// `>= 0` on `nonneg`.
pub fn find_direction(
    d: usize,
    zero: &[Vec<i64>],
    positive: &[Vec<i64>],
    nonneg: &[Vec<i64>],
) -> Option<Vec<Rational>> {
    let mut sys = LinearSystem::new(d);
    for p in zero {
        sys.equal(ints(p), Rational::zero());
    }
    for p in positive {
        sys.at_least(ints(p), Rational::one());
    }
    for p in nonneg {
        sys.at_least(ints(p), Rational::zero());
    }
    sys.solve()
}

/// Clear denominators and divide by the gcd.
pub fn primitive_integer(v: &[Rational]) -> Vec<i64> {
    use num_integer::Integer;
    let l = v
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v
        .iter()
        .map(|x| (x * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints
        .iter()
        .fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| {
            let y = if g.is_zero() { x.clone() } else { x / &g };
            i64::try_from(y).expect("direction entries fit in i64")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_examples() {
        assert!(zero_in_hull(&[vec![1], vec![-1]], 1));
        assert!(!zero_in_hull(&[vec![1]], 1));
        assert!(!zero_in_hull(&[vec![2], vec![3]], 1));
        assert!(zero_in_hull(&[vec![0, 0]], 2));
        assert!(zero_in_hull(&[vec![1, 0], vec![0, 1], vec![-1, -1]], 2));
        assert!(!zero_in_hull(&[vec![1, 0], vec![0, 1]], 2));
    }

    #[test]
    fn relint_examples() {
        assert!(zero_in_relint(&[], 1));
        assert!(zero_in_relint(&[vec![1], vec![-1]], 1));
        assert!(!zero_in_relint(&[vec![1]], 1));
        // 0 on the boundary segment: hull of (1,0),(-1,0),(0,1)
        assert!(!zero_in_relint(&[vec![1, 0], vec![-1, 0], vec![0, 1]], 2));
        assert!(zero_in_relint(&[vec![0, 0]], 2));
    }

    #[test]
    fn directions() {
        let l = find_direction(1, &[], &[vec![1]], &[vec![0]]).unwrap();
        assert_eq!(primitive_integer(&l), vec![1]);
        assert!(find_direction(1, &[], &[vec![1], vec![-1]], &[]).is_none());
        let l = find_direction(2, &[vec![1, -1]], &[vec![1, 0]], &[]).unwrap();
        assert_eq!(primitive_integer(&l), vec![1, 1]);
    }

    #[test]
    fn equality_with_free_sign() {
        let mut s = LinearSystem::new(2);
        s.equal(vec![rat(1), rat(1)], rat(-3))
            .at_least(vec![rat(1), rat(0)], rat(-5));
        let x = s.solve().unwrap();
        assert!(s.check(&x));
    }
}
