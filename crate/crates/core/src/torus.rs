//! Weight combinatorics of a diagonal torus acting linearly on affine space.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::groebner::{Budget, Ideal};
use crate::linalg::Matrix;
use crate::lp;
use crate::poly::{rat, Monomial, MonomialOrder, MultiPoly, Rational};

/// `k x n` integer weights; column `i` is the weight of coordinate `x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightMatrix {
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl WeightMatrix {
    pub fn new(n: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::precondition(format!(
                "every weight row must have {n} entries"
            )));
        }
        Ok(WeightMatrix { n, rows })
    }

    pub fn from_columns(k: usize, cols: &[Vec<i64>]) -> Self {
        let rows = (0..k)
            .map(|a| cols.iter().map(|c| c[a]).collect())
            .collect();
        WeightMatrix {
            n: cols.len(),
            rows,
        }
    }

    pub fn trivial(n: usize) -> Self {
        WeightMatrix {
            n,
            rows: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn column(&self, i: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[i]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.column(i)).collect()
    }

    pub fn is_zero_column(&self, i: usize) -> bool {
        self.rows.iter().all(|r| r[i] == 0)
    }

    /// Weights seen by the subtorus `r`: `Lambda * W`.
    pub fn restrict(&self, r: &Subtorus) -> WeightMatrix {
        assert_eq!(r.k(), self.k(), "subtorus of a torus of different rank");
        let rows = r
            .cochar()
            .iter()
            .map(|l| {
                (0..self.n)
                    .map(|i| l.iter().zip(&self.rows).map(|(a, row)| a * row[i]).sum())
                    .collect()
            })
            .collect();
        WeightMatrix { n: self.n, rows }
    }

    pub fn select_columns(&self, cols: &[usize]) -> WeightMatrix {
        WeightMatrix {
            n: cols.len(),
            rows: self
                .rows
                .iter()
                .map(|r| cols.iter().map(|&c| r[c]).collect())
                .collect(),
        }
    }

    pub fn exponent_weight(&self, m: &Monomial) -> Vec<i64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(&m.0).map(|(w, &e)| w * e as i64).sum())
            .collect()
    }

    /// The weight of `p` if it is weight-homogeneous (zero counts as
    /// homogeneous of weight 0).
    pub fn poly_weight(&self, p: &MultiPoly) -> Option<Vec<i64>> {
        let mut it = p.terms().keys().map(|m| self.exponent_weight(m));
        let first = it.next().unwrap_or_else(|| vec![0; self.k()]);
        if it.all(|w| w == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_invariant(&self, p: &MultiPoly) -> bool {
        p.terms()
            .keys()
            .all(|m| self.exponent_weight(m).iter().all(|&x| x == 0))
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }
}

impl fmt::Display for WeightMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows)
    }
}

/// A subtorus, stored as the canonical (Hermite) basis of its saturated
/// cocharacter lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subtorus {
    k: usize,
    rows: Vec<Vec<i64>>,
}

impl Subtorus {
    /// Canonicalize the lattice spanned by `rows`; fails if it is not
    /// saturated in `Z^k`.
    pub fn new(k: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::precondition("cocharacter rows of wrong length"));
        }
        let h = hnf_rows(rows);
        if !is_primitive(&h, k) {
            return Err(Error::precondition(format!(
                "cocharacter lattice {h:?} is not saturated"
            )));
        }
        Ok(Subtorus { k, rows: h })
    }

    pub fn full(k: usize) -> Self {
        Subtorus {
            k,
            rows: (0..k)
                .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
                .collect(),
        }
    }

    pub fn trivial(k: usize) -> Self {
        Subtorus {
            k,
            rows: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cochar(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn is_primitive(&self) -> bool {
        is_primitive(&self.rows, self.k)
    }

    /// Whether `lambda` lies in the cocharacter lattice.
    pub fn contains_cochar(&self, lambda: &[i64]) -> bool {
        let mut rows = self.rows.clone();
        rows.push(lambda.to_vec());
        hnf_rows(rows) == self.rows
    }
}

impl fmt::Display for Subtorus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "trivial");
        }
        write!(f, "{:?}", self.rows)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Row Hermite normal form of the lattice spanned by `rows`, zero rows
/// removed. Pivots are positive, entries above a pivot reduced into
/// `[0, pivot)`.
pub fn hnf_rows(mut a: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let m = a.len();
    let n = a.first().map(Vec::len).unwrap_or(0);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let nz: Vec<usize> = (r..m).filter(|&i| a[i][c] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).unwrap();
            a.swap(r, p);
            let mut done = true;
            for i in (r + 1)..m {
                if a[i][c] != 0 {
                    let q = a[i][c].div_euclid(a[r][c]);
                    for j in 0..n {
                        a[i][j] -= q * a[r][j];
                    }
                    if a[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][c] == 0 {
            continue;
        }
        if a[r][c] < 0 {
            for x in a[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let q = a[i][c].div_euclid(a[r][c]);
            if q != 0 {
                for j in 0..n {
                    a[i][j] -= q * a[r][j];
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

fn det(m: &Matrix) -> Rational {
    let n = m.rows();
    let (mut a, mut d) = (m.clone(), rat(1));
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| a[(i, c)] != rat(0)) else {
            return rat(0);
        };
        if p != c {
            for j in 0..n {
                let t = a[(p, j)].clone();
                a[(p, j)] = a[(c, j)].clone();
                a[(c, j)] = t;
            }
            d = -d;
        }
        d *= a[(c, c)].clone();
        for i in (c + 1)..n {
            let f = &a[(i, c)] / &a[(c, c)];
            for j in c..n {
                let v = &a[(c, j)] * &f;
                a[(i, j)] -= v;
            }
        }
    }
    d
}

/// gcd of maximal minors equal to one (and full row rank).
fn is_primitive(rows: &[Vec<i64>], k: usize) -> bool {
    let d = rows.len();
    if d == 0 {
        return true;
    }
    let m = Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect(),
    );
    let mut g = 0i64;
    for cols in subsets_of_size(k, d) {
        let v = det(&m.submatrix(&(0..d).collect::<Vec<_>>(), &cols));
        let v = i64::try_from(v.to_integer()).unwrap_or(i64::MAX);
        g = gcd(g, v);
    }
    g == 1
}

fn subsets_of_size(n: usize, d: usize) -> Vec<Vec<usize>> {
    (0u32..(1u32 << n))
        .filter(|m| m.count_ones() as usize == d)
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect()
}

/// Basis of `{lambda in Z^k : A lambda = 0}` for an integer `r x k` matrix
/// `A`, computed by unimodular column operations. The basis spans a
/// saturated lattice.
pub fn integer_kernel(a: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i64>> = a.to_vec();
    let mut u: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect();
    // u[j] is column j of the transform.
    let col_op = |a: &mut Vec<Vec<i64>>, u: &mut Vec<Vec<i64>>, dst: usize, src: usize, q: i64| {
        for row in a.iter_mut() {
            row[dst] -= q * row[src];
        }
        for i in 0..k {
            u[dst][i] -= q * u[src][i];
        }
    };
    let swap = |a: &mut Vec<Vec<i64>>, u: &mut Vec<Vec<i64>>, x: usize, y: usize| {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        u.swap(x, y);
    };
    let mut cur = 0;
    for i in 0..a.len() {
        loop {
            let nz: Vec<usize> = (cur..k).filter(|&j| a[i][j] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&j) = nz.first() {
                    swap(&mut a, &mut u, cur, j);
                    cur += 1;
                }
                break;
            }
            let p = *nz.iter().min_by_key(|&&j| a[i][j].abs()).unwrap();
            for &j in &nz {
                if j != p {
                    let q = a[i][j].div_euclid(a[i][p]);
                    col_op(&mut a, &mut u, j, p, q);
                }
            }
        }
    }
    u[cur..].to_vec()
}

/// One weight-homogeneous piece of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPiece {
    pub weight: Vec<i64>,
    pub part: MultiPoly,
}

/// `Lambda * W * exponents`.
pub fn monomial_weight(m: &Monomial, w: &WeightMatrix, r: &Subtorus) -> Vec<i64> {
    w.restrict(r).exponent_weight(m)
}

/// Split `p` into weight-homogeneous pieces for the weights `w` (already
/// restricted to the relevant subtorus). Pieces are ordered by their
/// leading monomial, largest first, in degrevlex.
pub fn decompose(p: &MultiPoly, w: &WeightMatrix) -> Vec<GradedPiece> {
    let mut by_weight: BTreeMap<Vec<i64>, MultiPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        by_weight
            .entry(w.exponent_weight(m))
            .or_insert_with(|| MultiPoly::zero(p.ring()))
            .add_term(m.clone(), c.clone());
    }
    let mut pieces: Vec<GradedPiece> = by_weight
        .into_iter()
        .map(|(weight, part)| GradedPiece { weight, part })
        .collect();
    let o = MonomialOrder::DegRevLex;
    pieces.sort_by(|a, b| {
        let la = a.part.leading_term(o).unwrap().0;
        let lb = b.part.leading_term(o).unwrap().0;
        o.cmp(lb, la)
    });
    pieces
}

pub fn isotypic_decompose(p: &MultiPoly, w: &WeightMatrix, r: &Subtorus) -> Vec<GradedPiece> {
    decompose(p, &w.restrict(r))
}

/// Projection onto the weight-zero part.
pub fn reynolds(p: &MultiPoly, w: &WeightMatrix, r: &Subtorus) -> MultiPoly {
    reynolds_for(p, &w.restrict(r))
}

pub fn reynolds_for(p: &MultiPoly, w: &WeightMatrix) -> MultiPoly {
    MultiPoly::from_terms(
        p.ring(),
        p.terms()
            .iter()
            .filter(|(m, _)| w.exponent_weight(m).iter().all(|&x| x == 0))
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// Indices of the coordinates moved by `r`; the fixed locus is their
/// common zero set.
pub fn fixed_locus(w: &WeightMatrix, r: &Subtorus) -> Vec<usize> {
    let rw = w.restrict(r);
    (0..w.n()).filter(|&i| !rw.is_zero_column(i)).collect()
}

/// Identity component of the stabilizer of a point with the given support.
pub fn stabilizer_subtorus(support: &[usize], w: &WeightMatrix) -> Subtorus {
    let k = w.k();
    let a: Vec<Vec<i64>> = support.iter().map(|&i| w.column(i)).collect();
    let ker = integer_kernel(&a, k);
    Subtorus::new(k, ker).expect("integer kernels are saturated")
}

/// Whether the orbit of a point with this support is closed: 0 lies in the
/// relative interior of the convex hull of the support weights.
pub fn orbit_is_closed(support: &[usize], w: &WeightMatrix) -> bool {
    let pts: Vec<Vec<i64>> = support.iter().map(|&i| w.column(i)).collect();
    lp::zero_in_relint(&pts, w.k())
}

/// Supports that are limits of a point with support `support` under some
/// one-parameter subgroup: `S' = {i in S : <lambda, w_i> = 0}` with
/// `<lambda, w_i> > 0` on `S \ S'`. Proper subsets only.
pub fn limit_supports(support: &[usize], w: &WeightMatrix) -> Vec<Vec<usize>> {
    let s = support.len();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << s) {
        if mask.count_ones() as usize == s {
            continue;
        }
        let keep: Vec<usize> = (0..s)
            .filter(|&j| mask & (1 << j) != 0)
            .map(|j| support[j])
            .collect();
        let drop: Vec<Vec<i64>> = (0..s)
            .filter(|&j| mask & (1 << j) == 0)
            .map(|j| w.column(support[j]))
            .collect();
        let zero: Vec<Vec<i64>> = keep.iter().map(|&i| w.column(i)).collect();
        if lp::find_direction(w.k(), &zero, &drop, &[]).is_some() {
            out.push(keep);
        }
    }
    out
}

/// Whether some point of `V(I)` has exactly this support: the ideal
/// `I + (x_j : j not in S) + (1 - t * prod_{i in S} x_i)` is proper.
pub fn support_realized(ideal: &Ideal, support: &[usize], budget: Budget) -> Result<bool> {
    let ring = ideal.ring();
    let n = ring.nvars();
    let t = ring.fresh_name("t");
    let big = ring.extend(&[t])?;
    let zeros: Vec<(usize, Rational)> = (0..n)
        .filter(|i| !support.contains(i))
        .map(|i| (i, rat(0)))
        .collect();
    let mut gens = Vec::new();
    for g in ideal.gens() {
        let s = g.specialize(&zeros);
        if !s.is_zero() {
            gens.push(s.to_ring(&big)?);
        }
    }
    let mut prod = big.var(n);
    for &i in support {
        prod = &prod * &big.var(i);
    }
    gens.push(&prod - &big.one());
    for &(i, _) in &zeros {
        gens.push(big.var(i));
    }
    Ok(!Ideal::new(&big, gens).gb(budget)?.is_unit())
}

/// All supports realized by points of `V(I)`, in increasing bitmask order.
pub fn realized_supports(ideal: &Ideal, budget: Budget) -> Result<Vec<Vec<usize>>> {
    let n = ideal.ring().nvars();
    if n > 16 {
        return Err(Error::Budget(format!(
            "support scan over {n} coordinates exceeds the limit of 16"
        )));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if support_realized(ideal, &s, budget)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// Blowup centers: identity components of stabilizers of closed-orbit
/// points of `V(I)`, nontrivial, deduplicated, by decreasing dimension and
/// then lexicographically.
pub fn enumerate_blowup_centers(
    w: &WeightMatrix,
    ideal: &Ideal,
    budget: Budget,
) -> Result<Vec<Subtorus>> {
    enumerate_blowup_centers_with(w, ideal, &|_| true, budget)
}

/// As [`enumerate_blowup_centers`], restricted to the semistable supports
/// given by `semistable`; orbit closedness is then taken inside that locus.
pub fn enumerate_blowup_centers_with(
    w: &WeightMatrix,
    ideal: &Ideal,
    semistable: &dyn Fn(&[usize]) -> bool,
    budget: Budget,
) -> Result<Vec<Subtorus>> {
    let mut centers: Vec<Subtorus> = Vec::new();
    for s in closed_supports(w, ideal, semistable, budget)? {
        let r = stabilizer_subtorus(&s, w);
        if !r.is_trivial() && !centers.contains(&r) {
            centers.push(r);
        }
    }
    centers.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.rows.cmp(&b.rows)));
    Ok(centers)
}

/// Realized, semistable supports whose orbits are closed in the semistable
/// locus.
pub fn closed_supports(
    w: &WeightMatrix,
    ideal: &Ideal,
    semistable: &dyn Fn(&[usize]) -> bool,
    budget: Budget,
) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for s in realized_supports(ideal, budget)? {
        if !semistable(&s) {
            continue;
        }
        let closed = orbit_is_closed(&s, w) || !limit_supports(&s, w).iter().any(|t| semistable(t));
        if closed {
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::strategies::poly;
    use crate::poly::Ring;
    use proptest::prelude::*;

    fn wm(rows: &[&[i64]]) -> WeightMatrix {
        WeightMatrix::new(rows[0].len(), rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn xy() -> Ring {
        Ring::new(&["x", "y"]).unwrap()
    }

    #[test]
    fn weights_of_monomials() {
        let w = wm(&[&[1, -1]]);
        let full = Subtorus::full(1);
        assert_eq!(monomial_weight(&Monomial(vec![1, 1]), &w, &full), vec![0]);
        assert_eq!(monomial_weight(&Monomial(vec![2, 1]), &w, &full), vec![1]);
        let w3 = wm(&[&[1, -1, 0]]);
        assert_eq!(
            monomial_weight(&Monomial(vec![0, 0, 1]), &w3, &full),
            vec![0]
        );
    }

    #[test]
    fn decomposition_examples() {
        let r = xy();
        let w = wm(&[&[1, -1]]);
        let full = Subtorus::full(1);
        let p = r.parse("x^2*y + y^2*x").unwrap();
        let pieces = isotypic_decompose(&p, &w, &full);
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].weight, vec![1]);
        assert_eq!(pieces[0].part, r.parse("x^2*y").unwrap());
        assert_eq!(pieces[1].weight, vec![-1]);
        let q = r.parse("x*y + x").unwrap();
        let pieces = isotypic_decompose(&q, &w, &full);
        assert_eq!(pieces[0].weight, vec![0]);
        assert_eq!(pieces[1].part, r.parse("x").unwrap());
        assert_eq!(reynolds(&q, &w, &full), r.parse("x*y").unwrap());
        assert!(reynolds(&r.parse("x").unwrap(), &w, &full).is_zero());
    }

    #[test]
    fn fixed_loci() {
        let w = wm(&[&[1, -1, 0]]);
        assert_eq!(fixed_locus(&w, &Subtorus::full(1)), vec![0, 1]);
        let z = wm(&[&[0, 0]]);
        assert!(fixed_locus(&z, &Subtorus::full(1)).is_empty());
        let w2 = wm(&[&[1, 0, -1], &[0, 1, -1]]);
        let r = Subtorus::new(2, vec![vec![1, -1]]).unwrap();
        assert_eq!(w2.restrict(&r).rows(), &[vec![1, -1, 0]]);
        assert_eq!(fixed_locus(&w2, &r), vec![0, 1]);
    }

    #[test]
    fn stabilizers() {
        let w = wm(&[&[1, 0, -1], &[0, 1, -1]]);
        let s = stabilizer_subtorus(&[2], &w);
        assert_eq!(s.dim(), 1);
        assert_eq!(s, Subtorus::new(2, vec![vec![1, -1]]).unwrap());
        assert_eq!(stabilizer_subtorus(&[], &w), Subtorus::full(2));
        assert!(stabilizer_subtorus(&[0, 1, 2], &w).is_trivial());
        // weight 2 alone: kernel is still the trivial lattice, never 2Z
        let w1 = wm(&[&[2, 4]]);
        assert!(stabilizer_subtorus(&[0], &w1).is_trivial());
        let w3 = wm(&[&[2, 0], &[4, 0]]);
        let s = stabilizer_subtorus(&[0], &w3);
        assert_eq!(s.cochar(), &[vec![2, -1]]);
        assert!(s.is_primitive());
    }

    #[test]
    fn non_saturated_rejected() {
        assert!(Subtorus::new(2, vec![vec![2, 0]]).is_err());
        assert!(Subtorus::new(2, vec![vec![2, 1]]).is_ok());
    }

    #[test]
    fn closed_orbits() {
        let w = wm(&[&[1, -1]]);
        assert!(orbit_is_closed(&[0, 1], &w));
        assert!(!orbit_is_closed(&[0], &w));
        assert!(orbit_is_closed(&[], &w));
    }

    #[test]
    fn centers() {
        let b = Budget::default();
        let r = xy();
        let w = wm(&[&[1, -1]]);
        let i = Ideal::parse(&r, &["x", "y"]).unwrap();
        assert_eq!(
            enumerate_blowup_centers(&w, &i, b).unwrap(),
            vec![Subtorus::full(1)]
        );
        let r3 = Ring::new(&["x", "y", "z"]).unwrap();
        let w3 = wm(&[&[1, -1, 0]]);
        let i3 = Ideal::parse(&r3, &["y*z", "x*z", "x*y"]).unwrap();
        assert_eq!(
            enumerate_blowup_centers(&w3, &i3, b).unwrap(),
            vec![Subtorus::full(1)]
        );
        let t = WeightMatrix::trivial(2);
        assert!(enumerate_blowup_centers(&t, &i, b).unwrap().is_empty());
    }

    #[test]
    fn realized_supports_of_axes() {
        let r3 = Ring::new(&["x", "y", "z"]).unwrap();
        let i3 = Ideal::parse(&r3, &["y*z", "x*z", "x*y"]).unwrap();
        let s = realized_supports(&i3, Budget::default()).unwrap();
        assert_eq!(s, vec![vec![], vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf_rows(vec![vec![2, 4], vec![1, 3]]);
        let b = hnf_rows(vec![vec![1, 3], vec![3, 7]]);
        assert_eq!(a, b);
        assert_eq!(a, vec![vec![1, 1], vec![0, 2]]);
    }

    proptest! {
        #[test]
        fn reynolds_projector(p in poly(xy(), 6, 3), q in poly(xy(), 6, 3), inv_c in -3i64..3, e in 0u32..3) {
            let w = wm(&[&[1, -1]]);
            let full = Subtorus::full(1);
            let rp = reynolds(&p, &w, &full);
            prop_assert_eq!(reynolds(&rp, &w, &full), rp.clone());
            let inv = &xy().parse(&format!("{inv_c}*(x*y)^{e} + 1")).unwrap() * &rp;
            prop_assert_eq!(reynolds(&(&inv * &q), &w, &full), &inv * &reynolds(&q, &w, &full));
            let pieces = isotypic_decompose(&p, &w, &full);
            let mut sum = xy().zero();
            for pc in &pieces {
                prop_assert!(w.poly_weight(&pc.part).is_some());
                sum = &sum + &pc.part;
            }
            prop_assert_eq!(sum, p);
            let ws: std::collections::BTreeSet<_> = pieces.iter().map(|p| p.weight.clone()).collect();
            prop_assert_eq!(ws.len(), pieces.len());
        }

        #[test]
        fn kernels_are_primitive(cols in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 2), 0..4)) {
            let w = WeightMatrix::from_columns(2, &cols);
            let support: Vec<usize> = (0..cols.len()).collect();
            let s = stabilizer_subtorus(&support, &w);
            prop_assert!(s.is_primitive());
            for l in s.cochar() {
                for c in &cols {
                    prop_assert_eq!(l[0] * c[0] + l[1] * c[1], 0);
                }
            }
            let rank = w.as_matrix().rank();
            prop_assert_eq!(s.dim(), 2 - rank);
        }
    }
}
