//! d-critical charts, the four-term complex at rational points, obstruction
//! assignments for small extensions, and Omega-equivalences of sections.

mod omega;

pub use omega::{
    construct_equivalence, find_unit_cofactor, lift_morphism_to_blowup, phi_ck_at_point,
    verify_omega_equivalence, Equivalence, OmegaReport, PhiCk, PolyMatrix,
};

use num_traits::Zero;

use crate::blowup::{cotangent_model, Cofactor, EquivariantBundle, LocalModel};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{frac, rat, MultiPoly, Rational};
use crate::torus::{orbit_is_closed, stabilizer_subtorus, WeightMatrix};

/// `Crit(f)` inside `V` with its canonical model `(Omega_V, df, 0, S)`.
#[derive(Clone, Debug)]
pub struct DCriticalChart {
    pub potential: MultiPoly,
    pub model: LocalModel,
}

pub fn dcritical_chart(f: &MultiPoly, w: &WeightMatrix) -> Result<DCriticalChart> {
    if !w.is_invariant(f) {
        return Err(Error::precondition(format!(
            "potential {f} is not invariant"
        )));
    }
    let ring = f.ring();
    let omega = (0..ring.nvars()).map(|i| f.partial_derivative(i)).collect();
    Ok(DCriticalChart {
        potential: f.clone(),
        model: cotangent_model(ring, w, omega)?,
    })
}

/// The relative chart over the base coordinate `base`: only the fibre
/// directions carry frames, and the base must have weight zero.
pub fn dcritical_chart_relative(
    f: &MultiPoly,
    w: &WeightMatrix,
    base: &str,
) -> Result<DCriticalChart> {
    let ring = f.ring();
    let t = ring.var_index(base)?;
    if !w.is_zero_column(t) {
        return Err(Error::precondition(format!(
            "base parameter `{base}` must have weight zero"
        )));
    }
    if !w.is_invariant(f) {
        return Err(Error::precondition(format!(
            "potential {f} is not invariant"
        )));
    }
    let n = ring.nvars();
    let fibre: Vec<usize> = (0..n).filter(|&i| i != t).collect();
    let bundle = EquivariantBundle::new(
        fibre
            .iter()
            .map(|&i| format!("d{}", ring.vars()[i]))
            .collect(),
        fibre.iter().map(|&i| w.column(i)).collect(),
    )?;
    let omega = fibre.iter().map(|&i| f.partial_derivative(i)).collect();
    let phi = w
        .rows()
        .iter()
        .map(|row| {
            fibre
                .iter()
                .map(|&i| ring.var(i).scale(&rat(row[i])))
                .collect()
        })
        .collect();
    let psi = fibre
        .iter()
        .map(|&j| {
            (0..n)
                .map(|i| if i == j { ring.one() } else { ring.zero() })
                .collect()
        })
        .collect();
    Ok(DCriticalChart {
        potential: f.clone(),
        model: LocalModel::new(ring, w.clone(), bundle, omega, Some(Cofactor { phi, psi }))?,
    })
}

/// The complex `g -> T_V -> F -> g^*(-D)` evaluated at a point of `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourTermComplexAtPoint {
    /// `n x k`, column `a` is `(w_{a,i} p_i)_i`.
    pub m0: Matrix,
    /// `r x n`, the derivative of the section.
    pub m1: Matrix,
    /// `k x r`, the twisted cofactor.
    pub m2: Matrix,
    pub point: Vec<Rational>,
    pub twist: u32,
}

impl FourTermComplexAtPoint {
    pub fn first_composition_vanishes(&self) -> bool {
        self.m0.cols() == 0 || self.m1.rows() == 0 || self.m1.mul(&self.m0).is_zero()
    }

    pub fn second_composition_vanishes(&self) -> bool {
        self.m1.cols() == 0 || self.m2.rows() == 0 || self.m2.mul(&self.m1).is_zero()
    }
}

fn eval_all(ps: &[MultiPoly], p: &[Rational]) -> Result<Vec<Rational>> {
    ps.iter().map(|q| q.evaluate(p)).collect()
}

pub fn on_zero_locus(m: &LocalModel, p: &[Rational]) -> Result<bool> {
    Ok(eval_all(&m.section, p)?.iter().all(Zero::is_zero))
}

/// Up to `limit` rational points of `U`, found by scanning a small grid of
/// coordinate values in order of height. Returns fewer if `U` has fewer
/// points on the grid.
pub fn sample_points(m: &LocalModel, limit: usize) -> Result<Vec<Vec<Rational>>> {
    let values = [
        rat(0),
        rat(1),
        rat(-1),
        rat(2),
        rat(-2),
        frac(1, 2),
        frac(-1, 2),
        rat(3),
        rat(-3),
        frac(1, 3),
        frac(-2, 3),
    ];
    let n = m.n();
    let mut out = Vec::new();
    for height in 0..values.len() {
        let mut idx = vec![0usize; n];
        loop {
            if idx.iter().any(|&i| i == height) || (height == 0 && n == 0) {
                let p: Vec<Rational> = idx.iter().map(|&i| values[i].clone()).collect();
                if on_zero_locus(m, &p)? {
                    out.push(p);
                    if out.len() >= limit {
                        return Ok(out);
                    }
                }
            }
            let mut j = 0;
            while j < n && idx[j] == height {
                idx[j] = 0;
                j += 1;
            }
            if j == n {
                break;
            }
            idx[j] += 1;
        }
    }
    Ok(out)
}

/// `(d omega)(p)` as an `r x n` matrix.
pub fn section_derivative(m: &LocalModel, p: &[Rational]) -> Result<Matrix> {
    let mut rows = Vec::with_capacity(m.r());
    for s in &m.section {
        rows.push(
            (0..m.n())
                .map(|i| s.partial_derivative(i).evaluate(p))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(Matrix::with_shape(
        m.r(),
        m.n(),
        rows.into_iter().flatten().collect(),
    ))
}

pub fn four_term_at(m: &LocalModel, p: &[Rational]) -> Result<FourTermComplexAtPoint> {
    if p.len() != m.n() {
        return Err(Error::precondition(format!(
            "point has {} coordinates, expected {}",
            p.len(),
            m.n()
        )));
    }
    if !on_zero_locus(m, p)? {
        return Err(Error::precondition("point does not lie on U"));
    }
    let (n, k, r) = (m.n(), m.k(), m.r());
    let mut m0 = Matrix::zeros(n, k);
    for (a, row) in m.weights.rows().iter().enumerate() {
        for i in 0..n {
            m0[(i, a)] = rat(row[i]) * &p[i];
        }
    }
    let m1 = section_derivative(m, p)?;
    let mut m2 = Matrix::zeros(k, r);
    if k > 0 && r > 0 {
        let phi = m.phi_twisted()?;
        for a in 0..k {
            for j in 0..r {
                m2[(a, j)] = phi[a][j].evaluate(p)?;
            }
        }
    }
    Ok(FourTermComplexAtPoint {
        m0,
        m1,
        m2,
        point: p.to_vec(),
        twist: m.bundle.twist,
    })
}

/// `(h0, h1, h2, h3)` of the complex; fails if it is not a complex.
pub fn cohomology_dims(c: &FourTermComplexAtPoint) -> Result<(usize, usize, usize, usize)> {
    if !c.first_composition_vanishes() || !c.second_composition_vanishes() {
        return Err(Error::theorem(
            "complex",
            "consecutive maps do not compose to zero",
        ));
    }
    let (k, n, r) = (c.m0.cols(), c.m0.rows(), c.m1.rows());
    let (a, b, d) = (c.m0.rank(), c.m1.rank(), c.m2.rank());
    let h = (k - a, n - b - a, r - d - b, k - d);
    let euler = h.0 as i64 - h.1 as i64 + h.2 as i64 - h.3 as i64;
    if euler != r as i64 - n as i64 {
        return Err(Error::theorem(
            "complex",
            format!("Euler characteristic {euler} != {}", r as i64 - n as i64),
        ));
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedObstruction {
    pub dim: usize,
    pub warning: Option<String>,
}

/// `h2` of the complex at a point with finite stabilizer.
pub fn reduced_obstruction_dim(m: &LocalModel, p: &[Rational]) -> Result<ReducedObstruction> {
    let support: Vec<usize> = (0..p.len()).filter(|&i| !p[i].is_zero()).collect();
    if !stabilizer_subtorus(&support, &m.weights).is_trivial() {
        return Err(Error::precondition(
            "point is not stable: its stabilizer is positive-dimensional",
        ));
    }
    let c = four_term_at(m, p)?;
    let dim = cohomology_dims(&c)?.2;
    let warning = if !orbit_is_closed(&support, &m.weights) {
        Some("orbit is not closed in the ambient space".to_string())
    } else if !m.stability.semistable(&support) {
        Some("point is unstable".to_string())
    } else {
        None
    };
    Ok(ReducedObstruction { dim, warning })
}

/// A map `Spec Q[e]/(e^m) -> U`, one coefficient list per coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallExtension {
    pub m: usize,
    pub coords: Vec<Vec<Rational>>,
}

impl SmallExtension {
    /// Coefficients of `e^0 .. e^{m-1}`, padded with zeros.
    pub fn new(m: usize, coords: Vec<Vec<Rational>>) -> Result<Self> {
        if m == 0 || m > 6 {
            return Err(Error::precondition(
                "extension order must be between 1 and 6",
            ));
        }
        let mut coords = coords;
        for c in &mut coords {
            if c.len() > m {
                return Err(Error::precondition(
                    "series has terms beyond the extension order",
                ));
            }
            c.resize(m, Rational::zero());
        }
        Ok(SmallExtension { m, coords })
    }

    pub fn point(&self) -> Vec<Rational> {
        self.coords.iter().map(|c| c[0].clone()).collect()
    }
}

/// `p(g)` truncated after `e^order`, for series `g`.
pub fn eval_series(p: &MultiPoly, g: &[Vec<Rational>], order: usize) -> Vec<Rational> {
    let len = order + 1;
    let mul = |a: &[Rational], b: &[Rational]| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(len - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let pad = |c: &[Rational]| -> Vec<Rational> {
        let mut v: Vec<Rational> = c.iter().take(len).cloned().collect();
        v.resize(len, Rational::zero());
        v
    };
    let mut total = vec![Rational::zero(); len];
    for (mono, c) in p.terms() {
        let mut t = vec![Rational::zero(); len];
        t[0] = c.clone();
        for (i, &e) in mono.0.iter().enumerate() {
            let gi = pad(&g[i]);
            for _ in 0..e {
                t = mul(&t, &gi);
            }
        }
        for (a, b) in total.iter_mut().zip(t) {
            *a += b;
        }
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    /// The class in `coker(d omega)(p)`, in the coordinates of the left
    /// kernel basis.
    pub class: Vec<Rational>,
    pub liftable: bool,
    pub cokernel_dim: usize,
}

/// The class of the `e^m` coefficient of `omega(g)` in the cokernel of
/// `(d omega)(p)`. It vanishes exactly when `g` lifts one order further.
pub fn obstruction_assignment(m: &LocalModel, ext: &SmallExtension) -> Result<Obstruction> {
    if ext.coords.len() != m.n() {
        return Err(Error::precondition(
            "extension has the wrong number of coordinates",
        ));
    }
    for s in &m.section {
        let v = eval_series(s, &ext.coords, ext.m);
        if v[..ext.m].iter().any(|x| !x.is_zero()) {
            return Err(Error::precondition(format!(
                "malformed extension: the map does not land in U to order {}",
                ext.m - 1
            )));
        }
    }
    let p = ext.point();
    let m1 = section_derivative(m, &p)?;
    let top: Vec<Rational> = m
        .section
        .iter()
        .map(|s| eval_series(s, &ext.coords, ext.m)[ext.m].clone())
        .collect();
    let rho = m1.cokernel_projection();
    let class = if rho.rows() == 0 {
        vec![]
    } else {
        rho.mul_vec(&top)
    };
    Ok(Obstruction {
        liftable: class.iter().all(Zero::is_zero),
        cokernel_dim: rho.rows(),
        class,
    })
}

/// Lift `ext` by one order, or `None` if obstructed. Among the lifts the
/// one with the particular solution of smallest support is chosen.
pub fn lift_once(m: &LocalModel, ext: &SmallExtension) -> Result<Option<SmallExtension>> {
    if !obstruction_assignment(m, ext)?.liftable {
        return Ok(None);
    }
    let p = ext.point();
    let m1 = section_derivative(m, &p)?;
    let top: Vec<Rational> = m
        .section
        .iter()
        .map(|s| -eval_series(s, &ext.coords, ext.m)[ext.m].clone())
        .collect();
    let v = m1
        .solve(&top)
        .ok_or_else(|| Error::theorem("obstruction", "vanishing class but no lift"))?;
    let mut coords = ext.coords.clone();
    for (c, x) in coords.iter_mut().zip(v) {
        c.push(x);
    }
    Ok(Some(SmallExtension {
        m: ext.m + 1,
        coords,
    }))
}

/// Outcome of extending a point order by order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionChain {
    /// The last map constructed.
    pub map: SmallExtension,
    /// Obstruction of lifting `map` one order further.
    pub obstruction: Obstruction,
    /// The order at which the chain got stuck, if it did before `m`.
    pub stuck_at: Option<usize>,
}

/// Start from `p`, leave in the first tangent direction (kernel of the
/// derivative) and extend by lifts up to order `m`; report the obstruction
/// of the final step.
pub fn obstruction_chain(m: &LocalModel, p: &[Rational], order: usize) -> Result<ObstructionChain> {
    if !on_zero_locus(m, p)? {
        return Err(Error::precondition("point does not lie on U"));
    }
    let mut ext = SmallExtension::new(1, p.iter().map(|x| vec![x.clone()]).collect())?;
    if order >= 2 {
        let m1 = section_derivative(m, p)?;
        let tangent = m1
            .kernel()
            .into_iter()
            .next()
            .unwrap_or_else(|| vec![Rational::zero(); m.n()]);
        for (c, x) in ext.coords.iter_mut().zip(tangent) {
            c.push(x);
        }
        ext.m = 2;
    }
    while ext.m < order {
        match lift_once(m, &ext)? {
            Some(next) => ext = next,
            None => {
                let obstruction = obstruction_assignment(m, &ext)?;
                return Ok(ObstructionChain {
                    stuck_at: Some(ext.m),
                    map: ext,
                    obstruction,
                });
            }
        }
    }
    let obstruction = obstruction_assignment(m, &ext)?;
    Ok(ObstructionChain {
        map: ext,
        obstruction,
        stuck_at: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;

    fn chart(vars: &[&str], w: &[i64], f: &str) -> DCriticalChart {
        let ring = Ring::new(vars).unwrap();
        let w = if w.is_empty() {
            WeightMatrix::trivial(vars.len())
        } else {
            WeightMatrix::new(vars.len(), vec![w.to_vec()]).unwrap()
        };
        dcritical_chart(&ring.parse(f).unwrap(), &w).unwrap()
    }

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn charts() {
        let c = chart(&["x", "y"], &[1, -1], "x*y");
        let s: Vec<String> = c.model.section.iter().map(|p| p.to_string()).collect();
        assert_eq!(s, vec!["y", "x"]);
        let ring = Ring::new(&["x"]).unwrap();
        let w = WeightMatrix::new(1, vec![vec![1]]).unwrap();
        assert!(dcritical_chart(&ring.parse("x").unwrap(), &w).is_err());
    }

    #[test]
    fn sampled_points_lie_on_u() {
        let ring = Ring::new(&["x", "y", "z"]).unwrap();
        let w = WeightMatrix::new(3, vec![vec![1, -1, 0]]).unwrap();
        let m = dcritical_chart(&ring.parse("x*y*z").unwrap(), &w)
            .unwrap()
            .model;
        let pts = sample_points(&m, 20).unwrap();
        assert_eq!(pts.len(), 20);
        assert_eq!(pts[0], vec![rat(0); 3]);
        let cone = dcritical_chart(&ring.parse("x*y - z^2").unwrap(), &w)
            .unwrap()
            .model;
        assert_eq!(sample_points(&cone, 20).unwrap(), vec![vec![rat(0); 3]]);
    }

    #[test]
    fn worked_complexes() {
        let c = chart(&["x", "y"], &[1, -1], "1/2*x^2*y^2");
        let k = four_term_at(&c.model, &pt(&[1, 0])).unwrap();
        assert_eq!(k.m0, Matrix::from_ints(&[&[1], &[0]]));
        assert_eq!(k.m1, Matrix::from_ints(&[&[0, 0], &[0, 1]]));
        assert_eq!(k.m2, Matrix::from_ints(&[&[1, 0]]));
        assert_eq!(cohomology_dims(&k).unwrap(), (0, 0, 0, 0));
        let k = four_term_at(&c.model, &pt(&[0, 0])).unwrap();
        assert!(k.m0.is_zero() && k.m1.is_zero() && k.m2.is_zero());
        assert_eq!(cohomology_dims(&k).unwrap(), (1, 2, 2, 1));
        let c = chart(&["x", "y", "z"], &[1, -1, 0], "x*y*z");
        let k = four_term_at(&c.model, &pt(&[1, 0, 0])).unwrap();
        assert_eq!(
            k.m1,
            Matrix::from_ints(&[&[0, 0, 0], &[0, 0, 1], &[0, 1, 0]])
        );
        assert!(k.m1.is_symmetric());
        assert_eq!(cohomology_dims(&k).unwrap(), (0, 0, 0, 0));
        assert!(four_term_at(&c.model, &pt(&[1, 1, 0])).is_err());
    }

    #[test]
    fn reduced_obstructions() {
        let c = chart(&["x", "y"], &[1, -1], "1/2*x^2*y^2");
        let r = reduced_obstruction_dim(&c.model, &pt(&[1, 0])).unwrap();
        assert_eq!(r.dim, 0);
        assert!(reduced_obstruction_dim(&c.model, &pt(&[0, 0])).is_err());
        let c = chart(&["x", "y", "z"], &[1, -1, 0], "x*y*z");
        let r = reduced_obstruction_dim(&c.model, &pt(&[1, 0, 0])).unwrap();
        assert_eq!(r.dim, 0);
        assert!(r.warning.is_some());
        let c = chart(&["x"], &[], "1/3*x^3");
        assert_eq!(reduced_obstruction_dim(&c.model, &pt(&[0])).unwrap().dim, 1);
    }

    #[test]
    fn obstructions() {
        let c = chart(&["x"], &[], "1/3*x^3");
        let ext = SmallExtension::new(2, vec![vec![rat(0), rat(1)]]).unwrap();
        let o = obstruction_assignment(&c.model, &ext).unwrap();
        assert_eq!(o.class, vec![rat(1)]);
        assert!(!o.liftable);
        let ch = obstruction_chain(&c.model, &pt(&[0]), 2).unwrap();
        assert!(!ch.obstruction.liftable);

        let c = chart(&["x"], &[], "1/2*x^2");
        for m in 1..=3 {
            let ext = SmallExtension::new(m, vec![vec![]]).unwrap();
            let o = obstruction_assignment(&c.model, &ext).unwrap();
            assert!(o.liftable);
            assert_eq!(o.cokernel_dim, 0);
        }

        let c = chart(&["x", "y"], &[1, -1], "1/2*x^2*y^2");
        let ext = SmallExtension::new(2, vec![vec![rat(1), rat(1)], vec![]]).unwrap();
        let o = obstruction_assignment(&c.model, &ext).unwrap();
        assert!(o.liftable);
        let bad = SmallExtension::new(2, vec![vec![rat(1)], vec![rat(0), rat(1)]]).unwrap();
        assert!(obstruction_assignment(&c.model, &bad).is_err());
    }

    #[test]
    fn series() {
        let ring = Ring::new(&["x", "y"]).unwrap();
        let p = ring.parse("x^2*y + 1/2").unwrap();
        let g = vec![vec![rat(1), rat(1)], vec![rat(0), rat(2)]];
        // (1+e)^2 * 2e + 1/2 = 1/2 + 2e + 4e^2 + ...
        assert_eq!(eval_series(&p, &g, 2), vec![frac(1, 2), rat(2), rat(4)]);
    }

    #[test]
    fn relative_chart() {
        let ring = Ring::new(&["x", "y", "z", "t"]).unwrap();
        let w = WeightMatrix::new(4, vec![vec![1, -1, 0, 0]]).unwrap();
        let f = ring.parse("x*y*(z - t)").unwrap();
        let c = dcritical_chart_relative(&f, &w, "t").unwrap();
        assert_eq!(c.model.r(), 3);
        assert!(crate::blowup::check_weak_local_model(&c.model).all_passed());
        let w2 = WeightMatrix::new(4, vec![vec![1, -1, 0, 1]]).unwrap();
        assert!(dcritical_chart_relative(&f, &w2, "t").is_err());
    }
}
