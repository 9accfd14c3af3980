//! Omega-equivalence of sections, its construction for potentials that
//! differ by an element of the square of the critical ideal, its transport
//! to blowup charts, and the comparison of obstruction spaces along a
//! coordinate embedding.

use num_traits::Zero;

use crate::blowup::{BlowupChart, LocalModel};
use crate::error::{Error, Result};
use crate::groebner::{lift_certificate, saturate, Budget, Ideal};
use crate::poly::{MultiPoly, Rational};
use crate::torus::{reynolds_for, Subtorus, WeightMatrix};

use super::section_derivative;

/// Rows indexed by tangent directions `d/dx_i`, columns by frame elements.
pub type PolyMatrix = Vec<Vec<MultiPoly>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaReport {
    pub ideals_equal: bool,
    pub forward: bool,
    pub backward: bool,
    pub equivariant: bool,
    pub witnesses: Vec<String>,
}

impl OmegaReport {
    pub fn passed(&self) -> bool {
        self.ideals_equal && self.forward && self.backward && self.equivariant
    }
}

fn zero_matrix(m: &LocalModel) -> PolyMatrix {
    vec![vec![m.ring.zero(); m.r()]; m.n()]
}

/// `J A v` with `J[j][i] = d s_j / d x_i` for `s = jac_of`.
fn correction(jac_of: &[MultiPoly], a: &PolyMatrix, v: &[MultiPoly]) -> Vec<MultiPoly> {
    let ring = jac_of[0].ring();
    let n = a.len();
    let av: Vec<MultiPoly> = a
        .iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(ring.zero(), |acc, (x, y)| &acc + &(x * y))
        })
        .collect();
    jac_of
        .iter()
        .map(|s| {
            (0..n).fold(ring.zero(), |acc, i| {
                &acc + &(&s.partial_derivative(i) * &av[i])
            })
        })
        .collect()
}

fn weight_ok(m: &LocalModel, a: &PolyMatrix) -> bool {
    a.len() == m.n()
        && a.iter().enumerate().all(|(i, row)| {
            row.len() == m.r()
                && row.iter().zip(&m.bundle.weights).all(|(p, f)| {
                    let target: Vec<i64> = f
                        .iter()
                        .zip(m.weights.column(i))
                        .map(|(x, y)| x + y)
                        .collect();
                    p.terms()
                        .keys()
                        .all(|mono| m.weights.exponent_weight(mono) == target)
                })
        })
}

/// Check that `omega` (the section of `m`) and `omega_bar` are
/// Omega-equivalent via `A` and `B`, after localizing at `h`:
/// equal saturated ideals, and
/// `omega - omega_bar - (d omega_bar) A omega_bar` and
/// `omega_bar - omega - (d omega) B omega` in `I^2 F`.
pub fn verify_omega_equivalence(
    m: &LocalModel,
    omega_bar: &[MultiPoly],
    a: &PolyMatrix,
    b: &PolyMatrix,
    h: &MultiPoly,
    basepoint: Option<&[Rational]>,
    budget: Budget,
) -> Result<OmegaReport> {
    if omega_bar.len() != m.r() {
        return Err(Error::precondition("sections have different ranks"));
    }
    if let Some(p) = basepoint {
        if h.evaluate(p)?.is_zero() {
            return Err(Error::precondition("the hint vanishes at the basepoint"));
        }
    }
    let mut witnesses = Vec::new();
    let i = saturate(&m.ideal(), h, budget)?;
    let ibar = saturate(&Ideal::new(&m.ring, omega_bar.iter().cloned()), h, budget)?;
    let gi = i.gb(budget)?;
    let ideals_equal = gi.basis() == ibar.gb(budget)?.basis();
    if !ideals_equal {
        witnesses.push(format!(
            "ideals differ: {:?} vs {:?}",
            gi.to_strings(),
            ibar.gb(budget)?.to_strings()
        ));
    }
    let equivariant = weight_ok(m, a) && weight_ok(m, b);
    if !equivariant {
        witnesses.push("A or B is not equivariant".to_string());
    }
    let mut forward = false;
    let mut backward = false;
    if ideals_equal && m.r() > 0 && a.len() == m.n() && b.len() == m.n() {
        let sq = saturate(&i.square(), h, budget)?.gb(budget)?;
        let fwd = correction(omega_bar, a, omega_bar);
        let bwd = correction(&m.section, b, &m.section);
        forward = true;
        backward = true;
        for j in 0..m.r() {
            let d = &(&m.section[j] - &omega_bar[j]) - &fwd[j];
            if !sq.contains(&d) {
                forward = false;
                witnesses.push(format!("forward component {j}: {d} not in I^2"));
            }
            let e = &(&omega_bar[j] - &m.section[j]) - &bwd[j];
            if !sq.contains(&e) {
                backward = false;
                witnesses.push(format!("backward component {j}: {e} not in I^2"));
            }
        }
    } else if ideals_equal && m.r() == 0 {
        forward = true;
        backward = true;
    }
    Ok(OmegaReport {
        ideals_equal,
        forward,
        backward,
        equivariant,
        witnesses,
    })
}

/// A `u` with `v_j = u * w_j` for all `j`, if one exists.
pub fn find_unit_cofactor(
    v: &[MultiPoly],
    w: &[MultiPoly],
    budget: Budget,
) -> Result<Option<MultiPoly>> {
    let Some(j0) = w.iter().position(|p| !p.is_zero()) else {
        return Ok(None);
    };
    let ring = w[j0].ring();
    let Some(q) = lift_certificate(&v[j0], &Ideal::new(ring, [w[j0].clone()]), budget)? else {
        return Ok(None);
    };
    let u = q.into_iter().next().unwrap();
    if v.iter().zip(w).all(|(a, b)| *a == &u * b) {
        Ok(Some(u))
    } else {
        Ok(None)
    }
}

/// Data exhibiting `df` and `dg` as Omega-equivalent.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub a: PolyMatrix,
    pub b: PolyMatrix,
    pub hint: MultiPoly,
    pub report: OmegaReport,
}

fn gradient(f: &MultiPoly) -> Vec<MultiPoly> {
    (0..f.ring().nvars())
        .map(|i| f.partial_derivative(i))
        .collect()
}

/// From `diff = sum_{k<=l} c_kl v_k v_l`, the matrix `C + C^T`, projected
/// to the equivariant part (entry `(k,l)` of weight `w_k + w_l`).
fn matrix_from_certificate(
    diff: &MultiPoly,
    v: &[MultiPoly],
    w: &WeightMatrix,
    budget: Budget,
) -> Result<Option<PolyMatrix>> {
    let ring = diff.ring();
    let n = v.len();
    let mut pairs = Vec::new();
    let mut prods = Vec::new();
    for k in 0..n {
        for l in k..n {
            pairs.push((k, l));
            prods.push(&v[k] * &v[l]);
        }
    }
    let Some(q) = lift_certificate(diff, &Ideal::new(ring, prods.iter().cloned()), budget)? else {
        return Ok(None);
    };
    // Ideal::new drops zero generators; realign the quotients.
    let mut q_iter = q.into_iter();
    let mut a = vec![vec![ring.zero(); n]; n];
    for ((k, l), p) in pairs.into_iter().zip(&prods) {
        if p.is_zero() {
            continue;
        }
        let c = q_iter.next().unwrap();
        a[k][l] = &a[k][l] + &c;
        a[l][k] = &a[l][k] + &c;
    }
    let a = a
        .into_iter()
        .enumerate()
        .map(|(k, row)| {
            row.into_iter()
                .enumerate()
                .map(|(l, p)| project_weight(&p, w, &add(&w.column(k), &w.column(l))))
                .collect()
        })
        .collect();
    Ok(Some(a))
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// The part of `p` of weight `target`.
fn project_weight(p: &MultiPoly, w: &WeightMatrix, target: &[i64]) -> MultiPoly {
    if target.iter().all(|&x| x == 0) {
        return reynolds_for(p, w);
    }
    MultiPoly::from_terms(
        p.ring(),
        p.terms()
            .iter()
            .filter(|(m, _)| w.exponent_weight(m) == target)
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// Build `A`, `B` and a localization hint for potentials `f`, `g` whose
/// difference lies in the square of the critical ideal.
pub fn construct_equivalence(
    f: &MultiPoly,
    g: &MultiPoly,
    w: &WeightMatrix,
    hint: Option<MultiPoly>,
    budget: Budget,
) -> Result<Equivalence> {
    let mf = super::dcritical_chart(f, w)?.model;
    super::dcritical_chart(g, w)?;
    let ring = f.ring();
    let (wf, wg) = (gradient(f), gradient(g));
    let hint = match hint {
        Some(h) => h,
        None => match find_unit_cofactor(&wg, &wf, budget)? {
            Some(u) if !u.is_constant() => u,
            _ => match find_unit_cofactor(&wf, &wg, budget)? {
                Some(u) if !u.is_constant() => u,
                _ => ring.one(),
            },
        },
    };
    let i_f = saturate(&Ideal::new(ring, wf.iter().cloned()), &hint, budget)?;
    let i_g = saturate(&Ideal::new(ring, wg.iter().cloned()), &hint, budget)?;
    if i_f.gb(budget)?.basis() != i_g.gb(budget)?.basis() {
        return Err(Error::precondition(
            "critical ideals differ even after saturation; supply a localization hint",
        ));
    }
    let diff = f - g;
    let sq = saturate(&i_f.square(), &hint, budget)?.gb(budget)?;
    if !sq.contains(&diff) {
        return Err(Error::precondition(
            "certificate not found: f - g is not in the square of the critical ideal",
        ));
    }
    let zero = zero_matrix(&mf);
    let mut candidates_a = Vec::new();
    if let Some(a) = matrix_from_certificate(&diff, &wg, w, budget)? {
        candidates_a.push(a);
    }
    candidates_a.push(zero.clone());
    let mut candidates_b = Vec::new();
    if let Some(b) = matrix_from_certificate(&(g - f), &wf, w, budget)? {
        candidates_b.push(b);
    }
    candidates_b.push(zero);
    let mut last = None;
    for a in &candidates_a {
        for b in &candidates_b {
            let report = verify_omega_equivalence(&mf, &wg, a, b, &hint, None, budget)?;
            if report.passed() {
                return Ok(Equivalence {
                    a: a.clone(),
                    b: b.clone(),
                    hint,
                    report,
                });
            }
            last = Some(report);
        }
    }
    Err(Error::theorem(
        "omega-equivalence",
        format!(
            "no candidate passed: {:?}",
            last.map(|r| r.witnesses).unwrap_or_default()
        ),
    ))
}

/// Transport `A: F -> T_V` to the chart. Column `j` of `A`, multiplied by
/// `xi` when `e_j` is moving, is a vector field on `V`; its lift has
/// `d/dxi` coefficient `v_k`, `d/dT_i` coefficient `(v_i - T_i v_k)/xi`
/// and unchanged fixed coefficients.
pub fn lift_morphism_to_blowup(
    a: &PolyMatrix,
    m: &LocalModel,
    chart: &BlowupChart,
) -> Result<PolyMatrix> {
    let full = Subtorus::full(m.k());
    if chart.center != full {
        let restricted = m.restrict(&chart.center);
        let charts = crate::blowup::make_charts(
            &restricted.ring,
            &restricted.weights,
            &Subtorus::full(chart.center.dim()),
        )?;
        let c = charts
            .into_iter()
            .find(|c| c.pivot == chart.pivot)
            .ok_or_else(|| Error::precondition("chart pivot is not moving for the center"))?;
        return lift_morphism_to_blowup(a, &restricted, &c);
    }
    if !weight_ok(m, a) {
        return Err(Error::precondition("morphism is not equivariant"));
    }
    let k = chart.pivot;
    let xi = chart.xi();
    let ring = &chart.ring;
    let mut out = vec![vec![ring.zero(); m.r()]; m.n()];
    for (j, f) in m.bundle.weights.iter().enumerate() {
        let moving = f.iter().any(|&x| x != 0);
        let v: Vec<MultiPoly> = (0..m.n())
            .map(|i| {
                let p = chart.pullback(&a[i][j]);
                if moving {
                    &p * &xi
                } else {
                    p
                }
            })
            .collect();
        for i in 0..m.n() {
            out[i][j] = if i == k || !chart.is_moving(i) {
                v[i].clone()
            } else {
                let num = &v[i] - &(&ring.var(i) * &v[k]);
                num.div_var_power(k, 1).ok_or_else(|| {
                    Error::theorem("morphism-lift", format!("{num} is not divisible by {xi}"))
                })?
            };
        }
    }
    Ok(out)
}

/// Comparison of obstruction spaces at a point for a model `small` on `V`
/// and `big` on `V x A^aux`, both with frame `dx`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiCk {
    pub dim_small: usize,
    pub dim_big: usize,
    pub well_defined: bool,
    pub bijective: bool,
}

pub fn phi_ck_at_point<S: AsRef<str>>(
    small: &LocalModel,
    big: &LocalModel,
    aux: &[S],
    p: &[Rational],
    budget: Budget,
) -> Result<PhiCk> {
    let aux: Vec<String> = aux.iter().map(|s| s.as_ref().to_string()).collect();
    let keep: Vec<usize> = (0..big.n())
        .filter(|&i| !aux.contains(&big.ring.vars()[i]))
        .collect();
    let same = keep.len() == small.n()
        && keep
            .iter()
            .zip(small.ring.vars())
            .all(|(&i, v)| &big.ring.vars()[i] == v);
    if !same || small.r() != small.n() || big.r() != big.n() {
        return Err(Error::precondition(
            "expected cotangent models on V and on V times the auxiliary coordinates",
        ));
    }
    let aux_idx: Vec<usize> = (0..big.n()).filter(|i| !keep.contains(i)).collect();
    let zero: Vec<(usize, Rational)> = aux_idx.iter().map(|&i| (i, Rational::zero())).collect();
    let restricted = keep
        .iter()
        .map(|&i| big.section[i].specialize(&zero).to_ring(&small.ring))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| {
            Error::precondition(
                "incompatible sections: restriction still involves auxiliary variables",
            )
        })?;
    let zero_a = vec![vec![small.ring.zero(); small.r()]; small.n()];
    let rep = verify_omega_equivalence(
        small,
        &restricted,
        &zero_a,
        &zero_a,
        &small.ring.one(),
        None,
        budget,
    )?;
    if !rep.passed() {
        return Err(Error::precondition(format!(
            "incompatible sections: {:?}",
            rep.witnesses
        )));
    }
    let mut pb = vec![Rational::zero(); big.n()];
    for (j, &i) in keep.iter().enumerate() {
        pb[i] = p[j].clone();
    }
    let ms = section_derivative(small, p)?;
    let mb = section_derivative(big, &pb)?;
    let rho_s = ms.cokernel_projection();
    let rho_b = mb.cokernel_projection();
    let mut proj = crate::linalg::Matrix::zeros(small.r(), big.r());
    for (j, &i) in keep.iter().enumerate() {
        proj[(j, i)] = Rational::from_integer(1.into());
    }
    let induced = if rho_s.rows() == 0 {
        crate::linalg::Matrix::zeros(0, big.r())
    } else {
        rho_s.mul(&proj)
    };
    let well_defined = induced.rows() == 0 || induced.mul(&mb).is_zero();
    let bijective = well_defined && rho_s.rows() == rho_b.rows() && induced.rank() == rho_s.rows();
    Ok(PhiCk {
        dim_small: rho_s.rows(),
        dim_big: rho_b.rows(),
        well_defined,
        bijective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{blowup_local_model, make_charts};
    use crate::dcrit::dcritical_chart;
    use crate::poly::{rat, Ring};

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn reflexive_and_negative() {
        let ring = Ring::new(&["x", "y"]).unwrap();
        let w = WeightMatrix::new(2, vec![vec![1, -1]]).unwrap();
        let m = dcritical_chart(&ring.parse("x*y").unwrap(), &w)
            .unwrap()
            .model;
        let z = zero_matrix(&m);
        let r = verify_omega_equivalence(&m, &m.section, &z, &z, &ring.one(), None, b()).unwrap();
        assert!(r.passed());
        let other = vec![ring.parse("y").unwrap(), ring.parse("x + 1").unwrap()];
        let r = verify_omega_equivalence(&m, &other, &z, &z, &ring.one(), None, b()).unwrap();
        assert!(!r.ideals_equal && !r.passed());
    }

    #[test]
    fn one_variable_pair() {
        let ring = Ring::new(&["x"]).unwrap();
        let w = WeightMatrix::trivial(1);
        let f = ring.parse("1/2*x^2").unwrap();
        let g = ring.parse("1/2*x^2 + x^4").unwrap();
        let e = construct_equivalence(&f, &g, &w, None, b()).unwrap();
        assert_eq!(e.hint.to_string(), "4*x^2 + 1");
        assert!(e.report.passed());
        let e = construct_equivalence(&f, &f, &w, None, b()).unwrap();
        assert!(e.hint.is_constant());
        assert!(e.a.iter().flatten().all(MultiPoly::is_zero));
    }

    #[test]
    fn two_variable_pair_and_blowup() {
        let ring = Ring::new(&["x", "y"]).unwrap();
        let w = WeightMatrix::new(2, vec![vec![1, -1]]).unwrap();
        let f = ring.parse("1/2*x^2*y^2").unwrap();
        let g = ring.parse("1/2*x^2*y^2 + x^4*y^4").unwrap();
        let e = construct_equivalence(&f, &g, &w, None, b()).unwrap();
        assert_eq!(e.hint.to_string(), "4*x^2*y^2 + 1");
        let mf = dcritical_chart(&f, &w).unwrap().model;
        let mg = dcritical_chart(&g, &w).unwrap().model;
        let p0 = [rat(0), rat(0)];
        let r = verify_omega_equivalence(&mf, &mg.section, &e.a, &e.b, &e.hint, Some(&p0), b())
            .unwrap();
        assert!(r.passed());
        for c in make_charts(&ring, &w, &Subtorus::full(1)).unwrap() {
            let bf = blowup_local_model(&mf, &c).unwrap();
            let bg = blowup_local_model(&mg, &c).unwrap();
            let a = lift_morphism_to_blowup(&e.a, &mf, &c).unwrap();
            let bb = lift_morphism_to_blowup(&e.b, &mf, &c).unwrap();
            let h = c.pullback(&e.hint);
            let r = verify_omega_equivalence(&bf, &bg.section, &a, &bb, &h, None, b()).unwrap();
            assert!(r.passed(), "{}: {:?}", c.name, r.witnesses);
        }
    }

    #[test]
    fn lift_of_a_swap() {
        let ring = Ring::new(&["x", "y"]).unwrap();
        let w = WeightMatrix::new(2, vec![vec![1, -1]]).unwrap();
        let m = dcritical_chart(&ring.parse("x*y").unwrap(), &w)
            .unwrap()
            .model;
        let a = vec![vec![ring.zero(), ring.one()], vec![ring.one(), ring.zero()]];
        let c = &make_charts(&ring, &w, &Subtorus::full(1)).unwrap()[0];
        let l = lift_morphism_to_blowup(&a, &m, c).unwrap();
        let s: Vec<Vec<String>> = l
            .iter()
            .map(|r| r.iter().map(|p| p.to_string()).collect())
            .collect();
        assert_eq!(s, vec![vec!["0", "xi_x"], vec!["1", "-T_y"]]);
        let bad = vec![
            vec![ring.one(), ring.zero()],
            vec![ring.zero(), ring.zero()],
        ];
        assert!(lift_morphism_to_blowup(&bad, &m, c).is_err());
        let z = zero_matrix(&m);
        assert!(lift_morphism_to_blowup(&z, &m, c)
            .unwrap()
            .iter()
            .flatten()
            .all(MultiPoly::is_zero));
    }

    #[test]
    fn comparison_maps() {
        let small_ring = Ring::new(&["x", "y"]).unwrap();
        let big_ring = Ring::new(&["x", "y", "u"]).unwrap();
        let ws = WeightMatrix::new(2, vec![vec![1, -1]]).unwrap();
        let wb = WeightMatrix::new(3, vec![vec![1, -1, 0]]).unwrap();
        let p = [rat(0), rat(0)];
        let cases = [
            ("x*y", "x*y + u^2", 0, 0, true),
            ("1/2*x^2*y^2", "1/2*x^2*y^2 + 1/2*u^2", 2, 2, true),
            ("1/2*x^2*y^2", "1/2*x^2*y^2 + u^3", 2, 3, false),
        ];
        for (fs, fb, ds, db, ok) in cases {
            let s = dcritical_chart(&small_ring.parse(fs).unwrap(), &ws)
                .unwrap()
                .model;
            let bm = dcritical_chart(&big_ring.parse(fb).unwrap(), &wb)
                .unwrap()
                .model;
            let r = phi_ck_at_point(&s, &bm, &["u"], &p, b()).unwrap();
            assert_eq!((r.dim_small, r.dim_big, r.bijective), (ds, db, ok), "{fb}");
        }
        let s = dcritical_chart(&small_ring.parse("x*y").unwrap(), &ws)
            .unwrap()
            .model;
        let bm = dcritical_chart(&big_ring.parse("x*y*u").unwrap(), &wb)
            .unwrap()
            .model;
        assert!(phi_ck_at_point(&s, &bm, &["u"], &p, b()).is_err());
    }
}
