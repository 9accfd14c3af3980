//! One-parameter families over the affine line: specialization of models
//! and the check that Kirwan blowup commutes with passing to fibers.

use crate::blowup::{blowup_section, intrinsic_ideal, make_charts, Cofactor, LocalModel};
use crate::dcrit::dcritical_chart_relative;
use crate::error::{Error, Result};
use crate::groebner::{Budget, Ideal};
use crate::poly::{Monomial, MultiPoly, Rational, Ring};
use crate::stability::StabilityNode;
use crate::torus::{fixed_locus, Subtorus, WeightMatrix};

/// A model over the line with coordinate `base`, on which the torus acts
/// trivially.
#[derive(Clone, Debug)]
pub struct FamilyModel {
    pub model: LocalModel,
    pub base: usize,
}

impl FamilyModel {
    pub fn new(model: LocalModel, base: &str) -> Result<Self> {
        let base = model.ring.var_index(base)?;
        if !model.weights.is_zero_column(base) {
            return Err(Error::precondition(format!(
                "base parameter `{}` must have weight zero",
                model.ring.vars()[base]
            )));
        }
        Ok(FamilyModel { model, base })
    }

    /// The relative d-critical chart of `f` over `base`.
    pub fn from_potential(f: &MultiPoly, w: &WeightMatrix, base: &str) -> Result<Self> {
        let chart = dcritical_chart_relative(f, w, base)?;
        FamilyModel::new(chart.model, base)
    }

    pub fn base_name(&self) -> &str {
        &self.model.ring.vars()[self.base]
    }

    /// The ring of a fiber.
    pub fn fiber_ring(&self) -> Ring {
        fiber_ring(&self.model.ring, self.base_name())
    }
}

fn fiber_ring(ring: &Ring, base: &str) -> Ring {
    let names: Vec<&String> = ring.vars().iter().filter(|v| v.as_str() != base).collect();
    Ring::new(&names).expect("subset of distinct names")
}

/// Substitute `base = c` and move to the ring without `base`.
pub fn specialize_poly(
    p: &MultiPoly,
    base: &str,
    c: &Rational,
    target: &Ring,
) -> Result<MultiPoly> {
    let t = p.ring().var_index(base)?;
    p.specialize(&[(t, c.clone())]).to_ring(target)
}

/// The fiber over `c`: every entry specialized, the base column dropped
/// from the weights and from `Psi`.
pub fn specialize(m: &FamilyModel, c: &Rational) -> Result<LocalModel> {
    let lm = &m.model;
    let t = m.base;
    let base = m.base_name().to_string();
    let ring = m.fiber_ring();
    let keep: Vec<usize> = (0..lm.n()).filter(|&i| i != t).collect();
    let sp = |p: &MultiPoly| specialize_poly(p, &base, c, &ring);
    let weights = lm.weights.select_columns(&keep);
    let section = lm.section.iter().map(sp).collect::<Result<Vec<_>>>()?;
    let cofactor = match &lm.cofactor {
        None => None,
        Some(cf) => Some(Cofactor {
            phi: cf
                .phi
                .iter()
                .map(|row| row.iter().map(sp).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?,
            psi: cf
                .psi
                .iter()
                .map(|row| {
                    keep.iter()
                        .map(|&i| sp(&row[i]))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?,
        }),
    };
    if lm.divisor.0[t] != 0 {
        return Err(Error::precondition("divisor involves the base parameter"));
    }
    let divisor = Monomial(keep.iter().map(|&i| lm.divisor.0[i]).collect());
    Ok(LocalModel {
        ring: ring.clone(),
        weights,
        bundle: lm.bundle.clone(),
        section,
        divisor,
        cofactor,
        group_basis: lm.group_basis.clone(),
        stability: StabilityNode::root(&ring),
    })
}

/// The fixed locus of the full torus is a coordinate subspace containing
/// the base direction, so it is a product with the line and flat over it.
pub fn check_fixed_locus_flat(m: &FamilyModel) -> bool {
    let w = &m.model.weights;
    w.is_zero_column(m.base) && !fixed_locus(w, &Subtorus::full(w.k())).contains(&m.base)
}

/// Per chart, whether the intrinsic ideal and blown-up section of the
/// family specialize to those of the fiber over `c`.
pub fn fiber_blowup_commutes(
    m: &FamilyModel,
    c: &Rational,
    budget: Budget,
) -> Result<Vec<(String, bool)>> {
    let lm = &m.model;
    let base = m.base_name().to_string();
    let fiber = specialize(m, c)?;
    let r = Subtorus::full(lm.k());
    let fiber_charts = make_charts(&fiber.ring, &fiber.weights, &r)?;
    let mut out = Vec::new();
    for chart in make_charts(&lm.ring, &lm.weights, &r)? {
        let Some(fc) = fiber_charts.iter().find(|f| f.name == chart.name) else {
            out.push((chart.name.clone(), false));
            continue;
        };
        let family_ideal = intrinsic_ideal(&lm.ideal(), &chart, &lm.weights, &r, budget)?;
        let specialized = family_ideal
            .ideal
            .gens()
            .iter()
            .map(|p| specialize_poly(p, &base, c, &fc.ring))
            .collect::<Result<Vec<_>>>()?;
        let lhs = Ideal::new(&fc.ring, specialized).gb(budget)?;
        let rhs = intrinsic_ideal(&fiber.ideal(), fc, &fiber.weights, &r, budget)?.gb;
        let sections_agree = blowup_section(lm, &chart)?
            .iter()
            .map(|p| specialize_poly(p, &base, c, &fc.ring))
            .collect::<Result<Vec<_>>>()?
            == blowup_section(&fiber, fc)?;
        out.push((
            chart.name.clone(),
            lhs.basis() == rhs.basis() && sections_agree,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::verify_coinc;
    use crate::dcrit::dcritical_chart;
    use crate::poly::{frac, rat};
    use crate::torus::decompose;
    use proptest::prelude::*;

    fn e2_family() -> FamilyModel {
        let ring = Ring::new(&["x", "y", "z", "t"]).unwrap();
        let w = WeightMatrix::new(4, vec![vec![1, -1, 0, 0]]).unwrap();
        FamilyModel::from_potential(&ring.parse("x*y*(z - t)").unwrap(), &w, "t").unwrap()
    }

    #[test]
    fn specialization_matches_direct_model() {
        let fam = e2_family();
        let fiber = specialize(&fam, &rat(0)).unwrap();
        let ring = Ring::new(&["x", "y", "z"]).unwrap();
        let w = WeightMatrix::new(3, vec![vec![1, -1, 0]]).unwrap();
        let direct = dcritical_chart(&ring.parse("x*y*z").unwrap(), &w)
            .unwrap()
            .model;
        assert_eq!(fiber.section, direct.section);
        assert_eq!(fiber.weights, direct.weights);
        let one = specialize(&fam, &rat(1)).unwrap();
        assert_eq!(one.section[2].to_string(), "x*y");
        assert_eq!(one.section[0], ring.parse("y*z - y").unwrap());
        assert!(verify_coinc(&one, &Subtorus::full(1), Budget::default())
            .unwrap()
            .iter()
            .all(|c| c.1));
    }

    #[test]
    fn base_free_family_is_unchanged() {
        let ring = Ring::new(&["x", "y", "t"]).unwrap();
        let w = WeightMatrix::new(3, vec![vec![1, -1, 0]]).unwrap();
        let fam = FamilyModel::from_potential(&ring.parse("x*y").unwrap(), &w, "t").unwrap();
        let fiber = specialize(&fam, &frac(3, 7)).unwrap();
        assert_eq!(
            fiber
                .section
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>(),
            ["y", "x"]
        );
        for c in [rat(0), rat(5)] {
            assert!(fiber_blowup_commutes(&fam, &c, Budget::default())
                .unwrap()
                .iter()
                .all(|x| x.1));
        }
    }

    #[test]
    fn flatness_and_rejection() {
        assert!(check_fixed_locus_flat(&e2_family()));
        let ring = Ring::new(&["x", "y", "t"]).unwrap();
        let w = WeightMatrix::new(3, vec![vec![1, -1, 1]]).unwrap();
        assert!(FamilyModel::from_potential(&ring.parse("x*y").unwrap(), &w, "t").is_err());
    }

    #[test]
    fn commutation_on_e2_family() {
        let fam = e2_family();
        for c in [rat(0), rat(1), rat(-2)] {
            let res = fiber_blowup_commutes(&fam, &c, Budget::default()).unwrap();
            assert_eq!(res.len(), 2);
            assert!(res.iter().all(|x| x.1), "c = {c}: {res:?}");
        }
    }

    proptest! {
        #[test]
        fn decomposition_commutes_with_specialization(
            p in crate::poly::strategies::poly(Ring::new(&["x", "y", "t"]).unwrap(), 6, 3),
            c in -3i64..4,
        ) {
            let w = WeightMatrix::new(3, vec![vec![1, -2, 0]]).unwrap();
            let small = Ring::new(&["x", "y"]).unwrap();
            let ws = WeightMatrix::new(2, vec![vec![1, -2]]).unwrap();
            let sp = |q: &MultiPoly| specialize_poly(q, "t", &rat(c), &small).unwrap();
            let mut lhs: Vec<(Vec<i64>, MultiPoly)> = decompose(&sp(&p), &ws).into_iter().map(|g| (g.weight, g.part)).collect();
            let mut rhs: Vec<(Vec<i64>, MultiPoly)> = decompose(&p, &w)
                .into_iter()
                .map(|g| (g.weight, sp(&g.part)))
                .filter(|(_, q)| !q.is_zero())
                .collect();
            lhs.sort_by(|a, b| a.0.cmp(&b.0));
            rhs.sort_by(|a, b| a.0.cmp(&b.0));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
