use equiblow_core::blowup::{
    intrinsic_ideal, make_charts, partial_desingularization, verify_coinc,
};
use equiblow_core::dcrit::{cohomology_dims, dcritical_chart, four_term_at, sample_points};
use equiblow_core::groebner::{ideal_equal, verify_groebner};
use equiblow_core::torus::decompose;
use equiblow_core::{
    Budget, Error, Ideal, Monomial, MonomialOrder, MultiPoly, Ring, Subtorus, WeightMatrix,
};
use proptest::prelude::*;

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn ring(n: usize) -> Ring {
    Ring::new(&NAMES[..n]).unwrap()
}

fn arb_poly(n: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    proptest::collection::vec((proptest::collection::vec(0u32..=2, n), -3i64..=3), 1..5)
}

fn build(r: &Ring, terms: &[(Vec<u32>, i64)]) -> MultiPoly {
    let mut p = r.zero();
    for (e, c) in terms {
        if e.iter().sum::<u32>() <= 5 {
            p.add_term(Monomial(e.clone()), equiblow_core::rat(*c));
        }
    }
    p
}

fn arb_case() -> impl Strategy<Value = (usize, usize, Vec<Vec<i64>>, Vec<Vec<(Vec<u32>, i64)>>)> {
    (2usize..=4, 1usize..=2).prop_flat_map(|(n, k)| {
        (
            Just(n),
            Just(k),
            proptest::collection::vec(proptest::collection::vec(-2i64..=2, n), k),
            proptest::collection::vec(arb_poly(n), 1..4),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exceptional_division_never_fails((n, k, rows, polys) in arb_case()) {
        let r = ring(n);
        let w = WeightMatrix::new(n, rows).unwrap();
        let gens: Vec<MultiPoly> = polys
            .iter()
            .flat_map(|t| decompose(&build(&r, t), &w).into_iter().map(|g| g.part))
            .collect();
        let ideal = Ideal::new(&r, gens);
        let charts = match make_charts(&r, &w, &Subtorus::full(k)) {
            Ok(c) => c,
            Err(Error::EmptyBlowup) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        for chart in charts {
            match intrinsic_ideal(&ideal, &chart, &w, &Subtorus::full(k), Budget::default()) {
                Ok(_) | Err(Error::Budget(_)) => {}
                Err(e) => prop_assert!(false, "{}: {e}", chart.name),
            }
        }
    }

    #[test]
    fn reduced_bases_are_groebner_and_shuffle_invariant(
        polys in proptest::collection::vec(arb_poly(3), 1..4),
        seed in any::<u64>(),
    ) {
        let r = ring(3);
        let gens: Vec<MultiPoly> = polys.iter().map(|t| build(&r, t)).collect();
        let mut shuffled = gens.clone();
        let len = shuffled.len();
        for i in (1..len).rev() {
            shuffled.swap(i, (seed as usize >> (i % 16)) % (i + 1));
        }
        let a = Ideal::new(&r, gens);
        let b = Ideal::new(&r, shuffled);
        let budget = Budget { max_basis: 60, max_degree: 12 };
        for order in [MonomialOrder::DegRevLex, MonomialOrder::Lex] {
            let gb = match a.groebner(order, budget) {
                Ok(gb) => gb,
                Err(Error::Budget(_)) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            prop_assert!(verify_groebner(&gb));
            match ideal_equal(&a, &b, order, budget) {
                Ok(eq) => prop_assert!(eq),
                Err(Error::Budget(_)) => return Ok(()),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn staged_models_form_complexes() {
    let r = Ring::new(&["x", "y", "z"]).unwrap();
    let w = WeightMatrix::new(3, vec![vec![1, -1, 0]]).unwrap();
    for f in ["x*y*z", "1/2*x^2*y^2", "x*y - z^2"] {
        let m = dcritical_chart(&r.parse(f).unwrap(), &w).unwrap().model;
        assert!(verify_coinc(&m, &Subtorus::full(1), Budget::default())
            .unwrap()
            .iter()
            .all(|c| c.1));
        let mut models = vec![m.clone()];
        let d = partial_desingularization(&m, Budget::default()).unwrap();
        models.extend(
            d.stages
                .iter()
                .flat_map(|s| s.charts.iter().filter_map(|c| c.model.clone())),
        );
        for model in &models {
            for p in sample_points(model, 20).unwrap() {
                let c = four_term_at(model, &p).unwrap();
                assert!(
                    c.first_composition_vanishes() && c.second_composition_vanishes(),
                    "{f} at {p:?}"
                );
                cohomology_dims(&c).unwrap();
            }
        }
    }
}
