//! The acceptance suite: twelve checks, each run against an independent
//! oracle or a committed fixture.

use std::time::Instant;

use equiblow_core::blowup::{
    embedding_independence_check, intrinsic_ideal, make_charts, partial_desingularization,
    partial_desingularization_ideal, verify_coinc, LocalModel,
};
use equiblow_core::dcrit::{
    cohomology_dims, construct_equivalence, dcritical_chart, four_term_at, lift_morphism_to_blowup,
    lift_once, obstruction_assignment, sample_points, section_derivative, verify_omega_equivalence,
    SmallExtension,
};
use equiblow_core::family::{fiber_blowup_commutes, specialize};
use equiblow_core::groebner::{ideal_equal, verify_groebner};
use equiblow_core::oracle::{
    exhaustive_lift, hm_semistable_by_limits, orbit_closed_by_limits, rank_by_minors,
};
use equiblow_core::stability::hm_fiber_semistable;
use equiblow_core::torus::{decompose, orbit_is_closed};
use equiblow_core::{
    rat, Budget, Error, GroebnerBasis, Ideal, Monomial, MonomialOrder, MultiPoly, Rational, Result,
    Ring, Subtorus, WeightMatrix,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::commands::{bundled, bundled_models, check_complex, corpus_report, COMPLEX_POINTS};

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail
        )
    }
}

type Check = fn(Budget) -> Result<(bool, String)>;

pub const CHECKS: [(&str, Check); 12] = [
    ("coinc on corpus charts", coinc_suite),
    ("exceptional divisibility", xi_divisibility),
    ("embedding independence", embedding_independence),
    ("four-term complex", complex_property),
    ("worked cohomology dimensions", worked_dimensions),
    ("stability", stability),
    ("closed-orbit rule", closed_orbits),
    ("omega-equivalence", omega_equivalence),
    ("obstruction assignment", obstructions),
    ("family commutation", family_commutation),
    ("groebner self-checks", groebner_self_checks),
    ("determinism", determinism),
];

pub fn run_one(id: usize, budget: Budget) -> Criterion {
    let (title, check) = CHECKS[id - 1];
    let start = Instant::now();
    let (passed, detail) = match check(budget) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Criterion {
        id,
        title,
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

pub fn run_all(budget: Budget) -> Vec<Criterion> {
    (1..=CHECKS.len()).map(|i| run_one(i, budget)).collect()
}

fn model_of(name: &str) -> Result<LocalModel> {
    bundled(name)
        .local_model()?
        .ok_or_else(|| Error::precondition("bundled model without a section"))
}

fn coinc_suite(budget: Budget) -> Result<(bool, String)> {
    let mut models: Vec<(String, LocalModel)> = ["e1", "e2", "cone", "quartic"]
        .iter()
        .map(|n| Ok((n.to_string(), model_of(n)?)))
        .collect::<Result<_>>()?;
    models.push((
        "family at t = 0".into(),
        specialize(&bundled("family").family()?, &rat(0))?,
    ));
    let mut charts = 0;
    let mut failed = Vec::new();
    for (name, m) in &models {
        for (chart, ok) in verify_coinc(m, &Subtorus::full(m.k()), budget)? {
            charts += 1;
            if !ok {
                failed.push(format!("{name}/{chart}"));
            }
        }
    }
    Ok((
        failed.is_empty(),
        format!(
            "{} models, {charts} charts, failures {:?}",
            models.len(),
            failed
        ),
    ))
}

fn random_invariant_ideal(rng: &mut ChaCha8Rng) -> (Ring, WeightMatrix, Ideal) {
    let n = rng.gen_range(2..=4);
    let k = rng.gen_range(1..=2);
    let names = ["a", "b", "c", "d"];
    let ring = Ring::new(&names[..n]).expect("distinct names");
    let rows = (0..k)
        .map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    let w = WeightMatrix::new(n, rows).expect("shape");
    let mut gens = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let mut p = ring.zero();
        for _ in 0..rng.gen_range(1..=4) {
            let mut e = vec![0u32; n];
            let deg = rng.gen_range(1..=5);
            for _ in 0..deg {
                e[rng.gen_range(0..n)] += 1;
            }
            p.add_term(Monomial(e), rat(rng.gen_range(-3..=3)));
        }
        gens.extend(decompose(&p, &w).into_iter().map(|g| g.part));
    }
    let ideal = Ideal::new(&ring, gens);
    (ring, w, ideal)
}

fn xi_divisibility(budget: Budget) -> Result<(bool, String)> {
    let mut divisions = 0;
    let mut failures = Vec::new();
    for m in bundled_models()? {
        let d = match m.local_model()? {
            Some(lm) => partial_desingularization(&lm, budget),
            None => partial_desingularization_ideal(&m.ideal(), &m.weights, budget),
        };
        match d {
            Ok(d) => divisions += d.ledger.xi,
            Err(e) => failures.push(format!("{}: {e}", m.name)),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut ideals, mut skipped) = (0, 0);
    while ideals < 100 {
        let (ring, w, ideal) = random_invariant_ideal(&mut rng);
        let r = Subtorus::full(w.k());
        let charts = match make_charts(&ring, &w, &r) {
            Ok(c) => c,
            Err(Error::EmptyBlowup) => continue,
            Err(e) => return Err(e),
        };
        ideals += 1;
        for chart in charts {
            match intrinsic_ideal(&ideal, &chart, &w, &r, budget) {
                Ok(i) => divisions += i.divisions,
                Err(Error::Budget(_)) => skipped += 1,
                Err(e) => failures.push(format!("random ideal {ideals} on {}: {e}", chart.name)),
            }
        }
    }
    Ok((
        failures.is_empty(),
        format!(
            "corpus plus {ideals} random ideals, {divisions} divisions, {skipped} charts over budget, failures {failures:?}"
        ),
    ))
}

fn embedding_independence(budget: Budget) -> Result<(bool, String)> {
    let mut charts = 0;
    let mut failed = Vec::new();
    for name in ["e1", "e2"] {
        let m = bundled(name);
        let big_ring = m.ring.extend(&["u"])?;
        let mut rows = m.weights.rows().to_vec();
        rows.iter_mut().for_each(|r| r.push(0));
        let w_big = WeightMatrix::new(big_ring.nvars(), rows)?;
        let small = m.ideal();
        let mut gens: Vec<MultiPoly> = small
            .gens()
            .iter()
            .map(|g| g.to_ring(&big_ring))
            .collect::<Result<_>>()?;
        gens.push(big_ring.var_named("u")?);
        let big = Ideal::new(&big_ring, gens);
        for (chart, ok) in
            embedding_independence_check(&small, &m.weights, &big, &w_big, &["u"], budget)?
        {
            charts += 1;
            if !ok {
                failed.push(format!("{name}/{chart}"));
            }
        }
    }
    Ok((
        failed.is_empty(),
        format!("{charts} charts, failures {failed:?}"),
    ))
}

fn zero_dimensional(m: &LocalModel, budget: Budget) -> Result<bool> {
    let gb = m.ideal().gb(budget)?;
    if gb.is_unit() {
        return Ok(true);
    }
    Ok((0..m.n()).all(|i| {
        gb.basis().iter().any(|g| {
            g.leading_term(MonomialOrder::DegRevLex)
                .is_some_and(|(lm, _)| {
                    lm.0[i] > 0 && lm.0.iter().enumerate().all(|(j, &e)| j == i || e == 0)
                })
        })
    }))
}

fn complex_property(budget: Budget) -> Result<(bool, String)> {
    let mut models = 0;
    let mut points = 0;
    let mut short = Vec::new();
    for m in bundled_models()? {
        let Some(lm) = m.local_model()? else { continue };
        let d = partial_desingularization(&lm, budget)?;
        let mut all = vec![("root".to_string(), lm)];
        for s in &d.stages {
            for c in &s.charts {
                if let Some(cm) = &c.model {
                    all.push((c.path.clone(), cm.clone()));
                }
            }
        }
        for (path, cm) in all {
            let label = format!("{}/{path}", m.name);
            let got = check_complex(&cm, &label)?;
            models += 1;
            points += got;
            if got < COMPLEX_POINTS {
                if !zero_dimensional(&cm, budget)? {
                    return Ok((
                        false,
                        format!("{label}: only {got} points found on a positive-dimensional U"),
                    ));
                }
                short.push(format!("{label} ({got})"));
            }
        }
    }
    Ok((
        true,
        format!(
            "{models} models, {points} points; finite U with fewer than {COMPLEX_POINTS} grid points: {}",
            short.join(", ")
        ),
    ))
}

#[derive(Deserialize)]
struct Fixture {
    case: Vec<FixtureCase>,
}

#[derive(Deserialize)]
struct FixtureCase {
    variables: Vec<String>,
    weights: Vec<Vec<i64>>,
    potential: String,
    point: Vec<i64>,
    dims: [usize; 4],
}

const COHOMOLOGY_FIXTURE: &str = include_str!("../fixtures/cohomology.toml");

fn worked_dimensions(_: Budget) -> Result<(bool, String)> {
    let fixture: Fixture = toml::from_str(COHOMOLOGY_FIXTURE).map_err(|e| Error::Parse {
        pos: 0,
        msg: e.to_string(),
    })?;
    let mut lines = Vec::new();
    let mut ok = true;
    for c in &fixture.case {
        let ring = Ring::new(&c.variables)?;
        let w = WeightMatrix::new(ring.nvars(), c.weights.clone())?;
        let m = dcritical_chart(&ring.parse(&c.potential)?, &w)?.model;
        let p: Vec<Rational> = c.point.iter().map(|&x| rat(x)).collect();
        let cx = four_term_at(&m, &p)?;
        let h = cohomology_dims(&cx)?;
        let (k, n, r) = (cx.m0.cols(), cx.m0.rows(), cx.m1.rows());
        let (a, b, d) = (
            rank_by_minors(&cx.m0),
            rank_by_minors(&cx.m1),
            rank_by_minors(&cx.m2),
        );
        let oracle = (k - a, n - b - a, r - d - b, k - d);
        let want = (c.dims[0], c.dims[1], c.dims[2], c.dims[3]);
        ok &= h == want && oracle == want;
        lines.push(format!("{} at {:?} -> {:?}", c.potential, c.point, h));
    }
    Ok((ok, lines.join("; ")))
}

/// Nonempty multisets of size at most `max` from `items`.
fn multisets<T: Clone>(items: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    let mut frontier: Vec<(usize, Vec<T>)> = vec![(0, vec![])];
    for _ in 0..max {
        let mut next = Vec::new();
        for (start, v) in &frontier {
            for (i, x) in items.iter().enumerate().skip(*start) {
                let mut w = v.clone();
                w.push(x.clone());
                out.push(w.clone());
                next.push((i, w));
            }
        }
        frontier = next;
    }
    out
}

fn weight_alphabet(k: usize) -> Vec<Vec<i64>> {
    match k {
        1 => (-2..=2).map(|x| vec![x]).collect(),
        _ => (-1..=1)
            .flat_map(|a| (-1..=1).map(move |b| vec![a, b]))
            .collect(),
    }
}

fn stability(budget: Budget) -> Result<(bool, String)> {
    let m = model_of("e2")?;
    let d = partial_desingularization(&m, budget)?;
    let chart = d.stages[0]
        .charts
        .iter()
        .find(|c| c.path == "chart_x")
        .ok_or_else(|| Error::precondition("E2 has no chart_x"))?;
    let unstable = chart
        .unstable
        .as_ref()
        .map(|u| u.to_strings())
        .unwrap_or_default();
    let mut ok = unstable == ["T_y"];
    let node = &chart.stability;
    let v1 = node.point_semistable(&[rat(0), rat(1), rat(0)])?;
    let v2 = node.point_semistable(&[rat(1), rat(0), rat(0)])?;
    let v3 = node.point_semistable(&[rat(0), rat(1), rat(5)])?;
    ok &= v1.semistable && v3.semistable && !v2.semistable;
    let witness_ok = v2.witness.as_ref().is_some_and(|w| {
        w.lambda == [1] && w.limit.as_deref() == Some(&[rat(0), rat(0), rat(0)][..])
    });
    ok &= witness_ok;
    let mut cases = 0;
    let mut disagreements = Vec::new();
    for k in 1..=2 {
        for cols in multisets(&weight_alphabet(k), 3) {
            for mask in 0u32..(1 << cols.len()) {
                let support: Vec<usize> = (0..cols.len()).filter(|i| mask >> i & 1 == 1).collect();
                cases += 1;
                if hm_fiber_semistable(&support, &cols) != hm_semistable_by_limits(&support, &cols)
                {
                    disagreements.push(format!("{cols:?} on {support:?}"));
                }
            }
        }
    }
    ok &= disagreements.is_empty();
    Ok((
        ok,
        format!(
            "chart_x unstable ({}), verdicts {}/{}/{}, witness {}, {cases} fibre cases, disagreements {:?}",
            unstable.join(", "),
            v1.semistable,
            v2.semistable,
            v3.semistable,
            if witness_ok { "lambda = 1, limit 0" } else { "wrong" },
            disagreements
        ),
    ))
}

fn closed_orbits(_: Budget) -> Result<(bool, String)> {
    let mut cases = 0;
    let mut disagreements = Vec::new();
    for k in 1..=2 {
        for cols in multisets(&weight_alphabet(k), 4) {
            let w = WeightMatrix::from_columns(k, &cols);
            for mask in 0u32..(1 << cols.len()) {
                let support: Vec<usize> = (0..cols.len()).filter(|i| mask >> i & 1 == 1).collect();
                cases += 1;
                if orbit_is_closed(&support, &w) != orbit_closed_by_limits(&support, &cols) {
                    disagreements.push(format!("{cols:?} on {support:?}"));
                }
            }
        }
    }
    Ok((
        disagreements.is_empty(),
        format!("{cases} cases, disagreements {disagreements:?}"),
    ))
}

fn omega_equivalence(budget: Budget) -> Result<(bool, String)> {
    let mut lines = Vec::new();
    let mut ok = true;
    let one = Ring::new(&["x"])?;
    let e = construct_equivalence(
        &one.parse("1/2*x^2")?,
        &one.parse("1/2*x^2 + x^4")?,
        &WeightMatrix::trivial(1),
        None,
        budget,
    )?;
    ok &= e.report.passed();
    lines.push(format!("x^2/2 vs x^2/2 + x^4 with hint {}", e.hint));

    let two = Ring::new(&["x", "y"])?;
    let w = WeightMatrix::new(2, vec![vec![1, -1]])?;
    let (f, g) = (
        two.parse("1/2*x^2*y^2")?,
        two.parse("1/2*x^2*y^2 + x^4*y^4")?,
    );
    let e = construct_equivalence(&f, &g, &w, None, budget)?;
    let mf = dcritical_chart(&f, &w)?.model;
    let mg = dcritical_chart(&g, &w)?.model;
    let rep = verify_omega_equivalence(
        &mf,
        &mg.section,
        &e.a,
        &e.b,
        &e.hint,
        Some(&[rat(0), rat(0)]),
        budget,
    )?;
    ok &= e.report.passed() && rep.passed();
    lines.push(format!("x^2y^2/2 vs + x^4y^4 with hint {}", e.hint));
    let chart = make_charts(&two, &w, &Subtorus::full(1))?
        .into_iter()
        .find(|c| c.name == "chart_x")
        .ok_or_else(|| Error::precondition("no chart_x"))?;
    let bf = equiblow_core::blowup::blowup_local_model(&mf, &chart)?;
    let bg = equiblow_core::blowup::blowup_local_model(&mg, &chart)?;
    let a = lift_morphism_to_blowup(&e.a, &mf, &chart)?;
    let b = lift_morphism_to_blowup(&e.b, &mf, &chart)?;
    let lifted = verify_omega_equivalence(
        &bf,
        &bg.section,
        &a,
        &b,
        &chart.pullback(&e.hint),
        None,
        budget,
    )?;
    ok &= lifted.passed();
    lines.push(format!(
        "chart_x lift {}",
        if lifted.passed() {
            "verified"
        } else {
            "FAILED"
        }
    ));
    Ok((ok, lines.join("; ")))
}

/// Order-2 maps through sample points along kernel vectors and their sum,
/// and their lifts to order 3 when there are any.
fn extensions_of(m: &LocalModel) -> Result<Vec<SmallExtension>> {
    let mut out = Vec::new();
    for p in sample_points(m, 6)? {
        out.push(SmallExtension::new(
            1,
            p.iter().map(|x| vec![x.clone()]).collect(),
        )?);
        let mut dirs = section_derivative(m, &p)?.kernel();
        let diagonal = dirs.iter().fold(vec![Rational::zero(); m.n()], |acc, v| {
            acc.iter().zip(v).map(|(a, b)| a + b).collect()
        });
        dirs.push(diagonal);
        dirs.push(vec![Rational::zero(); m.n()]);
        for v in dirs {
            let coords = p
                .iter()
                .zip(&v)
                .map(|(a, b)| vec![a.clone(), b.clone()])
                .collect();
            let ext = SmallExtension::new(2, coords)?;
            if let Some(next) = lift_once(m, &ext)? {
                out.push(next);
            }
            out.push(ext);
        }
    }
    Ok(out)
}

fn obstructions(budget: Budget) -> Result<(bool, String)> {
    let x = Ring::new(&["x"])?;
    let triv = WeightMatrix::trivial(1);
    let cubic = dcritical_chart(&x.parse("1/3*x^3")?, &triv)?.model;
    let dual = SmallExtension::new(2, vec![vec![rat(0), rat(1)]])?;
    let oc = obstruction_assignment(&cubic, &dual)?;
    let cubic_ok = !oc.liftable && exhaustive_lift(&cubic, &dual, budget)?.is_none();
    let quad = dcritical_chart(&x.parse("1/2*x^2")?, &triv)?.model;
    let zero = SmallExtension::new(2, vec![vec![rat(0), rat(0)]])?;
    let oq = obstruction_assignment(&quad, &zero)?;
    let quad_ok = oq.liftable && exhaustive_lift(&quad, &zero, budget)?.is_some();
    let mut cases = 0;
    let mut obstructed = 0;
    let mut disagreements = Vec::new();
    for m in bundled_models()? {
        let Some(lm) = m.local_model()? else { continue };
        for ext in extensions_of(&lm)? {
            if ext.m > 3 {
                continue;
            }
            cases += 1;
            let o = obstruction_assignment(&lm, &ext)?;
            let lift = exhaustive_lift(&lm, &ext, budget)?;
            if !o.liftable {
                obstructed += 1;
            }
            if o.liftable != lift.is_some() {
                disagreements.push(format!("{} at {:?}", m.name, ext.coords));
            }
        }
    }
    Ok((
        cubic_ok && quad_ok && disagreements.is_empty(),
        format!(
            "x^3/3 class {:?}, x^2/2 liftable {}, corpus {cases} extensions ({obstructed} obstructed), disagreements {:?}",
            oc.class.iter().map(ToString::to_string).collect::<Vec<_>>(),
            oq.liftable,
            disagreements
        ),
    ))
}

fn family_commutation(budget: Budget) -> Result<(bool, String)> {
    let fam = bundled("family").family()?;
    let mut ok = true;
    let mut lines = Vec::new();
    for c in [rat(0), rat(1), rat(-2)] {
        let res = fiber_blowup_commutes(&fam, &c, budget)?;
        ok &= !res.is_empty() && res.iter().all(|r| r.1);
        lines.push(format!(
            "t = {c}: {}",
            res.iter()
                .map(|(n, b)| format!("{n} {}", if *b { "ok" } else { "differs" }))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    Ok((ok, lines.join("; ")))
}

fn groebner_self_checks(budget: Budget) -> Result<(bool, String)> {
    let mut bases: Vec<GroebnerBasis> = Vec::new();
    for m in bundled_models()? {
        let d = match m.local_model()? {
            Some(lm) => partial_desingularization(&lm, budget)?,
            None => partial_desingularization_ideal(&m.ideal(), &m.weights, budget)?,
        };
        bases.push(m.ideal().gb(budget)?);
        for s in &d.stages {
            for c in &s.charts {
                bases.push(c.intrinsic.gb.clone());
                bases.extend(c.unstable.clone());
            }
        }
    }
    let corpus_bad = bases.iter().filter(|g| !verify_groebner(g)).count();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9b);
    let ring = Ring::new(&["a", "b", "c"])?;
    let small = Budget {
        max_basis: 200,
        max_degree: 16,
    };
    let (mut done, mut attempts, mut bad) = (0, 0, Vec::new());
    while done < 100 && attempts < 1000 {
        attempts += 1;
        let gens: Vec<MultiPoly> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let mut p = ring.zero();
                for _ in 0..rng.gen_range(1..=3) {
                    let e = (0..3).map(|_| rng.gen_range(0..=2)).collect();
                    p.add_term(Monomial(e), rat(rng.gen_range(-3..=3)));
                }
                p
            })
            .collect();
        let mut shuffled = gens.clone();
        for i in (1..shuffled.len()).rev() {
            let j = rng.gen_range(0..=i);
            shuffled.swap(i, j);
        }
        let order = if rng.gen_bool(0.5) {
            MonomialOrder::DegRevLex
        } else {
            MonomialOrder::Lex
        };
        let a = Ideal::new(&ring, gens);
        let b = Ideal::new(&ring, shuffled);
        let gb = match a.groebner(order, small) {
            Ok(gb) => gb,
            Err(Error::Budget(_)) => continue,
            Err(e) => return Err(e),
        };
        done += 1;
        if !verify_groebner(&gb) || !ideal_equal(&a, &b, order, small)? {
            bad.push(format!(
                "{:?}",
                a.gens().iter().map(ToString::to_string).collect::<Vec<_>>()
            ));
        }
    }
    Ok((
        corpus_bad == 0 && bad.is_empty() && done == 100,
        format!(
            "{} corpus bases ({corpus_bad} bad), {done} random instances in {attempts} attempts, failures {bad:?}",
            bases.len()
        ),
    ))
}

fn determinism(budget: Budget) -> Result<(bool, String)> {
    let models = bundled_models()?;
    let a = corpus_report(&models, budget)?.to_json();
    let b = corpus_report(&models, budget)?.to_json();
    Ok((a == b, format!("{} bytes, identical: {}", a.len(), a == b)))
}
