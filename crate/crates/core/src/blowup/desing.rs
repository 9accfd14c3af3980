//! The partial desingularization loop and the embedding-independence check.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groebner::{eliminate, Budget, GroebnerBasis, Ideal};
use crate::poly::{MultiPoly, Ring};
use crate::stability::{semistable_locus, ChartRule, StabilityNode};
use crate::torus::{enumerate_blowup_centers_with, fixed_locus, Subtorus, WeightMatrix};

use super::chart::{charts_glue, intrinsic_ideal, make_charts, BlowupChart, IntrinsicIdeal};
use super::model::{blowup_local_model, LocalModel};

const MAX_DEPTH: usize = 8;

/// Pass counts of the built-in theorem checks. A failing check aborts the
/// computation with [`Error::TheoremCheck`], so these only ever count passes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    pub xi: usize,
    pub coinc: usize,
    pub weak_model: usize,
    pub gluing: usize,
    pub descent: usize,
}

impl Ledger {
    pub fn absorb(&mut self, other: &Ledger) {
        self.xi += other.xi;
        self.coinc += other.coinc;
        self.weak_model += other.weak_model;
        self.gluing += other.gluing;
        self.descent += other.descent;
    }
}

#[derive(Clone, Debug)]
pub struct ChartStage {
    /// Chart names from the root, joined by `/`.
    pub path: String,
    pub chart: BlowupChart,
    pub intrinsic: IntrinsicIdeal,
    pub model: Option<LocalModel>,
    pub stability: Arc<StabilityNode>,
    /// Only for rank-one centers.
    pub unstable: Option<GroebnerBasis>,
    /// Whether the semistable part is empty; `None` if undecided.
    pub semistable_empty: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Stage {
    /// Path of the chart that was blown up; empty at the root.
    pub path: String,
    pub depth: usize,
    /// Center in the coordinates of the torus acting at this stage.
    pub center: Subtorus,
    /// The same center inside the original torus.
    pub center_global: Subtorus,
    pub charts: Vec<ChartStage>,
}

#[derive(Clone, Debug, Default)]
pub struct Desingularization {
    pub stages: Vec<Stage>,
    /// Set when a center fixes the whole ambient space, so the blowup is
    /// empty.
    pub dense: bool,
    pub ledger: Ledger,
}

struct Input {
    ring: Ring,
    weights: WeightMatrix,
    ideal: Ideal,
    model: Option<LocalModel>,
    stability: Arc<StabilityNode>,
    group_basis: Vec<Vec<i64>>,
}

/// Blow up the largest center, recurse into every chart, and stop when no
/// closed semistable orbit has a positive-dimensional stabilizer.
pub fn partial_desingularization(m: &LocalModel, budget: Budget) -> Result<Desingularization> {
    partial_desingularization_to(m, MAX_DEPTH + 1, budget)
}

/// Only the first `stages` levels of the blowup tree.
pub fn partial_desingularization_to(
    m: &LocalModel,
    stages: usize,
    budget: Budget,
) -> Result<Desingularization> {
    let mut out = Desingularization::default();
    let input = Input {
        ring: m.ring.clone(),
        weights: m.weights.clone(),
        ideal: m.ideal(),
        model: Some(m.clone()),
        stability: m.stability.clone(),
        group_basis: m.group_basis.clone(),
    };
    run(input, "", 0, stages, &[], &mut out, budget)?;
    Ok(out)
}

/// As [`partial_desingularization`] for a bare invariant ideal.
pub fn partial_desingularization_ideal(
    ideal: &Ideal,
    w: &WeightMatrix,
    budget: Budget,
) -> Result<Desingularization> {
    partial_desingularization_ideal_to(ideal, w, MAX_DEPTH + 1, budget)
}

pub fn partial_desingularization_ideal_to(
    ideal: &Ideal,
    w: &WeightMatrix,
    stages: usize,
    budget: Budget,
) -> Result<Desingularization> {
    let mut out = Desingularization::default();
    let input = Input {
        ring: ideal.ring().clone(),
        weights: w.clone(),
        ideal: ideal.clone(),
        model: None,
        stability: StabilityNode::root(ideal.ring()),
        group_basis: Subtorus::full(w.k()).cochar().to_vec(),
    };
    run(input, "", 0, stages, &[], &mut out, budget)?;
    Ok(out)
}

fn compose(basis: &[Vec<i64>], r: &Subtorus) -> Result<Subtorus> {
    let k0 = basis.first().map(Vec::len).unwrap_or(0);
    let rows = r
        .cochar()
        .iter()
        .map(|l| {
            (0..k0)
                .map(|g| l.iter().zip(basis).map(|(a, row)| a * row[g]).sum())
                .collect()
        })
        .collect();
    Subtorus::new(k0, rows)
}

fn run(
    input: Input,
    path: &str,
    depth: usize,
    stages: usize,
    ancestors: &[Subtorus],
    out: &mut Desingularization,
    budget: Budget,
) -> Result<()> {
    if depth >= stages {
        return Ok(());
    }
    if depth > MAX_DEPTH {
        return Err(Error::Budget(format!(
            "blowup tree deeper than {MAX_DEPTH} stages"
        )));
    }
    let stab = input.stability.clone();
    let centers = enumerate_blowup_centers_with(
        &input.weights,
        &input.ideal,
        &|s| stab.semistable(s),
        budget,
    )?;
    let Some(r) = centers.first() else {
        return Ok(());
    };
    let global = compose(&input.group_basis, r)?;
    if ancestors.contains(&global) {
        return Err(Error::theorem(
            "kirwan-descent",
            format!(
                "center {global} reappears below {}",
                if path.is_empty() { "the root" } else { path }
            ),
        ));
    }
    out.ledger.descent += 1;
    if fixed_locus(&input.weights, r).is_empty() {
        out.dense = true;
        return Ok(());
    }

    let d = r.dim();
    let full = Subtorus::full(d);
    let (weights, model, group_basis) = if *r == Subtorus::full(input.weights.k()) {
        (
            input.weights.clone(),
            input.model.clone(),
            input.group_basis.clone(),
        )
    } else {
        (
            input.weights.restrict(r),
            input.model.as_ref().map(|m| m.restrict(r)),
            global.cochar().to_vec(),
        )
    };

    let charts = make_charts(&input.ring, &weights, &full)?;
    let mut stage_charts = Vec::new();
    for chart in charts {
        let intrinsic = intrinsic_ideal(&input.ideal, &chart, &weights, &full, budget)?;
        out.ledger.xi += intrinsic.divisions;
        let blown = match &model {
            Some(m) => {
                let b = blowup_local_model(m, &chart)?;
                out.ledger.weak_model += 1;
                let lhs = Ideal::new(&chart.ring, b.section.iter().cloned()).gb(budget)?;
                if lhs.basis() != intrinsic.gb.basis() {
                    return Err(Error::theorem(
                        "coinc",
                        format!(
                            "on {}: section ideal {:?} differs from intrinsic ideal {:?}",
                            chart.name,
                            lhs.to_strings(),
                            intrinsic.gb.to_strings()
                        ),
                    ));
                }
                out.ledger.coinc += 1;
                Some(b)
            }
            None => None,
        };
        let stability = match &blown {
            Some(b) => b.stability.clone(),
            None => StabilityNode::child(
                &input.stability,
                &chart.ring,
                chart.monomial_images(),
                ChartRule {
                    pivot: chart.pivot,
                    moving: chart.moving.clone(),
                    weights: weights.columns(),
                },
            ),
        };
        let (unstable, semistable_empty) = if d == 1 {
            let locus = semistable_locus(&intrinsic.gb.ideal(), &stability, budget)?;
            let empty = locus.is_empty();
            (Some(locus.unstable), Some(empty))
        } else if intrinsic.gb.is_unit() {
            (None, Some(true))
        } else {
            (None, None)
        };
        let cpath = if path.is_empty() {
            chart.name.clone()
        } else {
            format!("{path}/{}", chart.name)
        };
        stage_charts.push(ChartStage {
            path: cpath,
            chart,
            intrinsic,
            model: blown,
            stability,
            unstable,
            semistable_empty,
        });
    }
    for a in 0..stage_charts.len() {
        for b in (a + 1)..stage_charts.len() {
            let (ca, cb) = (&stage_charts[a], &stage_charts[b]);
            if !charts_glue(
                &ca.chart,
                &ca.intrinsic.ideal,
                &cb.chart,
                &cb.intrinsic.ideal,
                budget,
            )? {
                return Err(Error::theorem(
                    "chart-gluing",
                    format!("{} and {} disagree on their overlap", ca.path, cb.path),
                ));
            }
            out.ledger.gluing += 1;
        }
    }

    let mut below = ancestors.to_vec();
    below.push(global.clone());
    out.stages.push(Stage {
        path: path.to_string(),
        depth,
        center: r.clone(),
        center_global: global,
        charts: stage_charts.clone(),
    });
    for cs in stage_charts {
        let next = Input {
            ring: cs.chart.ring.clone(),
            weights: cs.chart.weights.clone(),
            ideal: cs.intrinsic.gb.ideal(),
            model: cs.model.clone(),
            stability: cs.stability.clone(),
            group_basis: group_basis.clone(),
        };
        run(next, &cs.path, depth + 1, stages, &below, out, budget)?;
    }
    Ok(())
}

/// Compare intrinsic ideals of `small` and of a re-embedding `big` with
/// extra coordinates `aux`, chart by chart, after eliminating `aux`.
pub fn embedding_independence_check<S: AsRef<str>>(
    small: &Ideal,
    w_small: &WeightMatrix,
    big: &Ideal,
    w_big: &WeightMatrix,
    aux: &[S],
    budget: Budget,
) -> Result<Vec<(String, bool)>> {
    let aux: Vec<String> = aux.iter().map(|s| s.as_ref().to_string()).collect();
    let bring = big.ring();
    let rest: Vec<&String> = bring.vars().iter().filter(|v| !aux.contains(v)).collect();
    if rest.len() + aux.len() != bring.nvars()
        || rest
            .iter()
            .map(|s| s.as_str())
            .ne(small.ring().vars().iter().map(|s| s.as_str()))
    {
        return Err(Error::precondition(
            "the big ring must be the small ring with the auxiliary variables added",
        ));
    }
    if w_small.k() != w_big.k() {
        return Err(Error::precondition("both embeddings need the same torus"));
    }
    let r = Subtorus::full(w_big.k());
    let moving = fixed_locus(w_big, &r);
    if aux
        .iter()
        .any(|a| moving.contains(&bring.var_index(a).unwrap()))
    {
        return Err(Error::precondition(
            "auxiliary coordinates must be fixed by the torus",
        ));
    }
    let cs = make_charts(small.ring(), w_small, &r)?;
    let cb = make_charts(bring, w_big, &r)?;
    let mut out = Vec::new();
    for c in &cs {
        let Some(d) = cb.iter().find(|d| d.name == c.name) else {
            return Err(Error::precondition(format!(
                "chart mismatch: {} has no partner",
                c.name
            )));
        };
        let is = intrinsic_ideal(small, c, w_small, &r, budget)?;
        let ib = intrinsic_ideal(big, d, w_big, &r, budget)?;
        let e = eliminate(&ib.ideal, &aux, budget)?.to_ring(&c.ring)?;
        out.push((c.name.clone(), e.gb(budget)?.basis() == is.gb.basis()));
    }
    if cs.len() != cb.len() {
        return Err(Error::precondition(
            "chart mismatch between the two embeddings",
        ));
    }
    Ok(out)
}

/// Generators as sorted strings; convenient for reports.
pub fn sorted_strings(v: &[MultiPoly]) -> Vec<String> {
    let mut s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
    s.sort();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::cotangent_model;

    fn model(vars: &[&str], w: &[Vec<i64>], f: &str) -> LocalModel {
        let ring = Ring::new(vars).unwrap();
        let w = WeightMatrix::new(vars.len(), w.to_vec()).unwrap();
        let f = ring.parse(f).unwrap();
        let omega = (0..ring.nvars()).map(|i| f.partial_derivative(i)).collect();
        cotangent_model(&ring, &w, omega).unwrap()
    }

    #[test]
    fn e1_single_stage_empty() {
        let m = model(&["x", "y"], &[vec![1, -1]], "x*y");
        let d = partial_desingularization(&m, Budget::default()).unwrap();
        assert_eq!(d.stages.len(), 1);
        assert_eq!(d.stages[0].center, Subtorus::full(1));
        for c in &d.stages[0].charts {
            assert!(c.intrinsic.gb.is_unit());
            assert_eq!(c.semistable_empty, Some(true));
        }
        assert!(!d.dense);
    }

    #[test]
    fn e2_single_stage() {
        let m = model(&["x", "y", "z"], &[vec![1, -1, 0]], "x*y*z");
        let d = partial_desingularization(&m, Budget::default()).unwrap();
        assert_eq!(d.stages.len(), 1);
        let cx = &d.stages[0].charts[0];
        assert_eq!(cx.path, "chart_x");
        assert_eq!(cx.intrinsic.gb.to_strings(), vec!["z", "xi_x^2*T_y"]);
        assert_eq!(cx.unstable.as_ref().unwrap().to_strings(), vec!["T_y"]);
        assert_eq!(d.ledger.coinc, 2);
        assert_eq!(d.ledger.gluing, 1);
    }

    #[test]
    fn trivial_action_is_dense() {
        let ring = Ring::new(&["x", "y"]).unwrap();
        let w = WeightMatrix::new(2, vec![vec![0, 0]]).unwrap();
        let i = Ideal::parse(&ring, &["x*y"]).unwrap();
        let d = partial_desingularization_ideal(&i, &w, Budget::default()).unwrap();
        assert!(d.stages.is_empty());
        assert!(d.dense);
        let d = partial_desingularization_ideal(&i, &WeightMatrix::trivial(2), Budget::default())
            .unwrap();
        assert!(d.stages.is_empty());
        assert!(!d.dense);
    }

    #[test]
    fn rank_two_runs_to_the_end() {
        let m = model(&["x", "y", "z"], &[vec![1, 0, -1], vec![0, 1, -1]], "x*y*z");
        let d = partial_desingularization(&m, Budget::default()).unwrap();
        assert!(!d.stages.is_empty());
        assert_eq!(d.stages[0].center.dim(), 2);
        for s in &d.stages {
            for c in &s.charts {
                let b = c.model.as_ref().unwrap();
                assert!(crate::blowup::check_weak_local_model(b).all_passed());
            }
        }
    }

    #[test]
    fn nonreduced_example_survives() {
        let ring = Ring::new(&["x", "y"]).unwrap();
        let w = WeightMatrix::new(2, vec![vec![1, -1]]).unwrap();
        let i = Ideal::parse(&ring, &["x^2", "x*y", "y^2"]).unwrap();
        let d = partial_desingularization_ideal(&i, &w, Budget::default()).unwrap();
        assert_eq!(d.stages.len(), 1);
        assert!(d.stages[0]
            .charts
            .iter()
            .all(|c| c.semistable_empty == Some(false)));
    }

    #[test]
    fn independence() {
        let small_ring = Ring::new(&["x", "y", "z"]).unwrap();
        let big_ring = Ring::new(&["x", "y", "z", "u"]).unwrap();
        let ws = WeightMatrix::new(3, vec![vec![1, -1, 0]]).unwrap();
        let wb = WeightMatrix::new(4, vec![vec![1, -1, 0, 0]]).unwrap();
        let small = Ideal::parse(&small_ring, &["y*z", "x*z", "x*y"]).unwrap();
        for aux_rel in ["u", "u - z^2", "u - x*y"] {
            let big = Ideal::parse(&big_ring, &["y*z", "x*z", "x*y", aux_rel]).unwrap();
            let v = embedding_independence_check(&small, &ws, &big, &wb, &["u"], Budget::default())
                .unwrap();
            assert_eq!(v.len(), 2);
            assert!(v.iter().all(|(_, ok)| *ok), "{aux_rel}: {v:?}");
        }
        let bad = Ideal::parse(&big_ring, &["y*z", "x*z", "x*y", "u - x"]).unwrap();
        let e = embedding_independence_check(&small, &ws, &bad, &wb, &["u"], Budget::default());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }
}
