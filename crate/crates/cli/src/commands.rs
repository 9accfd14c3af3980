//! One function per subcommand. Each wraps a single library operation and
//! turns its result into a [`Report`].

use std::path::Path;
use std::sync::Arc;

use equiblow_core::blowup::{
    embedding_independence_check, intrinsic_ideal, make_charts, partial_desingularization_ideal_to,
    partial_desingularization_to, sorted_strings, verify_coinc_against, ChartStage,
    Desingularization, LocalModel,
};
use equiblow_core::dcrit::{
    cohomology_dims, four_term_at, obstruction_chain, reduced_obstruction_dim, sample_points,
    verify_omega_equivalence,
};
use equiblow_core::family::{check_fixed_locus_flat, fiber_blowup_commutes, specialize};
use equiblow_core::stability::StabilityNode;
use equiblow_core::torus::stabilizer_subtorus;
use equiblow_core::{Budget, Error, Ideal, Rational, Result, Ring, Subtorus, WeightMatrix};
use num_traits::Zero;

use crate::model::{Model, Source};
use crate::report::{ChartReport, Checks, Report};

/// Points per chart at which the four-term complex is checked.
pub const COMPLEX_POINTS: usize = 20;

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub budget: Budget,
    pub full: bool,
    pub chart: Option<String>,
    pub point: Option<Vec<Rational>>,
    pub at: Option<Rational>,
    pub ext_order: Option<usize>,
    pub aux: Vec<String>,
}

fn show(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Check the four-term complex at sample points of `U`; a failure is a
/// theorem-check failure.
pub fn check_complex(m: &LocalModel, label: &str) -> Result<usize> {
    let points = sample_points(m, COMPLEX_POINTS)?;
    for p in &points {
        let c = four_term_at(m, p)?;
        if !c.first_composition_vanishes() || !c.second_composition_vanishes() {
            return Err(Error::theorem(
                "complex",
                format!(
                    "{label} at {}: consecutive maps do not compose to zero",
                    show(p)
                ),
            ));
        }
        cohomology_dims(&c)?;
    }
    Ok(points.len())
}

fn desingularize(
    model: &Model,
    stages: usize,
    budget: Budget,
) -> Result<(Option<LocalModel>, Desingularization)> {
    let lm = model.local_model()?;
    let d = match &lm {
        Some(m) => partial_desingularization_to(m, stages, budget)?,
        None => partial_desingularization_ideal_to(&model.ideal(), &model.weights, stages, budget)?,
    };
    Ok((lm, d))
}

fn chart_report(cs: &ChartStage) -> Result<ChartReport> {
    let mut verdicts = Vec::new();
    match cs.semistable_empty {
        Some(true) => verdicts.push("semistable locus empty".to_string()),
        Some(false) => verdicts.push("semistable locus nonempty".to_string()),
        None => {
            verdicts.push("semistable locus not computed (center of rank above one)".to_string())
        }
    }
    let complex = match &cs.model {
        Some(m) => Some(check_complex(m, &cs.path)?),
        None => None,
    };
    Ok(ChartReport {
        name: cs.path.clone(),
        vars: cs.chart.ring.vars().to_vec(),
        weights: cs.chart.weights.rows().to_vec(),
        ideal_gb: sorted_strings(cs.intrinsic.gb.basis()),
        unstable_gb: cs.unstable.as_ref().map(|u| sorted_strings(u.basis())),
        checks: Checks {
            xi: cs.intrinsic.divisions,
            complex,
            coinc: cs.model.as_ref().map(|_| true),
        },
        verdicts,
    })
}

/// Blow up once, or with `full` run the whole partial desingularization.
pub fn cmd_blowup(model: &Model, opts: &Options) -> Result<Report> {
    let stages = if opts.full { usize::MAX } else { 1 };
    let (lm, d) = desingularize(model, stages, opts.budget)?;
    let mut report = Report::new(
        &model.name,
        if opts.full { "blowup --full" } else { "blowup" },
    );
    if let (Source::Ideal(declared), Some(m), Some(stage)) = (&model.source, &lm, d.stages.first())
    {
        for (chart, ok) in verify_coinc_against(declared, m, &stage.center, opts.budget)? {
            if !ok {
                return Err(Error::theorem(
                    "coinc",
                    format!("{chart}: the blown-up section does not cut out the intrinsic ideal of `ideal`"),
                ));
            }
        }
    }
    report.ledger.absorb(&d.ledger);
    for stage in &d.stages {
        for cs in &stage.charts {
            let c = chart_report(cs)?;
            report.ledger.complex += c.checks.complex.unwrap_or(0);
            report.charts.push(c);
        }
    }
    if let Some(m) = &lm {
        report.ledger.complex += check_complex(m, "root")?;
    }
    if d.dense {
        report
            .ledger
            .notes
            .push("dense: the center fixes the whole ambient space, so the blowup is empty".into());
    } else if d.stages.is_empty() {
        report.ledger.notes.push(
            "no positive-dimensional stabilizer on the semistable locus; nothing to blow up".into(),
        );
    }
    if let Some(first) = d.stages.first() {
        if first
            .charts
            .iter()
            .all(|c| c.semistable_empty == Some(true))
        {
            report
                .ledger
                .notes
                .push("semistable part of the first blowup is empty".into());
        }
        report.ledger.notes.push(format!(
            "{} stage(s); first center {}",
            d.stages.len(),
            first.center_global
        ));
    }
    report.sort();
    Ok(report)
}

/// What a `--chart` flag points at.
pub struct Target {
    pub name: String,
    pub ring: Ring,
    pub weights: WeightMatrix,
    pub ideal: Ideal,
    pub model: Option<LocalModel>,
    pub stability: Arc<StabilityNode>,
    pub unstable_gb: Option<Vec<String>>,
}

pub fn resolve(model: &Model, chart: Option<&str>, budget: Budget) -> Result<Target> {
    match chart {
        None | Some("root") => {
            let lm = model.local_model()?;
            let stability = lm
                .as_ref()
                .map(|m| m.stability.clone())
                .unwrap_or_else(|| StabilityNode::root(&model.ring));
            Ok(Target {
                name: "root".into(),
                ring: model.ring.clone(),
                weights: model.weights.clone(),
                ideal: model.ideal(),
                model: lm,
                stability,
                unstable_gb: None,
            })
        }
        Some(path) => {
            let depth = path.split('/').count();
            let (_, d) = desingularize(model, depth, budget)?;
            let cs = d
                .stages
                .iter()
                .flat_map(|s| &s.charts)
                .find(|c| c.path == path)
                .ok_or_else(|| {
                    let names: Vec<&str> = d
                        .stages
                        .iter()
                        .flat_map(|s| &s.charts)
                        .map(|c| c.path.as_str())
                        .collect();
                    Error::precondition(format!(
                        "no chart `{path}`; available: {}",
                        names.join(", ")
                    ))
                })?;
            Ok(Target {
                name: cs.path.clone(),
                ring: cs.chart.ring.clone(),
                weights: cs.chart.weights.clone(),
                ideal: cs.intrinsic.gb.ideal(),
                model: cs.model.clone(),
                stability: cs.stability.clone(),
                unstable_gb: cs.unstable.as_ref().map(|u| sorted_strings(u.basis())),
            })
        }
    }
}

fn target_report(t: &Target, budget: Budget) -> Result<ChartReport> {
    Ok(ChartReport {
        name: t.name.clone(),
        vars: t.ring.vars().to_vec(),
        weights: t.weights.rows().to_vec(),
        ideal_gb: sorted_strings(t.ideal.gb(budget)?.basis()),
        unstable_gb: t.unstable_gb.clone(),
        ..ChartReport::default()
    })
}

fn point_for(t: &Target, model: &Model, opts: &Options) -> Result<Vec<Rational>> {
    let p = match (&opts.point, &model.basepoint) {
        (Some(p), _) => p.clone(),
        (None, Some(b)) if t.name == "root" => b.clone(),
        _ => vec![Rational::zero(); t.ring.nvars()],
    };
    if p.len() != t.ring.nvars() {
        return Err(Error::precondition(format!(
            "point has {} coordinates, `{}` has {}",
            p.len(),
            t.name,
            t.ring.nvars()
        )));
    }
    Ok(p)
}

fn need_model(t: &Target) -> Result<&LocalModel> {
    t.model
        .as_ref()
        .ok_or_else(|| Error::precondition("this command needs a potential or a section"))
}

/// Cohomology of the four-term complex at a point.
pub fn cmd_crit(model: &Model, opts: &Options) -> Result<Report> {
    let t = resolve(model, opts.chart.as_deref(), opts.budget)?;
    let m = need_model(&t)?;
    let p = point_for(&t, model, opts)?;
    let c = four_term_at(m, &p)?;
    let h = cohomology_dims(&c)?;
    let mut chart = target_report(&t, opts.budget)?;
    chart.checks.complex = Some(1);
    chart.verdicts.push(format!("point {}", show(&p)));
    chart
        .verdicts
        .push(format!("h = ({}, {}, {}, {})", h.0, h.1, h.2, h.3));
    let support: Vec<usize> = (0..p.len()).filter(|&i| !p[i].is_zero()).collect();
    if stabilizer_subtorus(&support, &m.weights).is_trivial() {
        let r = reduced_obstruction_dim(m, &p)?;
        chart
            .verdicts
            .push(format!("reduced obstruction dimension {}", r.dim));
        if let Some(w) = r.warning {
            chart.verdicts.push(format!("warning: {w}"));
        }
    } else {
        chart
            .verdicts
            .push("stabilizer is positive-dimensional".into());
    }
    let mut report = Report::new(&model.name, "crit");
    report.ledger.complex = 1;
    report.charts.push(chart);
    Ok(report)
}

/// Stability of a point of a chart.
pub fn cmd_semistable(model: &Model, opts: &Options) -> Result<Report> {
    let t = resolve(model, opts.chart.as_deref(), opts.budget)?;
    let p = point_for(&t, model, opts)?;
    let v = t.stability.point_semistable(&p)?;
    let mut chart = target_report(&t, opts.budget)?;
    let mut line = format!(
        "point {}: {}",
        show(&p),
        if v.semistable {
            "semistable"
        } else {
            "unstable"
        }
    );
    if let Some(w) = &v.witness {
        line.push_str(&format!(
            ", witness lambda {:?} at level {}",
            w.lambda, w.level
        ));
        if let Some(l) = &w.limit {
            line.push_str(&format!(", limit {}", show(l)));
        }
    }
    chart.verdicts.push(line);
    let mut report = Report::new(&model.name, "semistable");
    report.charts.push(chart);
    Ok(report)
}

/// Extend a point order by order and report the last obstruction.
pub fn cmd_obstruction(model: &Model, opts: &Options) -> Result<Report> {
    let t = resolve(model, opts.chart.as_deref(), opts.budget)?;
    let m = need_model(&t)?;
    let p = point_for(&t, model, opts)?;
    let order = opts.ext_order.unwrap_or(2);
    let chain = obstruction_chain(m, &p, order)?;
    let mut chart = target_report(&t, opts.budget)?;
    let coords: Vec<String> = chain.map.coords.iter().map(|c| show(c)).collect();
    chart.verdicts.push(format!(
        "map of order {}: {}",
        chain.map.m,
        coords.join(" ")
    ));
    let class: Vec<String> = chain
        .obstruction
        .class
        .iter()
        .map(ToString::to_string)
        .collect();
    chart.verdicts.push(format!(
        "obstruction class [{}] in a cokernel of dimension {}",
        class.join(", "),
        chain.obstruction.cokernel_dim
    ));
    chart.verdicts.push(if chain.obstruction.liftable {
        "liftable".into()
    } else {
        "obstructed".into()
    });
    if let Some(s) = chain.stuck_at {
        chart.verdicts.push(format!("stuck at order {s}"));
    }
    let mut report = Report::new(&model.name, "obstruction");
    report.charts.push(chart);
    Ok(report)
}

/// Check that `section` and the differential of `potential` are
/// Omega-equivalent with `A = B = 0` after inverting `hint`.
pub fn cmd_omega_verify(model: &Model, opts: &Options) -> Result<Report> {
    let m = model
        .local_model()?
        .filter(|_| model.potential().is_some())
        .ok_or_else(|| Error::precondition("omega-verify needs a potential"))?;
    let other = model
        .section
        .clone()
        .ok_or_else(|| Error::precondition("omega-verify needs a `section` to compare with"))?;
    let h = model.hint.clone().unwrap_or_else(|| model.ring.one());
    let zero = vec![vec![model.ring.zero(); m.r()]; m.n()];
    let rep = verify_omega_equivalence(
        &m,
        &other,
        &zero,
        &zero,
        &h,
        model.basepoint.as_deref(),
        opts.budget,
    )?;
    if !rep.passed() {
        return Err(Error::theorem(
            "omega-equivalence",
            rep.witnesses.join("; "),
        ));
    }
    let mut report = Report::new(&model.name, "omega-verify");
    let mut chart = ChartReport {
        name: "root".into(),
        vars: model.ring.vars().to_vec(),
        weights: model.weights.rows().to_vec(),
        ideal_gb: sorted_strings(m.ideal().gb(opts.budget)?.basis()),
        ..ChartReport::default()
    };
    chart
        .verdicts
        .push(format!("omega-equivalent after inverting {h}"));
    report.charts.push(chart);
    Ok(report)
}

/// Blow up the family and the fiber over `--at`, and compare.
pub fn cmd_fiber_check(model: &Model, opts: &Options) -> Result<Report> {
    let fam = model.family()?;
    let c = opts.at.clone().unwrap_or_else(Rational::zero);
    if !check_fixed_locus_flat(&fam) {
        return Err(Error::theorem(
            "fixed-locus-flat",
            "the fixed locus is not a product with the base",
        ));
    }
    let fiber = specialize(&fam, &c)?;
    let r = Subtorus::full(fiber.k());
    let results = fiber_blowup_commutes(&fam, &c, opts.budget)?;
    let mut report = Report::new(&model.name, &format!("fiber-check --at {c}"));
    report
        .ledger
        .notes
        .push("fixed locus: coordinate subspace times the base line".into());
    let charts = make_charts(&fiber.ring, &fiber.weights, &r)?;
    for (name, ok) in results {
        if !ok {
            return Err(Error::theorem(
                "fiber-commutation",
                format!("{name} at {c}"),
            ));
        }
        let chart = charts
            .iter()
            .find(|ch| ch.name == name)
            .expect("names come from the fiber");
        let gb = intrinsic_ideal(&fiber.ideal(), chart, &fiber.weights, &r, opts.budget)?.gb;
        report.charts.push(ChartReport {
            name,
            vars: chart.ring.vars().to_vec(),
            weights: chart.weights.rows().to_vec(),
            ideal_gb: sorted_strings(gb.basis()),
            verdicts: vec!["specialization commutes with the blowup".into()],
            ..ChartReport::default()
        });
    }
    report.sort();
    Ok(report)
}

/// Re-embed with extra weight-zero coordinates `u = poly` and compare the
/// intrinsic ideals after eliminating them.
pub fn cmd_independence(model: &Model, opts: &Options) -> Result<Report> {
    let aux = if opts.aux.is_empty() {
        vec!["u".to_string()]
    } else {
        opts.aux.clone()
    };
    let mut names = Vec::new();
    let mut graphs = Vec::new();
    for a in &aux {
        let (name, poly) = match a.split_once('=') {
            Some((n, p)) => (n.trim().to_string(), p.trim().to_string()),
            None => (a.trim().to_string(), "0".to_string()),
        };
        names.push(name);
        graphs.push(poly);
    }
    let big_ring = model.ring.extend(&names)?;
    let mut rows = model.weights.rows().to_vec();
    for row in &mut rows {
        row.extend(std::iter::repeat(0).take(names.len()));
    }
    let w_big = WeightMatrix::new(big_ring.nvars(), rows)?;
    let small = model.ideal();
    let mut gens: Vec<_> = small
        .gens()
        .iter()
        .map(|g| g.to_ring(&big_ring))
        .collect::<Result<_>>()?;
    for (n, p) in names.iter().zip(&graphs) {
        let p = big_ring.parse(p)?;
        if names
            .iter()
            .any(|m| p.involves(big_ring.var_index(m).unwrap()))
        {
            return Err(Error::precondition(
                "auxiliary graphs must not involve auxiliary variables",
            ));
        }
        gens.push(&big_ring.var_named(n)? - &p);
    }
    let big = Ideal::new(&big_ring, gens);
    let results =
        embedding_independence_check(&small, &model.weights, &big, &w_big, &names, opts.budget)?;
    let mut report = Report::new(
        &model.name,
        &format!("independence --aux {}", aux.join(",")),
    );
    for (name, ok) in results {
        if !ok {
            return Err(Error::theorem("embedding-independence", name));
        }
        report.charts.push(ChartReport {
            name,
            verdicts: vec!["eliminated intrinsic ideal matches".into()],
            ..ChartReport::default()
        });
    }
    report.sort();
    Ok(report)
}

/// The models shipped with the tool, as `(name, text)`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("cone", include_str!("../models/cone.kb")),
    ("e1", include_str!("../models/e1.kb")),
    ("e2", include_str!("../models/e2.kb")),
    ("family", include_str!("../models/family.kb")),
    ("nonreduced", include_str!("../models/nonreduced.kb")),
    ("quartic", include_str!("../models/quartic.kb")),
    ("rank2", include_str!("../models/rank2.kb")),
    ("trivial", include_str!("../models/trivial.kb")),
];

pub fn bundled_models() -> Result<Vec<Model>> {
    BUNDLED.iter().map(|(n, t)| Model::parse(n, t)).collect()
}

pub fn bundled(name: &str) -> Model {
    let (n, t) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .expect("bundled model");
    Model::parse(n, t).expect("bundled models parse")
}

/// `*.kb` files of a directory, sorted by name.
pub fn models_in(dir: &Path) -> Result<Vec<Model>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Parse {
        pos: 0,
        msg: format!("{}: {e}", dir.display()),
    })?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "kb"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Model::load(p)).collect()
}

/// The full blowup report of every model, merged. Deterministic.
pub fn corpus_report(models: &[Model], budget: Budget) -> Result<Report> {
    let mut report = Report::new("corpus", "corpus");
    let opts = Options {
        budget,
        full: true,
        ..Options::default()
    };
    for m in models {
        let r = cmd_blowup(m, &opts).map_err(|e| match e {
            Error::TheoremCheck { check, detail } => Error::TheoremCheck {
                check,
                detail: format!("{}: {detail}", m.name),
            },
            e => e,
        })?;
        report.ledger.merge(&r.ledger, &m.name);
        report.charts.extend(r.charts.into_iter().map(|mut c| {
            c.name = format!("{}:{}", m.name, c.name);
            c
        }));
    }
    Ok(report)
}
