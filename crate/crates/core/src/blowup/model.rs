//! Weak local models and their transport to blowup charts.
//!
//! A model on an affine chart `V` consists of a free equivariant bundle `F`
//! with a weighted frame `e_j` (weight `f_j`), an invariant section `omega`
//! (component `j` of weight `-f_j`), an effective divisor `D` given by a
//! monomial `delta`, and a cofactor `phi: F -> g^*(-D)`. The cofactor is
//! stored untwisted, as the `k x r` matrix `Phi` with `Phi / delta` the
//! actual map, together with a `r x n` matrix `Psi` sending the frame
//! `delta * dx_i` of `Omega_V(-D)` to `F`. Condition (1) is then the matrix
//! identity `(Phi / delta) * Psi = S` with `S[a][i] = w_{a,i} x_i`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groebner::{Budget, Ideal};
use crate::poly::{rat, Monomial, MultiPoly, Ring};
use crate::stability::{ChartRule, StabilityNode};
use crate::torus::{
    fixed_locus, limit_supports, orbit_is_closed, stabilizer_subtorus, Subtorus, WeightMatrix,
};

use super::chart::{has_weight, intrinsic_ideal, make_charts, BlowupChart};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantBundle {
    pub labels: Vec<String>,
    pub weights: Vec<Vec<i64>>,
    /// Multiplicity of the exceptional divisors in `D`.
    pub twist: u32,
}

impl EquivariantBundle {
    pub fn new(labels: Vec<String>, weights: Vec<Vec<i64>>) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::precondition(
                "bundle needs one weight per frame label",
            ));
        }
        Ok(EquivariantBundle {
            labels,
            weights,
            twist: 0,
        })
    }

    /// `Omega_V` with frame `dx_i` of weight `w_i`.
    pub fn cotangent(ring: &Ring, w: &WeightMatrix) -> Self {
        EquivariantBundle {
            labels: ring.vars().iter().map(|v| format!("d{v}")).collect(),
            weights: w.columns(),
            twist: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    fn restrict(&self, r: &Subtorus) -> EquivariantBundle {
        EquivariantBundle {
            labels: self.labels.clone(),
            weights: self.weights.iter().map(|f| pair(r, f)).collect(),
            twist: self.twist,
        }
    }
}

fn pair(r: &Subtorus, f: &[i64]) -> Vec<i64> {
    r.cochar()
        .iter()
        .map(|l| l.iter().zip(f).map(|(a, b)| a * b).sum())
        .collect()
}

fn is_moving(r: &Subtorus, f: &[i64]) -> bool {
    pair(r, f).iter().any(|&x| x != 0)
}

/// The bundle on the chart: moving frame elements become `xi * pi^* e_j`.
pub fn blowup_bundle(f: &EquivariantBundle, chart: &BlowupChart) -> EquivariantBundle {
    let xi = &chart.ring.vars()[chart.pivot];
    let wk = chart.weights.column(chart.pivot);
    let mut out = f.clone();
    for (label, w) in out.labels.iter_mut().zip(out.weights.iter_mut()) {
        if is_moving(&chart.center, w) {
            *label = format!("{xi}*{label}");
            for (a, b) in w.iter_mut().zip(&wk) {
                *a += b;
            }
        }
    }
    out
}

/// The cofactor data `(Phi, Psi)` described in the module docs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cofactor {
    pub phi: Vec<Vec<MultiPoly>>,
    pub psi: Vec<Vec<MultiPoly>>,
}

#[derive(Clone, Debug)]
pub struct LocalModel {
    pub ring: Ring,
    pub weights: WeightMatrix,
    pub bundle: EquivariantBundle,
    pub section: Vec<MultiPoly>,
    pub divisor: Monomial,
    pub cofactor: Option<Cofactor>,
    /// Rows embed the cocharacters of the acting torus into the torus of
    /// the original model.
    pub group_basis: Vec<Vec<i64>>,
    pub stability: Arc<StabilityNode>,
}

impl LocalModel {
    pub fn new(
        ring: &Ring,
        weights: WeightMatrix,
        bundle: EquivariantBundle,
        section: Vec<MultiPoly>,
        cofactor: Option<Cofactor>,
    ) -> Result<Self> {
        let (n, k, r) = (ring.nvars(), weights.k(), bundle.rank());
        if weights.n() != n {
            return Err(Error::precondition(
                "weight matrix and ring disagree on the number of variables",
            ));
        }
        if section.len() != r {
            return Err(Error::precondition(format!(
                "section has {} components, bundle rank is {r}",
                section.len()
            )));
        }
        if bundle.weights.iter().any(|f| f.len() != k) {
            return Err(Error::precondition(
                "frame weights must have one entry per torus factor",
            ));
        }
        if section.iter().any(|s| s.ring() != ring) {
            return Err(Error::precondition(
                "section components live in a different ring",
            ));
        }
        if let Some(c) = &cofactor {
            let ok = c.phi.len() == k
                && c.phi.iter().all(|row| row.len() == r)
                && c.psi.len() == r
                && c.psi.iter().all(|row| row.len() == n);
            if !ok {
                return Err(Error::precondition(
                    "cofactor matrices have the wrong shape",
                ));
            }
        }
        Ok(LocalModel {
            ring: ring.clone(),
            weights,
            bundle,
            section,
            divisor: Monomial::one(n),
            cofactor,
            group_basis: Subtorus::full(k).cochar().to_vec(),
            stability: StabilityNode::root(ring),
        })
    }

    pub fn n(&self) -> usize {
        self.ring.nvars()
    }

    pub fn k(&self) -> usize {
        self.weights.k()
    }

    pub fn r(&self) -> usize {
        self.bundle.rank()
    }

    /// `I_U`, generated by the section components.
    pub fn ideal(&self) -> Ideal {
        Ideal::new(&self.ring, self.section.iter().cloned())
    }

    pub fn divisor_poly(&self) -> MultiPoly {
        MultiPoly::monomial(&self.ring, self.divisor.clone(), rat(1))
    }

    /// `S[a][i] = w_{a,i} x_i`, the action map `Omega_V -> g^*`.
    pub fn action_matrix(&self) -> Vec<Vec<MultiPoly>> {
        self.weights
            .rows()
            .iter()
            .map(|row| {
                (0..self.n())
                    .map(|i| self.ring.var(i).scale(&rat(row[i])))
                    .collect()
            })
            .collect()
    }

    /// `Phi / delta`, failing if some entry is not divisible.
    pub fn phi_twisted(&self) -> Result<Vec<Vec<MultiPoly>>> {
        let c = self
            .cofactor
            .as_ref()
            .ok_or_else(|| Error::precondition("model has no cofactor"))?;
        c.phi
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| {
                        div_monomial(p, &self.divisor).ok_or_else(|| {
                            Error::theorem(
                                "cofactor-divisibility",
                                format!("{p} is not divisible by {}", self.divisor_poly()),
                            )
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// The same model seen by the subtorus `r` only.
    pub fn restrict(&self, r: &Subtorus) -> LocalModel {
        let cofactor = self.cofactor.as_ref().map(|c| Cofactor {
            phi: r
                .cochar()
                .iter()
                .map(|l| {
                    (0..self.r())
                        .map(|j| {
                            l.iter()
                                .zip(&c.phi)
                                .fold(self.ring.zero(), |acc, (a, row)| {
                                    &acc + &row[j].scale(&rat(*a))
                                })
                        })
                        .collect()
                })
                .collect(),
            psi: c.psi.clone(),
        });
        let group_basis = r
            .cochar()
            .iter()
            .map(|l| {
                let k0 = self.group_basis.first().map(Vec::len).unwrap_or(0);
                (0..k0)
                    .map(|g| {
                        l.iter()
                            .zip(&self.group_basis)
                            .map(|(a, row)| a * row[g])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        LocalModel {
            ring: self.ring.clone(),
            weights: self.weights.restrict(r),
            bundle: self.bundle.restrict(r),
            section: self.section.clone(),
            divisor: self.divisor.clone(),
            cofactor,
            group_basis,
            stability: self.stability.clone(),
        }
    }

    /// The acting torus as a subtorus of the original one.
    pub fn global_subtorus(&self, r: &Subtorus) -> Result<Subtorus> {
        let k0 = self.group_basis.first().map(Vec::len).unwrap_or(0);
        let rows = r
            .cochar()
            .iter()
            .map(|l| {
                (0..k0)
                    .map(|g| {
                        l.iter()
                            .zip(&self.group_basis)
                            .map(|(a, row)| a * row[g])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Subtorus::new(k0, rows)
    }
}

pub(crate) fn div_monomial(p: &MultiPoly, m: &Monomial) -> Option<MultiPoly> {
    let mut q = p.clone();
    for (i, &e) in m.0.iter().enumerate() {
        q = q.div_var_power(i, e)?;
    }
    Some(q)
}

/// Outcome of one condition of a weak local model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub name: &'static str,
    pub passed: bool,
    pub skipped: bool,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakModelReport {
    pub conditions: Vec<ConditionReport>,
}

impl WeakModelReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for WeakModelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            let state = if c.skipped {
                "skipped"
            } else if c.passed {
                "pass"
            } else {
                "FAIL"
            };
            write!(f, "{}: {}", c.name, state)?;
            for w in &c.witnesses {
                write!(f, "; {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn report(name: &'static str, skipped: bool, witnesses: Vec<String>) -> ConditionReport {
    ConditionReport {
        name,
        passed: witnesses.is_empty(),
        skipped,
        witnesses,
    }
}

/// Check the three conditions of a weak local model symbolically.
///
/// (1) `Phi` is divisible by `delta` and `(Phi/delta) * Psi = S`.
/// (2) each `omega_j` has weight `-f_j` and `Phi * omega = 0`.
/// (3) for every closed-orbit semistable support `S` of `V` with nontrivial
///     stabilizer `R_S`, the `R_S`-rows of `Phi/delta` vanish on `V^{R_S}`.
pub fn check_weak_local_model(m: &LocalModel) -> WeakModelReport {
    let mut conditions = Vec::new();
    let twisted = m.cofactor.as_ref().map(|_| m.phi_twisted());

    let mut w1 = Vec::new();
    match &twisted {
        None => conditions.push(report("factorization", true, vec![])),
        Some(Err(e)) => {
            w1.push(e.to_string());
            conditions.push(report("factorization", false, w1));
        }
        Some(Ok(phi)) => {
            let psi = &m.cofactor.as_ref().unwrap().psi;
            let s = m.action_matrix();
            for a in 0..m.k() {
                for i in 0..m.n() {
                    let mut acc = m.ring.zero();
                    for j in 0..m.r() {
                        acc = &acc + &(&phi[a][j] * &psi[j][i]);
                    }
                    if acc != s[a][i] {
                        w1.push(format!("entry ({a},{i}): {acc} != {}", s[a][i]));
                    }
                }
            }
            conditions.push(report("factorization", false, w1));
        }
    }

    let mut w2 = Vec::new();
    for (j, (s, f)) in m.section.iter().zip(&m.bundle.weights).enumerate() {
        let target: Vec<i64> = f.iter().map(|x| -x).collect();
        if !has_weight(s, &m.weights, &target) {
            w2.push(format!("component {j} ({s}) is not of weight {target:?}"));
        }
    }
    if let Some(c) = &m.cofactor {
        for (a, row) in c.phi.iter().enumerate() {
            let mut acc = m.ring.zero();
            for (p, s) in row.iter().zip(&m.section) {
                acc = &acc + &(p * s);
            }
            if !acc.is_zero() {
                w2.push(format!("row {a} of phi(omega) = {acc}"));
            }
        }
    }
    conditions.push(report("vanishing", false, w2));

    let mut w3 = Vec::new();
    match &twisted {
        Some(Ok(phi)) => {
            if m.n() > 16 {
                w3.push("too many coordinates for the support scan".to_string());
            } else {
                for s in fixed_part_supports(m) {
                    let rs = stabilizer_subtorus(&s, &m.weights);
                    let moving = fixed_locus(&m.weights, &rs);
                    let zero: Vec<_> = moving.iter().map(|&i| (i, rat(0))).collect();
                    for (b, l) in rs.cochar().iter().enumerate() {
                        for j in 0..m.r() {
                            let e = l
                                .iter()
                                .zip(phi.iter())
                                .fold(m.ring.zero(), |acc, (a, row)| {
                                    &acc + &row[j].scale(&rat(*a))
                                })
                                .specialize(&zero);
                            if !e.is_zero() {
                                w3.push(format!("support {s:?}, row {b}, frame {j}: {e}"));
                            }
                        }
                    }
                }
                w3.sort();
                w3.dedup();
            }
            conditions.push(report("fixed-part", false, w3));
        }
        Some(Err(_)) => {
            w3.push("cofactor not divisible by the divisor".to_string());
            conditions.push(report("fixed-part", false, w3));
        }
        None => conditions.push(report("fixed-part", true, vec![])),
    }
    WeakModelReport { conditions }
}

/// Semistable coordinate supports of `V` with closed orbit and nontrivial
/// stabilizer.
fn fixed_part_supports(m: &LocalModel) -> Vec<Vec<usize>> {
    let n = m.n();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if !m.stability.semistable(&s) {
            continue;
        }
        let closed = orbit_is_closed(&s, &m.weights)
            || !limit_supports(&s, &m.weights)
                .iter()
                .any(|t| m.stability.semistable(t));
        if closed && !stabilizer_subtorus(&s, &m.weights).is_trivial() {
            out.push(s);
        }
    }
    out
}

/// The section on the chart: pullback on fixed frames, pullback over `xi`
/// on moving ones.
pub fn blowup_section(m: &LocalModel, chart: &BlowupChart) -> Result<Vec<MultiPoly>> {
    m.section
        .iter()
        .zip(&m.bundle.weights)
        .map(|(s, f)| {
            let p = chart.pullback(s);
            if is_moving(&chart.center, f) {
                chart.exceptional_divide(&p)
            } else {
                Ok(p)
            }
        })
        .collect()
}

/// Transport a model to one chart of its blowup along the fixed locus of
/// the chart's center. When the center is smaller than the acting torus the
/// model is first restricted to the center. The divisor gains `2E`, the
/// cofactor is rebuilt, and the result is re-checked.
pub fn blowup_local_model(m: &LocalModel, chart: &BlowupChart) -> Result<LocalModel> {
    if m.k() == 0 {
        return Ok(m.clone());
    }
    let full = Subtorus::full(m.k());
    if chart.center != full {
        let restricted = m.restrict(&chart.center);
        let d = chart.center.dim();
        let charts = make_charts(&restricted.ring, &restricted.weights, &Subtorus::full(d))?;
        let c = charts
            .into_iter()
            .find(|c| c.pivot == chart.pivot)
            .ok_or_else(|| Error::precondition("chart pivot is not moving for the center"))?;
        return blowup_local_model(&restricted, &c);
    }
    if chart.parent != m.ring {
        return Err(Error::precondition("chart does not belong to this model"));
    }
    let ring = &chart.ring;
    let k = chart.pivot;
    let xi = chart.xi();
    let eps: Vec<bool> = m
        .bundle
        .weights
        .iter()
        .map(|f| is_moving(&full, f))
        .collect();

    let section = blowup_section(m, chart)?;
    let mut divisor = chart.pullback_monomial(&m.divisor);
    divisor.0[k] += 2;

    let cofactor = match &m.cofactor {
        None => None,
        Some(c) => {
            let phi = c
                .phi
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&eps)
                        .map(|(p, &e)| {
                            let q = chart.pullback(p);
                            if e {
                                &q * &xi
                            } else {
                                q
                            }
                        })
                        .collect()
                })
                .collect();
            // Columns of the pulled-back frame change: rows are parent dx_i,
            // columns chart coordinates.
            let n = m.n();
            let jac = |i: usize, col: usize| -> MultiPoly {
                if col == k {
                    if i == k {
                        xi.clone()
                    } else {
                        ring.zero()
                    }
                } else if chart.is_moving(col) {
                    if i == col {
                        ring.one()
                    } else if i == k {
                        -&ring.var(col)
                    } else {
                        ring.zero()
                    }
                } else if i == col {
                    xi.clone()
                } else {
                    ring.zero()
                }
            };
            let pulled: Vec<Vec<MultiPoly>> = c
                .psi
                .iter()
                .map(|row| row.iter().map(|p| chart.pullback(p)).collect())
                .collect();
            let psi = pulled
                .iter()
                .zip(&eps)
                .map(|(row, &e)| {
                    (0..n)
                        .map(|col| {
                            let mut acc = ring.zero();
                            for (i, p) in row.iter().enumerate() {
                                if !p.is_zero() {
                                    let j = jac(i, col);
                                    if !j.is_zero() {
                                        acc = &acc + &(p * &j);
                                    }
                                }
                            }
                            if e {
                                acc
                            } else {
                                &acc * &xi
                            }
                        })
                        .collect()
                })
                .collect();
            Some(Cofactor { phi, psi })
        }
    };

    let mut bundle = blowup_bundle(&m.bundle, chart);
    bundle.twist += 2;
    let rule = ChartRule {
        pivot: k,
        moving: chart.moving.clone(),
        weights: m.weights.columns(),
    };
    let stability = StabilityNode::child(&m.stability, ring, chart.monomial_images(), rule);
    let out = LocalModel {
        ring: ring.clone(),
        weights: chart.weights.clone(),
        bundle,
        section,
        divisor,
        cofactor,
        group_basis: m.group_basis.clone(),
        stability,
    };
    let rep = check_weak_local_model(&out);
    if !rep.all_passed() {
        return Err(Error::theorem(
            "local-model-transport",
            format!(
                "{} on {}: {}",
                "blown-up model fails",
                chart.name,
                rep.to_string().trim()
            ),
        ));
    }
    Ok(out)
}

/// Whether the zero ideal of the blown-up section equals the intrinsic
/// ideal of `ideal`, chart by chart.
pub fn verify_coinc_against(
    ideal: &Ideal,
    m: &LocalModel,
    r: &Subtorus,
    budget: Budget,
) -> Result<Vec<(String, bool)>> {
    let mut out = Vec::new();
    for chart in make_charts(&m.ring, &m.weights, r)? {
        let section = blowup_section(m, &chart)?;
        let lhs = Ideal::new(&chart.ring, section).gb(budget)?;
        let rhs = intrinsic_ideal(ideal, &chart, &m.weights, r, budget)?.gb;
        out.push((chart.name.clone(), lhs.basis() == rhs.basis()));
    }
    Ok(out)
}

pub fn verify_coinc(m: &LocalModel, r: &Subtorus, budget: Budget) -> Result<Vec<(String, bool)>> {
    verify_coinc_against(&m.ideal(), m, r, budget)
}

/// Build the d-critical style model data `(Omega_V, omega, 0, S)` for an
/// arbitrary section with frame `dx_i`; used by tests and by callers that
/// already know `omega` is the differential of an invariant function.
pub fn cotangent_model(ring: &Ring, w: &WeightMatrix, omega: Vec<MultiPoly>) -> Result<LocalModel> {
    let n = ring.nvars();
    let bundle = EquivariantBundle::cotangent(ring, w);
    let phi: Vec<Vec<MultiPoly>> = w
        .rows()
        .iter()
        .map(|row| (0..n).map(|i| ring.var(i).scale(&rat(row[i]))).collect())
        .collect();
    let psi = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { ring.one() } else { ring.zero() })
                .collect()
        })
        .collect();
    LocalModel::new(ring, w.clone(), bundle, omega, Some(Cofactor { phi, psi }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(vars: &[&str], w: &[i64], f: &str) -> LocalModel {
        let ring = Ring::new(vars).unwrap();
        let w = WeightMatrix::new(vars.len(), vec![w.to_vec()]).unwrap();
        let f = ring.parse(f).unwrap();
        let omega = (0..ring.nvars()).map(|i| f.partial_derivative(i)).collect();
        cotangent_model(&ring, &w, omega).unwrap()
    }

    fn strs(v: &[MultiPoly]) -> Vec<String> {
        v.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn bundles() {
        let m = model(&["x", "y"], &[1, -1], "x*y");
        let c = &make_charts(&m.ring, &m.weights, &Subtorus::full(1)).unwrap()[0];
        let b = blowup_bundle(&m.bundle, c);
        assert_eq!(b.labels, vec!["xi_x*dx", "xi_x*dy"]);
        assert_eq!(b.weights, vec![vec![2], vec![0]]);
        let m = model(&["x", "y", "z"], &[1, -1, 0], "x*y*z");
        let c = &make_charts(&m.ring, &m.weights, &Subtorus::full(1)).unwrap()[0];
        assert_eq!(
            blowup_bundle(&m.bundle, c).labels,
            vec!["xi_x*dx", "xi_x*dy", "dz"]
        );
    }

    #[test]
    fn sections() {
        let m = model(&["x", "y"], &[1, -1], "x*y");
        let c = &make_charts(&m.ring, &m.weights, &Subtorus::full(1)).unwrap()[0];
        assert_eq!(strs(&blowup_section(&m, c).unwrap()), vec!["T_y", "1"]);
        let m = model(&["x", "y", "z"], &[1, -1, 0], "x*y*z");
        let c = &make_charts(&m.ring, &m.weights, &Subtorus::full(1)).unwrap()[0];
        assert_eq!(
            strs(&blowup_section(&m, c).unwrap()),
            vec!["T_y*z", "z", "xi_x^2*T_y"]
        );
    }

    #[test]
    fn weak_model_checks() {
        let m = model(&["x", "y", "z"], &[1, -1, 0], "x*y*z");
        let rep = check_weak_local_model(&m);
        assert!(rep.all_passed(), "{rep}");
        let mut bad = m.clone();
        bad.section[0] = &bad.section[0] + &bad.ring.parse("x").unwrap();
        let rep = check_weak_local_model(&bad);
        assert!(!rep.condition("vanishing").unwrap().passed);
        assert!(!rep.condition("vanishing").unwrap().witnesses.is_empty());

        let ring = Ring::new(&["x"]).unwrap();
        let empty = LocalModel::new(
            &ring,
            WeightMatrix::new(1, vec![vec![1]]).unwrap(),
            EquivariantBundle::new(vec![], vec![]).unwrap(),
            vec![],
            None,
        )
        .unwrap();
        assert!(check_weak_local_model(&empty).all_passed());
    }

    #[test]
    fn transport_passes_checks() {
        for (vars, w, f) in [
            (&["x", "y"][..], &[1, -1][..], "x*y"),
            (&["x", "y", "z"][..], &[1, -1, 0][..], "x*y*z"),
            (&["x", "y", "z"][..], &[1, -1, 0][..], "x*y - z^2"),
            (&["x", "y"][..], &[1, -1][..], "1/2*x^2*y^2"),
            (&["x", "y", "z"][..], &[2, -1, 1][..], "x*y^2 + y*z"),
        ] {
            let m = model(vars, w, f);
            for c in make_charts(&m.ring, &m.weights, &Subtorus::full(1)).unwrap() {
                let b = blowup_local_model(&m, &c).unwrap();
                assert_eq!(b.bundle.twist, 2);
                assert_eq!(b.divisor.0[c.pivot], 2);
                assert!(check_weak_local_model(&b).all_passed());
            }
        }
    }

    #[test]
    fn e2_cofactor_shape() {
        let m = model(&["x", "y", "z"], &[1, -1, 0], "x*y*z");
        let c = &make_charts(&m.ring, &m.weights, &Subtorus::full(1)).unwrap()[0];
        let b = blowup_local_model(&m, c).unwrap();
        let phi = &b.cofactor.as_ref().unwrap().phi[0];
        assert_eq!(strs(phi), vec!["xi_x^2", "-xi_x^2*T_y", "0"]);
        assert_eq!(b.divisor_poly().to_string(), "xi_x^2");
    }

    #[test]
    fn coinc_examples() {
        for (vars, w, f) in [
            (&["x", "y"][..], &[1, -1][..], "x*y"),
            (&["x", "y", "z"][..], &[1, -1, 0][..], "x*y*z"),
            (&["x", "y", "z"][..], &[1, -1, 0][..], "x*y - z^2"),
            (&["x", "y"][..], &[1, -1][..], "1/2*x^2*y^2"),
        ] {
            let m = model(vars, w, f);
            let v = verify_coinc(&m, &Subtorus::full(1), Budget::default()).unwrap();
            assert!(v.iter().all(|(_, ok)| *ok), "{f}: {v:?}");
        }
    }

    #[test]
    fn trivial_group_model_is_unchanged() {
        let ring = Ring::new(&["x"]).unwrap();
        let m = cotangent_model(
            &ring,
            &WeightMatrix::trivial(1),
            vec![ring.parse("x^2").unwrap()],
        )
        .unwrap();
        let c = BlowupChart {
            name: "chart_x".into(),
            parent: ring.clone(),
            center: Subtorus::full(0),
            pivot: 0,
            moving: vec![],
            ring: ring.clone(),
            images: vec![ring.var(0)],
            weights: WeightMatrix::trivial(1),
        };
        let b = blowup_local_model(&m, &c).unwrap();
        assert_eq!(b.section, m.section);
    }

    #[test]
    fn restriction_to_subtorus() {
        let ring = Ring::new(&["x", "y", "z"]).unwrap();
        let w = WeightMatrix::new(3, vec![vec![1, 0, -1], vec![0, 1, -1]]).unwrap();
        let f = ring.parse("x*y*z").unwrap();
        let m =
            cotangent_model(&ring, &w, (0..3).map(|i| f.partial_derivative(i)).collect()).unwrap();
        let r = Subtorus::new(2, vec![vec![1, -1]]).unwrap();
        let cs = make_charts(&ring, &w, &r).unwrap();
        assert_eq!(cs.len(), 2);
        let b = blowup_local_model(&m, &cs[0]).unwrap();
        assert_eq!(b.k(), 1);
        assert_eq!(b.group_basis, vec![vec![1, -1]]);
        assert!(check_weak_local_model(&b).all_passed());
    }
}
