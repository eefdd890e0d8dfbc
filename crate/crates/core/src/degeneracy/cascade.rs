use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use serde::Serialize;

use super::recover::{identical_on_pseudostructure, recover_state_function, StateSample};
use super::trace::{trace_pseudostructure, Pseudostructure, StopReason, Trace, TraceParams};
use super::{degeneracy_directions, generic_null_dimension};
use crate::chart::Chart;
use crate::evolution::EvolutionaryRelation;
use crate::exterior::{combinations, exterior_derivative, CommutatorField, DifferentialForm};
use crate::sample::SamplePlan;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeConfig {
    pub step: f64,
    pub max_length: f64,
    pub tol: f64,
    /// Trace seeds; when none of them has a null direction the first locus
    /// point of `plan` is used instead.
    pub seeds: Vec<Vec<f64>>,
    /// Where the locus is scanned.
    pub plan: SamplePlan,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig {
            step: 1e-2,
            max_length: 1.0,
            tol: 1e-9,
            seeds: Vec::new(),
            plan: SamplePlan::grid(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CascadeOutcome {
    /// Every step down to the last one reachable was realized.
    #[serde(rename = "COMPLETED")]
    Completed,
    /// Some step found no degenerate point.
    #[serde(rename = "NO-REALIZATION")]
    NoRealization,
    /// A step was found but not certified (failed recovery or a
    /// non-integrable direction field).
    #[serde(rename = "STOPPED")]
    Stopped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeStep {
    /// Degree of the closed form this step is about.
    pub k: usize,
    pub realized: bool,
    /// Plan points with at least one degenerate direction.
    pub locus_size: usize,
    /// Plan points whose null dimension exceeds the generic one.
    pub excess_locus_size: usize,
    /// `n + 1 − k`.
    pub pseudostructure_dim: usize,
    /// Null dimension at the first seed (what the traces actually span).
    pub traced_dim: usize,
    pub traces: usize,
    pub integrable: bool,
    /// Largest null-direction certificate `|i_t K|∞` along the traces, or
    /// the loop defect / ψ mismatch on the k = 0 step.
    pub max_residual: f64,
    pub restricted_closure_max: Option<f64>,
    pub loop_defect: Option<f64>,
    pub state_function_samples: Option<Vec<StateSample>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeReport {
    pub outcome: CascadeOutcome,
    pub notes: Vec<String>,
    pub steps: Vec<CascadeStep>,
    /// Pseudostructures in step order (one per realized step with k ≥ 1).
    pub pseudostructures: Vec<Pseudostructure>,
    pub chart_dimension: usize,
}

impl CascadeReport {
    /// Every record satisfies `pseudostructure_dim + k = n + 1`.
    pub fn dimension_law_holds(&self) -> bool {
        self.steps
            .iter()
            .all(|s| s.pseudostructure_dim + s.k == self.chart_dimension + 1)
    }
}

pub const REENTRY_NOTE: &str = "re-entry below degree p uses the interior product of the \
     current form with the traced tangent at the first seed (constant vector)";
pub const INTEGRABILITY_NOTE: &str = "dual-form closure is checked as continuity of the null \
     direction along traces (turn per step below 30 degrees)";

struct Scan {
    locus: Vec<Vec<f64>>,
    excess: usize,
}

fn scan(
    k: Option<&CommutatorField>,
    chart: &Chart,
    degree: usize,
    cfg: &CascadeConfig,
) -> Result<Scan> {
    let n = chart.dimension();
    let generic = generic_null_dimension(n, degree + 1);
    let mut locus = Vec::new();
    let mut excess = 0;
    for p in cfg.plan.points(chart)? {
        let dim = match k {
            Some(k) => degeneracy_directions(k, &p, cfg.tol)?.len(),
            None => n,
        };
        if dim > generic {
            excess += 1;
        }
        if dim >= 1 {
            locus.push(p);
        }
    }
    Ok(Scan { locus, excess })
}

/// Straight trace along the first axis, for forms with no commutator
/// (top degree), where every direction is degenerate.
fn axis_line(chart: &Arc<Chart>, seed: &[f64], cfg: &CascadeConfig) -> Pseudostructure {
    let n = chart.dimension();
    let hi = chart.bounds()[0].hi;
    let length = cfg.max_length.min(hi - seed[0]);
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let mut tr = Trace {
        points: vec![seed.to_vec()],
        arclength: vec![0.0],
        tangents: vec![e1.clone()],
        residuals: vec![0.0],
        stop: if length < cfg.max_length {
            StopReason::Boundary
        } else {
            StopReason::LengthReached
        },
        integrable: true,
    };
    let mut s = 0.0;
    while s < length {
        s = (s + cfg.step).min(length);
        let mut p = seed.to_vec();
        p[0] += s;
        tr.points.push(p);
        tr.arclength.push(s);
        tr.tangents.push(e1.clone());
        tr.residuals.push(0.0);
    }
    Pseudostructure {
        chart: chart.clone(),
        dimension: n,
        seeds: vec![seed.to_vec()],
        traces: vec![tr],
        max_residual: 0.0,
        integrable: true,
    }
}

fn seeds_for(
    k: Option<&CommutatorField>,
    cfg: &CascadeConfig,
    locus: &[Vec<f64>],
    chart: &Chart,
    notes: &mut Vec<String>,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for s in &cfg.seeds {
        if !chart.contains(s) {
            notes.push(format!("seed {s:?} lies outside the domain; skipped"));
            continue;
        }
        let has = match k {
            Some(k) => !degeneracy_directions(k, s, cfg.tol)?.is_empty(),
            None => true,
        };
        if has {
            out.push(s.clone());
        } else {
            notes.push(format!("seed {s:?} has no null direction; skipped"));
        }
    }
    if out.is_empty() {
        out.push(locus[0].clone());
    }
    Ok(out)
}

fn trace_all(
    k: Option<&CommutatorField>,
    chart: &Arc<Chart>,
    seeds: &[Vec<f64>],
    cfg: &CascadeConfig,
) -> Result<Pseudostructure> {
    let params = TraceParams::new(cfg.step, cfg.max_length, cfg.tol);
    let mut merged: Option<Pseudostructure> = None;
    for s in seeds {
        let ps = match k {
            Some(k) => trace_pseudostructure(k, s, params)?,
            None => axis_line(chart, s, cfg),
        };
        match merged.as_mut() {
            Some(m) => m.merge(ps),
            None => merged = Some(ps),
        }
    }
    Ok(merged.expect("at least one seed"))
}

/// `max |dw(v_I)|` over `(deg dw)`-subsets of `dirs`; zero when there are
/// too few directions to fill the form.
fn restricted_residual(dw: &DifferentialForm, dirs: &[Vec<f64>], point: &[f64]) -> Result<f64> {
    let q = dw.degree();
    let mut r = 0.0_f64;
    if dirs.len() < q {
        return Ok(r);
    }
    for subset in combinations(dirs.len(), q) {
        let vs: Vec<Vec<f64>> = subset.iter().map(|&i| dirs[i].clone()).collect();
        r = r.max(dw.apply(point, &vs)?.abs());
    }
    Ok(r)
}

fn closure_certificate(
    w: &DifferentialForm,
    k: Option<&CommutatorField>,
    ps: &Pseudostructure,
    tol: f64,
) -> Result<f64> {
    let Some(k) = k else {
        return Ok(0.0);
    };
    let dw = if w.degree() == 1 {
        k.form().clone()
    } else {
        exterior_derivative(w)?
    };
    let mut r = 0.0_f64;
    for tr in ps.traces.iter().filter(|t| t.integrable) {
        for p in &tr.points {
            let dirs = degeneracy_directions(k, p, tol)?;
            r = r.max(restricted_residual(&dw, &dirs, p)?);
        }
    }
    Ok(r)
}

fn empty_step(k: usize, n: usize, scan: &Scan) -> CascadeStep {
    CascadeStep {
        k,
        realized: false,
        locus_size: scan.locus.len(),
        excess_locus_size: scan.excess,
        pseudostructure_dim: n + 1 - k,
        traced_dim: 0,
        traces: 0,
        integrable: false,
        max_residual: 0.0,
        restricted_closure_max: None,
        loop_defect: None,
        state_function_samples: None,
    }
}

/// Step the evolutionary relation down through the degrees of the closed
/// forms it realizes. For p = 1: the degenerate directions of the
/// commutator give the pseudostructure of the closed 1-form (k = 1), then ψ
/// is recovered on it (k = 0). For p ≥ 2 each step k records its locus and
/// restricted-closure certificates; the cascade stops above degree 1.
pub fn cascade_integrate(rel: &EvolutionaryRelation, cfg: &CascadeConfig) -> Result<CascadeReport> {
    let chart = rel.chart().clone();
    let n = chart.dimension();
    let p = rel.degree();
    let mut report = CascadeReport {
        outcome: CascadeOutcome::Completed,
        notes: vec![INTEGRABILITY_NOTE.into()],
        steps: Vec::new(),
        pseudostructures: Vec::new(),
        chart_dimension: n,
    };
    if p == 0 {
        report
            .notes
            .push("p = 0: no commutator, nothing to integrate".into());
        return Ok(report);
    }
    let mut w = rel.omega.clone();
    let mut k_deg = p;
    loop {
        let k = if k_deg == p {
            rel.commutator()?
        } else if k_deg < n {
            Some(CommutatorField::from_form(exterior_derivative(&w)?)?)
        } else {
            None
        };
        let sc = scan(k.as_ref(), &chart, k_deg, cfg)?;
        if sc.locus.is_empty() {
            report.steps.push(empty_step(k_deg, n, &sc));
            report.outcome = CascadeOutcome::NoRealization;
            return Ok(report);
        }
        let seeds = seeds_for(k.as_ref(), cfg, &sc.locus, &chart, &mut report.notes)?;
        let ps = trace_all(k.as_ref(), &chart, &seeds, cfg)?;
        let cert = closure_certificate(&w, k.as_ref(), &ps, cfg.tol)?;
        let integrable = ps.traces.iter().any(|t| t.integrable);
        let step = CascadeStep {
            realized: integrable,
            traced_dim: ps.dimension,
            traces: ps.traces.len(),
            integrable: ps.integrable,
            max_residual: ps.max_residual,
            restricted_closure_max: Some(cert),
            ..empty_step(k_deg, n, &sc)
        };
        report.steps.push(step);
        if !integrable {
            report.outcome = CascadeOutcome::Stopped;
            report
                .notes
                .push(format!("k = {k_deg}: no integrable trace"));
            return Ok(report);
        }
        let tangent = ps.traces[0].tangents[0].clone();
        report.pseudostructures.push(ps);
        if k_deg == 1 {
            let last = report.pseudostructures.last().expect("just pushed");
            let step = state_step(rel, last, cfg, &sc, n)?;
            if !step.realized {
                report.outcome = CascadeOutcome::Stopped;
            }
            report.steps.push(step);
            return Ok(report);
        }
        if k_deg - 1 < 2 {
            report.notes.push(format!(
                "stopped after k = {k_deg}: lower degrees need the degree-1 machinery"
            ));
            return Ok(report);
        }
        if !report.notes.iter().any(|s| s == REENTRY_NOTE) {
            report.notes.push(REENTRY_NOTE.into());
        }
        w = w.interior(&tangent)?;
        k_deg -= 1;
    }
}

fn state_step(
    rel: &EvolutionaryRelation,
    ps: &Pseudostructure,
    cfg: &CascadeConfig,
    sc: &Scan,
    n: usize,
) -> Result<CascadeStep> {
    let mut samples = Vec::new();
    let mut defect = 0.0_f64;
    for tr in ps.traces.iter().filter(|t| t.integrable) {
        let single = Pseudostructure {
            traces: vec![tr.clone()],
            seeds: vec![tr.points[0].clone()],
            ..ps.clone()
        };
        let rec = recover_state_function(rel, &single, &tr.points[0], cfg.tol)?;
        defect = defect.max(rec.loop_defect);
        samples.extend(rec.samples);
    }
    let mut residual = defect;
    let mut realized = defect < cfg.tol;
    if rel.psi.is_some() {
        let v = identical_on_pseudostructure(rel, ps, cfg.tol)?;
        residual = residual.max(v.residual);
        realized &= v.identical;
    }
    Ok(CascadeStep {
        realized,
        traced_dim: 0,
        traces: ps.traces.iter().filter(|t| t.integrable).count(),
        integrable: ps.integrable,
        max_residual: residual,
        loop_defect: Some(defect),
        state_function_samples: Some(samples),
        locus_size: ps.traces.iter().map(|t| t.points.len()).sum(),
        excess_locus_size: sc.excess,
        ..empty_step(0, n, sc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{build_relation, BalanceSystem};
    use crate::field::ScalarField;

    fn rel(c: &Arc<Chart>, a: &[&str]) -> EvolutionaryRelation {
        let f = |t: &str| ScalarField::parse(t, c.clone()).unwrap();
        build_relation(&BalanceSystem::first_degree(
            c.clone(),
            f(a[0]),
            a[1..].iter().map(|t| f(t)).collect(),
        ))
        .unwrap()
    }

    #[test]
    fn exact_form_cascade() {
        let c = Arc::new(Chart::unit_box(2, 6).unwrap());
        let r = rel(&c, &["x2", "x1"]);
        let rep = cascade_integrate(&r, &CascadeConfig::default()).unwrap();
        assert_eq!(rep.outcome, CascadeOutcome::Completed);
        assert_eq!(rep.steps.len(), 2);
        assert_eq!(rep.steps[0].k, 1);
        assert_eq!(rep.steps[0].locus_size, 36);
        assert_eq!(rep.steps[1].k, 0);
        assert!(rep.steps[1].realized);
        assert!(rep.dimension_law_holds());
    }

    #[test]
    fn shear_cascade_traces_e3_lines() {
        let c = Arc::new(Chart::unit_box(3, 5).unwrap());
        let r = rel(&c, &["x2", "0", "0"]);
        let cfg = CascadeConfig {
            seeds: vec![vec![0.2, 0.3, 0.0], vec![0.6, 0.9, 0.0]],
            ..CascadeConfig::default()
        };
        let rep = cascade_integrate(&r, &cfg).unwrap();
        assert_eq!(rep.outcome, CascadeOutcome::Completed);
        let ps = &rep.pseudostructures[0];
        assert_eq!(ps.traces.len(), 2);
        for tr in &ps.traces {
            let (a, b) = (&tr.points[0], tr.points.last().unwrap());
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
            assert!((b[2] - 1.0).abs() < 1e-9);
        }
        // ω restricted to an e3-line vanishes, so ψ is constant there
        let samples = rep.steps[1].state_function_samples.as_ref().unwrap();
        assert!(samples.iter().all(|s| s.value.abs() < 1e-12));
        assert_eq!(rep.steps[0].pseudostructure_dim, 3);
        assert!(rep.dimension_law_holds());
    }

    #[test]
    fn nonsingular_commutator_has_no_realization() {
        let c = Arc::new(Chart::unit_box(2, 5).unwrap());
        let r = rel(&c, &["x2", "0"]);
        let rep = cascade_integrate(&r, &CascadeConfig::default()).unwrap();
        assert_eq!(rep.outcome, CascadeOutcome::NoRealization);
        assert_eq!(rep.steps.len(), 1);
        assert!(rep.dimension_law_holds());
    }
}
