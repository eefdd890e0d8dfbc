//! The commands behind the CLI, usable without a process boundary.

use std::path::{Path, PathBuf};

use evoform_core::exterior::{exterior_derivative, ClosureReport};
use evoform_core::{
    build_relation, cascade_integrate, classify as lookup, is_closed, nonidentity_verdict,
    poincare_check, ClassificationRecord, DifferentialForm, Pseudostructure, SamplePlan,
};
use serde::Serialize;

use crate::bundled::{self, BundledGrids};
use crate::error::CliError;
use crate::report::{
    CascadeSection, ClosureCheck, ClosureSection, CompanionCheck, ComponentResidual, Format,
    PoincareSection, Report, REPORT_VERSION, TOOL,
};
use crate::scenario::{self, DirSource, GridSource, Kind, Overrides, Resolved};

pub const DUAL_LABEL: &str = "^*theta^2";
pub const DUAL_CONVENTION: &str = "x4 = t; G14 = F23, G24 = -F13, G34 = F12, G23 = -F14, \
     G13 = F24, G12 = -F34";

/// A scenario found on disk, in the user directory or in the bundle.
pub struct Located {
    pub text: String,
    pub grids: Box<dyn GridSource>,
}

pub fn locate(arg: &str, scenario_dir: Option<&Path>) -> Result<Located, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        return from_file(path);
    }
    if let Some(dir) = scenario_dir {
        for cand in [dir.join(format!("{arg}.json")), dir.join(arg)] {
            if cand.is_file() {
                return from_file(&cand);
            }
        }
    }
    if let Some(text) = bundled::find(arg) {
        return Ok(Located {
            text: text.to_string(),
            grids: Box::new(BundledGrids),
        });
    }
    if arg.contains(std::path::MAIN_SEPARATOR) || arg.contains('/') || arg.ends_with(".json") {
        Err(CliError::NotFound {
            path: path.to_path_buf(),
            reason: "no such file".into(),
        })
    } else {
        Err(CliError::UnknownScenario { name: arg.into() })
    }
}

fn from_file(path: &Path) -> Result<Located, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::NotFound {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(Located {
        text,
        grids: Box::new(DirSource(base)),
    })
}

pub fn load(arg: &str, scenario_dir: Option<&Path>, ov: Overrides) -> Result<Resolved, CliError> {
    let loc = locate(arg, scenario_dir)?;
    let sc = scenario::parse(&loc.text)?;
    scenario::resolve(sc, loc.grids.as_ref(), ov)
}

/// Report plus the traced geometry, which only the trace export needs.
pub struct Analysis {
    pub report: Report,
    /// `(k, pseudostructure)` for every realized step of degree ≥ 1.
    pub pseudostructures: Vec<(usize, Pseudostructure)>,
}

fn skeleton(r: &Resolved) -> Report {
    Report {
        schema_version: REPORT_VERSION,
        tool: TOOL,
        scenario: r.scenario.name.clone(),
        kind: r.scenario.kind.as_str(),
        seed: r.seed,
        tol: r.tol,
        dimension: r.chart.dimension(),
        degree: None,
        verdict: None,
        closure: None,
        poincare: None,
        cascade: CascadeSection::default(),
        classifications: Vec::new(),
        notes: Vec::new(),
    }
}

pub fn analyze(r: &Resolved) -> Result<Analysis, CliError> {
    let mut report = skeleton(r);
    let mut pseudostructures = Vec::new();
    if r.uses_grid {
        report.notes.push(format!(
            "grid-backed coefficients: derivatives by central differences, samples kept {} from the boundary",
            margin_of(&r.plan)
        ));
    }
    match r.scenario.kind {
        Kind::Balance => {
            let sys = r.balance.as_ref().expect("resolved balance");
            let rel = build_relation(sys).map_err(CliError::numeric("evolution"))?;
            let p = rel.degree();
            report.degree = Some(p);
            report.verdict = Some(
                nonidentity_verdict(&rel, r.tol.closure, &r.plan)
                    .map_err(CliError::numeric("evolution"))?,
            );
            let cascade =
                cascade_integrate(&rel, &r.cascade).map_err(CliError::numeric("degeneracy"))?;
            let n = cascade.chart_dimension;
            let mut realized_ks: Vec<usize> = cascade
                .steps
                .iter()
                .filter(|s| s.realized)
                .map(|s| s.k)
                .collect();
            realized_ks.dedup();
            if n > evoform_core::classify::MAX_N && !realized_ks.is_empty() {
                report.notes.push(format!(
                    "classification skipped: the table covers n <= {}, chart has n = {n}",
                    evoform_core::classify::MAX_N
                ));
            } else {
                for k in realized_ks {
                    report
                        .classifications
                        .push(lookup(p, k, n).map_err(CliError::numeric("classify_report"))?);
                }
            }
            let ks = cascade
                .steps
                .iter()
                .filter(|s| s.realized && s.k >= 1)
                .map(|s| s.k);
            pseudostructures = ks.zip(cascade.pseudostructures).collect();
            report.cascade = CascadeSection {
                outcome: Some(cascade.outcome),
                notes: cascade.notes,
                steps: cascade.steps,
            };
        }
        Kind::Closure => {
            let form = r.form.as_ref().expect("resolved form");
            report.degree = Some(form.degree());
            report.closure = Some(closure_section(form, r.tol.closure, &r.plan)?);
        }
        Kind::Poincare => {
            let (sys, cfg) = r.hamiltonian.as_ref().expect("resolved hamiltonian");
            let pr = poincare_check(sys, cfg).map_err(CliError::numeric("hamilton"))?;
            report.degree = Some(1);
            report.poincare = Some(PoincareSection {
                passed: pr.action_residual < r.tol.poincare,
                tol: r.tol.poincare,
                report: pr,
            });
        }
    }
    Ok(Analysis {
        report,
        pseudostructures,
    })
}

/// Closure check of the scenario's form (or of ω for balance scenarios).
pub fn check_closure(r: &Resolved) -> Result<Report, CliError> {
    let mut report = skeleton(r);
    let form = match r.scenario.kind {
        Kind::Closure => r.form.clone().expect("resolved form"),
        Kind::Balance => {
            let sys = r.balance.as_ref().expect("resolved balance");
            build_relation(sys)
                .map_err(CliError::numeric("evolution"))?
                .omega
        }
        Kind::Poincare => {
            let (sys, _) = r.hamiltonian.as_ref().expect("resolved hamiltonian");
            sys.poincare_form().map_err(CliError::numeric("hamilton"))?
        }
    };
    report.degree = Some(form.degree());
    report.closure = Some(closure_section(&form, r.tol.closure, &r.plan)?);
    Ok(report)
}

fn margin_of(plan: &SamplePlan) -> f64 {
    match plan {
        SamplePlan::Grid { margin, .. } | SamplePlan::Random { margin, .. } => *margin,
        SamplePlan::Points(_) => 0.0,
    }
}

fn closure_check(
    w: &DifferentialForm,
    tol: f64,
    plan: &SamplePlan,
) -> Result<ClosureCheck, CliError> {
    let err = CliError::numeric("exterior");
    let report: ClosureReport = match is_closed(w, tol, plan) {
        Ok(r) => r,
        Err(e) => return Err(err(e)),
    };
    let mut components = Vec::new();
    if w.degree() < w.dimension() {
        let dw = exterior_derivative(w).map_err(CliError::numeric("exterior"))?;
        let points = plan
            .points(w.chart())
            .map_err(CliError::numeric("exterior"))?;
        for (idx, f) in dw.terms() {
            let mut m = 0.0_f64;
            for p in &points {
                m = m.max(f.evaluate(p).map_err(CliError::numeric("exterior"))?.abs());
            }
            components.push(ComponentResidual {
                indices: idx.as_slice().iter().map(|a| a + 1).collect(),
                max_abs: m,
            });
        }
    }
    Ok(ClosureCheck {
        degree: w.degree(),
        report,
        components,
    })
}

/// The complementary arrangement of a 2-form on a 4-D chart, `x4` being time.
pub fn dual_two_form(f: &DifferentialForm) -> Result<DifferentialForm, evoform_core::Error> {
    let c = |a: usize, b: usize| f.component(&[a, b]);
    let pairs: [((usize, usize), f64, (usize, usize)); 6] = [
        ((0, 3), 1.0, (1, 2)),
        ((1, 3), -1.0, (0, 2)),
        ((2, 3), 1.0, (0, 1)),
        ((1, 2), -1.0, (0, 3)),
        ((0, 2), 1.0, (1, 3)),
        ((0, 1), -1.0, (2, 3)),
    ];
    let mut terms = Vec::new();
    for ((a, b), s, (x, y)) in pairs {
        let v = c(x, y)?;
        if !v.is_zero() {
            terms.push((vec![a, b], v.scale(s)));
        }
    }
    DifferentialForm::from_terms(f.chart().clone(), 2, terms)
}

fn closure_section(
    w: &DifferentialForm,
    tol: f64,
    plan: &SamplePlan,
) -> Result<ClosureSection, CliError> {
    let primary = closure_check(w, tol, plan)?;
    let companion = if w.degree() == 2 && w.dimension() == 4 {
        let g = dual_two_form(w).map_err(CliError::numeric("exterior"))?;
        Some(CompanionCheck {
            label: DUAL_LABEL,
            convention: DUAL_CONVENTION,
            check: closure_check(&g, tol, plan)?,
        })
    } else {
        None
    };
    Ok(ClosureSection { primary, companion })
}

pub fn classify(p: i64, k: i64, n: i64) -> Result<ClassificationRecord, CliError> {
    let conv = |v: i64, name: &str| {
        usize::try_from(v).map_err(|_| {
            CliError::ClassifyRange(evoform_core::Error::ClassifyRange(format!(
                "{name} = {v} is negative"
            )))
        })
    };
    lookup(conv(p, "p")?, conv(k, "k")?, conv(n, "n")?).map_err(CliError::ClassifyRange)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioEntry {
    pub name: String,
    pub description: String,
    pub source: String,
}

/// Bundled scenarios, then every `*.json` of the user directory (sorted).
pub fn scenarios(scenario_dir: Option<&Path>) -> Result<Vec<ScenarioEntry>, CliError> {
    let mut out = Vec::new();
    for (_, text) in bundled::SCENARIOS {
        let sc = scenario::parse(text)?;
        out.push(ScenarioEntry {
            name: sc.name,
            description: sc.description,
            source: "bundled".into(),
        });
    }
    if let Some(dir) = scenario_dir {
        let rd = std::fs::read_dir(dir).map_err(|e| CliError::NotFound {
            path: dir.to_path_buf(),
            reason: e.to_string(),
        })?;
        let mut files: Vec<PathBuf> = rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json") && p.is_file())
            .collect();
        files.sort();
        for f in files {
            let text = std::fs::read_to_string(&f).map_err(|e| CliError::NotFound {
                path: f.clone(),
                reason: e.to_string(),
            })?;
            let stem = f
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            let (name, description) = match scenario::parse(&text) {
                Ok(sc) => (sc.name, sc.description),
                Err(e) => (stem, format!("invalid: {e}")),
            };
            out.push(ScenarioEntry {
                name,
                description,
                source: f.display().to_string(),
            });
        }
    }
    Ok(out)
}

pub fn render_scenarios(list: &[ScenarioEntry], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(list).expect("list serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let width = list.iter().map(|e| e.name.len()).max().unwrap_or(0);
            let mut s = String::new();
            for e in list {
                let tag = if e.source == "bundled" { "" } else { " (user)" };
                s.push_str(&format!("{:width$}  {}{tag}\n", e.name, e.description));
            }
            s
        }
    }
}

/// CSV of every traced node: step k, trace, node, arclength s, x1..xn.
pub fn write_traces<W: std::io::Write>(
    out: W,
    pseudostructures: &[(usize, Pseudostructure)],
    n: usize,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k".to_string(), "trace".into(), "node".into(), "s".into()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (k, ps) in pseudostructures {
        for (ti, tr) in ps.traces.iter().enumerate() {
            for (ni, (pt, s)) in tr.points.iter().zip(&tr.arclength).enumerate() {
                let mut rec = vec![
                    k.to_string(),
                    (ti + 1).to_string(),
                    (ni + 1).to_string(),
                    s.to_string(),
                ];
                rec.extend(pt.iter().map(|x| x.to_string()));
                w.write_record(&rec)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use evoform_core::{Chart, ScalarField};
    use std::sync::Arc;

    #[test]
    fn dual_of_plane_wave_matches_convention() {
        let c = Arc::new(Chart::unit_box(4, 3).unwrap());
        let f = |t: &str| ScalarField::parse(t, c.clone()).unwrap();
        let w = DifferentialForm::from_terms(
            c.clone(),
            2,
            vec![(vec![0, 1], f("x1")), (vec![1, 3], f("x2"))],
        )
        .unwrap();
        let g = dual_two_form(&w).unwrap();
        // F12 = x1 → G34 = x1; F24 = x2 → G13 = x2.
        assert_eq!(g.component(&[2, 3]).unwrap(), f("x1"));
        assert_eq!(g.component(&[0, 2]).unwrap(), f("x2"));
        assert_eq!(g.terms().count(), 2);
    }

    #[test]
    fn negative_classify_arguments_are_range_errors() {
        assert_eq!(classify(-1, 0, 0).unwrap_err().exit_code(), 5);
        assert_eq!(classify(1, 2, 2).unwrap_err().exit_code(), 5);
        assert_eq!(
            classify(2, 1, 2).unwrap().structure.unwrap().name,
            "neutrino2"
        );
    }

    #[test]
    fn unknown_names_and_missing_files() {
        assert_eq!(
            locate("no-such-scenario", None).err().unwrap().exit_code(),
            2
        );
        assert_eq!(
            locate("missing/file.json", None).err().unwrap().exit_code(),
            2
        );
        assert!(locate("shear-nonidentity", None).is_ok());
    }
}
