//! The analysis report document and its JSON / text renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use evoform_core::{
    CascadeOutcome, CascadeStep, ClassificationRecord, ClosureReport, PoincareReport, VerdictRecord,
};
use serde::Serialize;

use crate::error::CliError;
use crate::scenario::Tolerances;

pub const REPORT_VERSION: u32 = 1;
pub const TOOL: &str = "evoform";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(CliError::Argument(format!(
                "unknown format `{other}` (expected json or text)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub scenario: String,
    pub kind: &'static str,
    pub seed: Option<u64>,
    pub tol: Tolerances,
    pub dimension: usize,
    pub degree: Option<usize>,
    pub verdict: Option<VerdictRecord>,
    pub closure: Option<ClosureSection>,
    pub poincare: Option<PoincareSection>,
    pub cascade: CascadeSection,
    pub classifications: Vec<ClassificationRecord>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentResidual {
    /// 1-based multi-index of a component of the exterior derivative.
    pub indices: Vec<usize>,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureCheck {
    pub degree: usize,
    #[serde(flatten)]
    pub report: ClosureReport,
    pub components: Vec<ComponentResidual>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompanionCheck {
    pub label: &'static str,
    pub convention: &'static str,
    #[serde(flatten)]
    pub check: ClosureCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureSection {
    #[serde(flatten)]
    pub primary: ClosureCheck,
    pub companion: Option<CompanionCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareSection {
    pub passed: bool,
    pub tol: f64,
    #[serde(flatten)]
    pub report: PoincareReport,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CascadeSection {
    pub outcome: Option<CascadeOutcome>,
    pub notes: Vec<String>,
    pub steps: Vec<CascadeStep>,
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text(report),
    }
}

fn g(x: f64) -> String {
    format!("{x:.3e}")
}

fn point(p: &Option<Vec<f64>>) -> String {
    match p {
        None => "-".into(),
        Some(p) => {
            let parts: Vec<String> = p.iter().map(|x| format!("{x:.4}")).collect();
            format!("({})", parts.join(", "))
        }
    }
}

fn closure_lines(out: &mut String, head: &str, c: &ClosureCheck) {
    let r = &c.report;
    let _ = writeln!(
        out,
        "{head}: {} (degree {}, max |d| = {} at {}, {} samples, tol {})",
        if r.closed { "closed" } else { "not closed" },
        c.degree,
        g(r.max_residual),
        point(&r.argmax),
        r.samples,
        g(r.tol)
    );
    for comp in &c.components {
        let idx: Vec<String> = comp.indices.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "  d[{}] max {}", idx.join(","), g(comp.max_abs));
    }
}

fn text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {} ({}), n = {}",
        r.scenario, r.kind, r.dimension
    );
    if let Some(p) = r.degree {
        let _ = writeln!(out, "form degree {p}");
    }
    if let Some(s) = r.seed {
        let _ = writeln!(out, "seed {s}");
    }
    if let Some(v) = &r.verdict {
        let _ = writeln!(
            out,
            "verdict {}: max residual {} at {}, mean {}, {} samples, tol {}",
            v.verdict.as_str(),
            g(v.max_residual),
            point(&v.argmax_point),
            g(v.mean_residual),
            v.samples,
            g(v.tol)
        );
        if let Some(n) = &v.note {
            let _ = writeln!(out, "  note: {n}");
        }
    }
    if let Some(c) = &r.closure {
        closure_lines(&mut out, "closure", &c.primary);
        if let Some(comp) = &c.companion {
            closure_lines(&mut out, comp.label, &comp.check);
            let _ = writeln!(out, "  convention: {}", comp.convention);
        }
    }
    if let Some(p) = &r.poincare {
        let _ = writeln!(
            out,
            "poincare {}: action residual {}, null residual {}, energy drift {}, {} steps of {}",
            if p.passed { "PASS" } else { "FAIL" },
            g(p.report.action_residual),
            g(p.report.null_residual),
            g(p.report.energy_drift),
            p.report.steps,
            g(p.report.step)
        );
    }
    if let Some(o) = r.cascade.outcome {
        let name = serde_json::to_value(o).expect("outcome serializes");
        let _ = writeln!(out, "cascade {}", name.as_str().unwrap_or("?"));
        for s in &r.cascade.steps {
            let _ = writeln!(
                out,
                "  k = {}: {} (dim {}, traces {}, locus {}, residual {})",
                s.k,
                if s.realized {
                    "realized"
                } else {
                    "not realized"
                },
                s.pseudostructure_dim,
                s.traces,
                s.locus_size,
                g(s.max_residual)
            );
        }
        for n in &r.cascade.notes {
            let _ = writeln!(out, "  note: {n}");
        }
    }
    for c in &r.classifications {
        let name = c
            .structure
            .as_ref()
            .map(|e| e.name.as_str())
            .unwrap_or("(none)");
        let sources: Vec<&str> = c.sources.iter().map(|e| e.name.as_str()).collect();
        let _ = writeln!(
            out,
            "class p={} k={} n={}: {} {} [{}] dim {}",
            c.p,
            c.k,
            c.n,
            c.interaction,
            name,
            sources.join(", "),
            c.pseudostructure_dim
        );
    }
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

/// One classification record as a document of its own.
pub fn emit_record(rec: &ClassificationRecord, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rec).expect("record serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "p = {}, k = {}, n = {}", rec.p, rec.k, rec.n);
            let _ = writeln!(out, "interaction: {}", rec.interaction);
            match &rec.structure {
                Some(s) => {
                    let _ = writeln!(out, "structure: {}", s.name);
                }
                None => {
                    let _ = writeln!(out, "structure: NO-STRUCTURE");
                }
            }
            let sources: Vec<&str> = rec.sources.iter().map(|e| e.name.as_str()).collect();
            let _ = writeln!(out, "sources: {}", sources.join(", "));
            let _ = writeln!(out, "uncertain: {}", rec.uncertain);
            let _ = writeln!(out, "material particle: {}", rec.material_particle.name);
            let _ = writeln!(out, "metric dimension: {}", rec.metric_dimension.label);
            let _ = writeln!(
                out,
                "pseudostructure dimension: {}",
                rec.pseudostructure_dim
            );
            out
        }
    }
}
