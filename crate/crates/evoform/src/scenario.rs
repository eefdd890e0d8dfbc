//! Scenario files: JSON description of a chart, a balance system or form,
//! tolerances, sampling and cascade settings.
//!
//! All indices in the file are 1-based. Coefficients are either expression
//! strings or `{"grid": "file.csv"}` references resolved relative to the
//! scenario file.

use std::sync::Arc;

use evoform_core::chart::Interval;
use evoform_core::{
    BalanceCoefficients, BalanceSystem, CascadeConfig, Chart, Connection, DifferentialForm,
    HamiltonianSystem, PoincareConfig, SamplePlan, ScalarField, StateFunction, StateLabel,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::gridcsv;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_RESOLUTION: usize = 11;
pub const ANALYTIC_CLOSURE_TOL: f64 = 1e-9;
pub const GRID_CLOSURE_TOL: f64 = 1e-4;
pub const DEFAULT_POINCARE_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub kind: Kind,
    pub chart: ChartSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub balance: Option<BalanceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<FormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianSpec>,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_plan: Option<PlanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cascade: Option<CascadeSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Balance,
    Closure,
    Poincare,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Balance => "balance",
            Kind::Closure => "closure",
            Kind::Poincare => "poincare",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub domain: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Resolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Expr(String),
    Grid(GridRef),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRef {
    pub grid: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    pub entries: Vec<ConnectionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionEntry {
    pub sigma: usize,
    pub beta: usize,
    pub alpha: usize,
    pub coeff: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceSpec {
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<Vec<Coefficient>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<FormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub degree: usize,
    #[serde(default)]
    pub entries: Vec<FormEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormEntry {
    pub indices: Vec<usize>,
    pub coeff: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<FormSpec>,
    #[serde(default = "default_label")]
    pub label: StateLabel,
}

fn default_label() -> StateLabel {
    StateLabel::Other
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    pub expr: String,
    pub dof: usize,
    pub q0: Vec<f64>,
    pub p0: Vec<f64>,
    #[serde(default)]
    pub t0: f64,
    pub duration: f64,
    pub step: f64,
    #[serde(default = "one")]
    pub record_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub null: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poincare: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PlanSpec {
    Grid {
        #[serde(default)]
        counts: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        margin: Option<f64>,
    },
    Random {
        count: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        margin: Option<f64>,
    },
    Points(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_length: Option<f64>,
    #[serde(default)]
    pub seeds: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSpec>,
}

/// Parse scenario text, locating errors by JSON pointer.
pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = to_pointer(&e.path().to_string());
        CliError::schema(pointer, e.inner())
    })?;
    if sc.schema_version != SCHEMA_VERSION {
        return Err(CliError::schema(
            "/schema_version",
            format!(
                "unsupported version {}, expected {SCHEMA_VERSION}",
                sc.schema_version
            ),
        ));
    }
    Ok(sc)
}

/// `a.b[2].c` → `/a/b/2/c`.
fn to_pointer(path: &str) -> String {
    if path == "." || path.is_empty() {
        return String::new();
    }
    let mut out = String::new();
    for seg in path.split('.') {
        let (head, rest) = seg.split_once('[').unwrap_or((seg, ""));
        if !head.is_empty() {
            out.push('/');
            out.push_str(&head.replace('~', "~0").replace('/', "~1"));
        }
        for idx in rest.split('[') {
            let idx = idx.trim_end_matches(']');
            if !idx.is_empty() {
                out.push('/');
                out.push_str(idx);
            }
        }
    }
    out
}

/// Loads grid CSV text by reference name.
pub trait GridSource {
    fn load(&self, reference: &str) -> Result<String, CliError>;
}

/// Grid files on disk, relative to a base directory.
pub struct DirSource(pub std::path::PathBuf);

impl GridSource for DirSource {
    fn load(&self, reference: &str) -> Result<String, CliError> {
        let path = self.0.join(reference);
        std::fs::read_to_string(&path).map_err(|e| CliError::NotFound {
            path,
            reason: e.to_string(),
        })
    }
}

/// Effective tolerances after defaults and overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub closure: f64,
    pub null: f64,
    pub poincare: f64,
}

/// A scenario with every reference resolved into core objects.
pub struct Resolved {
    pub scenario: Scenario,
    pub chart: Arc<Chart>,
    pub uses_grid: bool,
    pub tol: Tolerances,
    pub plan: SamplePlan,
    pub seed: Option<u64>,
    pub balance: Option<BalanceSystem>,
    pub form: Option<DifferentialForm>,
    pub hamiltonian: Option<(HamiltonianSystem, PoincareConfig)>,
    pub cascade: CascadeConfig,
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

struct Ctx<'a> {
    chart: Arc<Chart>,
    grids: &'a dyn GridSource,
    uses_grid: bool,
    max_cell: f64,
}

impl Ctx<'_> {
    fn coeff(&mut self, c: &Coefficient, at: &str) -> Result<ScalarField, CliError> {
        match c {
            Coefficient::Expr(text) => {
                ScalarField::parse(text, self.chart.clone()).map_err(|e| CliError::schema(at, e))
            }
            Coefficient::Grid(g) => {
                let text = self.grids.load(&g.grid)?;
                let samples = gridcsv::read_grid(text.as_bytes(), &self.chart)
                    .map_err(|e| CliError::schema(at, format!("{}: {e}", g.grid)))?;
                for a in 0..samples.dimension() {
                    self.max_cell = self.max_cell.max(samples.cell_width(a));
                }
                self.uses_grid = true;
                ScalarField::from_grid(self.chart.clone(), samples)
                    .map_err(|e| CliError::schema(at, e))
            }
        }
    }

    fn axis(&self, i: usize, at: &str) -> Result<usize, CliError> {
        let n = self.chart.dimension();
        if i == 0 || i > n {
            return Err(CliError::schema(at, format!("index {i} outside 1..={n}")));
        }
        Ok(i - 1)
    }

    fn form(&mut self, f: &FormSpec, at: &str) -> Result<DifferentialForm, CliError> {
        let mut terms = Vec::new();
        for (i, e) in f.entries.iter().enumerate() {
            let here = format!("{at}/entries/{i}");
            if e.indices.len() != f.degree {
                return Err(CliError::schema(
                    format!("{here}/indices"),
                    format!("{} indices for a degree-{} form", e.indices.len(), f.degree),
                ));
            }
            let idx = e
                .indices
                .iter()
                .map(|&a| self.axis(a, &format!("{here}/indices")))
                .collect::<Result<Vec<_>, _>>()?;
            let c = self.coeff(&e.coeff, &format!("{here}/coeff"))?;
            terms.push((idx, c));
        }
        DifferentialForm::from_terms(self.chart.clone(), f.degree, terms)
            .map_err(|e| CliError::schema(at, e))
    }
}

fn build_chart(spec: &ChartSpec) -> Result<Chart, CliError> {
    let n = spec.dimension;
    if spec.domain.len() != n {
        return Err(CliError::schema(
            "/chart/domain",
            format!("{} intervals for dimension {n}", spec.domain.len()),
        ));
    }
    let bounds = spec
        .domain
        .iter()
        .enumerate()
        .map(|(i, [lo, hi])| {
            Interval::new(*lo, *hi).map_err(|e| CliError::schema(format!("/chart/domain/{i}"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let resolution = match &spec.resolution {
        None => vec![DEFAULT_RESOLUTION; n],
        Some(Resolution::Uniform(r)) => vec![*r; n],
        Some(Resolution::PerAxis(v)) => v.clone(),
    };
    let names = spec
        .names
        .clone()
        .unwrap_or_else(|| evoform_core::chart::default_names(n));
    Chart::new(names, bounds, resolution).map_err(|e| CliError::schema("/chart", e))
}

fn plan_of(spec: Option<&PlanSpec>, seed: Option<u64>, auto_margin: f64) -> SamplePlan {
    match spec {
        None => SamplePlan::random(DEFAULT_SAMPLES, seed.unwrap_or(0)).with_margin(auto_margin),
        Some(PlanSpec::Grid { counts, margin }) => SamplePlan::Grid {
            counts: counts.clone(),
            margin: margin.unwrap_or(auto_margin),
        },
        Some(PlanSpec::Random {
            count,
            seed: s,
            margin,
        }) => SamplePlan::Random {
            count: *count,
            seed: seed.unwrap_or(*s),
            margin: margin.unwrap_or(auto_margin),
        },
        Some(PlanSpec::Points(p)) => SamplePlan::Points(p.clone()),
    }
}

fn require<'a, T>(v: &'a Option<T>, at: &str, what: &str) -> Result<&'a T, CliError> {
    v.as_ref()
        .ok_or_else(|| CliError::schema(at, format!("missing `{what}`")))
}

/// Resolve a parsed scenario. Every reference and degree is checked here,
/// before any numerical work starts.
pub fn resolve(sc: Scenario, grids: &dyn GridSource, ov: Overrides) -> Result<Resolved, CliError> {
    let chart = Arc::new(build_chart(&sc.chart)?);
    let mut ctx = Ctx {
        chart: chart.clone(),
        grids,
        uses_grid: false,
        max_cell: 0.0,
    };

    let mut balance = None;
    let mut form = None;
    let mut hamiltonian = None;
    match sc.kind {
        Kind::Balance => {
            let b = require(&sc.balance, "/balance", "balance")?;
            let coefficients = match b.p {
                0 => BalanceCoefficients::Scalar(ctx.coeff(
                    require(&b.scalar, "/balance/scalar", "scalar")?,
                    "/balance/scalar",
                )?),
                1 => {
                    let energy = ctx.coeff(
                        require(&b.energy, "/balance/energy", "energy")?,
                        "/balance/energy",
                    )?;
                    let mom = require(&b.momentum, "/balance/momentum", "momentum")?;
                    if mom.len() + 1 != chart.dimension() {
                        return Err(CliError::schema(
                            "/balance/momentum",
                            format!(
                                "{} momentum coefficients, p = 1 on a {}-dimensional chart needs {}",
                                mom.len(),
                                chart.dimension(),
                                chart.dimension().saturating_sub(1)
                            ),
                        ));
                    }
                    let momentum = mom
                        .iter()
                        .enumerate()
                        .map(|(i, c)| ctx.coeff(c, &format!("/balance/momentum/{i}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    BalanceCoefficients::FirstDegree { energy, momentum }
                }
                p => {
                    let o = require(&b.omega, "/balance/omega", "omega")?;
                    if o.degree != p {
                        return Err(CliError::schema(
                            "/balance/omega/degree",
                            format!("degree {} but p = {p}", o.degree),
                        ));
                    }
                    BalanceCoefficients::Form(ctx.form(o, "/balance/omega")?)
                }
            };
            let connection = match &sc.connection {
                None => None,
                Some(c) => {
                    let mut entries = Vec::new();
                    for (i, e) in c.entries.iter().enumerate() {
                        let at = format!("/connection/entries/{i}");
                        let s = ctx.axis(e.sigma, &format!("{at}/sigma"))?;
                        let be = ctx.axis(e.beta, &format!("{at}/beta"))?;
                        let a = ctx.axis(e.alpha, &format!("{at}/alpha"))?;
                        entries.push(((s, be, a), ctx.coeff(&e.coeff, &format!("{at}/coeff"))?));
                    }
                    Some(
                        Connection::new(chart.clone(), entries)
                            .map_err(|e| CliError::schema("/connection", e))?,
                    )
                }
            };
            let psi = match &b.psi {
                None => None,
                Some(ps) => {
                    let f = match (&ps.expr, &ps.form) {
                        (Some(e), None) => {
                            DifferentialForm::scalar(ctx.coeff(e, "/balance/psi/expr")?)
                        }
                        (None, Some(f)) => ctx.form(f, "/balance/psi/form")?,
                        _ => {
                            return Err(CliError::schema(
                                "/balance/psi",
                                "exactly one of `expr` or `form` is required",
                            ))
                        }
                    };
                    Some(StateFunction {
                        form: f,
                        label: ps.label,
                    })
                }
            };
            let sys = BalanceSystem {
                chart: chart.clone(),
                degree: b.p,
                coefficients,
                connection,
                psi,
            };
            evoform_core::build_relation(&sys).map_err(|e| CliError::schema("/balance", e))?;
            balance = Some(sys);
        }
        Kind::Closure => {
            let f = require(&sc.form, "/form", "form")?;
            form = Some(ctx.form(f, "/form")?);
        }
        Kind::Poincare => {
            let h = require(&sc.hamiltonian, "/hamiltonian", "hamiltonian")?;
            let field = ScalarField::parse(&h.expr, chart.clone())
                .map_err(|e| CliError::schema("/hamiltonian/expr", e))?;
            let sys = HamiltonianSystem::new(chart.clone(), field, h.dof)
                .map_err(|e| CliError::schema("/hamiltonian/dof", e))?;
            if h.q0.len() != h.dof || h.p0.len() != h.dof {
                return Err(CliError::schema(
                    "/hamiltonian",
                    format!("q0 and p0 need {} entries each", h.dof),
                ));
            }
            if !(h.step > 0.0 && h.duration > 0.0) {
                return Err(CliError::schema(
                    "/hamiltonian",
                    "step and duration must be positive",
                ));
            }
            let cfg = PoincareConfig {
                t0: h.t0,
                q0: h.q0.clone(),
                p0: h.p0.clone(),
                duration: h.duration,
                step: h.step,
                record_every: h.record_every,
            };
            hamiltonian = Some((sys, cfg));
        }
    }

    let uses_grid = ctx.uses_grid;
    let closure_default = if uses_grid {
        GRID_CLOSURE_TOL
    } else {
        ANALYTIC_CLOSURE_TOL
    };
    let closure = ov.tol.or(sc.tolerances.closure).unwrap_or(closure_default);
    let tol = Tolerances {
        closure,
        null: sc.tolerances.null.unwrap_or(closure),
        poincare: sc.tolerances.poincare.unwrap_or(DEFAULT_POINCARE_TOL),
    };
    for (v, at) in [
        (tol.closure, "/tolerances/closure"),
        (tol.null, "/tolerances/null"),
        (tol.poincare, "/tolerances/poincare"),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::schema(
                at,
                format!("tolerance {v} must be positive"),
            ));
        }
    }
    let margin = 2.0 * ctx.max_cell;
    let plan = plan_of(sc.sample_plan.as_ref(), ov.seed, margin);
    let seed = plan.seed();
    let defaults = CascadeConfig::default();
    let cascade = match &sc.cascade {
        None => CascadeConfig {
            tol: tol.null,
            plan: SamplePlan::grid().with_margin(margin),
            ..defaults
        },
        Some(c) => {
            for (i, s) in c.seeds.iter().enumerate() {
                chart
                    .check_point(s)
                    .map_err(|e| CliError::schema(format!("/cascade/seeds/{i}"), e))?;
            }
            CascadeConfig {
                step: c.step.unwrap_or(defaults.step),
                max_length: c.max_length.unwrap_or(defaults.max_length),
                tol: tol.null,
                seeds: c.seeds.clone(),
                plan: match &c.plan {
                    Some(p) => plan_of(Some(p), ov.seed, margin),
                    None => SamplePlan::grid().with_margin(margin),
                },
            }
        }
    };
    Ok(Resolved {
        scenario: sc,
        chart,
        uses_grid,
        tol,
        plan,
        seed,
        balance,
        form,
        hamiltonian,
        cascade,
    })
}
