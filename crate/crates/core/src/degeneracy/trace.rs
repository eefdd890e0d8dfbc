use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use serde::Serialize;

use crate::chart::Chart;
use crate::error::Error;
use crate::exterior::CommutatorField;
use crate::linalg;
use crate::math;
use crate::Result;

/// Consecutive tangents further apart than this break integrability.
pub const MAX_TURN_DEGREES: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceParams {
    pub step: f64,
    pub max_length: f64,
    pub tol: f64,
}

impl TraceParams {
    pub fn new(step: f64, max_length: f64, tol: f64) -> Self {
        TraceParams {
            step,
            max_length,
            tol,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.step) {
            return Err(Error::InvalidTraceParameter(format!("step {}", self.step)));
        }
        if !ok(self.max_length) {
            return Err(Error::InvalidTraceParameter(format!(
                "max length {}",
                self.max_length
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidTraceParameter(format!("tol {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Boundary,
    LengthReached,
    NullDirectionLost,
    DirectionJump,
    /// User-supplied polyline, not traced.
    Given,
}

/// One traced curve: nodes, arc-length parameter and unit tangents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub points: Vec<Vec<f64>>,
    pub arclength: Vec<f64>,
    pub tangents: Vec<Vec<f64>>,
    /// `|i_t K|∞` at each node.
    pub residuals: Vec<f64>,
    pub stop: StopReason,
    pub integrable: bool,
}

impl Trace {
    pub fn length(&self) -> f64 {
        self.arclength.last().copied().unwrap_or(0.0)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0_f64, |m, r| m.max(*r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pseudostructure {
    pub chart: Arc<Chart>,
    /// Null dimension at the first seed.
    pub dimension: usize,
    pub seeds: Vec<Vec<f64>>,
    pub traces: Vec<Trace>,
    pub max_residual: f64,
    pub integrable: bool,
}

impl Pseudostructure {
    /// Wrap user polylines (e.g. a restricted line) without tracing.
    /// Tangents come from central differences of the nodes.
    pub fn from_curves(chart: Arc<Chart>, curves: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let mut traces = Vec::with_capacity(curves.len());
        let mut seeds = Vec::new();
        for pts in curves {
            if pts.len() < 2 {
                return Err(Error::InvalidTraceParameter(
                    "a curve needs at least two points".into(),
                ));
            }
            for p in &pts {
                chart.check_point(p)?;
            }
            let m = pts.len();
            let mut arclength = Vec::with_capacity(m);
            let mut s = 0.0;
            arclength.push(0.0);
            for w in pts.windows(2) {
                s += math::norm(&sub(&w[1], &w[0]));
                arclength.push(s);
            }
            let tangents = (0..m)
                .map(|i| {
                    let (a, b) = (i.saturating_sub(1), (i + 1).min(m - 1));
                    unit(&sub(&pts[b], &pts[a]))
                })
                .collect();
            seeds.push(pts[0].clone());
            traces.push(Trace {
                residuals: alloc::vec![0.0; m],
                points: pts,
                arclength,
                tangents,
                stop: StopReason::Given,
                integrable: true,
            });
        }
        Ok(Pseudostructure {
            chart,
            dimension: 1,
            seeds,
            traces,
            max_residual: 0.0,
            integrable: true,
        })
    }

    pub fn merge(&mut self, other: Pseudostructure) {
        self.seeds.extend(other.seeds);
        self.traces.extend(other.traces);
        self.max_residual = self.max_residual.max(other.max_residual);
        self.integrable &= other.integrable;
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = math::norm(v);
    if n == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / n).collect()
}

enum Probe {
    Dir(Vec<f64>),
    Outside,
    Lost,
}

/// Null direction at `x` closest to `prev`: the normalised projection of
/// `prev` onto the null space, or the first canonical basis vector when
/// the projection is negligible, oriented to agree with `prev`.
fn direction(k: &CommutatorField, x: &[f64], prev: &[f64], tol: f64) -> Result<Probe> {
    if !k.chart().contains(x) {
        return Ok(Probe::Outside);
    }
    let basis = linalg::null_space(&k.contraction_matrix(x)?, tol);
    if basis.is_empty() {
        return Ok(Probe::Lost);
    }
    let mut proj = alloc::vec![0.0; x.len()];
    for b in &basis {
        let c = math::dot(prev, b);
        for (p, bi) in proj.iter_mut().zip(b) {
            *p += c * bi;
        }
    }
    let mut d = if math::norm(&proj) > 1e-6 {
        unit(&proj)
    } else {
        basis[0].clone()
    };
    if math::dot(&d, prev) < 0.0 {
        d.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(Probe::Dir(d))
}

/// Integral curve of the (re-oriented) null direction field of `k` from
/// `seed`, classical RK4 with fixed step, the last step shortened so the
/// curve ends exactly at `max_length` when nothing stops it earlier.
pub fn trace_pseudostructure(
    k: &CommutatorField,
    seed: &[f64],
    params: TraceParams,
) -> Result<Pseudostructure> {
    params.validate()?;
    k.chart().check_point(seed)?;
    let basis = linalg::null_space(&k.contraction_matrix(seed)?, params.tol);
    if basis.is_empty() {
        return Err(Error::NoNullDirection);
    }
    let dimension = basis.len();
    let mut t = basis[0].clone();
    let mut x = seed.to_vec();
    let mut s = 0.0;
    let residual = |x: &[f64], t: &[f64]| k.contraction_residual(x, t);
    let mut trace = Trace {
        points: alloc::vec![x.clone()],
        arclength: alloc::vec![0.0],
        tangents: alloc::vec![t.clone()],
        residuals: alloc::vec![residual(&x, &t)?],
        stop: StopReason::LengthReached,
        integrable: true,
    };
    let cos_max = math::cos(MAX_TURN_DEGREES.to_radians());
    let stage = |y: &[f64], d: &[f64], c: f64| -> Vec<f64> {
        y.iter().zip(d).map(|(a, b)| a + c * b).collect()
    };
    while s < params.max_length {
        let h = params.step.min(params.max_length - s);
        let mut ks: Vec<Vec<f64>> = Vec::with_capacity(4);
        let mut stop = None;
        for (i, c) in [0.0, 0.5, 0.5, 1.0].into_iter().enumerate() {
            let y = if i == 0 {
                x.clone()
            } else {
                stage(&x, &ks[i - 1], c * h)
            };
            match direction(k, &y, &t, params.tol)? {
                Probe::Dir(d) => ks.push(d),
                Probe::Outside => {
                    stop = Some(StopReason::Boundary);
                    break;
                }
                Probe::Lost => {
                    stop = Some(StopReason::NullDirectionLost);
                    break;
                }
            }
        }
        if let Some(reason) = stop {
            trace.stop = reason;
            break;
        }
        let next: Vec<f64> = (0..x.len())
            .map(|j| x[j] + h / 6.0 * (ks[0][j] + 2.0 * ks[1][j] + 2.0 * ks[2][j] + ks[3][j]))
            .collect();
        let nt = match direction(k, &next, &t, params.tol)? {
            Probe::Dir(d) => d,
            Probe::Outside => {
                trace.stop = StopReason::Boundary;
                break;
            }
            Probe::Lost => {
                trace.stop = StopReason::NullDirectionLost;
                break;
            }
        };
        if math::dot(&nt, &t) < cos_max {
            trace.stop = StopReason::DirectionJump;
            trace.integrable = false;
            break;
        }
        s = if h < params.step {
            params.max_length
        } else {
            s + h
        };
        trace.residuals.push(residual(&next, &nt)?);
        trace.points.push(next.clone());
        trace.arclength.push(s);
        trace.tangents.push(nt.clone());
        x = next;
        t = nt;
    }
    Ok(Pseudostructure {
        chart: k.chart().clone(),
        dimension,
        seeds: alloc::vec![seed.to_vec()],
        max_residual: trace.max_residual(),
        integrable: trace.integrable,
        traces: alloc::vec![trace],
    })
}
