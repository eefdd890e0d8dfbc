use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use serde::Serialize;

use super::quadrature::{polyline_integrals, segment_integral};
use super::trace::{Pseudostructure, StopReason, Trace};
use crate::error::Error;
use crate::evolution::EvolutionaryRelation;
use crate::math;
use crate::Result;

/// Nodes closer than this (∞-norm) are treated as the same point when
/// joining traces and closing loops.
pub const NODE_MATCH: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSample {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateRecovery {
    /// ψ at every node of every trace, trace by trace.
    pub samples: Vec<StateSample>,
    /// Largest `|∮ω|` over closed paths found in the trace set.
    pub loop_defect: f64,
    pub loops_checked: usize,
    pub valid: bool,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// ψ is known; compared with `∫ω` segment by segment.
    KnownState,
    /// ψ unknown; ω checked for path independence on the traces.
    PathConsistency,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudostructureVerdict {
    pub identical: bool,
    pub residual: f64,
    pub mode: CheckMode,
    pub loops_checked: usize,
}

fn near(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= NODE_MATCH)
}

/// Traced curves use the Hermite pieces; given polylines are integrated
/// segment by segment along their chords, so corners stay sharp.
fn integrals(rel: &EvolutionaryRelation, tr: &Trace) -> Result<Vec<f64>> {
    if tr.stop != StopReason::Given {
        return polyline_integrals(&rel.omega, &tr.points, &tr.tangents, &tr.arclength);
    }
    tr.points
        .windows(2)
        .map(|w| {
            let d: Vec<f64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
            let len = math::norm(&d);
            if len == 0.0 {
                return Ok(0.0);
            }
            let t: Vec<f64> = d.iter().map(|x| x / len).collect();
            segment_integral(&rel.omega, &w[0], &t, &w[1], &t, len)
        })
        .collect()
}

/// ψ along a trace given its value `v` at node `anchor`.
fn propagate(seg: &[f64], anchor: usize, v: f64) -> Vec<f64> {
    let m = seg.len() + 1;
    let mut out = vec![0.0; m];
    out[anchor] = v;
    for i in (anchor + 1)..m {
        out[i] = out[i - 1] + seg[i - 1];
    }
    for i in (0..anchor).rev() {
        out[i] = out[i + 1] - seg[i];
    }
    out
}

/// ψ(x) = ∫_base^x ω along the traces, starting at the trace node that
/// coincides with `base` and spreading to traces that share a node with
/// an already reached one. Where two routes reach the same point, or a
/// trace closes on itself, the mismatch is a loop defect.
pub fn recover_state_function(
    rel: &EvolutionaryRelation,
    ps: &Pseudostructure,
    base: &[f64],
    tol: f64,
) -> Result<StateRecovery> {
    if rel.degree() != 1 {
        return Err(Error::UnsupportedDegree(rel.degree()));
    }
    let traces = &ps.traces;
    let start = traces
        .iter()
        .enumerate()
        .find_map(|(t, tr)| tr.points.iter().position(|p| near(p, base)).map(|i| (t, i)));
    let Some((t0, i0)) = start else {
        return Err(Error::Disconnected((0..traces.len()).collect()));
    };
    let segs: Vec<Vec<f64>> = traces
        .iter()
        .map(|tr| integrals(rel, tr))
        .collect::<Result<_>>()?;
    let mut values: Vec<Option<Vec<f64>>> = vec![None; traces.len()];
    // (trace, node) pairs used to enter each trace, to skip when counting loops
    let mut entry: Vec<Option<(usize, usize, usize)>> = vec![None; traces.len()];
    let mut queue = VecDeque::new();
    values[t0] = Some(propagate(&segs[t0], i0, 0.0));
    queue.push_back(t0);
    while let Some(a) = queue.pop_front() {
        for b in 0..traces.len() {
            if values[b].is_some() {
                continue;
            }
            let hit = traces[a].points.iter().enumerate().find_map(|(i, p)| {
                traces[b]
                    .points
                    .iter()
                    .position(|q| near(p, q))
                    .map(|j| (i, j))
            });
            if let Some((i, j)) = hit {
                let v = values[a].as_ref().map(|vals| vals[i]).unwrap_or(0.0);
                values[b] = Some(propagate(&segs[b], j, v));
                entry[b] = Some((a, i, j));
                queue.push_back(b);
            }
        }
    }
    let unreached: Vec<usize> = (0..traces.len()).filter(|&t| values[t].is_none()).collect();
    if !unreached.is_empty() {
        return Err(Error::Disconnected(unreached));
    }
    let values: Vec<Vec<f64>> = values.into_iter().flatten().collect();

    let mut defect = 0.0_f64;
    let mut loops = 0;
    for (t, tr) in traces.iter().enumerate() {
        let m = tr.points.len();
        if m > 2 && tr.length() > 0.0 && near(&tr.points[0], &tr.points[m - 1]) {
            defect = defect.max((values[t][m - 1] - values[t][0]).abs());
            loops += 1;
        }
    }
    for a in 0..traces.len() {
        for b in (a + 1)..traces.len() {
            for (i, p) in traces[a].points.iter().enumerate() {
                for (j, q) in traces[b].points.iter().enumerate() {
                    if !near(p, q) || entry[b] == Some((a, i, j)) {
                        continue;
                    }
                    defect = defect.max((values[a][i] - values[b][j]).abs());
                    loops += 1;
                }
            }
        }
    }
    let samples = traces
        .iter()
        .zip(&values)
        .flat_map(|(tr, vals)| {
            tr.points.iter().zip(vals).map(|(p, v)| StateSample {
                point: p.clone(),
                value: *v,
            })
        })
        .collect();
    Ok(StateRecovery {
        samples,
        loop_defect: defect,
        loops_checked: loops,
        valid: defect < tol,
        tol,
    })
}

/// Does `dψ = ω` hold along the pseudostructure? With ψ known the
/// residual is `Σ |Δψ − ∫ω|` over all trace segments; otherwise it is the
/// loop defect of recovering ψ from ω on the traces.
pub fn identical_on_pseudostructure(
    rel: &EvolutionaryRelation,
    ps: &Pseudostructure,
    tol: f64,
) -> Result<PseudostructureVerdict> {
    if rel.degree() != 1 {
        return Err(Error::UnsupportedDegree(rel.degree()));
    }
    if let Some(psi) = &rel.psi {
        let f = psi.form.component(&[])?;
        let mut residual = 0.0;
        for tr in &ps.traces {
            let seg = integrals(rel, tr)?;
            for (i, s) in seg.iter().enumerate() {
                let dpsi = f.evaluate(&tr.points[i + 1])? - f.evaluate(&tr.points[i])?;
                residual += (dpsi - s).abs();
            }
        }
        return Ok(PseudostructureVerdict {
            identical: residual < tol,
            residual,
            mode: CheckMode::KnownState,
            loops_checked: 0,
        });
    }
    let mut residual = 0.0_f64;
    let mut loops = 0;
    let base = ps
        .seeds
        .first()
        .or_else(|| ps.traces.first().map(|t| &t.points[0]));
    let joint = match base {
        Some(b) => recover_state_function(rel, ps, b, tol),
        None => Err(Error::Disconnected(Vec::new())),
    };
    match joint {
        Ok(r) => {
            residual = r.loop_defect;
            loops = r.loops_checked;
        }
        Err(Error::Disconnected(_)) => {
            for tr in &ps.traces {
                let single = Pseudostructure {
                    traces: vec![tr.clone()],
                    seeds: vec![tr.points[0].clone()],
                    ..ps.clone()
                };
                let r = recover_state_function(rel, &single, &tr.points[0], tol)?;
                residual = math_max(residual, r.loop_defect);
                loops += r.loops_checked;
            }
        }
        Err(e) => return Err(e),
    }
    Ok(PseudostructureVerdict {
        identical: residual < tol,
        residual,
        mode: CheckMode::PathConsistency,
        loops_checked: loops,
    })
}

fn math_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
