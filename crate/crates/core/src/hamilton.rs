//! Hamiltonian trajectories and the invariant `ds = −H dt + p_j dq_j`.
//!
//! The extended chart has coordinates `(t, q_1..q_d, p_1..p_d)`. Along a
//! solution of Hamilton's equations the action obeys
//! `ṡ = p·∂H/∂p − H`; integrating that alongside the trajectory and, in
//! parallel, integrating the 1-form `ω = −H dt + p dq` along the stored
//! trajectory must give the same number. The trajectory tangent
//! `(1, ∂H/∂p, −∂H/∂q)` is also the null direction of `dω`, which is
//! checked at every node.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use serde::Serialize;

use crate::chart::Chart;
use crate::degeneracy::quadrature::segment_integral;
use crate::error::Error;
use crate::exterior::{exterior_derivative, CommutatorField, DifferentialForm};
use crate::field::ScalarField;
use crate::Result;

#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    chart: Arc<Chart>,
    dof: usize,
    hamiltonian: ScalarField,
    dh_dq: Vec<ScalarField>,
    dh_dp: Vec<ScalarField>,
}

impl HamiltonianSystem {
    /// `chart` must have dimension `2·dof + 1`, axis 0 being time.
    pub fn new(chart: Arc<Chart>, hamiltonian: ScalarField, dof: usize) -> Result<Self> {
        if dof == 0 || chart.dimension() != 2 * dof + 1 {
            return Err(Error::InvalidChart(format!(
                "an extended phase space with {dof} degrees of freedom needs dimension {}",
                2 * dof + 1
            )));
        }
        let dh_dq = (1..=dof)
            .map(|a| hamiltonian.derivative(a))
            .collect::<Result<_>>()?;
        let dh_dp = (dof + 1..=2 * dof)
            .map(|a| hamiltonian.derivative(a))
            .collect::<Result<_>>()?;
        Ok(HamiltonianSystem {
            chart,
            dof,
            hamiltonian,
            dh_dq,
            dh_dp,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    /// `ω = −H dt + Σ p_j dq_j`.
    pub fn poincare_form(&self) -> Result<DifferentialForm> {
        let d = self.dof;
        let mut terms = vec![(vec![0], self.hamiltonian.neg())];
        for j in 0..d {
            terms.push((
                vec![1 + j],
                ScalarField::coordinate(self.chart.clone(), 1 + d + j)?,
            ));
        }
        DifferentialForm::from_terms(self.chart.clone(), 1, terms)
    }

    /// Extended-space velocity `(1, ∂H/∂p, −∂H/∂q)` at `x = (t, q, p)`.
    pub fn velocity(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(x.len());
        v.push(1.0);
        for f in &self.dh_dp {
            v.push(f.evaluate(x)?);
        }
        for f in &self.dh_dq {
            v.push(-f.evaluate(x)?);
        }
        Ok(v)
    }

    /// `ṡ = p·∂H/∂p − H`.
    fn action_rate(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        let d = self.dof;
        let pv: f64 = (0..d).map(|j| x[1 + d + j] * v[1 + j]).sum();
        Ok(pv - self.hamiltonian.evaluate(x)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoincareConfig {
    pub t0: f64,
    pub q0: Vec<f64>,
    pub p0: Vec<f64>,
    pub duration: f64,
    pub step: f64,
    /// Keep every n-th node in the reported trajectory.
    pub record_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryNode {
    pub t: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// Action from the integrated `ṡ`.
    pub s: f64,
    /// `∫ω` along the trajectory up to this node.
    pub line_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareReport {
    pub steps: usize,
    pub step: f64,
    /// `max |s − ∫ω|` over all nodes.
    pub action_residual: f64,
    /// `max |i_v dω|∞` over all nodes, `v` the trajectory tangent.
    pub null_residual: f64,
    pub energy_drift: f64,
    pub trajectory: Vec<TrajectoryNode>,
}

pub fn poincare_check(sys: &HamiltonianSystem, cfg: &PoincareConfig) -> Result<PoincareReport> {
    let d = sys.dof;
    if cfg.q0.len() != d || cfg.p0.len() != d {
        return Err(Error::InvalidTraceParameter(format!(
            "initial state needs {d} coordinates and {d} momenta"
        )));
    }
    if !(cfg.step > 0.0 && cfg.step.is_finite())
        || !(cfg.duration > 0.0 && cfg.duration.is_finite())
    {
        return Err(Error::InvalidTraceParameter(format!(
            "step {} / duration {}",
            cfg.step, cfg.duration
        )));
    }
    let omega = sys.poincare_form()?;
    let k = CommutatorField::from_form(exterior_derivative(&omega)?)?;
    let every = cfg.record_every.max(1);

    let mut x: Vec<f64> = vec![cfg.t0];
    x.extend_from_slice(&cfg.q0);
    x.extend_from_slice(&cfg.p0);
    sys.chart.check_point(&x)?;
    let mut s = 0.0;
    let mut line = 0.0;
    let mut v = sys.velocity(&x)?;
    let h0 = sys.hamiltonian.evaluate(&x)?;
    let mut action_residual = 0.0_f64;
    let mut null_residual = k.contraction_residual(&x, &v)?;
    let node = |x: &[f64], s: f64, line: f64| TrajectoryNode {
        t: x[0],
        q: x[1..=d].to_vec(),
        p: x[d + 1..].to_vec(),
        s,
        line_integral: line,
    };
    let mut trajectory = vec![node(&x, s, line)];
    let t_end = cfg.t0 + cfg.duration;
    let mut steps = 0;
    // rhs(y) for y = (t, q, p, s): (1, v(t,q,p), ṡ)
    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let x = &y[..2 * d + 1];
        let v = sys.velocity(x)?;
        let sd = sys.action_rate(x, &v)?;
        let mut out = v;
        out.push(sd);
        Ok(out)
    };
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> {
        y.iter().zip(k).map(|(u, w)| u + a * w).collect()
    };
    while x[0] < t_end {
        let h = cfg.step.min(t_end - x[0]);
        if h <= 0.0 {
            break;
        }
        let mut y = x.clone();
        y.push(s);
        let k1 = rhs(&y)?;
        let k2 = rhs(&axpy(&y, h / 2.0, &k1))?;
        let k3 = rhs(&axpy(&y, h / 2.0, &k2))?;
        let k4 = rhs(&axpy(&y, h, &k3))?;
        let mut next: Vec<f64> = (0..y.len())
            .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        if h < cfg.step {
            next[0] = t_end;
        }
        let s_next = next.pop().expect("state has an action slot");
        let v_next = sys.velocity(&next)?;
        line += segment_integral(&omega, &x, &v, &next, &v_next, h)?;
        x = next;
        v = v_next;
        s = s_next;
        steps += 1;
        action_residual = action_residual.max((s - line).abs());
        null_residual = null_residual.max(k.contraction_residual(&x, &v)?);
        if steps % every == 0 || x[0] >= t_end {
            trajectory.push(node(&x, s, line));
        }
    }
    let energy_drift = (sys.hamiltonian.evaluate(&x)? - h0).abs();
    Ok(PoincareReport {
        steps,
        step: cfg.step,
        action_residual,
        null_residual,
        energy_drift,
        trajectory,
    })
}
