//! Evolutionary relations `dψ = ω^p` assembled from balance-law
//! coefficients, and the identity/nonidentity verdict.
//!
//! Axis 0 of the chart is the trajectory coordinate; axes `1..n` are the
//! normal directions of the accompanying frame.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};
use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::connection::{covariant_commutator, Connection};
use crate::error::Error;
use crate::exterior::{
    exterior_derivative, flat_commutator, plan_points, CommutatorField, DifferentialForm,
};
use crate::field::{same_chart, ScalarField};
use crate::sample::SamplePlan;
use crate::Result;

/// Highest supported evolutionary-form degree.
pub const MAX_DEGREE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLabel {
    Action,
    Entropy,
    WaveFunction,
    Other,
}

/// A (candidate or known) state function with what it stands for.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFunction {
    pub form: DifferentialForm,
    pub label: StateLabel,
}

impl StateFunction {
    pub fn scalar(field: ScalarField, label: StateLabel) -> Self {
        StateFunction {
            form: DifferentialForm::scalar(field),
            label,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BalanceCoefficients {
    /// p = 0: a single 0-form.
    Scalar(ScalarField),
    /// p = 1: energy coefficient `A_1` and momentum coefficients `A_2..A_n`.
    FirstDegree {
        energy: ScalarField,
        momentum: Vec<ScalarField>,
    },
    /// p ≥ 2: the coefficient table of `ω^p` itself.
    Form(DifferentialForm),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceSystem {
    pub chart: Arc<Chart>,
    pub degree: usize,
    pub coefficients: BalanceCoefficients,
    pub connection: Option<Connection>,
    pub psi: Option<StateFunction>,
}

impl BalanceSystem {
    /// p = 1 system without connection or state function.
    pub fn first_degree(
        chart: Arc<Chart>,
        energy: ScalarField,
        momentum: Vec<ScalarField>,
    ) -> Self {
        BalanceSystem {
            chart,
            degree: 1,
            coefficients: BalanceCoefficients::FirstDegree { energy, momentum },
            connection: None,
            psi: None,
        }
    }

    pub fn with_connection(mut self, c: Connection) -> Self {
        self.connection = Some(c);
        self
    }

    pub fn with_psi(mut self, psi: StateFunction) -> Self {
        self.psi = Some(psi);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionaryRelation {
    pub omega: DifferentialForm,
    pub psi: Option<StateFunction>,
    pub connection: Option<Connection>,
}

impl EvolutionaryRelation {
    pub fn degree(&self) -> usize {
        self.omega.degree()
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.omega.chart()
    }

    /// Commutator of ω: covariant when a connection is attached (p = 1),
    /// flat for p = 1 otherwise, `dω` for p ≥ 2. `None` for p = 0 and for
    /// top-degree ω, where there is nothing to commute.
    pub fn commutator(&self) -> Result<Option<CommutatorField>> {
        let p = self.degree();
        if p == 0 || p >= self.omega.dimension() {
            return Ok(None);
        }
        if p == 1 {
            return Ok(Some(match &self.connection {
                Some(c) => covariant_commutator(&self.omega, c)?,
                None => flat_commutator(&self.omega)?,
            }));
        }
        Ok(Some(CommutatorField::from_form(exterior_derivative(
            &self.omega,
        )?)?))
    }
}

pub fn build_relation(sys: &BalanceSystem) -> Result<EvolutionaryRelation> {
    let n = sys.chart.dimension();
    let p = sys.degree;
    let bad = |msg: String| Err(Error::InvalidBalance(msg));
    if p > MAX_DEGREE || p > n {
        return bad(format!(
            "degree {p} not supported on a {n}-dimensional chart"
        ));
    }
    let omega = match (&sys.coefficients, p) {
        (BalanceCoefficients::Scalar(f), 0) => {
            check_chart(&sys.chart, f.chart())?;
            DifferentialForm::scalar(f.clone())
        }
        (BalanceCoefficients::FirstDegree { energy, momentum }, 1) => {
            if momentum.len() + 1 != n {
                return bad(format!(
                    "{} momentum coefficients given, chart needs {}",
                    momentum.len(),
                    n - 1
                ));
            }
            let mut coeffs = vec![energy.clone()];
            coeffs.extend(momentum.iter().cloned());
            for c in &coeffs {
                check_chart(&sys.chart, c.chart())?;
            }
            DifferentialForm::one_form(sys.chart.clone(), coeffs)?
        }
        (BalanceCoefficients::Form(w), p) if p >= 2 => {
            check_chart(&sys.chart, w.chart())?;
            if w.degree() != p {
                return bad(format!(
                    "coefficient table has degree {}, declared {p}",
                    w.degree()
                ));
            }
            w.clone()
        }
        _ => return bad(format!("coefficients do not match declared degree {p}")),
    };
    if let Some(c) = &sys.connection {
        check_chart(&sys.chart, c.chart())?;
        if p != 1 {
            return bad(format!("a connection applies to p = 1 only, declared {p}"));
        }
    }
    if let Some(psi) = &sys.psi {
        check_chart(&sys.chart, psi.form.chart())?;
        let want = p.saturating_sub(1);
        if psi.form.degree() != want {
            return bad(format!(
                "state function has degree {}, expected {want}",
                psi.form.degree()
            ));
        }
    }
    Ok(EvolutionaryRelation {
        omega,
        psi: sys.psi.clone(),
        connection: sys.connection.clone(),
    })
}

fn check_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<()> {
    if same_chart(a, b) {
        Ok(())
    } else {
        Err(Error::ChartMismatch)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "IDENTICAL")]
    Identical,
    #[serde(rename = "NONIDENTICAL")]
    Nonidentical,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Identical => "IDENTICAL",
            Verdict::Nonidentical => "NONIDENTICAL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRecord {
    pub verdict: Verdict,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub argmax_point: Option<Vec<f64>>,
    pub samples: usize,
    pub tol: f64,
    /// Largest commutator coefficient seen (absent for p = 0).
    pub commutator_max: Option<f64>,
    /// Largest `|ω − dψ|` coefficient seen (absent without ψ).
    pub state_max: Option<f64>,
    pub note: Option<String>,
}

/// Summary of `ω − dψ` (or `ω − ψ` for p = 0) over a sample plan.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSummary {
    pub residual: DifferentialForm,
    pub max: f64,
    pub mean: f64,
    pub argmax: Option<Vec<f64>>,
    pub samples: usize,
}

/// The residual form `ω − dψ` for a candidate ψ of degree `p − 1`
/// (for p = 0 the candidate is compared directly: `ω − ψ`).
pub fn state_residual_form(
    rel: &EvolutionaryRelation,
    candidate: &DifferentialForm,
) -> Result<DifferentialForm> {
    let p = rel.degree();
    let want = p.saturating_sub(1);
    if candidate.degree() != want {
        return Err(Error::WrongDegree {
            expected: want,
            got: candidate.degree(),
        });
    }
    if p == 0 {
        rel.omega.sub(candidate)
    } else {
        rel.omega.sub(&exterior_derivative(candidate)?)
    }
}

pub fn state_residual(
    rel: &EvolutionaryRelation,
    candidate: &DifferentialForm,
    plan: &SamplePlan,
) -> Result<ResidualSummary> {
    let residual = state_residual_form(rel, candidate)?;
    let points = plan.points(rel.chart())?;
    let (max, argmax, mean) = crate::exterior::sweep_max(&residual, &points)?;
    Ok(ResidualSummary {
        residual,
        max,
        mean,
        argmax,
        samples: points.len(),
    })
}

/// Sample-based verdict: IDENTICAL iff every commutator coefficient and,
/// when ψ is known, every coefficient of `ω − dψ` stays below `tol`.
pub fn nonidentity_verdict(
    rel: &EvolutionaryRelation,
    tol: f64,
    plan: &SamplePlan,
) -> Result<VerdictRecord> {
    let points = plan_points(rel.chart(), plan)?;
    let commutator = rel.commutator()?;
    let state = match &rel.psi {
        Some(psi) => Some(state_residual_form(rel, &psi.form)?),
        None => None,
    };
    let mut note = None;
    if rel.degree() == 0 && state.is_none() {
        note = Some("p = 0 without a state function: nothing to compare".into());
    }
    let mut max = 0.0_f64;
    let mut sum = 0.0;
    let mut argmax = None;
    let mut kmax = commutator.as_ref().map(|_| 0.0_f64);
    let mut smax = state.as_ref().map(|_| 0.0_f64);
    for p in &points {
        let mut r = 0.0_f64;
        if let (Some(k), Some(m)) = (&commutator, kmax.as_mut()) {
            let v = k.max_abs_at(p)?;
            *m = m.max(v);
            r = nan_max(r, v);
        }
        if let (Some(s), Some(m)) = (&state, smax.as_mut()) {
            let v = s.max_abs_at(p)?;
            *m = m.max(v);
            r = nan_max(r, v);
        }
        sum += r;
        if argmax.is_none() || r > max || (r.is_nan() && !max.is_nan()) {
            max = r;
            argmax = Some(p.clone());
        }
    }
    let identical = max < tol;
    Ok(VerdictRecord {
        verdict: if identical {
            Verdict::Identical
        } else {
            Verdict::Nonidentical
        },
        max_residual: max,
        mean_residual: sum / points.len() as f64,
        argmax_point: argmax,
        samples: points.len(),
        tol,
        commutator_max: kmax,
        state_max: smax,
        note,
    })
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(n: usize) -> Arc<Chart> {
        Arc::new(Chart::unit_box(n, 11).unwrap())
    }

    fn f(t: &str, c: &Arc<Chart>) -> ScalarField {
        ScalarField::parse(t, c.clone()).unwrap()
    }

    fn relation(c: &Arc<Chart>, a: &[&str]) -> EvolutionaryRelation {
        let sys = BalanceSystem::first_degree(
            c.clone(),
            f(a[0], c),
            a[1..].iter().map(|t| f(t, c)).collect(),
        );
        build_relation(&sys).unwrap()
    }

    #[test]
    fn build_examples() {
        let c = chart(2);
        let rel = relation(&c, &["x2", "x1"]);
        assert_eq!(rel.omega.component(&[0]).unwrap(), f("x2", &c));
        assert_eq!(rel.omega.component(&[1]).unwrap(), f("x1", &c));
        assert!(relation(&c, &["0", "0"]).omega.is_zero());
        let bad = BalanceSystem::first_degree(c.clone(), f("1", &c), vec![]);
        assert!(matches!(
            build_relation(&bad),
            Err(Error::InvalidBalance(_))
        ));
    }

    #[test]
    fn verdict_examples() {
        let c = chart(2);
        let plan = SamplePlan::random(200, 3);
        let sys = BalanceSystem::first_degree(c.clone(), f("x2", &c), vec![f("x1", &c)])
            .with_psi(StateFunction::scalar(f("x1*x2", &c), StateLabel::Action));
        let rel = build_relation(&sys).unwrap();
        let v = nonidentity_verdict(&rel, 1e-12, &plan).unwrap();
        assert_eq!(v.verdict, Verdict::Identical);
        assert!(v.max_residual < 1e-12);

        let rel = relation(&c, &["x2", "0"]);
        let v = nonidentity_verdict(&rel, 1e-9, &plan).unwrap();
        assert_eq!(v.verdict, Verdict::Nonidentical);
        assert_eq!(v.commutator_max, Some(1.0));
        let k = rel.commutator().unwrap().unwrap();
        assert_eq!(k.component(0, 1, &[0.3, 0.3]).unwrap(), -1.0);

        let con = Connection::new(c.clone(), [((0, 1, 0), f("1", &c))]).unwrap();
        let sys = BalanceSystem::first_degree(c.clone(), f("x2", &c), vec![f("x1", &c)])
            .with_connection(con);
        let rel = build_relation(&sys).unwrap();
        let v = nonidentity_verdict(&rel, 1e-9, &plan).unwrap();
        assert_eq!(v.verdict, Verdict::Nonidentical);
    }

    #[test]
    fn state_residual_examples() {
        let c = chart(2);
        let plan = SamplePlan::random(50, 1);
        let rel = relation(&c, &["x2", "x1"]);
        let psi = DifferentialForm::scalar(f("x1*x2", &c));
        assert_eq!(state_residual(&rel, &psi, &plan).unwrap().max, 0.0);

        let rel = relation(&c, &["x2", "0"]);
        let zero = DifferentialForm::zero(c.clone(), 0).unwrap();
        let r = state_residual(&rel, &zero, &plan).unwrap();
        assert_eq!(r.residual.component(&[0]).unwrap(), f("x2", &c));
        assert!(r.residual.component(&[1]).unwrap().is_zero());

        let rel = relation(&c, &["x1", "x2"]);
        let psi = DifferentialForm::scalar(f("x1^2/2", &c));
        let r = state_residual(&rel, &psi, &plan).unwrap();
        let p = [0.4, 0.7];
        assert_eq!(
            r.residual.component(&[0]).unwrap().evaluate(&p).unwrap(),
            0.0
        );
        assert_eq!(
            r.residual.component(&[1]).unwrap().evaluate(&p).unwrap(),
            0.7
        );

        let one = DifferentialForm::basis(c, &[0]).unwrap();
        assert!(matches!(
            state_residual(&rel, &one, &plan),
            Err(Error::WrongDegree { .. })
        ));
    }

    #[test]
    fn zero_degree_relation() {
        let c = chart(1);
        let sys = BalanceSystem {
            chart: c.clone(),
            degree: 0,
            coefficients: BalanceCoefficients::Scalar(f("x1", &c)),
            connection: None,
            psi: None,
        };
        let rel = build_relation(&sys).unwrap();
        let v = nonidentity_verdict(&rel, 1e-9, &SamplePlan::random(100, 0)).unwrap();
        assert_eq!(v.verdict, Verdict::Identical);
        assert!(v.note.is_some());
        let sys = BalanceSystem {
            psi: Some(StateFunction::scalar(f("x1 + 1", &c), StateLabel::Other)),
            ..sys
        };
        let rel = build_relation(&sys).unwrap();
        let v = nonidentity_verdict(&rel, 1e-9, &SamplePlan::random(100, 0)).unwrap();
        assert_eq!(v.verdict, Verdict::Nonidentical);
        assert!((v.state_max.unwrap() - 1.0).abs() < 1e-12);
    }
}
