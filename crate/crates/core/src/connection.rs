//! Non-symmetric connections and the torsion-corrected commutator.
//!
//! Coefficients `Γ^σ_{βα}` are user data (no metric is assumed) stored
//! densely with zero default, indexed `(σ, β, α)` with 0-based axes.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::chart::Chart;
use crate::error::Error;
use crate::exterior::{flat_commutator, CommutatorField, DifferentialForm};
use crate::field::{same_chart, ScalarField};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    chart: Arc<Chart>,
    coefficients: Vec<ScalarField>,
}

impl Connection {
    /// The flat (all-zero) connection.
    pub fn zero(chart: Arc<Chart>) -> Self {
        let n = chart.dimension();
        let z = ScalarField::zero(chart.clone());
        Connection {
            coefficients: alloc::vec![z; n * n * n],
            chart,
        }
    }

    /// Build from `((σ, β, α), Γ^σ_{βα})` entries; repeated entries add up.
    pub fn new<I>(chart: Arc<Chart>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize, usize), ScalarField)>,
    {
        let mut c = Connection::zero(chart);
        for ((s, b, a), f) in entries {
            let prev = c.coefficient(s, b, a)?.clone();
            c.set(s, b, a, prev.add(&f))?;
        }
        Ok(c)
    }

    fn slot(&self, sigma: usize, beta: usize, alpha: usize) -> Result<usize> {
        for axis in [sigma, beta, alpha] {
            self.chart.check_axis(axis)?;
        }
        let n = self.chart.dimension();
        Ok(sigma * n * n + beta * n + alpha)
    }

    pub fn set(&mut self, sigma: usize, beta: usize, alpha: usize, f: ScalarField) -> Result<()> {
        if !same_chart(&self.chart, f.chart()) {
            return Err(Error::ChartMismatch);
        }
        let i = self.slot(sigma, beta, alpha)?;
        self.coefficients[i] = f;
        Ok(())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    /// `Γ^σ_{βα}`.
    pub fn coefficient(&self, sigma: usize, beta: usize, alpha: usize) -> Result<&ScalarField> {
        let i = self.slot(sigma, beta, alpha)?;
        Ok(&self.coefficients[i])
    }

    /// `T^σ_{βα} = Γ^σ_{βα} − Γ^σ_{αβ}` as a field.
    pub fn torsion_field(&self, sigma: usize, beta: usize, alpha: usize) -> Result<ScalarField> {
        Ok(self
            .coefficient(sigma, beta, alpha)?
            .sub(self.coefficient(sigma, alpha, beta)?))
    }

    /// True when no coefficient pair differs structurally, i.e. the
    /// torsion fields all simplify to zero.
    pub fn is_symmetric(&self) -> bool {
        let n = self.dimension();
        (0..n).all(|s| {
            (0..n).all(|b| {
                (0..b).all(|a| self.coefficient(s, b, a).ok() == self.coefficient(s, a, b).ok())
            })
        })
    }

    pub fn torsion_components(&self, point: &[f64]) -> Result<Torsion> {
        self.chart.check_point(point)?;
        let n = self.dimension();
        let mut values = alloc::vec![0.0; n * n * n];
        for s in 0..n {
            for b in 0..n {
                for a in 0..n {
                    if a == b {
                        continue;
                    }
                    let g_ba = self.coefficient(s, b, a)?.expr().eval(point)?;
                    let g_ab = self.coefficient(s, a, b)?.expr().eval(point)?;
                    values[s * n * n + b * n + a] = g_ba - g_ab;
                }
            }
        }
        Ok(Torsion { n, values })
    }
}

/// Torsion values at a point, antisymmetric in the lower pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Torsion {
    n: usize,
    values: Vec<f64>,
}

impl Torsion {
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// `T^σ_{βα}`.
    pub fn get(&self, sigma: usize, beta: usize, alpha: usize) -> f64 {
        self.values[sigma * self.n * self.n + beta * self.n + alpha]
    }

    pub fn max_abs(&self) -> f64 {
        crate::math::max_abs(&self.values)
    }
}

/// `K_{αβ} = (∂a_β/∂ξ^α − ∂a_α/∂ξ^β) + (Γ^σ_{βα} − Γ^σ_{αβ}) a_σ`.
pub fn covariant_commutator(w: &DifferentialForm, c: &Connection) -> Result<CommutatorField> {
    if !same_chart(w.chart(), c.chart()) {
        return Err(Error::ChartMismatch);
    }
    let flat = flat_commutator(w)?;
    let n = w.dimension();
    let a: Vec<ScalarField> = (0..n).map(|s| w.component(&[s])).collect::<Result<_>>()?;
    let mut terms = Vec::new();
    for alpha in 0..n {
        for beta in (alpha + 1)..n {
            let mut k = flat.form().component(&[alpha, beta])?;
            for (s, a_s) in a.iter().enumerate() {
                if a_s.is_zero() {
                    continue;
                }
                let t = c.torsion_field(s, beta, alpha)?;
                if !t.is_zero() {
                    k = k.add(&t.mul(a_s));
                }
            }
            terms.push((alloc::vec![alpha, beta], k));
        }
    }
    CommutatorField::from_form(DifferentialForm::from_terms(w.chart().clone(), 2, terms)?)
}
