//! Degenerate-transformation loci, pseudostructure tracing, state-function
//! recovery and the sequential-integration cascade.
//!
//! A direction `v` is degenerate at a point when the contraction `i_v K`
//! of the commutator form vanishes there (for p = 1: `K·v = 0`).

mod cascade;
pub mod quadrature;
mod recover;
mod trace;

use alloc::vec::Vec;
use serde::Serialize;

use crate::exterior::CommutatorField;
use crate::linalg;
use crate::sample::SamplePlan;
use crate::Result;

pub use cascade::{cascade_integrate, CascadeConfig, CascadeOutcome, CascadeReport, CascadeStep};
pub use recover::{
    identical_on_pseudostructure, recover_state_function, PseudostructureVerdict, StateRecovery,
    StateSample,
};
pub use trace::{trace_pseudostructure, Pseudostructure, StopReason, Trace, TraceParams};

/// Orthonormal basis of the degenerate directions of `k` at `point`,
/// canonicalised as in [`linalg::null_space`]. Empty when there are none.
pub fn degeneracy_directions(
    k: &CommutatorField,
    point: &[f64],
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    Ok(linalg::null_space(&k.contraction_matrix(point)?, tol))
}

/// `|i_v K|∞` bound used to certify a direction: the same scale-aware
/// threshold that decides which singular values are zero.
pub fn certificate_bound(k: &CommutatorField, point: &[f64], tol: f64) -> Result<f64> {
    let m = k.contraction_matrix(point)?;
    let smax = linalg::svd(&m).max_singular_value();
    // |Av|∞ ≤ |Av|₂ ≤ σ for unit v in the span of that singular vector
    Ok(linalg::null_threshold(smax, tol))
}

/// Null dimension of `i_v K` for a generic degree-`q` form on `n` axes.
pub fn generic_null_dimension(n: usize, q: usize) -> usize {
    match q {
        0 => n,
        1 => n - 1,
        2 => n % 2,
        q if q + 1 == n => 1,
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocusPoint {
    pub point: Vec<f64>,
    pub null_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Locus {
    /// Points whose null dimension exceeds the generic value.
    pub points: Vec<LocusPoint>,
    pub generic_dim: usize,
    pub samples: usize,
}

/// Null dimension at every plan point.
pub fn null_dimensions(
    k: &CommutatorField,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<LocusPoint>> {
    plan.points(k.chart())?
        .into_iter()
        .map(|p| {
            let d = degeneracy_directions(k, &p, tol)?.len();
            Ok(LocusPoint {
                point: p,
                null_dim: d,
            })
        })
        .collect()
}

/// Plan points where the null dimension is above the generic one.
pub fn degeneracy_locus(k: &CommutatorField, plan: &SamplePlan, tol: f64) -> Result<Locus> {
    let all = null_dimensions(k, plan, tol)?;
    let generic_dim = generic_null_dimension(k.dimension(), k.form().degree());
    let samples = all.len();
    Ok(Locus {
        points: all
            .into_iter()
            .filter(|p| p.null_dim > generic_dim)
            .collect(),
        generic_dim,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::exterior::{flat_commutator, DifferentialForm};
    use crate::field::ScalarField;
    use alloc::sync::Arc;

    fn chart(n: usize) -> Arc<Chart> {
        Arc::new(Chart::unit_box(n, 11).unwrap())
    }

    fn commutator(c: &Arc<Chart>, coeffs: &[&str]) -> CommutatorField {
        let fields = coeffs
            .iter()
            .map(|t| ScalarField::parse(t, c.clone()).unwrap())
            .collect();
        flat_commutator(&DifferentialForm::one_form(c.clone(), fields).unwrap()).unwrap()
    }

    #[test]
    fn direction_examples() {
        let c = chart(3);
        // w = x1 dx2 → dw = dx1∧dx2
        let k = commutator(&c, &["0", "x1", "0"]);
        let d = degeneracy_directions(&k, &[0.5; 3], 1e-9).unwrap();
        assert_eq!(d, vec![vec![0.0, 0.0, 1.0]]);
        let k0 = commutator(&c, &["x1", "x2", "x3"]);
        assert_eq!(
            degeneracy_directions(&k0, &[0.5; 3], 1e-9).unwrap().len(),
            3
        );
        let c2 = chart(2);
        let k2 = commutator(&c2, &["0", "x1"]);
        assert!(degeneracy_directions(&k2, &[0.5; 2], 1e-9)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn locus_examples() {
        let c = chart(2);
        // w = (x1^2/2) dx2 → K12 = x1
        let k = commutator(&c, &["0", "x1^2/2"]);
        let locus = degeneracy_locus(&k, &SamplePlan::grid(), 1e-9).unwrap();
        assert_eq!(locus.points.len(), 11);
        assert!(locus
            .points
            .iter()
            .all(|p| p.point[0] == 0.0 && p.null_dim == 2));

        let exact = commutator(&c, &["x2", "x1"]);
        let locus = degeneracy_locus(&exact, &SamplePlan::grid(), 1e-9).unwrap();
        assert_eq!(locus.points.len(), 121);

        let constant = commutator(&c, &["0", "x1"]);
        assert!(degeneracy_locus(&constant, &SamplePlan::grid(), 1e-9)
            .unwrap()
            .points
            .is_empty());
    }

    #[test]
    fn generic_dimensions() {
        assert_eq!(generic_null_dimension(3, 2), 1);
        assert_eq!(generic_null_dimension(4, 2), 0);
        assert_eq!(generic_null_dimension(4, 3), 1);
        assert_eq!(generic_null_dimension(4, 4), 0);
    }
}
