mod common;

use std::sync::Arc;

use common::{point, poly, Poly};
use evoform_core::chart::Interval;
use evoform_core::{
    build_relation, nonidentity_verdict, BalanceSystem, Chart, Connection, SamplePlan, ScalarField,
    StateFunction, StateLabel, Verdict,
};
use proptest::prelude::*;

fn cube() -> Arc<Chart> {
    Arc::new(
        Chart::with_default_names(vec![Interval::new(-1.0, 1.0).unwrap(); 3], vec![5; 3]).unwrap(),
    )
}

fn gradient_system(c: &Arc<Chart>, psi: &Poly) -> BalanceSystem {
    let a: Vec<ScalarField> = (0..3).map(|i| psi.deriv(i).field(c)).collect();
    BalanceSystem::first_degree(c.clone(), a[0].clone(), a[1..].to_vec())
        .with_psi(StateFunction::scalar(psi.field(c), StateLabel::Action))
}

fn with_x1(mut p: Poly) -> Poly {
    p.terms.push((1.0, vec![1, 0, 0]));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_relations_are_identical(psi in poly(3, 4, 3).prop_map(with_x1), seed in any::<u64>()) {
        let c = cube();
        let rel = build_relation(&gradient_system(&c, &psi)).unwrap();
        let v = nonidentity_verdict(&rel, 1e-10, &SamplePlan::random(128, seed)).unwrap();
        prop_assert_eq!(v.verdict, Verdict::Identical, "{:?}", v);
    }

    #[test]
    fn torsion_breaks_the_identity(psi in poly(3, 4, 3).prop_map(with_x1), seed in any::<u64>()) {
        let c = cube();
        // Γ^1_{21} = 1, so T^1_{21} = 1 (1-based)
        let conn = Connection::new(c.clone(), vec![((0, 1, 0), ScalarField::constant(c.clone(), 1.0))]).unwrap();
        let rel = build_relation(&gradient_system(&c, &psi).with_connection(conn)).unwrap();
        let v = nonidentity_verdict(&rel, 1e-10, &SamplePlan::random(128, seed)).unwrap();
        prop_assert_eq!(v.verdict, Verdict::Nonidentical);
    }

    #[test]
    fn verdict_residual_is_the_commutator_maximum(a in prop::collection::vec(poly(3, 3, 2), 3), seed in any::<u64>()) {
        let c = cube();
        let f: Vec<ScalarField> = a.iter().map(|p| p.field(&c)).collect();
        let rel = build_relation(&BalanceSystem::first_degree(c.clone(), f[0].clone(), f[1..].to_vec())).unwrap();
        let plan = SamplePlan::random(120, seed);
        let v = nonidentity_verdict(&rel, 1e-9, &plan).unwrap();
        let mut oracle = 0.0f64;
        for x in plan.points(&c).unwrap() {
            for al in 0..3 {
                for be in al + 1..3 {
                    oracle = oracle.max((a[be].deriv(al).eval(&x) - a[al].deriv(be).eval(&x)).abs());
                }
            }
        }
        prop_assert!((v.max_residual - oracle).abs() <= 1e-12 * (1.0 + oracle));
        prop_assert_eq!(v.verdict == Verdict::Nonidentical, oracle >= 1e-9);
    }

    #[test]
    fn more_samples_never_lower_the_maximum(a in prop::collection::vec(poly(3, 3, 2), 3),
                                            seed in any::<u64>(),
                                            extra in 1usize..200) {
        let c = cube();
        let f: Vec<ScalarField> = a.iter().map(|p| p.field(&c)).collect();
        let rel = build_relation(&BalanceSystem::first_degree(c.clone(), f[0].clone(), f[1..].to_vec())).unwrap();
        let small = nonidentity_verdict(&rel, 1e-9, &SamplePlan::random(100, seed)).unwrap();
        let large = nonidentity_verdict(&rel, 1e-9, &SamplePlan::random(100 + extra, seed)).unwrap();
        prop_assert!(large.max_residual >= small.max_residual);
    }

    #[test]
    fn exact_state_residual_vanishes_pointwise(psi in poly(3, 4, 3), x in point(3)) {
        let c = cube();
        let rel = build_relation(&gradient_system(&c, &psi)).unwrap();
        let r = evoform_core::evolution::state_residual_form(&rel, &rel.psi.as_ref().unwrap().form).unwrap();
        prop_assert!(r.max_abs_at(&x).unwrap() < 1e-12);
    }
}

#[test]
fn shear_form_is_nonidentical_with_unit_residual() {
    let c = cube();
    let x2 = ScalarField::parse("x2", c.clone()).unwrap();
    let z = ScalarField::zero(c.clone());
    let rel = build_relation(&BalanceSystem::first_degree(
        c.clone(),
        x2,
        vec![z.clone(), z],
    ))
    .unwrap();
    let v = nonidentity_verdict(&rel, 1e-9, &SamplePlan::grid()).unwrap();
    assert_eq!(v.verdict, Verdict::Nonidentical);
    assert_eq!(v.max_residual, 1.0);
    assert!(nonidentity_verdict(&rel, 1e-9, &SamplePlan::random(10, 0)).is_err());
}
