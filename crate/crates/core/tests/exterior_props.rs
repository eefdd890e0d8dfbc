mod common;

use std::sync::Arc;

use common::{chart, point, poly, Poly};
use evoform_core::exterior::{combinations, exterior_derivative, wedge};
use evoform_core::{flat_commutator, Chart, DifferentialForm, GridSamples, ScalarField};
use proptest::prelude::*;

fn form_of(c: &Arc<Chart>, k: usize, polys: &[Poly]) -> DifferentialForm {
    let terms = combinations(c.dimension(), k)
        .into_iter()
        .zip(polys)
        .map(|(idx, p)| (idx, p.field(c)));
    DifferentialForm::from_terms(c.clone(), k, terms).unwrap()
}

/// (n, k, coefficient polynomials) with k + 2 ≤ n ≤ 4 and k ≤ 2.
fn random_form() -> impl Strategy<Value = (usize, usize, Vec<Poly>)> {
    (2usize..=4)
        .prop_flat_map(|n| (Just(n), 0..=(n - 2).min(2)))
        .prop_flat_map(|(n, k)| {
            let m = combinations(n, k).len();
            (Just(n), Just(k), prop::collection::vec(poly(n, 4, 3), m))
        })
}

fn max_diff(a: &DifferentialForm, b: &DifferentialForm, x: &[f64]) -> f64 {
    a.sub(b).unwrap().max_abs_at(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn dd_vanishes_on_polynomial_forms((n, k, polys) in random_form(), x in point(4)) {
        let c = chart(n);
        let w = form_of(&c, k, &polys);
        let ddw = exterior_derivative(&exterior_derivative(&w).unwrap()).unwrap();
        prop_assert!(ddw.max_abs_at(&x[..n]).unwrap() < 1e-12);
    }

    #[test]
    fn leibniz_rule(a in prop::collection::vec(poly(3, 3, 2), 3),
                    b in prop::collection::vec(poly(3, 3, 2), 3),
                    f in poly(3, 3, 2),
                    x in point(3)) {
        let c = chart(3);
        let a1 = form_of(&c, 1, &a);
        let b1 = form_of(&c, 1, &b);
        let f0 = form_of(&c, 0, &[f]);
        // 1-form ∧ 1-form: d(a∧b) = da∧b − a∧db
        let lhs = exterior_derivative(&wedge(&a1, &b1).unwrap()).unwrap();
        let da = exterior_derivative(&a1).unwrap();
        let db = exterior_derivative(&b1).unwrap();
        let rhs = wedge(&da, &b1).unwrap().sub(&wedge(&a1, &db).unwrap()).unwrap();
        prop_assert!(max_diff(&lhs, &rhs, &x) < 1e-10);
        // 0-form ∧ 1-form: d(f b) = df∧b + f db
        let lhs = exterior_derivative(&wedge(&f0, &b1).unwrap()).unwrap();
        let df = exterior_derivative(&f0).unwrap();
        let rhs = wedge(&df, &b1).unwrap().add(&wedge(&f0, &db).unwrap()).unwrap();
        prop_assert!(max_diff(&lhs, &rhs, &x) < 1e-10);
    }

    #[test]
    fn wedge_graded_antisymmetry(a in prop::collection::vec(poly(4, 2, 2), 4),
                                 b in prop::collection::vec(poly(4, 2, 2), 6),
                                 x in point(4)) {
        let c = chart(4);
        let a1 = form_of(&c, 1, &a);
        let b2 = form_of(&c, 2, &b);
        // (−1)^{1·2} = +1
        prop_assert!(max_diff(&wedge(&a1, &b2).unwrap(), &wedge(&b2, &a1).unwrap(), &x) < 1e-12);
        // (−1)^{1·1} = −1
        let s = wedge(&a1, &a1).unwrap();
        prop_assert!(s.max_abs_at(&x).unwrap() < 1e-12);
    }

    #[test]
    fn flat_commutator_matches_hand_derivatives(a in prop::collection::vec(poly(3, 4, 3), 3),
                                                x in point(3)) {
        let c = chart(3);
        let w = form_of(&c, 1, &a);
        let k = flat_commutator(&w).unwrap();
        let dw = exterior_derivative(&w).unwrap();
        for al in 0..3 {
            for be in 0..3 {
                let oracle = a[be].deriv(al).eval(&x) - a[al].deriv(be).eval(&x);
                let got = k.component(al, be, &x).unwrap();
                prop_assert!((got - oracle).abs() < 1e-11, "K{}{}: {} vs {}", al, be, got, oracle);
                if al < be {
                    let from_d = dw.component(&[al, be]).unwrap().evaluate(&x).unwrap();
                    prop_assert!((from_d - got).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn parser_is_total(text in "[x0-9a-z+*/^(),. -]{0,24}", x in point(3)) {
        let c = chart(3);
        if let Ok(f) = ScalarField::parse(&text, c) {
            let _ = f.evaluate(&x);
            let _ = f.derivative(0).and_then(|d| d.evaluate(&x));
        }
    }
}

/// Central differences on a grid: halving the cell width divides the error
/// at a shared node by about four.
#[test]
fn grid_derivative_error_shrinks_fourfold() {
    let c = chart(2);
    let mut ratios = Vec::new();
    for i in 0..12 {
        let a = 0.5 + 0.25 * i as f64;
        let b = 0.2 + 0.05 * i as f64;
        let f = |p: &[f64]| (a * p[0]).exp() * (b * p[1]).cos();
        let exact = a * (a * 0.5f64).exp() * (b * 0.5f64).cos();
        let err = |nodes: usize| {
            let g = GridSamples::sample(&c, &[nodes, nodes], f).unwrap();
            (g.derivative(&[0], &[0.5, 0.5]).unwrap() - exact).abs()
        };
        let ratio = err(11) / err(21);
        assert!((ratio - 4.0).abs() < 0.8, "field {i}: ratio {ratio}");
        ratios.push(ratio);
    }
    assert!(ratios.len() >= 10);
}

#[test]
fn grid_backed_form_has_small_dd() {
    let c = Arc::new(Chart::unit_box(3, 5).unwrap());
    let g = GridSamples::sample(&c, &[17, 17, 17], |p| {
        (p[0] * p[1]).sin() + p[2] * p[2] * p[0]
    })
    .unwrap();
    let f = ScalarField::from_grid(c.clone(), g).unwrap();
    let w = DifferentialForm::one_form(
        c.clone(),
        vec![f.clone(), f.scale(2.0), ScalarField::zero(c.clone())],
    )
    .unwrap();
    let dd = exterior_derivative(&exterior_derivative(&w).unwrap()).unwrap();
    assert!(dd.max_abs_at(&[0.5, 0.5, 0.5]).unwrap() < 1e-9);
}
