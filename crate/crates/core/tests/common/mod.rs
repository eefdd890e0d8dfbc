#![allow(dead_code)]

use std::sync::Arc;

use evoform_core::{Chart, ScalarField};
use proptest::prelude::*;

/// Polynomial with hand-rolled evaluation and differentiation, used as an
/// oracle independent of the expression engine.
#[derive(Debug, Clone)]
pub struct Poly {
    pub n: usize,
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: vec![] }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&k, v)| v.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn deriv(&self, axis: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[axis] > 0)
            .map(|(c, e)| {
                let mut e2 = e.clone();
                e2[axis] -= 1;
                (c * e[axis] as f64, e2)
            })
            .collect();
        Poly { n: self.n, terms }
    }

    pub fn text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, e)| {
                let mut s = format!("({c:?})");
                for (i, &k) in e.iter().enumerate() {
                    if k > 0 {
                        s.push_str(&format!("*x{}^{}", i + 1, k));
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }

    pub fn field(&self, chart: &Arc<Chart>) -> ScalarField {
        ScalarField::parse(&self.text(), chart.clone()).unwrap()
    }
}

/// Coefficients are multiples of 1/4 so their decimal text is exact.
pub fn poly(n: usize, max_terms: usize, max_deg: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (
            (-8i32..=8).prop_map(|c| c as f64 / 4.0),
            prop::collection::vec(0..=max_deg, n),
        ),
        0..=max_terms,
    )
    .prop_map(move |terms| Poly { n, terms })
}

pub fn chart(n: usize) -> Arc<Chart> {
    Arc::new(Chart::unit_box(n, 5).unwrap())
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, n)
}
