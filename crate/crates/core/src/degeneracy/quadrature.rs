//! Line integrals of 1-forms along sampled curves.
//!
//! Between consecutive nodes the curve is the cubic Hermite interpolant of
//! the node positions and tangents; each piece is integrated with 3-point
//! Gauss–Legendre, which keeps the quadrature at least as accurate as the
//! fourth-order tracer that produced the nodes.

use alloc::vec::Vec;

use crate::chart::Chart;
use crate::error::Error;
use crate::exterior::DifferentialForm;
use crate::Result;

const GAUSS_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// `∫ w` over the Hermite piece from `(x0, t0)` to `(x1, t1)`, where the
/// tangents are derivatives with respect to a parameter that advances by
/// `dt` over the piece.
pub fn segment_integral(
    w: &DifferentialForm,
    x0: &[f64],
    t0: &[f64],
    x1: &[f64],
    t1: &[f64],
    dt: f64,
) -> Result<f64> {
    if w.degree() != 1 {
        return Err(Error::WrongDegree {
            expected: 1,
            got: w.degree(),
        });
    }
    let n = x0.len();
    let chart = w.chart();
    let coeffs: Vec<_> = (0..n).map(|a| w.component(&[a])).collect::<Result<_>>()?;
    let mut total = 0.0;
    for (g, wt) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
        let u = 0.5 * (g + 1.0);
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let d00 = 6.0 * u2 - 6.0 * u;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = -6.0 * u2 + 6.0 * u;
        let d11 = 3.0 * u2 - 2.0 * u;
        let mut p = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        for j in 0..n {
            p.push(h00 * x0[j] + h10 * dt * t0[j] + h01 * x1[j] + h11 * dt * t1[j]);
            // dγ/du
            v.push(d00 * x0[j] + d10 * dt * t0[j] + d01 * x1[j] + d11 * dt * t1[j]);
        }
        clamp(chart, &mut p);
        let mut f = 0.0;
        for (c, vj) in coeffs.iter().zip(&v) {
            if *vj != 0.0 && !c.is_zero() {
                f += c.evaluate(&p)? * vj;
            }
        }
        total += 0.5 * wt * f;
    }
    Ok(total)
}

/// Hermite overshoot near the box edge is pulled back onto the box.
fn clamp(chart: &Chart, p: &mut [f64]) {
    for (x, iv) in p.iter_mut().zip(chart.bounds()) {
        *x = x.clamp(iv.lo, iv.hi);
    }
}

/// Per-segment integrals of `w` along nodes with unit tangents and
/// arc-length parameter.
pub fn polyline_integrals(
    w: &DifferentialForm,
    points: &[Vec<f64>],
    tangents: &[Vec<f64>],
    arclength: &[f64],
) -> Result<Vec<f64>> {
    (1..points.len())
        .map(|i| {
            let ds = arclength[i] - arclength[i - 1];
            if ds == 0.0 {
                return Ok(0.0);
            }
            segment_integral(
                w,
                &points[i - 1],
                &tangents[i - 1],
                &points[i],
                &tangents[i],
                ds,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use alloc::sync::Arc;

    #[test]
    fn quadrature_is_exact_for_polynomial_integrand_on_line() {
        let c = Arc::new(Chart::unit_box(2, 11).unwrap());
        let w = DifferentialForm::one_form(
            c.clone(),
            vec![
                ScalarField::parse("x1^3", c.clone()).unwrap(),
                ScalarField::parse("x1*x2", c.clone()).unwrap(),
            ],
        )
        .unwrap();
        // straight segment (0,0) -> (1,1), tangent (1,1)/√2, arclength √2
        let r2 = libm::sqrt(2.0);
        let t = [1.0 / r2, 1.0 / r2];
        let v = segment_integral(&w, &[0.0, 0.0], &t, &[1.0, 1.0], &t, r2).unwrap();
        // ∫0^1 (u^3 + u^2) du
        assert!((v - (0.25 + 1.0 / 3.0)).abs() < 1e-14);
    }
}
