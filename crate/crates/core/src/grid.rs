//! Regular-grid samples over a chart's domain box with multilinear
//! interpolation and nested central differences.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chart::{Chart, Interval};
use crate::error::Error;
use crate::math;
use crate::Result;

// Relative slack for points that sit on the box boundary up to roundoff.
const EDGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    bounds: Vec<Interval>,
    counts: Vec<usize>,
    /// Row-major, last axis fastest.
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(bounds: Vec<Interval>, counts: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if bounds.len() != counts.len()
            || bounds.is_empty()
            || bounds.len() > crate::chart::MAX_DIMENSION
        {
            return Err(Error::InvalidGrid(format!(
                "{} axis sizes for a {}-dimensional box",
                counts.len(),
                bounds.len()
            )));
        }
        if let Some(c) = counts.iter().find(|&&c| c < 2) {
            return Err(Error::InvalidGrid(format!("axis sample count {c} < 2")));
        }
        let total: usize = counts.iter().product();
        if total != values.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {total} samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        Ok(GridSamples {
            bounds,
            counts,
            values,
        })
    }

    /// Sample `f` on the chart box with the given per-axis counts.
    pub fn sample<F>(chart: &Chart, counts: &[usize], mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let bounds = chart.bounds().to_vec();
        if counts.len() != bounds.len() {
            return Err(Error::InvalidGrid(format!(
                "{} axis sizes for a {}-dimensional chart",
                counts.len(),
                bounds.len()
            )));
        }
        let total: usize = counts.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; counts.len()];
        let mut point = vec![0.0; counts.len()];
        for _ in 0..total {
            for (a, &i) in idx.iter().enumerate() {
                point[a] = node(&bounds[a], counts[a], i);
            }
            values.push(f(&point));
            increment(&mut idx, counts);
        }
        GridSamples::new(bounds, counts.to_vec(), values)
    }

    pub fn dimension(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    /// Cell width along `axis`; the default finite-difference step.
    pub fn cell_width(&self, axis: usize) -> f64 {
        self.bounds[axis].length() / (self.counts[axis] - 1) as f64
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Multilinear interpolation at `x`.
    pub fn interpolate(&self, x: &[f64]) -> Result<f64> {
        let d = self.dimension();
        let mut base = [0usize; 8];
        let mut frac = [0.0f64; 8];
        for a in 0..d {
            let iv = &self.bounds[a];
            let slack = EDGE_SLACK * iv.length();
            let v = x[a];
            if v < iv.lo - slack || v > iv.hi + slack {
                return Err(Error::OutOfDomain {
                    axis: a,
                    value: v,
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
            let h = self.cell_width(a);
            let t = ((v - iv.lo) / h).clamp(0.0, (self.counts[a] - 1) as f64);
            let cell = (math::floor(t) as usize).min(self.counts[a] - 2);
            base[a] = cell;
            frac[a] = t - cell as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut weight = 1.0;
            let mut offset = 0usize;
            for a in 0..d {
                let up = (corner >> a) & 1;
                weight *= if up == 1 { frac[a] } else { 1.0 - frac[a] };
                offset = offset * self.counts[a] + base[a] + up;
            }
            if weight != 0.0 {
                acc += weight * self.values[offset];
            }
        }
        Ok(acc)
    }

    /// Nested central differences along `axes` (last applied outermost),
    /// each with step equal to the axis cell width.
    pub fn derivative(&self, axes: &[usize], x: &[f64]) -> Result<f64> {
        let Some((&axis, rest)) = axes.split_last() else {
            return self.interpolate(x);
        };
        let h = self.cell_width(axis);
        let iv = &self.bounds[axis];
        let slack = EDGE_SLACK * iv.length();
        if x[axis] - h < iv.lo - slack || x[axis] + h > iv.hi + slack {
            return Err(Error::GridMargin { axis, step: h });
        }
        let mut probe = x.to_vec();
        probe[axis] = x[axis] + h;
        let up = self.derivative(rest, &probe)?;
        probe[axis] = x[axis] - h;
        let down = self.derivative(rest, &probe)?;
        Ok((up - down) / (2.0 * h))
    }
}

pub(crate) fn node(iv: &Interval, count: usize, i: usize) -> f64 {
    if i + 1 == count {
        iv.hi
    } else {
        iv.lo + iv.length() * i as f64 / (count - 1) as f64
    }
}

/// Row-major odometer increment (last axis fastest).
pub(crate) fn increment(idx: &mut [usize], counts: &[usize]) {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < counts[a] {
            return;
        }
        idx[a] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::sync::Arc;

    fn unit(n: usize) -> Arc<Chart> {
        Arc::new(Chart::unit_box(n, 11).unwrap())
    }

    #[test]
    fn linear_field_interpolates_exactly() {
        let chart = unit(2);
        let g = GridSamples::sample(&chart, &[5, 5], |p| p[1]).unwrap();
        assert!((g.interpolate(&[0.5, 0.25]).unwrap() - 0.25).abs() < 1e-15);
        assert!((g.interpolate(&[0.33, 0.71]).unwrap() - 0.71).abs() < 1e-14);
    }

    #[test]
    fn bilinear_term_is_exact() {
        let chart = unit(2);
        let g = GridSamples::sample(&chart, &[4, 7], |p| p[0] * p[1]).unwrap();
        let v = g.interpolate(&[0.4, 0.9]).unwrap();
        assert!((v - 0.36).abs() < 1e-14);
    }

    #[test]
    fn margin_is_enforced() {
        let chart = unit(1);
        let g = GridSamples::sample(&chart, &[11], |p| p[0] * p[0]).unwrap();
        assert!(matches!(
            g.derivative(&[0], &[0.05]),
            Err(Error::GridMargin { axis: 0, .. })
        ));
        let d = g.derivative(&[0], &[0.5]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_shapes() {
        let b = vec![Interval::new(0.0, 1.0).unwrap()];
        assert!(GridSamples::new(b.clone(), vec![1], vec![0.0]).is_err());
        assert!(GridSamples::new(b, vec![3], vec![0.0; 2]).is_err());
    }

    #[test]
    fn outside_point_errors() {
        let chart = unit(2);
        let g = GridSamples::sample(&chart, &[3, 3], |p| p[0]).unwrap();
        assert!(matches!(
            g.interpolate(&[1.5, 0.5]),
            Err(Error::OutOfDomain { axis: 0, .. })
        ));
    }
}
