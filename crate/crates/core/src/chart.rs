use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::expr::Func;
use crate::Result;

pub const MAX_DIMENSION: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi - lo <= 0.0 {
            return Err(Error::InvalidChart(format!(
                "interval [{lo}, {hi}] must have positive finite length"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// A coordinate chart: named axes over a closed box, plus the default
/// sampling resolution used by grid sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    names: Vec<String>,
    bounds: Vec<Interval>,
    resolution: Vec<usize>,
}

impl Chart {
    pub fn new(names: Vec<String>, bounds: Vec<Interval>, resolution: Vec<usize>) -> Result<Self> {
        let n = bounds.len();
        if n == 0 || n > MAX_DIMENSION {
            return Err(Error::InvalidChart(format!(
                "dimension {n} outside 1..={MAX_DIMENSION}"
            )));
        }
        if names.len() != n || resolution.len() != n {
            return Err(Error::InvalidChart(format!(
                "{} names and {} resolutions for dimension {n}",
                names.len(),
                resolution.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::InvalidChart(format!(
                    "`{name}` is not an identifier"
                )));
            }
            if Func::from_name(name).is_some() {
                return Err(Error::InvalidChart(format!(
                    "`{name}` is reserved for a function"
                )));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidChart(format!(
                    "duplicate coordinate `{name}`"
                )));
            }
        }
        for iv in &bounds {
            Interval::new(iv.lo, iv.hi)?;
        }
        if let Some(r) = resolution.iter().find(|&&r| r < 2) {
            return Err(Error::InvalidChart(format!("resolution {r} < 2")));
        }
        Ok(Chart {
            names,
            bounds,
            resolution,
        })
    }

    /// Chart with default names `x1..xn`.
    pub fn with_default_names(bounds: Vec<Interval>, resolution: Vec<usize>) -> Result<Self> {
        let names = default_names(bounds.len());
        Chart::new(names, bounds, resolution)
    }

    /// `[0, 1]^n` with names `x1..xn` and `resolution` samples per axis.
    pub fn unit_box(n: usize, resolution: usize) -> Result<Self> {
        let bounds = vec![Interval { lo: 0.0, hi: 1.0 }; n];
        Chart::with_default_names(bounds, vec![resolution; n])
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn axis_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(Interval::midpoint).collect()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dimension()
            && point
                .iter()
                .zip(&self.bounds)
                .all(|(x, iv)| iv.contains(*x))
    }

    pub fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dimension() {
            return Err(Error::PointDimension {
                expected: self.dimension(),
                got: point.len(),
            });
        }
        for (axis, (x, iv)) in point.iter().zip(&self.bounds).enumerate() {
            if !iv.contains(*x) {
                return Err(Error::OutOfDomain {
                    axis,
                    value: *x,
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        Ok(())
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dimension() {
            return Err(Error::AxisOutOfRange {
                axis,
                dimension: self.dimension(),
            });
        }
        Ok(())
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}
