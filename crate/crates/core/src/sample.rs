use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::Error;
use crate::grid::{increment, node};
use crate::Result;

/// Where sample-based verdicts look.
///
/// `margin` shrinks the box on every side by an absolute amount, which is
/// what grid-backed fields need for their difference stencils. Random plans
/// draw points sequentially from a seeded ChaCha stream, so a plan with a
/// larger count always contains the smaller plan as a prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplePlan {
    Grid {
        /// Per-axis counts; empty means the chart resolution.
        #[serde(default)]
        counts: Vec<usize>,
        #[serde(default)]
        margin: f64,
    },
    Random {
        count: usize,
        seed: u64,
        #[serde(default)]
        margin: f64,
    },
    Points(Vec<Vec<f64>>),
}

impl SamplePlan {
    pub fn grid() -> Self {
        SamplePlan::Grid {
            counts: Vec::new(),
            margin: 0.0,
        }
    }

    pub fn random(count: usize, seed: u64) -> Self {
        SamplePlan::Random {
            count,
            seed,
            margin: 0.0,
        }
    }

    pub fn with_margin(self, m: f64) -> Self {
        match self {
            SamplePlan::Grid { counts, .. } => SamplePlan::Grid { counts, margin: m },
            SamplePlan::Random { count, seed, .. } => SamplePlan::Random {
                count,
                seed,
                margin: m,
            },
            p => p,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            SamplePlan::Random { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn points(&self, chart: &Chart) -> Result<Vec<Vec<f64>>> {
        let n = chart.dimension();
        match self {
            SamplePlan::Points(pts) => {
                for p in pts {
                    chart.check_point(p)?;
                }
                Ok(pts.clone())
            }
            SamplePlan::Grid { counts, margin } => {
                let counts = if counts.is_empty() {
                    chart.resolution().to_vec()
                } else {
                    counts.clone()
                };
                if counts.len() != n || counts.iter().any(|&c| c == 0) {
                    return Err(Error::InvalidSamplePlan(format!(
                        "grid counts {counts:?} do not fit dimension {n}"
                    )));
                }
                let boxes = inset(chart, *margin)?;
                let total: usize = counts.iter().product();
                let mut out = Vec::with_capacity(total);
                let mut idx = vec![0usize; n];
                for _ in 0..total {
                    let p: Vec<f64> = (0..n)
                        .map(|a| {
                            if counts[a] == 1 {
                                boxes[a].midpoint()
                            } else {
                                node(&boxes[a], counts[a], idx[a])
                            }
                        })
                        .collect();
                    out.push(p);
                    increment(&mut idx, &counts);
                }
                Ok(out)
            }
            SamplePlan::Random {
                count,
                seed,
                margin,
            } => {
                let boxes = inset(chart, *margin)?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| {
                        boxes
                            .iter()
                            .map(|iv| iv.lo + iv.length() * rng.random::<f64>())
                            .collect()
                    })
                    .collect())
            }
        }
    }
}

fn inset(chart: &Chart, margin: f64) -> Result<Vec<crate::Interval>> {
    if !(margin >= 0.0) {
        return Err(Error::InvalidSamplePlan(format!(
            "negative margin {margin}"
        )));
    }
    chart
        .bounds()
        .iter()
        .map(|iv| {
            if 2.0 * margin >= iv.length() {
                Err(Error::InvalidSamplePlan(format!(
                    "margin {margin} swallows interval [{}, {}]",
                    iv.lo, iv.hi
                )))
            } else {
                Ok(crate::Interval {
                    lo: iv.lo + margin,
                    hi: iv.hi - margin,
                })
            }
        })
        .collect()
}
