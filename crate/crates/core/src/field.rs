//! Scalar fields on a chart.
//!
//! A field is an expression tree bound to a chart. Pure expressions are
//! differentiated symbolically (analytic mode); grid leaves inside the tree
//! are differentiated by second-order central differences with step equal
//! to the grid cell width (grid mode). Mixed trees follow the usual
//! product/chain rules with each grid leaf handled in grid mode.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use crate::chart::Chart;
use crate::error::Error;
use crate::expr::{Expr, GridLeaf};
use crate::grid::GridSamples;
use crate::parse::parse_expression;
use crate::Result;

#[derive(Debug, Clone)]
pub struct ScalarField {
    chart: Arc<Chart>,
    expr: Expr,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.expr == other.expr
    }
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl ScalarField {
    /// Bind an expression to a chart; coordinate indices must be in range.
    pub fn new(chart: Arc<Chart>, expr: Expr) -> Result<Self> {
        if let Some(i) = expr.max_var() {
            chart.check_axis(i)?;
        }
        Ok(ScalarField { chart, expr })
    }

    pub fn parse(text: &str, chart: Arc<Chart>) -> Result<Self> {
        let expr = parse_expression(text, &chart)?.simplify();
        Ok(ScalarField { chart, expr })
    }

    pub fn constant(chart: Arc<Chart>, value: f64) -> Self {
        ScalarField {
            chart,
            expr: Expr::Const(value),
        }
    }

    pub fn zero(chart: Arc<Chart>) -> Self {
        ScalarField::constant(chart, 0.0)
    }

    pub fn coordinate(chart: Arc<Chart>, axis: usize) -> Result<Self> {
        chart.check_axis(axis)?;
        Ok(ScalarField {
            chart,
            expr: Expr::Var(axis),
        })
    }

    pub fn from_grid(chart: Arc<Chart>, samples: GridSamples) -> Result<Self> {
        if samples.dimension() != chart.dimension() || samples.bounds() != chart.bounds() {
            return Err(Error::InvalidGrid(
                "grid box does not match the chart domain".into(),
            ));
        }
        Ok(ScalarField {
            chart,
            expr: Expr::Grid(GridLeaf {
                samples: Arc::new(samples),
                axes: alloc::vec::Vec::new(),
            }),
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    /// True when the field has no grid-backed part.
    pub fn is_analytic(&self) -> bool {
        self.expr.is_analytic()
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        self.chart.check_point(point)?;
        self.expr.eval(point)
    }

    /// The derivative field ∂f/∂ξ^axis.
    pub fn derivative(&self, axis: usize) -> Result<ScalarField> {
        self.chart.check_axis(axis)?;
        Ok(ScalarField {
            chart: self.chart.clone(),
            expr: self.expr.derivative(axis),
        })
    }

    /// ∂f/∂ξ^axis at `point`: exact for expressions, central difference
    /// with the cell width for grid leaves.
    pub fn partial_derivative(&self, axis: usize, point: &[f64]) -> Result<f64> {
        self.derivative(axis)?.evaluate(point)
    }

    /// Central difference of the field itself with an explicit step. Used to
    /// check the analytic derivative against its O(h²) approximation.
    pub fn central_difference(&self, axis: usize, point: &[f64], h: f64) -> Result<f64> {
        self.chart.check_axis(axis)?;
        self.chart.check_point(point)?;
        let mut probe = point.to_vec();
        probe[axis] = point[axis] + h;
        let up = self.evaluate(&probe)?;
        probe[axis] = point[axis] - h;
        let down = self.evaluate(&probe)?;
        Ok((up - down) / (2.0 * h))
    }

    fn combine(&self, other: &ScalarField, op: fn(Expr, Expr) -> Expr) -> ScalarField {
        debug_assert!(same_chart(&self.chart, &other.chart));
        ScalarField {
            chart: self.chart.clone(),
            expr: op(self.expr.clone(), other.expr.clone()),
        }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        self.combine(other, Expr::add)
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.combine(other, Expr::sub)
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        self.combine(other, Expr::mul)
    }

    pub fn neg(&self) -> ScalarField {
        ScalarField {
            chart: self.chart.clone(),
            expr: Expr::neg(self.expr.clone()),
        }
    }

    pub fn scale(&self, factor: f64) -> ScalarField {
        ScalarField {
            chart: self.chart.clone(),
            expr: Expr::mul(Expr::Const(factor), self.expr.clone()),
        }
    }

    /// Expression text in the chart's coordinate names.
    pub fn to_text(&self) -> String {
        alloc::format!("{}", self.expr.display(self.chart.names()))
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr.display(self.chart.names()))
    }
}
