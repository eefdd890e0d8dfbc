//! Expression trees over chart coordinates.
//!
//! Constructors (`Expr::add`, `Expr::mul`, ...) fold constants and drop
//! additive/multiplicative identities, so symbolic derivatives of exact
//! forms collapse to `Const(0.0)` and zero coefficients can be suppressed.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::GridSamples;
use crate::math;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => math::sin(x),
            Func::Cos => math::cos(x),
            Func::Exp => math::exp(x),
            Func::Sqrt => math::sqrt(x),
        }
    }
}

/// A grid-sampled field, optionally differentiated by nested central
/// differences along `axes` (applied innermost-last).
#[derive(Debug, Clone)]
pub struct GridLeaf {
    pub samples: Arc<GridSamples>,
    pub axes: Vec<usize>,
}

impl PartialEq for GridLeaf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.samples, &other.samples) && self.axes == other.axes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
    Grid(GridLeaf),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Expr::Const(c) => *c == 0.0,
            Expr::Grid(leaf) => leaf.axes.is_empty() && leaf.samples.is_zero(),
            _ => false,
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// True when no grid leaf occurs in the tree.
    pub fn is_analytic(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Grid(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_analytic(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_analytic() && b.is_analytic()
            }
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) | Expr::Grid(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            (a, b) if b.is_zero() => a,
            (a, b) if a.is_zero() => b,
            (a, Expr::Neg(b)) => Expr::sub(a, *b),
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            (a, b) if b.is_zero() => a,
            (a, b) if a.is_zero() => Expr::neg(b),
            (a, b) if a == b => Expr::zero(),
            (a, Expr::Neg(b)) => Expr::add(a, *b),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            (a, b) if a.is_zero() || b.is_zero() => Expr::zero(),
            (Expr::Const(c), b) if c == 1.0 => b,
            (a, Expr::Const(c)) if c == 1.0 => a,
            (Expr::Const(c), b) if c == -1.0 => Expr::neg(b),
            (a, Expr::Const(c)) if c == -1.0 => Expr::neg(a),
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) if y != 0.0 => Expr::Const(x / y),
            (a, b) if a.is_zero() && !b.is_zero() => Expr::zero(),
            (a, Expr::Const(c)) if c == 1.0 => a,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        match (a, k) {
            (_, 0) => Expr::Const(1.0),
            (a, 1) => a,
            (Expr::Const(c), k) => Expr::Const(math::powi(c, k)),
            (a, k) => Expr::Pow(Box::new(a), k),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(f.apply(c)),
            a => Expr::Call(f, Box::new(a)),
        }
    }

    /// Rebuild bottom-up through the folding constructors.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Grid(_) => self.clone(),
            Expr::Neg(a) => Expr::neg(a.simplify()),
            Expr::Add(a, b) => Expr::add(a.simplify(), b.simplify()),
            Expr::Sub(a, b) => Expr::sub(a.simplify(), b.simplify()),
            Expr::Mul(a, b) => Expr::mul(a.simplify(), b.simplify()),
            Expr::Div(a, b) => Expr::div(a.simplify(), b.simplify()),
            Expr::Pow(a, k) => Expr::pow(a.simplify(), *k),
            Expr::Call(f, a) => Expr::call(*f, a.simplify()),
        }
    }

    /// Evaluate at a point. Only grid leaves can fail (domain/margin).
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => a.eval(x)? / b.eval(x)?,
            Expr::Pow(a, k) => math::powi(a.eval(x)?, *k),
            Expr::Call(f, a) => f.apply(a.eval(x)?),
            Expr::Grid(leaf) => leaf.samples.derivative(&leaf.axes, x)?,
        })
    }

    /// Symbolic partial derivative along `axis`. Grid leaves differentiate
    /// lazily by appending the axis to their central-difference stack.
    pub fn derivative(&self, axis: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(i) => Expr::Const(if *i == axis { 1.0 } else { 0.0 }),
            Expr::Neg(a) => Expr::neg(a.derivative(axis)),
            Expr::Add(a, b) => Expr::add(a.derivative(axis), b.derivative(axis)),
            Expr::Sub(a, b) => Expr::sub(a.derivative(axis), b.derivative(axis)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(axis), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative(axis)),
            ),
            Expr::Div(a, b) => {
                // (a'b - ab') / b^2
                let num = Expr::sub(
                    Expr::mul(a.derivative(axis), (**b).clone()),
                    Expr::mul((**a).clone(), b.derivative(axis)),
                );
                Expr::div(num, Expr::pow((**b).clone(), 2))
            }
            Expr::Pow(a, k) => {
                let da = a.derivative(axis);
                if da.is_zero() {
                    return Expr::zero();
                }
                Expr::mul(
                    Expr::mul(Expr::Const(*k as f64), Expr::pow((**a).clone(), k - 1)),
                    da,
                )
            }
            Expr::Call(f, a) => {
                let da = a.derivative(axis);
                if da.is_zero() {
                    return Expr::zero();
                }
                let inner = (**a).clone();
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, inner),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, inner)),
                    Func::Exp => Expr::call(Func::Exp, inner),
                    Func::Sqrt => Expr::div(Expr::Const(0.5), Expr::call(Func::Sqrt, inner)),
                };
                Expr::mul(outer, da)
            }
            Expr::Grid(leaf) => {
                if leaf.axes.is_empty() && leaf.samples.is_zero() {
                    return Expr::zero();
                }
                let mut axes = leaf.axes.clone();
                axes.push(axis);
                Expr::Grid(GridLeaf {
                    samples: leaf.samples.clone(),
                    axes,
                })
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    /// Render with coordinate names. Pure expressions round-trip through
    /// [`crate::parse::parse_expression`]; grid leaves print as `grid(...)`.
    pub fn display<'a>(&'a self, names: &'a [alloc::string::String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }
}

impl core::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl core::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl core::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [alloc::string::String],
}

impl ExprDisplay<'_> {
    fn child(&self, e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner = ExprDisplay {
            expr: e,
            names: self.names,
        };
        if e.precedence() < min_prec {
            write!(f, "({inner})")
        } else {
            write!(f, "{inner}")
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(i) => match self.names.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "x{}", i + 1),
            },
            Expr::Neg(a) => {
                f.write_str("-")?;
                self.child(a, 3, f)
            }
            Expr::Add(a, b) => {
                self.child(a, 1, f)?;
                f.write_str(" + ")?;
                self.child(b, 2, f)
            }
            Expr::Sub(a, b) => {
                self.child(a, 1, f)?;
                f.write_str(" - ")?;
                self.child(b, 2, f)
            }
            Expr::Mul(a, b) => {
                self.child(a, 2, f)?;
                f.write_str("*")?;
                self.child(b, 3, f)
            }
            Expr::Div(a, b) => {
                self.child(a, 2, f)?;
                f.write_str("/")?;
                self.child(b, 3, f)
            }
            Expr::Pow(a, k) => {
                self.child(a, 5, f)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                self.child(a, 0, f)?;
                f.write_str(")")
            }
            Expr::Grid(leaf) => {
                f.write_str("grid(")?;
                for (i, a) in leaf.axes.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "d{}", a + 1)?;
                }
                f.write_str(")")
            }
        }
    }
}
