//! Skew-symmetric differential forms on a chart.
//!
//! A degree-k form stores one coefficient field per strictly increasing
//! multi-index `i1 < ... < ik`; absent entries are zero. The form's value on
//! vectors `v1..vk` is `Σ_I c_I · det[v_j[I_i]]`.
//!
//! Ordering convention: the coefficient of `dw` on `(α, β)` with `α < β`
//! equals the commutator component
//! `K_{αβ} = ∂A_β/∂ξ^α − ∂A_α/∂ξ^β` of the 1-form `w = A_μ dξ^μ`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use serde::Serialize;

use crate::chart::Chart;
use crate::error::Error;
use crate::field::{same_chart, ScalarField};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::sample::SamplePlan;
use crate::Result;

/// Sample plans used for closure verdicts must have at least this many points.
pub const MIN_SAMPLES: usize = 100;

/// Strictly increasing list of 0-based axes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Sort `indices` into canonical order, returning the permutation sign,
    /// or `None` when an index repeats (the antisymmetric value is zero).
    pub fn canonical(indices: &[usize]) -> Option<(f64, MultiIndex)> {
        let mut v = indices.to_vec();
        let mut sign = 1.0;
        // insertion sort, counting transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((sign, MultiIndex(v)))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.0.contains(&axis)
    }

    /// All increasing multi-indices of length `k` over `0..n`.
    pub fn all(n: usize, k: usize) -> Vec<MultiIndex> {
        combinations(n, k).into_iter().map(MultiIndex).collect()
    }

    /// 1-based rendering used in files and reports.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", a + 1)?;
        }
        f.write_str(")")
    }
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in (i + 1)..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialForm {
    chart: Arc<Chart>,
    degree: usize,
    terms: BTreeMap<MultiIndex, ScalarField>,
}

impl DifferentialForm {
    pub fn zero(chart: Arc<Chart>, degree: usize) -> Result<Self> {
        if degree > chart.dimension() {
            return Err(Error::DegreeOverflow {
                degree,
                dimension: chart.dimension(),
            });
        }
        Ok(DifferentialForm {
            chart,
            degree,
            terms: BTreeMap::new(),
        })
    }

    /// 0-form from a scalar field.
    pub fn scalar(field: ScalarField) -> Self {
        let mut terms = BTreeMap::new();
        if !field.is_zero() {
            terms.insert(MultiIndex(Vec::new()), field.clone());
        }
        DifferentialForm {
            chart: field.chart().clone(),
            degree: 0,
            terms,
        }
    }

    /// Build from `(indices, coefficient)` pairs in any index order;
    /// permuted indices contribute with their permutation sign and repeated
    /// indices vanish. Coefficients on the same canonical index accumulate.
    pub fn from_terms<I>(chart: Arc<Chart>, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, ScalarField)>,
    {
        let mut form = DifferentialForm::zero(chart, degree)?;
        for (idx, field) in terms {
            if idx.len() != degree {
                return Err(Error::InvalidIndex(format!(
                    "index {idx:?} has length {}, form degree is {degree}",
                    idx.len()
                )));
            }
            for &a in &idx {
                form.chart.check_axis(a)?;
            }
            if !same_chart(&form.chart, field.chart()) {
                return Err(Error::ChartMismatch);
            }
            if let Some((sign, mi)) = MultiIndex::canonical(&idx) {
                let f = if sign < 0.0 { field.neg() } else { field };
                form.accumulate(mi, f);
            }
        }
        Ok(form)
    }

    /// `Σ_μ A_μ dξ^μ`.
    pub fn one_form(chart: Arc<Chart>, coefficients: Vec<ScalarField>) -> Result<Self> {
        if coefficients.len() != chart.dimension() {
            return Err(Error::InvalidIndex(format!(
                "{} coefficients for dimension {}",
                coefficients.len(),
                chart.dimension()
            )));
        }
        let terms = coefficients
            .into_iter()
            .enumerate()
            .map(|(i, f)| (vec![i], f));
        DifferentialForm::from_terms(chart, 1, terms)
    }

    /// `dξ^{i1} ∧ ... ∧ dξ^{ik}` with unit coefficient.
    pub fn basis(chart: Arc<Chart>, indices: &[usize]) -> Result<Self> {
        let one = ScalarField::constant(chart.clone(), 1.0);
        DifferentialForm::from_terms(chart, indices.len(), [(indices.to_vec(), one)])
    }

    fn accumulate(&mut self, idx: MultiIndex, field: ScalarField) {
        let merged = match self.terms.remove(&idx) {
            Some(prev) => prev.add(&field),
            None => field,
        };
        if !merged.is_zero() {
            self.terms.insert(idx, merged);
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ScalarField)> {
        self.terms.iter()
    }

    pub fn term(&self, idx: &MultiIndex) -> Option<&ScalarField> {
        self.terms.get(idx)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_analytic(&self) -> bool {
        self.terms.values().all(ScalarField::is_analytic)
    }

    /// Signed coefficient for an arbitrary (possibly permuted) index list.
    pub fn component(&self, indices: &[usize]) -> Result<ScalarField> {
        if indices.len() != self.degree {
            return Err(Error::InvalidIndex(format!(
                "index {indices:?} for a degree-{} form",
                self.degree
            )));
        }
        for &a in indices {
            self.chart.check_axis(a)?;
        }
        let zero = ScalarField::zero(self.chart.clone());
        Ok(match MultiIndex::canonical(indices) {
            None => zero,
            Some((sign, mi)) => match self.terms.get(&mi) {
                None => zero,
                Some(f) if sign < 0.0 => f.neg(),
                Some(f) => f.clone(),
            },
        })
    }

    fn check_compatible(&self, other: &DifferentialForm) -> Result<()> {
        if !same_chart(&self.chart, &other.chart) {
            return Err(Error::ChartMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::WrongDegree {
                expected: self.degree,
                got: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (idx, f) in &other.terms {
            out.accumulate(idx.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DifferentialForm {
        self.map_coefficients(ScalarField::neg)
    }

    pub fn scale(&self, factor: f64) -> DifferentialForm {
        self.map_coefficients(|f| f.scale(factor))
    }

    /// Multiply every coefficient by a scalar field (`f · w`).
    pub fn mul_field(&self, field: &ScalarField) -> Result<DifferentialForm> {
        if !same_chart(&self.chart, field.chart()) {
            return Err(Error::ChartMismatch);
        }
        Ok(self.map_coefficients(|f| field.mul(f)))
    }

    fn map_coefficients(&self, op: impl Fn(&ScalarField) -> ScalarField) -> DifferentialForm {
        let terms = self
            .terms
            .iter()
            .map(|(i, f)| (i.clone(), op(f)))
            .filter(|(_, f)| !f.is_zero())
            .collect();
        DifferentialForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms,
        }
    }

    /// Coefficient values at a point (zero entries omitted).
    pub fn evaluate(&self, point: &[f64]) -> Result<BTreeMap<MultiIndex, f64>> {
        self.chart.check_point(point)?;
        self.terms
            .iter()
            .map(|(i, f)| Ok((i.clone(), f.expr().eval(point)?)))
            .collect()
    }

    /// `max_I |c_I(point)|`.
    pub fn max_abs_at(&self, point: &[f64]) -> Result<f64> {
        Ok(self
            .evaluate(point)?
            .values()
            .fold(0.0_f64, |m, v| m.max(v.abs())))
    }

    /// Value of the form on `vectors` (one per degree) at `point`.
    pub fn apply(&self, point: &[f64], vectors: &[Vec<f64>]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::WrongDegree {
                expected: self.degree,
                got: vectors.len(),
            });
        }
        let vals = self.evaluate(point)?;
        let mut acc = 0.0;
        for (idx, c) in vals {
            let rows: Vec<Vec<f64>> = idx
                .as_slice()
                .iter()
                .map(|&a| vectors.iter().map(|v| v[a]).collect())
                .collect();
            acc += c * linalg::determinant(rows);
        }
        Ok(acc)
    }

    /// Interior product `i_v w` with a constant vector.
    pub fn interior(&self, v: &[f64]) -> Result<DifferentialForm> {
        if v.len() != self.dimension() {
            return Err(Error::PointDimension {
                expected: self.dimension(),
                got: v.len(),
            });
        }
        if self.degree == 0 {
            return Err(Error::WrongDegree {
                expected: 1,
                got: 0,
            });
        }
        // (i_v w)_J = Σ_j v_j w_{jJ}
        let mut out = DifferentialForm::zero(self.chart.clone(), self.degree - 1)?;
        for (idx, f) in &self.terms {
            for (pos, &axis) in idx.as_slice().iter().enumerate() {
                if v[axis] == 0.0 {
                    continue;
                }
                let rest: Vec<usize> = idx
                    .as_slice()
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != pos)
                    .map(|(_, a)| *a)
                    .collect();
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.accumulate(MultiIndex(rest), f.scale(sign * v[axis]));
            }
        }
        Ok(out)
    }

    pub fn exterior_derivative(&self) -> Result<DifferentialForm> {
        exterior_derivative(self)
    }

    pub fn wedge(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        wedge(self, other)
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (i, a) in idx.as_slice().iter().enumerate() {
                f.write_str(if i == 0 { " " } else { "∧" })?;
                write!(f, "d{}", self.chart.names()[*a])?;
            }
        }
        Ok(())
    }
}

pub fn wedge(a: &DifferentialForm, b: &DifferentialForm) -> Result<DifferentialForm> {
    if !same_chart(&a.chart, &b.chart) {
        return Err(Error::ChartMismatch);
    }
    let degree = a.degree + b.degree;
    let mut out = DifferentialForm::zero(a.chart.clone(), degree)?;
    for (i, f) in &a.terms {
        for (j, g) in &b.terms {
            let mut joined = i.0.clone();
            joined.extend_from_slice(&j.0);
            if let Some((sign, mi)) = MultiIndex::canonical(&joined) {
                let prod = f.mul(g);
                out.accumulate(mi, if sign < 0.0 { prod.neg() } else { prod });
            }
        }
    }
    Ok(out)
}

/// `d(Σ f_I dξ^I) = Σ_I Σ_j ∂_j f_I dξ^j ∧ dξ^I`.
pub fn exterior_derivative(w: &DifferentialForm) -> Result<DifferentialForm> {
    let n = w.dimension();
    if w.degree >= n {
        return Err(Error::TopDegree);
    }
    let mut out = DifferentialForm::zero(w.chart.clone(), w.degree + 1)?;
    for (idx, f) in &w.terms {
        for j in 0..n {
            if idx.contains(j) {
                continue;
            }
            let df = f.derivative(j)?;
            if df.is_zero() {
                continue;
            }
            let before = idx.as_slice().iter().filter(|&&a| a < j).count();
            let mut joined = idx.0.clone();
            joined.insert(before, j);
            let df = if before % 2 == 1 { df.neg() } else { df };
            out.accumulate(MultiIndex(joined), df);
        }
    }
    Ok(out)
}

/// Degree-(p+1) skew coefficient field of a degree-p form's commutator.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorField {
    form: DifferentialForm,
    source_degree: usize,
}

impl CommutatorField {
    pub fn from_form(form: DifferentialForm) -> Result<Self> {
        if form.degree == 0 {
            return Err(Error::WrongDegree {
                expected: 1,
                got: 0,
            });
        }
        Ok(CommutatorField {
            source_degree: form.degree - 1,
            form,
        })
    }

    pub fn form(&self) -> &DifferentialForm {
        &self.form
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.form.chart
    }

    pub fn source_degree(&self) -> usize {
        self.source_degree
    }

    pub fn dimension(&self) -> usize {
        self.form.dimension()
    }

    /// Component `K_{αβ}` (source degree 1), any index order.
    pub fn component(&self, alpha: usize, beta: usize, point: &[f64]) -> Result<f64> {
        self.form.component(&[alpha, beta])?.evaluate(point)
    }

    pub fn values_at(&self, point: &[f64]) -> Result<BTreeMap<MultiIndex, f64>> {
        self.form.evaluate(point)
    }

    pub fn max_abs_at(&self, point: &[f64]) -> Result<f64> {
        self.form.max_abs_at(point)
    }

    /// Dense `n × n` skew matrix `K_{αβ}` (source degree 1 only).
    pub fn skew_matrix(&self, point: &[f64]) -> Result<Matrix> {
        if self.source_degree != 1 {
            return Err(Error::WrongDegree {
                expected: 1,
                got: self.source_degree,
            });
        }
        let n = self.dimension();
        let mut m = Matrix::zeros(n, n);
        for (idx, v) in self.values_at(point)? {
            let (a, b) = (idx.0[0], idx.0[1]);
            m.set(a, b, v);
            m.set(b, a, -v);
        }
        Ok(m)
    }

    /// Matrix of `v ↦ i_v K`: one row per degree-p multi-index `J`, one
    /// column per axis `j`, entry `K_{jJ}`. For p = 1 this is `Kᵀ = −K`.
    pub fn contraction_matrix(&self, point: &[f64]) -> Result<Matrix> {
        let n = self.dimension();
        let vals = self.values_at(point)?;
        let rows = MultiIndex::all(n, self.source_degree);
        let mut m = Matrix::zeros(rows.len().max(1), n);
        for (r, j_idx) in rows.iter().enumerate() {
            for axis in 0..n {
                if j_idx.contains(axis) {
                    continue;
                }
                let mut joined = vec![axis];
                joined.extend_from_slice(&j_idx.0);
                if let Some((sign, mi)) = MultiIndex::canonical(&joined) {
                    if let Some(v) = vals.get(&mi) {
                        m.set(r, axis, sign * v);
                    }
                }
            }
        }
        Ok(m)
    }

    /// `|i_v K|∞` at a point.
    pub fn contraction_residual(&self, point: &[f64], v: &[f64]) -> Result<f64> {
        Ok(math::max_abs(&self.contraction_matrix(point)?.mul_vec(v)))
    }

    /// Per-point `max |K|` over a sample plan (full-grid sweep mode).
    pub fn sweep(&self, plan: &SamplePlan) -> Result<Vec<(Vec<f64>, f64)>> {
        plan.points(self.chart())?
            .into_iter()
            .map(|p| {
                let r = self.max_abs_at(&p)?;
                Ok((p, r))
            })
            .collect()
    }
}

/// `K_{αβ} = ∂A_β/∂ξ^α − ∂A_α/∂ξ^β` for a 1-form `w = A_μ dξ^μ`.
pub fn flat_commutator(w: &DifferentialForm) -> Result<CommutatorField> {
    if w.degree != 1 {
        return Err(Error::WrongDegree {
            expected: 1,
            got: w.degree,
        });
    }
    let n = w.dimension();
    if n < 2 {
        return Err(Error::TopDegree);
    }
    let coeff = |axis: usize| w.component(&[axis]);
    let mut terms = Vec::new();
    for alpha in 0..n {
        for beta in (alpha + 1)..n {
            let k = coeff(beta)?
                .derivative(alpha)?
                .sub(&coeff(alpha)?.derivative(beta)?);
            terms.push((vec![alpha, beta], k));
        }
    }
    CommutatorField::from_form(DifferentialForm::from_terms(w.chart.clone(), 2, terms)?)
}

/// Outcome of a sample-based closure check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub closed: bool,
    pub max_residual: f64,
    /// Sample point where the residual peaks.
    pub argmax: Option<Vec<f64>>,
    pub samples: usize,
    pub tol: f64,
}

/// Max of `|coefficient|` of a form over sample points, with its location.
pub(crate) fn sweep_max(
    form: &DifferentialForm,
    points: &[Vec<f64>],
) -> Result<(f64, Option<Vec<f64>>, f64)> {
    let mut max = 0.0_f64;
    let mut arg = None;
    let mut sum = 0.0;
    for p in points {
        let r = form.max_abs_at(p)?;
        sum += r;
        if arg.is_none() || r > max || (r.is_nan() && !max.is_nan()) {
            max = r;
            arg = Some(p.clone());
        }
    }
    let mean = if points.is_empty() {
        0.0
    } else {
        sum / points.len() as f64
    };
    Ok((max, arg, mean))
}

pub(crate) fn plan_points(chart: &Chart, plan: &SamplePlan) -> Result<Vec<Vec<f64>>> {
    let points = plan.points(chart)?;
    if points.len() < MIN_SAMPLES {
        return Err(Error::SamplePlanTooSmall {
            got: points.len(),
            min: MIN_SAMPLES,
        });
    }
    Ok(points)
}

/// Is `dw ≈ 0` over the plan? Reports the largest `|dw|` coefficient and
/// where it occurs.
pub fn is_closed(w: &DifferentialForm, tol: f64, plan: &SamplePlan) -> Result<ClosureReport> {
    let points = plan_points(&w.chart, plan)?;
    if w.degree >= w.dimension() {
        return Ok(ClosureReport {
            closed: true,
            max_residual: 0.0,
            argmax: None,
            samples: points.len(),
            tol,
        });
    }
    let dw = exterior_derivative(w)?;
    let (max, argmax, _) = sweep_max(&dw, &points)?;
    Ok(ClosureReport {
        closed: max < tol,
        max_residual: max,
        argmax,
        samples: points.len(),
        tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedClosure {
    pub closed: bool,
    pub residual: f64,
}

/// Closure of `w` on the span of `directions` at `point`: every evaluation
/// of `dw` on a `(k+1)`-tuple of the directions must be below `tol`.
pub fn restricted_closure(
    w: &DifferentialForm,
    directions: &[Vec<f64>],
    point: &[f64],
    tol: f64,
) -> Result<RestrictedClosure> {
    let n = w.dimension();
    if directions.len() > n {
        return Err(Error::TooManyDirections {
            got: directions.len(),
            dimension: n,
        });
    }
    for d in directions {
        if d.len() != n {
            return Err(Error::PointDimension {
                expected: n,
                got: d.len(),
            });
        }
    }
    let rel = linalg::relative_min_singular(directions);
    if rel < 1e-10 {
        return Err(Error::DependentDirections(rel));
    }
    w.chart.check_point(point)?;
    let k1 = w.degree + 1;
    if k1 > n || directions.len() < k1 {
        return Ok(RestrictedClosure {
            closed: true,
            residual: 0.0,
        });
    }
    let dw = exterior_derivative(w)?;
    let mut residual = 0.0_f64;
    for subset in combinations(directions.len(), k1) {
        let vs: Vec<Vec<f64>> = subset.iter().map(|&i| directions[i].clone()).collect();
        residual = residual.max(dw.apply(point, &vs)?.abs());
    }
    Ok(RestrictedClosure {
        closed: residual < tol,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(n: usize) -> Arc<Chart> {
        Arc::new(Chart::unit_box(n, 11).unwrap())
    }

    fn f(text: &str, c: &Arc<Chart>) -> ScalarField {
        ScalarField::parse(text, c.clone()).unwrap()
    }

    fn one_form(c: &Arc<Chart>, coeffs: &[&str]) -> DifferentialForm {
        DifferentialForm::one_form(c.clone(), coeffs.iter().map(|t| f(t, c)).collect()).unwrap()
    }

    fn coeff(w: &DifferentialForm, idx: &[usize], p: &[f64]) -> f64 {
        w.component(idx).unwrap().evaluate(p).unwrap()
    }

    #[test]
    fn canonical_sign() {
        assert_eq!(
            MultiIndex::canonical(&[2, 0, 1]),
            Some((1.0, MultiIndex(vec![0, 1, 2])))
        );
        assert_eq!(
            MultiIndex::canonical(&[1, 0]),
            Some((-1.0, MultiIndex(vec![0, 1])))
        );
        assert_eq!(MultiIndex::canonical(&[1, 1]), None);
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn wedge_examples() {
        let c = chart(2);
        let dx1 = DifferentialForm::basis(c.clone(), &[0]).unwrap();
        let dx2 = DifferentialForm::basis(c.clone(), &[1]).unwrap();
        assert!(wedge(&dx1, &dx1).unwrap().is_zero());
        let p = [0.3, 0.6];
        assert_eq!(coeff(&wedge(&dx1, &dx2).unwrap(), &[0, 1], &p), 1.0);
        assert_eq!(coeff(&wedge(&dx2, &dx1).unwrap(), &[0, 1], &p), -1.0);
        let x2dx1 = dx1.mul_field(&f("x2", &c)).unwrap();
        let w = wedge(&x2dx1, &dx2).unwrap();
        assert_eq!(coeff(&w, &[0, 1], &p), 0.6);
        assert_eq!(coeff(&w, &[1, 0], &p), -0.6);
    }

    #[test]
    fn wedge_rejects_overflow_and_mismatch() {
        let c = chart(2);
        let dx = DifferentialForm::basis(c.clone(), &[0, 1]).unwrap();
        let dy = DifferentialForm::basis(c.clone(), &[1]).unwrap();
        assert!(matches!(wedge(&dx, &dy), Err(Error::DegreeOverflow { .. })));
        let other = chart(3);
        let dz = DifferentialForm::basis(other, &[2]).unwrap();
        assert_eq!(wedge(&dy, &dz), Err(Error::ChartMismatch));
    }

    #[test]
    fn exterior_derivative_examples() {
        let c = chart(2);
        let k = DifferentialForm::scalar(ScalarField::constant(c.clone(), 3.0));
        let dk = exterior_derivative(&k).unwrap();
        assert_eq!(dk.degree(), 1);
        assert!(dk.is_zero());
        // d(x1 dx2) = dx1∧dx2
        let w = DifferentialForm::from_terms(c.clone(), 1, [(vec![1], f("x1", &c))]).unwrap();
        let dw = exterior_derivative(&w).unwrap();
        assert_eq!(coeff(&dw, &[0, 1], &[0.2, 0.9]), 1.0);
        // d(dψ) = 0
        let psi = DifferentialForm::scalar(f("x1*x2^2", &c));
        let ddpsi = exterior_derivative(&exterior_derivative(&psi).unwrap()).unwrap();
        for p in [[0.1, 0.2], [0.7, 0.4], [1.0, 1.0]] {
            assert!(ddpsi.max_abs_at(&p).unwrap() < 1e-12);
        }
        let top = DifferentialForm::basis(c, &[0, 1]).unwrap();
        assert_eq!(exterior_derivative(&top), Err(Error::TopDegree));
    }

    #[test]
    fn flat_commutator_examples() {
        let c = chart(2);
        let psi = DifferentialForm::scalar(f("sin(x1)*x2^3", &c));
        let exact = exterior_derivative(&psi).unwrap();
        let k = flat_commutator(&exact).unwrap();
        assert!(k.max_abs_at(&[0.4, 0.8]).unwrap() < 1e-12);

        let w = one_form(&c, &["x2", "-x1"]);
        let k = flat_commutator(&w).unwrap();
        for p in [[0.0, 0.0], [0.5, 0.1], [1.0, 0.3]] {
            assert_eq!(k.component(0, 1, &p).unwrap(), -2.0);
            assert_eq!(k.component(1, 0, &p).unwrap(), 2.0);
        }
        let w = one_form(&c, &["exp(x1)", "0"]);
        assert!(flat_commutator(&w).unwrap().form().is_zero());
        let two = DifferentialForm::basis(c, &[0, 1]).unwrap();
        assert!(matches!(
            flat_commutator(&two),
            Err(Error::WrongDegree {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn flat_commutator_matches_exterior_derivative() {
        let c = chart(3);
        let w = one_form(&c, &["x2*x3", "sin(x1) + x3^2", "x1*x2^2"]);
        let k = flat_commutator(&w).unwrap();
        let dw = exterior_derivative(&w).unwrap();
        for p in [[0.1, 0.5, 0.9], [0.3, 0.3, 0.2]] {
            assert_eq!(k.values_at(&p).unwrap(), dw.evaluate(&p).unwrap());
        }
    }

    #[test]
    fn closure_examples() {
        let c = chart(2);
        let plan = SamplePlan::random(128, 1);
        let exact = exterior_derivative(&DifferentialForm::scalar(f("x1^2*x2", &c))).unwrap();
        let r = is_closed(&exact, 1e-12, &plan).unwrap();
        assert!(r.closed && r.max_residual < 1e-12);
        let w = one_form(&c, &["x2", "0"]);
        let r = is_closed(&w, 1e-9, &plan).unwrap();
        assert!(!r.closed);
        assert_eq!(r.max_residual, 1.0);
        assert!(r.argmax.is_some());
        assert!(matches!(
            is_closed(&w, 1e-9, &SamplePlan::random(10, 1)),
            Err(Error::SamplePlanTooSmall { got: 10, .. })
        ));
    }

    #[test]
    fn restricted_closure_examples() {
        let c = chart(3);
        // w = x1 dx2, dw = dx1∧dx2
        let w = DifferentialForm::from_terms(c.clone(), 1, [(vec![1], f("x1", &c))]).unwrap();
        let p = [0.5, 0.5, 0.5];
        let e = |i: usize| {
            let mut v = vec![0.0; 3];
            v[i] = 1.0;
            v
        };
        let on_line = restricted_closure(&w, &[e(2)], &p, 1e-9).unwrap();
        assert!(on_line.closed);
        let on_plane = restricted_closure(&w, &[e(0), e(1)], &p, 1e-9).unwrap();
        assert!(!on_plane.closed);
        assert_eq!(on_plane.residual, 1.0);
        let tilted = restricted_closure(&w, &[e(0), e(2)], &p, 1e-9).unwrap();
        assert!(tilted.closed);
        assert!(matches!(
            restricted_closure(&w, &[e(0), e(0)], &p, 1e-9),
            Err(Error::DependentDirections(_))
        ));
        let closed = exterior_derivative(&DifferentialForm::scalar(f("x1*x3", &c))).unwrap();
        let r = restricted_closure(&closed, &[e(0), e(1), e(2)], &p, 1e-12).unwrap();
        assert!(r.closed);
    }

    #[test]
    fn interior_product_of_two_form() {
        let c = chart(3);
        let k = DifferentialForm::basis(c, &[0, 1]).unwrap();
        // i_{e1}(dx1∧dx2) = dx2, i_{e2}(dx1∧dx2) = -dx1
        let a = k.interior(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(coeff(&a, &[1], &[0.0; 3]), 1.0);
        let b = k.interior(&[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(coeff(&b, &[0], &[0.0; 3]), -1.0);
        assert!(k.interior(&[0.0, 0.0, 1.0]).unwrap().is_zero());
    }
}
