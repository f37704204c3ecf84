//! Approximate designs, D/DA/Ds criteria, sensitivity functions and efficiencies.

mod optimizer;
mod report;
mod singular;

pub use optimizer::{certify, optimize_design, uniform_grid, Certificate, DesignResult, OptimizerConfig};
pub use report::{design_csv, sensitivity_csv};
pub use singular::sensitivity_kernel_on;

use crate::error::{Error, Result};
use crate::models::OutcomeModel;
use crate::numerics::{schur_complement, schur_parts, Matrix, SymMatrix};
use crate::scalar::{cst, Scalar};

/// Points closer than this are merged.
pub const MERGE_TOL: f64 = 1e-9;

/// A probability measure with finite support on the design space.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Design {
    /// Validates weights (non-negative, summing to one within 1e-12) and sorts by point.
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::domain(format!(
                "design needs matching non-empty point and weight lists ({} vs {})",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(Error::domain("design contains a non-finite value"));
        }
        if let Some(w) = weights.iter().find(|&&w| w < 0.0) {
            return Err(Error::domain(format!("negative design weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("design weights sum to {total}")));
        }
        let mut pairs: Vec<(f64, f64)> = points.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (points, weights) = pairs.into_iter().unzip();
        Ok(Self { points, weights })
    }

    /// Normalizes the weights first; drops zero-weight points and merges near duplicates.
    pub fn from_unnormalized(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::domain("design weights must have a positive sum"));
        }
        let weights = weights.iter().map(|w| w / total).collect();
        let mut d = Self::new(points, weights)?;
        d.merge(MERGE_TOL);
        Ok(d)
    }

    pub fn single(x: f64) -> Self {
        Self {
            points: vec![x],
            weights: vec![1.0],
        }
    }

    pub fn uniform(points: Vec<f64>) -> Result<Self> {
        let n = points.len() as f64;
        let weights = vec![1.0 / n; points.len()];
        Self::from_unnormalized(points, weights)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Merges consecutive points closer than `tol` (weighted mean position) and drops
    /// zero weights.
    fn merge(&mut self, tol: f64) {
        let mut pts: Vec<f64> = Vec::with_capacity(self.points.len());
        let mut wts: Vec<f64> = Vec::with_capacity(self.points.len());
        for (x, w) in self.iter().filter(|&(_, w)| w > 0.0) {
            match (pts.last_mut(), wts.last_mut()) {
                (Some(px), Some(pw)) if (x - *px).abs() <= tol => {
                    *px = (*px * *pw + x * w) / (*pw + w);
                    *pw += w;
                }
                _ => {
                    pts.push(x);
                    wts.push(w);
                }
            }
        }
        self.points = pts;
        self.weights = wts;
    }

    /// `(1 - t) self + t other`.
    pub fn mix(&self, other: &Design, t: f64) -> Result<Design> {
        let points = self.points.iter().chain(&other.points).copied().collect();
        let weights = self
            .weights
            .iter()
            .map(|w| w * (1.0 - t))
            .chain(other.weights.iter().map(|w| w * t))
            .collect();
        Design::from_unnormalized(points, weights)
    }
}

/// Which linear combinations of the parameters are of interest.
#[derive(Debug, Clone, PartialEq)]
pub enum Criterion {
    /// All parameters.
    D,
    /// Contrasts `A^T gamma` for a full-column-rank `dim x s` matrix `A`.
    DA(Matrix<f64>),
    /// The leading `s` parameters.
    Ds(usize),
}

/// A criterion together with its sensitivity bound (`dim` for D, `s` otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSpec {
    pub kind: Criterion,
    pub bound: f64,
    dim: usize,
}

impl CriterionSpec {
    pub fn d(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("model has no parameters"));
        }
        Ok(Self {
            kind: Criterion::D,
            bound: dim as f64,
            dim,
        })
    }

    pub fn ds(s: usize, dim: usize) -> Result<Self> {
        if s == 0 || s >= dim {
            return Err(Error::domain(format!(
                "subset must be a strict subset: need 1 <= s < {dim}, got s = {s}"
            )));
        }
        Ok(Self {
            kind: Criterion::Ds(s),
            bound: s as f64,
            dim,
        })
    }

    pub fn da(a: Matrix<f64>) -> Result<Self> {
        let (dim, s) = (a.rows(), a.cols());
        if s >= dim {
            return Err(Error::domain(format!(
                "contrast matrix must have fewer columns than rows, got {dim} x {s}"
            )));
        }
        if a.rank() != s {
            return Err(Error::domain("contrast matrix must have full column rank"));
        }
        Ok(Self {
            kind: Criterion::DA(a),
            bound: s as f64,
            dim,
        })
    }

    /// Number of parameters of the model the criterion refers to.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of linear combinations of interest.
    pub fn s(&self) -> usize {
        match &self.kind {
            Criterion::D => self.dim,
            Criterion::DA(a) => a.cols(),
            Criterion::Ds(s) => *s,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            Criterion::D => "D".to_string(),
            Criterion::DA(a) => format!("DA(s={})", a.cols()),
            Criterion::Ds(s) => format!("Ds(s={s})"),
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::domain(format!(
                "criterion built for {} parameters, matrix has dimension {n}",
                self.dim
            )));
        }
        Ok(())
    }
}

/// `M(xi, gamma) = sum_i w_i m(x_i, gamma)`.
pub fn info_matrix<M: OutcomeModel + ?Sized>(
    model: &M,
    design: &Design,
    gamma: &[f64],
) -> Result<SymMatrix<f64>> {
    let mut total = SymMatrix::zeros(model.dim());
    for (x, w) in design.iter() {
        total.add_scaled(w, &model.fim_single(x, gamma)?);
    }
    Ok(total)
}

/// Criterion value: `logdet M` (D), `-logdet(A^T M^{-1} A)` (DA) or the log-determinant of the
/// Schur complement of the trailing block (Ds). Ds accepts a singular `M` as long as the leading
/// parameters stay estimable.
pub fn criterion_value<T: Scalar>(m: &SymMatrix<T>, spec: &CriterionSpec) -> Result<T> {
    spec.check_dim(m.dim())?;
    let ctx = |c: &str| format!("{} criterion: {c}", spec.label());
    match &spec.kind {
        Criterion::D => Ok(m
            .cholesky()
            .map_err(|e| e.with_context(&ctx("information matrix")))?
            .logdet()),
        Criterion::DA(a) => {
            let (_, q) = contrast_parts(m, a).map_err(|e| e.with_context(&ctx("information matrix")))?;
            Ok(-q
                .cholesky()
                .map_err(|e| e.with_context(&ctx("A^T M^-1 A")))?
                .logdet())
        }
        Criterion::Ds(s) => Ok(schur_complement(m, *s)
            .map_err(|e| e.with_context(&ctx("trailing block")))?
            .cholesky()
            .map_err(|e| e.with_context(&ctx("Schur complement")))?
            .logdet()),
    }
}

/// `K = M^{-1} A` (column-wise) and `Q = A^T M^{-1} A`.
fn contrast_parts<T: Scalar>(m: &SymMatrix<T>, a: &Matrix<f64>) -> Result<(Vec<Vec<T>>, SymMatrix<T>)> {
    let chol = m.cholesky()?;
    let n = m.dim();
    let s = a.cols();
    let k: Vec<Vec<T>> = (0..s)
        .map(|j| chol.solve(&(0..n).map(|i| cst::<T>(a[(i, j)])).collect::<Vec<_>>()))
        .collect();
    let q = SymMatrix::from_fn(s, |i, j| (0..n).map(|l| cst::<T>(a[(l, i)]) * k[j][l]).sum());
    Ok((k, q))
}

/// The matrix `W` with `sensitivity(x) = tr(W m(x))`: `M^{-1}` for D and
/// `M^{-1} A (A^T M^{-1} A)^{-1} A^T M^{-1}` otherwise. For Ds this is `B^T C^{-1} B` with
/// `B = [I, -M12 M22^-]` and `C` the Schur complement, which also covers singular `M`.
pub fn sensitivity_kernel<T: Scalar>(m: &SymMatrix<T>, spec: &CriterionSpec) -> Result<SymMatrix<T>> {
    spec.check_dim(m.dim())?;
    let ctx = format!("{} sensitivity", spec.label());
    let a = match &spec.kind {
        Criterion::D => {
            return m.cholesky().map(|c| c.inverse()).map_err(|e| e.with_context(&ctx));
        }
        Criterion::DA(a) => a,
        Criterion::Ds(s) => return ds_kernel(m, *s).map_err(|e| e.with_context(&ctx)),
    };
    let (k, q) = contrast_parts(m, a).map_err(|e| e.with_context(&ctx))?;
    let qinv = q.cholesky().map_err(|e| e.with_context(&ctx))?.inverse();
    let s = q.dim();
    Ok(SymMatrix::from_fn(m.dim(), |a, b| {
        let mut acc = T::zero();
        for i in 0..s {
            for j in 0..s {
                acc = acc + k[i][a] * qinv.get(i, j) * k[j][b];
            }
        }
        acc
    }))
}

fn ds_kernel<T: Scalar>(m: &SymMatrix<T>, s: usize) -> Result<SymMatrix<T>> {
    let (c, x, _) = schur_parts(m, s)?;
    let cinv = c.cholesky()?.inverse();
    let n = m.dim();
    // column `a` of B
    let b = |i: usize, a: usize| -> T {
        if a < s {
            if a == i { T::one() } else { T::zero() }
        } else {
            -x[i][a - s]
        }
    };
    Ok(SymMatrix::from_fn(n, |p, q| {
        let mut acc = T::zero();
        for i in 0..s {
            for j in 0..s {
                acc = acc + b(i, p) * cinv.get(i, j) * b(j, q);
            }
        }
        acc
    }))
}

/// Sensitivity function of the equivalence theorem at `x`.
pub fn sensitivity<M: OutcomeModel + ?Sized>(
    model: &M,
    x: f64,
    design: &Design,
    gamma: &[f64],
    spec: &CriterionSpec,
) -> Result<f64> {
    let w = sensitivity_kernel(&info_matrix(model, design, gamma)?, spec)?;
    Ok(w.trace_product(&model.fim_single(x, gamma)?))
}

/// Efficiency of `xi` relative to `xi_star`: `exp((Phi(xi) - Phi(xi*)) / s)`, i.e. the
/// determinant ratio raised to `1/s` (`1/dim` for D).
pub fn efficiency<M: OutcomeModel + ?Sized>(
    model: &M,
    xi: &Design,
    xi_star: &Design,
    gamma: &[f64],
    spec: &CriterionSpec,
) -> Result<f64> {
    let a = criterion_value(&info_matrix(model, xi, gamma)?, spec)?;
    let b = criterion_value(&info_matrix(model, xi_star, gamma)?, spec)?;
    Ok(((a - b) / spec.bound).exp())
}

/// `(1 - efficiency) * 100`.
pub fn loss_percent(efficiency: f64) -> f64 {
    (1.0 - efficiency) * 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ParamVector;
    use crate::numerics::Interval;

    /// `eta = b1 + b2 x` with unit-variance Gaussian errors.
    pub(crate) struct Line {
        params: ParamVector,
    }

    impl Line {
        pub(crate) fn new() -> Self {
            Self {
                params: ParamVector::new(vec![("b1", 0.0), ("b2", 1.0)]),
            }
        }
    }

    impl OutcomeModel for Line {
        fn name(&self) -> String {
            "line".into()
        }
        fn params(&self) -> &ParamVector {
            &self.params
        }
        fn design_space(&self) -> Interval<f64> {
            Interval::new(-1.0, 1.0)
        }
        fn fim_single(&self, x: f64, _gamma: &[f64]) -> Result<SymMatrix<f64>> {
            self.check_point(x)?;
            Ok(SymMatrix::outer(&[1.0, x], 1.0))
        }
    }

    #[test]
    fn design_validation() {
        assert!(Design::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(Design::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
        assert!(Design::new(vec![0.0], vec![0.5, 0.5]).is_err());
        let d = Design::new(vec![1.0, 0.0], vec![0.25, 0.75]).unwrap();
        assert_eq!(d.points(), &[0.0, 1.0]);
        assert_eq!(d.weights(), &[0.75, 0.25]);
        let m = Design::from_unnormalized(vec![0.3, 0.3 + 1e-11, 0.9], vec![1.0, 1.0, 2.0]).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m.weights()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn info_matrix_basics() {
        let line = Line::new();
        let g = line.params().values().to_vec();
        let single = info_matrix(&line, &Design::single(0.4), &g).unwrap();
        assert_eq!(single, line.fim_single(0.4, &g).unwrap());

        let a = Design::new(vec![-1.0, 0.2], vec![0.3, 0.7]).unwrap();
        let b = Design::new(vec![0.5, 1.0], vec![0.6, 0.4]).unwrap();
        let mixed = info_matrix(&line, &a.mix(&b, 0.5).unwrap(), &g).unwrap();
        let mut avg = info_matrix(&line, &a, &g).unwrap().scaled(0.5);
        avg.add_scaled(0.5, &info_matrix(&line, &b, &g).unwrap());
        assert!(mixed.max_abs_diff(&avg) < 1e-15);

        let p = Design::new(vec![0.2, -1.0], vec![0.7, 0.3]).unwrap();
        assert_eq!(info_matrix(&line, &p, &g).unwrap(), info_matrix(&line, &a, &g).unwrap());
    }

    #[test]
    fn criterion_values() {
        let id = SymMatrix::<f64>::identity(3);
        assert_eq!(criterion_value(&id, &CriterionSpec::d(3).unwrap()).unwrap(), 0.0);
        let m = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let v = criterion_value(&m, &CriterionSpec::ds(1, 2).unwrap()).unwrap();
        assert!((v - 3f64.ln()).abs() < 1e-15);
        let a = CriterionSpec::da(Matrix::leading_selector(2, 1)).unwrap();
        assert!((criterion_value(&m, &a).unwrap() - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn criterion_spec_preconditions() {
        assert!(CriterionSpec::ds(2, 2).is_err());
        assert!(CriterionSpec::ds(0, 2).is_err());
        assert!(CriterionSpec::da(Matrix::zeros(3, 1)).is_err());
        assert!(CriterionSpec::da(Matrix::leading_selector(2, 2)).is_err());
        let spec = CriterionSpec::d(2).unwrap();
        assert!(criterion_value(&SymMatrix::<f64>::identity(3), &spec).is_err());
    }

    #[test]
    fn singular_matrix_carries_criterion_context() {
        let m = SymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        match criterion_value(&m, &CriterionSpec::d(2).unwrap()) {
            Err(Error::SingularMatrix { context, .. }) => assert!(context.contains("D criterion")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sensitivity_of_one_point_design_is_dimension() {
        let line = Line::new();
        let g = line.params().values().to_vec();
        // a single point is singular for the line; use a two point design and check the
        // trace identity instead, plus a 1-parameter sub-model through DA
        let d = Design::new(vec![-0.5, 0.7], vec![0.4, 0.6]).unwrap();
        let spec = CriterionSpec::d(2).unwrap();
        let sum: f64 = d
            .iter()
            .map(|(x, w)| w * sensitivity(&line, x, &d, &g, &spec).unwrap())
            .sum();
        assert!((sum - 2.0).abs() < 1e-12);
    }

    #[test]
    fn efficiency_of_design_against_itself_is_one() {
        let line = Line::new();
        let g = line.params().values().to_vec();
        let d = Design::new(vec![-1.0, 0.3, 1.0], vec![0.2, 0.3, 0.5]).unwrap();
        let e = efficiency(&line, &d, &d, &g, &CriterionSpec::d(2).unwrap()).unwrap();
        assert_eq!(e, 1.0);
        let opt = Design::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        // det M = 1 for the optimum, 1 - mean^2 ... computed directly
        let m = info_matrix(&line, &d, &g).unwrap();
        let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1).powi(2);
        let e = efficiency(&line, &d, &opt, &g, &CriterionSpec::d(2).unwrap()).unwrap();
        assert!((e - det.sqrt()).abs() < 1e-14);
        assert!((loss_percent(e) - (1.0 - det.sqrt()) * 100.0).abs() < 1e-12);
    }
}
