//! Outcome models: map a design point `x` and a parameter vector `gamma` to an outcome
//! distribution and its single-observation Fisher information `m(x, gamma)`.

pub mod binary;
pub mod fedorov;
pub mod weibull;

pub use binary::{BinaryDependence, BinaryLogitModel};
pub use fedorov::FedorovModel;
pub use weibull::{WeibullDependence, WeibullModel, WeibullRates};

use crate::error::{Error, Result};
use crate::numerics::{jacobian_fd, Interval, SymMatrix, DEFAULT_STEP};

/// Named parameter vector with a stable ordering. Criteria select leading blocks by index, so
/// each model documents its layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    names: Vec<String>,
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new<S: Into<String>>(entries: Vec<(S, f64)>) -> Self {
        let (names, values) = entries.into_iter().map(|(n, v)| (n.into(), v)).unzip();
        Self { names, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Joint probabilities of the four outcome cells, `p_uv = P(U = u, V = v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellProbs {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl CellProbs {
    /// Validates the simplex. Values in `(-neg_tol, 0)` are clamped to 0 (cancellation noise in
    /// inclusion-exclusion); anything more negative or a total off by more than `1e-8` is a
    /// model error.
    pub fn checked(p00: f64, p01: f64, p10: f64, p11: f64, neg_tol: f64) -> Result<Self> {
        let raw = [p00, p01, p10, p11];
        if raw.iter().any(|p| !p.is_finite()) {
            return Err(Error::numerical(format!("non-finite cell probability in {raw:?}")));
        }
        if let Some(p) = raw.iter().find(|&&p| p < -neg_tol || p > 1.0 + neg_tol) {
            return Err(Error::model(format!(
                "cell probability {p} outside [0, 1]; the copula violates the Frechet bounds"
            )));
        }
        let total: f64 = raw.iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::model(format!("cell probabilities sum to {total}")));
        }
        let c = |p: f64| p.clamp(0.0, 1.0);
        Ok(Self {
            p00: c(p00),
            p01: c(p01),
            p10: c(p10),
            p11: c(p11),
        })
    }

    /// From the two marginal success probabilities and `p11` (binary layout).
    pub fn from_margins(pi1: f64, pi2: f64, p11: f64, neg_tol: f64) -> Result<Self> {
        Self::checked(1.0 - pi1 - pi2 + p11, pi2 - p11, pi1 - p11, p11, neg_tol)
    }

    /// `[p00, p01, p10, p11]`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    pub fn sum(&self) -> f64 {
        self.to_array().iter().sum()
    }
}

/// A regression model whose single-point information can be evaluated.
pub trait OutcomeModel: Send + Sync {
    /// Short identifier used in reports.
    fn name(&self) -> String;

    /// Localized parameter values, in the model's fixed layout.
    fn params(&self) -> &ParamVector;

    fn design_space(&self) -> Interval<f64>;

    /// Single-observation Fisher information `m(x, gamma)`.
    fn fim_single(&self, x: f64, gamma: &[f64]) -> Result<SymMatrix<f64>>;

    fn dim(&self) -> usize {
        self.params().len()
    }

    /// `m(x, gamma~)` at the localized values.
    fn fim_localized(&self, x: f64) -> Result<SymMatrix<f64>> {
        self.fim_single(x, self.params().values())
    }

    fn check_point(&self, x: f64) -> Result<()> {
        let d = self.design_space();
        let slack = 1e-12 * (d.hi - d.lo).abs().max(1.0);
        if !(x >= d.lo - slack && x <= d.hi + slack) {
            return Err(Error::domain(format!(
                "x = {x} outside the design space [{}, {}]",
                d.lo, d.hi
            )));
        }
        Ok(())
    }

    fn check_gamma(&self, gamma: &[f64]) -> Result<()> {
        if gamma.len() != self.dim() {
            return Err(Error::domain(format!(
                "{} expects {} parameters, got {}",
                self.name(),
                self.dim(),
                gamma.len()
            )));
        }
        Ok(())
    }
}

/// Models with four outcome cells.
pub trait DiscreteModel: OutcomeModel {
    fn cell_probs(&self, x: f64, gamma: &[f64]) -> Result<CellProbs>;
}

/// `sum_cells (dp/dgamma)(dp/dgamma)^T / p`, gradients by central differences.
pub fn discrete_fim<M: DiscreteModel + ?Sized>(
    model: &M,
    x: f64,
    gamma: &[f64],
) -> Result<SymMatrix<f64>> {
    model.check_point(x)?;
    model.check_gamma(gamma)?;
    let p = model.cell_probs(x, gamma)?.to_array();
    if let Some(i) = p.iter().position(|&v| v <= 0.0) {
        return Err(Error::model(format!(
            "cell {} has zero probability at x = {x}; information undefined",
            ["p00", "p01", "p10", "p11"][i]
        )));
    }
    let cols = jacobian_fd(
        |g| Ok(model.cell_probs(x, g)?.to_array().to_vec()),
        gamma,
        DEFAULT_STEP,
    )?;
    let n = gamma.len();
    Ok(SymMatrix::from_fn(n, |i, j| {
        (0..4).map(|k| cols[i][k] * cols[j][k] / p[k]).sum()
    }))
}

/// Independent check of [`discrete_fim`]: `sum_cells p * (-Hessian of log p)`, Hessians by
/// nested finite differences. Slow; intended for tests.
pub fn multinomial_fim_oracle<M: DiscreteModel + ?Sized>(
    model: &M,
    x: f64,
    gamma: &[f64],
) -> Result<SymMatrix<f64>> {
    model.check_point(x)?;
    model.check_gamma(gamma)?;
    let n = gamma.len();
    let p = model.cell_probs(x, gamma)?.to_array();
    let log_p = |g: &[f64]| -> Result<Vec<f64>> {
        Ok(model.cell_probs(x, g)?.to_array().iter().map(|v| v.ln()).collect())
    };
    let h = 1e-3;
    // grad[i][k] = d log p_k / d gamma_i, flattened for the outer differentiation
    let grad = |g: &[f64]| -> Result<Vec<f64>> {
        Ok(jacobian_fd(log_p, g, h)?.into_iter().flatten().collect())
    };
    let outer = jacobian_fd(grad, gamma, h)?;
    Ok(SymMatrix::from_fn(n, |i, j| {
        let hij = |a: usize, b: usize, k: usize| outer[a][b * 4 + k];
        -(0..4)
            .map(|k| p[k] * 0.5 * (hij(i, j, k) + hij(j, i, k)))
            .sum::<f64>()
    }))
}
