//! Two correlated binary outcomes with logit margins.

use super::{discrete_fim, CellProbs, DiscreteModel, OutcomeModel, ParamVector};
use crate::copulas::{logistic, tau_matched_mixture_at, CopulaSpec, Family, TauLink};
use crate::error::{Error, Result};
use crate::numerics::{Interval, SymMatrix};

/// Localized margin coefficients of the binary examples.
pub const BETA1: [f64; 2] = [-1.0, 1.0];
pub const BETA2: [f64; 2] = [-2.0, 0.5];

#[derive(Debug, Clone, PartialEq)]
pub enum BinaryDependence {
    /// A fixed copula; its own parameters follow the margin coefficients in `gamma`.
    Fixed(CopulaSpec<f64>),
    /// `alpha2 C1 + (1 - alpha2) C2`, both components at Kendall's `tau(x) =
    /// logistic(alpha1 x - c)`, `c = ln((1 - eps)/eps)`.
    TauMatched { c1: Family, c2: Family, epsilon: f64 },
}

/// `pi_i(x) = logistic(beta_i1 + beta_i2 x)`, `p11 = C(pi1, pi2)`.
///
/// Parameter layout: `Fixed` uses `(beta11, beta12, beta21, beta22, copula params...)`;
/// `TauMatched` uses `(alpha2, beta11, beta12, beta21, beta22, alpha1)` so that the mixture
/// weight is the leading block for Ds.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryLogitModel {
    dependence: BinaryDependence,
    params: ParamVector,
    x_max: f64,
}

impl BinaryLogitModel {
    pub fn with_copula(copula: CopulaSpec<f64>, beta1: [f64; 2], beta2: [f64; 2], x_max: f64) -> Result<Self> {
        if !(x_max > 0.0) {
            return Err(Error::domain("design space upper bound must be positive"));
        }
        let mut entries = vec![
            ("beta11".to_string(), beta1[0]),
            ("beta12".to_string(), beta1[1]),
            ("beta21".to_string(), beta2[0]),
            ("beta22".to_string(), beta2[1]),
        ];
        for (i, a) in copula.params().into_iter().enumerate() {
            entries.push((format!("copula{}", i + 1), a));
        }
        Ok(Self {
            dependence: BinaryDependence::Fixed(copula),
            params: ParamVector::new(entries),
            x_max,
        })
    }

    /// Tau-matched mixture; the link slope `alpha1` comes from `link` (calibrated to its
    /// tau interval).
    pub fn tau_matched(
        c1: Family,
        c2: Family,
        link: &TauLink<f64>,
        alpha2: f64,
        beta1: [f64; 2],
        beta2: [f64; 2],
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha2) {
            return Err(Error::domain(format!("alpha2 = {alpha2} outside [0, 1]")));
        }
        if c1 == Family::Product || c2 == Family::Product {
            return Err(Error::domain("tau matching needs two parametric families"));
        }
        let m = Self {
            dependence: BinaryDependence::TauMatched {
                c1,
                c2,
                epsilon: link.epsilon,
            },
            params: ParamVector::new(vec![
                ("alpha2", alpha2),
                ("beta11", beta1[0]),
                ("beta12", beta1[1]),
                ("beta21", beta2[0]),
                ("beta22", beta2[1]),
                ("alpha1", link.alpha1),
            ]),
            x_max: link.x_max,
        };
        // both families must reach tau over the whole design space
        for x in [0.0, link.x_max] {
            m.copula_at(x, m.params.values())?;
        }
        Ok(m)
    }

    pub fn dependence(&self) -> &BinaryDependence {
        &self.dependence
    }

    fn margin_coefficients(&self, gamma: &[f64]) -> ([f64; 2], [f64; 2]) {
        match self.dependence {
            BinaryDependence::Fixed(_) => ([gamma[0], gamma[1]], [gamma[2], gamma[3]]),
            BinaryDependence::TauMatched { .. } => ([gamma[1], gamma[2]], [gamma[3], gamma[4]]),
        }
    }

    /// Marginal success probabilities `(pi1, pi2)`.
    pub fn margins(&self, x: f64, gamma: &[f64]) -> (f64, f64) {
        let (b1, b2) = self.margin_coefficients(gamma);
        (logistic(b1[0] + b1[1] * x), logistic(b2[0] + b2[1] * x))
    }

    /// Kendall's tau of the mixture components at `x` (unclamped link, so that the slope is
    /// differentiable at the interval ends).
    pub fn tau_at(&self, x: f64, gamma: &[f64]) -> Option<f64> {
        match self.dependence {
            BinaryDependence::TauMatched { epsilon, .. } => {
                let c = ((1.0 - epsilon) / epsilon).ln();
                Some(logistic(gamma[5] * x - c))
            }
            BinaryDependence::Fixed(_) => None,
        }
    }

    pub fn copula_at(&self, x: f64, gamma: &[f64]) -> Result<CopulaSpec<f64>> {
        match &self.dependence {
            BinaryDependence::Fixed(c) => c.with_params(&gamma[4..]),
            BinaryDependence::TauMatched { c1, c2, .. } => {
                let tau = self.tau_at(x, gamma).expect("tau-matched model");
                tau_matched_mixture_at(*c1, *c2, tau, gamma[0])
            }
        }
    }
}

impl OutcomeModel for BinaryLogitModel {
    fn name(&self) -> String {
        match &self.dependence {
            BinaryDependence::Fixed(c) => format!("binary-logit[{}]", c.label()),
            BinaryDependence::TauMatched { c1, c2, .. } => {
                format!("binary-logit[{}-{}]", c1.code(), c2.code())
            }
        }
    }

    fn params(&self) -> &ParamVector {
        &self.params
    }

    fn design_space(&self) -> Interval<f64> {
        Interval::new(0.0, self.x_max)
    }

    fn fim_single(&self, x: f64, gamma: &[f64]) -> Result<SymMatrix<f64>> {
        discrete_fim(self, x, gamma)
    }
}

impl DiscreteModel for BinaryLogitModel {
    fn cell_probs(&self, x: f64, gamma: &[f64]) -> Result<CellProbs> {
        self.check_point(x)?;
        self.check_gamma(gamma)?;
        let (pi1, pi2) = self.margins(x, gamma);
        let copula = self.copula_at(x, gamma)?;
        let p11 = copula.cdf(pi1, pi2)?;
        CellProbs::from_margins(pi1, pi2, p11, 1e-12)
    }
}
