//! Two dichotomized damage measurements `Y`, `Z` with a bivariate Weibull (shock model)
//! distribution, or with the same margins coupled by an asymmetric Clayton copula.
//!
//! With `s = y^kappa`, `t = z^kappa` the shock model has three independent exponential shocks
//! with rates `beta1` (component 1), `beta2` (component 2) and `beta3` (both); after one
//! component fails the survivor continues with rate `beta3 + beta5` (component 2) or
//! `beta3 + beta4` (component 1). The predictors are
//! `-ln(beta3 + beta5) = theta0 + theta1 x`, `-ln(beta3 + beta4) = theta0 + theta2 x`,
//! `-ln(beta1 + beta2 + beta3) = theta0 + theta3 x`, with `theta1 = theta2 + nu1` and
//! `beta1 = beta2 + nu2`.

use super::{discrete_fim, CellProbs, DiscreteModel, OutcomeModel, ParamVector};
use crate::copulas::{CopulaSpec, Family};
use crate::error::{Error, Result};
use crate::numerics::{tensor, Interval, QuadratureRule, SymMatrix};

/// Cut-offs `(zeta1, zeta2)`: a component counts as failed once its damage reaches the cut-off.
pub const CUTOFFS: (f64, f64) = (0.8, 0.7);

/// Localized `(theta0, theta2, theta3, nu1, nu2, beta2, kappa)`.
pub const LOCALIZED: [f64; 7] = [-2.0, 5.0, 2.0, -1.0, 0.1, 0.2, 2.0];

const QUAD_ORDER: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeibullDependence {
    /// The shock model itself, including its singular component on `y = z`.
    MarshallOlkin,
    /// Margins of the shock model joined by a Khoudraji-transformed Clayton copula.
    KhoudrajiClayton { alpha1: f64, alpha2: f64, alpha3: f64 },
}

/// Rates at one design point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullRates {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    /// `beta3 + beta4`
    pub r4: f64,
    /// `beta3 + beta5`
    pub r5: f64,
    pub kappa: f64,
}

impl WeibullRates {
    pub fn beta4(&self) -> f64 {
        self.r4 - self.beta3
    }

    pub fn beta5(&self) -> f64 {
        self.r5 - self.beta3
    }

    /// `beta1 + beta2 + beta3`
    pub fn total(&self) -> f64 {
        self.beta1 + self.beta2 + self.beta3
    }

    /// `P(Y >= y)`.
    pub fn survival_y(&self, y: f64) -> f64 {
        let a = y.powf(self.kappa);
        let r = self.total();
        (-r * a).exp() * (1.0 + self.beta2 * a * expm1_ratio((r - self.r4) * a))
    }

    /// `P(Z >= z)`.
    pub fn survival_z(&self, z: f64) -> f64 {
        let b = z.powf(self.kappa);
        let r = self.total();
        (-r * b).exp() * (1.0 + self.beta1 * b * expm1_ratio((r - self.r5) * b))
    }

    /// Joint density on `{y < z}`.
    pub fn density_y_first(&self, y: f64, z: f64) -> f64 {
        let k = self.kappa;
        let (s, t) = (y.powf(k), z.powf(k));
        self.beta1 * self.r5 * k * k * (y * z).powf(k - 1.0)
            * (-self.r5 * t - (self.beta1 + self.beta2 + self.beta3 - self.r5) * s).exp()
    }

    /// Joint density on `{z < y}`.
    pub fn density_z_first(&self, y: f64, z: f64) -> f64 {
        let k = self.kappa;
        let (s, t) = (y.powf(k), z.powf(k));
        self.beta2 * self.r4 * k * k * (y * z).powf(k - 1.0)
            * (-self.r4 * s - (self.beta1 + self.beta2 + self.beta3 - self.r4) * t).exp()
    }

    /// Density of the singular component along `y = z`.
    pub fn density_diagonal(&self, y: f64) -> f64 {
        let k = self.kappa;
        self.beta3 * k * y.powf(k - 1.0) * (-self.total() * y.powf(k)).exp()
    }
}

/// `expm1(d) / d`, equal to 1 at `d = 0`.
fn expm1_ratio(d: f64) -> f64 {
    if d.abs() < 1e-8 {
        1.0 + 0.5 * d
    } else {
        d.exp_m1() / d
    }
}

/// Parameter layout: shock model `(nu1, nu2, theta0, theta2, theta3, beta2, kappa)`;
/// asymmetric Clayton `(nu1, nu2, alpha2, alpha3, theta0, theta2, theta3, beta2, kappa, alpha1)`,
/// so that the asymmetry block `(nu1, nu2, alpha2, alpha3)` leads.
#[derive(Debug, Clone, PartialEq)]
pub struct WeibullModel {
    dependence: WeibullDependence,
    cutoffs: (f64, f64),
    params: ParamVector,
}

impl WeibullModel {
    /// `base = (theta0, theta2, theta3, nu1, nu2, beta2, kappa)`.
    pub fn new(dependence: WeibullDependence, base: [f64; 7], cutoffs: (f64, f64)) -> Result<Self> {
        let [theta0, theta2, theta3, nu1, nu2, beta2, kappa] = base;
        if !(cutoffs.0 > 0.0 && cutoffs.1 > 0.0) {
            return Err(Error::domain("cut-offs must be positive"));
        }
        let params = match dependence {
            WeibullDependence::MarshallOlkin => ParamVector::new(vec![
                ("nu1", nu1),
                ("nu2", nu2),
                ("theta0", theta0),
                ("theta2", theta2),
                ("theta3", theta3),
                ("beta2", beta2),
                ("kappa", kappa),
            ]),
            WeibullDependence::KhoudrajiClayton {
                alpha1,
                alpha2,
                alpha3,
            } => {
                CopulaSpec::khoudraji(Family::Clayton, alpha1, alpha2, alpha3)?;
                ParamVector::new(vec![
                    ("nu1", nu1),
                    ("nu2", nu2),
                    ("alpha2", alpha2),
                    ("alpha3", alpha3),
                    ("theta0", theta0),
                    ("theta2", theta2),
                    ("theta3", theta3),
                    ("beta2", beta2),
                    ("kappa", kappa),
                    ("alpha1", alpha1),
                ])
            }
        };
        let m = Self {
            dependence,
            cutoffs,
            params,
        };
        for x in [0.0, 0.5, 1.0] {
            m.rates(x, m.params.values())?;
        }
        Ok(m)
    }

    pub fn localized(dependence: WeibullDependence) -> Result<Self> {
        Self::new(dependence, LOCALIZED, CUTOFFS)
    }

    pub fn dependence(&self) -> WeibullDependence {
        self.dependence
    }

    pub fn cutoffs(&self) -> (f64, f64) {
        self.cutoffs
    }

    /// `(theta0, theta2, theta3, nu1, nu2, beta2, kappa)` from `gamma`.
    fn margin_params(&self, g: &[f64]) -> [f64; 7] {
        match self.dependence {
            WeibullDependence::MarshallOlkin => [g[2], g[3], g[4], g[0], g[1], g[5], g[6]],
            WeibullDependence::KhoudrajiClayton { .. } => [g[4], g[5], g[6], g[0], g[1], g[7], g[8]],
        }
    }

    /// Solves the predictor equations at `x`.
    pub fn rates(&self, x: f64, gamma: &[f64]) -> Result<WeibullRates> {
        let [theta0, theta2, theta3, nu1, nu2, beta2, kappa] = self.margin_params(gamma);
        let theta1 = theta2 + nu1;
        let r5 = (-(theta0 + theta1 * x)).exp();
        let r4 = (-(theta0 + theta2 * x)).exp();
        let total = (-(theta0 + theta3 * x)).exp();
        let beta1 = beta2 + nu2;
        let beta3 = total - beta1 - beta2;
        let rates = WeibullRates {
            beta1,
            beta2,
            beta3,
            r4,
            r5,
            kappa,
        };
        if !(beta1 > 0.0 && beta2 > 0.0 && beta3 > 0.0 && kappa > 0.0) || !(r4.is_finite() && r5.is_finite()) {
            return Err(Error::model(format!(
                "non-positive shock rate at x = {x}: beta1 = {beta1}, beta2 = {beta2}, beta3 = {beta3}, kappa = {kappa}"
            )));
        }
        Ok(rates)
    }

    /// `P(Y < zeta1, Z < zeta2)` for the shock model by quadrature over the two triangles
    /// `{y < z}`, `{z < y}` plus the singular diagonal. Integrated in the times `s = y^kappa`,
    /// `t = z^kappa`, where each piece of the density is a plain exponential.
    fn p00_shock(&self, r: &WeibullRates) -> Result<f64> {
        let k = r.kappa;
        let (a, b) = (self.cutoffs.0.powf(k), self.cutoffs.1.powf(k));
        let m = a.min(b);
        let tot = r.total();
        let unit = QuadratureRule::gauss_legendre(QUAD_ORDER, Interval::unit())?;
        // s = m u, t = s + (b - s) v
        let upper = tensor(
            |u: f64, v: f64| {
                let s = m * u;
                let t = s + (b - s) * v;
                r.beta1 * r.r5 * (-r.r5 * t - (tot - r.r5) * s).exp() * m * (b - s)
            },
            &unit,
            &unit,
        )?;
        let lower = tensor(
            |u: f64, v: f64| {
                let t = m * u;
                let s = t + (a - t) * v;
                r.beta2 * r.r4 * (-r.r4 * s - (tot - r.r4) * t).exp() * m * (a - t)
            },
            &unit,
            &unit,
        )?;
        let diag = unit.integrate(|u: f64| r.beta3 * (-tot * m * u).exp() * m)?;
        Ok(upper + lower + diag)
    }

    pub fn copula(&self, gamma: &[f64]) -> Result<Option<CopulaSpec<f64>>> {
        match self.dependence {
            WeibullDependence::MarshallOlkin => Ok(None),
            WeibullDependence::KhoudrajiClayton { .. } => Ok(Some(CopulaSpec::khoudraji(
                Family::Clayton,
                gamma[9],
                gamma[2],
                gamma[3],
            )?)),
        }
    }
}

impl OutcomeModel for WeibullModel {
    fn name(&self) -> String {
        match self.dependence {
            WeibullDependence::MarshallOlkin => "weibull[shock]".into(),
            WeibullDependence::KhoudrajiClayton {
                alpha1,
                alpha2,
                alpha3,
            } => format!("weibull[khoudraji-clayton({alpha1}, {alpha2}, {alpha3})]"),
        }
    }

    fn params(&self) -> &ParamVector {
        &self.params
    }

    fn design_space(&self) -> Interval<f64> {
        Interval::new(0.0, 1.0)
    }

    fn fim_single(&self, x: f64, gamma: &[f64]) -> Result<SymMatrix<f64>> {
        discrete_fim(self, x, gamma)
    }
}

impl DiscreteModel for WeibullModel {
    fn cell_probs(&self, x: f64, gamma: &[f64]) -> Result<CellProbs> {
        self.check_point(x)?;
        self.check_gamma(gamma)?;
        let r = self.rates(x, gamma)?;
        let sy = r.survival_y(self.cutoffs.0);
        let sz = r.survival_z(self.cutoffs.1);
        let p00 = match self.copula(gamma)? {
            None => self.p00_shock(&r)?,
            Some(c) => c.cdf(1.0 - sy, 1.0 - sz)?,
        };
        let p11 = sy + sz - 1.0 + p00;
        CellProbs::checked(p00, sz - p11, sy - p11, p11, 1e-9)
    }
}
