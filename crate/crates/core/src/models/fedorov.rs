//! Bivariate polynomial regression with unit-variance Gaussian margins coupled by a copula:
//! `Y1 = b1 + b2 x + b3 x^2 + e1`, `Y2 = b4 x + b5 x^3 + b6 x^4 + e2`, `x` in `[0, 1]`.

use std::sync::OnceLock;

use rayon::prelude::*;

use super::{OutcomeModel, ParamVector};
use crate::copulas::CopulaSpec;
use crate::error::{Error, Result};
use crate::numerics::{jacobian_fd, normal, Interval, Matrix, QuadratureRule, SymMatrix, DEFAULT_STEP};

/// Normal-score range integrated over; the mass outside is about 1e-15.
const Z_LIMIT: f64 = 8.0;
const PANELS: usize = 16;
const PANEL_NODES: usize = 16;

/// Parameter layout: `(beta1, ..., beta6, copula params...)`.
#[derive(Debug)]
pub struct FedorovModel {
    copula: CopulaSpec<f64>,
    params: ParamVector,
    score_cov: OnceLock<Result<SymMatrix<f64>>>,
}

impl Clone for FedorovModel {
    fn clone(&self) -> Self {
        Self {
            copula: self.copula.clone(),
            params: self.params.clone(),
            score_cov: OnceLock::new(),
        }
    }
}

/// Regression vectors of the two mean functions.
pub fn regressors(x: f64) -> ([f64; 3], [f64; 3]) {
    let x2 = x * x;
    ([1.0, x, x2], [x, x2 * x, x2 * x2])
}

impl FedorovModel {
    pub fn new(copula: CopulaSpec<f64>, beta: [f64; 6]) -> Self {
        let mut entries: Vec<(String, f64)> =
            (0..6).map(|i| (format!("beta{}", i + 1), beta[i])).collect();
        for (i, a) in copula.params().into_iter().enumerate() {
            entries.push((format!("alpha{}", i + 1), a));
        }
        Self {
            copula,
            params: ParamVector::new(entries),
            score_cov: OnceLock::new(),
        }
    }

    pub fn copula(&self) -> &CopulaSpec<f64> {
        &self.copula
    }

    /// `E[s s^T]` for the score `s = (d/d eta1, d/d eta2, d/d alpha...)` of one observation,
    /// which does not depend on `x` or `beta`.
    pub fn score_covariance(&self) -> Result<SymMatrix<f64>> {
        self.score_cov
            .get_or_init(|| score_covariance(&self.copula))
            .clone()
    }

    fn design_matrix(&self, x: f64) -> Matrix<f64> {
        let l = self.copula.params().len();
        let (f1, f2) = regressors(x);
        let mut b = Matrix::zeros(2 + l, 6 + l);
        for i in 0..3 {
            b[(0, i)] = f1[i];
            b[(1, 3 + i)] = f2[i];
        }
        for j in 0..l {
            b[(2 + j, 6 + j)] = 1.0;
        }
        b
    }
}

/// Score covariance in the conditional (Rosenblatt) coordinates `u = Phi(z1)`,
/// `v = C^{-1}(Phi(w) | u)`, where `(z1, w)` are independent standard normals.
pub fn score_covariance(copula: &CopulaSpec<f64>) -> Result<SymMatrix<f64>> {
    let theta = copula.params();
    let l = theta.len();
    let dim = 2 + l;
    let rule = QuadratureRule::composite(PANEL_NODES, PANELS, Interval::new(-Z_LIMIT, Z_LIMIT))?;
    let rows: Vec<Result<Vec<f64>>> = rule
        .nodes
        .par_iter()
        .zip(&rule.weights)
        .map(|(&z1, &wz1)| {
            let mut acc = vec![0.0; dim * dim];
            let u = normal::cdf(z1);
            let phi1 = normal::pdf(z1);
            for (&w, &ww) in rule.nodes.iter().zip(&rule.weights) {
                let t = normal::cdf(w);
                let (v, vbar) = copula.cond_inverse_pair(u, t)?;
                let z2 = if v <= 0.5 {
                    normal::quantile(v)
                } else {
                    normal::quantile_upper(vbar)
                };
                let v = v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
                let mut s = Vec::with_capacity(dim);
                s.push(z1 - phi1 * copula.dlog_pdf_du(u, v)?);
                s.push(z2 - normal::pdf(z2) * copula.dlog_pdf_dv(u, v)?);
                if l > 0 {
                    let cols = jacobian_fd(
                        |p| Ok(vec![copula.with_params(p)?.log_pdf(u, v)?]),
                        &theta,
                        DEFAULT_STEP,
                    )?;
                    s.extend(cols.iter().map(|c| c[0]));
                }
                if s.iter().any(|x| !x.is_finite()) {
                    return Err(Error::numerical(format!(
                        "non-finite score at normal scores ({z1}, {z2})"
                    )));
                }
                let weight = wz1 * phi1 * ww * normal::pdf(w);
                for i in 0..dim {
                    for j in i..dim {
                        acc[i * dim + j] += weight * s[i] * s[j];
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; dim * dim];
    for r in rows {
        for (t, a) in total.iter_mut().zip(r?) {
            *t += a;
        }
    }
    Ok(SymMatrix::from_fn(dim, |i, j| total[i * dim + j]))
}

impl OutcomeModel for FedorovModel {
    fn name(&self) -> String {
        format!("fedorov[{}]", self.copula.label())
    }

    fn params(&self) -> &ParamVector {
        &self.params
    }

    fn design_space(&self) -> Interval<f64> {
        Interval::new(0.0, 1.0)
    }

    fn fim_single(&self, x: f64, gamma: &[f64]) -> Result<SymMatrix<f64>> {
        self.check_point(x)?;
        self.check_gamma(gamma)?;
        // location margins: only the copula parameters enter the score covariance
        let cop = &gamma[6..];
        let s = if cop == &self.params.values()[6..] {
            self.score_covariance()?
        } else {
            score_covariance(&self.copula.with_params(cop)?)?
        };
        Ok(s.congruence(&self.design_matrix(x)))
    }
}
