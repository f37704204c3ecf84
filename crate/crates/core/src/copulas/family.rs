//! One-parameter Archimedean families and the product copula.
//!
//! All `*_unchecked` evaluators assume `u, v` already validated; boundary handling lives in
//! [`super::CopulaSpec`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::find_root;
use crate::scalar::{cst, to_f64, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Product,
    Clayton,
    Gumbel,
    Frank,
    Joe,
}

impl Family {
    pub const ARCHIMEDEAN: [Family; 4] = [Family::Clayton, Family::Gumbel, Family::Frank, Family::Joe];

    pub fn name(self) -> &'static str {
        match self {
            Family::Product => "product",
            Family::Clayton => "clayton",
            Family::Gumbel => "gumbel",
            Family::Frank => "frank",
            Family::Joe => "joe",
        }
    }

    /// One-letter code used in table headers (`C-G`, `J-F`, ...).
    pub fn code(self) -> &'static str {
        match self {
            Family::Product => "P",
            Family::Clayton => "C",
            Family::Gumbel => "G",
            Family::Frank => "F",
            Family::Joe => "J",
        }
    }

    /// Bracket searched by the tau inversion.
    pub fn tau_bracket(self) -> Option<(f64, f64)> {
        match self {
            Family::Product => None,
            Family::Clayton => Some((1e-6, 1e3)),
            Family::Gumbel | Family::Joe => Some((1.0 + 1e-6, 1e3)),
            Family::Frank => Some((1e-6, 5e2)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "product" | "independence" | "p" => Ok(Family::Product),
            "clayton" | "c" => Ok(Family::Clayton),
            "gumbel" | "g" => Ok(Family::Gumbel),
            "frank" | "f" => Ok(Family::Frank),
            "joe" | "j" => Ok(Family::Joe),
            other => Err(Error::domain(format!("unknown copula family `{other}`"))),
        }
    }
}

/// A single-parameter family member `C_{alpha1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseCopula<T> {
    family: Family,
    alpha1: T,
}

/// `ln(e^a + e^b)` without overflow.
#[inline]
fn log_add_exp<T: Scalar>(a: T, b: T) -> T {
    let m = a.max(b);
    if m == T::neg_infinity() {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl<T: Scalar> BaseCopula<T> {
    /// Validates the parameter domain: Clayton `> 0`, Gumbel and Joe `>= 1`, Frank `!= 0`.
    pub fn new(family: Family, alpha1: T) -> Result<Self> {
        let ok = alpha1.is_finite()
            && match family {
                Family::Product => true,
                Family::Clayton => alpha1 > T::zero(),
                Family::Gumbel | Family::Joe => alpha1 >= T::one(),
                Family::Frank => alpha1 != T::zero(),
            };
        if !ok {
            return Err(Error::domain(format!(
                "parameter alpha1 = {} outside the {} domain ({})",
                to_f64(alpha1),
                family,
                match family {
                    Family::Clayton => "alpha1 > 0",
                    Family::Gumbel | Family::Joe => "alpha1 >= 1",
                    Family::Frank => "alpha1 != 0",
                    Family::Product => "none",
                }
            )));
        }
        let alpha1 = if family == Family::Product { T::zero() } else { alpha1 };
        Ok(Self { family, alpha1 })
    }

    pub fn product() -> Self {
        Self {
            family: Family::Product,
            alpha1: T::zero(),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha1(&self) -> T {
        self.alpha1
    }

    pub fn has_parameter(&self) -> bool {
        self.family != Family::Product
    }

    pub(crate) fn cdf_unchecked(&self, u: T, v: T) -> T {
        let th = self.alpha1;
        match self.family {
            Family::Product => u * v,
            Family::Clayton => {
                let log_a = self.clayton_log_a(u, v);
                (-log_a / th).exp()
            }
            Family::Gumbel => {
                let a = gumbel_a(-u.ln(), -v.ln(), th);
                (-a).exp()
            }
            Family::Frank => {
                if th < T::zero() {
                    let pos = Self { family: Family::Frank, alpha1: -th };
                    return u - pos.cdf_unchecked(u, T::one() - v);
                }
                let m = u.min(v);
                let b = frank_b(u, v, th);
                m + ((-(-th).exp()).ln_1p() - b.ln()) / th
            }
            Family::Joe => {
                let s = joe_s(u, v, th);
                T::one() - s.powf(T::one() / th)
            }
        }
    }

    /// `dC/du` (conditional distribution of `V` given `U = u`).
    pub(crate) fn h1_unchecked(&self, u: T, v: T) -> T {
        let th = self.alpha1;
        match self.family {
            Family::Product => v,
            Family::Clayton => {
                let log_a = self.clayton_log_a(u, v);
                ((-th - T::one()) * u.ln() - (T::one() / th + T::one()) * log_a).exp()
            }
            Family::Gumbel => {
                let (x, y) = (-u.ln(), -v.ln());
                let a = gumbel_a(x, y, th);
                if y == T::infinity() {
                    return T::zero();
                }
                // C * (x/A)^(th-1) / u
                ((-a) + (th - T::one()) * (x / a).ln() - u.ln()).exp()
            }
            Family::Frank => {
                if th < T::zero() {
                    let pos = Self { family: Family::Frank, alpha1: -th };
                    return T::one() - pos.h1_unchecked(u, T::one() - v);
                }
                let m = u.min(v);
                let b = frank_b(u, v, th);
                (-th * (u - m)).exp() * (-(-th * v).exp_m1()) / b
            }
            Family::Joe => {
                let (ub, vb) = (T::one() - u, T::one() - v);
                let s = joe_s(u, v, th);
                let b = vb.powf(th);
                s.powf(T::one() / th - T::one()) * ub.powf(th - T::one()) * (T::one() - b)
            }
        }
    }

    pub(crate) fn h2_unchecked(&self, u: T, v: T) -> T {
        // every base family is exchangeable
        self.h1_unchecked(v, u)
    }

    pub(crate) fn log_pdf_unchecked(&self, u: T, v: T) -> T {
        let th = self.alpha1;
        let one = T::one();
        let two = cst::<T>(2.0);
        match self.family {
            Family::Product => T::zero(),
            Family::Clayton => {
                let log_a = self.clayton_log_a(u, v);
                (one + th).ln() - (th + one) * (u.ln() + v.ln()) - (two + one / th) * log_a
            }
            Family::Gumbel => {
                let (x, y) = (-u.ln(), -v.ln());
                let a = gumbel_a(x, y, th);
                -a + x + y + (th - one) * (x.ln() + y.ln()) + (one - two * th) * a.ln()
                    + (a + th - one).ln()
            }
            Family::Frank => {
                if th < T::zero() {
                    let pos = Self { family: Family::Frank, alpha1: -th };
                    return pos.log_pdf_unchecked(u, one - v);
                }
                let (m, mx) = (u.min(v), u.max(v));
                let b = frank_b(u, v, th);
                th.ln() + (-(-th).exp_m1()).ln() - th * (mx - m) - two * b.ln()
            }
            Family::Joe => {
                let (ub, vb) = (one - u, one - v);
                let s = joe_s(u, v, th);
                (one / th - two) * s.ln() + (th - one) * (ub.ln() + vb.ln()) + (th - one + s).ln()
            }
        }
    }

    pub(crate) fn pdf_unchecked(&self, u: T, v: T) -> T {
        match self.family {
            Family::Product => T::one(),
            _ => self.log_pdf_unchecked(u, v).exp(),
        }
    }

    /// Analytic `d/du log c(u, v)`.
    pub(crate) fn dlog_pdf_du_unchecked(&self, u: T, v: T) -> T {
        let th = self.alpha1;
        let one = T::one();
        let two = cst::<T>(2.0);
        match self.family {
            Family::Product => T::zero(),
            Family::Clayton => {
                let log_a = self.clayton_log_a(u, v);
                -(th + one) / u + (two * th + one) * ((-th - one) * u.ln() - log_a).exp()
            }
            Family::Gumbel => {
                let (x, y) = (-u.ln(), -v.ln());
                let a = gumbel_a(x, y, th);
                let ax = (x / a).powf(th - one);
                (ax - one - (th - one) / x - (one - two * th) * ax / a - ax / (a + th - one)) / u
            }
            Family::Frank => {
                if th < T::zero() {
                    let pos = Self { family: Family::Frank, alpha1: -th };
                    return pos.dlog_pdf_du_unchecked(u, one - v);
                }
                th * (two * self.h1_unchecked(u, v) - one)
            }
            Family::Joe => {
                let (ub, vb) = (one - u, one - v);
                let s = joe_s(u, v, th);
                let s_u = -th * ub.powf(th - one) * (one - vb.powf(th));
                (one / th - two) * s_u / s - (th - one) / ub + s_u / (th - one + s)
            }
        }
    }

    pub(crate) fn dlog_pdf_dv_unchecked(&self, u: T, v: T) -> T {
        self.dlog_pdf_du_unchecked(v, u)
    }

    /// Solves `h1(u, v) = t` for `v`.
    pub(crate) fn cond_inverse_unchecked(&self, u: T, t: T) -> Result<T> {
        let th = self.alpha1;
        let one = T::one();
        match self.family {
            Family::Product => Ok(t),
            Family::Clayton => {
                let b = (-th / (one + th) * t.ln()).exp_m1();
                let l = log_add_exp(T::zero(), b.ln() - th * u.ln());
                Ok((-l / th).exp())
            }
            Family::Frank if th > T::zero() => {
                let a = -th * u + (one - t).ln();
                let num = log_add_exp(a, t.ln() - th);
                let den = log_add_exp(a, t.ln());
                Ok(-(num - den) / th)
            }
            _ => generic_cond_inverse(|v| self.h1_unchecked(u, v), t),
        }
    }

    /// [`Self::cond_inverse_unchecked`] together with `1 - v`, the latter computed without
    /// cancellation where a closed form allows it.
    pub(crate) fn cond_inverse_pair_unchecked(&self, u: T, t: T) -> Result<(T, T)> {
        let th = self.alpha1;
        let one = T::one();
        match self.family {
            Family::Clayton => {
                let b = (-th / (one + th) * t.ln()).exp_m1();
                let l = log_add_exp(T::zero(), b.ln() - th * u.ln());
                Ok(((-l / th).exp(), -(-l / th).exp_m1()))
            }
            Family::Product => Ok((t, one - t)),
            _ => {
                let v = self.cond_inverse_unchecked(u, t)?;
                Ok((v, one - v))
            }
        }
    }

    fn clayton_log_a(&self, u: T, v: T) -> T {
        let th = self.alpha1;
        let (a, b) = (-th * u.ln(), -th * v.ln());
        let m = a.max(b);
        m + ((a - m).exp() + (b - m).exp() - (-m).exp()).ln()
    }
}

/// `(x^th + y^th)^(1/th)` with scaling by the larger argument.
fn gumbel_a<T: Scalar>(x: T, y: T, th: T) -> T {
    let m = x.max(y);
    if m == T::zero() {
        return T::zero();
    }
    if m == T::infinity() {
        return m;
    }
    let (rx, ry) = (x / m, y / m);
    m * (rx.powf(th) + ry.powf(th)).powf(T::one() / th)
}

/// `1 + e^{-th(M-m)} - e^{-th M} - e^{-th(1-m)}`, written with `expm1` so that it stays
/// accurate for both small and large `th > 0`.
fn frank_b<T: Scalar>(u: T, v: T, th: T) -> T {
    let (m, mx) = (u.min(v), u.max(v));
    -(-th * mx).exp_m1() - (-th * (mx - m)).exp() * (-th * (T::one() - mx)).exp_m1()
}

fn joe_s<T: Scalar>(u: T, v: T, th: T) -> T {
    let a = (T::one() - u).powf(th);
    let b = (T::one() - v).powf(th);
    a + b - a * b
}

/// Inverts a conditional distribution `v -> h(v)` (increasing from 0 to 1) by bracketing.
pub(crate) fn generic_cond_inverse<T, H>(h: H, t: T) -> Result<T>
where
    T: Scalar,
    H: Fn(T) -> T,
{
    let lo = T::zero();
    let hi = T::one();
    let f = |v: T| {
        if v <= lo {
            -t
        } else if v >= hi {
            T::one() - t
        } else {
            h(v) - t
        }
    };
    find_root(f, lo, hi, T::epsilon() * cst(4.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fams() -> Vec<BaseCopula<f64>> {
        vec![
            BaseCopula::new(Family::Clayton, 2.0).unwrap(),
            BaseCopula::new(Family::Clayton, 18.0).unwrap(),
            BaseCopula::new(Family::Gumbel, 1.7).unwrap(),
            BaseCopula::new(Family::Frank, 5.0).unwrap(),
            BaseCopula::new(Family::Frank, -3.0).unwrap(),
            BaseCopula::new(Family::Frank, 60.0).unwrap(),
            BaseCopula::new(Family::Joe, 2.5).unwrap(),
        ]
    }

    #[test]
    fn parameter_domains() {
        assert!(BaseCopula::new(Family::Clayton, -1.0).is_err());
        assert!(BaseCopula::new(Family::Clayton, 0.0).is_err());
        assert!(BaseCopula::new(Family::Gumbel, 0.99).is_err());
        assert!(BaseCopula::new(Family::Joe, 0.5).is_err());
        assert!(BaseCopula::new(Family::Frank, 0.0).is_err());
        assert!(BaseCopula::new(Family::Gumbel, 1.0).is_ok());
        assert!(BaseCopula::new(Family::Clayton, f64::NAN).is_err());
    }

    #[test]
    fn h1_is_derivative_of_cdf() {
        for c in fams() {
            for &(u, v) in &[(0.2, 0.7), (0.5, 0.5), (0.9, 0.15)] {
                let h = 1e-6;
                let fd = (c.cdf_unchecked(u + h, v) - c.cdf_unchecked(u - h, v)) / (2.0 * h);
                let an = c.h1_unchecked(u, v);
                assert!((fd - an).abs() < 1e-6, "{:?} at ({u},{v}): {fd} vs {an}", c);
            }
        }
    }

    #[test]
    fn dlog_pdf_matches_finite_difference() {
        for c in fams() {
            for &(u, v) in &[(0.3, 0.6), (0.5, 0.45), (0.8, 0.2)] {
                let h = 1e-6;
                let fd = (c.log_pdf_unchecked(u + h, v) - c.log_pdf_unchecked(u - h, v)) / (2.0 * h);
                let an = c.dlog_pdf_du_unchecked(u, v);
                assert!(
                    (fd - an).abs() <= 1e-5 * an.abs().max(1.0),
                    "{:?} at ({u},{v}): {fd} vs {an}",
                    c
                );
            }
        }
    }

    #[test]
    fn conditional_inverse_roundtrip() {
        for c in fams() {
            for &(u, t) in &[(0.1, 0.3), (0.5, 0.5), (0.93, 0.8), (0.02, 0.99)] {
                let v = c.cond_inverse_unchecked(u, t).unwrap();
                assert!((c.h1_unchecked(u, v) - t).abs() < 1e-10, "{:?} ({u},{t})", c);
            }
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("Clayton".parse::<Family>().unwrap(), Family::Clayton);
        assert_eq!("j".parse::<Family>().unwrap(), Family::Joe);
        assert!("gaussian".parse::<Family>().is_err());
    }
}
