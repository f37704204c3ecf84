//! Bivariate copulas: Archimedean families, convex combinations, Khoudraji's asymmetrization,
//! Kendall's tau and the logistic tau link.

mod family;
mod tau;

pub use family::{BaseCopula, Family};
pub use tau::{kendall_tau, logistic, tau_inverse, tau_matched_mixture, tau_matched_mixture_at, TauLink};

use crate::error::{Error, Result};
use crate::scalar::{cst, to_f64, Scalar};

/// Convex combination `sum_i lambda_i C_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureCopula<T> {
    components: Vec<(BaseCopula<T>, T)>,
}

impl<T: Scalar> MixtureCopula<T> {
    pub fn new(components: Vec<(BaseCopula<T>, T)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("mixture needs at least one component"));
        }
        let mut total = T::zero();
        for (_, w) in &components {
            if !(w.is_finite() && *w >= T::zero()) {
                return Err(Error::domain(format!("mixture weight {} is negative", to_f64(*w))));
            }
            total = total + *w;
        }
        if (total - T::one()).abs() > cst(1e-9) {
            return Err(Error::domain(format!(
                "mixture weights sum to {}, expected 1",
                to_f64(total)
            )));
        }
        Ok(Self { components })
    }

    /// Two-component mixture `w C1 + (1 - w) C2`.
    pub fn pair(c1: BaseCopula<T>, c2: BaseCopula<T>, w: T) -> Result<Self> {
        if !(w >= T::zero() && w <= T::one()) {
            return Err(Error::domain(format!("mixture weight {} outside [0, 1]", to_f64(w))));
        }
        Self::new(vec![(c1, w), (c2, T::one() - w)])
    }

    pub fn components(&self) -> &[(BaseCopula<T>, T)] {
        &self.components
    }

    fn sum<F: Fn(&BaseCopula<T>) -> T>(&self, f: F) -> T {
        self.components
            .iter()
            .filter(|(_, w)| *w != T::zero())
            .fold(T::zero(), |acc, (c, w)| acc + *w * f(c))
    }
}

/// `u^a2 v^a3 C(u^(1-a2), v^(1-a3))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KhoudrajiCopula<T> {
    base: BaseCopula<T>,
    alpha2: T,
    alpha3: T,
}

impl<T: Scalar> KhoudrajiCopula<T> {
    pub fn new(base: BaseCopula<T>, alpha2: T, alpha3: T) -> Result<Self> {
        for (name, a) in [("alpha2", alpha2), ("alpha3", alpha3)] {
            if !(a >= T::zero() && a <= T::one()) {
                return Err(Error::domain(format!("{name} = {} outside [0, 1]", to_f64(a))));
            }
        }
        Ok(Self { base, alpha2, alpha3 })
    }

    pub fn base(&self) -> &BaseCopula<T> {
        &self.base
    }

    pub fn alpha2(&self) -> T {
        self.alpha2
    }

    pub fn alpha3(&self) -> T {
        self.alpha3
    }

    fn inner(&self, u: T, v: T) -> (T, T) {
        (u.powf(T::one() - self.alpha2), v.powf(T::one() - self.alpha3))
    }

    fn cdf_unchecked(&self, u: T, v: T) -> T {
        let (uu, vv) = self.inner(u, v);
        u.powf(self.alpha2) * v.powf(self.alpha3) * base_cdf(&self.base, uu, vv)
    }

    fn h1_unchecked(&self, u: T, v: T) -> T {
        let (a2, a3) = (self.alpha2, self.alpha3);
        let (uu, vv) = self.inner(u, v);
        let mut s = T::zero();
        if a2 != T::zero() {
            s = s + a2 * u.powf(a2 - T::one()) * base_cdf(&self.base, uu, vv);
        }
        if a2 != T::one() {
            s = s + (T::one() - a2) * base_h1(&self.base, uu, vv);
        }
        v.powf(a3) * s
    }

    fn h2_unchecked(&self, u: T, v: T) -> T {
        let (a2, a3) = (self.alpha2, self.alpha3);
        let (uu, vv) = self.inner(u, v);
        let mut s = T::zero();
        if a3 != T::zero() {
            s = s + a3 * v.powf(a3 - T::one()) * base_cdf(&self.base, uu, vv);
        }
        if a3 != T::one() {
            s = s + (T::one() - a3) * base_h1(&self.base, vv, uu);
        }
        u.powf(a2) * s
    }

    fn pdf_unchecked(&self, u: T, v: T) -> T {
        let (a2, a3) = (self.alpha2, self.alpha3);
        let one = T::one();
        let (uu, vv) = self.inner(u, v);
        let mut s = T::zero();
        if a2 != T::zero() && a3 != T::zero() {
            s = s + a2 * a3 * u.powf(a2 - one) * v.powf(a3 - one) * self.base.cdf_unchecked(uu, vv);
        }
        if a3 != T::zero() && a2 != one {
            s = s + a3 * (one - a2) * v.powf(a3 - one) * self.base.h1_unchecked(uu, vv);
        }
        if a2 != T::zero() && a3 != one {
            s = s + a2 * (one - a3) * u.powf(a2 - one) * self.base.h2_unchecked(uu, vv);
        }
        if a2 != one && a3 != one {
            s = s + (one - a2) * (one - a3) * self.base.pdf_unchecked(uu, vv);
        }
        s
    }
}

/// Base cdf with exact boundary values (inner arguments may land on 1).
fn base_cdf<T: Scalar>(c: &BaseCopula<T>, u: T, v: T) -> T {
    if u <= T::zero() || v <= T::zero() {
        T::zero()
    } else if u >= T::one() {
        v
    } else if v >= T::one() {
        u
    } else {
        c.cdf_unchecked(u, v)
    }
}

/// Base `dC/du` with boundary values in `v`: 0 at `v = 0`, 1 at `v = 1`.
fn base_h1<T: Scalar>(c: &BaseCopula<T>, u: T, v: T) -> T {
    if v <= T::zero() {
        T::zero()
    } else if v >= T::one() {
        T::one()
    } else {
        c.h1_unchecked(u.min(T::one() - T::epsilon()).max(T::min_positive_value()), v)
    }
}

/// Any copula handled by the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum CopulaSpec<T> {
    Base(BaseCopula<T>),
    Mixture(MixtureCopula<T>),
    Khoudraji(KhoudrajiCopula<T>),
}

impl<T: Scalar> From<BaseCopula<T>> for CopulaSpec<T> {
    fn from(c: BaseCopula<T>) -> Self {
        CopulaSpec::Base(c)
    }
}

impl<T: Scalar> From<MixtureCopula<T>> for CopulaSpec<T> {
    fn from(c: MixtureCopula<T>) -> Self {
        CopulaSpec::Mixture(c)
    }
}

impl<T: Scalar> From<KhoudrajiCopula<T>> for CopulaSpec<T> {
    fn from(c: KhoudrajiCopula<T>) -> Self {
        CopulaSpec::Khoudraji(c)
    }
}

fn check_closed<T: Scalar>(u: T, v: T) -> Result<()> {
    let ok = |t: T| t >= T::zero() && t <= T::one();
    if ok(u) && ok(v) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "copula arguments ({}, {}) outside [0, 1]",
            to_f64(u),
            to_f64(v)
        )))
    }
}

fn check_open<T: Scalar>(u: T, v: T) -> Result<()> {
    let ok = |t: T| t > T::zero() && t < T::one();
    if ok(u) && ok(v) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "density arguments ({}, {}) must lie in the open unit square",
            to_f64(u),
            to_f64(v)
        )))
    }
}

impl<T: Scalar> CopulaSpec<T> {
    pub fn base(family: Family, alpha1: T) -> Result<Self> {
        Ok(CopulaSpec::Base(BaseCopula::new(family, alpha1)?))
    }

    pub fn product() -> Self {
        CopulaSpec::Base(BaseCopula::product())
    }

    pub fn khoudraji(family: Family, alpha1: T, alpha2: T, alpha3: T) -> Result<Self> {
        Ok(CopulaSpec::Khoudraji(KhoudrajiCopula::new(
            BaseCopula::new(family, alpha1)?,
            alpha2,
            alpha3,
        )?))
    }

    /// `C(u, v)`.
    pub fn cdf(&self, u: T, v: T) -> Result<T> {
        check_closed(u, v)?;
        if u == T::zero() || v == T::zero() {
            return Ok(T::zero());
        }
        if u == T::one() {
            return Ok(v);
        }
        if v == T::one() {
            return Ok(u);
        }
        let c = match self {
            CopulaSpec::Base(b) => b.cdf_unchecked(u, v),
            CopulaSpec::Mixture(m) => m.sum(|c| c.cdf_unchecked(u, v)),
            CopulaSpec::Khoudraji(k) => k.cdf_unchecked(u, v),
        };
        // round-off can push the value a few ulps past the Frechet bounds
        let lower = (u + v - T::one()).max(T::zero());
        Ok(c.max(lower).min(u.min(v)))
    }

    /// `dC/du`, the conditional distribution function of `V` given `U = u`.
    pub fn h1(&self, u: T, v: T) -> Result<T> {
        check_open(u, u)?;
        check_closed(u, v)?;
        if v == T::zero() {
            return Ok(T::zero());
        }
        if v == T::one() {
            return Ok(T::one());
        }
        Ok(self.h1_unchecked(u, v))
    }

    /// `dC/dv`.
    pub fn h2(&self, u: T, v: T) -> Result<T> {
        check_open(v, v)?;
        check_closed(u, v)?;
        if u == T::zero() {
            return Ok(T::zero());
        }
        if u == T::one() {
            return Ok(T::one());
        }
        Ok(self.h2_unchecked(u, v))
    }

    pub(crate) fn h1_unchecked(&self, u: T, v: T) -> T {
        match self {
            CopulaSpec::Base(b) => b.h1_unchecked(u, v),
            CopulaSpec::Mixture(m) => m.sum(|c| c.h1_unchecked(u, v)),
            CopulaSpec::Khoudraji(k) => k.h1_unchecked(u, v),
        }
    }

    pub(crate) fn h2_unchecked(&self, u: T, v: T) -> T {
        match self {
            CopulaSpec::Base(b) => b.h2_unchecked(u, v),
            CopulaSpec::Mixture(m) => m.sum(|c| c.h2_unchecked(u, v)),
            CopulaSpec::Khoudraji(k) => k.h2_unchecked(u, v),
        }
    }

    /// Density `d^2 C / du dv` on the open square.
    pub fn pdf(&self, u: T, v: T) -> Result<T> {
        check_open(u, v)?;
        Ok(self.pdf_unchecked(u, v))
    }

    pub(crate) fn pdf_unchecked(&self, u: T, v: T) -> T {
        match self {
            CopulaSpec::Base(b) => b.pdf_unchecked(u, v),
            CopulaSpec::Mixture(m) => m.sum(|c| c.pdf_unchecked(u, v)),
            CopulaSpec::Khoudraji(k) => k.pdf_unchecked(u, v),
        }
    }

    pub fn log_pdf(&self, u: T, v: T) -> Result<T> {
        check_open(u, v)?;
        Ok(match self {
            CopulaSpec::Base(b) => b.log_pdf_unchecked(u, v),
            _ => self.pdf_unchecked(u, v).ln(),
        })
    }

    /// `d/du log c(u, v)`; analytic for base families, central differences otherwise.
    pub fn dlog_pdf_du(&self, u: T, v: T) -> Result<T> {
        check_open(u, v)?;
        match self {
            CopulaSpec::Base(b) => Ok(b.dlog_pdf_du_unchecked(u, v)),
            _ => {
                let h = cst::<T>(1e-6) * u.min(T::one() - u);
                Ok((self.pdf_unchecked(u + h, v).ln() - self.pdf_unchecked(u - h, v).ln())
                    / (h + h))
            }
        }
    }

    /// `d/dv log c(u, v)`.
    pub fn dlog_pdf_dv(&self, u: T, v: T) -> Result<T> {
        check_open(u, v)?;
        match self {
            CopulaSpec::Base(b) => Ok(b.dlog_pdf_dv_unchecked(u, v)),
            _ => {
                let h = cst::<T>(1e-6) * v.min(T::one() - v);
                Ok((self.pdf_unchecked(u, v + h).ln() - self.pdf_unchecked(u, v - h).ln())
                    / (h + h))
            }
        }
    }

    /// Solves `h1(u, v) = t` for `v` (conditional quantile).
    pub fn cond_inverse(&self, u: T, t: T) -> Result<T> {
        check_open(u, u)?;
        check_closed(t, t)?;
        if t == T::zero() || t == T::one() {
            return Ok(t);
        }
        match self {
            CopulaSpec::Base(b) => b.cond_inverse_unchecked(u, t),
            _ => family::generic_cond_inverse(|v| self.h1_unchecked(u, v), t),
        }
    }

    /// Conditional quantile `v` and its complement `1 - v`, the latter accurate near 1 for
    /// closed-form families.
    pub fn cond_inverse_pair(&self, u: T, t: T) -> Result<(T, T)> {
        check_open(u, u)?;
        check_open(t, t)?;
        match self {
            CopulaSpec::Base(b) => b.cond_inverse_pair_unchecked(u, t),
            _ => {
                let v = self.cond_inverse(u, t)?;
                Ok((v, T::one() - v))
            }
        }
    }

    pub fn is_exchangeable_by_construction(&self) -> bool {
        match self {
            CopulaSpec::Khoudraji(k) => k.alpha2 == k.alpha3,
            _ => true,
        }
    }

    /// Free parameters, in order: base `alpha1`; for mixtures each component's `alpha1`
    /// followed by the first `n - 1` weights; for Khoudraji `(alpha1, alpha2, alpha3)`.
    /// The product copula contributes nothing.
    pub fn params(&self) -> Vec<T> {
        let a1 = |b: &BaseCopula<T>| if b.has_parameter() { vec![b.alpha1()] } else { vec![] };
        match self {
            CopulaSpec::Base(b) => a1(b),
            CopulaSpec::Mixture(m) => {
                let mut out: Vec<T> = m.components.iter().flat_map(|(c, _)| a1(c)).collect();
                out.extend(m.components.iter().take(m.components.len() - 1).map(|(_, w)| *w));
                out
            }
            CopulaSpec::Khoudraji(k) => {
                let mut out = a1(&k.base);
                out.extend([k.alpha2, k.alpha3]);
                out
            }
        }
    }

    /// Rebuilds the copula from a vector laid out as in [`Self::params`].
    pub fn with_params(&self, p: &[T]) -> Result<Self> {
        let want = self.params().len();
        if p.len() != want {
            return Err(Error::domain(format!(
                "expected {want} copula parameters, got {}",
                p.len()
            )));
        }
        let rebuild = |b: &BaseCopula<T>, it: &mut std::slice::Iter<T>| -> Result<BaseCopula<T>> {
            if b.has_parameter() {
                BaseCopula::new(b.family(), *it.next().expect("length checked"))
            } else {
                Ok(*b)
            }
        };
        let mut it = p.iter();
        Ok(match self {
            CopulaSpec::Base(b) => CopulaSpec::Base(rebuild(b, &mut it)?),
            CopulaSpec::Mixture(m) => {
                let bases = m
                    .components
                    .iter()
                    .map(|(c, _)| rebuild(c, &mut it))
                    .collect::<Result<Vec<_>>>()?;
                let n = bases.len();
                let mut weights: Vec<T> = it.by_ref().take(n - 1).copied().collect();
                let rest = weights.iter().fold(T::one(), |a, w| a - *w);
                weights.push(rest);
                CopulaSpec::Mixture(MixtureCopula::new(bases.into_iter().zip(weights).collect())?)
            }
            CopulaSpec::Khoudraji(k) => {
                let b = rebuild(&k.base, &mut it)?;
                let a2 = *it.next().expect("length checked");
                let a3 = *it.next().expect("length checked");
                CopulaSpec::Khoudraji(KhoudrajiCopula::new(b, a2, a3)?)
            }
        })
    }

    /// Short label such as `clayton(18)`, `0.5*clayton(2)+0.5*gumbel(2)`.
    pub fn label(&self) -> String {
        let b = |c: &BaseCopula<T>| {
            if c.has_parameter() {
                format!("{}({})", c.family(), to_f64(c.alpha1()))
            } else {
                c.family().to_string()
            }
        };
        match self {
            CopulaSpec::Base(c) => b(c),
            CopulaSpec::Mixture(m) => m
                .components
                .iter()
                .map(|(c, w)| format!("{}*{}", to_f64(*w), b(c)))
                .collect::<Vec<_>>()
                .join("+"),
            CopulaSpec::Khoudraji(k) => {
                format!("khoudraji[{}; {}, {}]", b(&k.base), to_f64(k.alpha2), to_f64(k.alpha3))
            }
        }
    }
}
