//! Kendall's tau, its inverse per family, and the logistic tau(x) link.

use super::{BaseCopula, CopulaSpec, Family, MixtureCopula};
use crate::error::{Error, Result};
use crate::numerics::{find_root, tensor, Interval, QuadratureRule};
use crate::scalar::{cst, to_f64, Scalar};

const PANEL_NODES: usize = 16;
const PANELS: usize = 8;
const TAU_QUAD_TOL: f64 = 1e-7;

/// Kendall's tau of any implemented copula.
///
/// Closed forms for Clayton and Gumbel; Frank through the Debye function; Joe through the
/// digamma function; mixtures and Khoudraji copulas through `1 - 4 int int dC/du dC/dv`.
pub fn kendall_tau<T: Scalar>(copula: &CopulaSpec<T>) -> Result<T> {
    match copula {
        CopulaSpec::Base(b) => base_tau(b),
        _ => tau_by_partials(copula),
    }
}

fn base_tau<T: Scalar>(b: &BaseCopula<T>) -> Result<T> {
    let a = b.alpha1();
    let one = T::one();
    let two = cst::<T>(2.0);
    let four = cst::<T>(4.0);
    match b.family() {
        Family::Product => Ok(T::zero()),
        Family::Clayton => Ok(a / (a + two)),
        Family::Gumbel => Ok(one - one / a),
        Family::Frank => {
            let th = a.abs();
            let tau = one - four / th * (one - debye1(th));
            Ok(if a < T::zero() { -tau } else { tau })
        }
        Family::Joe => Ok(joe_tau(a)),
    }
}

/// Debye function `D1(x) = (1/x) int_0^x t/(e^t - 1) dt`, `x > 0`.
fn debye1<T: Scalar>(x: T) -> T {
    let one = T::one();
    if x <= one {
        // Bernoulli series, B_2k / ((2k + 1) (2k)!)
        const C: [f64; 8] = [
            1.0 / 36.0,
            -1.0 / 3600.0,
            1.0 / 211_680.0,
            -1.0 / 10_886_400.0,
            1.0 / 526_901_760.0,
            -691.0 / 16_999_766_784_000.0,
            1.0 / 1_120_863_744_000.0,
            -3617.0 / 181_400_084_439_040_000.0,
        ];
        let x2 = x * x;
        let mut term = one;
        let mut acc = one - x / cst(4.0);
        for c in C {
            term = term * x2;
            acc = acc + cst::<T>(c) * term;
        }
        acc
    } else {
        // int_0^x = pi^2/6 - sum_k e^{-kx} (x/k + 1/k^2)
        let mut tail = T::zero();
        let e = (-x).exp();
        let mut ek = one;
        for k in 1..=60 {
            ek = ek * e;
            let kf = cst::<T>(k as f64);
            let term = ek * (x / kf + one / (kf * kf));
            tail = tail + term;
            if term < tail * T::epsilon() * cst(0.1) {
                break;
            }
        }
        (cst::<T>(std::f64::consts::PI.powi(2) / 6.0) - tail) / x
    }
}

/// `1 + 2/(2 - a) (psi(2) - psi(2/a + 1))`. Around `a = 2` the difference cancels, so with
/// `e = 2/a - 1` the expansion `1 - (1 + e) sum_n (-1)^(n+1) (zeta(n+1) - 1) e^(n-1)` is used.
fn joe_tau<T: Scalar>(a: T) -> T {
    use statrs::function::gamma::digamma;
    // zeta(n + 1) - 1 for n = 1..=12
    const ZETA_M1: [f64; 12] = [
        0.644_934_066_848_226_4,
        0.202_056_903_159_594_3,
        0.082_323_233_711_138_19,
        0.036_927_755_143_369_93,
        0.017_343_061_984_449_14,
        0.008_349_277_381_922_827,
        0.004_077_356_197_944_339,
        0.002_008_392_826_082_214,
        0.000_994_575_127_818_085_3,
        0.000_494_188_604_119_464_6,
        0.000_246_086_553_308_048_3,
        0.000_122_713_347_578_489_1,
    ];
    let a = to_f64(a);
    let e = 2.0 / a - 1.0;
    let t = if e.abs() < 0.05 {
        let mut acc = 0.0;
        let mut pow = 1.0;
        for (n, z) in ZETA_M1.iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * z * pow;
            pow *= e;
        }
        1.0 - (1.0 + e) * acc
    } else {
        1.0 + 2.0 / (2.0 - a) * (digamma(2.0) - digamma(2.0 / a + 1.0))
    };
    cst(t)
}

fn tau_by_partials<T: Scalar>(copula: &CopulaSpec<T>) -> Result<T> {
    let eval = |panels: usize| -> Result<T> {
        let rule = QuadratureRule::composite(PANEL_NODES, panels, Interval::unit())?.endpoint_graded();
        let s = tensor(
            |u, v| copula.h1_unchecked(u, v) * copula.h2_unchecked(u, v),
            &rule,
            &rule,
        )?;
        Ok(T::one() - cst::<T>(4.0) * s)
    };
    let coarse = eval(PANELS)?;
    let fine = eval(2 * PANELS)?;
    if (fine - coarse).abs() > cst(TAU_QUAD_TOL) {
        return Err(Error::numerical(format!(
            "Kendall tau integral not converged for {}: {} vs {}",
            copula.label(),
            to_f64(coarse),
            to_f64(fine)
        )));
    }
    Ok(fine)
}

/// Parameter of `family` with Kendall's tau equal to `tau`. Only Frank reaches negative tau.
pub fn tau_inverse<T: Scalar>(family: Family, tau: T) -> Result<T> {
    if family == Family::Frank && tau < T::zero() && tau > -T::one() {
        // tau(-a) = -tau(a)
        return tau_inverse(family, -tau).map(|a| -a);
    }
    let (lo, hi) = family
        .tau_bracket()
        .ok_or_else(|| Error::domain("the product copula has no parameter to invert"))?;
    if !(tau > T::zero() && tau < T::one()) {
        return Err(Error::domain(format!(
            "tau = {} outside the attainable range (0, 1) of the {family} family",
            to_f64(tau)
        )));
    }
    match family {
        Family::Clayton => return check_range(two_tau(tau), lo, hi, family, tau),
        Family::Gumbel => return check_range(T::one() / (T::one() - tau), lo, hi, family, tau),
        _ => {}
    }
    let f = |a: T| match BaseCopula::new(family, a).and_then(|b| base_tau(&b)) {
        Ok(t) => t - tau,
        Err(_) => T::nan(),
    };
    find_root(f, cst(lo), cst(hi), cst(1e-13)).map_err(|e| match e {
        Error::Bracket { .. } => Error::domain(format!(
            "tau = {} not attainable by {family} within [{lo}, {hi}]",
            to_f64(tau)
        )),
        other => other,
    })
}

fn two_tau<T: Scalar>(tau: T) -> T {
    cst::<T>(2.0) * tau / (T::one() - tau)
}

fn check_range<T: Scalar>(a: T, lo: f64, hi: f64, family: Family, tau: T) -> Result<T> {
    let x = to_f64(a);
    if x < lo || x > hi {
        return Err(Error::domain(format!(
            "tau = {} needs {family} parameter {x}, outside [{lo}, {hi}]",
            to_f64(tau)
        )));
    }
    Ok(a)
}

/// Unclamped `e^(a x - c) / (1 + e^(a x - c))`.
pub fn logistic<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// `tau(x) = logistic(alpha1 x - c)` with `c = ln((1 - eps)/eps)`, so that `tau(0) = eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauLink<T> {
    pub epsilon: T,
    pub tau_max: T,
    pub x_max: T,
    pub c: T,
    pub alpha1: T,
}

impl<T: Scalar> TauLink<T> {
    pub const DEFAULT_EPSILON: f64 = 0.05;

    /// Calibrates the slope so that `tau(x_max) = tau_max`.
    pub fn calibrated(epsilon: T, tau_max: T, x_max: T) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon < tau_max && tau_max < T::one()) {
            return Err(Error::domain(format!(
                "tau link needs 0 < epsilon < tau_max < 1, got epsilon = {}, tau_max = {}",
                to_f64(epsilon),
                to_f64(tau_max)
            )));
        }
        if !(x_max > T::zero()) {
            return Err(Error::domain("tau link needs x_max > 0"));
        }
        let c = ((T::one() - epsilon) / epsilon).ln();
        let alpha1 = (c + (tau_max / (T::one() - tau_max)).ln()) / x_max;
        Ok(Self {
            epsilon,
            tau_max,
            x_max,
            c,
            alpha1,
        })
    }

    /// The link with a given slope; `tau_max` becomes `tau(x_max)`.
    pub fn with_slope(epsilon: T, alpha1: T, x_max: T) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon < T::one()) {
            return Err(Error::domain("tau link needs 0 < epsilon < 1"));
        }
        let c = ((T::one() - epsilon) / epsilon).ln();
        let tau_max = logistic(alpha1 * x_max - c);
        Self::calibrated(epsilon, tau_max, x_max)
    }

    /// Unclamped logistic value.
    pub fn tau_raw(&self, x: T) -> T {
        logistic(self.alpha1 * x - self.c)
    }

    /// `tau(x)` clamped to `[epsilon, tau_max]`.
    pub fn tau_at_x(&self, x: T) -> Result<T> {
        let slack = cst::<T>(1e-12) * self.x_max.max(T::one());
        if !(x >= -slack && x <= self.x_max + slack) {
            return Err(Error::domain(format!(
                "x = {} outside the design space [0, {}]",
                to_f64(x),
                to_f64(self.x_max)
            )));
        }
        Ok(self.tau_raw(x).max(self.epsilon).min(self.tau_max))
    }
}

/// `alpha2 C1(h1(tau)) + (1 - alpha2) C2(h2(tau))`, both components at Kendall's `tau`.
pub fn tau_matched_mixture_at<T: Scalar>(
    c1: Family,
    c2: Family,
    tau: T,
    alpha2: T,
) -> Result<CopulaSpec<T>> {
    if !(alpha2 >= T::zero() && alpha2 <= T::one()) {
        return Err(Error::domain(format!("alpha2 = {} outside [0, 1]", to_f64(alpha2))));
    }
    let b1 = BaseCopula::new(c1, tau_inverse(c1, tau)?)?;
    let b2 = BaseCopula::new(c2, tau_inverse(c2, tau)?)?;
    Ok(MixtureCopula::pair(b1, b2, alpha2)?.into())
}

/// [`tau_matched_mixture_at`] with `tau = link.tau_at_x(x)`.
pub fn tau_matched_mixture<T: Scalar>(
    c1: Family,
    c2: Family,
    link: &TauLink<T>,
    alpha2: T,
    x: T,
) -> Result<CopulaSpec<T>> {
    tau_matched_mixture_at(c1, c2, link.tau_at_x(x)?, alpha2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;

    #[test]
    fn closed_forms() {
        let c = CopulaSpec::<f64>::base(Family::Clayton, 18.0).unwrap();
        assert!((kendall_tau(&c).unwrap() - 0.9).abs() < 1e-12);
        let g = CopulaSpec::<f64>::base(Family::Gumbel, 2.0).unwrap();
        assert!((kendall_tau(&g).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(kendall_tau(&CopulaSpec::<f64>::product()).unwrap(), 0.0);
    }

    #[test]
    fn gumbel_tau_against_double_integral() {
        // tau = 4 E[C(U, V)] - 1 with the density on a composite rule
        let g = CopulaSpec::<f64>::base(Family::Gumbel, 2.0).unwrap();
        let rule = QuadratureRule::composite(16, 16, Interval::unit()).unwrap().endpoint_graded();
        let e = tensor(|u, v| g.cdf(u, v).unwrap() * g.pdf(u, v).unwrap(), &rule, &rule).unwrap();
        assert!((4.0 * e - 1.0 - 0.5).abs() < 1e-6, "{}", 4.0 * e - 1.0);
    }

    #[test]
    fn frank_and_joe_against_partials_form() {
        for c in [
            CopulaSpec::<f64>::base(Family::Frank, 5.0).unwrap(),
            CopulaSpec::base(Family::Frank, -2.0).unwrap(),
            CopulaSpec::base(Family::Joe, 2.5).unwrap(),
        ] {
            let direct = kendall_tau(&c).unwrap();
            let oracle = tau_by_partials(&c).unwrap();
            assert!((direct - oracle).abs() < 1e-7, "{}: {direct} vs {oracle}", c.label());
        }
    }

    #[test]
    fn joe_against_archimedean_integral() {
        // tau = 1 + 4 int_0^1 phi/phi', phi(t) = -ln(1 - (1 - t)^a), written in s = 1 - t
        for a in [1.2, 1.5, 1.9, 1.91, 1.99999, 2.0, 2.000004, 2.1, 2.11, 2.5, 6.0, 40.0] {
            let ratio = |s: f64| {
                let w = s.powf(a);
                let q = if w < 1e-12 { -1.0 - w / 2.0 } else { (-w).ln_1p() / w };
                (1.0 - w) * q * s / a
            };
            let oracle = 1.0 + 4.0 * integrate_adaptive(ratio, 0.0, 1.0, 1e-14).unwrap();
            let c = CopulaSpec::base(Family::Joe, a).unwrap();
            let t = kendall_tau(&c).unwrap();
            assert!((t - oracle).abs() < 1e-12, "{a}: {t} vs {oracle}");
        }
    }

    #[test]
    fn frank_against_debye_quadrature() {
        for th in [1e-3, 0.5, 1.0, 1.0 + 1e-9, 3.0, 18.0, 300.0] {
            let d1 = integrate_adaptive(|t: f64| t / t.exp_m1(), 0.0, th, 1e-15).unwrap() / th;
            let oracle = 1.0 - 4.0 / th * (1.0 - d1);
            let t = kendall_tau(&CopulaSpec::base(Family::Frank, th).unwrap()).unwrap();
            assert!((t - oracle).abs() < 1e-12, "{th}: {t} vs {oracle}");
        }
    }

    #[test]
    fn inverse_values() {
        assert!((tau_inverse::<f64>(Family::Clayton, 0.9).unwrap() - 18.0).abs() < 1e-6);
        assert!((tau_inverse::<f64>(Family::Clayton, 0.5).unwrap() - 2.0).abs() < 1e-6);
        assert!(matches!(tau_inverse(Family::Gumbel, 0.0), Err(Error::Domain(_))));
        assert!(matches!(tau_inverse(Family::Clayton, -0.2), Err(Error::Domain(_))));
        let a = tau_inverse::<f64>(Family::Frank, -0.2).unwrap();
        assert!((a + tau_inverse::<f64>(Family::Frank, 0.2).unwrap()).abs() < 1e-12);
        assert!(tau_inverse(Family::Product, 0.2).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        for fam in Family::ARCHIMEDEAN {
            for k in 1..=9 {
                let tau = k as f64 / 10.0;
                let a = tau_inverse(fam, tau).unwrap();
                let back = kendall_tau(&CopulaSpec::base(fam, a).unwrap()).unwrap();
                assert!((back - tau).abs() < 1e-8, "{fam} {tau}");
            }
        }
    }

    #[test]
    fn link_calibration() {
        let l = TauLink::calibrated(0.05, 0.3, 10.0).unwrap();
        assert!((l.c - 19f64.ln()).abs() < 1e-15);
        assert!((l.c - 2.944439).abs() < 1e-6);
        assert!((l.alpha1 - 0.20972).abs() < 1e-5);
        assert!((l.tau_at_x(0.0).unwrap() - 0.05).abs() < 1e-12);
        assert!((l.tau_at_x(10.0).unwrap() - 0.3).abs() < 1e-12);
        assert!((l.tau_raw(l.c / l.alpha1) - 0.5).abs() < 1e-15);
        assert!(l.tau_at_x(10.5).is_err());
        assert!(TauLink::calibrated(0.3, 0.2, 10.0).is_err());
    }

    #[test]
    fn matched_mixture() {
        let m = tau_matched_mixture_at::<f64>(Family::Clayton, Family::Gumbel, 0.5, 0.5).unwrap();
        match &m {
            CopulaSpec::Mixture(mix) => {
                let c = mix.components();
                assert!((c[0].0.alpha1() - 2.0).abs() < 1e-12);
                assert!((c[1].0.alpha1() - 2.0).abs() < 1e-12);
            }
            _ => panic!("expected a mixture"),
        }
        let t = kendall_tau(&m).unwrap();
        assert!(t > 0.0 && t < 1.0);
        let pure = tau_matched_mixture_at(Family::Frank, Family::Joe, 0.4, 1.0).unwrap();
        let a = tau_inverse(Family::Frank, 0.4).unwrap();
        let f = CopulaSpec::base(Family::Frank, a).unwrap();
        assert_eq!(pure.cdf(0.3, 0.6).unwrap(), f.cdf(0.3, 0.6).unwrap());
    }

    #[test]
    fn mixture_density_normalized() {
        let m = tau_matched_mixture_at::<f64>(Family::Joe, Family::Frank, 0.3, 0.5).unwrap();
        let rule = QuadratureRule::gauss_legendre(80, Interval::unit()).unwrap().endpoint_graded();
        let v = tensor(|u, v| m.pdf(u, v).unwrap(), &rule, &rule).unwrap();
        assert!((v - 1.0).abs() < 1e-5);
    }
}
