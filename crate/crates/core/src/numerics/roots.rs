//! Bracketed root finding (Brent's method).

use crate::error::{Error, Result};
use crate::scalar::{cst, to_f64, Scalar};

const MAX_ITER: usize = 200;

/// Finds a root of `f` in `[lo, hi]`. Requires `f(lo) * f(hi) <= 0`.
///
/// Stops when `|f(root)| <= tol` or the bracket has shrunk below `tol` (relative to the
/// magnitude of the iterate, with a floor at machine precision).
pub fn find_root<T, F>(f: F, lo: T, hi: T, tol: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::numerical("non-finite function value at bracket end"));
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo: to_f64(lo),
            hi: to_f64(hi),
            f_lo: to_f64(fa),
            f_hi: to_f64(fb),
        });
    }
    let two = cst::<T>(2.0);
    let three = cst::<T>(3.0);
    let half = cst::<T>(0.5);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 { b + d } else { b + tol1 * xm.signum() };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite function value at x = {}",
                to_f64(b)
            )));
        }
    }
    Err(Error::numerical("root search did not converge"))
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
/// Returns `(argmax, max)`; the end points are also compared so boundary maxima are found.
pub fn golden_max<T, F>(f: F, lo: T, hi: T, tol: T) -> (T, T)
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let invphi = cst::<T>((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let r = find_root(|a: f64| a - 3.0, 0.0, 10.0, 1e-12).unwrap();
        assert!((r - 3.0).abs() < 1e-12);
    }

    #[test]
    fn clayton_tau_inverse_root() {
        // oracle: alpha/(alpha+2) = 0.9 at alpha = 18
        let r = find_root(|a: f64| a / (a + 2.0) - 0.9, 1e-6, 100.0, 1e-12).unwrap();
        assert!((r - 18.0).abs() < 1e-8);
    }

    #[test]
    fn no_sign_change_is_bracket_error() {
        let e = find_root(|a: f64| a * a, 1.0, 2.0, 1e-12).unwrap_err();
        assert!(matches!(e, Error::Bracket { .. }));
    }

    #[test]
    fn golden_section_interior_and_boundary() {
        let (x, v) = golden_max(|x: f64| -(x - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-6 && v.abs() < 1e-12);
        let (xb, _) = golden_max(|x: f64| x, 0.0, 1.0, 1e-10);
        assert_eq!(xb, 1.0);
    }
}
