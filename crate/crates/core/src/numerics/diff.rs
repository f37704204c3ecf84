//! Central finite differences with one Richardson extrapolation step; one-sided stencils where
//! a step would leave the function's domain.

use crate::error::{Error, Result};
use crate::scalar::{cst, Scalar};

/// Default relative step: `h_i = DEFAULT_STEP * max(1, |p_i|)`.
pub const DEFAULT_STEP: f64 = 1e-5;

#[inline]
fn step_for<T: Scalar>(h: T, p: T) -> T {
    h * p.abs().max(T::one())
}

/// Gradient of a scalar function by central differences at steps `h` and `2h`, combined
/// as `(4 D(h) - D(2h)) / 3`. Truncation error is `O(h^4)` for smooth `f`.
pub fn grad_fd<T, F>(f: F, p: &[T], h: T) -> Result<Vec<T>>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    let jac = jacobian_fd(|q| Ok(vec![f(q)]), p, h)?;
    Ok(jac.into_iter().map(|col| col[0]).collect())
}

/// Jacobian of a vector function. Returns one column per coordinate of `p`:
/// `out[i][k] = d f_k / d p_i`.
pub fn jacobian_fd<T, F>(f: F, p: &[T], h: T) -> Result<Vec<Vec<T>>>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<Vec<T>>,
{
    if !(h > T::zero()) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    let mut q = p.to_vec();
    let mut eval = |i: usize, delta: T| -> Result<Vec<T>> {
        q[i] = p[i] + delta;
        let r = f(&q);
        q[i] = p[i];
        let v = r.map_err(|e| match e {
            Error::Numerical { message, .. } => Error::Numerical {
                message,
                coordinate: Some(i),
            },
            other => other,
        })?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical {
                message: "non-finite function value in finite differences".into(),
                coordinate: Some(i),
            });
        }
        Ok(v)
    };
    let two = cst::<T>(2.0);
    let three = cst::<T>(3.0);
    let four = cst::<T>(4.0);
    let mut out = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let hi = step_for(h, p[i]);
        let fp1 = eval(i, hi);
        let fm1 = eval(i, -hi);
        let col = match (fp1, fm1) {
            (Ok(fp1), Ok(fm1)) => {
                let d1 = |k: usize| (fp1[k] - fm1[k]) / (two * hi);
                match (eval(i, two * hi), eval(i, -two * hi)) {
                    (Ok(fp2), Ok(fm2)) => (0..fp1.len())
                        .map(|k| (four * d1(k) - (fp2[k] - fm2[k]) / (four * hi)) / three)
                        .collect(),
                    // within 2h of the domain edge: plain central difference
                    (Err(Error::Domain(_)), _) | (_, Err(Error::Domain(_))) => (0..fp1.len()).map(d1).collect(),
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
            // at the edge of the parameter domain: one-sided stencil into the domain
            (Ok(_), Err(Error::Domain(_))) => one_sided(&mut eval, i, hi)?,
            (Err(Error::Domain(_)), Ok(_)) => one_sided(&mut eval, i, -hi)?,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        out.push(col);
    }
    Ok(out)
}

/// `(-3 f(p) + 4 f(p + h) - f(p + 2h)) / 2h` at `h` and `2h`, Richardson-combined; `h` may be
/// negative for a backward stencil. Truncation error `O(h^3)`.
fn one_sided<T, E>(eval: &mut E, i: usize, h: T) -> Result<Vec<T>>
where
    T: Scalar,
    E: FnMut(usize, T) -> Result<Vec<T>>,
{
    let two = cst::<T>(2.0);
    let f0 = eval(i, T::zero())?;
    let f1 = eval(i, h)?;
    let f2 = eval(i, two * h)?;
    let f4 = eval(i, cst::<T>(4.0) * h)?;
    Ok((0..f0.len())
        .map(|k| {
            let d1 = (-cst::<T>(3.0) * f0[k] + cst::<T>(4.0) * f1[k] - f2[k]) / (two * h);
            let d2 = (-cst::<T>(3.0) * f0[k] + cst::<T>(4.0) * f2[k] - f4[k]) / (cst::<T>(4.0) * h);
            (cst::<T>(4.0) * d1 - d2) / cst::<T>(3.0)
        })
        .collect())
}

/// Hessian by nested central differences (Richardson-extrapolated gradient of a
/// Richardson-extrapolated gradient). Only used by test oracles; `h` should be larger than
/// for first derivatives, e.g. `1e-3`.
pub fn hessian_fd<T, F>(f: F, p: &[T], h: T) -> Result<Vec<Vec<T>>>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<T>,
{
    let n = p.len();
    let grad = |q: &[T]| -> Result<Vec<T>> {
        let cols = jacobian_fd(|r| f(r).map(|v| vec![v]), q, h)?;
        Ok(cols.into_iter().map(|c| c[0]).collect())
    };
    let cols = jacobian_fd(grad, p, h)?;
    // symmetrize
    let mut hess = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            hess[i][j] = (cols[i][j] + cols[j][i]) / cst(2.0);
        }
    }
    Ok(hess)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_is_exact() {
        let g = grad_fd(|p: &[f64]| p[0] * p[0], &[3.0], 1e-3).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn product_gradient() {
        let g = grad_fd(|p: &[f64]| p[0] * p[1], &[2.0, 5.0], DEFAULT_STEP).unwrap();
        assert!((g[0] - 5.0).abs() < 1e-8);
        assert!((g[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn exp_against_closed_form() {
        let g = grad_fd(|p: &[f64]| p[0].exp(), &[1.0], DEFAULT_STEP).unwrap();
        assert!((g[0] - std::f64::consts::E).abs() < 1e-7);
    }

    #[test]
    fn non_finite_reports_coordinate() {
        let err = grad_fd(
            |p: &[f64]| if p[1] > 1.0 { f64::NAN } else { p[0] },
            &[0.0, 1.0],
            1e-3,
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::Numerical {
                message: "non-finite function value in finite differences".into(),
                coordinate: Some(1)
            }
        );
    }

    #[test]
    fn one_sided_at_domain_edge() {
        // sqrt(1 + p) restricted to p >= 0, derivative 1/2 at the edge
        let f = |p: &[f64]| {
            if p[0] < 0.0 {
                Err(Error::Domain("p < 0".into()))
            } else {
                Ok(vec![(1.0 + p[0]).sqrt()])
            }
        };
        let d = jacobian_fd(f, &[0.0], DEFAULT_STEP).unwrap();
        assert!((d[0][0] - 0.5).abs() < 1e-9, "{}", d[0][0]);
        let g = |p: &[f64]| {
            if p[0] > 1.0 {
                Err(Error::Domain("p > 1".into()))
            } else {
                Ok(vec![p[0].powi(3)])
            }
        };
        let d = jacobian_fd(g, &[1.0], DEFAULT_STEP).unwrap();
        assert!((d[0][0] - 3.0).abs() < 1e-9, "{}", d[0][0]);
        // one step inside the edge: central at h only
        let d = jacobian_fd(f, &[1.5e-5], DEFAULT_STEP).unwrap();
        assert!((d[0][0] - 0.5 / (1.0 + 1.5e-5f64).sqrt()).abs() < 1e-9, "{}", d[0][0]);
        // other errors still propagate
        let h = |_: &[f64]| -> Result<Vec<f64>> { Err(Error::model("bad")) };
        assert!(jacobian_fd(h, &[0.5], DEFAULT_STEP).is_err());
    }

    #[test]
    fn hessian_of_quadratic() {
        let h = hessian_fd(
            |p: &[f64]| Ok(p[0] * p[0] * 3.0 + p[0] * p[1] + 0.5 * p[1] * p[1]),
            &[0.3, -0.7],
            1e-3,
        )
        .unwrap();
        assert!((h[0][0] - 6.0).abs() < 1e-6);
        assert!((h[0][1] - 1.0).abs() < 1e-6);
        assert!((h[1][1] - 1.0).abs() < 1e-6);
    }
}
