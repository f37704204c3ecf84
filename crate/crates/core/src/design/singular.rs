//! Sensitivity kernel for Ds designs with singular information.
//!
//! When `M22` is singular the Ds sensitivity depends on the generalized inverse used for it,
//! and the equivalence theorem holds for the best one: a design is optimal iff some choice
//! keeps every candidate at or below the bound. The choices differ only by multiples of the
//! null vectors of `M22` added to the rows of `B = [I, -M12 M22^-]`, and each candidate's
//! sensitivity is a convex quadratic in those coefficients, so the best choice solves a small
//! convex minimax problem.

use super::{sensitivity_kernel, Criterion, CriterionSpec};
use crate::error::Result;
use crate::numerics::{golden_max, schur_parts, SymMatrix};

const MAX_ITER: usize = 500;

/// Sensitivity kernel with the generalized inverse that minimizes the largest sensitivity over
/// `candidates`.
/// Identical to [`sensitivity_kernel`] unless the criterion is Ds and `M22` is singular.
pub fn sensitivity_kernel_on(
    m: &SymMatrix<f64>,
    spec: &CriterionSpec,
    candidates: &[SymMatrix<f64>],
) -> Result<SymMatrix<f64>> {
    let Criterion::Ds(s) = spec.kind else {
        return sensitivity_kernel(m, spec);
    };
    let (c, x, dropped) = schur_parts(m, s)?;
    if dropped == 0 || candidates.is_empty() {
        return sensitivity_kernel(m, spec);
    }
    let cinv = c.cholesky()?.inverse();
    let n = m.dim();
    let k = dropped;
    let trail: Vec<usize> = (s..n).collect();
    let (_, vecs) = m.submatrix(&trail).eigen();
    let null: Vec<Vec<f64>> = vecs[..k]
        .iter()
        .map(|v| {
            let mut e = vec![0.0; n];
            e[s..].copy_from_slice(v);
            e
        })
        .collect();
    let b0: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            (0..n)
                .map(|a| match a < s {
                    true if a == i => 1.0,
                    true => 0.0,
                    false => -x[i][a - s],
                })
                .collect()
        })
        .collect();

    let dim_u = s * k;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let quads: Vec<Quad> = candidates
        .iter()
        .map(|f| {
            let fb: Vec<Vec<f64>> = b0.iter().map(|b| f.mul_vec(b)).collect();
            let fv: Vec<Vec<f64>> = null.iter().map(|v| f.mul_vec(v)).collect();
            let mut q = Quad::zero(dim_u);
            for i in 0..s {
                for j in 0..s {
                    let cij = cinv.get(i, j);
                    q.a += cij * dot(&b0[i], &fb[j]);
                    for l in 0..k {
                        q.g[i * k + l] += cij * dot(&null[l], &fb[j]);
                        for l2 in 0..k {
                            q.h[(i * k + l) * dim_u + j * k + l2] += cij * dot(&null[l], &fv[l2]);
                        }
                    }
                }
            }
            q
        })
        .collect();
    let u = minimax(&quads, spec.bound);

    let b: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            let mut row = b0[i].clone();
            for (l, v) in null.iter().enumerate() {
                row.iter_mut().zip(v).for_each(|(r, &vi)| *r += u[i * k + l] * vi);
            }
            row
        })
        .collect();
    Ok(SymMatrix::from_fn(n, |p, q| {
        let mut acc = 0.0;
        for i in 0..s {
            for j in 0..s {
                acc += b[i][p] * cinv.get(i, j) * b[j][q];
            }
        }
        acc
    }))
}

/// `a + 2 g.u + u^T H u`, `H` row-major.
#[derive(Clone)]
struct Quad {
    a: f64,
    g: Vec<f64>,
    h: Vec<f64>,
}

impl Quad {
    fn zero(dim: usize) -> Self {
        Self {
            a: 0.0,
            g: vec![0.0; dim],
            h: vec![0.0; dim * dim],
        }
    }

    fn eval(&self, u: &[f64]) -> f64 {
        let n = u.len();
        let mut v = self.a;
        for i in 0..n {
            v += 2.0 * self.g[i] * u[i];
            for j in 0..n {
                v += u[i] * self.h[i * n + j] * u[j];
            }
        }
        v
    }

    fn mix(&self, other: &Quad, t: f64) -> Quad {
        let lerp = |a: f64, b: f64| (1.0 - t) * a + t * b;
        Quad {
            a: lerp(self.a, other.a),
            g: self.g.iter().zip(&other.g).map(|(&a, &b)| lerp(a, b)).collect(),
            h: self.h.iter().zip(&other.h).map(|(&a, &b)| lerp(a, b)).collect(),
        }
    }

    /// Minimizer and minimum; a lightly regularized solve covers a singular `H`.
    fn minimize(&self) -> (Vec<f64>, f64) {
        let n = self.g.len();
        let scale = (0..n).fold(0.0f64, |acc, i| acc.max(self.h[i * n + i]));
        if !(scale > 0.0) {
            return (vec![0.0; n], self.a);
        }
        let h = SymMatrix::from_fn(n, |i, j| self.h[i * n + j] + if i == j { 1e-10 * scale } else { 0.0 });
        let u = match h.cholesky() {
            Ok(ch) => ch.solve(&self.g.iter().map(|v| -v).collect::<Vec<_>>()),
            Err(_) => vec![0.0; n],
        };
        let v = self.eval(&u);
        (u, v)
    }
}

/// `argmin_u max_i q_i(u)` by Frank-Wolfe on the dual `max_lambda min_u sum lambda_i q_i(u)`,
/// stopping once the duality gap is negligible against `bound`.
fn minimax(quads: &[Quad], bound: f64) -> Vec<f64> {
    let worst = |u: &[f64]| {
        quads
            .iter()
            .enumerate()
            .map(|(i, q)| (i, q.eval(u)))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
    };
    let dim = quads[0].g.len();
    let zero = vec![0.0; dim];
    let (i0, v0) = worst(&zero);
    let mut best = (zero, v0);
    let mut agg = quads[i0].clone();
    for _ in 0..MAX_ITER {
        let (u, lower) = agg.minimize();
        let (i, upper) = worst(&u);
        if upper < best.1 {
            best = (u, upper);
        }
        if best.1 - lower <= 1e-10 * bound {
            break;
        }
        let (t, _) = golden_max(|t| agg.mix(&quads[i], t).minimize().1, 0.0, 1.0, 1e-12);
        agg = agg.mix(&quads[i], t);
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimax_of_two_parabolas_meets_in_the_middle() {
        let q = |c: f64| Quad {
            a: c * c,
            g: vec![-c],
            h: vec![1.0],
        };
        // (u - 1)^2 and (u + 1)^2: the best u is 0 with value 1
        let u = minimax(&[q(1.0), q(-1.0)], 1.0);
        assert!(u[0].abs() < 1e-4, "{u:?}");
    }

    #[test]
    fn nonsingular_information_gives_the_usual_kernel() {
        let m = SymMatrix::from_rows(&[vec![2.0, 0.5, 0.1], vec![0.5, 1.0, 0.2], vec![0.1, 0.2, 1.5]]).unwrap();
        let spec = CriterionSpec::ds(1, 3).unwrap();
        let a = sensitivity_kernel_on(&m, &spec, &[m.clone()]).unwrap();
        let b = sensitivity_kernel(&m, &spec).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn singular_design_is_certified_by_the_best_inverse() {
        // the support informs (theta1, theta2) only; the other candidate ties theta1 to theta3,
        // which the Moore-Penrose inverse ignores
        let support = SymMatrix::from_rows(&[vec![1.0, 0.5, 0.0], vec![0.5, 1.0, 0.0], vec![0.0, 0.0, 0.0]]).unwrap();
        let other = SymMatrix::from_rows(&[vec![1.0, 0.0, 0.8], vec![0.0, 0.0, 0.0], vec![0.8, 0.0, 1.0]]).unwrap();
        let spec = CriterionSpec::ds(1, 3).unwrap();
        let cands = [support.clone(), other.clone()];
        let mp = sensitivity_kernel(&support, &spec).unwrap();
        let best = sensitivity_kernel_on(&support, &spec, &cands).unwrap();
        assert!((best.trace_product(&support) - 1.0).abs() < 1e-12);
        assert!(mp.trace_product(&other) > 1.3);
        assert!(best.trace_product(&other) <= 1.0 + 1e-9, "{}", best.trace_product(&other));
    }
}
