//! Checks shared by the oracle tests and the acceptance suite.

#![allow(dead_code)]

use copula_oed::copulas::{BaseCopula, CopulaSpec, Family, MixtureCopula};
use copula_oed::models::{multinomial_fim_oracle, DiscreteModel, OutcomeModel, WeibullDependence, WeibullModel};
use copula_oed::SymMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn frob_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (a.get(i, j) - b.get(i, j)).powi(2);
        }
    }
    s.sqrt()
}

/// Largest relative Frobenius error of `fim_single` against the multinomial oracle over 20
/// random `(x, gamma)` near the localized values; draws where the model is undefined are
/// replaced.
pub fn worst_fim_error(model: &dyn DiscreteModel, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = model.design_space();
    let base = model.params().values().to_vec();
    let mut worst: f64 = 0.0;
    let mut done = 0;
    let mut tries = 0;
    while done < 20 {
        tries += 1;
        if tries >= 200 {
            return Err(format!("{}: too many undefined draws", model.name()));
        }
        let x = rng.gen_range(space.lo..=space.hi);
        let g: Vec<f64> = base
            .iter()
            .map(|&v| if v == 0.0 { 0.0 } else { v * (1.0 + rng.gen_range(-0.05..0.05)) })
            .collect();
        let (Ok(a), Ok(b)) = (model.fim_single(x, &g), multinomial_fim_oracle(model, x, &g)) else {
            continue;
        };
        worst = worst.max(frob_diff(&a, &b) / b.frobenius_norm());
        done += 1;
    }
    Ok(worst)
}

fn exp(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln() / rate
}

/// Largest `|simulated - model| / se` over the four cells at `x in {0, 0.35, 0.7, 1}`.
///
/// Simulates the shock mechanism in the times `s = y^kappa`: the first event arrives at the
/// total rate and is a failure of component 1, of component 2 or of both in proportion to
/// `beta1 : beta2 : beta3`; the survivor then fails at rate `r5` (component 2) or `r4`
/// (component 1).
pub fn shock_simulation_z(draws: usize) -> f64 {
    let m = WeibullModel::localized(WeibullDependence::MarshallOlkin).unwrap();
    let (z1, z2) = m.cutoffs();
    let g = m.params().values().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for x in [0.0, 0.35, 0.7, 1.0] {
        let r = m.rates(x, &g).unwrap();
        let (a, b) = (z1.powf(r.kappa), z2.powf(r.kappa));
        let total = r.total();
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            let s0 = exp(&mut rng, total);
            let pick = rng.gen::<f64>() * total;
            let (s, t) = if pick < r.beta1 {
                (s0, s0 + exp(&mut rng, r.r5))
            } else if pick < r.beta1 + r.beta2 {
                (s0 + exp(&mut rng, r.r4), s0)
            } else {
                (s0, s0)
            };
            counts[2 * usize::from(s >= a) + usize::from(t >= b)] += 1;
        }
        let p = m.cell_probs(x, &g).unwrap().to_array();
        for k in 0..4 {
            let est = counts[k] as f64 / draws as f64;
            let se = (p[k] * (1.0 - p[k]) / draws as f64).sqrt();
            worst = worst.max((est - p[k]).abs() / se);
        }
    }
    worst
}

/// Copulas for the axiom grids: every family at weak and strong dependence, all pairwise
/// mixtures and Khoudraji transforms.
pub fn axiom_copulas() -> Vec<(String, CopulaSpec<f64>)> {
    use Family::*;
    let bases: Vec<(Family, f64)> = vec![
        (Clayton, 0.5),
        (Clayton, 18.0),
        (Gumbel, 1.5),
        (Gumbel, 8.0),
        (Frank, -6.0),
        (Frank, 3.0),
        (Frank, 25.0),
        (Joe, 1.5),
        (Joe, 9.0),
    ];
    let mut out = Vec::new();
    for &(f, a) in &bases {
        out.push((format!("{f}({a})"), CopulaSpec::base(f, a).unwrap()));
        for (a2, a3) in [(0.4, 0.0), (0.6, 0.9), (1.0, 0.2)] {
            out.push((
                format!("K[{f}({a}), {a2}, {a3}]"),
                CopulaSpec::khoudraji(f, a, a2, a3).unwrap(),
            ));
        }
    }
    for (i, &(f1, a1)) in bases.iter().enumerate() {
        for &(f2, a2) in &bases[i + 1..] {
            let m = MixtureCopula::pair(BaseCopula::new(f1, a1).unwrap(), BaseCopula::new(f2, a2).unwrap(), 0.3)
                .unwrap();
            out.push((format!("0.3 {f1}({a1}) + 0.7 {f2}({a2})"), m.into()));
        }
    }
    out
}

/// Number of axiom violations beyond `tol` on a 21 x 21 grid, with a description of the first.
pub fn axiom_violations(tol: f64) -> (usize, Option<String>) {
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let mut count = 0;
    let mut first = None;
    let mut flag = |ok: bool, what: String| {
        if !ok {
            count += 1;
            first.get_or_insert(what);
        }
    };
    for (name, c) in axiom_copulas() {
        let cdf = |u: f64, v: f64| c.cdf(u, v).unwrap();
        for &u in &grid {
            flag(cdf(u, 0.0).abs() <= tol && cdf(0.0, u).abs() <= tol, format!("{name}: grounded at {u}"));
            flag(
                (cdf(u, 1.0) - u).abs() <= tol && (cdf(1.0, u) - u).abs() <= tol,
                format!("{name}: uniform margin at {u}"),
            );
            for &v in &grid {
                let p = cdf(u, v);
                flag(
                    p >= (u + v - 1.0).max(0.0) - tol && p <= u.min(v) + tol,
                    format!("{name}: Frechet bounds at ({u}, {v})"),
                );
            }
        }
        for w in grid.windows(2) {
            for z in grid.windows(2) {
                let vol = cdf(w[1], z[1]) - cdf(w[0], z[1]) - cdf(w[1], z[0]) + cdf(w[0], z[0]);
                flag(vol >= -tol, format!("{name}: rectangle [{}, {}] x [{}, {}]", w[0], w[1], z[0], z[1]));
            }
        }
    }

    // mixture closure and exchangeability at equal Khoudraji exponents
    use Family::*;
    let pairs = [(Clayton, 2.0, Gumbel, 3.0), (Frank, 5.0, Joe, 2.0), (Joe, 4.0, Clayton, 1.0)];
    for &(f1, a1, f2, a2) in &pairs {
        let (b1, b2) = (BaseCopula::new(f1, a1).unwrap(), BaseCopula::new(f2, a2).unwrap());
        let (c1, c2) = (CopulaSpec::from(b1), CopulaSpec::from(b2));
        for wt in [0.0, 0.25, 0.5, 1.0] {
            let m: CopulaSpec<f64> = MixtureCopula::pair(b1, b2, wt).unwrap().into();
            for &u in &grid {
                for &v in &grid {
                    let p = m.cdf(u, v).unwrap();
                    let direct = wt * c1.cdf(u, v).unwrap() + (1.0 - wt) * c2.cdf(u, v).unwrap();
                    flag(
                        (p - direct).abs() <= tol && (-tol..=1.0 + tol).contains(&p),
                        format!("mixture {f1}/{f2} w={wt} at ({u}, {v})"),
                    );
                }
            }
        }
    }
    for (f, a) in [(Clayton, 3.0), (Gumbel, 2.0), (Frank, 7.0), (Joe, 3.0)] {
        for t in [0.0, 0.3, 0.7, 1.0] {
            let c = CopulaSpec::khoudraji(f, a, t, t).unwrap();
            for &u in &grid {
                for &v in &grid {
                    flag(
                        (c.cdf(u, v).unwrap() - c.cdf(v, u).unwrap()).abs() <= tol,
                        format!("Khoudraji {f}({a}) exponent {t} at ({u}, {v})"),
                    );
                }
            }
        }
    }
    (count, first)
}
