//! Weight optimization on a candidate grid, followed by continuous refinement of the support.
//!
//! Each iteration takes a projected Newton step on the support plus the grid maximizer of the
//! sensitivity `d` (for large supports, or when the step is singular, a damped multiplicative
//! step `w_i <- w_i (d_i / bound)^lambda` instead; both backtracked so the criterion never
//! decreases), then a vertex exchange moving mass from the weakest support point to the
//! maximizer, then purges negligible weights. After the grid has converged, clusters of support
//! points are moved one at a time to the maximizer of the sensitivity in their cells (golden
//! section); a move is kept only if it raises the criterion once the weights are re-solved.

use rayon::prelude::*;

use super::{criterion_value, sensitivity_kernel, sensitivity_kernel_on, CriterionSpec, Design, MERGE_TOL};
use crate::error::{Error, Result};
use crate::models::OutcomeModel;
use crate::numerics::{golden_max, Interval, SymMatrix};

/// Supports up to this size get Newton steps; larger ones the multiplicative update.
const NEWTON_MAX_SUPPORT: usize = 60;

/// Relative spread of the sensitivity allowed across the support once the grid has converged.
const SUPPORT_TOL: f64 = 1e-10;
/// Iteration budget of one weight solve restricted to the support.
const SUPPORT_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Relative slack of the stopping rule `max d <= bound (1 + delta)`.
    pub delta: f64,
    /// Weights below this are dropped when their sensitivity is below the bound.
    pub w_floor: f64,
    /// Exponent of the multiplicative update.
    pub damping: f64,
    /// Cap on the total number of weight iterations.
    pub max_iter: usize,
    /// Continuous refinement rounds after grid convergence (0 disables it).
    pub polish_rounds: usize,
    /// The certificate grid has `refine_factor (n - 1) + 1` points spread over the design space.
    pub refine_factor: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            w_floor: 1e-6,
            damping: 1.0,
            max_iter: 50_000,
            polish_rounds: 50,
            refine_factor: 10,
        }
    }
}

/// Independent re-check of the equivalence theorem for a design.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub grid_size: usize,
    pub max_sensitivity: f64,
    pub argmax: f64,
    pub bound: f64,
    /// `sum_i w_i d(x_i)`, which equals the bound for every nonsingular design.
    pub trace_sum: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct DesignResult {
    pub design: Design,
    pub criterion_value: f64,
    pub bound: f64,
    /// Largest sensitivity over the candidate grid and the support.
    pub max_sensitivity: f64,
    /// `(x, d(x))` on the candidate grid and the support points, sorted by `x`.
    pub sensitivity_samples: Vec<(f64, f64)>,
    pub iterations: usize,
    pub converged: bool,
    /// Criterion value after every weight iteration.
    pub trace: Vec<f64>,
    /// Re-check on a grid `refine_factor` times finer.
    pub certificate: Certificate,
}

/// `n` equispaced points covering `space` (a single point gives the lower end).
pub fn uniform_grid(space: Interval<f64>, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![space.lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    space.hi
                } else {
                    space.lo + (space.hi - space.lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Candidate points with their information matrices, sorted by `x`.
struct Pool {
    xs: Vec<f64>,
    fims: Vec<SymMatrix<f64>>,
}

impl Pool {
    fn build<M: OutcomeModel + ?Sized>(model: &M, xs: Vec<f64>, gamma: &[f64]) -> Result<Self> {
        let fims = xs
            .par_iter()
            .map(|&x| model.fim_single(x, gamma))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { xs, fims })
    }

    fn subset(&self, idx: &[usize]) -> Self {
        Self {
            xs: idx.iter().map(|&i| self.xs[i]).collect(),
            fims: idx.iter().map(|&i| self.fims[i].clone()).collect(),
        }
    }

    fn info(&self, w: &[f64]) -> SymMatrix<f64> {
        let mut m = SymMatrix::zeros(self.fims[0].dim());
        for (f, &wi) in self.fims.iter().zip(w) {
            if wi > 0.0 {
                m.add_scaled(wi, f);
            }
        }
        m
    }

    /// Criterion value, `-inf` where the information is singular.
    fn phi(&self, w: &[f64], spec: &CriterionSpec) -> f64 {
        criterion_value(&self.info(w), spec).unwrap_or(f64::NEG_INFINITY)
    }

    fn sensitivities(&self, w: &[f64], spec: &CriterionSpec) -> Result<(f64, Vec<f64>)> {
        let m = self.info(w);
        let phi = criterion_value(&m, spec)?;
        let kern = sensitivity_kernel_on(&m, spec, &self.fims)?;
        Ok((phi, self.fims.par_iter().map(|f| kern.trace_product(f)).collect()))
    }
}

/// Gaussian elimination with partial pivoting; `None` for a numerically singular system.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if !(a[piv][col].abs() > 1e-300 + 1e-14 * scale) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// First index of the maximum, so ties go to the lowest `x`.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy)]
enum Stop {
    /// `max_i d_i <= bound (1 + delta)` over the whole pool.
    Grid(f64),
    /// `|d_i - bound| <= tol bound` on every point with positive weight.
    Support(f64),
}

struct State<'a> {
    spec: &'a CriterionSpec,
    cfg: &'a OptimizerConfig,
    iterations: usize,
    /// iteration count at which the current solve stops
    limit: usize,
    trace: Vec<f64>,
}

impl State<'_> {
    /// Runs weight iterations on `pool` until `stop` holds. Returns whether it did.
    fn optimize_weights(&mut self, pool: &Pool, w: &mut [f64], stop: Stop) -> Result<bool> {
        let bound = self.spec.bound;
        loop {
            let (phi, d) = self.sensitivities(pool, w)?;
            self.trace.push(phi);
            let imax = argmax(&d);
            let done = match stop {
                Stop::Grid(delta) => d[imax] <= bound * (1.0 + delta),
                Stop::Support(tol) => d
                    .iter()
                    .zip(w.iter())
                    .filter(|(_, &wi)| wi > 0.0)
                    .all(|(&di, _)| (di - bound).abs() <= tol * bound),
            };
            if done {
                return Ok(true);
            }
            if self.iterations >= self.limit {
                return Ok(false);
            }
            self.iterations += 1;
            let mut phi = phi;
            let before = w.to_vec();

            let support = w.iter().filter(|&&v| v > 0.0).count();
            phi = if support <= NEWTON_MAX_SUPPORT {
                // a singular Ds design has no Newton step; the multiplicative one still applies
                match self.newton_step(pool, w, imax, phi) {
                    Err(Error::SingularMatrix { .. }) => self.multiplicative_step(pool, w, &d, phi),
                    r => r?,
                }
            } else {
                self.multiplicative_step(pool, w, &d, phi)
            };

            // vertex exchange between the weakest support point and the maximizer
            let jmin = (0..w.len())
                .filter(|&j| w[j] > 0.0 && j != imax)
                .min_by(|&a, &b| d[a].total_cmp(&d[b]));
            if let Some(j) = jmin {
                let cap = w[j];
                let moved = |t: f64| {
                    let mut c = w.to_vec();
                    c[imax] += t;
                    c[j] -= t;
                    c
                };
                let (t, pt) = golden_max(|t| pool.phi(&moved(t), self.spec), 0.0, cap, cap * 1e-10);
                if pt > phi {
                    let mut c = moved(t);
                    if cap - t <= cap * 1e-9 {
                        c[imax] += c[j];
                        c[j] = 0.0;
                    }
                    let pc = pool.phi(&c, self.spec);
                    if pc >= phi {
                        w.copy_from_slice(&c);
                        phi = pc;
                    }
                }
            }

            // purge weights that are negligible and not growing
            let (_, d) = self.sensitivities(pool, w)?;
            let purge: Vec<usize> = (0..w.len())
                .filter(|&j| w[j] > 0.0 && w[j] < self.cfg.w_floor && d[j] < bound)
                .collect();
            if !purge.is_empty() {
                let mut c = w.to_vec();
                purge.iter().for_each(|&j| c[j] = 0.0);
                let total: f64 = c.iter().sum();
                c.iter_mut().for_each(|v| *v /= total);
                if pool.phi(&c, self.spec) >= phi - 1e-10 {
                    w.copy_from_slice(&c);
                }
            }
            if w == before.as_slice() {
                // no step improves the criterion beyond roundoff
                return Ok(matches!(stop, Stop::Support(_)));
            }
        }
    }

    fn sensitivities(&self, pool: &Pool, w: &[f64]) -> Result<(f64, Vec<f64>)> {
        pool.sensitivities(w, self.spec)
    }

    /// Damped multiplicative update along `w' - w`, an ascent direction, with backtracking.
    fn multiplicative_step(&self, pool: &Pool, w: &mut [f64], d: &[f64], mut phi: f64) -> f64 {
        let bound = self.spec.bound;
        let mut prop: Vec<f64> = w
            .iter()
            .zip(d)
            .map(|(&wi, &di)| wi * (di.max(0.0) / bound).powf(self.cfg.damping))
            .collect();
        let total: f64 = prop.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return phi;
        }
        prop.iter_mut().for_each(|p| *p /= total);
        let mut t = 1.0;
        for _ in 0..40 {
            let cand: Vec<f64> = w.iter().zip(&prop).map(|(&a, &b)| a + t * (b - a)).collect();
            let pc = self.phi(pool, &cand);
            if pc >= phi {
                w.copy_from_slice(&cand);
                phi = pc;
                break;
            }
            t *= 0.5;
        }
        phi
    }

    /// Newton step for the weights on the support plus the grid maximizer, keeping
    /// `sum w = 1` and `w >= 0` (points whose step points out of the simplex leave the free
    /// set), with backtracking.
    fn newton_step(&self, pool: &Pool, w: &mut [f64], imax: usize, phi: f64) -> Result<f64> {
        let m = pool.info(w);
        let kern = sensitivity_kernel(&m, self.spec)?;
        let minv = m.cholesky()?.inverse();
        let free: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0 || i == imax).collect();
        let n = m.dim();
        let dense = |a: &SymMatrix<f64>, b: &SymMatrix<f64>| -> Vec<f64> {
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for k in 0..n {
                    let aik = a.get(i, k);
                    for j in 0..n {
                        out[i * n + j] += aik * b.get(k, j);
                    }
                }
            }
            out
        };
        let tr = |x: &[f64], y: &[f64]| -> f64 {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += x[i * n + j] * y[j * n + i];
                }
            }
            acc
        };
        let p: Vec<Vec<f64>> = free.iter().map(|&i| dense(&kern, &pool.fims[i])).collect();
        let r: Vec<Vec<f64>> = free.iter().map(|&i| dense(&minv, &pool.fims[i])).collect();
        let g: Vec<f64> = p.iter().map(|pi| (0..n).map(|a| pi[a * n + a]).sum()).collect();
        let k = free.len();
        let mut h = vec![vec![0.0; k]; k];
        for a in 0..k {
            for b in a..k {
                let v = tr(&p[a], &p[b]) - tr(&r[a], &p[b]) - tr(&r[b], &p[a]);
                h[a][b] = v;
                h[b][a] = v;
            }
        }
        let scale = (0..k).fold(0.0f64, |acc, a| acc.max(h[a][a].abs())).max(1e-300);

        // positions in `free` still allowed to move
        let mut active: Vec<usize> = (0..k).collect();
        let step = loop {
            let q = active.len();
            // KKT system [H 1; 1^T 0] [dw; mu] = [-g; 0], lightly regularized
            let mut a = vec![vec![0.0; q + 1]; q + 1];
            let mut rhs = vec![0.0; q + 1];
            for (x, &i) in active.iter().enumerate() {
                for (y, &j) in active.iter().enumerate() {
                    a[x][y] = h[i][j];
                }
                a[x][x] -= 1e-10 * scale;
                a[x][q] = 1.0;
                a[q][x] = 1.0;
                rhs[x] = -g[i];
            }
            let Some(sol) = solve_dense(a, rhs) else {
                return Ok(phi);
            };
            let blocked: Vec<usize> = (0..q)
                .filter(|&x| w[free[active[x]]] <= 0.0 && sol[x] < 0.0)
                .map(|x| active[x])
                .collect();
            if blocked.is_empty() {
                let mut dw = vec![0.0; w.len()];
                for (x, &i) in active.iter().enumerate() {
                    dw[free[i]] = sol[x];
                }
                break dw;
            }
            active.retain(|i| !blocked.contains(i));
            if active.len() < 2 {
                return Ok(phi);
            }
        };

        let mut t_max = 1.0f64;
        for (i, &di) in step.iter().enumerate() {
            if di < 0.0 {
                t_max = t_max.min(w[i] / -di);
            }
        }
        let mut t = t_max;
        for _ in 0..40 {
            let cand: Vec<f64> = w
                .iter()
                .zip(&step)
                .map(|(&a, &b)| {
                    let v = a + t * b;
                    if v <= 1e-15 { 0.0 } else { v }
                })
                .collect();
            let total: f64 = cand.iter().sum();
            let cand: Vec<f64> = cand.iter().map(|v| v / total).collect();
            let pc = self.phi(pool, &cand);
            // near the optimum the gain is below the rounding noise of phi
            if pc >= phi - 1e-13 * (1.0 + phi.abs()) {
                w.copy_from_slice(&cand);
                return Ok(pc);
            }
            t *= 0.5;
        }
        Ok(phi)
    }

    fn phi(&self, pool: &Pool, w: &[f64]) -> f64 {
        pool.phi(w, self.spec)
    }

    /// Equalizes the sensitivity on the current support, then reruns the grid iterations so
    /// that dropped candidates can come back.
    fn settle(&mut self, pool: &Pool, w: &mut [f64]) -> Result<bool> {
        self.settle_support(pool, w)?;
        self.optimize_weights(pool, w, Stop::Grid(self.cfg.delta))
    }

    /// Optimal weights on the current support alone.
    fn settle_support(&mut self, pool: &Pool, w: &mut [f64]) -> Result<bool> {
        let idx: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
        let sub = pool.subset(&idx);
        let mut sw: Vec<f64> = idx.iter().map(|&i| w[i]).collect();
        let outer = self.limit;
        self.limit = outer.min(self.iterations + SUPPORT_ITER);
        let done = self.optimize_weights(&sub, &mut sw, Stop::Support(SUPPORT_TOL));
        self.limit = outer;
        let done = done?;
        w.iter_mut().for_each(|v| *v = 0.0);
        for (k, &i) in idx.iter().enumerate() {
            w[i] = sw[k];
        }
        Ok(done)
    }
}

/// Computes a locally optimal design for `spec` at `gamma` on the candidate `grid`.
pub fn optimize_design<M: OutcomeModel + ?Sized>(
    model: &M,
    gamma: &[f64],
    spec: &CriterionSpec,
    grid: &[f64],
    cfg: &OptimizerConfig,
) -> Result<DesignResult> {
    model.check_gamma(gamma)?;
    if spec.dim() != model.dim() {
        return Err(Error::domain(format!(
            "criterion built for {} parameters, model has {}",
            spec.dim(),
            model.dim()
        )));
    }
    if grid.len() < model.dim() {
        return Err(Error::domain(format!(
            "candidate grid has {} points, need at least {}",
            grid.len(),
            model.dim()
        )));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL);
    let base = Pool::build(model, grid.clone(), gamma)?;
    let mut state = State {
        spec,
        cfg,
        iterations: 0,
        limit: cfg.max_iter,
        trace: Vec::new(),
    };

    let mut pool = base;
    let mut w = vec![1.0 / grid.len() as f64; grid.len()];
    let mut converged = state.optimize_weights(&pool, &mut w, Stop::Grid(cfg.delta))?;

    for _ in 0..cfg.polish_rounds {
        if !converged {
            break;
        }
        let m = pool.info(&w);
        let kern = sensitivity_kernel_on(&m, spec, &pool.fims)?;
        let sens = |x: f64| {
            model
                .fim_single(x, gamma)
                .map(|f| kern.trace_product(&f))
                .unwrap_or(f64::NEG_INFINITY)
        };
        // clusters of adjacent support points in the pool
        let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > cfg.w_floor).collect();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &i in &support {
            match clusters.last_mut() {
                Some(c) if *c.last().unwrap() + 1 == i => c.push(i),
                _ => clusters.push(vec![i]),
            }
        }
        let mut new_pts: Vec<(f64, f64)> = Vec::new();
        let mut moved = false;
        for c in &clusters {
            let (first, last) = (c[0], *c.last().unwrap());
            let lo = if first == 0 { pool.xs[0] } else { pool.xs[first - 1] };
            let hi = pool.xs.get(last + 1).copied().unwrap_or(pool.xs[last]);
            let mass: f64 = c.iter().map(|&i| w[i]).sum();
            let (mut x, dx) = golden_max(sens, lo, hi, 1e-10 * (hi - lo).max(1e-300));
            // on a flat maximum prefer an existing candidate (grid point or interval end)
            if let Some(&p) = pool.xs[first.saturating_sub(1)..=(last + 1).min(pool.xs.len() - 1)]
                .iter()
                .filter(|&&p| (p - x).abs() <= 1e-6 * (hi - lo))
                .find(|&&p| sens(p) >= dx - 1e-10 * spec.bound)
            {
                x = p;
            }
            // a flat maximum is located to about sqrt(eps)
            if c.len() > 1 || (x - pool.xs[first]).abs() > 1e-7 {
                moved = true;
            }
            new_pts.push((x, mass));
        }
        if !moved {
            break;
        }

        // the pool keeps every earlier candidate and gains the refined points
        let extra: Vec<f64> = new_pts
            .iter()
            .map(|p| p.0)
            .filter(|x| pool.xs.iter().all(|o| (o - x).abs() > MERGE_TOL))
            .collect();
        let members: Vec<Vec<f64>> = clusters.iter().map(|c| c.iter().map(|&i| pool.xs[i]).collect()).collect();
        let extra_pool = Pool::build(model, extra, gamma)?;
        let mut entries: Vec<(f64, SymMatrix<f64>, f64)> = pool
            .xs
            .drain(..)
            .zip(pool.fims.drain(..))
            .zip(w.iter().copied())
            .map(|((x, f), wi)| (x, f, wi))
            .chain(extra_pool.xs.into_iter().zip(extra_pool.fims).map(|(x, f)| (x, f, 0.0)))
            .collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        w = entries.iter().map(|e| e.2).collect();
        pool = Pool {
            xs: entries.iter().map(|e| e.0).collect(),
            fims: entries.into_iter().map(|e| e.1).collect(),
        };
        let at = |x: f64| pool.xs.iter().position(|&p| (p - x).abs() <= MERGE_TOL).expect("point in pool");

        // move one cluster at a time onto its refined point, keeping moves that pay off once
        // the weights are re-optimized; moving all at once can overshoot
        let mut phi = pool.phi(&w, spec);
        let mut improved = false;
        for (c, &(x, _)) in members.iter().zip(&new_pts) {
            let mut cand = w.clone();
            let mark = state.trace.len();
            let mass: f64 = c.iter().map(|&p| cand[at(p)]).sum();
            c.iter().for_each(|&p| cand[at(p)] = 0.0);
            cand[at(x)] += mass;
            state.settle_support(&pool, &mut cand)?;
            let pc = pool.phi(&cand, spec);
            if pc > phi {
                w = cand;
                phi = pc;
                improved = true;
            } else {
                state.trace.truncate(mark);
            }
        }
        converged = state.settle(&pool, &mut w)?;
        if !improved {
            break;
        }
    }
    if converged {
        converged = state.settle(&pool, &mut w)?;
    }

    // final design: drop negligible weights
    let keep: Vec<usize> = (0..w.len()).filter(|&i| w[i] >= cfg.w_floor).collect();
    let design = Design::from_unnormalized(
        keep.iter().map(|&i| pool.xs[i]).collect(),
        keep.iter().map(|&i| w[i]).collect(),
    )?;
    let m = crate::design::info_matrix(model, &design, gamma)?;
    let value = criterion_value(&m, spec)?;
    let kern = sensitivity_kernel_on(&m, spec, &pool.fims)?;
    let mut samples: Vec<(f64, f64)> = pool
        .xs
        .iter()
        .zip(&pool.fims)
        .map(|(&x, f)| (x, kern.trace_product(f)))
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let max_sensitivity = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let converged = converged && max_sensitivity <= spec.bound * (1.0 + cfg.delta);

    let space = model.design_space();
    let fine = uniform_grid(space, cfg.refine_factor.max(1) * (grid.len() - 1).max(1) + 1);
    let certificate = certify(model, &design, gamma, spec, &fine, 2.0 * cfg.delta)?;

    Ok(DesignResult {
        design,
        criterion_value: value,
        bound: spec.bound,
        max_sensitivity,
        sensitivity_samples: samples,
        iterations: state.iterations,
        converged,
        trace: state.trace,
        certificate,
    })
}

/// Checks `max_grid d(x) <= bound (1 + rel_tol)` and the trace identity (within 1e-8).
pub fn certify<M: OutcomeModel + ?Sized>(
    model: &M,
    design: &Design,
    gamma: &[f64],
    spec: &CriterionSpec,
    grid: &[f64],
    rel_tol: f64,
) -> Result<Certificate> {
    let m = crate::design::info_matrix(model, design, gamma)?;
    let fims = grid
        .par_iter()
        .map(|&x| model.fim_single(x, gamma))
        .collect::<Result<Vec<_>>>()?;
    let kern = sensitivity_kernel_on(&m, spec, &fims)?;
    let d: Vec<f64> = fims.iter().map(|f| kern.trace_product(f)).collect();
    let i = argmax(&d);
    let trace_sum = design
        .iter()
        .map(|(x, w)| Ok(w * kern.trace_product(&model.fim_single(x, gamma)?)))
        .sum::<Result<f64>>()?;
    let max_sensitivity = d.get(i).copied().unwrap_or(f64::NAN);
    let passed = max_sensitivity <= spec.bound * (1.0 + rel_tol) && (trace_sum - spec.bound).abs() <= 1e-8;
    Ok(Certificate {
        grid_size: grid.len(),
        max_sensitivity,
        argmax: grid.get(i).copied().unwrap_or(f64::NAN),
        bound: spec.bound,
        trace_sum,
        passed,
    })
}
