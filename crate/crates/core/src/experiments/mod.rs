//! Scripted studies: the bivariate polynomial example, the binary mixture tables and the
//! Weibull comparison. Each run computes everything in memory, then emits CSVs and a manifest.

mod output;

pub use output::{matrix_csv, write_atomic, Manifest, OutputSet};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::copulas::{CopulaSpec, Family, TauLink};
use crate::design::{
    criterion_value, info_matrix, loss_percent, optimize_design, uniform_grid, CriterionSpec, Design,
    DesignResult, OptimizerConfig,
};
use crate::error::{Error, Result};
use crate::models::binary::{BETA1, BETA2};
use crate::models::{BinaryLogitModel, FedorovModel, OutcomeModel, WeibullDependence, WeibullModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Fedorov,
    BinaryMixtures,
    Weibull,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Fedorov, Scenario::BinaryMixtures, Scenario::Weibull];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fedorov => "fedorov",
            Scenario::BinaryMixtures => "binary_tables",
            Scenario::Weibull => "weibull",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                Error::config(
                    "name",
                    format!("unknown scenario `{s}` (expected fedorov, binary_tables or weibull)"),
                )
            })
    }
}

/// Kendall's tau ranges of the binary study; all start at `TAU_MIN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauInterval {
    I1,
    I2,
    I3,
}

pub const TAU_MIN: f64 = 0.05;

/// Upper end of the binary design space.
pub const BINARY_X_MAX: f64 = 10.0;

impl TauInterval {
    pub const ALL: [TauInterval; 3] = [TauInterval::I1, TauInterval::I2, TauInterval::I3];

    pub fn tau_max(self) -> f64 {
        match self {
            TauInterval::I1 => 0.3,
            TauInterval::I2 => 0.9,
            TauInterval::I3 => 0.95,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TauInterval::I1 => "I1",
            TauInterval::I2 => "I2",
            TauInterval::I3 => "I3",
        }
    }

    pub fn link(self) -> Result<TauLink<f64>> {
        TauLink::calibrated(TAU_MIN, self.tau_max(), BINARY_X_MAX)
    }
}

fn pair_label((a, b): (Family, Family)) -> String {
    format!("{}-{}", a.code(), b.code())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Candidate grid size over each design space.
    pub grid_points: usize,
    pub optimizer: OptimizerConfig,
    /// Clayton parameter of the polynomial example.
    pub fedorov_alpha1: f64,
    /// Ds losses of D-optimal designs across mixtures, weights and tau ranges.
    pub tau_intervals: Vec<TauInterval>,
    pub alpha2_values: Vec<f64>,
    pub table1_pairs: Vec<(Family, Family)>,
    /// Ds cross-losses between the mixtures.
    pub table2_pairs: Vec<(Family, Family)>,
    pub table2_interval: TauInterval,
    pub table2_alpha2: f64,
    /// `(alpha1, alpha2, alpha3)` of the Khoudraji-Clayton Weibull models.
    pub weibull_alphas: Vec<(f64, f64, f64)>,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    /// The standard settings of `scenario`.
    pub fn standard(scenario: Scenario) -> Self {
        use Family::*;
        Self {
            scenario,
            grid_points: 201,
            optimizer: OptimizerConfig::default(),
            fedorov_alpha1: 18.0,
            tau_intervals: TauInterval::ALL.to_vec(),
            alpha2_values: vec![0.1, 0.5, 0.9],
            table1_pairs: vec![(Joe, Frank), (Clayton, Gumbel), (Joe, Clayton), (Frank, Gumbel)],
            table2_pairs: vec![(Clayton, Gumbel), (Frank, Gumbel), (Joe, Clayton), (Joe, Frank)],
            table2_interval: TauInterval::I2,
            table2_alpha2: 0.5,
            weibull_alphas: vec![(1.5, 0.4, 0.0), (2.0, 0.4, 0.2), (3.6, 0.6, 0.0)],
            output_dir: PathBuf::from("out").join(scenario.name()),
        }
    }

    fn record(&self, m: &mut Manifest) {
        m.set("scenario", self.scenario.name());
        m.set("grid_points", self.grid_points);
        let o = &self.optimizer;
        m.set("optimizer.delta", o.delta);
        m.set("optimizer.w_floor", o.w_floor);
        m.set("optimizer.damping", o.damping);
        m.set("optimizer.max_iter", o.max_iter);
        m.set("optimizer.polish_rounds", o.polish_rounds);
        m.set("optimizer.refine_factor", o.refine_factor);
        m.set("certificate.rel_tol", 2.0 * o.delta);
        m.set("certificate.trace_tol", 1e-8);
    }

    fn optimize<M: OutcomeModel + ?Sized>(&self, model: &M, spec: &CriterionSpec) -> Result<DesignResult> {
        let grid = uniform_grid(model.design_space(), self.grid_points);
        optimize_design(model, model.params().values(), spec, &grid, &self.optimizer)
    }
}

/// Efficiency of `xi` against `xi_star` under `model`; a design whose information matrix is
/// singular for the criterion has efficiency 0.
pub fn cross_efficiency<M: OutcomeModel + ?Sized>(
    model: &M,
    xi: &Design,
    xi_star: &Design,
    spec: &CriterionSpec,
) -> Result<f64> {
    let gamma = model.params().values();
    let reference = criterion_value(&info_matrix(model, xi_star, gamma)?, spec)?;
    match criterion_value(&info_matrix(model, xi, gamma)?, spec) {
        Ok(v) => Ok(((v - reference) / spec.bound).exp()),
        Err(Error::SingularMatrix { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// A finished run: every output file (manifest included) plus status flags.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub outputs: OutputSet,
    pub manifest: Manifest,
    pub all_converged: bool,
    pub all_certified: bool,
}

impl ScenarioRun {
    fn new(scenario: Scenario, mut outputs: OutputSet, mut manifest: Manifest, results: &[&DesignResult]) -> Self {
        let all_converged = results.iter().all(|r| r.converged);
        let all_certified = results.iter().all(|r| r.certificate.passed);
        manifest.set("all_converged", all_converged);
        manifest.set("all_certified", all_certified);
        outputs.add("manifest.txt", manifest.render());
        Self {
            scenario,
            outputs,
            manifest,
            all_converged,
            all_certified,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        self.outputs.write_all(dir)
    }
}

/// Runs the configured scenario without touching the file system.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    match cfg.scenario {
        Scenario::Fedorov => Ok(run_fedorov(cfg)?.into_run(cfg)),
        Scenario::BinaryMixtures => Ok(run_binary_tables(cfg)?.into_run(cfg)),
        Scenario::Weibull => Ok(run_weibull(cfg)?.into_run(cfg)),
    }
}

// ---------------------------------------------------------------------------------------------
// polynomial regression with Gaussian margins

#[derive(Debug, Clone)]
pub struct FedorovReport {
    pub product: FedorovModel,
    pub clayton: FedorovModel,
    /// D-optimal under independence.
    pub product_d: DesignResult,
    /// Ds-optimal for the six regression coefficients under the Clayton copula.
    pub clayton_ds: DesignResult,
    /// Ds-efficiency loss (percent) of `product_d` under the Clayton model.
    pub loss: f64,
}

pub fn run_fedorov(cfg: &ScenarioConfig) -> Result<FedorovReport> {
    let product = FedorovModel::new(CopulaSpec::product(), [0.0; 6]);
    let clayton = FedorovModel::new(CopulaSpec::base(Family::Clayton, cfg.fedorov_alpha1)?, [0.0; 6]);
    let product_d = cfg.optimize(&product, &CriterionSpec::d(product.dim())?)?;
    let ds = CriterionSpec::ds(6, clayton.dim())?;
    let clayton_ds = cfg.optimize(&clayton, &ds)?;
    let loss = loss_percent(cross_efficiency(&clayton, &product_d.design, &clayton_ds.design, &ds)?);
    Ok(FedorovReport {
        product,
        clayton,
        product_d,
        clayton_ds,
        loss,
    })
}

impl FedorovReport {
    fn into_run(self, cfg: &ScenarioConfig) -> ScenarioRun {
        let mut m = Manifest::new();
        cfg.record(&mut m);
        m.record_model("product", &self.product);
        m.record_model("clayton", &self.clayton);
        m.record_result("product.d", &self.product_d);
        m.record_result("clayton.ds6", &self.clayton_ds);
        m.set("ds_loss_percent", format!("{:.4}", self.loss));
        let mut o = OutputSet::default();
        o.add_design("product_d", &self.product_d);
        o.add_design("clayton_ds", &self.clayton_ds);
        o.add("efficiency.csv", format!("design,criterion,loss_percent\nproduct_d,ds6,{:.4}\n", self.loss));
        ScenarioRun::new(Scenario::Fedorov, o, m, &[&self.product_d, &self.clayton_ds])
    }
}

// ---------------------------------------------------------------------------------------------
// binary outcomes with tau-matched mixtures

#[derive(Debug, Clone)]
pub struct BinaryCell {
    pub pair: (Family, Family),
    pub alpha2: f64,
    pub interval: TauInterval,
    pub model: BinaryLogitModel,
    /// D-optimal design (loss sweep cells only).
    pub d: Option<DesignResult>,
    /// Ds-optimal design for the mixture weight.
    pub ds: DesignResult,
}

impl BinaryCell {
    /// Ds-efficiency loss of the D-optimal design.
    pub fn d_loss(&self) -> Result<Option<f64>> {
        self.d
            .as_ref()
            .map(|d| {
                let e = cross_efficiency(&self.model, &d.design, &self.ds.design, &ds_spec(&self.model)?)?;
                Ok(loss_percent(e))
            })
            .transpose()
    }
}

fn ds_spec(model: &BinaryLogitModel) -> Result<CriterionSpec> {
    CriterionSpec::ds(1, model.dim())
}

#[derive(Debug, Clone)]
pub struct BinaryTables {
    pub cells: Vec<BinaryCell>,
    /// `(pair, alpha2, interval, loss)` in sweep order.
    pub table1: Vec<((Family, Family), f64, TauInterval, f64)>,
    /// `cross[r][c]`: Ds-loss of the design built for pair `r`, measured under pair `c`
    /// against that model's own optimum.
    pub cross: Vec<Vec<f64>>,
    pub pairs: Vec<(Family, Family)>,
}

impl BinaryTables {
    pub fn table1_value(&self, pair: (Family, Family), alpha2: f64, interval: TauInterval) -> Option<f64> {
        self.table1
            .iter()
            .find(|(p, a, i, _)| *p == pair && *a == alpha2 && *i == interval)
            .map(|t| t.3)
    }

    /// Cross-loss matrix, indexed `(true, assumed)`.
    pub fn table2(&self, true_pair: (Family, Family), assumed: (Family, Family)) -> Option<f64> {
        let r = self.pairs.iter().position(|&p| p == true_pair)?;
        let c = self.pairs.iter().position(|&p| p == assumed)?;
        Some(self.cross[r][c])
    }

    fn table1_csv(&self, cfg: &ScenarioConfig) -> String {
        let mut out = String::from("pair,alpha2");
        for i in &cfg.tau_intervals {
            write!(out, ",{}", i.label()).unwrap();
        }
        out.push('\n');
        for &pair in &cfg.table1_pairs {
            for &a in &cfg.alpha2_values {
                write!(out, "{},{a}", pair_label(pair)).unwrap();
                for &i in &cfg.tau_intervals {
                    let v = self.table1_value(pair, a, i).expect("swept cell");
                    write!(out, ",{v:.2}").unwrap();
                }
                out.push('\n');
            }
        }
        out
    }

    fn into_run(self, cfg: &ScenarioConfig) -> ScenarioRun {
        let mut m = Manifest::new();
        cfg.record(&mut m);
        m.set("binary.beta1", format!("{:?}", BETA1));
        m.set("binary.beta2", format!("{:?}", BETA2));
        m.set("binary.design_space", format!("[0, {BINARY_X_MAX}]"));
        m.set("tau.epsilon", TAU_MIN);
        m.set("tau.link", "logistic(alpha1 x - c), c = ln((1 - epsilon)/epsilon), slope set by tau(x_max) = tau_max, unclamped");
        for &i in &cfg.tau_intervals {
            let link = i.link().expect("valid interval");
            m.set(format!("tau.{}.tau_max", i.label()), i.tau_max());
            m.set(format!("tau.{}.alpha1", i.label()), link.alpha1);
        }
        m.set("table2.interval", cfg.table2_interval.label());
        m.set("table2.alpha2", cfg.table2_alpha2);
        m.set(
            "table2.entry",
            "row r, column c = Ds-loss of the design optimal under r, measured under c against the optimum of c",
        );
        m.set(
            "table2_transposed.entry",
            "row r, column c = Ds-loss of the design optimal under c, measured under r against the optimum of r",
        );
        let mut o = OutputSet::default();
        for c in &self.cells {
            let stem = format!("{}_a{}_{}", pair_label(c.pair), c.alpha2, c.interval.label());
            m.record_model(&stem, &c.model);
            if let Some(d) = &c.d {
                m.record_result(&format!("{stem}.d"), d);
                o.add_design(&format!("{stem}_d"), d);
            }
            m.record_result(&format!("{stem}.ds"), &c.ds);
            o.add_design(&format!("{stem}_ds"), &c.ds);
        }
        o.add("table1.csv", self.table1_csv(cfg));
        let labels: Vec<String> = self.pairs.iter().map(|&p| pair_label(p)).collect();
        o.add("table2.csv", matrix_csv("true\\assumed", &labels, &labels, &self.cross));
        let transposed: Vec<Vec<f64>> =
            (0..labels.len()).map(|r| (0..labels.len()).map(|c| self.cross[c][r]).collect()).collect();
        o.add("table2_transposed.csv", matrix_csv("true\\assumed", &labels, &labels, &transposed));
        let results: Vec<&DesignResult> =
            self.cells.iter().flat_map(|c| c.d.iter().chain(std::iter::once(&c.ds))).collect();
        ScenarioRun::new(Scenario::BinaryMixtures, o, m, &results)
    }
}

pub fn run_binary_tables(cfg: &ScenarioConfig) -> Result<BinaryTables> {
    // (pair, alpha2, interval, needs D)
    let mut jobs: Vec<((Family, Family), f64, TauInterval, bool)> = Vec::new();
    for &p in &cfg.table1_pairs {
        for &a in &cfg.alpha2_values {
            for &i in &cfg.tau_intervals {
                jobs.push((p, a, i, true));
            }
        }
    }
    for &p in &cfg.table2_pairs {
        let covered = jobs
            .iter()
            .any(|&(q, a, i, _)| q == p && a == cfg.table2_alpha2 && i == cfg.table2_interval);
        if !covered {
            jobs.push((p, cfg.table2_alpha2, cfg.table2_interval, false));
        }
    }
    let cells = jobs
        .par_iter()
        .map(|&(pair, alpha2, interval, with_d)| {
            let model = BinaryLogitModel::tau_matched(pair.0, pair.1, &interval.link()?, alpha2, BETA1, BETA2)?;
            let ds = cfg.optimize(&model, &ds_spec(&model)?)?;
            let d = if with_d {
                Some(cfg.optimize(&model, &CriterionSpec::d(model.dim())?)?)
            } else {
                None
            };
            Ok(BinaryCell {
                pair,
                alpha2,
                interval,
                model,
                d,
                ds,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table1 = Vec::new();
    for c in &cells {
        if let Some(l) = c.d_loss()? {
            table1.push((c.pair, c.alpha2, c.interval, l));
        }
    }
    let t2: Vec<&BinaryCell> = cfg
        .table2_pairs
        .iter()
        .map(|&p| {
            cells
                .iter()
                .find(|c| c.pair == p && c.alpha2 == cfg.table2_alpha2 && c.interval == cfg.table2_interval)
                .expect("cross cell scheduled")
        })
        .collect();
    let n = t2.len();
    let mut cross = vec![vec![0.0; n]; n];
    for r in 0..n {
        for c in 0..n {
            if r != c {
                let under = &t2[c].model;
                let e = cross_efficiency(under, &t2[r].ds.design, &t2[c].ds.design, &ds_spec(under)?)?;
                cross[r][c] = loss_percent(e);
            }
        }
    }
    Ok(BinaryTables {
        cells,
        table1,
        cross,
        pairs: cfg.table2_pairs.clone(),
    })
}

// ---------------------------------------------------------------------------------------------
// Weibull lifetimes: shock model against Khoudraji-Clayton models

/// Leading parameters `(nu1, nu2, alpha2, alpha3)` of the Khoudraji-Clayton layout.
pub const WEIBULL_DS_SUBSET: usize = 4;

#[derive(Debug, Clone)]
pub struct WeibullSetting {
    pub alphas: (f64, f64, f64),
    pub model: WeibullModel,
    pub d: DesignResult,
    pub ds: DesignResult,
    /// Ds-efficiency loss (percent) on `(nu1, nu2, alpha2, alpha3)` of the D-optimal design.
    pub d_vs_ds_loss: f64,
}

#[derive(Debug, Clone)]
pub struct WeibullReport {
    pub shock: WeibullModel,
    pub shock_d: DesignResult,
    pub settings: Vec<WeibullSetting>,
    /// `cross[a][t]`: D-loss of the design optimal under model `a` (0 = shock model, then the
    /// settings) when model `t` is true; 100 when the design cannot estimate model `t`.
    pub cross: Vec<Vec<f64>>,
}

impl WeibullReport {
    fn labels(&self) -> Vec<String> {
        std::iter::once("Weibull".to_string())
            .chain(self.settings.iter().map(|s| format!("KC({} {} {})", s.alphas.0, s.alphas.1, s.alphas.2)))
            .collect()
    }

    /// Min and max of `cross[a][t]` over the given index sets.
    fn envelope(&self, assumed: &[usize], truth: &[usize]) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &a in assumed {
            for &t in truth {
                lo = lo.min(self.cross[a][t]);
                hi = hi.max(self.cross[a][t]);
            }
        }
        (lo, hi)
    }

    /// Rows `Weibull`, `Our Models`; columns min/max with the shock model true, then with the
    /// copula models true.
    pub fn table4(&self) -> [[f64; 4]; 2] {
        let ours: Vec<usize> = (1..self.cross.len()).collect();
        let row = |a: &[usize]| {
            let (w0, w1) = self.envelope(a, &[0]);
            let (o0, o1) = self.envelope(a, &ours);
            [w0, w1, o0, o1]
        };
        [row(&[0]), row(&ours)]
    }

    fn into_run(self, cfg: &ScenarioConfig) -> ScenarioRun {
        let mut m = Manifest::new();
        cfg.record(&mut m);
        m.set("weibull.cutoffs", format!("{:?}", self.shock.cutoffs()));
        m.record_model("shock", &self.shock);
        m.record_result("shock.d", &self.shock_d);
        let mut o = OutputSet::default();
        o.add_design("shock_d", &self.shock_d);
        let mut losses = String::from("alpha1,alpha2,alpha3,d_vs_ds_loss\n");
        for (k, s) in self.settings.iter().enumerate() {
            let stem = format!("kc{}", k + 1);
            m.record_model(&stem, &s.model);
            m.record_result(&format!("{stem}.d"), &s.d);
            m.record_result(&format!("{stem}.ds4"), &s.ds);
            m.set(format!("{stem}.d_vs_ds_loss"), format!("{:.4}", s.d_vs_ds_loss));
            o.add_design(&format!("{stem}_d"), &s.d);
            o.add_design(&format!("{stem}_ds"), &s.ds);
            writeln!(losses, "{},{},{},{:.2}", s.alphas.0, s.alphas.1, s.alphas.2, s.d_vs_ds_loss).unwrap();
        }
        m.set("cross.entry", "row a, column t = D-loss of the design optimal under a when t is true");
        m.set("cross.singular", "a design whose information is singular under t scores efficiency 0 (loss 100)");
        let t4 = self.table4();
        let mut t4csv = String::from("assumed,weibull_true_min,weibull_true_max,ours_true_min,ours_true_max\n");
        for (name, row) in ["Weibull", "Our Models"].iter().zip(t4) {
            writeln!(t4csv, "{name},{:.2},{:.2},{:.2},{:.2}", row[0], row[1], row[2], row[3]).unwrap();
        }
        o.add("table4.csv", t4csv);
        let labels = self.labels();
        o.add("table4_full.csv", matrix_csv("assumed\\true", &labels, &labels, &self.cross));
        o.add("ds_losses.csv", losses);
        let mut results = vec![&self.shock_d];
        for s in &self.settings {
            results.push(&s.d);
            results.push(&s.ds);
        }
        ScenarioRun::new(Scenario::Weibull, o, m, &results)
    }
}

pub fn run_weibull(cfg: &ScenarioConfig) -> Result<WeibullReport> {
    let shock = WeibullModel::localized(WeibullDependence::MarshallOlkin)?;
    let shock_d = cfg.optimize(&shock, &CriterionSpec::d(shock.dim())?)?;
    let settings = cfg
        .weibull_alphas
        .par_iter()
        .map(|&(alpha1, alpha2, alpha3)| {
            let model = WeibullModel::localized(WeibullDependence::KhoudrajiClayton { alpha1, alpha2, alpha3 })?;
            let d = cfg.optimize(&model, &CriterionSpec::d(model.dim())?)?;
            let ds_spec = CriterionSpec::ds(WEIBULL_DS_SUBSET, model.dim())?;
            let ds = cfg.optimize(&model, &ds_spec)?;
            let d_vs_ds_loss = loss_percent(cross_efficiency(&model, &d.design, &ds.design, &ds_spec)?);
            Ok(WeibullSetting {
                alphas: (alpha1, alpha2, alpha3),
                model,
                d,
                ds,
                d_vs_ds_loss,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let models: Vec<&WeibullModel> = std::iter::once(&shock).chain(settings.iter().map(|s| &s.model)).collect();
    let designs: Vec<&Design> =
        std::iter::once(&shock_d.design).chain(settings.iter().map(|s| &s.d.design)).collect();
    let n = models.len();
    let mut cross = vec![vec![0.0; n]; n];
    for a in 0..n {
        for t in 0..n {
            if a != t {
                let spec = CriterionSpec::d(models[t].dim())?;
                cross[a][t] = loss_percent(cross_efficiency(models[t], designs[a], designs[t], &spec)?);
            }
        }
    }
    Ok(WeibullReport {
        shock,
        shock_d,
        settings,
        cross,
    })
}
