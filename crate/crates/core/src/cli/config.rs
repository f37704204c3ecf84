//! Run configuration: a TOML document validated into models, criteria and optimizer settings.
//!
//! ```toml
//! command = "optimize"          # optimize | efficiency | scenario
//! grid = 201
//!
//! [model]
//! kind = "fedorov"              # fedorov | binary | weibull
//!
//! [copula]
//! family = "clayton"
//! alpha1 = 18.0
//!
//! [criterion]
//! kind = "Ds"                   # D | Ds | DA
//! s = 6
//!
//! [output]
//! dir = "out/fedorov_ds"
//! ```
//!
//! Binary models take either a fixed copula or a tau-matched mixture
//! (`mixture = ["joe", "frank"]`, `weight`, `tau_max`, optional `epsilon`). Weibull models take
//! `family = "marshall-olkin"` or `family = "clayton"` with `alpha1`, `alpha2`, `alpha3`.
//! `efficiency` needs a `[design]` block (`points`, `weights`) and optionally a `[reference]`
//! block; without one the optimal design is computed first.

use serde::{Deserialize, Serialize};

use crate::copulas::{CopulaSpec, Family, TauLink};
use crate::design::{CriterionSpec, Design, OptimizerConfig};
use crate::error::{Error, Result};
use crate::experiments::Scenario;
use crate::models::weibull::{CUTOFFS, LOCALIZED};
use crate::models::{BinaryLogitModel, FedorovModel, OutcomeModel, WeibullDependence, WeibullModel};
use crate::numerics::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Optimize,
    Efficiency,
    Scenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fedorov,
    Binary,
    Weibull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriterionKind {
    D,
    Ds,
    DA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kind: ModelKind,
    /// Fedorov regression coefficients (the information does not depend on them).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    /// Binary margin coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    /// Weibull `(theta0, theta2, theta3, nu1, nu2, beta2, kappa)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopulaBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionBlock {
    pub kind: CriterionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    /// Rows of the `dim x s` contrast matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polish_rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_factor: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBlock {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copula: Option<CopulaBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<CriterionBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<DesignBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| syntax_error(text, &e))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Serializes a configuration; `parse_config(&render(c))` gives `c` back.
pub fn render(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::config("config", e.to_string()))
}

fn syntax_error(text: &str, e: &toml::de::Error) -> Error {
    let msg = e.message().to_string();
    match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            let field = text[span.clone()].trim().split(['=', ' ']).next().unwrap_or("").to_string();
            let field = if field.is_empty() { "document".to_string() } else { field };
            Error::config(field, format!("{msg} at line {line}, column {col}"))
        }
        None => Error::config("document", msg),
    }
}

/// Re-labels an error from a constructor as a config error on `field`.
fn at(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config { .. } => e,
        other => Error::config(field, other.to_string()),
    }
}

fn require<'a, T>(v: &'a Option<T>, field: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::config(field, "missing"))
}

fn fixed<const N: usize>(v: &[f64], field: &str) -> Result<[f64; N]> {
    v.try_into()
        .map_err(|_| Error::config(field, format!("expected {N} values, got {}", v.len())))
}

fn parse_family(s: &str, field: &str) -> Result<Family> {
    s.parse::<Family>().map_err(at(field))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.grid {
            if g < 2 {
                return Err(Error::config("grid", "need at least 2 grid points"));
            }
        }
        self.optimizer()?;
        match self.command {
            Command::Optimize => {
                let model = self.build_model()?;
                self.criterion_spec(model.dim())?;
            }
            Command::Efficiency => {
                let model = self.build_model()?;
                self.criterion_spec(model.dim())?;
                let d = self.candidate_design("design")?.expect("required");
                check_in_space(&d, &*model, "design.points")?;
                if let Some(r) = self.candidate_design("reference")? {
                    check_in_space(&r, &*model, "reference.points")?;
                }
            }
            Command::Scenario => {
                let name = &require(&self.scenario, "scenario")?.name;
                Scenario::from_name(name).map_err(|e| match e {
                    Error::Config { message, .. } => Error::config("scenario.name", message),
                    other => other,
                })?;
            }
        }
        Ok(())
    }

    pub fn optimizer(&self) -> Result<OptimizerConfig> {
        let mut o = OptimizerConfig::default();
        let Some(t) = &self.tolerances else { return Ok(o) };
        if let Some(d) = t.delta {
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::config("tolerances.delta", "must lie in (0, 1)"));
            }
            o.delta = d;
        }
        if let Some(w) = t.w_floor {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::config("tolerances.w_floor", "must lie in (0, 1)"));
            }
            o.w_floor = w;
        }
        if let Some(m) = t.max_iter {
            if m == 0 {
                return Err(Error::config("tolerances.max_iter", "must be positive"));
            }
            o.max_iter = m;
        }
        if let Some(p) = t.polish_rounds {
            o.polish_rounds = p;
        }
        if let Some(r) = t.refine_factor {
            if r == 0 {
                return Err(Error::config("tolerances.refine_factor", "must be positive"));
            }
            o.refine_factor = r;
        }
        Ok(o)
    }

    pub fn build_model(&self) -> Result<Box<dyn OutcomeModel>> {
        let m = require(&self.model, "model")?;
        let cop = self.copula.as_ref();
        match m.kind {
            ModelKind::Fedorov => {
                let beta = match &m.beta {
                    Some(b) => fixed::<6>(b, "model.beta")?,
                    None => [0.0; 6],
                };
                let c = fixed_copula(require(&cop.cloned(), "copula")?)?;
                Ok(Box::new(FedorovModel::new(c, beta)))
            }
            ModelKind::Binary => {
                let beta1 = fixed::<2>(require(&m.beta1, "model.beta1")?, "model.beta1")?;
                let beta2 = fixed::<2>(require(&m.beta2, "model.beta2")?, "model.beta2")?;
                let x_max = *require(&m.x_max, "model.x_max")?;
                if !(x_max > 0.0) {
                    return Err(Error::config("model.x_max", "must be positive"));
                }
                let cop = require(&self.copula, "copula")?;
                match &cop.mixture {
                    Some(fams) => {
                        if cop.family.is_some() || cop.alpha1.is_some() {
                            return Err(Error::config(
                                "copula.mixture",
                                "a tau-matched mixture takes no family or alpha1",
                            ));
                        }
                        let [f1, f2]: [&String; 2] = fams
                            .iter()
                            .collect::<Vec<_>>()
                            .try_into()
                            .map_err(|_| Error::config("copula.mixture", "expected two families"))?;
                        let c1 = parse_family(f1, "copula.mixture")?;
                        let c2 = parse_family(f2, "copula.mixture")?;
                        let weight = *require(&cop.weight, "copula.weight")?;
                        let tau_max = *require(&cop.tau_max, "copula.tau_max")?;
                        let eps = cop.epsilon.unwrap_or(TauLink::<f64>::DEFAULT_EPSILON);
                        let link = TauLink::calibrated(eps, tau_max, x_max).map_err(at("copula.tau_max"))?;
                        let model = BinaryLogitModel::tau_matched(c1, c2, &link, weight, beta1, beta2)
                            .map_err(at("copula.weight"))?;
                        Ok(Box::new(model))
                    }
                    None => {
                        let c = fixed_copula(cop)?;
                        Ok(Box::new(BinaryLogitModel::with_copula(c, beta1, beta2, x_max).map_err(at("model"))?))
                    }
                }
            }
            ModelKind::Weibull => {
                let base = match &m.base {
                    Some(b) => fixed::<7>(b, "model.base")?,
                    None => LOCALIZED,
                };
                let cutoffs = match &m.cutoffs {
                    Some(c) => {
                        let [a, b] = fixed::<2>(c, "model.cutoffs")?;
                        (a, b)
                    }
                    None => CUTOFFS,
                };
                let cop = require(&self.copula, "copula")?;
                let fam = require(&cop.family, "copula.family")?;
                let dep = if fam.eq_ignore_ascii_case("marshall-olkin") {
                    WeibullDependence::MarshallOlkin
                } else {
                    if parse_family(fam, "copula.family")? != Family::Clayton {
                        return Err(Error::config(
                            "copula.family",
                            "Weibull models take marshall-olkin or clayton",
                        ));
                    }
                    let alpha1 = *require(&cop.alpha1, "copula.alpha1")?;
                    CopulaSpec::base(Family::Clayton, alpha1).map_err(at("copula.alpha1"))?;
                    WeibullDependence::KhoudrajiClayton {
                        alpha1,
                        alpha2: *require(&cop.alpha2, "copula.alpha2")?,
                        alpha3: *require(&cop.alpha3, "copula.alpha3")?,
                    }
                };
                Ok(Box::new(WeibullModel::new(dep, base, cutoffs).map_err(at("copula"))?))
            }
        }
    }

    pub fn criterion_spec(&self, dim: usize) -> Result<CriterionSpec> {
        let c = require(&self.criterion, "criterion")?;
        match c.kind {
            CriterionKind::D => CriterionSpec::d(dim).map_err(at("criterion.kind")),
            CriterionKind::Ds => CriterionSpec::ds(*require(&c.s, "criterion.s")?, dim).map_err(at("criterion.s")),
            CriterionKind::DA => {
                let rows = require(&c.a, "criterion.a")?;
                if rows.len() != dim {
                    return Err(Error::config(
                        "criterion.a",
                        format!("need {dim} rows (one per parameter), got {}", rows.len()),
                    ));
                }
                CriterionSpec::da(Matrix::from_rows(rows).map_err(at("criterion.a"))?).map_err(at("criterion.a"))
            }
        }
    }

    /// The `[design]` or `[reference]` block as a design; `design` is required.
    pub fn candidate_design(&self, which: &str) -> Result<Option<Design>> {
        let block = if which == "design" { &self.design } else { &self.reference };
        match block {
            Some(b) => Ok(Some(
                Design::from_unnormalized(b.points.clone(), b.weights.clone()).map_err(at(which))?,
            )),
            None if which == "design" => Err(Error::config("design", "missing")),
            None => Ok(None),
        }
    }
}

fn fixed_copula(c: &CopulaBlock) -> Result<CopulaSpec<f64>> {
    if c.mixture.is_some() {
        return Err(Error::config("copula.mixture", "mixtures are only available for binary models"));
    }
    let fam = parse_family(require(&c.family, "copula.family")?, "copula.family")?;
    if fam == Family::Product {
        if c.alpha1.is_some() {
            return Err(Error::config("copula.alpha1", "the product copula has no parameter"));
        }
        return Ok(CopulaSpec::product());
    }
    let a1 = *require(&c.alpha1, "copula.alpha1")?;
    match (c.alpha2, c.alpha3) {
        (None, None) => CopulaSpec::base(fam, a1).map_err(at("copula.alpha1")),
        (Some(a2), Some(a3)) => CopulaSpec::khoudraji(fam, a1, a2, a3).map_err(at("copula.alpha2")),
        _ => Err(Error::config("copula.alpha3", "Khoudraji copulas need both alpha2 and alpha3")),
    }
}

fn check_in_space(d: &Design, model: &dyn OutcomeModel, field: &str) -> Result<()> {
    for &x in d.points() {
        model.check_point(x).map_err(at(field))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FEDOROV_DS: &str = r#"
command = "optimize"
grid = 101

[model]
kind = "fedorov"

[copula]
family = "clayton"
alpha1 = 18.0

[criterion]
kind = "Ds"
s = 6
"#;

    fn field_of(e: Error) -> String {
        match e {
            Error::Config { field, .. } => field,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn minimal_optimize_config() {
        let c = parse_config(FEDOROV_DS).unwrap();
        assert_eq!(c.command, Command::Optimize);
        let m = c.build_model().unwrap();
        assert_eq!(m.dim(), 7);
        assert_eq!(c.criterion_spec(7).unwrap().bound, 6.0);
    }

    #[test]
    fn subset_must_be_strict() {
        let e = parse_config(&FEDOROV_DS.replace("s = 6", "s = 7")).unwrap_err();
        assert!(e.to_string().contains("subset must be a strict subset"), "{e}");
        assert_eq!(field_of(e), "criterion.s");
    }

    #[test]
    fn negative_clayton_parameter_names_the_field() {
        let e = parse_config(&FEDOROV_DS.replace("alpha1 = 18.0", "alpha1 = -1.0")).unwrap_err();
        assert_eq!(field_of(e), "copula.alpha1");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse_config(&FEDOROV_DS.replace("s = 6", "s = 6\nsize = 3")).unwrap_err();
        assert!(e.to_string().contains("size"), "{e}");
        let e = parse_config(&format!("{FEDOROV_DS}\n[extra]\nx = 1\n")).unwrap_err();
        assert!(e.to_string().contains("extra"), "{e}");
    }

    #[test]
    fn syntax_errors_report_the_position() {
        let e = parse_config("command = \"optimize\"\ngrid = = 3\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn binary_mixture_and_weibull_blocks() {
        let bin = r#"
command = "optimize"
[model]
kind = "binary"
beta1 = [-1.0, 1.0]
beta2 = [-2.0, 0.5]
x_max = 10.0
[copula]
mixture = ["joe", "frank"]
weight = 0.5
tau_max = 0.9
[criterion]
kind = "Ds"
s = 1
"#;
        let c = parse_config(bin).unwrap();
        assert_eq!(c.build_model().unwrap().dim(), 6);
        let e = parse_config(&bin.replace("weight = 0.5", "weight = 1.5")).unwrap_err();
        assert_eq!(field_of(e), "copula.weight");

        let wei = r#"
command = "optimize"
[model]
kind = "weibull"
[copula]
family = "clayton"
alpha1 = 2.0
alpha2 = 0.4
alpha3 = 0.2
[criterion]
kind = "D"
"#;
        let c = parse_config(wei).unwrap();
        assert_eq!(c.build_model().unwrap().dim(), 10);
        let mo = wei.replace("family = \"clayton\"\nalpha1 = 2.0\nalpha2 = 0.4\nalpha3 = 0.2", "family = \"marshall-olkin\"");
        assert_eq!(parse_config(&mo).unwrap().build_model().unwrap().dim(), 7);
    }

    #[test]
    fn command_blocks_are_required() {
        let e = parse_config("command = \"optimize\"\n[criterion]\nkind = \"D\"\n").unwrap_err();
        assert_eq!(field_of(e), "model");
        let e = parse_config("command = \"scenario\"\n").unwrap_err();
        assert_eq!(field_of(e), "scenario");
        let e = parse_config("command = \"scenario\"\n[scenario]\nname = \"x\"\n").unwrap_err();
        assert_eq!(field_of(e), "scenario.name");
        let e = parse_config(&FEDOROV_DS.replace("optimize", "efficiency")).unwrap_err();
        assert_eq!(field_of(e), "design");
    }

    #[test]
    fn render_round_trips() {
        let c = parse_config(FEDOROV_DS).unwrap();
        assert_eq!(parse_config(&render(&c).unwrap()).unwrap(), c);
    }
}
