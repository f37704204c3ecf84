//! Command-line front end: `copula-oed optimize|efficiency|scenario`.
//!
//! Exit codes: 0 on success with a passing certificate, 2 when an optimization did not
//! converge or failed its certificate (outputs are still written), 1 on any error.

mod config;

pub use config::{
    parse_config, render, Command, CopulaBlock, CriterionBlock, CriterionKind, DesignBlock, ModelBlock, ModelKind,
    OutputBlock, RunConfig, ScenarioBlock, Tolerances,
};

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::design::{
    efficiency, loss_percent, optimize_design, uniform_grid, DesignResult,
};
use crate::error::{Error, Result};
use crate::experiments::{run_scenario, Manifest, OutputSet, Scenario, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

const DEFAULT_GRID: usize = 201;

#[derive(Debug, Parser)]
#[command(name = "copula-oed", version, about = "Optimal designs for copula regression models")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Compute an optimal design for the configured model and criterion.
    Optimize(Flags),
    /// Efficiency of a given design against a reference (or the optimum).
    Efficiency(Flags),
    /// Run one of the scripted studies: fedorov, binary_tables, weibull.
    Scenario(Flags),
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario name.
    #[arg(long)]
    name: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Candidate grid size.
    #[arg(long)]
    grid: Option<usize>,
}

/// Outcome of a command: files written and whether every optimization converged and certified.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub ok: bool,
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(o) => {
            for f in &o.files {
                println!("{}", f.display());
            }
            if o.ok {
                EXIT_OK
            } else {
                eprintln!("warning: optimization did not converge or failed its certificate; see manifest.txt");
                EXIT_NOT_CONVERGED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn load(path: &Option<PathBuf>, expected: Command) -> Result<Option<RunConfig>> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
    let cfg = parse_config(&text)?;
    if cfg.command != expected {
        return Err(Error::config(
            "command",
            format!("config is for `{:?}`, invoked as `{:?}`", cfg.command, expected).to_lowercase(),
        ));
    }
    Ok(Some(cfg))
}

fn out_dir(flags: &Flags, cfg: Option<&RunConfig>, default: &str) -> PathBuf {
    flags
        .out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.as_ref()).map(|o| PathBuf::from(&o.dir)))
        .unwrap_or_else(|| PathBuf::from(default))
}

fn grid_size(flags: &Flags, cfg: Option<&RunConfig>) -> Result<usize> {
    let n = flags.grid.or(cfg.and_then(|c| c.grid)).unwrap_or(DEFAULT_GRID);
    if n < 2 {
        return Err(Error::config("grid", "need at least 2 grid points"));
    }
    Ok(n)
}

fn run(cmd: Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Optimize(f) => {
            let cfg = load(&f.config, Command::Optimize)?
                .ok_or_else(|| Error::config("config", "optimize needs --config"))?;
            optimize(&cfg, &f)
        }
        Cmd::Efficiency(f) => {
            let cfg = load(&f.config, Command::Efficiency)?
                .ok_or_else(|| Error::config("config", "efficiency needs --config"))?;
            efficiency_cmd(&cfg, &f)
        }
        Cmd::Scenario(f) => {
            let cfg = load(&f.config, Command::Scenario)?;
            scenario(cfg.as_ref(), &f)
        }
    }
}

struct Prepared {
    model: Box<dyn crate::models::OutcomeModel>,
    spec: crate::design::CriterionSpec,
    grid: Vec<f64>,
    opt: crate::design::OptimizerConfig,
    manifest: Manifest,
}

fn prepare(cfg: &RunConfig, flags: &Flags) -> Result<Prepared> {
    let model = cfg.build_model()?;
    let spec = cfg.criterion_spec(model.dim())?;
    let n = grid_size(flags, Some(cfg))?;
    let opt = cfg.optimizer()?;
    let grid = uniform_grid(model.design_space(), n);
    let mut manifest = Manifest::new();
    manifest.set("command", format!("{:?}", cfg.command).to_lowercase());
    manifest.record_model("model", &*model);
    manifest.set("criterion", spec.label());
    manifest.set("grid_points", n);
    manifest.set("optimizer.delta", opt.delta);
    manifest.set("optimizer.w_floor", opt.w_floor);
    manifest.set("optimizer.max_iter", opt.max_iter);
    manifest.set("optimizer.polish_rounds", opt.polish_rounds);
    manifest.set("optimizer.refine_factor", opt.refine_factor);
    manifest.set("certificate.rel_tol", 2.0 * opt.delta);
    Ok(Prepared {
        model,
        spec,
        grid,
        opt,
        manifest,
    })
}

fn solve(p: &Prepared) -> Result<DesignResult> {
    optimize_design(&*p.model, p.model.params().values(), &p.spec, &p.grid, &p.opt)
}

fn optimize(cfg: &RunConfig, flags: &Flags) -> Result<Outcome> {
    let mut p = prepare(cfg, flags)?;
    let r = solve(&p)?;
    p.manifest.record_result("result", &r);
    let mut out = OutputSet::default();
    out.add("design.csv", crate::design::design_csv(&r.design));
    out.add("sensitivity.csv", crate::design::sensitivity_csv(&r));
    out.add("manifest.txt", p.manifest.render());
    let files = out.write_all(&out_dir(flags, Some(cfg), "out"))?;
    Ok(Outcome {
        files,
        ok: r.converged && r.certificate.passed,
    })
}

fn efficiency_cmd(cfg: &RunConfig, flags: &Flags) -> Result<Outcome> {
    let mut p = prepare(cfg, flags)?;
    let xi = cfg.candidate_design("design")?.expect("validated");
    let mut out = OutputSet::default();
    let mut ok = true;
    let reference = match cfg.candidate_design("reference")? {
        Some(r) => r,
        None => {
            let r = solve(&p)?;
            p.manifest.record_result("reference", &r);
            out.add("reference_design.csv", crate::design::design_csv(&r.design));
            ok = r.converged && r.certificate.passed;
            r.design
        }
    };
    let e = efficiency(&*p.model, &xi, &reference, p.model.params().values(), &p.spec)?;
    let mut csv = String::from("criterion,efficiency,loss_percent\n");
    writeln!(csv, "{},{e:.6},{:.4}", p.spec.label(), loss_percent(e)).unwrap();
    p.manifest.set("efficiency", e);
    out.add("efficiency.csv", csv);
    out.add("manifest.txt", p.manifest.render());
    let files = out.write_all(&out_dir(flags, Some(cfg), "out"))?;
    Ok(Outcome { files, ok })
}

fn scenario(cfg: Option<&RunConfig>, flags: &Flags) -> Result<Outcome> {
    let name = match (&flags.name, cfg.and_then(|c| c.scenario.as_ref())) {
        (Some(n), _) => n.clone(),
        (None, Some(s)) => s.name.clone(),
        (None, None) => return Err(Error::config("name", "scenario needs --name or a [scenario] block")),
    };
    let kind = Scenario::from_name(&name)?;
    let mut sc = ScenarioConfig::standard(kind);
    sc.grid_points = grid_size(flags, cfg)?;
    if let Some(c) = cfg {
        sc.optimizer = c.optimizer()?;
    }
    sc.output_dir = out_dir(flags, cfg, &format!("out/{name}"));
    let run = run_scenario(&sc)?;
    let files = run.write(&sc.output_dir)?;
    Ok(Outcome {
        files,
        ok: run.all_converged && run.all_certified,
    })
}
