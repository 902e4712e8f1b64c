//! Command-line orchestration: load a configuration, run the requested
//! command and write its CSV artifacts plus a manifest.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{config_hash, parse_unvalidated, ConfigError, RunConfig, Smallness};
use crate::diagnostics::{default_weights, diagnose_selected, probe_backgrounds, Selection};
use crate::error::Error;
use crate::output::{self, Header, Manifest, NumberFormat};
use crate::quasi1d::{compare, inlet_average, scaling_study, solve_q1d, DuctGeometry, Quasi1DSolution};
use crate::scheme::{run_report, SchemeConfig, SolutionField};

/// Environment variable that overrides the output directory of the config.
pub const OUT_ENV: &str = "STEADY_GLIMM_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_ACCEPTANCE: i32 = 4;

#[derive(Debug, Clone, Parser)]
#[command(name = "steady-glimm", version = output::VERSION, about = "Random-choice solver for steady supersonic reacting flow past a wall")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; beats the environment and the config file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `scheme.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `scheme.h`.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// March the 2D scheme and write columns, contact path and diagnostics.
    Run {
        /// Write every n-th column to columns.csv.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Finite-difference coefficients at the backgrounds against closed forms.
    Probe,
    /// Duct model on the area taken from a 2D run.
    Quasi1d,
    /// Cross-section averages of a 2D run against the duct model.
    Compare,
    /// Quadratic scaling study over `[scaling].deltas`.
    Scaling,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Run { .. } => "run",
            Command::Probe => "probe",
            Command::Quasi1d => "quasi1d",
            Command::Compare => "compare",
            Command::Scaling => "scaling",
        }
    }
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(ConfigError),
    Solver(Error),
    Io(String),
    Acceptance(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Solver(_) | Failure::Io(_) => EXIT_SOLVER,
            Failure::Acceptance(_) => EXIT_ACCEPTANCE,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Validation(ConfigError::Parse { .. }) => "parse",
            Failure::Validation(_) => "validation",
            Failure::Solver(_) => "solver",
            Failure::Io(_) => "io",
            Failure::Acceptance(_) => "acceptance",
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(e) => write!(f, "{e}"),
            Failure::Solver(e) => write!(f, "{e}"),
            Failure::Io(m) | Failure::Acceptance(m) => f.write_str(m),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Validation(e)
    }
}

#[derive(Debug, Serialize)]
struct ErrorReport<'a> {
    command: &'a str,
    kind: &'a str,
    exit_code: i32,
    message: String,
    violations: Vec<String>,
}

/// What a command produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

struct Ctx {
    cfg: RunConfig,
    hash: String,
    dir: PathBuf,
    fmt: NumberFormat,
    files: Vec<PathBuf>,
    notes: Vec<String>,
}

impl Ctx {
    fn header(&self, extra: &[String]) -> Header {
        let s = &self.cfg.scheme;
        Header {
            config_hash: self.hash.clone(),
            theta: s.theta.describe(s.seed),
            notes: self.notes.iter().chain(extra).cloned().collect(),
        }
    }

    fn emit(&mut self, name: &str, body: impl FnOnce(&mut dyn std::io::Write) -> std::io::Result<()>) -> Result<(), Failure> {
        let p = output::emit(&self.dir, name, body)?;
        self.files.push(p);
        Ok(())
    }
}

/// Resolves the output directory: `--out`, then the environment, then the config.
pub fn output_dir(flag: Option<&Path>, env: Option<&str>, cfg: &RunConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| env.filter(|e| !e.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(&cfg.output.dir))
}

fn load(cli: &Cli) -> Result<(RunConfig, String), Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Validation(ConfigError::Validation(vec![crate::config::Violation {
            label: "config".into(),
            message: "--config is required".into(),
        }])))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_unvalidated(&text)?;
    if let Some(seed) = cli.seed {
        cfg.scheme.seed = seed;
    }
    if let Some(h) = cli.h {
        cfg.scheme.h = h;
    }
    let smallness = if matches!(cli.command, Command::Scaling) { Smallness::Skip } else { Smallness::Enforce };
    cfg.check(smallness)?;
    Ok((cfg, config_hash(&text)))
}

/// Runs the command and returns the process exit code. Artifacts and a
/// manifest go to the output directory; failures also write `error.toml`.
pub fn execute(cli: &Cli, env_out: Option<&str>) -> i32 {
    let (cfg, hash) = match load(cli) {
        Ok(v) => v,
        Err(f) => {
            eprintln!("error: {f}");
            // Without a parsed config only an explicit directory is known.
            let dir = cli.out.clone().or_else(|| env_out.filter(|e| !e.is_empty()).map(PathBuf::from));
            if let Some(dir) = dir {
                write_error(&dir, cli.command, &f);
            }
            return f.exit_code();
        }
    };
    let dir = output_dir(cli.out.as_deref(), env_out, &cfg);
    let mut notes = Vec::new();
    if cli.seed.is_some() || cli.h.is_some() {
        notes.push(format!("overrides: seed = {}, h = {}", cfg.scheme.seed, cfg.scheme.h));
    }
    let mut ctx = Ctx { fmt: NumberFormat { precision: cfg.output.precision }, cfg, hash, dir, files: Vec::new(), notes };
    let result = dispatch(cli.command, &mut ctx);
    let code = result.as_ref().map_or_else(Failure::exit_code, |_| EXIT_OK);
    if let Err(f) = &result {
        eprintln!("error: {f}");
        if let Some(p) = write_error(&ctx.dir, cli.command, f) {
            ctx.files.push(p);
        }
    }
    let manifest = Manifest {
        version: output::VERSION.to_string(),
        command: cli.command.name().to_string(),
        config_sha256: ctx.hash.clone(),
        seed: ctx.cfg.scheme.seed,
        theta: ctx.cfg.scheme.theta.describe(ctx.cfg.scheme.seed),
        h: ctx.cfg.scheme.h,
        files: ctx.files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect(),
        notes: ctx.notes.clone(),
        status: if code == EXIT_OK { "ok".into() } else { format!("exit {code}") },
    };
    if let Err(e) = output::write_manifest(&ctx.dir, &manifest) {
        eprintln!("error: writing manifest: {e}");
        return if code == EXIT_OK { EXIT_SOLVER } else { code };
    }
    if !cli.quiet {
        for n in &ctx.notes {
            println!("{n}");
        }
        println!("{} -> {} ({} files, exit {code})", cli.command.name(), ctx.dir.display(), manifest.files.len() + 1);
    }
    code
}

fn write_error(dir: &Path, cmd: Command, f: &Failure) -> Option<PathBuf> {
    let violations = match f {
        Failure::Validation(ConfigError::Validation(v)) => v.iter().map(|v| v.to_string()).collect(),
        _ => Vec::new(),
    };
    let rep = ErrorReport { command: cmd.name(), kind: f.kind(), exit_code: f.exit_code(), message: f.to_string(), violations };
    let text = toml::to_string(&rep).ok()?;
    output::emit(dir, "error.toml", |w| w.write_all(text.as_bytes())).ok()
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> Result<(), Failure> {
    match cmd {
        Command::Run { stride } => cmd_run(ctx, stride),
        Command::Probe => cmd_probe(ctx),
        Command::Quasi1d => cmd_quasi1d(ctx).map(|_| ()),
        Command::Compare => cmd_compare(ctx),
        Command::Scaling => cmd_scaling(ctx),
    }
}

fn truncation_note(cfg: &SchemeConfig) -> String {
    format!("truncation: L0 and reaction tail stop at x_max = {}", cfg.x_max)
}

/// Marches the scheme; the partial field is written even when the run fails.
fn march(ctx: &mut Ctx, stride: usize) -> Result<SolutionField, Failure> {
    let scfg = ctx.cfg.scheme_config()?;
    let report = run_report(&scfg)?;
    let (f, head) = (ctx.fmt, ctx.header(&[]));
    let field = report.field;
    ctx.emit("columns.csv", |w| output::write_columns(w, &field, &head, f, stride))?;
    ctx.emit("contact.csv", |w| output::write_contact(w, &field, &head, f))?;
    ctx.notes.push(format!("columns: {}", field.columns.len()));
    match report.error {
        Some(e) => Err(Failure::Solver(e)),
        None => Ok(field),
    }
}

fn cmd_run(ctx: &mut Ctx, stride: usize) -> Result<(), Failure> {
    let field = march(ctx, stride)?;
    let d = ctx.cfg.diagnostics;
    let sel = Selection { functional: d.functional, slab: d.slab, entropy: d.entropy };
    if !(sel.functional || sel.slab || sel.entropy) {
        return Ok(());
    }
    let (weights, _) = default_weights(&field, &d.weights)?;
    let rows = diagnose_selected(&field, &weights, sel)?;
    let scfg = ctx.cfg.scheme_config()?;
    let head = ctx.header(&[
        truncation_note(&scfg),
        format!("weights: K = {:e}, kz = {:e}, c1 = {:e}, c2 = {:e}", weights.k, weights.kz, weights.c1, weights.c2),
        format!("reaction rate bound l = {:e}", field.rate_min),
    ]);
    let f = ctx.fmt;
    ctx.emit("diagnostics.csv", |w| output::write_diagnostics(w, &rows, &weights, &head, f))
}

fn cmd_probe(ctx: &mut Ctx) -> Result<(), Failure> {
    let gas = ctx.cfg.gas_model()?;
    let probes = probe_backgrounds(&gas, &ctx.cfg.backgrounds())?;
    let (f, head) = (ctx.fmt, ctx.header(&[]));
    ctx.emit("probe.csv", |w| output::write_probe(w, &probes, &head, f))
}

fn duct(ctx: &Ctx, field: &SolutionField) -> Result<(DuctGeometry, Quasi1DSolution), Failure> {
    let geom = DuctGeometry::from_field(field);
    let q = &ctx.cfg.quasi1d;
    let sol = solve_q1d(&geom, inlet_average(field), &field.gas, q.tol, q.max_iter)?;
    Ok((geom, sol))
}

fn cmd_quasi1d(ctx: &mut Ctx) -> Result<(SolutionField, Quasi1DSolution), Failure> {
    let field = march(ctx, 1)?;
    let (geom, sol) = duct(ctx, &field)?;
    let worst = sol.max_ratio_after(2).map_or_else(|| "none".to_string(), |r| format!("{r:e}"));
    let head = ctx.header(&[
        format!("iterations: {}, final update {:e}", sol.iterations, sol.final_update),
        format!("max update ratio after iteration 2: {worst}"),
        format!("rate bounds: C_lower = {:e}, C_upper = {:e}", sol.c_lower, sol.c_upper),
    ]);
    let f = ctx.fmt;
    ctx.emit("quasi1d.csv", |w| output::write_quasi1d(w, &geom, &sol, &head, f))?;
    Ok((field, sol))
}

fn cmd_compare(ctx: &mut Ctx) -> Result<(), Failure> {
    let (field, sol) = cmd_quasi1d(ctx)?;
    let cmp = compare(&field, &sol)?;
    let head = ctx.header(&[format!("sup_abs_diff: {:e}", cmp.sup)]);
    let f = ctx.fmt;
    ctx.emit("compare.csv", |w| output::write_compare(w, &cmp, &head, f))
}

fn cmd_scaling(ctx: &mut Ctx) -> Result<(), Failure> {
    let sc = ctx.cfg.scaling.clone().ok_or_else(|| {
        Failure::Validation(ConfigError::Validation(vec![crate::config::Violation {
            label: "config".into(),
            message: "the scaling command needs a [scaling] section".into(),
        }]))
    })?;
    let base = ctx.cfg.scheme_config()?;
    let h = if sc.h.is_empty() { vec![base.h] } else { sc.h.clone() };
    let study = scaling_study(&base, &sc.deltas, &h, &sc.seeds)?;
    let exp = study.exponent;
    let verdict = match exp {
        Some(e) if e >= sc.window[0] && e <= sc.window[1] => "inside",
        _ => "outside",
    };
    let line = format!(
        "exponent: {} (window [{}, {}], {verdict})",
        exp.map_or_else(|| "none".into(), |e| format!("{e:e}")),
        sc.window[0],
        sc.window[1]
    );
    ctx.notes.push(line.clone());
    let (f, head) = (ctx.fmt, ctx.header(&[]));
    ctx.emit("scaling.csv", |w| output::write_scaling(w, &study, &head, f))?;
    if verdict == "inside" {
        Ok(())
    } else {
        Err(Failure::Acceptance(line))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_dir_precedence() {
        let cfg: RunConfig = parse_unvalidated(
            "[upstream]\ny0 = -0.5\npieces = [{ y_hi = 0.0, u = 2.4, p = 1.0, rho = 0.8 }, { y_hi = -0.5, u = 2.0, p = 1.0, rho = 1.0 }]\n[scheme]\nh = 0.01\nx_max = 0.1\n[output]\ndir = \"cfg\"\n",
        )
        .unwrap();
        assert_eq!(output_dir(Some(Path::new("flag")), Some("env"), &cfg), PathBuf::from("flag"));
        assert_eq!(output_dir(None, Some("env"), &cfg), PathBuf::from("env"));
        assert_eq!(output_dir(None, Some(""), &cfg), PathBuf::from("cfg"));
        assert_eq!(output_dir(None, None, &cfg), PathBuf::from("cfg"));
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from(["steady-glimm", "run", "--config", "a.toml", "--seed", "7", "--h", "0.002", "--quiet"]).unwrap();
        assert_eq!(cli.command, Command::Run { stride: 1 });
        assert_eq!(cli.seed, Some(7));
        assert_eq!(cli.h, Some(0.002));
        assert!(cli.quiet);
    }
}
