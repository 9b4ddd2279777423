mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dofwave::analysis::{constants, smoothness};
use dofwave::kernel::{cauchy_solve_with, kernel_grid, weak_velocity_centroid, CauchyData, KernelGrid, Model};
use dofwave::thermo::{check_restriction, classify, moduli};
use serde::Serialize;
use serde_json::json;

use config::{linspace, RunConfig};

#[derive(Parser)]
#[command(name = "dofwave", version, about = "Distributed-order fractional wave propagation in viscoelastic media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// output file (defaults to output.path in the config, else stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// compute even if the thermodynamic restriction fails
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the thermodynamic restriction and classify the model
    Validate(Common),
    /// Material constants, wave speeds and smoothness descriptors
    Analyze {
        #[command(flatten)]
        common: Common,
        /// times at which to report the centroid of t·K(λt, t)
        #[arg(long, value_delimiter = ',')]
        probe_times: Vec<f64>,
    },
    /// Storage and loss moduli on a log-spaced frequency grid
    Moduli {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-3)]
        omega_min: f64,
        #[arg(long, default_value_t = 1e3)]
        omega_max: f64,
        #[arg(long, default_value_t = 13)]
        points: usize,
    },
    /// Fundamental solution K on the configured grid
    Kernel(Common),
    /// Cauchy problem with sampled initial data
    Solve {
        #[command(flatten)]
        common: Common,
        /// CSV with columns x,u0 on the grid's x values
        #[arg(long)]
        u0: Option<PathBuf>,
        /// CSV with columns x,v0 on the grid's x values
        #[arg(long)]
        v0: Option<PathBuf>,
        /// unit point mass of initial displacement at this position
        #[arg(long)]
        delta_at: Option<f64>,
    },
}

enum Failure {
    Usage(String),
    Inadmissible(String),
}

impl From<dofwave::Error> for Failure {
    fn from(e: dofwave::Error) -> Self {
        match e {
            dofwave::Error::NotAdmissible => Failure::Inadmissible(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(c) => validate(&c),
        Command::Analyze { common, probe_times } => analyze(&common, &probe_times),
        Command::Moduli { common, omega_min, omega_max, points } => moduli_table(&common, omega_min, omega_max, points),
        Command::Kernel(c) => kernel(&c),
        Command::Solve { common, u0, v0, delta_at } => solve(&common, u0.as_deref(), v0.as_deref(), delta_at),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Inadmissible(msg)) => {
            eprintln!("error: {msg} (use --force to compute anyway)");
            ExitCode::from(1)
        }
    }
}

fn load(c: &Common) -> Result<RunConfig, Failure> {
    RunConfig::load(&c.config).map_err(Failure::Usage)
}

fn sink(c: &Common, cfg: &RunConfig) -> Result<Box<dyn Write>, Failure> {
    let path = c.out.clone().or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(&p).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn build_model(c: &Common, cfg: &RunConfig) -> Result<Model, Failure> {
    let pair = cfg.pair();
    if c.force || cfg.force {
        Ok(Model::new_forced(pair)?)
    } else {
        Ok(Model::new(pair)?)
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn validate(c: &Common) -> Outcome {
    let cfg = load(c)?;
    let pair = cfg.pair();
    let restriction = check_restriction(&pair);
    let class = classify(&pair);
    let report = json!({
        "restriction": restriction,
        "class": class.tag,
        "exceptional": class.exceptional,
        "exceptional_params": class.exceptional_params,
    });
    write_json(&mut *sink(c, &cfg)?, &report)?;
    Ok(if restriction.satisfied { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn analyze(c: &Common, probe_times: &[f64]) -> Outcome {
    let cfg = load(c)?;
    let model = build_model(c, &cfg)?;
    let consts = constants(&model.pair)?;
    let mut report = json!({
        "constants": consts,
        "smoothness": smoothness(&model.pair),
        "class": model.class.tag,
        "exceptional": model.class.exceptional,
    });
    if !probe_times.is_empty() {
        let mut probes = Vec::new();
        for &t in probe_times {
            probes.push(json!({ "t": t, "centroid": weak_velocity_centroid(&model, t)? }));
        }
        report["probes"] = json!(probes);
    }
    if model.forced {
        report["forced"] = json!(true);
    }
    write_json(&mut *sink(c, &cfg)?, &report)?;
    Ok(ExitCode::SUCCESS)
}

fn csv_writer(c: &Common, cfg: &RunConfig, forced: bool) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    let mut out = sink(c, cfg)?;
    if forced {
        writeln!(out, "# forced: true")?;
    }
    Ok(csv::Writer::from_writer(out))
}

fn moduli_table(c: &Common, omega_min: f64, omega_max: f64, points: usize) -> Outcome {
    if !(omega_min > 0.0 && omega_max > omega_min && omega_max.is_finite()) || points < 2 {
        return Err(Failure::Usage("need 0 < omega-min < omega-max and at least 2 points".into()));
    }
    let cfg = load(c)?;
    let model = build_model(c, &cfg)?;
    let mut w = csv_writer(c, &cfg, model.forced)?;
    w.write_record(["omega", "storage", "loss"])?;
    for lw in linspace(omega_min.log10(), omega_max.log10(), points) {
        let m = moduli(&model.pair, 10f64.powf(lw));
        w.write_record([num(m.omega), num(m.storage), num(m.loss)])?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn kernel(c: &Common) -> Outcome {
    let cfg = load(c)?;
    let grid = cfg.grid().map_err(Failure::Usage)?;
    let model = build_model(c, &cfg)?;
    let g = kernel_grid(&model, &grid.xs(), &grid.ts(), &cfg.kernel_options())?;
    let mut w = csv_writer(c, &cfg, model.forced)?;
    write_grid(&mut w, &g, false)?;
    Ok(ExitCode::SUCCESS)
}

/// Shortest decimal that parses back to the same f64, in exponent form when
/// plain notation would be long.
fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn write_grid(w: &mut csv::Writer<Box<dyn Write>>, g: &KernelGrid, with_u: bool) -> Result<(), Failure> {
    let mut header = vec!["x", "t", "K", "err"];
    if with_u {
        header.push("u");
    }
    w.write_record(&header)?;
    for (i, x) in g.xs.iter().enumerate() {
        for (j, t) in g.ts.iter().enumerate() {
            let k = g.index(i, j);
            let mut row =
                vec![num(*x), num(*t), num(g.values[k]), num(g.est_error[k])];
            if let Some(u) = g.u.as_ref().filter(|_| with_u) {
                row.push(num(u[k]));
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Samples from a two-column CSV (x, value) that must sit on the grid's x values.
fn read_samples(path: &Path, xs: &[f64]) -> Result<Vec<f64>, Failure> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let mut vals = Vec::with_capacity(xs.len());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64, Failure> {
            rec.get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Failure::Usage(format!("{}: row {} needs two numbers", path.display(), i + 1)))
        };
        let (x, v) = (parse(0)?, parse(1)?);
        let want = xs.get(i).copied().unwrap_or(f64::NAN);
        if !((x - want).abs() <= 1e-9 * (1.0 + want.abs())) {
            return Err(Failure::Usage(format!("{}: row {} is at x = {x}, grid has {want}", path.display(), i + 1)));
        }
        vals.push(v);
    }
    if vals.len() != xs.len() {
        return Err(Failure::Usage(format!("{}: {} rows for {} grid points", path.display(), vals.len(), xs.len())));
    }
    Ok(vals)
}

fn solve(c: &Common, u0: Option<&Path>, v0: Option<&Path>, delta_at: Option<f64>) -> Outcome {
    let cfg = load(c)?;
    let grid = cfg.grid().map_err(Failure::Usage)?;
    if u0.is_none() && v0.is_none() && delta_at.is_none() {
        return Err(Failure::Usage("solve needs --u0, --v0 or --delta-at".into()));
    }
    let xs = grid.xs();
    let data = CauchyData {
        u0: u0.map(|p| read_samples(p, &xs)).transpose()?.unwrap_or_default(),
        v0: v0.map(|p| read_samples(p, &xs)).transpose()?.unwrap_or_default(),
        delta_at,
    };
    let model = build_model(c, &cfg)?;
    let g = cauchy_solve_with(&model, &data, &xs, &grid.ts(), &cfg.kernel_options())?;
    if g.truncated {
        eprintln!("warning: the support cone leaves the x-grid; the convolution is truncated at its edges");
    }
    let mut w = csv_writer(c, &cfg, model.forced)?;
    write_grid(&mut w, &g, true)?;
    Ok(ExitCode::SUCCESS)
}
