use clap::{Args, Parser, Subcommand, ValueEnum};
use isonystrom_harness::config::{Mode, RunConfig};
use isonystrom_harness::manufactured::boundary_samples;
use isonystrom_harness::study::meshwidth;
use isonystrom_harness::{HarnessError, Result, Study};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "isonystrom", version, about = "Isogeometric Nyström convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once on the base partition and report the error at every evaluation point.
    Solve(Common),
    /// Run an h- or p-refinement study and write the convergence table.
    Convergence(Common),
    /// Describe the geometry and the manufactured setup of a run.
    Info(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    H,
    P,
}

#[derive(Args)]
struct Common {
    /// Run configuration (key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV file (stdout when absent and the config names none).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Uniform refinement steps of an h-study.
    #[arg(long)]
    steps: Option<usize>,
    /// Quadrature points per direction.
    #[arg(long)]
    order: Option<usize>,
    /// Admissibility factor.
    #[arg(long)]
    eta: Option<f64>,
    /// Reserved; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    verbose: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(m) = self.mode {
            cfg.mode = match m {
                ModeArg::H => Mode::H,
                ModeArg::P => Mode::P,
            };
        }
        if let Some(s) = self.steps {
            cfg.steps = s;
        }
        if let Some(n) = self.order {
            cfg.order = n;
        }
        if let Some(e) = self.eta {
            cfg.eta = e;
        }
        if let Some(seed) = self.seed {
            log::debug!("seed {seed} ignored: runs are deterministic");
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn output(&self, cfg: &RunConfig) -> Result<Box<dyn Write>> {
        let path = self.out.clone().or_else(|| cfg.output.as_ref().map(|p| cfg.resolve(p)));
        Ok(match path {
            Some(p) => {
                let f = File::create(&p).map_err(|source| HarnessError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                Box::new(BufWriter::new(f))
            }
            None => Box::new(std::io::stdout().lock()),
        })
    }
}

fn io_err(source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: "output".into(),
        source,
    }
}

fn solve(args: &Common) -> Result<()> {
    let cfg = args.config()?;
    let study = Study::new(cfg.clone())?;
    let parts = study.partitions(cfg.base_refinements, cfg.order)?;
    let r = study.run(&parts, cfg.order)?;
    eprintln!(
        "dof {}  h {:.4e}  max relative error {:.4e}  ({:.2}s)",
        r.dof, r.h, r.max_rel_err, r.seconds
    );
    let mut w = csv::Writer::from_writer(args.output(&cfg)?);
    w.write_record(["point", "x", "y", "z", "component", "computed", "exact"])?;
    for (i, (x, (v, e))) in study
        .eval_points
        .iter()
        .zip(r.values.iter().zip(&study.exact))
        .enumerate()
    {
        for (c, (a, b)) in v.iter().zip(e).enumerate() {
            let f = |v: f64| format!("{v:.12e}");
            w.write_record([i.to_string(), f(x[0]), f(x[1]), f(x[2]), c.to_string(), f(*a), f(*b)])?;
        }
    }
    w.flush().map_err(io_err)
}

fn convergence(args: &Common) -> Result<()> {
    let cfg = args.config()?;
    let record = Study::new(cfg.clone())?.convergence();
    record.write_csv(args.output(&cfg)?)?;
    for r in &record.rows {
        if let Some(e) = &r.error {
            eprintln!("step {} failed: {e}", r.step);
        }
    }
    if let Some(s) = record.slope {
        eprintln!("fitted slope {s:.3}");
        if let Some(d) = record.dof_slope() {
            eprintln!("rate against dof {d:.3}");
        }
    }
    if let Some(f) = record.exp_fit {
        eprintln!("fitted C {:.4e}  s {:.4}  residual {:.3} of range", f.c, f.s, f.relative);
    }
    if record.rows.iter().all(|r| r.error.is_some()) {
        return Err(HarnessError::Config("every step failed".into()));
    }
    Ok(())
}

fn info(args: &Common) -> Result<()> {
    let cfg = args.config()?;
    let study = Study::new(cfg.clone())?;
    let mut out = std::io::stdout().lock();
    let mut line = |s: String| writeln!(out, "{s}").map_err(io_err);
    line(format!("problem {:?}, formulation {:?}", cfg.problem, cfg.formulation))?;
    for (i, p) in study.patches.iter().enumerate() {
        let degrees: Vec<usize> = p.knot_vectors().iter().map(|k| k.degree()).collect();
        let spans: Vec<usize> = p.knot_vectors().iter().map(|k| k.nonzero_spans().len()).collect();
        line(format!(
            "patch {i}: dim {} pdim {} degrees {degrees:?} spans {spans:?} control points {} bc {:?}",
            p.dim(),
            p.param_dim(),
            p.control_points().len(),
            p.boundary_condition()
        ))?;
    }
    let samples = boundary_samples(&study.patches)?;
    line(format!("boundary measure {:.12}", samples.total_weight()))?;
    for (p, u) in study.grading_targets() {
        line(format!("grading target: patch {p} at u = {u}"))?;
    }
    let parts = study.partitions(cfg.base_refinements, cfg.order)?;
    let elements: usize = parts.iter().map(|p| p.global_elements().len()).sum();
    line(format!(
        "base partition: {elements} elements, h = {:.4e}",
        meshwidth(&study.patches, &parts)?
    ))?;
    for s in &study.manufactured.sources {
        line(format!("source {s:?}"))?;
    }
    for (x, e) in study.eval_points.iter().zip(&study.exact) {
        line(format!("evaluation point {x:?}: exact {e:?}"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Solve(c) | Command::Convergence(c) | Command::Info(c)) = &cli.command;
    let level = if c.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Convergence(a) => convergence(a),
        Command::Info(a) => info(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
