use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dlie_cli::problem::{parse_problem, TaskSpec};
use dlie_cli::tasks::{plan_one, run, RunOptions, TASK_NAMES};
use dlie_cli::workspace::{self, Workspace};
use dlie_cli::{run_file, CliError, Report};

/// Exact verification of D-Lie algebra constructions.
#[derive(Parser, Debug)]
#[command(name = "dlie", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Rewriting step budget per normal form.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_steps: usize,
    /// Drop normal-form words longer than this.
    #[arg(long, global = true)]
    truncate_degree: Option<usize>,
    /// Run independent tasks concurrently.
    #[arg(long, global = true)]
    parallel: bool,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every task of a problem file.
    Run {
        #[arg(long)]
        file: PathBuf,
    },
    /// Reduce a tensor expression to normal form.
    Nf {
        #[arg(long, default_value = "utensor")]
        kind: String,
        #[arg(long)]
        expr: String,
        /// D-Lie algebra id (from --file, or a library name).
        #[arg(long, default_value = "der_xy_zero")]
        dlie: String,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Checks on the extension End(L~,E) of a connection.
    EndExt {
        #[arg(long)]
        connection: String,
        #[arg(long, default_value = "all")]
        check: String,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Atiyah sequence, splitting and round-trip checks.
    Jet {
        #[arg(long)]
        connection: String,
        #[arg(long, default_value = "all")]
        check: String,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Chern cochains and the relation r^(k-1) c_k = c_1^k.
    Chern {
        #[arg(long)]
        connection: String,
        #[arg(long)]
        cocycle: Option<String>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// List task names and the bundled library objects.
    List,
}

fn load(file: &Option<PathBuf>) -> Result<Workspace, CliError> {
    match file {
        None => Ok(Workspace::library()),
        Some(path) => {
            let src = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            let parsed = parse_problem(&src).map_err(CliError::Input)?;
            workspace::build(&parsed)
        }
    }
}

fn single(file: &Option<PathBuf>, name: &str, target: &str, options: &[(&str, String)], opts: &RunOptions) -> Result<Report, CliError> {
    let ws = load(file)?;
    let spec = TaskSpec {
        name: name.into(),
        target: Some(target.into()),
        options: options.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>(),
        offset: 0,
    };
    let planned = plan_one(&ws, &spec, opts)?;
    let label = file.as_ref().map_or("library".to_string(), |p| p.display().to_string());
    Ok(run(&label, &[planned], opts))
}

fn list() {
    let ws = Workspace::library();
    println!("tasks: {}", TASK_NAMES.join(", "));
    println!("dlie: {}", ws.dlie.keys().cloned().collect::<Vec<_>>().join(", "));
    println!("connections: {}", ws.connections.keys().cloned().collect::<Vec<_>>().join(", "));
    println!("cochains: {}", ws.cochains.keys().cloned().collect::<Vec<_>>().join(", "));
    println!("projective bases: {}", ws.bases.keys().cloned().collect::<Vec<_>>().join(", "));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let opts = RunOptions { seed: g.seed, max_steps: g.max_steps, truncate_degree: g.truncate_degree, parallel: g.parallel, timings: g.timings };
    let result = match &cli.command {
        Command::Run { file } => run_file(file, &opts),
        Command::Nf { kind, expr, dlie, file } => single(file, "nf", dlie, &[("kind", kind.clone()), ("expr", expr.clone())], &opts),
        Command::EndExt { connection, check, degree, file } => {
            single(file, "end-ext", connection, &[("check", check.clone()), ("degree", degree.to_string())], &opts)
        }
        Command::Jet { connection, check, file } => single(file, "jet", connection, &[("check", check.clone())], &opts),
        Command::Chern { connection, cocycle, k, file } => {
            let mut o = vec![("k", k.to_string())];
            if let Some(c) = cocycle {
                o.push(("cocycle", c.clone()));
            }
            single(file, "chern", connection, &o, &opts)
        }
        Command::List => {
            list();
            return ExitCode::SUCCESS;
        }
    };
    match result {
        Ok(report) => {
            let text = if g.json { report.to_json() + "\n" } else { report.to_text() };
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
