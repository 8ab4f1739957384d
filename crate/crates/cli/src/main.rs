mod bench;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kvcut_core::engine::{solve, EngineOptions, SolveStatus};
use kvcut_core::graph::{read_dimacs_file, Graph};
use kvcut_core::instance::{make_weighted, write_weights, Instance, WeightSpec};
use kvcut_core::lab::bound_report;
use kvcut_core::master::{ConnectivityCut, FamilyMode, MasterOptions};
use kvcut_core::oracle::{brute_force, OracleOutcome, Regime};
use kvcut_core::pricing::PricingOptions;

use report::{OracleJson, SolveJson};

const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_TIME_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "kvcut", version, about = "Exact solver for the minimum-cost k-vertex cut problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print a JSON report.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Write the report here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve many instances for several k and write a CSV table.
    Bench {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Comma-separated list of k values.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Root LP bounds of the three formulations as JSON.
    LpBounds {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        weights: WeightArgs,
        /// Known optimum, used to report integrality gaps.
        #[arg(long)]
        optimum: Option<f64>,
    },
    /// Brute-force reference solution as JSON.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        weights: WeightArgs,
        /// `full` or `cost:<limit>`.
        #[arg(long, default_value = "full")]
        regime: String,
    },
    /// Write random vertex costs in weight-file format.
    GenWeights {
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct WeightArgs {
    /// `unit`, `file:<path>`, `random` or `random:<seed>`.
    #[arg(long, default_value = "unit")]
    weights: String,
    /// Seed for `--weights random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        matches!(self, Switch::On)
    }
}

#[derive(Args)]
struct EngineArgs {
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Start from the iterative disconnection heuristic.
    #[arg(long, value_enum, default_value = "on")]
    heuristic: Switch,
    #[arg(long, value_enum, default_value = "on")]
    symmetry: Switch,
    /// At the root, branch on a vertex of the largest orbit.
    #[arg(long)]
    symmetry_orbit_branching: bool,
    /// `cover`, `partition` or `edges`.
    #[arg(long, default_value = "cover")]
    clique_family: String,
    /// Use equalities for the cardinality and cover rows.
    #[arg(long)]
    equality_rows: bool,
    /// `auto`, `on` or `off`.
    #[arg(long, default_value = "auto")]
    connectivity_cut: String,
    /// Separate clique rows after root column generation.
    #[arg(long, value_enum, default_value = "off")]
    separate_root: Switch,
    /// Stop the second pricing stage at the first violated column.
    #[arg(long)]
    pricing_early_exit: bool,
    /// Most columns added per pricing round.
    #[arg(long, default_value_t = 10)]
    pricing_max_cols: usize,
}

impl EngineArgs {
    fn options(&self) -> Result<EngineOptions> {
        if self.pricing_max_cols == 0 {
            bail!("--pricing-max-cols must be at least 1");
        }
        let time_limit = match self.time_limit {
            Some(t) if !(t > 0.0 && t.is_finite()) => bail!("--time-limit must be a positive number of seconds"),
            Some(t) => Some(Duration::from_secs_f64(t)),
            None => None,
        };
        Ok(EngineOptions {
            master: MasterOptions {
                family: self.clique_family.parse::<FamilyMode>()?,
                equality_rows: self.equality_rows,
                connectivity_cut: self.connectivity_cut.parse::<ConnectivityCut>()?,
            },
            pricing: PricingOptions {
                max_columns: self.pricing_max_cols,
                early_exit: self.pricing_early_exit,
            },
            heuristic: self.heuristic.on(),
            symmetry: self.symmetry.on(),
            orbit_branching: self.symmetry_orbit_branching,
            separate_root: self.separate_root.on(),
            time_limit,
            ..EngineOptions::default()
        })
    }
}

impl WeightArgs {
    fn spec(&self) -> Result<WeightSpec> {
        if self.weights == "random" {
            return Ok(WeightSpec::Random(self.seed));
        }
        Ok(self.weights.parse()?)
    }
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn read_graph(path: &Path) -> Result<Graph> {
    let (g, _) = read_dimacs_file(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(g)
}

fn load(path: &Path, k: usize, weights: &WeightSpec) -> Result<Instance> {
    let g = read_graph(path)?;
    let costs = weights.costs_for(&g)?;
    Ok(Instance::new(instance_name(path), g, costs, k)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("KVCUT_THREADS") {
        Ok(v) => {
            let t: usize = v.trim().parse().context("KVCUT_THREADS must be a positive integer")?;
            if t == 0 {
                bail!("KVCUT_THREADS must be a positive integer");
            }
            Ok(Some(t))
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            instance,
            k,
            weights,
            engine,
            output,
        } => {
            let opts = engine.options()?;
            let inst = load(&instance, k, &weights.spec()?)?;
            let report = solve(&inst, &opts)?;
            let json = serde_json::to_string_pretty(&SolveJson::from(&report))?;
            emit(output.as_deref(), &(json + "\n"))?;
            Ok(match report.status {
                SolveStatus::Optimal | SolveStatus::Trivial => 0,
                SolveStatus::Infeasible => EXIT_INFEASIBLE,
                SolveStatus::TimeLimit => EXIT_TIME_LIMIT,
            })
        }
        Command::Bench {
            instances,
            k,
            weights,
            engine,
            output,
        } => {
            let opts = engine.options()?;
            let spec = weights.spec()?;
            let threads = threads_from_env()?;
            let mut jobs = Vec::new();
            for path in &instances {
                let graph = read_graph(path).map_err(|e| format!("{e:#}"));
                for &kk in &k {
                    let instance = graph.clone().and_then(|g| {
                        let costs = spec.costs_for(&g).map_err(|e| e.to_string())?;
                        Instance::new(instance_name(path), g, costs, kk).map_err(|e| e.to_string())
                    });
                    jobs.push(bench::Job {
                        name: instance_name(path),
                        k: kk,
                        instance,
                    });
                }
            }
            let results = bench::run(jobs, &opts, threads)?;
            let mut buf = Vec::new();
            bench::write_csv(&mut buf, &results, &k)?;
            emit(output.as_deref(), &String::from_utf8(buf)?)?;
            Ok(0)
        }
        Command::LpBounds {
            instance,
            k,
            weights,
            optimum,
        } => {
            let inst = load(&instance, k, &weights.spec()?)?;
            let report = bound_report(&inst, optimum)?;
            emit(None, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(0)
        }
        Command::Oracle {
            instance,
            k,
            weights,
            regime,
        } => {
            let regime: Regime = regime.parse()?;
            let inst = load(&instance, k, &weights.spec()?)?;
            let out = brute_force(&inst, regime)?;
            let json = OracleJson::new(&inst.name, inst.n(), k, regime, &out);
            emit(None, &(serde_json::to_string_pretty(&json)? + "\n"))?;
            Ok(match out {
                OracleOutcome::Optimal(_) => 0,
                OracleOutcome::Infeasible { .. } => EXIT_INFEASIBLE,
                OracleOutcome::BudgetExceeded { .. } => EXIT_TIME_LIMIT,
            })
        }
        Command::GenWeights { instance, seed, output } => {
            let g = read_graph(&instance)?;
            emit(output.as_deref(), &write_weights(&make_weighted(&g, seed)))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
