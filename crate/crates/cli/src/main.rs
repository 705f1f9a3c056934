use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rendezvous_core::control::LawVariant;
use rendezvous_core::par::Execution;
use rendezvous_core::sim::export::write_atomic;
use rendezvous_core::sim::run::centralized_solution;
use rendezvous_core::sim::{
    load_scenario, run, sweep, Format, InitialPositions, ParameterGrid, RunOptions, Scenario,
};

#[derive(Parser)]
#[command(name = "rendezvous", version, about = "Minimum-time rendezvous simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario. Exits 0 iff rendezvous is reached.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Trajectory format written to --output-dir.
        #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
        format: FormatArg,
    },
    /// Run a parameter grid. Exits 0 iff every run reaches rendezvous.
    Sweep {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        laws: Option<Vec<LawArg>>,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        r_ctr: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        r_cmm: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Run grid points one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Print the centralized minimum-time solution.
    Oracle {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a scenario with uniformly random initial positions.
    Gen {
        #[arg(long, value_enum, default_value_t = LawArg::Meb)]
        law: LawArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r_cmm: f64,
        #[arg(long)]
        r_ctr: f64,
        /// Lower corner, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lo: Vec<f64>,
        /// Upper corner, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        hi: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Replace the generator seed of a uniform scenario.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Rendezvous tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    allow_disconnected: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Meb,
    Meo,
}

impl From<LawArg> for LawVariant {
    fn from(l: LawArg) -> Self {
        match l {
            LawArg::Meb => LawVariant::Meb,
            LawArg::Meo => LawVariant::Meo,
        }
    }
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            allow_disconnected: self.allow_disconnected,
            max_rounds: self.max_rounds,
            rendezvous_tol: self.tol,
        }
    }

    fn scenario(&self, path: &Path) -> Result<Scenario> {
        let s = load_scenario(path).with_context(|| format!("loading {}", path.display()))?;
        Ok(match self.seed {
            Some(seed) => s.with_seed(seed),
            None => s,
        })
    }

    fn output_dir(&self) -> Result<Option<&Path>> {
        if let Some(dir) = &self.output_dir {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(self.output_dir.as_deref())
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        Ok(())
    })
    .with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn real_main() -> Result<bool> {
    match Cli::parse().command {
        Command::Run {
            scenario,
            common,
            format,
        } => {
            let s = common.scenario(&scenario)?;
            let out = run(&s, &common.options())?;
            if let Some(dir) = common.output_dir()? {
                write_json(&dir.join("summary.json"), &out.summary)?;
                let (name, fmt) = match format {
                    FormatArg::Csv => ("trajectory.csv", Format::Csv),
                    FormatArg::Jsonl => ("trajectory.jsonl", Format::Jsonl),
                };
                out.trajectory.export(dir.join(name), fmt)?;
                if s.network.d == 2 {
                    out.trajectory.emit_plot_data(dir.join("plot.csv"))?;
                }
            }
            println!("{}", serde_json::to_string_pretty(&out.summary)?);
            Ok(out.summary.achieved)
        }
        Command::Sweep {
            scenario,
            common,
            laws,
            n,
            r_ctr,
            r_cmm,
            seeds,
            sequential,
        } => {
            let s = common.scenario(&scenario)?;
            let grid = ParameterGrid {
                laws: laws.map(|v| v.into_iter().map(Into::into).collect()),
                n,
                r_ctr,
                r_cmm,
                seeds,
            };
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let results = sweep(&s, &grid, &common.options(), exec)?;
            let mut all_achieved = true;
            let mut rows = Vec::with_capacity(results.len());
            for r in results {
                let row = match r.summary {
                    Ok(summary) => {
                        all_achieved &= summary.achieved;
                        serde_json::json!({ "point": r.point, "summary": summary })
                    }
                    Err(e) => {
                        all_achieved = false;
                        serde_json::json!({ "point": r.point, "error": e.to_string() })
                    }
                };
                println!("{}", serde_json::to_string(&row)?);
                rows.push(row);
            }
            if let Some(dir) = common.output_dir()? {
                write_json(&dir.join("sweep.json"), &rows)?;
            }
            Ok(all_achieved)
        }
        Command::Oracle { scenario, seed } => {
            let mut s = load_scenario(&scenario).with_context(|| format!("loading {}", scenario.display()))?;
            if let Some(seed) = seed {
                s = s.with_seed(seed);
            }
            let sol = centralized_solution(&s.network, &s.positions())?;
            println!("{}", serde_json::to_string_pretty(&sol)?);
            Ok(true)
        }
        Command::Gen {
            law,
            n,
            r_cmm,
            r_ctr,
            lo,
            hi,
            seed,
            output,
        } => {
            if lo.len() != hi.len() {
                bail!("--lo has {} coordinates but --hi has {}", lo.len(), hi.len());
            }
            let d = lo.len();
            let s = Scenario::new(law.into(), n, d, r_cmm, r_ctr, InitialPositions::Uniform { lo, hi, seed })?;
            let text = s.to_toml()?;
            match output {
                Some(path) => write_atomic(&path, |w| {
                    use std::io::Write;
                    w.write_all(text.as_bytes())?;
                    Ok(())
                })
                .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(true)
        }
    }
}
