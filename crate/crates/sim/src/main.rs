use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use so3flock::flock::{Exec, Integrator, Verdict};
use so3flock_sim::config::{resolve, Overrides, Preset};
use so3flock_sim::reduce::reduce_circle;
use so3flock_sim::verify::{verify, Level};
use so3flock_sim::{output, run, SimError};

/// Environment variable holding the worker count; `0` or unset runs serially.
const THREADS_VAR: &str = "SO3FLOCK_THREADS";

#[derive(Parser)]
#[command(name = "so3flock", version, about = "Cucker-Smale flocking on SO(3)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write frames.csv, energy.dat and summary.json.
    Run(ConfigArgs),
    /// Run the geometric and dynamical conformance suites.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
    },
    /// Compare a circle-ansatz run against the Cucker-Smale model on the circle.
    ReduceCircle {
        #[command(flatten)]
        config: ConfigArgs,
        /// Allowed off-subgroup matrix entry.
        #[arg(long, default_value_t = 1e-9)]
        subgroup_tol: f64,
        /// Allowed angle and speed mismatch.
        #[arg(long, default_value_t = 1e-8)]
        match_tol: f64,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON configuration file; missing fields keep preset or default values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// `rk4_ambient` or `lie`.
    #[arg(long, value_parser = parse_integrator)]
    integrator: Option<Integrator>,
    #[arg(long)]
    t_end: Option<f64>,
}

fn parse_integrator(s: &str) -> Result<Integrator, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown integrator `{s}`"))
}

impl ConfigArgs {
    fn resolve(&self, fallback: Option<Preset>) -> so3flock_sim::Result<so3flock_sim::SimConfig> {
        let overrides = Overrides {
            seed: self.seed,
            out_dir: self.out_dir.clone(),
            integrator: self.integrator,
            t_end: self.t_end,
        };
        resolve(self.preset.or(fallback), self.config.as_deref(), &overrides)
    }
}

fn executor() -> so3flock_sim::Result<Exec> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| SimError::Config(format!("{THREADS_VAR}={v} is not a worker count")))?,
        Err(_) => 0,
    };
    Exec::with_threads(threads).map_err(|e| SimError::Config(e.to_string()))
}

fn execute(cli: Cli) -> so3flock_sim::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve(None)?;
            let exec = executor()?;
            let out = run(&cfg, &exec)?;
            let files = output::write_all(&cfg, &out)?;
            let last = &out.frames.last().expect("at least one frame").diagnostics;
            let verdict = match out.verdict.verdict {
                Verdict::Decay => "decay".to_string(),
                Verdict::Flocking { e_inf } => format!("flocking (E_inf = {e_inf:.6e})"),
                Verdict::Undecided => "undecided".to_string(),
            };
            println!(
                "t = {}  energy = {:.6e}  max misalignment = {:.3e}  verdict: {verdict}",
                last.t, last.energy, last.max_misalignment
            );
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Verify { level } => {
            let reports = verify(level);
            for r in &reports {
                print!("{r}");
            }
            let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(SimError::Verify(failed.join(", ")))
            }
        }
        Command::ReduceCircle { config, subgroup_tol, match_tol } => {
            let cfg = config.resolve(Some(Preset::Circle))?;
            let report = reduce_circle(&cfg, &executor()?)?;
            println!("{report}");
            if report.passed(subgroup_tol, match_tol) {
                Ok(())
            } else {
                Err(SimError::Verify(format!("circle reduction exceeded tolerances: {report}")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
