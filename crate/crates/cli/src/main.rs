use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use photomech_cli::verify::{self, Context, Fault, Level};
use photomech_cli::{plot, run, CliError};
use photomech_core::Vec3;

#[derive(Parser)]
#[command(name = "photomech", version, about = "Photo-electro-mechanical finite element solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario configuration and write its outputs.
    Run {
        config: PathBuf,
        /// Output directory; overrides the environment and the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the identity-verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the machine-readable report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Run only these checks (comma-separated names).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Extract columnar plot data from a run directory.
    Plot {
        trajectory: PathBuf,
        /// Comma-separated fields: energy, work, lambda, newton, y, order, displacement.
        #[arg(long, value_delimiter = ',', required = true)]
        fields: Vec<String>,
        /// Reference point for nodal fields, as x,y,z.
        #[arg(long, value_parser = parse_point, default_value = "0,0,0")]
        probe: Vec3,
        /// Output directory; defaults to `plots` inside the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, output } => run::run(&config, output.as_deref()).map(|s| {
            println!(
                "wrote {} frames to {} (t = {}, {:.2} s)",
                s.frames,
                s.directory.display(),
                s.final_time,
                s.wall_time_seconds
            );
        }),
        Command::Verify { level, seed, report, checks, inject_fault } => {
            run_verify(level, seed, report, &checks, inject_fault)
        }
        Command::Plot { trajectory, fields, probe, out } => {
            let dir = if trajectory.is_file() { trajectory.parent().map(PathBuf::from).unwrap_or_default() } else { trajectory.clone() };
            let out = out.unwrap_or_else(|| dir.join("plots"));
            plot::emit_plot_data(&trajectory, &fields, probe, &out).map(|paths| {
                for p in paths {
                    println!("{}", p.display());
                }
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run_verify(
    level: Level,
    seed: u64,
    report: Option<PathBuf>,
    only: &[String],
    fault: Option<Fault>,
) -> Result<(), CliError> {
    if let Some(bad) = only.iter().find(|n| !verify::CHECKS.iter().any(|c| c.name == n.as_str())) {
        return Err(CliError::UnknownCheck(bad.clone()));
    }
    let ctx = Context { fault, ..Context::new(level, seed) };
    let mut results = Vec::new();
    for check in verify::CHECKS.iter().filter(|c| only.is_empty() || only.iter().any(|n| n == c.name)) {
        let r = verify::run_check(check, &ctx);
        println!(
            "{} C{:02} {:<36} {:.3e} (tol {:.0e})  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.criterion,
            r.name,
            r.measured,
            r.tolerance,
            r.detail
        );
        results.push(r);
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let total = results.len();
    let rep = verify::Report { level, seed, passed: passed == total, checks: results };
    if let Some(path) = report {
        let text = serde_json::to_string_pretty(&rep).expect("report serializes");
        std::fs::write(&path, text + "\n").map_err(CliError::io(&path))?;
    }
    println!("{passed}/{total} checks passed");
    if rep.passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{} of {total} checks failed", total - passed)))
    }
}

fn parse_point(s: &str) -> Result<Vec3, String> {
    let v: Vec<f64> = s.split(',').map(|c| c.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    match v[..] {
        [x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err(format!("expected x,y,z but got {} values", v.len())),
    }
}
