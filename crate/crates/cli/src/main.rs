use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use centralspin::experiments::{
    fit_curve, run_config, run_preset, write_outputs, FitForm, MethodKind, QfiCurve, RunConfig, RunOutcome,
    SCHEMA_VERSION, TOOL_VERSION,
};
use centralspin::Error;
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "centralspin", about = "Dynamic quantum sensing with a central spin")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in figure preset.
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Run a JSON sweep configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit a scaling law to one method of a curve file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// power_law or quad
        #[arg(long)]
        form: String,
        #[arg(long)]
        method: Option<String>,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn report(outcomes: &[RunOutcome], out: &Path) -> i32 {
    let mut code = 0;
    for o in outcomes {
        println!(
            "{}: {} rows, {} failed -> {}",
            o.config.name,
            o.curve.rows.len(),
            o.failures.len(),
            out.join(format!("{}.csv", o.config.name)).display()
        );
        for e in &o.failures {
            eprintln!("{}: {e}", o.config.name);
        }
        if code == 0 {
            code = o.exit_code();
        }
    }
    code
}

fn execute(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Preset { name, out, threads } => {
            if threads == 0 {
                return Err(Error::config("threads", "must be at least 1"));
            }
            let outcomes = run_preset(&name, &out, threads)?;
            Ok(report(&outcomes, &out))
        }
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => {
            let mut cfg = RunConfig::from_json(&read(&config)?)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(k) = threads {
                cfg.threads = k;
            }
            let out = out
                .or_else(|| cfg.output_dir.clone())
                .ok_or_else(|| Error::config("output_dir", "give --out or output_dir"))?;
            let outcome = run_config(&cfg)?;
            write_outputs(&out, None, std::slice::from_ref(&outcome))?;
            Ok(report(std::slice::from_ref(&outcome), &out))
        }
        Command::Fit { input, form, method } => {
            let form: FitForm = form.parse()?;
            let method: Option<MethodKind> = method
                .map(|m| m.parse().map_err(|e: Error| Error::config("method", e.to_string())))
                .transpose()?;
            let curve = QfiCurve::from_csv(&read(&input)?)?;
            let fit = fit_curve(&curve, method, form)?;
            println!("{}", serde_json::to_string_pretty(&fit).map_err(|e| Error::Internal(e.to_string()))?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let version: &'static str = Box::leak(format!("{TOOL_VERSION} (schema {SCHEMA_VERSION})").into_boxed_str());
    let matches = Cli::command().version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
