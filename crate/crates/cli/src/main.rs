use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shape_servo::config::apply_override;
use shape_servo::output::{render_report, saturation_demo, write_trajectory};
use shape_servo::{parse_config_onto, run_scenario, Preset, RunOutput, SaturationLimits, ScenarioConfig};

#[derive(Parser)]
#[command(name = "shape-servo", version, about = "Saturated sliding-mode shape servoing simulator")]
struct Cli {
    /// Random seed; overrides `sim.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Start from a named preset instead of the defaults.
    #[arg(long, global = true)]
    preset: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hard and smooth saturation of v(t) = A sin(w t), as CSV.
    DemoSaturation {
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10.0)]
        amplitude: f64,
        /// rad/s.
        #[arg(long, default_value_t = 2.0)]
        frequency: f64,
        #[arg(long, default_value_t = 2.0 * PI)]
        duration: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        u_max: f64,
        #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
        u_min: f64,
    },
    /// Runs one closed-loop scenario and writes trajectory.csv and report.txt.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Runs one scenario per value of a config key, in parallel.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Config key to vary, e.g. `gains.eps1`.
        #[arg(long)]
        param: String,
        /// Comma-separated values; list-valued keys are not sweepable.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<String>,
        #[arg(long, default_value = "sweep")]
        out_dir: PathBuf,
    },
}

type CliResult<T> = Result<T, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::DemoSaturation {
            out,
            amplitude,
            frequency,
            duration,
            dt,
            u_max,
            u_min,
        } => {
            let limits = SaturationLimits::uniform(u_min, u_max).map_err(|e| e.to_string())?;
            let mut buf = Vec::new();
            let curve =
                saturation_demo(&limits, amplitude, frequency, duration, dt, &mut buf).map_err(|e| e.to_string())?;
            write_output(out.as_deref(), &buf)?;
            let fold = |f: fn(&shape_servo::output::SaturationSample) -> f64| {
                curve.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    (lo.min(x), hi.max(x))
                })
            };
            let (hard_min, hard_max) = fold(|s| s.hard);
            let (gauss_min, gauss_max) = fold(|s| s.gauss);
            eprintln!("hard_sat range [{hard_min}, {hard_max}], gauss_sat range [{gauss_min:.4}, {gauss_max:.4}]");
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config, out_dir } => {
            let cfg = resolve_config(cli.preset.as_deref(), config.as_deref(), cli.seed)?;
            let out = run_scenario(&cfg).map_err(|e| e.to_string())?;
            write_run(&out_dir, &out)?;
            print!("{}", render_report(&out.report));
            Ok(exit_for(&out))
        }
        Command::Sweep {
            config,
            param,
            values,
            out_dir,
        } => {
            if values.is_empty() {
                return Err("--values needs at least one value".into());
            }
            let base = resolve_config(cli.preset.as_deref(), config.as_deref(), cli.seed)?;
            let configs = values
                .iter()
                .map(|value| {
                    let mut cfg = base.clone();
                    apply_override(&mut cfg, &param, value).map_err(|e| format!("{param} = {value}: {e}"))?;
                    Ok(cfg)
                })
                .collect::<CliResult<Vec<ScenarioConfig>>>()?;
            let results: Vec<CliResult<RunOutput>> = std::thread::scope(|scope| {
                let handles: Vec<_> = configs
                    .iter()
                    .map(|cfg| scope.spawn(move || run_scenario(cfg).map_err(|e| e.to_string())))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().unwrap_or_else(|_| Err("scenario thread panicked".into())))
                    .collect()
            });
            let mut code = ExitCode::SUCCESS;
            println!("{param},final_e1_norm,convergence_time,violation_fraction,aborted");
            for (value, result) in values.iter().zip(results) {
                let out = result?;
                write_run(&out_dir.join(format!("{param}={value}")), &out)?;
                let r = &out.report;
                println!(
                    "{value},{:e},{},{},{}",
                    r.final_e1_norm,
                    r.convergence_time.map_or_else(|| "none".into(), |t| t.to_string()),
                    r.decrease.map_or_else(|| "none".into(), |d| d.violation_fraction.to_string()),
                    r.aborted.is_some()
                );
                if r.aborted.is_some() {
                    code = exit_for(&out);
                }
            }
            Ok(code)
        }
    }
}

fn resolve_config(preset: Option<&str>, path: Option<&Path>, seed: Option<u64>) -> CliResult<ScenarioConfig> {
    let base = match preset {
        Some(name) => name.parse::<Preset>().map_err(|e| e.to_string())?.config(),
        None => ScenarioConfig::default(),
    };
    let mut cfg = match path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config_onto(base, &text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => base,
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_run(dir: &Path, out: &RunOutput) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let csv_path = dir.join("trajectory.csv");
    let file = fs::File::create(&csv_path).map_err(|e| format!("{}: {e}", csv_path.display()))?;
    write_trajectory(&out.records, io::BufWriter::new(file)).map_err(|e| e.to_string())?;
    let report_path = dir.join("report.txt");
    fs::write(&report_path, render_report(&out.report)).map_err(|e| format!("{}: {e}", report_path.display()))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(path) => fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => io::stdout().write_all(bytes).map_err(|e| e.to_string()),
    }
}

/// Exit code 2 marks a run cut short by a plant failure; its partial log is
/// still written.
fn exit_for(out: &RunOutput) -> ExitCode {
    match &out.report.aborted {
        Some(reason) => {
            eprintln!("run aborted: {reason}");
            ExitCode::from(2)
        }
        None => ExitCode::SUCCESS,
    }
}
