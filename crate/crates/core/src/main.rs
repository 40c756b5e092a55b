use clap::{Parser, Subcommand};
use meadd::circuits::DdSequence;
use meadd::harness::{
    emit_plot_data, preset, run_with, DragSpec, Experiment, ExperimentConfig, GateSpec, Overrides,
    ResultTable, RobustnessCase, RobustnessSpec, RunOutput,
};
use meadd::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Runs characterization experiments and writes CSV tables.
#[derive(Parser)]
#[command(name = "meadd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Replace the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replace the shot count of every noise table.
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Use exact outcome probabilities instead of sampled shots.
    #[arg(long, global = true)]
    exact: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Exit with status 2 when a declared expectation fails.
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML experiment config.
    Run { config: PathBuf },
    /// Run a shipped preset (fig5, fig6, appendixF, robustness-table).
    Preset { name: String },
    /// Reshape a result table for plotting (fig5, fig6, drag).
    PlotData { table: PathBuf, kind: String },
    /// First-order robustness verdict for a gate under a decoupling sequence.
    Robustness { gate: String, dd: String },
    /// Plain and DRAG leakage over an ηT range `lo:hi[:points]`.
    Drag { range: String },
}

fn parse_range(text: &str) -> Result<(f64, f64, usize)> {
    let bad = || {
        Error::config(
            "etaT-range",
            format!("expected lo:hi[:points], got `{text}`"),
        )
    };
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [lo, hi] => Ok((num(lo)?, num(hi)?, 9)),
        [lo, hi, n] => Ok((num(lo)?, num(hi)?, n.trim().parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn adhoc(name: String, experiment: Experiment) -> Result<ExperimentConfig> {
    let config = ExperimentConfig {
        name,
        seed: 0,
        experiment,
        expect: Vec::new(),
    };
    config.validate()?;
    Ok(config)
}

fn config_for(command: &Command) -> Result<ExperimentConfig> {
    match command {
        Command::Run { config } => ExperimentConfig::load(config),
        Command::Preset { name } => preset(name),
        Command::Robustness { gate, dd } => {
            let dd_seq = DdSequence::parse(dd)
                .ok_or_else(|| Error::config("dd", format!("unknown sequence `{dd}`")))?;
            let spec = RobustnessSpec {
                cases: vec![RobustnessCase {
                    gate: GateSpec::Named(gate.clone()),
                    dd: dd_seq,
                    alternating_idle: false,
                    include_symmetric_xy: false,
                }],
            };
            adhoc(
                format!("robustness-{gate}-{dd}"),
                Experiment::Robustness(spec),
            )
        }
        Command::Drag { range } => {
            let (eta_min, eta_max, points) = parse_range(range)?;
            let spec = DragSpec {
                eta_min,
                eta_max,
                points,
                amplitude: std::f64::consts::PI,
                steps: meadd::pulses::DEFAULT_STEPS,
            };
            adhoc("drag".into(), Experiment::Drag(spec))
        }
        Command::PlotData { .. } => unreachable!("plot-data has no experiment config"),
    }
}

fn report(output: &RunOutput, written: &[PathBuf]) {
    print!("{}", output.summary().to_csv());
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    for check in output.checks.iter().filter(|c| !c.passed) {
        eprintln!(
            "expectation failed: {} = {} (expected {})",
            check.expectation.metric,
            check.value.map_or("missing".into(), |v| v.to_string()),
            check.expectation.describe()
        );
    }
}

fn plot(table: &Path, kind: &str, out: &Path) -> Result<PathBuf> {
    let data = emit_plot_data(&ResultTable::read(table)?, kind)?;
    let stem = table
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("table");
    let path = out.join(format!("{stem}_{kind}.csv"));
    data.write(&path)?;
    Ok(path)
}

fn execute(cli: &Cli) -> Result<bool> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::config("jobs", e.to_string()))?;
    }
    if let Command::PlotData { table, kind } = &cli.command {
        let path = plot(table, kind, &cli.out)?;
        eprintln!("wrote {}", path.display());
        return Ok(true);
    }
    let overrides = Overrides {
        seed: cli.seed,
        shots: cli.shots,
        exact: cli.exact,
    };
    let output = run_with(&config_for(&cli.command)?, &overrides)?;
    let written = output.write(&cli.out)?;
    report(&output, &written);
    Ok(output.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(passed) if passed || !cli.check => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
