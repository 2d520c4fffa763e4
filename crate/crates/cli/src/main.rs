//! `rofsim` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rofsim_core::budget::{render_table, run_budget, BudgetFile, SAMPLE_TOPOLOGY};
use rofsim_core::scenario::report::write_csv;
use rofsim_core::scenario::{
    emit_reports, load_config, run_scenario, write_device_sweeps, Formats, MetricsReport,
    RunOptions, ScenarioConfig, SweepSpec,
};
use rofsim_core::Error;

#[derive(Parser)]
#[command(name = "rofsim", version, about = "Analog radio-over-fiber overlay simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file, or `scenario_a` / `scenario_b` for a built-in scenario.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Replace the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "rofsim-out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Use the full bit count per sweep point instead of the desk-scale one.
    #[arg(long, global = true)]
    full: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl From<Format> for Formats {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => Formats::Json,
            Format::Csv => Formats::Csv,
            Format::Both => Formats::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario over its configured power sweep.
    Run {
        /// Simulate exactly this many blocks (quick look; ignores the bit target).
        #[arg(long)]
        blocks: Option<usize>,
    },
    /// Simulate a scenario over an overridden received-power axis.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Explicit power list (dBm), comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Vec<f64>,
        #[arg(long)]
        blocks: Option<usize>,
    },
    /// Latency, CoMP, power and fronthaul budgets of a topology file.
    Budget,
    /// Export device frequency responses of the scenario's first channel.
    Devices {
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
}

fn scenario(common: &Common) -> Result<ScenarioConfig, Error> {
    let name = common.config.as_deref().unwrap_or("scenario_a");
    let path = Path::new(name);
    if path.exists() {
        return load_config(path).map_err(input_error);
    }
    match name {
        "scenario_a" | "a" | "scenario_b" | "b" => ScenarioConfig::builtin(name),
        _ => Err(Error::Validation(format!(
            "config `{name}` is neither a file nor a built-in scenario (scenario_a, scenario_b)"
        ))),
    }
}

// a config that cannot be read is a problem with the input, not with the run
fn input_error(e: Error) -> Error {
    match e {
        Error::Io { path, source } => Error::Validation(format!("cannot read {path}: {source}")),
        e => e,
    }
}

fn print_summary(r: &MetricsReport) {
    println!(
        "{}: {} blocks, seed {}",
        r.scenario, r.manifest.blocks, r.manifest.seed
    );
    for c in &r.downlink {
        match c.points.last() {
            Some(p) => println!(
                "  {:<20} {:>8.2} dBm  BER {:.2e}  EVM {:.3}  {}",
                c.id,
                p.rx_power_dbm,
                p.metrics.ber,
                p.metrics.evm_rms,
                if p.metrics.passes_fec { "PASS" } else { "FAIL" }
            ),
            None => println!("  {:<20} (no sweep points)", c.id),
        }
    }
    for u in &r.uplink {
        let ratio = u
            .uplink_to_residual_db
            .map_or("n/a".to_string(), |x| format!("{x:.1} dB"));
        println!(
            "  ch{} uplink/residual {ratio}, intercept EVM {:.3}, CO BER {:.2e}",
            u.channel, u.intercept_rof.evm_rms, u.co_digital.ber
        );
    }
    for c in &r.carrier {
        println!("  ch{} RoF carrier cost {:.2} dB", c.channel, c.rof_cost_db);
    }
}

fn simulate(common: &Common, sweep: Option<Vec<f64>>, blocks: Option<usize>) -> Result<(), Error> {
    let cfg = scenario(common)?;
    let opts = RunOptions {
        full: common.full,
        seed: common.seed,
        sweep,
        blocks,
    };
    let report = run_scenario(&cfg, &opts)?;
    print_summary(&report);
    let files = emit_reports(&report, &common.out, common.format.into())?;
    println!("wrote {} files to {}", files.len(), common.out.display());
    Ok(())
}

fn sweep_points(start: Option<f64>, stop: Option<f64>, step: Option<f64>, points: Vec<f64>) -> Result<Vec<f64>, Error> {
    let spec = SweepSpec {
        rx_power_dbm: (!points.is_empty()).then_some(points),
        start_dbm: start,
        stop_dbm: stop,
        step_dbm: step,
    };
    spec.points()
}

fn budget(common: &Common) -> Result<(), Error> {
    let text = match &common.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Validation(format!("cannot read {p}: {e}")))?,
        None => SAMPLE_TOPOLOGY.to_string(),
    };
    let report = run_budget(&BudgetFile::parse(&text)?)?;
    print!("{}", render_table(&report));
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(&common.out).map_err(io(&common.out))?;
    let formats: Formats = common.format.into();
    if formats.json() {
        let p = common.out.join("budget.json");
        let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(&p, json + "\n").map_err(io(&p))?;
    }
    if formats.csv() {
        let rows: Vec<[String; 6]> = report
            .latency
            .iter()
            .map(|l| {
                [
                    l.path.join(">"),
                    l.service.clone(),
                    l.propagation_us.to_string(),
                    l.processing_us.to_string(),
                    l.total_us.to_string(),
                    l.pass.to_string(),
                ]
            })
            .collect();
        write_csv(
            &common.out.join("budget_latency.csv"),
            ["path", "service", "propagation_us", "processing_us", "total_us", "pass"],
            &rows,
        )?;
        let rows: Vec<[String; 4]> = report
            .fronthaul
            .iter()
            .map(|f| {
                [
                    f.name.clone(),
                    f.rf_bandwidth.to_string(),
                    f.rate.line_rate.to_string(),
                    f.rate.expansion_factor.to_string(),
                ]
            })
            .collect();
        write_csv(
            &common.out.join("budget_fronthaul.csv"),
            ["name", "rf_bandwidth_hz", "line_rate", "expansion_factor"],
            &rows,
        )?;
    }
    Ok(())
}

fn devices(common: &Common, points: usize) -> Result<(), Error> {
    let cfg = scenario(common)?;
    let files = write_device_sweeps(&cfg, &common.out, points)?;
    println!("wrote {} device sweeps to {}", files.len(), common.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let result = match cli.command {
        Command::Run { blocks } => simulate(c, None, blocks),
        Command::Sweep {
            start,
            stop,
            step,
            points,
            blocks,
        } => sweep_points(start, stop, step, points).and_then(|p| simulate(c, Some(p), blocks)),
        Command::Budget => budget(c),
        Command::Devices { points } => devices(c, points),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
