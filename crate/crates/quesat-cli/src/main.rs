//! Command-line front end: validate scenario files, run experiments, and
//! sweep a parameter across values, writing plot-ready CSVs and a JSON
//! summary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use quesat::netmodel::validate_scenario;
use quesat::scenario::{
    self, build_scenario, lightpaths_csv, prepare, run_seed, summarize, traces_csv,
    ExperimentReport, ScenarioConfig, SeedOutcome,
};

#[derive(Parser)]
#[command(name = "quesat", about = "Satellite-assisted entanglement distribution simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and report every violation.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the configured experiment over N seeds and write outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Number of seeds (1..=N).
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-slot delivery traces for the first seed.
        #[arg(long, default_value_t = false)]
        traces: bool,
    },
    /// Run the experiment once per value of a swept parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Parameter to sweep: distance_factor | total_demand | commodity_count.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the built-in default scenario as JSON.
    PrintConfig,
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Validate { config } => validate(&config),
        Command::Run { config, seeds, out, traces } => run_experiment(&config, seeds, &out, traces),
        Command::Sweep { config, param, values, seeds, out } => {
            sweep(&config, &param, &values, seeds, &out)
        }
        Command::PrintConfig => {
            println!("{}", serde_json::to_string_pretty(&ScenarioConfig::default())?);
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ScenarioConfig::from_json(&text)?)
}

fn validate(path: &Path) -> Result<()> {
    let config = load_config(path)?;
    let scenario = match build_scenario(&config) {
        Ok(s) => s,
        Err(e) => bail!("invalid scenario: {e}"),
    };
    let report = validate_scenario(
        &scenario.stations,
        &scenario.fibers,
        &scenario.satellites,
        &scenario.commodities,
    );
    if report.is_empty() {
        println!(
            "ok: {} stations, {} fibers, {} satellites, {} commodities",
            scenario.stations.len(),
            scenario.fibers.len(),
            scenario.satellites.len(),
            scenario.commodities.len()
        );
        Ok(())
    } else {
        for v in &report {
            eprintln!("violation: {v}");
        }
        bail!("{} violation(s)", report.len());
    }
}

fn seed_list(n: u64) -> Vec<u64> {
    (1..=n).collect()
}

fn run_experiment(path: &Path, seeds: u64, out: &Path, traces: bool) -> Result<()> {
    let config = load_config(path)?;
    fs::create_dir_all(out)?;
    let prepared = prepare(&config)?;
    let seeds = seed_list(seeds);
    let mut outcomes = Vec::new();
    for (k, &seed) in seeds.iter().enumerate() {
        let (outcome, slot_traces, selected) = run_seed(&prepared, seed)?;
        eprintln!(
            "seed {seed}: throughput {:.4} ebits/slot, satisfaction {:.3}",
            outcome.average_throughput, outcome.satisfaction_ratio
        );
        if k == 0 {
            fs::write(out.join("lightpaths.csv"), lightpaths_csv(&prepared.scenario, &selected))?;
            if traces {
                let pairs = prepared.scenario.commodity_pairs();
                fs::write(out.join("traces.csv"), traces_csv(&slot_traces, &pairs))?;
            }
        }
        outcomes.push(outcome);
    }
    let report = summarize(&config, &seeds, outcomes)?;
    write_report(&report, out)?;
    println!(
        "throughput {:.4} ± {:.4} ebits/slot, satisfaction {:.3} ± {:.3} ({} seeds) -> {}",
        report.throughput.mean,
        report.throughput.ci99_half_width,
        report.satisfaction.mean,
        report.satisfaction.ci99_half_width,
        report.seeds.len(),
        out.display()
    );
    Ok(())
}

fn write_report(report: &ExperimentReport, out: &Path) -> Result<()> {
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(report)?)?;
    fs::write(
        out.join("throughput.csv"),
        series_csv(&report.throughput_series_mean, &report.per_seed, |o| &o.throughput_series),
    )?;
    fs::write(
        out.join("satisfaction.csv"),
        series_csv(&report.satisfaction_series_mean, &report.per_seed, |o| &o.satisfaction_series),
    )?;
    Ok(())
}

fn series_csv(
    mean: &[(u64, f64)],
    per_seed: &[SeedOutcome],
    pick: fn(&SeedOutcome) -> &Vec<(u64, f64)>,
) -> String {
    let mut out = String::from("start_s,mean");
    for o in per_seed {
        out.push_str(&format!(",seed_{}", o.seed));
    }
    out.push('\n');
    for (k, (t, m)) in mean.iter().enumerate() {
        out.push_str(&format!("{t},{m:.6}"));
        for o in per_seed {
            out.push_str(&format!(",{:.6}", pick(o)[k].1));
        }
        out.push('\n');
    }
    out
}

fn sweep(path: &Path, param: &str, values: &[f64], seeds: u64, out: &Path) -> Result<()> {
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    let base = load_config(path)?;
    fs::create_dir_all(out)?;
    let seeds = seed_list(seeds);
    let mut rows =
        String::from("value,throughput_mean,throughput_ci99,satisfaction_mean,satisfaction_ci99\n");
    for &value in values {
        let mut config = base.clone();
        match param {
            "distance_factor" => config.simulation.distance_scale = value,
            "total_demand" => config.commodities.total_demand = value,
            "commodity_count" => config.commodities.count = value as usize,
            other => bail!(
                "unknown sweep parameter {other:?} (expected distance_factor, total_demand or commodity_count)"
            ),
        }
        let report = scenario::run_experiment(&config, &seeds)?;
        eprintln!(
            "{param} = {value}: throughput {:.4}, satisfaction {:.3}",
            report.throughput.mean, report.satisfaction.mean
        );
        rows.push_str(&format!(
            "{value},{:.6},{:.6},{:.6},{:.6}\n",
            report.throughput.mean,
            report.throughput.ci99_half_width,
            report.satisfaction.mean,
            report.satisfaction.ci99_half_width
        ));
        let sub = out.join(format!("{param}_{value}"));
        fs::create_dir_all(&sub)?;
        write_report(&report, &sub)?;
    }
    fs::write(out.join("sweep.csv"), rows)?;
    println!("sweep written to {}", out.display());
    Ok(())
}
