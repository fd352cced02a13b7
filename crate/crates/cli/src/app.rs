//! Command-line surface: `run`, `sweep` and `validate`.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use geoslam_core::{run, RunOptions, RunResult, Scenario};

use crate::output::{summary_text, write_csv, Provenance};
use crate::scenario_file::{load_scenario, LoadedScenario};
use crate::sweep::{parse_values, sweep};

#[derive(Debug, Parser)]
#[command(name = "geoslam", version, about = "Simulate the geometric SLAM observer on scripted scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its CSV and summary.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a scenario once per value of one parameter.
    Sweep {
        scenario: PathBuf,
        /// Dotted parameter path, e.g. `gains.k1` or `noise.landmark.scale`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Parse and check a scenario file without running it.
    Validate { scenario: PathBuf },
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Keep every Nth record plus the final one.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub decimate: u64,
}

impl OutputArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            decimate: self.decimate as usize,
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { scenario, output } => {
            let loaded = load(scenario, output.seed)?;
            let result = run(&loaded.scenario, &output.options())
                .with_context(|| format!("run of {} failed", scenario.display()))?;
            let stem = sanitize(&loaded.scenario.name);
            let provenance = provenance(&loaded, Vec::new());
            let csv = write_outputs(&output.out, &stem, &loaded.scenario, &result, &provenance)?;
            println!("wrote {}", csv.display());
            Ok(())
        }
        Command::Sweep {
            scenario,
            param,
            values,
            output,
        } => {
            let loaded = load(scenario, output.seed)?;
            let values = parse_values(values).map_err(anyhow::Error::msg).context("--values")?;
            let results = sweep(&loaded.scenario, param, &values, &output.options())
                .with_context(|| format!("sweep over {param} failed"))?;
            for (i, (value, result)) in values.iter().zip(&results).enumerate() {
                let mut scenario = loaded.scenario.clone();
                scenario.set_parameter(param, *value)?;
                let stem = format!("{}_{}_{i:03}", sanitize(&scenario.name), sanitize(param));
                let provenance = provenance(&loaded, vec![(param.clone(), *value)]);
                let csv = write_outputs(&output.out, &stem, &scenario, result, &provenance)?;
                println!("{param} = {value}: wrote {}", csv.display());
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let loaded = load(scenario, None)?;
            let s = &loaded.scenario;
            println!(
                "ok: {} ({} steps of {} s, {} landmarks, sha256 {})",
                s.name,
                s.step_count(),
                s.dt,
                s.landmarks.len(),
                loaded.sha256
            );
            Ok(())
        }
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<LoadedScenario> {
    let mut loaded = load_scenario(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(seed) = seed {
        loaded.scenario.seed = seed;
    }
    Ok(loaded)
}

fn provenance(loaded: &LoadedScenario, overrides: Vec<(String, f64)>) -> Provenance {
    Provenance {
        scenario_path: loaded.path.display().to_string(),
        scenario_sha256: loaded.sha256.clone(),
        seed: loaded.scenario.seed,
        overrides,
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes `<stem>.csv` and `<stem>.summary.txt`; returns the CSV path.
fn write_outputs(
    dir: &Path,
    stem: &str,
    scenario: &Scenario,
    result: &RunResult,
    provenance: &Provenance,
) -> Result<PathBuf> {
    if stem.is_empty() {
        bail!("scenario name produces an empty file name");
    }
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let file = File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    write_csv(BufWriter::new(file), scenario.landmarks.len(), &result.records)
        .with_context(|| format!("writing {}", csv_path.display()))?;
    let summary_path = dir.join(format!("{stem}.summary.txt"));
    fs::write(&summary_path, summary_text(scenario, &result.summary, provenance))
        .with_context(|| format!("writing {}", summary_path.display()))?;
    Ok(csv_path)
}
