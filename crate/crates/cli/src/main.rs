//! `spinpart`: runs one reproduction scenario and writes its table.

mod config;
mod output;
mod scenarios;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{Map, Value};

use config::{apply_override, ResolvedConfig};

/// Bad arguments or configuration.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    /// A computation failed its own validation.
    #[error("numerical validation failed: {0}")]
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<spinpart_core::Error> for Failure {
    fn from(e: spinpart_core::Error) -> Self {
        use spinpart_core::Error as E;
        match e {
            E::Numerical(_) | E::RankDeficient { .. } => Failure::Numerical(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

const SCENARIO_HELP: &str = "\
Scenarios and their tables (one row per sample):
  qm-table           m, q_m                       pair content Q_m of each Dicke level
  husimi             theta, phi, q_pair           pair Husimi function on a grid
  cdist              theta, phi, c_n, z, alpha    classicality distribution; summary has the
                                                  concurrence bound and Wootters concurrence
  squeeze-scan       time, delta_j_min, phi_min, pair_concurrence, squeezing_concurrence
  cat-fringes        phi, parity, sigma_echo, sigma_equatorial, [sigma_echo_sampled], pi_m<m>...
  entropy-partition  state, s_min_global, s_min_pair, s_min_conditional
  tomography         row, column, re, im          reconstructed pair matrix; JSON adds diagnostics
  decay-w            m, population                ground populations after one photon emission
  decay-cat          m, population
  decay-psi2         m, population                summary has coherence and retention
  rabi-lindblad      time, excited_population, ground_population
  two-pi-coherence   polarization, duration, excited_population_after_pulse, coherence, retention

Config keys (JSON file or --set key=value): two_j, state, theta, phi, m, alpha, amplitudes,
theta_grid, phi_grid, time_grid, phi_points, chi, larmor, duration, tau, pulse_duration, area,
detuning, polarization, shots, seed, samples, nodes, clip, lambda_global, lambda_pair, format.
States: coherent (default |m=-J>), dicke, w, cat, twisted-cat, squeezed, mixed, amplitudes.
Quantities take units and a 2pi* prefix: \"2pi*32.1kHz\", \"62ns\", \"1.2us\", \"pi/2\".
Grids are \"start:stop:count\" (inclusive) or JSON lists.
Pulse areas refer to the strongest coupling out of |m=-J> under the calibration polarization.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical validation failure.";

#[derive(Debug, Parser)]
#[command(name = "spinpart", version, about = "Reproduce spin-partition results as tables", after_long_help = SCENARIO_HELP)]
struct Cli {
    /// Scenario to run (see --help for the list).
    scenario: String,
    /// JSON configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_name = "DIR", default_value = ".")]
    output: PathBuf,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Also write an SVG rendering of the table.
    #[arg(long)]
    plot: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Shorthand for --set state=NAME.
    #[arg(long)]
    state: Option<String>,
    /// Shorthand for --set theta_grid=SPEC.
    #[arg(long, value_name = "SPEC")]
    theta_grid: Option<String>,
}

fn load_document(cli: &Cli) -> Result<Value, Failure> {
    let mut doc = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
            match serde_json::from_str(&text) {
                Ok(Value::Object(map)) => map,
                Ok(_) => return Err(UsageError("config must be a JSON object".into()).into()),
                Err(e) => return Err(UsageError(format!("config {} is not valid JSON: {e}", path.display())).into()),
            }
        }
        None => Map::new(),
    };
    for s in &cli.set {
        apply_override(&mut doc, s)?;
    }
    if let Some(s) = &cli.state {
        doc.insert("state".into(), Value::String(s.clone()));
    }
    if let Some(g) = &cli.theta_grid {
        doc.insert("theta_grid".into(), Value::String(g.clone()));
    }
    if let Some(seed) = cli.seed {
        doc.insert("seed".into(), Value::from(seed));
    }
    if let Some(f) = &cli.format {
        doc.insert("format".into(), Value::String(f.clone()));
    }
    Ok(Value::Object(doc))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())).into())
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>, Failure> {
    let resolved = ResolvedConfig::from_document(load_document(cli)?)?;
    let cfg = &resolved.config;
    let seed = cfg.seed.unwrap_or(0);
    let format = cfg.format.as_deref().unwrap_or("csv");
    if format != "csv" && format != "json" {
        return Err(UsageError(format!("format must be csv or json, not {format:?}")).into());
    }
    let report = scenarios::run(&cli.scenario, cfg, seed)?;

    fs::create_dir_all(&cli.output)
        .map_err(|e| UsageError(format!("cannot create {}: {e}", cli.output.display())))?;
    let mut written = Vec::new();
    let path = cli.output.join(format!("{}.{format}", cli.scenario));
    let text = match format {
        "csv" => output::render_csv(&report, &resolved, seed),
        _ => output::render_json(&report, &resolved, seed),
    };
    write(&path, &text)?;
    written.push(path);
    if cli.plot {
        match output::render_svg(&report) {
            Some(svg) => {
                let path = cli.output.join(format!("{}.svg", cli.scenario));
                write(&path, &svg)?;
                written.push(path);
            }
            None => eprintln!("spinpart: {} has no one-dimensional table to plot", cli.scenario),
        }
    }
    Ok(written)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("spinpart: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
