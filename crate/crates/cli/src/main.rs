//! becrad: evolve 1-D mean-field wave packets, accumulate the radiated-energy
//! models, sweep packet lengths against a localized barrier, and run the
//! Fock-space residual oracle.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure (blow-up),
//! 3 threshold violation under `--check`.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use becrad::experiments::run_scaling_sweep;
use becrad::fock::report::run_oracle;
use becrad::state::Potential;
use becrad::{evolve_and_record, integrate_radiation, Error, Grid};

use config::{Experiment, RunConfig};
use output::{CheckOutcome, Report, VERSION};

#[derive(Parser)]
#[command(name = "becrad", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; defaults apply for every omitted key.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Turn result thresholds into the exit code (3 on violation).
    #[arg(long)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one packet through a potential; write time-series CSV and a
    /// radiated-energy JSON report.
    Simulate(RunArgs),
    /// Packet-length scaling study; write per-sigma CSV and a fit JSON.
    Sweep(RunArgs),
    /// Harmonic closed-form benchmark; write a comparison JSON.
    Benchmark(RunArgs),
    /// Fock-space residual suite; print and write the report JSON.
    Oracle(RunArgs),
}

fn emit_error(err: &Error) {
    let kind = if err.is_numerical() { "numerical" } else { "validation" };
    eprintln!(
        "{}",
        serde_json::json!({ "error": err.to_string(), "kind": kind })
    );
}

fn exit_for(err: &Error) -> ExitCode {
    if err.is_numerical() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match &cli.command {
        Command::Simulate(a) => (Experiment::Simulate, a),
        Command::Sweep(a) => (Experiment::Sweep, a),
        Command::Benchmark(a) => (Experiment::Benchmark, a),
        Command::Oracle(a) => (Experiment::Oracle, a),
    };
    match run(experiment, args) {
        Ok(outcome) => {
            if let Some(check) = outcome {
                if !check.passed {
                    for failure in &check.failures {
                        eprintln!(
                            "{}",
                            serde_json::json!({ "error": failure, "kind": "check" })
                        );
                    }
                    return ExitCode::from(3);
                }
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            emit_error(&err);
            exit_for(&err)
        }
    }
}

fn load_config(args: &RunArgs, experiment: Experiment) -> Result<(RunConfig, Vec<String>), Error> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("reading {}: {e}", path.display())))?,
        None => "{}".to_string(),
    };
    let mut config = RunConfig::parse(&text)?;
    let warnings = config.validate(experiment)?;
    Ok((config, warnings))
}

fn run(experiment: Experiment, args: &RunArgs) -> Result<Option<CheckOutcome>, Error> {
    let (config, warnings) = load_config(args, experiment)?;
    let out_dir = output::resolve_output_dir(&config.output.dir)?;
    let prefix = config.prefix(experiment);
    let check = match experiment {
        Experiment::Simulate => simulate(&config, &warnings, &out_dir, &prefix, args.check)?,
        Experiment::Sweep => sweep(&config, &warnings, &out_dir, &prefix, args.check)?,
        Experiment::Benchmark => benchmark(&config, &warnings, &out_dir, &prefix, args.check)?,
        Experiment::Oracle => oracle(&config, &warnings, &out_dir, &prefix, args.check)?,
    };
    Ok(check)
}

fn finish_check(check: bool, failures: Vec<String>) -> Option<CheckOutcome> {
    check.then_some(CheckOutcome { passed: failures.is_empty(), failures })
}

#[derive(serde::Serialize)]
struct SimulatePayload {
    radiation: becrad::RadiationResult,
    impulse: f64,
    norm_drift: f64,
    samples: usize,
    timeseries_csv: PathBuf,
}

fn simulate(
    config: &RunConfig,
    warnings: &[String],
    out_dir: &std::path::Path,
    prefix: &str,
    check: bool,
) -> Result<Option<CheckOutcome>, Error> {
    let grid = Arc::new(Grid::new(config.grid.n_points, config.grid.box_length)?);
    let psi = config.packet.realize(grid, &config.physics)?;
    let series = evolve_and_record(&psi, &config.potential, &config.physics, &config.evolution)?;
    let radiation = integrate_radiation(&series, &config.physics)?;

    let csv_path = out_dir.join(format!("{prefix}_timeseries.csv"));
    output::write_timeseries_csv(&csv_path, &series)?;

    let mut failures = Vec::new();
    if check {
        let drift = series.max_norm_drift();
        if drift >= 1e-8 {
            failures.push(format!("norm drift {drift} exceeds 1e-8"));
        }
        if radiation.i_hydro > radiation.i_incoherent {
            failures.push(format!(
                "i_hydro {} exceeds i_incoherent {}",
                radiation.i_hydro, radiation.i_incoherent
            ));
        }
        let n = config.physics.n_mean;
        let recombined =
            radiation.prefactor * (n * n * radiation.i_hydro + n * radiation.i_incoherent);
        if radiation.e_condensate != recombined {
            failures.push("e_condensate does not decompose into its two terms".into());
        }
        if config.potential == Potential::Zero && config.physics.gpe_coupling != 0.0 {
            let max_a = series.a_mean.iter().map(|a| a.abs()).fold(0.0, f64::max);
            if max_a >= 1e-10 {
                failures.push(format!(
                    "self-force residual {max_a} exceeds 1e-10 with zero external potential"
                ));
            }
        }
    }
    let outcome = finish_check(check, failures);

    let payload = SimulatePayload {
        radiation,
        impulse: series.impulse(&config.physics),
        norm_drift: series.max_norm_drift(),
        samples: series.len(),
        timeseries_csv: csv_path.clone(),
    };
    let report = Report {
        version: VERSION,
        experiment: "simulate",
        config,
        warnings,
        payload,
        check: outcome.as_ref(),
    };
    output::write_json(&out_dir.join(format!("{prefix}_report.json")), &report)?;
    println!(
        "simulate: {} samples -> {} ; e_condensate = {:.6e}",
        series.len(),
        csv_path.display(),
        radiation.e_condensate
    );
    Ok(outcome)
}

#[derive(serde::Serialize)]
struct SweepPayload {
    sweep: becrad::ScalingSweepResult,
    sweep_csv: PathBuf,
}

fn sweep(
    config: &RunConfig,
    warnings: &[String],
    out_dir: &std::path::Path,
    prefix: &str,
    check: bool,
) -> Result<Option<CheckOutcome>, Error> {
    let result = run_scaling_sweep(&config.sweep, &config.physics)?;

    let csv_path = out_dir.join(format!("{prefix}_records.csv"));
    output::write_sweep_csv(&csv_path, &result)?;

    let mut failures = Vec::new();
    if check {
        if (result.fitted_exponent + 1.0).abs() > 0.1 {
            failures.push(format!(
                "fitted exponent {} outside -1.0 +/- 0.1",
                result.fitted_exponent
            ));
        }
        if result.incoherent_spread >= 0.03 {
            failures.push(format!(
                "incoherent integral spread {} exceeds 3%",
                result.incoherent_spread
            ));
        }
        if result.impulse_spread >= 0.02 {
            failures.push(format!("impulse spread {} exceeds 2%", result.impulse_spread));
        }
        for record in &result.records {
            for violation in &record.violations {
                failures.push(format!("sigma {}: {violation}", record.sigma));
            }
        }
        for warning in warnings {
            failures.push(format!("regime warning: {warning}"));
        }
    }
    let outcome = finish_check(check, failures);

    let payload = SweepPayload { sweep: result, sweep_csv: csv_path.clone() };
    let report = Report {
        version: VERSION,
        experiment: "sweep",
        config,
        warnings,
        payload,
        check: outcome.as_ref(),
    };
    output::write_json(&out_dir.join(format!("{prefix}_report.json")), &report)?;
    println!(
        "sweep: {} records -> {} ; fitted exponent {:.4}",
        report.payload.sweep.records.len(),
        csv_path.display(),
        report.payload.sweep.fitted_exponent
    );
    Ok(outcome)
}

#[derive(serde::Serialize)]
struct BenchmarkPayload {
    benchmark: becrad::HarmonicBenchmarkReport,
}

fn benchmark(
    config: &RunConfig,
    warnings: &[String],
    out_dir: &std::path::Path,
    prefix: &str,
    check: bool,
) -> Result<Option<CheckOutcome>, Error> {
    let report_data = config.benchmark.run(&config.physics)?;

    let mut failures = Vec::new();
    if check {
        if let Some(err) = report_data.i_hydro_rel_err {
            if err >= 3e-3 {
                failures.push(format!("i_hydro off closed form by {err} (limit 0.3%)"));
            }
        }
        if let Some(err) = report_data.i_incoherent_rel_err {
            if err >= 3e-3 {
                failures.push(format!("i_incoherent off closed form by {err} (limit 0.3%)"));
            }
        }
        if report_data.norm_drift >= 1e-8 {
            failures.push(format!("norm drift {} exceeds 1e-8", report_data.norm_drift));
        }
        if report_data.ehrenfest_residual >= 1e-4 {
            failures.push(format!(
                "Ehrenfest residual {} exceeds 1e-4",
                report_data.ehrenfest_residual
            ));
        }
    }
    let outcome = finish_check(check, failures);

    let payload = BenchmarkPayload { benchmark: report_data };
    let report = Report {
        version: VERSION,
        experiment: "benchmark",
        config,
        warnings,
        payload,
        check: outcome.as_ref(),
    };
    let path = out_dir.join(format!("{prefix}_report.json"));
    output::write_json(&path, &report)?;
    println!(
        "benchmark: i_hydro {:.6e} (expected {:.6e}) -> {}",
        report.payload.benchmark.i_hydro,
        report.payload.benchmark.i_hydro_expected,
        path.display()
    );
    Ok(outcome)
}

#[derive(serde::Serialize)]
struct OraclePayload {
    oracle: becrad::fock::report::OracleReport,
}

fn oracle(
    config: &RunConfig,
    warnings: &[String],
    out_dir: &std::path::Path,
    prefix: &str,
    check: bool,
) -> Result<Option<CheckOutcome>, Error> {
    let oracle_report = run_oracle(config.oracle.seed, config.oracle.trials)?;

    let mut failures = Vec::new();
    if check && !oracle_report.all_pass {
        failures.push("one or more oracle residuals exceeded their thresholds".into());
    }
    let outcome = finish_check(check, failures);

    let payload = OraclePayload { oracle: oracle_report };
    let report = Report {
        version: VERSION,
        experiment: "oracle",
        config,
        warnings,
        payload,
        check: outcome.as_ref(),
    };
    // Machine-readable report on stdout as well as on disk.
    println!(
        "{}",
        serde_json::to_string_pretty(&report)
            .map_err(|e| Error::InvalidConfig(format!("serializing report: {e}")))?
    );
    output::write_json(&out_dir.join(format!("{prefix}_report.json")), &report)?;
    Ok(outcome)
}
