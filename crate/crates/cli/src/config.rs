//! Run configuration: one JSON document covering every subcommand, with all
//! defaults materialized on parse so the echo embedded in outputs replays the
//! run exactly. Unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use becrad::experiments::{HarmonicBenchmark, ScalingSweepConfig};
use becrad::propagator::EvolutionConfig;
use becrad::state::{GaussianPacket, PhysicalParams, Potential};
use becrad::{Error, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Simulate,
    Sweep,
    Benchmark,
    Oracle,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Sweep => "sweep",
            Experiment::Benchmark => "benchmark",
            Experiment::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_points: usize,
    pub box_length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n_points: 1024, box_length: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub seed: u64,
    pub trials: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { seed: 42, trials: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File-name prefix; defaults to the experiment name.
    pub prefix: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), prefix: None }
    }
}

fn default_potential() -> Potential {
    Potential::Zero
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Experiment selector; when present it must agree with the subcommand.
    pub experiment: Option<String>,
    pub grid: GridConfig,
    pub physics: PhysicalParams,
    #[serde(default = "default_potential")]
    pub potential: Potential,
    pub packet: GaussianPacket,
    pub evolution: EvolutionConfig,
    pub sweep: ScalingSweepConfig,
    pub benchmark: HarmonicBenchmark,
    pub oracle: OracleConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: None,
            grid: GridConfig::default(),
            physics: PhysicalParams::default(),
            potential: default_potential(),
            packet: GaussianPacket::default(),
            evolution: EvolutionConfig::default(),
            sweep: ScalingSweepConfig::default(),
            benchmark: HarmonicBenchmark::default(),
            oracle: OracleConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))
    }

    /// Fail-fast validation of every section the experiment touches, plus the
    /// soft regime warnings recorded in output metadata.
    pub fn validate(&mut self, experiment: Experiment) -> Result<Vec<String>, Error> {
        if let Some(declared) = &self.experiment {
            if declared != experiment.name() {
                return Err(Error::InvalidConfig(format!(
                    "config declares experiment \"{declared}\" but the {} subcommand was invoked",
                    experiment.name()
                )));
            }
        }
        self.experiment = Some(experiment.name().to_string());
        self.physics.validate()?;

        let mut warnings = Vec::new();
        match experiment {
            Experiment::Simulate => {
                let grid = Grid::new(self.grid.n_points, self.grid.box_length)?;
                self.potential.validate(&grid)?;
                self.evolution.validate(&grid, &self.physics)?;
                // Probe packet construction so bad setups die before compute.
                self.packet.realize(std::sync::Arc::new(grid), &self.physics)?;
            }
            Experiment::Sweep => {
                warnings.extend(self.sweep.validate()?);
            }
            Experiment::Benchmark => {
                self.benchmark.validate()?;
            }
            Experiment::Oracle => {
                if self.oracle.trials == 0 {
                    return Err(Error::InvalidConfig(
                        "oracle.trials must be at least 1".into(),
                    ));
                }
            }
        }
        Ok(warnings)
    }

    pub fn prefix(&self, experiment: Experiment) -> String {
        self.output
            .prefix
            .clone()
            .unwrap_or_else(|| experiment.name().to_string())
    }
}
