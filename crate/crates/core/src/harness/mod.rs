//! Monte-Carlo experiments, figure presets, artifacts and the command line.

pub mod cli;
pub mod config;
pub mod output;
pub mod presets;
pub mod runner;

use std::path::PathBuf;

pub use config::{Algorithm, Axis, ExperimentConfig};
pub use presets::{figure_preset, Overrides, Preset, PRESET_NAMES};
pub use runner::{empirical_guarantee_edge, run_experiment, run_tw_validation, RunOutput, SrpCurve, TwValidation};

use crate::error::Result;

#[derive(Debug, Clone)]
pub enum PresetOutput {
    TwValidation(TwValidation),
    Sweep(Vec<RunOutput>),
}

pub fn run_preset(preset: &Preset) -> Result<PresetOutput> {
    match preset {
        Preset::TwValidation(t) => run_tw_validation(t.m, &t.ds, t.sigma, t.samples, t.base_seed).map(PresetOutput::TwValidation),
        Preset::Sweep(panels) => panels
            .iter()
            .map(run_experiment)
            .collect::<Result<Vec<_>>>()
            .map(PresetOutput::Sweep),
    }
}

/// Runs a preset and writes its artifacts to the preset's output directory.
pub fn run_and_write_preset(preset: &Preset) -> Result<(PresetOutput, Vec<PathBuf>)> {
    let out = run_preset(preset)?;
    let files = match (&out, preset) {
        (PresetOutput::TwValidation(v), Preset::TwValidation(t)) => output::write_tw(&t.name, v, &t.output_dir)?,
        (PresetOutput::Sweep(runs), Preset::Sweep(panels)) => {
            output::write_sweep(&panels[0].name, runs, &panels[0].output_dir)?
        }
        _ => unreachable!("output kind follows the preset"),
    };
    Ok((out, files))
}
