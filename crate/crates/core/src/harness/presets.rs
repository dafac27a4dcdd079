//! Figure presets.
//!
//! Every preset uses the designed 100×200 matrix (seed 0) unless it sweeps
//! M, and 1000 trials per grid point. Grids are chosen so that each theory
//! threshold falls strictly inside the swept range.
//!
//! | preset | sweep | fixed |
//! |---|---|---|
//! | fig1 | ‖N‖₂ CDF for d ∈ {2, 5, 10} | M=100, σ=1 |
//! | fig2 | ε | L=4, d=4, C_min=2, bounded |
//! | fig3 | C_min | L=4, d=4, ε=1, bounded |
//! | fig4 | σ | L=4, d=4, C_min=2, Gaussian |
//! | fig5 | C_min | L=4, d=4, σ=0.1, Gaussian |
//! | fig6 | L × ε | d=4, C_min=2, bounded |
//! | fig7 | L × σ | d=4, C_min=2, Gaussian |
//! | fig8, fig9 | d × C_min | L=4, σ=0.1; SOMPS, SOMPT |
//! | fig10, fig11 | σ × d | L=4, C_min=√d; SOMPS, SOMPT |
//! | fig12 | L × M | d=4, C_min=10, ε=1, bounded |
//! | fig13 | L × M | d=4, σ=0.1; SOMPS C_min=10, SOMPT C_min=√d |
//! | fig14 | d × M | L=4, σ=0.02, C_min=√d |
//! | fig15 | ratio × ε | L=4, d=4, C_max=4, bounded |
//! | fig16 | ratio × σ | L=4, d=4, C_max=4, Gaussian |
//!
//! In the two-axis presets the first axis labels grid rows.

use std::path::PathBuf;

use super::config::{
    Algorithm, Axis, ExperimentConfig, MatrixConfig, MatrixSource, NoiseConfig, NoiseModel, SignalConfig,
    SignalModel, SomptConfig, SweepConfig,
};
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 16] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13",
    "fig14", "fig15", "fig16",
];

pub const DEFAULT_TRIALS: u32 = 1000;

/// Empirical check of the Tracy-Widom approximation of `‖N‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwPreset {
    pub name: String,
    pub m: usize,
    pub ds: Vec<usize>,
    pub sigma: f64,
    pub samples: u32,
    pub base_seed: u64,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    TwValidation(TwPreset),
    /// One or more panels written to a single set of artifacts.
    Sweep(Vec<ExperimentConfig>),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub trials: Option<u32>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl Preset {
    pub fn name(&self) -> &str {
        match self {
            Preset::TwValidation(t) => &t.name,
            Preset::Sweep(panels) => &panels[0].name,
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        match self {
            Preset::TwValidation(t) => {
                if let Some(v) = o.trials {
                    t.samples = v;
                }
                if let Some(v) = o.seed {
                    t.base_seed = v;
                }
                if let Some(v) = &o.output_dir {
                    t.output_dir = v.clone();
                }
            }
            Preset::Sweep(panels) => {
                for p in panels {
                    if let Some(v) = o.trials {
                        p.trials = v;
                    }
                    if let Some(v) = o.seed {
                        p.base_seed = v;
                    }
                    if let Some(v) = &o.output_dir {
                        p.output_dir = v.clone();
                    }
                }
            }
        }
    }

    /// Resolved configuration as TOML; one document per panel.
    pub fn to_toml(&self) -> String {
        match self {
            Preset::TwValidation(t) => format!(
                "# {}: empirical CDF of the spectral norm of Gaussian noise\nm = {}\nds = {:?}\nsigma = {:?}\nsamples = {}\nbase_seed = {}\noutput_dir = {:?}\n",
                t.name,
                t.m,
                t.ds,
                t.sigma,
                t.samples,
                t.base_seed,
                t.output_dir.display().to_string()
            ),
            Preset::Sweep(panels) => panels
                .iter()
                .enumerate()
                .map(|(i, p)| format!("# panel {} of {}\n{}", i + 1, panels.len(), p.to_toml()))
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }
}

/// `count` values `start + k·step`, rounded to nine decimals.
fn grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| ((start + step * k as f64) * 1e9).round() / 1e9)
        .collect()
}

fn ints(vals: &[usize]) -> Vec<f64> {
    vals.iter().map(|&v| v as f64).collect()
}

fn designed() -> MatrixConfig {
    MatrixConfig {
        source: MatrixSource::Designed,
        m: Some(100),
        n: Some(200),
        seed: 0,
        path: None,
        iters: None,
    }
}

fn equal_norm(l: usize, d: usize, c_min: f64) -> SignalConfig {
    SignalConfig {
        model: SignalModel::EqualNorm,
        sparsity: l,
        vectors: d,
        c_min: Some(c_min),
        c_max: None,
        c_m: None,
    }
}

fn sqrt_d(l: usize, d: usize) -> SignalConfig {
    SignalConfig {
        model: SignalModel::SqrtD,
        sparsity: l,
        vectors: d,
        c_min: None,
        c_max: None,
        c_m: Some(1.0),
    }
}

fn dynamic_range(c_max: f64) -> SignalConfig {
    SignalConfig {
        model: SignalModel::DynamicRange,
        sparsity: 4,
        vectors: 4,
        c_min: None,
        c_max: Some(c_max),
        c_m: None,
    }
}

fn bounded(epsilon: f64) -> NoiseConfig {
    NoiseConfig {
        kind: NoiseModel::Bounded,
        epsilon: Some(epsilon),
        sigma: None,
    }
}

fn gaussian(sigma: f64) -> NoiseConfig {
    NoiseConfig {
        kind: NoiseModel::Gaussian,
        epsilon: None,
        sigma: Some(sigma),
    }
}

fn sweep(axis: Axis, values: Vec<f64>) -> SweepConfig {
    SweepConfig { axis, values }
}

fn panel(name: &str, signal: SignalConfig, noise: NoiseConfig, outer: Option<SweepConfig>, inner: SweepConfig) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        algorithms: vec![Algorithm::Somps, Algorithm::Sompt],
        trials: DEFAULT_TRIALS,
        base_seed: 0,
        delta: 1e-3,
        output_dir: PathBuf::from("."),
        matrix: designed(),
        signal,
        noise,
        sompt: SomptConfig::default(),
        outer,
        sweep: inner,
    }
}

fn only(mut cfg: ExperimentConfig, alg: Algorithm) -> ExperimentConfig {
    cfg.algorithms = vec![alg];
    cfg
}

/// Step 0.2 up to 3, where the empirical edges sit, then 0.5 up to 9 to
/// cover the theory thresholds.
fn cmin_grid() -> Vec<f64> {
    let mut v = grid(0.2, 0.2, 15);
    v.extend(grid(3.5, 0.5, 12));
    v
}

fn m_grid() -> Vec<f64> {
    grid(10.0, 5.0, 19)
}

fn l_grid() -> Vec<f64> {
    grid(1.0, 1.0, 6)
}

/// Preset for `name`, or a config error listing the valid names.
pub fn figure_preset(name: &str) -> Result<Preset> {
    let eps = || sweep(Axis::Epsilon, grid(0.15, 0.15, 40));
    let sig = || sweep(Axis::Sigma, grid(0.0125, 0.0125, 40));
    let sweeps = match name {
        "fig1" => {
            return Ok(Preset::TwValidation(TwPreset {
                name: name.into(),
                m: 100,
                ds: vec![2, 5, 10],
                sigma: 1.0,
                samples: 10 * DEFAULT_TRIALS,
                base_seed: 0,
                output_dir: PathBuf::from("."),
            }))
        }
        "fig2" => vec![panel(name, equal_norm(4, 4, 2.0), bounded(1.0), None, sweep(Axis::Epsilon, grid(0.1, 0.1, 40)))],
        "fig3" => vec![panel(name, equal_norm(4, 4, 2.0), bounded(1.0), None, sweep(Axis::CMin, grid(0.25, 0.25, 40)))],
        "fig4" => vec![panel(name, equal_norm(4, 4, 2.0), gaussian(0.1), None, sweep(Axis::Sigma, grid(0.01, 0.01, 40)))],
        "fig5" => vec![panel(name, equal_norm(4, 4, 2.0), gaussian(0.1), None, sweep(Axis::CMin, grid(0.25, 0.25, 32)))],
        "fig6" => vec![panel(name, equal_norm(4, 4, 2.0), bounded(1.0), Some(sweep(Axis::Sparsity, l_grid())), eps())],
        "fig7" => vec![panel(name, equal_norm(4, 4, 2.0), gaussian(0.1), Some(sweep(Axis::Sparsity, l_grid())), sig())],
        "fig8" | "fig9" => {
            let alg = if name == "fig8" { Algorithm::Somps } else { Algorithm::Sompt };
            let outer = sweep(Axis::Vectors, ints(&[1, 2, 4, 8, 16, 32]));
            vec![only(
                panel(name, equal_norm(4, 4, 2.0), gaussian(0.1), Some(outer), sweep(Axis::CMin, cmin_grid())),
                alg,
            )]
        }
        "fig10" | "fig11" => {
            let alg = if name == "fig10" { Algorithm::Somps } else { Algorithm::Sompt };
            let outer = sweep(Axis::Sigma, vec![0.02, 0.05, 0.1, 0.2, 0.3, 0.4]);
            let inner = sweep(Axis::Vectors, ints(&[1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128]));
            vec![only(panel(name, sqrt_d(4, 4), gaussian(0.1), Some(outer), inner), alg)]
        }
        "fig12" => vec![panel(
            name,
            equal_norm(4, 4, 10.0),
            bounded(1.0),
            Some(sweep(Axis::Sparsity, l_grid())),
            sweep(Axis::Measurements, m_grid()),
        )],
        "fig13" => {
            let outer = || Some(sweep(Axis::Sparsity, l_grid()));
            let inner = || sweep(Axis::Measurements, m_grid());
            vec![
                only(panel(name, equal_norm(4, 4, 10.0), gaussian(0.1), outer(), inner()), Algorithm::Somps),
                only(panel(name, sqrt_d(4, 4), gaussian(0.1), outer(), inner()), Algorithm::Sompt),
            ]
        }
        "fig14" => vec![panel(
            name,
            sqrt_d(4, 4),
            gaussian(0.02),
            Some(sweep(Axis::Vectors, ints(&[1, 2, 4, 8, 16, 32]))),
            sweep(Axis::Measurements, m_grid()),
        )],
        "fig15" => vec![panel(name, dynamic_range(4.0), bounded(1.0), Some(sweep(Axis::Ratio, grid(0.2, 0.2, 5))), eps())],
        "fig16" => vec![panel(name, dynamic_range(4.0), gaussian(0.1), Some(sweep(Axis::Ratio, grid(0.2, 0.2, 5))), sig())],
        _ => {
            return Err(Error::Config(format!(
                "unknown figure preset `{name}`; valid presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    for cfg in &sweeps {
        cfg.validate()?;
    }
    Ok(Preset::Sweep(sweeps))
}
