//! Experiment configuration files.
//!
//! Configs are TOML. Unknown keys are rejected. A minimal example:
//!
//! ```toml
//! name = "eps-sweep"
//! algorithms = ["somps", "sompt"]
//! trials = 1000
//! base_seed = 0
//! delta = 1e-3
//! output_dir = "out"
//!
//! [matrix]
//! source = "designed"    # designed | gaussian | file
//! m = 100
//! n = 200
//!
//! [signal]
//! model = "equal-norm"   # equal-norm | dynamic-range | sqrt-d
//! sparsity = 4
//! vectors = 4
//! c_min = 2.0
//!
//! [noise]
//! kind = "bounded"       # bounded | gaussian | none
//! epsilon = 0.5          # overwritten by the sweep
//!
//! [sweep]
//! axis = "epsilon"       # epsilon | sigma | c_min | L | d | M | ratio
//! values = [0.1, 0.2, 0.3]
//!
//! [sompt]
//! threshold = "bounded-epsilon"  # bounded-epsilon | tw-quantile | chernoff-quantile | explicit
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Somps,
    Sompt,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Somps => "somps",
            Algorithm::Sompt => "sompt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "sigma")]
    Sigma,
    #[serde(rename = "c_min")]
    CMin,
    #[serde(rename = "L")]
    Sparsity,
    #[serde(rename = "d")]
    Vectors,
    #[serde(rename = "M")]
    Measurements,
    #[serde(rename = "ratio")]
    Ratio,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Epsilon => "epsilon",
            Axis::Sigma => "sigma",
            Axis::CMin => "c_min",
            Axis::Sparsity => "L",
            Axis::Vectors => "d",
            Axis::Measurements => "M",
            Axis::Ratio => "ratio",
        }
    }

    pub fn from_label(s: &str) -> Option<Axis> {
        [
            Axis::Epsilon,
            Axis::Sigma,
            Axis::CMin,
            Axis::Sparsity,
            Axis::Vectors,
            Axis::Measurements,
            Axis::Ratio,
        ]
        .into_iter()
        .find(|a| a.label() == s)
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Axis::Sparsity | Axis::Vectors | Axis::Measurements)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixSource {
    Designed,
    Gaussian,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub source: MatrixSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Iteration budget of the designed source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalModel {
    /// Every support entry is `±c_min/√d`.
    EqualNorm,
    /// Row norms uniform on `[c_min, c_max]`.
    DynamicRange,
    /// Equal-norm with `c_min = sqrt(d·c_m)`.
    SqrtD,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub model: SignalModel,
    pub sparsity: usize,
    pub vectors: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    Bounded,
    Gaussian,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdRule {
    BoundedEpsilon,
    TwQuantile,
    ChernoffQuantile,
    Explicit,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SomptConfig {
    /// Defaults to `bounded-epsilon` for bounded noise and `tw-quantile`
    /// for Gaussian noise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Defaults to M.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub matrix: MatrixConfig,
    pub signal: SignalConfig,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub sompt: SomptConfig,
    /// Rows of a two-axis grid; only figure presets set this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<SweepConfig>,
    pub sweep: SweepConfig,
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Somps, Algorithm::Sompt]
}

fn default_trials() -> u32 {
    1000
}

fn default_delta() -> f64 {
    1e-3
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    /// Parses and validates a user config. Two-axis grids are rejected.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        if cfg.outer.is_some() {
            return Err(invalid("[outer] is reserved for figure presets; configs sweep exactly one axis"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(message) => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// FNV-1a hash of the serialized config.
    /// FNV-1a of the TOML form, ignoring where artifacts are written.
    pub fn config_hash(&self) -> u64 {
        let mut c = self.clone();
        c.output_dir = PathBuf::from(".");
        c.to_toml().bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }

    pub fn axes(&self) -> Vec<&SweepConfig> {
        self.outer.iter().chain(std::iter::once(&self.sweep)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(invalid("name must be a nonempty file stem"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("at least one algorithm is required"));
        }
        let mut algs = self.algorithms.clone();
        algs.dedup();
        if algs.len() != self.algorithms.len() {
            return Err(invalid("algorithms repeat"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta must lie in (0, 1)"));
        }
        for sweep in self.axes() {
            validate_sweep(sweep)?;
        }
        if let Some(outer) = &self.outer {
            if outer.axis == self.sweep.axis {
                return Err(invalid("grid axes must differ"));
            }
        }
        self.validate_matrix()?;
        self.validate_signal()?;
        self.validate_noise()?;
        self.validate_sompt()
    }

    fn swept(&self, axis: Axis) -> bool {
        self.axes().iter().any(|s| s.axis == axis)
    }

    fn validate_matrix(&self) -> Result<()> {
        let m = &self.matrix;
        match m.source {
            MatrixSource::File => {
                if m.path.is_none() {
                    return Err(invalid("matrix source `file` needs `path`"));
                }
                if self.swept(Axis::Measurements) {
                    return Err(invalid("an M sweep needs a generated matrix"));
                }
            }
            MatrixSource::Designed | MatrixSource::Gaussian => {
                let n = m.n.ok_or_else(|| invalid("matrix needs `n`"))?;
                if m.m.is_none() && !self.swept(Axis::Measurements) {
                    return Err(invalid("matrix needs `m`"));
                }
                let ms = self.values_or(Axis::Measurements, m.m.map(|v| v as f64));
                if ms.iter().any(|&v| v as usize > n || v < 1.0) {
                    return Err(invalid("need 1 <= M <= N"));
                }
                if n < 2 {
                    return Err(invalid("N must be at least 2"));
                }
            }
        }
        Ok(())
    }

    fn values_or(&self, axis: Axis, fixed: Option<f64>) -> Vec<f64> {
        self.axes()
            .iter()
            .find(|s| s.axis == axis)
            .map(|s| s.values.clone())
            .unwrap_or_else(|| fixed.into_iter().collect())
    }

    fn validate_signal(&self) -> Result<()> {
        let s = &self.signal;
        if s.sparsity == 0 && !self.swept(Axis::Sparsity) {
            return Err(invalid("sparsity must be positive"));
        }
        if s.vectors == 0 && !self.swept(Axis::Vectors) {
            return Err(invalid("vectors must be positive"));
        }
        let positive = |name: &str, v: Option<f64>| -> Result<()> {
            match v {
                Some(x) if x > 0.0 && x.is_finite() => Ok(()),
                _ => Err(invalid(format!("signal needs a positive `{name}`"))),
            }
        };
        match s.model {
            SignalModel::EqualNorm => {
                if !self.swept(Axis::CMin) {
                    positive("c_min", s.c_min)?;
                }
                if self.swept(Axis::Ratio) {
                    return Err(invalid("a ratio sweep needs the dynamic-range model"));
                }
            }
            SignalModel::DynamicRange => {
                positive("c_max", s.c_max)?;
                if !self.swept(Axis::Ratio) && !self.swept(Axis::CMin) {
                    positive("c_min", s.c_min)?;
                }
                let c_max = s.c_max.unwrap_or(0.0);
                let lows: Vec<f64> = if self.swept(Axis::Ratio) {
                    self.values_or(Axis::Ratio, None).iter().map(|r| r * c_max).collect()
                } else {
                    self.values_or(Axis::CMin, s.c_min)
                };
                if lows.iter().any(|&c| c > c_max) {
                    return Err(invalid("c_min may not exceed c_max"));
                }
                if self.swept(Axis::Ratio) && self.values_or(Axis::Ratio, None).iter().any(|&r| r > 1.0) {
                    return Err(invalid("ratio values must lie in (0, 1]"));
                }
            }
            SignalModel::SqrtD => {
                positive("c_m", s.c_m)?;
                if self.swept(Axis::CMin) || self.swept(Axis::Ratio) {
                    return Err(invalid("the sqrt-d model fixes c_min; sweep d or c_m instead"));
                }
            }
        }
        Ok(())
    }

    fn validate_noise(&self) -> Result<()> {
        let n = &self.noise;
        let positive = |name: &str, v: Option<f64>| -> Result<()> {
            match v {
                Some(x) if x > 0.0 && x.is_finite() => Ok(()),
                _ => Err(invalid(format!("noise needs a positive `{name}`"))),
            }
        };
        match n.kind {
            NoiseModel::Bounded => {
                if !self.swept(Axis::Epsilon) {
                    positive("epsilon", n.epsilon)?;
                }
                if self.swept(Axis::Sigma) {
                    return Err(invalid("a sigma sweep needs Gaussian noise"));
                }
            }
            NoiseModel::Gaussian => {
                if !self.swept(Axis::Sigma) {
                    positive("sigma", n.sigma)?;
                }
                if self.swept(Axis::Epsilon) {
                    return Err(invalid("an epsilon sweep needs bounded noise"));
                }
            }
            NoiseModel::None => {
                if self.swept(Axis::Epsilon) || self.swept(Axis::Sigma) {
                    return Err(invalid("a noise sweep needs a noise model"));
                }
            }
        }
        Ok(())
    }

    /// Threshold rule in effect for the threshold-stopped pursuit.
    pub fn threshold_rule(&self) -> ThresholdRule {
        self.sompt.threshold.unwrap_or(match self.noise.kind {
            NoiseModel::Gaussian => ThresholdRule::TwQuantile,
            NoiseModel::Bounded => ThresholdRule::BoundedEpsilon,
            NoiseModel::None => ThresholdRule::Explicit,
        })
    }

    fn validate_sompt(&self) -> Result<()> {
        if !self.algorithms.contains(&Algorithm::Sompt) {
            return Ok(());
        }
        match (self.threshold_rule(), self.noise.kind) {
            (ThresholdRule::BoundedEpsilon, NoiseModel::Bounded) => {}
            (ThresholdRule::TwQuantile | ThresholdRule::ChernoffQuantile, NoiseModel::Gaussian) => {}
            (ThresholdRule::Explicit, _) => match self.sompt.tau {
                Some(t) if t > 0.0 && t.is_finite() => {}
                _ => return Err(invalid("explicit SOMPT threshold needs a positive `tau`")),
            },
            (rule, kind) => {
                return Err(invalid(format!("SOMPT threshold rule {rule:?} does not apply to {kind:?} noise")));
            }
        }
        if self.sompt.max_iter == Some(0) {
            return Err(invalid("max_iter must be positive"));
        }
        Ok(())
    }
}

fn validate_sweep(s: &SweepConfig) -> Result<()> {
    if s.values.is_empty() {
        return Err(invalid(format!("{} grid is empty", s.axis.label())));
    }
    if s.values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(format!("{} grid must be strictly increasing", s.axis.label())));
    }
    if s.values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(invalid(format!("{} grid values must be positive", s.axis.label())));
    }
    if s.axis.is_integer() && s.values.iter().any(|v| v.fract() != 0.0) {
        return Err(invalid(format!("{} grid values must be integers", s.axis.label())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "t"
trials = 10

[matrix]
source = "gaussian"
m = 20
n = 40

[signal]
model = "equal-norm"
sparsity = 2
vectors = 2
c_min = 1.0

[noise]
kind = "bounded"

[sweep]
axis = "epsilon"
values = [0.1, 0.2]
"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
        assert_eq!(cfg.sweep.axis, Axis::Epsilon);
        assert_eq!(cfg.algorithms, vec![Algorithm::Somps, Algorithm::Sompt]);
        assert_eq!(cfg.threshold_rule(), ThresholdRule::BoundedEpsilon);
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_grids() {
        let typo = BASE.replace("trials = 10", "trails = 10");
        assert!(ExperimentConfig::from_toml_str(&typo).is_err());
        let unsorted = BASE.replace("[0.1, 0.2]", "[0.2, 0.1]");
        assert!(ExperimentConfig::from_toml_str(&unsorted).is_err());
        let empty = BASE.replace("[0.1, 0.2]", "[]");
        assert!(ExperimentConfig::from_toml_str(&empty).is_err());
        let outer = format!("{BASE}\n[outer]\naxis = \"L\"\nvalues = [1.0]\n");
        assert!(ExperimentConfig::from_toml_str(&outer).is_err());
    }

    #[test]
    fn rejects_mismatched_axis_and_noise() {
        let sigma = BASE.replace("axis = \"epsilon\"", "axis = \"sigma\"");
        assert!(ExperimentConfig::from_toml_str(&sigma).is_err());
        let frac = BASE.replace("axis = \"epsilon\"", "axis = \"L\"").replace("[0.1, 0.2]", "[1.5]");
        assert!(ExperimentConfig::from_toml_str(&frac).is_err());
    }
}
