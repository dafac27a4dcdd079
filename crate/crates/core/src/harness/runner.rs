//! Monte-Carlo sweeps.
//!
//! Trial `k` at flattened grid index `g` draws its signal and noise from
//! `trial_seed(base_seed, g, k)`, so aggregate counts do not depend on how
//! trials are scheduled across threads.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::config::{
    Algorithm, Axis, ExperimentConfig, MatrixSource, NoiseModel, SignalModel, ThresholdRule,
};
use crate::bounds::{
    cmin_threshold_bounded, cmin_threshold_chernoff, cmin_threshold_frobenius, cmin_threshold_gaussian,
    coherence_margin, epsilon_threshold_bounded, min_measurements_bounded, sigma_threshold_chernoff,
    sigma_threshold_gaussian, sompt_threshold, QuantileMethod,
};
use crate::dictionary::{
    design_low_coherence, gaussian_matrix, gen_signal, gen_signal_dynamic_range, sample_noise, DesignParams,
    MeasurementMatrix, NoiseKind, NoiseSpec, RowSparseSignal,
};
use crate::error::{Error, Result};
use crate::numerics::{frobenius_norm, DenseMatrix};
use crate::rng::trial_seed;
use crate::somp::{recovery_success, somps, sompt};

/// Two-sided 95% normal quantile.
const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Largest `d` or `L` searched when locating an integer-axis threshold.
const INTEGER_SEARCH_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub method: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub value: f64,
    pub trials: u32,
    pub successes: u32,
    pub srp: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    /// Threshold location(s) on the swept axis at this point.
    pub theory: Vec<Overlay>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrpCurve {
    pub algorithm: Algorithm,
    pub axis: Axis,
    /// Row coordinate of a two-axis grid.
    pub outer: Option<(Axis, f64)>,
    pub points: Vec<CurvePoint>,
    /// Direction in which larger axis values make recovery easier.
    pub direction: EdgeDirection,
    /// Success level at which the empirical edge is read.
    pub target: f64,
    pub notes: Vec<String>,
}

impl SrpCurve {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn srp(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.srp).collect()
    }

    /// Every distinct overlay method on the curve.
    pub fn theory_methods(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.points {
            for o in &p.theory {
                if !out.contains(&o.method) {
                    out.push(o.method.clone());
                }
            }
        }
        out
    }

    /// Threshold of `method`, if every point carries the same value.
    pub fn theory(&self, method: &str) -> Option<f64> {
        let mut vals = self
            .points
            .iter()
            .filter_map(|p| p.theory.iter().find(|o| o.method == method).map(|o| o.value));
        let first = vals.next()?;
        vals.all(|v| v == first).then_some(first)
    }

    pub fn edge(&self) -> Option<f64> {
        empirical_guarantee_edge(self, self.target)
    }

    /// Edge read at the resolution of the trial count. A point fails only
    /// when its failure count is significantly above `1 − target`: one-sided
    /// exact binomial test at level 0.05 split over the curve's points.
    /// With target 1 any failure fails the point.
    pub fn resolved_edge(&self) -> Option<f64> {
        let alpha = 0.05 / self.points.len().max(1) as f64;
        let rate = 1.0 - self.target;
        edge_where(self, |p| binomial_upper_tail(p.trials, rate, p.trials - p.successes) >= alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeDirection {
    /// Recovery degrades as the axis grows (noise level, L).
    Lower,
    /// Recovery improves as the axis grows (c_min, M, ratio).
    Upper,
}

pub fn edge_direction(axis: Axis, model: SignalModel) -> EdgeDirection {
    match axis {
        Axis::Epsilon | Axis::Sigma | Axis::Sparsity => EdgeDirection::Lower,
        Axis::CMin | Axis::Measurements | Axis::Ratio => EdgeDirection::Upper,
        Axis::Vectors if model == SignalModel::SqrtD => EdgeDirection::Upper,
        Axis::Vectors => EdgeDirection::Lower,
    }
}

/// Grid value bounding the region where SRP ≥ `target` holds throughout.
///
/// For a lower-direction sweep this is the largest value whose SRP and every
/// smaller value's SRP reach `target`; for an upper-direction sweep, the
/// smallest value from which `target` holds to the grid end. `None` when no
/// such value exists.
pub fn empirical_guarantee_edge(curve: &SrpCurve, target: f64) -> Option<f64> {
    edge_where(curve, |p| p.srp >= target)
}

fn edge_where(curve: &SrpCurve, pass: impl Fn(&CurvePoint) -> bool) -> Option<f64> {
    let ok: Vec<bool> = curve.points.iter().map(pass).collect();
    match curve.direction {
        EdgeDirection::Lower => {
            let run = ok.iter().take_while(|&&b| b).count();
            (run > 0).then(|| curve.points[run - 1].value)
        }
        EdgeDirection::Upper => {
            let run = ok.iter().rev().take_while(|&&b| b).count();
            (run > 0).then(|| curve.points[curve.points.len() - run].value)
        }
    }
}

/// `P(X ≥ k)` for `X ~ Binomial(n, p)`.
pub fn binomial_upper_tail(n: u32, p: f64, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    // ln C(n, i) built up incrementally.
    let mut ln_choose = 0.0;
    let mut below = 0.0;
    for i in 0..k {
        if i > 0 {
            ln_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        below += (ln_choose + i as f64 * lp + (n - i) as f64 * lq).exp();
    }
    (1.0 - below).max(0.0)
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u32, trials: u32) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub curves: Vec<SrpCurve>,
    /// Coherence of every matrix used, keyed by M.
    pub mu: BTreeMap<usize, f64>,
    pub config_hash: u64,
}

/// Parameters of one grid point after applying the sweep coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub m: usize,
    pub n: usize,
    pub l: usize,
    pub d: usize,
    pub c_min: f64,
    pub c_max: f64,
    pub c_m: f64,
    pub model: SignalModel,
    pub noise: NoiseModel,
    pub epsilon: f64,
    pub sigma: f64,
    pub delta: f64,
}

impl PointParams {
    fn resolve(cfg: &ExperimentConfig, n: usize, default_m: usize, coords: &[(Axis, f64)]) -> Self {
        let s = &cfg.signal;
        let mut p = PointParams {
            m: default_m,
            n,
            l: s.sparsity,
            d: s.vectors,
            c_min: s.c_min.unwrap_or(0.0),
            c_max: s.c_max.unwrap_or(0.0),
            c_m: s.c_m.unwrap_or(1.0),
            model: s.model,
            noise: cfg.noise.kind,
            epsilon: cfg.noise.epsilon.unwrap_or(0.0),
            sigma: cfg.noise.sigma.unwrap_or(0.0),
            delta: cfg.delta,
        };
        for &(axis, v) in coords {
            p.set(axis, v);
        }
        p.sync();
        p
    }

    fn set(&mut self, axis: Axis, v: f64) {
        match axis {
            Axis::Epsilon => self.epsilon = v,
            Axis::Sigma => self.sigma = v,
            Axis::CMin => self.c_min = v,
            Axis::Sparsity => self.l = v as usize,
            Axis::Vectors => self.d = v as usize,
            Axis::Measurements => self.m = v as usize,
            Axis::Ratio => self.c_min = v * self.c_max,
        }
    }

    fn sync(&mut self) {
        match self.model {
            SignalModel::SqrtD => {
                self.c_min = (self.d as f64 * self.c_m).sqrt();
                self.c_max = self.c_min;
            }
            SignalModel::EqualNorm => self.c_max = self.c_min,
            SignalModel::DynamicRange => {}
        }
    }

    fn with(&self, axis: Axis, v: f64) -> Self {
        let mut p = *self;
        p.set(axis, v);
        p.sync();
        p
    }

    fn noise_spec(&self) -> Result<Option<NoiseSpec>> {
        let kind = match self.noise {
            NoiseModel::Bounded => NoiseKind::SpectralBounded { epsilon: self.epsilon },
            NoiseModel::Gaussian => NoiseKind::Gaussian { sigma: self.sigma },
            NoiseModel::None => return Ok(None),
        };
        NoiseSpec::new(kind, self.m, self.d).map(Some)
    }

    fn check(&self) -> Result<()> {
        if self.l > self.m {
            return Err(Error::Config(format!("L={} exceeds M={}", self.l, self.m)));
        }
        if self.l > self.n {
            return Err(Error::Config(format!("L={} exceeds N={}", self.l, self.n)));
        }
        Ok(())
    }
}

/// Guarantee methods applicable to a noise model.
fn methods(noise: NoiseModel) -> &'static [&'static str] {
    match noise {
        NoiseModel::Bounded => &["l2"],
        NoiseModel::Gaussian => &["tracy-widom", "chernoff"],
        NoiseModel::None => &["noiseless"],
    }
}

/// Whether `method` guarantees recovery at `p` with coherence `mu`.
fn guaranteed(method: &str, p: &PointParams, mu: f64) -> bool {
    let above = |t: Result<f64>| t.is_ok_and(|t| p.c_min > t);
    match method {
        "l2" => above(cmin_threshold_bounded(p.epsilon, p.l, mu)),
        "tracy-widom" => above(cmin_threshold_gaussian(p.delta, p.sigma, p.m, p.d, p.l, mu)),
        "chernoff" => above(cmin_threshold_chernoff(p.delta, p.sigma, p.m, p.d, p.l, mu)),
        "noiseless" => coherence_margin(p.l, mu).is_ok(),
        _ => false,
    }
}

fn cmin_threshold(method: &str, p: &PointParams, mu: f64) -> Result<f64> {
    match method {
        "l2" => cmin_threshold_bounded(p.epsilon, p.l, mu),
        "tracy-widom" => cmin_threshold_gaussian(p.delta, p.sigma, p.m, p.d, p.l, mu),
        "chernoff" => cmin_threshold_chernoff(p.delta, p.sigma, p.m, p.d, p.l, mu),
        _ => coherence_margin(p.l, mu).map(|_| 0.0),
    }
}

/// Integer threshold on `axis`: the largest value up to which `holds` is
/// true throughout (lower direction) or the smallest value from which it is
/// true (upper direction), searched over `1..=limit`.
fn integer_threshold(direction: EdgeDirection, limit: usize, holds: impl Fn(usize) -> bool) -> Option<usize> {
    match direction {
        EdgeDirection::Lower => {
            let run = (1..=limit).take_while(|&k| holds(k)).count();
            (run > 0).then_some(run)
        }
        EdgeDirection::Upper => (1..=limit).find(|&k| holds(k)),
    }
}

/// Theory overlays for a curve along `axis` through `p`.
fn overlays(
    axis: Axis,
    p: &PointParams,
    mu: f64,
    mus: &BTreeMap<usize, f64>,
    max_frobenius: f64,
) -> (Vec<Overlay>, Vec<String>) {
    let mut out = Vec::new();
    let mut notes = Vec::new();
    let mut push = |method: &str, value: Result<f64>| match value {
        Ok(v) if v.is_finite() => out.push(Overlay {
            method: method.to_string(),
            value: v,
        }),
        Ok(_) => {}
        Err(e) => notes.push(format!("{method}: {e}")),
    };
    let direction = edge_direction(axis, p.model);
    match axis {
        Axis::Epsilon => push("l2", epsilon_threshold_bounded(p.c_min, p.l, mu)),
        Axis::Sigma => {
            push("tracy-widom", sigma_threshold_gaussian(p.delta, p.c_min, p.m, p.d, p.l, mu));
            push("chernoff", sigma_threshold_chernoff(p.delta, p.c_min, p.m, p.d, p.l, mu));
        }
        Axis::CMin | Axis::Ratio => {
            let scale = if axis == Axis::Ratio { p.c_max } else { 1.0 };
            for &m in methods(p.noise) {
                push(m, cmin_threshold(m, p, mu).map(|t| t / scale));
            }
            if p.noise == NoiseModel::Bounded && max_frobenius > 0.0 {
                push("frobenius", cmin_threshold_frobenius(max_frobenius, p.l, mu).map(|t| t / scale));
            }
        }
        Axis::Sparsity | Axis::Vectors => {
            for &m in methods(p.noise) {
                let limit = if axis == Axis::Sparsity { p.m.min(p.n) } else { INTEGER_SEARCH_LIMIT };
                let hit = integer_threshold(direction, limit, |k| guaranteed(m, &p.with(axis, k as f64), mu));
                match hit {
                    Some(k) => push(m, Ok(k as f64)),
                    None => push(m, Err(Error::Infeasible(format!("no {} in 1..={limit} is guaranteed", axis.label())))),
                }
            }
        }
        Axis::Measurements => {
            for &m in methods(p.noise) {
                let ok: Vec<(usize, bool)> = mus
                    .iter()
                    .map(|(&mm, &mu_m)| (mm, guaranteed(m, &p.with(axis, mm as f64), mu_m)))
                    .collect();
                let run = ok.iter().rev().take_while(|(_, b)| *b).count();
                if run > 0 {
                    push(m, Ok(ok[ok.len() - run].0 as f64));
                } else {
                    push(m, Err(Error::Infeasible("no grid M is guaranteed".into())));
                }
            }
            if p.noise == NoiseModel::Bounded {
                push("welch", min_measurements_bounded(p.n, p.l, p.c_min, p.epsilon).map(|m| m as f64));
            }
        }
    }
    (out, notes)
}

/// Matrices shared across runs in this process.
fn matrix_cache() -> &'static Mutex<HashMap<String, Arc<MeasurementMatrix>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<MeasurementMatrix>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn build_matrix(cfg: &ExperimentConfig, m: usize) -> Result<Arc<MeasurementMatrix>> {
    let mc = &cfg.matrix;
    let key = match mc.source {
        MatrixSource::Designed => format!("designed:{m}:{:?}:{}:{:?}", mc.n, mc.seed, mc.iters),
        MatrixSource::Gaussian => format!("gaussian:{m}:{:?}:{}", mc.n, mc.seed),
        MatrixSource::File => {
            let path = mc.path.as_ref().expect("validated");
            return Ok(Arc::new(MeasurementMatrix::load(path)?));
        }
    };
    if let Some(hit) = matrix_cache().lock().expect("cache lock").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let n = mc.n.expect("validated");
    let built = match mc.source {
        MatrixSource::Designed => {
            let mut params = DesignParams::default();
            if let Some(iters) = mc.iters {
                params.iters = iters;
            }
            design_low_coherence(m, n, &params, mc.seed)?
        }
        _ => gaussian_matrix(m, n, mc.seed)?,
    };
    let built = Arc::new(built);
    matrix_cache()
        .lock()
        .expect("cache lock")
        .insert(key, Arc::clone(&built));
    Ok(built)
}

struct TrialOutcome {
    success: Vec<bool>,
    noise_frobenius: f64,
}

fn draw_signal(p: &PointParams, seed: u64) -> Result<RowSparseSignal> {
    match p.model {
        SignalModel::DynamicRange => gen_signal_dynamic_range(p.n, p.l, p.d, p.c_min, p.c_max, seed),
        _ => gen_signal(p.n, p.l, p.d, p.c_min, seed),
    }
}

fn run_trial(
    phi: &DenseMatrix,
    p: &PointParams,
    algorithms: &[Algorithm],
    tau: Option<f64>,
    max_iter: usize,
    seed: u64,
) -> Result<TrialOutcome> {
    let signal = draw_signal(p, seed)?;
    let clean = signal.measure(phi)?;
    let (y, noise_frobenius) = match p.noise_spec()? {
        Some(spec) => {
            let noise = sample_noise(&spec, seed);
            (clean.add(&noise)?, frobenius_norm(&noise)?)
        }
        None => (clean, 0.0),
    };
    let mut success = Vec::with_capacity(algorithms.len());
    for alg in algorithms {
        let trace = match alg {
            Algorithm::Somps => somps(phi, &y, p.l)?,
            Algorithm::Sompt => sompt(phi, &y, tau.expect("threshold resolved"), max_iter)?,
        };
        success.push(trace.completed() && recovery_success(&trace, &signal));
    }
    Ok(TrialOutcome {
        success,
        noise_frobenius,
    })
}

fn sompt_tau(cfg: &ExperimentConfig, p: &PointParams) -> Result<f64> {
    let spec = p.noise_spec()?;
    match (cfg.threshold_rule(), spec) {
        (ThresholdRule::Explicit, _) => Ok(cfg.sompt.tau.expect("validated")),
        (ThresholdRule::BoundedEpsilon, Some(spec)) => sompt_threshold(&spec, None, QuantileMethod::TracyWidom),
        (ThresholdRule::TwQuantile, Some(spec)) => sompt_threshold(&spec, Some(p.delta), QuantileMethod::TracyWidom),
        (ThresholdRule::ChernoffQuantile, Some(spec)) => sompt_threshold(&spec, Some(p.delta), QuantileMethod::Chernoff),
        (rule, None) => Err(Error::Config(format!("threshold rule {rule:?} needs noise"))),
    }
}

/// Success level at which guarantees are read: every trial for bounded or
/// absent noise, `1−δ` for Gaussian noise.
pub fn success_target(cfg: &ExperimentConfig) -> f64 {
    match cfg.noise.kind {
        NoiseModel::Gaussian => 1.0 - cfg.delta,
        _ => 1.0,
    }
}

/// Runs every grid point and returns one curve per algorithm (per row of a
/// two-axis grid).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let inner = &cfg.sweep;
    let outer_vals: Vec<Option<f64>> = match &cfg.outer {
        Some(o) => o.values.iter().map(|&v| Some(v)).collect(),
        None => vec![None],
    };
    let outer_axis = cfg.outer.as_ref().map(|o| o.axis);

    let base_m = cfg.matrix.m;
    let m_values: Vec<usize> = match cfg.axes().iter().find(|s| s.axis == Axis::Measurements) {
        Some(s) => s.values.iter().map(|&v| v as usize).collect(),
        None => vec![base_m.unwrap_or(0)],
    };
    let mut matrices: BTreeMap<usize, Arc<MeasurementMatrix>> = BTreeMap::new();
    for &m in &m_values {
        let mat = build_matrix(cfg, m)?;
        matrices.insert(mat.m(), mat);
    }
    let mus: BTreeMap<usize, f64> = matrices.iter().map(|(&m, a)| (m, a.mu())).collect();
    let n = matrices.values().next().expect("nonempty").n();
    let default_m = *matrices.keys().next().expect("nonempty");

    let target = success_target(cfg);
    let mut curves = Vec::new();
    let mut point_index: u32 = 0;
    for ov in &outer_vals {
        let mut per_alg: Vec<Vec<CurvePoint>> = vec![Vec::new(); cfg.algorithms.len()];
        let mut row_params = Vec::new();
        for &v in &inner.values {
            let mut coords = Vec::new();
            if let (Some(axis), Some(o)) = (outer_axis, ov) {
                coords.push((axis, *o));
            }
            coords.push((inner.axis, v));
            let p = PointParams::resolve(cfg, n, default_m, &coords);
            p.check()?;
            let phi = matrices
                .get(&p.m)
                .ok_or_else(|| Error::Config(format!("no matrix with M={}", p.m)))?;
            let tau = if cfg.algorithms.contains(&Algorithm::Sompt) {
                Some(sompt_tau(cfg, &p)?)
            } else {
                None
            };
            let max_iter = cfg.sompt.max_iter.unwrap_or(p.m);
            let g = point_index;
            point_index += 1;
            let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
                .into_par_iter()
                .map(|k| {
                    run_trial(
                        phi.matrix(),
                        &p,
                        &cfg.algorithms,
                        tau,
                        max_iter,
                        trial_seed(cfg.base_seed, g, k),
                    )
                })
                .collect::<Result<_>>()?;
            let point_fro = outcomes.iter().map(|o| o.noise_frobenius).fold(0.0, f64::max);
            for (ai, pts) in per_alg.iter_mut().enumerate() {
                let successes = outcomes.iter().filter(|o| o.success[ai]).count() as u32;
                let (lo, hi) = wilson_interval(successes, cfg.trials);
                pts.push(CurvePoint {
                    value: v,
                    trials: cfg.trials,
                    successes,
                    srp: successes as f64 / cfg.trials as f64,
                    wilson_lo: lo,
                    wilson_hi: hi,
                    theory: Vec::new(),
                });
            }
            row_params.push((p, phi.mu(), point_fro));
        }
        // Overlays depend only on the parameters held fixed along the row,
        // except the Frobenius comparison which uses the per-point maximum.
        let mut notes = Vec::new();
        let direction = edge_direction(inner.axis, cfg.signal.model);
        for (pi, (p, mu, fro)) in row_params.iter().enumerate() {
            let (ov_list, ns) = overlays(inner.axis, p, *mu, &mus, *fro);
            for note in ns {
                if !notes.contains(&note) {
                    notes.push(note);
                }
            }
            for pts in per_alg.iter_mut() {
                pts[pi].theory = ov_list.clone();
            }
        }
        for (ai, pts) in per_alg.into_iter().enumerate() {
            curves.push(SrpCurve {
                algorithm: cfg.algorithms[ai],
                axis: inner.axis,
                outer: outer_axis.zip(*ov),
                points: pts,
                direction,
                target,
                notes: notes.clone(),
            });
        }
    }
    Ok(RunOutput {
        config: cfg.clone(),
        curves,
        mu: mus,
        config_hash: cfg.config_hash(),
    })
}

/// Sample of `‖N‖₂` for `N` with i.i.d. `N(0, σ²)` entries, standardized by
/// the Tracy-Widom centering.
#[derive(Debug, Clone, PartialEq)]
pub struct TwSeries {
    pub d: usize,
    /// Sorted standardized values.
    pub standardized: Vec<f64>,
    /// Sup-norm gap between the empirical CDF and `F₁`.
    pub ks_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwValidation {
    pub m: usize,
    pub sigma: f64,
    pub samples: u32,
    pub base_seed: u64,
    pub series: Vec<TwSeries>,
}

/// Kolmogorov distance between the empirical CDF of sorted `xs` and `cdf`.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).abs().max((f - i as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

pub fn run_tw_validation(m: usize, ds: &[usize], sigma: f64, samples: u32, base_seed: u64) -> Result<TwValidation> {
    use crate::tracywidom::{f1_cdf, GaussianNormModel};
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    let mut series = Vec::new();
    for (gi, &d) in ds.iter().enumerate() {
        let model = GaussianNormModel::new(m, d, sigma)?;
        let spec = NoiseSpec::new(NoiseKind::Gaussian { sigma }, m, d)?;
        let mut xs: Vec<f64> = (0..samples)
            .into_par_iter()
            .map(|k| {
                let noise = sample_noise(&spec, trial_seed(base_seed, gi as u32, k));
                crate::numerics::spectral_norm(&noise).map(|x| model.standardize(x))
            })
            .collect::<Result<_>>()?;
        xs.sort_by(f64::total_cmp);
        let ks = ks_distance(&xs, f1_cdf);
        series.push(TwSeries {
            d,
            standardized: xs,
            ks_distance: ks,
        });
    }
    Ok(TwValidation {
        m,
        sigma,
        samples,
        base_seed,
        series,
    })
}
