//! Closed-form recovery guarantees.
//!
//! Thresholds are boundary values: recovery is guaranteed strictly above a
//! `c_min` threshold and strictly below a noise-level threshold. Every
//! calculator rejects a coherence with `μ ≥ 1/(2L−1)`, where no guarantee
//! exists.

use serde::{Deserialize, Serialize};

use crate::dictionary::{NoiseKind, NoiseSpec};
use crate::error::{Error, Result};
use crate::tracywidom::{
    centering_constants, chernoff_spectral_quantile, f1_cdf, f1_quantile, spectral_norm_quantile_tw,
    GaussianNormModel,
};

/// Caveat attached to every Tracy-Widom based figure.
pub const TW_CAVEAT: &str = "asymptotic: holds up to an O(d^(-2/3)) correction with unknown constants";

/// `1 − (2L−1)μ`, or a feasibility error when it is not positive.
pub fn coherence_margin(l: usize, mu: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::Parameter("sparsity L must be positive".into()));
    }
    if !(0.0..1.0).contains(&mu) {
        return Err(Error::Parameter(format!("coherence must lie in [0, 1), got {mu}")));
    }
    let margin = 1.0 - (2.0 * l as f64 - 1.0) * mu;
    if margin <= 0.0 {
        return Err(Error::Infeasible(format!(
            "mu = {mu} is not below 1/(2L-1) = {} for L = {l}",
            1.0 / (2.0 * l as f64 - 1.0)
        )));
    }
    Ok(margin)
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::Parameter(format!("{name} must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `t = sqrt(ln(1/δ))`.
pub fn chernoff_t(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((1.0 / delta).ln().sqrt())
}

/// `2ε/(1−(2L−1)μ)`; the same threshold serves both stopping rules.
pub fn cmin_threshold_bounded(epsilon: f64, l: usize, mu: f64) -> Result<f64> {
    check_nonneg("epsilon", epsilon)?;
    Ok(2.0 * epsilon / coherence_margin(l, mu)?)
}

/// `C_min(1−(2L−1)μ)/2`.
pub fn epsilon_threshold_bounded(c_min: f64, l: usize, mu: f64) -> Result<f64> {
    check_nonneg("c_min", c_min)?;
    Ok(c_min * coherence_margin(l, mu)? / 2.0)
}

/// The bounded-noise threshold with `‖N‖_F` in place of `‖N‖₂`.
pub fn cmin_threshold_frobenius(noise_frobenius: f64, l: usize, mu: f64) -> Result<f64> {
    check_nonneg("noise Frobenius norm", noise_frobenius)?;
    Ok(2.0 * noise_frobenius / coherence_margin(l, mu)?)
}

fn noise_ratio_margin(c_min: f64, noise_l2: f64) -> Result<f64> {
    check_positive("c_min", c_min)?;
    check_nonneg("noise norm", noise_l2)?;
    let r = 1.0 - 2.0 * noise_l2 / c_min;
    if r <= 0.0 {
        return Err(Error::Infeasible(format!(
            "noise norm {noise_l2} is not below c_min/2 = {}",
            c_min / 2.0
        )));
    }
    Ok(r)
}

/// `(1 − 2‖N‖₂/C_min)/(2L−1)`.
pub fn mu_threshold_bounded(c_min: f64, noise_l2: f64, l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::Parameter("sparsity L must be positive".into()));
    }
    Ok(noise_ratio_margin(c_min, noise_l2)? / (2.0 * l as f64 - 1.0))
}

/// Smallest `M` strictly above `N/(μ*²(N−1)+1)` where `μ*` is
/// [`mu_threshold_bounded`], capped at `N`.
pub fn min_measurements_bounded(n: usize, l: usize, c_min: f64, noise_l2: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::Parameter("N must be at least 2".into()));
    }
    let mu = mu_threshold_bounded(c_min, noise_l2, l)?;
    let rhs = n as f64 / (mu * mu * (n as f64 - 1.0) + 1.0);
    let m = rhs.floor() as usize + 1;
    Ok(m.min(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    TracyWidom,
    Chernoff,
    GenericCdf,
}

impl BoundMethod {
    pub fn label(self) -> &'static str {
        match self {
            BoundMethod::TracyWidom => "tracy-widom",
            BoundMethod::Chernoff => "chernoff",
            BoundMethod::GenericCdf => "generic-cdf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrpBound {
    /// Lower bound on the success probability, clamped to `[0, 1]`.
    pub value: f64,
    pub unclamped: f64,
    pub method: BoundMethod,
    pub caveat: Option<&'static str>,
}

/// `F_N(C_min(1−(2L−1)μ)/2)` for the CDF `F_N` of `‖N‖₂`.
pub fn srp_lower_bound_generic(noise_cdf: impl Fn(f64) -> f64, c_min: f64, l: usize, mu: f64) -> Result<SrpBound> {
    check_nonneg("c_min", c_min)?;
    let raw = noise_cdf(c_min * coherence_margin(l, mu)? / 2.0);
    Ok(SrpBound {
        value: raw.clamp(0.0, 1.0),
        unclamped: raw,
        method: BoundMethod::GenericCdf,
        caveat: None,
    })
}

/// `F₁(((1−(2L−1)μ)²C_min² − 4σ²μ_{M,d})/(4σ²σ_{M,d}))`.
pub fn srp_lower_bound_gaussian(c_min: f64, l: usize, mu: f64, sigma: f64, m: usize, d: usize) -> Result<SrpBound> {
    check_nonneg("c_min", c_min)?;
    check_positive("sigma", sigma)?;
    GaussianNormModel::new(m, d, sigma)?;
    let margin = coherence_margin(l, mu)?;
    let (mu_md, sigma_md) = centering_constants(m, d);
    let s2 = sigma * sigma;
    let arg = ((margin * c_min).powi(2) - 4.0 * s2 * mu_md) / (4.0 * s2 * sigma_md);
    let raw = f1_cdf(arg);
    Ok(SrpBound {
        value: raw.clamp(0.0, 1.0),
        unclamped: raw,
        method: BoundMethod::TracyWidom,
        caveat: Some(TW_CAVEAT),
    })
}

/// `sqrt(F₁⁻¹(1−δ)σ_{M,d} + μ_{M,d})`, the unit-σ Tracy-Widom quantile.
fn unit_tw_quantile(delta: f64, m: usize, d: usize) -> Result<f64> {
    check_delta(delta)?;
    spectral_norm_quantile_tw(1.0 - delta, &GaussianNormModel::new(m, d, 1.0)?)
}

/// `2·sqrt((F₁⁻¹(1−δ)σ_{M,d}+μ_{M,d})σ²)/(1−(2L−1)μ)`.
pub fn cmin_threshold_gaussian(delta: f64, sigma: f64, m: usize, d: usize, l: usize, mu: f64) -> Result<f64> {
    check_nonneg("sigma", sigma)?;
    let margin = coherence_margin(l, mu)?;
    Ok(2.0 * sigma * unit_tw_quantile(delta, m, d)? / margin)
}

/// `C_min(1−(2L−1)μ)/(2·sqrt(F₁⁻¹(1−δ)σ_{M,d}+μ_{M,d}))`.
pub fn sigma_threshold_gaussian(delta: f64, c_min: f64, m: usize, d: usize, l: usize, mu: f64) -> Result<f64> {
    check_nonneg("c_min", c_min)?;
    let margin = coherence_margin(l, mu)?;
    Ok(c_min * margin / (2.0 * unit_tw_quantile(delta, m, d)?))
}

fn chernoff_scale(delta: f64, m: usize, d: usize) -> Result<f64> {
    chernoff_spectral_quantile(delta, m, d, 1.0)
}

/// `(1 − 2(√M+√d+t)σ/C_min)/(2L−1)` with `t = sqrt(ln(1/δ))`.
pub fn mu_threshold_gaussian_chernoff(c_min: f64, sigma: f64, m: usize, d: usize, l: usize, delta: f64) -> Result<f64> {
    check_nonneg("sigma", sigma)?;
    mu_threshold_bounded(c_min, sigma * chernoff_scale(delta, m, d)?, l)
}

/// `2σ(√M+√d+t)/(1−(2L−1)μ)`.
pub fn cmin_threshold_chernoff(delta: f64, sigma: f64, m: usize, d: usize, l: usize, mu: f64) -> Result<f64> {
    check_nonneg("sigma", sigma)?;
    Ok(2.0 * sigma * chernoff_scale(delta, m, d)? / coherence_margin(l, mu)?)
}

/// `C_min(1−(2L−1)μ)/(2(√M+√d+t))`.
pub fn sigma_threshold_chernoff(delta: f64, c_min: f64, m: usize, d: usize, l: usize, mu: f64) -> Result<f64> {
    check_nonneg("c_min", c_min)?;
    Ok(c_min * coherence_margin(l, mu)? / (2.0 * chernoff_scale(delta, m, d)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DThreshold {
    /// `(√M+t)²/(√c_m(1−(2L−1)μ)/(2σ) − 1)²`.
    pub exact: f64,
    /// Small-σ form `4(√M+t)²σ²/((1−(2L−1)μ)²c_m)`.
    pub approx: f64,
}

/// Number of vectors beyond which recovery holds with probability `1−δ`
/// when `C_min² = d·c_m`.
pub fn d_threshold_chernoff(c_m: f64, sigma: f64, m: usize, l: usize, mu: f64, delta: f64) -> Result<DThreshold> {
    check_positive("c_m", c_m)?;
    check_nonneg("sigma", sigma)?;
    let margin = coherence_margin(l, mu)?;
    let t = chernoff_t(delta)?;
    let head = (m as f64).sqrt() + t;
    if sigma == 0.0 {
        return Ok(DThreshold { exact: 0.0, approx: 0.0 });
    }
    let x = c_m.sqrt() * margin / (2.0 * sigma);
    if x <= 1.0 {
        return Err(Error::Infeasible(format!(
            "sqrt(c_m)(1-(2L-1)mu)/(2 sigma) = {x} must exceed 1; no number of vectors suffices"
        )));
    }
    Ok(DThreshold {
        exact: head * head / ((x - 1.0) * (x - 1.0)),
        approx: head * head / (x * x),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantileMethod {
    TracyWidom,
    Chernoff,
}

/// Stopping threshold of the threshold-stopped pursuit: `ε` for bounded
/// noise, a `1−δ` quantile of `‖N‖₂` for Gaussian noise.
pub fn sompt_threshold(spec: &NoiseSpec, delta: Option<f64>, method: QuantileMethod) -> Result<f64> {
    match spec.kind {
        NoiseKind::SpectralBounded { epsilon } => Ok(epsilon),
        NoiseKind::Gaussian { sigma } => {
            let delta = delta.ok_or_else(|| Error::Parameter("Gaussian threshold needs delta".into()))?;
            match method {
                QuantileMethod::TracyWidom => Ok(sigma * unit_tw_quantile(delta, spec.m, spec.d)?),
                QuantileMethod::Chernoff => chernoff_spectral_quantile(delta, spec.m, spec.d, sigma),
            }
        }
    }
}

/// Parameters for a full guarantee report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuaranteeInputs {
    #[serde(rename = "L")]
    pub l: usize,
    pub mu: f64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub c_min: f64,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_cm")]
    pub c_m: f64,
}

fn default_delta() -> f64 {
    1e-3
}

fn default_cm() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportLine {
    pub label: String,
    pub value: std::result::Result<f64, String>,
    pub note: String,
}

/// Every threshold and bound that applies to `inputs`; entries whose
/// preconditions fail carry the error message instead of a value.
pub fn report(inputs: &GuaranteeInputs) -> Vec<ReportLine> {
    let mut out = Vec::new();
    let mut push = |label: &str, value: Result<f64>, note: &str| {
        out.push(ReportLine {
            label: label.to_string(),
            value: value.map_err(|e| e.to_string()),
            note: note.to_string(),
        });
    };
    let GuaranteeInputs {
        l,
        mu,
        m,
        n,
        d,
        c_min,
        delta,
        c_m,
        ..
    } = *inputs;
    push("coherence_margin", coherence_margin(l, mu), "1-(2L-1)mu");
    push("epsilon_threshold_bounded", epsilon_threshold_bounded(c_min, l, mu), "largest ||N||_2 with guaranteed recovery");
    if let Some(eps) = inputs.epsilon {
        push("cmin_threshold_bounded", cmin_threshold_bounded(eps, l, mu), "both stopping rules");
        push("mu_threshold_bounded", mu_threshold_bounded(c_min, eps, l), "with ||N||_2 = epsilon");
        push(
            "min_measurements_bounded",
            min_measurements_bounded(n, l, c_min, eps).map(|v| v as f64),
            "Welch-limited, with ||N||_2 = epsilon",
        );
        push("sompt_tau_bounded", Ok(eps), "tau = epsilon");
    }
    if let Some(sigma) = inputs.sigma {
        push("cmin_threshold_gaussian", cmin_threshold_gaussian(delta, sigma, m, d, l, mu), TW_CAVEAT);
        push("cmin_threshold_chernoff", cmin_threshold_chernoff(delta, sigma, m, d, l, mu), "non-asymptotic");
        push("srp_lower_bound_gaussian", srp_lower_bound_gaussian(c_min, l, mu, sigma, m, d).map(|b| b.value), TW_CAVEAT);
        push(
            "mu_threshold_gaussian_chernoff",
            mu_threshold_gaussian_chernoff(c_min, sigma, m, d, l, delta),
            "non-asymptotic",
        );
        push(
            "d_threshold_chernoff",
            d_threshold_chernoff(c_m, sigma, m, l, mu, delta).map(|t| t.exact),
            "assumes C_min^2 = d c_m",
        );
        push(
            "d_threshold_chernoff_approx",
            d_threshold_chernoff(c_m, sigma, m, l, mu, delta).map(|t| t.approx),
            "small-sigma form",
        );
        if let Ok(spec) = NoiseSpec::new(NoiseKind::Gaussian { sigma }, m, d) {
            push("sompt_tau_tracy_widom", sompt_threshold(&spec, Some(delta), QuantileMethod::TracyWidom), TW_CAVEAT);
            push("sompt_tau_chernoff", sompt_threshold(&spec, Some(delta), QuantileMethod::Chernoff), "non-asymptotic");
        }
    }
    push("sigma_threshold_gaussian", sigma_threshold_gaussian(delta, c_min, m, d, l, mu), TW_CAVEAT);
    push("sigma_threshold_chernoff", sigma_threshold_chernoff(delta, c_min, m, d, l, mu), "non-asymptotic");
    push("f1_quantile", f1_quantile(1.0 - delta), "F1^-1(1-delta)");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const MU: f64 = 0.0782;

    #[test]
    fn bounded_examples() {
        assert_eq!(cmin_threshold_bounded(0.0, 4, MU).unwrap(), 0.0);
        assert_relative_eq!(cmin_threshold_bounded(1.0, 4, MU).unwrap(), 4.418_912_947_414_936, epsilon = 1e-12);
        assert_relative_eq!(epsilon_threshold_bounded(2.0, 4, MU).unwrap(), 0.4526, epsilon = 1e-12);
        assert_eq!(epsilon_threshold_bounded(0.0, 4, MU).unwrap(), 0.0);
        assert!(epsilon_threshold_bounded(2.0, 4, 0.08).unwrap() < epsilon_threshold_bounded(2.0, 4, 0.07).unwrap());
        assert!(matches!(cmin_threshold_bounded(1.0, 4, 1.0 / 7.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn frobenius_examples() {
        let eps = 0.3;
        assert_eq!(
            cmin_threshold_frobenius(eps, 4, MU).unwrap(),
            cmin_threshold_bounded(eps, 4, MU).unwrap()
        );
        // ‖εI₄‖_F = 2‖εI₄‖₂
        assert_relative_eq!(
            cmin_threshold_frobenius(2.0 * eps, 4, MU).unwrap(),
            2.0 * cmin_threshold_bounded(eps, 4, MU).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn mu_threshold_examples() {
        assert_relative_eq!(mu_threshold_bounded(2.0, 0.0, 4).unwrap(), 1.0 / 7.0);
        assert_relative_eq!(mu_threshold_bounded(2.0, 0.4526, 4).unwrap(), MU, epsilon = 1e-12);
        assert!(matches!(mu_threshold_bounded(2.0, 1.0, 4), Err(Error::Infeasible(_))));
    }

    #[test]
    fn min_measurement_examples() {
        // N/((N−1)/49 + 1) = 48.9976 at N = 10⁶
        assert_eq!(min_measurements_bounded(1_000_000, 4, 1.0, 0.0).unwrap(), 49);
        assert_eq!(min_measurements_bounded(200, 1, 1.0, 0.0).unwrap(), 2);
        // 200/(((1 − 0.2)/7)²·199 + 1) = 55.568
        assert_eq!(min_measurements_bounded(200, 4, 10.0, 1.0).unwrap(), 56);
        assert!(min_measurements_bounded(200, 4, 10.0, 1.0).unwrap() > min_measurements_bounded(200, 4, 10.0, 0.0).unwrap());
    }

    #[test]
    fn generic_bound_examples() {
        let step = |eps: f64| move |x: f64| if x >= eps { 1.0 } else { 0.0 };
        assert_eq!(srp_lower_bound_generic(step(0.3), 2.0, 4, MU).unwrap().value, 1.0);
        assert_eq!(srp_lower_bound_generic(|_| 0.0, 2.0, 4, MU).unwrap().value, 0.0);
    }

    #[test]
    fn gaussian_bound_matches_generic_composition() {
        let model = GaussianNormModel::new(100, 4, 0.03).unwrap();
        let generic = srp_lower_bound_generic(|x| crate::tracywidom::spectral_norm_cdf_tw(x, &model), 2.0, 4, MU).unwrap();
        let direct = srp_lower_bound_gaussian(2.0, 4, MU, 0.03, 100, 4).unwrap();
        assert_relative_eq!(generic.value, direct.value, epsilon = 1e-12);
        assert!(srp_lower_bound_gaussian(2.0, 4, MU, 1e-6, 100, 4).unwrap().value > 1.0 - 1e-9);
        assert!(srp_lower_bound_gaussian(0.0, 4, MU, 0.1, 100, 4).unwrap().value < 1e-9);
    }

    #[test]
    fn gaussian_threshold_values() {
        // x = sqrt(F₁⁻¹(0.999)·σ_{100,4} + μ_{100,4}) = 13.177087 with F₁⁻¹(0.999) = 3.272196
        let x = 13.177_086_809_626_49;
        assert_relative_eq!(cmin_threshold_gaussian(1e-3, 0.1, 100, 4, 4, MU).unwrap(), 0.2 * x / 0.4526, epsilon = 1e-5);
        assert_relative_eq!(sigma_threshold_gaussian(1e-3, 2.0, 100, 4, 4, MU).unwrap(), 0.4526 / x, epsilon = 1e-7);
        let a = cmin_threshold_gaussian(1e-2, 0.1, 100, 4, 4, MU).unwrap();
        let b = cmin_threshold_gaussian(1e-1, 0.1, 100, 4, 4, MU).unwrap();
        assert!(b < a);
        let c = sigma_threshold_gaussian(1e-3, 4.0, 100, 4, 4, MU).unwrap();
        assert_relative_eq!(c, 2.0 * sigma_threshold_gaussian(1e-3, 2.0, 100, 4, 4, MU).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn chernoff_values() {
        // (1 − 2·(10 + 2 + sqrt(ln 1000))·0.01/2)/7
        assert_relative_eq!(
            mu_threshold_gaussian_chernoff(2.0, 0.01, 100, 4, 4, 1e-3).unwrap(),
            0.121_959_627_307_316_48,
            epsilon = 1e-12
        );
        assert_relative_eq!(mu_threshold_gaussian_chernoff(2.0, 0.0, 100, 4, 4, 1e-3).unwrap(), 1.0 / 7.0);
        assert!(
            mu_threshold_gaussian_chernoff(2.0, 0.01, 100, 4, 4, 1e-4).unwrap()
                < mu_threshold_gaussian_chernoff(2.0, 0.01, 100, 4, 4, 1e-3).unwrap()
        );
    }

    #[test]
    fn d_threshold_values() {
        let t = d_threshold_chernoff(1.0, 0.1, 100, 4, MU, 1e-3).unwrap();
        assert_relative_eq!(t.exact, 99.972_462_464_197_5, epsilon = 1e-9);
        assert_relative_eq!(t.approx, 31.139_955_150_191_58, epsilon = 1e-9);
        assert!(t.exact >= t.approx);
        let doubled = d_threshold_chernoff(1.0, 0.2, 100, 4, MU, 1e-3).unwrap();
        assert_relative_eq!(doubled.approx, 4.0 * t.approx, epsilon = 1e-9);
        assert!(d_threshold_chernoff(1.0, 1e-9, 100, 4, MU, 1e-3).unwrap().exact < 1e-12);
        assert!(matches!(d_threshold_chernoff(1.0, 1.0, 100, 4, MU, 1e-3), Err(Error::Infeasible(_))));
    }

    #[test]
    fn sompt_thresholds() {
        let bounded = NoiseSpec::new(NoiseKind::SpectralBounded { epsilon: 1.0 }, 100, 4).unwrap();
        assert_eq!(sompt_threshold(&bounded, None, QuantileMethod::TracyWidom).unwrap(), 1.0);
        let gauss = NoiseSpec::new(NoiseKind::Gaussian { sigma: 1.0 }, 100, 4).unwrap();
        assert_relative_eq!(
            sompt_threshold(&gauss, Some(1e-3), QuantileMethod::Chernoff).unwrap(),
            14.628_260_884_878_467,
            epsilon = 1e-12
        );
        let model = GaussianNormModel::new(100, 4, 1.0).unwrap();
        assert_eq!(
            sompt_threshold(&gauss, Some(1e-3), QuantileMethod::TracyWidom).unwrap(),
            spectral_norm_quantile_tw(0.999, &model).unwrap()
        );
        assert!(matches!(
            sompt_threshold(&gauss, None, QuantileMethod::TracyWidom),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn report_flags_infeasible_inputs() {
        let inputs = GuaranteeInputs {
            l: 4,
            mu: 0.2,
            m: 100,
            n: 200,
            d: 4,
            c_min: 2.0,
            sigma: Some(0.1),
            epsilon: Some(0.5),
            delta: 1e-3,
            c_m: 1.0,
        };
        let lines = report(&inputs);
        assert!(lines.iter().find(|l| l.label == "coherence_margin").unwrap().value.is_err());
    }
}
