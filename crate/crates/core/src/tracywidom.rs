//! Tracy-Widom (β = 1) distribution and the Gaussian spectral-norm model.
//!
//! `F₁` comes from an embedded table of the Fredholm determinant
//! `det(I − K_s)` (see `data/gen_tw1_table.py`) interpolated by a monotone
//! piecewise cubic. Outside the tabulated span the CDF is held at the end
//! values, pinned to at most `1e-12` on the left and to `1 − 1e-12` on the
//! right.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Smallest and largest CDF values reported outside the table.
pub const CDF_CLAMP: f64 = 1e-12;

const TABLE_CSV: &str = include_str!("../data/tw1_table.csv");

#[derive(Debug, Clone)]
pub struct Tw1Table {
    s_grid: Vec<f64>,
    f1_values: Vec<f64>,
    slopes: Vec<f64>,
    source: &'static str,
}

impl Tw1Table {
    fn parse(text: &str) -> Self {
        let mut s_grid = Vec::new();
        let mut f1_values = Vec::new();
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let (s, f) = line.split_once(',').expect("two columns");
            s_grid.push(s.trim().parse().expect("numeric s"));
            f1_values.push(f.trim().parse().expect("numeric F1"));
        }
        let slopes = pchip_slopes(&s_grid, &f1_values);
        Self {
            s_grid,
            f1_values,
            slopes,
            source: "Fredholm determinant det(I - K) with Gauss-Legendre quadrature",
        }
    }

    pub fn s_grid(&self) -> &[f64] {
        &self.s_grid
    }

    pub fn f1_values(&self) -> &[f64] {
        &self.f1_values
    }

    pub fn source(&self) -> &'static str {
        self.source
    }

    fn eval(&self, s: f64) -> f64 {
        let xs = &self.s_grid;
        let ys = &self.f1_values;
        let last = xs.len() - 1;
        if s.is_nan() {
            return f64::NAN;
        }
        if s <= xs[0] {
            return ys[0].min(CDF_CLAMP);
        }
        if s >= xs[last] {
            return ys[last].max(1.0 - CDF_CLAMP);
        }
        let k = xs.partition_point(|&x| x <= s) - 1;
        let h = xs[k + 1] - xs[k];
        let t = (s - xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * ys[k] + h10 * h * self.slopes[k] + h01 * ys[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

/// Fritsch-Carlson derivative estimates for a shape-preserving cubic.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

pub fn table() -> &'static Tw1Table {
    static TABLE: OnceLock<Tw1Table> = OnceLock::new();
    TABLE.get_or_init(|| Tw1Table::parse(TABLE_CSV))
}

pub fn f1_cdf(s: f64) -> f64 {
    table().eval(s)
}

/// Inverse of [`f1_cdf`] by bisection, accurate to `1e-9` in probability.
pub fn f1_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
    }
    let t = table();
    let (lo_p, hi_p) = (t.f1_values[0], t.f1_values[t.f1_values.len() - 1]);
    if p < lo_p || p > hi_p {
        return Err(Error::Domain(format!(
            "probability {p} lies outside the tabulated range [{lo_p:e}, {hi_p}]"
        )));
    }
    let mut lo = t.s_grid[0];
    let mut hi = t.s_grid[t.s_grid.len() - 1];
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if t.eval(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (t.eval(lo), t.eval(hi));
    Ok(if (p - flo).abs() <= (fhi - p).abs() { lo } else { hi })
}

/// Centering `μ_{M,d}` and scaling `σ_{M,d}` of `‖N‖₂²/σ²`.
pub fn centering_constants(m: usize, d: usize) -> (f64, f64) {
    let a = (m as f64 - 0.5).sqrt();
    let b = (d as f64 - 0.5).sqrt();
    let mu = (a + b).powi(2);
    let sigma = (a + b) * (1.0 / a + 1.0 / b).cbrt();
    (mu, sigma)
}

/// Largest singular value of an `M×d` matrix with i.i.d. `N(0, σ²)` entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianNormModel {
    pub m: usize,
    pub d: usize,
    pub sigma: f64,
}

impl GaussianNormModel {
    pub fn new(m: usize, d: usize, sigma: f64) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::Parameter("M and d must be positive".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { m, d, sigma })
    }

    pub fn mu_md(&self) -> f64 {
        centering_constants(self.m, self.d).0
    }

    pub fn sigma_md(&self) -> f64 {
        centering_constants(self.m, self.d).1
    }

    /// Standardized argument `(x²/σ² − μ_{M,d})/σ_{M,d}`.
    pub fn standardize(&self, x: f64) -> f64 {
        let (mu, sd) = centering_constants(self.m, self.d);
        (x * x / (self.sigma * self.sigma) - mu) / sd
    }
}

/// `Pr(‖N‖₂ ≤ x)` under the Tracy-Widom approximation.
pub fn spectral_norm_cdf_tw(x: f64, model: &GaussianNormModel) -> f64 {
    f1_cdf(model.standardize(x.max(0.0)))
}

pub fn spectral_norm_quantile_tw(p: f64, model: &GaussianNormModel) -> Result<f64> {
    let q = f1_quantile(p)?;
    let (mu, sd) = centering_constants(model.m, model.d);
    let radicand = q * sd + mu;
    if radicand <= 0.0 {
        return Err(Error::Domain(format!(
            "quantile undefined for M={}, d={}, p={p}: F1^-1(p)*sigma_md + mu_md = {radicand}",
            model.m, model.d
        )));
    }
    Ok((radicand * model.sigma * model.sigma).sqrt())
}

/// `σ(√ln(1/δ) + √M + √d)`, exceeded by `‖N‖₂` with probability at most δ.
pub fn chernoff_spectral_quantile(delta: f64, m: usize, d: usize, sigma: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let t = (1.0 / delta).ln().sqrt();
    Ok(sigma * (t + (m as f64).sqrt() + (d as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn table_shape() {
        let t = table();
        let s = t.s_grid();
        let f = t.f1_values();
        assert!(s[0] <= -10.0 && *s.last().unwrap() >= 6.0);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        assert!(f.windows(2).all(|w| w[1] > w[0]));
        assert!(f[0] < 1e-6 && *f.last().unwrap() > 1.0 - 1e-6);
        for w in s.windows(2) {
            if w[0] >= -5.0 && w[1] <= 3.0 {
                assert!(w[1] - w[0] <= 0.01 + 1e-12);
            }
        }
    }

    #[test]
    fn tails_and_clamping() {
        assert!(f1_cdf(-10.0) <= 1e-6);
        assert!(f1_cdf(7.0) >= 1.0 - 1e-6);
        assert!(f1_cdf(-50.0) <= CDF_CLAMP);
        assert_eq!(f1_cdf(50.0), 1.0 - CDF_CLAMP);
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let t = table();
        for k in (0..t.s_grid().len()).step_by(97) {
            assert_eq!(f1_cdf(t.s_grid()[k]).to_bits(), t.f1_values()[k].to_bits());
        }
    }

    #[test]
    fn published_quantiles() {
        assert!((f1_cdf(0.9793) - 0.95).abs() < 1e-4);
        assert!((f1_cdf(2.0234) - 0.99).abs() < 1e-4);
        assert!((f1_quantile(0.95).unwrap() - 0.98).abs() < 0.01);
    }

    #[test]
    fn quantile_roundtrip() {
        for s in [-3.0, -1.0, 0.0, 1.0, 2.0] {
            assert!((f1_quantile(f1_cdf(s)).unwrap() - s).abs() <= 1e-6);
        }
        for p in [0.001, 0.05, 0.5, 0.95, 0.999] {
            assert!((f1_cdf(f1_quantile(p).unwrap()) - p).abs() <= 1e-9);
        }
        assert!(f1_quantile(0.0).is_err());
        assert!(f1_quantile(1.0).is_err());
    }

    #[test]
    fn centering_examples() {
        assert_relative_eq!(centering_constants(1, 1).0, 2.0, epsilon = 1e-14);
        let (mu, sd) = centering_constants(100, 4);
        assert!((mu - 140.32).abs() < 0.01, "{mu}");
        assert!((sd - 10.18).abs() < 0.01, "{sd}");
        assert_eq!(centering_constants(7, 3), centering_constants(3, 7));
    }

    #[test]
    fn spectral_quantile_examples() {
        let m = GaussianNormModel::new(100, 4, 1.0).unwrap();
        assert!(spectral_norm_cdf_tw(0.0, &m) < 1e-9);
        assert!(spectral_norm_cdf_tw(1e3, &m) > 1.0 - 1e-9);
        for p in [0.01, 0.5, 0.999] {
            let x = spectral_norm_quantile_tw(p, &m).unwrap();
            assert!((spectral_norm_cdf_tw(x, &m) - p).abs() <= 1e-6);
        }
        let two = GaussianNormModel::new(100, 4, 2.0).unwrap();
        assert_relative_eq!(
            spectral_norm_quantile_tw(0.9, &two).unwrap(),
            2.0 * spectral_norm_quantile_tw(0.9, &m).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn chernoff_examples() {
        assert_relative_eq!(chernoff_spectral_quantile(1.0 - 1e-15, 100, 4, 1.0).unwrap(), 12.0, epsilon = 1e-6);
        let q = chernoff_spectral_quantile(1e-3, 100, 4, 1.0).unwrap();
        assert!((q - 14.628).abs() < 1e-3, "{q}");
        let m = GaussianNormModel::new(100, 4, 1.0).unwrap();
        for delta in [1e-2, 1e-3] {
            let chernoff = chernoff_spectral_quantile(delta, 100, 4, 1.0).unwrap();
            assert!(chernoff > spectral_norm_quantile_tw(1.0 - delta, &m).unwrap());
        }
    }
}
