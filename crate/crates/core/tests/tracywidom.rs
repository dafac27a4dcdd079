mod common;

use sompkit::tracywidom::{f1_cdf, f1_quantile};

/// Mean and variance of TW₁ from published high-precision tabulations.
const TW1_MEAN: f64 = -1.206_533_574_582;
const TW1_VARIANCE: f64 = 1.607_781_034_5;

/// `∫ₐᵇ g` by composite Simpson with `n` (even) panels.
fn simpson(a: f64, b: f64, n: usize, g: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = g(a) + g(b);
    for k in 1..n {
        s += g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn table_moments_match_published_values() {
    // With F(a) ≈ 0 and F(b) ≈ 1: E[s] = b − ∫F, E[s²] = b² − 2∫ s·F.
    let (a, b) = (-10.0, 8.0);
    let n = 36_000;
    let mean = b - simpson(a, b, n, f1_cdf);
    let second = b * b - 2.0 * simpson(a, b, n, |s| s * f1_cdf(s));
    let var = second - mean * mean;
    assert!((mean - TW1_MEAN).abs() < 1e-5, "mean {mean}");
    assert!((var - TW1_VARIANCE).abs() < 1e-4, "variance {var}");
}

#[test]
fn table_agrees_with_fredholm_oracle() {
    let (gap, at) = common::f1_max_gap(-5.0, 3.0, 64);
    assert!(gap <= 1e-4, "gap {gap:e} at {at}");
}

#[test]
fn oracle_reproduces_known_values() {
    let o = common::f1_oracle();
    // Median of TW₁ and the 0.95 quantile, from published tables.
    assert!((o.cdf(-1.268_5) - 0.5).abs() < 2e-4, "{}", o.cdf(-1.2685));
    assert!((o.cdf(0.979_3) - 0.95).abs() < 2e-4, "{}", o.cdf(0.9793));
    assert!((common::airy_ai(0.0) - 0.355_028_053_887_817).abs() < 1e-15);
    assert!((common::airy_ai(1.0) - 0.135_292_416_312_881_47).abs() < 1e-14);
    assert!((common::airy_ai(1.0001) - 0.135_276_502_245_209_7).abs() < 1e-14);
    let ai6 = common::airy_ai(6.0);
    assert!((ai6 - 9.947_694_360_252_9e-6).abs() < 1e-15, "Ai(6) = {ai6:e}");
}

#[test]
fn quantiles_round_trip() {
    assert!(common::quantile_roundtrip_gap() <= 1e-6);
    assert!(f1_quantile(0.0).is_err() || f1_quantile(0.0).unwrap() <= -10.0);
}
