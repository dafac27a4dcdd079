//! Mutual coherence, the Welch bound, and the ERC constant.

use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, QrFactor};

/// Unit-norm tolerance accepted by the coherence routines.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-8;

/// Above this many columns coherence is computed by column-pair passes
/// instead of materializing the Gram matrix.
const GRAM_LIMIT: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub mu: f64,
    pub welch_lower_bound: f64,
    pub argmax_pair: (usize, usize),
    pub gram_offdiag_max_abs: f64,
}

pub fn check_unit_columns(phi: &DenseMatrix, tolerance: f64) -> Result<()> {
    for j in 0..phi.cols() {
        let norm = phi.column_norm(j);
        if (norm - 1.0).abs() > tolerance {
            return Err(Error::NotUnitNorm {
                column: j,
                norm,
                tolerance,
            });
        }
    }
    Ok(())
}

/// Scales every column to unit ℓ2 norm.
pub fn renormalize(phi: &DenseMatrix) -> Result<DenseMatrix> {
    let norms: Vec<f64> = (0..phi.cols()).map(|j| phi.column_norm(j)).collect();
    if let Some(column) = norms.iter().position(|&n| n == 0.0) {
        return Err(Error::Singular { column });
    }
    Ok(DenseMatrix::from_fn(phi.rows(), phi.cols(), |i, j| phi[(i, j)] / norms[j]))
}

pub fn welch_bound(m: usize, n: usize) -> Result<f64> {
    if m == 0 || n < 2 || n < m {
        return Err(Error::Domain(format!(
            "Welch bound needs N >= M >= 1 and N >= 2, got M={m}, N={n}"
        )));
    }
    Ok((((n - m) as f64) / ((m * (n - 1)) as f64)).sqrt())
}

pub fn mutual_coherence(phi: &DenseMatrix) -> Result<CoherenceReport> {
    let (m, n) = phi.shape();
    if n < 2 {
        return Err(Error::Dimension("coherence needs at least two columns".into()));
    }
    check_unit_columns(phi, UNIT_NORM_TOLERANCE)?;
    let (mu, pair) = if n <= GRAM_LIMIT {
        max_offdiag_gram(phi)
    } else {
        max_offdiag_pairs(phi)
    };
    // the Welch bound is only defined for N >= M
    let welch = if n >= m { welch_bound(m, n)? } else { 0.0 };
    Ok(CoherenceReport {
        mu,
        welch_lower_bound: welch,
        argmax_pair: pair,
        gram_offdiag_max_abs: mu,
    })
}

fn max_offdiag_gram(phi: &DenseMatrix) -> (f64, (usize, usize)) {
    let g = phi.tmul(phi).expect("shapes agree");
    let n = phi.cols();
    let mut best = (-1.0, (0, 1));
    for i in 0..n {
        let row = g.row(i);
        for (j, v) in row.iter().enumerate().skip(i + 1) {
            if v.abs() > best.0 {
                best = (v.abs(), (i, j));
            }
        }
    }
    best
}

fn max_offdiag_pairs(phi: &DenseMatrix) -> (f64, (usize, usize)) {
    let cols = phi.transpose();
    let n = phi.cols();
    let mut best = (-1.0, (0, 1));
    for i in 0..n {
        let a = cols.row(i);
        for j in (i + 1)..n {
            let v: f64 = a.iter().zip(cols.row(j)).map(|(x, y)| x * y).sum();
            if v.abs() > best.0 {
                best = (v.abs(), (i, j));
            }
        }
    }
    best
}

fn validate_support(n: usize, omega: &[usize]) -> Result<()> {
    if omega.is_empty() {
        return Err(Error::Parameter("support must be nonempty".into()));
    }
    let mut sorted = omega.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Parameter("support has repeated indices".into()));
    }
    if let Some(&bad) = sorted.last().filter(|&&v| v >= n) {
        return Err(Error::Parameter(format!("support index {bad} out of range 0..{n}")));
    }
    Ok(())
}

pub(crate) fn complement(n: usize, omega: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; n];
    for &i in omega {
        inside[i] = true;
    }
    (0..n).filter(|&i| !inside[i]).collect()
}

/// `max_{a ∉ Ω} ‖Φ_Ω† a‖₁`, from a single factorization of `Φ_Ω`.
pub fn erc_constant(phi: &DenseMatrix, omega: &[usize]) -> Result<f64> {
    validate_support(phi.cols(), omega)?;
    let rest = complement(phi.cols(), omega);
    if rest.is_empty() {
        return Ok(0.0);
    }
    let qr = QrFactor::new(&phi.select_columns(omega)).map_err(|e| match e {
        Error::Singular { column } => Error::Singular {
            column: omega[column],
        },
        other => other,
    })?;
    let coeffs = qr.solve(&phi.select_columns(&rest))?;
    let mut best: f64 = 0.0;
    for c in 0..rest.len() {
        let l1: f64 = (0..omega.len()).map(|r| coeffs[(r, c)].abs()).sum();
        best = best.max(l1);
    }
    Ok(best)
}

/// Upper bound `Lμ/(1−(L−1)μ)` on the ERC constant.
pub fn erc_upper_bound(mu: f64, l: usize) -> Result<f64> {
    let denom = 1.0 - (l as f64 - 1.0) * mu;
    if l == 0 || denom <= 0.0 {
        return Err(Error::Domain(format!(
            "ERC bound vacuous for L={l}, mu={mu}: (L-1)mu must be below 1"
        )));
    }
    Ok(l as f64 * mu / denom)
}

/// Gershgorin lower bound `1−(L−1)μ` on `λ_min(Φ_ΩᵀΦ_Ω)`; may be negative.
pub fn gram_min_eig_lower_bound(mu: f64, l: usize) -> f64 {
    1.0 - (l as f64 - 1.0) * mu
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_has_zero_coherence() {
        let r = mutual_coherence(&DenseMatrix::identity(5)).unwrap();
        assert_eq!(r.mu, 0.0);
        assert_eq!(r.argmax_pair, (0, 1));
    }

    #[test]
    fn two_column_example() {
        let s = 0.5f64.sqrt();
        let phi = DenseMatrix::from_rows(&[vec![1.0, s], vec![0.0, s]]).unwrap();
        let r = mutual_coherence(&phi).unwrap();
        assert_relative_eq!(r.mu, s, epsilon = 1e-15);
    }

    #[test]
    fn non_unit_column_is_named() {
        let phi = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(mutual_coherence(&phi), Err(Error::NotUnitNorm { column: 1, .. })));
    }

    #[test]
    fn welch_examples() {
        assert_eq!(welch_bound(100, 100).unwrap(), 0.0);
        assert_eq!(welch_bound(1, 2).unwrap(), 1.0);
        assert_relative_eq!(welch_bound(100, 200).unwrap(), 0.070_888_120_500_833_6, epsilon = 1e-12);
        assert!(welch_bound(3, 2).is_err());
    }

    #[test]
    fn erc_bound_examples() {
        assert_eq!(erc_upper_bound(0.0, 5).unwrap(), 0.0);
        assert_eq!(erc_upper_bound(0.5, 1).unwrap(), 0.5);
        assert_relative_eq!(erc_upper_bound(0.0782, 4).unwrap(), 0.3128 / 0.7654, epsilon = 1e-12);
        assert!(erc_upper_bound(0.5, 3).is_err());
        assert_relative_eq!(gram_min_eig_lower_bound(0.0782, 4), 0.7654, epsilon = 1e-12);
        assert_eq!(gram_min_eig_lower_bound(0.3, 1), 1.0);
    }

    #[test]
    fn erc_of_identity_is_zero() {
        assert_eq!(erc_constant(&DenseMatrix::identity(6), &[1, 4]).unwrap(), 0.0);
    }

    #[test]
    fn pair_pass_matches_gram_pass() {
        let phi = renormalize(&DenseMatrix::from_fn(7, 12, |i, j| ((i * 31 + j * 17) % 11) as f64 - 4.5)).unwrap();
        assert_eq!(max_offdiag_gram(&phi).1, max_offdiag_pairs(&phi).1);
        assert_relative_eq!(max_offdiag_gram(&phi).0, max_offdiag_pairs(&phi).0, epsilon = 1e-14);
    }
}
