//! Simultaneous orthogonal matching pursuit.
//!
//! [`somps`] stops after a known number of atoms; [`sompt`] stops once the
//! residual spectral norm falls below a threshold. Each iteration selects the
//! atom whose correlation with the residual has the largest ℓ2 norm and then
//! recomputes the residual by a fresh least-squares projection onto every
//! selected atom.

use crate::coherence::{check_unit_columns, UNIT_NORM_TOLERANCE};
use crate::dictionary::RowSparseSignal;
use crate::error::{Error, Result};
use crate::numerics::{spectral_norm, DenseMatrix, QrFactor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    SparsityReached,
    ThresholdReached,
    MaxIterations,
    Singularity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryTrace {
    /// Atoms in selection order.
    pub selected: Vec<usize>,
    /// `‖R‖₂` before the first iteration and after each one.
    pub residual_spectral_norms: Vec<f64>,
    pub termination: Termination,
}

impl RecoveryTrace {
    pub fn support_set(&self) -> Vec<usize> {
        let mut s = self.selected.clone();
        s.sort_unstable();
        s
    }

    /// Whether the run ended in a state that may count as a recovery.
    pub fn completed(&self) -> bool {
        matches!(
            self.termination,
            Termination::SparsityReached | Termination::ThresholdReached
        )
    }
}

/// Row norms of `ΦᵀR` and the index of the largest (smallest index on ties).
pub fn selection_scores(phi: &DenseMatrix, r: &DenseMatrix) -> Result<(Vec<f64>, usize)> {
    let corr = phi.tmul(r)?;
    let scores: Vec<f64> = (0..corr.rows()).map(|i| corr.row_norm(i)).collect();
    let best = argmax(&scores, |_| true);
    Ok((scores, best.unwrap_or(0)))
}

fn argmax(scores: &[f64], allowed: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if allowed(i) && best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    best
}

enum Stop {
    Sparsity(usize),
    Threshold { tau: f64, max_iter: usize },
}

fn check_inputs(phi: &DenseMatrix, y: &DenseMatrix) -> Result<()> {
    if phi.rows() != y.rows() {
        return Err(Error::Dimension(format!(
            "matrix has {} rows, observations have {}",
            phi.rows(),
            y.rows()
        )));
    }
    if y.is_empty() || phi.is_empty() {
        return Err(Error::Dimension("empty input".into()));
    }
    check_unit_columns(phi, UNIT_NORM_TOLERANCE)
}

fn pursue(phi: &DenseMatrix, y: &DenseMatrix, stop: Stop) -> Result<RecoveryTrace> {
    let cap = match stop {
        Stop::Sparsity(l) => l,
        Stop::Threshold { max_iter, .. } => max_iter,
    };
    let mut selected: Vec<usize> = Vec::with_capacity(cap);
    let mut taken = vec![false; phi.cols()];
    let mut residual = y.clone();
    let mut norms = vec![spectral_norm(y)?];

    loop {
        let current = *norms.last().expect("nonempty");
        match stop {
            Stop::Sparsity(l) if selected.len() == l => {
                return Ok(trace(selected, norms, Termination::SparsityReached));
            }
            Stop::Threshold { tau, .. } if current < tau => {
                return Ok(trace(selected, norms, Termination::ThresholdReached));
            }
            Stop::Threshold { max_iter, .. } if selected.len() == max_iter => {
                return Ok(trace(selected, norms, Termination::MaxIterations));
            }
            _ => {}
        }
        let corr = phi.tmul(&residual)?;
        let scores: Vec<f64> = (0..corr.rows()).map(|i| corr.row_norm(i)).collect();
        let Some(eta) = argmax(&scores, |i| !taken[i]) else {
            return Ok(trace(selected, norms, Termination::MaxIterations));
        };
        selected.push(eta);
        match QrFactor::new(&phi.select_columns(&selected)) {
            Ok(qr) => residual = qr.residual(y)?,
            Err(Error::Singular { .. }) => {
                selected.pop();
                return Ok(trace(selected, norms, Termination::Singularity));
            }
            Err(e) => return Err(e),
        }
        taken[eta] = true;
        norms.push(spectral_norm(&residual)?);
    }
}

fn trace(selected: Vec<usize>, norms: Vec<f64>, termination: Termination) -> RecoveryTrace {
    RecoveryTrace {
        selected,
        residual_spectral_norms: norms,
        termination,
    }
}

/// Runs exactly `l` iterations.
pub fn somps(phi: &DenseMatrix, y: &DenseMatrix, l: usize) -> Result<RecoveryTrace> {
    check_inputs(phi, y)?;
    if l == 0 || l > phi.rows() {
        return Err(Error::Parameter(format!("need 1 <= L <= M, got L={l}, M={}", phi.rows())));
    }
    pursue(phi, y, Stop::Sparsity(l))
}

/// Iterates while `‖R‖₂ ≥ τ`, for at most `max_iter` atoms.
pub fn sompt(phi: &DenseMatrix, y: &DenseMatrix, tau: f64, max_iter: usize) -> Result<RecoveryTrace> {
    check_inputs(phi, y)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Parameter(format!("threshold must be positive, got {tau}")));
    }
    if max_iter == 0 || max_iter > phi.rows() {
        return Err(Error::Parameter(format!(
            "need 1 <= max_iter <= M, got {max_iter} with M={}",
            phi.rows()
        )));
    }
    pursue(phi, y, Stop::Threshold { tau, max_iter })
}

/// Exact support-set equality.
pub fn recovery_success(trace: &RecoveryTrace, truth: &RowSparseSignal) -> bool {
    trace.support_set() == truth.support()
}

/// Quantities used to analyze a single iteration at a correct partial
/// selection. Not part of the recovery path.
pub mod diagnostics {
    use super::*;
    use crate::coherence::{complement, erc_constant};
    use crate::numerics::{min_eig_gram, symmetric_eigenvalues};

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct IterationDiagnostics {
        /// Largest correlation of a support atom with `P⊥ΦC`.
        pub q1: f64,
        /// Largest correlation of an off-support atom with `P⊥ΦC`.
        pub q2: f64,
        /// Largest correlation of any atom with `P⊥N`.
        pub z: f64,
        /// ERC constant of the true support.
        pub g: f64,
    }

    /// Orthogonal projector onto the complement of the span of `Φ_Ω̂`.
    pub fn orthogonal_projector(phi: &DenseMatrix, omega_hat: &[usize]) -> Result<DenseMatrix> {
        let eye = DenseMatrix::identity(phi.rows());
        if omega_hat.is_empty() {
            return Ok(eye);
        }
        QrFactor::new(&phi.select_columns(omega_hat))?.residual(&eye)
    }

    fn check_partial(truth: &RowSparseSignal, omega_hat: &[usize]) -> Result<()> {
        if let Some(bad) = omega_hat.iter().find(|i| !truth.support().contains(i)) {
            return Err(Error::Precondition(format!("selected atom {bad} is outside the true support")));
        }
        Ok(())
    }

    fn max_row_norm(phi: &DenseMatrix, cols: &[usize], a: &DenseMatrix) -> Result<f64> {
        if cols.is_empty() {
            return Ok(0.0);
        }
        let corr = phi.select_columns(cols).tmul(a)?;
        Ok((0..corr.rows()).map(|i| corr.row_norm(i)).fold(0.0, f64::max))
    }

    pub fn iteration_diagnostics(
        phi: &DenseMatrix,
        truth: &RowSparseSignal,
        noise: &DenseMatrix,
        omega_hat: &[usize],
    ) -> Result<IterationDiagnostics> {
        check_partial(truth, omega_hat)?;
        let p = orthogonal_projector(phi, omega_hat)?;
        let signal = p.matmul(&truth.measure(phi)?)?;
        let projected_noise = p.matmul(noise)?;
        let omega = truth.support();
        let rest = complement(phi.cols(), omega);
        let all: Vec<usize> = (0..phi.cols()).collect();
        Ok(IterationDiagnostics {
            q1: max_row_norm(phi, omega, &signal)?,
            q2: max_row_norm(phi, &rest, &signal)?,
            z: max_row_norm(phi, &all, &projected_noise)?,
            g: erc_constant(phi, omega)?,
        })
    }

    /// `(λ_min(Φ_ΩᵀΦ_Ω), λ_min(Φ_Rᵀ P⊥ Φ_R))` with `R = Ω \ Ω̂`.
    pub fn eigenvalue_pair(phi: &DenseMatrix, truth: &RowSparseSignal, omega_hat: &[usize]) -> Result<(f64, f64)> {
        check_partial(truth, omega_hat)?;
        let omega = truth.support();
        let full = min_eig_gram(&phi.select_columns(omega))?;
        let remaining: Vec<usize> = omega.iter().copied().filter(|i| !omega_hat.contains(i)).collect();
        if remaining.is_empty() {
            return Err(Error::Precondition("no unselected support atoms remain".into()));
        }
        let p = orthogonal_projector(phi, omega_hat)?;
        let b = phi.select_columns(&remaining);
        let reduced = b.tmul(&p.matmul(&b)?)?;
        Ok((full, symmetric_eigenvalues(&reduced)[0]))
    }

    /// Frobenius norm of the coefficient rows not yet selected.
    pub fn unselected_energy(truth: &RowSparseSignal, omega_hat: &[usize]) -> f64 {
        let mut total = 0.0;
        for (r, i) in truth.support().iter().enumerate() {
            if !omega_hat.contains(i) {
                total += truth.coeffs().row_norm(r).powi(2);
            }
        }
        total.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{gaussian_matrix, gen_signal};

    #[test]
    fn scores_of_zero_residual() {
        let phi = DenseMatrix::identity(4);
        let (s, best) = selection_scores(&phi, &DenseMatrix::zeros(4, 2)).unwrap();
        assert!(s.iter().all(|&v| v == 0.0));
        assert_eq!(best, 0);
    }

    #[test]
    fn scores_pick_energetic_row() {
        let phi = DenseMatrix::identity(5);
        let r = DenseMatrix::from_fn(5, 3, |i, _| if i == 3 { 1.0 } else { 0.0 });
        assert_eq!(selection_scores(&phi, &r).unwrap().1, 3);
    }

    #[test]
    fn scores_match_double_loop() {
        let phi = gaussian_matrix(12, 30, 2).unwrap();
        let r = DenseMatrix::from_fn(12, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let (s, _) = selection_scores(phi.matrix(), &r).unwrap();
        for (k, &score) in s.iter().enumerate() {
            let mut acc = 0.0;
            for j in 0..3 {
                let mut dot = 0.0;
                for i in 0..12 {
                    dot += phi.matrix()[(i, k)] * r[(i, j)];
                }
                acc += dot * dot;
            }
            assert!((score - acc.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_dictionary_recovers_exactly() {
        let phi = DenseMatrix::identity(8);
        let c = gen_signal(8, 3, 2, 1.0, 11).unwrap();
        let y = c.measure(&phi).unwrap();
        let t = somps(&phi, &y, 3).unwrap();
        assert!(recovery_success(&t, &c));
        assert_eq!(t.termination, Termination::SparsityReached);
    }

    #[test]
    fn sompt_stops_immediately_below_threshold() {
        let phi = DenseMatrix::identity(4);
        let y = DenseMatrix::from_fn(4, 1, |i, _| if i == 0 { 0.1 } else { 0.0 });
        let t = sompt(&phi, &y, 1.0, 4).unwrap();
        assert!(t.selected.is_empty());
        assert_eq!(t.termination, Termination::ThresholdReached);
        assert_eq!(t.residual_spectral_norms.len(), 1);
    }

    #[test]
    fn sompt_hits_iteration_cap() {
        let phi = DenseMatrix::identity(4);
        let y = DenseMatrix::from_fn(4, 1, |_, _| 1.0);
        let t = sompt(&phi, &y, 0.5, 2).unwrap();
        assert_eq!(t.termination, Termination::MaxIterations);
        assert_eq!(t.selected, vec![0, 1]);
    }

    #[test]
    fn success_is_set_equality() {
        let c = RowSparseSignal::new(5, vec![1, 2, 3], DenseMatrix::from_fn(3, 1, |_, _| 1.0)).unwrap();
        let t = RecoveryTrace {
            selected: vec![3, 1, 2],
            residual_spectral_norms: vec![],
            termination: Termination::SparsityReached,
        };
        assert!(recovery_success(&t, &c));
        let t = RecoveryTrace {
            selected: vec![1, 2, 3, 4],
            ..t
        };
        assert!(!recovery_success(&t, &c));
        let empty = RowSparseSignal::new(5, vec![], DenseMatrix::zeros(0, 1)).unwrap();
        let t = RecoveryTrace {
            selected: vec![],
            ..t
        };
        assert!(recovery_success(&t, &empty));
    }

    #[test]
    fn duplicate_columns_end_in_singularity() {
        // columns 0 and 2 identical
        let phi = DenseMatrix::new(3, 3, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let y = DenseMatrix::from_fn(3, 1, |i, _| if i == 0 { 1.0 } else { 0.5 });
        let t = somps(&phi, &y, 3).unwrap();
        assert_eq!(t.termination, Termination::Singularity);
        assert_eq!(t.selected, vec![0, 1]);
    }

    #[test]
    fn full_selection_diagnostics_vanish() {
        let phi = gaussian_matrix(20, 40, 3).unwrap();
        let c = gen_signal(40, 3, 2, 1.0, 5).unwrap();
        let zero = DenseMatrix::zeros(20, 2);
        let d = diagnostics::iteration_diagnostics(phi.matrix(), &c, &zero, c.support()).unwrap();
        assert!(d.q1 < 1e-12 && d.q2 < 1e-12);
        assert_eq!(d.z, 0.0);
        let outside = (0..40).find(|i| !c.support().contains(i)).unwrap();
        assert!(matches!(
            diagnostics::iteration_diagnostics(phi.matrix(), &c, &zero, &[outside]),
            Err(Error::Precondition(_))
        ));
    }
}
