//! Shared test support: an independent Tracy-Widom F₁ oracle and the lemma
//! checks used by both the property suites and the acceptance run.
#![allow(dead_code)]

use std::sync::OnceLock;

use sompkit::coherence::{erc_constant, erc_upper_bound, gram_min_eig_lower_bound, mutual_coherence, welch_bound};
use sompkit::dictionary::{
    design_low_coherence, gaussian_matrix, gen_signal, sample_noise, DesignParams, MeasurementMatrix, NoiseKind,
    NoiseSpec,
};
use sompkit::numerics::{min_eig_gram, DenseMatrix};
use sompkit::somp::diagnostics::{eigenvalue_pair, iteration_diagnostics, unselected_energy};
use sompkit::somp::somps;

// ---------------------------------------------------------------------------
// F₁ oracle: F₁(s) = det(I − K_s) on L²(0, ∞), K_s(x, y) = Ai(s + (x+y)/2)/2,
// by Gauss-Legendre Nyström discretization of a truncated interval.

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = 0.258_819_403_792_806_8;

/// Airy Ai by Maclaurin series for x ≤ 5, asymptotic expansion beyond.
pub fn airy_ai(x: f64) -> f64 {
    if x <= 1.0 {
        let x3 = x * x * x;
        let (mut f, mut g) = (1.0, x);
        let (mut tf, mut tg) = (1.0, x);
        for k in 1..200 {
            let k3 = 3.0 * k as f64;
            tf *= x3 / ((k3 - 1.0) * k3);
            tg *= x3 / (k3 * (k3 + 1.0));
            f += tf;
            g += tg;
            if tf.abs() < 1e-18 * f.abs().max(1e-300) && tg.abs() < 1e-18 * g.abs().max(1e-300) {
                break;
            }
        }
        AI0 * f - AIP0 * g
    } else {
        // Ai(x) = √(x/3)/π · K_{1/3}(ζ), K_ν(ζ) = ∫₀^∞ exp(−ζ cosh t) cosh(νt) dt.
        // Trapezoid on the scaled integrand converges geometrically.
        let zeta = 2.0 / 3.0 * x.powf(1.5);
        let h = 0.02;
        let mut sum = 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            let term = (-zeta * (t.cosh() - 1.0)).exp() * (t / 3.0).cosh();
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
            k += 1;
        }
        (x / 3.0).sqrt() / std::f64::consts::PI * (-zeta).exp() * sum * h
    }
}

/// Gauss-Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(m);
    let mut ws = Vec::with_capacity(m);
    for i in 1..=m {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        xs.push(x);
        ws.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (xs, ws)
}

/// Determinant by LU with partial pivoting; `a` is row-major n×n.
pub fn lu_determinant(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
            .expect("nonempty");
        if a[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let piv = a[c * n + c];
        det *= piv;
        for i in c + 1..n {
            let f = a[i * n + c] / piv;
            if f != 0.0 {
                for j in c..n {
                    a[i * n + j] -= f * a[c * n + j];
                }
            }
        }
    }
    det
}

pub struct F1Oracle {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl F1Oracle {
    pub fn new(m: usize) -> Self {
        let (nodes, weights) = gauss_legendre(m);
        Self { nodes, weights }
    }

    pub fn cdf(&self, s: f64) -> f64 {
        let m = self.nodes.len();
        let span = (2.0 * (14.0 - s)).max(8.0);
        let x: Vec<f64> = self.nodes.iter().map(|t| (t + 1.0) * span / 2.0).collect();
        let sw: Vec<f64> = self.weights.iter().map(|w| (w * span / 2.0).sqrt()).collect();
        let mut a = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v = 0.5 * airy_ai(s + (x[i] + x[j]) / 2.0) * sw[i] * sw[j];
                let e = if i == j { 1.0 - v } else { -v };
                a[i * m + j] = e;
                a[j * m + i] = e;
            }
        }
        lu_determinant(a, m)
    }
}

pub fn f1_oracle() -> &'static F1Oracle {
    static O: OnceLock<F1Oracle> = OnceLock::new();
    O.get_or_init(|| F1Oracle::new(120))
}

/// Largest |table − oracle| over a lattice of `count` points in `[lo, hi]`
/// that is offset from the table grid.
pub fn f1_max_gap(lo: f64, hi: f64, count: usize) -> (f64, f64) {
    let o = f1_oracle();
    let mut worst = (0.0, lo);
    for k in 0..count {
        let s = lo + (hi - lo) * (k as f64 + 0.377) / count as f64;
        let gap = (sompkit::tracywidom::f1_cdf(s) - o.cdf(s)).abs();
        if gap > worst.0 {
            worst = (gap, s);
        }
    }
    worst
}

/// Largest `|F₁(F₁⁻¹(p)) − p|` over a probability lattice.
pub fn quantile_roundtrip_gap() -> f64 {
    let mut worst: f64 = 0.0;
    for k in 1..1000 {
        let p = k as f64 / 1000.0;
        let q = sompkit::tracywidom::f1_quantile(p).expect("inside table");
        worst = worst.max((sompkit::tracywidom::f1_cdf(q) - p).abs());
    }
    for p in [1e-5, 1e-4, 1e-3, 0.999, 0.9999, 0.99999] {
        let q = sompkit::tracywidom::f1_quantile(p).expect("inside table");
        worst = worst.max((sompkit::tracywidom::f1_cdf(q) - p).abs());
    }
    worst
}

// ---------------------------------------------------------------------------
// Lemma instances.

/// The designed 100×200 matrix, built once per test binary.
pub fn designed_100x200() -> &'static MeasurementMatrix {
    static PHI: OnceLock<MeasurementMatrix> = OnceLock::new();
    PHI.get_or_init(|| design_low_coherence(100, 200, &DesignParams::default(), 0).expect("design"))
}

#[derive(Debug, Default, Clone, Copy)]
pub struct LemmaCounts {
    pub instances: usize,
    pub erc: usize,
    pub eigen_order: usize,
    pub q_ratio: usize,
    pub q1_lower: usize,
    pub gershgorin: usize,
    pub welch: usize,
    pub proposition: usize,
    /// Instances where the Proposition 1 premise held at some iteration.
    pub proposition_checked: usize,
}

impl LemmaCounts {
    pub fn violations(&self) -> usize {
        self.erc + self.eigen_order + self.q_ratio + self.q1_lower + self.gershgorin + self.welch + self.proposition
    }
}

const SLACK: f64 = 1e-9;

/// Checks every lemma on one instance and adds violations to `c`.
///
/// `phi` is the matrix, `seed` drives the signal and noise, `l` the sparsity,
/// `d` the number of vectors and `sigma` the relative noise level.
pub fn check_instance(c: &mut LemmaCounts, phi: &MeasurementMatrix, seed: u64, l: usize, d: usize, sigma: f64) {
    let a = phi.matrix();
    let (m, n) = (phi.m(), phi.n());
    let mu = phi.mu();
    let truth = gen_signal(n, l, d, 1.0, seed).expect("signal");
    let omega = truth.support().to_vec();
    c.instances += 1;

    if mu < 1.0 / (l as f64 - 1.0).max(1e-300) || l == 1 {
        if let Ok(bound) = erc_upper_bound(mu, l) {
            if erc_constant(a, &omega).expect("erc") > bound + SLACK {
                c.erc += 1;
            }
        }
    }
    let lam = min_eig_gram(&a.select_columns(&omega)).expect("eig");
    if lam < gram_min_eig_lower_bound(mu, l) - SLACK {
        c.gershgorin += 1;
    }
    if welch_bound(m, n).expect("welch") > mutual_coherence(a).expect("mu").mu + SLACK {
        c.welch += 1;
    }

    let noise = if sigma > 0.0 {
        sample_noise(&NoiseSpec::new(NoiseKind::Gaussian { sigma }, m, d).expect("spec"), seed)
    } else {
        DenseMatrix::zeros(m, d)
    };
    // Correct partial selections: every prefix of the support in a seeded
    // order.
    let mut order = omega.clone();
    order.rotate_left((seed % l as u64) as usize);
    for k in 0..l {
        let hat = &order[..k];
        let diag = iteration_diagnostics(a, &truth, &noise, hat).expect("diagnostics");
        if diag.q2 > diag.g * diag.q1 + SLACK {
            c.q_ratio += 1;
        }
        let lower = ((l - k) as f64).powf(-0.5) * (1.0 - (l as f64 - 1.0) * mu) * unselected_energy(&truth, hat);
        if diag.q1 < lower - SLACK {
            c.q1_lower += 1;
        }
        let (full, reduced) = eigenvalue_pair(a, &truth, hat).expect("eigenvalues");
        if reduced < full - SLACK {
            c.eigen_order += 1;
        }
    }

    // Proposition 1 along the actual pursuit path.
    if mu < 1.0 / (2.0 * l as f64 - 1.0) {
        let y = truth.measure(a).expect("measure").add(&noise).expect("add");
        let trace = somps(a, &y, l).expect("somps");
        let factor = 2.0 * (1.0 - (l as f64 - 1.0) * mu) / (1.0 - (2.0 * l as f64 - 1.0) * mu);
        let mut checked = false;
        for k in 0..trace.selected.len() {
            let hat = &trace.selected[..k];
            if hat.iter().any(|i| !omega.contains(i)) {
                break;
            }
            let diag = iteration_diagnostics(a, &truth, &noise, hat).expect("diagnostics");
            if diag.q1 > factor * diag.z {
                checked = true;
                if !omega.contains(&trace.selected[k]) {
                    c.proposition += 1;
                }
            }
        }
        if checked {
            c.proposition_checked += 1;
        }
    }
}

/// Runs `count` seeded instances: designed 100×200 matrix for even seeds,
/// small Gaussian matrices for odd seeds.
pub fn lemma_suite(count: usize) -> LemmaCounts {
    let mut c = LemmaCounts::default();
    for k in 0..count as u64 {
        let l = 1 + (k as usize / 2) % 6;
        let d = 1 + (k as usize / 3) % 4;
        let sigma = [0.0, 0.02, 0.05, 0.1][(k % 4) as usize];
        if k % 2 == 0 {
            check_instance(&mut c, designed_100x200(), 1000 + k, l, d, sigma);
        } else {
            let m = 20 + (k as usize * 7) % 30;
            let phi = gaussian_matrix(m, m + 10 + (k as usize * 13) % 40, 5000 + k).expect("matrix");
            check_instance(&mut c, &phi, 1000 + k, l.min(m / 2), d, sigma);
        }
    }
    c
}
