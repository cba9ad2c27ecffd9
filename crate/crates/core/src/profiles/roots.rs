//! Unit-modulus root configurations and the algebra tied to them.
//!
//! The N+1 peak directions sit at angles β_l = 2πl/(N+1). Two facts about
//! them get used repeatedly: the logarithmic interaction of one root with all
//! others collapses to log(N+1), and near one peak the influence of the other
//! peaks plus the domain's Green regular part is a harmonic function pinned
//! to zero at that peak.

use num_complex::Complex64;

/// The N+1 unit-circle directions β_l = 2πl/(N+1).
#[derive(Debug, Clone, PartialEq)]
pub struct RootConfiguration {
    pub n: u32,
    pub beta: Vec<f64>,
}

impl RootConfiguration {
    pub fn new(n: u32) -> Self {
        let np1 = n as usize + 1;
        let beta = (0..np1)
            .map(|l| std::f64::consts::TAU * l as f64 / np1 as f64)
            .collect();
        Self { n, beta }
    }

    /// The points Q_l = e^{iβ_l}.
    pub fn points(&self) -> Vec<Complex64> {
        self.beta.iter().map(|&b| Complex64::from_polar(1.0, b)).collect()
    }
}

/// Σ_{l≠m} log|Q_m − Q_l| for the (N+1)-st roots of unity, computed as the
/// direct sum with m = 0. Independent of m by symmetry; the closed value is
/// log(N+1).
pub fn roots_log_identity(n: u32) -> f64 {
    assert!(n >= 1, "the interaction sum needs at least two roots, got N = {n}");
    roots_log_sum(&RootConfiguration::new(n), 0)
}

/// The same sum anchored at an arbitrary root index.
pub fn roots_log_sum(config: &RootConfiguration, m: usize) -> f64 {
    let q = config.points();
    let mut terms: Vec<f64> = (0..q.len())
        .filter(|&l| l != m)
        .map(|l| (q[m] - q[l]).norm().ln())
        .collect();
    // Fixed summation order keeps the value bit-stable across calls.
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    terms.iter().sum()
}

/// Evaluation failure for the local harmonic part.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootsError {
    #[error("evaluation point coincides with the singular node Q_{0}")]
    AtSingularNode(usize),
    #[error("peak index {0} out of range for {1} peaks")]
    BadIndex(usize, usize),
}

/// The harmonic function
///
///   φ_m(y) = Σ_{l≠m} (-4)·log(|y-Q_l|/|Q_m-Q_l|)
///          + 8π·Σ_l (reg(y, Q_l) - reg(Q_m, Q_l))
///
/// where `regular_part(y, η)` is the Green regular part of the ambient disk.
/// Vanishes at Q_m; harmonic in y away from the other peaks.
pub fn local_harmonic_part(
    config: &RootConfiguration,
    regular_part: &dyn Fn(Complex64, Complex64) -> f64,
    m: usize,
    y: Complex64,
) -> Result<f64, RootsError> {
    let q = config.points();
    if m >= q.len() {
        return Err(RootsError::BadIndex(m, q.len()));
    }
    let mut value = 0.0;
    for l in 0..q.len() {
        if l != m {
            let d = (y - q[l]).norm();
            if d == 0.0 {
                return Err(RootsError::AtSingularNode(l));
            }
            value += -4.0 * (d / (q[m] - q[l]).norm()).ln();
        }
        value += 8.0 * std::f64::consts::PI * (regular_part(y, q[l]) - regular_part(q[m], q[l]));
    }
    Ok(value)
}
