//! Dirichlet Green's function of a disk and the harmonic machinery around it.
//!
//! On B_R the Green's function splits as
//!
//!   G(y, η) = -(1/2π)·log|y - η| + (1/2π)·log((|η|/R)·|R²η/|η|² - y|),
//!
//! the second term being the regular part built from the reflected point
//! R²η/|η|². G vanishes for |y| = R, is symmetric, and G(·, 0) has the
//! removable limit (1/2π)·log(R/|y|). Harmonic extensions of boundary data
//! go through the angular Fourier series with per-mode radial factors
//! (r/R)^m, so they are spectrally accurate and undersampling is detectable
//! from the trailing coefficient band.

use num_complex::Complex64;
use rustfft::{num_complex::Complex as FftComplex, FftPlanner};

use crate::quad::{integrate_polar_patch, QuadResult, QuadTol};

/// Which part of the Green's function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenPart {
    Full,
    Regular,
}

/// The disk B_R with its Dirichlet Green's function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensDisk {
    pub radius: f64,
}

/// Failures of Green/extension evaluations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GreenError {
    #[error("evaluation point and source coincide at ({0:.6}, {1:.6})")]
    CoincidentPoints(f64, f64),
    #[error("point lies outside the disk: |y| = {0:.6} > R = {1:.6}")]
    OutsideDisk(f64, f64),
    #[error("source point must be interior: |eta| = {0:.6} ≥ R = {1:.6}")]
    SourceOutside(f64, f64),
    #[error("boundary trace needs an even sample count ≥ 16, got {0}")]
    BadTraceLength(usize),
    #[error("boundary trace contains a non-finite sample at index {0}")]
    NonFiniteTrace(usize),
    #[error(
        "boundary trace is undersampled: trailing Fourier band holds {0:.2e} of the oscillation"
    )]
    Aliased(f64),
}

impl GreensDisk {
    pub fn new(radius: f64) -> Self {
        assert!(radius > 0.0 && radius.is_finite(), "disk radius must be positive, got {radius}");
        Self { radius }
    }

    fn check_points(&self, y: Complex64, eta: Complex64) -> Result<(), GreenError> {
        if y.norm() > self.radius * (1.0 + 1e-12) {
            return Err(GreenError::OutsideDisk(y.norm(), self.radius));
        }
        if eta.norm() >= self.radius {
            return Err(GreenError::SourceOutside(eta.norm(), self.radius));
        }
        Ok(())
    }

    /// G(y, η) or its regular part.
    pub fn value(&self, y: Complex64, eta: Complex64, part: GreenPart) -> Result<f64, GreenError> {
        self.check_points(y, eta)?;
        let r = self.radius;
        // (|η|/R)·|R²η/|η|² - y| = |R²·η̂ - y|η||/R with η̂ the unit direction,
        // which has the finite limit R as η → 0.
        let regular = if eta.norm_sqr() == 0.0 {
            r.ln() / std::f64::consts::TAU
        } else {
            let scaled = eta / r * (r * r / eta.norm_sqr());
            ((eta.norm() / r) * (scaled * r - y).norm()).ln() / std::f64::consts::TAU
        };
        match part {
            GreenPart::Regular => Ok(regular),
            GreenPart::Full => {
                let d = (y - eta).norm();
                if d == 0.0 {
                    return Err(GreenError::CoincidentPoints(y.re, y.im));
                }
                Ok(-d.ln() / std::f64::consts::TAU + regular)
            }
        }
    }

    /// ∇_y G(y, η) as a complex vector (∂_1 G) + i (∂_2 G).
    pub fn gradient(&self, y: Complex64, eta: Complex64) -> Result<Complex64, GreenError> {
        self.check_points(y, eta)?;
        let d = y - eta;
        if d.norm_sqr() == 0.0 {
            return Err(GreenError::CoincidentPoints(y.re, y.im));
        }
        // ∇ log|y - a| = (y - a)/|y - a|², written complex as 1/conj(y - a).
        let mut grad = -Complex64::new(1.0, 0.0) / d.conj();
        if eta.norm_sqr() > 0.0 {
            let reflected = eta * (self.radius * self.radius / eta.norm_sqr());
            let dr = y - reflected;
            grad += Complex64::new(1.0, 0.0) / dr.conj();
        }
        Ok(grad / std::f64::consts::TAU)
    }
}

/// Samples of a boundary function at the equispaced angles 2πj/M, with M
/// even. The Fourier side is computed once at construction.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    values: Vec<f64>,
    /// Forward DFT of the samples (unnormalized, negative-exponent kernel).
    modes: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn new(values: Vec<f64>) -> Result<Self, GreenError> {
        let m = values.len();
        if m < 16 || m % 2 != 0 {
            return Err(GreenError::BadTraceLength(m));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(GreenError::NonFiniteTrace(bad));
        }
        let mut buf: Vec<FftComplex<f64>> =
            values.iter().map(|&v| FftComplex::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let modes = buf.into_iter().map(|c| Complex64::new(c.re, c.im)).collect();
        Ok(Self { values, modes })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self, GreenError> {
        let values = (0..m).map(|j| f(std::f64::consts::TAU * j as f64 / m as f64)).collect();
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mean over the circle (exact for the trapezoid rule on periodic data).
    pub fn mean(&self) -> f64 {
        self.modes[0].re / self.len() as f64
    }

    /// Fraction of the oscillation energy carried by the top half of the
    /// resolvable modes. Near 0 for well-resolved data; O(1) under aliasing.
    pub fn trailing_energy_ratio(&self) -> f64 {
        let m = self.len();
        let half = m / 2;
        let energy = |k: usize| self.modes[k].norm_sqr();
        let mut total = 0.0;
        let mut trailing = 0.0;
        for k in 1..=half {
            let e = energy(k);
            total += e;
            if k > half / 2 {
                trailing += e;
            }
        }
        // Oscillation at the rounding floor of the trace scale is not a
        // resolution problem; without this, a constant trace whose samples
        // differ in the last bit would look maximally aliased.
        let floor = 1e-26 * (energy(0) + total);
        if total <= floor {
            0.0
        } else {
            trailing / total
        }
    }

    /// Cosine/sine coefficient pair of mode k ≥ 1 in the expansion
    /// f(θ) = mean + Σ_k (a_k cos kθ + b_k sin kθ).
    pub fn mode(&self, k: usize) -> (f64, f64) {
        let m = self.len() as f64;
        let c = self.modes[k];
        (2.0 * c.re / m, -2.0 * c.im / m)
    }
}

/// Threshold on the trailing-band energy ratio above which a trace is
/// treated as undersampled.
const ALIAS_LIMIT: f64 = 1e-3;

/// Harmonic extension of (trace − mean) evaluated at y: the unique harmonic
/// function on the disk whose boundary values are the mean-free part of the
/// trace. Vanishes at the origin.
pub fn harmonic_extension(
    disk: &GreensDisk,
    trace: &BoundaryTrace,
    y: Complex64,
) -> Result<f64, GreenError> {
    if y.norm() > disk.radius * (1.0 + 1e-12) {
        return Err(GreenError::OutsideDisk(y.norm(), disk.radius));
    }
    let ratio = trace.trailing_energy_ratio();
    if ratio > ALIAS_LIMIT {
        return Err(GreenError::Aliased(ratio));
    }
    let m = trace.len();
    let rho = (y.norm() / disk.radius).min(1.0);
    let theta = y.arg();
    let mut value = 0.0;
    // e^{ikθ} tracked incrementally; (r/R)^k by repeated multiply.
    let step = Complex64::from_polar(1.0, theta);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut radial = 1.0;
    for k in 1..m / 2 {
        phase *= step;
        radial *= rho;
        value += 2.0 * radial * (trace.modes[k] * phase).re;
    }
    // Nyquist mode appears once, not twice.
    phase *= step;
    radial *= rho;
    value += radial * (trace.modes[m / 2] * phase).re;
    Ok(value / m as f64)
}

/// Green's representation: the harmonic extension of the full trace (mean
/// included) plus ∫_{B_R} G(y, η)·source(η) dA(η). Applied to the boundary
/// trace and −Δu of a function u, this reproduces u at interior points.
pub fn represent(
    disk: &GreensDisk,
    source: &dyn Fn(Complex64) -> f64,
    trace: &BoundaryTrace,
    y: Complex64,
    tol: QuadTol,
) -> Result<(f64, QuadResult), GreenError> {
    let boundary = harmonic_extension(disk, trace, y)? + trace.mean();
    // Polar quadrature about the probe point: the G log-singularity becomes
    // ρ·log ρ against the area element, which the adaptive rule absorbs.
    let r2 = disk.radius * disk.radius;
    let rho_max = |phi: f64| {
        let u = Complex64::from_polar(1.0, phi);
        let b = y.re * u.re + y.im * u.im;
        -b + (b * b + r2 - y.norm_sqr()).max(0.0).sqrt()
    };
    let integrand = |ex: f64, ey: f64| {
        let eta = Complex64::new(ex, ey);
        let d2 = (y - eta).norm_sqr();
        if d2 == 0.0 {
            return 0.0;
        }
        let regular = if eta.norm_sqr() == 0.0 {
            disk.radius.ln()
        } else {
            let reflected = eta * (r2 / eta.norm_sqr());
            ((eta.norm() / disk.radius) * (reflected - y).norm()).ln()
        };
        (regular - 0.5 * d2.ln()) / std::f64::consts::TAU * source(eta)
    };
    let bulk = integrate_polar_patch((y.re, y.im), rho_max, integrand, tol);
    Ok((boundary + bulk.value, bulk))
}
