//! Conserved integrals of the multi-peak profiles.
//!
//! The total nonlinear mass ∫ h0 |y|^{2N} e^V dA equals 8π(N+1) for every
//! admissible parameter set, and its derivatives in μ and in the target
//! P = e_1 + p therefore vanish identically:
//!
//! - d_mu:  ∫ ∂_μV · |y|^{2N} e^V dA = 0,
//! - d_P:   ∫ ∂_PV · |y|^{2N} e^V dA = 0 (complex, with d_P̄ its conjugate).
//!
//! Integrals are evaluated by adaptive polar quadrature over the disk that
//! holds the peak ring, plus a tail integral in w = y^{N+1} coordinates where
//! the density is a single displaced flat bubble and the change of variables
//! contributes a 1/(N+1) multiplicity factor. The split keeps both pieces
//! smooth at every μ the library targets.

use std::cell::Cell;

use num_complex::Complex64;

use crate::profiles::bubble::BubbleParams;
use crate::quad::{integrate, integrate_polar_patch, integrate_to_infinity, QuadResult, QuadTol};

/// Which vanishing integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityKind {
    /// ∂V/∂μ against the profile density (real integrand).
    DMu,
    /// Wirtinger derivative ∂V/∂P against the density (complex integrand).
    DTarget,
    /// ∂V/∂P̄ against the density, the conjugate of `DTarget`.
    DTargetBar,
}

/// A complex-valued integral with the quadrature error bound carried along.
#[derive(Debug, Clone, Copy)]
pub struct IdentityValue {
    pub value: Complex64,
    pub error: f64,
}

/// Radius separating the peak-ring disk from the w-coordinate tail.
fn split_radius(params: &BubbleParams) -> f64 {
    (10.0 * params.core_scale()).max(2.0)
}

/// Profile value as a function of w = (y e^{-iθ})^{N+1}.
fn value_w(params: &BubbleParams, w: Complex64) -> f64 {
    let q = w - params.target();
    if q.norm_sqr() == 0.0 {
        return params.mu;
    }
    let s = params.ln_c() + q.norm_sqr().ln();
    params.mu - 2.0 * if s > 0.0 { s + (-s).exp().ln_1p() } else { s.exp().ln_1p() }
}

/// |y|^{2N} h0 e^{V(y)}, the nonlinear density in y coordinates.
fn density(params: &BubbleParams, y: Complex64) -> f64 {
    let weight = y.norm_sqr().powi(params.n as i32);
    params.h0 * weight * params.value(y).exp()
}

/// Nested adaptive integral of f over the w-annulus s_lo < |w| < s_hi
/// (s_hi = None means infinity), divided by N+1 for the multiplicity of the
/// y → w covering. The angular loop is the outer adaptive pass; the reported
/// error adds the worst inner radial error across the circle.
fn w_annulus_integral(
    params: &BubbleParams,
    s_lo: f64,
    s_hi: Option<f64>,
    f: &dyn Fn(Complex64) -> f64,
    tol: QuadTol,
) -> QuadResult {
    let inner_tol = QuadTol::new(tol.abs / 40.0, tol.rel / 4.0);
    let worst_inner = Cell::new(0.0f64);
    let angular = |phi: f64| {
        let dir = Complex64::from_polar(1.0, phi);
        let radial = |rho: f64| f(dir * rho) * rho;
        let inner = match s_hi {
            Some(hi) => integrate(radial, s_lo, hi, inner_tol),
            None => integrate_to_infinity(radial, s_lo, inner_tol),
        };
        worst_inner.set(worst_inner.get().max(inner.error));
        inner.value
    };
    let outer = integrate(angular, 0.0, std::f64::consts::TAU, QuadTol::new(tol.abs / 2.0, tol.rel));
    let np1 = (params.n + 1) as f64;
    QuadResult {
        value: outer.value / np1,
        error: (outer.error + std::f64::consts::TAU * worst_inner.get()) / np1,
    }
}

/// Nonlinear mass ∫_{B_R} h0 |y|^{2N} e^V dA; `radius: None` integrates over
/// the whole plane, where the value is the quantized constant 8π(N+1).
pub fn bubble_mass(params: &BubbleParams, radius: Option<f64>, tol: QuadTol) -> QuadResult {
    let split = split_radius(params);
    let inner_radius = radius.unwrap_or(split).min(split);
    let disk = integrate_polar_patch(
        (0.0, 0.0),
        |_| inner_radius,
        |x, y| density(params, Complex64::new(x, y)),
        tol,
    );
    let needs_tail = radius.map(|r| r > split).unwrap_or(true);
    if !needs_tail {
        return disk;
    }
    let np1 = params.n + 1;
    let s_lo = inner_radius.powi(np1 as i32);
    let s_hi = radius.map(|r| r.powi(np1 as i32));
    let tail_density = |w: Complex64| params.h0 * value_w(params, w).exp();
    let tail = w_annulus_integral(params, s_lo, s_hi, &tail_density, tol);
    QuadResult { value: disk.value + tail.value, error: disk.error + tail.error }
}

/// Mass carried by one peak: the density integrated over B(peak_l, radius).
/// For radii below half the peak separation this is 8π + O(e^{-μ}) terms.
pub fn core_mass(params: &BubbleParams, peak: usize, radius: f64, tol: QuadTol) -> QuadResult {
    let center = params.maxima()[peak];
    integrate_polar_patch(
        (center.re, center.im),
        |_| radius,
        |x, y| density(params, Complex64::new(x, y)),
        tol,
    )
}

/// ∂V/∂μ as a function of w.
fn d_mu_w(params: &BubbleParams, w: Complex64) -> f64 {
    let q = w - params.target();
    if q.norm_sqr() == 0.0 {
        return 1.0;
    }
    let s = params.ln_c() + q.norm_sqr().ln();
    -(s / 2.0).tanh()
}

/// ∂V/∂P as a function of w.
fn d_target_w(params: &BubbleParams, w: Complex64) -> Complex64 {
    let q = w - params.target();
    let inv_c = (-params.ln_c()).exp();
    q.conj() * (2.0 / (inv_c + q.norm_sqr()))
}

/// One of the vanishing parameter-derivative integrals over the whole plane.
/// The returned error bounds the quadrature error only; the analytic value of
/// each identity is exactly zero.
pub fn integral_identity(
    params: &BubbleParams,
    kind: IdentityKind,
    tol: QuadTol,
) -> IdentityValue {
    // The d_P̄ integrand is the conjugate of the d_P one pointwise, so its
    // integral is too. Evaluate the shared quadrature once.
    if kind == IdentityKind::DTargetBar {
        let base = integral_identity(params, IdentityKind::DTarget, tol);
        return IdentityValue { value: base.value.conj(), ..base };
    }

    let split = split_radius(params);
    let s_lo = split.powi(params.n as i32 + 1);

    let disk_part = |component: &dyn Fn(Complex64) -> f64| {
        integrate_polar_patch(
            (0.0, 0.0),
            |_| split,
            |x, y| {
                let z = Complex64::new(x, y);
                component(z) * density(params, z)
            },
            tol,
        )
    };
    let tail_part = |component_w: &dyn Fn(Complex64) -> f64| {
        let f = |w: Complex64| component_w(w) * params.h0 * value_w(params, w).exp();
        w_annulus_integral(params, s_lo, None, &f, tol)
    };

    match kind {
        IdentityKind::DMu => {
            let disk = disk_part(&|z| params.d_mu(z));
            let tail = tail_part(&|w| d_mu_w(params, w));
            IdentityValue {
                value: Complex64::new(disk.value + tail.value, 0.0),
                error: disk.error + tail.error,
            }
        }
        IdentityKind::DTarget => {
            let disk_re = disk_part(&|z| params.d_target(z).re);
            let disk_im = disk_part(&|z| params.d_target(z).im);
            let tail_re = tail_part(&|w| d_target_w(params, w).re);
            let tail_im = tail_part(&|w| d_target_w(params, w).im);
            IdentityValue {
                value: Complex64::new(
                    disk_re.value + tail_re.value,
                    disk_im.value + tail_im.value,
                ),
                error: disk_re.error + tail_re.error + disk_im.error + tail_im.error,
            }
        }
        IdentityKind::DTargetBar => unreachable!("handled above"),
    }
}
