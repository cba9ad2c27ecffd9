//! Coefficient fields H(x) entering Δu + |x|^{2N} H e^u = 0.
//!
//! A coefficient is a closed-form expression over (x1, x2). First and second
//! derivatives are obtained symbolically at construction, so every consumer
//! (residual assembly, Pohozaev terms, trend measurements) sees the exact
//! same smooth function rather than per-call-site finite differences. The
//! equation's scaling map y ↦ δ y e^{iθ} acts on coefficients by
//! substitution, which keeps transported fields serializable in closed form.

use num_complex::Complex64;

use crate::expr::{Expr, ParseError};

/// Closed-form coefficient with precomputed symbolic derivatives.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    expr: Expr,
    text: String,
    dx: Expr,
    dy: Expr,
    dxx: Expr,
    dxy: Expr,
    dyy: Expr,
}

/// Coefficient validation failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoefficientError {
    #[error("coefficient expression failed to parse: {0}")]
    Parse(#[from] ParseError),
    #[error("coefficient is not strictly positive on the disk: min {min:.6} at ({x:.4}, {y:.4})")]
    NotPositive { min: f64, x: f64, y: f64 },
    #[error("coefficient evaluates non-finite at ({x:.4}, {y:.4})")]
    NonFinite { x: f64, y: f64 },
}

impl CoefficientField {
    pub fn from_expr(expr: Expr) -> Self {
        let dx = expr.diff(0);
        let dy = expr.diff(1);
        let dxx = dx.diff(0);
        let dxy = dx.diff(1);
        let dyy = dy.diff(1);
        let text = expr.to_string();
        Self { expr, text, dx, dy, dxx, dxy, dyy }
    }

    pub fn parse(src: &str) -> Result<Self, CoefficientError> {
        Ok(Self::from_expr(Expr::parse(src)?))
    }

    pub fn constant(c: f64) -> Self {
        Self::from_expr(Expr::Num(c))
    }

    /// Canonical closed-form text; parsing it back reproduces the field.
    pub fn expression(&self) -> &str {
        &self.text
    }

    pub fn value(&self, y: Complex64) -> f64 {
        self.expr.eval(y.re, y.im)
    }

    /// ∇H as (∂_1 H) + i (∂_2 H).
    pub fn gradient(&self, y: Complex64) -> Complex64 {
        Complex64::new(self.dx.eval(y.re, y.im), self.dy.eval(y.re, y.im))
    }

    /// Hessian entries (∂_11 H, ∂_12 H, ∂_22 H).
    pub fn hessian(&self, y: Complex64) -> (f64, f64, f64) {
        (
            self.dxx.eval(y.re, y.im),
            self.dxy.eval(y.re, y.im),
            self.dyy.eval(y.re, y.im),
        )
    }

    /// The field multiplied by a constant factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_expr(Expr::Mul(
            Box::new(Expr::Num(factor)),
            Box::new(self.expr.clone()),
        ))
    }

    /// The composed coefficient y ↦ H(δ y e^{iθ}), built by substitution so
    /// it stays a closed-form field.
    pub fn transported(&self, delta: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let x1 = Expr::Var(0);
        let x2 = Expr::Var(1);
        let lin = |a: f64, b: f64| {
            // a·x1 + b·x2 with exact coefficients.
            Expr::Add(
                Box::new(Expr::Mul(Box::new(Expr::Num(a)), Box::new(x1.clone()))),
                Box::new(Expr::Mul(Box::new(Expr::Num(b)), Box::new(x2.clone()))),
            )
        };
        let r1 = lin(delta * c, -delta * s);
        let r2 = lin(delta * s, delta * c);
        Self::from_expr(self.expr.substitute(&r1, &r2))
    }

    /// Min/max over a deterministic polar scan of B_R; errors when the
    /// minimum is not strictly positive.
    pub fn positivity_bounds(&self, radius: f64) -> Result<(f64, f64), CoefficientError> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut arg_min = Complex64::new(0.0, 0.0);
        let n_r = 64;
        let n_t = 128;
        for i in 0..=n_r {
            let r = radius * i as f64 / n_r as f64;
            for j in 0..n_t {
                let y = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / n_t as f64);
                let v = self.value(y);
                if !v.is_finite() {
                    return Err(CoefficientError::NonFinite { x: y.re, y: y.im });
                }
                if v < lo {
                    lo = v;
                    arg_min = y;
                }
                hi = hi.max(v);
                if i == 0 {
                    break;
                }
            }
        }
        if lo <= 0.0 {
            return Err(CoefficientError::NotPositive { min: lo, x: arg_min.re, y: arg_min.im });
        }
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn linear_coefficient_has_exact_gradient() {
        let h = CoefficientField::parse("1 + 0.3*x1 - 0.1*x2").unwrap();
        assert_eq!(h.value(c(0.0, 0.0)), 1.0);
        let g = h.gradient(c(0.4, -0.7));
        assert_eq!((g.re, g.im), (0.3, -0.1));
        let (hxx, hxy, hyy) = h.hessian(c(0.4, -0.7));
        assert_eq!((hxx, hxy, hyy), (0.0, 0.0, 0.0));
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let h = CoefficientField::parse("exp(0.2*x1) * (1 + 0.1*sin(x2))").unwrap();
        let p = c(0.3, -0.4);
        let eps = 1e-6;
        let g = h.gradient(p);
        let fd_x = (h.value(p + c(eps, 0.0)) - h.value(p - c(eps, 0.0))) / (2.0 * eps);
        let fd_y = (h.value(p + c(0.0, eps)) - h.value(p - c(0.0, eps))) / (2.0 * eps);
        assert!((g.re - fd_x).abs() < 1e-8, "∂1: {} vs {fd_x}", g.re);
        assert!((g.im - fd_y).abs() < 1e-8, "∂2: {} vs {fd_y}", g.im);
        // Second differences need a wider step: at 1e-6 the rounding error
        // alone reaches 1e-4 of the value.
        let eps = 1e-4;
        let (hxx, hxy, hyy) = h.hessian(p);
        let fd_xx = (h.value(p + c(eps, 0.0)) - 2.0 * h.value(p) + h.value(p - c(eps, 0.0)))
            / (eps * eps);
        let fd_yy = (h.value(p + c(0.0, eps)) - 2.0 * h.value(p) + h.value(p - c(0.0, eps)))
            / (eps * eps);
        let fd_xy = (h.value(p + c(eps, eps)) - h.value(p + c(eps, -eps))
            - h.value(p + c(-eps, eps))
            + h.value(p - c(eps, eps)))
            / (4.0 * eps * eps);
        assert!((hxx - fd_xx).abs() < 1e-4, "∂11: {hxx} vs {fd_xx}");
        assert!((hxy - fd_xy).abs() < 1e-4, "∂12: {hxy} vs {fd_xy}");
        assert!((hyy - fd_yy).abs() < 1e-4, "∂22: {hyy} vs {fd_yy}");
    }

    #[test]
    fn transported_field_composes_the_scaling_map() {
        let h = CoefficientField::parse("1 + 0.25*x1 + 0.1*x2*x2").unwrap();
        let (delta, theta) = (0.05, 0.7);
        let t = h.transported(delta, theta);
        for &y in &[c(1.0, 0.0), c(-0.4, 1.2), c(0.0, 0.0)] {
            let mapped = y * Complex64::from_polar(delta, theta);
            let want = h.value(mapped);
            let got = t.value(y);
            assert!(
                (got - want).abs() < 1e-14 * (1.0 + want.abs()),
                "transport at {y}: {got} vs {want}"
            );
            // Chain rule: ∇(H ∘ A)(y) = δ · R^T ∇H(Ay) for the rotation R.
            let gh = h.gradient(mapped);
            let gt = t.gradient(y);
            let expect = Complex64::new(
                delta * (theta.cos() * gh.re + theta.sin() * gh.im),
                delta * (-theta.sin() * gh.re + theta.cos() * gh.im),
            );
            assert!(
                (gt - expect).norm() < 1e-13,
                "transport gradient at {y}: ({}, {}) vs ({}, {})",
                gt.re,
                gt.im,
                expect.re,
                expect.im
            );
        }
        // Round trip through the canonical text form.
        let reparsed = CoefficientField::parse(t.expression()).unwrap();
        assert_eq!(reparsed.value(c(0.3, 0.8)), t.value(c(0.3, 0.8)));
    }

    #[test]
    fn positivity_scan_flags_sign_changes() {
        let ok = CoefficientField::parse("2 + sin(x1)").unwrap();
        let (lo, hi) = ok.positivity_bounds(3.0).unwrap();
        assert!(lo > 0.9 && hi < 3.1, "bounds ({lo}, {hi})");
        let bad = CoefficientField::parse("1 - x1").unwrap();
        match bad.positivity_bounds(2.0) {
            Err(CoefficientError::NotPositive { min, .. }) => {
                assert!(min <= -0.9, "min {min}")
            }
            other => panic!("expected positivity failure, got {other:?}"),
        }
    }

    #[test]
    fn constant_coefficient_is_flat() {
        let h = CoefficientField::constant(2.5);
        assert_eq!(h.value(c(0.4, 0.2)), 2.5);
        assert_eq!(h.gradient(c(0.4, 0.2)), c(0.0, 0.0));
        assert_eq!(h.expression(), "2.5");
    }
}
