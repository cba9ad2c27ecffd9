//! Adaptive Runge–Kutta integration for planar ODE systems.
//!
//! Cash–Karp 4(5) with step control on the embedded error estimate. The
//! integrator keeps every accepted step so solutions can be queried anywhere
//! in the covered range through cubic Hermite interpolation (values and first
//! derivatives at the step ends are known exactly from the right-hand side).
//!
//! Second-order scalar equations are integrated as first-order pairs
//! `(g, g')`; integration may run toward increasing or decreasing abscissae.

/// Dense solution of a planar system: accepted nodes with states and slopes.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    /// Abscissae in integration order (monotone increasing or decreasing).
    pub t: Vec<f64>,
    /// States at `t`.
    pub y: Vec<[f64; 2]>,
    /// Right-hand-side values at `t`.
    pub dy: Vec<[f64; 2]>,
}

/// Integration failure: the controller could not meet the tolerance without
/// shrinking the step below the resolvable scale.
#[derive(Debug, Clone, thiserror::Error)]
#[error("step size collapsed at t = {at} (remaining span {remaining:.3e})")]
pub struct StepCollapse {
    pub at: f64,
    pub remaining: f64,
}

const CK_A: [f64; 5] = [1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0];
const CK_B: [[f64; 5]; 5] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
    [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
    [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ],
];
const CK_C5: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
const CK_C4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    1.0 / 4.0,
];

fn axpy(y: [f64; 2], h: f64, ks: &[[f64; 2]], coeffs: &[f64]) -> [f64; 2] {
    let mut out = y;
    for (k, c) in ks.iter().zip(coeffs) {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` with per-step tolerance
/// `atol + rtol·|y|`. Works for `t1 < t0` as well.
pub fn integrate<F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [f64; 2],
    rtol: f64,
    atol: f64,
) -> Result<OdeSolution, StepCollapse>
where
    F: FnMut(f64, [f64; 2]) -> [f64; 2],
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut dy = f(t, y);
    let mut h = (span / 100.0).min(1.0).max(span * 1e-10) * dir;

    let mut sol = OdeSolution { t: vec![t], y: vec![y], dy: vec![dy] };

    while (t1 - t) * dir > 0.0 {
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let mut ks = [[0.0f64; 2]; 6];
        ks[0] = dy;
        for stage in 0..5 {
            let ts = t + CK_A[stage] * h;
            let ys = axpy(y, h, &ks[..stage + 1], &CK_B[stage][..stage + 1]);
            ks[stage + 1] = f(ts, ys);
        }
        let y5 = axpy(y, h, &ks, &CK_C5);
        let y4 = axpy(y, h, &ks, &CK_C4);
        let sc0 = atol + rtol * y[0].abs().max(y5[0].abs());
        let sc1 = atol + rtol * y[1].abs().max(y5[1].abs());
        let err = (((y5[0] - y4[0]) / sc0).powi(2) + ((y5[1] - y4[1]) / sc1).powi(2)).sqrt()
            / std::f64::consts::SQRT_2;

        if err <= 1.0 {
            t += h;
            y = y5;
            dy = f(t, y);
            sol.t.push(t);
            sol.y.push(y);
            sol.dy.push(dy);
        }

        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h.abs() < ((t.abs() + 1.0) * 1e-14) {
            return Err(StepCollapse { at: t, remaining: (t1 - t).abs() });
        }
    }
    Ok(sol)
}

impl OdeSolution {
    fn bracket(&self, t: f64) -> usize {
        let ascending = self.t.last().unwrap() >= self.t.first().unwrap();
        // Binary search over the accepted nodes in integration order.
        let mut lo = 0usize;
        let mut hi = self.t.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let before = if ascending { self.t[mid] <= t } else { self.t[mid] >= t };
            if before {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Cubic Hermite value of component 0 (the integrated function) and its
    /// derivative at `t`, which must lie inside the covered range.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let i = self.bracket(t);
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (p0, p1) = (self.y[i][0], self.y[i + 1][0]);
        let (m0, m1) = (self.dy[i][0] * h, self.dy[i + 1][0] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1;
        let deriv = ((6.0 * s2 - 6.0 * s) * p0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * p1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        (value, deriv)
    }

    pub fn first_t(&self) -> f64 {
        self.t[0]
    }

    pub fn last_t(&self) -> f64 {
        *self.t.last().unwrap()
    }

    pub fn last_y(&self) -> [f64; 2] {
        *self.y.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_stays_on_circle() {
        let sol = integrate(|_, y| [y[1], -y[0]], 0.0, 20.0, [1.0, 0.0], 1e-11, 1e-13).unwrap();
        let yf = sol.last_y();
        assert!(
            (yf[0] - 20.0f64.cos()).abs() < 1e-8,
            "cos(20): got {}, want {}",
            yf[0],
            20.0f64.cos()
        );
        let (v, d) = sol.eval(7.3);
        assert!((v - 7.3f64.cos()).abs() < 1e-8, "dense value at 7.3: {v}");
        assert!((d + 7.3f64.sin()).abs() < 1e-7, "dense slope at 7.3: {d}");
    }

    #[test]
    fn euler_equation_gives_logarithm() {
        // g'' + g'/r = 0 with g(1) = 0, g'(1) = 1 has solution log r.
        let rhs = |r: f64, y: [f64; 2]| [y[1], -y[1] / r];
        let fwd = integrate(rhs, 1.0, 1000.0, [0.0, 1.0], 1e-11, 1e-13).unwrap();
        assert!(
            (fwd.last_y()[0] - 1000.0f64.ln()).abs() < 1e-7,
            "log(1000): got {}",
            fwd.last_y()[0]
        );
        let back = integrate(rhs, 1.0, 1e-4, [0.0, 1.0], 1e-11, 1e-13).unwrap();
        assert!(
            (back.last_y()[0] - 1e-4f64.ln()).abs() < 1e-7,
            "backward to 1e-4: got {}",
            back.last_y()[0]
        );
    }

    #[test]
    fn reports_step_collapse_on_finite_time_blowup() {
        // y' = y^2 blows up at t = 1; the controller must fail, not hang.
        let res = integrate(|_, y| [y[0] * y[0], 0.0], 0.0, 2.0, [1.0, 0.0], 1e-10, 1e-12);
        assert!(res.is_err(), "expected step collapse before the singularity");
    }
}
