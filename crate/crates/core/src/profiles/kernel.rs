//! Kernel of the linearized operator at the flat bubble.
//!
//! With U(z) = -2·log(1 + c1|z|²), c1 = h0/8, the operator Δ + h0 e^U
//! annihilates exactly three bounded functions:
//!
//!   φ0 = (1 - c1|z|²)/(1 + c1|z|²),   φ1 = z_1/(1 + c1|z|²),   φ2 = z_2/(1 + c1|z|²).
//!
//! The radial part g01 = φ0 pairs with a second, logarithmically growing
//! radial solution g02 (data g02(1) = 0, g02'(1) = 1). Abel's identity makes
//! r·(g01 g02' - g01' g02) constant; its value g01(1) vanishes exactly at
//! h0 = 8, where g02 = -g01 and the pair stops spanning the solution space.
//! Inhomogeneous radial solves therefore use an internal companion solution
//! normalized to Wronskian r·(g01 ĝ' - g01' ĝ) ≡ 1, which exists for every
//! h0 > 0, while the public pair keeps its stated data.

use num_complex::Complex64;

use crate::ode;
use crate::quad::{integrate, QuadTol};

/// The three-dimensional kernel of Δ + h0 e^U at the flat bubble.
#[derive(Debug, Clone, Copy)]
pub struct KernelBasis {
    pub h0: f64,
    /// c1 = h0/8; the kernel elements are rational in c1|z|².
    pub c1: f64,
}

impl KernelBasis {
    pub fn new(h0: f64) -> Self {
        assert!(h0 > 0.0 && h0.is_finite(), "kernel needs h0 > 0, got {h0}");
        Self { h0, c1: h0 / 8.0 }
    }

    /// Kernel element i ∈ {0, 1, 2} at z.
    pub fn phi(&self, i: usize, z: Complex64) -> f64 {
        let d = 1.0 + self.c1 * z.norm_sqr();
        match i {
            0 => (1.0 - self.c1 * z.norm_sqr()) / d,
            1 => z.re / d,
            2 => z.im / d,
            _ => panic!("kernel index {i} out of range 0..3"),
        }
    }

    /// h0 e^{U(z)}, the weight multiplying zero-order terms of the linearization.
    pub fn flat_weight(&self, z: Complex64) -> f64 {
        let d = 1.0 + self.c1 * z.norm_sqr();
        self.h0 / (d * d)
    }

    /// Radial kernel element g01(r) = φ0(|z| = r).
    pub fn radial(&self, r: f64) -> f64 {
        (1.0 - self.c1 * r * r) / (1.0 + self.c1 * r * r)
    }

    /// d g01/dr.
    pub fn radial_deriv(&self, r: f64) -> f64 {
        let d = 1.0 + self.c1 * r * r;
        -4.0 * self.c1 * r / (d * d)
    }
}

/// Kernel element i of Δ + h0 e^U at the point x, as a free function.
pub fn kernel_basis(h0: f64, i: usize, x: Complex64) -> f64 {
    KernelBasis::new(h0).phi(i, x)
}

/// Failure of a radial construction.
#[derive(Debug, Clone, thiserror::Error)]
pub enum KernelError {
    #[error("radial integration stalled at r = {0:.6e}")]
    Stalled(f64),
    #[error("radial range [{0:.3e}, {1:.3e}] is empty or leaves (0, ∞)")]
    BadRange(f64, f64),
}

/// A radial function carried on sample nodes with values and derivatives,
/// interpolated between nodes by Hermite polynomials: quintic when node
/// curvatures are supplied (exact for solutions of the governing ODE, whose
/// second derivative is known pointwise), cubic otherwise. Outside its range
/// it clamps to the nearest endpoint value.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    rs: Vec<f64>,
    vals: Vec<f64>,
    ders: Vec<f64>,
    curvs: Option<Vec<f64>>,
}

impl RadialFunction {
    pub fn from_samples(rs: Vec<f64>, vals: Vec<f64>, ders: Vec<f64>) -> Self {
        assert!(rs.len() >= 2 && rs.len() == vals.len() && rs.len() == ders.len());
        assert!(
            rs.windows(2).all(|w| w[0] < w[1]),
            "radial nodes must increase strictly"
        );
        Self { rs, vals, ders, curvs: None }
    }

    /// Samples with second derivatives; interpolation becomes quintic, which
    /// keeps derivative queries accurate even where nodes are 5% of r apart.
    pub fn with_curvature(
        rs: Vec<f64>,
        vals: Vec<f64>,
        ders: Vec<f64>,
        curvs: Vec<f64>,
    ) -> Self {
        assert_eq!(rs.len(), curvs.len());
        let mut out = Self::from_samples(rs, vals, ders);
        out.curvs = Some(curvs);
        out
    }

    pub fn r_min(&self) -> f64 {
        self.rs[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.rs.last().unwrap()
    }

    /// The sample nodes. Values and derivatives at these points carry no
    /// interpolation error, only the integration tolerance.
    pub fn nodes(&self) -> &[f64] {
        &self.rs
    }

    fn segment(&self, r: f64) -> usize {
        self.rs.partition_point(|&x| x <= r).clamp(1, self.rs.len() - 1) - 1
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.r_min() {
            return self.vals[0];
        }
        if r >= self.r_max() {
            return *self.vals.last().unwrap();
        }
        let i = self.segment(r);
        let h = self.rs[i + 1] - self.rs[i];
        let t = (r - self.rs[i]) / h;
        if let Some(curvs) = &self.curvs {
            let (t2, t3) = (t * t, t * t * t);
            let (t4, t5) = (t2 * t2, t2 * t3);
            return self.vals[i] * (1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5)
                + h * self.ders[i] * (t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5)
                + h * h * curvs[i] * (t2 - 3.0 * t3 + 3.0 * t4 - t5) / 2.0
                + self.vals[i + 1] * (10.0 * t3 - 15.0 * t4 + 6.0 * t5)
                + h * self.ders[i + 1] * (-4.0 * t3 + 7.0 * t4 - 3.0 * t5)
                + h * h * curvs[i + 1] * (t3 - 2.0 * t4 + t5) / 2.0;
        }
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.vals[i]
            + (t3 - 2.0 * t2 + t) * h * self.ders[i]
            + (-2.0 * t3 + 3.0 * t2) * self.vals[i + 1]
            + (t3 - t2) * h * self.ders[i + 1]
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r <= self.r_min() {
            return self.ders[0];
        }
        if r >= self.r_max() {
            return *self.ders.last().unwrap();
        }
        let i = self.segment(r);
        let h = self.rs[i + 1] - self.rs[i];
        let t = (r - self.rs[i]) / h;
        let t2 = t * t;
        if let Some(curvs) = &self.curvs {
            let (t3, t4) = (t2 * t, t2 * t2);
            return (self.vals[i] * (-30.0 * t2 + 60.0 * t3 - 30.0 * t4)
                + h * self.ders[i] * (1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4)
                + h * h * curvs[i] * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4) / 2.0
                + self.vals[i + 1] * (30.0 * t2 - 60.0 * t3 + 30.0 * t4)
                + h * self.ders[i + 1] * (-12.0 * t2 + 28.0 * t3 - 15.0 * t4)
                + h * h * curvs[i + 1] * (3.0 * t2 - 8.0 * t3 + 5.0 * t4) / 2.0)
                / h;
        }
        ((6.0 * t2 - 6.0 * t) * self.vals[i]
            + (3.0 * t2 - 4.0 * t + 1.0) * h * self.ders[i]
            + (-6.0 * t2 + 6.0 * t) * self.vals[i + 1]
            + (3.0 * t2 - 2.0 * t) * h * self.ders[i + 1])
            / h
    }
}

/// Smallest radius radial solutions are carried down to. Integrals from zero
/// lose only O(r²·log r) mass below this.
const RADIAL_FLOOR: f64 = 1e-6;

/// Integrate g'' + g'/r + h0 e^U g = 0 from r = 1 with the given data,
/// both down to the floor and up to r_max, stitched into one function.
fn radial_homogeneous(
    h0: f64,
    data_at_one: [f64; 2],
    r_max: f64,
) -> Result<RadialFunction, KernelError> {
    if !(r_max > 1.0) {
        return Err(KernelError::BadRange(RADIAL_FLOOR, r_max));
    }
    let basis = KernelBasis::new(h0);
    let rhs = move |r: f64, y: [f64; 2]| {
        [y[1], -y[1] / r - basis.flat_weight(Complex64::new(r, 0.0)) * y[0]]
    };
    let down = ode::integrate(rhs, 1.0, RADIAL_FLOOR, data_at_one, 3e-12, 1e-14)
        .map_err(|e| KernelError::Stalled(e.at))?;
    let up = ode::integrate(rhs, 1.0, r_max, data_at_one, 3e-12, 1e-14)
        .map_err(|e| KernelError::Stalled(e.at))?;

    let mut rs = Vec::with_capacity(down.t.len() + up.t.len());
    let mut vals = Vec::with_capacity(rs.capacity());
    let mut ders = Vec::with_capacity(rs.capacity());
    for k in (0..down.t.len()).rev() {
        rs.push(down.t[k]);
        vals.push(down.y[k][0]);
        ders.push(down.y[k][1]);
    }
    // Skip the duplicate r = 1 that starts the upward sweep.
    for k in 1..up.t.len() {
        rs.push(up.t[k]);
        vals.push(up.y[k][0]);
        ders.push(up.y[k][1]);
    }
    // The equation itself supplies exact nodal curvatures.
    let curvs = rs
        .iter()
        .zip(vals.iter().zip(ders.iter()))
        .map(|(&r, (&v, &d))| rhs(r, [v, d])[1])
        .collect();
    Ok(RadialFunction::with_curvature(rs, vals, ders, curvs))
}

/// Second radial solution g02 with g02(1) = 0, g02'(1) = 1, carried on
/// [1e-6, r_max]. Grows like a multiple of log r at both ends; the multiple
/// degenerates to zero exactly at h0 = 8, where g02 coincides with -g01.
pub fn second_radial_solution(h0: f64, r_max: f64) -> Result<RadialFunction, KernelError> {
    radial_homogeneous(h0, [0.0, 1.0], r_max)
}

/// Solve g'' + g'/r + h0 e^U g = f on (0, r_max] with the decaying-at-zero
/// particular solution, by variation of parameters against (g01, ĝ) where ĝ
/// is the internal companion with Wronskian r·(g01 ĝ' - g01' ĝ) ≡ 1:
///
///   g(r) = ĝ(r)·∫_0^r g01 f s ds - g01(r)·∫_0^r ĝ f s ds.
///
/// The right side should decay at least like (1+r)^{-3} for the stated
/// logarithmic output bound to hold.
pub fn solve_radial_projection(
    h0: f64,
    f: &dyn Fn(f64) -> f64,
    r_max: f64,
) -> Result<RadialFunction, KernelError> {
    let basis = KernelBasis::new(h0);
    // Data scaled so the Wronskian at r = 1 is exactly one.
    let g1 = basis.radial(1.0);
    let dg1 = basis.radial_deriv(1.0);
    let k = 1.0 / (g1 * g1 + dg1 * dg1);
    let companion = radial_homogeneous(h0, [-dg1 * k, g1 * k], r_max)?;

    // Output nodes: geometric ladder across the whole range; panel integrals
    // accumulate the two variation-of-parameters integrals node to node.
    let n_nodes = 600;
    let ratio = (r_max / RADIAL_FLOOR).powf(1.0 / (n_nodes - 1) as f64);
    let mut rs = Vec::with_capacity(n_nodes);
    let mut r = RADIAL_FLOOR;
    for _ in 0..n_nodes {
        rs.push(r.min(r_max));
        r *= ratio;
    }
    *rs.last_mut().unwrap() = r_max;

    let tol = QuadTol::new(1e-14, 1e-11);
    let mut i1 = 0.0;
    let mut i2 = 0.0;
    let mut prev = 0.0;
    let mut vals = Vec::with_capacity(n_nodes);
    let mut ders = Vec::with_capacity(n_nodes);
    let mut curvs = Vec::with_capacity(n_nodes);
    for &node in &rs {
        i1 += integrate(|s| basis.radial(s) * f(s) * s, prev, node, tol).value;
        i2 += integrate(|s| companion.value(s) * f(s) * s, prev, node, tol).value;
        prev = node;
        let v = companion.value(node) * i1 - basis.radial(node) * i2;
        let d = companion.derivative(node) * i1 - basis.radial_deriv(node) * i2;
        vals.push(v);
        ders.push(d);
        // g'' = f - g'/r - h0 e^U g along the solution.
        curvs.push(f(node) - d / node - basis.flat_weight(Complex64::new(node, 0.0)) * v);
    }
    Ok(RadialFunction::with_curvature(rs, vals, ders, curvs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn kernel_elements_are_annihilated() {
        for h0 in [1.0, 8.0] {
            let basis = KernelBasis::new(h0);
            for i in 0..3 {
                for &z in &[c(0.5, 0.2), c(-2.0, 1.5), c(35.0, -35.0), c(49.0, 5.0)] {
                    let f = |w: Complex64| basis.phi(i, w);
                    let h = 2e-4;
                    let lap = (f(z + c(h, 0.0)) + f(z - c(h, 0.0)) + f(z + c(0.0, h))
                        + f(z - c(0.0, h))
                        - 4.0 * f(z))
                        / (h * h);
                    let res = lap + basis.flat_weight(z) * basis.phi(i, z);
                    assert!(
                        res.abs() < 1e-6,
                        "h0={h0} φ{i} at {z}: residual {res:.3e}"
                    );
                }
            }
        }
    }

    #[test]
    fn radial_derivative_matches_finite_differences() {
        let basis = KernelBasis::new(3.0);
        for r in [0.1, 1.0, 7.5] {
            let h = 1e-6;
            let fd = (basis.radial(r + h) - basis.radial(r - h)) / (2.0 * h);
            assert!(
                (basis.radial_deriv(r) - fd).abs() < 1e-9,
                "at r={r}: {} vs {fd}",
                basis.radial_deriv(r)
            );
        }
    }

    #[test]
    fn wronskian_is_constant() {
        let h0 = 1.0;
        let basis = KernelBasis::new(h0);
        let g02 = second_radial_solution(h0, 1e3).unwrap();
        let want = basis.radial(1.0);
        for k in 0..=40 {
            // Log-spaced probes across six decades, off the sample nodes.
            let r = 1e-3 * (1e6f64).powf(k as f64 / 40.0) * 1.0000137;
            let r = r.min(g02.r_max());
            let w = r * (basis.radial(r) * g02.derivative(r) - basis.radial_deriv(r) * g02.value(r));
            assert!(
                ((w - want) / want).abs() < 1e-8,
                "r·W at r={r:.3e}: {w} vs {want}, rel {:.3e}",
                ((w - want) / want).abs()
            );
        }
    }

    #[test]
    fn second_solution_grows_logarithmically() {
        for h0 in [1.0, 3.0] {
            let basis = KernelBasis::new(h0);
            let g02 = second_radial_solution(h0, 1e3).unwrap();
            let want = basis.radial(1.0);
            // Abel's identity forces d g02/d log r → g01(1)·(±1) at the ends,
            // negative at infinity where g01 → -1, positive at zero.
            let slope_far =
                (g02.value(1e3) - g02.value(300.0)) / (1e3f64.ln() - 300.0f64.ln());
            assert!(
                (slope_far + want).abs() < 0.01 * want.abs(),
                "h0={h0}: far slope {slope_far} vs {}",
                -want
            );
            let slope_near =
                (g02.value(1e-3) - g02.value(1e-4)) / (1e-3f64.ln() - 1e-4f64.ln());
            assert!(
                (slope_near - want).abs() < 0.01 * want.abs(),
                "h0={h0}: near slope {slope_near} vs {want}"
            );
        }
    }

    #[test]
    fn degenerate_coefficient_collapses_second_solution() {
        // At h0 = 8 the Wronskian constant g01(1) vanishes and the stated data
        // reproduce -g01 exactly.
        let basis = KernelBasis::new(8.0);
        let g02 = second_radial_solution(8.0, 100.0).unwrap();
        for r in [1e-4, 0.3, 1.0, 10.0, 99.0] {
            assert!(
                (g02.value(r) + basis.radial(r)).abs() < 1e-9,
                "at r={r}: g02 = {} vs -g01 = {}",
                g02.value(r),
                -basis.radial(r)
            );
        }
    }

    /// Direct initial-value integration of the inhomogeneous equation, the
    /// independent oracle for the variation-of-parameters solver.
    fn direct_projection(h0: f64, f: impl Fn(f64) -> f64 + Copy, r_hi: f64) -> ode::OdeSolution {
        let basis = KernelBasis::new(h0);
        let rhs = move |r: f64, y: [f64; 2]| {
            [y[1], -y[1] / r - basis.flat_weight(c(r, 0.0)) * y[0] + f(r)]
        };
        ode::integrate(rhs, 1e-8, r_hi, [0.0, 0.0], 1e-11, 1e-14).unwrap()
    }

    #[test]
    fn projection_matches_direct_integration() {
        for h0 in [1.0, 8.0] {
            let f = |r: f64| (1.0 + r).powi(-3);
            let g = solve_radial_projection(h0, &f, 100.0).unwrap();
            let oracle = direct_projection(h0, f, 6.0);
            for r in [0.5, 2.0, 5.0] {
                let (want, _) = oracle.eval(r);
                assert!(
                    (g.value(r) - want).abs() < 1e-7,
                    "h0={h0} r={r}: projection {} vs direct {want}",
                    g.value(r)
                );
            }
        }
    }

    #[test]
    fn resonant_forcing_matches_direct_integration() {
        // Forcing by h0 e^U g01 drives the operator along its own kernel
        // direction; the secular response still matches the initial-value
        // oracle.
        let h0 = 1.0;
        let basis = KernelBasis::new(h0);
        let f = move |r: f64| basis.flat_weight(c(r, 0.0)) * basis.radial(r);
        let g = solve_radial_projection(h0, &f, 1e3).unwrap();
        let oracle = direct_projection(h0, f, 50.0);
        for r in [0.2, 1.0, 10.0, 45.0] {
            let (want, _) = oracle.eval(r);
            assert!(
                (g.value(r) - want).abs() < 1e-6,
                "r={r}: secular solution {} vs direct {want}",
                g.value(r)
            );
        }
    }

    #[test]
    fn projection_obeys_logarithmic_bound() {
        let eps = 1e-3;
        let f = move |r: f64| eps * (1.0 + r).powi(-3);
        let mut sups = Vec::new();
        for r_max in [1e2, 1e3] {
            let g = solve_radial_projection(1.0, &f, r_max).unwrap();
            let mut sup: f64 = 0.0;
            for k in 0..=200 {
                let r = RADIAL_FLOOR * (r_max / RADIAL_FLOOR).powf(k as f64 / 200.0);
                sup = sup.max(g.value(r).abs() / (eps * (2.0 + r).ln()));
            }
            assert!(sup.is_finite() && sup < 5.0, "bound ratio {sup} at r_max={r_max}");
            sups.push(sup);
        }
        // The constant in the bound must not degrade as the domain grows.
        assert!(
            (sups[1] - sups[0]).abs() < 0.5 * sups[0],
            "bound constant drifts with domain: {sups:?}"
        );
    }
}
