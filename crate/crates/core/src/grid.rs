//! Polar discretization of a disk and scalar fields sampled on it.
//!
//! Nodes live at radii r_0 < … < r_{n_r-1} = R and equispaced angles
//! θ_j = 2πj/n_t. The first radius is half a cell away from the origin, so
//! no node sits at r = 0: values across the origin are reached through the
//! reflection u(-r, θ) = u(r, θ+π), which encodes the per-angular-mode
//! parity of smooth functions in polar coordinates. Radial nodes follow an
//! odd monotone map of a uniform grid, optionally compressed near a focus
//! radius to resolve a concentration ring.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::green::{BoundaryTrace, GreenError};
use crate::quad::pairwise_sum;
use crate::SmoothField;

/// Radial compression parameters: node spacing shrinks by the factor
/// (1 - strength) in a band of the given width around the focus radius.
/// An optional origin relief stretches spacing near r = 0 instead, where
/// smooth fields are quadratically flat and resolution buys nothing; the
/// first node moves out by roughly `relief_slope`, which lowers the huge
/// angular stencil weight 1/(r_0 Δθ)² by its square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSpec {
    pub focus: f64,
    pub width: f64,
    pub strength: f64,
    /// Spacing multiplier at the origin; 1.0 disables the relief.
    pub relief_slope: f64,
    /// Radial extent of the relief region (absolute, like `width`).
    pub relief_width: f64,
}

impl ClusterSpec {
    /// Compression band around a concentration ring, no origin relief.
    pub fn ring(focus: f64, width: f64, strength: f64) -> Self {
        Self { focus, width, strength, relief_slope: 1.0, relief_width: 0.0 }
    }

    pub fn with_origin_relief(self, slope: f64, width: f64) -> Self {
        Self { relief_slope: slope, relief_width: width, ..self }
    }
}

/// Polar grid on B_R.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    radius: f64,
    n_r: usize,
    n_t: usize,
    rs: Vec<f64>,
    cluster: Option<ClusterSpec>,
}

/// Grid and field construction/evaluation failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("need at least 8 radial nodes, got {0}")]
    BadRadialCount(usize),
    #[error("angular count must be even and ≥ 16, got {0}")]
    BadAngularCount(usize),
    #[error("cluster spec invalid: {0}")]
    BadCluster(String),
    #[error("value count {got} does not match grid size {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite value at node index {0}")]
    NonFinite(usize),
    #[error("point at radius {r:.6} lies outside the grid radius {radius:.6}")]
    OutsideGrid { r: f64, radius: f64 },
}

impl PolarGrid {
    /// Uniform radial spacing (up to the half-cell offset at the origin).
    pub fn uniform(radius: f64, n_r: usize, n_t: usize) -> Result<Self, GridError> {
        Self::build(radius, n_r, n_t, None)
    }

    /// Radially clustered grid; spacing near `focus` contracts by the
    /// factor (1 - strength) relative to the ambient spacing.
    pub fn clustered(
        radius: f64,
        n_r: usize,
        n_t: usize,
        cluster: ClusterSpec,
    ) -> Result<Self, GridError> {
        Self::build(radius, n_r, n_t, Some(cluster))
    }

    fn build(
        radius: f64,
        n_r: usize,
        n_t: usize,
        cluster: Option<ClusterSpec>,
    ) -> Result<Self, GridError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GridError::BadRadius(radius));
        }
        if n_r < 8 {
            return Err(GridError::BadRadialCount(n_r));
        }
        if n_t < 16 || n_t % 2 != 0 {
            return Err(GridError::BadAngularCount(n_t));
        }
        if let Some(c) = cluster {
            if !(c.focus > 0.0 && c.focus < radius) {
                return Err(GridError::BadCluster(format!(
                    "focus {} outside (0, {radius})",
                    c.focus
                )));
            }
            if !(c.width > 0.0 && c.width.is_finite()) {
                return Err(GridError::BadCluster(format!("width {} not positive", c.width)));
            }
            if !(0.0..=0.45).contains(&c.strength) {
                return Err(GridError::BadCluster(format!(
                    "strength {} outside [0, 0.45]",
                    c.strength
                )));
            }
            if !(1.0..=8.0).contains(&c.relief_slope) {
                return Err(GridError::BadCluster(format!(
                    "origin relief slope {} outside [1, 8]",
                    c.relief_slope
                )));
            }
            if c.relief_slope > 1.0 && !(c.relief_width > 0.0 && c.relief_width <= 0.3 * radius) {
                return Err(GridError::BadCluster(format!(
                    "origin relief width {} outside (0, {}]",
                    c.relief_width,
                    0.3 * radius
                )));
            }
        }
        let map = RadialMap::new(radius, cluster);
        // ξ_i = (2i+1)/(2n_r - 1) puts the first node half a cell off the
        // origin and the last node exactly at ξ = 1.
        let rs: Vec<f64> = (0..n_r)
            .map(|i| radius * map.eval((2 * i + 1) as f64 / (2 * n_r - 1) as f64))
            .collect();
        for w in rs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(GridError::BadCluster(format!(
                    "cluster collapses node ordering near r = {:.4}",
                    w[0]
                )));
            }
        }
        debug_assert_eq!(*rs.last().unwrap(), radius);
        Ok(Self { radius, n_r, n_t, rs, cluster })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn cluster(&self) -> Option<ClusterSpec> {
        self.cluster
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_t
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Radius of ring i.
    pub fn r(&self, i: usize) -> f64 {
        self.rs[i]
    }

    pub fn radii(&self) -> &[f64] {
        &self.rs
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_t as f64
    }

    /// Flat node index; values are stored ring by ring.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_t + j
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.rs[i], self.theta(j))
    }

    /// Largest local node separation (radial or azimuthal arc) at radius r,
    /// used for resolution checks against a feature scale.
    pub fn max_spacing_near(&self, r: f64) -> f64 {
        let i = self.rs.partition_point(|&x| x < r).min(self.n_r - 1);
        let lo = i.saturating_sub(1);
        let radial = if i == 0 { self.rs[1] - self.rs[0] } else { self.rs[i] - self.rs[lo] };
        let arc = r * TAU / self.n_t as f64;
        radial.max(arc)
    }
}

/// Odd monotone map ξ ↦ m(ξ)/m(1) with spacing dips at ±ξ_c and an optional
/// spacing bump at the origin; odd symmetry keeps the map smooth through the
/// origin, so node spacing varies smoothly everywhere and the stencil stays
/// second-order on the graded mesh.
struct RadialMap {
    a: f64,
    s: f64,
    xi_c: f64,
    /// Origin relief: m gains (slope - 1)·w·tanh(ξ/w), stretching spacing
    /// by `slope` at ξ = 0 and fading beyond |ξ| ~ w.
    relief: f64,
    w: f64,
    norm: f64,
}

impl RadialMap {
    fn new(radius: f64, cluster: Option<ClusterSpec>) -> Self {
        let Some(c) = cluster else {
            return Self { a: 0.0, s: 1.0, xi_c: 0.5, relief: 0.0, w: 1.0, norm: 1.0 };
        };
        let s = c.width / radius;
        let a = c.strength * s;
        let w = if c.relief_slope > 1.0 { c.relief_width / radius } else { 1.0 };
        let relief = (c.relief_slope - 1.0) * w;
        let raw = |xi: f64, xc: f64| {
            xi + relief * (xi / w).tanh()
                - a * (((xi - xc) / s).tanh() + ((xi + xc) / s).tanh())
        };
        // Place the spacing dip so the mapped focus lands on the requested
        // radius; a few fixed-point sweeps suffice for the mild strengths
        // the constructor admits.
        let mut xi_c = c.focus / radius;
        for _ in 0..8 {
            let mapped = raw(xi_c, xi_c) / raw(1.0, xi_c);
            xi_c = (xi_c + (c.focus / radius - mapped)).clamp(1e-3, 0.999);
        }
        let norm = raw(1.0, xi_c);
        Self { a, s, xi_c, relief, w, norm }
    }

    fn eval(&self, xi: f64) -> f64 {
        let raw = xi + self.relief * (xi / self.w).tanh()
            - self.a
                * (((xi - self.xi_c) / self.s).tanh() + ((xi + self.xi_c) / self.s).tanh());
        raw / self.norm
    }
}

/// Scalar samples on a polar grid, ring-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: PolarGrid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: PolarGrid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::ShapeMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite(bad));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PolarGrid, f: impl Fn(Complex64) -> f64) -> Result<Self, GridError> {
        let values = (0..grid.n_r())
            .flat_map(|i| (0..grid.n_t()).map(move |j| (i, j)))
            .map(|(i, j)| f(grid.point(i, j)))
            .collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: PolarGrid) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n] }
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Samples of the outermost ring, which sits exactly at r = R.
    pub fn boundary_trace(&self) -> Result<BoundaryTrace, GreenError> {
        let i = self.grid.n_r() - 1;
        BoundaryTrace::new(self.values[self.grid.index(i, 0)..self.grid.index(i + 1, 0)].to_vec())
    }

    /// Ring value at (ring index with sign, angle index): negative rings
    /// reflect through the origin picking up the angle shift by π.
    fn ring_value(&self, i: isize, j: usize) -> f64 {
        let n_t = self.grid.n_t();
        if i >= 0 {
            self.values[self.grid.index(i as usize, j % n_t)]
        } else {
            self.values[self.grid.index((-i - 1) as usize, (j + n_t / 2) % n_t)]
        }
    }

    fn ring_radius(&self, i: isize) -> f64 {
        if i >= 0 {
            self.grid.rs[i as usize]
        } else {
            -self.grid.rs[(-i - 1) as usize]
        }
    }

    /// Cubic angular interpolation along (possibly reflected) ring i.
    fn angular_value(&self, i: isize, theta: f64) -> f64 {
        let n_t = self.grid.n_t();
        let dt = TAU / n_t as f64;
        let t = theta.rem_euclid(TAU) / dt;
        let j0 = (t.floor() as usize).min(n_t - 1);
        let s = t - j0 as f64;
        // Lagrange cubic on the four equispaced samples around the cell.
        let f = [
            self.ring_value(i, j0 + n_t - 1),
            self.ring_value(i, j0),
            self.ring_value(i, j0 + 1),
            self.ring_value(i, j0 + 2),
        ];
        let w = [
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ];
        f[0] * w[0] + f[1] * w[1] + f[2] * w[2] + f[3] * w[3]
    }

    /// Angular derivative of the cubic interpolant along ring i.
    fn angular_deriv(&self, i: isize, theta: f64) -> f64 {
        let n_t = self.grid.n_t();
        let dt = TAU / n_t as f64;
        let t = theta.rem_euclid(TAU) / dt;
        let j0 = (t.floor() as usize).min(n_t - 1);
        let s = t - j0 as f64;
        let f = [
            self.ring_value(i, j0 + n_t - 1),
            self.ring_value(i, j0),
            self.ring_value(i, j0 + 1),
            self.ring_value(i, j0 + 2),
        ];
        let w = [
            -(3.0 * s * s - 6.0 * s + 2.0) / 6.0,
            (3.0 * s * s - 4.0 * s - 1.0) / 2.0,
            -(3.0 * s * s - 2.0 * s - 2.0) / 2.0,
            (3.0 * s * s - 1.0) / 6.0,
        ];
        (f[0] * w[0] + f[1] * w[1] + f[2] * w[2] + f[3] * w[3]) / dt
    }

    /// Four-ring radial stencil covering radius r, reflected through the
    /// origin when r is within the innermost cells.
    fn radial_stencil(&self, r: f64) -> [isize; 4] {
        let n_r = self.grid.n_r() as isize;
        let k = self.grid.rs.partition_point(|&x| x <= r) as isize;
        // Rings k-2, k-1, k, k+1 clamped at the outer edge only; the inner
        // side extends to reflected rings.
        let hi = (k + 1).min(n_r - 1);
        let lo = hi - 3;
        [lo, lo + 1, lo + 2, lo + 3]
    }

    /// Interpolated value at an interior point.
    pub fn interpolate(&self, y: Complex64) -> Result<f64, GridError> {
        let (value, _) = self.interp_parts(y, false)?;
        Ok(value)
    }

    fn interp_parts(&self, y: Complex64, want_grad: bool) -> Result<(f64, Complex64), GridError> {
        let r = y.norm();
        let radius = self.grid.radius();
        if r > radius * (1.0 + 1e-12) {
            return Err(GridError::OutsideGrid { r, radius });
        }
        let r = r.min(radius);
        let theta = if y.norm_sqr() == 0.0 { 0.0 } else { y.arg() };
        let stencil = self.radial_stencil(r);
        let xs = stencil.map(|i| self.ring_radius(i));
        let fs = stencil.map(|i| self.angular_value(i, theta));
        let value = lagrange4(&xs, &fs, r);
        if !want_grad {
            return Ok((value, Complex64::new(0.0, 0.0)));
        }
        // Near the origin the polar frame degenerates: fall back to plain
        // central differences of the interpolant at the first-ring scale.
        let r0 = self.grid.rs[0];
        if r < 2.0 * r0 {
            let h = r0;
            let fx = (self.interpolate(y + Complex64::new(h, 0.0))?
                - self.interpolate(y - Complex64::new(h, 0.0))?)
                / (2.0 * h);
            let fy = (self.interpolate(y + Complex64::new(0.0, h))?
                - self.interpolate(y - Complex64::new(0.0, h))?)
                / (2.0 * h);
            return Ok((value, Complex64::new(fx, fy)));
        }
        let dr = lagrange4_deriv(&xs, &fs, r);
        let dts = stencil.map(|i| self.angular_deriv(i, theta));
        let dt = lagrange4(&xs, &dts, r) / r;
        let (sin_t, cos_t) = theta.sin_cos();
        let grad = Complex64::new(cos_t * dr - sin_t * dt, sin_t * dr + cos_t * dt);
        Ok((value, grad))
    }

    /// Gradient of the interpolant, as (∂_1 u) + i (∂_2 u).
    pub fn gradient_at(&self, y: Complex64) -> Result<Complex64, GridError> {
        let (_, grad) = self.interp_parts(y, true)?;
        Ok(grad)
    }

    /// Average of the interpolant over the circle of radius r.
    pub fn circle_average(&self, r: f64) -> Result<f64, GridError> {
        let m = 2 * self.grid.n_t();
        let mut samples = Vec::with_capacity(m);
        for j in 0..m {
            let theta = TAU * j as f64 / m as f64;
            samples.push(self.interpolate(Complex64::from_polar(r, theta))?);
        }
        Ok(pairwise_sum(&samples) / m as f64)
    }
}

impl SmoothField for Field {
    fn value(&self, y: Complex64) -> f64 {
        self.interpolate(y).expect("probe point inside the grid")
    }

    fn gradient(&self, y: Complex64) -> Complex64 {
        self.gradient_at(y).expect("probe point inside the grid")
    }
}

/// Lagrange interpolation through four distinct nodes.
fn lagrange4(xs: &[f64; 4], fs: &[f64; 4], x: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..4 {
        let mut w = fs[k];
        for l in 0..4 {
            if l != k {
                w *= (x - xs[l]) / (xs[k] - xs[l]);
            }
        }
        total += w;
    }
    total
}

/// Derivative of the Lagrange cubic through four nodes.
fn lagrange4_deriv(xs: &[f64; 4], fs: &[f64; 4], x: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..4 {
        let mut denom = 1.0;
        for l in 0..4 {
            if l != k {
                denom *= xs[k] - xs[l];
            }
        }
        // d/dx Π_{l≠k}(x - x_l) = Σ_m Π_{l≠k,m}(x - x_l).
        let mut dnum = 0.0;
        for m in 0..4 {
            if m == k {
                continue;
            }
            let mut term = 1.0;
            for l in 0..4 {
                if l != k && l != m {
                    term *= x - xs[l];
                }
            }
            dnum += term;
        }
        total += fs[k] * dnum / denom;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn uniform_grid_layout() {
        let g = PolarGrid::uniform(2.0, 16, 32).unwrap();
        assert_eq!(g.r(15), 2.0, "last node must sit exactly on the boundary");
        assert!(g.radii().windows(2).all(|w| w[1] > w[0]));
        let dr = g.r(1) - g.r(0);
        assert!(
            (g.r(0) - dr / 2.0).abs() < 1e-12,
            "first node should be half a cell off the origin: r0 = {}, dr = {dr}",
            g.r(0)
        );
    }

    #[test]
    fn clustered_grid_compresses_near_focus() {
        let spec = ClusterSpec::ring(1.0, 0.4, 0.4);
        let g = PolarGrid::clustered(3.0, 200, 32, spec).unwrap();
        assert_eq!(g.r(199), 3.0);
        assert!(g.radii().windows(2).all(|w| w[1] > w[0]), "nodes must increase");
        let spacing =
            |r: f64| {
                let i = g.radii().partition_point(|&x| x < r).clamp(1, 199);
                g.r(i) - g.r(i - 1)
            };
        let near = spacing(1.0);
        let far = spacing(2.5);
        assert!(
            near < 0.75 * far,
            "expected compression near the focus: near {near:.5}, far {far:.5}"
        );
        // The tightest cell should sit close to the requested focus.
        let mut best = (0.0f64, f64::INFINITY);
        for w in g.radii().windows(2) {
            if w[1] - w[0] < best.1 {
                best = ((w[0] + w[1]) / 2.0, w[1] - w[0]);
            }
        }
        assert!(
            (best.0 - 1.0).abs() < 0.25,
            "tightest spacing at r = {:.3}, expected near 1.0",
            best.0
        );
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(matches!(PolarGrid::uniform(-1.0, 16, 32), Err(GridError::BadRadius(_))));
        assert!(matches!(PolarGrid::uniform(1.0, 4, 32), Err(GridError::BadRadialCount(4))));
        assert!(matches!(PolarGrid::uniform(1.0, 16, 21), Err(GridError::BadAngularCount(21))));
        assert!(matches!(PolarGrid::uniform(1.0, 16, 8), Err(GridError::BadAngularCount(8))));
        let bad = ClusterSpec::ring(2.0, 0.1, 0.2);
        assert!(matches!(PolarGrid::clustered(1.0, 16, 32, bad), Err(GridError::BadCluster(_))));
    }

    #[test]
    fn field_validation() {
        let g = PolarGrid::uniform(1.0, 8, 16).unwrap();
        assert!(matches!(
            Field::new(g.clone(), vec![0.0; 5]),
            Err(GridError::ShapeMismatch { expected: 128, got: 5 })
        ));
        let mut v = vec![0.0; 128];
        v[17] = f64::INFINITY;
        assert!(matches!(Field::new(g, v), Err(GridError::NonFinite(17))));
    }

    #[test]
    fn interpolation_converges_at_fourth_order() {
        let f = |y: Complex64| (y.re * 1.3).sin() * (-y.im).exp() + y.re * y.im;
        let probes =
            [c(0.31, 0.17), c(-0.52, 0.61), c(0.05, -0.03), c(0.0, 0.0), c(0.7, -0.64)];
        let mut errs = Vec::new();
        for n in [24usize, 48] {
            let g = PolarGrid::uniform(1.0, n, 2 * n.next_power_of_two()).unwrap();
            let field = Field::from_fn(g, f).unwrap();
            let e = probes
                .iter()
                .map(|&p| (field.interpolate(p).unwrap() - f(p)).abs())
                .fold(0.0f64, f64::max);
            errs.push(e);
        }
        assert!(
            errs[1] < errs[0] / 8.0,
            "expected at least cubic decay: errors {errs:?}"
        );
        assert!(errs[1] < 1e-6, "absolute accuracy too low: {errs:?}");
    }

    #[test]
    fn interpolation_crosses_the_origin_smoothly() {
        let f = |y: Complex64| (y.re).exp() * (y.im).cos();
        let g = PolarGrid::uniform(1.0, 64, 64).unwrap();
        let field = Field::from_fn(g.clone(), f).unwrap();
        let r0 = g.r(0);
        for &p in &[c(0.0, 0.0), c(r0 / 3.0, -r0 / 5.0), c(-r0 / 2.0, r0 / 4.0)] {
            let got = field.interpolate(p).unwrap();
            assert!(
                (got - f(p)).abs() < 1e-8,
                "near-origin interpolation at {p}: {got} vs {}",
                f(p)
            );
        }
    }

    #[test]
    fn gradient_matches_closed_form() {
        let f = |y: Complex64| (y.re * 1.3).sin() * (-y.im).exp();
        let grad = |y: Complex64| {
            Complex64::new(
                1.3 * (y.re * 1.3).cos() * (-y.im).exp(),
                -(y.re * 1.3).sin() * (-y.im).exp(),
            )
        };
        let probes = [c(0.31, 0.17), c(-0.52, 0.61), c(0.9, 0.0), c(0.003, 0.004)];
        let mut errs = Vec::new();
        for (n_r, n_t) in [(96usize, 128usize), (192, 256)] {
            let g = PolarGrid::uniform(1.0, n_r, n_t).unwrap();
            let field = Field::from_fn(g, f).unwrap();
            let e = probes
                .iter()
                .map(|&p| (field.gradient_at(p).unwrap() - grad(p)).norm())
                .fold(0.0f64, f64::max);
            errs.push(e);
        }
        // The interpolant is quartic-accurate in value, cubic in slope.
        assert!(errs[0] < 5e-4, "gradient error too large: {errs:?}");
        assert!(errs[1] < errs[0] / 5.0, "expected cubic decay: {errs:?}");
    }

    #[test]
    fn boundary_trace_reads_the_last_ring() {
        let g = PolarGrid::uniform(2.0, 16, 32).unwrap();
        let field = Field::from_fn(g, |y| y.arg().sin() + 1.0).unwrap();
        let trace = field.boundary_trace().unwrap();
        assert_eq!(trace.len(), 32);
        assert!((trace.mean() - 1.0).abs() < 1e-14, "mean {}", trace.mean());
        let (a1, b1) = trace.mode(1);
        assert!(a1.abs() < 1e-14 && (b1 - 1.0).abs() < 1e-14, "mode 1: ({a1}, {b1})");
    }

    #[test]
    fn circle_average_annihilates_oscillation() {
        let g = PolarGrid::uniform(1.0, 48, 64).unwrap();
        let field =
            Field::from_fn(g, |y| y.norm_sqr() + 0.7 * (3.0 * y.arg()).sin()).unwrap();
        for &r in &[0.3, 0.55, 0.8] {
            let avg = field.circle_average(r).unwrap();
            assert!(
                (avg - r * r).abs() < 1e-6,
                "average at r = {r}: {avg} vs {}",
                r * r
            );
        }
    }

    #[test]
    fn points_outside_are_rejected() {
        let g = PolarGrid::uniform(1.0, 16, 16).unwrap();
        let field = Field::zeros(g);
        assert!(matches!(
            field.interpolate(c(1.5, 0.0)),
            Err(GridError::OutsideGrid { .. })
        ));
    }

    #[test]
    fn spacing_probe_reports_local_cell_size() {
        let g = PolarGrid::uniform(1.0, 32, 64).unwrap();
        let s = g.max_spacing_near(0.5);
        let dr = g.r(16) - g.r(15);
        let arc = 0.5 * TAU / 64.0;
        assert!((s - dr.max(arc)).abs() < 1e-12, "spacing {s} vs dr {dr}, arc {arc}");
    }
}
