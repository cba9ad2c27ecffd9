//! Discretization and Newton/continuation solution of the bubble equation
//! Δu + |x|^{2N} H(x) e^u = 0 on a disk with Dirichlet data.
//!
//! The Laplacian is the five-point polar stencil on the clustered grid:
//! second-order radial differences on the nonuniform nodes plus the periodic
//! angular second difference. Across the origin the innermost ring couples
//! to its antipodal samples through u(-r, θ) = u(r, θ+π), the real-space
//! form of the per-angular-mode parity conditions. Dirichlet rows read
//! (u - boundary) so the residual and the Jacobian stay square and banded
//! with bandwidth n_t on both sides.

pub mod banded;

pub use banded::{BandedLu, BandedMatrix, LinAlgError};

use num_complex::Complex64;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use crate::coefficient::CoefficientField;
use crate::green::{harmonic_extension, BoundaryTrace, GreenError, GreensDisk};
use crate::grid::{ClusterSpec, Field, GridError, PolarGrid};
use crate::profiles::BubbleParams;
use crate::quad::pairwise_sum;

/// Solver failures. Divergence and iteration exhaustion carry the best
/// iterate seen so callers can inspect or restart.
#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Linear(#[from] LinAlgError),
    #[error("boundary trace has {got} samples, grid has {expected} angles")]
    BoundaryMismatch { expected: usize, got: usize },
    #[error("Newton diverged: residual {residual:.3e} not reducible after {halvings} halvings")]
    Diverged { residual: f64, halvings: usize, best: Box<Field>, report: SolveReport },
    #[error("Newton used all {iterations} iterations, residual {residual:.3e}")]
    MaxIterations { residual: f64, iterations: usize, best: Box<Field>, report: SolveReport },
    #[error("grid under-resolves the concentration ring: spacing {spacing:.3e} > {required:.3e}")]
    UnderResolved { spacing: f64, required: f64 },
    #[error("continuation failed at delta = {delta:.4e} after one bisection: {source}")]
    FamilyStep { delta: f64, source: Box<SolverError> },
    #[error("delta schedule must be strictly decreasing and positive")]
    BadSchedule,
    #[error("target heights must match the schedule and increase strictly")]
    BadHeights,
}

/// Convergence record of one Newton run.
#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    /// Max-norm residual before each iteration, then the final one.
    pub residuals: Vec<f64>,
    /// Armijo step factor accepted at each iteration.
    pub damping: Vec<f64>,
}

/// Per-ring stencil coefficients: radial neighbours and the angular weight.
struct RingStencil {
    cm: f64,
    c0: f64,
    cp: f64,
    ang: f64,
}

fn ring_stencils(grid: &PolarGrid) -> Vec<RingStencil> {
    let n_r = grid.n_r();
    let dt = TAU / grid.n_t() as f64;
    let mut out = Vec::with_capacity(n_r - 1);
    for i in 0..n_r - 1 {
        let r = grid.r(i);
        let hp = grid.r(i + 1) - r;
        // The inner neighbour of the first ring is its own antipode at -r_0.
        let hm = if i == 0 { 2.0 * r } else { r - grid.r(i - 1) };
        let am = 2.0 / (hm * (hm + hp));
        let a0 = -2.0 / (hm * hp);
        let ap = 2.0 / (hp * (hm + hp));
        let bm = -hp / (hm * (hm + hp));
        let b0 = (hp - hm) / (hm * hp);
        let bp = hm / (hp * (hm + hp));
        out.push(RingStencil {
            cm: am + bm / r,
            c0: a0 + b0 / r,
            cp: ap + bp / r,
            ang: 1.0 / (r * r * dt * dt),
        });
    }
    out
}

/// Nodal weights r^{2N}·H at interior nodes (boundary ring unused).
fn coefficient_weights(grid: &PolarGrid, h: &CoefficientField, n: u32) -> Vec<f64> {
    let mut w = vec![0.0; grid.len()];
    for i in 0..grid.n_r() - 1 {
        let r2n = grid.r(i).powi(2 * n as i32);
        for j in 0..grid.n_t() {
            w[grid.index(i, j)] = r2n * h.value(grid.point(i, j));
        }
    }
    w
}

/// One exactly-compensated accumulator: Neumaier summation of fma-split
/// products. The stencil weights near the origin reach 1/(r_0 Δθ)² ~ 1e7,
/// so a plain sum of the five terms carries cancellation noise far above
/// the 1e-10 residual contract; compensation removes it.
#[derive(Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.comp += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
    }

    #[inline]
    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.comp += a.mul_add(b, -p);
    }

    #[inline]
    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

fn raw_residual(
    grid: &PolarGrid,
    stencils: &[RingStencil],
    weights: &[f64],
    boundary: &[f64],
    u: &[f64],
    out: &mut [f64],
) {
    let n_t = grid.n_t();
    let n_r = grid.n_r();
    let half = n_t / 2;
    for i in 0..n_r - 1 {
        let st = &stencils[i];
        let row = i * n_t;
        for j in 0..n_t {
            let k = row + j;
            let u_minus = if i == 0 {
                u[(j + half) % n_t]
            } else {
                u[k - n_t]
            };
            let mut acc = Accumulator::default();
            acc.add_product(st.cm, u_minus);
            acc.add_product(st.c0 - 2.0 * st.ang, u[k]);
            acc.add_product(st.cp, u[k + n_t]);
            acc.add_product(st.ang, u[row + (j + n_t - 1) % n_t]);
            acc.add_product(st.ang, u[row + (j + 1) % n_t]);
            acc.add_product(weights[k], u[k].exp());
            out[k] = acc.value();
        }
    }
    let row = (n_r - 1) * n_t;
    for j in 0..n_t {
        out[row + j] = u[row + j] - boundary[j];
    }
}

fn build_jacobian(
    grid: &PolarGrid,
    stencils: &[RingStencil],
    weights: &[f64],
    u: &[f64],
) -> BandedMatrix {
    let n_t = grid.n_t();
    let n_r = grid.n_r();
    let half = n_t / 2;
    let mut jac = BandedMatrix::zero(grid.len(), n_t, n_t);
    for i in 0..n_r - 1 {
        let st = &stencils[i];
        let row = i * n_t;
        for j in 0..n_t {
            let k = row + j;
            jac.set(k, k, st.c0 - 2.0 * st.ang + weights[k] * u[k].exp());
            jac.add(k, row + (j + 1) % n_t, st.ang);
            jac.add(k, row + (j + n_t - 1) % n_t, st.ang);
            jac.set(k, k + n_t, st.cp);
            if i == 0 {
                jac.add(k, (j + half) % n_t, st.cm);
            } else {
                jac.set(k, k - n_t, st.cm);
            }
        }
    }
    let row = (n_r - 1) * n_t;
    for j in 0..n_t {
        jac.set(row + j, row + j, 1.0);
    }
    jac
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

fn signed_max(v: &[f64]) -> f64 {
    v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
}

fn check_boundary(grid: &PolarGrid, boundary: &BoundaryTrace) -> Result<(), SolverError> {
    if boundary.len() != grid.n_t() {
        return Err(SolverError::BoundaryMismatch {
            expected: grid.n_t(),
            got: boundary.len(),
        });
    }
    Ok(())
}

/// F(u) = Δ_h u + |x|^{2N} H e^u, with the boundary ring carrying
/// (u - boundary) instead.
pub fn assemble_residual(
    h: &CoefficientField,
    n: u32,
    boundary: &BoundaryTrace,
    u: &Field,
) -> Result<Field, SolverError> {
    let grid = u.grid();
    check_boundary(grid, boundary)?;
    let stencils = ring_stencils(grid);
    let weights = coefficient_weights(grid, h, n);
    let mut out = vec![0.0; grid.len()];
    raw_residual(grid, &stencils, &weights, boundary.values(), u.values(), &mut out);
    Ok(Field::new(grid.clone(), out)?)
}

/// Discrete Laplacian of a field; the boundary ring of the result is zero.
pub fn discrete_laplacian(u: &Field) -> Field {
    let grid = u.grid();
    let stencils = ring_stencils(grid);
    let weights = vec![0.0; grid.len()];
    let boundary = u.values()[grid.index(grid.n_r() - 1, 0)..].to_vec();
    let mut out = vec![0.0; grid.len()];
    raw_residual(grid, &stencils, &weights, &boundary, u.values(), &mut out);
    Field::new(grid.clone(), out).expect("laplacian of a finite field is finite")
}

const ARMIJO_SLOPE: f64 = 1e-4;
const MAX_HALVINGS: usize = 30;
/// Largest max-norm change of u accepted in one Newton trial. The e^u term
/// doubles for every 0.7 added to u, so full steps beyond a few units leave
/// the region where the linear model means anything and backtracking from
/// them rarely recovers.
const MAX_STEP: f64 = 2.0;

/// Newton iteration with Armijo backtracking on the max-norm.
pub fn newton_solve(
    h: &CoefficientField,
    n: u32,
    boundary: &BoundaryTrace,
    u0: &Field,
    tol: f64,
    max_iterations: usize,
) -> Result<(Field, SolveReport), SolverError> {
    assert!(tol > 0.0, "tolerance must be positive, got {tol}");
    let grid = u0.grid().clone();
    check_boundary(&grid, boundary)?;
    let stencils = ring_stencils(&grid);
    let weights = coefficient_weights(&grid, h, n);
    let bvals = boundary.values();

    let mut u = u0.values().to_vec();
    let mut f = vec![0.0; grid.len()];
    raw_residual(&grid, &stencils, &weights, bvals, &u, &mut f);
    let mut norm = max_abs(&f);
    let mut best = (u.clone(), norm);
    let mut report = SolveReport::default();
    report.residuals.push(norm);

    for _ in 0..max_iterations {
        if norm <= tol {
            report.final_residual = norm;
            let field = Field::new(grid, best.0)?;
            return Ok((field, report));
        }
        let jac = build_jacobian(&grid, &stencils, &weights, &u);
        let lu = jac.factor()?;
        let mut step = f.iter().map(|&v| -v).collect::<Vec<f64>>();
        lu.solve(&mut step);

        let step_norm = max_abs(&step);
        let mut lambda = if step_norm > MAX_STEP { MAX_STEP / step_norm } else { 1.0 };
        let mut accepted = false;
        let mut trial = vec![0.0; u.len()];
        for _ in 0..=MAX_HALVINGS {
            for (t, (&base, &d)) in trial.iter_mut().zip(u.iter().zip(step.iter())) {
                *t = base + lambda * d;
            }
            raw_residual(&grid, &stencils, &weights, bvals, &trial, &mut f);
            let trial_norm = max_abs(&f);
            if trial_norm.is_finite() && trial_norm <= (1.0 - ARMIJO_SLOPE * lambda) * norm {
                std::mem::swap(&mut u, &mut trial);
                norm = trial_norm;
                accepted = true;
                break;
            }
            lambda /= 2.0;
        }
        if !accepted {
            report.final_residual = best.1;
            return Err(SolverError::Diverged {
                residual: best.1,
                halvings: MAX_HALVINGS,
                best: Box::new(Field::new(grid, best.0)?),
                report,
            });
        }
        report.iterations += 1;
        report.damping.push(lambda);
        report.residuals.push(norm);
        if norm < best.1 {
            best = (u.clone(), norm);
        }
    }
    if norm <= tol {
        report.final_residual = norm;
        let field = Field::new(grid, best.0)?;
        return Ok((field, report));
    }
    report.final_residual = best.1;
    Err(SolverError::MaxIterations {
        residual: best.1,
        iterations: max_iterations,
        best: Box::new(Field::new(grid, best.0)?),
        report,
    })
}

/// Solve the linear problem (Δ_h + weight)·w = rhs with Dirichlet data;
/// `weight` is a nodal diagonal (e.g. |y|^{2N} H e^{V}).
pub fn solve_linearized(
    weight: &Field,
    rhs: &Field,
    boundary: &BoundaryTrace,
) -> Result<Field, SolverError> {
    let grid = weight.grid().clone();
    check_boundary(&grid, boundary)?;
    assert_eq!(rhs.grid(), &grid, "rhs grid must match weight grid");
    let stencils = ring_stencils(&grid);
    // The Jacobian of u ↦ Δu + w·u at u = 0 with unit scaling: reuse the
    // nonlinear assembly with e^0 = 1.
    let zero = vec![0.0; grid.len()];
    let jac = build_jacobian(&grid, &stencils, weight.values(), &zero);
    let lu = jac.factor()?;
    let n_t = grid.n_t();
    let row = (grid.n_r() - 1) * n_t;
    let mut b = rhs.values().to_vec();
    for j in 0..n_t {
        b[row + j] = boundary.values()[j];
    }
    lu.solve(&mut b);
    Ok(Field::new(grid, b)?)
}

/// Fail when the grid cannot carry features of the given width at the
/// given radius (at least four cells per feature).
pub fn check_resolution(
    grid: &PolarGrid,
    ring_radius: f64,
    feature_width: f64,
) -> Result<(), SolverError> {
    let spacing = grid.max_spacing_near(ring_radius);
    let required = feature_width / 4.0;
    if spacing > required {
        return Err(SolverError::UnderResolved { spacing, required });
    }
    Ok(())
}

/// v(y) = u(δ y e^{iθ}) + 2(N+1) log δ sampled on the target grid.
pub fn rescale(
    u: &Field,
    n: u32,
    delta: f64,
    theta: f64,
    target: PolarGrid,
) -> Result<Field, SolverError> {
    assert!(delta > 0.0 && delta.is_finite(), "scale must be positive, got {delta}");
    let source_radius = u.grid().radius();
    if target.radius() * delta > source_radius * (1.0 + 1e-12) {
        return Err(SolverError::Grid(GridError::OutsideGrid {
            r: target.radius() * delta,
            radius: source_radius,
        }));
    }
    // Concentration cores land on the unit ring of the target. Their width
    // follows from the height read off the samples: μ = max u + 2(N+1)logδ
    // and core ~ √8·e^{-μ/2} (unit-coefficient normalization).
    let mu_est = signed_max(u.values()) + 2.0 * (n as f64 + 1.0) * delta.ln();
    let core_est = 8f64.sqrt() * (-mu_est / 2.0).exp();
    check_resolution(&target, 1.0, core_est)?;
    let shift = 2.0 * (n as f64 + 1.0) * delta.ln();
    let rot = Complex64::from_polar(delta, theta);
    let mut values = Vec::with_capacity(target.len());
    for i in 0..target.n_r() {
        for j in 0..target.n_t() {
            let y = target.point(i, j) * rot;
            values.push(u.interpolate(y)? + shift);
        }
    }
    Ok(Field::new(target, values)?)
}

/// Split u into (u - φ, φ) where φ is the harmonic extension of the
/// mean-free boundary oscillation; φ(0) = 0 by construction.
pub fn split_harmonic(u: &Field, disk: &GreensDisk) -> Result<(Field, Field), SolverError> {
    let grid = u.grid();
    assert!(
        (disk.radius - grid.radius()).abs() <= 1e-12 * grid.radius(),
        "disk radius {} must match grid radius {}",
        disk.radius,
        grid.radius()
    );
    let trace = u.boundary_trace()?;
    let mut phi = Vec::with_capacity(grid.len());
    for i in 0..grid.n_r() {
        for j in 0..grid.n_t() {
            phi.push(harmonic_extension(disk, &trace, grid.point(i, j))?);
        }
    }
    let phi = Field::new(grid.clone(), phi)?;
    let rest: Vec<f64> =
        u.values().iter().zip(phi.values()).map(|(&a, &b)| a - b).collect();
    Ok((Field::new(grid.clone(), rest)?, phi))
}

/// ∫ |x|^{2N} H e^u dA over the grid by midpoint cells in r and the exact
/// trapezoid in θ.
pub fn field_mass(u: &Field, h: &CoefficientField, n: u32) -> f64 {
    let grid = u.grid();
    let n_r = grid.n_r();
    let n_t = grid.n_t();
    let dt = TAU / n_t as f64;
    // Cell edges halfway between nodes; the innermost cell reaches r = 0.
    let mut edges = Vec::with_capacity(n_r + 1);
    edges.push(0.0);
    for i in 0..n_r - 1 {
        edges.push(0.5 * (grid.r(i) + grid.r(i + 1)));
    }
    edges.push(grid.radius());
    let mut ring_sums = Vec::with_capacity(n_r);
    for i in 0..n_r {
        let w = 0.5 * (edges[i + 1] * edges[i + 1] - edges[i] * edges[i]);
        let r2n = grid.r(i).powi(2 * n as i32);
        let mut row = Vec::with_capacity(n_t);
        for j in 0..n_t {
            let y = grid.point(i, j);
            row.push(w * r2n * h.value(y) * u.at(i, j).exp());
        }
        ring_sums.push(pairwise_sum(&row));
    }
    dt * pairwise_sum(&ring_sums)
}

/// Rule mapping each continuation scale δ to the target height μ.
#[derive(Debug, Clone)]
pub enum HeightRule {
    /// μ = -factor · log δ; heights grow as the scale shrinks.
    LogOfDelta { factor: f64 },
    /// Explicit heights, one per schedule entry, strictly increasing.
    Explicit(Vec<f64>),
}

/// Grid construction and solve policy shared along a continuation family.
#[derive(Debug, Clone)]
pub struct FamilyPolicy {
    pub domain_radius: f64,
    pub n_r: usize,
    pub n_t: usize,
    pub cluster_strength: f64,
    pub tol: f64,
    pub max_iterations: usize,
    pub warm_start: bool,
    pub heights: HeightRule,
}

impl Default for FamilyPolicy {
    fn default() -> Self {
        Self {
            domain_radius: 1.0,
            n_r: 160,
            n_t: 96,
            cluster_strength: 0.4,
            tol: 1e-8,
            max_iterations: 50,
            warm_start: true,
            heights: HeightRule::LogOfDelta { factor: 2.0 },
        }
    }
}

/// One converged member of a continuation family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub delta: f64,
    pub mu: f64,
    pub field: Field,
    pub report: SolveReport,
    pub mass: f64,
    pub boundary_oscillation: f64,
}

/// Ordered family of solutions sharing one coefficient; scales decrease
/// and heights increase along the list.
#[derive(Debug, Clone)]
pub struct ContinuationFamily {
    pub n: u32,
    pub coefficient: String,
    pub members: Vec<FamilyMember>,
}

fn family_grid(policy: &FamilyPolicy, delta: f64, core: f64) -> Result<PolarGrid, SolverError> {
    let width = (0.6 * delta).max(6.0 * core);
    // Origin relief widens the innermost rows, where the solution is flat,
    // and keeps the Newton residual floor well under the solve tolerance.
    // The relief adds (slope-1)·width of map length before the ring, so the
    // width stays a small fraction of delta to keep the ring clear of it.
    let relief_width = (0.15 * delta).min(0.2 * policy.domain_radius);
    let cluster = ClusterSpec::ring(delta, width, policy.cluster_strength)
        .with_origin_relief(4.0, relief_width);
    Ok(PolarGrid::clustered(policy.domain_radius, policy.n_r, policy.n_t, cluster)?)
}

fn member_height(policy: &FamilyPolicy, idx: usize, delta: f64) -> Result<f64, SolverError> {
    match &policy.heights {
        HeightRule::LogOfDelta { factor } => Ok(-factor * delta.ln()),
        HeightRule::Explicit(mus) => mus.get(idx).copied().ok_or(SolverError::BadHeights),
    }
}

/// Downscaled exact profile: u(x) = V(x/δ) - 2(N+1) log δ.
fn seeded_profile(params: &BubbleParams, delta: f64, n: u32) -> impl Fn(Complex64) -> f64 + '_ {
    let shift = 2.0 * (n as f64 + 1.0) * delta.ln();
    move |x: Complex64| params.value(x / delta) - shift
}

fn solve_member(
    h: &CoefficientField,
    n: u32,
    policy: &FamilyPolicy,
    delta: f64,
    mu: f64,
    previous: Option<&FamilyMember>,
) -> Result<FamilyMember, SolverError> {
    let h0 = h.value(Complex64::new(0.0, 0.0));
    let params = BubbleParams::new(n, mu, h0).map_err(|_| SolverError::BadHeights)?;
    let core = delta * params.core_scale();
    let grid = family_grid(policy, delta, core)?;
    check_resolution(&grid, delta, core)?;
    // Newton runs on the unknown minus the seed's value at the origin, so
    // the iterate is near zero on the innermost rings; the shift moves into
    // the coefficient amplitude. Small values round less under the
    // Laplacian's 1/spacing^2 weights, which keeps the achievable residual
    // below the solve tolerance on fine grids.
    let center = params.value(Complex64::new(0.0, 0.0));
    let shift = center - 2.0 * f64::from(n + 1) * delta.ln();
    let h_eff = h.scaled(shift.exp());
    let exact = Field::from_fn(grid.clone(), |y| params.value(y / delta) - center)?;
    let boundary = exact.boundary_trace()?;
    // Warm start: transport the previous member's correction to the new
    // scale, so only the coefficient-induced deviation must be re-solved.
    // A uniform coefficient makes the seed continuum-exact, so the previous
    // member's correction is grid truncation only, which has no meaning on
    // a different grid and is not worth transporting.
    let uniform = h
        .positivity_bounds(policy.domain_radius)
        .map(|(lo, hi)| hi - lo <= 1e-12 * hi.abs().max(1.0))
        .unwrap_or(false);
    let warm = match previous.filter(|_| policy.warm_start && !uniform) {
        None => None,
        Some(prev) => {
            let prev_params = BubbleParams::new(n, prev.mu, h0)
                .map_err(|_| SolverError::BadHeights)?;
            let prev_exact = seeded_profile(&prev_params, prev.delta, n);
            let prev_grid = prev.field.grid();
            // The correction is formed on the source grid, where the field
            // and its seed are both known at the nodes. Interpolating that
            // small smooth difference avoids the interpolation error of the
            // sharp seed itself, which the stencil would amplify.
            let mut corr_vals = Vec::with_capacity(prev_grid.len());
            for i in 0..prev_grid.n_r() {
                for j in 0..prev_grid.n_t() {
                    corr_vals.push(prev.field.at(i, j) - prev_exact(prev_grid.point(i, j)));
                }
            }
            let corr = Field::new(prev_grid.clone(), corr_vals)?;
            let ratio = prev.delta / delta;
            let source_radius = prev_grid.radius();
            let mut vals = exact.values().to_vec();
            let mut k = 0;
            for i in 0..grid.n_r() {
                for j in 0..grid.n_t() {
                    let mapped = grid.point(i, j) * ratio;
                    if mapped.norm() <= source_radius {
                        vals[k] += corr.interpolate(mapped)?;
                    }
                    k += 1;
                }
            }
            Some(Field::new(grid.clone(), vals)?)
        }
    };
    // A transported start that helps converges quickly; it gets a short
    // budget, with the plain seed as the fallback.
    let (hat, report) = match warm {
        Some(u0) => {
            let budget = (policy.max_iterations / 3).max(1);
            match newton_solve(&h_eff, n, &boundary, &u0, policy.tol, budget) {
                Ok(solved) => solved,
                Err(_) => {
                    newton_solve(&h_eff, n, &boundary, &exact, policy.tol, policy.max_iterations)?
                }
            }
        }
        None => newton_solve(&h_eff, n, &boundary, &exact, policy.tol, policy.max_iterations)?,
    };
    let values = hat.values().iter().map(|v| v + shift).collect();
    let field = Field::new(grid, values)?;
    let mass = field_mass(&field, h, n);
    let trace = field.boundary_trace()?;
    let osc = trace.values().iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
        - trace.values().iter().fold(f64::INFINITY, |m, &v| m.min(v));
    Ok(FamilyMember { delta, mu, field, report, mass, boundary_oscillation: osc })
}

/// Solve the family over a strictly decreasing schedule of scales. A failed
/// step is bisected once (geometric midpoint) before giving up.
pub fn continuation_family(
    h: &CoefficientField,
    n: u32,
    delta_schedule: &[f64],
    policy: &FamilyPolicy,
) -> Result<ContinuationFamily, SolverError> {
    for w in delta_schedule.windows(2) {
        if !(w[1] < w[0]) {
            return Err(SolverError::BadSchedule);
        }
    }
    if delta_schedule.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(SolverError::BadSchedule);
    }
    let mut mus = Vec::with_capacity(delta_schedule.len());
    for (idx, &d) in delta_schedule.iter().enumerate() {
        mus.push(member_height(policy, idx, d)?);
    }
    if mus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SolverError::BadHeights);
    }
    let mut members: Vec<FamilyMember> = Vec::with_capacity(delta_schedule.len());
    for (idx, &delta) in delta_schedule.iter().enumerate() {
        let mu = mus[idx];
        let prev = members.last();
        match solve_member(h, n, policy, delta, mu, prev) {
            Ok(m) => members.push(m),
            Err(first_err) => {
                // One bisection: solve at the geometric midpoint to shorten
                // the warm-start jump, then retry the scheduled scale.
                let from = prev.map(|m| m.delta).unwrap_or(1.0);
                let mid_delta = (from * delta).sqrt();
                let mid_mu = match &policy.heights {
                    HeightRule::LogOfDelta { factor } => -factor * mid_delta.ln(),
                    HeightRule::Explicit(_) => {
                        let prev_mu = prev.map(|m| m.mu).unwrap_or(mu - 1.0);
                        0.5 * (prev_mu + mu)
                    }
                };
                let mid = solve_member(h, n, policy, mid_delta, mid_mu, prev).map_err(|_| {
                    SolverError::FamilyStep { delta, source: Box::new(first_err) }
                })?;
                let retry = solve_member(h, n, policy, delta, mu, Some(&mid))
                    .map_err(|e| SolverError::FamilyStep { delta, source: Box::new(e) })?;
                members.push(retry);
            }
        }
    }
    Ok(ContinuationFamily {
        n,
        coefficient: h.expression().to_string(),
        members,
    })
}

/// Checkpoint I/O failures.
#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("i/o failure on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("checkpoint line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("unsupported checkpoint version: {0}")]
    Version(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Write a solution with its grid and coefficient so a run can resume.
pub fn save_checkpoint(
    path: &Path,
    field: &Field,
    n: u32,
    coefficient: &str,
) -> Result<(), CheckpointError> {
    let grid = field.grid();
    let mut text = String::new();
    text.push_str("bubblelab checkpoint v1\n");
    let _ = writeln!(text, "n {n}");
    let _ = writeln!(text, "coefficient {coefficient}");
    match grid.cluster() {
        None => {
            let _ = writeln!(
                text,
                "grid uniform {:.16e} {} {}",
                grid.radius(),
                grid.n_r(),
                grid.n_t()
            );
        }
        Some(c) => {
            let _ = writeln!(
                text,
                "grid clustered {:.16e} {} {} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
                grid.radius(),
                grid.n_r(),
                grid.n_t(),
                c.focus,
                c.width,
                c.strength,
                c.relief_slope,
                c.relief_width
            );
        }
    }
    let _ = writeln!(text, "values {}", field.values().len());
    for v in field.values() {
        let _ = writeln!(text, "{v:.16e}");
    }
    std::fs::write(path, text)
        .map_err(|source| CheckpointError::Io { path: path.display().to_string(), source })
}

/// Read back a checkpoint written by `save_checkpoint`.
pub fn load_checkpoint(path: &Path) -> Result<(Field, u32, String), CheckpointError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CheckpointError::Io { path: path.display().to_string(), source })?;
    let lines: Vec<&str> = text.lines().collect();
    let fail = |line: usize, message: &str| CheckpointError::Format {
        line: line + 1,
        message: message.to_string(),
    };
    let line = |i: usize| lines.get(i).copied().ok_or_else(|| fail(i, "unexpected end of file"));
    let header = line(0)?;
    if header != "bubblelab checkpoint v1" {
        return Err(CheckpointError::Version(header.to_string()));
    }
    let n: u32 = line(1)?
        .strip_prefix("n ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| fail(1, "expected `n <integer>`"))?;
    let coefficient = line(2)?
        .strip_prefix("coefficient ")
        .ok_or_else(|| fail(2, "expected `coefficient <expression>`"))?
        .to_string();
    let parts: Vec<&str> = line(3)?.split_whitespace().collect();
    let grid = match parts.as_slice() {
        ["grid", "uniform", r, n_r, n_t] => {
            let radius: f64 = r.parse().map_err(|_| fail(3, "bad radius"))?;
            let n_r: usize = n_r.parse().map_err(|_| fail(3, "bad n_r"))?;
            let n_t: usize = n_t.parse().map_err(|_| fail(3, "bad n_t"))?;
            PolarGrid::uniform(radius, n_r, n_t)?
        }
        ["grid", "clustered", r, n_r, n_t, focus, width, strength, relief_slope, relief_width] => {
            let radius: f64 = r.parse().map_err(|_| fail(3, "bad radius"))?;
            let n_r: usize = n_r.parse().map_err(|_| fail(3, "bad n_r"))?;
            let n_t: usize = n_t.parse().map_err(|_| fail(3, "bad n_t"))?;
            let cluster = ClusterSpec {
                focus: focus.parse().map_err(|_| fail(3, "bad focus"))?,
                width: width.parse().map_err(|_| fail(3, "bad width"))?,
                strength: strength.parse().map_err(|_| fail(3, "bad strength"))?,
                relief_slope: relief_slope.parse().map_err(|_| fail(3, "bad relief slope"))?,
                relief_width: relief_width.parse().map_err(|_| fail(3, "bad relief width"))?,
            };
            PolarGrid::clustered(radius, n_r, n_t, cluster)?
        }
        _ => return Err(fail(3, "expected `grid uniform ...` or `grid clustered ...`")),
    };
    let count: usize = line(4)?
        .strip_prefix("values ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| fail(4, "expected `values <count>`"))?;
    if count != grid.len() {
        return Err(fail(4, "value count does not match grid size"));
    }
    let mut values = Vec::with_capacity(count);
    for k in 0..count {
        let i = 5 + k;
        values.push(line(i)?.trim().parse::<f64>().map_err(|_| fail(i, "bad value"))?);
    }
    Ok((Field::new(grid, values)?, n, coefficient))
}
