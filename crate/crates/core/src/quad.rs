//! Adaptive quadrature on intervals, rays and polar regions.
//!
//! The building block is a 15-point Gauss–Kronrod rule: the embedded 7-point
//! Gauss result provides the error estimate for each panel. Panels are kept in
//! a worst-first queue and bisected until the accumulated error estimate meets
//! the requested tolerance. Everything here is deterministic: panel order is
//! tie-broken by insertion index, and multi-panel totals are reduced with
//! pairwise summation so results do not depend on evaluation order.
//!
//! Improper integrals over `[a, ∞)` are mapped to `(0, 1]` with
//! `x = a + (1 - t)/t`; the rule is open so the singular endpoint is never
//! evaluated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod abscissae for the 15-point rule on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.000_000_000_000_000_0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Weights of the embedded 7-point Gauss rule (applied at XGK[1], [3], [5], [7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration: the value and a conservative error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Tolerance pair for adaptive refinement. A panel set is accepted once the
/// summed error estimate drops below `abs + rel * |value|`.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
}

impl QuadTol {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// Library-wide default: absolute 1e-10, relative 1e-8.
    pub const fn default_tol() -> Self {
        Self::new(1e-10, 1e-8)
    }

    fn target(&self, value: f64) -> f64 {
        self.abs + self.rel * value.abs()
    }
}

impl Default for QuadTol {
    fn default() -> Self {
        Self::default_tol()
    }
}

/// Single Gauss–Kronrod 15 panel over [a, b].
fn qk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> QuadResult {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);

    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();

    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let value = kronrod * h;
    let raw = ((kronrod - gauss) * h).abs();
    // Rescale the raw difference the way QUADPACK does, so smooth panels are
    // not assigned wildly optimistic estimates.
    let scale = abs_sum * h.abs();
    let error = if scale > 0.0 && raw > 0.0 {
        scale * (200.0 * raw / scale).powf(1.5).min(1.0)
    } else {
        raw
    };
    QuadResult {
        value,
        error: error.max(f64::EPSILON * 50.0 * scale),
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Worst error first; ties broken by insertion order for determinism.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Deterministic pairwise summation; independent of accumulation threading.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Adaptively integrate `f` over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: QuadTol) -> QuadResult {
    integrate_with_limit(&mut f, a, b, tol, 2000)
}

fn integrate_with_limit<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: QuadTol,
    max_panels: usize,
) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0 };
    }
    let mut heap = BinaryHeap::new();
    let first = qk15(f, a, b);
    let mut seq = 0u64;
    heap.push(Panel { a, b, value: first.value, error: first.error, seq });
    let mut total_value = first.value;
    let mut total_error = first.error;

    while heap.len() < max_panels && total_error > tol.target(total_value) {
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in f64; keep it and stop refining it.
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        let left = qk15(f, worst.a, mid);
        let right = qk15(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        seq += 1;
        heap.push(Panel { a: worst.a, b: mid, value: left.value, error: left.error, seq });
        seq += 1;
        heap.push(Panel { a: mid, b: worst.b, value: right.value, error: right.error, seq });
    }

    // Re-accumulate from the panels in deterministic (left-to-right) order to
    // shed the drift collected by the incremental updates above.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
    QuadResult {
        value: pairwise_sum(&values),
        error: pairwise_sum(&errors),
    }
}

/// Adaptively integrate `f` over `[a, ∞)` via `x = a + (1 - t)/t`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, tol: QuadTol) -> QuadResult {
    let mut g = |t: f64| {
        let x = a + (1.0 - t) / t;
        f(x) / (t * t)
    };
    integrate_with_limit(&mut g, 0.0, 1.0, tol, 2000)
}

/// Integrate `f(ρ, φ)·ρ` over the polar patch `ρ ∈ [0, ρ_max(φ)]`, `φ ∈ [0, 2π)`
/// around `center`; `f` receives the global Cartesian point. Used for disk and
/// star-shaped regions described in polar coordinates about an interior point.
pub fn integrate_polar_patch<F, G>(
    center: (f64, f64),
    mut rho_max: G,
    mut f: F,
    tol: QuadTol,
) -> QuadResult
where
    F: FnMut(f64, f64) -> f64,
    G: FnMut(f64) -> f64,
{
    let inner_tol = QuadTol::new(tol.abs / 20.0, tol.rel / 20.0);
    let mut inner_error = 0.0f64;
    let mut outer = |phi: f64| {
        let (sin_phi, cos_phi) = phi.sin_cos();
        let top = rho_max(phi);
        let inner = integrate_with_limit(
            &mut |rho: f64| {
                let x = center.0 + rho * cos_phi;
                let y = center.1 + rho * sin_phi;
                f(x, y) * rho
            },
            0.0,
            top,
            inner_tol,
            600,
        );
        inner_error = inner_error.max(inner.error);
        inner.value
    };
    let result = integrate_with_limit(
        &mut outer,
        0.0,
        std::f64::consts::TAU,
        QuadTol::new(tol.abs * 0.5, tol.rel * 0.5),
        800,
    );
    QuadResult {
        value: result.value,
        error: result.error + inner_error * std::f64::consts::TAU,
    }
}
