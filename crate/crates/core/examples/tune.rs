//! Scratch measurement harness; not part of the test surface.

use bubblelab_core::coefficient::CoefficientField;
use bubblelab_core::grid::{ClusterSpec, Field, PolarGrid};
use bubblelab_core::profiles::BubbleParams;
use bubblelab_core::solver::{assemble_residual, newton_solve};

fn truncation(n: u32, mu: f64, n_r: usize, n_t: usize, cluster: bool) -> f64 {
    let params = BubbleParams::new(n, mu, 1.0).unwrap();
    let grid = if cluster {
        let core = params.core_scale();
        let spec = ClusterSpec::ring(1.0, (6.0 * core).min(0.9), 0.4);
        PolarGrid::clustered(2.0, n_r, n_t, spec).unwrap()
    } else {
        PolarGrid::uniform(2.0, n_r, n_t).unwrap()
    };
    let h = CoefficientField::constant(1.0);
    let u = Field::from_fn(grid.clone(), |y| params.value(y)).unwrap();
    let boundary = u.boundary_trace().unwrap();
    let res = assemble_residual(&h, n, &boundary, &u).unwrap();
    res.values()[..(grid.n_r() - 1) * grid.n_t()]
        .iter()
        .fold(0.0f64, |m, &x| m.max(x.abs()))
}

fn solve_err(n: u32, mu: f64, n_r: usize, n_t: usize) -> (f64, Vec<f64>) {
    let params = BubbleParams::new(n, mu, 1.0).unwrap();
    let core = params.core_scale();
    let spec = ClusterSpec::ring(1.0, (6.0 * core).min(0.9), 0.4);
    let grid = PolarGrid::clustered(2.0, n_r, n_t, spec).unwrap();
    let h = CoefficientField::constant(1.0);
    let exact = Field::from_fn(grid.clone(), |y| params.value(y)).unwrap();
    let boundary = exact.boundary_trace().unwrap();
    let (u, report) = newton_solve(&h, n, &boundary, &exact, 1e-10, 30).unwrap();
    let err = (0..grid.len())
        .map(|k| (u.values()[k] - exact.values()[k]).abs())
        .fold(0.0, f64::max);
    (err, report.residuals)
}

fn main() {
    println!("== truncation (uniform) ==");
    for (n_r, n_t) in [(96, 64), (192, 128), (384, 256)] {
        println!("N=1 mu=2 {}x{}: {:.3e}", n_r, n_t, truncation(1, 2.0, n_r, n_t, false));
    }
    println!("== truncation (clustered) ==");
    for &mu in &[4.0, 6.0] {
        for n in [1u32, 2] {
            for (n_r, n_t) in [(96, 64), (192, 128), (384, 256)] {
                println!(
                    "N={} mu={} {}x{}: {:.3e}",
                    n, mu, n_r, n_t, truncation(n, mu, n_r, n_t, true)
                );
            }
        }
    }
    println!("== newton exact start, N=1 mu=2 uniform 192x128 ==");
    let params = BubbleParams::new(1, 2.0, 1.0).unwrap();
    let grid = PolarGrid::uniform(2.0, 192, 128).unwrap();
    let h = CoefficientField::constant(1.0);
    let exact = Field::from_fn(grid.clone(), |y| params.value(y)).unwrap();
    let boundary = exact.boundary_trace().unwrap();
    let (_, report) = newton_solve(&h, 1, &boundary, &exact, 1e-10, 30).unwrap();
    println!("iterations {} residuals {:?}", report.iterations, report.residuals);

    println!("== solve error vs closed form, clustered ==");
    for &mu in &[4.0, 6.0] {
        for n in [1u32, 2] {
            let mut errs = Vec::new();
            for (n_r, n_t) in [(96, 64), (192, 128), (384, 256)] {
                let t0 = std::time::Instant::now();
                let (e, rs) = solve_err(n, mu, n_r, n_t);
                errs.push(e);
                println!(
                    "N={} mu={} {}x{}: err {:.3e} iters {} last {:.2e} [{:.1?}]",
                    n,
                    mu,
                    n_r,
                    n_t,
                    e,
                    rs.len() - 1,
                    rs.last().unwrap(),
                    t0.elapsed()
                );
            }
            let p1 = (errs[0] / errs[1]).log2();
            let p2 = (errs[1] / errs[2]).log2();
            println!("  observed orders: {:.2}, {:.2}", p1, p2);
        }
    }
}
