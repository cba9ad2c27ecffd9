//! Scratch: retuning the solver unit tests. Delete before final.

use bubblelab_core::coefficient::CoefficientField;
use bubblelab_core::green::GreensDisk;
use bubblelab_core::grid::{ClusterSpec, Field, PolarGrid};
use bubblelab_core::profiles::BubbleParams;
use bubblelab_core::solver::{
    assemble_residual, discrete_laplacian, newton_solve, split_harmonic,
};

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn main() {
    // T1: exact profile residual refinement, mu=2 h0=1 uniform R=2.
    let params = BubbleParams::new(1, 2.0, 1.0).unwrap();
    let h = CoefficientField::constant(1.0);
    let mut sups = Vec::new();
    for (n_r, n_t) in [(96usize, 64usize), (192, 128)] {
        let grid = PolarGrid::uniform(2.0, n_r, n_t).unwrap();
        let u = Field::from_fn(grid.clone(), |y| params.value(y)).unwrap();
        let b = u.boundary_trace().unwrap();
        let res = assemble_residual(&h, 1, &b, &u).unwrap();
        sups.push(max_abs(&res.values()[..(n_r - 1) * n_t]));
    }
    println!("T1: coarse={:.4e} fine={:.4e} ratio={:.3}", sups[0], sups[1], sups[0] / sups[1]);

    // T2: exact start, broad bubble, tol 1e-8.
    for &(h0, n_r, n_t) in &[(0.05, 96usize, 128usize), (0.05, 192, 128), (0.2, 96, 128)] {
        let params = BubbleParams::new(1, 2.0, h0).unwrap();
        let grid = PolarGrid::uniform(2.0, n_r, n_t).unwrap();
        let exact = Field::from_fn(grid.clone(), |y| params.value(y)).unwrap();
        let b = exact.boundary_trace().unwrap();
        let hc = CoefficientField::constant(h0);
        match newton_solve(&hc, 1, &b, &exact, 1e-8, 20) {
            Ok((u, rep)) => {
                let drift: f64 = (0..grid.len())
                    .map(|k| (u.values()[k] - exact.values()[k]).abs())
                    .fold(0.0, f64::max);
                println!(
                    "T2 h0={h0} ({n_r},{n_t}): its={} res={:?} damp={:?} drift={:.2e}",
                    rep.iterations, rep.residuals, rep.damping, drift
                );
            }
            Err(e) => println!("T2 h0={h0} ({n_r},{n_t}): ERR {e}"),
        }
    }

    // T3: perturbed start, mu=6 broad, clustered, tol 1e-8.
    for &h0 in &[0.005, 0.02] {
        let params = BubbleParams::new(1, 6.0, h0).unwrap();
        let cluster = ClusterSpec::ring(1.0, 0.85, 0.4).with_origin_relief(4.0, 0.4);
        let grid = PolarGrid::clustered(2.0, 160, 128, cluster).unwrap();
        let exact = Field::from_fn(grid.clone(), |y| params.value(y)).unwrap();
        let b = exact.boundary_trace().unwrap();
        let radius = grid.radius();
        let start = Field::from_fn(grid.clone(), |y| {
            let bump = 1.0 - y.norm_sqr() / (radius * radius);
            params.value(y) + 0.1 * bump
        })
        .unwrap();
        let hc = CoefficientField::constant(h0);
        match newton_solve(&hc, 1, &b, &start, 1e-8, 30) {
            Ok((_, rep)) => println!("T3 h0={h0}: its={} res={:?}", rep.iterations, rep.residuals),
            Err(e) => println!("T3 h0={h0}: ERR {e}"),
        }
    }

    // T4: tilted coefficient, tol 1e-8.
    let params = BubbleParams::new(1, 4.0, 1.0).unwrap();
    let cluster = ClusterSpec::ring(1.0, 0.6, 0.4);
    let grid = PolarGrid::clustered(2.0, 128, 64, cluster).unwrap();
    let tilt = CoefficientField::parse("1 + 0.3*x1").unwrap();
    let exact = Field::from_fn(grid.clone(), |y| params.value(y)).unwrap();
    let b = exact.boundary_trace().unwrap();
    match newton_solve(&tilt, 1, &b, &exact, 1e-8, 30) {
        Ok((u, rep)) => {
            let drift: f64 = (0..grid.len())
                .map(|k| (u.values()[k] - exact.values()[k]).abs())
                .fold(0.0, f64::max);
            println!(
                "T4: its={} final={:.3e} drift={:.3}",
                rep.iterations, rep.final_residual, drift
            );
        }
        Err(e) => println!("T4: ERR {e}"),
    }

    // T7: harmonic part of the split under refinement, mu=3.
    let params = BubbleParams::new(1, 3.0, 1.0).unwrap();
    let mut sups = Vec::new();
    for (n_r, n_t) in [(64usize, 64usize), (128, 128)] {
        let grid = PolarGrid::uniform(2.0, n_r, n_t).unwrap();
        let disk = GreensDisk::new(2.0);
        let u = Field::from_fn(grid.clone(), |y| {
            params.value(y) + 0.15 * (y.re * y.re - y.im * y.im)
        })
        .unwrap();
        let (_, phi) = split_harmonic(&u, &disk).unwrap();
        let lap = discrete_laplacian(&phi);
        sups.push(max_abs(&lap.values()[..(n_r - 1) * n_t]));
    }
    println!("T7: coarse={:.4e} fine={:.4e} ratio={:.3}", sups[0], sups[1], sups[0] / sups[1]);
}
