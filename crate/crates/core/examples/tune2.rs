//! Scratch: anatomy of the Newton stall on the exact-bubble problem.

use bubblelab_core::coefficient::CoefficientField;
use bubblelab_core::grid::{Field, PolarGrid};
use bubblelab_core::profiles::BubbleParams;
use bubblelab_core::solver::{assemble_residual, newton_solve, solve_linearized};

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

fn main() {
    let params = BubbleParams::new(1, 2.0, 1.0).unwrap();
    let grid = PolarGrid::uniform(2.0, 192, 128).unwrap();
    let h = CoefficientField::constant(1.0);
    let exact = Field::from_fn(grid.clone(), |y| params.value(y)).unwrap();
    let boundary = exact.boundary_trace().unwrap();
    // Run Newton to its stall; grab the best iterate.
    let err = newton_solve(&h, 1, &boundary, &exact, 1e-12, 6);
    let u = match err {
        Ok((u, r)) => {
            println!("converged?! {:?}", r.residuals);
            u
        }
        Err(bubblelab_core::solver::SolverError::Diverged { best, report, .. })
        | Err(bubblelab_core::solver::SolverError::MaxIterations { best, report, .. }) => {
            println!("residual path: {:?}", report.residuals);
            *best
        }
        Err(e) => panic!("{e:?}"),
    };
    let f = assemble_residual(&h, 1, &boundary, &u).unwrap();
    let norm = max_abs(f.values());
    println!("stall norm: {:.3e}", norm);

    // Solve J s = -F via the linearized path (same matrix assembly).
    let weight = Field::from_fn(grid.clone(), |y| {
        y.norm_sqr() * params.value(y).exp()
    })
    .unwrap();
    // weight must be evaluated at u, not at exact; u is close enough for scale.
    let rhs_vals: Vec<f64> = f.values().iter().map(|&v| -v).collect();
    let rhs = Field::new(grid.clone(), rhs_vals).unwrap();
    let zero_trace =
        bubblelab_core::green::BoundaryTrace::new(vec![0.0; grid.n_t()]).unwrap();
    let s = solve_linearized(&weight, &rhs, &zero_trace).unwrap();
    let snorm = max_abs(s.values());
    println!("step norm: {:.3e}  amplification |s|/|F|: {:.3e}", snorm, snorm / norm);

    // Residual at u + lambda s for a ladder of lambdas.
    for lam in [1.0, 0.5, 0.25, 0.125, 1.0 / 16.0, 1.0 / 256.0] {
        let trial_vals: Vec<f64> = u
            .values()
            .iter()
            .zip(s.values())
            .map(|(&a, &b)| a + lam * b)
            .collect();
        let trial = Field::new(grid.clone(), trial_vals).unwrap();
        let tf = assemble_residual(&h, 1, &boundary, &trial).unwrap();
        println!(
            "lambda {:.4}: |F| = {:.6e}  (need <= {:.6e})",
            lam,
            max_abs(tf.values()),
            (1.0 - 1e-4 * lam) * norm
        );
    }

    // Inverse power iteration for ||J^{-1}||_2-ish scale.
    let mut v: Vec<f64> = (0..grid.len())
        .map(|k| ((k * 2654435761) % 1000) as f64 / 1000.0 - 0.5)
        .collect();
    let mut growth = 0.0;
    for _ in 0..12 {
        let nv = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
        for x in v.iter_mut() {
            *x /= nv;
        }
        let rhs = Field::new(grid.clone(), v.clone()).unwrap();
        let w = solve_linearized(&weight, &rhs, &zero_trace).unwrap();
        growth = (w.values().iter().map(|x| x * x).sum::<f64>()).sqrt();
        v = w.values().to_vec();
    }
    println!("inverse-power growth per step (~1/sigma_min): {:.3e}", growth);
}
