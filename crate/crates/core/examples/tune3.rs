//! Scratch harness: value-centered manufactured ladders for the convergence
//! study. Delete before final.

use bubblelab_core::coefficient::CoefficientField;
use bubblelab_core::green::BoundaryTrace;
use bubblelab_core::grid::{ClusterSpec, Field, PolarGrid};
use bubblelab_core::profiles::BubbleParams;
use bubblelab_core::solver::{assemble_residual, newton_solve, SolverError};
use num_complex::Complex64;
use std::time::Instant;

fn value_centered(n: u32, mu: f64) -> BubbleParams {
    let t_abs = 1.5f64;
    let k = (mu / 2.0).exp() - 1.0;
    let c = k / (t_abs * t_abs);
    let np1 = (n + 1) as f64;
    let h0 = 8.0 * np1 * np1 * c * (-mu).exp();
    BubbleParams::with_offset(n, mu, h0, Complex64::new(t_abs - 1.0, 0.0), 0.0).unwrap()
}

struct LevelOut {
    trunc: f64,
    its: usize,
    res: f64,
    sup: f64,
    ok: bool,
    secs: f64,
}

fn run_level(params: &BubbleParams, grid: PolarGrid, tol: f64) -> LevelOut {
    let t0 = Instant::now();
    let n = params.n;
    let boundary = BoundaryTrace::from_fn(grid.n_t(), |th| {
        params.value(Complex64::from_polar(grid.radius(), th))
    })
    .unwrap();
    let exact = Field::from_fn(grid, |y| params.value(y)).unwrap();
    let hfield = CoefficientField::constant(params.h0);
    let fres = assemble_residual(&hfield, n, &boundary, &exact).unwrap();
    let trunc = fres.values().iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let sup = |u: &Field| {
        u.values()
            .iter()
            .zip(exact.values())
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()))
    };
    match newton_solve(&hfield, n, &boundary, &exact, tol, 30) {
        Ok((u, report)) => LevelOut {
            trunc,
            its: report.iterations,
            res: report.final_residual,
            sup: sup(&u),
            ok: true,
            secs: t0.elapsed().as_secs_f64(),
        },
        Err(
            SolverError::Diverged { residual, best, report, .. }
            | SolverError::MaxIterations { residual, best, report, .. },
        ) => LevelOut {
            trunc,
            its: report.iterations,
            res: residual,
            sup: sup(&best),
            ok: false,
            secs: t0.elapsed().as_secs_f64(),
        },
        Err(e) => panic!("structural failure: {e}"),
    }
}

fn ladder(tag: &str, params: &BubbleParams, grids: Vec<PolarGrid>, tol: f64) {
    println!("--- {tag} ---");
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for grid in grids {
        let label = format!("({},{})", grid.n_r(), grid.n_t());
        let nt = grid.n_t() as f64;
        let out = run_level(params, grid, tol);
        println!(
            "  {:>10}  trunc={:.3e}  its={:>2}  res={:.3e} ok={}  sup={:.4e}  {:.1}s",
            label, out.trunc, out.its, out.res, out.ok, out.sup, out.secs
        );
        if out.ok {
            errs.push(out.sup);
            hs.push(1.0 / nt);
        }
    }
    if errs.len() >= 3 {
        let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
        let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let mx = lx.iter().sum::<f64>() / lx.len() as f64;
        let my = ly.iter().sum::<f64>() / ly.len() as f64;
        let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
        println!("  LS order = {:.3} over {} levels", num / den, errs.len());
    }
}

fn main() {
    let levels: [(usize, usize); 4] = [(64, 128), (96, 192), (144, 288), (216, 432)];

    // N1 mu4: relief sigma=4, no dip.
    {
        let p = value_centered(1, 4.0);
        let pk = p.maxima()[0].norm();
        let grids = levels
            .iter()
            .map(|&(nr, nt)| {
                let spec = ClusterSpec::ring(pk, 0.5, 0.0).with_origin_relief(4.0, 0.2);
                PolarGrid::clustered(2.0, nr, nt, spec).unwrap()
            })
            .collect();
        ladder("N1 mu4  R=2 relief4", &p, grids, 1e-10);
    }

    // N1 mu6: relief sigma=6 + dip 0.35.
    {
        let p = value_centered(1, 6.0);
        let pk = p.maxima()[0].norm();
        let grids = levels
            .iter()
            .map(|&(nr, nt)| {
                let spec = ClusterSpec::ring(pk, 0.5, 0.35).with_origin_relief(6.0, 0.2);
                PolarGrid::clustered(2.0, nr, nt, spec).unwrap()
            })
            .collect();
        ladder("N1 mu6  R=2 relief6 dip.35", &p, grids, 1e-10);
    }

    // N2 mu4: relief sigma=6 + dip 0.35.
    {
        let p = value_centered(2, 4.0);
        let pk = p.maxima()[0].norm();
        let grids = levels
            .iter()
            .map(|&(nr, nt)| {
                let spec = ClusterSpec::ring(pk, 0.5, 0.35).with_origin_relief(6.0, 0.2);
                PolarGrid::clustered(2.0, nr, nt, spec).unwrap()
            })
            .collect();
        ladder("N2 mu4  R=2 relief6 dip.35", &p, grids, 1e-10);
    }

    // N2 mu6: clipped domains, uniform grids. Scan R first at base level.
    {
        let p = value_centered(2, 6.0);
        let pk = p.maxima()[0].norm();
        for frac in [0.85f64, 0.9, 0.95] {
            let r = frac * pk;
            let grid = PolarGrid::uniform(r, 64, 128).unwrap();
            let out = run_level(&p, grid, 1e-10);
            println!(
                "N2 mu6 R={:.3} ({:.2}pk) base: trunc={:.3e} its={} res={:.3e} ok={} sup={:.3e}",
                r, frac, out.trunc, out.its, out.res, out.ok, out.sup
            );
        }
        let r = 0.9 * pk;
        let grids = levels
            .iter()
            .map(|&(nr, nt)| PolarGrid::uniform(r, nr, nt).unwrap())
            .collect();
        ladder(&format!("N2 mu6  clipped R={r:.3} uniform"), &p, grids, 1e-10);
    }
}
