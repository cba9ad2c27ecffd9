//! Scratch: continuation family behavior at default policy. Delete before final.

use bubblelab_core::coefficient::CoefficientField;
use bubblelab_core::solver::{continuation_family, FamilyPolicy};
use std::time::Instant;

fn main() {
    let h = CoefficientField::constant(1.0);
    let deep = FamilyPolicy { n_r: 320, n_t: 192, cluster_strength: 0.45, ..FamilyPolicy::default() };
    println!("--- probe delta 0.1 cold ---");
    probe(&h, &deep, 0.1);

    // Tilted coefficient family, exercised by the acceptance run later.
    let tilt = CoefficientField::parse("1 + 0.25*x1").unwrap();
    let t1 = Instant::now();
    match continuation_family(&tilt, 1, &[0.3, 0.2], &FamilyPolicy::default()) {
        Ok(fam) => {
            for m in &fam.members {
                println!(
                    "tilt delta={:.3} mu={:.4} its={} res={:.3e} mass={:.6}",
                    m.delta, m.mu, m.report.iterations, m.report.final_residual, m.mass
                );
            }
            println!("elapsed {:.1}s", t1.elapsed().as_secs_f64());
        }
        Err(e) => println!("tilt ERR {e} after {:.1}s", t1.elapsed().as_secs_f64()),
    }
}

fn probe(h: &CoefficientField, policy: &FamilyPolicy, delta: f64) {
    use bubblelab_core::grid::{ClusterSpec, Field, PolarGrid};
    use bubblelab_core::profiles::BubbleParams;
    use bubblelab_core::solver::newton_solve;
    use num_complex::Complex64;
    let t0 = Instant::now();
    let mu = -2.0 * delta.ln();
    let params = BubbleParams::new(1, mu, 1.0).unwrap();
    let core = delta * params.core_scale();
    let width = (0.6 * delta).max(6.0 * core);
    let relief_width = (0.10 * delta).min(0.2 * policy.domain_radius);
    let cluster = ClusterSpec::ring(delta, width, policy.cluster_strength)
        .with_origin_relief(6.0, relief_width);
    let grid = PolarGrid::clustered(policy.domain_radius, policy.n_r, policy.n_t, cluster).unwrap();
    let center = params.value(Complex64::new(0.0, 0.0));
    let shift = center - 4.0 * delta.ln();
    let h_eff = h.scaled(shift.exp());
    let exact = Field::from_fn(grid.clone(), |y| params.value(y / delta) - center).unwrap();
    let boundary = exact.boundary_trace().unwrap();
    match newton_solve(&h_eff, 1, &boundary, &exact, policy.tol, policy.max_iterations) {
        Ok((_, rep)) => {
            println!("its={} final={:.3e}", rep.iterations, rep.final_residual);
            for (k, (r, d)) in rep.residuals.iter().zip(rep.damping.iter().chain(std::iter::repeat(&f64::NAN))).enumerate() {
                println!("  it {k}: res={r:.4e} damping={d:.3}");
            }
        }
        Err(e) => println!("ERR {e}"),
    }
    println!("probe elapsed {:.1}s", t0.elapsed().as_secs_f64());
}

fn run(h: &CoefficientField, policy: &FamilyPolicy) {
    let t0 = Instant::now();
    match continuation_family(h, 1, &[0.2, 0.1, 0.05], policy) {
        Ok(fam) => {
            for m in &fam.members {
                // Harnack-style deficit directly from the field.
                let g = m.field.grid().clone();
                let mut deficit = f64::NEG_INFINITY;
                for i in 0..g.n_r() {
                    for j in 0..g.n_t() {
                        let y = g.point(i, j);
                        deficit = deficit.max(m.field.at(i, j) + 4.0 * y.norm().ln());
                    }
                }
                println!(
                    "delta={:.3} mu={:.4} its={} res={:.3e} mass={:.6} (16pi={:.6}) osc={:.3e} deficit={:.3}",
                    m.delta,
                    m.mu,
                    m.report.iterations,
                    m.report.final_residual,
                    m.mass,
                    16.0 * std::f64::consts::PI,
                    m.boundary_oscillation,
                    deficit
                );
            }
            println!("elapsed {:.1}s", t0.elapsed().as_secs_f64());
        }
        Err(e) => println!("ERR {e} after {:.1}s", t0.elapsed().as_secs_f64()),
    }
}
