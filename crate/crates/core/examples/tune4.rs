//! Scratch: profile_residual truncation scan. Delete before final.

use bubblelab_core::grid::{ClusterSpec, PolarGrid};
use bubblelab_core::profiles::{profile_residual, BubbleParams};

fn scan(tag: &str, params: &BubbleParams, grid: &PolarGrid) -> f64 {
    let res = profile_residual(params, grid).unwrap();
    let max = res.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("{tag}: max={max:.3e}");
    max
}

fn grid_for(nr: usize, nt: usize) -> PolarGrid {
    let spec = ClusterSpec::ring(1.0, 0.5, 0.0).with_origin_relief(2.0, 0.6);
    PolarGrid::clustered(3.0, nr, nt, spec).unwrap()
}

fn main() {
    let p1 = BubbleParams::new(1, 4.0, 1e-5).unwrap();
    let c = scan("N1 h0=1e-5 s2w.6 (128,192)", &p1, &grid_for(128, 192));
    let f = scan("N1 h0=1e-5 s2w.6 (256,384)", &p1, &grid_for(256, 384));
    println!("  ratio = {:.3}", c / f);

    let p0 = BubbleParams::new(0, 4.0, 2.5e-6).unwrap();
    scan("N0 h0=2.5e-6 s2w.6 (128,192)", &p0, &grid_for(128, 192));
}
