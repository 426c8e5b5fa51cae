//! The three stencil families and their quadrature quality: exact second
//! moments for the mean stencils, antipodal symmetry for order statistics.
//!
//! ```bash
//! cargo run --release --example stencil_gallery
//! ```

use homodiff::*;

fn second_moment(s: &SphereStencil, axis: usize) -> f64 {
    (0..s.len())
        .map(|i| s.weights()[i] * s.direction(i)[axis] * s.direction(i)[axis])
        .sum()
}

fn main() -> Result<()> {
    let h = 0.01;

    let circle = build_stencil(2, h, 16, StencilKind::UniformCircle)?;
    println!(
        "UniformCircle K=16: radius {:.4}, mean of d_x^2 = {:.10} (exact 0.5)",
        circle.radius(),
        second_moment(&circle, 0)
    );

    let gauss = build_stencil(3, h, 128, StencilKind::GaussAzimuth3D)?;
    println!(
        "GaussAzimuth3D K=128: {} nodes, mean of d_z^2 = {:.10} (exact 1/3)",
        gauss.len(),
        second_moment(&gauss, 2)
    );

    let fib = build_stencil(3, h, 128, StencilKind::SymmetrizedFibonacci3D)?;
    println!(
        "SymmetrizedFibonacci3D K=128: antipodally symmetric = {}",
        fib.is_antipodally_symmetric()
    );

    println!("\nfirst rows of the circle stencil CSV:");
    for line in circle.to_csv().lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}
