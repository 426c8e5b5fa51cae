//! One spherical-mean step (p = 2) grows the support of a compact bump by
//! exactly the sampling radius sqrt(2h).
//!
//! ```bash
//! cargo run --release --example support_growth
//! ```

use homodiff::*;

fn main() -> Result<()> {
    let r0 = 0.5;
    let spec = GridSpec::on_box(-2.0, 2.0, 256, 2)?;
    let dx = spec.spacing();
    let u0 = GridField::from_fn(spec, ExtensionPolicy::ClampToNearestNode, |x| {
        let s = 1.0 - (x[0] * x[0] + x[1] * x[1]) / (r0 * r0);
        if s > 0.0 {
            s * s
        } else {
            0.0
        }
    })?;

    println!("{:>10} {:>10} {:>10} {:>10}", "h", "sqrt(2h)", "growth", "delta");
    for h in [0.02, 0.008, 0.004] {
        let params = SchemeParams::new(Exponent::Finite(2.0), 2, h)?;
        let stencils = StencilSet::for_params(&params)?;
        let before = measure_support_radius(&u0, 1e-9)?;
        let after_field = step(&u0, &params, Mode::FreeSpace, &stencils)?;
        let after = measure_support_radius(&after_field, 1e-9)?;
        let growth = after - before;
        println!(
            "{h:>10.4} {:>10.5} {growth:>10.5} {:>10.5}",
            params.radius(),
            growth - params.radius()
        );
    }
    println!("(grid spacing {dx:.5})");
    Ok(())
}
