//! Level-set mean curvature flow by iterated medians (p = 1): a circle of
//! radius 1 shrinks to radius sqrt(1 - 2t).
//!
//! ```bash
//! cargo run --release --example shrinking_circle
//! ```

use homodiff::*;

fn main() -> Result<()> {
    let t = 0.3;
    let n = 64;
    let spec = GridSpec::on_box(-1.5, 1.5, 128, 2)?;
    let u0 = GridField::from_fn(spec, ExtensionPolicy::ClampToNearestNode, |x| {
        (x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0
    })?;

    let h = t / n as f64;
    let params = SchemeParams::new(Exponent::Finite(1.0), 2, h)?;
    let stencils = StencilSet::for_params(&params)?;
    let mut field = u0;
    println!("{:>6} {:>8} {:>10} {:>10}", "step", "t", "radius", "exact");
    for k in 1..=n {
        field = step(&field, &params, Mode::FreeSpace, &stencils)?;
        if k % 8 == 0 {
            let t_k = h * k as f64;
            let r = extract_zero_level_radius(&field)?;
            println!(
                "{k:>6} {t_k:>8.4} {r:>10.5} {:>10.5}",
                shrinking_sphere_radius(1.0, t_k)
            );
        }
    }
    Ok(())
}
