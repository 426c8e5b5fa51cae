//! The Catte min-max segment operator against the median scheme on the
//! shrinking circle; both approximate the same mean curvature flow.
//!
//! ```bash
//! cargo run --release --example catte_crosscheck
//! ```

use homodiff::*;

fn main() -> Result<()> {
    let t = 0.15;
    let n = 32;
    let spec = GridSpec::on_box(-1.5, 1.5, 128, 2)?;
    let u0 = GridField::from_fn(spec, ExtensionPolicy::ClampToNearestNode, |x| {
        (x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0
    })?;
    let h = t / n as f64;

    let params = SchemeParams::new(Exponent::Finite(1.0), 2, h)?;
    let stencils = StencilSet::for_params(&params)?;
    let mut median_field = u0.clone();
    for _ in 0..n {
        median_field = step(&median_field, &params, Mode::FreeSpace, &stencils)?;
    }
    let median_radius = extract_zero_level_radius(&median_field)?;

    let mut catte_field = u0;
    for _ in 0..n {
        catte_field = evolve::catte_step_2d_with(&catte_field, h, 64, 17)?;
    }
    let catte_radius = extract_zero_level_radius(&catte_field)?;

    let exact = shrinking_sphere_radius(1.0, t);
    println!("median radius: {median_radius:.5}");
    println!("catte  radius: {catte_radius:.5}");
    println!("exact  radius: {exact:.5}");
    println!(
        "catte vs median: {:.2}%",
        100.0 * (catte_radius - median_radius).abs() / median_radius
    );
    Ok(())
}
