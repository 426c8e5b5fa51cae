//! Finite extinction under the median flow (p = 1): a compactly supported
//! bump of radius 0.5 vanishes by t = R^2/2 = 0.125.
//!
//! ```bash
//! cargo run --release --example finite_extinction
//! ```

use homodiff::*;

fn main() -> Result<()> {
    let r0 = 0.5;
    let t = 0.2;
    let n = 128;
    let spec = GridSpec::on_box(-1.0, 1.0, 128, 2)?;
    let u0 = GridField::from_fn(spec, ExtensionPolicy::ClampToNearestNode, |x| {
        let s = 1.0 - (x[0] * x[0] + x[1] * x[1]) / (r0 * r0);
        if s > 0.0 {
            s * s
        } else {
            0.0
        }
    })?;

    let h = t / n as f64;
    let params = SchemeParams::new(Exponent::Finite(1.0), 2, h)?;
    let stencils = StencilSet::for_params(&params)?;
    let mut field = u0;
    println!("predicted extinction time: {:.4}", r0 * r0 / 2.0);
    println!("{:>6} {:>8} {:>12}", "step", "t", "sup u+");
    for k in 1..=n {
        field = step(&field, &params, Mode::FreeSpace, &stencils)?;
        if k % 16 == 0 {
            let sup = field.values().iter().cloned().fold(0.0f64, f64::max);
            println!("{k:>6} {:>8.4} {sup:>12.3e}", h * k as f64);
        }
    }
    Ok(())
}
