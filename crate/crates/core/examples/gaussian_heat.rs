//! Iterated spherical means (p = 2) against the exact Gaussian solution
//! of u_t = (1/N) Δu.
//!
//! ```bash
//! cargo run --release --example gaussian_heat
//! ```

use homodiff::*;

fn main() -> Result<()> {
    let a = 0.25;
    let t = 0.5;
    let spec = GridSpec::on_box(-3.0, 3.0, 128, 2)?;
    let u0 = GridField::from_fn(spec.clone(), ExtensionPolicy::ClampToNearestNode, |x| {
        (-(x[0] * x[0] + x[1] * x[1]) / (4.0 * a)).exp()
    })?;
    let exact = ScalarField::from_grid(GridField::from_fn(
        spec.clone(),
        ExtensionPolicy::ClampToNearestNode,
        |x| gaussian_heat_exact(x, t, a, 2),
    )?);
    let region = interior_region(&spec, t)?;

    println!("u_t = (1/2) Δu with u0 = exp(-|x|^2), t = {t}");
    println!("{:>6} {:>14} {:>12}", "n", "sup error", "seconds");
    for n in [8usize, 16, 32, 64] {
        let run = evolve(&u0, Exponent::Finite(2.0), t, n, Mode::FreeSpace, &EvolveOptions::default())?;
        let err = grid::linf_distance(&ScalarField::from_grid(run.field), &exact, &region)?;
        println!("{n:>6} {err:>14.6e} {:>12.2}", run.elapsed.as_secs_f64());
    }
    println!("center value exact: {:.6}", gaussian_heat_exact(&[0.0, 0.0], t, a, 2));
    Ok(())
}
