//! Dirichlet steady state on the unit disk: iterating the mean operator
//! with boundary-truncated radii recovers the harmonic extension of
//! x^2 - y^2 from zero interior data.
//!
//! ```bash
//! cargo run --release --example dirichlet_disk
//! ```

use homodiff::*;

fn main() -> Result<()> {
    let spec = GridSpec::on_box(-1.25, 1.25, 128, 2)?;
    let g = |x: &[f64]| x[0] * x[0] - x[1] * x[1];
    let problem = DirichletProblem::new(
        DomainShape::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        },
        &spec,
    )?;
    // Boundary data held outside the disk; zero inside.
    let u0 = GridField::from_fn(spec.clone(), ExtensionPolicy::ClampToNearestNode, g)?;
    let start_values: Vec<f64> = spec
        .nodes()
        .map(|(flat, _)| match problem.class(flat) {
            evolve::NodeClass::Interior => 0.0,
            _ => u0.values()[flat],
        })
        .collect();
    let mut field = u0.with_values(start_values)?;

    let params = SchemeParams::new(Exponent::Finite(2.0), 2, 0.02)?;
    let stencils = StencilSet::for_params(&params)?;
    println!("{:>6} {:>14} {:>14}", "step", "residual", "sup err vs g");
    for k in 1..=400 {
        let next = step(&field, &params, Mode::Dirichlet(&problem), &stencils)?;
        let residual = field
            .values()
            .iter()
            .zip(next.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        field = next;
        if k % 40 == 0 || residual < 1e-6 {
            let mut sup = 0.0f64;
            for (flat, pos) in spec.nodes() {
                if problem.class(flat) == evolve::NodeClass::Interior {
                    sup = sup.max((field.values()[flat] - g(&pos)).abs());
                }
            }
            println!("{k:>6} {residual:>14.3e} {sup:>14.3e}");
        }
        if residual < 1e-6 {
            break;
        }
    }
    Ok(())
}
