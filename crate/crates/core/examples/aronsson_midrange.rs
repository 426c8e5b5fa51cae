//! The Aronsson function |x|^{4/3} - |y|^{4/3} is infinity-harmonic away
//! from the axes, so one midrange step (p = ∞) barely moves it: the
//! change is o(h) at points where the gradient does not vanish.
//!
//! ```bash
//! cargo run --release --example aronsson_midrange
//! ```

use homodiff::*;

fn main() -> Result<()> {
    let f = TestFunction::aronsson();
    let field = f.clone().as_field();
    let probes = [[0.7, 0.4], [-0.6, 0.5], [0.8, -0.7]];
    println!("{:>12} {:>12} {:>14} {:>14}", "h", "probe", "|phi - M phi|", "5 h^1.2");
    for k in [7, 8, 9, 10] {
        let h = 2.0f64.powi(-k);
        let params = SchemeParams::new(Exponent::Infinity, 2, h)?;
        let choice = StencilChoice {
            order_k: 4096,
            ..StencilChoice::defaults(2)
        };
        let stencils = StencilSet::with_choice(&params, &choice)?;
        for probe in &probes {
            let moved = apply_blend_at(&field, probe, &params, &stencils)?;
            let change = (moved - f.value(probe)).abs();
            println!(
                "{h:>12.4e} ({:>4.1},{:>4.1}) {change:>14.3e} {:>14.3e}",
                probe[0],
                probe[1],
                5.0 * h.powf(1.2)
            );
        }
    }
    Ok(())
}
