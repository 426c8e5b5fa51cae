//! Consistency of the operator: (phi - M^h phi)/h converges to
//! -c(p,N) Δ¹_p phi down a geometric h-ladder, for the mean, the median,
//! the midrange, and a proper blend.
//!
//! ```bash
//! cargo run --release --example consistency_ladder
//! ```

use homodiff::*;

fn main() -> Result<()> {
    let ladder: Vec<f64> = (6..=12).map(|k| 2.0f64.powi(-k)).collect();
    let cfg = ConsistencyStencilConfig::defaults(2);
    let entries = catalogue(2)?;
    let gaussian = entries.iter().find(|e| e.name == "gaussian").unwrap();
    let probe = &gaussian.probes[0];

    for p in [
        Exponent::Finite(1.0),
        Exponent::Finite(1.5),
        Exponent::Finite(2.0),
        Exponent::Finite(4.0),
        Exponent::Infinity,
    ] {
        let report = consistency_slope(p, 2, &gaussian.function, probe, &ladder, &cfg)?;
        println!("p = {p}, probe {probe:?}");
        println!("  target        {:+.8}", report.target);
        println!("  extrapolated  {:+.8}", report.extrapolated);
        println!(
            "  rel error     {:.2e}   observed order {:.2}",
            report.relative_error(),
            report.observed_order
        );
        for (h, s) in report.ladder.iter().zip(&report.slopes) {
            println!("    h = {h:<10.3e} slope = {s:+.8}");
        }
    }
    Ok(())
}
