//! Randomized check of the operator axioms: stability, monotonicity,
//! translation invariance, 1-homogeneity, and the bit-exact collapse of
//! all p onto the two-point average in one dimension.
//!
//! ```bash
//! cargo run --release --example operator_axioms
//! ```

use homodiff::experiments::{run, ArtifactSink, AxiomsConfig, ExperimentConfig};

fn main() -> homodiff::Result<()> {
    let config = ExperimentConfig::Axioms(AxiomsConfig {
        seed: 42,
        trials: 100,
        tolerance: 1e-12,
    });
    let report = run(&config, &ArtifactSink::discard())?;
    for check in &report.checks {
        println!(
            "{} {:<24} max violation {:.3e}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.measured
        );
    }
    std::process::exit(if report.passed { 0 } else { 2 });
}
