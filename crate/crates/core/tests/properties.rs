//! Property tests for the statistic and sampling invariants.

use homodiff::statistics::{median, midrange, pairwise_sum, weighted_mean};
use homodiff::{ExtensionPolicy, GridField, GridSpec};
use proptest::prelude::*;

fn finite_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6..1e6f64, 1..80)
}

fn uniform_weights(len: usize) -> Vec<f64> {
    vec![1.0 / len as f64; len]
}

proptest! {
    /// Every statistic stays inside the sample range.
    #[test]
    fn statistics_are_stable(values in finite_values()) {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w = uniform_weights(values.len());
        for s in [
            weighted_mean(&values, &w).unwrap(),
            median(&values).unwrap(),
            midrange(&values).unwrap(),
        ] {
            prop_assert!(s >= lo && s <= hi, "{s} outside [{lo}, {hi}]");
        }
    }

    /// Translation invariance and 1-homogeneity, including negative
    /// scalings.
    #[test]
    fn statistics_are_affine_equivariant(
        values in finite_values(),
        shift in -1e3..1e3f64,
        scale in -8.0..8.0f64,
    ) {
        let w = uniform_weights(values.len());
        let stats: [fn(&[f64], &[f64]) -> f64; 3] = [
            |v, w| weighted_mean(v, w).unwrap(),
            |v, _| median(v).unwrap(),
            |v, _| midrange(v).unwrap(),
        ];
        let scale_mag = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-9 * scale_mag.max(shift.abs()).max(1.0);
        for stat in stats {
            let s = stat(&values, &w);
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            prop_assert!((stat(&shifted, &w) - (s + shift)).abs() <= tol);
            let scaled: Vec<f64> = values.iter().map(|v| scale * v).collect();
            prop_assert!((stat(&scaled, &w) - scale * s).abs() <= tol * scale.abs().max(1.0));
        }
    }

    /// Componentwise domination implies ordered statistics.
    #[test]
    fn statistics_are_monotone(
        values in finite_values(),
        bumps in prop::collection::vec(0.0..1e3f64, 1..80),
    ) {
        let w = uniform_weights(values.len());
        let dominating: Vec<f64> = values
            .iter()
            .zip(bumps.iter().cycle())
            .map(|(v, b)| v + b)
            .collect();
        prop_assert!(weighted_mean(&values, &w).unwrap() <= weighted_mean(&dominating, &w).unwrap());
        prop_assert!(median(&values).unwrap() <= median(&dominating).unwrap());
        prop_assert!(midrange(&values).unwrap() <= midrange(&dominating).unwrap());
    }

    /// Order independence: the statistics do not care how samples are
    /// permuted, and the pairwise sum is order-independent to roundoff.
    #[test]
    fn statistics_are_permutation_invariant(
        (values, permuted) in finite_values()
            .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
    ) {
        prop_assert_eq!(median(&values).unwrap(), median(&permuted).unwrap());
        prop_assert_eq!(midrange(&values).unwrap(), midrange(&permuted).unwrap());
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(
            (pairwise_sum(&values) - pairwise_sum(&permuted)).abs()
                <= 1e-9 * scale * values.len() as f64
        );
    }

    /// Grid interpolation is affine in the stored values.
    #[test]
    fn interpolation_is_affine_in_values(
        seed_values in prop::collection::vec(-10.0..10.0f64, 36),
        alpha in -4.0..4.0f64,
        beta in -4.0..4.0f64,
        px in 0.0..1.0f64,
        py in 0.0..1.0f64,
    ) {
        let spec = GridSpec::on_box(0.0, 1.0, 6, 2).unwrap();
        let base = GridField::new(spec, seed_values.clone(), ExtensionPolicy::ClampToNearestNode).unwrap();
        let mapped = base
            .with_values(seed_values.iter().map(|v| alpha * v + beta).collect())
            .unwrap();
        let x = [px, py];
        let direct = mapped.sample(&x);
        let via_base = alpha * base.sample(&x) + beta;
        prop_assert!((direct - via_base).abs() < 1e-10);
    }

    /// Clamp extension never leaves the stored value range, no matter how
    /// far outside the box the query lands.
    #[test]
    fn clamp_extension_is_bounded(
        seed_values in prop::collection::vec(-5.0..5.0f64, 16),
        qx in -100.0..100.0f64,
        qy in -100.0..100.0f64,
    ) {
        let spec = GridSpec::on_box(-1.0, 1.0, 4, 2).unwrap();
        let field = GridField::new(spec, seed_values.clone(), ExtensionPolicy::ClampToNearestNode).unwrap();
        let lo = seed_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = seed_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let v = field.sample(&[qx, qy]);
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }
}
