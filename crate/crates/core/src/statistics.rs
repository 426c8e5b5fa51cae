//! Set statistics on finite sample vectors (weighted mean, median,
//! midrange) and the blend coefficients `q(p, N)` and `c(p, N)`.
//!
//! All three statistics are stable (bounded by the sample range), monotone,
//! translation invariant, and 1-homogeneous; the evolution operators
//! inherit those properties from here.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The exponent `p ∈ [1, ∞]`, with infinity as a distinguished value
/// rather than a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    /// A finite exponent; must satisfy `p >= 1`.
    pub fn finite(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::usage(format!("exponent must satisfy p >= 1, got {p}")));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn infinity() -> Self {
        Exponent::Infinity
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(*p),
            Exponent::Infinity => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Exponent::Finite(p) if !(p.is_finite() && *p >= 1.0) => Err(Error::usage(format!(
                "exponent must satisfy p >= 1, got {p}"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v as f64).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v as f64).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" | "infinity" | "Infinity" => Ok(Exponent::Infinity),
                    other => other
                        .parse::<f64>()
                        .map_err(E::custom)
                        .and_then(|p| Exponent::finite(p).map_err(E::custom)),
                }
            }
        }

        deserializer.deserialize_any(ExponentVisitor)
    }
}

/// Parameters of one averaging step: exponent, dimension, and step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub p: Exponent,
    pub dimension: usize,
    pub h: f64,
}

impl SchemeParams {
    pub fn new(p: Exponent, dimension: usize, h: f64) -> Result<Self> {
        p.validate()?;
        if dimension == 0 {
            return Err(Error::usage("dimension must be >= 1".to_string()));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::usage(format!("step h must be positive, got {h}")));
        }
        Ok(SchemeParams { p, dimension, h })
    }

    /// Sampling radius `√(2h)`.
    pub fn radius(&self) -> f64 {
        (2.0 * self.h).sqrt()
    }
}

/// Which statistic a sampler computes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    Mean,
    Median,
    Midrange,
    Blend(Exponent),
}

/// Weights of the three statistics after resolving a blend at (p, N).
///
/// Exactly one of `median_weight` / `midrange_weight` is nonzero for
/// p != 2; both vanish at p = 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedBlend {
    pub median_weight: f64,
    pub midrange_weight: f64,
    pub mean_weight: f64,
}

impl Statistic {
    /// Resolve to statistic weights for dimension `n`.
    pub fn resolve(&self, n: usize) -> Result<ResolvedBlend> {
        Ok(match self {
            Statistic::Mean => ResolvedBlend {
                median_weight: 0.0,
                midrange_weight: 0.0,
                mean_weight: 1.0,
            },
            Statistic::Median => ResolvedBlend {
                median_weight: 1.0,
                midrange_weight: 0.0,
                mean_weight: 0.0,
            },
            Statistic::Midrange => ResolvedBlend {
                median_weight: 0.0,
                midrange_weight: 1.0,
                mean_weight: 0.0,
            },
            Statistic::Blend(p) => {
                let q = blend_weight_q(*p, n)?;
                match p {
                    Exponent::Finite(pv) if *pv <= 2.0 => ResolvedBlend {
                        median_weight: 1.0 - q,
                        midrange_weight: 0.0,
                        mean_weight: q,
                    },
                    _ => ResolvedBlend {
                        median_weight: 0.0,
                        midrange_weight: 1.0 - q,
                        mean_weight: q,
                    },
                }
            }
        })
    }
}

/// Deterministic pairwise (tree) dot product; no allocation.
fn pairwise_dot(values: &[f64], weights: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0] * weights[0],
        n => {
            let mid = n / 2;
            pairwise_dot(&values[..mid], &weights[..mid])
                + pairwise_dot(&values[mid..], &weights[mid..])
        }
    }
}

/// Deterministic pairwise (tree) sum.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Weighted mean with pairwise summation, clamped into the sample range.
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::usage("weighted_mean of an empty sample".to_string()));
    }
    if values.len() != weights.len() {
        return Err(Error::usage(format!(
            "{} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| **w < 0.0) {
        return Err(Error::usage(format!("negative weight {w}")));
    }
    let total = pairwise_sum(weights);
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::usage(format!("weights sum to {total}, expected 1")));
    }
    Ok(weighted_mean_unchecked(values, weights))
}

/// Weighted mean without precondition checks; used by inner loops.
pub fn weighted_mean_unchecked(values: &[f64], weights: &[f64]) -> f64 {
    let raw = pairwise_dot(values, weights);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    raw.clamp(lo, hi)
}

/// Median of a finite sample: sort ascending, take the middle element, or
/// the arithmetic mean of the two middle elements for an even count.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::usage("median of an empty sample".to_string()));
    }
    let mut buf = values.to_vec();
    Ok(median_inplace(&mut buf))
}

/// Median that sorts the caller's buffer instead of allocating.
pub fn median_inplace(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Midrange: average of the extreme values.
pub fn midrange(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::usage("midrange of an empty sample".to_string()));
    }
    Ok(midrange_unchecked(values))
}

/// Midrange without the emptiness check; used by inner loops.
pub fn midrange_unchecked(values: &[f64]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    0.5 * (lo + hi)
}

/// Blend weight `q(p, N)`: `N(p-1)/(N+p-2)` for `1 <= p <= 2` and
/// `N/(N+p-2)` for `p >= 2`; zero at `p = ∞`.
pub fn blend_weight_q(p: Exponent, n: usize) -> Result<f64> {
    p.validate()?;
    if n < 2 {
        return Err(Error::usage(format!(
            "blend weight needs N >= 2 (N = 1 bypasses blending), got {n}"
        )));
    }
    let nf = n as f64;
    Ok(match p {
        Exponent::Infinity => 0.0,
        Exponent::Finite(pv) if pv <= 2.0 => nf * (pv - 1.0) / (nf + pv - 2.0),
        Exponent::Finite(pv) => nf / (nf + pv - 2.0),
    })
}

/// Diffusion coefficient `c(p, N) = p / (N + p - 2)`, with limit 1 at
/// `p = ∞`.
pub fn diffusion_coefficient_c(p: Exponent, n: usize) -> Result<f64> {
    p.validate()?;
    if n < 2 {
        return Err(Error::usage(format!(
            "diffusion coefficient needs N >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    Ok(match p {
        Exponent::Infinity => 1.0,
        Exponent::Finite(pv) => pv / (nf + pv - 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_mean_basics() {
        let w = [1.0 / 3.0; 3];
        assert!((weighted_mean(&[1.0, 2.0, 3.0], &w).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(weighted_mean(&[5.5, 5.5, 5.5], &w).unwrap(), 5.5);
    }

    #[test]
    fn weighted_mean_rejects_bad_inputs() {
        assert!(weighted_mean(&[], &[]).is_err());
        assert!(weighted_mean(&[1.0], &[0.5, 0.5]).is_err());
        assert!(weighted_mean(&[1.0, 2.0], &[-0.5, 1.5]).is_err());
        assert!(weighted_mean(&[1.0, 2.0], &[0.6, 0.6]).is_err());
    }

    #[test]
    fn median_cases() {
        assert_eq!(median(&[1.0, 2.0, 100.0]).unwrap(), 2.0);
        assert_eq!(median(&[2.0, 100.0, 1.0]).unwrap(), 2.0);
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(median(&[7.0]).unwrap(), 7.0);
        assert!(median(&[]).is_err());
    }

    #[test]
    fn midrange_cases() {
        assert_eq!(midrange(&[0.0, 10.0]).unwrap(), 5.0);
        assert_eq!(midrange(&[3.0, -1.0, 2.0, 2.5]).unwrap(), 1.0);
        assert!(midrange(&[]).is_err());
    }

    #[test]
    fn paired_samples_recover_the_center() {
        // Values in pairs c ± delta, as produced by antipodally symmetric
        // stencils on affine fields.
        let c = 0.731;
        let deltas = [0.9, 0.1, 0.45, 0.2];
        let mut values = Vec::new();
        for d in deltas {
            values.push(c + d);
            values.push(c - d);
        }
        let w = vec![1.0 / values.len() as f64; values.len()];
        assert!((median(&values).unwrap() - c).abs() < 1e-15);
        assert!((midrange(&values).unwrap() - c).abs() < 1e-15);
        assert!((weighted_mean(&values, &w).unwrap() - c).abs() < 1e-15);
    }

    #[test]
    fn blend_weight_values() {
        for n in 2..=3 {
            assert_eq!(blend_weight_q(Exponent::Finite(1.0), n).unwrap(), 0.0);
            assert_eq!(blend_weight_q(Exponent::Infinity, n).unwrap(), 0.0);
            let q2 = blend_weight_q(Exponent::Finite(2.0), n).unwrap();
            assert!((q2 - 1.0).abs() < 1e-15);
        }
        assert!((blend_weight_q(Exponent::Finite(1.5), 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((blend_weight_q(Exponent::Finite(4.0), 2).unwrap() - 0.5).abs() < 1e-15);
        assert!(blend_weight_q(Exponent::Finite(0.5), 2).is_err());
        assert!(blend_weight_q(Exponent::Finite(2.0), 1).is_err());
    }

    #[test]
    fn blend_branches_agree_at_two() {
        for n in 2..=6 {
            let nf = n as f64;
            let low = nf * (2.0 - 1.0) / (nf + 2.0 - 2.0);
            let high = nf / (nf + 2.0 - 2.0);
            assert!((low - high).abs() < 1e-15, "N={n}");
        }
    }

    #[test]
    fn diffusion_coefficient_values() {
        assert!((diffusion_coefficient_c(Exponent::Finite(1.0), 3).unwrap() - 0.5).abs() < 1e-15);
        assert!((diffusion_coefficient_c(Exponent::Finite(1.0), 2).unwrap() - 1.0).abs() < 1e-15);
        for n in 2..=5 {
            let c2 = diffusion_coefficient_c(Exponent::Finite(2.0), n).unwrap();
            assert!((c2 - 2.0 / n as f64).abs() < 1e-15);
            assert_eq!(diffusion_coefficient_c(Exponent::Infinity, n).unwrap(), 1.0);
        }
        assert!(diffusion_coefficient_c(Exponent::Finite(0.9), 2).is_err());
    }

    #[test]
    fn coefficients_are_continuous_near_two() {
        let eps = 1e-9;
        for n in 2..=3 {
            let below = blend_weight_q(Exponent::Finite(2.0 - eps), n).unwrap();
            let above = blend_weight_q(Exponent::Finite(2.0 + eps), n).unwrap();
            assert!((below - 1.0).abs() < 1e-8);
            assert!((above - 1.0).abs() < 1e-8);
            let c_below = diffusion_coefficient_c(Exponent::Finite(2.0 - eps), n).unwrap();
            let c_above = diffusion_coefficient_c(Exponent::Finite(2.0 + eps), n).unwrap();
            assert!((c_below - c_above).abs() < 1e-8);
        }
    }

    #[test]
    fn blend_resolution() {
        let pure_median = Statistic::Blend(Exponent::Finite(1.0)).resolve(2).unwrap();
        assert_eq!(pure_median.median_weight, 1.0);
        assert_eq!(pure_median.mean_weight, 0.0);

        let pure_mean = Statistic::Blend(Exponent::Finite(2.0)).resolve(3).unwrap();
        assert!((pure_mean.mean_weight - 1.0).abs() < 1e-15);
        assert_eq!(pure_mean.midrange_weight, 0.0);
        assert_eq!(pure_mean.median_weight, 0.0);

        let pure_midrange = Statistic::Blend(Exponent::Infinity).resolve(2).unwrap();
        assert_eq!(pure_midrange.midrange_weight, 1.0);
        assert_eq!(pure_midrange.mean_weight, 0.0);
    }

    #[test]
    fn exponent_serde_round_trip() {
        for (p, json) in [
            (Exponent::Finite(1.5), "1.5"),
            (Exponent::Infinity, "\"inf\""),
        ] {
            let s = serde_json::to_string(&p).unwrap();
            assert_eq!(s, json);
            let back: Exponent = serde_json::from_str(&s).unwrap();
            assert_eq!(back, p);
        }
        let from_int: Exponent = serde_json::from_str("2").unwrap();
        assert_eq!(from_int, Exponent::Finite(2.0));
        assert!(serde_json::from_str::<Exponent>("0.5").is_err());
    }
}
