//! Direction sets and quadrature weights discretizing the sphere
//! `∂B(x, √(2h))` that every averaging operator samples.
//!
//! Two families serve different statistics: quadrature-weighted grids for
//! the mean (weights matter) and antipodally symmetrized uniform coverings
//! for order statistics (angular coverage matters, weights do not).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Construction recipe for a [`SphereStencil`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StencilKind {
    /// `K` equally spaced angles on the circle; exact for trigonometric
    /// polynomials of degree < K. Requires N = 2 and even K.
    UniformCircle,
    /// Tensor grid on the 2-sphere: Gauss-Legendre nodes in the polar
    /// cosine times uniform azimuth, product weights. Requires N = 3.
    GaussAzimuth3D,
    /// Fibonacci-lattice points unioned with their antipodes, uniform
    /// weights. Requires N = 3 and even K.
    SymmetrizedFibonacci3D,
}

/// Unit directions with mean-quadrature weights at a common radius.
#[derive(Debug, Clone)]
pub struct SphereStencil {
    dimension: usize,
    radius: f64,
    directions: Vec<f64>,
    weights: Vec<f64>,
    antipodal: bool,
}

impl SphereStencil {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Sampling radius, `√(2h)` as built.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_antipodally_symmetric(&self) -> bool {
        self.antipodal
    }

    /// Same directions and weights at a different radius.
    pub fn with_radius(&self, radius: f64) -> SphereStencil {
        SphereStencil {
            radius,
            ..self.clone()
        }
    }

    /// CSV debug dump: one row per direction, components then weight.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.dimension).map(|k| format!("d{k}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",weight\n");
        for i in 0..self.len() {
            for (k, c) in self.direction(i).iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{c:.17e}"));
            }
            out.push_str(&format!(",{:.17e}\n", self.weights[i]));
        }
        out
    }
}

/// Build the direction/weight set for dimension `n` at radius `√(2h)`.
///
/// N = 1 ignores `k` and `kind` and returns the exact two-point stencil.
pub fn build_stencil(n: usize, h: f64, k: usize, kind: StencilKind) -> Result<SphereStencil> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::usage(format!("step h must be positive, got {h}")));
    }
    let radius = (2.0 * h).sqrt();
    match n {
        1 => Ok(SphereStencil {
            dimension: 1,
            radius,
            directions: vec![1.0, -1.0],
            weights: vec![0.5, 0.5],
            antipodal: true,
        }),
        2 => {
            if kind != StencilKind::UniformCircle {
                return Err(Error::usage(format!("{kind:?} requires N = 3, got N = 2")));
            }
            if k < 2 || k % 2 != 0 {
                return Err(Error::usage(format!(
                    "UniformCircle needs an even sample count >= 2 for antipodal symmetry, got {k}"
                )));
            }
            Ok(uniform_circle(radius, k))
        }
        3 => match kind {
            StencilKind::UniformCircle => {
                Err(Error::usage("UniformCircle requires N = 2".to_string()))
            }
            StencilKind::GaussAzimuth3D => {
                if k < 8 {
                    return Err(Error::usage(format!(
                        "GaussAzimuth3D needs K >= 8 to integrate degree-2 spherical polynomials exactly, got {k}"
                    )));
                }
                if k % 2 != 0 {
                    return Err(Error::usage(format!(
                        "GaussAzimuth3D needs an even sample count, got {k}"
                    )));
                }
                Ok(gauss_azimuth(radius, k))
            }
            StencilKind::SymmetrizedFibonacci3D => {
                if k < 2 || k % 2 != 0 {
                    return Err(Error::usage(format!(
                        "SymmetrizedFibonacci3D needs an even sample count >= 2, got {k}"
                    )));
                }
                Ok(symmetrized_fibonacci(radius, k))
            }
        },
        _ => Err(Error::usage(format!("dimension must be 1, 2, or 3, got {n}"))),
    }
}

fn uniform_circle(radius: f64, k: usize) -> SphereStencil {
    let mut directions = Vec::with_capacity(2 * k);
    let w = 1.0 / k as f64;
    for i in 0..k {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
        directions.push(theta.cos());
        directions.push(theta.sin());
    }
    SphereStencil {
        dimension: 2,
        radius,
        directions,
        weights: vec![w; k],
        antipodal: true,
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];
    for i in 0..p {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (p as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre recurrence for P_p(x) and P_{p-1}(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=p {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let dp = p as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // Recompute the derivative at the converged node for the weight.
        let mut p0 = 1.0;
        let mut p1 = x;
        for j in 2..=p {
            let jf = j as f64;
            let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
            p0 = p1;
            p1 = p2;
        }
        let dp = p as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn gauss_azimuth(radius: f64, budget: usize) -> SphereStencil {
    // Largest P with 2*P^2 <= budget; azimuth count A = 2P keeps the grid
    // antipodally closed and integrates cos/sin harmonics up to degree 2P-1.
    let p = (((budget / 2) as f64).sqrt().floor() as usize).max(2);
    let a = 2 * p;
    let (mu, wmu) = gauss_legendre(p);
    let mut directions = Vec::with_capacity(3 * p * a);
    let mut weights = Vec::with_capacity(p * a);
    let mut total = 0.0;
    for i in 0..p {
        let s = (1.0 - mu[i] * mu[i]).max(0.0).sqrt();
        for j in 0..a {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / a as f64;
            directions.push(s * theta.cos());
            directions.push(s * theta.sin());
            directions.push(mu[i]);
            weights.push(wmu[i]);
            total += wmu[i];
        }
    }
    for w in &mut weights {
        *w /= total;
    }
    SphereStencil {
        dimension: 3,
        radius,
        directions,
        weights,
        antipodal: true,
    }
}

fn symmetrized_fibonacci(radius: f64, k: usize) -> SphereStencil {
    let m = k / 2;
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut directions = Vec::with_capacity(3 * k);
    for i in 0..m {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
        let s = (1.0 - z * z).max(0.0).sqrt();
        let theta = 2.0 * std::f64::consts::PI * i as f64 / golden;
        let (x, y) = (s * theta.cos(), s * theta.sin());
        let norm = (x * x + y * y + z * z).sqrt();
        directions.push(x / norm);
        directions.push(y / norm);
        directions.push(z / norm);
    }
    // Union with exact antipodes.
    for i in 0..m {
        let d = [directions[3 * i], directions[3 * i + 1], directions[3 * i + 2]];
        directions.push(-d[0]);
        directions.push(-d[1]);
        directions.push(-d[2]);
    }
    SphereStencil {
        dimension: 3,
        radius,
        directions,
        weights: vec![1.0 / k as f64; k],
        antipodal: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight_sum(s: &SphereStencil) -> f64 {
        s.weights().iter().sum()
    }

    fn check_unit_norms(s: &SphereStencil) {
        for i in 0..s.len() {
            let norm: f64 = s.direction(i).iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12, "direction {i} has norm {norm}");
        }
    }

    fn check_antipodal(s: &SphereStencil) {
        let n = s.dimension();
        for i in 0..s.len() {
            let d = s.direction(i);
            let found = (0..s.len()).any(|j| {
                s.direction(j)
                    .iter()
                    .zip(d)
                    .all(|(a, b)| (a + b).abs() < 1e-12)
            });
            assert!(found, "no antipode for direction {i} in {n}D");
        }
    }

    #[test]
    fn one_dimensional_stencil_is_exact() {
        let s = build_stencil(1, 0.37, 99, StencilKind::UniformCircle).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.direction(0), &[1.0]);
        assert_eq!(s.direction(1), &[-1.0]);
        assert_eq!(s.weights(), &[0.5, 0.5]);
        assert!((s.radius() - (2.0f64 * 0.37).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn circle_k4_hits_axes() {
        let s = build_stencil(2, 0.5, 4, StencilKind::UniformCircle).unwrap();
        assert_eq!(s.len(), 4);
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (i, e) in expect.iter().enumerate() {
            for (a, b) in s.direction(i).iter().zip(e) {
                assert!((a - b).abs() < 1e-15);
            }
            assert_eq!(s.weights()[i], 0.25);
        }
    }

    #[test]
    fn stencil_invariants_hold() {
        for (n, k, kind) in [
            (2, 64, StencilKind::UniformCircle),
            (3, 128, StencilKind::GaussAzimuth3D),
            (3, 128, StencilKind::SymmetrizedFibonacci3D),
            (3, 1000, StencilKind::SymmetrizedFibonacci3D),
        ] {
            let s = build_stencil(n, 0.01, k, kind).unwrap();
            check_unit_norms(&s);
            check_antipodal(&s);
            assert!(s.is_antipodally_symmetric());
            assert!((weight_sum(&s) - 1.0).abs() < 1e-12, "{kind:?} weight sum");
            assert!(s.weights().iter().all(|&w| w >= 0.0));
        }
    }

    #[test]
    fn circle_integrates_quadratics_exactly() {
        // Mean of d_i d_j over the unit circle is delta_ij / 2.
        for k in [4usize, 6, 64] {
            let s = build_stencil(2, 1.0, k, StencilKind::UniformCircle).unwrap();
            let mut xx = 0.0;
            let mut xy = 0.0;
            for i in 0..s.len() {
                let d = s.direction(i);
                xx += s.weights()[i] * d[0] * d[0];
                xy += s.weights()[i] * d[0] * d[1];
            }
            assert!((xx - 0.5).abs() < 1e-14, "K={k}");
            assert!(xy.abs() < 1e-14, "K={k}");
        }
    }

    #[test]
    fn gauss_azimuth_integrates_second_moments() {
        // Spherical average of y_m^2 over the unit 2-sphere is 1/3.
        for k in [8usize, 50, 128, 512] {
            let s = build_stencil(3, 0.25, k, StencilKind::GaussAzimuth3D).unwrap();
            for m in 0..3 {
                let mut acc = 0.0;
                for i in 0..s.len() {
                    let d = s.direction(i);
                    acc += s.weights()[i] * d[m] * d[m];
                }
                assert!((acc - 1.0 / 3.0).abs() < 1e-13, "K={k} axis {m}: {acc}");
            }
            // Mixed moments vanish.
            let mut cross = 0.0f64;
            for i in 0..s.len() {
                let d = s.direction(i);
                cross += s.weights()[i] * d[0] * d[2];
            }
            assert!(cross.abs() < 1e-13);
        }
    }

    #[test]
    fn monte_carlo_agrees_on_third_axis_second_moment() {
        // Brute-force check that the spherical average of y_3^2 is 1/3:
        // 10^6 quasi-uniform points from normalized Gaussian triples.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        };
        let mut gauss = move || {
            // Box-Muller from two uniform doubles.
            let u1 = (next() >> 11) as f64 / (1u64 << 53) as f64;
            let u2 = (next() >> 11) as f64 / (1u64 << 53) as f64;
            let u1 = u1.max(1e-300);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let trials = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let (x, y, z) = (gauss(), gauss(), gauss());
            let n2 = x * x + y * y + z * z;
            if n2 < 1e-12 {
                continue;
            }
            acc += z * z / n2;
        }
        let mc = acc / trials as f64;
        assert!((mc - 1.0 / 3.0).abs() < 3e-3, "MC estimate {mc}");
    }

    #[test]
    fn build_rejects_bad_requests() {
        assert!(build_stencil(2, 0.0, 8, StencilKind::UniformCircle).is_err());
        assert!(build_stencil(2, 0.1, 7, StencilKind::UniformCircle).is_err());
        assert!(build_stencil(2, 0.1, 16, StencilKind::GaussAzimuth3D).is_err());
        assert!(build_stencil(3, 0.1, 16, StencilKind::UniformCircle).is_err());
        assert!(build_stencil(3, 0.1, 6, StencilKind::GaussAzimuth3D).is_err());
        assert!(build_stencil(3, 0.1, 15, StencilKind::SymmetrizedFibonacci3D).is_err());
        assert!(build_stencil(4, 0.1, 16, StencilKind::GaussAzimuth3D).is_err());
    }

    #[test]
    fn stencils_are_reproducible() {
        let a = build_stencil(3, 0.03, 128, StencilKind::SymmetrizedFibonacci3D).unwrap();
        let b = build_stencil(3, 0.03, 128, StencilKind::SymmetrizedFibonacci3D).unwrap();
        assert_eq!(a.directions, b.directions);
        assert_eq!(a.weights, b.weights);
    }
}
