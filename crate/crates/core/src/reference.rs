//! Analytic differential operators, exact solutions, and the consistency
//! measurement harness.
//!
//! Everything here evaluates test functions analytically (grid-free), so
//! consistency measurements isolate operator error from interpolation
//! error.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolve::{apply_blend_at, StencilChoice, StencilSet};
use crate::grid::{AnalyticField, ScalarField};
use crate::statistics::{diffusion_coefficient_c, Exponent, SchemeParams};
use crate::stencil::StencilKind;

const GRADIENT_FLOOR: f64 = 1e-10;

/// Analytic test function with exact gradient and Hessian.
#[derive(Debug, Clone)]
pub enum TestFunction {
    /// `a . x + b`
    Affine { a: Vec<f64>, b: f64 },
    /// `x^T A x + b . x + c` with `A` symmetric (row-major).
    Quadratic { a: Vec<f64>, b: Vec<f64>, c: f64 },
    /// `exp(-|x|^2 / (4a))`
    Gaussian { a: f64, dimension: usize },
    /// `prod_i sin(k_i x_i + phase_i)`
    TrigProduct { k: Vec<f64>, phase: Vec<f64> },
    /// Signed distance to the sphere of radius `r0`: `|x| - r0`.
    RadialCone { r0: f64, dimension: usize },
    /// Aronsson's function `|x|^{4/3} - |y|^{4/3}` (2D), infinity-harmonic
    /// away from the axes.
    Aronsson,
}

impl TestFunction {
    pub fn affine(a: Vec<f64>, b: f64) -> Result<TestFunction> {
        if a.is_empty() || a.len() > 3 {
            return Err(Error::usage("affine coefficients must have length 1..=3".to_string()));
        }
        Ok(TestFunction::Affine { a, b })
    }

    /// Quadratic form; `a` is the symmetric matrix row-major, length N^2.
    pub fn quadratic_form(a: Vec<f64>, b: Vec<f64>, c: f64) -> Result<TestFunction> {
        let n = b.len();
        if a.len() != n * n {
            return Err(Error::usage(format!(
                "matrix has {} entries, expected {}",
                a.len(),
                n * n
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if (a[i * n + j] - a[j * n + i]).abs() > 1e-14 {
                    return Err(Error::usage("quadratic form matrix must be symmetric".to_string()));
                }
            }
        }
        Ok(TestFunction::Quadratic { a, b, c })
    }

    pub fn gaussian(a: f64, dimension: usize) -> Result<TestFunction> {
        if !(a > 0.0) {
            return Err(Error::usage(format!("gaussian width must be positive, got {a}")));
        }
        Ok(TestFunction::Gaussian { a, dimension })
    }

    pub fn trig_product(k: Vec<f64>, phase: Vec<f64>) -> Result<TestFunction> {
        if k.len() != phase.len() || k.is_empty() {
            return Err(Error::usage("wave numbers and phases must have equal nonzero length".to_string()));
        }
        Ok(TestFunction::TrigProduct { k, phase })
    }

    pub fn radial_cone(r0: f64, dimension: usize) -> Result<TestFunction> {
        if !(r0 > 0.0) {
            return Err(Error::usage(format!("cone radius must be positive, got {r0}")));
        }
        Ok(TestFunction::RadialCone { r0, dimension })
    }

    pub fn aronsson() -> TestFunction {
        TestFunction::Aronsson
    }

    pub fn dimension(&self) -> usize {
        match self {
            TestFunction::Affine { a, .. } => a.len(),
            TestFunction::Quadratic { b, .. } => b.len(),
            TestFunction::Gaussian { dimension, .. } => *dimension,
            TestFunction::TrigProduct { k, .. } => k.len(),
            TestFunction::RadialCone { dimension, .. } => *dimension,
            TestFunction::Aronsson => 2,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Affine { a, b } => {
                a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() + b
            }
            TestFunction::Quadratic { a, b, c } => {
                let n = b.len();
                let mut acc = *c;
                for i in 0..n {
                    acc += b[i] * x[i];
                    for j in 0..n {
                        acc += a[i * n + j] * x[i] * x[j];
                    }
                }
                acc
            }
            TestFunction::Gaussian { a, .. } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                (-r2 / (4.0 * a)).exp()
            }
            TestFunction::TrigProduct { k, phase } => k
                .iter()
                .zip(phase)
                .zip(x)
                .map(|((ki, pi), xi)| (ki * xi + pi).sin())
                .product(),
            TestFunction::RadialCone { r0, .. } => {
                x.iter().map(|v| v * v).sum::<f64>().sqrt() - r0
            }
            TestFunction::Aronsson => {
                let fx = x[0].abs().powf(4.0 / 3.0);
                let fy = x[1].abs().powf(4.0 / 3.0);
                fx - fy
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            TestFunction::Affine { a, .. } => a.clone(),
            TestFunction::Quadratic { a, b, .. } => {
                let n = b.len();
                let mut g = b.clone();
                for i in 0..n {
                    for j in 0..n {
                        g[i] += 2.0 * a[i * n + j] * x[j];
                    }
                }
                g
            }
            TestFunction::Gaussian { a, .. } => {
                let v = self.value(x);
                x.iter().map(|xi| -xi / (2.0 * a) * v).collect()
            }
            TestFunction::TrigProduct { k, phase } => {
                let n = k.len();
                (0..n)
                    .map(|j| {
                        let mut g = k[j] * (k[j] * x[j] + phase[j]).cos();
                        for i in 0..n {
                            if i != j {
                                g *= (k[i] * x[i] + phase[i]).sin();
                            }
                        }
                        g
                    })
                    .collect()
            }
            TestFunction::RadialCone { .. } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                x.iter().map(|xi| xi / r).collect()
            }
            TestFunction::Aronsson => {
                let gx = 4.0 / 3.0 * x[0].signum() * x[0].abs().powf(1.0 / 3.0);
                let gy = 4.0 / 3.0 * x[1].signum() * x[1].abs().powf(1.0 / 3.0);
                vec![gx, -gy]
            }
        }
    }

    /// Row-major Hessian.
    pub fn hessian_matrix(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        match self {
            TestFunction::Affine { .. } => vec![0.0; n * n],
            TestFunction::Quadratic { a, .. } => a.iter().map(|v| 2.0 * v).collect(),
            TestFunction::Gaussian { a, .. } => {
                let v = self.value(x);
                let mut h = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let mut entry = x[i] * x[j] / (4.0 * a * a);
                        if i == j {
                            entry -= 1.0 / (2.0 * a);
                        }
                        h[i * n + j] = entry * v;
                    }
                }
                h
            }
            TestFunction::TrigProduct { k, phase } => {
                let sin: Vec<f64> = k
                    .iter()
                    .zip(phase)
                    .zip(x)
                    .map(|((ki, pi), xi)| (ki * xi + pi).sin())
                    .collect();
                let cos: Vec<f64> = k
                    .iter()
                    .zip(phase)
                    .zip(x)
                    .map(|((ki, pi), xi)| (ki * xi + pi).cos())
                    .collect();
                let mut h = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let mut entry = if i == j { -k[i] * k[i] } else { k[i] * k[j] };
                        for l in 0..n {
                            entry *= if l == i || l == j {
                                if i == j {
                                    sin[l]
                                } else {
                                    cos[l]
                                }
                            } else {
                                sin[l]
                            };
                        }
                        h[i * n + j] = entry;
                    }
                }
                h
            }
            TestFunction::RadialCone { .. } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let mut h = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let mut entry = -x[i] * x[j] / (r * r * r);
                        if i == j {
                            entry += 1.0 / r;
                        }
                        h[i * n + j] = entry;
                    }
                }
                h
            }
            TestFunction::Aronsson => {
                let hxx = 4.0 / 9.0 * x[0].abs().powf(-2.0 / 3.0);
                let hyy = -4.0 / 9.0 * x[1].abs().powf(-2.0 / 3.0);
                vec![hxx, 0.0, 0.0, hyy]
            }
        }
    }

    /// Wrap as a sampleable scalar field.
    pub fn as_field(self) -> ScalarField {
        ScalarField::from_analytic(std::sync::Arc::new(self))
    }
}

impl AnalyticField for TestFunction {
    fn dimension(&self) -> usize {
        self.dimension()
    }

    fn value(&self, x: &[f64]) -> f64 {
        TestFunction::value(self, x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(TestFunction::gradient(self, x))
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(TestFunction::hessian_matrix(self, x))
    }
}

/// A named catalogue entry with probe points where the gradient does not
/// vanish.
pub struct CatalogueEntry {
    pub name: &'static str,
    pub function: TestFunction,
    pub probes: Vec<Vec<f64>>,
}

/// Standard catalogue for a given dimension.
pub fn catalogue(dimension: usize) -> Result<Vec<CatalogueEntry>> {
    let mut entries = Vec::new();
    match dimension {
        2 => {
            entries.push(CatalogueEntry {
                name: "affine",
                function: TestFunction::affine(vec![0.8, -0.45], 0.7)?,
                probes: vec![vec![0.0, 0.0], vec![0.3, -0.2]],
            });
            entries.push(CatalogueEntry {
                name: "quadratic",
                function: TestFunction::quadratic_form(
                    vec![1.0, 0.25, 0.25, -0.5],
                    vec![0.3, 0.1],
                    0.0,
                )?,
                probes: vec![vec![0.4, 0.2], vec![-0.3, 0.5]],
            });
            entries.push(CatalogueEntry {
                name: "gaussian",
                function: TestFunction::gaussian(0.25, 2)?,
                probes: vec![vec![0.3, 0.1], vec![-0.25, 0.4]],
            });
            entries.push(CatalogueEntry {
                name: "trig",
                function: TestFunction::trig_product(vec![1.3, 0.9], vec![0.4, 1.1])?,
                probes: vec![vec![0.2, 0.3], vec![-0.5, 0.1]],
            });
            entries.push(CatalogueEntry {
                name: "cone",
                function: TestFunction::radial_cone(1.0, 2)?,
                probes: vec![vec![0.5, 0.0], vec![0.3, 0.4]],
            });
            entries.push(CatalogueEntry {
                name: "aronsson",
                function: TestFunction::aronsson(),
                probes: vec![vec![0.7, 0.4], vec![-0.6, 0.5]],
            });
        }
        3 => {
            entries.push(CatalogueEntry {
                name: "affine",
                function: TestFunction::affine(vec![0.8, -0.45, 0.3], 0.7)?,
                probes: vec![vec![0.0, 0.0, 0.0], vec![0.2, -0.1, 0.3]],
            });
            entries.push(CatalogueEntry {
                name: "quadratic",
                function: TestFunction::quadratic_form(
                    vec![1.0, 0.25, -0.1, 0.25, -0.5, 0.15, -0.1, 0.15, 0.75],
                    vec![0.3, 0.1, -0.2],
                    0.0,
                )?,
                probes: vec![vec![0.4, 0.2, -0.3], vec![-0.3, 0.5, 0.2]],
            });
            entries.push(CatalogueEntry {
                name: "gaussian",
                function: TestFunction::gaussian(0.25, 3)?,
                probes: vec![vec![0.3, 0.1, 0.2], vec![-0.25, 0.4, -0.15]],
            });
            entries.push(CatalogueEntry {
                name: "trig",
                function: TestFunction::trig_product(vec![1.3, 0.9, 0.7], vec![0.4, 1.1, 0.8])?,
                probes: vec![vec![0.2, 0.3, 0.25], vec![-0.5, 0.1, 0.4]],
            });
            entries.push(CatalogueEntry {
                name: "cone",
                function: TestFunction::radial_cone(1.0, 3)?,
                probes: vec![vec![0.5, 0.0, 0.0], vec![0.3, 0.4, 0.2]],
            });
        }
        other => {
            return Err(Error::usage(format!(
                "catalogue supports dimensions 2 and 3, got {other}"
            )))
        }
    }
    Ok(entries)
}

/// Which differential operator to evaluate analytically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DifferentialKind {
    /// Trace of the Hessian.
    Laplacian,
    /// Second derivative in the gradient direction.
    DeltaInf,
    /// Trace of the Hessian on the plane orthogonal to the gradient.
    Delta1,
    /// The 1-homogeneous p-Laplacian.
    OnePLaplacian(Exponent),
}

/// Evaluate a differential operator from the exact gradient and Hessian.
pub fn differential(kind: DifferentialKind, f: &TestFunction, x: &[f64]) -> Result<f64> {
    let n = f.dimension();
    if x.len() != n {
        return Err(Error::usage(format!(
            "point has {} coordinates, function is {n}-dimensional",
            x.len()
        )));
    }
    let h = f.hessian_matrix(x);
    let laplacian: f64 = (0..n).map(|i| h[i * n + i]).sum();
    if kind == DifferentialKind::Laplacian {
        return Ok(laplacian);
    }
    // p = 2 reduces to Laplacian/2 and needs no gradient.
    if let DifferentialKind::OnePLaplacian(Exponent::Finite(p)) = kind {
        if p == 2.0 {
            return Ok(0.5 * laplacian);
        }
    }
    let g = f.gradient(x);
    let norm2: f64 = g.iter().map(|v| v * v).sum();
    if norm2.sqrt() <= GRADIENT_FLOOR {
        return Err(Error::domain(format!(
            "gradient vanishes at {x:?}; singular operator undefined"
        )));
    }
    let mut ghg = 0.0;
    for i in 0..n {
        for j in 0..n {
            ghg += g[i] * h[i * n + j] * g[j];
        }
    }
    let delta_inf = ghg / norm2;
    let delta_1 = laplacian - delta_inf;
    Ok(match kind {
        DifferentialKind::Laplacian => laplacian,
        DifferentialKind::DeltaInf => delta_inf,
        DifferentialKind::Delta1 => delta_1,
        DifferentialKind::OnePLaplacian(Exponent::Infinity) => delta_inf,
        DifferentialKind::OnePLaplacian(Exponent::Finite(p)) => {
            if p <= 2.0 {
                (1.0 - 1.0 / p) * laplacian + (2.0 / p - 1.0) * delta_1
            } else {
                laplacian / p + (1.0 - 2.0 / p) * delta_inf
            }
        }
    })
}

/// Max residual of the p-Laplacian decompositions and of
/// `Delta_1 = Delta - Delta_inf` over a p-grid at `x`.
pub fn identity_check_decompositions(f: &TestFunction, x: &[f64]) -> Result<f64> {
    let laplacian = differential(DifferentialKind::Laplacian, f, x)?;
    let delta_inf = differential(DifferentialKind::DeltaInf, f, x)?;
    let delta_1 = differential(DifferentialKind::Delta1, f, x)?;
    let g = f.gradient(x);
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut max_residual = (delta_1 - (laplacian - delta_inf)).abs();
    for p in [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0] {
        let factor = norm.powf(p - 2.0);
        let via_inf = factor * (laplacian + (p - 2.0) * delta_inf);
        let via_one = factor * ((p - 1.0) * laplacian + (2.0 - p) * delta_1);
        max_residual = max_residual.max((via_inf - via_one).abs());
    }
    Ok(max_residual)
}

/// Stencil configuration for consistency measurements.
///
/// Order-statistic stencils optionally grow like `h^{-1/2}` down the
/// ladder: the angular error of a discrete median/midrange scales like
/// `δ_ang^2 / √h`, so a fixed direction count would dominate the limit at
/// small h.
#[derive(Debug, Clone, Copy)]
pub struct ConsistencyStencilConfig {
    pub mean_kind: StencilKind,
    pub mean_k: usize,
    pub order_kind: StencilKind,
    /// Order-statistic sample count at h = 2^-6.
    pub order_k_base: usize,
    /// Grow the order-statistic count like h^{-1/2} below h = 2^-6.
    pub scale_order_k: bool,
    pub order_k_max: usize,
}

impl ConsistencyStencilConfig {
    pub fn defaults(dimension: usize) -> ConsistencyStencilConfig {
        match dimension {
            3 => ConsistencyStencilConfig {
                mean_kind: StencilKind::GaussAzimuth3D,
                mean_k: 512,
                order_kind: StencilKind::SymmetrizedFibonacci3D,
                order_k_base: 1 << 19,
                scale_order_k: true,
                order_k_max: 1 << 22,
            },
            _ => ConsistencyStencilConfig {
                mean_kind: StencilKind::UniformCircle,
                mean_k: 256,
                order_kind: StencilKind::UniformCircle,
                order_k_base: 4096,
                scale_order_k: false,
                order_k_max: 1 << 16,
            },
        }
    }

    fn order_k_at(&self, h: f64) -> usize {
        let base_h = 2.0f64.powi(-6);
        let mut k = self.order_k_base as f64;
        if self.scale_order_k && h < base_h {
            k *= (base_h / h).sqrt();
        }
        let k = (k.ceil() as usize).min(self.order_k_max).max(4);
        k + (k % 2)
    }
}

/// Measured slopes `(φ - M^h φ)/h` down an h-ladder, with the analytic
/// target and a Richardson-extrapolated limit.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub p: Exponent,
    pub dimension: usize,
    pub probe: Vec<f64>,
    pub ladder: Vec<f64>,
    pub slopes: Vec<f64>,
    /// `-c(p,N) Δ¹_p φ(x)`.
    pub target: f64,
    pub extrapolated: f64,
    /// Observed order from successive slope differences (NaN when the
    /// slopes are constant to rounding).
    pub observed_order: f64,
}

impl ConsistencyReport {
    pub fn relative_error(&self) -> f64 {
        let scale = self.target.abs().max(1e-30);
        (self.extrapolated - self.target).abs() / scale
    }
}

/// Geometric-ladder slope measurement for the operator at (p, N) against
/// the analytic generator.
///
/// The function is sampled analytically; `x` must be a gradient point for
/// p != 2.
pub fn consistency_slope(
    p: Exponent,
    dimension: usize,
    f: &TestFunction,
    x: &[f64],
    ladder: &[f64],
    config: &ConsistencyStencilConfig,
) -> Result<ConsistencyReport> {
    if ladder.is_empty() {
        return Err(Error::usage("empty h ladder".to_string()));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::usage("h ladder must be strictly decreasing".to_string()));
    }
    if f.dimension() != dimension || x.len() != dimension {
        return Err(Error::usage(format!(
            "dimension mismatch: function {}, point {}, requested {dimension}",
            f.dimension(),
            x.len()
        )));
    }
    let needs_gradient = !matches!(p, Exponent::Finite(pv) if pv == 2.0);
    if needs_gradient {
        let g = f.gradient(x);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-6 {
            return Err(Error::domain(format!(
                "|grad| = {norm:.2e} at {x:?}; pick a probe with a nonvanishing gradient"
            )));
        }
    }

    let c = diffusion_coefficient_c(p, dimension)?;
    let generator = differential(DifferentialKind::OnePLaplacian(p), f, x)?;
    let target = -c * generator;

    let field = f.clone().as_field();
    let mut slopes = Vec::with_capacity(ladder.len());
    for &h in ladder {
        let params = SchemeParams::new(p, dimension, h)?;
        let choice = StencilChoice {
            mean_kind: config.mean_kind,
            mean_k: config.mean_k,
            order_kind: config.order_kind,
            order_k: config.order_k_at(h),
        };
        let stencils = StencilSet::with_choice(&params, &choice)?;
        let value = apply_blend_at(&field, x, &params, &stencils)?;
        slopes.push((f.value(x) - value) / h);
    }

    let (extrapolated, observed_order) = extrapolate_geometric(&slopes, target.abs().max(1.0));
    Ok(ConsistencyReport {
        p,
        dimension,
        probe: x.to_vec(),
        ladder: ladder.to_vec(),
        slopes,
        target,
        extrapolated,
        observed_order,
    })
}

/// Richardson-style limit for a ratio-2 ladder of measurements assumed to
/// behave like `s* + C ρ^k`; the order is estimated from successive
/// differences. Returns (limit, observed order).
///
/// Ladders dominated by stencil sampling noise have no geometric
/// structure; extrapolating those amplifies the noise, so the estimate
/// falls back to averaging the finest rungs when the successive
/// differences do not shrink consistently.
fn extrapolate_geometric(slopes: &[f64], scale: f64) -> (f64, f64) {
    let last = *slopes.last().unwrap();
    if slopes.len() < 3 {
        return (last, f64::NAN);
    }
    let tail_mean = |n: usize| {
        let k = n.min(slopes.len());
        slopes[slopes.len() - k..].iter().sum::<f64>() / k as f64
    };
    let diffs: Vec<f64> = slopes.windows(2).map(|w| w[1] - w[0]).collect();
    // Constant slopes (e.g. exact quadrature of quadratics): the limit is
    // the measurement itself.
    let eps = 1e-13 * scale;
    if diffs.iter().all(|d| d.abs() < eps) {
        return (last, f64::NAN);
    }
    let mut orders: Vec<f64> = diffs
        .windows(2)
        .filter(|w| w[0].abs() > eps && w[1].abs() > eps && w[0].signum() == w[1].signum())
        .map(|w| (w[0] / w[1]).abs().log2())
        .filter(|o| o.is_finite())
        .collect();
    if orders.len() < diffs.len() / 2 {
        // Sign flips or degenerate diffs dominate: noise, not convergence.
        return (tail_mean(3), f64::NAN);
    }
    orders.sort_unstable_by(f64::total_cmp);
    let order = orders[orders.len() / 2];
    if !(0.2..=8.0).contains(&order) {
        return (tail_mean(3), order);
    }
    let rho = 2.0f64.powf(-order);
    let d_last = *diffs.last().unwrap();
    let correction = d_last * rho / (1.0 - rho);
    if correction.abs() > 4.0 * d_last.abs() {
        return (tail_mean(3), order);
    }
    (last + correction, order)
}

/// Exact solution of `u_t = (1/N) Δu` with Gaussian data
/// `u0 = exp(-|x|^2/(4a))`.
pub fn gaussian_heat_exact(x: &[f64], t: f64, a: f64, dimension: usize) -> f64 {
    let s = a + t / dimension as f64;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (a / s).powf(dimension as f64 / 2.0) * (-r2 / (4.0 * s)).exp()
}

/// Radius at time `t` of a sphere shrinking under `dR/dt = -1/R`
/// (the normalized mean curvature flow of `|x| - R0`); 0 from the
/// extinction time `R0^2/2` onward.
pub fn shrinking_sphere_radius(r0: f64, t: f64) -> f64 {
    let d = r0 * r0 - 2.0 * t;
    if d <= 0.0 {
        0.0
    } else {
        d.sqrt()
    }
}

/// Central-difference gradient, for verifying analytic derivatives.
pub fn central_gradient(f: &TestFunction, x: &[f64], step: f64) -> Vec<f64> {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    for k in 0..n {
        xp[k] = x[k] + step;
        xm[k] = x[k] - step;
        g[k] = (f.value(&xp) - f.value(&xm)) / (2.0 * step);
        xp[k] = x[k];
        xm[k] = x[k];
    }
    g
}

/// Central-difference Hessian (row-major), for verifying analytic
/// derivatives.
pub fn central_hessian(f: &TestFunction, x: &[f64], step: f64) -> Vec<f64> {
    let n = x.len();
    let mut h = vec![0.0; n * n];
    let mut y = x.to_vec();
    let f0 = f.value(x);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                y[i] = x[i] + step;
                let fp = f.value(&y);
                y[i] = x[i] - step;
                let fm = f.value(&y);
                y[i] = x[i];
                h[i * n + i] = (fp - 2.0 * f0 + fm) / (step * step);
            } else {
                let mut acc = 0.0;
                for (si, sj, sign) in
                    [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)]
                {
                    y[i] = x[i] + si * step;
                    y[j] = x[j] + sj * step;
                    acc += sign * f.value(&y);
                    y[i] = x[i];
                    y[j] = x[j];
                }
                h[i * n + j] = acc / (4.0 * step * step);
            }
        }
    }
    h
}
