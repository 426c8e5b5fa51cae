//! Pointwise application of the statistical operator and its iteration,
//! realizing `u(t) = (M^{t/n}_p)^n u0` on a grid.
//!
//! Free-space mode averages over the full sphere of radius `√(2h)`; the
//! Dirichlet mode truncates the radius to the boundary distance and holds
//! boundary values fixed. The 2D Catte min-max segment operator is kept
//! alongside as an independent cross-check scheme for mean curvature flow.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{BoxRegion, GridField, GridSpec, ScalarField};
use crate::statistics::{
    median_inplace, midrange_unchecked, weighted_mean_unchecked, Exponent, ResolvedBlend,
    SchemeParams, Statistic,
};
use crate::stencil::{build_stencil, SphereStencil, StencilKind};

/// Default lower bound on `√(2h) / δx`; below this the sphere
/// under-resolves the grid and the operator degenerates to interpolation
/// noise.
pub const DEFAULT_RADIUS_GUARD: f64 = 2.0;

/// Which stencil families and sample counts a run uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilChoice {
    pub mean_kind: StencilKind,
    pub mean_k: usize,
    pub order_kind: StencilKind,
    pub order_k: usize,
}

impl StencilChoice {
    /// Defaults: 64 circle samples in 2D; Gauss-azimuth 128 for the mean
    /// and symmetrized Fibonacci 128 for order statistics in 3D.
    pub fn defaults(dimension: usize) -> StencilChoice {
        match dimension {
            3 => StencilChoice {
                mean_kind: StencilKind::GaussAzimuth3D,
                mean_k: 128,
                order_kind: StencilKind::SymmetrizedFibonacci3D,
                order_k: 128,
            },
            _ => StencilChoice {
                mean_kind: StencilKind::UniformCircle,
                mean_k: 64,
                order_kind: StencilKind::UniformCircle,
                order_k: 64,
            },
        }
    }
}

/// One quadrature stencil for the mean and one order-statistic stencil for
/// the median/midrange, at a common radius.
#[derive(Debug, Clone)]
pub struct StencilSet {
    pub mean: Option<SphereStencil>,
    pub order: Option<SphereStencil>,
}

impl StencilSet {
    /// Build the stencils a blend at these parameters needs.
    pub fn for_params(params: &SchemeParams) -> Result<StencilSet> {
        StencilSet::with_choice(params, &StencilChoice::defaults(params.dimension))
    }

    pub fn with_choice(params: &SchemeParams, choice: &StencilChoice) -> Result<StencilSet> {
        if params.dimension == 1 {
            return Ok(StencilSet {
                mean: None,
                order: None,
            });
        }
        let blend = Statistic::Blend(params.p).resolve(params.dimension)?;
        let mean = if blend.mean_weight != 0.0 {
            Some(build_stencil(
                params.dimension,
                params.h,
                choice.mean_k,
                choice.mean_kind,
            )?)
        } else {
            None
        };
        let order = if blend.median_weight != 0.0 || blend.midrange_weight != 0.0 {
            Some(build_stencil(
                params.dimension,
                params.h,
                choice.order_k,
                choice.order_kind,
            )?)
        } else {
            None
        };
        Ok(StencilSet { mean, order })
    }
}

/// Evolution mode: the whole space, or a bounded domain with held
/// boundary values and truncated averaging radii.
#[derive(Clone, Copy)]
pub enum Mode<'a> {
    FreeSpace,
    Dirichlet(&'a DirichletProblem),
}

/// Supported domain shapes with exact distance-to-boundary functions.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainShape {
    /// Axis-aligned box `[lo, hi]` per axis.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Disk (2D) or ball (3D).
    Ball { center: Vec<f64>, radius: f64 },
}

impl DomainShape {
    /// Signed distance to the boundary: positive inside, negative outside.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match self {
            DomainShape::Box { lo, hi } => {
                let mut inside_min = f64::INFINITY;
                let mut outside_sq = 0.0;
                for k in 0..x.len() {
                    let d_lo = x[k] - lo[k];
                    let d_hi = hi[k] - x[k];
                    inside_min = inside_min.min(d_lo.min(d_hi));
                    let out = (-d_lo).max(-d_hi).max(0.0);
                    outside_sq += out * out;
                }
                if outside_sq > 0.0 {
                    -outside_sq.sqrt()
                } else {
                    inside_min
                }
            }
            DomainShape::Ball { center, radius } => {
                let r: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                radius - r
            }
        }
    }
}

/// How a grid node relates to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Boundary,
    Exterior,
}

/// A bounded domain with per-grid node classification; boundary-band and
/// exterior nodes keep their initial values, interior nodes average over
/// spheres truncated to the boundary distance.
///
/// The boundary band is the set of nodes within `band_width` inside the
/// closure (default: one grid spacing). Without it, nodes arbitrarily
/// close to the boundary would get arbitrarily small truncated radii and
/// mix at a rate proportional to `(dist/δx)^2`, stalling fixed-point
/// iterations; the band bounds every interior radius below by
/// `band_width`.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    shape: DomainShape,
    spec: GridSpec,
    band_width: f64,
    classes: Vec<NodeClass>,
    distances: Vec<f64>,
}

impl DirichletProblem {
    /// Classify with the default band of one grid spacing.
    pub fn new(shape: DomainShape, spec: &GridSpec) -> Result<DirichletProblem> {
        let band = spec.spacing();
        DirichletProblem::with_band(shape, spec, band)
    }

    /// Classify with an explicit boundary band width (>= 0; nodes exactly
    /// on the boundary are always in the band).
    pub fn with_band(shape: DomainShape, spec: &GridSpec, band_width: f64) -> Result<DirichletProblem> {
        match &shape {
            DomainShape::Box { lo, hi } => {
                if lo.len() != spec.dimension() || hi.len() != spec.dimension() {
                    return Err(Error::usage("domain dimension does not match grid".to_string()));
                }
                if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
                    return Err(Error::usage("box domain needs lo < hi".to_string()));
                }
            }
            DomainShape::Ball { center, radius } => {
                if center.len() != spec.dimension() {
                    return Err(Error::usage("domain dimension does not match grid".to_string()));
                }
                if !(*radius > 0.0) {
                    return Err(Error::usage("ball domain needs a positive radius".to_string()));
                }
            }
        }
        if !(band_width >= 0.0) || !band_width.is_finite() {
            return Err(Error::usage(format!(
                "band width must be finite and >= 0, got {band_width}"
            )));
        }
        let mut classes = Vec::with_capacity(spec.node_count());
        let mut distances = Vec::with_capacity(spec.node_count());
        for (_, pos) in spec.nodes() {
            let d = shape.signed_distance(&pos);
            distances.push(d);
            classes.push(if d > band_width {
                NodeClass::Interior
            } else if d >= 0.0 {
                NodeClass::Boundary
            } else {
                NodeClass::Exterior
            });
        }
        Ok(DirichletProblem {
            shape,
            spec: spec.clone(),
            band_width,
            classes,
            distances,
        })
    }

    pub fn band_width(&self) -> f64 {
        self.band_width
    }

    pub fn shape(&self) -> &DomainShape {
        &self.shape
    }

    pub fn class(&self, flat: usize) -> NodeClass {
        self.classes[flat]
    }

    pub fn boundary_distance(&self, flat: usize) -> f64 {
        self.distances[flat]
    }

    pub fn interior_count(&self) -> usize {
        self.classes
            .iter()
            .filter(|c| **c == NodeClass::Interior)
            .count()
    }
}

/// Per-worker sample buffers reused across nodes.
#[derive(Default)]
struct SampleBufs {
    mean: Vec<f64>,
    order: Vec<f64>,
}

/// Core blend evaluation. Returns NaN if any sample is non-finite; the
/// caller turns that into a located error.
fn blend_value<F: Fn(&[f64]) -> f64>(
    sample: &F,
    x: &[f64],
    radius: f64,
    dimension: usize,
    blend: &ResolvedBlend,
    stencils: &StencilSet,
    bufs: &mut SampleBufs,
) -> f64 {
    // N = 1: every operator collapses to the two-point average, bit-exactly
    // the same arithmetic for all p.
    if dimension == 1 {
        let lo = [x[0] - radius];
        let hi = [x[0] + radius];
        let a = sample(&lo);
        let b = sample(&hi);
        return (0.5 * (a + b)).clamp(a.min(b), a.max(b));
    }

    let mut point = [0.0f64; 3];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut acc = 0.0;

    if blend.mean_weight != 0.0 {
        let st = stencils.mean.as_ref().expect("mean stencil missing");
        bufs.mean.clear();
        for i in 0..st.len() {
            let d = st.direction(i);
            for k in 0..dimension {
                point[k] = x[k] + radius * d[k];
            }
            let v = sample(&point[..dimension]);
            lo = lo.min(v);
            hi = hi.max(v);
            bufs.mean.push(v);
        }
        acc += blend.mean_weight * weighted_mean_unchecked(&bufs.mean, st.weights());
    }

    if blend.median_weight != 0.0 || blend.midrange_weight != 0.0 {
        let st = stencils.order.as_ref().expect("order stencil missing");
        bufs.order.clear();
        for i in 0..st.len() {
            let d = st.direction(i);
            for k in 0..dimension {
                point[k] = x[k] + radius * d[k];
            }
            let v = sample(&point[..dimension]);
            lo = lo.min(v);
            hi = hi.max(v);
            bufs.order.push(v);
        }
        if blend.median_weight != 0.0 {
            acc += blend.median_weight * median_inplace(&mut bufs.order);
        } else {
            acc += blend.midrange_weight * midrange_unchecked(&bufs.order);
        }
    }

    acc.clamp(lo, hi)
}

fn check_stencil_radius(params: &SchemeParams, stencils: &StencilSet) -> Result<()> {
    if params.dimension == 1 {
        return Ok(());
    }
    let expected = params.radius();
    for st in [&stencils.mean, &stencils.order].into_iter().flatten() {
        if (st.radius() - expected).abs() > 1e-9 * expected.max(1.0) {
            return Err(Error::usage(format!(
                "stencil radius {} does not match sqrt(2h) = {expected}",
                st.radius()
            )));
        }
        if st.dimension() != params.dimension {
            return Err(Error::usage(format!(
                "stencil dimension {} does not match params dimension {}",
                st.dimension(),
                params.dimension
            )));
        }
    }
    Ok(())
}

/// One application of the statistical operator at a single point.
///
/// Samples the field at `x + √(2h) d` over each stencil direction and
/// returns the q-weighted combination of the resolved statistics; the
/// result lies within the sampled range.
pub fn apply_blend_at(
    field: &ScalarField,
    x: &[f64],
    params: &SchemeParams,
    stencils: &StencilSet,
) -> Result<f64> {
    if x.len() != params.dimension || x.len() != field.dimension() {
        return Err(Error::usage(format!(
            "point has {} coordinates, params say {}, field says {}",
            x.len(),
            params.dimension,
            field.dimension()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::usage(format!("non-finite evaluation point {x:?}")));
    }
    check_stencil_radius(params, stencils)?;
    let blend = if params.dimension == 1 {
        ResolvedBlend {
            median_weight: 0.0,
            midrange_weight: 0.0,
            mean_weight: 1.0,
        }
    } else {
        Statistic::Blend(params.p).resolve(params.dimension)?
    };
    let mut bufs = SampleBufs::default();
    let sampler = |y: &[f64]| field.sample_unchecked(y);
    let v = blend_value(
        &sampler,
        x,
        params.radius(),
        params.dimension,
        &blend,
        stencils,
        &mut bufs,
    );
    if !v.is_finite() {
        return Err(Error::internal(format!(
            "non-finite sample while averaging at {x:?} (radius {})",
            params.radius()
        )));
    }
    Ok(v)
}

/// One full-grid application of the operator with the default radius guard.
pub fn step(
    field: &GridField,
    params: &SchemeParams,
    mode: Mode<'_>,
    stencils: &StencilSet,
) -> Result<GridField> {
    step_guarded(field, params, mode, stencils, DEFAULT_RADIUS_GUARD)
}

/// One full-grid application of the operator.
///
/// Free space: every node is replaced by the blend at radius `√(2h)`.
/// Dirichlet: interior nodes use the truncated radius
/// `min(√(2h), dist(x, ∂Ω))`; boundary and exterior nodes are untouched.
pub fn step_guarded(
    field: &GridField,
    params: &SchemeParams,
    mode: Mode<'_>,
    stencils: &StencilSet,
    radius_guard: f64,
) -> Result<GridField> {
    let spec = field.spec();
    if params.dimension != spec.dimension() {
        return Err(Error::usage(format!(
            "params dimension {} does not match grid dimension {}",
            params.dimension,
            spec.dimension()
        )));
    }
    let radius = params.radius();
    let dx = spec.spacing();
    if radius < radius_guard * dx {
        return Err(Error::usage(format!(
            "radius sqrt(2h) = {radius} under-resolves the grid: need at least {radius_guard} * spacing = {}",
            radius_guard * dx
        )));
    }
    check_stencil_radius(params, stencils)?;
    if let Mode::Dirichlet(problem) = mode {
        if problem.spec != *spec {
            return Err(Error::usage(
                "Dirichlet problem was classified on a different grid".to_string(),
            ));
        }
    }
    let blend = if params.dimension == 1 {
        ResolvedBlend {
            median_weight: 0.0,
            midrange_weight: 0.0,
            mean_weight: 1.0,
        }
    } else {
        Statistic::Blend(params.p).resolve(params.dimension)?
    };

    let n = params.dimension;
    let values: Vec<f64> = (0..spec.node_count())
        .into_par_iter()
        .map_init(SampleBufs::default, |bufs, flat| {
            let idx = spec.multi_index(flat);
            let pos = spec.node_position(&idx);
            let sampler = |y: &[f64]| field.sample(y);
            match mode {
                Mode::FreeSpace => {
                    blend_value(&sampler, &pos, radius, n, &blend, stencils, bufs)
                }
                Mode::Dirichlet(problem) => match problem.class(flat) {
                    NodeClass::Interior => {
                        let r_eff = radius.min(problem.boundary_distance(flat));
                        blend_value(&sampler, &pos, r_eff, n, &blend, stencils, bufs)
                    }
                    NodeClass::Boundary | NodeClass::Exterior => field.values()[flat],
                },
            }
        })
        .collect();

    if let Some(flat) = values.iter().position(|v| !v.is_finite()) {
        let idx = spec.multi_index(flat);
        let pos = spec.node_position(&idx);
        return Err(Error::internal(format!(
            "non-finite averaged value at node {idx:?} (position {pos:?})"
        )));
    }
    field.with_values(values)
}

/// Options for [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    /// Stencil families and sample counts; `None` takes the per-dimension
    /// defaults.
    pub stencils: Option<StencilChoice>,
    /// Step indices (1-based, "after k steps") at which to keep snapshots.
    pub snapshots: Vec<usize>,
    /// Lower bound on `√(2h) / δx`.
    pub radius_guard: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            stencils: None,
            snapshots: Vec::new(),
            radius_guard: DEFAULT_RADIUS_GUARD,
        }
    }
}

/// Outcome of an [`evolve`] run with diagnostics.
#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub field: GridField,
    pub params: SchemeParams,
    pub steps: usize,
    pub snapshots: Vec<(usize, GridField)>,
    /// Sup of |u| after each step (index 0 is the initial field).
    pub sup_history: Vec<f64>,
    pub elapsed: Duration,
}

/// Iterate the operator `n` times with step `h = t/n`.
pub fn evolve(
    u0: &GridField,
    p: Exponent,
    t: f64,
    n: usize,
    mode: Mode<'_>,
    opts: &EvolveOptions,
) -> Result<EvolutionRun> {
    if n == 0 {
        return Err(Error::usage("step count must be >= 1".to_string()));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::usage(format!("target time must be positive, got {t}")));
    }
    let params = SchemeParams::new(p, u0.spec().dimension(), t / n as f64)?;
    let choice = opts
        .stencils
        .unwrap_or_else(|| StencilChoice::defaults(params.dimension));
    let stencils = StencilSet::with_choice(&params, &choice)?;

    let start = Instant::now();
    let mut field = u0.clone();
    let mut sup_history = vec![field.max_abs()];
    let mut snapshots = Vec::new();
    for k in 1..=n {
        field = step_guarded(&field, &params, mode, &stencils, opts.radius_guard)?;
        sup_history.push(field.max_abs());
        if opts.snapshots.contains(&k) {
            snapshots.push((k, field.clone()));
        }
    }
    Ok(EvolutionRun {
        field,
        params,
        steps: n,
        snapshots,
        sup_history,
        elapsed: start.elapsed(),
    })
}

/// Measurement region: the grid box shrunk by `√(2t) + 4 δx` per face,
/// keeping boundary-extension contamination out of error norms.
pub fn interior_region(spec: &GridSpec, t: f64) -> Result<BoxRegion> {
    let margin = (2.0 * t).sqrt() + 4.0 * spec.spacing();
    let lo: Vec<f64> = spec.origin().iter().map(|v| v + margin).collect();
    let hi: Vec<f64> = spec.upper().iter().map(|v| v - margin).collect();
    BoxRegion::new(lo, hi)
        .map_err(|_| Error::usage(format!("interior margin {margin} leaves no measurement region")))
}

/// Sup distance between the `n`-step and `2n`-step evolutions on the
/// uncontaminated interior; an empirical convergence monitor for the
/// exponential formula.
pub fn cauchy_gap(
    u0: &GridField,
    p: Exponent,
    t: f64,
    n: usize,
    mode: Mode<'_>,
    opts: &EvolveOptions,
    region: Option<&BoxRegion>,
) -> Result<f64> {
    let coarse = evolve(u0, p, t, n, mode, opts)?;
    let fine = evolve(u0, p, t, 2 * n, mode, opts)?;
    let default_region;
    let region = match region {
        Some(r) => r,
        None => {
            default_region = interior_region(u0.spec(), t)?;
            &default_region
        }
    };
    crate::grid::linf_distance(
        &ScalarField::from_grid(coarse.field),
        &ScalarField::from_grid(fine.field),
        region,
    )
}

/// One step of the 2D Catte min-max segment operator
/// `C_h = (sup_th inf_seg + inf_th sup_seg) / 2` with segment half-length
/// `√(4h)`; an independent approximation of mean curvature flow.
pub fn catte_step_2d(field: &GridField, h: f64) -> Result<GridField> {
    catte_step_2d_with(field, h, 32, 17)
}

pub fn catte_step_2d_with(
    field: &GridField,
    h: f64,
    directions: usize,
    segment_samples: usize,
) -> Result<GridField> {
    let spec = field.spec();
    if spec.dimension() != 2 {
        return Err(Error::usage(format!(
            "the Catte operator is 2D only, grid is {}-dimensional",
            spec.dimension()
        )));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::usage(format!("step h must be positive, got {h}")));
    }
    if directions < 8 {
        return Err(Error::usage(format!(
            "need at least 8 segment directions, got {directions}"
        )));
    }
    if segment_samples < 3 {
        return Err(Error::usage(format!(
            "need at least 3 samples per segment, got {segment_samples}"
        )));
    }
    let half_len = (4.0 * h).sqrt();
    let thetas: Vec<(f64, f64)> = (0..directions)
        .map(|j| {
            let th = std::f64::consts::PI * j as f64 / directions as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let offsets: Vec<f64> = (0..segment_samples)
        .map(|i| half_len * (2.0 * i as f64 / (segment_samples - 1) as f64 - 1.0))
        .collect();

    let values: Vec<f64> = (0..spec.node_count())
        .into_par_iter()
        .map(|flat| {
            let idx = spec.multi_index(flat);
            let pos = spec.node_position(&idx);
            let mut sup_of_inf = f64::NEG_INFINITY;
            let mut inf_of_sup = f64::INFINITY;
            for &(c, s) in &thetas {
                let mut seg_min = f64::INFINITY;
                let mut seg_max = f64::NEG_INFINITY;
                for &o in &offsets {
                    let v = field.sample(&[pos[0] + o * c, pos[1] + o * s]);
                    seg_min = seg_min.min(v);
                    seg_max = seg_max.max(v);
                }
                sup_of_inf = sup_of_inf.max(seg_min);
                inf_of_sup = inf_of_sup.min(seg_max);
            }
            0.5 * (sup_of_inf + inf_of_sup)
        })
        .collect();

    if let Some(flat) = values.iter().position(|v| !v.is_finite()) {
        let idx = spec.multi_index(flat);
        return Err(Error::internal(format!(
            "non-finite Catte value at node {idx:?}"
        )));
    }
    field.with_values(values)
}

/// Radius of the smallest origin-centered ball containing every node with
/// `|value| > threshold`; 0 for an empty super-level set.
pub fn measure_support_radius(field: &GridField, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::usage(format!(
            "support threshold must be positive, got {threshold}"
        )));
    }
    let mut radius: f64 = 0.0;
    for (flat, pos) in field.spec().nodes() {
        if field.values()[flat].abs() > threshold {
            let r = pos.iter().map(|v| v * v).sum::<f64>().sqrt();
            radius = radius.max(r);
        }
    }
    Ok(radius)
}

/// Zero-crossing radius of a radially monotone field, linearly
/// interpolated along the 2N axis rays from the origin and averaged.
pub fn extract_zero_level_radius(field: &GridField) -> Result<f64> {
    let spec = field.spec();
    let n = spec.dimension();
    // Node indices closest to the origin per axis.
    let mut center = vec![0usize; n];
    for k in 0..n {
        let t = (0.0 - spec.origin()[k]) / spec.spacing();
        let i = t.round().clamp(0.0, (spec.cells()[k] - 1) as f64) as usize;
        center[k] = i;
    }

    let mut radii = Vec::with_capacity(2 * n);
    for axis in 0..n {
        for dir in [1isize, -1isize] {
            let ray_name = format!("{}{}", if dir > 0 { "+" } else { "-" }, (b'x' + axis as u8) as char);
            let mut idx = center.clone();
            let mut prev_pos = spec.node_position(&idx);
            let mut prev_val = field.values()[spec.flat_index(&idx)];
            let mut found = None;
            loop {
                let next = idx[axis] as isize + dir;
                if next < 0 || next >= spec.cells()[axis] as isize {
                    break;
                }
                idx[axis] = next as usize;
                let pos = spec.node_position(&idx);
                let val = field.values()[spec.flat_index(&idx)];
                if prev_val == 0.0 {
                    found = Some(prev_pos.clone());
                    break;
                }
                if prev_val * val < 0.0 {
                    let frac = prev_val / (prev_val - val);
                    let cross: Vec<f64> = prev_pos
                        .iter()
                        .zip(&pos)
                        .map(|(a, b)| a + frac * (b - a))
                        .collect();
                    found = Some(cross);
                    break;
                }
                prev_pos = pos;
                prev_val = val;
            }
            match found {
                Some(cross) => {
                    radii.push(cross.iter().map(|v| v * v).sum::<f64>().sqrt());
                }
                None => {
                    return Err(Error::diagnostic(format!(
                        "no sign change along ray {ray_name}"
                    )));
                }
            }
        }
    }
    Ok(radii.iter().sum::<f64>() / radii.len() as f64)
}
