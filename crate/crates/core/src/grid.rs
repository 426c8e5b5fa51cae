//! Scalar fields on uniform Cartesian grids in 1--3 dimensions.
//!
//! A [`ScalarField`] is either grid-backed (node values plus multilinear
//! interpolation and an out-of-box [`ExtensionPolicy`]) or analytic (a pure
//! function, optionally with exact derivatives for reference checks). Both
//! expose the same evaluation interface so the averaging operators never
//! care which one they are sampling.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on total node count (2^24).
pub const DEFAULT_POINT_CAP: usize = 1 << 24;

/// Minimum nodes per axis.
pub const MIN_NODES_PER_AXIS: usize = 4;

/// Relative snap tolerance for detecting on-node sample coordinates.
const NODE_SNAP_TOL: f64 = 1e-9;

/// How a grid-backed field extends beyond its bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtensionPolicy {
    /// Evaluate at the nearest point of the box (constant along outward
    /// normals). Never produces values outside the stored range.
    ClampToNearestNode,
    /// A fixed far-field value outside the box.
    Constant(f64),
    /// Wrap coordinates with period `nodes * spacing` per axis.
    Periodic,
}

/// Geometry of a uniform grid: node counts, origin, and shared spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dimension: usize,
    cells: Vec<usize>,
    origin: Vec<f64>,
    spacing: f64,
}

impl GridSpec {
    /// Build a grid spec with the default node-count cap.
    pub fn new(cells: &[usize], origin: &[f64], spacing: f64) -> Result<Self> {
        Self::with_cap(cells, origin, spacing, DEFAULT_POINT_CAP)
    }

    /// Build a grid spec with an explicit cap on total node count.
    pub fn with_cap(cells: &[usize], origin: &[f64], spacing: f64, cap: usize) -> Result<Self> {
        let dimension = cells.len();
        if dimension == 0 || dimension > 3 {
            return Err(Error::usage(format!(
                "grid dimension must be 1, 2, or 3, got {dimension}"
            )));
        }
        if origin.len() != dimension {
            return Err(Error::usage(format!(
                "origin has {} entries but grid is {}-dimensional",
                origin.len(),
                dimension
            )));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::usage(format!("spacing must be positive, got {spacing}")));
        }
        if cells.iter().any(|&n| n < MIN_NODES_PER_AXIS) {
            return Err(Error::usage(format!(
                "each axis needs at least {MIN_NODES_PER_AXIS} nodes, got {cells:?}"
            )));
        }
        let total: usize = cells.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).ok_or_else(
            || Error::usage("node count overflows".to_string()),
        )?;
        if total > cap {
            return Err(Error::usage(format!(
                "grid has {total} nodes, exceeding the cap of {cap}"
            )));
        }
        if origin.iter().any(|v| !v.is_finite()) {
            return Err(Error::usage("origin must be finite".to_string()));
        }
        Ok(GridSpec {
            dimension,
            cells: cells.to_vec(),
            origin: origin.to_vec(),
            spacing,
        })
    }

    /// Grid covering the box `[lo, hi]^N` with `nodes` nodes per axis.
    pub fn on_box(lo: f64, hi: f64, nodes: usize, dimension: usize) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::usage(format!("box needs hi > lo, got [{lo}, {hi}]")));
        }
        if nodes < 2 {
            return Err(Error::usage("need at least 2 nodes per axis".to_string()));
        }
        let spacing = (hi - lo) / (nodes - 1) as f64;
        GridSpec::new(&vec![nodes; dimension], &vec![lo; dimension], spacing)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Nodes per axis.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn node_count(&self) -> usize {
        self.cells.iter().product()
    }

    /// Physical coordinate of the node with per-axis indices `idx`.
    pub fn node_position(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.origin)
            .map(|(&i, &o)| o + i as f64 * self.spacing)
            .collect()
    }

    /// Row-major flat index (last axis contiguous).
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (k, &i) in idx.iter().enumerate() {
            flat = flat * self.cells[k] + i;
        }
        flat
    }

    /// Per-axis indices for a row-major flat index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dimension];
        for k in (0..self.dimension).rev() {
            idx[k] = flat % self.cells[k];
            flat /= self.cells[k];
        }
        idx
    }

    /// Upper corner of the bounding box.
    pub fn upper(&self) -> Vec<f64> {
        self.cells
            .iter()
            .zip(&self.origin)
            .map(|(&n, &o)| o + (n - 1) as f64 * self.spacing)
            .collect()
    }

    /// Iterate all node positions together with their flat index.
    pub fn nodes(&self) -> NodeIter<'_> {
        NodeIter {
            spec: self,
            next: 0,
            total: self.node_count(),
        }
    }
}

/// Iterator over (flat index, position) of every node.
pub struct NodeIter<'a> {
    spec: &'a GridSpec,
    next: usize,
    total: usize,
}

impl Iterator for NodeIter<'_> {
    type Item = (usize, Vec<f64>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.total {
            return None;
        }
        let flat = self.next;
        self.next += 1;
        let idx = self.spec.multi_index(flat);
        Some((flat, self.spec.node_position(&idx)))
    }
}

/// Grid-backed field: node values, geometry, and extension policy.
#[derive(Debug, Clone)]
pub struct GridField {
    spec: GridSpec,
    values: Vec<f64>,
    extension: ExtensionPolicy,
}

impl GridField {
    pub fn new(spec: GridSpec, values: Vec<f64>, extension: ExtensionPolicy) -> Result<Self> {
        if values.len() != spec.node_count() {
            return Err(Error::usage(format!(
                "value array has {} entries but the grid has {} nodes",
                values.len(),
                spec.node_count()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::usage(format!(
                "non-finite value at flat node index {pos}"
            )));
        }
        Ok(GridField {
            spec,
            values,
            extension,
        })
    }

    /// Fill node values by evaluating `f` at every node position.
    pub fn from_fn(
        spec: GridSpec,
        extension: ExtensionPolicy,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let mut values = vec![0.0; spec.node_count()];
        for (flat, pos) in spec.nodes() {
            values[flat] = f(&pos);
        }
        GridField::new(spec, values, extension)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extension(&self) -> ExtensionPolicy {
        self.extension
    }

    /// Replace the value array, keeping geometry and extension.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        GridField::new(self.spec.clone(), values, self.extension)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Multilinear interpolation with the extension policy applied.
    ///
    /// Exact (bit-for-bit) at node positions; affine in the stored values.
    pub fn sample(&self, x: &[f64]) -> f64 {
        let n = self.spec.dimension;
        debug_assert_eq!(x.len(), n);

        // Continuous index coordinates per axis, with extension applied.
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for k in 0..n {
            let nodes = self.spec.cells[k];
            let mut t = (x[k] - self.spec.origin[k]) / self.spec.spacing;
            // Snap to the nearest integer coordinate so node queries return
            // stored values exactly.
            let r = t.round();
            if (t - r).abs() <= NODE_SNAP_TOL * r.abs().max(1.0) {
                t = r;
            }
            match self.extension {
                ExtensionPolicy::ClampToNearestNode => {
                    t = t.clamp(0.0, (nodes - 1) as f64);
                }
                ExtensionPolicy::Constant(c) => {
                    if t < 0.0 || t > (nodes - 1) as f64 {
                        return c;
                    }
                }
                ExtensionPolicy::Periodic => {
                    let period = nodes as f64;
                    t = t.rem_euclid(period);
                    if t >= period {
                        t = 0.0;
                    }
                }
            }
            let i = (t.floor() as isize).clamp(0, nodes as isize - 1) as usize;
            base[k] = i;
            frac[k] = t - i as f64;
        }

        // Accumulate the 2^N surrounding corners, skipping zero weights.
        let mut acc = 0.0;
        let corners = 1usize << n;
        for corner in 0..corners {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            for k in 0..n {
                let hi = (corner >> k) & 1 == 1;
                let nodes = self.spec.cells[k];
                if hi {
                    w *= frac[k];
                    idx[k] = match self.extension {
                        ExtensionPolicy::Periodic => (base[k] + 1) % nodes,
                        _ => (base[k] + 1).min(nodes - 1),
                    };
                } else {
                    w *= 1.0 - frac[k];
                    idx[k] = base[k];
                }
            }
            if w == 0.0 {
                continue;
            }
            let v = self.values[self.spec.flat_index(&idx[..n])];
            if w == 1.0 {
                return v;
            }
            acc += w * v;
        }
        acc
    }
}

/// Analytic field with optional exact derivatives.
pub trait AnalyticField: Send + Sync {
    fn dimension(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;

    /// Exact gradient when available.
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Exact Hessian, row-major N x N, when available.
    fn hessian(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// A scalar field of N variables: grid-backed or analytic.
#[derive(Clone)]
pub struct ScalarField {
    repr: FieldRepr,
}

#[derive(Clone)]
enum FieldRepr {
    Grid(Arc<GridField>),
    Analytic(Arc<dyn AnalyticField>),
}

impl ScalarField {
    pub fn from_grid(grid: GridField) -> Self {
        ScalarField {
            repr: FieldRepr::Grid(Arc::new(grid)),
        }
    }

    pub fn from_analytic(f: Arc<dyn AnalyticField>) -> Self {
        ScalarField {
            repr: FieldRepr::Analytic(f),
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.repr {
            FieldRepr::Grid(g) => g.spec().dimension(),
            FieldRepr::Analytic(f) => f.dimension(),
        }
    }

    pub fn as_grid(&self) -> Option<&GridField> {
        match &self.repr {
            FieldRepr::Grid(g) => Some(g),
            FieldRepr::Analytic(_) => None,
        }
    }

    /// Evaluate the field at `x`, validating the query first.
    pub fn sample(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::usage(format!(
                "sample point has {} coordinates but the field is {}-dimensional",
                x.len(),
                self.dimension()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::usage(format!("non-finite sample coordinate {x:?}")));
        }
        let v = self.sample_unchecked(x);
        if !v.is_finite() {
            return Err(Error::internal(format!("non-finite field value at {x:?}")));
        }
        Ok(v)
    }

    /// Evaluate without validation; used by inner loops after the caller
    /// has checked dimensions once.
    pub fn sample_unchecked(&self, x: &[f64]) -> f64 {
        match &self.repr {
            FieldRepr::Grid(g) => g.sample(x),
            FieldRepr::Analytic(f) => f.value(x),
        }
    }
}

/// Axis-aligned box used to restrict measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::usage("box corners have mismatched dimensions".to_string()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l <= h)) {
            return Err(Error::usage(format!("empty box region lo={lo:?} hi={hi:?}")));
        }
        Ok(BoxRegion { lo, hi })
    }

    /// Cube `[lo, hi]^dim`.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        BoxRegion::new(vec![lo; dim], vec![hi; dim])
    }

    /// Shrink every face inward by `margin`.
    pub fn shrunk(&self, margin: f64) -> Result<Self> {
        BoxRegion::new(
            self.lo.iter().map(|v| v + margin).collect(),
            self.hi.iter().map(|v| v - margin).collect(),
        )
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| v >= l && v <= h)
    }
}

/// Sup distance between two fields over the grid nodes inside `region`.
///
/// Nodes come from the first grid-backed operand; at least one operand must
/// be grid-backed.
pub fn linf_distance(f: &ScalarField, g: &ScalarField, region: &BoxRegion) -> Result<f64> {
    if f.dimension() != g.dimension() {
        return Err(Error::usage(format!(
            "fields have dimensions {} and {}",
            f.dimension(),
            g.dimension()
        )));
    }
    if region.lo.len() != f.dimension() {
        return Err(Error::usage(format!(
            "region is {}-dimensional but fields are {}-dimensional",
            region.lo.len(),
            f.dimension()
        )));
    }
    let grid = f
        .as_grid()
        .or_else(|| g.as_grid())
        .ok_or_else(|| Error::usage("linf_distance needs at least one grid-backed field"))?;

    let mut max = f64::NEG_INFINITY;
    let mut seen = false;
    for (_, pos) in grid.spec().nodes() {
        if !region.contains(&pos) {
            continue;
        }
        seen = true;
        let d = (f.sample_unchecked(&pos) - g.sample_unchecked(&pos)).abs();
        if d > max {
            max = d;
        }
    }
    if !seen {
        return Err(Error::usage(format!(
            "region {region:?} contains no grid nodes"
        )));
    }
    Ok(max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_1d(values: &[f64], origin: f64, spacing: f64) -> GridField {
        let spec = GridSpec::new(&[values.len()], &[origin], spacing).unwrap();
        GridField::new(spec, values.to_vec(), ExtensionPolicy::ClampToNearestNode).unwrap()
    }

    #[test]
    fn constant_field_samples_constant() {
        let spec = GridSpec::on_box(-1.0, 1.0, 8, 2).unwrap();
        let f = GridField::from_fn(spec, ExtensionPolicy::ClampToNearestNode, |_| 4.25).unwrap();
        for x in [[-0.3, 0.9], [0.0, 0.0], [2.0, -5.0]] {
            assert_eq!(f.sample(&x), 4.25);
        }
    }

    #[test]
    fn affine_field_interpolates_exactly_in_box() {
        let spec = GridSpec::on_box(-1.0, 1.0, 9, 2).unwrap();
        let f = GridField::from_fn(spec, ExtensionPolicy::ClampToNearestNode, |x| {
            2.0 * x[0] - 0.5 * x[1] + 3.0
        })
        .unwrap();
        for x in [[0.1, 0.2], [-0.73, 0.41], [0.999, -0.999]] {
            let exact = 2.0 * x[0] - 0.5 * x[1] + 3.0;
            assert!((f.sample(&x) - exact).abs() < 1e-12, "at {x:?}");
        }
    }

    #[test]
    fn linear_interpolation_1d() {
        let f = grid_1d(&[0.0, 1.0, 2.0, 3.0], 0.0, 1.0);
        assert!((f.sample(&[0.25]) - 0.25).abs() < 1e-15);
        assert!((f.sample(&[2.5]) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn node_samples_are_bit_exact() {
        let spec = GridSpec::on_box(-3.0, 3.0, 17, 2).unwrap();
        let f = GridField::from_fn(spec.clone(), ExtensionPolicy::ClampToNearestNode, |x| {
            (x[0] * 1.7).sin() * (x[1] * 0.3).cos() + 0.123456789
        })
        .unwrap();
        for (flat, pos) in spec.nodes() {
            let v = f.sample(&pos);
            assert!(
                v.to_bits() == f.values()[flat].to_bits(),
                "node {flat} at {pos:?}: {v} vs {}",
                f.values()[flat]
            );
        }
    }

    #[test]
    fn clamp_extension_stays_within_bounds() {
        let f = grid_1d(&[1.0, 5.0, -2.0, 0.5], 0.0, 0.5);
        for x in [-10.0, -0.1, 1.6, 99.0] {
            let v = f.sample(&[x]);
            assert!((-2.0..=5.0).contains(&v), "x={x} gave {v}");
        }
        assert_eq!(f.sample(&[-3.0]), 1.0);
        assert_eq!(f.sample(&[7.0]), 0.5);
    }

    #[test]
    fn constant_extension_returns_far_field() {
        let spec = GridSpec::new(&[4], &[0.0], 1.0).unwrap();
        let f = GridField::new(spec, vec![1.0, 2.0, 3.0, 4.0], ExtensionPolicy::Constant(-7.0))
            .unwrap();
        assert_eq!(f.sample(&[-0.5]), -7.0);
        assert_eq!(f.sample(&[3.5]), -7.0);
        assert_eq!(f.sample(&[1.0]), 2.0);
    }

    #[test]
    fn periodic_extension_wraps() {
        let spec = GridSpec::new(&[4], &[0.0], 1.0).unwrap();
        let f = GridField::new(spec, vec![10.0, 20.0, 30.0, 40.0], ExtensionPolicy::Periodic)
            .unwrap();
        // Period is 4: x = 4 maps back to node 0.
        assert_eq!(f.sample(&[4.0]), 10.0);
        assert_eq!(f.sample(&[5.0]), 20.0);
        assert_eq!(f.sample(&[-1.0]), 40.0);
        // Between the last node and the wrapped first node.
        assert!((f.sample(&[3.5]) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn sample_rejects_bad_queries() {
        let f = ScalarField::from_grid(grid_1d(&[0.0, 1.0, 2.0, 3.0], 0.0, 1.0));
        assert!(matches!(f.sample(&[0.0, 1.0]), Err(Error::Usage(_))));
        assert!(matches!(f.sample(&[f64::NAN]), Err(Error::Usage(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(&[3], &[0.0], 1.0).is_err()); // too few nodes
        assert!(GridSpec::new(&[8], &[0.0], 0.0).is_err()); // zero spacing
        assert!(GridSpec::new(&[8, 8], &[0.0], 1.0).is_err()); // origin mismatch
        assert!(GridSpec::with_cap(&[100, 100], &[0.0, 0.0], 1.0, 64).is_err()); // cap
        assert!(GridSpec::new(&[8, 8, 8, 8], &[0.0; 4], 1.0).is_err()); // dim 4
    }

    #[test]
    fn linf_distance_cases() {
        let spec = GridSpec::on_box(0.0, 1.0, 5, 1).unwrap();
        let f = GridField::from_fn(spec.clone(), ExtensionPolicy::ClampToNearestNode, |x| x[0])
            .unwrap();
        let g = GridField::from_fn(spec, ExtensionPolicy::ClampToNearestNode, |_| 0.0).unwrap();
        let f = ScalarField::from_grid(f);
        let g = ScalarField::from_grid(g);
        let region = BoxRegion::cube(0.0, 1.0, 1).unwrap();
        assert_eq!(linf_distance(&f, &f, &region).unwrap(), 0.0);
        assert_eq!(linf_distance(&f, &g, &region).unwrap(), 1.0);
        // Shifted field: distance is the shift.
        let shifted = GridField::from_fn(
            GridSpec::on_box(0.0, 1.0, 5, 1).unwrap(),
            ExtensionPolicy::ClampToNearestNode,
            |x| x[0] + 3.0,
        )
        .unwrap();
        let shifted = ScalarField::from_grid(shifted);
        assert_eq!(linf_distance(&shifted, &f, &region).unwrap(), 3.0);
        // Region outside the grid has no nodes.
        let empty = BoxRegion::cube(5.0, 6.0, 1).unwrap();
        assert!(linf_distance(&f, &g, &empty).is_err());
    }

    #[test]
    fn interpolation_is_affine_in_values() {
        let spec = GridSpec::on_box(0.0, 1.0, 6, 2).unwrap();
        let base = GridField::from_fn(spec.clone(), ExtensionPolicy::ClampToNearestNode, |x| {
            (3.1 * x[0]).sin() + x[1] * x[1]
        })
        .unwrap();
        let alpha = 2.5;
        let beta = -1.25;
        let scaled_values: Vec<f64> = base.values().iter().map(|v| alpha * v + beta).collect();
        let scaled = base.with_values(scaled_values).unwrap();
        for x in [[0.21, 0.67], [0.88, 0.13], [0.5, 0.5]] {
            let lhs = scaled.sample(&x);
            let rhs = alpha * base.sample(&x) + beta;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
