//! Statistical averaging operators for homogeneous diffusion.
//!
//! The operator `M^h_p` replaces a function value at `x` by a blend of the
//! mean, median, and midrange of the function over the sphere
//! `∂B(x, √(2h))`. Iterating it `n` times with `h = t/n` approximates the
//! solution of `u_t = c(p,N) Δ¹_p u`, covering linear diffusion (p = 2),
//! level-set mean curvature flow (p = 1), and the parabolic
//! infinity-Laplacian (p = ∞) in one family.
//!
//! The crate provides:
//!
//! - [`grid`]: scalar fields on uniform grids with multilinear
//!   interpolation and out-of-box extension, plus analytic fields behind
//!   the same evaluation interface;
//! - [`stencil`]: sphere direction sets and quadrature weights;
//! - [`statistics`]: the three set statistics and the blend coefficients
//!   `q(p, N)` and `c(p, N)`;
//! - [`evolve`]: pointwise operator application, free-space and Dirichlet
//!   iteration, the 2D Catte min-max cross-check, and front/support
//!   measurement helpers;
//! - [`reference`]: analytic differential operators, exact solutions, and
//!   the consistency measurement harness;
//! - [`experiments`]: reproducible experiment runners behind the CLI.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod error;
pub mod evolve;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod reference;
pub mod statistics;
pub mod stencil;

pub use error::{Error, Result};
pub use evolve::{
    apply_blend_at, cauchy_gap, catte_step_2d, evolve, extract_zero_level_radius, interior_region,
    measure_support_radius, step, DirichletProblem, DomainShape, EvolveOptions, Mode,
    StencilChoice, StencilSet,
};
pub use grid::{BoxRegion, ExtensionPolicy, GridField, GridSpec, ScalarField};
pub use reference::{
    catalogue, consistency_slope, differential, gaussian_heat_exact, identity_check_decompositions,
    shrinking_sphere_radius, ConsistencyReport, ConsistencyStencilConfig, DifferentialKind,
    TestFunction,
};
pub use statistics::{
    blend_weight_q, diffusion_coefficient_c, median, midrange, weighted_mean, Exponent,
    SchemeParams, Statistic,
};
pub use stencil::{build_stencil, SphereStencil, StencilKind};
