//! Planar polynomial vector fields: parsing, equilibrium classification,
//! numerical integration, phase portraits, and ridge-orientation fields.
//!
//! The crate is built around a parametric family of planar systems whose
//! phase portraits deform like the ridge flow of whorl fingerprints:
//!
//! ```text
//! x' = y
//! y' = -x(x^2 - 1)^2 + theta * y * (x^2 - 1)^2
//! ```
//!
//! Everything is expressed over canonical bivariate polynomials
//! ([`Poly2`]), so Jacobians, Taylor recentering, and degenerate-point
//! normal forms are computed exactly rather than by finite differences.
//!
//! Module map:
//! - [`poly`] — canonical polynomials and exact calculus on them
//! - [`expr`] — text grammar for field definitions with named parameters
//! - [`field`] — planar fields, the whorl family, first-order jets
//! - [`equilibrium`] — root finding and the full classification table
//! - [`integrate`] — RK4 and an embedded adaptive pair, axis crossings
//! - [`portrait`] — streamlines, separatrices, orientation grids
//! - [`export`] — SVG / PGM / CSV serialization

pub mod equilibrium;
pub mod export;
pub mod expr;
pub mod field;
pub mod geom;
pub mod integrate;
pub mod poly;
pub mod portrait;

pub use equilibrium::{
    classify, classify_degenerate, classify_linear, eigenvalues, extract_normal_form,
    find_equilibria, find_equilibria_with, EquilibriumKind, EquilibriumReport, EquilibriumSearch,
    FinderConfig, NormalFormData, NormalFormError,
};
pub use export::{render_svg, write_csv, write_pgm, SvgStyle};
pub use expr::{bind, parse_numeric, parse_poly, tokenize, ExprError, ParamBinding, SymPoly2};
pub use field::{whorl_family, whorl_hamiltonian, FieldError, Jet1, Mat2, PlanarField};
pub use geom::{Point, Rect};
pub use integrate::{
    axis_crossings, integrate_adaptive, integrate_fixed, step_rk4, AxisCrossing, IntegrateError,
    IntegratorConfig, Sample, Termination, Trajectory,
};
pub use poly::{Poly2, Var};
pub use portrait::{
    compute_portrait, default_whorl_seeds, orientation_field, orientation_field_with,
    ridge_angle, trace_separatrices, OrientationField, OrientationOptions, Portrait,
    PortraitSpec, PortraitTrajectory, SeedStrategy, TimeSpan, TrajectoryRole,
};
