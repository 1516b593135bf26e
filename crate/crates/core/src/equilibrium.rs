//! Equilibrium location and classification.
//!
//! Nondegenerate points are classified from the eigenvalues of the exact
//! Jacobian. Double-zero points of fields shaped `x' = y` are reduced to
//! the second-order normal form
//!
//! ```text
//! x' = y
//! y' = a_k x^k [1 + h(x)] + b_n x^n y [1 + g(x)] + y^2 R(x, y)
//! ```
//!
//! and classified by the standard decision table for that form (see
//! Perko, *Differential Equations and Dynamical Systems*, 3rd ed.,
//! §2.11). Working in floating point, "zero" always means "below a
//! scale-relative threshold"; the thresholds live in this module.

use num_complex::Complex64;

use crate::field::{Mat2, PlanarField};
use crate::geom::{dist, Point, Rect};
use crate::poly::{Poly2, Var};

/// Classification outcome for one equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Center,
    StableFocus,
    UnstableFocus,
    StableNode,
    UnstableNode,
    /// Repeated nonzero eigenvalue (star or improper node).
    DegenerateNode,
    Saddle,
    Cusp,
    SaddleNode,
    EllipticDomain,
    /// Double-zero case the normal-form table cannot split further
    /// without a Lyapunov-style computation.
    FocusOrCenter,
    /// Node arising from the double-zero normal-form table (as opposed
    /// to [`EquilibriumKind::DegenerateNode`], which is linear).
    NodeDegenerateTheorem,
    NotClassified,
}

impl EquilibriumKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquilibriumKind::Center => "center",
            EquilibriumKind::StableFocus => "stable-focus",
            EquilibriumKind::UnstableFocus => "unstable-focus",
            EquilibriumKind::StableNode => "stable-node",
            EquilibriumKind::UnstableNode => "unstable-node",
            EquilibriumKind::DegenerateNode => "degenerate-node",
            EquilibriumKind::Saddle => "saddle",
            EquilibriumKind::Cusp => "cusp",
            EquilibriumKind::SaddleNode => "saddle-node",
            EquilibriumKind::EllipticDomain => "elliptic-domain",
            EquilibriumKind::FocusOrCenter => "focus-or-center",
            EquilibriumKind::NodeDegenerateTheorem => "node-degenerate-theorem",
            EquilibriumKind::NotClassified => "not-classified",
        }
    }
}

impl std::fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Leading data of the second-order normal form at a double-zero point:
/// `k` and `a_k` from the `y`-free part, `n` and `b_n` from the part
/// linear in `y`. `n` is absent exactly when `b_n = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormData {
    pub k: u32,
    pub a_k: f64,
    pub n: Option<u32>,
    pub b_n: f64,
}

impl NormalFormData {
    /// `m = floor(k / 2)`, the split point of the decision table.
    pub fn m(&self) -> u32 {
        self.k / 2
    }

    /// `lambda = b_n^2 + 4(m + 1) a_k`; meaningful for odd `k`.
    pub fn lambda(&self) -> f64 {
        self.b_n * self.b_n + 4.0 * (self.m() + 1) as f64 * self.a_k
    }
}

impl std::fmt::Display for NormalFormData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // 12 significant digits: enough to read, free of round-trip tails
        let compact = |v: f64| {
            let s = format!("{v:.12e}");
            s.parse::<f64>().unwrap_or(v)
        };
        match self.n {
            Some(n) => write!(
                f,
                "k={} a_k={} n={} b_n={}",
                self.k,
                compact(self.a_k),
                n,
                compact(self.b_n)
            ),
            None => write!(f, "k={} a_k={} b_n=0", self.k, compact(self.a_k)),
        }
    }
}

/// Everything known about one equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub location: Point,
    pub jacobian: Mat2,
    pub eigenvalues: [Complex64; 2],
    pub kind: EquilibriumKind,
    pub normal_form: Option<NormalFormData>,
    /// Present when classification fell through (extraction error,
    /// single zero eigenvalue).
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NormalFormError {
    #[error("field is not of the shape x' = y")]
    NotSecondOrderShape,
    #[error("Jacobian has a nonzero eigenvalue; normal form needs a double zero")]
    NotDoubleZero,
    #[error("y-free part of the field vanishes at the point to all orders")]
    FlatField,
}

/// Search outcome: converged equilibria plus the candidate seeds whose
/// Newton iteration failed to converge (reported, never fatal).
#[derive(Debug, Clone, Default)]
pub struct EquilibriumSearch {
    pub points: Vec<Point>,
    pub stalls: Vec<Point>,
}

/// Knobs for [`find_equilibria_with`].
#[derive(Debug, Clone)]
pub struct FinderConfig {
    /// Cells in the candidate scan grid.
    pub grid_nx: usize,
    pub grid_ny: usize,
    /// Newton iteration cap per candidate.
    pub max_iter: usize,
    /// A cell is a candidate for a component when the component changes
    /// sign over the cell or its smallest sample is below this fraction
    /// of the grid-wide maximum.
    pub residual_floor_frac: f64,
}

impl Default for FinderConfig {
    fn default() -> Self {
        FinderConfig {
            grid_nx: 64,
            grid_ny: 64,
            max_iter: 50,
            residual_floor_frac: 1e-2,
        }
    }
}

/// Eigenvalues of a 2x2 real matrix from the trace/determinant form.
pub fn eigenvalues(j: &Mat2) -> [Complex64; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [
            Complex64::new(0.5 * (tr + s), 0.0),
            Complex64::new(0.5 * (tr - s), 0.0),
        ]
    } else {
        let s = (-disc).sqrt();
        [
            Complex64::new(0.5 * tr, 0.5 * s),
            Complex64::new(0.5 * tr, -0.5 * s),
        ]
    }
}

fn matrix_scale(j: &Mat2) -> f64 {
    j.iter()
        .flatten()
        .fold(0.0_f64, |m, &v| m.max(v.abs()))
}

/// Default zero threshold for eigenvalue decisions at a Jacobian.
pub fn zero_tolerance(j: &Mat2) -> f64 {
    1e-9 * (1.0 + matrix_scale(j))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ZeroStructure {
    NoZero,
    SingleZero,
    DoubleZero,
}

/// Zero-eigenvalue detection via trace and determinant rather than the
/// eigenvalues themselves: at a defective double zero the eigenvalues of
/// a perturbed matrix scale like the square root of the perturbation, so
/// thresholding |lambda| directly would misread any equilibrium located
/// numerically. tr and det are linear in the entries and stay reliable.
fn zero_structure(j: &Mat2, tol: f64) -> ZeroStructure {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let scale = matrix_scale(j);
    if tr.abs() <= tol {
        if det.abs() <= tol * (1.0 + scale) {
            ZeroStructure::DoubleZero
        } else {
            ZeroStructure::NoZero
        }
    } else if det.abs() <= tol * tr.abs() {
        ZeroStructure::SingleZero
    } else {
        ZeroStructure::NoZero
    }
}

/// Trace/determinant taxonomy for a nondegenerate Jacobian. Returns
/// `None` when some eigenvalue is zero (within `tol`); those cases
/// belong to the normal-form path.
pub fn classify_linear(j: &Mat2, tol: f64) -> Option<EquilibriumKind> {
    if zero_structure(j, tol) != ZeroStructure::NoZero {
        return None;
    }
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        return Some(if tr.abs() <= tol {
            EquilibriumKind::Center
        } else if tr < 0.0 {
            EquilibriumKind::StableFocus
        } else {
            EquilibriumKind::UnstableFocus
        });
    }
    if det < 0.0 {
        return Some(EquilibriumKind::Saddle);
    }
    // real eigenvalues of one sign; a vanishing discriminant means a
    // repeated root
    if disc <= tol * tol {
        return Some(EquilibriumKind::DegenerateNode);
    }
    Some(if tr > 0.0 {
        EquilibriumKind::UnstableNode
    } else {
        EquilibriumKind::StableNode
    })
}

/// Reduces a field of shape `x' = y` at a double-zero equilibrium on the
/// x-axis to its normal-form leading data.
///
/// The second component splits as `Q(x, y) = F(x) + y G(x) + y^2 R(x, y)`
/// by collecting powers of `y`; `F` and `G` are then recentered at the
/// equilibrium abscissa. `k`/`a_k` come from the lowest surviving degree
/// >= 2 of `F`, `n`/`b_n` from the lowest surviving degree >= 1 of `G`
/// (the degree-0 term of `G` is the trace, already zero here).
pub fn extract_normal_form(
    field: &PlanarField,
    eq: Point,
) -> Result<NormalFormData, NormalFormError> {
    if !field.is_second_order_shape() {
        return Err(NormalFormError::NotSecondOrderShape);
    }
    let jet = field.jet(eq);
    if zero_structure(&jet.jacobian, zero_tolerance(&jet.jacobian)) != ZeroStructure::DoubleZero {
        return Err(NormalFormError::NotDoubleZero);
    }

    let mut f_part = Poly2::zero();
    let mut g_part = Poly2::zero();
    for (i, j, c) in field.q().terms() {
        match j {
            0 => f_part.add_term(i, 0, c),
            1 => g_part.add_term(i, 0, c),
            _ => {} // y^2 R(x, y): irrelevant for the leading data
        }
    }
    let f_shift = f_part.taylor_shift(eq[0], 0.0);
    let g_shift = g_part.taylor_shift(eq[0], 0.0);

    let f_floor = COEFF_SIGNIFICANCE * (1.0 + f_shift.max_abs_coeff());
    let mut ka = None;
    for (i, _, c) in f_shift.terms() {
        if i >= 2 && c.abs() > f_floor {
            ka = Some((i, c));
            break;
        }
    }
    let Some((k, a_k)) = ka else {
        return Err(NormalFormError::FlatField);
    };

    let g_floor = COEFF_SIGNIFICANCE * (1.0 + g_shift.max_abs_coeff());
    let mut nb = None;
    for (i, _, c) in g_shift.terms() {
        if i >= 1 && c.abs() > g_floor {
            nb = Some((i, c));
            break;
        }
    }
    Ok(match nb {
        Some((n, b_n)) => NormalFormData {
            k,
            a_k,
            n: Some(n),
            b_n,
        },
        None => NormalFormData {
            k,
            a_k,
            n: None,
            b_n: 0.0,
        },
    })
}

/// Coefficients of the recentered slices below this relative size are
/// treated as zero. The slack absorbs the Taylor-shift rounding of an
/// equilibrium located to near machine precision.
const COEFF_SIGNIFICANCE: f64 = 1e-9;

/// Decision table for the double-zero normal form.
///
/// Odd `k = 2m + 1` with `lambda = b_n^2 + 4(m + 1) a_k`:
/// `a_k > 0` is a topological saddle; for `a_k < 0` the point is a
/// focus-or-center when `b_n = 0`, `n > m`, or `n = m` with `lambda < 0`,
/// and otherwise a node (even `n`) or a point with an elliptic domain
/// (odd `n`).
///
/// Even `k = 2m`: a cusp when `b_n = 0` or `n >= m`, a saddle-node when
/// `b_n != 0` and `n < m`. The sign of `a_k` plays no role here.
pub fn classify_degenerate(nf: &NormalFormData) -> EquilibriumKind {
    let m = nf.m();
    if nf.k % 2 == 1 {
        if nf.a_k > 0.0 {
            return EquilibriumKind::Saddle;
        }
        let Some(n) = nf.n else {
            return EquilibriumKind::FocusOrCenter;
        };
        if n > m || (n == m && nf.lambda() < 0.0) {
            return EquilibriumKind::FocusOrCenter;
        }
        // here n < m, or n = m with lambda >= 0
        if n % 2 == 0 {
            EquilibriumKind::NodeDegenerateTheorem
        } else {
            EquilibriumKind::EllipticDomain
        }
    } else {
        match nf.n {
            Some(n) if n < m => EquilibriumKind::SaddleNode,
            _ => EquilibriumKind::Cusp,
        }
    }
}

/// Full classification dispatch for a point at (or numerically near) an
/// equilibrium: nondegenerate kinds via the linear taxonomy, double
/// zeros via normal-form extraction, single zeros reported unclassified.
pub fn classify(field: &PlanarField, eq: Point) -> EquilibriumReport {
    let jet = field.jet(eq);
    let eig = eigenvalues(&jet.jacobian);
    let tol = zero_tolerance(&jet.jacobian);
    let (kind, normal_form, diagnostic) = match zero_structure(&jet.jacobian, tol) {
        ZeroStructure::NoZero => {
            let kind = classify_linear(&jet.jacobian, tol)
                .expect("nondegenerate matrix classifies linearly");
            (kind, None, None)
        }
        ZeroStructure::SingleZero => (
            EquilibriumKind::NotClassified,
            None,
            Some("single zero eigenvalue: outside the linear and double-zero cases".to_string()),
        ),
        ZeroStructure::DoubleZero => match extract_normal_form(field, eq) {
            Ok(nf) => (classify_degenerate(&nf), Some(nf), None),
            Err(e) => (EquilibriumKind::NotClassified, None, Some(e.to_string())),
        },
    };
    EquilibriumReport {
        location: eq,
        jacobian: jet.jacobian,
        eigenvalues: eig,
        kind,
        normal_form,
        diagnostic,
    }
}

/// Locates all equilibria of `field` inside `window` with the default
/// scan/iteration parameters. Returned points satisfy `|P|, |Q| < tol`
/// and are pairwise separated by more than `100 * tol`.
pub fn find_equilibria(field: &PlanarField, window: &Rect, tol: f64) -> EquilibriumSearch {
    find_equilibria_with(field, window, tol, &FinderConfig::default())
}

/// [`find_equilibria`] with explicit parameters. The method is a dense
/// grid scan for sign-change / small-residual candidate cells, damped
/// Newton with the exact Jacobian from each candidate, a multiplicity
/// polish for fields of shape `x' = y`, and duplicate merging.
pub fn find_equilibria_with(
    field: &PlanarField,
    window: &Rect,
    tol: f64,
    cfg: &FinderConfig,
) -> EquilibriumSearch {
    let mut search = EquilibriumSearch::default();
    if window.is_empty() || tol <= 0.0 || cfg.grid_nx == 0 || cfg.grid_ny == 0 {
        return search;
    }
    let (nx, ny) = (cfg.grid_nx, cfg.grid_ny);
    let dx = window.width() / nx as f64;
    let dy = window.height() / ny as f64;

    // corner samples of both components
    let mut pv = vec![0.0; (nx + 1) * (ny + 1)];
    let mut qv = vec![0.0; (nx + 1) * (ny + 1)];
    for iy in 0..=ny {
        for ix in 0..=nx {
            let p = [
                window.x_min + ix as f64 * dx,
                window.y_min + iy as f64 * dy,
            ];
            let v = field.eval(p);
            pv[iy * (nx + 1) + ix] = v[0];
            qv[iy * (nx + 1) + ix] = v[1];
        }
    }
    let max_p = pv.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let max_q = qv.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor_p = cfg.residual_floor_frac * max_p;
    let floor_q = cfg.residual_floor_frac * max_q;

    let mut found: Vec<Point> = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let center = [
                window.x_min + (ix as f64 + 0.5) * dx,
                window.y_min + (iy as f64 + 0.5) * dy,
            ];
            let cv = field.eval(center);
            let corner = |data: &[f64], cx: usize, cy: usize| data[cy * (nx + 1) + cx];
            let ps = [
                corner(&pv, ix, iy),
                corner(&pv, ix + 1, iy),
                corner(&pv, ix, iy + 1),
                corner(&pv, ix + 1, iy + 1),
                cv[0],
            ];
            let qs = [
                corner(&qv, ix, iy),
                corner(&qv, ix + 1, iy),
                corner(&qv, ix, iy + 1),
                corner(&qv, ix + 1, iy + 1),
                cv[1],
            ];
            if !component_candidate(&ps, floor_p) || !component_candidate(&qs, floor_q) {
                continue;
            }
            match newton(field, center, tol, cfg.max_iter) {
                Some(mut root) => {
                    polish_multiple_root(field, &mut root, tol);
                    if window.contains(root) {
                        found.push(root);
                    }
                }
                None => search.stalls.push(center),
            }
        }
    }

    // merge duplicates; the radius comfortably exceeds the spec's
    // pairwise-separation floor of 100 * tol
    let merge_radius = (100.0 * tol).max(1e-6);
    found.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    for p in found {
        if !search.points.iter().any(|q| dist(p, *q) <= merge_radius) {
            search.points.push(p);
        }
    }
    search
}

fn component_candidate(samples: &[f64; 5], floor: f64) -> bool {
    let min = samples.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let max = samples.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let min_abs = samples.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    min <= 0.0 && max >= 0.0 || min_abs <= floor
}

fn residual_norm(v: Point) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// Damped Newton on `(P, Q) = 0`. Returns the final iterate when both
/// residual components fall below `tol`, `None` on stall (singular
/// Jacobian, no residual decrease, or residual still above `tol` after
/// `max_iter` iterations).
fn newton(field: &PlanarField, start: Point, tol: f64, max_iter: usize) -> Option<Point> {
    let mut x = start;
    let mut f = field.eval(x);
    if !f[0].is_finite() || !f[1].is_finite() {
        return None;
    }
    for _ in 0..max_iter {
        if f == [0.0, 0.0] {
            break;
        }
        let j = field.jet(x).jacobian;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let step = [
            (-j[1][1] * f[0] + j[0][1] * f[1]) / det,
            (j[1][0] * f[0] - j[0][0] * f[1]) / det,
        ];
        // halve on residual increase
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial = [x[0] + t * step[0], x[1] + t * step[1]];
            let ft = field.eval(trial);
            if ft[0].is_finite() && ft[1].is_finite() && residual_norm(ft) < residual_norm(f) {
                accepted = Some((trial, ft, t));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, ft, t)) = accepted else {
            // no decrease along the Newton direction
            break;
        };
        let moved = (t * step[0]).abs().max((t * step[1]).abs());
        x = trial;
        f = ft;
        if moved <= 1e-14 * (1.0 + x[0].abs().max(x[1].abs())) {
            break;
        }
    }
    if f[0].abs() < tol && f[1].abs() < tol {
        Some(x)
    } else {
        None
    }
}

/// Improves the abscissa of a multiple root for fields of shape
/// `x' = y`. Plain Newton converges only linearly into an m-fold root of
/// `F(x) = Q(x, 0)` and its position stalls at the residual noise floor
/// (around 1e-8 for the cusp of the whorl family); the (m-1)-th
/// derivative of `F` has a simple root there, so one short Newton run on
/// it recovers the abscissa to near machine precision.
fn polish_multiple_root(field: &PlanarField, root: &mut Point, tol: f64) {
    if !field.is_second_order_shape() {
        return;
    }
    let mut f_part = Poly2::zero();
    for (i, j, c) in field.q().terms() {
        if j == 0 {
            f_part.add_term(i, 0, c);
        }
    }
    if f_part.is_zero() {
        return;
    }
    let shifted = f_part.taylor_shift(root[0], 0.0);
    let sig = 1e-6 * (1.0 + shifted.max_abs_coeff());
    let mut multiplicity = None;
    for (i, _, c) in shifted.terms() {
        if c.abs() > sig {
            multiplicity = Some(i);
            break;
        }
    }
    let Some(m) = multiplicity else { return };
    if m < 2 {
        return;
    }
    let mut deriv = f_part.clone();
    for _ in 0..(m - 1) {
        deriv = deriv.differentiate(Var::X);
    }
    let dprime = deriv.differentiate(Var::X);
    let mut x = root[0];
    for _ in 0..12 {
        let g = deriv.evaluate(x, 0.0);
        let gp = dprime.evaluate(x, 0.0);
        if gp.abs() < 1e-300 {
            return;
        }
        let step = g / gp;
        x -= step;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    // only accept a nearby correction that still solves the system
    if (x - root[0]).abs() <= 1e-3 && x.is_finite() && f_part.evaluate(x, 0.0).abs() < tol {
        root[0] = x;
    }
}
