//! Phase-portrait assembly: streamline seeding, separatrix tracing from
//! cusps, and ridge-orientation grids.

use crate::equilibrium::{classify, find_equilibria, EquilibriumKind, EquilibriumReport};
use crate::field::PlanarField;
use crate::geom::{dist, Point, Rect};
use crate::integrate::{integrate_adaptive, IntegratorConfig, Trajectory};

/// How streamline seeds are generated.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedStrategy {
    /// Cell-centered `nx` by `ny` lattice over the window.
    Grid { nx: usize, ny: usize },
    /// `count` equally spaced seeds on each listed radius around `center`.
    Ring {
        center: Point,
        radii: Vec<f64>,
        count: usize,
    },
    Explicit(Vec<Point>),
}

/// Forward and backward integration horizons for streamline seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSpan {
    pub forward: f64,
    pub backward: f64,
}

impl TimeSpan {
    pub fn new(forward: f64, backward: f64) -> Self {
        TimeSpan { forward, backward }
    }
}

/// Full description of one portrait computation.
#[derive(Debug, Clone, PartialEq)]
pub struct PortraitSpec {
    pub field: PlanarField,
    pub window: Rect,
    pub seeds: Vec<SeedStrategy>,
    pub t_span: TimeSpan,
    pub integrator: IntegratorConfig,
    pub include_separatrices: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryRole {
    Streamline,
    Separatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitTrajectory {
    pub role: TrajectoryRole,
    pub trajectory: Trajectory,
}

/// Assembled portrait: traced curves plus classified equilibria.
#[derive(Debug, Clone, PartialEq)]
pub struct Portrait {
    pub trajectories: Vec<PortraitTrajectory>,
    pub equilibria: Vec<EquilibriumReport>,
    pub window: Rect,
}

/// Tolerance used when locating equilibria for portraits and masks.
pub const PORTRAIT_FIND_TOL: f64 = 1e-10;
/// Offset of separatrix launch points from their cusp.
pub const SEPARATRIX_EPS: f64 = 1e-4;
/// Separatrix integration horizon. Near-cusp passages are slow (the
/// creep time grows like the inverse square root of the launch offset),
/// so this is much longer than any streamline span.
pub const SEPARATRIX_T_MAX: f64 = 800.0;
/// A separatrix launch must survive this many in-window accepted steps
/// to be retained; shorter stubs are dropped.
const SEPARATRIX_MIN_STEPS: usize = 10;

/// The standard seeding for whorl portraits: four rings of eight seeds
/// around the origin plus a coarse outer lattice.
pub fn default_whorl_seeds() -> Vec<SeedStrategy> {
    vec![
        SeedStrategy::Ring {
            center: [0.0, 0.0],
            radii: vec![0.15, 0.3, 0.45, 0.6],
            count: 8,
        },
        SeedStrategy::Grid { nx: 6, ny: 4 },
    ]
}

fn expand_seeds(strategies: &[SeedStrategy], window: &Rect) -> Vec<Point> {
    let mut seeds = Vec::new();
    for strategy in strategies {
        match strategy {
            SeedStrategy::Grid { nx, ny } => {
                let (nx, ny) = (*nx, *ny);
                if nx == 0 || ny == 0 {
                    continue;
                }
                let dx = window.width() / nx as f64;
                let dy = window.height() / ny as f64;
                for iy in 0..ny {
                    for ix in 0..nx {
                        seeds.push([
                            window.x_min + (ix as f64 + 0.5) * dx,
                            window.y_min + (iy as f64 + 0.5) * dy,
                        ]);
                    }
                }
            }
            SeedStrategy::Ring {
                center,
                radii,
                count,
            } => {
                for &r in radii {
                    for k in 0..*count {
                        let angle = 2.0 * std::f64::consts::PI * k as f64 / *count as f64;
                        seeds.push([center[0] + r * angle.cos(), center[1] + r * angle.sin()]);
                    }
                }
            }
            SeedStrategy::Explicit(points) => seeds.extend_from_slice(points),
        }
    }
    seeds
}

/// Computes a full portrait: every seed is integrated forward and
/// backward over the spec horizons, equilibria are located and
/// classified, and separatrices are traced from the cusps when
/// requested. Assembly order is fixed by seed index, so identical specs
/// produce identical portraits.
pub fn compute_portrait(spec: &PortraitSpec) -> Portrait {
    let search = find_equilibria(&spec.field, &spec.window, PORTRAIT_FIND_TOL);
    let equilibria: Vec<EquilibriumReport> = search
        .points
        .iter()
        .map(|p| classify(&spec.field, *p))
        .collect();

    let mut config = spec.integrator.clone();
    config.window = Some(spec.window);
    config.capture_points = search.points.clone();

    let mut trajectories = Vec::new();
    for seed in expand_seeds(&spec.seeds, &spec.window) {
        for t_max in [spec.t_span.forward, -spec.t_span.backward] {
            if t_max == 0.0 || t_max == -0.0 {
                continue;
            }
            let trajectory = integrate_adaptive(&spec.field, seed, &config, t_max);
            trajectories.push(PortraitTrajectory {
                role: TrajectoryRole::Streamline,
                trajectory,
            });
        }
    }

    if spec.include_separatrices {
        let cusps: Vec<Point> = equilibria
            .iter()
            .filter(|r| r.kind == EquilibriumKind::Cusp)
            .map(|r| r.location)
            .collect();
        for trajectory in
            trace_separatrices(&spec.field, &cusps, SEPARATRIX_EPS, SEPARATRIX_T_MAX, &config)
        {
            trajectories.push(PortraitTrajectory {
                role: TrajectoryRole::Separatrix,
                trajectory,
            });
        }
    }

    Portrait {
        trajectories,
        equilibria,
        window: spec.window,
    }
}

/// Traces separatrices from cusp points. Each cusp gets four launches:
/// offsets of plus and minus `eps` along x (the characteristic direction
/// of a cusp under the shape `x' = y`), each integrated forward and
/// backward over `t_max`. Launches that fail to stay inside the window
/// for a minimum number of accepted steps are discarded as stubs.
pub fn trace_separatrices(
    field: &PlanarField,
    cusps: &[Point],
    eps: f64,
    t_max: f64,
    config: &IntegratorConfig,
) -> Vec<Trajectory> {
    let mut out = Vec::new();
    for cusp in cusps {
        for offset in [eps, -eps] {
            let launch = [cusp[0] + offset, cusp[1]];
            for horizon in [t_max, -t_max] {
                let traj = integrate_adaptive(field, launch, config, horizon);
                let in_window_steps = match &config.window {
                    Some(w) => traj
                        .samples
                        .iter()
                        .skip(1)
                        .filter(|s| w.contains(s.point()))
                        .count(),
                    None => traj.len().saturating_sub(1),
                };
                if in_window_steps >= SEPARATRIX_MIN_STEPS {
                    out.push(traj);
                }
            }
        }
    }
    out
}

/// Grid of ridge angles in `[0, pi)` with a mask for cells that carry no
/// direction (on an equilibrium or where the field is numerically zero).
/// Rows are stored top first: row 0 holds the cells with the largest y.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationField {
    width: usize,
    height: usize,
    angles: Vec<f64>,
    mask: Vec<bool>,
}

impl OrientationField {
    /// Assembles a field from raw parts. Angle entries of masked cells
    /// are ignored; unmasked angles must lie in `[0, pi)`.
    pub fn new(width: usize, height: usize, angles: Vec<f64>, mask: Vec<bool>) -> Self {
        assert_eq!(angles.len(), width * height);
        assert_eq!(mask.len(), width * height);
        let angles = angles
            .into_iter()
            .zip(&mask)
            .map(|(a, &m)| {
                if m {
                    f64::NAN
                } else {
                    assert!(
                        (0.0..std::f64::consts::PI).contains(&a),
                        "angle {a} outside [0, pi)"
                    );
                    a
                }
            })
            .collect();
        OrientationField {
            width,
            height,
            angles,
            mask,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_masked(&self, ix: usize, iy: usize) -> bool {
        self.mask[iy * self.width + ix]
    }

    /// Ridge angle of an unmasked cell, `None` for masked cells.
    pub fn angle(&self, ix: usize, iy: usize) -> Option<f64> {
        if self.is_masked(ix, iy) {
            None
        } else {
            Some(self.angles[iy * self.width + ix])
        }
    }
}

/// Options for [`orientation_field_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationOptions {
    /// Mask radius around each equilibrium, as a fraction of the window
    /// width.
    pub mask_radius_frac: f64,
    /// Cells with field magnitude below this are masked.
    pub field_floor: f64,
    /// Tolerance for the equilibrium search backing the mask.
    pub finder_tol: f64,
}

impl Default for OrientationOptions {
    fn default() -> Self {
        OrientationOptions {
            mask_radius_frac: 0.05,
            field_floor: 1e-12,
            finder_tol: PORTRAIT_FIND_TOL,
        }
    }
}

/// Ridge-orientation grid with default masking options.
pub fn orientation_field(
    field: &PlanarField,
    window: &Rect,
    width: usize,
    height: usize,
) -> OrientationField {
    orientation_field_with(field, window, width, height, &OrientationOptions::default())
}

/// Samples the flow direction at every cell center of a `width` by
/// `height` grid and reduces it modulo pi into `[0, pi)` — ridge
/// orientation has no forward/backward sense. Cells within the mask
/// radius of an equilibrium or with near-zero field are masked.
pub fn orientation_field_with(
    field: &PlanarField,
    window: &Rect,
    width: usize,
    height: usize,
    opts: &OrientationOptions,
) -> OrientationField {
    assert!(width >= 2 && height >= 2, "orientation grid needs >= 2 cells per side");
    let equilibria = find_equilibria(field, window, opts.finder_tol).points;
    let mask_radius = opts.mask_radius_frac * window.width();
    let dx = window.width() / width as f64;
    let dy = window.height() / height as f64;

    let mut angles = vec![f64::NAN; width * height];
    let mut mask = vec![false; width * height];
    for iy in 0..height {
        // top row first
        let y = window.y_max - (iy as f64 + 0.5) * dy;
        for ix in 0..width {
            let x = window.x_min + (ix as f64 + 0.5) * dx;
            let v = field.eval([x, y]);
            let near_equilibrium = equilibria.iter().any(|e| dist([x, y], *e) <= mask_radius);
            let idx = iy * width + ix;
            if near_equilibrium || v[0].hypot(v[1]) < opts.field_floor {
                mask[idx] = true;
                continue;
            }
            angles[idx] = ridge_angle(v);
        }
    }
    OrientationField {
        width,
        height,
        angles,
        mask,
    }
}

/// Direction of a nonzero vector reduced modulo pi into `[0, pi)`.
pub fn ridge_angle(v: Point) -> f64 {
    let mut a = v[1].atan2(v[0]).rem_euclid(std::f64::consts::PI);
    // rem_euclid can round up to pi itself for tiny negative angles
    if a >= std::f64::consts::PI {
        a = 0.0;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::whorl_family;
    use crate::integrate::axis_crossings;
    use std::f64::consts::PI;

    fn whorl_window() -> Rect {
        Rect::new(-1.6, 1.6, -1.2, 1.2)
    }

    fn whorl_spec(theta: f64, separatrices: bool) -> PortraitSpec {
        PortraitSpec {
            field: whorl_family(theta),
            window: whorl_window(),
            seeds: default_whorl_seeds(),
            t_span: TimeSpan::new(40.0, 40.0),
            integrator: IntegratorConfig::default(),
            include_separatrices: separatrices,
        }
    }

    #[test]
    fn empty_seed_portrait_has_equilibria_only() {
        let spec = PortraitSpec {
            seeds: vec![],
            include_separatrices: false,
            ..whorl_spec(0.2, false)
        };
        let portrait = compute_portrait(&spec);
        assert!(portrait.trajectories.is_empty());
        assert_eq!(portrait.equilibria.len(), 3);
    }

    #[test]
    fn concentric_portrait_inner_orbits_close() {
        let portrait = compute_portrait(&whorl_spec(0.0, false));
        // on-axis ring seeds: forward streamlines must return to their
        // starting abscissa after one period
        let mut checked = 0;
        for pt in &portrait.trajectories {
            let traj = &pt.trajectory;
            if traj.is_backward() {
                continue;
            }
            let start = traj.first().unwrap();
            if start.y != 0.0 || start.x <= 0.0 {
                continue;
            }
            let crossings = axis_crossings(traj);
            let dir = crossings[0].upward;
            let returns: Vec<_> = crossings.iter().filter(|c| c.upward == dir).collect();
            assert!(returns.len() >= 2, "no full return from {start:?}");
            assert!(
                (returns[1].x - start.x).abs() < 1e-4,
                "orbit from {} returns at {}",
                start.x,
                returns[1].x
            );
            checked += 1;
        }
        assert!(checked >= 4, "expected the four on-axis ring seeds");
    }

    #[test]
    fn spiral_portrait_crossing_radii_grow() {
        let portrait = compute_portrait(&whorl_spec(0.2, false));
        let mut checked = 0;
        for pt in &portrait.trajectories {
            let traj = &pt.trajectory;
            if traj.is_backward() {
                continue;
            }
            let start = traj.first().unwrap();
            if start.y != 0.0 || start.x <= 0.0 || start.x > 0.5 {
                continue;
            }
            let xs: Vec<f64> = axis_crossings(traj)
                .iter()
                .filter(|c| c.upward)
                .map(|c| c.x.abs())
                .collect();
            for w in xs.windows(2) {
                if w[0] < 0.9 && w[1] < 0.9 {
                    assert!(w[1] > w[0], "crossing radii not increasing: {xs:?}");
                }
            }
            if xs.len() >= 2 {
                checked += 1;
            }
        }
        assert!(checked >= 2);
    }

    #[test]
    fn separatrices_stay_on_the_zero_level_set() {
        let portrait = compute_portrait(&whorl_spec(0.0, true));
        let separatrices: Vec<_> = portrait
            .trajectories
            .iter()
            .filter(|t| t.role == TrajectoryRole::Separatrix)
            .collect();
        assert!(!separatrices.is_empty());
        for pt in &separatrices {
            for s in &pt.trajectory.samples {
                let h = crate::field::whorl_hamiltonian(s.point());
                assert!(h.abs() < 1e-6, "separatrix sample off level set: H = {h}");
            }
            // launched within the seed offset of a cusp
            let start = pt.trajectory.first().unwrap();
            let near_cusp = [[-1.0, 0.0], [1.0, 0.0]]
                .iter()
                .any(|c| dist(start.point(), *c) <= 2.0 * SEPARATRIX_EPS);
            assert!(near_cusp, "separatrix starts at {start:?}");
        }
    }

    #[test]
    fn separatrix_connects_the_cusps_at_theta_zero() {
        let field = whorl_family(0.0);
        let config = IntegratorConfig {
            window: Some(whorl_window()),
            ..IntegratorConfig::default()
        };
        let traced = trace_separatrices(
            &field,
            &[[-1.0, 0.0], [1.0, 0.0]],
            SEPARATRIX_EPS,
            SEPARATRIX_T_MAX,
            &config,
        );
        // some launch from the left cusp must pass close to the right one
        let min_to_right = traced
            .iter()
            .filter(|t| t.first().unwrap().x < 0.0)
            .flat_map(|t| t.samples.iter())
            .map(|s| dist(s.point(), [1.0, 0.0]))
            .fold(f64::INFINITY, f64::min);
        assert!(min_to_right < 1e-3, "closest approach {min_to_right}");

        // and the upper branch crosses the y-axis at sqrt(1/3)
        let apex = (1.0_f64 / 3.0).sqrt();
        let mut best = f64::INFINITY;
        for traj in &traced {
            for w in traj.samples.windows(2) {
                if w[0].x * w[1].x < 0.0 && w[0].y > 0.0 {
                    // bisect the segment for the y-axis crossing
                    let (mut lo, mut hi) = (w[0].t, w[1].t);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        let p = traj.sample_at(mid).unwrap();
                        if (p[0] > 0.0) == (w[1].x > 0.0) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    let p = traj.sample_at(0.5 * (lo + hi)).unwrap();
                    best = best.min((p[1] - apex).abs());
                }
            }
        }
        assert!(best < 1e-3, "upper separatrix apex off by {best}");
    }

    #[test]
    fn outward_launches_leave_the_window_at_large_theta() {
        let field = whorl_family(0.9);
        let config = IntegratorConfig {
            window: Some(whorl_window()),
            ..IntegratorConfig::default()
        };
        let traced = trace_separatrices(
            &field,
            &[[-1.0, 0.0], [1.0, 0.0]],
            SEPARATRIX_EPS,
            SEPARATRIX_T_MAX,
            &config,
        );
        use crate::integrate::Termination;
        let exits = traced
            .iter()
            .filter(|t| t.termination == Termination::LeftWindow)
            .count();
        assert!(exits >= 2, "expected outward branches to exit the window");
    }

    #[test]
    fn orientation_angles_at_reference_points() {
        let field = whorl_family(0.0);
        // at (0, 0.5) the flow is horizontal: angle 0
        assert_eq!(ridge_angle(field.eval([0.0, 0.5])), 0.0);
        // at (0.5, 0) the flow is straight down: angle pi/2
        let a = ridge_angle(field.eval([0.5, 0.0]));
        assert!((a - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn ridge_angle_is_mod_pi() {
        for &v in &[[1.0, 0.3], [-0.7, 0.2], [0.0, -2.0], [-1e-20, -1.0]] {
            let a = ridge_angle(v);
            let b = ridge_angle([-v[0], -v[1]]);
            assert!(a >= 0.0 && a < PI);
            assert!((a - b).abs() < 1e-12, "{v:?}: {a} vs {b}");
        }
    }

    #[test]
    fn orientation_masks_equilibria() {
        let field = whorl_family(0.2);
        let of = orientation_field(&field, &whorl_window(), 64, 48);
        // the cell containing the origin is masked
        let ix = ((0.0 - -1.6) / (3.2 / 64.0)) as usize;
        let iy = ((1.2 - 0.0) / (2.4 / 48.0)) as usize;
        assert!(of.is_masked(ix, iy));
        assert_eq!(of.angle(ix, iy), None);
        // but most of the grid carries angles
        let masked = (0..48)
            .flat_map(|iy| (0..64).map(move |ix| (ix, iy)))
            .filter(|&(ix, iy)| of.is_masked(ix, iy))
            .count();
        assert!(masked < 64 * 48 / 4, "{masked} masked cells");
    }

    #[test]
    fn orientation_grid_is_rotation_invariant() {
        for theta in [-0.2, 0.0, 0.2, 0.9] {
            let field = whorl_family(theta);
            let of = orientation_field(&field, &whorl_window(), 32, 24);
            for iy in 0..24 {
                for ix in 0..32 {
                    let (jx, jy) = (31 - ix, 23 - iy);
                    match (of.angle(ix, iy), of.angle(jx, jy)) {
                        (Some(a), Some(b)) => {
                            assert!((a - b).abs() < 1e-9, "({ix},{iy}): {a} vs {b}")
                        }
                        (None, None) => {}
                        other => panic!("mask asymmetry at ({ix},{iy}): {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn portraits_are_deterministic() {
        let spec = whorl_spec(0.2, true);
        let a = compute_portrait(&spec);
        let b = compute_portrait(&spec);
        assert_eq!(a, b);
    }
}
