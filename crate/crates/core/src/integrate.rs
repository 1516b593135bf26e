//! Numerical integration of planar fields.
//!
//! Two drivers: classical fixed-step RK4 and a Dormand–Prince embedded
//! pair with componentwise local error control (safety factor 0.9, step
//! exponent 1/5). Dense output between accepted steps is cubic Hermite
//! from the stored endpoint derivatives, which is what the axis-crossing
//! refinement bisects on. Negative `t_max` integrates backward in time.

use crate::field::PlanarField;
use crate::geom::{dist, Point, Rect};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrateError {
    #[error("vector field evaluated to a non-finite value")]
    NonFinite,
}

/// Why an integration run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Reached the time horizon.
    TimeLimit,
    /// A step left the integration window (the exit sample is kept).
    LeftWindow,
    /// Error control drove the step below `h_min`, a stage went
    /// non-finite, or the step budget ran out.
    StepUnderflow,
    /// Came within the capture radius of a listed equilibrium.
    EquilibriumCapture,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::TimeLimit => "time-limit",
            Termination::LeftWindow => "left-window",
            Termination::StepUnderflow => "step-underflow",
            Termination::EquilibriumCapture => "equilibrium-capture",
        }
    }
}

/// One trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl Sample {
    pub fn point(&self) -> Point {
        [self.x, self.y]
    }
}

/// Ordered samples of one integration run. Times are strictly monotone:
/// increasing for forward runs, decreasing for backward runs. Runs
/// produced by the integrators also carry the exact field derivative at
/// every sample, which upgrades interpolation to cubic Hermite.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    derivs: Vec<Point>,
}

impl Trajectory {
    /// Builds a trajectory from bare samples (no stored derivatives;
    /// interpolation falls back to piecewise linear).
    pub fn from_samples(samples: Vec<Sample>, termination: Termination) -> Self {
        Trajectory {
            samples,
            termination,
            derivs: Vec::new(),
        }
    }

    fn with_capacity(cap: usize) -> Self {
        Trajectory {
            samples: Vec::with_capacity(cap),
            termination: Termination::TimeLimit,
            derivs: Vec::with_capacity(cap),
        }
    }

    fn push(&mut self, t: f64, state: Point, deriv: Point) {
        self.samples.push(Sample {
            t,
            x: state[0],
            y: state[1],
        });
        self.derivs.push(deriv);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// True when sample times decrease (backward run).
    pub fn is_backward(&self) -> bool {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t < a.t,
            _ => false,
        }
    }

    /// Interpolated state at time `t`, or `None` outside the sampled
    /// range. Cubic Hermite between samples when derivatives are stored.
    pub fn sample_at(&self, t: f64) -> Option<Point> {
        if self.samples.is_empty() {
            return None;
        }
        if self.samples.len() == 1 {
            let s = &self.samples[0];
            return (s.t == t).then(|| s.point());
        }
        let dir = if self.is_backward() { -1.0 } else { 1.0 };
        let first = self.samples.first().unwrap();
        let last = self.samples.last().unwrap();
        if (t - first.t) * dir < 0.0 || (t - last.t) * dir > 0.0 {
            return None;
        }
        // binary search for the bracketing segment
        let mut lo = 0;
        let mut hi = self.samples.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if (self.samples[mid].t - t) * dir <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(self.interp_segment(lo, t))
    }

    fn interp_segment(&self, i: usize, t: f64) -> Point {
        let s0 = &self.samples[i];
        let s1 = &self.samples[i + 1];
        let h = s1.t - s0.t;
        if h == 0.0 {
            return s0.point();
        }
        let s = (t - s0.t) / h;
        match (self.derivs.get(i), self.derivs.get(i + 1)) {
            (Some(d0), Some(d1)) => hermite(s0.point(), *d0, s1.point(), *d1, h, s),
            _ => [
                s0.x + s * (s1.x - s0.x),
                s0.y + s * (s1.y - s0.y),
            ],
        }
    }
}

/// Cubic Hermite on one segment; `s` in [0, 1], `h` the (signed) time
/// width, `d0`/`d1` the derivatives at the endpoints.
fn hermite(y0: Point, d0: Point, y1: Point, d1: Point, h: f64, s: f64) -> Point {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    [
        h00 * y0[0] + h10 * h * d0[0] + h01 * y1[0] + h11 * h * d1[0],
        h00 * y0[1] + h10 * h * d0[1] + h01 * y1[1] + h11 * h * d1[1],
    ]
}

/// Adaptive-integrator settings.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Integration stops (after recording the exit sample) once the state
    /// leaves this window.
    pub window: Option<Rect>,
    /// Stop when within `capture_radius` of any of these points.
    pub capture_points: Vec<Point>,
    pub capture_radius: f64,
    /// Attempted-step budget; exceeding it terminates as step underflow.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 0.5,
            window: None,
            capture_points: Vec::new(),
            capture_radius: 1e-6,
            max_steps: 2_000_000,
        }
    }
}

/// One classical RK4 step of size `h` (negative `h` steps backward).
pub fn step_rk4(field: &PlanarField, state: Point, h: f64) -> Result<Point, IntegrateError> {
    let k1 = field.eval(state);
    let k2 = field.eval([state[0] + 0.5 * h * k1[0], state[1] + 0.5 * h * k1[1]]);
    let k3 = field.eval([state[0] + 0.5 * h * k2[0], state[1] + 0.5 * h * k2[1]]);
    let k4 = field.eval([state[0] + h * k3[0], state[1] + h * k3[1]]);
    let next = [
        state[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        state[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ];
    for stage in [&k1, &k2, &k3, &k4, &next] {
        if !stage[0].is_finite() || !stage[1].is_finite() {
            return Err(IntegrateError::NonFinite);
        }
    }
    Ok(next)
}

/// Fixed-step RK4 for `ceil(t_max / h)` steps (the last step is shortened
/// to land exactly on `t_max`), stopping early on window exit or a
/// non-finite evaluation. Forward time only: `h > 0`, `t_max > 0`.
pub fn integrate_fixed(
    field: &PlanarField,
    start: Point,
    h: f64,
    t_max: f64,
    window: Option<&Rect>,
) -> Trajectory {
    assert!(h > 0.0 && h.is_finite(), "fixed-step h must be positive");
    assert!(
        t_max > 0.0 && t_max.is_finite(),
        "fixed-step horizon must be positive"
    );
    let ratio = t_max / h;
    let mut n = ratio.ceil();
    if n - ratio > 1.0 - 1e-9 {
        n -= 1.0;
    }
    let n = (n as usize).max(1);

    let mut traj = Trajectory::with_capacity(n + 1);
    traj.push(0.0, start, field.eval(start));
    let mut state = start;
    for i in 1..=n {
        let (step, t_next) = if i == n {
            (t_max - (n - 1) as f64 * h, t_max)
        } else {
            (h, i as f64 * h)
        };
        match step_rk4(field, state, step) {
            Ok(next) => {
                state = next;
                traj.push(t_next, state, field.eval(state));
                if let Some(w) = window {
                    if !w.contains(state) {
                        traj.termination = Termination::LeftWindow;
                        return traj;
                    }
                }
            }
            Err(_) => {
                traj.termination = Termination::StepUnderflow;
                return traj;
            }
        }
    }
    traj.termination = Termination::TimeLimit;
    traj
}

// Dormand–Prince 5(4) tableau. The propagated solution is 5th order;
// `E` holds the difference against the embedded 4th-order weights.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const STEP_EXPONENT: f64 = 0.2;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Adaptive Dormand–Prince integration over `[0, t_max]`; a negative
/// `t_max` runs backward and yields strictly decreasing sample times.
/// Every accepted step appends one sample. Termination records whether
/// the run hit the horizon, left `config.window`, entered a capture
/// ball, or lost step control.
pub fn integrate_adaptive(
    field: &PlanarField,
    start: Point,
    config: &IntegratorConfig,
    t_max: f64,
) -> Trajectory {
    let dir = if t_max < 0.0 { -1.0 } else { 1.0 };
    let mut traj = Trajectory::with_capacity(256);

    let mut state = start;
    let mut t = 0.0_f64;
    let k1 = field.eval(state);
    traj.push(t, state, k1);
    if !k1[0].is_finite() || !k1[1].is_finite() || t_max == 0.0 {
        traj.termination = if t_max == 0.0 {
            Termination::TimeLimit
        } else {
            Termination::StepUnderflow
        };
        return traj;
    }
    let mut k1 = k1;

    let mut h = config.h_init.clamp(config.h_min, config.h_max) * dir;
    let mut rejected_last = false;
    let mut steps = 0usize;

    loop {
        if (t_max - t) * dir <= 1e-14 * t_max.abs().max(1.0) {
            traj.termination = Termination::TimeLimit;
            return traj;
        }
        steps += 1;
        if steps > config.max_steps {
            traj.termination = Termination::StepUnderflow;
            return traj;
        }
        // clip the final step onto the horizon
        let mut clipped = false;
        if (t + h - t_max) * dir > 0.0 {
            h = t_max - t;
            clipped = true;
        }

        // stages
        let mut k = [[0.0_f64; 2]; 7];
        k[0] = k1;
        let mut finite = true;
        for stage in 1..7 {
            let mut y_stage = state;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = DP_A[stage][j];
                if a != 0.0 {
                    y_stage[0] += h * a * kj[0];
                    y_stage[1] += h * a * kj[1];
                }
            }
            // the 7th stage evaluates at the candidate new state (FSAL)
            let _ = DP_C; // stage times are irrelevant for autonomous fields
            k[stage] = field.eval(y_stage);
            if !k[stage][0].is_finite() || !k[stage][1].is_finite() {
                finite = false;
                break;
            }
        }

        let mut y_new = state;
        if finite {
            for (j, b) in DP_B.iter().enumerate() {
                if *b != 0.0 {
                    y_new[0] += h * b * k[j][0];
                    y_new[1] += h * b * k[j][1];
                }
            }
            finite = y_new[0].is_finite() && y_new[1].is_finite();
        }

        if !finite {
            h *= 0.5;
            rejected_last = true;
            if h.abs() < config.h_min {
                traj.termination = Termination::StepUnderflow;
                return traj;
            }
            continue;
        }

        // componentwise local error against abs_tol + rel_tol * |state|
        let mut err_ratio = 0.0_f64;
        for c in 0..2 {
            let mut e = 0.0;
            for (j, w) in DP_E.iter().enumerate() {
                e += w * k[j][c];
            }
            e *= h;
            let scale = config.abs_tol + config.rel_tol * state[c].abs().max(y_new[c].abs());
            err_ratio = err_ratio.max((e / scale).abs());
        }

        if err_ratio <= 1.0 {
            t = if clipped { t_max } else { t + h };
            state = y_new;
            // k7 is the derivative at the accepted state
            traj.push(t, state, k[6]);
            k1 = k[6];

            if !config.capture_points.is_empty()
                && config
                    .capture_points
                    .iter()
                    .any(|p| dist(state, *p) <= config.capture_radius)
            {
                traj.termination = Termination::EquilibriumCapture;
                return traj;
            }
            if let Some(w) = &config.window {
                if !w.contains(state) {
                    traj.termination = Termination::LeftWindow;
                    return traj;
                }
            }

            let mut factor = if err_ratio == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err_ratio.powf(-STEP_EXPONENT)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if rejected_last {
                factor = factor.min(1.0);
            }
            rejected_last = false;
            let mag = (h.abs() * factor).clamp(config.h_min, config.h_max);
            h = mag * dir;
        } else {
            let factor = (SAFETY * err_ratio.powf(-STEP_EXPONENT)).max(MIN_FACTOR);
            let mag = h.abs() * factor;
            if mag < config.h_min {
                traj.termination = Termination::StepUnderflow;
                return traj;
            }
            h = mag * dir;
            rejected_last = true;
        }
    }
}

/// A refined x-axis crossing: `y` changes sign at time `t`, abscissa
/// `x`, moving upward (`y` increasing) or downward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisCrossing {
    pub t: f64,
    pub x: f64,
    pub upward: bool,
}

/// Locates all x-axis crossings of a trajectory, refined by bisection on
/// the interpolated segment until `|y| < 1e-12`. A sample lying exactly
/// on the axis counts once (with the direction of the adjacent motion);
/// stretches that merely touch the axis without sign change do not.
/// Crossings are returned ordered by `t`.
pub fn axis_crossings(traj: &Trajectory) -> Vec<AxisCrossing> {
    let ys: Vec<f64> = traj.samples.iter().map(|s| s.y).collect();
    let n = ys.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for i in 0..n {
        if ys[i] == 0.0 {
            // first sample of a zero run speaks for the whole run
            if i > 0 && ys[i - 1] == 0.0 {
                continue;
            }
            let before = ys[..i].iter().rev().find(|v| **v != 0.0);
            let after = ys[i + 1..].iter().find(|v| **v != 0.0);
            let upward = match (before, after) {
                (None, Some(a)) => *a > 0.0,
                (Some(b), Some(a)) if b * a < 0.0 => *a > 0.0,
                (Some(b), None) => *b < 0.0,
                _ => continue,
            };
            out.push(AxisCrossing {
                t: traj.samples[i].t,
                x: traj.samples[i].x,
                upward,
            });
        }
        if i + 1 < n && ys[i] * ys[i + 1] < 0.0 {
            out.push(refine_crossing(traj, i));
        }
    }
    out.sort_by(|a, b| a.t.partial_cmp(&b.t).expect("finite times"));
    out
}

fn refine_crossing(traj: &Trajectory, seg: usize) -> AxisCrossing {
    let s0 = &traj.samples[seg];
    let s1 = &traj.samples[seg + 1];
    let eval_y = |s: f64| traj.interp_segment(seg, s0.t + s * (s1.t - s0.t))[1];
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut y_lo = s0.y;
    let mut mid = 0.5;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let ym = eval_y(mid);
        if ym.abs() < 1e-12 || (hi - lo) < 1e-16 {
            break;
        }
        if (ym > 0.0) == (y_lo > 0.0) {
            lo = mid;
            y_lo = ym;
        } else {
            hi = mid;
        }
    }
    let t = s0.t + mid * (s1.t - s0.t);
    let p = traj.interp_segment(seg, t);
    AxisCrossing {
        t,
        x: p[0],
        upward: s1.y > 0.0,
    }
}
