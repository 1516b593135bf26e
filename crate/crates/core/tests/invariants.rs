//! Cross-module invariants checked with seeded randomized inputs and an
//! independently coded oracle for the degenerate classification table.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use whorl_core::{
    axis_crossings, classify_degenerate, eigenvalues, find_equilibria, integrate_adaptive,
    integrate_fixed, parse_numeric, whorl_family, write_csv, EquilibriumKind, IntegratorConfig,
    NormalFormData, PlanarField, Poly2, Rect, Sample, Termination, Trajectory, Var,
};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_1234)
}

fn random_coeff(rng: &mut ChaCha8Rng) -> f64 {
    // full-precision doubles in a moderate range, sign included
    let mag = 10f64.powf(rng.random_range(-3.0..3.0));
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    sign * mag * rng.random::<f64>()
}

fn random_poly(rng: &mut ChaCha8Rng, max_deg: u32, max_terms: usize) -> Poly2 {
    let n = rng.random_range(1..=max_terms);
    Poly2::from_terms((0..n).map(|_| {
        (
            rng.random_range(0..=max_deg),
            rng.random_range(0..=max_deg),
            random_coeff(rng),
        )
    }))
}

#[test]
fn rendered_random_polynomials_reparse_canonically() {
    let mut rng = rng();
    for _ in 0..100 {
        let p = random_poly(&mut rng, 6, 8);
        let text = p.to_text();
        let back = parse_numeric(&text).unwrap_or_else(|e| panic!("reparse of `{text}`: {e}"));
        assert_eq!(back, p, "round trip through `{text}`");
    }
}

// --- evaluation homomorphism against a direct expression evaluator ----

enum Ast {
    Num(f64),
    X,
    Y,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
}

impl Ast {
    fn random(rng: &mut ChaCha8Rng, depth: u32) -> Ast {
        let leaf = depth == 0 || rng.random_bool(0.3);
        if leaf {
            match rng.random_range(0..3) {
                0 => Ast::Num(rng.random_range(0..5) as f64),
                1 => Ast::X,
                _ => Ast::Y,
            }
        } else {
            let sub = |rng: &mut ChaCha8Rng| Box::new(Ast::random(rng, depth - 1));
            match rng.random_range(0..5) {
                0 => Ast::Neg(sub(rng)),
                1 => Ast::Add(sub(rng), sub(rng)),
                2 => Ast::Sub(sub(rng), sub(rng)),
                3 => Ast::Mul(sub(rng), sub(rng)),
                _ => Ast::Pow(sub(rng), rng.random_range(0..=3)),
            }
        }
    }

    fn render(&self) -> String {
        match self {
            Ast::Num(v) => format!("{v}"),
            Ast::X => "x".to_string(),
            Ast::Y => "y".to_string(),
            Ast::Neg(a) => format!("-({})", a.render()),
            Ast::Add(a, b) => format!("({}) + ({})", a.render(), b.render()),
            Ast::Sub(a, b) => format!("({}) - ({})", a.render(), b.render()),
            Ast::Mul(a, b) => format!("({}) * ({})", a.render(), b.render()),
            Ast::Pow(a, k) => format!("({})^{k}", a.render()),
        }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Ast::Num(v) => *v,
            Ast::X => x,
            Ast::Y => y,
            Ast::Neg(a) => -a.eval(x, y),
            Ast::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Ast::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Ast::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Ast::Pow(a, k) => a.eval(x, y).powi(*k as i32),
        }
    }
}

#[test]
fn parsed_evaluation_matches_direct_arithmetic() {
    let mut rng = rng();
    let mut points_checked = 0;
    while points_checked < 200 {
        let ast = Ast::random(&mut rng, 3);
        let text = ast.render();
        let poly = parse_numeric(&text).unwrap_or_else(|e| panic!("parse of `{text}`: {e}"));
        for _ in 0..5 {
            let x = rng.random_range(-2.0..2.0);
            let y = rng.random_range(-2.0..2.0);
            let direct = ast.eval(x, y);
            let parsed = poly.evaluate(x, y);
            let tol = 1e-12 * direct.abs().max(parsed.abs()).max(1.0);
            assert!(
                (direct - parsed).abs() <= tol,
                "`{text}` at ({x}, {y}): {direct} vs {parsed}"
            );
            points_checked += 1;
        }
    }
}

#[test]
fn taylor_shift_agrees_with_recentered_evaluation() {
    let mut rng = rng();
    for _ in 0..50 {
        let p = random_poly(&mut rng, 5, 6);
        let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let shifted = p.taylor_shift(a, b);
        for _ in 0..4 {
            let (u, v) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let lhs = shifted.evaluate(u, v);
            let rhs = p.evaluate(a + u, b + v);
            let tol = 1e-10 * lhs.abs().max(rhs.abs()).max(1.0);
            assert!((lhs - rhs).abs() <= tol, "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn cross_partials_commute_on_random_polynomials() {
    let mut rng = rng();
    // integer coefficients: coefficient-times-exponent products are exact,
    // so the two differentiation orders must agree structurally
    for _ in 0..100 {
        let p = Poly2::from_terms((0..8).map(|_| {
            (
                rng.random_range(0..=7u32),
                rng.random_range(0..=7u32),
                rng.random_range(-50..=50) as f64,
            )
        }));
        assert_eq!(
            p.differentiate(Var::X).differentiate(Var::Y),
            p.differentiate(Var::Y).differentiate(Var::X)
        );
    }
    // arbitrary float coefficients can pick up one rounding per product;
    // the orders then agree to a relative ulp, not bitwise
    for _ in 0..100 {
        let p = random_poly(&mut rng, 7, 10);
        let xy = p.differentiate(Var::X).differentiate(Var::Y);
        let yx = p.differentiate(Var::Y).differentiate(Var::X);
        assert_eq!(xy.len(), yx.len());
        for ((i1, j1, c1), (i2, j2, c2)) in xy.terms().zip(yx.terms()) {
            assert_eq!((i1, j1), (i2, j2));
            assert!((c1 - c2).abs() <= 1e-15 * c1.abs(), "{c1} vs {c2}");
        }
    }
}

#[test]
fn analytic_jacobian_matches_central_differences() {
    let mut rng = rng();
    let h = 1e-5;
    for _ in 0..100 {
        let field = if rng.random_bool(0.5) {
            whorl_family(rng.random_range(-2.0..2.0))
        } else {
            PlanarField::new(
                random_poly(&mut rng, 3, 5),
                random_poly(&mut rng, 3, 5),
                vec![],
            )
            .unwrap_or_else(|_| whorl_family(0.0))
        };
        let p = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let jac = field.jet(p).jacobian;
        let fd = |comp: usize, var: usize| {
            let mut hi = p;
            let mut lo = p;
            hi[var] += h;
            lo[var] -= h;
            (field.eval(hi)[comp] - field.eval(lo)[comp]) / (2.0 * h)
        };
        for comp in 0..2 {
            for var in 0..2 {
                let diff = (jac[comp][var] - fd(comp, var)).abs();
                assert!(diff < 1e-6, "entry ({comp},{var}) off by {diff}");
            }
        }
    }
}

#[test]
fn origin_eigenvalues_follow_the_closed_form() {
    let mut rng = rng();
    for _ in 0..50 {
        let theta = rng.random_range(-4.0..4.0);
        let field = whorl_family(theta);
        let eig = eigenvalues(&field.jet([0.0, 0.0]).jacobian);
        let disc = theta * theta - 4.0;
        let (re0, im0, re1, im1) = if disc >= 0.0 {
            let s = disc.sqrt();
            ((theta + s) / 2.0, 0.0, (theta - s) / 2.0, 0.0)
        } else {
            let s = (-disc).sqrt();
            (theta / 2.0, s / 2.0, theta / 2.0, -s / 2.0)
        };
        assert!((eig[0].re - re0).abs() < 1e-12 && (eig[0].im - im0).abs() < 1e-12);
        assert!((eig[1].re - re1).abs() < 1e-12 && (eig[1].im - im1).abs() < 1e-12);
    }
}

// --- degenerate decision table vs an independently coded oracle -------

/// Literal transcription of the double-zero classification rules,
/// written as a plain condition ladder so it shares no code with the
/// library implementation.
fn oracle_table(k: u32, a_k: f64, n: Option<u32>, b_n: f64) -> EquilibriumKind {
    use EquilibriumKind::*;
    let m = k / 2;
    if k % 2 == 0 {
        if b_n == 0.0 {
            return Cusp;
        }
        let n = n.expect("nonzero b_n carries n");
        if n >= m {
            return Cusp;
        }
        return SaddleNode;
    }
    if a_k > 0.0 {
        return Saddle;
    }
    let lambda = b_n * b_n + 4.0 * (m as f64 + 1.0) * a_k;
    if b_n == 0.0 {
        return FocusOrCenter;
    }
    let n = n.expect("nonzero b_n carries n");
    if n > m {
        return FocusOrCenter;
    }
    if n == m && lambda < 0.0 {
        return FocusOrCenter;
    }
    if n % 2 == 0 {
        NodeDegenerateTheorem
    } else {
        EllipticDomain
    }
}

#[test]
fn degenerate_table_is_total_and_matches_the_oracle() {
    let mut cases = 0;
    for k in 2..=9u32 {
        for a_sign in [1.0, -1.0] {
            for b_n in [0.0, 1.0, -1.0, 5.0, -5.0] {
                let ns: Vec<Option<u32>> = if b_n == 0.0 {
                    vec![None]
                } else {
                    (1..=9).map(Some).collect()
                };
                for n in ns {
                    let nf = NormalFormData {
                        k,
                        a_k: a_sign,
                        n,
                        b_n,
                    };
                    let got = classify_degenerate(&nf);
                    let want = oracle_table(k, a_sign, n, b_n);
                    assert_eq!(got, want, "k={k} a_k={a_sign} n={n:?} b_n={b_n}");
                    assert_ne!(got, EquilibriumKind::NotClassified);
                    cases += 1;
                }
            }
        }
    }
    assert_eq!(cases, 8 * 2 * (1 + 4 * 9));
}

#[test]
fn whorl_equilibria_across_the_parameter_sweep() {
    let window = Rect::new(-2.0, 2.0, -2.0, 2.0);
    for theta in [-3.0, -2.0, -0.9, -0.2, 0.0, 0.2, 0.9, 2.0, 3.0] {
        let field = whorl_family(theta);
        let search = find_equilibria(&field, &window, 1e-10);
        assert_eq!(search.points.len(), 3, "theta = {theta}");
        for (found, want) in search.points.iter().zip([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]) {
            let d = (found[0] - want[0]).hypot(found[1] - want[1]);
            assert!(d < 1e-9, "theta = {theta}: {found:?} vs {want:?} ({d})");
        }
        for cusp_ix in [0, 2] {
            let report = whorl_core::classify(&field, search.points[cusp_ix]);
            assert_eq!(report.kind, EquilibriumKind::Cusp, "theta = {theta}");
        }
    }
}

// --- integrator symmetry and accuracy ---------------------------------

#[test]
fn rk4_shows_fourth_order_convergence() {
    let field = whorl_family(0.5);
    let start = [0.3, 0.1];
    let reference = {
        let config = IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            ..IntegratorConfig::default()
        };
        let traj = integrate_adaptive(&field, start, &config, 1.0);
        traj.samples.last().unwrap().point()
    };
    let err = |h: f64| {
        let traj = integrate_fixed(&field, start, h, 1.0, None);
        let end = traj.samples.last().unwrap().point();
        (end[0] - reference[0]).hypot(end[1] - reference[1])
    };
    let ratio = err(1e-2) / err(5e-3);
    assert!(
        (12.8..=19.2).contains(&ratio),
        "error ratio under step halving: {ratio}"
    );
}

fn flip(p: [f64; 2]) -> [f64; 2] {
    [p[0], -p[1]]
}

#[test]
fn forward_runs_mirror_backward_runs_of_the_reversed_parameter() {
    let mut rng = rng();
    let config = IntegratorConfig::default();
    for _ in 0..20 {
        let theta = rng.random_range(-1.5..1.5);
        let start = [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)];
        let fwd = integrate_adaptive(&whorl_family(theta), start, &config, 5.0);
        let bwd = integrate_adaptive(&whorl_family(-theta), flip(start), &config, -5.0);
        assert_eq!(fwd.len(), bwd.len(), "theta = {theta}, start = {start:?}");
        for (a, b) in fwd.samples.iter().zip(&bwd.samples) {
            assert!((a.t + b.t).abs() <= 1e-12);
            let bp = flip(b.point());
            assert!(
                (a.x - bp[0]).abs() <= 1e-8 && (a.y - bp[1]).abs() <= 1e-8,
                "theta = {theta}: {a:?} vs {b:?}"
            );
        }
    }
}

#[test]
fn trajectories_have_odd_symmetry() {
    let mut rng = rng();
    let config = IntegratorConfig::default();
    for _ in 0..20 {
        let theta = rng.random_range(-1.5..1.5);
        let start = [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)];
        let a = integrate_adaptive(&whorl_family(theta), start, &config, 4.0);
        let b = integrate_adaptive(
            &whorl_family(theta),
            [-start[0], -start[1]],
            &config,
            4.0,
        );
        assert_eq!(a.len(), b.len());
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            assert!((sa.t - sb.t).abs() <= 1e-12);
            assert!(
                (sa.x + sb.x).abs() <= 1e-10 && (sa.y + sb.y).abs() <= 1e-10,
                "theta = {theta}: {sa:?} vs {sb:?}"
            );
        }
    }
}

#[test]
fn adaptive_energy_drift_stays_within_budget() {
    // runs seeded inside the zero level set keep |H(t) - H(0)| below
    // 1000 * rel_tol over t in [0, 50]
    let config = IntegratorConfig {
        rel_tol: 1e-9,
        ..IntegratorConfig::default()
    };
    let field = whorl_family(0.0);
    for x0 in [0.2, 0.5, 0.8, 0.95] {
        let start = [x0, 0.0];
        let h0 = whorl_core::whorl_hamiltonian(start);
        let traj = integrate_adaptive(&field, start, &config, 50.0);
        assert_eq!(traj.termination, Termination::TimeLimit);
        for s in &traj.samples {
            let drift = (whorl_core::whorl_hamiltonian(s.point()) - h0).abs();
            assert!(drift < 1e-6, "x0 = {x0}: drift {drift}");
        }
    }
}

#[test]
fn closed_orbit_periods_match_between_crossings() {
    // at theta = 0 successive same-direction crossings are one period
    // apart; the refined abscissas agree to the crossing tolerance
    let config = IntegratorConfig {
        rel_tol: 1e-10,
        ..IntegratorConfig::default()
    };
    let traj = integrate_adaptive(&whorl_family(0.0), [0.7, 0.0], &config, 40.0);
    let crossings = axis_crossings(&traj);
    let down: Vec<_> = crossings.iter().filter(|c| !c.upward).collect();
    assert!(down.len() >= 3);
    let p1 = down[1].t - down[0].t;
    let p2 = down[2].t - down[1].t;
    assert!((p1 - p2).abs() < 1e-5, "periods {p1} vs {p2}");
}

#[test]
fn csv_round_trips_for_random_trajectories() {
    let mut rng = rng();
    for _ in 0..100 {
        let n = rng.random_range(0..12);
        let mut t = rng.random_range(-5.0..5.0);
        let samples: Vec<Sample> = (0..n)
            .map(|_| {
                t += rng.random_range(1e-6..2.0);
                // full-bit-pattern finite doubles exercise the formatter
                let full = |rng: &mut ChaCha8Rng| loop {
                    let v = f64::from_bits(rng.random::<u64>());
                    if v.is_finite() {
                        return v;
                    }
                };
                Sample {
                    t,
                    x: full(&mut rng),
                    y: full(&mut rng),
                }
            })
            .collect();
        let traj = Trajectory::from_samples(samples.clone(), Termination::TimeLimit);
        let csv = write_csv(&traj);
        let parsed: Vec<Sample> = csv
            .lines()
            .skip(1)
            .map(|line| {
                let mut cells = line.split(',');
                Sample {
                    t: cells.next().unwrap().parse().unwrap(),
                    x: cells.next().unwrap().parse().unwrap(),
                    y: cells.next().unwrap().parse().unwrap(),
                }
            })
            .collect();
        assert_eq!(parsed.len(), samples.len());
        for (a, b) in parsed.iter().zip(&samples) {
            assert!(a.t == b.t && a.x == b.x && a.y == b.y, "{a:?} vs {b:?}");
        }
    }
}
