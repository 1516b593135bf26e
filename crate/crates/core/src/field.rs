//! Planar polynomial vector fields and the parametric whorl family.

use crate::expr::{self, ExprError, ParamBinding};
use crate::geom::Point;
use crate::poly::{Poly2, Var};

/// 2x2 real matrix, row major.
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("both field components are identically zero")]
    ZeroField,
}

/// A planar autonomous system `x' = P(x, y)`, `y' = Q(x, y)` with fully
/// numeric components. The four first partials are expanded once at
/// construction so Jacobians are evaluated from exact derivatives, never
/// finite differences.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarField {
    p: Poly2,
    q: Poly2,
    p_x: Poly2,
    p_y: Poly2,
    q_x: Poly2,
    q_y: Poly2,
    params: Vec<ParamBinding>,
}

/// Field value and exact Jacobian at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1 {
    pub value: Point,
    pub jacobian: Mat2,
}

impl PlanarField {
    /// Builds a field from numeric components. At least one component must
    /// be nonzero. `params` records the parameter values the components
    /// were bound with (provenance only; the polynomials are already
    /// numeric).
    pub fn new(p: Poly2, q: Poly2, params: Vec<ParamBinding>) -> Result<Self, FieldError> {
        if p.is_zero() && q.is_zero() {
            return Err(FieldError::ZeroField);
        }
        let (p_x, p_y) = (p.differentiate(Var::X), p.differentiate(Var::Y));
        let (q_x, q_y) = (q.differentiate(Var::X), q.differentiate(Var::Y));
        Ok(PlanarField {
            p,
            q,
            p_x,
            p_y,
            q_x,
            q_y,
            params,
        })
    }

    /// Parses both components with the parameter names from `bindings` and
    /// binds them in one step.
    pub fn from_exprs(
        px: &str,
        py: &str,
        bindings: &[ParamBinding],
    ) -> Result<Self, FieldError> {
        let names = bindings.iter().map(|b| b.name.clone()).collect();
        let p = expr::bind(&expr::parse_poly(px, &names)?, bindings)?;
        let q = expr::bind(&expr::parse_poly(py, &names)?, bindings)?;
        PlanarField::new(p, q, bindings.to_vec())
    }

    pub fn p(&self) -> &Poly2 {
        &self.p
    }

    pub fn q(&self) -> &Poly2 {
        &self.q
    }

    pub fn params(&self) -> &[ParamBinding] {
        &self.params
    }

    /// `(P(x, y), Q(x, y))`.
    pub fn eval(&self, point: Point) -> Point {
        let [x, y] = point;
        [self.p.evaluate(x, y), self.q.evaluate(x, y)]
    }

    /// Field value together with the Jacobian of exact partials.
    pub fn jet(&self, point: Point) -> Jet1 {
        let [x, y] = point;
        Jet1 {
            value: self.eval(point),
            jacobian: [
                [self.p_x.evaluate(x, y), self.p_y.evaluate(x, y)],
                [self.q_x.evaluate(x, y), self.q_y.evaluate(x, y)],
            ],
        }
    }

    /// The same field with time reversed (both components negated).
    pub fn time_reversed(&self) -> PlanarField {
        PlanarField::new(self.p.neg(), self.q.neg(), self.params.clone())
            .expect("negation preserves nonzeroness")
    }

    /// True when the first component is exactly the monomial `y`, i.e. the
    /// field is a second-order scalar equation in disguise.
    pub fn is_second_order_shape(&self) -> bool {
        self.p == Poly2::y()
    }
}

/// Component text of the whorl family's second equation; kept in one place
/// so presets and documentation stay in sync.
pub const WHORL_QY_TEXT: &str = "-x*(x^2-1)^2 + theta*y*(x^2-1)^2";

/// The parametric whorl field
/// `x' = y`, `y' = -x(x^2-1)^2 + theta*y*(x^2-1)^2`.
///
/// `theta` interpolates the portrait classes: 0 gives nested closed
/// ridges around the origin, small positive/negative values wind them
/// into outward/inward spirals, and values near 1 twist the core into an
/// "S" shape. The two outer equilibria at `(±1, 0)` stay cusps for every
/// `theta`.
pub fn whorl_family(theta: f64) -> PlanarField {
    // (x^2 - 1)^2
    let sq = Poly2::from_terms([(2, 0, 1.0), (0, 0, -1.0)]).powi(2);
    let restoring = Poly2::x().neg().mul(&sq);
    let damping = Poly2::y().mul(&sq).scale(theta);
    let q = restoring.add(&damping);
    PlanarField::new(Poly2::y(), q, vec![ParamBinding::new("theta", theta)])
        .expect("whorl components are nonzero")
}

/// Conserved energy of the undamped (`theta = 0`) whorl system:
/// `H(x, y) = y^2/2 + (x^2 - 1)^3/6`. Its level sets are the closed
/// ridge curves; the zero level set carries the cusps and their
/// connecting separatrices. Only meaningful for `theta = 0`.
pub fn whorl_hamiltonian(point: Point) -> f64 {
    let [x, y] = point;
    let w = x * x - 1.0;
    0.5 * y * y + w * w * w / 6.0
}

/// Gradient of [`whorl_hamiltonian`] as exact polynomials `(dH/dx, dH/dy)`.
pub fn whorl_hamiltonian_gradient() -> (Poly2, Poly2) {
    (
        Poly2::from_terms([(5, 0, 1.0), (3, 0, -2.0), (1, 0, 1.0)]),
        Poly2::y(),
    )
}
