//! Canonical bivariate polynomials with exact symbolic calculus.
//!
//! [`Poly2`] stores a sparse map from exponent pairs `(i, j)` (degree in x,
//! degree in y) to double coefficients. Zero coefficients are never stored,
//! so structural equality coincides with mathematical equality and the type
//! can be compared with `==` in tests. All calculus here is exact symbol
//! manipulation: differentiation, recentering (Taylor shift), and products
//! never resort to finite differences.

use std::collections::BTreeMap;
use std::fmt;

/// One of the two plane variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Canonical sparse bivariate polynomial over `f64` coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), f64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly2::monomial(0, 0, c)
    }

    pub fn x() -> Self {
        Poly2::monomial(1, 0, 1.0)
    }

    pub fn y() -> Self {
        Poly2::monomial(0, 1, 1.0)
    }

    /// `c * x^i * y^j`; collapses to the zero polynomial when `c == 0`.
    pub fn monomial(i: u32, j: u32, c: f64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert((i, j), c);
        }
        Poly2 { terms }
    }

    /// Builds a polynomial from `(i, j, coefficient)` triples, summing
    /// duplicates and dropping anything that cancels to zero.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32, f64)>>(iter: I) -> Self {
        let mut p = Poly2::zero();
        for (i, j, c) in iter {
            p.add_term(i, j, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, i: u32, j: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `x^i y^j` (zero when the term is absent).
    pub fn coeff(&self, i: u32, j: u32) -> f64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0.0)
    }

    /// Terms in ascending `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn neg(&self) -> Poly2 {
        let terms = self.terms.iter().map(|(&k, &c)| (k, -c)).collect();
        Poly2 { terms }
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (i, j, c) in other.terms() {
            out.add_term(i, j, c);
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (i, j, c) in other.terms() {
            out.add_term(i, j, -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (i1, j1, c1) in self.terms() {
            for (i2, j2, c2) in other.terms() {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        let mut out = Poly2::zero();
        for (i, j, c) in self.terms() {
            out.add_term(i, j, c * s);
        }
        out
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: u32) -> Poly2 {
        let mut out = Poly2::constant(1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Exact partial derivative with respect to `var`.
    pub fn differentiate(&self, var: Var) -> Poly2 {
        let mut out = Poly2::zero();
        for (i, j, c) in self.terms() {
            match var {
                Var::X if i > 0 => out.add_term(i - 1, j, c * i as f64),
                Var::Y if j > 0 => out.add_term(i, j - 1, c * j as f64),
                _ => {}
            }
        }
        out
    }

    /// Evaluates at `(x, y)`. Terms are summed in ascending exponent-pair
    /// order so the result is reproducible across runs.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let mut sum = 0.0;
        for (i, j, c) in self.terms() {
            sum += c * x.powi(i as i32) * y.powi(j as i32);
        }
        sum
    }

    /// Recenters the polynomial at `(x0, y0)`: the result `q` satisfies
    /// `q(u, v) = p(x0 + u, y0 + v)` up to floating rounding. The expansion
    /// uses exact binomial coefficients per monomial.
    pub fn taylor_shift(&self, x0: f64, y0: f64) -> Poly2 {
        let mut out = Poly2::zero();
        for (i, j, c) in self.terms() {
            // (x0 + u)^i expanded row by row; same for (y0 + v)^j.
            let xs = binomial_expand(i, x0);
            let ys = binomial_expand(j, y0);
            for (a, xa) in xs.iter().enumerate() {
                for (b, yb) in ys.iter().enumerate() {
                    out.add_term(a as u32, b as u32, c * xa * yb);
                }
            }
        }
        out
    }

    /// Renders to the text grammar accepted by [`crate::expr::parse_poly`]:
    /// explicit `*`, caret powers, terms in ascending exponent order.
    /// Coefficients use shortest round-trip formatting, so parsing the
    /// result reproduces this polynomial exactly.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (i, j, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if idx == 0 {
                if c < 0.0 {
                    out.push('-');
                }
            } else if c < 0.0 {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut parts: Vec<String> = Vec::new();
            if mag != 1.0 || (i == 0 && j == 0) {
                parts.push(format!("{mag}"));
            }
            match i {
                0 => {}
                1 => parts.push("x".to_string()),
                _ => parts.push(format!("x^{i}")),
            }
            match j {
                0 => {}
                1 => parts.push("y".to_string()),
                _ => parts.push(format!("y^{j}")),
            }
            out.push_str(&parts.join("*"));
        }
        out
    }
}

/// Coefficients of `(c0 + u)^n` in ascending powers of `u`.
fn binomial_expand(n: u32, c0: f64) -> Vec<f64> {
    let n = n as usize;
    let mut row = vec![0.0; n + 1];
    for (a, slot) in row.iter_mut().enumerate() {
        *slot = binomial(n, a) * c0.powi((n - a) as i32);
    }
    row
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl std::ops::Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        Poly2::add(self, rhs)
    }
}

impl std::ops::Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        Poly2::sub(self, rhs)
    }
}

impl std::ops::Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        Poly2::mul(self, rhs)
    }
}

impl std::ops::Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        Poly2::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quintic() -> Poly2 {
        // -x^5 + 2x^3 - x, the undamped whorl right-hand side
        Poly2::from_terms([(5, 0, -1.0), (3, 0, 2.0), (1, 0, -1.0)])
    }

    #[test]
    fn canonical_form_drops_zero_coefficients() {
        let p = Poly2::from_terms([(2, 0, 1.0), (2, 0, -1.0), (0, 1, 3.0)]);
        assert_eq!(p, Poly2::monomial(0, 1, 3.0));
        assert_eq!(p.len(), 1);
        assert!(Poly2::monomial(4, 4, 0.0).is_zero());
    }

    #[test]
    fn differentiate_power_rule() {
        let d = quintic().differentiate(Var::X);
        assert_eq!(
            d,
            Poly2::from_terms([(4, 0, -5.0), (2, 0, 6.0), (0, 0, -1.0)])
        );
        assert_eq!(Poly2::y().differentiate(Var::Y), Poly2::constant(1.0));
        assert!(quintic().differentiate(Var::Y).is_zero());
    }

    #[test]
    fn evaluate_at_roots_and_elsewhere() {
        let q = quintic();
        assert_eq!(q.evaluate(0.0, 0.0), 0.0);
        assert_eq!(q.evaluate(1.0, 0.0), 0.0);
        assert_eq!(q.evaluate(2.0, 0.0), -18.0);
    }

    #[test]
    fn taylor_shift_recenters_the_quintic() {
        // About x = -1 the leading jet is 4u^2; about x = +1 it is -4u^2.
        let left = quintic().taylor_shift(-1.0, 0.0);
        assert_eq!(left.coeff(0, 0), 0.0);
        assert_eq!(left.coeff(1, 0), 0.0);
        assert_eq!(left.coeff(2, 0), 4.0);
        let right = quintic().taylor_shift(1.0, 0.0);
        assert_eq!(right.coeff(2, 0), -4.0);
        assert_eq!(Poly2::x().taylor_shift(0.0, 0.0), Poly2::x());
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = Poly2::from_terms([(3, 2, 1.5), (1, 1, -2.0), (0, 4, 0.25), (2, 0, -7.0)]);
        let s = p.taylor_shift(0.7, -1.3);
        for &(u, v) in &[(0.0, 0.0), (0.3, -0.2), (-1.1, 0.9), (2.0, 2.0)] {
            let a = s.evaluate(u, v);
            let b = p.evaluate(0.7 + u, -1.3 + v);
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn cross_partials_commute() {
        let p = Poly2::from_terms([(3, 2, 1.0), (2, 5, -0.5), (1, 1, 4.0)]);
        let xy = p.differentiate(Var::X).differentiate(Var::Y);
        let yx = p.differentiate(Var::Y).differentiate(Var::X);
        assert_eq!(xy, yx);
    }

    #[test]
    fn product_and_power() {
        // (x^2 - 1)^2 = x^4 - 2x^2 + 1
        let sq = Poly2::from_terms([(2, 0, 1.0), (0, 0, -1.0)]).powi(2);
        assert_eq!(
            sq,
            Poly2::from_terms([(4, 0, 1.0), (2, 0, -2.0), (0, 0, 1.0)])
        );
        // -x * (x^2 - 1)^2 reproduces the quintic
        assert_eq!(Poly2::x().neg().mul(&sq), quintic());
    }

    #[test]
    fn text_rendering() {
        assert_eq!(Poly2::zero().to_text(), "0");
        assert_eq!(quintic().to_text(), "-x + 2*x^3 - x^5");
        assert_eq!(Poly2::monomial(0, 0, -2.5).to_text(), "-2.5");
        assert_eq!(Poly2::monomial(2, 1, 1.0).to_text(), "x^2*y");
    }
}
