//! Polynomials whose coefficients are still symbolic in named parameters.
//!
//! `theta*y*(x^2-1)^2` parses into a [`SymPoly2`] whose `(i, j)` entries
//! hold [`ParamCoeff`] values (polynomials in the parameters). Binding the
//! parameters collapses everything into a numeric [`Poly2`].

use std::collections::BTreeMap;

use crate::expr::{ExprError, ParamBinding};
use crate::poly::Poly2;

/// A product of parameter powers, e.g. `theta^2 * mu`. Canonical: factors
/// sorted by name, exponents >= 1. The empty product is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub(crate) struct ParamMono(Vec<(String, u32)>);

impl ParamMono {
    fn one() -> Self {
        ParamMono(Vec::new())
    }

    fn var(name: &str) -> Self {
        ParamMono(vec![(name.to_string(), 1)])
    }

    fn mul(&self, other: &ParamMono) -> ParamMono {
        let mut map: BTreeMap<String, u32> = BTreeMap::new();
        for (n, e) in self.0.iter().chain(other.0.iter()) {
            *map.entry(n.clone()).or_insert(0) += e;
        }
        ParamMono(map.into_iter().collect())
    }

    fn evaluate(&self, bindings: &BTreeMap<&str, f64>) -> Result<f64, ExprError> {
        let mut v = 1.0;
        for (name, exp) in &self.0 {
            let b = bindings
                .get(name.as_str())
                .ok_or_else(|| ExprError::UnboundParam { name: name.clone() })?;
            v *= b.powi(*exp as i32);
        }
        Ok(v)
    }
}

/// A coefficient symbolic in the parameters: a finite sum `c * mono`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamCoeff {
    terms: BTreeMap<ParamMono, f64>,
}

impl ParamCoeff {
    pub(crate) fn number(c: f64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(ParamMono::one(), c);
        }
        ParamCoeff { terms }
    }

    pub(crate) fn param(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(ParamMono::var(name), 1.0);
        ParamCoeff { terms }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mono: ParamMono, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn add(&self, other: &ParamCoeff) -> ParamCoeff {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    fn mul(&self, other: &ParamCoeff) -> ParamCoeff {
        let mut out = ParamCoeff::default();
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    fn neg(&self) -> ParamCoeff {
        ParamCoeff {
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), -c)).collect(),
        }
    }

    fn evaluate(&self, bindings: &BTreeMap<&str, f64>) -> Result<f64, ExprError> {
        let mut sum = 0.0;
        for (mono, &c) in &self.terms {
            sum += c * mono.evaluate(bindings)?;
        }
        Ok(sum)
    }

    /// Parameter names occurring in this coefficient.
    fn param_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        for mono in self.terms.keys() {
            for (name, _) in &mono.0 {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
        }
    }
}

/// Bivariate polynomial in `(x, y)` with coefficients in the parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymPoly2 {
    terms: BTreeMap<(u32, u32), ParamCoeff>,
}

impl SymPoly2 {
    pub(crate) fn zero() -> Self {
        SymPoly2::default()
    }

    pub(crate) fn number(c: f64) -> Self {
        SymPoly2::monomial(0, 0, ParamCoeff::number(c))
    }

    pub(crate) fn var_x() -> Self {
        SymPoly2::monomial(1, 0, ParamCoeff::number(1.0))
    }

    pub(crate) fn var_y() -> Self {
        SymPoly2::monomial(0, 1, ParamCoeff::number(1.0))
    }

    pub(crate) fn param(name: &str) -> Self {
        SymPoly2::monomial(0, 0, ParamCoeff::param(name))
    }

    fn monomial(i: u32, j: u32, c: ParamCoeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        SymPoly2 { terms }
    }

    fn add_term(&mut self, key: (u32, u32), c: &ParamCoeff) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_default();
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub(crate) fn add(&self, other: &SymPoly2) -> SymPoly2 {
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.add_term(*key, c);
        }
        out
    }

    pub(crate) fn neg(&self) -> SymPoly2 {
        SymPoly2 {
            terms: self.terms.iter().map(|(&k, c)| (k, c.neg())).collect(),
        }
    }

    pub(crate) fn sub(&self, other: &SymPoly2) -> SymPoly2 {
        self.add(&other.neg())
    }

    pub(crate) fn mul(&self, other: &SymPoly2) -> SymPoly2 {
        let mut out = SymPoly2::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term((i1 + i2, j1 + j2), &c1.mul(c2));
            }
        }
        out
    }

    pub(crate) fn powi(&self, n: u32) -> SymPoly2 {
        let mut out = SymPoly2::number(1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// All parameter names occurring anywhere in the polynomial.
    pub fn param_names(&self) -> Vec<&str> {
        let mut names = Vec::new();
        for c in self.terms.values() {
            c.param_names(&mut names);
        }
        names.sort_unstable();
        names
    }

    /// Substitutes parameter values, producing a numeric polynomial in
    /// canonical form (coefficients that bind to zero are dropped).
    pub fn bind(&self, bindings: &[ParamBinding]) -> Result<Poly2, ExprError> {
        let mut map: BTreeMap<&str, f64> = BTreeMap::new();
        for b in bindings {
            if map.insert(b.name.as_str(), b.value).is_some() {
                return Err(ExprError::DuplicateParam {
                    name: b.name.clone(),
                });
            }
        }
        let mut out = Poly2::zero();
        for (&(i, j), coeff) in &self.terms {
            out.add_term(i, j, coeff.evaluate(&map)?);
        }
        Ok(out)
    }
}
