//! Quasipolynomial characteristic functions.
//!
//! A [`ScalarFactor`] is `Δ(λ) = λ − Σ a_k b_k e^{−λ τ_k}`. The weight `b_k`
//! is kept separate from the coefficient `a_k` because ring factors share
//! coefficients and delays and differ only in weights.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One delayed term `a · b · e^{−λ τ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub a: f64,
    pub b: f64,
    pub tau: f64,
}

impl Term {
    pub fn new(a: f64, b: f64, tau: f64) -> Self {
        Self { a, b, tau }
    }

    #[inline]
    fn value(&self, lambda: Complex64) -> Complex64 {
        (self.a * self.b) * (-lambda * self.tau).exp()
    }
}

#[derive(Deserialize)]
struct RawFactor {
    terms: Vec<Term>,
    #[serde(default = "one")]
    multiplicity: u32,
}

fn one() -> u32 {
    1
}

/// A single quasipolynomial factor with a multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFactor")]
pub struct ScalarFactor {
    terms: Vec<Term>,
    multiplicity: u32,
}

impl TryFrom<RawFactor> for ScalarFactor {
    type Error = Error;

    fn try_from(raw: RawFactor) -> Result<Self> {
        ScalarFactor::with_multiplicity(raw.terms, raw.multiplicity)
    }
}

impl ScalarFactor {
    /// Factor of multiplicity one.
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        Self::with_multiplicity(terms, 1)
    }

    pub fn with_multiplicity(terms: Vec<Term>, multiplicity: u32) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::InvalidInput("multiplicity must be at least 1".into()));
        }
        for (k, t) in terms.iter().enumerate() {
            if !(t.tau >= 0.0 && t.tau.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "delay of term {k} must be finite and non-negative, got {}",
                    t.tau
                )));
            }
            if !t.a.is_finite() || !t.b.is_finite() {
                return Err(Error::InvalidInput(format!("term {k} has a non-finite coefficient")));
            }
        }
        Ok(Self { terms, multiplicity })
    }

    /// Convenience constructor from `(a, b, tau)` triples.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(triples.iter().map(|&(a, b, tau)| Term::new(a, b, tau)).collect())
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    /// Δ(λ). Multiplicity is not applied.
    pub fn evaluate(&self, lambda: Complex64) -> Complex64 {
        self.terms
            .iter()
            .fold(lambda, |acc, t| acc - t.value(lambda))
    }

    /// Δ′(λ) = 1 + Σ a_k b_k τ_k e^{−λ τ_k}.
    pub fn evaluate_derivative(&self, lambda: Complex64) -> Complex64 {
        self.terms
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, t| acc + t.tau * t.value(lambda))
    }

    /// Δ and Δ′ sharing the exponentials.
    pub fn evaluate_with_derivative(&self, lambda: Complex64) -> (Complex64, Complex64) {
        let mut f = lambda;
        let mut df = Complex64::new(1.0, 0.0);
        for t in &self.terms {
            let v = t.value(lambda);
            f -= v;
            df += t.tau * v;
        }
        (f, df)
    }

    /// max_ℓ |Δ(iω_ℓ)|.
    pub fn residual_on_targets(&self, omegas: &[f64]) -> f64 {
        omegas
            .iter()
            .map(|&w| self.evaluate(Complex64::new(0.0, w)).norm())
            .fold(0.0, f64::max)
    }

    /// Σ |a_k b_k|, a size estimate for the delayed part.
    pub fn coefficient_mass(&self) -> f64 {
        self.terms.iter().map(|t| (t.a * t.b).abs()).sum()
    }

    pub fn max_delay(&self) -> f64 {
        self.terms.iter().map(|t| t.tau).fold(0.0, f64::max)
    }
}

/// Product of factors, each raised to its multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProduct")]
pub struct CharProduct {
    factors: Vec<ScalarFactor>,
}

#[derive(Deserialize)]
struct RawProduct {
    factors: Vec<ScalarFactor>,
}

impl TryFrom<RawProduct> for CharProduct {
    type Error = Error;

    fn try_from(raw: RawProduct) -> Result<Self> {
        CharProduct::new(raw.factors)
    }
}

impl CharProduct {
    pub fn new(factors: Vec<ScalarFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("a characteristic product needs at least one factor".into()));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[ScalarFactor] {
        &self.factors
    }

    /// Π_j Δ_j(λ)^{m_j}.
    pub fn evaluate_product(&self, lambda: Complex64) -> Complex64 {
        self.factors.iter().fold(Complex64::new(1.0, 0.0), |acc, f| {
            acc * f.evaluate(lambda).powu(f.multiplicity)
        })
    }

    /// Sum of multiplicities, i.e. the dimension of the full system.
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.multiplicity).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_delay_at_origin() {
        let f = ScalarFactor::from_triples(&[(1.0, 1.0, 1.0)]).unwrap();
        assert_eq!(f.evaluate(c(0.0, 0.0)), c(-1.0, 0.0));
        assert_eq!(f.evaluate_derivative(c(0.0, 0.0)), c(2.0, 0.0));
    }

    #[test]
    fn closed_form_root_at_i() {
        let f = ScalarFactor::from_triples(&[(1.0, 1.0, 1.5 * PI)]).unwrap();
        assert!(f.evaluate(c(0.0, 1.0)).norm() < 1e-15);
        assert!(f.residual_on_targets(&[1.0]) < 1e-15);
    }

    #[test]
    fn delay_free_derivative_is_one() {
        let f = ScalarFactor::from_triples(&[(3.0, 2.0, 0.0), (-1.0, 0.5, 0.0)]).unwrap();
        for lam in [c(0.3, -2.0), c(-4.0, 1.0), c(0.0, 0.0)] {
            assert_eq!(f.evaluate_derivative(lam), c(1.0, 0.0));
        }
    }

    #[test]
    fn empty_factor_is_identity() {
        let f = ScalarFactor::from_triples(&[(0.0, 1.0, 0.3)]).unwrap();
        assert!((f.residual_on_targets(&[2.0]) - 2.0).abs() < 1e-15);
        let g = ScalarFactor::new(vec![]).unwrap();
        assert_eq!(g.evaluate(c(1.0, 2.0)), c(1.0, 2.0));
    }

    #[test]
    fn residual_of_unit_delay() {
        // |i − e^{−i}|, 40-digit reference
        let f = ScalarFactor::from_triples(&[(1.0, 1.0, 1.0)]).unwrap();
        assert!((f.residual_on_targets(&[1.0]) - 1.919_099_259_969_580_9).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_factors() {
        assert!(ScalarFactor::from_triples(&[(1.0, 1.0, -0.1)]).is_err());
        assert!(ScalarFactor::with_multiplicity(vec![], 0).is_err());
        assert!(CharProduct::new(vec![]).is_err());
        // zero weights are representable
        assert!(ScalarFactor::from_triples(&[(1.0, 0.0, 1.0)]).is_ok());
    }

    #[test]
    fn product_with_a_vanishing_factor() {
        let root = ScalarFactor::with_multiplicity(
            vec![Term::new(1.0, 1.0, 1.5 * PI)],
            2,
        )
        .unwrap();
        let other = ScalarFactor::from_triples(&[(0.4, 1.0, 0.2)]).unwrap();
        let p = CharProduct::new(vec![other.clone(), root]).unwrap();
        assert!(p.evaluate_product(c(0.0, 1.0)).norm() < 1e-28);
        let single = CharProduct::new(vec![other.clone()]).unwrap();
        let lam = c(0.3, 0.9);
        assert_eq!(single.evaluate_product(lam), other.evaluate(lam));
    }

    #[test]
    fn json_shape() {
        let f: ScalarFactor =
            serde_json::from_str(r#"{"terms":[{"a":1.0,"b":2.0,"tau":0.5}],"multiplicity":2}"#).unwrap();
        assert_eq!(f.multiplicity(), 2);
        assert_eq!(f.terms()[0], Term::new(1.0, 2.0, 0.5));
        let back = serde_json::to_string(&f).unwrap();
        assert_eq!(back, r#"{"terms":[{"a":1.0,"b":2.0,"tau":0.5}],"multiplicity":2}"#);
        assert!(serde_json::from_str::<ScalarFactor>(r#"{"terms":[{"a":1,"b":1,"tau":-1}]}"#).is_err());
    }
}
