//! Realizing prescribed imaginary eigenvalues.
//!
//! Given rationally independent frequencies split across `r` factors and a
//! table of fixed weights, find delays `τ_k > 0` and coefficients `a_k` so
//! that factor `j`, `λ − Σ_k a_k b[j][k] e^{−λτ_k}`, vanishes at `±iω` for
//! every frequency in group `j`. The scalar case is `r = 1` with unit weights.
//!
//! The pipeline is [`base_point`] (exact solution on the torus of angles),
//! [`delay_candidates`] (delays whose angle vectors approximate the base
//! columns) and [`newton_refine`] (Newton on the finite system).

mod base;
mod newton;
mod search;
mod target;

pub use base::{
    base_point, cal_i, cal_i_b, det_cal_i_b_lemma, index_vectors, reduced_b,
    transversality_at_base, BasePoint, IbMatrix,
};
pub use newton::{
    continue_realization, continue_with_bisection, newton_refine, system_jacobian,
    system_residual,
};
pub use search::{
    angle_distance, delay_candidates, delay_hits, independence_diagnostic, search_column,
    torus_distance, DelayHit,
};
pub use target::{FrequencyTarget, WeightTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quasipoly::{ScalarFactor, Term};

/// Solver knobs. Defaults: tol 1e−10, ε schedule (0.4, 0.3, 0.2, 0.1),
/// 10⁷ sweep steps per delay, 50 Newton iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tol: f64,
    pub epsilon_schedule: Vec<f64>,
    pub budget: u64,
    pub max_iter: usize,
    /// Successive delay hits tried per ε before moving on.
    pub attempts_per_epsilon: usize,
    /// Coefficient bound of the warn-only integer relation screen.
    pub relation_max_coeff: u32,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            epsilon_schedule: vec![0.4, 0.3, 0.2, 0.1],
            budget: 10_000_000,
            max_iter: 50,
            attempts_per_epsilon: 3,
            relation_max_coeff: 6,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        if self.epsilon_schedule.is_empty()
            || self
                .epsilon_schedule
                .iter()
                .any(|&e| !(e > 0.0 && e < 0.5 * std::f64::consts::PI))
        {
            return Err(Error::InvalidInput("epsilon_schedule entries must lie in (0, π/2)".into()));
        }
        if self.budget == 0 || self.max_iter == 0 || self.attempts_per_epsilon == 0 {
            return Err(Error::InvalidInput("budget, max_iter and attempts must be positive".into()));
        }
        Ok(())
    }
}

/// Realized delays and coefficients with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationResult {
    pub target: FrequencyTarget,
    pub taus: Vec<f64>,
    pub coeffs: Vec<f64>,
    /// max over factors and targets of |Δ_j(iω)|.
    pub residual: f64,
    pub newton_iterations: usize,
    /// Angle error (radians) of each delay's starting point.
    pub search_window: Vec<f64>,
    /// ε of the schedule entry that produced the result.
    pub epsilon: Option<f64>,
    pub base: Option<BasePoint>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl RealizationResult {
    /// Factor `j` evaluated with the realized delays and coefficients.
    pub fn factor(&self, weights: &WeightTable, j: usize) -> ScalarFactor {
        let terms = self
            .coeffs
            .iter()
            .zip(&self.taus)
            .enumerate()
            .map(|(k, (&a, &tau))| Term::new(a, weights.get(j, k), tau))
            .collect();
        ScalarFactor::new(terms).expect("realized delays are positive")
    }

    /// Residual recomputed factor by factor from the quasipolynomials.
    pub fn factor_residual(&self, target: &FrequencyTarget, weights: &WeightTable) -> f64 {
        target
            .groups()
            .iter()
            .enumerate()
            .map(|(j, g)| self.factor(weights, j).residual_on_targets(g))
            .fold(0.0, f64::max)
    }

    /// `(τ/c, c·a)`, which realizes `c·ω` with residual scaled by `c`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        Ok(Self {
            target: self.target.scaled(c)?,
            taus: self.taus.iter().map(|t| t / c).collect(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            residual: self.residual * c,
            ..self.clone()
        })
    }
}

/// Runs the whole construction: base point, delay search over the ε
/// schedule, Newton refinement, then independent re-verification of every
/// factor. The first schedule entry that converges wins; larger ε come
/// first so that the delays found are the smallest the sweep reaches.
pub fn realize(
    target: &FrequencyTarget,
    weights: &WeightTable,
    config: &SolverConfig,
) -> Result<RealizationResult> {
    config.validate()?;
    weights.check_against(target)?;
    weights.check_nonzero()?;

    let mut warnings = Vec::new();
    match independence_diagnostic(&target.flat(), config.relation_max_coeff, 1e-9) {
        Ok(rel) if !rel.is_empty() => warnings.push(format!(
            "frequencies satisfy small integer relations {rel:?}; the construction assumes independence"
        )),
        _ => {}
    }

    // Work with max ω = 1 and undo the scaling at the end.
    let scale = target.max_frequency();
    let unit = target.scaled(1.0 / scale)?;
    let base_unit = base_point(&unit, weights)?;
    let base = base_point(target, weights)?;

    let mut last_err = Error::NoConvergence { residual: f64::INFINITY };
    for &eps in &config.epsilon_schedule {
        let mut after: Option<Vec<f64>> = None;
        for _ in 0..config.attempts_per_epsilon {
            let hits = match delay_hits(&unit, &base_unit, eps, config.budget, after.as_deref()) {
                Ok(h) => h,
                Err(e) => {
                    last_err = e;
                    break;
                }
            };
            let taus0: Vec<f64> = hits.iter().map(|h| h.tau).collect();
            match newton_refine(
                &taus0,
                &base_unit.amplitudes,
                &unit,
                weights,
                config.tol / scale,
                config.max_iter,
            ) {
                Ok(unit_result) => {
                    let mut result = unit_result.rescaled(scale)?;
                    result.target = target.clone();
                    result.residual = result.factor_residual(target, weights);
                    if result.residual < config.tol {
                        result.search_window = hits.iter().map(|h| h.distance).collect();
                        result.epsilon = Some(eps);
                        result.base = Some(base);
                        result.warnings = warnings;
                        return Ok(result);
                    }
                    last_err = Error::NoConvergence { residual: result.residual };
                }
                Err(e) => last_err = e,
            }
            after = Some(taus0);
        }
    }
    Err(last_err)
}
