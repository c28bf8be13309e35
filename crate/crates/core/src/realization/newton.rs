//! Damped Newton on the realization system and continuation in ω.
//!
//! Row `(j, ℓ)` of the system is `Σ_k a_k b[j][k] e^{−iω τ_k} − iω`, with
//! `ω = ω_ℓ^j`. Each complex row is split into its real and imaginary parts,
//! giving a square `2n` real system in the unknowns `(τ, a)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::target::{FrequencyTarget, WeightTable};
use super::RealizationResult;
use crate::error::{Error, Result};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1.0 / 1048576.0;

/// Complex residual rows of the realization system.
pub fn system_residual(
    taus: &[f64],
    coeffs: &[f64],
    target: &FrequencyTarget,
    weights: &WeightTable,
) -> Vec<Complex64> {
    let rows = target.row_factors();
    target
        .flat()
        .iter()
        .zip(&rows)
        .map(|(&w, &j)| {
            let s: Complex64 = taus
                .iter()
                .zip(coeffs)
                .enumerate()
                .map(|(k, (&tau, &a))| a * weights.get(j, k) * Complex64::new(0.0, -w * tau).exp())
                .sum();
            s - Complex64::new(0.0, w)
        })
        .collect()
}

/// Real `2n × 2n` Jacobian of the split system; columns are `(τ, a)`.
pub fn system_jacobian(
    taus: &[f64],
    coeffs: &[f64],
    target: &FrequencyTarget,
    weights: &WeightTable,
) -> DMatrix<f64> {
    let n = taus.len();
    let rows = target.row_factors();
    let omegas = target.flat();
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for (i, (&w, &j)) in omegas.iter().zip(&rows).enumerate() {
        for k in 0..n {
            let e = weights.get(j, k) * Complex64::new(0.0, -w * taus[k]).exp();
            let d_tau = Complex64::new(0.0, -w) * coeffs[k] * e;
            jac[(i, k)] = d_tau.re;
            jac[(n + i, k)] = d_tau.im;
            jac[(i, n + k)] = e.re;
            jac[(n + i, n + k)] = e.im;
        }
    }
    jac
}

fn split(rows: &[Complex64]) -> DVector<f64> {
    let n = rows.len();
    DVector::from_fn(2 * n, |i, _| if i < n { rows[i].re } else { rows[i - n].im })
}

fn sup_norm(rows: &[Complex64]) -> f64 {
    rows.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn merit(rows: &[Complex64]) -> f64 {
    rows.iter().map(|z| z.norm_sqr()).sum()
}

fn solve(jac: DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let lu = jac.lu();
    let u = lu.u();
    let diag: Vec<f64> = u.diagonal().iter().map(|d| d.abs()).collect();
    let max = diag.iter().copied().fold(0.0, f64::max);
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 1e-13 * max) {
        return Err(Error::SingularJacobian);
    }
    lu.solve(rhs).ok_or(Error::SingularJacobian)
}

/// Damped Newton from `(taus0, coeffs0)` until the largest row modulus is
/// below `tol`. Steps are halved until the squared residual shows Armijo
/// decrease.
pub fn newton_refine(
    taus0: &[f64],
    coeffs0: &[f64],
    target: &FrequencyTarget,
    weights: &WeightTable,
    tol: f64,
    max_iter: usize,
) -> Result<RealizationResult> {
    let n = target.len();
    if taus0.len() != n || coeffs0.len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} delays and {n} coefficients, got {} and {}",
            taus0.len(),
            coeffs0.len()
        )));
    }
    weights.check_against(target)?;
    let mut taus = taus0.to_vec();
    let mut coeffs = coeffs0.to_vec();
    let mut rows = system_residual(&taus, &coeffs, target, weights);
    let mut iterations = 0;
    while sup_norm(&rows) >= tol {
        if iterations == max_iter {
            return Err(Error::NoConvergence { residual: sup_norm(&rows) });
        }
        let jac = system_jacobian(&taus, &coeffs, target, weights);
        let step = solve(jac, &(-split(&rows)))?;
        let current = merit(&rows);
        let mut t = 1.0;
        loop {
            let trial_taus: Vec<f64> = (0..n).map(|k| taus[k] + t * step[k]).collect();
            let trial_coeffs: Vec<f64> = (0..n).map(|k| coeffs[k] + t * step[n + k]).collect();
            let trial = system_residual(&trial_taus, &trial_coeffs, target, weights);
            if merit(&trial) <= (1.0 - ARMIJO * t) * current {
                taus = trial_taus;
                coeffs = trial_coeffs;
                rows = trial;
                break;
            }
            t *= 0.5;
            if t < MIN_STEP {
                return Err(Error::NoConvergence { residual: sup_norm(&rows) });
            }
        }
        iterations += 1;
        if let Some((k, &v)) = taus.iter().enumerate().find(|(_, t)| **t <= 0.0) {
            return Err(Error::LeftDomain { index: k + 1, value: v });
        }
    }
    if let Some(k) = coeffs.iter().position(|&a| a == 0.0) {
        return Err(Error::ZeroAmplitude { index: k + 1, value: 0.0 });
    }
    Ok(RealizationResult {
        target: target.clone(),
        taus,
        coeffs,
        residual: sup_norm(&rows),
        newton_iterations: iterations,
        search_window: Vec::new(),
        epsilon: None,
        base: None,
        warnings: Vec::new(),
    })
}

/// Moves a converged realization to `new_target` by an Euler predictor
/// followed by Newton correction. The corrector is capped at `max_iter`
/// iterations; a corrected point that drifts more than a quarter turn in any
/// angle from the predictor counts as a branch jump and is rejected.
pub fn continue_realization(
    result: &RealizationResult,
    new_target: &FrequencyTarget,
    weights: &WeightTable,
    tol: f64,
    max_iter: usize,
) -> Result<RealizationResult> {
    let old = &result.target;
    if !old.same_shape(new_target) {
        return Err(Error::InvalidInput("continuation target must keep the group sizes".into()));
    }
    weights.check_against(new_target)?;
    let n = old.len();
    let d_omega: Vec<f64> = new_target.flat().iter().zip(old.flat()).map(|(a, b)| a - b).collect();

    let (pred_taus, pred_coeffs) = if d_omega.iter().all(|&d| d == 0.0) {
        (result.taus.clone(), result.coeffs.clone())
    } else {
        // ∂F/∂ω is diagonal in the rows
        let rows = old.row_factors();
        let omegas = old.flat();
        let d_rows: Vec<Complex64> = (0..n)
            .map(|i| {
                let w = omegas[i];
                let j = rows[i];
                let s: Complex64 = (0..n)
                    .map(|k| {
                        let tau = result.taus[k];
                        result.coeffs[k] * weights.get(j, k) * Complex64::new(0.0, -tau)
                            * Complex64::new(0.0, -w * tau).exp()
                    })
                    .sum();
                (s - Complex64::new(0.0, 1.0)) * d_omega[i]
            })
            .collect();
        let jac = system_jacobian(&result.taus, &result.coeffs, old, weights);
        let step = solve(jac, &(-split(&d_rows)))?;
        (
            (0..n).map(|k| result.taus[k] + step[k]).collect(),
            (0..n).map(|k| result.coeffs[k] + step[n + k]).collect(),
        )
    };
    if let Some((k, &v)) = pred_taus.iter().enumerate().find(|(_, t)| **t <= 0.0) {
        return Err(Error::LeftDomain { index: k + 1, value: v });
    }
    let mut next = newton_refine(&pred_taus, &pred_coeffs, new_target, weights, tol, max_iter)?;
    let w_max = new_target.max_frequency();
    let drift = next
        .taus
        .iter()
        .zip(&pred_taus)
        .map(|(a, b)| (a - b).abs() * w_max)
        .fold(0.0, f64::max);
    if drift > 0.5 * std::f64::consts::PI {
        return Err(Error::NoConvergence { residual: next.residual });
    }
    next.base = None;
    next.warnings = result.warnings.clone();
    Ok(next)
}

/// Continuation with step bisection: a failed step toward `new_target` is
/// split in half, recursively, down to `max_depth` halvings. Returns the
/// final result and the number of sub-steps taken.
pub fn continue_with_bisection(
    result: &RealizationResult,
    new_target: &FrequencyTarget,
    weights: &WeightTable,
    tol: f64,
    max_iter: usize,
    max_depth: u32,
) -> Result<(RealizationResult, usize)> {
    match continue_realization(result, new_target, weights, tol, max_iter) {
        Ok(r) => Ok((r, 1)),
        Err(e) if max_depth == 0 => Err(e),
        Err(Error::InvalidInput(m)) => Err(Error::InvalidInput(m)),
        Err(_) => {
            let mid_groups = result
                .target
                .groups()
                .iter()
                .zip(new_target.groups())
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect())
                .collect();
            let mid = FrequencyTarget::new(mid_groups)?;
            let (half, s1) = continue_with_bisection(result, &mid, weights, tol, max_iter, max_depth - 1)?;
            let (full, s2) = continue_with_bisection(&half, new_target, weights, tol, max_iter, max_depth - 1)?;
            Ok((full, s1 + s2))
        }
    }
}
