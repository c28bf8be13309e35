//! Diophantine side of the construction: integer-relation screening and the
//! search for delays whose angle vector `ω τ mod 2π` lands near a base column.

use std::f64::consts::{PI, TAU};

use super::base::BasePoint;
use super::target::FrequencyTarget;
use crate::error::{Error, Result};

/// All integer vectors `c ≠ 0` with `|c_i| ≤ max_coeff` and `|c·ω| < tol·|ω|`.
///
/// Each relation is reported once, with its first nonzero entry positive.
/// An empty list only means no small relation was found; floating-point
/// input can never certify independence.
pub fn independence_diagnostic(omegas: &[f64], max_coeff: u32, tol: f64) -> Result<Vec<Vec<i64>>> {
    if max_coeff == 0 {
        return Err(Error::InvalidInput("max_coeff must be at least 1".into()));
    }
    let n = omegas.len();
    let side = 2 * max_coeff as u64 + 1;
    let cells = (side as f64).powi(n as i32);
    if cells > 1e8 {
        return Err(Error::BudgetExceeded { cells });
    }
    let norm = omegas.iter().map(|w| w * w).sum::<f64>().sqrt();
    let m = max_coeff as i64;
    let mut c = vec![-m; n];
    let mut found = Vec::new();
    loop {
        if let Some(lead) = c.iter().find(|&&x| x != 0) {
            if *lead > 0 {
                let dot: f64 = c.iter().zip(omegas).map(|(&ci, w)| ci as f64 * w).sum();
                if dot.abs() < tol * norm {
                    found.push(c.clone());
                }
            }
        }
        // odometer increment
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(found);
            }
            i -= 1;
            if c[i] < m {
                c[i] += 1;
                break;
            }
            c[i] = -m;
        }
    }
}

/// Distance on the circle between two angles.
#[inline]
pub fn angle_distance(x: f64, y: f64) -> f64 {
    ((x - y + PI).rem_euclid(TAU) - PI).abs()
}

/// Sup-norm distance from `ω τ mod 2π` to the target angles.
#[inline]
pub fn torus_distance(omegas: &[f64], angles: &[f64], tau: f64) -> f64 {
    omegas
        .iter()
        .zip(angles)
        .map(|(w, th)| angle_distance(w * tau, *th))
        .fold(0.0, f64::max)
}

/// One hit of the line `τ ↦ ω τ` inside the ε-box around a torus point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayHit {
    pub tau: f64,
    pub distance: f64,
}

/// Smallest `τ > after` (up to the sweep resolution) with
/// `torus_distance(ω, θ, τ) < ε`, refined to the local minimiser.
pub fn search_column(
    omegas: &[f64],
    angles: &[f64],
    epsilon: f64,
    budget: u64,
    after: f64,
    column: usize,
) -> Result<DelayHit> {
    if omegas.len() == 1 {
        // exact: τ = θ/ω modulo the period
        let period = TAU / omegas[0];
        let mut tau = angles[0].rem_euclid(TAU) / omegas[0];
        if tau <= 0.0 {
            tau += period;
        }
        while tau <= after {
            tau += period;
        }
        return Ok(DelayHit { tau, distance: torus_distance(omegas, angles, tau) });
    }
    let w_max = omegas.iter().copied().fold(0.0, f64::max);
    let step = TAU / (64.0 * w_max);
    let mut best = f64::INFINITY;
    for m in 1..=budget {
        let tau = after + step * m as f64;
        let d = torus_distance(omegas, angles, tau);
        best = best.min(d);
        if d < epsilon {
            let refined = refine(omegas, angles, (tau - step).max(after), tau + step);
            let refined_d = torus_distance(omegas, angles, refined);
            let (tau, distance) = if refined_d <= d && refined > after {
                (refined, refined_d)
            } else {
                (tau, d)
            };
            return Ok(DelayHit { tau, distance });
        }
    }
    Err(Error::SearchExhausted { column: column + 1, best_distance: best })
}

// The sup of |ω_i τ − c_i| is convex away from the wrap at π, so a golden
// section search inside one sweep step finds the local minimiser.
fn refine(omegas: &[f64], angles: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| torus_distance(omegas, angles, t);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// For each delay column `k`, the first `τ_k > 0` whose angle vector is
/// within `ε` (sup norm, radians) of the base angles in column `k`.
pub fn delay_candidates(
    target: &FrequencyTarget,
    base: &BasePoint,
    epsilon: f64,
    budget: u64,
) -> Result<Vec<f64>> {
    Ok(delay_hits(target, base, epsilon, budget, None)?
        .into_iter()
        .map(|h| h.tau)
        .collect())
}

/// Like [`delay_candidates`], continuing past earlier hits when `after` is given.
pub fn delay_hits(
    target: &FrequencyTarget,
    base: &BasePoint,
    epsilon: f64,
    budget: u64,
    after: Option<&[f64]>,
) -> Result<Vec<DelayHit>> {
    if !(epsilon > 0.0 && epsilon < 0.5 * PI) {
        return Err(Error::InvalidInput(format!("epsilon must lie in (0, π/2), got {epsilon}")));
    }
    let omegas = target.flat();
    let n = omegas.len();
    if base.target_angles.len() != n {
        return Err(Error::InvalidInput("base point does not match the target".into()));
    }
    (0..n)
        .map(|k| {
            let start = after.map_or(0.0, |a| a[k]);
            search_column(&omegas, &base.angle_column(k), epsilon, budget, start, k)
        })
        .collect()
}
