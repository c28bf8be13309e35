use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{max_coupling_index, RingSpec};
use crate::error::{Error, Result};
use crate::quasipoly::{CharProduct, ScalarFactor, Term};

/// `cos(2π p/n)`, exact at the zeros and at ±1.
pub fn cos_two_pi_ratio(p: i64, n: usize) -> f64 {
    let n = n as i64;
    let r = p.rem_euclid(n);
    let r = r.min(n - r);
    if r == 0 {
        1.0
    } else if 2 * r == n {
        -1.0
    } else if 4 * r == n {
        0.0
    } else {
        (TAU * r as f64 / n as f64).cos()
    }
}

/// Weights `c_k(j)` for `k = 2, …, ⌊n/2⌋ + 1`: `2cos(2π(k−1)j/n)` for a
/// pair of neighbours, `(−1)^j` for the opposite cell when `n` is even.
pub fn factor_weights(n: usize, j: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("a ring needs at least 3 cells, got {n}")));
    }
    if j >= n {
        return Err(Error::BadIndex(format!("factor index {j} outside 0..{n}")));
    }
    Ok((2..=max_coupling_index(n))
        .map(|k| {
            let d = k - 1;
            if 2 * d == n {
                if j % 2 == 0 { 1.0 } else { -1.0 }
            } else {
                2.0 * cos_two_pi_ratio((d * j) as i64, n)
            }
        })
        .collect())
}

/// Multiplicity of `Δ_j` in the factored determinant.
pub fn factor_multiplicity(n: usize, j: usize) -> u32 {
    if j == 0 || 2 * j == n {
        1
    } else {
        2
    }
}

/// `Δ_j` for `j = 0, …, ⌊n/2⌋` with multiplicities `1, 2, …, 2` (and `1`
/// for `j = n/2`). Each factor keeps every term of the ring, including
/// those whose weight vanishes, so all factors have the same length.
pub fn characteristic_factorization(ring: &RingSpec) -> CharProduct {
    let n = ring.n();
    let factors = (0..=n / 2)
        .map(|j| {
            let c = factor_weights(n, j).expect("valid ring");
            let mut terms: Vec<Term> = ring.internal().iter().map(|t| Term::new(t.a, 1.0, t.tau)).collect();
            for (&k, atoms) in ring.couplings() {
                terms.extend(atoms.iter().map(|a| Term::new(a.alpha, c[k - 2], a.s)));
            }
            ScalarFactor::with_multiplicity(terms, factor_multiplicity(n, j)).expect("valid ring")
        })
        .collect();
    CharProduct::new(factors).expect("at least one factor")
}

/// The full `n × n` characteristic matrix `λI − η̂(λ)`, assembled entry by
/// entry from cyclic distances.
pub fn dense_matrix(ring: &RingSpec, lambda: Complex64) -> DMatrix<Complex64> {
    let n = ring.n();
    let p: Complex64 = ring
        .internal()
        .iter()
        .map(|t| t.a * (-lambda * t.tau).exp())
        .sum();
    let g: Vec<Complex64> = (0..n)
        .map(|d| match ring.coupling_for_distance(d) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => ring.coupling(k).iter().map(|a| a.alpha * (-lambda * a.s).exp()).sum(),
        })
        .collect();
    DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            lambda - p
        } else {
            -g[(c + n - r) % n]
        }
    })
}

/// Every `(k, j)`, `k = 2, …, n/2 + 1` and `j = 0, …, n − 1`, whose weight
/// `c_k(j)` vanishes. Odd `n` has none and is rejected.
pub fn detect_even_degeneracy(n: usize) -> Result<Vec<(usize, usize)>> {
    if n % 2 == 1 {
        return Err(Error::BadParity(n));
    }
    if n < 4 {
        return Err(Error::InvalidInput(format!("a ring needs at least 3 cells, got {n}")));
    }
    let mut pairs = Vec::new();
    for k in 2..=max_coupling_index(n) {
        for j in 0..n {
            if factor_weights(n, j)?[k - 2] == 0.0 {
                pairs.push((k, j));
            }
        }
    }
    Ok(pairs)
}
