use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::factor::cos_two_pi_ratio;
use crate::error::{Error, Result};

/// Scale of the coupling columns of `𝓑`. Singularity does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BConvention {
    /// `4cos(·)`, the printed form of the matrix.
    #[default]
    Paper,
    /// `2cos(·)`, the weights that actually appear in the factors.
    Consistent,
}

impl BConvention {
    pub fn scale(self) -> f64 {
        match self {
            BConvention::Paper => 4.0,
            BConvention::Consistent => 2.0,
        }
    }

    pub fn from_scale(c: u32) -> Result<Self> {
        match c {
            4 => Ok(BConvention::Paper),
            2 => Ok(BConvention::Consistent),
            _ => Err(Error::InvalidInput(format!("convention must be 2 or 4, got {c}"))),
        }
    }
}

fn check_indices(n: usize, indices: &[usize]) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::BadParity(n));
    }
    if n < 3 {
        return Err(Error::InvalidInput(format!("a ring needs at least 3 cells, got {n}")));
    }
    if indices.is_empty() {
        return Err(Error::BadIndex("no factor indices given".into()));
    }
    let top = (n - 1) / 2;
    if let Some(i) = indices.iter().find(|&&i| i > top) {
        return Err(Error::BadIndex(format!("factor index {i} outside 0..={top}")));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadIndex(format!("factor indices {indices:?} are not strictly increasing")));
    }
    Ok(())
}

/// `𝓑` for odd `n` and factor indices `i_1 < … < i_s`.
///
/// Row `p` belongs to `Δ_{i_p}`, column `q` to the leading delay of that
/// block: weight 1 for an internal delay (`i_q = 0`), otherwise
/// `c·cos(2π i_p i_q/n)` for coupling `k = i_q + 1`.
pub fn build_b(n: usize, indices: &[usize], convention: BConvention) -> Result<DMatrix<f64>> {
    check_indices(n, indices)?;
    let s = indices.len();
    let c = convention.scale();
    Ok(DMatrix::from_fn(s, s, |p, q| {
        if indices[q] == 0 {
            1.0
        } else {
            c * cos_two_pi_ratio((indices[p] * indices[q]) as i64, n)
        }
    }))
}

/// Closed form of `det 𝓑` for two nonzero indices, `c = 4`:
/// `8[cos(2π(i₁²+i₂²)/n) + cos(2π(i₁²−i₂²)/n) − cos(4π i₁i₂/n) − 1]`.
pub fn det_b_two_factor(n: usize, i1: usize, i2: usize) -> Result<f64> {
    check_indices(n, &[i1, i2])?;
    if i1 == 0 {
        return Err(Error::BadIndex("the closed form needs 1 ≤ i1 < i2".into()));
    }
    let (a, b) = (i1 as i64, i2 as i64);
    Ok(8.0
        * (cos_two_pi_ratio(a * a + b * b, n) + cos_two_pi_ratio(a * a - b * b, n)
            - cos_two_pi_ratio(2 * a * b, n)
            - 1.0))
}
