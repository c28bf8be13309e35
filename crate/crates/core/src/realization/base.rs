//! The exact base point of the realization system.
//!
//! At angles `ω_ℓ τ_k ≡ 3π/2` (sign `+`) or `π/2` (sign `−`) every entry
//! `b e^{−iωτ}` of the system matrix becomes `±i b`, so the system matrix
//! equals `i·I_B` and the amplitudes solving it are `I_B⁻¹ ω`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::target::{FrequencyTarget, WeightTable};
use crate::error::{Error, Result};

/// Sign vectors v_1 … v_m: v_j is +1 in the first m−j+1 entries and −1 after.
pub fn index_vectors(m: usize) -> Vec<Vec<i8>> {
    (1..=m)
        .map(|j| (1..=m).map(|i| if i + j > m + 1 { -1 } else { 1 }).collect())
        .collect()
}

/// The matrix whose j-th column is v_j.
pub fn cal_i(m: usize) -> DMatrix<f64> {
    let v = index_vectors(m);
    DMatrix::from_fn(m, m, |i, j| f64::from(v[j][i]))
}

/// `I_B` together with its sign pattern and the base angles.
#[derive(Debug, Clone, PartialEq)]
pub struct IbMatrix {
    pub matrix: DMatrix<f64>,
    pub signs: DMatrix<f64>,
    /// Row = frequency, column = delay; 3π/2 where the sign is +, π/2 where −.
    pub target_angles: DMatrix<f64>,
}

/// Stacks the blocks A_j: row `ℓ` of block `j` carries `b[j][k]` in every
/// column, negated inside the block's own column range where the local
/// sign vector v_κ has a −1.
pub fn cal_i_b(weights: &WeightTable, target: &FrequencyTarget) -> Result<IbMatrix> {
    weights.check_against(target)?;
    weights.check_nonzero()?;
    let n = target.len();
    let mu = target.offsets();
    let mut signs = DMatrix::from_element(n, n, 1.0);
    for (j, &l) in target.sizes().iter().enumerate() {
        for local_row in 1..=l {
            for kappa in 1..=l {
                if local_row + kappa > l + 1 {
                    signs[(mu[j] + local_row - 1, mu[j] + kappa - 1)] = -1.0;
                }
            }
        }
    }
    let factors = target.row_factors();
    let matrix = DMatrix::from_fn(n, n, |i, k| signs[(i, k)] * weights.get(factors[i], k));
    let target_angles = signs.map(|s| if s > 0.0 { 1.5 * PI } else { 0.5 * PI });
    Ok(IbMatrix { matrix, signs, target_angles })
}

/// The reduced r×r matrix with entries `b[j][μ_q]` (first column of each block).
pub fn reduced_b(weights: &WeightTable, target: &FrequencyTarget) -> DMatrix<f64> {
    let mu = target.offsets();
    let r = target.factor_count();
    DMatrix::from_fn(r, r, |j, q| weights.get(j, mu[q]))
}

/// `det I_B` through the block-elimination formula
/// `det B · Π_j (−1)^{m(m−1)/2} (−2)^m Π_{s=2}^{ℓ_j} b[j][μ_{j−1}+s−1]`, `m = ℓ_j − 1`.
///
/// Subtracting the first row of each block leaves, per block, an
/// anti-triangular `(ℓ_j−1)`-square block of `−2b` entries; the rows and
/// columns that are moved to expose `B` follow the same permutation, so the
/// only sign left is the column reversal of each anti-triangular block.
pub fn det_cal_i_b_lemma(weights: &WeightTable, target: &FrequencyTarget) -> Result<f64> {
    weights.check_against(target)?;
    weights.check_nonzero()?;
    let mu = target.offsets();
    let mut prefactor = 1.0;
    for (j, &l) in target.sizes().iter().enumerate() {
        let m = (l - 1) as i32;
        let reversal = if (m * (m - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let weights_product: f64 = (2..=l).map(|s| weights.get(j, mu[j] + s - 1)).product();
        prefactor *= reversal * (-2.0f64).powi(m) * weights_product;
    }
    Ok(prefactor * reduced_b(weights, target).determinant())
}

/// Base point of the realization: `I_B`, amplitudes `Â`, signs and angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    #[serde(rename = "calIB")]
    pub cal_ib: Vec<Vec<f64>>,
    pub amplitudes: Vec<f64>,
    pub sign_matrix: Vec<Vec<i8>>,
    pub target_angles: Vec<Vec<f64>>,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Hadamard bound on |det|, used to make singularity tests scale-free.
pub(crate) fn hadamard_bound(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows()).map(|i| m.row(i).norm()).product()
}

impl BasePoint {
    pub fn cal_ib_matrix(&self) -> DMatrix<f64> {
        let n = self.cal_ib.len();
        DMatrix::from_fn(n, n, |i, k| self.cal_ib[i][k])
    }

    pub fn angle_column(&self, k: usize) -> Vec<f64> {
        self.target_angles.iter().map(|row| row[k]).collect()
    }
}

pub fn base_point(target: &FrequencyTarget, weights: &WeightTable) -> Result<BasePoint> {
    let ib = cal_i_b(weights, target)?;
    let det = ib.matrix.determinant();
    if !(det.abs() > 1e-12 * hadamard_bound(&ib.matrix)) {
        return Err(Error::SingularIB { det });
    }
    let omega = DVector::from_vec(target.flat());
    let amplitudes = ib
        .matrix
        .clone()
        .lu()
        .solve(&omega)
        .ok_or(Error::SingularIB { det })?;
    let scale = omega.norm();
    if let Some((k, &v)) = amplitudes
        .iter()
        .enumerate()
        .find(|(_, v)| v.abs() < 1e-12 * scale)
    {
        return Err(Error::ZeroAmplitude { index: k + 1, value: v });
    }
    Ok(BasePoint {
        cal_ib: rows_of(&ib.matrix),
        amplitudes: amplitudes.iter().copied().collect(),
        sign_matrix: (0..ib.signs.nrows())
            .map(|i| ib.signs.row(i).iter().map(|&s| s as i8).collect())
            .collect(),
        target_angles: rows_of(&ib.target_angles),
    })
}

/// Transversality determinant at the base point, in closed form:
///
/// `(−1)^{n−1} Πω · Π_{k<n} â_k · det I_B / (â_n^{n−1} Π_i [I_B]_{i,n})`.
///
/// For a single factor with unit weights the last column of `I_B` is `v_n`
/// and this is `(ω_1⋯ω_n)(â_1⋯â_{n−1}) det I / â_n^{n−1}`. For `n = 1` there
/// is no angle block and the value is `ω_1`.
pub fn transversality_at_base(target: &FrequencyTarget, weights: &WeightTable) -> Result<f64> {
    let base = base_point(target, weights)?;
    let n = target.len();
    let omega = target.flat();
    if n == 1 {
        return Ok(omega[0]);
    }
    let ib = base.cal_ib_matrix();
    let a = &base.amplitudes;
    let last = a[n - 1];
    let omega_prod: f64 = omega.iter().product();
    let amp_prod: f64 = a[..n - 1].iter().product();
    let last_column_prod: f64 = (0..n).map(|i| ib[(i, n - 1)]).product();
    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * omega_prod * amp_prod * ib.determinant()
        / (last.powi(n as i32 - 1) * last_column_prod))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_vectors_small() {
        assert_eq!(index_vectors(1), vec![vec![1]]);
        assert_eq!(index_vectors(2), vec![vec![1, 1], vec![1, -1]]);
        assert_eq!(
            index_vectors(3),
            vec![vec![1, 1, 1], vec![1, 1, -1], vec![1, -1, -1]]
        );
    }

    #[test]
    fn cal_i_two() {
        let m = cal_i(2);
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]));
        assert!((m.determinant() + 2.0).abs() < 1e-15);
        assert_eq!(cal_i(1), DMatrix::from_element(1, 1, 1.0));
    }

    #[test]
    fn scalar_case_reduces_to_cal_i() {
        for n in 1..=6 {
            let t = FrequencyTarget::scalar(&(1..=n).map(|k| (k as f64).sqrt() + 0.1).collect::<Vec<_>>())
                .unwrap();
            let ib = cal_i_b(&WeightTable::ones(n), &t).unwrap();
            assert_eq!(ib.matrix, cal_i(n));
        }
    }

    #[test]
    fn d3_table() {
        let t = FrequencyTarget::new(vec![vec![1.0], vec![2f64.sqrt()]]).unwrap();
        let w = WeightTable::new(vec![vec![1.0, 2.0], vec![1.0, -1.0]]).unwrap();
        let ib = cal_i_b(&w, &t).unwrap();
        assert_eq!(ib.matrix, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, -1.0]));
        assert!((ib.matrix.determinant() + 3.0).abs() < 1e-14);
        assert!((det_cal_i_b_lemma(&w, &t).unwrap() + 3.0).abs() < 1e-14);
        let base = base_point(&t, &w).unwrap();
        let s2 = 2f64.sqrt();
        assert!((base.amplitudes[0] - (1.0 + 2.0 * s2) / 3.0).abs() < 1e-14);
        assert!((base.amplitudes[1] - (1.0 - s2) / 3.0).abs() < 1e-14);
    }

    #[test]
    fn partition_two_one_sign_pattern() {
        let t = FrequencyTarget::new(vec![vec![1.0, 1.3], vec![1.7]]).unwrap();
        let w = WeightTable::new(vec![vec![0.5, -1.2, 2.0], vec![1.5, 0.3, -0.8]]).unwrap();
        let ib = cal_i_b(&w, &t).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let expected = if (i, k) == (1, 1) { -1.0 } else { 1.0 };
                assert_eq!(ib.signs[(i, k)], expected, "sign at ({i},{k})");
            }
        }
    }

    #[test]
    fn closed_form_n1_and_n2() {
        let t = FrequencyTarget::scalar(&[1.0]).unwrap();
        let base = base_point(&t, &WeightTable::ones(1)).unwrap();
        assert_eq!(base.amplitudes, vec![1.0]);
        assert_eq!(base.target_angles, vec![vec![1.5 * PI]]);

        let s2 = 2f64.sqrt();
        let t = FrequencyTarget::scalar(&[1.0, s2]).unwrap();
        let base = base_point(&t, &WeightTable::ones(2)).unwrap();
        assert!((base.amplitudes[0] - (1.0 + s2) / 2.0).abs() < 1e-15);
        assert!((base.amplitudes[1] - (1.0 - s2) / 2.0).abs() < 1e-15);
        let tr = transversality_at_base(&t, &WeightTable::ones(2)).unwrap();
        assert!((tr - (8.0 + 6.0 * s2)).abs() < 1e-12);
        assert_eq!(transversality_at_base(&FrequencyTarget::scalar(&[2.5]).unwrap(), &WeightTable::ones(1)).unwrap(), 2.5);
    }

    #[test]
    fn singular_and_dependent_inputs() {
        let t = FrequencyTarget::new(vec![vec![1.0], vec![3f64.sqrt()]]).unwrap();
        let w = WeightTable::new(vec![vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(base_point(&t, &w), Err(Error::SingularIB { .. })));
        // ω = (1, 2) against [[1,1],[2,1]]: â_2 = 2ω_1 − ω_2 = 0
        let t = FrequencyTarget::new(vec![vec![1.0], vec![2.0]]).unwrap();
        let w = WeightTable::new(vec![vec![1.0, 1.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(base_point(&t, &w), Err(Error::ZeroAmplitude { index: 2, .. })));
    }
}
