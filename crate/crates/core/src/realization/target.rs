use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prescribed positive frequencies, partitioned into one group per factor.
///
/// Group `j` holds the frequencies whose `±iω` must be roots of factor `j`.
/// Frequencies are flattened group by group; that flat order is the row
/// order of every matrix in this module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTarget")]
pub struct FrequencyTarget {
    groups: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawTarget {
    groups: Vec<Vec<f64>>,
}

impl TryFrom<RawTarget> for FrequencyTarget {
    type Error = Error;
    fn try_from(raw: RawTarget) -> Result<Self> {
        FrequencyTarget::new(raw.groups)
    }
}

impl FrequencyTarget {
    pub fn new(groups: Vec<Vec<f64>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidInput("at least one frequency group is required".into()));
        }
        for (j, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::InvalidInput(format!("frequency group {} is empty", j + 1)));
            }
            if let Some(w) = g.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                return Err(Error::InvalidInput(format!(
                    "frequencies must be positive and finite, got {w} in group {}",
                    j + 1
                )));
            }
        }
        let flat: Vec<f64> = groups.iter().flatten().copied().collect();
        for (i, a) in flat.iter().enumerate() {
            if flat[i + 1..].contains(a) {
                return Err(Error::InvalidInput(format!(
                    "frequency {a} appears twice; duplicated frequencies are rationally dependent"
                )));
            }
        }
        Ok(Self { groups })
    }

    /// Single group, the scalar (one factor) case.
    pub fn scalar(omegas: &[f64]) -> Result<Self> {
        Self::new(vec![omegas.to_vec()])
    }

    pub fn groups(&self) -> &[Vec<f64>] {
        &self.groups
    }

    /// Number of factors `r`.
    pub fn factor_count(&self) -> usize {
        self.groups.len()
    }

    /// Total number of frequencies `n`.
    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Group sizes ℓ_j.
    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    /// Prefix sums μ_0 = 0, μ_1, …, μ_r = n.
    pub fn offsets(&self) -> Vec<usize> {
        let mut mu = Vec::with_capacity(self.groups.len() + 1);
        mu.push(0);
        for g in &self.groups {
            mu.push(mu.last().unwrap() + g.len());
        }
        mu
    }

    pub fn flat(&self) -> Vec<f64> {
        self.groups.iter().flatten().copied().collect()
    }

    /// Factor index of every flat row.
    pub fn row_factors(&self) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(j, g)| std::iter::repeat_n(j, g.len()))
            .collect()
    }

    pub fn max_frequency(&self) -> f64 {
        self.groups.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Every frequency multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.groups
                .iter()
                .map(|g| g.iter().map(|w| w * c).collect())
                .collect(),
        )
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.sizes() == other.sizes()
    }
}

/// Fixed weights `b[j][k]` of coefficient `a_k` inside factor `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct WeightTable {
    rows: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for WeightTable {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        WeightTable::new(rows)
    }
}

impl From<WeightTable> for Vec<Vec<f64>> {
    fn from(w: WeightTable) -> Self {
        w.rows
    }
}

impl WeightTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || n == 0 {
            return Err(Error::InvalidInput("weight table must be non-empty".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("weight table rows differ in length".into()));
        }
        if rows.iter().flatten().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite".into()));
        }
        Ok(Self { rows })
    }

    /// The `b ≡ 1` table of the scalar case.
    pub fn ones(n: usize) -> Self {
        Self { rows: vec![vec![1.0; n]] }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn factor_count(&self) -> usize {
        self.rows.len()
    }

    pub fn columns(&self) -> usize {
        self.rows[0].len()
    }

    #[inline]
    pub fn get(&self, factor: usize, column: usize) -> f64 {
        self.rows[factor][column]
    }

    /// Fails with the first zero entry, reported 1-based as `(j, k)`.
    pub fn check_nonzero(&self) -> Result<()> {
        for (j, row) in self.rows.iter().enumerate() {
            if let Some(k) = row.iter().position(|&b| b == 0.0) {
                return Err(Error::ZeroWeight { factor: j + 1, column: k + 1 });
            }
        }
        Ok(())
    }

    /// Shape agreement with a target: `r` rows and `n` columns.
    pub fn check_against(&self, target: &FrequencyTarget) -> Result<()> {
        if self.factor_count() != target.factor_count() || self.columns() != target.len() {
            return Err(Error::InvalidInput(format!(
                "weight table is {}x{} but the target has {} groups and {} frequencies",
                self.factor_count(),
                self.columns(),
                target.factor_count(),
                target.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bookkeeping() {
        let t = FrequencyTarget::new(vec![vec![1.0, 2.5], vec![0.7]]).unwrap();
        assert_eq!(t.sizes(), vec![2, 1]);
        assert_eq!(t.offsets(), vec![0, 2, 3]);
        assert_eq!(t.row_factors(), vec![0, 0, 1]);
        assert_eq!(t.len(), 3);
        assert_eq!(t.max_frequency(), 2.5);
    }

    #[test]
    fn rejects_degenerate_targets() {
        assert!(FrequencyTarget::new(vec![]).is_err());
        assert!(FrequencyTarget::new(vec![vec![]]).is_err());
        assert!(FrequencyTarget::new(vec![vec![1.0, -2.0]]).is_err());
        assert!(FrequencyTarget::new(vec![vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn zero_weight_is_named() {
        let w = WeightTable::new(vec![vec![1.0, 2.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(w.check_nonzero(), Err(Error::ZeroWeight { factor: 2, column: 2 }));
        assert!(WeightTable::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
