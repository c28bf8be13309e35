use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bmat::{build_b, BConvention};
use super::factor::factor_weights;
use super::{CouplingAtom, InternalTerm, RingSpec};
use crate::error::{Error, Result};
use crate::realization::{realize, reduced_b, FrequencyTarget, RealizationResult, SolverConfig, WeightTable};

/// Which profile a realized delay belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DelayKind {
    Internal,
    Coupling(usize),
}

impl DelayKind {
    /// Kind of the leading delay of the block for factor `Δ_i`.
    fn leading(i: usize) -> Self {
        if i == 0 {
            DelayKind::Internal
        } else {
            DelayKind::Coupling(i + 1)
        }
    }
}

/// Number of point delays per profile; the total must equal the number of
/// frequencies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DelayLayout {
    pub internal: usize,
    pub couplings: BTreeMap<usize, usize>,
}

impl DelayLayout {
    pub fn total(&self) -> usize {
        self.internal + self.couplings.values().sum::<usize>()
    }

    fn count_mut(&mut self, kind: DelayKind) -> &mut usize {
        match kind {
            DelayKind::Internal => &mut self.internal,
            DelayKind::Coupling(k) => self.couplings.entry(k).or_default(),
        }
    }
}

/// A realized ring with the table and column kinds used to build it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingRealization {
    pub ring: RingSpec,
    pub indices: Vec<usize>,
    pub weights: WeightTable,
    pub columns: Vec<DelayKind>,
    pub result: RealizationResult,
}

/// Assigns a kind to every delay column. The leading column of block `q` is
/// fixed by `i_q`; the rest are drawn from what the layout has left, in
/// order internal, then couplings by index. Without a layout each block
/// takes all its delays of its leading kind.
fn column_kinds(
    n: usize,
    indices: &[usize],
    target: &FrequencyTarget,
    layout: Option<&DelayLayout>,
) -> Result<Vec<DelayKind>> {
    let sizes = target.sizes();
    let Some(layout) = layout else {
        return Ok(indices
            .iter()
            .zip(&sizes)
            .flat_map(|(&i, &l)| std::iter::repeat_n(DelayKind::leading(i), l))
            .collect());
    };
    if layout.total() != target.len() {
        return Err(Error::InvalidInput(format!(
            "layout places {} delays but there are {} frequencies",
            layout.total(),
            target.len()
        )));
    }
    let kmax = super::max_coupling_index(n);
    if let Some(k) = layout.couplings.keys().find(|k| !(2..=kmax).contains(*k)) {
        return Err(Error::BadIndex(format!("layout names coupling {k}, outside 2..={kmax}")));
    }
    let mut left = layout.clone();
    for &i in indices {
        let kind = DelayKind::leading(i);
        let c = left.count_mut(kind);
        if *c == 0 {
            return Err(Error::InvalidInput(format!(
                "factor {i} needs a leading {kind:?} delay but the layout has none left"
            )));
        }
        *c -= 1;
    }
    let mut pool: Vec<DelayKind> = std::iter::repeat_n(DelayKind::Internal, left.internal).collect();
    for (&k, &c) in &left.couplings {
        pool.extend(std::iter::repeat_n(DelayKind::Coupling(k), c));
    }
    let mut pool = pool.into_iter();
    let mut kinds = Vec::with_capacity(target.len());
    for (&i, &l) in indices.iter().zip(&sizes) {
        kinds.push(DelayKind::leading(i));
        kinds.extend(pool.by_ref().take(l - 1));
    }
    Ok(kinds)
}

/// Realizes, for odd `n`, the frequencies of group `q` as roots of
/// `Δ_{i_q}` and maps the delays and coefficients back onto a ring.
///
/// The weight table row for `Δ_i` has 1 in internal columns and `c_k(i)` in
/// coupling-`k` columns. Its reduced matrix must be nonsingular; with the
/// default layout it is [`build_b`] in the `2cos` convention.
pub fn realize_ring(
    n: usize,
    indices: &[usize],
    target: &FrequencyTarget,
    layout: Option<&DelayLayout>,
    config: &SolverConfig,
) -> Result<RingRealization> {
    build_b(n, indices, BConvention::Consistent)?;
    if target.factor_count() != indices.len() {
        return Err(Error::InvalidInput(format!(
            "{} factor indices but {} frequency groups",
            indices.len(),
            target.factor_count()
        )));
    }
    let kinds = column_kinds(n, indices, target, layout)?;
    let rows = indices
        .iter()
        .map(|&i| {
            let c = factor_weights(n, i)?;
            Ok(kinds
                .iter()
                .map(|kind| match kind {
                    DelayKind::Internal => 1.0,
                    DelayKind::Coupling(k) => c[k - 2],
                })
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let weights = WeightTable::new(rows)?;

    let b = reduced_b(&weights, target);
    let det = b.determinant();
    let bound: f64 = (0..b.nrows()).map(|i| b.row(i).norm()).product();
    if !(det.abs() > 1e-12 * bound) {
        return Err(Error::SingularB { det });
    }

    let result = realize(target, &weights, config)?;
    let mut internal = Vec::new();
    let mut couplings: BTreeMap<usize, Vec<CouplingAtom>> = BTreeMap::new();
    for ((kind, &a), &tau) in kinds.iter().zip(&result.coeffs).zip(&result.taus) {
        match kind {
            DelayKind::Internal => internal.push(InternalTerm { a, tau }),
            DelayKind::Coupling(k) => couplings.entry(*k).or_default().push(CouplingAtom { alpha: a, s: tau }),
        }
    }
    Ok(RingRealization {
        ring: RingSpec::new(n, internal, couplings)?,
        indices: indices.to_vec(),
        weights,
        columns: kinds,
        result,
    })
}
