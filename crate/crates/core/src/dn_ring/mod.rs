//! Rings of `n` identical one-dimensional cells with D_n symmetry.
//!
//! Cell `i` feels itself through the internal profile `p` and cell `i + d`
//! through the coupling profile `η_k`, `k = min(d, n − d) + 1`. Both cells
//! at distance `d` share a profile, so a ring is stored as the internal
//! profile plus one profile per coupling index `k = 2, …, ⌊n/2⌋ + 1`. For
//! even `n` the last index is the opposite cell.
//!
//! The characteristic matrix is circulant and splits into the factors
//! `Δ_j(λ) = λ − F(λ) − Σ_k c_k(j) G_k(λ)` with `c_k(j) = 2cos(2π(k−1)j/n)`
//! (and `(−1)^j` for the opposite cell), see [`factor_weights`].

mod bmat;
mod equivariance;
mod factor;
mod realize;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bmat::{build_b, det_b_two_factor, BConvention};
pub use equivariance::{validate_equivariance, ConnectionList, Edge, EquivarianceReport};
pub use factor::{
    characteristic_factorization, cos_two_pi_ratio, dense_matrix, detect_even_degeneracy,
    factor_multiplicity, factor_weights,
};
pub use realize::{realize_ring, DelayKind, DelayLayout, RingRealization};

/// Internal feedback `a e^{−λτ}` of a cell on itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InternalTerm {
    pub a: f64,
    pub tau: f64,
}

/// One point-delay atom `α u_s` of a coupling kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingAtom {
    pub alpha: f64,
    pub s: f64,
}

#[derive(Deserialize)]
struct RawRing {
    n: usize,
    #[serde(default)]
    internal: Vec<InternalTerm>,
    #[serde(default)]
    couplings: BTreeMap<usize, Vec<CouplingAtom>>,
}

/// A D_n ring: cell count, internal profile, one coupling profile per index `k`.
///
/// An empty coupling profile means no connection at that distance. The
/// internal profile may be empty too; realizations whose factor indices
/// are all nonzero produce pure-coupling rings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRing")]
pub struct RingSpec {
    n: usize,
    internal: Vec<InternalTerm>,
    couplings: BTreeMap<usize, Vec<CouplingAtom>>,
}

impl TryFrom<RawRing> for RingSpec {
    type Error = Error;
    fn try_from(raw: RawRing) -> Result<Self> {
        RingSpec::new(raw.n, raw.internal, raw.couplings)
    }
}

/// Largest coupling index for `n` cells.
pub fn max_coupling_index(n: usize) -> usize {
    n / 2 + 1
}

impl RingSpec {
    pub fn new(
        n: usize,
        internal: Vec<InternalTerm>,
        couplings: BTreeMap<usize, Vec<CouplingAtom>>,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!("a ring needs at least 3 cells, got {n}")));
        }
        for (i, t) in internal.iter().enumerate() {
            if !(t.a.is_finite() && t.tau.is_finite() && t.tau >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "internal term {} needs a finite coefficient and delay ≥ 0",
                    i + 1
                )));
            }
        }
        let kmax = max_coupling_index(n);
        for (&k, atoms) in &couplings {
            if !(2..=kmax).contains(&k) {
                return Err(Error::BadIndex(format!("coupling index {k} outside 2..={kmax} for n = {n}")));
            }
            if atoms.iter().any(|a| !(a.alpha.is_finite() && a.s.is_finite() && a.s >= 0.0)) {
                return Err(Error::InvalidInput(format!(
                    "coupling {k} needs finite coefficients and delays ≥ 0"
                )));
            }
        }
        Ok(Self { n, internal, couplings })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn internal(&self) -> &[InternalTerm] {
        &self.internal
    }

    pub fn couplings(&self) -> &BTreeMap<usize, Vec<CouplingAtom>> {
        &self.couplings
    }

    /// Atoms of coupling `k`; empty when absent.
    pub fn coupling(&self, k: usize) -> &[CouplingAtom] {
        self.couplings.get(&k).map_or(&[], Vec::as_slice)
    }

    /// Coupling index of the cells at cyclic distance `d`, or `None` for `d ≡ 0`.
    pub fn coupling_for_distance(&self, d: usize) -> Option<usize> {
        let d = d % self.n;
        (d != 0).then(|| d.min(self.n - d) + 1)
    }

    /// Directed edges of the ring. Cell `t` receives every atom of `η_k`
    /// from both cells at distance `k − 1` (one cell when they coincide).
    /// Tags are `"p<i>"` for internal terms and `"eta<k>.<t>"` for atoms.
    pub fn connections(&self) -> ConnectionList {
        let n = self.n;
        let mut edges = Vec::new();
        for to in 1..=n {
            for (i, t) in self.internal.iter().enumerate() {
                edges.push(Edge { from: to, to, delay: t.tau, tag: format!("p{}", i + 1) });
            }
            for (&k, atoms) in &self.couplings {
                let d = k - 1;
                let mut offsets = vec![d];
                if n - d != d {
                    offsets.push(n - d);
                }
                for off in offsets {
                    let from = (to - 1 + off) % n + 1;
                    for (t, atom) in atoms.iter().enumerate() {
                        edges.push(Edge { from, to, delay: atom.s, tag: format!("eta{k}.{}", t + 1) });
                    }
                }
            }
        }
        ConnectionList { n, edges }
    }
}
