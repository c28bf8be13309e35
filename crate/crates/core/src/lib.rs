//! Linear delay-differential equations with prescribed imaginary spectra.
//!
//! The crate builds equations `ẋ(t) = Σ a_k x(t − τ_k)`, and products of such
//! characteristic factors coming from D_n-symmetric rings of cells, whose
//! characteristic equations vanish at a chosen set of rationally independent
//! points `±iω`. Results are checked independently with the argument
//! principle.
//!
//! Modules:
//!
//! * [`quasipoly`]: characteristic factors `λ − Σ a b e^{−λτ}` and products.
//! * [`realization`]: base point, delay search, Newton refinement, continuation.
//! * [`dn_ring`]: D_n rings, equivariance checks, factorization, `B` matrices.
//! * [`spectrum`]: root counting, polishing and realization certificates.
//! * [`cli`]: problem files and the subcommands behind the `spectra-forge` binary.
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! ```bash
//! cargo run --example scalar_realization
//! ```

pub mod cli;
pub mod dn_ring;
pub mod error;
pub mod quasipoly;
pub mod realization;
pub mod spectrum;

pub use error::{Error, Result};
pub use quasipoly::{CharProduct, ScalarFactor, Term};
pub use realization::{realize, FrequencyTarget, RealizationResult, SolverConfig, WeightTable};

/// Schema tag written into every JSON document the CLI produces.
pub const SCHEMA: &str = "spectra-forge/1";
