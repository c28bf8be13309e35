//! Two factors sharing delays: the D_3 pair `λ − a₁e^{−λτ₁} − 2a₂e^{−λτ₂}`
//! and `λ − a₁e^{−λτ₁} + a₂e^{−λτ₂}`, with ±i on the first and ±i√2 on the
//! second. The 3×3 ring matrix is rebuilt and its determinant checked.
//!
//! cargo run --example d3_split

use std::collections::BTreeMap;

use num_complex::Complex64;
use spectra_forge::dn_ring::{dense_matrix, CouplingAtom, InternalTerm, RingSpec};
use spectra_forge::{realize, FrequencyTarget, SolverConfig, WeightTable};

fn main() -> spectra_forge::Result<()> {
    let target = FrequencyTarget::new(vec![vec![1.0], vec![2f64.sqrt()]])?;
    let weights = WeightTable::new(vec![vec![1.0, 2.0], vec![1.0, -1.0]])?;
    let r = realize(&target, &weights, &SolverConfig::default())?;
    println!("a = {:?}", r.coeffs);
    println!("tau = {:?}", r.taus);
    println!("residual {:.2e}", r.residual);

    let ring = RingSpec::new(
        3,
        vec![InternalTerm { a: r.coeffs[0], tau: r.taus[0] }],
        BTreeMap::from([(2, vec![CouplingAtom { alpha: r.coeffs[1], s: r.taus[1] }])]),
    )?;
    for w in [1.0, -1.0, 2f64.sqrt(), -2f64.sqrt()] {
        let det = dense_matrix(&ring, Complex64::new(0.0, w)).determinant();
        println!("|det Δ(i·{w:+.4})| = {:.2e}", det.norm());
    }
    Ok(())
}
