//! Root counting and location for a realized equation, and the certificate
//! that each prescribed ±iω is a simple root.
//!
//! cargo run --example spectrum

use spectra_forge::spectrum::{count_roots, locate_roots, verify_realization, Region};
use spectra_forge::{realize, FrequencyTarget, SolverConfig, WeightTable};

fn main() -> spectra_forge::Result<()> {
    let target = FrequencyTarget::scalar(&[1.0, 2f64.sqrt()])?;
    let weights = WeightTable::ones(2);
    let result = realize(&target, &weights, &SolverConfig::default())?;
    let factor = result.factor(&weights, 0);

    let report = verify_realization(&result, &target, &weights, 1e-10);
    for t in &report.targets {
        println!(
            "ω = {:.6}: residual {:.1e}, box ±{:.2e}, count {:?}, pass {}",
            t.omega, t.residual, t.delta, t.count, t.pass
        );
    }

    let strip = Region::new(-0.05, 0.5, -1.6, 1.6)?;
    println!("roots with Re λ > −0.05, |Im λ| < 1.6: {}", count_roots(&factor, &strip)?);
    for z in locate_roots(&factor, &strip, 64)? {
        println!("  {:+.10} {:+.10}i", z.re, z.im);
    }
    Ok(())
}
