//! Moving the prescribed frequencies: the realized delays and coefficients
//! follow the target under small changes, and larger moves are split.
//!
//! cargo run --example continuation

use spectra_forge::realization::continue_with_bisection;
use spectra_forge::realization::continue_realization;
use spectra_forge::{realize, FrequencyTarget, SolverConfig, WeightTable};

fn main() -> spectra_forge::Result<()> {
    let omegas = [1.0, 2f64.sqrt(), 3f64.sqrt()];
    let weights = WeightTable::ones(3);
    let start = realize(&FrequencyTarget::scalar(&omegas)?, &weights, &SolverConfig::default())?;
    println!("start: tau = {:.6?}", start.taus);

    let nudged = FrequencyTarget::scalar(&[1.001, 2f64.sqrt() - 0.001, 3f64.sqrt() + 0.001])?;
    let moved = continue_realization(&start, &nudged, &weights, 1e-10, 5)?;
    println!(
        "nudged: tau = {:.6?}, {} Newton steps, residual {:.1e}",
        moved.taus, moved.newton_iterations, moved.residual
    );

    let far = FrequencyTarget::scalar(&[1.05, 1.45, 1.7])?;
    match continue_with_bisection(&start, &far, &weights, 1e-10, 8, 8) {
        Ok((r, steps)) => println!("far: {steps} sub-steps, tau = {:.6?}, residual {:.1e}", r.taus, r.residual),
        Err(e) => println!("far: {e}"),
    }
    Ok(())
}
