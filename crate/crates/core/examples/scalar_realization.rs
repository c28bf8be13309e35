//! Prescribe ±i, ±i√2, ±i√3 as eigenvalues of ẋ(t) = Σ a_k x(t − τ_k).
//!
//! cargo run --example scalar_realization

use spectra_forge::{realize, FrequencyTarget, SolverConfig, WeightTable};

fn main() -> spectra_forge::Result<()> {
    let omegas = [1.0, 2f64.sqrt(), 3f64.sqrt()];
    let target = FrequencyTarget::scalar(&omegas)?;
    let weights = WeightTable::ones(omegas.len());
    let result = realize(&target, &weights, &SolverConfig::default())?;

    println!("{:>3} {:>14} {:>14}", "k", "tau_k", "a_k");
    for (k, (t, a)) in result.taus.iter().zip(&result.coeffs).enumerate() {
        println!("{:>3} {:>14.9} {:>14.9}", k + 1, t, a);
    }
    println!("residual        {:.3e}", result.residual);
    println!("newton steps    {}", result.newton_iterations);
    println!("epsilon         {:?}", result.epsilon);

    let factor = result.factor(&weights, 0);
    for w in omegas {
        println!("|Δ(i·{w:.6})| = {:.3e}", factor.residual_on_targets(&[w]));
    }
    Ok(())
}
