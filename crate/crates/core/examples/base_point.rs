//! The exact starting point of the construction: the matrix 𝓘_B, its
//! determinant in closed form, the base amplitudes and the transversality
//! value.
//!
//! cargo run --example base_point

use spectra_forge::realization::{base_point, cal_i_b, det_cal_i_b_lemma, transversality_at_base};
use spectra_forge::{FrequencyTarget, WeightTable};

fn main() -> spectra_forge::Result<()> {
    let target = FrequencyTarget::new(vec![vec![1.0, 2f64.sqrt()], vec![3f64.sqrt()]])?;
    let weights = WeightTable::new(vec![vec![1.0, 2.0, 2.0], vec![1.0, -1.0, -1.0]])?;

    let ib = cal_i_b(&weights, &target)?;
    println!("I_B = {}", ib.matrix);
    println!("det by LU     {:.12}", ib.matrix.determinant());
    println!("det by lemma  {:.12}", det_cal_i_b_lemma(&weights, &target)?);

    let base = base_point(&target, &weights)?;
    println!("amplitudes    {:?}", base.amplitudes);
    println!("angles        {:?}", base.target_angles);

    let scalar = FrequencyTarget::scalar(&[1.0, 2f64.sqrt()])?;
    println!("T(1, √2)      {:.12}", transversality_at_base(&scalar, &WeightTable::ones(2))?);
    Ok(())
}
