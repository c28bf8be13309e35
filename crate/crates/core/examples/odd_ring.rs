//! A five-cell ring whose factors Δ₁ and Δ₂ vanish at ±i and ±i√2.
//!
//! cargo run --example odd_ring

use num_complex::Complex64;
use spectra_forge::dn_ring::{build_b, characteristic_factorization, dense_matrix, realize_ring, BConvention};
use spectra_forge::{FrequencyTarget, SolverConfig};

fn main() -> spectra_forge::Result<()> {
    let n = 5;
    let indices = [1, 2];
    let b = build_b(n, &indices, BConvention::Paper)?;
    println!("B = {b:.6}det B = {:.6}", b.determinant());

    let target = FrequencyTarget::new(vec![vec![1.0], vec![2f64.sqrt()]])?;
    let out = realize_ring(n, &indices, &target, None, &SolverConfig::default())?;
    println!("{}", serde_json::to_string_pretty(&out.ring).unwrap());

    let product = characteristic_factorization(&out.ring);
    for (j, f) in product.factors().iter().enumerate() {
        let hits: Vec<String> = target
            .flat()
            .iter()
            .map(|&w| format!("{:.1e}", f.evaluate(Complex64::new(0.0, w)).norm()))
            .collect();
        println!("Δ_{j} (x{}): |Δ(iω)| over targets = {}", f.multiplicity(), hits.join(", "));
    }

    let lambda = Complex64::new(0.3, 0.7);
    let dense = dense_matrix(&out.ring, lambda).determinant();
    println!("dense det {dense:.6}, product {:.6}", product.evaluate_product(lambda));
    Ok(())
}
