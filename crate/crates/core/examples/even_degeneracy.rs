//! Even rings: factor weights that vanish and block the construction.
//!
//! cargo run --example even_degeneracy

use spectra_forge::dn_ring::{detect_even_degeneracy, factor_weights};

fn main() -> spectra_forge::Result<()> {
    for n in [4, 6, 8, 12] {
        println!("n = {n}");
        for j in 0..=n / 2 {
            println!("  c(j={j}) = {:?}", factor_weights(n, j)?);
        }
        println!("  zero weights (k, j): {:?}", detect_even_degeneracy(n)?);
    }
    Ok(())
}
