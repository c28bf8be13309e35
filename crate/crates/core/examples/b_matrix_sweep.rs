//! The matrix 𝓑 for odd rings: the singular D_9 choice (0, 3) and a sweep
//! of the two-factor determinant over odd n.
//!
//! cargo run --example b_matrix_sweep

use spectra_forge::dn_ring::{build_b, det_b_two_factor, BConvention};

fn main() -> spectra_forge::Result<()> {
    let b = build_b(9, &[0, 3], BConvention::Paper)?;
    println!("n = 9, (0, 3): B = {b}det = {}", b.determinant());

    let b = build_b(7, &[0, 1, 2, 3], BConvention::Consistent)?;
    println!("n = 7, (0, 1, 2, 3), 2cos form: det = {:.6}", b.determinant());

    let mut smallest = (f64::INFINITY, 0, 0, 0);
    for n in (5..=101).step_by(2) {
        for i1 in 1..=(n - 1) / 2 {
            for i2 in i1 + 1..=(n - 1) / 2 {
                let det = det_b_two_factor(n, i1, i2)?;
                let m = build_b(n, &[i1, i2], BConvention::Paper)?;
                let norm: f64 = (0..2).map(|r| m.row(r).norm()).product();
                if det.abs() / norm < smallest.0 {
                    smallest = (det.abs() / norm, n, i1, i2);
                }
            }
        }
    }
    let (v, n, i1, i2) = smallest;
    println!("smallest normalized |det B| over odd n ≤ 101: {v:.3e} at n = {n}, ({i1}, {i2})");
    Ok(())
}
