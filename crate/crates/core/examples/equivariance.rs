//! Checking that a connection list is a D_n network: the D_8 ring with
//! nearest and next-nearest neighbours, then two broken variants.
//!
//! cargo run --example equivariance

use std::collections::BTreeMap;

use spectra_forge::dn_ring::{validate_equivariance, CouplingAtom, InternalTerm, RingSpec};

fn main() -> spectra_forge::Result<()> {
    let ring = RingSpec::new(
        8,
        vec![InternalTerm { a: -1.0, tau: 0.5 }],
        BTreeMap::from([
            (2, vec![CouplingAtom { alpha: 0.4, s: 1.0 }]),
            (3, vec![CouplingAtom { alpha: 0.1, s: 2.0 }]),
        ]),
    )?;
    let conns = ring.connections();
    println!("{} edges: {}", conns.edges.len(), validate_equivariance(&conns).message);

    let mut perturbed = conns.clone();
    let e = perturbed.edges.iter_mut().find(|e| e.to == 5 && e.tag == "eta2.1").unwrap();
    e.delay += 0.01;
    let report = validate_equivariance(&perturbed);
    println!("perturbed delay: condition {:?}: {}", report.condition, report.message);

    let mut one_way = conns.clone();
    one_way.edges.retain(|e| !(e.tag == "eta3.1" && (e.from + 8 - e.to) % 8 == 6));
    let report = validate_equivariance(&one_way);
    println!("one-way coupling: condition {:?}: {}", report.condition, report.message);
    Ok(())
}
