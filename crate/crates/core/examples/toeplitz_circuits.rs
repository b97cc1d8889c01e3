//! Banded Toeplitz matrix: the generic pipeline against the three-oracle and
//! merged adder circuits.

use blockenc::families::{self, ToeplitzCircuit};
use blockenc::schemes::build_base;
use blockenc::structure::compile;
use blockenc::verify::{check_encoding, dense_from_structure, extract_block, max_abs_diff};

fn main() -> blockenc::Result<()> {
    let (n, k) = (8, 1);
    let values = [0.5, -1.0, 0.25, 0.75];
    let spec = families::toeplitz(n, k, &values, false)?;
    println!("{}", dense_from_structure(&spec)?);

    let generic = build_base(&compile(&spec)?)?;
    let three = families::toeplitz_circuit(n, k, &values, ToeplitzCircuit::ThreeOracle)?;
    let merged = families::toeplitz_circuit(n, k, &values, ToeplitzCircuit::Merged)?;
    for (label, enc) in [("generic", &generic), ("three-oracle", &three), ("merged", &merged)] {
        let r = check_encoding(enc, &spec)?;
        println!(
            "{label:<13} alpha={} dim={} flags={:?} passed={}",
            r.alpha,
            enc.unitary.dim(),
            r.flags,
            r.passed
        );
    }
    let diff = max_abs_diff(&extract_block(&three)?, &extract_block(&merged)?);
    println!("three-oracle vs merged block difference: {diff:.1e}");

    let circulant = families::toeplitz(n, k, &values, true)?;
    let r = check_encoding(&build_base(&compile(&circulant)?)?, &circulant)?;
    println!("circulant alpha={} passed={}", r.alpha, r.passed);
    Ok(())
}
