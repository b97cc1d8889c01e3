//! Turning a non-Hermitian encoding of a symmetric matrix into a Hermitian one
//! with a single extra flag qubit.

use blockenc::families;
use blockenc::schemes::{build_base, hermitianize};
use blockenc::structure::compile;
use blockenc::verify::check_encoding;

fn main() -> blockenc::Result<()> {
    let spec = families::binary_tree(8, 0.5, -1.0, 0.75)?;
    let base = build_base(&compile(&spec)?)?;
    let wrapped = hermitianize(&base)?;
    for (label, enc) in [("base", &base), ("hermitianized", &wrapped)] {
        let r = check_encoding(enc, &spec)?;
        println!(
            "{label:<14} alpha={} flags={:?} ‖U−U†‖={:.1e} passed={}",
            r.alpha, r.flags, r.hermiticity_defect, r.passed
        );
    }

    let toeplitz = families::toeplitz(4, 1, &[0.5, -1.0, 0.25], false)?;
    let err = hermitianize(&build_base(&compile(&toeplitz)?)?).unwrap_err();
    println!("non-symmetric Toeplitz: {err}");
    Ok(())
}
