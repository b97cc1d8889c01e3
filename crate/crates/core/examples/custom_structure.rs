//! A structure not shipped as a family: an anti-diagonal band built directly
//! from row and column maps, compiled and encoded by every exact scheme.

use std::sync::Arc;

use blockenc::schemes::{build_base, build_hermitian_base, build_prep_unprep};
use blockenc::structure::{compile, StructureSpec};
use blockenc::verify::{check_encoding, dense_from_structure};

fn main() -> blockenc::Result<()> {
    let n = 8;
    // Value d sits on the anti-diagonal shifted by d: j = (N − 1 − i + d) mod N.
    let spec = StructureSpec::new(
        "anti_band",
        n,
        vec![1.5, -0.5],
        n,
        Arc::new(|_d, m| m as i64),
        Arc::new(move |d, m| ((2 * n - 1 - m + d) % n) as i64),
    )?
    .with_transpose(Arc::new(move |d, m| (d, (2 * n - 1 - m + d) % n)))
    .with_prep_factor(Arc::new(|_, _| 0), Arc::new(|_, _| 0));
    println!("{}", dense_from_structure(&spec)?);

    let c = compile(&spec)?;
    println!("counts {:?}", c.counts);
    for (label, enc) in [
        ("base", build_base(&c)?),
        ("hermitian", build_hermitian_base(&c)?),
        ("prep", build_prep_unprep(&c, 0.5)?),
    ] {
        let r = check_encoding(&enc, &spec)?;
        println!("{label:<10} alpha={} flags={} passed={}", r.alpha, r.flag_qubits, r.passed);
    }
    Ok(())
}
