//! Base, PREP/UNPREP and Hermitian encodings of a checkerboard matrix, plus the
//! hand-written family circuits, each verified against the dense matrix.

use blockenc::families;
use blockenc::schemes::{build_base, build_hermitian_base, build_prep_unprep, BlockEncoding};
use blockenc::structure::compile;
use blockenc::verify::check_encoding;

fn show(label: &str, enc: &BlockEncoding, spec: &blockenc::StructureSpec) -> blockenc::Result<()> {
    let r = check_encoding(enc, spec)?;
    println!(
        "{label:<22} alpha={:<8} flags={} {:?} max|αB−A|={:.1e} hermitian={}",
        r.alpha,
        r.flag_qubits,
        r.flags,
        r.max_abs_error,
        r.hermiticity_defect < 1e-10
    );
    Ok(())
}

fn main() -> blockenc::Result<()> {
    let (n, a0, a1) = (8, 0.5, -2.0);
    let spec = families::checkerboard(n, a0, a1, false)?;
    let c = compile(&spec)?;
    println!("N={n}, counts {:?}", c.counts);
    show("base", &build_base(&c)?, &spec)?;
    show("hermitian base", &build_hermitian_base(&c)?, &spec)?;
    show("prep/unprep", &build_prep_unprep(&c, 0.5)?, &spec)?;
    show("family circuit", &families::checkerboard_circuit(n, a0, a1, false)?, &spec)?;
    show("family prep circuit", &families::checkerboard_prep_circuit(n, a0, a1)?, &spec)?;

    let corners = families::checkerboard(n, a0, a1, true)?;
    show("zeroed corners", &families::checkerboard_circuit(n, a0, a1, true)?, &corners)?;
    Ok(())
}
