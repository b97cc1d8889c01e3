//! Weighted binary-tree adjacency matrix: labelling, gate networks and the
//! Hermitian circuit.

use blockenc::families;
use blockenc::schemes::build_hermitian_base;
use blockenc::structure::compile;
use blockenc::verify::{check_encoding, dense_from_structure};

fn main() -> blockenc::Result<()> {
    let n = 8;
    let (a0, a1, a2) = (1.0, 2.0, 3.0);
    let spec = families::binary_tree(n, a0, a1, a2)?;
    println!("{}", dense_from_structure(&spec)?);

    let row = families::binary_tree_row_network(n);
    let range = families::binary_tree_range_network(n);
    println!("row network on the d=2 labels:");
    for m in 0..2 * n {
        let x = 2 * 2 * n + m;
        if !range[x] {
            println!("  (2,{m:>2}) -> slot {} row {}", row[x] / n, row[x] % n);
        }
    }

    let generic = build_hermitian_base(&compile(&spec)?)?;
    let circuit = families::binary_tree_circuit(n, a0, a1, a2)?;
    for (label, enc) in [("generic hermitian", &generic), ("gate networks", &circuit)] {
        let r = check_encoding(enc, &spec)?;
        println!(
            "{label:<18} alpha={} flags={:?} ‖U−U†‖={:.1e} passed={}",
            r.alpha, r.flags, r.hermiticity_defect, r.passed
        );
    }
    Ok(())
}
