//! Symmetric tridiagonal matrix: the slot-{0,1,3} circuits and the Hermitian
//! encoding built from the transposition oracle.

use blockenc::families::{self, TridiagonalCircuit};
use blockenc::schemes::{build_base, build_hermitian_base};
use blockenc::structure::compile;
use blockenc::verify::check_encoding;

fn main() -> blockenc::Result<()> {
    let n = 8;
    let values: Vec<f64> = (0..2 * n - 1).map(|d| if d % 2 == 0 { 2.0 } else { -1.0 }).collect();
    let spec = families::tridiagonal(n, &values, true)?;
    let c = compile(&spec)?;
    println!("counts {:?}", c.counts);
    println!("padded {:?}", c.shape);

    let encodings = [
        ("generic base", build_base(&c)?),
        ("generic hermitian", build_hermitian_base(&c)?),
        ("circuit with del", families::tridiagonal_circuit(n, &values, TridiagonalCircuit::WithDel)?),
        ("circuit simplified", families::tridiagonal_circuit(n, &values, TridiagonalCircuit::Simplified)?),
        ("circuit hermitian", families::tridiagonal_circuit(n, &values, TridiagonalCircuit::Hermitian)?),
    ];
    for (label, enc) in &encodings {
        let r = check_encoding(enc, &spec)?;
        println!(
            "{label:<19} alpha={} flags={} ‖U−U†‖={:.1e} passed={}",
            r.alpha, r.flag_qubits, r.hermiticity_defect, r.passed
        );
    }
    Ok(())
}
