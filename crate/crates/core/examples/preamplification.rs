//! Preamplified encodings: the subnormalisation drops by `γ_c·γ_r` at the cost
//! of an ε-accurate block.

use blockenc::schemes::{build_base, build_hermitian_preamplified, build_preamplified, AmplificationParams};
use blockenc::structure::compile;
use blockenc::verify::check_encoding;
use blockenc::families;

fn main() -> blockenc::Result<()> {
    let values = [1.0, 0.02, 0.05, 0.01, 0.03, 0.04, 0.02];
    let spec = families::tridiagonal(4, &values, true)?;
    let c = compile(&spec)?;
    let base = build_base(&c)?;
    println!("base alpha = {}", base.alpha);

    for epsilon in [1e-2, 1e-3, 1e-4] {
        let params = AmplificationParams {
            epsilon,
            ..AmplificationParams::default()
        };
        let enc = build_preamplified(&c, &params)?;
        let info = enc.amplification.expect("preamplified encodings record their factors");
        let r = check_encoding(&enc, &spec)?;
        println!(
            "ε={epsilon:<6} γ_c={:.4} (deg {:?}) γ_r={:.4} (deg {:?}) alpha={:.4} max|αB−A|/α={:.2e} flags={}",
            info.column.gamma,
            info.column.degree,
            info.row.gamma,
            info.row.degree,
            enc.alpha,
            r.max_abs_error / enc.alpha,
            r.flag_qubits
        );
    }

    let herm = build_hermitian_preamplified(&c, &AmplificationParams::default())?;
    let r = check_encoding(&herm, &spec)?;
    println!(
        "hermitian preamplified alpha={:.4} ‖U−U†‖={:.1e} passed={}",
        herm.alpha, r.hermiticity_defect, r.passed
    );
    Ok(())
}
