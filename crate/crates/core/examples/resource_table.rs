//! Resource comparison table for each family, with the data-loading models.

use blockenc::estimator::{loading_model, table_rows, EstimateParams};
use blockenc::families;

fn main() -> blockenc::Result<()> {
    let params = EstimateParams::default();
    let tridiagonal_values: Vec<f64> = (0..15).map(|d| 1.0 / (1.0 + d as f64)).collect();
    let specs = [
        families::checkerboard(16, 1.0, 0.25, false)?,
        families::toeplitz(16, 1, &[0.5, -1.0, 0.25, 0.75], false)?,
        families::toeplitz(16, 0, &[0.1, 0.4, 0.9, 0.2], true)?,
        families::tridiagonal(8, &tridiagonal_values, true)?,
        families::binary_tree(16, 1.0, 2.0, 0.5)?,
    ];
    for spec in &specs {
        let table = table_rows(spec, &params)?;
        println!("\n{} (N={}, D={})", spec.name(), spec.n(), spec.d());
        for r in &table.rows {
            println!(
                "  {:<26} loading={:>10.2} alpha={:>9.4} flags={:>2} FoM={:>10.2}",
                r.scheme, r.data_loading, r.subnormalisation, r.flag_qubits, r.figure_of_merit
            );
        }
        for note in &table.notes {
            println!("  note: {note}");
        }
    }

    println!("\nloading models for D = 64");
    for budget in [0, 6, 20] {
        let m = loading_model(64, budget)?;
        println!("  ancilla budget {budget:>2}: {:?}", m.chosen);
    }
    Ok(())
}
