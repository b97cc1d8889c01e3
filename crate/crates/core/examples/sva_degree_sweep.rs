//! Minimal odd polynomial degrees for singular-value amplification over a
//! small grid, with the fitted prefactor of `(γ/δ)·ln(γ/ε)`.
//!
//! Pass `--full` for the full 30-point grid (about a minute in release mode).

use blockenc::sva::{degree_sweep, min_degree_poly};

fn main() -> blockenc::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let (gammas, deltas, epsilons): (Vec<f64>, Vec<f64>, Vec<f64>) = if full {
        (vec![2.0, 4.0, 8.0, 16.0, 32.0], vec![0.08, 0.159], vec![1e-2, 1e-3, 1e-4])
    } else {
        (vec![2.0, 4.0, 8.0], vec![0.159], vec![1e-2, 1e-3])
    };
    let sweep = degree_sweep(&gammas, &deltas, &epsilons)?;
    println!("{:>6} {:>7} {:>8} {:>7} {:>10}", "gamma", "delta", "epsilon", "degree", "3X");
    for r in &sweep.rows {
        println!(
            "{:>6} {:>7} {:>8} {:>7} {:>10.1}",
            r.gamma, r.delta, r.epsilon, r.degree, r.predicted_degree
        );
    }
    println!(
        "fitted c = {:.3} (spread {:.3}, low confidence: {})",
        sweep.fit.c, sweep.fit.relative_spread, sweep.fit.low_confidence
    );

    let poly = min_degree_poly(4.0, 0.159, 1e-3)?;
    println!("\nP(x) for γ=4, δ=0.159, ε=1e-3 (degree {}):", poly.degree);
    for x in [0.0, 0.05, 0.1, 0.2, 0.25, 0.5, 1.0] {
        println!("  P({x:<4}) = {:+.6}   γx = {:.6}", poly.eval(x), 4.0 * x);
    }
    Ok(())
}
