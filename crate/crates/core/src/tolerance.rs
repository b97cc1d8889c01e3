//! Central numerical tolerances.
//!
//! Every comparison in the crate reads from here so that the acceptance
//! thresholds live in one place.

/// Max-abs tolerance for U†U − I.
pub const UNITARITY: f64 = 1e-10;
/// Max-abs tolerance for U − U†.
pub const HERMITICITY: f64 = 1e-10;
/// Max-abs tolerance for α·B − A on exact schemes.
pub const BLOCK_EXACT: f64 = 1e-9;
/// Relative tolerance between measured and predicted α on exact schemes.
pub const ALPHA_RELATIVE: f64 = 1e-9;
/// Bound on imaginary parts of blocks that should be real.
pub const IMAGINARY_LEAK: f64 = 1e-10;
/// Guard band when checking |v| ≤ 1 for loaded rotation values.
pub const ROTATION_GUARD: f64 = 1e-12;
/// Guard band on |P(x)| ≤ 1 for amplification polynomials.
pub const POLY_BOUND: f64 = 1e-9;
/// Relative slack when checking ζ ≤ (1−δ)/γ.
pub const SINGULAR_RANGE: f64 = 1e-12;
/// Symmetry tolerance for the hermitianize precondition.
pub const SYMMETRY: f64 = 1e-10;
/// Largest dense dimension assembled by the simulator.
pub const MAX_DENSE_DIM: usize = 1 << 13;
/// Largest polynomial degree the degree search will try.
pub const MAX_POLY_DEGREE: usize = 1 << 15;

/// All tolerances bundled for reports.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub unitarity: f64,
    pub hermiticity: f64,
    pub block: f64,
    pub alpha_relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unitarity: UNITARITY,
            hermiticity: HERMITICITY,
            block: BLOCK_EXACT,
            alpha_relative: ALPHA_RELATIVE,
        }
    }
}

/// Accuracy bound for a preamplified encoding with per-factor accuracy ε.
pub fn preamplified_bound(epsilon: f64) -> f64 {
    2.0 * epsilon + epsilon * epsilon
}
