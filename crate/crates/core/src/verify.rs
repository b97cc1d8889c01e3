//! Brute-force oracles and encoding checks.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::schemes::{Accuracy, BlockEncoding};
use crate::structure::StructureSpec;
use crate::tolerance::{self, Tolerances};

/// Writes `A_d` at `(i(d,m), j(d,m))` for every in-range label.
pub fn dense_from_structure(spec: &StructureSpec) -> Result<Array2<f64>> {
    let n = spec.n();
    let mut a = Array2::zeros((n, n));
    let mut owner: Array2<Option<(usize, usize)>> = Array2::from_elem((n, n), None);
    for (d, m) in spec.labels() {
        let (i, j) = spec.position(d, m)?;
        if let Some((d1, m1)) = owner[[i, j]] {
            return Err(Error::LabelCollision {
                d1,
                m1,
                d2: d,
                m2: m,
                i,
                j,
            });
        }
        owner[[i, j]] = Some((d, m));
        a[[i, j]] = spec.values()[d];
    }
    Ok(a)
}

/// `B[i][j] = ⟨flags=0, i| U |flags=0, j⟩`, required to be real.
pub fn extract_block(enc: &BlockEncoding) -> Result<Array2<f64>> {
    let idx = enc.layout.block_indices();
    let u = enc.unitary.matrix();
    let n = idx.len();
    let mut b = Array2::zeros((n, n));
    for (i, &ri) in idx.iter().enumerate() {
        for (j, &cj) in idx.iter().enumerate() {
            let z = u[[ri, cj]];
            if z.im.abs() > tolerance::IMAGINARY_LEAK {
                return Err(Error::ComplexLeak { i, j, imag: z.im });
            }
            b[[i, j]] = z.re;
        }
    }
    Ok(b)
}

/// Least-squares scale `argmin_α ‖α·B − A‖_F = ⟨B, A⟩ / ⟨B, B⟩`.
pub fn least_squares_alpha(b: &Array2<f64>, a: &Array2<f64>) -> f64 {
    let ba: f64 = b.iter().zip(a).map(|(x, y)| x * y).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    if bb == 0.0 {
        f64::NAN
    } else {
        ba / bb
    }
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scheme: String,
    pub alpha: f64,
    pub measured_alpha: f64,
    pub alpha_relative_error: f64,
    /// `max |α·B − A|`.
    pub max_abs_error: f64,
    pub block_tolerance: f64,
    pub unitarity_defect: f64,
    pub hermiticity_defect: f64,
    pub flag_qubits: usize,
    pub flags: Vec<String>,
    pub tolerances: Tolerances,
    pub passed: bool,
}

/// Compares the encoded block with the dense target and checks unitarity.
pub fn check_encoding(enc: &BlockEncoding, spec: &StructureSpec) -> Result<Report> {
    let a = dense_from_structure(spec)?;
    let b = extract_block(enc)?;
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    let measured_alpha = least_squares_alpha(&b, &a);
    let alpha_relative_error = (measured_alpha - enc.alpha).abs() / enc.alpha;
    let max_abs_error = max_abs_diff(&(&b * enc.alpha), &a);
    let block_tolerance = enc.block_tolerance();
    let alpha_tolerance = match enc.accuracy {
        Accuracy::Exact => tolerance::ALPHA_RELATIVE,
        Accuracy::Amplified { epsilon } => tolerance::preamplified_bound(epsilon),
    };
    let unitarity_defect = enc.unitary.unitarity_defect();
    let hermiticity_defect = enc.unitary.hermiticity_defect();
    let passed = max_abs_error <= block_tolerance
        && alpha_relative_error <= alpha_tolerance
        && unitarity_defect <= tolerance::UNITARITY;
    Ok(Report {
        scheme: enc.scheme.name().to_string(),
        alpha: enc.alpha,
        measured_alpha,
        alpha_relative_error,
        max_abs_error,
        block_tolerance,
        unitarity_defect,
        hermiticity_defect,
        flag_qubits: enc.flag_qubits(),
        flags: enc.flags(),
        tolerances: Tolerances::default(),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{RegisterLayout, Role, UnitaryMatrix};
    use crate::estimator::CostRecord;
    use crate::families;
    use crate::schemes::{self, SchemeTag};
    use crate::structure::compile;
    use ndarray::array;

    #[test]
    fn dense_checkerboard_two() {
        let a = dense_from_structure(&families::checkerboard(2, 1.0, -1.0, false).unwrap()).unwrap();
        assert_eq!(a, array![[1.0, -1.0], [-1.0, 1.0]]);
    }

    #[test]
    fn dense_binary_tree_matches_adjacency() {
        let a = dense_from_structure(&families::binary_tree(8, 1.0, 2.0, 3.0).unwrap()).unwrap();
        let expected = array![
            [1., 3., 0., 0., 0., 0., 0., 0.],
            [3., 2., 3., 3., 0., 0., 0., 0.],
            [0., 3., 2., 0., 3., 3., 0., 0.],
            [0., 3., 0., 2., 0., 0., 3., 3.],
            [0., 0., 3., 0., 1., 0., 0., 0.],
            [0., 0., 3., 0., 0., 1., 0., 0.],
            [0., 0., 0., 3., 0., 0., 1., 0.],
            [0., 0., 0., 3., 0., 0., 0., 1.],
        ];
        assert_eq!(a, expected);
    }

    #[test]
    fn identity_encoding_block() {
        let mut layout = RegisterLayout::new();
        layout.push("block", Role::Block, 2);
        let enc = BlockEncoding {
            unitary: UnitaryMatrix::identity(2),
            layout,
            alpha: 1.0,
            cost: CostRecord::new("identity", 0.0, 1.0, 0),
            scheme: SchemeTag::FamilyCircuit,
            accuracy: Accuracy::Exact,
            amplification: None,
        };
        assert_eq!(extract_block(&enc).unwrap(), Array2::<f64>::eye(2));
    }

    #[test]
    fn base_checkerboard_block_and_report() {
        let spec = families::checkerboard(4, 0.5, -2.0, false).unwrap();
        let c = compile(&spec).unwrap();
        let enc = schemes::build_base(&c).unwrap();
        let b = extract_block(&enc).unwrap();
        let a = dense_from_structure(&spec).unwrap();
        assert!(max_abs_diff(&b, &(&a / 8.0)) < 1e-12);
        let report = check_encoding(&enc, &spec).unwrap();
        assert!(report.passed);
        assert!((report.measured_alpha / enc.alpha - 1.0).abs() < 1e-9);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"measured_alpha\""));
    }

    #[test]
    fn prep_checkerboard_block() {
        let spec = families::checkerboard(4, 1.0, 3.0, false).unwrap();
        let enc = schemes::build_prep_unprep(&compile(&spec).unwrap(), 0.5).unwrap();
        let b = extract_block(&enc).unwrap();
        let a = dense_from_structure(&spec).unwrap();
        assert!(max_abs_diff(&b, &(&a / (2.0 * 4.0))) < 1e-12);
    }

    #[test]
    fn complex_leak_is_reported() {
        let mut layout = RegisterLayout::new();
        layout.push("block", Role::Block, 1);
        let u = ndarray::arr2(&[[num_complex::Complex64::new(0.0, 1.0)]]);
        let enc = BlockEncoding {
            unitary: UnitaryMatrix::new(u).unwrap(),
            layout,
            alpha: 1.0,
            cost: CostRecord::new("phase", 0.0, 1.0, 0),
            scheme: SchemeTag::FamilyCircuit,
            accuracy: Accuracy::Exact,
            amplification: None,
        };
        assert!(matches!(extract_block(&enc), Err(Error::ComplexLeak { .. })));
    }

    #[test]
    fn least_squares_alpha_ignores_zero_entries() {
        let a = array![[0.0, 2.0], [4.0, 0.0]];
        let b = &a / 8.0;
        assert!((least_squares_alpha(&b, &a) - 8.0).abs() < 1e-12);
    }
}
