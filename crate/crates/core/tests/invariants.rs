mod common;

use blockenc::circuit::{multiplexed_rotation, UnitaryMatrix};
use blockenc::families;
use blockenc::schemes::{self, alpha_p, BlockEncoding};
use blockenc::structure::{compile, derive_counts, StructureSpec};
use blockenc::verify::{dense_from_structure, extract_block};
use common::*;
use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Family {
    Checkerboard { zero_corners: bool },
    Toeplitz { d: usize, k: usize, circulant: bool },
    Tridiagonal,
    BinaryTree,
}

fn family_strategy() -> impl Strategy<Value = (Family, usize, u64)> {
    (0usize..4, 1u32..6, any::<u64>(), any::<bool>(), 1usize..8, 0usize..8).prop_filter_map(
        "admissible instance",
        |(which, log_n, seed, flag, d, k)| {
            let n = 1usize << log_n;
            let family = match which {
                0 => Family::Checkerboard { zero_corners: flag },
                1 => {
                    let d = 1 + (d - 1) % n;
                    Family::Toeplitz {
                        d,
                        k: k % d,
                        circulant: flag,
                    }
                }
                2 => Family::Tridiagonal,
                _ if n >= 8 => Family::BinaryTree,
                _ => return None,
            };
            Some((family, n, seed))
        },
    )
}

fn build_instance(family: &Family, n: usize, seed: u64) -> (StructureSpec, Array2<f64>) {
    let mut rng = rng(seed);
    match *family {
        Family::Checkerboard { zero_corners } => {
            let v = random_values(&mut rng, 2);
            (
                families::checkerboard(n, v[0], v[1], zero_corners).unwrap(),
                checkerboard_direct(n, v[0], v[1], zero_corners),
            )
        }
        Family::Toeplitz { d, k, circulant } => {
            let v = random_values(&mut rng, d);
            (
                families::toeplitz(n, k, &v, circulant).unwrap(),
                toeplitz_direct(n, k, &v, circulant),
            )
        }
        Family::Tridiagonal => {
            let v = random_values(&mut rng, 2 * n - 1);
            (families::tridiagonal(n, &v, true).unwrap(), tridiagonal_direct(n, &v))
        }
        Family::BinaryTree => {
            let v = random_values(&mut rng, 3);
            (
                families::binary_tree(n, v[0], v[1], v[2]).unwrap(),
                binary_tree_direct(n, v[0], v[1], v[2]),
            )
        }
    }
}

/// Dense matrix read back from the compiled oracle tables alone.
fn dense_from_tables(spec: &StructureSpec) -> Array2<f64> {
    let c = compile(spec).unwrap();
    let t = &c.tables;
    let n = spec.n();
    let mut a = Array2::zeros((n, n));
    for x in 0..t.shape.label_count() {
        let (d, _) = t.decode_label(x).unwrap();
        if d < spec.d() && !t.range_flags[x] {
            a[[t.row_perm[x] % n, t.col_perm[x] % n]] = spec.values()[d];
        }
    }
    a
}

/// Orthogonal matrix from Gram–Schmidt on a seeded random matrix.
fn random_orthogonal(dim: usize, seed: u64) -> Array2<f64> {
    let raw = Array2::from_shape_vec((dim, dim), random_values(&mut rng(seed), dim * dim)).unwrap();
    let mut q = Array2::<f64>::zeros((dim, dim));
    for j in 0..dim {
        let mut v = raw.column(j).to_owned();
        for k in 0..j {
            let qk = q.column(k).to_owned();
            v = &v - &(&qk * qk.dot(&v));
        }
        let norm = v.dot(&v).sqrt();
        q.column_mut(j).assign(&(v / norm));
    }
    q
}

/// `V·U·Wᵀ` with `V`, `W` acting only on the flag ≠ 0 subspace.
fn rotate_junk(enc: &BlockEncoding, seed: u64) -> BlockEncoding {
    let dim = enc.unitary.dim();
    let block = enc.layout.block_indices();
    let junk: Vec<usize> = (0..dim).filter(|i| !block.contains(i)).collect();
    let embed = |q: &Array2<f64>| {
        let mut m = Array2::<Complex64>::eye(dim);
        for (a, &i) in junk.iter().enumerate() {
            for (b, &j) in junk.iter().enumerate() {
                m[[i, j]] = Complex64::new(q[[a, b]], 0.0);
            }
        }
        m
    };
    let v = embed(&random_orthogonal(junk.len(), seed));
    let w = embed(&random_orthogonal(junk.len(), seed ^ 0x5eed));
    let u = v.dot(enc.unitary.matrix()).dot(&w.t());
    BlockEncoding {
        unitary: UnitaryMatrix::new(u).unwrap(),
        ..enc.clone()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dense_matches_direct_constructor((family, n, seed) in family_strategy()) {
        let (spec, direct) = build_instance(&family, n, seed);
        let dense = dense_from_structure(&spec).unwrap();
        prop_assert!(dense.iter().zip(&direct).all(|(x, y)| x.to_bits() == y.to_bits()));
        prop_assert_eq!(dense_from_tables(&spec), direct);
    }

    #[test]
    fn nonzeros_equal_total_multiplicity((family, n, seed) in family_strategy()) {
        let (spec, dense) = build_instance(&family, n, seed);
        let counts = derive_counts(&spec).unwrap();
        prop_assert_eq!(dense.iter().filter(|x| **x != 0.0).count(), spec.labels().len());
        prop_assert_eq!(counts.nonzeros, spec.labels().len());
        if spec.has_transpose() {
            prop_assert_eq!(&dense, &dense.t().to_owned());
        }
    }

    #[test]
    fn alpha_p_below_base(values in proptest::collection::vec(-1.0f64..1.0, 1..16), p in 0.0f64..=1.0, s in 1usize..6) {
        prop_assume!(values.iter().any(|v| *v != 0.0));
        let d = values.len();
        let (s_c, s_r) = (s * d, 2 * s * d);
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(alpha_p(&values, s_c, s_r, p) <= ((s_c * s_r) as f64).sqrt() * max * (1.0 + 1e-12));
    }

    #[test]
    fn rotation_inverse_is_identity(values in proptest::collection::vec(-1.0f64..1.0, 1..9)) {
        let norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assume!(norm > 0.0);
        let r = multiplexed_rotation(&values, norm, 1.0, true).unwrap();
        let product = r.adjoint().dot(&r);
        let id = UnitaryMatrix::identity(r.dim());
        let err = product.matrix().iter().zip(id.matrix()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        prop_assert!(err < 1e-12);
    }
}

#[test]
fn junk_basis_does_not_change_block() {
    let spec = families::toeplitz(4, 1, &[0.5, -1.0, 0.25, 0.75], false).unwrap();
    let c = compile(&spec).unwrap();
    for enc in [
        schemes::build_base(&c).unwrap(),
        schemes::build_prep_unprep(&c, 0.5).unwrap(),
    ] {
        let b = extract_block(&enc).unwrap();
        for seed in [1, 2] {
            let rotated = rotate_junk(&enc, seed);
            assert!(rotated.unitary.unitarity_defect() < 1e-10);
            assert!(max_abs_diff(&extract_block(&rotated).unwrap(), &b) < 1e-12);
            assert!(max_abs_diff(&rotated.unitary.real_part(), &enc.unitary.real_part()) > 1e-3);
        }
    }
}

/// `B = Σ_{d,m} (A_d/‖A‖_max)(1/S)|i(d,m)⟩⟨j(d,m)|` when every column and row has `S` entries.
fn resolution_of_identity(spec: &StructureSpec, s: usize) -> Array2<f64> {
    let n = spec.n();
    let max = spec.max_abs_value();
    let mut b = Array2::zeros((n, n));
    for (d, m) in spec.labels() {
        let (i, j) = spec.position(d, m).unwrap();
        b[[i, j]] += spec.values()[d] / max / s as f64;
    }
    b
}

#[test]
fn base_block_matches_resolution_of_identity() {
    let cases = vec![
        (families::toeplitz(8, 2, &[0.4, -0.9, 0.3, 0.6], true).unwrap(), 4),
        (families::toeplitz(4, 0, &[1.0, 0.5, -0.25, 0.125], true).unwrap(), 4),
        (families::checkerboard(4, 0.3, -0.8, false).unwrap(), 4),
        (families::checkerboard(8, 1.0, 2.0, false).unwrap(), 8),
    ];
    for (spec, s) in cases {
        let enc = schemes::build_base(&compile(&spec).unwrap()).unwrap();
        let diff = max_abs_diff(&extract_block(&enc).unwrap(), &resolution_of_identity(&spec, s));
        assert!(diff < 1e-12, "{}: {diff:e}", spec.name());
    }
}
