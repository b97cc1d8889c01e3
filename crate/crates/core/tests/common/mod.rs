//! Oracle-free reference matrices and shared helpers for integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn checkerboard_direct(n: usize, a0: f64, a1: f64, zero_corners: bool) -> Array2<f64> {
    let mut a = Array2::from_shape_fn((n, n), |(i, j)| if (i + j) % 2 == 0 { a0 } else { a1 });
    if zero_corners {
        a[[0, 0]] = 0.0;
        a[[n - 1, n - 1]] = 0.0;
    }
    a
}

/// `A[i][j] = values[i − j + k]` inside the band; `circulant` wraps `i − j` mod `N`.
pub fn toeplitz_direct(n: usize, k: usize, values: &[f64], circulant: bool) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        let mut diff = i as i64 - j as i64 + k as i64;
        if circulant {
            diff = diff.rem_euclid(n as i64);
        }
        if (0..values.len() as i64).contains(&diff) {
            values[diff as usize]
        } else {
            0.0
        }
    })
}

pub fn tridiagonal_direct(n: usize, values: &[f64]) -> Array2<f64> {
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        a[[i, i]] = values[2 * i];
        if i + 1 < n {
            a[[i, i + 1]] = values[2 * i + 1];
            a[[i + 1, i]] = values[2 * i + 1];
        }
    }
    a
}

/// Weighted adjacency of the tree with root 0 → 1 and node `k ≥ 1` → `2k, 2k+1`.
pub fn binary_tree_direct(n: usize, a0: f64, a1: f64, a2: f64) -> Array2<f64> {
    let mut a = Array2::zeros((n, n));
    for node in 0..n {
        let leaf = node >= n / 2;
        a[[node, node]] = if node == 0 || leaf { a0 } else { a1 };
        let children: Vec<usize> = if node == 0 { vec![1] } else { vec![2 * node, 2 * node + 1] };
        for c in children.into_iter().filter(|&c| c < n) {
            a[[node, c]] = a2;
            a[[c, node]] = a2;
        }
    }
    a
}

/// Values drawn uniformly from `[−1, 1] \ {0}`.
pub fn random_values(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| loop {
            let v: f64 = rng.gen_range(-1.0..=1.0);
            if v != 0.0 {
                break v;
            }
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Largest singular value from cyclic Jacobi diagonalisation of `AᵀA`.
pub fn operator_norm(a: &Array2<f64>) -> f64 {
    let mut m = a.t().dot(a);
    let n = m.nrows();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * m[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[[k, p]], m[[k, q]]);
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[[p, k]], m[[q, k]]);
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[[i, i]]).fold(0.0, f64::max).sqrt()
}

pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}
