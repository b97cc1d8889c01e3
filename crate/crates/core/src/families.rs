//! Built-in structured families and their hand-written circuits.
//!
//! The constructors return [`StructureSpec`]s for the generic pipeline. The
//! circuit builders further down assemble the compact family-specific circuits
//! directly from register arithmetic, so the two routes can be compared.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    complexify, compose, diffusion_real, hadamard_transform, pauli_x, pauli_z, prep_real, rotation_blocks,
    rx_from_amplitude, sign_oracle, Gate, PlacedBlock, RegisterId, RegisterLayout, Role, UnitaryMatrix,
};
use crate::error::{Error, Result};
use crate::schemes::{finish, Accuracy, BlockEncoding, SchemeTag};
use crate::structure::StructureSpec;

/// Checkerboard: `A₀` where `i + j` is even, `A₁` where it is odd.
pub fn checkerboard(n: usize, a0: f64, a1: f64, zero_corners: bool) -> Result<StructureSpec> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::BadN(n));
    }
    let half = n / 2;
    let extent = n * n / 2;
    let row = move |_d: usize, m: usize| m / half;
    let col = move |d: usize, m: usize| 2 * (m % half) + (d + m / half) % 2;
    let mut spec = StructureSpec::new(
        "checkerboard",
        n,
        vec![a0, a1],
        extent,
        Arc::new(move |d, m| row(d, m) as i64),
        Arc::new(move |d, m| col(d, m) as i64),
    )?
    .with_transpose(Arc::new(move |d, m| (d, half * col(d, m) + row(d, m) / 2)));
    if !(zero_corners && n == 2) {
        spec = spec.with_prep_factor(Arc::new(move |_, m| m / n), Arc::new(move |_, m| m % half));
    }
    if zero_corners {
        spec = spec.with_range(Arc::new(move |d, m| !(d == 0 && (m == 0 || m == extent - 1))));
    }
    Ok(spec)
}

/// Banded Toeplitz with `A_d` on diagonal `d − k`; `circulant` wraps rows mod `N`.
pub fn toeplitz(n: usize, k: usize, values: &[f64], circulant: bool) -> Result<StructureSpec> {
    let d_count = values.len();
    if d_count == 0 || d_count > n {
        return Err(Error::BadShape(format!("need 1 <= D <= N, got D={d_count}, N={n}")));
    }
    if k >= d_count {
        return Err(Error::BadShape(format!("offset k={k} must be below D={d_count}")));
    }
    let ni = n as i64;
    let ki = k as i64;
    let row = move |d: usize, m: usize| {
        let i = d as i64 - ki + m as i64;
        if circulant {
            i.rem_euclid(ni)
        } else {
            i
        }
    };
    let mut spec = StructureSpec::new(
        if circulant { "circulant" } else { "toeplitz" },
        n,
        values.to_vec(),
        n,
        Arc::new(row),
        Arc::new(|_, m| m as i64),
    )?
    .with_prep_factor(Arc::new(|_, _| 0), Arc::new(|_, _| 0));
    if !circulant {
        spec = spec.with_range(Arc::new(move |d, m| (0..ni).contains(&row(d, m))));
    }
    Ok(spec)
}

/// Symmetric tridiagonal: even `d` on the diagonal, odd `d` on the pair of
/// off-diagonal entries `(⌊d/2⌋, ⌊d/2⌋+1)` and its transpose.
pub fn tridiagonal(n: usize, values: &[f64], with_transpose: bool) -> Result<StructureSpec> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::BadN(n));
    }
    if values.len() != 2 * n - 1 {
        return Err(Error::BadShape(format!(
            "tridiagonal N={n} needs {} values, got {}",
            2 * n - 1,
            values.len()
        )));
    }
    let slot = Arc::new(|d: usize, m: usize| 2 * m + d % 2);
    let spec = StructureSpec::new(
        "tridiagonal",
        n,
        values.to_vec(),
        2,
        Arc::new(|d, m| (d / 2 + m) as i64),
        Arc::new(|d, m| (d / 2 + if m == 0 { d % 2 } else { 0 }) as i64),
    )?
    .with_range(Arc::new(|d, m| !(d % 2 == 0 && m == 1)))
    .with_slots(slot.clone(), slot);
    Ok(if with_transpose {
        spec.with_transpose(Arc::new(|d, m| if d % 2 == 1 { (d, 1 - m) } else { (d, m) }))
    } else {
        spec
    })
}

/// Row slot of the binary-tree labelling: 0 on the diagonal, 1 for the parent, `2 + m mod 2` for children.
fn binary_tree_row_slot(n: usize, d: usize, m: usize) -> usize {
    match d {
        0 | 1 => 0,
        _ if m > n => 1,
        _ => 2 + m % 2,
    }
}

/// Adjacency of the extended binary tree with weights `A₀` (root and leaves),
/// `A₁` (inner nodes) and `A₂` (edges). Node 0 has the single child 1; node
/// `k ≥ 1` has children `2k` and `2k+1`.
pub fn binary_tree(n: usize, a0: f64, a1: f64, a2: f64) -> Result<StructureSpec> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::BadN(n));
    }
    let half = n / 2;
    let row = move |d: usize, m: usize| match d {
        0 | 1 => m,
        _ if m < n => m / 2,
        _ => m - n,
    };
    let tau = move |d: usize, m: usize| if d == 2 { (d, m ^ n) } else { (d, m) };
    let col = move |d: usize, m: usize| {
        let (d2, m2) = tau(d, m);
        row(d2, m2)
    };
    let in_range = move |d: usize, m: usize| match d {
        0 => m == 0 || (half..n).contains(&m),
        1 => (1..half).contains(&m),
        _ => m != 0 && m != n,
    };
    Ok(StructureSpec::new(
        "binary_tree",
        n,
        vec![a0, a1, a2],
        2 * n,
        Arc::new(move |d, m| row(d, m) as i64),
        Arc::new(move |d, m| col(d, m) as i64),
    )?
    .with_range(Arc::new(in_range))
    .with_transpose(Arc::new(tau))
    .with_slots(
        Arc::new(move |d, m| {
            let (d2, m2) = tau(d, m);
            binary_tree_row_slot(n, d2, m2)
        }),
        Arc::new(move |d, m| binary_tree_row_slot(n, d, m)),
    ))
}

/// Family selection as accepted by the command line and JSON descriptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyDescription {
    Checkerboard {
        n: usize,
        values: Vec<f64>,
        #[serde(default)]
        zero_corners: bool,
    },
    Toeplitz {
        n: usize,
        k: usize,
        values: Vec<f64>,
        #[serde(default)]
        circulant: bool,
    },
    Tridiagonal {
        n: usize,
        values: Vec<f64>,
        #[serde(default = "default_true")]
        with_transpose: bool,
    },
    BinaryTree {
        n: usize,
        values: Vec<f64>,
    },
}

fn default_true() -> bool {
    true
}

impl FamilyDescription {
    pub fn n(&self) -> usize {
        match self {
            FamilyDescription::Checkerboard { n, .. }
            | FamilyDescription::Toeplitz { n, .. }
            | FamilyDescription::Tridiagonal { n, .. }
            | FamilyDescription::BinaryTree { n, .. } => *n,
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            FamilyDescription::Checkerboard { values, .. }
            | FamilyDescription::Toeplitz { values, .. }
            | FamilyDescription::Tridiagonal { values, .. }
            | FamilyDescription::BinaryTree { values, .. } => values,
        }
    }

    /// Number of values the family expects.
    pub fn value_count(&self) -> usize {
        match self {
            FamilyDescription::Checkerboard { .. } => 2,
            FamilyDescription::Toeplitz { values, .. } => values.len(),
            FamilyDescription::Tridiagonal { n, .. } => 2 * n - 1,
            FamilyDescription::BinaryTree { .. } => 3,
        }
    }

    pub fn to_spec(&self) -> Result<StructureSpec> {
        let expect = |values: &[f64], count: usize| {
            if values.len() == count {
                Ok(())
            } else {
                Err(Error::BadShape(format!("expected {count} values, got {}", values.len())))
            }
        };
        match self {
            FamilyDescription::Checkerboard { n, values, zero_corners } => {
                expect(values, 2)?;
                checkerboard(*n, values[0], values[1], *zero_corners)
            }
            FamilyDescription::Toeplitz { n, k, values, circulant } => toeplitz(*n, *k, values, *circulant),
            FamilyDescription::Tridiagonal {
                n,
                values,
                with_transpose,
            } => tridiagonal(*n, values, *with_transpose),
            FamilyDescription::BinaryTree { n, values } => {
                expect(values, 3)?;
                binary_tree(*n, values[0], values[1], values[2])
            }
        }
    }
}

/// Permutation on the joint space of registers with dimensions `dims`
/// (first most significant), given as a map on register values.
fn perm_from_fn(dims: &[usize], f: impl Fn(&[usize]) -> Vec<usize>) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let encode = |v: &[usize]| v.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![0; dims.len()];
            for r in (0..dims.len()).rev() {
                v[r] = idx % dims[r];
                idx /= dims[r];
            }
            encode(&f(&v))
        })
        .collect()
}

/// Flags on the joint space of registers with dimensions `dims`.
fn flags_from_fn(dims: &[usize], f: impl Fn(&[usize]) -> bool) -> Vec<Option<usize>> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut v = vec![0; dims.len()];
            for r in (0..dims.len()).rev() {
                v[r] = idx % dims[r];
                idx /= dims[r];
            }
            f(&v).then_some(0)
        })
        .collect()
}

fn x_gate(selector: Vec<RegisterId>, choice: Vec<Option<usize>>) -> Gate<Complex64> {
    Gate::Multiplexed {
        blocks: vec![complexify(&pauli_x())],
        choice,
        selector,
    }
}

fn max_abs(values: &[f64]) -> Result<f64> {
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        Err(Error::AllZeroValues)
    } else {
        Ok(m)
    }
}

/// Rotation blocks for `values` plus a zero-load block at index `values.len()`.
fn rotations_with_zero(values: &[f64], norm: f64) -> Result<Vec<Array2<Complex64>>> {
    let mut blocks = rotation_blocks(values, norm, 1.0, true)?;
    blocks.push(rx_from_amplitude(0.0));
    Ok(blocks)
}

fn family_encoding(layout: RegisterLayout, gates: &[PlacedBlock<Complex64>], alpha: f64, d: usize) -> Result<BlockEncoding> {
    let u = UnitaryMatrix::new(compose(&layout, gates)?)?;
    Ok(finish(layout, u, alpha, d as f64, SchemeTag::FamilyCircuit, Accuracy::Exact))
}

/// Checkerboard circuit: `H_N`, a swap and one CNOT realise `O_c†`; `O_r` is trivial.
pub fn checkerboard_circuit(n: usize, a0: f64, a1: f64, zero_corners: bool) -> Result<BlockEncoding> {
    checkerboard(n, a0, a1, zero_corners)?;
    let half = n / 2;
    let values = [a0, a1];
    let norm = max_abs(&values)?;
    let mut layout = RegisterLayout::new();
    let data = layout.push("data", Role::Data, 2);
    let del = zero_corners.then(|| layout.push("del", Role::Del, 2));
    let g = layout.push("g", Role::S, 2);
    let hlo = layout.push("hlo", Role::S, half);
    let block = layout.push("block", Role::Block, half);
    let block0 = layout.push("block0", Role::Block, 2);
    let h = complexify(&hadamard_transform(n));
    let swap = perm_from_fn(&[half, half], |v| vec![v[1], v[0]]);
    let mut gates = vec![
        PlacedBlock::dense(h.clone(), vec![g, hlo]),
        PlacedBlock::permutation(swap, vec![hlo, block]),
        PlacedBlock::dense(complexify(&pauli_x()), vec![block0]).controlled(g, 1),
    ];
    if let Some(del) = del {
        let last = n * n / 2 - 1;
        let flags = flags_from_fn(&[2, half, 2, half], |v| {
            let m = v[1] * n + v[2] * half + v[3];
            v[0] == 0 && (m == 0 || m == last)
        });
        gates.push(PlacedBlock::new(x_gate(vec![g, block, block0, hlo], flags), vec![del]));
    }
    gates.push(PlacedBlock::new(
        Gate::Multiplexed {
            blocks: rotation_blocks(&values, norm, 1.0, true)?,
            choice: vec![Some(0), Some(1)],
            selector: vec![g],
        },
        vec![data],
    ));
    gates.push(PlacedBlock::dense(complexify(&pauli_z()), vec![data]));
    gates.push(PlacedBlock::dense(h, vec![g, hlo]));
    family_encoding(layout, &gates, n as f64 * norm, 2)
}

/// Checkerboard PREP/UNPREP circuit with `α = (N/2)(|A₀| + |A₁|)`.
pub fn checkerboard_prep_circuit(n: usize, a0: f64, a1: f64) -> Result<BlockEncoding> {
    checkerboard(n, a0, a1, false)?;
    let half = n / 2;
    let values = [a0, a1];
    let prep = prep_real(&values, 0.5, true)?;
    let unprep = prep.t().dot(&sign_oracle(&values));
    let mut layout = RegisterLayout::new();
    let d = layout.push("d", Role::Flag, 2);
    let lo = layout.push("lo", Role::Flag, half);
    let hi = layout.push("hi", Role::Block, half);
    let mid = layout.push("mid", Role::Block, 2);
    let h = hadamard_transform(half);
    let swap = perm_from_fn(&[half, half], |v| vec![v[1], v[0]]);
    let gates: Vec<PlacedBlock<f64>> = vec![
        PlacedBlock::dense(prep, vec![d]),
        PlacedBlock::dense(h.clone(), vec![lo]),
        PlacedBlock::permutation(swap, vec![lo, hi]),
        PlacedBlock::dense(pauli_x(), vec![mid]).controlled(d, 1),
        PlacedBlock::dense(unprep, vec![d]),
        PlacedBlock::dense(h, vec![lo]),
    ];
    let u = UnitaryMatrix::from_real(&compose(&layout, &gates)?);
    let alpha = half as f64 * (a0.abs() + a1.abs());
    Ok(finish(layout, u, alpha, 2.0, SchemeTag::FamilyCircuit, Accuracy::Exact))
}

/// Which banded Toeplitz circuit to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToeplitzCircuit {
    /// Separate `O_c†`, `O_rg` (with an overflow ancilla) and `O_r`.
    ThreeOracle,
    /// `+d`, `−k` on `(block, del)` with `del` as the overflow bit.
    Merged,
}

/// Banded Toeplitz circuit with `α = D·‖A‖_max`.
pub fn toeplitz_circuit(n: usize, k: usize, values: &[f64], variant: ToeplitzCircuit) -> Result<BlockEncoding> {
    toeplitz(n, k, values, false)?;
    let dd = values.len();
    let norm = max_abs(values)?;
    let greg = dd.next_power_of_two();
    let support: Vec<usize> = (0..dd).collect();
    let h = diffusion_real(dd, &support, greg)?;
    let choice: Vec<Option<usize>> = (0..greg).map(|d| (d < dd).then_some(d)).collect();
    let rotation = |data: RegisterId, g: RegisterId| -> Result<PlacedBlock<Complex64>> {
        Ok(PlacedBlock::new(
            Gate::Multiplexed {
                blocks: rotation_blocks(values, norm, 1.0, true)?,
                choice: choice.clone(),
                selector: vec![g],
            },
            vec![data],
        ))
    };
    let two_n = 2 * n;
    // Adders on (block, high bit) read as v = high·N + block.
    let add_ctrl = |sign: i64| {
        perm_from_fn(&[greg, n, 2], move |v| {
            let x = (v[2] * n + v[1]) as i64 + sign * v[0] as i64;
            let x = x.rem_euclid(two_n as i64) as usize;
            vec![v[0], x % n, x / n]
        })
    };
    let add_const = |c: i64| {
        perm_from_fn(&[n, 2], move |v| {
            let x = ((v[1] * n + v[0]) as i64 + c).rem_euclid(two_n as i64) as usize;
            vec![x % n, x / n]
        })
    };
    let ki = k as i64;
    let mut layout = RegisterLayout::new();
    let gates = match variant {
        ToeplitzCircuit::ThreeOracle => {
            let data = layout.push("data", Role::Data, 2);
            let del = layout.push("del", Role::Del, 2);
            let g = layout.push("g", Role::S, greg);
            let block = layout.push("block", Role::Block, n);
            let overflow = layout.push("overflow", Role::Ancilla, 2);
            let add_mod_n = perm_from_fn(&[greg, n], move |v| vec![v[0], (v[1] + v[0]) % n]);
            let sub_k_mod_n = perm_from_fn(&[n], move |v| vec![(v[0] + n - k % n) % n]);
            vec![
                PlacedBlock::dense(complexify(&h), vec![g]),
                PlacedBlock::permutation(add_ctrl(1), vec![g, block, overflow]),
                PlacedBlock::permutation(add_const(-ki), vec![block, overflow]),
                PlacedBlock::dense(complexify(&pauli_x()), vec![del]).controlled(overflow, 1),
                PlacedBlock::permutation(add_const(ki), vec![block, overflow]),
                PlacedBlock::permutation(add_ctrl(-1), vec![g, block, overflow]),
                rotation(data, g)?,
                PlacedBlock::permutation(add_mod_n, vec![g, block]),
                PlacedBlock::permutation(sub_k_mod_n, vec![block]),
                PlacedBlock::dense(complexify(&h.t().to_owned()), vec![g]),
            ]
        }
        ToeplitzCircuit::Merged => {
            let data = layout.push("data", Role::Data, 2);
            let g = layout.push("g", Role::S, greg);
            let block = layout.push("block", Role::Block, n);
            let del = layout.push("del", Role::Del, 2);
            vec![
                PlacedBlock::dense(complexify(&h), vec![g]),
                rotation(data, g)?,
                PlacedBlock::permutation(add_ctrl(1), vec![g, block, del]),
                PlacedBlock::permutation(add_const(-ki), vec![block, del]),
                PlacedBlock::dense(complexify(&h.t().to_owned()), vec![g]),
            ]
        }
    };
    family_encoding(layout, &gates, dd as f64 * norm, dd)
}

/// Which tridiagonal circuit to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TridiagonalCircuit {
    /// Keeps the `del` flag and both range CNOTs.
    WithDel,
    /// Drops `del` and loads a zero for `d = 2N−1`.
    Simplified,
    /// Hermitian variant built from the transposition `cnot s1 | s0`.
    Hermitian,
}

/// Tridiagonal circuit on `(s1, s0, block)` with `H_3` preparing slots `{0, 1, 3}`; `α = 3·‖A‖_max`.
pub fn tridiagonal_circuit(n: usize, values: &[f64], variant: TridiagonalCircuit) -> Result<BlockEncoding> {
    tridiagonal(n, values, false)?;
    let norm = max_abs(values)?;
    let dd = values.len();
    let h3 = diffusion_real(3, &[0, 1, 3], 4)?;
    let mut layout = RegisterLayout::new();
    let data = layout.push("data", Role::Data, 2);
    let del = (variant == TridiagonalCircuit::WithDel).then(|| layout.push("del", Role::Del, 2));
    let s1 = layout.push("s1", Role::S, 2);
    let s0 = layout.push("s0", Role::S, 2);
    let block = layout.push("block", Role::Block, n);
    // ±1 on block when s0 = 1 and s1 = 0.
    let shift = |delta: usize| {
        perm_from_fn(&[2, 2, n], move |v| {
            let b = if v[0] == 0 && v[1] == 1 { (v[2] + delta) % n } else { v[2] };
            vec![v[0], v[1], b]
        })
    };
    let rotation = PlacedBlock::new(
        Gate::Multiplexed {
            blocks: rotations_with_zero(values, norm)?,
            choice: (0..2 * n).map(|d| Some(d.min(dd))).collect(),
            selector: vec![block, s0],
        },
        vec![data],
    );
    let mut gates = vec![
        PlacedBlock::dense(complexify(&h3), vec![s1, s0]),
        PlacedBlock::permutation(shift(n - 1), vec![s1, s0, block]),
    ];
    match variant {
        TridiagonalCircuit::WithDel | TridiagonalCircuit::Simplified => {
            if let Some(del) = del {
                let first = flags_from_fn(&[2, 2], |v| v[0] == 1 && v[1] == 0);
                let second = flags_from_fn(&[2, n], |v| v[0] == 1 && v[1] == n - 1);
                gates.push(PlacedBlock::new(x_gate(vec![s1, s0], first), vec![del]));
                gates.push(PlacedBlock::new(x_gate(vec![s0, block], second), vec![del]));
            }
            gates.push(rotation);
            let inc = perm_from_fn(&[2, n], move |v| vec![v[0], if v[0] == 1 { (v[1] + 1) % n } else { v[1] }]);
            gates.push(PlacedBlock::permutation(inc, vec![s1, block]));
        }
        TridiagonalCircuit::Hermitian => {
            gates.push(PlacedBlock::dense(complexify(&pauli_z()), vec![data]));
            gates.push(rotation);
            gates.push(PlacedBlock::dense(complexify(&pauli_x()), vec![s1]).controlled(s0, 1));
            gates.push(PlacedBlock::permutation(shift(1), vec![s1, s0, block]));
        }
    }
    gates.push(PlacedBlock::dense(complexify(&h3.t().to_owned()), vec![s1, s0]));
    family_encoding(layout, &gates, 3.0 * norm, dd)
}

/// Bits `(dhi, dlo, mhi, mmid, mlo)` of a binary-tree work index `d·2N + m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TreeBits {
    dhi: usize,
    dlo: usize,
    mhi: usize,
    mmid: usize,
    mlo: usize,
}

impl TreeBits {
    fn decode(n: usize, x: usize) -> Self {
        let half = n / 2;
        TreeBits {
            dhi: x / (4 * n),
            dlo: (x / (2 * n)) % 2,
            mhi: (x / n) % 2,
            mmid: (x / half) % 2,
            mlo: x % half,
        }
    }

    fn encode(self, n: usize) -> usize {
        self.dhi * 4 * n + self.dlo * 2 * n + self.mhi * n + self.mmid * (n / 2) + self.mlo
    }
}

/// Row oracle of the binary tree as a gate network on `8N` work indices;
/// output `s_r·N + i` with `s_r = (dhi, dlo, mhi)` and `i = (mmid, mlo)`.
pub fn binary_tree_row_network(n: usize) -> Vec<usize> {
    let half = n / 2;
    (0..8 * n)
        .map(|x| {
            let mut b = TreeBits::decode(n, x);
            if b.dhi == 0 {
                b.dlo ^= 1;
            }
            if b.dhi == 0 && b.mmid == 0 && b.mlo == 0 {
                b.dlo ^= 1;
            }
            if b.mmid == 1 && b.dhi == 0 {
                b.dlo ^= 1;
            }
            if b.dhi == 1 && b.mhi == 0 {
                b.dlo ^= 1;
            }
            if b.dlo == 1 {
                // Rotate (mhi, mmid, mlo) down by one bit: the lowest bit moves to mhi.
                let v = b.mhi * n + b.mmid * half + b.mlo;
                let r = (v & 1) * n + (v >> 1);
                b.mhi = r / n;
                b.mmid = (r / half) % 2;
                b.mlo = r % half;
            }
            if b.mhi == 1 {
                b.dhi ^= 1;
            }
            if b.dlo == 1 && b.mhi == 0 {
                b.dhi ^= 1;
            }
            b.encode(n)
        })
        .collect()
}

/// Out-of-range oracle of the binary tree as a gate network on `8N` work indices.
pub fn binary_tree_range_network(n: usize) -> Vec<bool> {
    (0..8 * n)
        .map(|x| {
            let b = TreeBits::decode(n, x);
            let m_low_zero = b.mlo == 0;
            let mut del = false;
            let mut toggle = |c: bool| del ^= c;
            toggle(b.mhi == 1 && b.dhi == 0 && b.dlo == 0);
            toggle(b.mhi == 0 && b.mmid == 0 && b.dhi == 0 && b.dlo == 0);
            toggle(b.mhi == 0 && b.mmid == 0 && m_low_zero && b.dhi == 0 && b.dlo == 0);
            toggle(b.dlo == 1 && b.dhi == 0 && b.mhi == 0 && b.mmid == 0 && m_low_zero);
            toggle(b.dlo == 1 && b.mmid == 1 && b.dhi == 0);
            toggle(b.dlo == 1 && b.mhi == 1 && b.dhi == 0 && b.mmid == 0);
            toggle(b.dhi == 1 && b.dlo == 0 && b.mmid == 0 && m_low_zero);
            toggle(b.dhi == 1 && b.dlo == 1);
            del
        })
        .collect()
}

/// Transposition of the binary tree: `cnot mhi | dhi`.
pub fn binary_tree_transpose_network(n: usize) -> Vec<usize> {
    (0..8 * n)
        .map(|x| {
            let mut b = TreeBits::decode(n, x);
            b.mhi ^= b.dhi;
            b.encode(n)
        })
        .collect()
}

/// Hermitian binary-tree encoding from the gate networks, with `α = 4·‖A‖_max`.
pub fn binary_tree_circuit(n: usize, a0: f64, a1: f64, a2: f64) -> Result<BlockEncoding> {
    binary_tree(n, a0, a1, a2)?;
    let values = [a0, a1, a2];
    let norm = max_abs(&values)?;
    let row = binary_tree_row_network(n);
    let tau = binary_tree_transpose_network(n);
    let flags: Vec<Option<usize>> = binary_tree_range_network(n).into_iter().map(|f| f.then_some(0)).collect();
    let mut layout = RegisterLayout::new();
    let data = layout.push("data", Role::Data, 2);
    let del = layout.push("del", Role::Del, 2);
    let dhi = layout.push("dhi", Role::S, 2);
    let dlo = layout.push("dlo", Role::S, 2);
    let mhi = layout.push("mhi", Role::S, 2);
    let block = layout.push("block", Role::Block, n);
    let work = vec![dhi, dlo, mhi, block];
    let h = complexify(&hadamard_transform(4));
    let gates = vec![
        PlacedBlock::dense(h.clone(), vec![dlo, mhi]),
        PlacedBlock::permutation(crate::structure::invert(&row), work.clone()),
        PlacedBlock::permutation(tau.clone(), work.clone()),
        PlacedBlock::new(x_gate(work.clone(), flags), vec![del]),
        PlacedBlock::new(
            Gate::Multiplexed {
                blocks: rotation_blocks(&values, norm, 1.0, true)?,
                choice: vec![Some(0), Some(1), Some(2), None],
                selector: vec![dhi, dlo],
            },
            vec![data],
        ),
        PlacedBlock::dense(complexify(&pauli_z()), vec![data]),
        PlacedBlock::permutation(tau.clone(), work.clone()),
        PlacedBlock::permutation(tau, work.clone()),
        PlacedBlock::permutation(row, work),
        PlacedBlock::dense(h, vec![dlo, mhi]),
    ];
    family_encoding(layout, &gates, 4.0 * norm, 3)
}
