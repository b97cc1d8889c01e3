//! Register layouts, elementary unitaries and dense circuit composition.
//!
//! Composition works row-block by row-block: each placed gate touches only the
//! rows of the running matrix that differ in its target registers, so a gate on
//! a `k`-dimensional target costs `O(k · dim²)` rather than a full `dim³` product.

use std::fmt;

use ndarray::{s, Array1, Array2, LinalgScalar};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

/// Scalars the composer works over: `f64` for real circuits, `Complex64` otherwise.
pub trait Scalar: LinalgScalar + Send + Sync + fmt::Debug + PartialEq {
    fn from_f64(x: f64) -> Self;
    fn conj(self) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// What a register is used for. Everything except `Block` and `Ancilla` is a flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Data,
    Data0,
    Data1,
    Del,
    S,
    Block,
    HermFlag,
    Amplification,
    /// Flag register of a hand-written circuit that has no generic role.
    Flag,
    /// Work qubit returned to |0⟩; not counted as a flag.
    Ancilla,
}

impl Role {
    pub fn is_flag(self) -> bool {
        !matches!(self, Role::Block | Role::Ancilla)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Register {
    pub name: String,
    pub role: Role,
    pub dim: usize,
}

pub type RegisterId = usize;

/// Ordered registers; the first register is the most significant.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, role: Role, dim: usize) -> RegisterId {
        assert!(dim.is_power_of_two(), "register dimensions are powers of two");
        self.registers.push(Register {
            name: name.into(),
            role,
            dim,
        });
        self.registers.len() - 1
    }

    /// A copy with one register prepended; old ids shift by one.
    pub fn with_prefix(&self, name: impl Into<String>, role: Role, dim: usize) -> Self {
        let mut out = RegisterLayout::new();
        out.push(name, role, dim);
        out.registers.extend(self.registers.iter().cloned());
        out
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }
    pub fn dim(&self, id: RegisterId) -> usize {
        self.registers[id].dim
    }
    pub fn total_dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }
    pub fn find(&self, name: &str) -> Option<RegisterId> {
        self.registers.iter().position(|r| r.name == name)
    }

    /// Index stride of each register.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.registers.len()];
        for r in (0..self.registers.len().saturating_sub(1)).rev() {
            strides[r] = strides[r + 1] * self.registers[r + 1].dim;
        }
        strides
    }

    pub fn flag_qubits(&self) -> usize {
        self.registers
            .iter()
            .filter(|r| r.role.is_flag())
            .map(|r| r.dim.trailing_zeros() as usize)
            .sum()
    }

    pub fn flag_names(&self) -> Vec<String> {
        self.registers
            .iter()
            .filter(|r| r.role.is_flag())
            .map(|r| r.name.clone())
            .collect()
    }

    pub fn block_dim(&self) -> usize {
        self.registers
            .iter()
            .filter(|r| r.role == Role::Block)
            .map(|r| r.dim)
            .product()
    }

    /// Full basis index of `|0…0, k⟩` for every block index `k`, where the block
    /// registers (in layout order) spell out `k` and every other register is zero.
    pub fn block_indices(&self) -> Vec<usize> {
        let strides = self.strides();
        let blocks: Vec<usize> = (0..self.registers.len())
            .filter(|&r| self.registers[r].role == Role::Block)
            .collect();
        (0..self.block_dim())
            .map(|mut k| {
                let mut idx = 0;
                for &r in blocks.iter().rev() {
                    let dim = self.registers[r].dim;
                    idx += (k % dim) * strides[r];
                    k /= dim;
                }
                idx
            })
            .collect()
    }

    fn offsets(&self, targets: &[RegisterId]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &t in targets {
            let dim = self.registers[t].dim;
            let stride = strides[t];
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..dim).map(move |v| o + v * stride))
                .collect();
        }
        offsets
    }

    /// Joint value of `regs` at full index `idx`.
    pub fn joint_value(&self, idx: usize, regs: &[RegisterId]) -> usize {
        let strides = self.strides();
        regs.iter().fold(0, |acc, &r| {
            acc * self.registers[r].dim + (idx / strides[r]) % self.registers[r].dim
        })
    }
}

/// Condition on one register holding a fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub register: RegisterId,
    pub value: usize,
}

/// An operation on the joint space of some target registers.
#[derive(Debug, Clone)]
pub enum Gate<T> {
    Dense(Array2<T>),
    /// `|t⟩ ↦ |perm[t]⟩`.
    Permutation(Vec<usize>),
    Diagonal(Vec<T>),
    /// `blocks[choice[v]]` on the targets where the selector registers hold `v`;
    /// `None` leaves that branch untouched.
    Multiplexed {
        blocks: Vec<Array2<T>>,
        choice: Vec<Option<usize>>,
        selector: Vec<RegisterId>,
    },
}

#[derive(Debug, Clone)]
pub struct PlacedBlock<T> {
    pub gate: Gate<T>,
    pub targets: Vec<RegisterId>,
    pub control: Option<Control>,
}

impl<T> PlacedBlock<T> {
    pub fn new(gate: Gate<T>, targets: Vec<RegisterId>) -> Self {
        PlacedBlock {
            gate,
            targets,
            control: None,
        }
    }

    pub fn controlled(mut self, register: RegisterId, value: usize) -> Self {
        self.control = Some(Control { register, value });
        self
    }

    pub fn dense(matrix: Array2<T>, targets: Vec<RegisterId>) -> Self {
        Self::new(Gate::Dense(matrix), targets)
    }

    pub fn permutation(perm: Vec<usize>, targets: Vec<RegisterId>) -> Self {
        Self::new(Gate::Permutation(perm), targets)
    }
}

/// Product of the placed blocks embedded in the layout, in circuit time order.
pub fn compose<T: Scalar>(layout: &RegisterLayout, blocks: &[PlacedBlock<T>]) -> Result<Array2<T>> {
    let dim = layout.total_dim();
    if dim > tolerance::MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            limit: tolerance::MAX_DENSE_DIM,
        });
    }
    let mut u = Array2::<T>::eye(dim);
    for block in blocks {
        apply(layout, &mut u, block)?;
    }
    Ok(u)
}

/// Left-multiplies `u` by one embedded gate.
pub fn apply<T: Scalar>(layout: &RegisterLayout, u: &mut Array2<T>, block: &PlacedBlock<T>) -> Result<()> {
    let dim = layout.total_dim();
    if u.nrows() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            found: u.nrows(),
        });
    }
    let n_regs = layout.registers().len();
    if block.targets.iter().any(|&t| t >= n_regs) {
        return Err(Error::InvalidParameter("target register out of range".into()));
    }
    let mut sorted = block.targets.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != block.targets.len() {
        return Err(Error::InvalidParameter("repeated target register".into()));
    }
    if let Some(c) = block.control {
        if block.targets.contains(&c.register) || c.register >= n_regs {
            return Err(Error::InvalidParameter("control overlaps targets".into()));
        }
    }
    let offsets = layout.offsets(&block.targets);
    let k = offsets.len();
    let strides = layout.strides();
    let in_targets = |idx: usize| {
        block
            .targets
            .iter()
            .any(|&t| (idx / strides[t]) % layout.dim(t) != 0)
    };
    let bases: Vec<usize> = (0..dim)
        .filter(|&idx| !in_targets(idx))
        .filter(|&idx| match block.control {
            Some(c) => (idx / strides[c.register]) % layout.dim(c.register) == c.value,
            None => true,
        })
        .collect();

    match &block.gate {
        Gate::Dense(g) => {
            check_square(g, k)?;
            apply_dense(u, g, &bases, &offsets);
        }
        Gate::Permutation(p) => {
            if p.len() != k {
                return Err(Error::DimMismatch {
                    expected: k,
                    found: p.len(),
                });
            }
            if !crate::structure::is_bijection(p) {
                return Err(Error::NotBijective(p.len()));
            }
            let old = u.clone();
            for &b in &bases {
                for (t, &pt) in p.iter().enumerate() {
                    if pt != t {
                        u.row_mut(b + offsets[pt]).assign(&old.row(b + offsets[t]));
                    }
                }
            }
        }
        Gate::Diagonal(diag) => {
            if diag.len() != k {
                return Err(Error::DimMismatch {
                    expected: k,
                    found: diag.len(),
                });
            }
            for &b in &bases {
                for (t, &f) in diag.iter().enumerate() {
                    if f != T::one() {
                        u.row_mut(b + offsets[t]).mapv_inplace(|x| x * f);
                    }
                }
            }
        }
        Gate::Multiplexed {
            blocks,
            choice,
            selector,
        } => {
            if selector.iter().any(|s| block.targets.contains(s)) {
                return Err(Error::InvalidParameter("selector overlaps targets".into()));
            }
            let sel_dim: usize = selector.iter().map(|&s| layout.dim(s)).product();
            if choice.len() != sel_dim {
                return Err(Error::DimMismatch {
                    expected: sel_dim,
                    found: choice.len(),
                });
            }
            for g in blocks {
                check_square(g, k)?;
            }
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
            for &b in &bases {
                if let Some(c) = choice[layout.joint_value(b, selector)] {
                    groups
                        .get_mut(c)
                        .ok_or_else(|| Error::InvalidParameter("multiplexor choice out of range".into()))?
                        .push(b);
                }
            }
            for (g, group) in blocks.iter().zip(&groups) {
                if !group.is_empty() {
                    apply_dense(u, g, group, &offsets);
                }
            }
        }
    }
    Ok(())
}

fn check_square<T>(g: &Array2<T>, k: usize) -> Result<()> {
    if g.nrows() != k || g.ncols() != k {
        return Err(Error::DimMismatch {
            expected: k,
            found: g.nrows(),
        });
    }
    Ok(())
}

fn apply_dense<T: Scalar>(u: &mut Array2<T>, g: &Array2<T>, bases: &[usize], offsets: &[usize]) {
    let k = offsets.len();
    let dim = u.ncols();
    if k <= 4 {
        let mut old: Vec<Array1<T>> = (0..k).map(|_| Array1::zeros(dim)).collect();
        for &b in bases {
            for t in 0..k {
                old[t].assign(&u.row(b + offsets[t]));
            }
            for (tp, gp) in g.rows().into_iter().enumerate() {
                let mut row = u.row_mut(b + offsets[tp]);
                row.fill(T::zero());
                for (t, &coef) in gp.iter().enumerate() {
                    if coef != T::zero() {
                        row.scaled_add(coef, &old[t]);
                    }
                }
            }
        }
        return;
    }
    // Gather several bases side by side and use one gemm per chunk.
    let chunk = ((1usize << 22) / (k * dim)).max(1);
    for group in bases.chunks(chunk) {
        let mut z = Array2::<T>::zeros((k, group.len() * dim));
        for (c, &b) in group.iter().enumerate() {
            for t in 0..k {
                z.slice_mut(s![t, c * dim..(c + 1) * dim]).assign(&u.row(b + offsets[t]));
            }
        }
        let y = g.dot(&z);
        for (c, &b) in group.iter().enumerate() {
            for t in 0..k {
                u.row_mut(b + offsets[t]).assign(&y.slice(s![t, c * dim..(c + 1) * dim]));
            }
        }
    }
}

/// Dense complex unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(Array2<Complex64>);

impl UnitaryMatrix {
    pub fn new(m: Array2<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(UnitaryMatrix(m))
    }
    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix(Array2::eye(dim))
    }
    pub fn from_real(m: &Array2<f64>) -> Self {
        UnitaryMatrix(m.mapv(|x| Complex64::new(x, 0.0)))
    }
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.0
    }
    pub fn into_inner(self) -> Array2<Complex64> {
        self.0
    }
    pub fn adjoint(&self) -> Self {
        UnitaryMatrix(self.0.t().mapv(|z| z.conj()))
    }
    pub fn dot(&self, other: &UnitaryMatrix) -> Self {
        UnitaryMatrix(self.0.dot(&other.0))
    }
    pub fn max_imag(&self) -> f64 {
        self.0.iter().fold(0.0, |a, z| a.max(z.im.abs()))
    }
    pub fn real_part(&self) -> Array2<f64> {
        self.0.mapv(|z| z.re)
    }

    /// `max |U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let dim = self.dim();
        if self.max_imag() == 0.0 {
            let r = self.real_part();
            let p = r.t().dot(&r);
            return max_identity_deviation(p.indexed_iter().map(|((i, j), &x)| (i, j, Complex64::new(x, 0.0))), dim);
        }
        let p = self.0.t().mapv(|z| z.conj()).dot(&self.0);
        max_identity_deviation(p.indexed_iter().map(|((i, j), &x)| (i, j, x)), dim)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// `max |U − U†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[[i, j]] - self.0[[j, i]].conj()).norm());
            }
        }
        worst
    }
}

fn max_identity_deviation(it: impl Iterator<Item = (usize, usize, Complex64)>, _dim: usize) -> f64 {
    it.fold(0.0, |a, (i, j, x)| {
        let target = if i == j { 1.0 } else { 0.0 };
        a.max((x - Complex64::new(target, 0.0)).norm())
    })
}

/// `|x|^p`, with zero for `x = 0` and every `p`.
pub fn pow_abs(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(p)
    }
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Normalised Walsh–Hadamard transform on `dim` (a power of two).
pub fn hadamard_transform(dim: usize) -> Array2<f64> {
    assert!(dim.is_power_of_two());
    let scale = 1.0 / (dim as f64).sqrt();
    Array2::from_shape_fn((dim, dim), |(i, j)| {
        if (i & j).count_ones() % 2 == 0 {
            scale
        } else {
            -scale
        }
    })
}

/// Orthogonal matrix whose first column is `first` (normalised), completed by
/// Gram–Schmidt against the standard basis in index order.
pub fn complete_orthonormal(first: &[f64]) -> Array2<f64> {
    let dim = first.len();
    let norm = first.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(norm > 0.0, "first column must be nonzero");
    let mut basis: Vec<Vec<f64>> = vec![first.iter().map(|x| x / norm).collect()];
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[e] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let overlap: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-6 {
            basis.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    Array2::from_shape_fn((dim, dim), |(i, j)| basis[j][i])
}

/// Real diffusion operator: first column uniform on `support`.
pub fn diffusion_real(s_eff: usize, support: &[usize], register_dim: usize) -> Result<Array2<f64>> {
    if support.len() != s_eff || s_eff == 0 || s_eff > register_dim || support.iter().any(|&s| s >= register_dim) {
        return Err(Error::SupportTooLarge {
            support: s_eff,
            dim: register_dim,
        });
    }
    let contiguous = support.iter().enumerate().all(|(k, &s)| k == s);
    if contiguous && s_eff.is_power_of_two() {
        let h = hadamard_transform(s_eff);
        let reps = register_dim / s_eff;
        let mut out = Array2::zeros((register_dim, register_dim));
        for r in 0..reps {
            out.slice_mut(s![r * s_eff..(r + 1) * s_eff, r * s_eff..(r + 1) * s_eff])
                .assign(&h);
        }
        return Ok(out);
    }
    let mut first = vec![0.0; register_dim];
    for &s in support {
        first[s] = 1.0;
    }
    Ok(complete_orthonormal(&first))
}

/// Diffusion `H_S`: `|0⟩ ↦ (1/√S_eff) Σ_{s∈support} |s⟩`.
pub fn diffusion(s_eff: usize, support: &[usize], register_dim: usize) -> Result<UnitaryMatrix> {
    diffusion_real(s_eff, support, register_dim).map(|m| UnitaryMatrix::from_real(&m))
}

/// `R_X(2 arccos v)`.
pub fn rx_from_amplitude(v: f64) -> Array2<Complex64> {
    let c = v.clamp(-1.0, 1.0);
    let sn = (1.0 - c * c).max(0.0).sqrt();
    let off = Complex64::new(0.0, -sn);
    ndarray::array![[Complex64::new(c, 0.0), off], [off, Complex64::new(c, 0.0)]]
}

/// Values `v_d` loaded by the multiplexed rotation.
pub fn loaded_values(values: &[f64], norm: f64, p: f64, signed: bool) -> Result<Vec<f64>> {
    if norm <= 0.0 || !norm.is_finite() {
        return Err(Error::InvalidParameter(format!("norm {norm} must be positive")));
    }
    let denom = norm.powf(p);
    values
        .iter()
        .enumerate()
        .map(|(d, &a)| {
            let mut v = pow_abs(a, p) / denom;
            if signed {
                v *= sign(a);
            }
            if v.abs() > 1.0 + tolerance::ROTATION_GUARD {
                return Err(Error::OutOfUnitRange { d, value: v });
            }
            Ok(v.clamp(-1.0, 1.0))
        })
        .collect()
}

/// One `R_X` block per value.
pub fn rotation_blocks(values: &[f64], norm: f64, p: f64, signed: bool) -> Result<Vec<Array2<Complex64>>> {
    Ok(loaded_values(values, norm, p, signed)?
        .into_iter()
        .map(rx_from_amplitude)
        .collect())
}

/// `O_data` on `data ⊗ d`: block `d` is `R_X(2 arccos v_d)`.
pub fn multiplexed_rotation(values: &[f64], norm: f64, p: f64, signed: bool) -> Result<UnitaryMatrix> {
    let blocks = rotation_blocks(values, norm, p, signed)?;
    let dd = values.len();
    let mut m = Array2::zeros((2 * dd, 2 * dd));
    for (d, b) in blocks.iter().enumerate() {
        for a in 0..2 {
            for c in 0..2 {
                m[[a * dd + d, c * dd + d]] = b[[a, c]];
            }
        }
    }
    UnitaryMatrix::new(m)
}

/// Real permutation matrix with `P|x⟩ = |perm[x]⟩`.
pub fn permutation_real(perm: &[usize]) -> Result<Array2<f64>> {
    if !crate::structure::is_bijection(perm) {
        return Err(Error::NotBijective(perm.len()));
    }
    let mut m = Array2::zeros((perm.len(), perm.len()));
    for (x, &y) in perm.iter().enumerate() {
        m[[y, x]] = 1.0;
    }
    Ok(m)
}

pub fn permutation_unitary(perm: &[usize]) -> Result<UnitaryMatrix> {
    permutation_real(perm).map(|m| UnitaryMatrix::from_real(&m))
}

pub fn pauli_x() -> Array2<f64> {
    ndarray::array![[0.0, 1.0], [1.0, 0.0]]
}

pub fn pauli_z() -> Array2<f64> {
    ndarray::array![[1.0, 0.0], [0.0, -1.0]]
}

/// `O_rg` as a multiplexed gate on `del`, selected by the work registers.
pub fn range_gate<T: Scalar>(range_flags: &[bool], selector: Vec<RegisterId>) -> Gate<T> {
    Gate::Multiplexed {
        blocks: vec![pauli_x().mapv(T::from_f64)],
        choice: range_flags.iter().map(|&f| f.then_some(0)).collect(),
        selector,
    }
}

/// `O_rg` on `del ⊗ work`: X on `del` wherever the label is flagged.
pub fn range_controlled_not(range_flags: &[bool]) -> UnitaryMatrix {
    let w = range_flags.len();
    let mut m = Array2::<f64>::zeros((2 * w, 2 * w));
    for (x, &f) in range_flags.iter().enumerate() {
        for del in 0..2 {
            let out = if f { 1 - del } else { del };
            m[[out * w + x, del * w + x]] = 1.0;
        }
    }
    UnitaryMatrix::from_real(&m)
}

/// First column of PREP: `Σ sgn(A_d)|A_d|^p |d⟩ / √Σ|A_d|^{2p}` (signs only when `signed`).
pub fn prep_amplitudes(values: &[f64], p: f64, signed: bool) -> Result<Vec<f64>> {
    let raw: Vec<f64> = values
        .iter()
        .map(|&a| if signed { sign(a) * pow_abs(a, p) } else { pow_abs(a, p) })
        .collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::AllZeroValues);
    }
    Ok(raw.into_iter().map(|x| x / norm).collect())
}

/// Real PREP unitary on the `d` register.
pub fn prep_real(values: &[f64], p: f64, signed: bool) -> Result<Array2<f64>> {
    Ok(complete_orthonormal(&prep_amplitudes(values, p, signed)?))
}

pub fn prep_isometry(values: &[f64], p: f64, signed: bool) -> Result<UnitaryMatrix> {
    prep_real(values, p, signed).map(|m| UnitaryMatrix::from_real(&m))
}

/// `diag(sgn A_d)`.
pub fn sign_oracle(values: &[f64]) -> Array2<f64> {
    Array2::from_diag(&Array1::from_iter(values.iter().map(|&a| sign(a))))
}

/// Kronecker product.
pub fn kron<T: Scalar>(a: &Array2<T>, b: &Array2<T>) -> Array2<T> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}

/// Direct sum `a ⊕ I` padded to `dim`.
pub fn pad_identity<T: Scalar>(a: &Array2<T>, dim: usize) -> Array2<T> {
    let k = a.nrows();
    let mut out = Array2::<T>::eye(dim);
    out.slice_mut(s![..k, ..k]).assign(a);
    out
}

/// Lifts a real matrix to complex entries.
pub fn complexify(a: &Array2<f64>) -> Array2<Complex64> {
    a.mapv(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::*;

    mod approx_eq {
        use ndarray::Array2;
        use num_complex::Complex64;
        pub fn max_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
            a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
        }
    }

    #[test]
    fn hadamard_case_of_diffusion() {
        let d = diffusion(4, &[0, 1, 2, 3], 4).unwrap();
        let h = hadamard_transform(2);
        assert!(max_diff(d.matrix(), &complexify(&kron(&h, &h))) < 1e-15);
    }

    #[test]
    fn three_slot_diffusion() {
        let d = diffusion(3, &[0, 1, 3], 4).unwrap();
        let col: Vec<f64> = (0..4).map(|i| d.matrix()[[i, 0]].re).collect();
        let a = 1.0 / 3f64.sqrt();
        for (got, want) in col.iter().zip([a, a, 0.0, a]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(d.is_unitary(1e-12));
        let one = diffusion(1, &[0], 4).unwrap();
        assert_eq!(one.matrix()[[0, 0]].re, 1.0);
        assert!(matches!(diffusion(5, &[0, 1, 2, 3, 4], 4), Err(Error::SupportTooLarge { .. })));
    }

    #[test]
    fn rotation_loads_values() {
        let r = multiplexed_rotation(&[2.0, 0.0, -1.0], 2.0, 1.0, true).unwrap();
        let m = r.matrix();
        // data=0, d: index d; data=1: index 3 + d.
        assert!((m[[0, 0]] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(m[[1, 1]].norm() < 1e-15);
        assert!((m[[4, 1]] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((m[[2, 2]].re + 0.5).abs() < 1e-15);
        assert!(r.is_unitary(1e-14));
        assert!(matches!(
            multiplexed_rotation(&[3.0], 2.0, 1.0, true),
            Err(Error::OutOfUnitRange { .. })
        ));
    }

    #[test]
    fn rotation_then_inverse_is_identity() {
        let r = multiplexed_rotation(&[0.3, -0.7, 1.0, 0.0], 1.0, 1.0, true).unwrap();
        let id = r.adjoint().dot(&r);
        assert!(max_diff(id.matrix(), &Array2::eye(8)) < 1e-12);
    }

    #[test]
    fn permutation_lifts() {
        assert_eq!(permutation_unitary(&[0, 1]).unwrap(), UnitaryMatrix::identity(2));
        assert_eq!(permutation_real(&[1, 0]).unwrap(), pauli_x());
        assert!(matches!(permutation_unitary(&[0, 0]), Err(Error::NotBijective(2))));
    }

    #[test]
    fn range_not_flips_flagged_labels() {
        let id = range_controlled_not(&[false; 4]);
        assert_eq!(id, UnitaryMatrix::identity(8));
        let u = range_controlled_not(&[false, true, false, false]);
        assert_eq!(u.matrix()[[5, 1]].re, 1.0);
        assert_eq!(u.matrix()[[1, 5]].re, 1.0);
        assert_eq!(u.matrix()[[0, 0]].re, 1.0);
    }

    #[test]
    fn prep_first_columns() {
        let p = prep_isometry(&[1.0], 0.5, true).unwrap();
        assert_eq!(p.matrix()[[0, 0]].re, 1.0);
        let p = prep_real(&[3.0, 4.0], 0.5, false).unwrap();
        assert!((p[[0, 0]] - 3f64.sqrt() / 7f64.sqrt()).abs() < 1e-15);
        assert!((p[[1, 0]] - 2.0 / 7f64.sqrt()).abs() < 1e-15);
        let signed = prep_real(&[1.0, -4.0], 0.5, true).unwrap();
        assert!((signed[[1, 0]] + 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(prep_isometry(&[0.0, 0.0], 0.5, true), Err(Error::AllZeroValues)));
    }

    #[test]
    fn compose_basics() {
        let mut layout = RegisterLayout::new();
        let q0 = layout.push("q0", Role::Flag, 2);
        let q1 = layout.push("q1", Role::Block, 2);
        let x = PlacedBlock::dense(pauli_x(), vec![q0]);
        let u = compose(&layout, &[x.clone(), x.clone()]).unwrap();
        assert_eq!(u, Array2::<f64>::eye(4));
        let swap = PlacedBlock::<f64>::permutation(vec![0, 2, 1, 3], vec![q0, q1]);
        let whole = compose(&layout, &[swap]).unwrap();
        assert_eq!(whole, permutation_real(&[0, 2, 1, 3]).unwrap());
        let single = compose(&layout, &[PlacedBlock::dense(kron(&pauli_x(), &pauli_z()), vec![q0, q1])]).unwrap();
        assert_eq!(single, kron(&pauli_x(), &pauli_z()));
        // Target order matters: (q1, q0) reorders the basis.
        let flipped = compose(&layout, &[PlacedBlock::dense(kron(&pauli_x(), &pauli_z()), vec![q1, q0])]).unwrap();
        assert_eq!(flipped, kron(&pauli_z(), &pauli_x()));
        let cx = compose(&layout, &[PlacedBlock::dense(pauli_x(), vec![q1]).controlled(q0, 1)]).unwrap();
        assert_eq!(cx, permutation_real(&[0, 1, 3, 2]).unwrap());
        assert!(matches!(
            compose(&layout, &[PlacedBlock::dense(Array2::<f64>::eye(4), vec![q0])]),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn block_indices_follow_layout_order() {
        let mut layout = RegisterLayout::new();
        layout.push("hi", Role::Block, 2);
        layout.push("f", Role::Flag, 2);
        layout.push("lo", Role::Block, 2);
        assert_eq!(layout.block_indices(), vec![0, 1, 4, 5]);
        assert_eq!(layout.flag_qubits(), 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        fn random_gates(seed: u64, count: usize) -> (RegisterLayout, Vec<PlacedBlock<Complex64>>) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut layout = RegisterLayout::new();
            let a = layout.push("a", Role::Flag, 2);
            let b = layout.push("b", Role::S, 4);
            let c = layout.push("c", Role::Block, 2);
            let regs = [a, b, c];
            let mut gates = Vec::new();
            for _ in 0..count {
                let t = regs[rng.gen_range(0..3)];
                let dim = layout.dim(t);
                let gate = match rng.gen_range(0..4) {
                    0 => {
                        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        Gate::Dense(complexify(&complete_orthonormal(&v)))
                    }
                    1 => {
                        let mut p: Vec<usize> = (0..dim).collect();
                        p.rotate_left(rng.gen_range(0..dim));
                        Gate::Permutation(p)
                    }
                    2 => Gate::Diagonal((0..dim).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..6.28))).collect()),
                    _ => {
                        let sel: Vec<usize> = regs.iter().copied().filter(|&r| r != t).collect();
                        let sel_dim: usize = sel.iter().map(|&r| layout.dim(r)).product();
                        let blocks = (0..2)
                            .map(|_| {
                                let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                                complexify(&complete_orthonormal(&v))
                            })
                            .collect();
                        let choice = (0..sel_dim).map(|_| [None, Some(0), Some(1)][rng.gen_range(0..3)]).collect();
                        Gate::Multiplexed { blocks, choice, selector: sel }
                    }
                };
                let mut pb = PlacedBlock::new(gate, vec![t]);
                if rng.gen_bool(0.3) {
                    let ctrl = regs.iter().copied().find(|&r| r != t && !matches!(pb.gate, Gate::Multiplexed { .. })).unwrap_or(t);
                    if ctrl != t {
                        pb = pb.controlled(ctrl, 1);
                    }
                }
                gates.push(pb);
            }
            (layout, gates)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn compose_is_associative(seed in any::<u64>(), split in 0usize..8) {
                let (layout, gates) = random_gates(seed, 8);
                let whole = compose(&layout, &gates).unwrap();
                let first = compose(&layout, &gates[..split]).unwrap();
                let second = compose(&layout, &gates[split..]).unwrap();
                prop_assert!(max_diff(&whole, &second.dot(&first)) < 1e-12);
                prop_assert!(UnitaryMatrix::new(whole).unwrap().is_unitary(1e-10));
            }

            #[test]
            fn diffusion_first_column_uniform(mask in 1u32..256) {
                let support: Vec<usize> = (0..8).filter(|b| mask & (1 << b) != 0).collect();
                let d = diffusion_real(support.len(), &support, 8).unwrap();
                let a = 1.0 / (support.len() as f64).sqrt();
                for i in 0..8 {
                    let want = if support.contains(&i) { a } else { 0.0 };
                    prop_assert!((d[[i, 0]] - want).abs() < 1e-14);
                }
                prop_assert!(UnitaryMatrix::from_real(&d).is_unitary(1e-10));
            }
        }
    }
}
