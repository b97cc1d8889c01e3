//! Block-encoding schemes assembled from compiled oracle tables.
//!
//! Every builder returns a [`BlockEncoding`]: the simulated unitary, its
//! register layout, the predicted subnormalisation and a cost record.
//! Register layouts put the flag registers first and the block register last.

use ndarray::{s, Array2};
use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{
    self, compose, diffusion_real, hadamard_transform, kron, pad_identity, pauli_x, pauli_z, prep_real, range_gate,
    rotation_blocks, rx_from_amplitude, sign_oracle, Gate, PlacedBlock, RegisterId, RegisterLayout, Role,
    UnitaryMatrix,
};
use crate::error::{Error, Result};
use crate::estimator::CostRecord;
use crate::structure::{invert, CompiledStructure, OracleTables, SlotRule};
use crate::sva;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeTag {
    Base,
    HermitianBase,
    Preamplified,
    HermitianPreamplified,
    PrepUnprep,
    Hermitianized,
    /// Hand-written circuit of a built-in family.
    FamilyCircuit,
}

impl SchemeTag {
    pub fn name(self) -> &'static str {
        match self {
            SchemeTag::Base => "base",
            SchemeTag::HermitianBase => "hermitian_base",
            SchemeTag::Preamplified => "preamplified",
            SchemeTag::HermitianPreamplified => "hermitian_preamplified",
            SchemeTag::PrepUnprep => "prep_unprep",
            SchemeTag::Hermitianized => "hermitianized",
            SchemeTag::FamilyCircuit => "family_circuit",
        }
    }
}

/// Whether the block equals `A/α` exactly or up to amplification error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Accuracy {
    Exact,
    /// Each amplified factor has relative accuracy `epsilon`.
    Amplified { epsilon: f64 },
}

/// Input parameters of the preamplified schemes. `None` picks `γ = (1−δ)/ζ_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationParams {
    pub p: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub gamma_c: Option<f64>,
    pub gamma_r: Option<f64>,
}

impl Default for AmplificationParams {
    fn default() -> Self {
        AmplificationParams {
            p: 0.5,
            delta: sva::default_delta(),
            epsilon: 1e-3,
            gamma_c: None,
            gamma_r: None,
        }
    }
}

impl AmplificationParams {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p = {} outside [0, 1]", self.p)));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::InvalidParameter(format!("delta = {} outside (0, 1/2)", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!("epsilon = {} outside (0, 1/2)", self.epsilon)));
        }
        for g in [self.gamma_c, self.gamma_r].into_iter().flatten() {
            if !(g >= 1.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!("gamma = {g} below 1")));
            }
        }
        Ok(())
    }
}

/// Amplification applied to one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideAmplification {
    pub gamma: f64,
    pub zeta_max: f64,
    /// Polynomial degree, `None` when the side was left unamplified.
    pub degree: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationInfo {
    pub params: AmplificationParams,
    pub column: SideAmplification,
    pub row: SideAmplification,
}

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    pub unitary: UnitaryMatrix,
    pub layout: RegisterLayout,
    pub alpha: f64,
    pub cost: CostRecord,
    pub scheme: SchemeTag,
    pub accuracy: Accuracy,
    pub amplification: Option<AmplificationInfo>,
}

impl BlockEncoding {
    pub fn flag_qubits(&self) -> usize {
        self.layout.flag_qubits()
    }

    pub fn flags(&self) -> Vec<String> {
        self.layout.flag_names()
    }

    /// Max-abs tolerance on `α·B − A`.
    pub fn block_tolerance(&self) -> f64 {
        match self.accuracy {
            Accuracy::Exact => tolerance::BLOCK_EXACT,
            Accuracy::Amplified { epsilon } => tolerance::preamplified_bound(epsilon) * self.alpha,
        }
    }
}

/// Which builder to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Base,
    Hermitian,
    Prep,
    Preamplified,
    HermitianPreamplified,
}

/// Dispatches to the builder for `kind`; `p` applies to PREP, `amp` to the amplified schemes.
pub fn build(c: &CompiledStructure, kind: SchemeKind, p: f64, amp: &AmplificationParams) -> Result<BlockEncoding> {
    match kind {
        SchemeKind::Base => build_base(c),
        SchemeKind::Hermitian => build_hermitian_base(c),
        SchemeKind::Prep => build_prep_unprep(c, p),
        SchemeKind::Preamplified => build_preamplified(c, amp),
        SchemeKind::HermitianPreamplified => build_hermitian_preamplified(c, amp),
    }
}

fn max_abs(c: &CompiledStructure) -> Result<f64> {
    let m = c.spec.max_abs_value();
    if m == 0.0 {
        return Err(Error::AllZeroValues);
    }
    Ok(m)
}

/// Multiplexed choice per work index: `d` for real values, `D` (a zero load)
/// for padded ones, untouched beyond the label space.
fn rotation_choice(tables: &OracleTables, d_true: usize) -> Vec<Option<usize>> {
    (0..tables.work_dim())
        .map(|x| tables.value_index(x).map(|d| d.min(d_true)))
        .collect()
}

fn rotation_gate(
    tables: &OracleTables,
    values: &[f64],
    norm: f64,
    p: f64,
    signed: bool,
    selector: Vec<RegisterId>,
) -> Result<Gate<Complex64>> {
    let mut blocks = rotation_blocks(values, norm, p, signed)?;
    blocks.push(rx_from_amplitude(0.0));
    Ok(Gate::Multiplexed {
        blocks,
        choice: rotation_choice(tables, values.len()),
        selector,
    })
}

struct BaseRegisters {
    layout: RegisterLayout,
    data: RegisterId,
    del: RegisterId,
    s: RegisterId,
    block: RegisterId,
}

fn base_layout(tables: &OracleTables) -> BaseRegisters {
    let mut layout = RegisterLayout::new();
    let data = layout.push("data", Role::Data, 2);
    let del = layout.push("del", Role::Del, 2);
    let s = layout.push("s", Role::S, tables.shape.s_register_dim);
    let block = layout.push("block", Role::Block, tables.shape.block_dim);
    BaseRegisters {
        layout,
        data,
        del,
        s,
        block,
    }
}

pub(crate) fn finish(
    layout: RegisterLayout,
    unitary: UnitaryMatrix,
    alpha: f64,
    data_loading: f64,
    scheme: SchemeTag,
    accuracy: Accuracy,
) -> BlockEncoding {
    let cost = CostRecord::new(scheme.name(), data_loading, alpha, layout.flag_qubits());
    BlockEncoding {
        unitary,
        layout,
        alpha,
        cost,
        scheme,
        accuracy,
        amplification: None,
    }
}

/// `H_{S_c} · O_c† · O_rg · O_data · O_r · H_{S_r}†` with `α = √(S_c S_r)·‖A‖_max`.
pub fn build_base(c: &CompiledStructure) -> Result<BlockEncoding> {
    let t = &c.tables;
    let norm = max_abs(c)?;
    let r = base_layout(t);
    let sreg = t.shape.s_register_dim;
    let h_c = diffusion_real(t.col_support.len(), &t.col_support, sreg)?;
    let h_r = diffusion_real(t.row_support.len(), &t.row_support, sreg)?;
    let work = vec![r.s, r.block];
    let gates = vec![
        PlacedBlock::dense(circuit::complexify(&h_c), vec![r.s]),
        PlacedBlock::permutation(invert(&t.col_perm), work.clone()),
        PlacedBlock::new(range_gate(&t.range_flags, work.clone()), vec![r.del]),
        PlacedBlock::new(rotation_gate(t, c.spec.values(), norm, 1.0, true, work.clone())?, vec![r.data]),
        PlacedBlock::permutation(t.row_perm.clone(), work),
        PlacedBlock::dense(circuit::complexify(&h_r.t().to_owned()), vec![r.s]),
    ];
    let u = UnitaryMatrix::new(compose(&r.layout, &gates)?)?;
    let alpha = ((t.col_support.len() * t.row_support.len()) as f64).sqrt() * norm;
    Ok(finish(r.layout, u, alpha, c.spec.d() as f64, SchemeTag::Base, Accuracy::Exact))
}

/// `H · O_c† · O_rg · Z·O_data · O_t · O_c · H†`, Hermitian by construction.
pub fn build_hermitian_base(c: &CompiledStructure) -> Result<BlockEncoding> {
    let t = &c.tables;
    let tau = t.transpose_perm.clone().ok_or(Error::NoTransposeOracle)?;
    let norm = max_abs(c)?;
    let r = base_layout(t);
    let h = diffusion_real(t.col_support.len(), &t.col_support, t.shape.s_register_dim)?;
    let work = vec![r.s, r.block];
    let gates = vec![
        PlacedBlock::dense(circuit::complexify(&h), vec![r.s]),
        PlacedBlock::permutation(invert(&t.col_perm), work.clone()),
        PlacedBlock::new(range_gate(&t.range_flags, work.clone()), vec![r.del]),
        PlacedBlock::new(rotation_gate(t, c.spec.values(), norm, 1.0, true, work.clone())?, vec![r.data]),
        PlacedBlock::dense(circuit::complexify(&pauli_z()), vec![r.data]),
        PlacedBlock::permutation(tau, work.clone()),
        PlacedBlock::permutation(t.col_perm.clone(), work),
        PlacedBlock::dense(circuit::complexify(&h.t().to_owned()), vec![r.s]),
    ];
    let u = UnitaryMatrix::new(compose(&r.layout, &gates)?)?;
    let alpha = t.col_support.len() as f64 * norm;
    Ok(finish(r.layout, u, alpha, c.spec.d() as f64, SchemeTag::HermitianBase, Accuracy::Exact))
}

/// `α_p = (√(S_c S_r)/D)·√(Σ|A_d|^{2p} · Σ|A_d|^{2−2p})`.
pub fn alpha_p(values: &[f64], s_c: usize, s_r: usize, p: f64) -> f64 {
    let sum = |q: f64| values.iter().map(|&a| circuit::pow_abs(a, q)).sum::<f64>();
    ((s_c * s_r) as f64).sqrt() / values.len() as f64 * (sum(2.0 * p) * sum(2.0 - 2.0 * p)).sqrt()
}

fn power_of_two_quotient(what: &'static str, numerator: usize, denominator: usize) -> Result<usize> {
    if denominator == 0 || numerator % denominator != 0 || !(numerator / denominator).is_power_of_two() {
        return Err(Error::NotDivisible {
            what,
            numerator,
            denominator,
        });
    }
    Ok(numerator / denominator)
}

/// `V_c · O_c† · O_rg · O_r · V_r†` with `V = (PREP ⊗ H) ⊕ I` on the slot register.
pub fn build_prep_unprep(c: &CompiledStructure, p: f64) -> Result<BlockEncoding> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let t = &c.tables;
    if t.slot_rule != SlotRule::Prep {
        return Err(Error::PrepIncompatible("structure carries no prep factor".into()));
    }
    max_abs(c)?;
    let values = c.spec.values();
    let d = values.len();
    if !d.is_power_of_two() {
        return Err(Error::NotDivisible {
            what: "D must be a power of two",
            numerator: d,
            denominator: 1,
        });
    }
    let q_c = power_of_two_quotient("S_c/D", c.shape.s_c, d)?;
    let q_r = power_of_two_quotient("S_r/D", c.shape.s_r, d)?;
    let sreg = t.shape.s_register_dim;

    let v_c = pad_identity(&kron(&prep_real(values, p, true)?, &hadamard_transform(q_c)), sreg);
    let right = if p == 0.5 {
        sign_oracle(values).dot(&prep_real(values, 0.5, true)?)
    } else {
        prep_real(values, 1.0 - p, false)?
    };
    let v_r = pad_identity(&kron(&right, &hadamard_transform(q_r)), sreg);

    let mut layout = RegisterLayout::new();
    let del = layout.push("del", Role::Del, 2);
    let s = layout.push("s", Role::S, sreg);
    let block = layout.push("block", Role::Block, t.shape.block_dim);
    let work = vec![s, block];
    let gates: Vec<PlacedBlock<f64>> = vec![
        PlacedBlock::dense(v_c, vec![s]),
        PlacedBlock::permutation(invert(&t.col_perm), work.clone()),
        PlacedBlock::new(range_gate(&t.range_flags, work.clone()), vec![del]),
        PlacedBlock::permutation(t.row_perm.clone(), work),
        PlacedBlock::dense(v_r.t().to_owned(), vec![s]),
    ];
    let u = UnitaryMatrix::from_real(&compose(&layout, &gates)?);
    let alpha = alpha_p(values, c.shape.s_c, c.shape.s_r, p);
    Ok(finish(layout, u, alpha, d as f64, SchemeTag::PrepUnprep, Accuracy::Exact))
}

/// Real part of `u`, failing on imaginary leakage.
fn real_checked(u: &Array2<Complex64>) -> Result<Array2<f64>> {
    if let Some(((i, j), z)) = u
        .indexed_iter()
        .find(|(_, z)| z.im.abs() > tolerance::IMAGINARY_LEAK)
    {
        return Err(Error::ComplexLeak { i, j, imag: z.im });
    }
    Ok(u.mapv(|z| z.re))
}

/// `⟨0, x| U_c† |0, s=0, j⟩`: `H_{S_c}`, `O_c†`, then the column rotation.
fn column_factor(c: &CompiledStructure, p: f64, signed: bool) -> Result<Array2<f64>> {
    let t = &c.tables;
    let norm = max_abs(c)?;
    let mut layout = RegisterLayout::new();
    let data = layout.push("data0", Role::Data0, 2);
    let s = layout.push("s", Role::S, t.shape.s_register_dim);
    let block = layout.push("block", Role::Block, t.shape.block_dim);
    let h = diffusion_real(t.col_support.len(), &t.col_support, t.shape.s_register_dim)?;
    let work = vec![s, block];
    let gates = vec![
        PlacedBlock::dense(circuit::complexify(&h), vec![s]),
        PlacedBlock::permutation(invert(&t.col_perm), work.clone()),
        PlacedBlock::new(rotation_gate(t, c.spec.values(), norm, p, signed, work)?, vec![data]),
    ];
    let u = compose(&layout, &gates)?;
    let w = t.work_dim();
    real_checked(&u.slice(s![..w, ..t.shape.block_dim]).to_owned())
}

/// `⟨0, s=0, i| U_r |0, x⟩`: the row rotation, `O_r`, then `H_{S_r}†`.
fn row_factor(c: &CompiledStructure, p: f64) -> Result<Array2<f64>> {
    let t = &c.tables;
    let norm = max_abs(c)?;
    let mut layout = RegisterLayout::new();
    let data = layout.push("data1", Role::Data1, 2);
    let s = layout.push("s", Role::S, t.shape.s_register_dim);
    let block = layout.push("block", Role::Block, t.shape.block_dim);
    let h = diffusion_real(t.row_support.len(), &t.row_support, t.shape.s_register_dim)?;
    let work = vec![s, block];
    let gates = vec![
        PlacedBlock::new(rotation_gate(t, c.spec.values(), norm, 1.0 - p, false, work.clone())?, vec![data]),
        PlacedBlock::permutation(t.row_perm.clone(), work),
        PlacedBlock::dense(circuit::complexify(&h.t().to_owned()), vec![s]),
    ];
    let u = compose(&layout, &gates)?;
    let w = t.work_dim();
    real_checked(&u.slice(s![..t.shape.block_dim, ..w]).to_owned())
}

/// A factor `K` after amplification, kept in thin-SVD form.
struct AmplifiedFactor {
    u: Array2<f64>,
    sigma: Vec<f64>,
    v: Array2<f64>,
    info: SideAmplification,
}

fn amplify_factor(k: &Array2<f64>, gamma: Option<f64>, params: &AmplificationParams) -> Result<AmplifiedFactor> {
    let (u, sigma, v) = sva::thin_svd(k);
    let zeta_max = sigma.iter().copied().fold(0.0, f64::max);
    let gamma = gamma.unwrap_or((1.0 - params.delta) / zeta_max);
    if gamma <= 1.0 {
        return Ok(AmplifiedFactor {
            u,
            sigma,
            v,
            info: SideAmplification {
                gamma: 1.0,
                zeta_max,
                degree: None,
            },
        });
    }
    let poly = sva::min_degree_poly(gamma, params.delta, params.epsilon)?;
    let amp = sva::amplify_svd(k, &poly)?;
    Ok(AmplifiedFactor {
        u: amp.u,
        sigma: amp.amplified,
        v: amp.v,
        info: SideAmplification {
            gamma,
            zeta_max,
            degree: Some(poly.degree),
        },
    })
}

/// Halmos dilation `[[T, √(I−TTᵀ)], [√(I−TᵀT), −Tᵀ]]` of `T = U·diag(σ)·Vᵀ`
/// embedded in a `dim`-dimensional space (rows and columns at the leading indices).
fn halmos_dilation(f: &AmplifiedFactor, dim: usize) -> Array2<f64> {
    let embed = |m: &Array2<f64>| {
        let mut out = Array2::zeros((dim, m.ncols()));
        out.slice_mut(s![..m.nrows(), ..]).assign(m);
        out
    };
    let u = embed(&f.u);
    let v = embed(&f.v);
    let sigma: Vec<f64> = f.sigma.iter().map(|&x| x.clamp(-1.0, 1.0)).collect();
    let scale = |m: &Array2<f64>, d: &[f64]| {
        let mut out = m.clone();
        for (mut col, &x) in out.columns_mut().into_iter().zip(d) {
            col *= x;
        }
        out
    };
    let t = scale(&u, &sigma).dot(&v.t());
    let defect: Vec<f64> = sigma.iter().map(|x| (1.0 - x * x).max(0.0).sqrt() - 1.0).collect();
    let eye = Array2::<f64>::eye(dim);
    let left = &eye + &scale(&u, &defect).dot(&u.t());
    let right = &eye + &scale(&v, &defect).dot(&v.t());
    let mut out = Array2::zeros((2 * dim, 2 * dim));
    out.slice_mut(s![..dim, ..dim]).assign(&t);
    out.slice_mut(s![..dim, dim..]).assign(&left);
    out.slice_mut(s![dim.., ..dim]).assign(&right);
    out.slice_mut(s![dim.., dim..]).assign(&(-&t.t()));
    out
}

/// `3·(γ/δ)·ln(γ/ε)` per side; unamplified sides count `γ = 1`.
pub fn amplification_cost(gamma_c: f64, gamma_r: f64, delta: f64, epsilon: f64) -> f64 {
    let side = |g: f64| g / delta * (g / epsilon).ln();
    3.0 * (side(gamma_c) + side(gamma_r))
}

struct AmpRegisters {
    layout: RegisterLayout,
    amp_c: RegisterId,
    amp_r: RegisterId,
    data0: RegisterId,
    data1: RegisterId,
    del: RegisterId,
    s: RegisterId,
    block: RegisterId,
}

fn amp_layout(t: &OracleTables) -> AmpRegisters {
    let mut layout = RegisterLayout::new();
    let amp_c = layout.push("amp_c", Role::Amplification, 2);
    let amp_r = layout.push("amp_r", Role::Amplification, 2);
    let data0 = layout.push("data0", Role::Data0, 2);
    let data1 = layout.push("data1", Role::Data1, 2);
    let del = layout.push("del", Role::Del, 2);
    let s = layout.push("s", Role::S, t.shape.s_register_dim);
    let block = layout.push("block", Role::Block, t.shape.block_dim);
    AmpRegisters {
        layout,
        amp_c,
        amp_r,
        data0,
        data1,
        del,
        s,
        block,
    }
}

/// Splits the rotation into `|A|^p` and `|A|^{1−p}` halves, amplifies the
/// singular values of both halves and joins them through `O_rg`.
pub fn build_preamplified(c: &CompiledStructure, params: &AmplificationParams) -> Result<BlockEncoding> {
    params.validate()?;
    let t = &c.tables;
    let r = amp_layout(t);
    let side_dim = 2 * t.work_dim();
    let k_c = column_factor(c, params.p, true)?;
    let k_r = row_factor(c, params.p)?;
    let f_c = amplify_factor(&k_c, params.gamma_c, params)?;
    let f_r = amplify_factor(&k_r, params.gamma_r, params)?;
    let gates: Vec<PlacedBlock<f64>> = vec![
        PlacedBlock::dense(halmos_dilation(&f_c, side_dim), vec![r.amp_c, r.data0, r.s, r.block]),
        PlacedBlock::new(range_gate(&t.range_flags, vec![r.s, r.block]), vec![r.del]),
        PlacedBlock::dense(halmos_dilation(&f_r, side_dim), vec![r.amp_r, r.data1, r.s, r.block]),
    ];
    let u = UnitaryMatrix::from_real(&compose(&r.layout, &gates)?);
    let base_alpha = ((t.col_support.len() * t.row_support.len()) as f64).sqrt() * max_abs(c)?;
    let (g_c, g_r) = (f_c.info.gamma, f_r.info.gamma);
    let alpha = base_alpha / (g_c * g_r);
    let loading = c.spec.d() as f64 * amplification_cost(g_c, g_r, params.delta, params.epsilon);
    let mut enc = finish(
        r.layout,
        u,
        alpha,
        loading,
        SchemeTag::Preamplified,
        Accuracy::Amplified {
            epsilon: params.epsilon,
        },
    );
    enc.amplification = Some(AmplificationInfo {
        params: *params,
        column: f_c.info,
        row: f_r.info,
    });
    Ok(enc)
}

/// `V_c† · M · V_c` with one amplified factor used on both sides and the signs,
/// range flags, transposition and junk-sink swaps in `M`.
pub fn build_hermitian_preamplified(c: &CompiledStructure, params: &AmplificationParams) -> Result<BlockEncoding> {
    params.validate()?;
    if params.p != 0.5 {
        return Err(Error::InvalidParameter(format!(
            "Hermitian preamplification needs p = 1/2, got {}",
            params.p
        )));
    }
    let t = &c.tables;
    let tau = t.transpose_perm.clone().ok_or(Error::NoTransposeOracle)?;
    let values = c.spec.values();
    let r = amp_layout(t);
    let side_dim = 2 * t.work_dim();
    let k_c = column_factor(c, 0.5, false)?;
    let f_c = amplify_factor(&k_c, params.gamma_c, params)?;
    let dilation = halmos_dilation(&f_c, side_dim);
    let signs: Vec<f64> = (0..t.work_dim())
        .map(|x| match t.value_index(x) {
            Some(d) if d < values.len() && values[d] < 0.0 => -1.0,
            _ => 1.0,
        })
        .collect();
    let swap = vec![0, 2, 1, 3];
    let gates: Vec<PlacedBlock<f64>> = vec![
        PlacedBlock::dense(dilation.clone(), vec![r.amp_c, r.data0, r.s, r.block]),
        PlacedBlock::new(range_gate(&t.range_flags, vec![r.s, r.block]), vec![r.del]),
        PlacedBlock::new(Gate::Diagonal(signs), vec![r.s, r.block]),
        PlacedBlock::permutation(tau, vec![r.s, r.block]),
        PlacedBlock::permutation(swap.clone(), vec![r.amp_c, r.amp_r]),
        PlacedBlock::permutation(swap, vec![r.data0, r.data1]),
        PlacedBlock::dense(dilation.t().to_owned(), vec![r.amp_c, r.data0, r.s, r.block]),
    ];
    let u = UnitaryMatrix::from_real(&compose(&r.layout, &gates)?);
    let g = f_c.info.gamma;
    let alpha = t.col_support.len() as f64 * max_abs(c)? / (g * g);
    let d = c.spec.d() as f64;
    let loading = d * amplification_cost(g, g, params.delta, params.epsilon) + d;
    let mut enc = finish(
        r.layout,
        u,
        alpha,
        loading,
        SchemeTag::HermitianPreamplified,
        Accuracy::Amplified {
            epsilon: params.epsilon,
        },
    );
    enc.amplification = Some(AmplificationInfo {
        params: *params,
        column: f_c.info,
        row: f_c.info,
    });
    Ok(enc)
}

/// `H · C₁(U) · X · C₁(U†) · H` on a new leading flag qubit.
pub fn hermitianize(enc: &BlockEncoding) -> Result<BlockEncoding> {
    let b = crate::verify::extract_block(enc)?;
    let asym = b
        .indexed_iter()
        .fold(0.0f64, |m, ((i, j), &x)| m.max((x - b[[j, i]]).abs()));
    if asym > tolerance::SYMMETRY {
        return Err(Error::NotSymmetric(asym));
    }
    let layout = enc.layout.with_prefix("herm", Role::HermFlag, 2);
    let herm = 0;
    let rest: Vec<RegisterId> = (1..layout.registers().len()).collect();
    let h = circuit::complexify(&hadamard_transform(2));
    let gates = vec![
        PlacedBlock::dense(h.clone(), vec![herm]),
        PlacedBlock::dense(enc.unitary.matrix().clone(), rest.clone()).controlled(herm, 1),
        PlacedBlock::dense(circuit::complexify(&pauli_x()), vec![herm]),
        PlacedBlock::dense(enc.unitary.adjoint().into_inner(), rest).controlled(herm, 1),
        PlacedBlock::dense(h, vec![herm]),
    ];
    let u = UnitaryMatrix::new(compose(&layout, &gates)?)?;
    let mut out = finish(
        layout,
        u,
        enc.alpha,
        2.0 * enc.cost.data_loading,
        SchemeTag::Hermitianized,
        enc.accuracy,
    );
    out.amplification = enc.amplification;
    Ok(out)
}
