//! Structured matrices described by the `(d, m)` labelling.
//!
//! A nonzero entry is labelled by the index `d` of its value in the list of
//! distinct values and a repetition index `m`. Row and column maps send a
//! label to its position `(i, j)`. From those maps this module derives the
//! sparsities, pads the label space so that `M·D = N·S`, and completes the
//! column and row oracles into bijections on the padded index set.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Position map `(d, m) ↦ i` or `(d, m) ↦ j`. Only evaluated on in-range labels.
pub type LabelMap = Arc<dyn Fn(usize, usize) -> i64 + Send + Sync>;
/// Predicate on labels.
pub type LabelPredicate = Arc<dyn Fn(usize, usize) -> bool + Send + Sync>;
/// Involution on labels.
pub type LabelInvolution = Arc<dyn Fn(usize, usize) -> (usize, usize) + Send + Sync>;
/// Slot map `(d, m) ↦ s` (or a PREP factor `t`).
pub type SlotMap = Arc<dyn Fn(usize, usize) -> usize + Send + Sync>;

/// Arithmetic description of a structured `N × N` matrix.
#[derive(Clone)]
pub struct StructureSpec {
    name: String,
    n: usize,
    values: Vec<f64>,
    label_extent: usize,
    row_map: LabelMap,
    col_map: LabelMap,
    in_range: LabelPredicate,
    transpose: Option<LabelInvolution>,
    prep_factor: Option<(SlotMap, SlotMap)>,
    slots: Option<(SlotMap, SlotMap)>,
}

impl fmt::Debug for StructureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StructureSpec")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("values", &self.values)
            .field("label_extent", &self.label_extent)
            .field("transpose", &self.transpose.is_some())
            .field("prep_factor", &self.prep_factor.is_some())
            .field("slots", &self.slots.is_some())
            .finish()
    }
}

impl StructureSpec {
    /// Labels run over `d < values.len()` and `m < label_extent`; all are in range
    /// until [`with_range`](Self::with_range) says otherwise.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        values: Vec<f64>,
        label_extent: usize,
        row_map: LabelMap,
        col_map: LabelMap,
    ) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::BadN(n));
        }
        if values.is_empty() {
            return Err(Error::BadShape("value list is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("values must be finite".into()));
        }
        if label_extent == 0 {
            return Err(Error::BadShape("label extent must be positive".into()));
        }
        Ok(StructureSpec {
            name: name.into(),
            n,
            values,
            label_extent,
            row_map,
            col_map,
            in_range: Arc::new(|_, _| true),
            transpose: None,
            prep_factor: None,
            slots: None,
        })
    }

    pub fn with_range(mut self, in_range: LabelPredicate) -> Self {
        self.in_range = in_range;
        self
    }

    pub fn with_transpose(mut self, tau: LabelInvolution) -> Self {
        self.transpose = Some(tau);
        self
    }

    /// Certifies PREP compatibility: `t_c ∈ [0, S_c/D)`, `t_r ∈ [0, S_r/D)`.
    pub fn with_prep_factor(mut self, t_c: SlotMap, t_r: SlotMap) -> Self {
        self.prep_factor = Some((t_c, t_r));
        self
    }

    /// Explicit column and row slots, replacing the enumeration rank.
    pub fn with_slots(mut self, s_c: SlotMap, s_r: SlotMap) -> Self {
        self.slots = Some((s_c, s_r));
        self
    }

    /// Same labelling with a different value list of equal length.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::DimMismatch {
                expected: self.values.len(),
                found: values.len(),
            });
        }
        let mut out = self.clone();
        out.values = values;
        Ok(out)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    /// Number of distinct values `D`.
    pub fn d(&self) -> usize {
        self.values.len()
    }
    pub fn label_extent(&self) -> usize {
        self.label_extent
    }
    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
    pub fn in_range(&self, d: usize, m: usize) -> bool {
        d < self.d() && m < self.label_extent && (self.in_range)(d, m)
    }
    pub fn row(&self, d: usize, m: usize) -> i64 {
        (self.row_map)(d, m)
    }
    pub fn col(&self, d: usize, m: usize) -> i64 {
        (self.col_map)(d, m)
    }
    pub fn has_transpose(&self) -> bool {
        self.transpose.is_some()
    }
    pub fn transpose(&self, d: usize, m: usize) -> Option<(usize, usize)> {
        self.transpose.as_ref().map(|t| t(d, m))
    }
    pub fn has_prep_factor(&self) -> bool {
        self.prep_factor.is_some()
    }
    pub fn prep_factor(&self, d: usize, m: usize) -> Option<(usize, usize)> {
        self.prep_factor.as_ref().map(|(c, r)| (c(d, m), r(d, m)))
    }
    pub fn has_explicit_slots(&self) -> bool {
        self.slots.is_some()
    }
    pub fn explicit_slots(&self, d: usize, m: usize) -> Option<(usize, usize)> {
        self.slots.as_ref().map(|(c, r)| (c(d, m), r(d, m)))
    }

    /// In-range labels in lexicographic `(d, m)` order.
    pub fn labels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for d in 0..self.d() {
            for m in 0..self.label_extent {
                if self.in_range(d, m) {
                    out.push((d, m));
                }
            }
        }
        out
    }

    /// Position of an in-range label, checked against `[0, N)`.
    pub fn position(&self, d: usize, m: usize) -> Result<(usize, usize)> {
        let (i, j) = (self.row(d, m), self.col(d, m));
        let n = self.n as i64;
        if i < 0 || j < 0 || i >= n || j >= n {
            return Err(Error::OutOfBounds { d, m, i, j, n: self.n });
        }
        Ok((i as usize, j as usize))
    }
}

/// Counts derived by enumerating in-range labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub d: usize,
    /// Largest multiplicity of a single value.
    pub m: usize,
    pub s_c: usize,
    pub s_r: usize,
    pub label_extent: usize,
    pub nonzeros: usize,
    /// One more than the largest explicit slot, 0 without explicit slots.
    pub slot_span: usize,
}

/// Enumerates the labelling and checks bounds, injectivity and the transposition.
pub fn derive_counts(spec: &StructureSpec) -> Result<Counts> {
    let n = spec.n();
    let mut seen: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut multiplicity = vec![0usize; spec.d()];
    let mut col_count = vec![0usize; n];
    let mut row_count = vec![0usize; n];
    let mut slot_span = 0;
    for (d, m) in spec.labels() {
        let (i, j) = spec.position(d, m)?;
        if let Some((s_c, s_r)) = spec.explicit_slots(d, m) {
            slot_span = slot_span.max(s_c.max(s_r) + 1);
        }
        if let Some(&(d1, m1)) = seen.get(&(i, j)) {
            return Err(Error::LabelCollision { d1, m1, d2: d, m2: m, i, j });
        }
        seen.insert((i, j), (d, m));
        multiplicity[d] += 1;
        col_count[j] += 1;
        row_count[i] += 1;
    }
    if seen.is_empty() {
        return Err(Error::BadShape("no in-range labels".into()));
    }
    if spec.has_transpose() {
        check_transpose(spec)?;
    }
    Ok(Counts {
        d: spec.d(),
        m: multiplicity.iter().copied().max().unwrap_or(0),
        s_c: col_count.iter().copied().max().unwrap_or(0),
        s_r: row_count.iter().copied().max().unwrap_or(0),
        label_extent: spec.label_extent(),
        nonzeros: seen.len(),
        slot_span,
    })
}

fn check_transpose(spec: &StructureSpec) -> Result<()> {
    for (d, m) in spec.labels() {
        let (d2, m2) = spec.transpose(d, m).expect("checked by caller");
        if d2 != d {
            return Err(Error::InvalidTranspose(format!(
                "({d},{m}) maps to value index {d2}"
            )));
        }
        if !spec.in_range(d2, m2) {
            return Err(Error::InvalidTranspose(format!(
                "({d},{m}) maps to out-of-range ({d2},{m2})"
            )));
        }
        if spec.transpose(d2, m2) != Some((d, m)) {
            return Err(Error::InvalidTranspose(format!("not an involution at ({d},{m})")));
        }
        let (i, j) = spec.position(d, m)?;
        if spec.position(d2, m2)? != (j, i) {
            return Err(Error::InvalidTranspose(format!(
                "({d},{m}) at ({i},{j}) does not map to ({j},{i})"
            )));
        }
    }
    Ok(())
}

/// Padded index spaces with `m_pad · d_pad = block_dim · s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PaddedShape {
    pub d: usize,
    pub d_pad: usize,
    pub m_pad: usize,
    /// True column sparsity.
    pub s_c: usize,
    /// True row sparsity.
    pub s_r: usize,
    /// Padded sparsity, at least `max(s_c, s_r)`.
    pub s: usize,
    pub s_register_dim: usize,
    pub block_dim: usize,
}

impl PaddedShape {
    /// Number of labels `N·S`.
    pub fn label_count(&self) -> usize {
        self.block_dim * self.s
    }
    /// Dimension of the combined `(s, block)` register.
    pub fn work_dim(&self) -> usize {
        self.block_dim * self.s_register_dim
    }
    pub fn s_qubits(&self) -> usize {
        ceil_log2(self.s)
    }
}

/// `⌈log₂ x⌉`, with `ceil_log2(1) = 0`.
pub fn ceil_log2(x: usize) -> usize {
    assert!(x > 0);
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

/// Smallest padding: minimise `S` first, then `D`, with `M = N·S/D` integral and
/// large enough for every multiplicity and the label extent. `S` also covers every explicit slot.
pub fn pad_shape(counts: &Counts, n: usize) -> PaddedShape {
    let m_min = counts.m.max(counts.label_extent);
    let mut s = counts.s_c.max(counts.s_r).max(counts.slot_span).max(1);
    loop {
        let total = n * s;
        for d_pad in counts.d..=total {
            if total % d_pad == 0 && total / d_pad >= m_min {
                return PaddedShape {
                    d: counts.d,
                    d_pad,
                    m_pad: total / d_pad,
                    s_c: counts.s_c,
                    s_r: counts.s_r,
                    s,
                    s_register_dim: s.next_power_of_two(),
                    block_dim: n,
                };
            }
            if total / d_pad < m_min {
                break;
            }
        }
        s += 1;
    }
}

/// How slots were assigned to in-range labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlotRule {
    Ranked,
    Explicit,
    Prep,
}

/// Column and row oracles as permutation tables.
///
/// Inputs are label indices `x = d·m_pad + m`; outputs are `y = s·N + k` with
/// `k` the block index. Both live in the work register of dimension
/// `s_register_dim · N`; tables act as the identity beyond the `N·S` labels.
#[derive(Debug, Clone)]
pub struct OracleTables {
    pub shape: PaddedShape,
    pub col_perm: Vec<usize>,
    pub row_perm: Vec<usize>,
    /// True for labels that must be deleted.
    pub range_flags: Vec<bool>,
    pub transpose_perm: Option<Vec<usize>>,
    /// Slots used by in-range labels in the column labelling.
    pub col_support: Vec<usize>,
    pub row_support: Vec<usize>,
    pub slot_rule: SlotRule,
}

impl OracleTables {
    pub fn work_dim(&self) -> usize {
        self.shape.work_dim()
    }
    pub fn label_index(&self, d: usize, m: usize) -> usize {
        d * self.shape.m_pad + m
    }
    /// Inverse of [`label_index`](Self::label_index) on the label space.
    pub fn decode_label(&self, x: usize) -> Option<(usize, usize)> {
        (x < self.shape.label_count()).then(|| (x / self.shape.m_pad, x % self.shape.m_pad))
    }
    pub fn output_index(&self, slot: usize, k: usize) -> usize {
        slot * self.shape.block_dim + k
    }
    pub fn decode_output(&self, y: usize) -> (usize, usize) {
        (y / self.shape.block_dim, y % self.shape.block_dim)
    }
    /// Value index `d` loaded for work index `x`; `None` beyond the label space.
    pub fn value_index(&self, x: usize) -> Option<usize> {
        self.decode_label(x).map(|(d, _)| d)
    }
    /// Row oracle `O_c·O_t` used by Hermitian encodings.
    pub fn hermitian_row_perm(&self) -> Result<Vec<usize>> {
        let tau = self.transpose_perm.as_ref().ok_or(Error::NoTransposeOracle)?;
        Ok(tau.iter().map(|&t| self.col_perm[t]).collect())
    }
}

/// Inverse of a permutation table.
pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![usize::MAX; perm.len()];
    for (x, &y) in perm.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

/// True if `perm` is a bijection on `0..perm.len()`.
pub fn is_bijection(perm: &[usize]) -> bool {
    let mut hit = vec![false; perm.len()];
    for &y in perm {
        if y >= perm.len() || hit[y] {
            return false;
        }
        hit[y] = true;
    }
    true
}

/// Builds the oracle tables for a validated spec and its padded shape.
pub fn complete_oracles(spec: &StructureSpec, shape: &PaddedShape) -> Result<OracleTables> {
    let labels = spec.labels();
    let n = shape.block_dim;
    let work = shape.work_dim();
    let label_count = shape.label_count();
    let index = |d: usize, m: usize| d * shape.m_pad + m;

    let positions: Vec<(usize, usize)> = labels
        .iter()
        .map(|&(d, m)| spec.position(d, m))
        .collect::<Result<_>>()?;

    let (rule, col_slots, row_slots) = if spec.has_prep_factor() {
        let d = spec.d();
        for (s, what) in [(shape.s_c, "S_c"), (shape.s_r, "S_r")] {
            if s % d != 0 {
                return Err(Error::PrepIncompatible(format!("D={d} does not divide {what}={s}")));
            }
        }
        let (qc, qr) = (shape.s_c / d, shape.s_r / d);
        let mut cs = Vec::with_capacity(labels.len());
        let mut rs = Vec::with_capacity(labels.len());
        for &(d, m) in &labels {
            let (tc, tr) = spec.prep_factor(d, m).expect("checked above");
            if tc >= qc || tr >= qr {
                return Err(Error::PrepIncompatible(format!(
                    "factor ({tc},{tr}) of ({d},{m}) outside [0,{qc})x[0,{qr})"
                )));
            }
            cs.push(d * qc + tc);
            rs.push(d * qr + tr);
        }
        (SlotRule::Prep, cs, rs)
    } else if spec.has_explicit_slots() {
        let (cs, rs) = labels
            .iter()
            .map(|&(d, m)| spec.explicit_slots(d, m).expect("checked above"))
            .unzip();
        (SlotRule::Explicit, cs, rs)
    } else {
        let mut col_rank = vec![0usize; n];
        let mut row_rank = vec![0usize; n];
        let mut cs = Vec::with_capacity(labels.len());
        let mut rs = Vec::with_capacity(labels.len());
        for &(i, j) in &positions {
            cs.push(col_rank[j]);
            rs.push(row_rank[i]);
            col_rank[j] += 1;
            row_rank[i] += 1;
        }
        (SlotRule::Ranked, cs, rs)
    };

    let assign = |slots: &[usize], pick: fn(&(usize, usize)) -> usize| -> Result<Vec<usize>> {
        let mut perm = vec![usize::MAX; work];
        let mut taken = vec![false; label_count];
        for (k, (&(d, m), pos)) in labels.iter().zip(&positions).enumerate() {
            let slot = slots[k];
            if slot >= shape.s {
                return Err(Error::SlotOutOfRange { d, m, slot, limit: shape.s });
            }
            let y = slot * n + pick(pos);
            if taken[y] {
                let msg = format!("two labels share output slot {slot} of line {}", pick(pos));
                return Err(match rule {
                    SlotRule::Prep => Error::PrepIncompatible(msg),
                    _ => Error::BadShape(msg),
                });
            }
            taken[y] = true;
            perm[index(d, m)] = y;
        }
        let mut free = taken.iter().enumerate().filter(|(_, &t)| !t).map(|(y, _)| y);
        for x in 0..label_count {
            if perm[x] == usize::MAX {
                perm[x] = free.next().expect("label and output spaces have equal size");
            }
        }
        for (x, p) in perm.iter_mut().enumerate().skip(label_count) {
            *p = x;
        }
        Ok(perm)
    };
    let col_perm = assign(&col_slots, |p| p.1)?;
    let row_perm = assign(&row_slots, |p| p.0)?;

    let mut range_flags = vec![true; work];
    for &(d, m) in &labels {
        range_flags[index(d, m)] = false;
    }

    let transpose_perm = if spec.has_transpose() {
        let mut tau: Vec<usize> = (0..work).collect();
        for &(d, m) in &labels {
            let (d2, m2) = spec.transpose(d, m).expect("checked above");
            tau[index(d, m)] = index(d2, m2);
        }
        if !is_bijection(&tau) || tau.iter().enumerate().any(|(x, &t)| tau[t] != x) {
            return Err(Error::InvalidTranspose("not an involution on the label space".into()));
        }
        Some(tau)
    } else {
        None
    };

    let support = |slots: &[usize]| {
        let mut s = slots.to_vec();
        s.sort_unstable();
        s.dedup();
        s
    };

    Ok(OracleTables {
        shape: *shape,
        col_support: support(&col_slots),
        row_support: support(&row_slots),
        col_perm,
        row_perm,
        range_flags,
        transpose_perm,
        slot_rule: rule,
    })
}

/// A spec together with everything derived from it.
#[derive(Debug, Clone)]
pub struct CompiledStructure {
    pub spec: StructureSpec,
    pub counts: Counts,
    pub shape: PaddedShape,
    pub tables: OracleTables,
}

/// Runs [`derive_counts`], [`pad_shape`] and [`complete_oracles`].
pub fn compile(spec: &StructureSpec) -> Result<CompiledStructure> {
    let counts = derive_counts(spec)?;
    let shape = pad_shape(&counts, spec.n());
    let tables = complete_oracles(spec, &shape)?;
    Ok(CompiledStructure {
        spec: spec.clone(),
        counts,
        shape,
        tables,
    })
}
