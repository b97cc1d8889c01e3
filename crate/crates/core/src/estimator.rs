//! Cost rows of the scheme comparison table and data-loading models.

use ndarray::Array2;
use serde::Serialize;

use crate::circuit::pow_abs;
use crate::error::{Error, Result};
use crate::schemes::{alpha_p, amplification_cost};
use crate::structure::{ceil_log2, derive_counts, pad_shape, StructureSpec};
use crate::sva;
use crate::verify::dense_from_structure;

/// Toffoli counts of the two table-lookup loaders for `D` items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ToffoliAnnotation {
    pub qrom: usize,
    pub select_swap: usize,
}

impl ToffoliAnnotation {
    pub fn for_items(d: usize) -> Self {
        ToffoliAnnotation {
            qrom: d.saturating_sub(2),
            select_swap: ceil_sqrt(d),
        }
    }
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostRecord {
    pub scheme: String,
    pub data_loading: f64,
    pub subnormalisation: f64,
    pub flag_qubits: usize,
    /// `data_loading · subnormalisation`.
    pub figure_of_merit: f64,
    pub toffoli_model: Option<ToffoliAnnotation>,
    pub note: Option<String>,
}

impl CostRecord {
    pub fn new(scheme: impl Into<String>, data_loading: f64, subnormalisation: f64, flag_qubits: usize) -> Self {
        CostRecord {
            scheme: scheme.into(),
            data_loading,
            subnormalisation,
            flag_qubits,
            figure_of_merit: data_loading * subnormalisation,
            toffoli_model: None,
            note: None,
        }
    }

    fn with_toffoli(mut self, d: usize) -> Self {
        self.toffoli_model = Some(ToffoliAnnotation::for_items(d));
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn ceil_sqrt(d: usize) -> usize {
    let mut r = (d as f64).sqrt().floor() as usize;
    while r * r < d {
        r += 1;
    }
    r
}

/// `√(max_i Σ_j |A_ij|^{2p} · max_j Σ_i |A_ij|^{2−2p})` over nonzero entries.
pub fn mu_p(a: &Array2<f64>, p: f64) -> f64 {
    (max_row_sum(a, 2.0 * p) * max_col_sum(a, 2.0 - 2.0 * p)).sqrt()
}

/// `max_i Σ_j |A_ij|^q`.
pub fn max_row_sum(a: &Array2<f64>, q: f64) -> f64 {
    a.rows()
        .into_iter()
        .map(|r| r.iter().map(|&x| pow_abs(x, q)).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `max_j Σ_i |A_ij|^q`.
pub fn max_col_sum(a: &Array2<f64>, q: f64) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|&x| pow_abs(x, q)).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_norm(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn frobenius_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn spectral_norm(a: &Array2<f64>) -> f64 {
    sva::thin_svd(a).1.into_iter().fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmpFactor {
    pub gamma_c: f64,
    pub gamma_r: f64,
    pub amp: f64,
}

/// `γ_c = ‖A‖_max^p·√(S_c/(√2·max_j Σ_i |A_ij|^{2p}))`, likewise `γ_r` with rows and
/// `1−p`, both clipped at 1, and `amp = 3((γ_c/δ)ln(γ_c/ε) + (γ_r/δ)ln(γ_r/ε))`.
pub fn amp_factor(a: &Array2<f64>, s_c: usize, s_r: usize, p: f64, delta: f64, epsilon: f64) -> AmpFactor {
    let max = max_norm(a);
    let root2 = 2f64.sqrt();
    let gamma = |s: usize, q: f64, sum: f64| {
        if sum == 0.0 {
            return 1.0;
        }
        (pow_abs(max, q) * (s as f64 / (root2 * sum)).sqrt()).max(1.0)
    };
    let gamma_c = gamma(s_c, p, max_col_sum(a, 2.0 * p));
    let gamma_r = gamma(s_r, 1.0 - p, max_row_sum(a, 2.0 - 2.0 * p));
    AmpFactor {
        gamma_c,
        gamma_r,
        amp: amplification_cost(gamma_c, gamma_r, delta, epsilon),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadingStrategy {
    Qrom,
    SelectSwap,
    MultiplexedRotations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LoadingModel {
    pub items: usize,
    pub qrom_toffolis: usize,
    pub qrom_ancillas: usize,
    pub select_swap_toffolis: usize,
    pub select_swap_ancillas: usize,
    pub rotations: usize,
    pub cnots: usize,
    pub chosen: LoadingStrategy,
}

/// Picks the cheapest loader whose ancilla needs fit the budget.
pub fn loading_model(d: usize, ancilla_budget: usize) -> Result<LoadingModel> {
    if d == 0 {
        return Err(Error::InvalidParameter("no data items".into()));
    }
    let address = ceil_log2(d);
    let root = ceil_sqrt(d);
    let model = LoadingModel {
        items: d,
        qrom_toffolis: d.saturating_sub(2),
        qrom_ancillas: address,
        select_swap_toffolis: root,
        select_swap_ancillas: root + address,
        rotations: d,
        cnots: d,
        chosen: LoadingStrategy::MultiplexedRotations,
    };
    let chosen = if ancilla_budget >= model.select_swap_ancillas && model.select_swap_toffolis <= model.qrom_toffolis {
        LoadingStrategy::SelectSwap
    } else if ancilla_budget >= model.qrom_ancillas && ancilla_budget > 0 {
        LoadingStrategy::Qrom
    } else {
        LoadingStrategy::MultiplexedRotations
    };
    Ok(LoadingModel { chosen, ..model })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateParams {
    pub p: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl Default for EstimateParams {
    fn default() -> Self {
        EstimateParams {
            p: 0.5,
            delta: sva::default_delta(),
            epsilon: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostTable {
    pub rows: Vec<CostRecord>,
    pub notes: Vec<String>,
}

impl CostTable {
    pub fn row(&self, scheme: &str) -> Option<&CostRecord> {
        self.rows.iter().find(|r| r.scheme == scheme)
    }
}

/// True if every value occurs exactly once in every column.
fn values_once_per_column(spec: &StructureSpec) -> Result<bool> {
    let n = spec.n();
    let mut count = vec![vec![0usize; spec.d()]; n];
    for (d, m) in spec.labels() {
        let (_, j) = spec.position(d, m)?;
        count[j][d] += 1;
    }
    Ok(count.iter().all(|col| col.iter().all(|&c| c == 1)))
}

fn round_up_to_multiple(x: usize, m: usize) -> usize {
    x.div_ceil(m) * m
}

/// All applicable rows for `spec`.
pub fn table_rows(spec: &StructureSpec, params: &EstimateParams) -> Result<CostTable> {
    let a = dense_from_structure(spec)?;
    let max = max_norm(&a);
    if max == 0.0 {
        return Err(Error::AllZeroValues);
    }
    let counts = derive_counts(spec)?;
    let shape = pad_shape(&counts, spec.n());
    let d = counts.d;
    let n = spec.n();
    let (s_c, s_r) = (counts.s_c, counts.s_r);
    let s_bits = shape.s_qubits();
    let n_bits = ceil_log2(n);
    let values = spec.values();
    let mut rows = Vec::new();
    let mut notes = Vec::new();

    let base_alpha = ((s_c * s_r) as f64).sqrt() * max;
    rows.push(CostRecord::new("base", d as f64, base_alpha, 2 + s_bits).with_toffoli(d));

    let amp = amp_factor(&a, s_c, s_r, params.p, params.delta, params.epsilon);
    rows.push(
        CostRecord::new(
            "preamplified",
            d as f64 * amp.amp,
            base_alpha / (amp.gamma_c * amp.gamma_r),
            5 + s_bits,
        )
        .with_toffoli(d),
    );

    if d > shape.s {
        notes.push(
            Error::PrepRowOmitted(format!("D = {d} exceeds the sparsity S = {}", shape.s)).to_string(),
        );
    } else {
        let (pc, pr) = (round_up_to_multiple(s_c, d), round_up_to_multiple(s_r, d));
        let mut note = None;
        if (pc, pr) != (s_c, s_r) {
            note = Some(format!(
                "sparsities padded from ({s_c}, {s_r}) to ({pc}, {pr}) so that D divides them"
            ));
        }
        let prep_bits = ceil_log2(pc.max(pr).max(shape.s));
        let mut half = CostRecord::new("prep", d as f64, alpha_p(values, pc, pr, 0.5), 1 + prep_bits).with_toffoli(d);
        if let Some(msg) = &note {
            half = half.with_note(msg.clone());
            notes.push(msg.clone());
        }
        rows.push(half);
        if params.p != 0.5 {
            let mut general = CostRecord::new(
                format!("prep_p{}", params.p),
                2.0 * d as f64,
                alpha_p(values, pc, pr, params.p),
                1 + prep_bits,
            )
            .with_toffoli(d);
            if let Some(msg) = note {
                general = general.with_note(msg);
            }
            rows.push(general);
        }
    }

    let blackbox = "sparse-access blackbox realised with D data loads";
    rows.push(
        CostRecord::new("gilyen_base", d as f64, base_alpha, 3 + n_bits)
            .with_toffoli(d)
            .with_note(blackbox),
    );
    rows.push(
        CostRecord::new(
            "gilyen_preamplified",
            d as f64 * amp.amp,
            2f64.sqrt() * mu_p(&a, params.p),
            8 + n_bits,
        )
        .with_toffoli(d)
        .with_note(blackbox),
    );
    if values_once_per_column(spec)? {
        rows.push(CostRecord::new("camps_banded_circulant", d as f64, d as f64 * max, 1 + ceil_log2(d)).with_toffoli(d));
    }
    rows.push(CostRecord::new(
        "chakraborty_base",
        (n * n + n) as f64,
        frobenius_norm(&a),
        1 + n_bits,
    ));
    rows.push(CostRecord::new(
        "chakraborty_pnorm",
        2.0 * (n * n) as f64,
        mu_p(&a, params.p),
        2 + n_bits,
    ));
    Ok(CostTable { rows, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::schemes::{self, AmplificationParams};
    use crate::structure::compile;
    use ndarray::array;

    #[test]
    fn mu_p_examples() {
        let eye = Array2::<f64>::eye(5);
        for p in [0.0, 0.3, 0.5, 1.0] {
            assert!((mu_p(&eye, p) - 1.0).abs() < 1e-15);
        }
        let ones = Array2::<f64>::ones((4, 4));
        assert!((mu_p(&ones, 0.5) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mu_half_below_sparse_bound() {
        let a = array![[0.5, -1.0, 0.0], [0.0, 0.25, 2.0], [1.0, 0.0, 0.1]];
        assert!(mu_p(&a, 0.5) <= 2.0 * max_norm(&a) + 1e-12);
    }

    #[test]
    fn toeplitz_base_row() {
        let spec = families::toeplitz(8, 1, &[0.5, -1.0, 0.25, 0.75], false).unwrap();
        let table = table_rows(&spec, &EstimateParams::default()).unwrap();
        let base = table.row("base").unwrap();
        assert_eq!(base.data_loading, 4.0);
        assert!((base.subnormalisation - 4.0).abs() < 1e-12);
        assert_eq!(base.flag_qubits, 4);
        assert!(table.row("prep").is_some());
        for r in &table.rows {
            assert_eq!(r.figure_of_merit, r.data_loading * r.subnormalisation);
        }
    }

    #[test]
    fn tridiagonal_omits_prep() {
        let values: Vec<f64> = (0..15).map(|x| x as f64 + 1.0).collect();
        let spec = families::tridiagonal(8, &values, true).unwrap();
        let table = table_rows(&spec, &EstimateParams::default()).unwrap();
        assert!(table.row("prep").is_none());
        assert!(table.notes.iter().any(|n| n.contains("PREP")));
    }

    #[test]
    fn binary_tree_prep_workaround() {
        let spec = families::binary_tree(8, 1.0, -2.0, 0.5).unwrap();
        let table = table_rows(&spec, &EstimateParams::default()).unwrap();
        let prep = table.row("prep").unwrap();
        assert!((prep.subnormalisation - 2.0 * 3.5).abs() < 1e-12);
        assert!(prep.note.is_some());
    }

    #[test]
    fn circulant_matches_camps() {
        let spec = families::toeplitz(8, 1, &[0.3, 1.0, -0.4], true).unwrap();
        let table = table_rows(&spec, &EstimateParams::default()).unwrap();
        let camps = table.row("camps_banded_circulant").unwrap();
        let base = table.row("base").unwrap();
        assert_eq!(camps.data_loading, base.data_loading);
        assert!((camps.subnormalisation - base.subnormalisation).abs() < 1e-12);
        let banded = families::toeplitz(8, 1, &[0.3, 1.0, -0.4], false).unwrap();
        assert!(table_rows(&banded, &EstimateParams::default())
            .unwrap()
            .row("camps_banded_circulant")
            .is_none());
    }

    #[test]
    fn gamma_bounded_by_sparsity() {
        let spec = families::toeplitz(8, 1, &[0.01, 1.0, 0.02, 0.03], false).unwrap();
        let a = dense_from_structure(&spec).unwrap();
        let f = amp_factor(&a, 4, 4, 0.5, sva::default_delta(), 1e-3);
        assert!(f.gamma_c <= (4.0 / 2f64.sqrt()).sqrt() + 1e-12);
        assert!(f.gamma_c > 1.0);
    }

    #[test]
    fn uniform_values_do_not_amplify() {
        let spec = families::toeplitz(8, 0, &[1.0, -1.0, 1.0, 1.0], true).unwrap();
        let a = dense_from_structure(&spec).unwrap();
        let f = amp_factor(&a, 4, 4, 0.5, sva::default_delta(), 1e-3);
        assert_eq!((f.gamma_c, f.gamma_r), (1.0, 1.0));
    }

    #[test]
    fn single_column_gamma_matches_builder() {
        let spec = crate::structure::StructureSpec::new(
            "column",
            4,
            vec![0.1, 1.0, 0.3, 0.2],
            1,
            std::sync::Arc::new(|d, _| d as i64),
            std::sync::Arc::new(|_, _| 0),
        )
        .unwrap();
        let a = dense_from_structure(&spec).unwrap();
        let f = amp_factor(&a, 4, 1, 0.5, sva::default_delta(), 1e-3);
        let enc = schemes::build_preamplified(&compile(&spec).unwrap(), &AmplificationParams::default()).unwrap();
        let info = enc.amplification.unwrap();
        assert!((f.gamma_c - info.column.gamma).abs() < 1e-12);
    }

    #[test]
    fn loading_model_examples() {
        assert_eq!(loading_model(2, 10).unwrap().qrom_toffolis, 0);
        let high = loading_model(16, 100).unwrap();
        assert_eq!(high.chosen, LoadingStrategy::SelectSwap);
        assert_eq!(high.select_swap_toffolis, 4);
        let none = loading_model(16, 0).unwrap();
        assert_eq!(none.chosen, LoadingStrategy::MultiplexedRotations);
        assert_eq!(none.rotations, 16);
        assert_eq!(loading_model(16, 4).unwrap().chosen, LoadingStrategy::Qrom);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn prep_never_exceeds_base(values in proptest::collection::vec(-1.0f64..1.0, 1..8), circ in any::<bool>()) {
                prop_assume!(values.iter().any(|v| v.abs() > 1e-6));
                let spec = families::toeplitz(8, 0, &values, circ).unwrap();
                let table = table_rows(&spec, &EstimateParams::default()).unwrap();
                let base = table.row("base").unwrap().subnormalisation;
                let prep = table.row("prep").unwrap().subnormalisation;
                prop_assert!(prep <= base * (1.0 + 1e-12));
                let a = dense_from_structure(&spec).unwrap();
                let floor = spectral_norm(&a) - 1e-9;
                for r in &table.rows {
                    prop_assert!(r.subnormalisation >= floor, "{} {}", r.scheme, r.subnormalisation);
                    prop_assert_eq!(r.figure_of_merit, r.data_loading * r.subnormalisation);
                }
            }
        }
    }
}
