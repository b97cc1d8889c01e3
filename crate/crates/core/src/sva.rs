//! Singular value amplification by an odd Chebyshev polynomial.
//!
//! The target is `g(x) = γ·x·f(x)` with `f` an error-function approximation of
//! the rectangle of half width `x₀`. `g` is interpolated at Chebyshev nodes of
//! the first kind, the even coefficients are zeroed, and the smallest degree
//! passing the grid checks is located by doubling and bisection.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nalgebra::DMatrix;
use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::tolerance;

/// Sweep points needed before a prefactor fit is considered reliable.
pub const MIN_FIT_POINTS: usize = 12;

/// Default range margin `δ = 1 − 2^{-1/4}`.
pub fn default_delta() -> f64 {
    1.0 - 2f64.powf(-0.25)
}

/// Smoothed rectangle `f(x) = (erf(κ(x+x₀)) − erf(κ(x−x₀)))/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectFunction {
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub x0: f64,
    pub kappa: f64,
}

impl RectFunction {
    pub fn eval(&self, x: f64) -> f64 {
        0.5 * (erf(self.kappa * (x + self.x0)) - erf(self.kappa * (x - self.x0)))
    }

    /// `g(x) = γ x f(x)`.
    pub fn target(&self, x: f64) -> f64 {
        self.gamma * x * self.eval(x)
    }

    /// Right end `(1−δ)/γ` of the accuracy region.
    pub fn plateau_end(&self) -> f64 {
        (1.0 - self.delta) / self.gamma
    }

    /// Half width `δ/(2γ)` of each transition region.
    pub fn transition_half_width(&self) -> f64 {
        self.delta / (2.0 * self.gamma)
    }
}

fn check_params(gamma: f64, delta: f64, epsilon: f64) -> Result<()> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::InfeasibleParameters(format!("gamma = {gamma} must exceed 1")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InfeasibleParameters(format!("delta = {delta} outside (0, 1/2)")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InfeasibleParameters(format!("epsilon = {epsilon} outside (0, 1/2)")));
    }
    Ok(())
}

/// Builds `f` with `x₀ = (1−δ/2)/γ` and `κ = (2γ/δ)·√ln(4/ε)`, then checks both erf bounds.
pub fn rect_approx(gamma: f64, delta: f64, epsilon: f64) -> Result<RectFunction> {
    check_params(gamma, delta, epsilon)?;
    let rect = RectFunction {
        gamma,
        delta,
        epsilon,
        x0: (1.0 - delta / 2.0) / gamma,
        kappa: (2.0 * gamma / delta) * (4.0 / epsilon).ln().sqrt(),
    };
    let inner = rect.eval(rect.plateau_end());
    let outer = rect.eval(rect.x0 + rect.transition_half_width());
    if inner < 1.0 - epsilon / 2.0 || outer > epsilon / 2.0 {
        return Err(Error::InfeasibleParameters(format!(
            "erf bounds fail: f(plateau) = {inner}, f(outside) = {outer}"
        )));
    }
    Ok(rect)
}

/// Odd polynomial in the Chebyshev basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevPoly {
    pub coefficients: Vec<f64>,
    pub degree: usize,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl ChebyshevPoly {
    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coefficients, x)
    }
}

/// `Σ c_k T_k(x)` by the Clenshaw recurrence.
pub fn clenshaw(c: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    let two_x = 2.0 * x;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + two_x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Chebyshev interpolant of `g` at the `degree + 1` first-kind nodes.
/// With `odd`, the even coefficients are zeroed.
pub fn chebyshev_interpolate(g: impl Fn(f64) -> f64, degree: usize, odd: bool) -> Vec<f64> {
    let n = degree + 1;
    let theta = |j: usize| std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
    let y: Vec<f64> = (0..n).map(|j| g(theta(j).cos())).collect();
    let mut c = dct2(&y);
    for ck in c.iter_mut() {
        *ck *= 2.0 / n as f64;
    }
    c[0] /= 2.0;
    if odd {
        for ck in c.iter_mut().step_by(2) {
            *ck = 0.0;
        }
    }
    c
}

/// Unnormalised DCT-II `Σ_j y_j cos(πk(j+½)/n)` through a length-`2n` FFT.
fn dct2(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut buf: Vec<Complex<f64>> = y
        .iter()
        .chain(y.iter().rev())
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(2 * n).process(&mut buf);
    (0..n)
        .map(|k| {
            let phase = Complex::from_polar(1.0, -std::f64::consts::PI * k as f64 / (2 * n) as f64);
            0.5 * (buf[k] * phase).re
        })
        .collect()
}

/// Interpolates `g = γ x f` at the given degree with odd parity enforced.
pub fn chebyshev_truncate(rect: &RectFunction, degree: usize) -> ChebyshevPoly {
    ChebyshevPoly {
        coefficients: chebyshev_interpolate(|x| rect.target(x), degree, true),
        degree,
        gamma: rect.gamma,
        delta: rect.delta,
        epsilon: rect.epsilon,
    }
}

/// Non-negative half of `⌈density·10³γ/(1−δ)⌉` equispaced points on `[−1, 1]`,
/// plus the plateau end `(1−δ)/γ`. Oddness covers the negative half.
pub fn check_grid(gamma: f64, delta: f64, density: f64) -> Vec<f64> {
    let npts = (density * 1e3 * gamma / (1.0 - delta)).ceil() as usize;
    let npts = npts.max(2);
    let step = 2.0 / (npts - 1) as f64;
    let mut xs: Vec<f64> = (0..npts)
        .map(|k| -1.0 + k as f64 * step)
        .filter(|&x| x >= 0.0)
        .collect();
    xs.push((1.0 - delta) / gamma);
    xs
}

/// Outcome of checking a polynomial on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCheck {
    pub max_abs: f64,
    /// Largest `|P(ζ) − γζ| / (γζ)` over the accuracy region.
    pub max_relative_error: f64,
    pub passed: bool,
}

pub fn check_poly(poly: &ChebyshevPoly, grid: &[f64]) -> GridCheck {
    let end = (1.0 - poly.delta) / poly.gamma;
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    let mut passed = true;
    for &x in grid {
        let p = poly.eval(x);
        max_abs = max_abs.max(p.abs());
        if p.abs() > 1.0 + tolerance::POLY_BOUND {
            passed = false;
        }
        if x > 0.0 && x <= end {
            let target = poly.gamma * x;
            let err = (p - target).abs();
            max_rel = max_rel.max(err / target);
            if err > poly.epsilon * target {
                passed = false;
            }
        }
    }
    GridCheck {
        max_abs,
        max_relative_error: max_rel,
        passed,
    }
}

/// Smallest odd degree whose interpolant passes the search grid.
pub fn min_degree(gamma: f64, delta: f64, epsilon: f64) -> Result<usize> {
    Ok(min_degree_poly(gamma, delta, epsilon)?.degree)
}

/// Polynomial of [`min_degree`].
pub fn min_degree_poly(gamma: f64, delta: f64, epsilon: f64) -> Result<ChebyshevPoly> {
    let rect = rect_approx(gamma, delta, epsilon)?;
    let grid = check_grid(gamma, delta, 1.0);
    let attempt = |half: usize| {
        let poly = chebyshev_truncate(&rect, 2 * half + 1);
        let ok = check_poly(&poly, &grid).passed;
        (ok, poly)
    };
    let (ok, poly) = attempt(0);
    if ok {
        return Ok(poly);
    }
    let max_half = (tolerance::MAX_POLY_DEGREE - 1) / 2;
    let mut lo = 0;
    let mut hi = 1;
    let mut best = loop {
        let (ok, poly) = attempt(hi);
        if ok {
            break poly;
        }
        if hi >= max_half {
            return Err(Error::InfeasibleParameters(format!(
                "no degree up to {} meets the accuracy for gamma={gamma}, delta={delta}, epsilon={epsilon}",
                tolerance::MAX_POLY_DEGREE
            )));
        }
        lo = hi;
        hi = (2 * hi).min(max_half);
    };
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let (ok, poly) = attempt(mid);
        if ok {
            hi = mid;
            best = poly;
        } else {
            lo = mid;
        }
    }
    Ok(best)
}

/// Paper's degree model `3·(γ/δ)·ln(γ/ε)`.
pub fn predicted_degree(gamma: f64, delta: f64, epsilon: f64) -> f64 {
    3.0 * scaling_variable(gamma, delta, epsilon)
}

/// `(γ/δ)·ln(γ/ε)`.
pub fn scaling_variable(gamma: f64, delta: f64, epsilon: f64) -> f64 {
    gamma / delta * (gamma / epsilon).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub degree: usize,
    pub predicted_degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefactorFit {
    pub c: f64,
    /// `degree − c·(γ/δ)ln(γ/ε)` per row.
    pub residuals: Vec<f64>,
    /// `max − min` of `degree / (c·X)`.
    pub relative_spread: f64,
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSweepResult {
    pub rows: Vec<SweepRow>,
    pub fit: PrefactorFit,
}

/// Least-squares `c` in `degree ≈ c·(γ/δ)ln(γ/ε)`.
pub fn fit_prefactor(rows: &[SweepRow]) -> Result<PrefactorFit> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("empty sweep".into()));
    }
    let xs: Vec<f64> = rows
        .iter()
        .map(|r| scaling_variable(r.gamma, r.delta, r.epsilon))
        .collect();
    let sxy: f64 = xs.iter().zip(rows).map(|(x, r)| x * r.degree as f64).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let c = sxy / sxx;
    let residuals = xs.iter().zip(rows).map(|(x, r)| r.degree as f64 - c * x).collect();
    let ratios: Vec<f64> = xs.iter().zip(rows).map(|(x, r)| r.degree as f64 / (c * x)).collect();
    let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
    let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
    Ok(PrefactorFit {
        c,
        residuals,
        relative_spread: hi - lo,
        low_confidence: rows.len() < MIN_FIT_POINTS,
    })
}

/// Runs [`min_degree`] over the grid product on worker threads and fits `c`.
pub fn degree_sweep(gammas: &[f64], deltas: &[f64], epsilons: &[f64]) -> Result<DegreeSweepResult> {
    let points: Vec<(f64, f64, f64)> = gammas
        .iter()
        .flat_map(|&g| deltas.iter().flat_map(move |&d| epsilons.iter().map(move |&e| (g, d, e))))
        .collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(points.len().max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<usize>>>> = Mutex::new(vec![None; points.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(g, d, e)) = points.get(k) else { break };
                let degree = min_degree(g, d, e);
                results.lock().expect("worker panicked")[k] = Some(degree);
            });
        }
    });
    let results = results.into_inner().expect("worker panicked");
    let rows = points
        .iter()
        .zip(results)
        .map(|(&(gamma, delta, epsilon), r)| {
            Ok(SweepRow {
                gamma,
                delta,
                epsilon,
                degree: r.expect("every point evaluated")?,
                predicted_degree: predicted_degree(gamma, delta, epsilon),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_prefactor(&rows)?;
    Ok(DegreeSweepResult { rows, fit })
}

/// Thin SVD `U·diag(σ)·Vᵀ` together with the amplified `P(σ)`.
#[derive(Debug, Clone)]
pub struct AmplifiedSvd {
    pub u: Array2<f64>,
    pub v: Array2<f64>,
    pub sigma: Vec<f64>,
    pub amplified: Vec<f64>,
}

impl AmplifiedSvd {
    /// `U·diag(P(σ))·Vᵀ`.
    pub fn matrix(&self) -> Array2<f64> {
        let scaled = &self.u * &ndarray::Array1::from(self.amplified.clone());
        scaled.dot(&self.v.t())
    }
}

/// Thin SVD `(U, σ, V)` with `block = U·diag(σ)·Vᵀ`.
pub fn thin_svd(block: &Array2<f64>) -> (Array2<f64>, Vec<f64>, Array2<f64>) {
    let (rows, cols) = block.dim();
    let m = DMatrix::from_fn(rows, cols, |i, j| block[[i, j]]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let k = svd.singular_values.len();
    (
        Array2::from_shape_fn((rows, k), |(i, j)| u[(i, j)]),
        svd.singular_values.iter().copied().collect(),
        Array2::from_shape_fn((cols, k), |(i, j)| vt[(j, i)]),
    )
}

/// Decomposes `block` and maps its singular values through `poly`.
pub fn amplify_svd(block: &Array2<f64>, poly: &ChebyshevPoly) -> Result<AmplifiedSvd> {
    let (u, sigma, v) = thin_svd(block);
    let limit = (1.0 - poly.delta) / poly.gamma;
    if let Some(&s) = sigma.iter().find(|&&s| s > limit * (1.0 + tolerance::SINGULAR_RANGE)) {
        return Err(Error::SingularValueOutOfRange { value: s, limit });
    }
    let amplified = sigma.iter().map(|&s| poly.eval(s)).collect();
    Ok(AmplifiedSvd { u, v, sigma, amplified })
}

/// `U·diag(P(σ))·Vᵀ` for the SVD of `block`.
pub fn amplify_singular_values(block: &Array2<f64>, poly: &ChebyshevPoly) -> Result<Array2<f64>> {
    Ok(amplify_svd(block, poly)?.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn direct_dct_coeffs(g: impl Fn(f64) -> f64, degree: usize) -> Vec<f64> {
        let n = degree + 1;
        let th: Vec<f64> = (0..n).map(|j| std::f64::consts::PI * (j as f64 + 0.5) / n as f64).collect();
        (0..n)
            .map(|k| {
                let s: f64 = th.iter().map(|&t| g(t.cos()) * (k as f64 * t).cos()).sum();
                let c = 2.0 / n as f64 * s;
                if k == 0 {
                    c / 2.0
                } else {
                    c
                }
            })
            .collect()
    }

    #[test]
    fn rect_plateau_and_tail() {
        let r = rect_approx(4.0, 0.16, 1e-3).unwrap();
        assert!(r.eval(0.0) >= 1.0 - 5e-4);
        assert!(r.eval(1.0) <= 5e-4);
        for x in [0.01, 0.1, 0.2, 0.3] {
            assert_eq!(r.eval(x), r.eval(-x));
        }
    }

    #[test]
    fn rect_rejects_bad_parameters() {
        assert!(matches!(rect_approx(1.0, 0.1, 1e-3), Err(Error::InfeasibleParameters(_))));
        assert!(matches!(rect_approx(2.0, 0.6, 1e-3), Err(Error::InfeasibleParameters(_))));
        assert!(matches!(rect_approx(2.0, 0.1, 0.7), Err(Error::InfeasibleParameters(_))));
    }

    #[test]
    fn interpolating_identity() {
        let c = chebyshev_interpolate(|x| x, 1, true);
        assert!(c[0].abs() < 1e-15);
        assert!((c[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fft_dct_matches_direct_sum() {
        let g = |x: f64| (3.0 * x).sin() + 0.2 * x * x;
        let a = chebyshev_interpolate(g, 12, false);
        let b = direct_dct_coeffs(g, 12);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolant_reproduces_nodes() {
        let g = |x: f64| x.exp();
        let degree = 9;
        let c = chebyshev_interpolate(g, degree, false);
        for j in 0..=degree {
            let x = (std::f64::consts::PI * (j as f64 + 0.5) / (degree + 1) as f64).cos();
            assert!((clenshaw(&c, x) - g(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn searched_polynomial_passes_dense_grid() {
        let poly = min_degree_poly(2.0, 0.16, 1e-2).unwrap();
        assert_eq!(poly.degree % 2, 1);
        let dense = check_grid(2.0, 0.16, 10.0);
        assert!(check_poly(&poly, &dense).passed);
        let below = chebyshev_truncate(&rect_approx(2.0, 0.16, 1e-2).unwrap(), poly.degree - 2);
        assert!(!check_poly(&below, &check_grid(2.0, 0.16, 1.0)).passed);
    }

    #[test]
    fn stricter_accuracy_needs_higher_degree() {
        let a = min_degree(4.0, 0.159, 1e-2).unwrap();
        let b = min_degree(4.0, 0.159, 1e-3).unwrap();
        assert!(b >= a);
    }

    #[test]
    fn doubling_gamma_roughly_doubles_degree() {
        let a = min_degree(4.0, 0.159, 1e-3).unwrap() as f64;
        let b = min_degree(8.0, 0.159, 1e-3).unwrap() as f64;
        let r = b / a;
        assert!((1.8..=2.4).contains(&r), "ratio {r}");
    }

    #[test]
    fn fit_on_exact_model_recovers_three() {
        let rows: Vec<SweepRow> = [(2.0, 0.1, 1e-2), (4.0, 0.08, 1e-3), (8.0, 0.16, 1e-4)]
            .iter()
            .map(|&(g, d, e)| SweepRow {
                gamma: g,
                delta: d,
                epsilon: e,
                degree: 0,
                predicted_degree: 0.0,
            })
            .collect();
        // Degrees are integers, so use a scaled model large enough to round cleanly.
        let rows: Vec<SweepRow> = rows
            .into_iter()
            .map(|mut r| {
                r.degree = (3.0 * scaling_variable(r.gamma, r.delta, r.epsilon)).round() as usize;
                r
            })
            .collect();
        let fit = fit_prefactor(&rows).unwrap();
        assert!((fit.c - 3.0).abs() < 1e-3);
        assert!(fit.low_confidence);
    }

    #[test]
    fn zero_block_stays_zero() {
        let poly = min_degree_poly(4.0, 0.16, 1e-3).unwrap();
        let z = Array2::<f64>::zeros((3, 2));
        let out = amplify_singular_values(&z, &poly).unwrap();
        assert!(out.iter().all(|&x| x.abs() < 1e-15));
    }

    #[test]
    fn diagonal_block_is_scaled_by_gamma() {
        let poly = min_degree_poly(4.0, 0.16, 1e-4).unwrap();
        let out = amplify_singular_values(&array![[0.1, 0.0], [0.0, 0.2]], &poly).unwrap();
        assert!((out[[0, 0]] / 0.4 - 1.0).abs() <= 1e-4);
        assert!((out[[1, 1]] / 0.8 - 1.0).abs() <= 1e-4);
        assert!(out[[0, 1]].abs() < 1e-12);
    }

    #[test]
    fn out_of_range_singular_value_is_rejected() {
        let poly = min_degree_poly(4.0, 0.16, 1e-3).unwrap();
        let r = amplify_singular_values(&array![[0.5]], &poly);
        assert!(matches!(r, Err(Error::SingularValueOutOfRange { .. })));
    }

    #[test]
    fn sweep_has_row_per_point() {
        let res = degree_sweep(&[2.0, 4.0], &[0.159], &[1e-2]).unwrap();
        assert_eq!(res.rows.len(), 2);
        assert!(res.rows[1].degree >= res.rows[0].degree);
        assert!(res.fit.low_confidence);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn polynomial_is_odd(x in -1.0f64..1.0, gamma in 2.0f64..6.0) {
                let poly = chebyshev_truncate(&rect_approx(gamma, 0.16, 1e-3).unwrap(), 41);
                prop_assert_eq!(poly.eval(-x), -poly.eval(x));
            }

            #[test]
            fn amplification_commutes_with_rotations(a in -0.1f64..0.1, b in -0.1f64..0.1, c in -0.1f64..0.1,
                                                     t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
                let poly = min_degree_poly(3.0, 0.16, 1e-3).unwrap();
                let m = array![[a, b], [c, a - b]];
                let q = array![[t1.cos(), -t1.sin()], [t1.sin(), t1.cos()]];
                let r = array![[t2.cos(), -t2.sin()], [t2.sin(), t2.cos()]];
                let lhs = amplify_singular_values(&q.dot(&m).dot(&r.t()), &poly).unwrap();
                let rhs = q.dot(&amplify_singular_values(&m, &poly).unwrap()).dot(&r.t());
                for (x, y) in lhs.iter().zip(&rhs) {
                    prop_assert!((x - y).abs() < 1e-9);
                }
            }
        }
    }
}
