//! Model-independent relations between a hapax rate and vocabulary growth.
//!
//! Writing `u = ln n`, a hapax rate `h(u)` determines the vocabulary size
//! function through `g(n) = exp ∫_0^{ln n} h(u) du`. The expected spectrum
//! follows from the derivatives of `g`,
//! `g(n|k) = -(-n)^k / k! · g^{(k)}(n)`, and the rank function from the
//! truncated Taylor series `g(n||f) = g(n) - Σ_{k<f} g(n|k)`. The relative
//! spectrum `h(u|k) = g(n|k)/g(n)` obeys the differential recursion
//! `h(u|k) = [1 - (1 + h(u) + d/du)/k] h(u|k-1)` with `h(u|0) = -1`.
//!
//! An empirical spectrum `v*_k` of a text of length `n*` is smoothed by
//! expanding around `n*`, which amounts to binomial thinning of each type.

use std::cell::Cell;
use std::fmt::Write as _;

use crate::corpus::FrequencySpectrum;
use crate::error::{argument, Error, Result};
use crate::format::fmt_sig;
use crate::numeric::{adaptive_simpson, richardson_derivative_tol};
use crate::special::{ln_binomial_unchecked, ln_factorial};

/// A hapax rate function `u ↦ h(u)`.
pub trait HapaxRate: Send + Sync {
    fn hapax_rate(&self, u: f64) -> f64;

    /// Analytic `h'(u)` when available.
    fn hapax_rate_derivative(&self, _u: f64) -> Option<f64> {
        None
    }

    /// Exact relative spectrum `h(u|0..=kmax)` when the family has a closed
    /// recursion for it.
    fn exact_relative_spectrum(&self, _u: f64, _kmax: usize) -> Option<Vec<f64>> {
        None
    }
}

/// A vocabulary size function with its spectrum and rank function.
pub trait VocabularySize: Send + Sync {
    fn vocab(&self, n: f64) -> f64;

    fn spectrum(&self, n: f64, k: u64) -> f64;

    fn rank(&self, n: f64, f: u64) -> f64 {
        rank_from_spectrum(self, n, f)
    }
}

type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A hapax rate given by closures.
pub struct HapaxRateFunction {
    eval: RealFn,
    derivative: Option<RealFn>,
}

impl HapaxRateFunction {
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Box::new(eval), derivative: None }
    }

    pub fn with_derivative(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { eval: Box::new(eval), derivative: Some(Box::new(derivative)) }
    }
}

impl HapaxRate for HapaxRateFunction {
    fn hapax_rate(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    fn hapax_rate_derivative(&self, u: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(u))
    }
}

/// Tolerated overshoot of `h` outside `[0, 1]`.
const RATE_SLACK: f64 = 1e-9;

/// `g(n) = exp ∫_0^{ln n} h(u) du` by adaptive quadrature to absolute
/// tolerance `tol` on the exponent.
pub fn vocab_from_hapax<H: HapaxRate + ?Sized>(h: &H, n: f64, tol: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(argument(format!("vocabulary size needs n > 0, got {n}")));
    }
    let bad = Cell::new(None::<(f64, f64)>);
    let integrand = |u: f64| {
        let v = h.hapax_rate(u);
        if !(-RATE_SLACK..=1.0 + RATE_SLACK).contains(&v) && bad.get().is_none() {
            bad.set(Some((u, v)));
        }
        v
    };
    let exponent = adaptive_simpson(&integrand, 0.0, n.ln(), tol);
    if let Some((u, v)) = bad.get() {
        return Err(Error::ModelViolation(format!("hapax rate h({u}) = {v} lies outside [0, 1]")));
    }
    Ok(exponent.exp())
}

/// `g(n|k)` from the `k`-th derivative of `g`, estimated by Richardson
/// extrapolated central differences with initial step `step`.
///
/// Meant as a validation oracle for closed-form spectra. A step around
/// `n/10` works well for smooth `g`.
pub fn spectrum_from_derivatives<F>(g: &F, n: f64, k: u64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    if !(n > 0.0) || k == 0 {
        return Err(argument("spectrum from derivatives needs n > 0 and k >= 1"));
    }
    // a vanishing derivative is accepted once below the natural scale g/n^k
    let floor = 1e-10 * g(n).abs() * (-(k as f64) * n.ln()).exp();
    let d = richardson_derivative_tol(g, n, k as usize, step, floor)?;
    // -(-n)^k / k! = (-1)^{k+1} n^k / k!
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * (k as f64 * n.ln() - ln_factorial(k)).exp() * d.value)
}

/// `g(n||f) = g(n) - Σ_{k<f} g(n|k)`.
pub fn rank_from_spectrum<G: VocabularySize + ?Sized>(g: &G, n: f64, f: u64) -> f64 {
    let mut r = g.vocab(n);
    for k in 1..f {
        r -= g.spectrum(n, k);
    }
    r
}

/// Relative spectrum `h(u|k)` for `k = 0..=kmax` at one `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeSpectrumTable {
    pub u: f64,
    pub values: Vec<f64>,
    /// Whether values come from an exact recursion rather than numeric jets.
    pub exact: bool,
}

impl RelativeSpectrumTable {
    /// `h(u|k)`; panics beyond the computed range.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn kmax(&self) -> usize {
        self.values.len() - 1
    }
}

/// Relative spectrum by the differential recursion.
///
/// Families with coefficient tables answer exactly. For other hapax rates
/// the recursion runs on a truncated Taylor jet of `h` at `u` whose
/// coefficients come from numeric differentiation, which limits it to small
/// `kmax` and roughly 1e-6 relative precision.
pub fn relative_spectrum<H: HapaxRate + ?Sized>(h: &H, u: f64, kmax: usize) -> Result<RelativeSpectrumTable> {
    if let Some(values) = h.exact_relative_spectrum(u, kmax) {
        return Ok(RelativeSpectrumTable { u, values, exact: true });
    }
    let jet = hapax_jet(h, u, kmax.saturating_sub(1))?;
    Ok(RelativeSpectrumTable { u, values: relative_spectrum_from_jet(&jet, kmax), exact: false })
}

/// Runs the relative-spectrum recursion on truncated Taylor series in `t`
/// around a fixed `u`, given the jet `h^{(j)}(u)/j!` (missing trailing
/// coefficients are zero). Returns `h(u|k)` for `k = 0..=kmax`.
pub(crate) fn relative_spectrum_from_jet(jet: &[f64], kmax: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(kmax + 1);
    // series of h(u+t|k-1), truncated to the orders still needed
    let mut series = vec![0.0; kmax + 1];
    series[0] = -1.0;
    values.push(-1.0);
    for k in 1..=kmax {
        let len = kmax + 1 - k;
        let mut next = vec![0.0; len];
        for (j, slot) in next.iter_mut().enumerate() {
            let top = j.min(jet.len().saturating_sub(1));
            let product: f64 = (0..=top).map(|i| jet[i] * series[j - i]).sum();
            let derivative = (j + 1) as f64 * series[j + 1];
            *slot = series[j] - (series[j] + product + derivative) / k as f64;
        }
        values.push(next[0]);
        series = next;
    }
    values
}

/// Taylor coefficients `h^{(j)}(u)/j!` for `j = 0..=order`.
fn hapax_jet<H: HapaxRate + ?Sized>(h: &H, u: f64, order: usize) -> Result<Vec<f64>> {
    const STEP: f64 = 0.5;
    let mut jet = vec![h.hapax_rate(u)];
    let analytic_first = h.hapax_rate_derivative(u).is_some();
    for j in 1..=order {
        let dj = if analytic_first {
            if j == 1 {
                h.hapax_rate_derivative(u).unwrap_or(f64::NAN)
            } else {
                let d = |x: f64| h.hapax_rate_derivative(x).unwrap_or(f64::NAN);
                jet_derivative(&d, u, j - 1, STEP)?
            }
        } else {
            jet_derivative(&|x| h.hapax_rate(x), u, j, STEP)?
        };
        jet.push(dj / (ln_factorial(j as u64)).exp());
    }
    Ok(jet)
}

/// Numeric derivative that tolerates a vanishing true value, since Taylor
/// coefficients of a hapax rate are often zero.
fn jet_derivative<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, order: usize, step: f64) -> Result<f64> {
    Ok(richardson_derivative_tol(f, x, order, step, 1e-9)?.value)
}

fn smoothing_fraction(base: &FrequencySpectrum, n: f64) -> Result<f64> {
    let total = base.tokens() as f64;
    if total == 0.0 {
        return Err(argument("cannot smooth an empty spectrum"));
    }
    if !(0.0..=total).contains(&n) {
        return Err(argument(format!("smoothing point {n} outside [0, {total}]")));
    }
    Ok(n / total)
}

/// Smoothed vocabulary size `g(n) = v* - Σ v*_k (1 - n/n*)^k`.
pub fn smooth_types(base: &FrequencySpectrum, n: f64) -> Result<f64> {
    let x = smoothing_fraction(base, n)?;
    if x == 1.0 {
        return Ok(base.types() as f64);
    }
    let ln_keep = (-x).ln_1p();
    // Σ v_k [1 - (1-x)^k] avoids cancelling against v*
    Ok(base.iter().map(|(k, vk)| vk as f64 * -(k as f64 * ln_keep).exp_m1()).sum())
}

/// Smoothed spectrum `g(n|k) = Σ_{k*≥k} C(k*,k) v*_{k*} x^k (1-x)^{k*-k}`
/// with `x = n/n*`.
pub fn smooth_spectrum(base: &FrequencySpectrum, n: f64, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(argument("spectrum index k must be at least 1"));
    }
    let x = smoothing_fraction(base, n)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(base.get(k) as f64);
    }
    let ln_x = x.ln();
    let ln_keep = (-x).ln_1p();
    Ok(base
        .iter()
        .filter(|&(kstar, _)| kstar >= k)
        .map(|(kstar, vk)| {
            let ln_w = ln_binomial_unchecked(kstar, k) + k as f64 * ln_x + (kstar - k) as f64 * ln_keep;
            vk as f64 * ln_w.exp()
        })
        .sum())
}

/// Smoothed rank function `g(n||f) = g(n) - Σ_{k<f} g(n|k)`.
pub fn smooth_rank(base: &FrequencySpectrum, n: f64, f: u64) -> Result<f64> {
    let mut r = smooth_types(base, n)?;
    for k in 1..f {
        r -= smooth_spectrum(base, n, k)?;
    }
    Ok(r)
}

/// One point of a smoothed curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothedPoint {
    pub n: f64,
    pub types: f64,
    pub hapaxes: f64,
}

impl SmoothedPoint {
    pub fn hapax_rate(&self) -> f64 {
        self.hapaxes / self.types
    }
}

/// Smoothed `g(n)` and `g(n|1)` along a grid.
pub fn smoothed_curve(base: &FrequencySpectrum, grid: &[f64]) -> Result<Vec<SmoothedPoint>> {
    grid.iter()
        .map(|&n| Ok(SmoothedPoint { n, types: smooth_types(base, n)?, hapaxes: smooth_spectrum(base, n, 1)? }))
        .collect()
}

/// CSV with columns `n,g_n,g_n_1,hapax_rate`.
pub fn smoothed_curve_csv(points: &[SmoothedPoint], precision: usize) -> String {
    let mut out = String::from("n,g_n,g_n_1,hapax_rate\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sig(p.n, precision),
            fmt_sig(p.types, precision),
            fmt_sig(p.hapaxes, precision),
            fmt_sig(p.hapax_rate(), precision)
        );
    }
    out
}
