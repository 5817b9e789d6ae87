//! Quadrature and finite-difference helpers.

use crate::error::{Error, Result};

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64 + ?Sized,
{
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// ∫_0^∞ φ(s) e^{-s} ds by exp-sinh (double exponential) quadrature.
///
/// Tolerates algebraic endpoint singularities of φ at 0.
pub fn laplace_integral<F>(phi: F, rel_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    use std::f64::consts::FRAC_PI_2;
    let node = |tau: f64| -> f64 {
        let s = (FRAC_PI_2 * tau.sinh()).exp();
        if !(s > 0.0) || s > 745.0 {
            return 0.0;
        }
        let w = FRAC_PI_2 * tau.cosh() * s;
        let v = phi(s) * (-s).exp() * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    const TAU_MAX: f64 = 4.0;
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    while (k as f64) * h <= TAU_MAX {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while (k as f64) * h <= TAU_MAX {
            let t = k as f64 * h;
            add += node(t) + node(-t);
            k += 2;
        }
        sum += add;
        let next = sum * h;
        let done = (next - estimate).abs() <= rel_tol * next.abs();
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// Binomial coefficients of one row, as floats.
fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0f64; k + 1];
    for i in 1..k {
        row[i] = row[i - 1] * (k - i + 1) as f64 / i as f64;
    }
    row
}

/// Central difference estimate of the `order`-th derivative with step `h`.
pub(crate) fn central_difference<F>(f: &F, x: f64, order: usize, h: f64) -> f64
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let row = binomial_row(order);
    let half = order as f64 / 2.0;
    let mut acc = 0.0;
    for (i, c) in row.iter().enumerate() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * c * f(x + (half - i as f64) * h);
    }
    acc / h.powi(order as i32)
}

/// Derivative estimate with its error estimate.
#[derive(Clone, Copy, Debug)]
pub struct DerivativeEstimate {
    pub value: f64,
    pub error: f64,
}

/// Derivative of order `order` at `x` by Richardson extrapolation of central
/// differences, starting at step `h0` and shrinking by 1.4 per level.
///
/// Fails with [`Error::NumericPrecision`] when the extrapolation table never
/// settles below a relative error of `1e-4`, which happens when `h0` is
/// already in the roundoff-dominated regime.
pub fn richardson_derivative<F>(f: &F, x: f64, order: usize, h0: f64) -> Result<DerivativeEstimate>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    richardson_derivative_tol(f, x, order, h0, 0.0)
}

/// As [`richardson_derivative`], additionally accepting any estimate whose
/// error is below `abs_tol`. Useful when the true derivative may vanish.
pub fn richardson_derivative_tol<F>(f: &F, x: f64, order: usize, h0: f64, abs_tol: f64) -> Result<DerivativeEstimate>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 12;
    const SAFE: f64 = 2.0;
    if !(h0 > 0.0) || order == 0 {
        return Err(Error::Argument("derivative needs order >= 1 and a positive step".into()));
    }
    let mut table = vec![vec![0.0f64; NTAB]; NTAB];
    let mut h = h0;
    table[0][0] = central_difference(f, x, order, h);
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        table[0][i] = central_difference(f, x, order, h);
        let mut fac = CON2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let errt = (table[j][i] - table[j - 1][i]).abs().max((table[j][i] - table[j - 1][i - 1]).abs());
            if errt <= err {
                err = errt;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    if !best.is_finite() || err > (1e-4 * best.abs()).max(abs_tol) {
        return Err(Error::NumericPrecision(format!(
            "derivative of order {order} at {x} did not settle (estimate {best:e}, error {err:e}); step {h0:e} is too small or too large"
        )));
    }
    Ok(DerivativeEstimate { value: best, error: err })
}
