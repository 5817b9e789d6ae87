//! The Davis model, `h(u) = 1/u - 1/(e^u - 1)`, with `g(n) = n ln n/(n-1)`.
//!
//! Functions here work on the unshifted model at length `m`; the offset
//! operation is applied by the caller. With `t = 1 - 1/m` the rank function
//! satisfies `g(m||1) = ln m / t`, `g(m||f+1) = (g(m||f) - 1/f)/t`, and for
//! `|t| < 1` equals the series `Σ_j t^j/(j+f)`.

use crate::special::scaled_exp_integral;

/// Recursion is used while its error amplification `|t|^{-f}` stays below
/// `e^RECURSION_BUDGET`.
const RECURSION_BUDGET: f64 = 3.0;

pub(crate) fn hapax_rate(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        0.5 - x * (1.0 / 12.0 - x2 * (1.0 / 720.0 - x2 * (1.0 / 30240.0 - x2 / 1_209_600.0)))
    } else {
        1.0 / x - 1.0 / x.exp_m1()
    }
}

pub(crate) fn hapax_rate_derivative(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        -1.0 / 12.0 + x2 * (3.0 / 720.0 - x2 * (5.0 / 30240.0 - 7.0 * x2 / 1_209_600.0))
    } else {
        // e^x/(e^x - 1)^2 = e^{-|x|}/(1 - e^{-|x|})^2
        let e = (-x.abs()).exp();
        -1.0 / (x * x) + e / ((-x.abs()).exp_m1() * (-x.abs()).exp_m1())
    }
}

/// `ln g(e^v)` with `g(m) = m ln m/(m-1)`, i.e. `ln[v/(1 - e^{-v})]`.
pub(crate) fn ln_vocab(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else if v.abs() < 1.0 {
        (v / -(-v).exp_m1()).ln()
    } else if v > 0.0 {
        v.ln() - (-(-v).exp_m1()).ln()
    } else {
        (-v).ln() + v - (-v.exp_m1()).ln()
    }
}

fn ratio_t(m: f64) -> f64 {
    1.0 - 1.0 / m
}

/// `g(m||f)` by the forward recursion; exact `1/f` at `m = 1`.
pub fn rank_recursion(m: f64, f: u64) -> f64 {
    let t = ratio_t(m);
    if t == 0.0 {
        return 1.0 / f as f64;
    }
    let mut g = m.ln() / t;
    for i in 1..f {
        g = (g - 1.0 / i as f64) / t;
    }
    g
}

/// `g(m||f) = Σ_j t^j/(j+f)`, valid for `m > 1/2`.
pub fn rank_series(m: f64, f: u64) -> f64 {
    let t = ratio_t(m);
    let ff = f as f64;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut p = 1.0f64;
    let mut j = 0u64;
    loop {
        let term = p / (j as f64 + ff);
        // Neumaier summation keeps long positive series accurate
        let s = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - s) + term;
        } else {
            comp += (term - s) + sum;
        }
        sum = s;
        if term.abs() <= 1e-17 * sum.abs() || p == 0.0 {
            break;
        }
        p *= t;
        j += 1;
    }
    sum + comp
}

fn use_recursion(t: f64, f: u64) -> bool {
    t.abs() > 1.0 || f as f64 * (1.0 / t.abs()).ln() <= RECURSION_BUDGET
}

/// `g(m||f)`, switching between recursion and series for stability.
pub(crate) fn rank(m: f64, f: u64) -> f64 {
    let t = ratio_t(m);
    if t == 0.0 {
        1.0 / f as f64
    } else if use_recursion(t, f) {
        rank_recursion(m, f)
    } else {
        rank_series(m, f)
    }
}

/// `g(m||f)` at every requested `f` (sorted ascending), sharing one
/// recursion pass.
pub(crate) fn rank_many(m: f64, fs: &[u64]) -> Vec<f64> {
    let t = ratio_t(m);
    let mut out = Vec::with_capacity(fs.len());
    if t == 0.0 {
        out.extend(fs.iter().map(|&f| 1.0 / f as f64));
        return out;
    }
    let mut g = m.ln() / t;
    let mut at = 1u64;
    let mut recursing = true;
    for &f in fs {
        if recursing && use_recursion(t, f) {
            while at < f {
                g = (g - 1.0 / at as f64) / t;
                at += 1;
            }
            out.push(g);
        } else {
            recursing = false;
            out.push(rank_series(m, f));
        }
    }
    out
}

/// `g(m|k)`.
///
/// Near `m = 1` a positive series `Σ_j t^j/((j+k)(j+k+1))` is summed;
/// elsewhere the identity `g(m|k) = [1/k - g(m||k)/m] / t` reuses the stable
/// rank evaluation.
pub(crate) fn spectrum(m: f64, k: u64) -> f64 {
    let t = ratio_t(m);
    if t.abs() <= 0.5 {
        let kf = k as f64;
        let mut sum = 0.0;
        let mut p = 1.0f64;
        let mut j = 0.0;
        loop {
            let term = p / ((j + kf) * (j + kf + 1.0));
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() || p == 0.0 {
                break;
            }
            p *= t;
            j += 1.0;
        }
        sum
    } else {
        (1.0 / k as f64 - rank(m, k) / m) / t
    }
}

/// `g(m|k)` assembled from the closed-form derivatives of `m ln m` and
/// `1/(m-1)`. Loses accuracy like `(m/(m-1))^k`; kept as a cross-check for
/// small `k`.
pub fn spectrum_closed_form(m: f64, k: u64) -> f64 {
    let lm = m.ln();
    let q = |i: u64| {
        (i as f64 * m.ln() - (i + 1) as f64 * (m - 1.0).abs().ln()).exp()
            * if (m - 1.0) < 0.0 && i.is_multiple_of(2) { -1.0 } else { 1.0 }
    };
    let p = |j: u64| match j {
        0 => m * lm,
        1 => -m * (1.0 + lm),
        _ => m / (j * (j - 1)) as f64,
    };
    -(0..=k).map(|j| p(j) * q(k - j)).sum::<f64>()
}

/// `e^{f/m} Γ(0, f/m)`, the large-`m` approximation of `g(m||f)`.
pub fn rank_gamma_approximation(m: f64, f: u64) -> f64 {
    scaled_exp_integral(f as f64 / m)
}
