//! Constant hapax rate `h = β`, i.e. power-law growth `g(n) = n^β`.
//!
//! With `β = 1` this is the maximal model `g(n) = n` in which every token is
//! a new type.

use crate::special::{ln_factorial_ratio, ln_gamma};

/// Above this index products switch to log-gamma ratios.
const PRODUCT_LIMIT: u64 = 1000;

/// `h(u|k) = g(n|k)/g(n) = β Π_{i=2}^k (i - 1 - β)/i`, with `h(u|0) = -1`.
pub(crate) fn relative_spectrum(beta: f64, k: u64) -> f64 {
    if k == 0 {
        return -1.0;
    }
    if beta == 0.0 || (beta == 1.0 && k >= 2) {
        return 0.0;
    }
    if k <= PRODUCT_LIMIT {
        (2..=k).fold(beta, |acc, i| acc * (i as f64 - 1.0 - beta) / i as f64)
    } else {
        // β Γ(k-β) / (Γ(1-β) Γ(k+1))
        (beta.ln() + ln_factorial_ratio(k as f64 - 1.0 - beta, k as f64) - ln_gamma(1.0 - beta)).exp()
    }
}

/// All relative spectrum elements for `k = 0..=kmax`.
pub(crate) fn relative_spectrum_row(beta: f64, kmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(-1.0);
    let mut c = beta;
    for k in 1..=kmax as u64 {
        if k > 1 {
            c *= (k as f64 - 1.0 - beta) / k as f64;
        }
        out.push(if k <= PRODUCT_LIMIT { c } else { relative_spectrum(beta, k) });
    }
    out
}

/// `g(n||f)/g(n) = Π_{i=1}^{f-1} (1 - β/i) = Γ(f-β) / (Γ(1-β) Γ(f))`.
pub(crate) fn rank_ratio(beta: f64, f: u64) -> f64 {
    if f <= 1 {
        return 1.0;
    }
    if beta == 1.0 {
        return 0.0;
    }
    if beta == 0.0 {
        return 1.0;
    }
    if f <= PRODUCT_LIMIT {
        (1..f).fold(1.0, |acc, i| acc * (1.0 - beta / i as f64))
    } else {
        (ln_factorial_ratio(f as f64 - 1.0 - beta, f as f64 - 1.0) - ln_gamma(1.0 - beta)).exp()
    }
}
