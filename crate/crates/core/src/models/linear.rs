//! Piecewise linear hapax rate: `h = 1` before the offset, then decreasing
//! with slope `γ` until it reaches 0 at `1/γ` past the offset.
//!
//! The vocabulary is bounded: growth stops once `h` hits zero. The model is
//! not analytic at the two kinks, so spectra are those of the local
//! polynomial piece.

use crate::analytic::relative_spectrum_from_jet;

/// Largest `k` served by the streaming recursion; higher orders are NaN.
pub(crate) const STREAM_KMAX: usize = 8192;

/// `h` at offset log-length `x = u - α`.
pub(crate) fn hapax_rate(gamma: f64, x: f64) -> f64 {
    if x < 0.0 {
        1.0
    } else if x <= 1.0 / gamma {
        1.0 - gamma * x
    } else {
        0.0
    }
}

pub(crate) fn hapax_rate_derivative(gamma: f64, x: f64) -> f64 {
    if (0.0..=1.0 / gamma).contains(&x) {
        -gamma
    } else {
        0.0
    }
}

/// `∫_0^x h`, extended as the identity for `x < 0`.
fn integrated_rate(gamma: f64, x: f64) -> f64 {
    if x < 0.0 {
        x
    } else if x <= 1.0 / gamma {
        x - 0.5 * gamma * x * x
    } else {
        0.5 / gamma
    }
}

/// `ln g(n)` at `u = ln n`, normalised so that `g(1) = 1`.
pub(crate) fn ln_vocab(alpha: f64, gamma: f64, u: f64) -> f64 {
    integrated_rate(gamma, u - alpha) - integrated_rate(gamma, -alpha)
}

/// Where `x` falls relative to the polynomial piece.
pub(crate) enum Region {
    /// `h ≡ 1`: every token is new, only `h(u|1)` is nonzero.
    Growing,
    Polynomial,
    /// `h ≡ 0`: the vocabulary is saturated, all spectra vanish.
    Saturated,
}

pub(crate) fn region(gamma: f64, x: f64) -> Region {
    if x < 0.0 {
        Region::Growing
    } else if x <= 1.0 / gamma {
        Region::Polynomial
    } else {
        Region::Saturated
    }
}

/// `h(u|k)` for `k = 0..=kmax` by the streaming recursion on the local
/// polynomial `h(x + t) = 1 - γx - γt`.
pub(crate) fn relative_spectrum_streaming(gamma: f64, x: f64, kmax: usize) -> Vec<f64> {
    let mut out = match region(gamma, x) {
        Region::Growing => {
            let mut v = vec![0.0; kmax + 1];
            v[0] = -1.0;
            if kmax >= 1 {
                v[1] = 1.0;
            }
            v
        }
        Region::Saturated => {
            let mut v = vec![0.0; kmax + 1];
            v[0] = -1.0;
            v
        }
        Region::Polynomial => {
            let kcap = kmax.min(STREAM_KMAX);
            let mut v = relative_spectrum_from_jet(&[1.0 - gamma * x, -gamma], kcap);
            v.resize(kmax + 1, f64::NAN);
            v
        }
    };
    out.truncate(kmax + 1);
    out
}
