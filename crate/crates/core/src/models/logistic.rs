//! Logistic hapax rate `h(u) = (1-β) σ(u - α) + β` with the decreasing
//! sigmoid `σ(x) = 1/(1 + e^{γx})`.
//!
//! The vocabulary grows like a power law with exponent `β` for long texts.
//! For `β = 0, γ = 1` and no offset, `g(n) = 2n/(n+1)` and the rank function
//! is the geometric sequence `2 (n/(n+1))^f`.

use std::f64::consts::{LN_2, PI};

use crate::analytic::relative_spectrum_from_jet;
use crate::special::softplus;

/// Largest `k` served by the streaming recursion; higher orders are NaN.
/// Past this the recursion amplifies roundoff when `γ > 1`.
pub(crate) const STREAM_KMAX: usize = super::TABLE_KMAX;

/// `σ(x) = 1/(1 + e^{γx})` without overflow.
pub(crate) fn sigmoid(gamma: f64, x: f64) -> f64 {
    let z = gamma * x;
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

pub(crate) fn hapax_rate(beta: f64, gamma: f64, x: f64) -> f64 {
    (1.0 - beta) * sigmoid(gamma, x) + beta
}

pub(crate) fn hapax_rate_derivative(beta: f64, gamma: f64, x: f64) -> f64 {
    let s = sigmoid(gamma, x);
    -(1.0 - beta) * gamma * s * (1.0 - s)
}

/// `ln g(n) = u - c [softplus(γ(u-α)) - softplus(-γα)]` with `c = (1-β)/γ`.
pub(crate) fn ln_vocab(alpha: f64, beta: f64, gamma: f64, u: f64) -> f64 {
    let c = (1.0 - beta) / gamma;
    u - c * (softplus(gamma * (u - alpha)) - softplus(-gamma * alpha))
}

/// Whether the model is the plain one with a closed-form rank function.
pub(crate) fn is_plain(beta: f64, gamma: f64) -> bool {
    beta == 0.0 && gamma == 1.0
}

/// `Im g(-y + i0) / y` for the unshifted model `g(m) = m (2/(1+m^γ))^c`,
/// valid for `0 < γ < 1`.
pub(crate) fn jump_over_y(beta: f64, gamma: f64, y: f64) -> f64 {
    let c = (1.0 - beta) / gamma;
    let (sin_pg, cos_pg) = (PI * gamma).sin_cos();
    let yg = y.powf(gamma);
    let re = 1.0 + yg * cos_pg;
    let im = yg * sin_pg;
    let arg = im.atan2(re);
    (c * LN_2 - c * re.hypot(im).ln()).exp() * (c * arg).sin()
}

/// `h(u|k)` for `k = 0..=kmax` by the streaming recursion on the Taylor
/// jet of `h` at `x`, which follows from `σ' = -γ σ (1 - σ)`.
pub(crate) fn relative_spectrum_streaming(beta: f64, gamma: f64, x: f64, kmax: usize) -> Vec<f64> {
    let kcap = kmax.min(STREAM_KMAX);
    let order = kcap.saturating_sub(1);
    let mut s = Vec::with_capacity(order + 1);
    s.push(sigmoid(gamma, x));
    for j in 0..order {
        let sq: f64 = (0..=j).map(|i| s[i] * s[j - i]).sum();
        s.push(-gamma * (s[j] - sq) / (j + 1) as f64);
    }
    let jet: Vec<f64> =
        s.iter().enumerate().map(|(j, &c)| if j == 0 { beta + (1.0 - beta) * c } else { (1.0 - beta) * c }).collect();
    let mut v = relative_spectrum_from_jet(&jet, kcap);
    v.resize(kmax + 1, f64::NAN);
    v
}
