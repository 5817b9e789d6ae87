//! Spectrum and rank of a vocabulary function from its branch-cut jump.
//!
//! When `g` is analytic off the negative real axis, vanishes at 0 and grows
//! sublinearly, the expansion coefficients around `n` can be written as
//! integrals of `Im g(-y + i0)` over `y > 0`:
//!
//! ```text
//! g(n|k)  = 1/(π n) ∫ Im g(-y) (1 + y/n)^{-k-1} dy
//! g(n||f) = 1/π     ∫ Im g(-y) / (y (1 + y/n)^f) dy
//! ```
//!
//! Substituting `s = k ln(1 + y/n)` turns both into Laplace-type integrals
//! that converge fast even for very large `k` or `f`, where Taylor assembly
//! from relative spectra would cancel catastrophically.

use std::f64::consts::PI;

use crate::numeric::laplace_integral;

const REL_TOL: f64 = 1e-13;

/// `g(n||f)` from `y ↦ Im g(-y + i0) / y`.
pub(crate) fn rank<F: Fn(f64) -> f64>(jump_over_y: F, n: f64, f: u64) -> f64 {
    let fk = f as f64;
    let phi = |s: f64| {
        let t = s / fk;
        let y = n * t.exp_m1();
        jump_over_y(y) * n * t.exp()
    };
    laplace_integral(phi, REL_TOL) / (PI * fk)
}

/// `g(n|k)` from `y ↦ Im g(-y + i0) / y`.
pub(crate) fn spectrum<F: Fn(f64) -> f64>(jump_over_y: F, n: f64, k: u64) -> f64 {
    let kf = k as f64;
    let phi = |s: f64| {
        let y = n * (s / kf).exp_m1();
        jump_over_y(y) * y
    };
    laplace_integral(phi, REL_TOL) / (PI * kf)
}
