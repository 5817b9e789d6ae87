//! Special functions: log-gamma, log-factorials and the exponential integral.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Γ(x)| for real `x` (not a nonpositive integer).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let s = (PI * x).sin().abs();
        return PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

const LN_FACT_TABLE: usize = 256;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for i in 1..LN_FACT_TABLE {
            acc += (i as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// Remainder of Stirling's series: ln x! - [(x + 1/2) ln x - x + ln sqrt(2 pi)].
pub(crate) fn stirling_remainder(x: f64) -> f64 {
    if x < 15.0 {
        return ln_gamma(x + 1.0) - ((x + 0.5) * x.ln() - x + LN_SQRT_2PI);
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// ln(k!) for integer `k`.
pub fn ln_factorial(k: u64) -> f64 {
    if (k as usize) < LN_FACT_TABLE {
        ln_fact_table()[k as usize]
    } else {
        let x = k as f64;
        (x + 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_remainder(x)
    }
}

/// `ln Γ(x + 1) - ln Γ(y + 1)` for real `x, y >= 0`, accurate when both are
/// large and close together.
pub fn ln_factorial_ratio(x: f64, y: f64) -> f64 {
    if x < 15.0 || y < 15.0 {
        return ln_gamma(x + 1.0) - ln_gamma(y + 1.0);
    }
    let d = x - y;
    (y + 0.5) * (d / y).ln_1p() + d * x.ln() - d + stirling_remainder(x) - stirling_remainder(y)
}

/// ln C(n, k) for integers with k <= n. Callers check the range.
pub(crate) fn ln_binomial_unchecked(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let m = k.min(n - k);
    if m == 0 {
        return 0.0;
    }
    if (n as usize) < LN_FACT_TABLE {
        let t = ln_fact_table();
        return t[n as usize] - t[k as usize] - t[(n - k) as usize];
    }
    if m <= 40 {
        let base = (n - m) as f64;
        return (1..=m).map(|i| ((base + i as f64) / i as f64).ln()).sum();
    }
    let nf = n as f64;
    let kf = k as f64;
    let rf = (n - k) as f64;
    stirling_remainder(nf) - stirling_remainder(kf) - stirling_remainder(rf) + kf * (nf / kf).ln()
        - rf * (-kf / nf).ln_1p()
        + 0.5 * (nf / (kf * rf)).ln()
        - LN_SQRT_2PI
}

/// ln(1 + e^x) without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Scaled exponential integral e^x · E1(x) = e^x · Γ(0, x) for x > 0.
///
/// Power series below x = 1, modified Lentz continued fraction above.
pub fn scaled_exp_integral(x: f64) -> f64 {
    assert!(x > 0.0, "exponential integral needs a positive argument");
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for j in 1..200 {
            term *= -x / j as f64;
            let add = term / j as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        (-EULER_GAMMA - x.ln() - sum) * x.exp()
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h
    }
}

/// Upper incomplete gamma function at a = 0, Γ(0, x) = E1(x).
pub fn gamma_upper_zero(x: f64) -> f64 {
    scaled_exp_integral(x) * (-x).exp()
}
