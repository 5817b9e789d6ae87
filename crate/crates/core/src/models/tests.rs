use super::*;
use crate::analytic::{rank_from_spectrum, relative_spectrum, spectrum_from_derivatives, HapaxRateFunction};
use crate::special::ln_factorial;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

fn sample_models() -> Vec<HapaxModel> {
    vec![
        HapaxModel::constant(0.42).unwrap(),
        HapaxModel::maximal(),
        HapaxModel::davis(0.0).unwrap(),
        HapaxModel::davis(10.33).unwrap(),
        HapaxModel::linear(2.0, 0.05).unwrap(),
        HapaxModel::logistic(10.11, 0.218, 0.314).unwrap(),
        HapaxModel::logistic(0.0, 0.0, 1.0).unwrap(),
        HapaxModel::logistic(3.0, 0.1, 1.7).unwrap(),
        u_shaped_mixture(10.0, 1e-3).unwrap(),
    ]
}

#[test]
fn hapax_rate_examples() {
    assert_eq!(HapaxModel::davis(0.0).unwrap().hapax_rate(0.0), 0.5);
    assert!((HapaxModel::davis(0.0).unwrap().hapax_rate(1e-9) - 0.5).abs() < 1e-9);
    assert!((HapaxModel::linear(0.0, 0.05).unwrap().hapax_rate(10.0) - 0.5).abs() < 1e-15);
    assert!((HapaxModel::logistic(0.0, 0.1, 1.0).unwrap().hapax_rate(0.0) - 0.55).abs() < 1e-15);
}

#[test]
fn vocab_examples() {
    let linear = HapaxModel::linear(0.0, 0.05).unwrap();
    let g = linear.vocab_size(20f64.exp());
    assert!(close(g, 10f64.exp(), 1e-12), "{g}");
    assert!((g - 22026.47).abs() < 0.01);
    for m in sample_models() {
        assert!((m.vocab_size(1.0) - 1.0).abs() < 1e-14, "{m}");
    }
    let plain = HapaxModel::logistic(0.0, 0.0, 1.0).unwrap();
    assert!((plain.vocab_size(1e15) - 2.0).abs() < 1e-12);
    assert!((plain.ln_vocab(800.0) - std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn vocab_matches_integrated_hapax_rate() {
    for m in sample_models() {
        for &n in &[0.3, 7.0, 5e4, 3e7] {
            let h = HapaxRateFunction::new({
                let m = m.clone();
                move |u| m.hapax_rate(u)
            });
            let want = crate::analytic::vocab_from_hapax(&h, n, 1e-12).unwrap();
            assert!(close(m.vocab_size(n), want, 1e-9), "{m} n={n}: {} vs {want}", m.vocab_size(n));
        }
    }
}

#[test]
fn spectrum_examples() {
    let davis = HapaxModel::davis(0.0).unwrap();
    assert!(close(davis.spectrum(1.0, 3), 1.0 / 12.0, 1e-14));
    let c = HapaxModel::constant(0.5).unwrap();
    assert!(close(c.spectrum(100.0, 1), 5.0, 1e-14));
    let l = HapaxModel::logistic(0.0, 0.1, 0.3).unwrap();
    for &n in &[0.5f64, 3.0, 1e3, 1e9] {
        let want = l.hapax_rate(n.ln()) * l.vocab_size(n);
        assert!(close(l.spectrum(n, 1), want, 1e-13));
    }
}

#[test]
fn first_relative_spectrum_is_hapax_rate() {
    for m in sample_models() {
        for i in 0..20 {
            let u = -3.0 + 1.3 * i as f64;
            let row = m.relative_spectrum(u, 3);
            assert_eq!(row[0], -1.0);
            assert!((row[1] - m.hapax_rate(u)).abs() <= 1e-12, "{m} u={u}: {} vs {}", row[1], m.hapax_rate(u));
        }
    }
}

#[test]
fn spectra_match_numerical_derivatives() {
    // analytic families only: the linear kinks spoil finite differences
    for m in sample_models().into_iter().filter(|m| m.is_analytic()) {
        for &n in &[40.0, 3e4] {
            for k in 1..=4 {
                let want = spectrum_from_derivatives(&|x: f64| m.vocab_size(x), n, k, n / 10.0).unwrap();
                let got = m.spectrum(n, k);
                assert!((got - want).abs() <= 1e-6 * m.vocab_size(n), "{m} n={n} k={k}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn relative_spectrum_matches_generic_jet() {
    for m in sample_models().into_iter().filter(|m| m.is_analytic()) {
        let f = HapaxRateFunction::new({
            let m = m.clone();
            move |u| m.hapax_rate(u)
        });
        for &u in &[0.5, 9.0] {
            let generic = relative_spectrum(&f, u, 5).unwrap();
            let exact = m.relative_spectrum(u, 5);
            for (k, &e) in exact.iter().enumerate().skip(1) {
                assert!((generic.get(k) - e).abs() < 1e-6, "{m} u={u} k={k}");
            }
        }
    }
}

#[test]
fn rank_examples() {
    let davis = HapaxModel::davis(0.0).unwrap();
    assert_eq!(davis.rank(1.0, 7), 1.0 / 7.0);
    let plain = HapaxModel::logistic(0.0, 0.0, 1.0).unwrap();
    assert!(close(plain.rank(3.0, 2), 1.125, 1e-14));
    for &beta in &[0.0, 0.3, 0.77] {
        let c = HapaxModel::constant(beta).unwrap();
        for f in [1u64, 2, 10, 500, 5000] {
            let a = c.rank(123.0, f) / c.vocab_size(123.0);
            let b = c.rank(1230.0, f) / c.vocab_size(1230.0);
            assert!(close(a, b, 1e-12));
        }
    }
}

#[test]
fn rank_is_vocab_minus_spectrum() {
    for m in sample_models() {
        for &n in &[3.0, 2e3, 4e6] {
            for f in [1u64, 2, 5, 30] {
                let want = rank_from_spectrum(&m, n, f);
                let got = m.rank(n, f);
                assert!((got - want).abs() <= 1e-9 * m.vocab_size(n), "{m} n={n} f={f}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn rank_curve_matches_pointwise() {
    let fs = [300u64, 1, 70, 2, 65, 64, 1000, 5];
    for m in sample_models() {
        let n = 5e5;
        let curve = m.rank_curve(n, &fs);
        for (i, &f) in fs.iter().enumerate() {
            let one = m.rank(n, f);
            assert!(
                (curve[i] - one).abs() <= 1e-12 * m.vocab_size(n) || (curve[i].is_nan() && one.is_nan()),
                "{m} f={f}"
            );
        }
    }
}

/// Plain logistic vocabulary with table-based spectra, summed into ranks.
struct TablePlainLogistic(CoefficientTable);

impl VocabularySize for TablePlainLogistic {
    fn vocab(&self, n: f64) -> f64 {
        2.0 * n / (n + 1.0)
    }

    fn spectrum(&self, n: f64, k: u64) -> f64 {
        let sigma = 1.0 / (1.0 + n);
        let inv_fact = (-ln_factorial(k)).exp();
        self.vocab(n) * self.0.evaluate(k as usize, sigma, inv_fact)
    }
}

#[test]
fn plain_logistic_closed_form_matches_taylor_assembly() {
    let oracle = TablePlainLogistic(CoefficientTable::logistic(0.0, 1.0, 50));
    let plain = HapaxModel::logistic(0.0, 0.0, 1.0).unwrap();
    for &n in &[2.0, 10.0, 100.0] {
        for f in 1..=50u64 {
            let want = rank_from_spectrum(&oracle, n, f);
            let got = plain.rank(n, f);
            assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "n={n} f={f}: {got} vs {want}");
            // geometric closed form 2 (n/(n+1))^f
            assert!(close(got, 2.0 * (n / (n + 1.0)).powi(f as i32), 1e-13));
        }
    }
}

#[test]
fn logistic_high_orders_agree_across_methods() {
    let (alpha, beta, gamma) = (10.11, 0.218, 0.314);
    let m = HapaxModel::logistic(alpha, beta, gamma).unwrap();
    for &u in &[0.0, 6.0, 10.0, 14.0, 20.0] {
        let x = u - alpha;
        let row = m.relative_spectrum(u, 120);
        let g = logistic::ln_vocab(0.0, beta, gamma, x).exp();
        for k in [20u64, 40, 64, 65, 100, 120] {
            let cut = branch_cut::spectrum(|y| logistic::jump_over_y(beta, gamma, y), x.exp(), k) / g;
            let s = row[k as usize];
            assert!((cut - s).abs() <= 1e-10 * s.abs(), "u={u} k={k}: {cut} vs {s}");
        }
        // the coefficient polynomials agree where h stays away from 1
        if x >= 0.0 {
            let table = m.table_row(logistic::sigmoid(gamma, x), TABLE_KMAX);
            for k in [1usize, 10, 40, 64] {
                assert!((row[k] - table[k]).abs() <= 1e-10 * row[k].abs(), "u={u} k={k}");
            }
        }
    }
    let n = 1e7;
    let curve = m.rank_curve(n, &(60..=70).collect::<Vec<_>>());
    assert!(curve.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn steep_logistic_high_orders_are_flagged() {
    let m = HapaxModel::logistic(0.0, 0.3, 3.0).unwrap();
    let row = m.relative_spectrum(0.0, TABLE_KMAX + 1);
    // reference values from a 80-digit Taylor expansion of g around n = 1
    assert!((row[40] - -0.00798287733219).abs() < 1e-10);
    assert!((row[64] - -0.00546755146205).abs() < 1e-7);
    assert!(row[TABLE_KMAX + 1].is_nan());
    assert!(m.rank(1.0, TABLE_KMAX as u64 + 2).is_nan());
}

#[test]
fn linear_regions() {
    let m = HapaxModel::linear(5.0, 0.1).unwrap();
    let early = m.relative_spectrum(2.0, 4);
    assert_eq!(early, vec![-1.0, 1.0, 0.0, 0.0, 0.0]);
    let late = m.relative_spectrum(20.0, 4);
    assert_eq!(late, vec![-1.0, 0.0, 0.0, 0.0, 0.0]);
    let n = 2f64.exp();
    assert!(close(m.rank(n, 1), n, 1e-14));
    assert_eq!(m.rank(n, 2), 0.0);
    // table and streaming agree inside the polynomial piece
    let x = 3.0;
    let table = m.table_row(x, TABLE_KMAX);
    let stream = linear::relative_spectrum_streaming(0.1, x, TABLE_KMAX);
    for k in 0..=TABLE_KMAX {
        assert!((table[k] - stream[k]).abs() <= 1e-12 * stream[k].abs().max(1e-3), "k={k}");
    }
    assert!(linear::relative_spectrum_streaming(0.1, x, linear::STREAM_KMAX + 2)[linear::STREAM_KMAX + 1].is_nan());
}

#[test]
fn davis_offset_scaling() {
    let alpha = 10.33f64;
    let m = HapaxModel::davis(alpha).unwrap();
    let scale = davis::ln_vocab(-alpha).exp();
    for &n in &[1.0, 1e3, 1e7] {
        let base = n * (-alpha).exp();
        let g0 = base * base.ln() / (base - 1.0);
        assert!(close(m.vocab_size(n), g0 / scale, 1e-12));
        assert!(close(m.rank(n, 1), m.vocab_size(n), 1e-12));
    }
}

#[test]
fn davis_gamma_check() {
    let n = 1e4;
    let a = davis_rank_gamma_check(n, 10).unwrap();
    let b = davis_rank_series(n, 10).unwrap();
    assert!(close(a, b, 0.01));
    assert!(gamma_check_small().abs() < 1e-9);
    assert!((crate::special::gamma_upper_zero(1.0) - 0.21938).abs() < 1e-5);
}

fn gamma_check_small() -> f64 {
    // e^x Γ(0, x) ≈ -γ_E - ln x as x → 0
    let (n, f) = (1e12, 1u64);
    let x = f as f64 / n;
    davis_rank_gamma_check(n, f).unwrap() - (-crate::special::EULER_GAMMA - x.ln())
}

#[test]
fn davis_series_and_recursion_agree() {
    for &n in &[2.0f64, 17.0, 1e3, 1e5] {
        let top = n.sqrt() as u64;
        for f in [1, 2, top / 2 + 1, top] {
            let a = davis_rank_series(n, f).unwrap();
            let b = davis_rank_recursion(n, f).unwrap();
            assert!(close(a, b, 1e-9), "n={n} f={f}");
        }
    }
}

#[test]
fn davis_limit_at_unit_length() {
    let m = HapaxModel::davis(0.0).unwrap();
    for f in [1u64, 3, 100, 10_000] {
        assert_eq!(m.rank(1.0, f), 1.0 / f as f64);
        let near = m.rank(1.0 + 1e-9, f);
        assert!((near - 1.0 / f as f64).abs() < 1e-8);
    }
}

#[test]
fn mixture_properties() {
    let d = HapaxModel::davis(3.0).unwrap();
    let same = HapaxModel::mixture(d.clone(), d.clone(), 0.37).unwrap();
    for &u in &[-1.0, 2.0, 9.0] {
        assert!((same.hapax_rate(u) - d.hapax_rate(u)).abs() < 1e-14);
        assert!(close(same.ln_vocab(u).exp(), d.ln_vocab(u).exp(), 1e-14));
    }
    let first = HapaxModel::logistic(4.0, 0.3, 0.5).unwrap();
    let second = HapaxModel::constant(0.6).unwrap();
    for &lambda in &[0.2, 0.9] {
        let mix = HapaxModel::mixture(first.clone(), second.clone(), lambda).unwrap();
        for &n in &[2.0, 1e4, 1e8] {
            let want = lambda * first.vocab_size(n) + (1.0 - lambda) * second.vocab_size(n);
            assert!(close(mix.vocab_size(n), want, 1e-14));
            let want = lambda * first.spectrum(n, 3) + (1.0 - lambda) * second.spectrum(n, 3);
            assert!(close(mix.spectrum(n, 3), want, 1e-12));
            let rel = mix.relative_spectrum(n.ln(), 3)[3] * mix.vocab_size(n);
            assert!(close(rel, want, 1e-12));
        }
    }
    for (lambda, pure) in [(1e-9, &second), (1.0 - 1e-9, &first)] {
        let mix = HapaxModel::mixture(first.clone(), second.clone(), lambda).unwrap();
        for &u in &[1.0, 5.0, 12.0] {
            assert!((mix.hapax_rate(u) - pure.hapax_rate(u)).abs() < 1e-8);
        }
    }
    assert!(HapaxModel::mixture(first.clone(), second.clone(), 0.0).is_err());
    assert!(HapaxModel::mixture(first, second, 1.0).is_err());
}

#[test]
fn mixture_derivative_matches_difference() {
    let m = u_shaped_mixture(10.0, 1e-3).unwrap();
    for &u in &[2.0, 12.0, 20.0] {
        let h = 1e-5;
        let fd = (m.hapax_rate(u + h) - m.hapax_rate(u - h)) / (2.0 * h);
        assert!((m.hapax_rate_derivative(u) - fd).abs() < 1e-7, "u={u}");
    }
}

#[test]
fn u_shaped_mixture_has_interior_minimum() {
    for &lambda in &[1e-2, 1e-3, 1e-4] {
        let m = u_shaped_mixture(10.0, lambda).unwrap();
        let us: Vec<f64> = (0..=400).map(|i| i as f64 * 0.1).collect();
        let hs: Vec<f64> = us.iter().map(|&u| m.hapax_rate(u)).collect();
        let (imin, &hmin) = hs.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        assert!(imin > 0 && imin < hs.len() - 1, "lambda={lambda}");
        assert!(hs[0] > hmin + 0.1 && hs[hs.len() - 1] > hmin + 0.1);
        assert!(m.hapax_rate(200.0) > 0.99);
    }
}

#[test]
fn nonnegative_spectra_on_fitted_ranges() {
    let us: Vec<f64> = (0..=30).map(|i| i as f64 * 0.8).collect();
    for alpha in [5.0, 10.0] {
        assert!(HapaxModel::davis(alpha).unwrap().spectrum_violations(&us, 20).is_empty());
        for beta in [0.1, 0.3, 0.6] {
            assert!(HapaxModel::constant(beta).unwrap().spectrum_violations(&us, 20).is_empty());
            for gamma in [0.2, 0.5] {
                let m = HapaxModel::logistic(alpha, beta, gamma).unwrap();
                assert!(m.spectrum_violations(&us, 20).is_empty(), "{m}");
            }
        }
    }
    // the linear family goes negative somewhere inside its polynomial piece
    let lin = HapaxModel::linear(5.0, 0.05).unwrap();
    assert!(!lin.spectrum_violations(&us, 20).is_empty());
}

#[test]
fn parameter_validation() {
    assert!(HapaxModel::constant(1.0).is_err());
    assert!(HapaxModel::constant(-0.1).is_err());
    assert!(HapaxModel::linear(0.0, 0.0).is_err());
    assert!(HapaxModel::logistic(f64::NAN, 0.1, 1.0).is_err());
    assert!(HapaxModel::logistic(0.0, 0.1, -1.0).is_err());
    assert!(HapaxModel::from_parameters(Family::Linear, &[1.0]).is_err());
}

#[test]
fn record_round_trip() {
    for m in sample_models() {
        let text = m.to_string();
        let back: HapaxModel = text.parse().unwrap();
        assert_eq!(back, m, "{text}");
    }
    let m: HapaxModel = "family=logistic alpha=10.11 beta=0.218 gamma=0.314".parse().unwrap();
    assert_eq!(m, HapaxModel::logistic(10.11, 0.218, 0.314).unwrap());
    assert_eq!(
        u_shaped_mixture(10.0, 0.001).unwrap().to_string(),
        "family=mixture lambda=0.001 first.family=maximal second.family=davis second.alpha=10"
    );
    assert!("family=davis".parse::<HapaxModel>().is_err());
    assert!("family=davis alpha=1 beta=0.2".parse::<HapaxModel>().is_err());
    assert!("family=davis alpha=1 alpha=2".parse::<HapaxModel>().is_err());
    assert!("family=zeta alpha=1".parse::<HapaxModel>().is_err());
    assert!("family=davis alpha=x".parse::<HapaxModel>().is_err());
}

#[test]
fn shared_across_threads() {
    let m = std::sync::Arc::new(HapaxModel::logistic(4.0, 0.2, 0.7).unwrap());
    let want = m.relative_spectrum(5.0, 40);
    let handles: Vec<_> = (0..4)
        .map(|i| {
            let m = m.clone();
            std::thread::spawn(move || m.relative_spectrum(5.0, 10 + 10 * i))
        })
        .collect();
    for h in handles {
        let row = h.join().unwrap();
        assert_eq!(&row[..], &want[..row.len()]);
    }
}
