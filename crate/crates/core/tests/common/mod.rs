//! Invariant checks shared by the property tests and the acceptance run.
//!
//! Each check takes a generated case and fails with a `TestCaseError`, so it
//! can run under `proptest!` or a hand-driven `TestRunner`.

#![allow(dead_code)]

use std::collections::BTreeMap;

use hapax::corpus::{
    count_frequencies, incremental_curves, log_grid, normalize_str, rank_table, spectrum_of, FrequencyList,
    FrequencySpectrum,
};
use hapax::models::{CoefficientTable, HapaxModel};
use hapax::urnmodel::{log_choose, memoryless_expectations, TypeDistribution, UrnSpec};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn counts() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..60, 0..80)
}

/// Spectrum and rank-table identities of a frequency list.
pub fn check_spectrum_identities(counts: &[u64]) -> Check {
    let list = FrequencyList::from_entries(counts.iter().enumerate().map(|(i, &f)| (format!("w{i}"), f))).unwrap();
    let s = spectrum_of(&list);
    let n: u64 = counts.iter().sum();
    prop_assert_eq!(s.tokens(), n);
    prop_assert_eq!(s.types(), counts.len() as u64);
    prop_assert_eq!(s.iter().map(|(_, v)| v).sum::<u64>(), s.types());
    prop_assert_eq!(s.iter().map(|(k, v)| k * v).sum::<u64>(), s.tokens());
    prop_assert!(s.iter().all(|(k, _)| k <= n));

    let r = rank_table(&s);
    prop_assert_eq!(r.get(1), s.types());
    for f in 1..=s.max_frequency() + 1 {
        prop_assert!(r.get(f + 1) <= r.get(f));
        prop_assert_eq!(r.get(f) - r.get(f + 1), s.get(f));
        prop_assert!(r.get(f) as f64 <= n as f64 / f as f64, "harmonic bound at f={}", f);
    }
    Ok(())
}

/// Arbitrary text mixing letters, punctuation and non-Latin characters.
pub fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![Just('a'), Just('B'), Just('z'), Just(' '), Just(','), Just('é'), Just('7'), any::<char>()],
        0..300,
    )
    .prop_map(|cs| cs.into_iter().collect())
}

/// Token alphabet, frequency list sums and incremental curve bounds.
pub fn check_text_invariants(text: &str) -> Check {
    let tokens = normalize_str(text);
    prop_assert!(tokens.iter().all(|t| !t.is_empty() && t.bytes().all(|b| b.is_ascii_lowercase())));
    let freqs = count_frequencies(&tokens);
    prop_assert_eq!(freqs.tokens(), tokens.len() as u64);
    let grid = log_grid(tokens.len() as u64, 10);
    let c = incremental_curves(&tokens, &grid).unwrap();
    for (&g, &types) in grid.iter().zip(&c.type_counts) {
        prop_assert!(types <= g);
    }
    prop_assert!(c.type_counts.windows(2).all(|w| w[0] <= w[1]));
    if let Some(&last) = c.type_counts.last() {
        prop_assert_eq!(last, spectrum_of(&freqs).types());
    }
    Ok(())
}

pub fn small_urn() -> impl Strategy<Value = BTreeMap<u64, u64>> {
    prop::collection::btree_map(1u64..8, 1u64..5, 1..5)
}

/// Expectation identities of an urn at every sample size.
pub fn check_urn_expectations(spectrum: &BTreeMap<u64, u64>) -> Check {
    let urn = UrnSpec::new(FrequencySpectrum::from_counts(spectrum.iter().map(|(&k, &v)| (k, v))).unwrap()).unwrap();
    let total = urn.total();
    let kmax = *spectrum.keys().max().unwrap();
    let mut previous = 0.0;
    for n in 0..=total {
        let ev = urn.expected_types(n).unwrap();
        let sum: f64 = (1..=kmax).map(|k| urn.expected_spectrum(n, k).unwrap()).sum();
        prop_assert!((sum - ev).abs() <= 1e-9 * ev.max(1.0), "n={} sum={} ev={}", n, sum, ev);
        prop_assert!(ev >= previous - 1e-12);
        previous = ev;
        prop_assert_eq!(urn.expected_rank(n, 1).unwrap(), ev);
        for f in 1..=kmax + 1 {
            prop_assert!(urn.expected_rank(n, f).unwrap() <= n as f64 / f as f64 + 1e-12);
        }
    }
    Ok(())
}

pub fn vandermonde_case() -> impl Strategy<Value = (u64, u64, u64)> {
    (1u64..400).prop_flat_map(|total| (Just(total), 0..=total, 0..=total))
}

/// Hypergeometric weights of one word sum to one.
pub fn check_chu_vandermonde((total, count, n): (u64, u64, u64)) -> Check {
    let denom = log_choose(total, count).unwrap();
    let lo = count.saturating_sub(total - n);
    let hi = count.min(n);
    let sum: f64 =
        (lo..=hi).map(|k| (log_choose(n, k).unwrap() + log_choose(total - n, count - k).unwrap() - denom).exp()).sum();
    prop_assert!((sum - 1.0).abs() < 1e-10, "sum={}", sum);
    Ok(())
}

pub fn model() -> impl Strategy<Value = HapaxModel> {
    prop_oneof![
        (0.0..0.99f64).prop_map(|b| HapaxModel::constant(b).unwrap()),
        (-3.0..20.0f64).prop_map(|a| HapaxModel::davis(a).unwrap()),
        (-3.0..20.0f64, 0.01..0.3f64).prop_map(|(a, g)| HapaxModel::linear(a, g).unwrap()),
        (-3.0..20.0f64, 0.0..0.9f64, 0.05..3.0f64).prop_map(|(a, b, g)| HapaxModel::logistic(a, b, g).unwrap()),
        (0.0..20.0f64, 1e-5..0.5f64).prop_map(|(a, l)| hapax::models::u_shaped_mixture(a, l).unwrap()),
    ]
}

/// Relative spectrum base cases, unit-interval hapax rates and `g(1) = 1`.
pub fn check_model_invariants(m: &HapaxModel, u: f64) -> Check {
    let row = m.relative_spectrum(u, 3);
    let h = m.hapax_rate(u);
    prop_assert_eq!(row[0], -1.0);
    prop_assert!(rel(row[1], h) < 1e-12, "h(u|1)={} h(u)={}", row[1], h);
    if m.family() != hapax::models::Family::Linear {
        prop_assert!((0.0..=1.0).contains(&h), "h={}", h);
    }
    prop_assert!(rel(m.vocab_size(1.0), 1.0) < 1e-12, "g(1)={}", m.vocab_size(1.0));
    Ok(())
}

/// Spectrum of a plain logistic model sums to the vocabulary size.
pub fn check_logistic_spectrum_sum(alpha: f64, n: f64) -> Check {
    let m = HapaxModel::logistic(alpha, 0.0, 1.0).unwrap();
    let sum: f64 = (1..=2000).map(|k| m.spectrum(n, k)).sum();
    prop_assert!(m.spectrum(n, 1) >= 0.0);
    prop_assert!(rel(sum, m.vocab_size(n)) < 1e-8, "sum={} g={}", sum, m.vocab_size(n));
    Ok(())
}

/// First two recursion rows of both coefficient tables.
pub fn check_coefficient_base(beta: f64, gamma: f64) -> Check {
    let a = CoefficientTable::linear(gamma, 3);
    let b = CoefficientTable::logistic(beta, gamma, 3);
    prop_assert_eq!(a.get(0, 0), -1.0);
    prop_assert_eq!(b.get(0, 0), -1.0);
    prop_assert_eq!(a.get(1, 0), 1.0);
    prop_assert_eq!(a.get(1, 1), -gamma);
    prop_assert!((b.get(1, 0) - beta).abs() < 1e-15);
    prop_assert!((b.get(1, 1) - (1.0 - beta)).abs() < 1e-15);
    Ok(())
}

pub fn poisson_case() -> impl Strategy<Value = (Vec<f64>, u64)> {
    (prop::collection::vec(1.0..2.0f64, 200..400), 10_000u64..200_000)
}

/// Binomial and Poisson expectations agree for rare types and long samples.
pub fn check_poisson_limit((weights, n): (Vec<f64>, u64)) -> Check {
    let total: f64 = weights.iter().sum();
    let dist = TypeDistribution::new(weights.iter().map(|w| w / total * 0.999).collect()).unwrap();
    prop_assert!(dist.probs()[0] <= 1e-2);
    let exact = memoryless_expectations(&dist, n, 3, 3, false).unwrap();
    let approx = memoryless_expectations(&dist, n, 3, 3, true).unwrap();
    prop_assert!(rel(exact.expected_types, approx.expected_types) < 1e-3);
    for k in 0..3 {
        let d = (exact.expected_spectrum[k] - approx.expected_spectrum[k]).abs();
        prop_assert!(d < 1e-3 * exact.expected_types, "k={} d={}", k + 1, d);
    }
    Ok(())
}
