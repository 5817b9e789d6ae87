//! Expected type counts under two sampling schemes.
//!
//! *Urn model*: a sample of `n` tokens is drawn without replacement from a
//! fixed text of `n*` tokens. A type with `k*` occurrences in the text then
//! shows up `k` times with hypergeometric probability
//! `C(n,k) C(n*-n, k*-k) / C(n*, k*)`.
//!
//! *Memoryless source*: tokens are i.i.d. draws from a type distribution
//! `p(w)`, giving binomial (or, in the limit, Poisson) frequencies.
//!
//! Seeded samplers for both schemes serve as Monte Carlo cross-checks.

use std::fmt::Write as _;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::FrequencySpectrum;
use crate::error::{argument, Result};
use crate::format::fmt_sig;
use crate::special::{ln_binomial_unchecked, ln_factorial};

/// Below this log-weight a hypergeometric or binomial term is treated as 0.
const LN_UNDERFLOW: f64 = -745.0;

/// Natural log of the binomial coefficient `C(n, k)`.
pub fn log_choose(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(argument(format!("log_choose needs k <= n (got n={n}, k={k})")));
    }
    Ok(ln_binomial_unchecked(n, k))
}

/// `ln[C(a, k) / C(b, k)]` for `k <= a <= b`.
fn ln_choose_ratio(a: u64, b: u64, k: u64) -> f64 {
    if k <= 64 {
        // Σ ln((a-i)/(b-i)) = Σ ln(1 - (b-a)/(b-i)), accurate for a close to b
        let d = (b - a) as f64;
        (0..k).map(|i| (-d / (b - i) as f64).ln_1p()).sum()
    } else {
        ln_binomial_unchecked(a, k) - ln_binomial_unchecked(b, k)
    }
}

/// Hypergeometric probability that a type with `kstar` occurrences in an urn
/// of `total` tokens appears exactly `k` times in a sample of `n`.
fn hypergeometric(total: u64, n: u64, kstar: u64, k: u64) -> f64 {
    if k > n || k > kstar || kstar - k > total - n {
        return 0.0;
    }
    let ln_w =
        ln_binomial_unchecked(n, k) + ln_binomial_unchecked(total - n, kstar - k) - ln_binomial_unchecked(total, kstar);
    if ln_w < LN_UNDERFLOW {
        0.0
    } else {
        ln_w.exp()
    }
}

/// An urn holding all tokens of a text, described by its spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct UrnSpec {
    base: FrequencySpectrum,
}

impl UrnSpec {
    pub fn new(base: FrequencySpectrum) -> Result<Self> {
        if base.tokens() == 0 {
            return Err(argument("urn must contain at least one token"));
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> &FrequencySpectrum {
        &self.base
    }

    /// Urn size `n*`.
    pub fn total(&self) -> u64 {
        self.base.tokens()
    }

    fn check_size(&self, n: u64) -> Result<()> {
        if n > self.total() {
            return Err(argument(format!("sample size {n} exceeds urn size {}", self.total())));
        }
        Ok(())
    }

    /// Expected number of types `E[V]` in a sample of `n` tokens.
    pub fn expected_types(&self, n: u64) -> Result<f64> {
        self.check_size(n)?;
        let total = self.total();
        let rest = total - n;
        let mut missing = 0.0;
        for (kstar, vk) in self.base.iter() {
            if kstar > rest {
                // no way to miss all copies
                break;
            }
            let ln_w = ln_choose_ratio(rest, total, kstar);
            if ln_w >= LN_UNDERFLOW {
                missing += vk as f64 * ln_w.exp();
            }
        }
        Ok(self.base.types() as f64 - missing)
    }

    /// Expected spectrum element `E[V_k]`.
    pub fn expected_spectrum(&self, n: u64, k: u64) -> Result<f64> {
        self.check_size(n)?;
        if k == 0 {
            return Err(argument("spectrum index k must be at least 1"));
        }
        let total = self.total();
        Ok(self
            .base
            .iter()
            .filter(|&(kstar, _)| kstar >= k)
            .map(|(kstar, vk)| vk as f64 * hypergeometric(total, n, kstar, k))
            .sum())
    }

    /// Expected rank `E[R_f]`, the expected number of types seen at least
    /// `f` times.
    pub fn expected_rank(&self, n: u64, f: u64) -> Result<f64> {
        self.check_size(n)?;
        if f == 0 {
            return Err(argument("rank index f must be at least 1"));
        }
        if f == 1 {
            return self.expected_types(n);
        }
        let total = self.total();
        let mut r = 0.0;
        let mut lost = 0.0;
        for (kstar, vk) in self.base.iter().filter(|&(kstar, _)| kstar >= f) {
            r += vk as f64;
            let below: f64 = (0..=(f - 1).min(kstar)).map(|k| hypergeometric(total, n, kstar, k)).sum();
            lost += vk as f64 * below;
        }
        Ok(r - lost)
    }

    /// All expectations at one sample size.
    pub fn report(&self, n: u64, kmax: u64, fmax: u64) -> Result<ExpectationReport> {
        let expected_types = self.expected_types(n)?;
        let expected_spectrum = (1..=kmax).map(|k| self.expected_spectrum(n, k)).collect::<Result<_>>()?;
        let expected_ranks = (1..=fmax).map(|f| self.expected_rank(n, f)).collect::<Result<_>>()?;
        Ok(ExpectationReport { sample_size: n, expected_types, expected_spectrum, expected_ranks })
    }
}

pub fn urn_expected_types(urn: &UrnSpec, n: u64) -> Result<f64> {
    urn.expected_types(n)
}

pub fn urn_expected_spectrum(urn: &UrnSpec, n: u64, k: u64) -> Result<f64> {
    urn.expected_spectrum(n, k)
}

pub fn urn_expected_rank(urn: &UrnSpec, n: u64, f: u64) -> Result<f64> {
    urn.expected_rank(n, f)
}

/// Expected type count, spectrum `E[V_1..V_kmax]` and ranks `E[R_1..R_fmax]`
/// at one sample size.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationReport {
    pub sample_size: u64,
    pub expected_types: f64,
    pub expected_spectrum: Vec<f64>,
    pub expected_ranks: Vec<f64>,
}

impl ExpectationReport {
    /// CSV header `n,EV,EV_1..,ER_1..`.
    pub fn csv_header(&self) -> String {
        let mut h = String::from("n,EV");
        for k in 1..=self.expected_spectrum.len() {
            let _ = write!(h, ",EV_{k}");
        }
        for f in 1..=self.expected_ranks.len() {
            let _ = write!(h, ",ER_{f}");
        }
        h
    }

    pub fn csv_row(&self, precision: usize) -> String {
        let mut row = format!("{},{}", self.sample_size, fmt_sig(self.expected_types, precision));
        for x in self.expected_spectrum.iter().chain(&self.expected_ranks) {
            row.push(',');
            row.push_str(&fmt_sig(*x, precision));
        }
        row
    }

    /// Header plus one data row.
    pub fn to_csv(&self, precision: usize) -> String {
        format!("{}\n{}\n", self.csv_header(), self.csv_row(precision))
    }
}

/// Probabilities `p_r` of the types of a memoryless source, in nonincreasing
/// order. Mass missing from 1 belongs to types that are not tracked.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeDistribution {
    probs: Vec<f64>,
}

impl TypeDistribution {
    /// Validates and sorts the probabilities.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(argument(format!("type probabilities must be positive, got {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if sum > 1.0 + 1e-9 {
            return Err(argument(format!("type probabilities sum to {sum} > 1")));
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { probs })
    }

    /// Relative frequencies `k/n*` of every type of a text.
    pub fn from_spectrum(base: &FrequencySpectrum) -> Result<Self> {
        let n = base.tokens() as f64;
        if n == 0.0 {
            return Err(argument("empty spectrum has no type distribution"));
        }
        let mut probs = Vec::with_capacity(base.types() as usize);
        for (k, vk) in base.iter().collect::<Vec<_>>().into_iter().rev() {
            probs.extend(std::iter::repeat_n(k as f64 / n, vk as usize));
        }
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `P(F = k)` for a type of probability `p` in `n` i.i.d. draws.
fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_w = ln_binomial_unchecked(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p();
    if ln_w < LN_UNDERFLOW {
        0.0
    } else {
        ln_w.exp()
    }
}

fn poisson_pmf(mean: f64, k: u64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln_w = k as f64 * mean.ln() - mean - ln_factorial(k);
    if ln_w < LN_UNDERFLOW {
        0.0
    } else {
        ln_w.exp()
    }
}

/// Expectations for `n` i.i.d. draws. With `poisson` set, binomial factors
/// are replaced by their Poisson limits.
pub fn memoryless_expectations(
    dist: &TypeDistribution,
    n: u64,
    kmax: u64,
    fmax: u64,
    poisson: bool,
) -> Result<ExpectationReport> {
    if kmax == 0 {
        return Err(argument("kmax must be at least 1"));
    }
    let kneed = kmax.max(fmax.saturating_sub(1));
    let nf = n as f64;
    let mut ev = 0.0;
    let mut evk = vec![0.0; kneed as usize];
    for &p in dist.probs() {
        ev += if poisson {
            -(-nf * p).exp_m1()
        } else if p >= 1.0 {
            if n > 0 {
                1.0
            } else {
                0.0
            }
        } else {
            -(nf * (-p).ln_1p()).exp_m1()
        };
        for (i, slot) in evk.iter_mut().enumerate() {
            let k = i as u64 + 1;
            *slot += if poisson { poisson_pmf(nf * p, k) } else { binomial_pmf(n, p, k) };
        }
    }
    let mut ranks = Vec::with_capacity(fmax as usize);
    let mut r = ev;
    for f in 1..=fmax {
        ranks.push(r);
        if f as usize <= evk.len() {
            r -= evk[f as usize - 1];
        }
    }
    evk.truncate(kmax as usize);
    Ok(ExpectationReport { sample_size: n, expected_types: ev, expected_spectrum: evk, expected_ranks: ranks })
}

/// Random generator for one Monte Carlo replica. Replicas of the same seed
/// use disjoint ChaCha streams, so results do not depend on scheduling.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Draws samples without replacement from an expanded urn, reusing buffers
/// across draws.
#[derive(Clone, Debug)]
pub struct UrnSampler {
    tokens: Vec<u32>,
    scratch: Vec<u32>,
    counts: Vec<u64>,
}

impl UrnSampler {
    pub fn new(urn: &UrnSpec) -> Self {
        let mut tokens = Vec::with_capacity(urn.total() as usize);
        let mut id = 0u32;
        for (k, vk) in urn.base().iter() {
            for _ in 0..vk {
                tokens.extend(std::iter::repeat_n(id, k as usize));
                id += 1;
            }
        }
        Self { scratch: tokens.clone(), tokens, counts: vec![0; id as usize] }
    }

    /// One sample of `n` tokens, returned as its spectrum.
    pub fn draw<R: Rng + ?Sized>(&mut self, n: u64, rng: &mut R) -> Result<FrequencySpectrum> {
        let total = self.tokens.len();
        if n as usize > total {
            return Err(argument(format!("sample size {n} exceeds urn size {total}")));
        }
        let n = n as usize;
        self.scratch.copy_from_slice(&self.tokens);
        // partial Fisher-Yates: the first n slots become a uniform sample
        for i in 0..n {
            let j = rng.random_range(i..total);
            self.scratch.swap(i, j);
        }
        for &t in &self.scratch[..n] {
            self.counts[t as usize] += 1;
        }
        let mut pairs = std::collections::BTreeMap::<u64, u64>::new();
        for &t in &self.scratch[..n] {
            let c = std::mem::take(&mut self.counts[t as usize]);
            if c > 0 {
                *pairs.entry(c).or_insert(0) += 1;
            }
        }
        FrequencySpectrum::from_counts(pairs)
    }
}

/// One seeded draw of `n` tokens without replacement.
pub fn sample_urn(urn: &UrnSpec, n: u64, seed: u64) -> Result<FrequencySpectrum> {
    UrnSampler::new(urn).draw(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Draws i.i.d. samples from a type distribution. Draws that land in the
/// untracked remainder mass are not counted as tokens of any type.
#[derive(Clone, Debug)]
pub struct MemorylessSampler {
    index: WeightedIndex<f64>,
    tracked: usize,
    counts: Vec<u64>,
}

impl MemorylessSampler {
    pub fn new(dist: &TypeDistribution) -> Result<Self> {
        let mut weights = dist.probs().to_vec();
        let rest = 1.0 - weights.iter().sum::<f64>();
        let tracked = weights.len();
        if rest > 1e-12 {
            weights.push(rest);
        }
        let index = WeightedIndex::new(&weights).map_err(|e| argument(format!("bad distribution: {e}")))?;
        Ok(Self { index, tracked, counts: vec![0; tracked] })
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, n: u64, rng: &mut R) -> Result<FrequencySpectrum> {
        let mut touched = Vec::new();
        for _ in 0..n {
            let i = self.index.sample(rng);
            if i < self.tracked {
                if self.counts[i] == 0 {
                    touched.push(i);
                }
                self.counts[i] += 1;
            }
        }
        let mut pairs = std::collections::BTreeMap::<u64, u64>::new();
        for i in touched {
            *pairs.entry(std::mem::take(&mut self.counts[i])).or_insert(0) += 1;
        }
        FrequencySpectrum::from_counts(pairs)
    }
}

/// One seeded memoryless sample of `n` tokens.
pub fn sample_memoryless(dist: &TypeDistribution, n: u64, seed: u64) -> Result<FrequencySpectrum> {
    MemorylessSampler::new(dist)?.draw(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn toy() -> UrnSpec {
        UrnSpec::new(FrequencySpectrum::from_counts([(1, 2), (2, 1)]).unwrap()).unwrap()
    }

    fn exact_ln_choose(n: u64, k: u64) -> f64 {
        let mut c = BigUint::from(1u32);
        for i in 0..k {
            c = c * BigUint::from(n - i) / BigUint::from(i + 1);
        }
        // log of an arbitrary-size integer via its top 64 bits
        let bits = c.bits();
        let shift = bits.saturating_sub(64);
        let top: BigUint = &c >> shift;
        let top = top.iter_u64_digits().next().unwrap_or(0) as f64;
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }

    #[test]
    fn log_choose_examples() {
        assert!((log_choose(4, 2).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert_eq!(log_choose(17, 0).unwrap(), 0.0);
        assert!((log_choose(52, 5).unwrap() - 2_598_960f64.ln()).abs() < 1e-13);
        assert!(log_choose(3, 4).is_err());
    }

    #[test]
    fn log_choose_matches_big_integers() {
        for &(n, k) in &[(300, 7), (1000, 41), (5000, 2500), (1_000_000, 50), (10_000_000, 123_456), (9_999_999, 17)] {
            let exact = exact_ln_choose(n, k);
            let got = log_choose(n, k).unwrap();
            assert!((got - exact).abs() <= 1e-12 * exact, "C({n},{k}): {got} vs {exact}");
        }
    }

    #[test]
    fn toy_urn_values() {
        let u = toy();
        assert!((u.expected_types(2).unwrap() - 11.0 / 6.0).abs() < 1e-14);
        assert!((u.expected_spectrum(2, 1).unwrap() - 5.0 / 3.0).abs() < 1e-14);
        assert!((u.expected_rank(2, 2).unwrap() - 1.0 / 6.0).abs() < 1e-14);
        assert!((u.expected_rank(2, 1).unwrap() - 11.0 / 6.0).abs() < 1e-14);
        assert_eq!(u.expected_types(4).unwrap(), 3.0);
        assert_eq!(u.expected_types(0).unwrap(), 0.0);
        assert!((u.expected_spectrum(4, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((u.expected_rank(4, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!(u.expected_types(5).is_err());
    }

    #[test]
    fn hypergeometric_is_normalized() {
        for &(total, n, kstar) in &[(20u64, 7u64, 5u64), (1000, 300, 40), (100_000, 5000, 900)] {
            let s: f64 = (0..=kstar).map(|k| hypergeometric(total, n, kstar, k)).sum();
            assert!((s - 1.0).abs() < 1e-10, "{s}");
        }
    }

    #[test]
    fn report_csv_layout() {
        let r = toy().report(2, 2, 2).unwrap();
        assert_eq!(r.csv_header(), "n,EV,EV_1,EV_2,ER_1,ER_2");
        assert_eq!(r.csv_row(6), "2,1.83333,1.66667,0.166667,1.83333,0.166667");
    }

    #[test]
    fn memoryless_examples() {
        let d = TypeDistribution::new(vec![0.5, 0.5]).unwrap();
        let r = memoryless_expectations(&d, 2, 2, 3, false).unwrap();
        assert!((r.expected_types - 1.5).abs() < 1e-15);
        assert!((r.expected_spectrum[0] - 1.0).abs() < 1e-15);
        assert!((r.expected_ranks[2] - 0.0).abs() < 1e-15);

        let r = memoryless_expectations(&d, 0, 1, 1, false).unwrap();
        assert_eq!(r.expected_types, 0.0);

        let one = TypeDistribution::new(vec![1.0]).unwrap();
        let r = memoryless_expectations(&one, 5, 5, 1, false).unwrap();
        assert_eq!(r.expected_types, 1.0);
        assert_eq!(r.expected_spectrum[4], 1.0);
        assert_eq!(r.expected_spectrum[0], 0.0);

        assert!(TypeDistribution::new(vec![0.7, 0.4]).is_err());
        assert!(TypeDistribution::new(vec![0.5, 0.0]).is_err());
    }

    #[test]
    fn poisson_approaches_binomial() {
        let probs: Vec<f64> = (1..=500).map(|r| 0.002 / r as f64).collect();
        let d = TypeDistribution::new(probs).unwrap();
        let b = memoryless_expectations(&d, 20_000, 5, 5, false).unwrap();
        let p = memoryless_expectations(&d, 20_000, 5, 5, true).unwrap();
        assert!((b.expected_types - p.expected_types).abs() <= 1e-3 * b.expected_types);
        for k in 0..5 {
            assert!((b.expected_spectrum[k] - p.expected_spectrum[k]).abs() <= 1e-3 * b.expected_spectrum[k]);
        }
    }

    #[test]
    fn sampler_edge_cases() {
        let u = toy();
        assert_eq!(sample_urn(&u, 4, 99).unwrap(), *u.base());
        assert!(sample_urn(&u, 0, 1).unwrap().is_empty());
        assert!(sample_urn(&u, 5, 1).is_err());
        assert_eq!(sample_urn(&u, 2, 7).unwrap(), sample_urn(&u, 2, 7).unwrap());
    }

    #[test]
    fn toy_urn_monte_carlo_mean() {
        let u = toy();
        let mut sampler = UrnSampler::new(&u);
        let reps = 1_000_000u64;
        let (mut s, mut s2) = (0.0, 0.0);
        for rep in 0..reps {
            let v = sampler.draw(2, &mut replica_rng(2024, rep)).unwrap().types() as f64;
            s += v;
            s2 += v * v;
        }
        let mean = s / reps as f64;
        let se = ((s2 / reps as f64 - mean * mean) / reps as f64).sqrt();
        assert!((mean - 11.0 / 6.0).abs() < 4.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn memoryless_monte_carlo_mean() {
        let d = TypeDistribution::new(vec![0.3, 0.2, 0.1, 0.05]).unwrap();
        let want = memoryless_expectations(&d, 10, 1, 1, false).unwrap();
        let mut sampler = MemorylessSampler::new(&d).unwrap();
        let reps = 100_000u64;
        let (mut s, mut s2) = (0.0, 0.0);
        for rep in 0..reps {
            let spec = sampler.draw(10, &mut replica_rng(5, rep)).unwrap();
            let v = spec.hapaxes() as f64;
            s += v;
            s2 += v * v;
        }
        let mean = s / reps as f64;
        let se = ((s2 / reps as f64 - mean * mean) / reps as f64).sqrt();
        assert!((mean - want.expected_spectrum[0]).abs() < 4.0 * se, "mean {mean} se {se}");
    }
}
