//! Parametric hapax-rate models and their vocabulary, spectrum and rank
//! functions.
//!
//! Every model is a hapax rate `h(u)` on the log-length scale `u = ln n`,
//! with the induced vocabulary size `g(n)` normalised so that `g(1) = 1`.
//! The location parameter `alpha` applies the offset operation
//! `h_α(u) = h(u - α)`, `g_α(n) = g(n e^{-α}) / g(e^{-α})`.
//!
//! | family     | parameters          | hapax rate                              |
//! |------------|---------------------|-----------------------------------------|
//! | constant   | beta                | `β`                                     |
//! | maximal    |                     | `1`                                     |
//! | davis      | alpha               | `1/x - 1/(e^x - 1)`, `x = u - α`        |
//! | linear     | alpha, gamma        | `1`, then `1 - γx`, then `0`            |
//! | logistic   | alpha, beta, gamma  | `(1-β)/(1 + e^{γx}) + β`                |
//! | mixture    | lambda + two models | induced by `λ g_1 + (1-λ) g_2`          |
//!
//! The symbol clash between the slope `gamma` and Euler's constant is
//! resolved by naming the latter [`EULER_GAMMA`](crate::special::EULER_GAMMA).

mod branch_cut;
mod coefficients;
mod constant;
mod davis;
mod ideal;
mod linear;
mod logistic;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

pub use coefficients::CoefficientTable;
pub use ideal::{ideal_zipf_summary, lotka_spectrum, mandelbrot_curve, IdealInput, IdealLawSummary, TOKEN_COUNT_NOTE};

use crate::analytic::{HapaxRate, VocabularySize};
use crate::error::{argument, Error, Result};
use crate::special::softplus;

/// Orders served by Taylor-jet recursions for the logistic family. Beyond
/// this, spectra come from branch-cut integrals when `γ < 1` and are NaN
/// otherwise, since the recursion loses accuracy near the complex
/// singularities of `g`.
pub const TABLE_KMAX: usize = 64;

/// Model family tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Constant,
    Maximal,
    Davis,
    Linear,
    Logistic,
    Mixture,
}

impl Family {
    /// The families fitted to data, in order of increasing flexibility.
    pub const FITTED: [Family; 4] = [Family::Constant, Family::Davis, Family::Linear, Family::Logistic];

    pub fn name(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::Maximal => "maximal",
            Family::Davis => "davis",
            Family::Linear => "linear",
            Family::Logistic => "logistic",
            Family::Mixture => "mixture",
        }
    }

    /// Names of the scalar parameters, in the order used by
    /// [`HapaxModel::parameters`].
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            Family::Constant => &["beta"],
            Family::Maximal => &[],
            Family::Davis => &["alpha"],
            Family::Linear => &["alpha", "gamma"],
            Family::Logistic => &["alpha", "beta", "gamma"],
            Family::Mixture => &["lambda"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "constant" => Family::Constant,
            "maximal" => Family::Maximal,
            "davis" => Family::Davis,
            "linear" => Family::Linear,
            "logistic" => Family::Logistic,
            "mixture" => Family::Mixture,
            other => return Err(argument(format!("unknown model family {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Constant { beta: f64 },
    Maximal,
    Davis { alpha: f64 },
    Linear { alpha: f64, gamma: f64 },
    Logistic { alpha: f64, beta: f64, gamma: f64 },
    Mixture { lambda: f64, first: Box<HapaxModel>, second: Box<HapaxModel> },
}

/// A hapax-rate model with cached coefficient tables.
///
/// Safe to share across threads; the table cache is behind a lock.
pub struct HapaxModel {
    shape: Shape,
    table: RwLock<Option<CoefficientTable>>,
}

impl Clone for HapaxModel {
    fn clone(&self) -> Self {
        Self::from_shape(self.shape.clone())
    }
}

impl PartialEq for HapaxModel {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
    }
}

impl fmt::Debug for HapaxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HapaxModel({self})")
    }
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(argument(format!("{name} must be finite, got {x}")))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..1.0).contains(&beta) {
        Ok(())
    } else {
        Err(argument(format!("beta must lie in [0, 1), got {beta}")))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(argument(format!("gamma must be positive, got {gamma}")))
    }
}

/// A value below `-1e-12` in some `g(n|k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumViolation {
    pub u: f64,
    pub k: usize,
    pub value: f64,
}

impl HapaxModel {
    fn from_shape(shape: Shape) -> Self {
        Self { shape, table: RwLock::new(None) }
    }

    /// Constant hapax rate `β ∈ [0, 1)`, giving `g(n) = n^β`.
    pub fn constant(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self::from_shape(Shape::Constant { beta }))
    }

    /// Every token is a new type: `h = 1`, `g(n) = n`.
    pub fn maximal() -> Self {
        Self::from_shape(Shape::Maximal)
    }

    pub fn davis(alpha: f64) -> Result<Self> {
        check_finite("alpha", alpha)?;
        Ok(Self::from_shape(Shape::Davis { alpha }))
    }

    pub fn linear(alpha: f64, gamma: f64) -> Result<Self> {
        check_finite("alpha", alpha)?;
        check_gamma(gamma)?;
        Ok(Self::from_shape(Shape::Linear { alpha, gamma }))
    }

    pub fn logistic(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        check_finite("alpha", alpha)?;
        check_beta(beta)?;
        check_gamma(gamma)?;
        Ok(Self::from_shape(Shape::Logistic { alpha, beta, gamma }))
    }

    /// Mixture `g = λ g_first + (1-λ) g_second` with `λ ∈ (0, 1)`.
    pub fn mixture(first: HapaxModel, second: HapaxModel, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(argument(format!("mixture weight must lie in (0, 1), got {lambda}")));
        }
        Ok(Self::from_shape(Shape::Mixture { lambda, first: Box::new(first), second: Box::new(second) }))
    }

    /// Builds a fittable family from its parameters, ordered as in
    /// [`Family::parameter_names`].
    pub fn from_parameters(family: Family, params: &[f64]) -> Result<Self> {
        let want = family.parameter_names().len();
        if params.len() != want || family == Family::Mixture {
            return Err(argument(format!("{family} takes {want} scalar parameters, got {}", params.len())));
        }
        match family {
            Family::Constant => Self::constant(params[0]),
            Family::Maximal => Ok(Self::maximal()),
            Family::Davis => Self::davis(params[0]),
            Family::Linear => Self::linear(params[0], params[1]),
            Family::Logistic => Self::logistic(params[0], params[1], params[2]),
            Family::Mixture => unreachable!(),
        }
    }

    pub fn family(&self) -> Family {
        match self.shape {
            Shape::Constant { .. } => Family::Constant,
            Shape::Maximal => Family::Maximal,
            Shape::Davis { .. } => Family::Davis,
            Shape::Linear { .. } => Family::Linear,
            Shape::Logistic { .. } => Family::Logistic,
            Shape::Mixture { .. } => Family::Mixture,
        }
    }

    /// Scalar parameters in the order of [`Family::parameter_names`].
    pub fn parameters(&self) -> Vec<f64> {
        match self.shape {
            Shape::Constant { beta } => vec![beta],
            Shape::Maximal => vec![],
            Shape::Davis { alpha } => vec![alpha],
            Shape::Linear { alpha, gamma } => vec![alpha, gamma],
            Shape::Logistic { alpha, beta, gamma } => vec![alpha, beta, gamma],
            Shape::Mixture { lambda, .. } => vec![lambda],
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.shape {
            Shape::Davis { alpha } | Shape::Linear { alpha, .. } | Shape::Logistic { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self.shape {
            Shape::Constant { beta } | Shape::Logistic { beta, .. } => Some(beta),
            _ => None,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.shape {
            Shape::Linear { gamma, .. } | Shape::Logistic { gamma, .. } => Some(gamma),
            _ => None,
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self.shape {
            Shape::Mixture { lambda, .. } => Some(lambda),
            _ => None,
        }
    }

    pub fn components(&self) -> Option<(&HapaxModel, &HapaxModel)> {
        match &self.shape {
            Shape::Mixture { first, second, .. } => Some((first, second)),
            _ => None,
        }
    }

    /// False for the linear family (and mixtures containing it), whose
    /// hapax rate has kinks.
    pub fn is_analytic(&self) -> bool {
        match &self.shape {
            Shape::Linear { .. } => false,
            Shape::Mixture { first, second, .. } => first.is_analytic() && second.is_analytic(),
            _ => true,
        }
    }

    /// `h(u)`.
    pub fn hapax_rate(&self, u: f64) -> f64 {
        match &self.shape {
            Shape::Constant { beta } => *beta,
            Shape::Maximal => 1.0,
            Shape::Davis { alpha } => davis::hapax_rate(u - alpha),
            Shape::Linear { alpha, gamma } => linear::hapax_rate(*gamma, u - alpha),
            Shape::Logistic { alpha, beta, gamma } => logistic::hapax_rate(*beta, *gamma, u - alpha),
            Shape::Mixture { first, second, .. } => {
                let (p, q) = self.mixture_shares(u);
                p * first.hapax_rate(u) + q * second.hapax_rate(u)
            }
        }
    }

    /// `h'(u)`; one-sided at the kinks of the linear family.
    pub fn hapax_rate_derivative(&self, u: f64) -> f64 {
        match &self.shape {
            Shape::Constant { .. } | Shape::Maximal => 0.0,
            Shape::Davis { alpha } => davis::hapax_rate_derivative(u - alpha),
            Shape::Linear { alpha, gamma } => linear::hapax_rate_derivative(*gamma, u - alpha),
            Shape::Logistic { alpha, beta, gamma } => logistic::hapax_rate_derivative(*beta, *gamma, u - alpha),
            Shape::Mixture { first, second, .. } => {
                let (p, q) = self.mixture_shares(u);
                let (h1, h2) = (first.hapax_rate(u), second.hapax_rate(u));
                let h = p * h1 + q * h2;
                p * (first.hapax_rate_derivative(u) + h1 * h1) + q * (second.hapax_rate_derivative(u) + h2 * h2) - h * h
            }
        }
    }

    /// Shares `λ g_1/g` and `(1-λ) g_2/g` of the mixture components.
    fn mixture_shares(&self, u: f64) -> (f64, f64) {
        let Shape::Mixture { lambda, first, second } = &self.shape else {
            return (1.0, 0.0);
        };
        let a = lambda.ln() + first.ln_vocab(u);
        let b = (-lambda).ln_1p() + second.ln_vocab(u);
        let p = 1.0 / (1.0 + (b - a).exp());
        (p, 1.0 - p)
    }

    /// `ln g(e^u)`, finite even where `g` itself would overflow.
    pub fn ln_vocab(&self, u: f64) -> f64 {
        match &self.shape {
            Shape::Constant { beta } => beta * u,
            Shape::Maximal => u,
            Shape::Davis { alpha } => davis::ln_vocab(u - alpha) - davis::ln_vocab(-alpha),
            Shape::Linear { alpha, gamma } => linear::ln_vocab(*alpha, *gamma, u),
            Shape::Logistic { alpha, beta, gamma } => logistic::ln_vocab(*alpha, *beta, *gamma, u),
            Shape::Mixture { lambda, first, second } => {
                let a = lambda.ln() + first.ln_vocab(u);
                let b = (-lambda).ln_1p() + second.ln_vocab(u);
                a.max(b) + softplus(-(a - b).abs())
            }
        }
    }

    /// `g(n)`; `g(0) = 0`.
    pub fn vocab_size(&self, n: f64) -> f64 {
        if n == 0.0 {
            return 0.0;
        }
        self.ln_vocab(n.ln()).exp()
    }

    fn with_table<R>(&self, kmax: usize, read: impl FnOnce(&CoefficientTable) -> R) -> R {
        {
            let guard = self.table.read().unwrap_or_else(|e| e.into_inner());
            if let Some(t) = guard.as_ref().filter(|t| t.kmax() >= kmax) {
                return read(t);
            }
        }
        let mut guard = self.table.write().unwrap_or_else(|e| e.into_inner());
        let table = guard.get_or_insert_with(|| match self.shape {
            Shape::Linear { gamma, .. } => CoefficientTable::linear(gamma, kmax),
            Shape::Logistic { beta, gamma, .. } => CoefficientTable::logistic(beta, gamma, kmax),
            _ => unreachable!("only polynomial families carry coefficient tables"),
        });
        table.extend_to(kmax);
        read(table)
    }

    /// Coefficient table up to row `kmax` for the linear and logistic
    /// families.
    pub fn coefficient_table(&self, kmax: usize) -> Option<CoefficientTable> {
        match self.shape {
            Shape::Linear { .. } | Shape::Logistic { .. } => Some(self.with_table(kmax, |t| {
                let mut t = t.clone();
                t.extend_to(kmax);
                t
            })),
            _ => None,
        }
    }

    /// Table evaluation of `h(u|k)` for `k = 0..=kmax`.
    #[cfg(test)]
    fn table_row(&self, z: f64, kmax: usize) -> Vec<f64> {
        self.with_table(kmax, |t| {
            (0..=kmax).map(|k| t.evaluate(k, z, (-crate::special::ln_factorial(k as u64)).exp())).collect()
        })
    }

    /// Relative spectrum `h(u|k) = g(n|k)/g(n)` for `k = 0..=kmax`.
    ///
    /// The linear and logistic families run a recursion on the Taylor jet of
    /// `h`. It is algebraically the coefficient-table polynomial but avoids
    /// the cancellation those polynomials suffer when `h` is close to 1.
    /// Orders that cannot be evaluated reliably (above 8192 for the linear
    /// family, above [`TABLE_KMAX`] for the logistic family with `γ ≥ 1`)
    /// are NaN.
    pub fn relative_spectrum(&self, u: f64, kmax: usize) -> Vec<f64> {
        match &self.shape {
            Shape::Constant { beta } => constant::relative_spectrum_row(*beta, kmax),
            Shape::Maximal => constant::relative_spectrum_row(1.0, kmax),
            Shape::Davis { alpha } => {
                let x = u - alpha;
                let (m, g) = (x.exp(), davis::ln_vocab(x).exp());
                std::iter::once(-1.0).chain((1..=kmax as u64).map(|k| davis::spectrum(m, k) / g)).collect()
            }
            Shape::Linear { alpha, gamma } => linear::relative_spectrum_streaming(*gamma, u - alpha, kmax),
            Shape::Logistic { alpha, beta, gamma } => {
                let x = u - alpha;
                if logistic::is_plain(*beta, *gamma) {
                    // (m/(m+1))^{k-1} / (m+1)
                    let ln_q = -softplus(-x);
                    let ln_p = -softplus(x);
                    return std::iter::once(-1.0)
                        .chain((1..=kmax).map(|k| ((k - 1) as f64 * ln_q + ln_p).exp()))
                        .collect();
                }
                let mut row = logistic::relative_spectrum_streaming(*beta, *gamma, x, kmax.min(TABLE_KMAX));
                if kmax > TABLE_KMAX {
                    if *gamma < 1.0 {
                        let (m, g) = (x.exp(), logistic::ln_vocab(0.0, *beta, *gamma, x).exp());
                        row.extend(
                            ((TABLE_KMAX + 1) as u64..=kmax as u64)
                                .map(|k| branch_cut::spectrum(|y| logistic::jump_over_y(*beta, *gamma, y), m, k) / g),
                        );
                    } else {
                        row.resize(kmax + 1, f64::NAN);
                    }
                }
                row
            }
            Shape::Mixture { first, second, .. } => {
                let (p, q) = self.mixture_shares(u);
                let a = first.relative_spectrum(u, kmax);
                let b = second.relative_spectrum(u, kmax);
                a.iter().zip(&b).map(|(x, y)| p * x + q * y).collect()
            }
        }
    }

    /// Expected spectrum element `g(n|k)` for `k ≥ 1` (NaN for `k = 0`).
    pub fn spectrum(&self, n: f64, k: u64) -> f64 {
        if k == 0 {
            return f64::NAN;
        }
        let u = n.ln();
        match &self.shape {
            Shape::Constant { beta } => self.vocab_size(n) * constant::relative_spectrum(*beta, k),
            Shape::Maximal => self.vocab_size(n) * constant::relative_spectrum(1.0, k),
            Shape::Davis { alpha } => davis::spectrum((u - alpha).exp(), k) * (-davis::ln_vocab(-alpha)).exp(),
            Shape::Logistic { alpha, beta, gamma }
                if k as usize > TABLE_KMAX && *gamma < 1.0 && !logistic::is_plain(*beta, *gamma) =>
            {
                let m = (u - alpha).exp();
                branch_cut::spectrum(|y| logistic::jump_over_y(*beta, *gamma, y), m, k)
                    * (-logistic::ln_vocab(0.0, *beta, *gamma, -alpha)).exp()
            }
            Shape::Mixture { lambda, first, second } => {
                lambda * first.spectrum(n, k) + (1.0 - lambda) * second.spectrum(n, k)
            }
            _ => self.vocab_size(n) * self.relative_spectrum(u, k as usize)[k as usize],
        }
    }

    /// Expected rank function `g(n||f)`: the expected number of types with
    /// frequency at least `f`. `f = 0` is treated as `f = 1`.
    pub fn rank(&self, n: f64, f: u64) -> f64 {
        self.rank_curve(n, &[f.max(1)])[0]
    }

    /// `g(n||f)` at each requested `f`. Sharing work across `f` makes this
    /// much cheaper than repeated calls to [`rank`](Self::rank) for some
    /// families.
    pub fn rank_curve(&self, n: f64, fs: &[u64]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..fs.len()).collect();
        order.sort_by_key(|&i| fs[i]);
        let sorted: Vec<u64> = order.iter().map(|&i| fs[i].max(1)).collect();
        let values = self.rank_sorted(n, &sorted);
        let mut out = vec![0.0; fs.len()];
        for (slot, v) in order.into_iter().zip(values) {
            out[slot] = v;
        }
        out
    }

    fn rank_sorted(&self, n: f64, fs: &[u64]) -> Vec<f64> {
        let u = n.ln();
        let fmax = fs.last().copied().unwrap_or(1) as usize;
        // Taylor assembly g(n) (1 - Σ_{k<f} h(u|k)) from a relative spectrum row
        let assemble = |row: &[f64], g: f64| -> Vec<f64> {
            let mut partial = vec![0.0; row.len() + 1];
            for k in 0..row.len() {
                partial[k + 1] = partial[k] + row[k];
            }
            fs.iter().map(|&f| -g * partial[f as usize]).collect()
        };
        match &self.shape {
            Shape::Constant { beta } => {
                let g = self.vocab_size(n);
                fs.iter().map(|&f| g * constant::rank_ratio(*beta, f)).collect()
            }
            Shape::Maximal => {
                let g = self.vocab_size(n);
                fs.iter().map(|&f| if f <= 1 { g } else { 0.0 }).collect()
            }
            Shape::Davis { alpha } => {
                let scale = (-davis::ln_vocab(-alpha)).exp();
                davis::rank_many((u - alpha).exp(), fs).into_iter().map(|r| r * scale).collect()
            }
            Shape::Linear { .. } => assemble(&self.relative_spectrum(u, fmax - 1), self.vocab_size(n)),
            Shape::Logistic { alpha, beta, gamma } => {
                let x = u - alpha;
                if logistic::is_plain(*beta, *gamma) {
                    // 2 (m/(m+1))^f, rescaled by the offset normalisation
                    let ln_scale = std::f64::consts::LN_2 - logistic::ln_vocab(0.0, 0.0, 1.0, -alpha);
                    return fs.iter().map(|&f| (ln_scale - f as f64 * softplus(-x)).exp()).collect();
                }
                let g = self.vocab_size(n);
                if fmax - 1 <= TABLE_KMAX || *gamma >= 1.0 {
                    return assemble(&self.relative_spectrum(u, fmax - 1), g);
                }
                let split = fs.partition_point(|&f| f as usize - 1 <= TABLE_KMAX);
                let mut out = if split > 0 {
                    let row = self.relative_spectrum(u, fs[split - 1] as usize - 1);
                    let mut partial = 0.0;
                    let mut next_k = 0;
                    fs[..split]
                        .iter()
                        .map(|&f| {
                            while next_k < f as usize {
                                partial += row[next_k];
                                next_k += 1;
                            }
                            -g * partial
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                let m = x.exp();
                let scale = (-logistic::ln_vocab(0.0, *beta, *gamma, -alpha)).exp();
                out.extend(
                    fs[split..]
                        .iter()
                        .map(|&f| branch_cut::rank(|y| logistic::jump_over_y(*beta, *gamma, y), m, f) * scale),
                );
                out
            }
            Shape::Mixture { lambda, first, second } => {
                let a = first.rank_sorted(n, fs);
                let b = second.rank_sorted(n, fs);
                a.iter().zip(&b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect()
            }
        }
    }

    /// Scans `g(n|k)` for `k = 1..=kmax` at each `u` and reports values
    /// below `-1e-12`.
    pub fn spectrum_violations(&self, us: &[f64], kmax: usize) -> Vec<SpectrumViolation> {
        let mut out = Vec::new();
        for &u in us {
            let g = self.ln_vocab(u).exp();
            let row = self.relative_spectrum(u, kmax);
            for (k, &h) in row.iter().enumerate().skip(1) {
                let value = g * h;
                if value < -1e-12 {
                    out.push(SpectrumViolation { u, k, value });
                }
            }
        }
        out
    }

    fn write_fields(&self, prefix: &str, f: &mut fmt::Formatter<'_>, first_field: bool) -> fmt::Result {
        let sep = if first_field { "" } else { " " };
        write!(f, "{sep}{prefix}family={}", self.family())?;
        for (name, value) in self.family().parameter_names().iter().zip(self.parameters()) {
            write!(f, " {prefix}{name}={value}")?;
        }
        if let Shape::Mixture { first, second, .. } = &self.shape {
            first.write_fields(&format!("{prefix}first."), f, false)?;
            second.write_fields(&format!("{prefix}second."), f, false)?;
        }
        Ok(())
    }

    fn from_fields(fields: &BTreeMap<String, String>, prefix: &str, used: &mut usize) -> Result<Self> {
        let get = |key: &str| fields.get(&format!("{prefix}{key}"));
        let family: Family = get("family").ok_or_else(|| argument(format!("missing key {prefix}family")))?.parse()?;
        *used += 1;
        let mut params = Vec::new();
        for name in family.parameter_names() {
            let raw = get(name).ok_or_else(|| argument(format!("missing key {prefix}{name}")))?;
            let v: f64 =
                raw.parse().map_err(|_| argument(format!("value of {prefix}{name} is not a number: {raw:?}")))?;
            params.push(v);
            *used += 1;
        }
        if family == Family::Mixture {
            let first = Self::from_fields(fields, &format!("{prefix}first."), used)?;
            let second = Self::from_fields(fields, &format!("{prefix}second."), used)?;
            Self::mixture(first, second, params[0])
        } else {
            Self::from_parameters(family, &params)
        }
    }
}

/// Single-line `key=value` record, e.g.
/// `family=logistic alpha=10.11 beta=0.218 gamma=0.314`. Mixture components
/// use `first.` and `second.` key prefixes.
impl fmt::Display for HapaxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_fields("", f, true)
    }
}

impl FromStr for HapaxModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for token in s.split_whitespace() {
            let (k, v) =
                token.split_once('=').ok_or_else(|| argument(format!("expected key=value, found {token:?}")))?;
            if fields.insert(k.to_string(), v.to_string()).is_some() {
                return Err(argument(format!("duplicate key {k:?}")));
            }
        }
        let mut used = 0;
        let model = Self::from_fields(&fields, "", &mut used)?;
        if used != fields.len() {
            return Err(argument(format!("unexpected keys in model record {s:?}")));
        }
        Ok(model)
    }
}

impl HapaxRate for HapaxModel {
    fn hapax_rate(&self, u: f64) -> f64 {
        HapaxModel::hapax_rate(self, u)
    }

    fn hapax_rate_derivative(&self, u: f64) -> Option<f64> {
        Some(HapaxModel::hapax_rate_derivative(self, u))
    }

    fn exact_relative_spectrum(&self, u: f64, kmax: usize) -> Option<Vec<f64>> {
        Some(HapaxModel::relative_spectrum(self, u, kmax))
    }
}

impl VocabularySize for HapaxModel {
    fn vocab(&self, n: f64) -> f64 {
        self.vocab_size(n)
    }

    fn spectrum(&self, n: f64, k: u64) -> f64 {
        HapaxModel::spectrum(self, n, k)
    }

    fn rank(&self, n: f64, f: u64) -> f64 {
        HapaxModel::rank(self, n, f)
    }
}

/// Mixture of the maximal model (weight `lambda`) with a Davis model at
/// offset `alpha`, whose hapax rate is U-shaped for small `lambda`.
pub fn u_shaped_mixture(alpha: f64, lambda: f64) -> Result<HapaxModel> {
    HapaxModel::mixture(HapaxModel::maximal(), HapaxModel::davis(alpha)?, lambda)
}

/// Unshifted Davis rank `g(n||f)` by the series `Σ_j (1-1/n)^j/(j+f)`;
/// requires `n > 1/2`. Slow for large `n` but accurate.
pub fn davis_rank_series(n: f64, f: u64) -> Result<f64> {
    if !(n > 0.5) || f == 0 {
        return Err(argument("series form needs n > 1/2 and f >= 1"));
    }
    Ok(davis::rank_series(n, f))
}

/// Unshifted Davis rank by the `O(f)` recursion
/// `g(n||f+1) = (g(n||f) - 1/f) / (1 - 1/n)`.
pub fn davis_rank_recursion(n: f64, f: u64) -> Result<f64> {
    if !(n > 0.0) || f == 0 {
        return Err(argument("recursion needs n > 0 and f >= 1"));
    }
    Ok(davis::rank_recursion(n, f))
}

/// `e^{f/n} Γ(0, f/n)`, the large-`n` approximation of the unshifted Davis
/// rank function.
pub fn davis_rank_gamma_check(n: f64, f: u64) -> Result<f64> {
    if !(n > 0.0) || f == 0 {
        return Err(argument("incomplete gamma check needs n > 0 and f >= 1"));
    }
    Ok(davis::rank_gamma_approximation(n, f))
}

/// Unshifted Davis spectrum assembled from closed-form derivatives of
/// `n ln n` and `1/(n-1)`. Accurate only while `(n/(n-1))^k` is moderate.
pub fn davis_spectrum_closed_form(n: f64, k: u64) -> f64 {
    davis::spectrum_closed_form(n, k)
}

#[cfg(test)]
mod tests;
