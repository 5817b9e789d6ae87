//! Least-squares fits of hapax-rate models to smoothed vocabulary curves.
//!
//! The target is the smoothed vocabulary size of a text sampled on a
//! logarithmic grid of lengths up to the full text. Every family is fitted
//! with unit weights, and goodness of fit is `sqrt(WSSR/ndf)` with `ndf` the
//! number of grid points minus the number of free parameters.

mod optimize;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::analytic::smooth_types;
use crate::corpus::FrequencySpectrum;
use crate::error::{argument, Error, Result};
use crate::format::fmt_sig;
use crate::models::{Family, HapaxModel};
use optimize::{levenberg_marquardt, nelder_mead, LmFailure, Minimum, Problem};

/// Closed intervals for the model parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParameterBounds {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub gamma: (f64, f64),
}

impl Default for ParameterBounds {
    fn default() -> Self {
        Self { alpha: (-5.0, 30.0), beta: (0.0, 0.999), gamma: (1e-4, 10.0) }
    }
}

impl ParameterBounds {
    fn of(&self, name: &str) -> (f64, f64) {
        match name {
            "alpha" => self.alpha,
            "beta" => self.beta,
            "gamma" => self.gamma,
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitConfig {
    pub grid_per_decade: usize,
    /// Shortest text length on the grid.
    pub n_min: f64,
    pub max_iterations: usize,
    /// Relative WSSR change below which an accepted step ends the search.
    pub convergence_tol: f64,
    /// Starting points replacing the built-in multi-start list.
    pub initial: BTreeMap<Family, Vec<f64>>,
    /// Parameters held fixed, by family and name.
    pub fixed: BTreeMap<(Family, String), f64>,
    pub bounds: ParameterBounds,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            grid_per_decade: 50,
            n_min: 1.0,
            max_iterations: 200,
            convergence_tol: 1e-10,
            initial: BTreeMap::new(),
            fixed: BTreeMap::new(),
            bounds: ParameterBounds::default(),
        }
    }
}

impl FitConfig {
    /// Holds `name` of `family` at `value` during fitting.
    pub fn fix(mut self, family: Family, name: &str, value: f64) -> Self {
        self.fixed.insert((family, name.to_string()), value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_per_decade < 5 {
            return Err(argument(format!("grid needs at least 5 points per decade, got {}", self.grid_per_decade)));
        }
        if !(self.n_min > 0.0 && self.n_min.is_finite()) {
            return Err(argument(format!("smallest grid length must be positive, got {}", self.n_min)));
        }
        if self.max_iterations == 0 || !(self.convergence_tol > 0.0) {
            return Err(argument("iteration budget and tolerance must be positive"));
        }
        let b = &self.bounds;
        let ordered = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !ordered(b.alpha) || !ordered(b.beta) || !ordered(b.gamma) {
            return Err(argument("parameter bounds must be finite ordered intervals"));
        }
        if b.beta.0 < 0.0 || b.beta.1 >= 1.0 || b.gamma.0 <= 0.0 {
            return Err(argument("bounds must keep beta in [0, 1) and gamma positive"));
        }
        for ((family, name), value) in &self.fixed {
            if !family.parameter_names().contains(&name.as_str()) {
                return Err(argument(format!("{family} has no parameter {name}")));
            }
            if !value.is_finite() {
                return Err(argument(format!("fixed {name} must be finite")));
            }
        }
        Ok(())
    }
}

/// One target point: text length and smoothed vocabulary size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetPoint {
    pub n: f64,
    pub types: f64,
}

/// Log-spaced lengths from `n_min` up to and including `n_star`.
pub fn target_grid(n_star: f64, n_min: f64, per_decade: usize) -> Vec<f64> {
    let mut grid = Vec::new();
    if !(n_star >= n_min) {
        return vec![n_star];
    }
    let mut i = 0;
    loop {
        let n = n_min * 10f64.powf(i as f64 / per_decade as f64);
        if n >= n_star * (1.0 - 1e-12) {
            break;
        }
        grid.push(n);
        i += 1;
    }
    grid.push(n_star);
    grid
}

/// Smoothed vocabulary curve of `base` on the configured grid.
pub fn build_target(base: &FrequencySpectrum, cfg: &FitConfig) -> Result<Vec<TargetPoint>> {
    cfg.validate()?;
    if base.tokens() == 0 {
        return Err(argument("cannot build a target from an empty spectrum"));
    }
    let n_star = base.tokens() as f64;
    target_grid(n_star, cfg.n_min, cfg.grid_per_decade)
        .into_iter()
        .map(|n| Ok(TargetPoint { n, types: smooth_types(base, n)? }))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub model: HapaxModel,
    pub wssr: f64,
    pub ndf: usize,
    pub rms: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn family(&self) -> Family {
        self.model.family()
    }
}

/// `sqrt(WSSR/ndf)`.
pub fn goodness(result: &FitResult) -> f64 {
    result.rms
}

/// Built-in starting points: the first is the documented default, the rest
/// cover other basins seen on real texts.
fn default_starts(family: Family, ln_n: f64) -> Vec<Vec<f64>> {
    match family {
        Family::Constant => vec![vec![0.8], vec![0.5], vec![0.2]],
        Family::Davis => vec![vec![ln_n], vec![ln_n - 3.0], vec![ln_n + 3.0], vec![0.5 * ln_n]],
        Family::Linear => vec![vec![ln_n, 0.05], vec![2.0, 0.05], vec![0.5 * ln_n, 0.1], vec![0.0, 0.03]],
        Family::Logistic => vec![
            vec![ln_n, 0.8, 0.3],
            vec![ln_n - 1.0, 0.1, 0.3],
            vec![ln_n - 2.0, 0.0, 0.3],
            vec![0.5 * ln_n, 0.5, 0.5],
        ],
        Family::Maximal | Family::Mixture => vec![vec![]],
    }
}

/// Fits `family` to `target` by least squares.
///
/// Levenberg-Marquardt runs from each starting point; when its normal
/// equations are ill-conditioned, and always for the non-analytic linear
/// family, a simplex search takes over and Levenberg-Marquardt polishes its
/// result. The best local minimum wins.
pub fn fit_model(family: Family, target: &[TargetPoint], cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    if family == Family::Mixture {
        return Err(argument("mixtures are not fitted"));
    }
    if target.iter().any(|p| !(p.n > 0.0 && p.n.is_finite() && p.types.is_finite())) {
        return Err(argument("target points need positive finite lengths and finite sizes"));
    }
    let names = family.parameter_names();
    let free: Vec<usize> =
        (0..names.len()).filter(|&i| !cfg.fixed.contains_key(&(family, names[i].to_string()))).collect();
    if target.len() <= free.len() {
        return Err(argument(format!(
            "{} target points cannot determine {} free parameters",
            target.len(),
            free.len()
        )));
    }
    let (lo, hi) = target.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.types), b.max(p.types)));
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Err(Error::DegenerateFit(format!("target is constant at {lo}")));
    }

    let ln_n = target.iter().map(|p| p.n).fold(0.0, f64::max).ln();
    let starts = match cfg.initial.get(&family) {
        Some(p) if p.len() == names.len() => vec![p.clone()],
        Some(p) => {
            return Err(argument(format!("{family} takes {} initial values, got {}", names.len(), p.len())));
        }
        None => default_starts(family, ln_n),
    };
    let full = |start: &[f64], x: &[f64]| -> Vec<f64> {
        let mut p = start.to_vec();
        for (slot, &i) in free.iter().enumerate() {
            p[i] = x[slot];
        }
        for (i, name) in names.iter().enumerate() {
            if let Some(&v) = cfg.fixed.get(&(family, name.to_string())) {
                p[i] = v;
            }
        }
        p
    };
    let template = starts[0].clone();
    let residuals = |x: &[f64]| -> Option<Vec<f64>> {
        let model = HapaxModel::from_parameters(family, &full(&template, x)).ok()?;
        let r: Vec<f64> = target.iter().map(|p| model.vocab_size(p.n) - p.types).collect();
        r.iter().all(|v| v.is_finite()).then_some(r)
    };
    let problem = Problem {
        residuals: &residuals,
        lower: free.iter().map(|&i| cfg.bounds.of(names[i]).0).collect(),
        upper: free.iter().map(|&i| cfg.bounds.of(names[i]).1).collect(),
        max_iterations: cfg.max_iterations,
        tol: cfg.convergence_tol,
    };
    let simplex_budget = 20 * cfg.max_iterations;

    let mut best: Option<Minimum> = None;
    for start in &starts {
        let x0: Vec<f64> = free.iter().map(|&i| start[i]).collect();
        let local = if free.is_empty() {
            Minimum { wssr: problem_wssr(&residuals, &x0), params: x0, iterations: 0, converged: true }
        } else if family == Family::Linear {
            polish(&problem, nelder_mead(&problem, &x0, simplex_budget))
        } else {
            match levenberg_marquardt(&problem, &x0) {
                Ok(m) => m,
                Err(LmFailure::IllConditioned(m)) => polish(&problem, nelder_mead(&problem, &m.params, simplex_budget)),
            }
        };
        if best.as_ref().is_none_or(|b| local.wssr < b.wssr) {
            best = Some(local);
        }
    }
    let best = best.expect("at least one start");
    if !best.wssr.is_finite() {
        return Err(Error::NumericPrecision(format!("{family} model could not be evaluated on the target")));
    }
    let model = HapaxModel::from_parameters(family, &full(&template, &best.params))?;
    let ndf = target.len() - free.len();
    Ok(FitResult {
        model,
        wssr: best.wssr,
        ndf,
        rms: (best.wssr / ndf as f64).sqrt(),
        iterations: best.iterations,
        converged: best.converged,
    })
}

fn problem_wssr(residuals: &dyn Fn(&[f64]) -> Option<Vec<f64>>, x: &[f64]) -> f64 {
    residuals(x).map_or(f64::INFINITY, |r| r.iter().map(|v| v * v).sum())
}

/// Runs Levenberg-Marquardt from a simplex result and keeps whichever is
/// better; the simplex's convergence flag stands if polishing fails.
fn polish(problem: &Problem, simplex: Minimum) -> Minimum {
    match levenberg_marquardt(problem, &simplex.params) {
        Ok(m) if m.wssr <= simplex.wssr => {
            Minimum { iterations: simplex.iterations + m.iterations, converged: m.converged || simplex.converged, ..m }
        }
        _ => simplex,
    }
}

/// The fit of one family within a comparison.
#[derive(Debug)]
pub struct FamilyFit {
    pub family: Family,
    pub result: Result<FitResult>,
}

/// Fits every family in `families` to the smoothed curve of `base`. The
/// successful fits come first, ordered by increasing rms, followed by the
/// failures.
pub fn compare_families(base: &FrequencySpectrum, families: &[Family], cfg: &FitConfig) -> Result<Vec<FamilyFit>> {
    let target = build_target(base, cfg)?;
    let mut fits: Vec<FamilyFit> =
        families.iter().map(|&family| FamilyFit { family, result: fit_model(family, &target, cfg) }).collect();
    fits.sort_by(|a, b| match (&a.result, &b.result) {
        (Ok(x), Ok(y)) => x.rms.total_cmp(&y.rms),
        (Ok(_), Err(_)) => std::cmp::Ordering::Less,
        (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
        (Err(_), Err(_)) => a.family.cmp(&b.family),
    });
    Ok(fits)
}

/// Header of [`fit_record`] lines.
pub const FIT_RECORD_HEADER: &str = "file\tfamily\talpha\tbeta\tgamma\trms\tconverged\titerations";

/// Tab-separated record `file family alpha beta gamma rms converged
/// iterations`; parameters a family lacks are written as `NA`.
pub fn fit_record(file: &str, result: &FitResult, precision: usize) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| fmt_sig(x, precision));
    let m = &result.model;
    format!(
        "{file}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        m.family(),
        opt(m.alpha()),
        opt(m.beta()),
        opt(m.gamma()),
        fmt_sig(result.rms, precision),
        result.converged,
        result.iterations
    )
}

/// Fits of one text for the summary tables.
#[derive(Debug)]
pub struct TextFits {
    pub file: String,
    pub tokens: u64,
    pub fits: Vec<FamilyFit>,
}

impl TextFits {
    pub fn get(&self, family: Family) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.family == family).and_then(|f| f.result.as_ref().ok())
    }

    /// Family with the smallest rms among the successful fits.
    pub fn best(&self) -> Option<Family> {
        self.fits
            .iter()
            .filter_map(|f| f.result.as_ref().ok())
            .min_by(|a, b| a.rms.total_cmp(&b.rms))
            .map(FitResult::family)
    }
}

fn pad_table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

type ParameterColumn = (Family, fn(&HapaxModel) -> Option<f64>);

/// Fitted parameters per text: constant beta, Davis alpha, logistic
/// gamma/beta/alpha, linear gamma/alpha, and the text length, with a mean
/// row.
pub fn parameter_table(texts: &[TextFits], precision: usize) -> String {
    let columns: [ParameterColumn; 7] = [
        (Family::Constant, HapaxModel::beta),
        (Family::Davis, HapaxModel::alpha),
        (Family::Logistic, HapaxModel::gamma),
        (Family::Logistic, HapaxModel::beta),
        (Family::Logistic, HapaxModel::alpha),
        (Family::Linear, HapaxModel::gamma),
        (Family::Linear, HapaxModel::alpha),
    ];
    let mut rows = vec![
        ["file", "constant", "davis", "logistic", "", "", "linear", "", "length"].map(String::from).to_vec(),
        ["", "beta", "alpha", "gamma", "beta", "alpha", "gamma", "alpha", "n"].map(String::from).to_vec(),
    ];
    let mut sums = [(0.0, 0usize); 8];
    for t in texts {
        let mut row = vec![t.file.clone()];
        for (c, (family, get)) in columns.iter().enumerate() {
            match t.get(*family).and_then(|r| get(&r.model)) {
                Some(v) => {
                    sums[c].0 += v;
                    sums[c].1 += 1;
                    row.push(fmt_sig(v, precision));
                }
                None => row.push("NA".into()),
            }
        }
        sums[7].0 += t.tokens as f64;
        sums[7].1 += 1;
        row.push(t.tokens.to_string());
        rows.push(row);
    }
    if !texts.is_empty() {
        let mut row = vec!["mean".to_string()];
        row.extend(sums.iter().map(|&(s, k)| if k > 0 { fmt_sig(s / k as f64, precision) } else { "NA".into() }));
        rows.push(row);
    }
    pad_table(&rows)
}

/// Goodness of fit per text and family, the best family marked with `*`,
/// with a mean row.
pub fn goodness_table(texts: &[TextFits], precision: usize) -> String {
    let families = [Family::Constant, Family::Davis, Family::Logistic, Family::Linear];
    let mut rows = vec![std::iter::once("file".to_string()).chain(families.iter().map(|f| f.to_string())).collect()];
    let mut sums = [(0.0, 0usize); 4];
    for t in texts {
        let best = t.best();
        let mut row = vec![t.file.clone()];
        for (c, &family) in families.iter().enumerate() {
            match t.get(family) {
                Some(r) => {
                    sums[c].0 += r.rms;
                    sums[c].1 += 1;
                    let mark = if best == Some(family) { "*" } else { "" };
                    row.push(format!("{}{mark}", fmt_sig(r.rms, precision)));
                }
                None => row.push("NA".into()),
            }
        }
        rows.push(row);
    }
    if !texts.is_empty() {
        let mut row = vec!["mean".to_string()];
        row.extend(sums.iter().map(|&(s, k)| if k > 0 { fmt_sig(s / k as f64, precision) } else { "NA".into() }));
        rows.push(row);
    }
    pad_table(&rows)
}
