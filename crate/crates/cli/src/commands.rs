//! Subcommand implementations.

use std::path::Path;
use std::thread;

use hapax::analytic::smoothed_curve;
use hapax::corpus::{incremental_curves, log_grid, rank_table, FrequencySpectrum};
use hapax::error::{Error, Result};
use hapax::fitting::{
    compare_families, fit_record, goodness_table, parameter_table, target_grid, FitConfig, TextFits, FIT_RECORD_HEADER,
};
use hapax::format::fmt_sig;
use hapax::models::{ideal_zipf_summary, u_shaped_mixture, Family, HapaxModel, IdealInput, TOKEN_COUNT_NOTE};
use hapax::urnmodel::{memoryless_expectations, replica_rng, MemorylessSampler, TypeDistribution, UrnSampler, UrnSpec};

use crate::input::{load, stem, Loaded};
use crate::output::{extension, write_atomic, Format, Table};
use crate::{FitArgs, InputArgs, SimulateArgs};

fn load_args(input: &InputArgs) -> Result<Loaded> {
    load(&input.input, input.input_kind, input.encoding)
}

fn spectrum_table(s: &FrequencySpectrum) -> Table {
    let mut t = Table::new(["k", "v_k"]);
    for (k, vk) in s.iter() {
        t.push(vec![k.to_string(), vk.to_string()]);
    }
    t
}

pub fn spectrum(input: &InputArgs, output_dir: Option<&Path>, format: Format) -> Result<()> {
    let loaded = load_args(input)?;
    let s = &loaded.spectrum;
    let summary = format!("tokens={} types={} hapaxes={}", s.tokens(), s.types(), s.hapaxes());
    let rendered = spectrum_table(s).render(format);
    match output_dir {
        Some(dir) => {
            let base = stem(&loaded.name);
            write_atomic(&dir.join(format!("{base}.spectrum.{}", extension(format))), &rendered)?;
            if let (Some(freqs), true) = (&loaded.frequencies, loaded.tokens.is_some()) {
                write_atomic(&dir.join(format!("{base}.freq.tsv")), &freqs.to_tsv())?;
            }
            println!("{summary}");
        }
        None => {
            print!("{rendered}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

pub fn urn(input: &InputArgs, n: u64, kmax: u64, fmax: u64, format: Format, precision: usize) -> Result<()> {
    let loaded = load_args(input)?;
    let urn = UrnSpec::new(loaded.spectrum)?;
    if n > urn.total() {
        return Err(Error::Argument(format!("sample size {n} exceeds the urn size {}", urn.total())));
    }
    let report = urn.report(n, kmax, fmax)?;
    let mut t = Table::new(report.csv_header().split(',').map(String::from).collect::<Vec<_>>());
    t.push(report.csv_row(precision).split(',').map(String::from).collect());
    print!("{}", t.render(format));
    Ok(())
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn simulate(args: &SimulateArgs, format: Format, precision: usize) -> Result<()> {
    let mut samples: Vec<(u64, u64)> = Vec::with_capacity(args.replicas as usize);
    let expected = if let Some(probs) = &args.dist {
        let dist = TypeDistribution::new(probs.clone())?;
        let mut sampler = MemorylessSampler::new(&dist)?;
        for r in 0..args.replicas {
            let s = sampler.draw(args.n, &mut replica_rng(args.seed, r))?;
            samples.push((s.types(), s.hapaxes()));
        }
        let e = memoryless_expectations(&dist, args.n, 1, 1, false)?;
        (e.expected_types, e.expected_spectrum[0])
    } else {
        let path = args.input.as_ref().expect("clap requires an input or a distribution");
        let loaded = load(path, args.input_kind, args.encoding)?;
        if args.memoryless {
            let dist = TypeDistribution::from_spectrum(&loaded.spectrum)?;
            let mut sampler = MemorylessSampler::new(&dist)?;
            for r in 0..args.replicas {
                let s = sampler.draw(args.n, &mut replica_rng(args.seed, r))?;
                samples.push((s.types(), s.hapaxes()));
            }
            let e = memoryless_expectations(&dist, args.n, 1, 1, false)?;
            (e.expected_types, e.expected_spectrum[0])
        } else {
            let urn = UrnSpec::new(loaded.spectrum)?;
            if args.n > urn.total() {
                return Err(Error::Argument(format!("sample size {} exceeds the urn size {}", args.n, urn.total())));
            }
            let mut sampler = UrnSampler::new(&urn);
            for r in 0..args.replicas {
                let s = sampler.draw(args.n, &mut replica_rng(args.seed, r))?;
                samples.push((s.types(), s.hapaxes()));
            }
            (urn.expected_types(args.n)?, urn.expected_spectrum(args.n, 1)?)
        }
    };
    let mut t = Table::new(["replica", "V", "V_1"]);
    for (r, (v, v1)) in samples.iter().enumerate() {
        t.push(vec![r.to_string(), v.to_string(), v1.to_string()]);
    }
    let vs: Vec<f64> = samples.iter().map(|s| s.0 as f64).collect();
    let v1s: Vec<f64> = samples.iter().map(|s| s.1 as f64).collect();
    let (mv, sv) = mean_and_se(&vs);
    let (m1, s1) = mean_and_se(&v1s);
    let f = |x: f64| fmt_sig(x, precision);
    t.push(vec!["mean".into(), f(mv), f(m1)]);
    t.push(vec!["se".into(), f(sv), f(s1)]);
    t.push(vec!["expected".into(), f(expected.0), f(expected.1)]);
    print!("{}", t.render(format));
    Ok(())
}

pub fn smooth(input: &InputArgs, per_decade: usize, format: Format, precision: usize) -> Result<()> {
    if per_decade == 0 {
        return Err(Error::Argument("grid needs at least one point per decade".into()));
    }
    let loaded = load_args(input)?;
    let n_star = loaded.spectrum.tokens() as f64;
    if n_star == 0.0 {
        return Err(Error::Argument("cannot smooth an empty spectrum".into()));
    }
    let points = smoothed_curve(&loaded.spectrum, &target_grid(n_star, 1.0, per_decade))?;
    let mut t = Table::new(["n", "g_n", "g_n_1", "hapax_rate"]);
    let f = |x: f64| fmt_sig(x, precision);
    for p in points {
        t.push(vec![f(p.n), f(p.types), f(p.hapaxes), f(p.hapax_rate())]);
    }
    print!("{}", t.render(format));
    Ok(())
}

pub fn mixture_demo(
    alpha: f64,
    lambda: f64,
    (u_min, u_max): (f64, f64),
    steps: usize,
    format: Format,
    precision: usize,
) -> Result<()> {
    if steps < 2 || !(u_min.is_finite() && u_max.is_finite() && u_max > u_min) {
        return Err(Error::Argument("need at least 2 steps over a nonempty u range".into()));
    }
    let mixture = u_shaped_mixture(alpha, lambda)?;
    let davis = HapaxModel::davis(alpha)?;
    let mut t = Table::new(["u", "hapax_rate", "davis_hapax_rate"]);
    let f = |x: f64| fmt_sig(x, precision);
    for i in 0..steps {
        let u = u_min + (u_max - u_min) * i as f64 / (steps - 1) as f64;
        t.push(vec![f(u), f(mixture.hapax_rate(u)), f(davis.hapax_rate(u))]);
    }
    print!("{}", t.render(format));
    Ok(())
}

pub fn ideal(types: Option<f64>, peak_share: Option<f64>, format: Format, precision: usize) -> Result<()> {
    let input = match (types, peak_share) {
        (Some(v), None) => IdealInput::Types(v),
        (None, Some(p)) => IdealInput::PeakShare(p),
        _ => return Err(Error::Argument("give exactly one of --types and --peak-share".into())),
    };
    let s = ideal_zipf_summary(input)?;
    let f = |x: f64| fmt_sig(x, precision);
    let mut t = Table::new(["quantity", "value"]);
    t.push(vec!["types".into(), f(s.types)]);
    t.push(vec!["tokens".into(), f(s.tokens)]);
    t.push(vec!["peak_share".into(), f(s.peak_share)]);
    t.push(vec!["euler_gamma".into(), fmt_sig(s.euler_gamma, precision.max(12))]);
    t.push(vec!["crossover".into(), f(s.crossover)]);
    for k in 1..=5 {
        t.push(vec![format!("lotka_{k}"), f(s.lotka(k))]);
    }
    print!("{}", t.render(format));
    eprintln!("note: {TOKEN_COUNT_NOTE}");
    Ok(())
}

fn parse_families(names: &[String]) -> Result<Vec<Family>> {
    let mut out = Vec::new();
    for name in names.iter().filter(|s| !s.trim().is_empty()) {
        let family: Family = name.parse()?;
        if !Family::FITTED.contains(&family) {
            return Err(Error::Argument(format!("family {family} cannot be fitted")));
        }
        if !out.contains(&family) {
            out.push(family);
        }
    }
    if out.is_empty() {
        return Err(Error::Argument("no families selected".into()));
    }
    Ok(out)
}

/// Ranks at which rank curves are emitted: every `f` up to 100, then about
/// 50 log-spaced values per decade up to `fmax`.
fn rank_points(fmax: u64) -> Vec<u64> {
    let mut fs: Vec<u64> = (1..=fmax.min(100)).collect();
    fs.extend(log_grid(fmax, 50).into_iter().filter(|&f| f > 100));
    fs
}

fn plot_data(loaded: &Loaded, text: &TextFits, per_decade: usize, precision: usize) -> Result<[Table; 3]> {
    let f = |x: f64| fmt_sig(x, precision);
    let fitted: Vec<(Family, &HapaxModel)> =
        text.fits.iter().filter_map(|ff| ff.result.as_ref().ok().map(|r| (ff.family, &r.model))).collect();
    let n_star = loaded.spectrum.tokens();
    let grid = log_grid(n_star, per_decade as u32);
    let grid_f: Vec<f64> = grid.iter().map(|&n| n as f64).collect();
    let smoothed = smoothed_curve(&loaded.spectrum, &grid_f)?;
    let incremental = match &loaded.tokens {
        Some(tokens) => Some(incremental_curves(tokens, &grid)?),
        None => None,
    };
    let na = || "NA".to_string();

    let mut hapax = Table::new(
        ["n", "smoothed", "incremental"]
            .into_iter()
            .map(String::from)
            .chain(fitted.iter().map(|(fam, _)| fam.to_string()))
            .collect::<Vec<_>>(),
    );
    let mut vocab = Table::new(hapax.header.clone());
    for (i, p) in smoothed.iter().enumerate() {
        let u = p.n.ln();
        let mut hrow = vec![f(p.n), f(p.hapax_rate())];
        let mut grow = vec![f(p.n), f(p.types)];
        match &incremental {
            Some(c) => {
                hrow.push(f(c.hapax_rates[i]));
                grow.push(c.type_counts[i].to_string());
            }
            None => {
                hrow.push(na());
                grow.push(na());
            }
        }
        for (_, m) in &fitted {
            hrow.push(f(m.hapax_rate(u)));
            grow.push(f(m.vocab_size(p.n)));
        }
        hapax.push(hrow);
        vocab.push(grow);
    }

    let ranks = rank_table(&loaded.spectrum);
    let fs = rank_points(loaded.spectrum.max_frequency());
    let curves: Vec<Vec<f64>> = fitted.iter().map(|(_, m)| m.rank_curve(n_star as f64, &fs)).collect();
    let mut rank = Table::new(
        ["f", "empirical"]
            .into_iter()
            .map(String::from)
            .chain(fitted.iter().map(|(fam, _)| fam.to_string()))
            .collect::<Vec<_>>(),
    );
    for (i, &fr) in fs.iter().enumerate() {
        let mut row = vec![fr.to_string(), ranks.get(fr).to_string()];
        row.extend(curves.iter().map(|c| f(c[i])));
        rank.push(row);
    }
    Ok([hapax, vocab, rank])
}

pub fn fit(args: &FitArgs, format: Format, precision: usize) -> Result<()> {
    let families = parse_families(&args.families)?;
    let cfg = FitConfig {
        grid_per_decade: args.grid_per_decade,
        n_min: args.n_min,
        max_iterations: args.max_iterations,
        ..FitConfig::default()
    };
    cfg.validate()?;
    let loaded: Vec<Loaded> =
        args.input.iter().map(|p| load(p, args.input_kind, args.encoding)).collect::<Result<_>>()?;
    // texts are independent: fit them concurrently
    let fitted: Vec<Result<Vec<_>>> = thread::scope(|scope| {
        let handles: Vec<_> =
            loaded.iter().map(|l| scope.spawn(|| compare_families(&l.spectrum, &families, &cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("fit worker panicked")).collect()
    });
    let mut texts = Vec::with_capacity(loaded.len());
    for (l, fits) in loaded.iter().zip(fitted) {
        texts.push(TextFits { file: l.name.clone(), tokens: l.spectrum.tokens(), fits: fits? });
    }

    let mut any_converged = false;
    for t in &texts {
        for ff in &t.fits {
            match &ff.result {
                Ok(r) => any_converged |= r.converged,
                Err(e) => eprintln!("hapax: {}: {} fit failed: {e}", t.file, ff.family),
            }
        }
    }

    match format {
        Format::Table => {
            print!("{}", parameter_table(&texts, precision));
            println!();
            print!("{}", goodness_table(&texts, precision));
        }
        Format::Tsv | Format::Csv => {
            let sep = if format == Format::Tsv { "\t" } else { "," };
            println!("{}", FIT_RECORD_HEADER.replace('\t', sep));
            for t in &texts {
                for ff in &t.fits {
                    let line = match &ff.result {
                        Ok(r) => fit_record(&t.file, r, precision),
                        Err(_) => format!("{}\t{}\tNA\tNA\tNA\tNA\tfalse\t0", t.file, ff.family),
                    };
                    println!("{}", line.replace('\t', sep));
                }
            }
        }
    }

    if let Some(dir) = &args.output_dir {
        let plot_format = if format == Format::Tsv { Format::Tsv } else { Format::Csv };
        for (l, t) in loaded.iter().zip(&texts) {
            let [hapax, vocab, rank] = plot_data(l, t, args.grid_per_decade, precision)?;
            let base = stem(&l.name);
            let ext = extension(plot_format);
            write_atomic(&dir.join(format!("{base}.hapax.{ext}")), &hapax.render(plot_format))?;
            write_atomic(&dir.join(format!("{base}.vocab.{ext}")), &vocab.render(plot_format))?;
            write_atomic(&dir.join(format!("{base}.rank.{ext}")), &rank.render(plot_format))?;
        }
    }

    if any_converged {
        Ok(())
    } else {
        Err(Error::NumericPrecision("no family converged".into()))
    }
}
