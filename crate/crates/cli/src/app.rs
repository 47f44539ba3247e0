//! Command-line definitions and subcommand drivers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use amar_core::amvar::{amvar_fit_given_scales, amvar_rolling_predictions, union_scale_selection};
use amar_core::estimate::{amar_fit, best_two_scale, FitReport};
use amar_core::evalbench::{preset, run_benchmark, BenchConfig, PresetModel, DEFAULT_TEST_LENGTH};
use amar_core::forecast::{mspe, rolling_predictions, sign_agreement};
use amar_core::model::{
    ar_to_amar, check_roots, is_stationary_sufficient, AmarModel, ArModel, Innovation,
    InnovationSpec, ScaleModel,
};
use amar_core::simulate::{default_burn_in, simulate_ar};

use crate::config::{self, Config, FitFlags};
use crate::exit::Failure;
use crate::ingest::{ingest_csv, ingest_csv_multi, ColumnRef, Series, Transform};
use crate::plotdata::{self, DEFAULT_SPECTRAL_POINTS};

/// Adaptive multiscale autoregression toolkit.
#[derive(Debug, Parser)]
#[command(name = "amar", version)]
pub struct Cli {
    /// Configuration file (defaults to ./amar.toml when present).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a path from a preset or a model file.
    Simulate(SimulateArgs),
    /// Fit an AMAR model to a CSV column.
    Fit(FitArgs),
    /// One-step-ahead forecast evaluation on a chronological split.
    Forecast(ForecastArgs),
    /// Fit a multivariate AMAR model.
    AmvarFit(AmvarArgs),
    /// Monte Carlo benchmark over presets.
    Bench(BenchArgs),
    /// Emit plotting data as CSV.
    Plotdata(PlotArgs),
    /// Stationarity checks for a model.
    Stationarity(StationarityArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Input CSV file with a header line.
    #[arg(long)]
    pub data: PathBuf,
    /// Column name or 0-based index.
    #[arg(long, default_value = "x")]
    pub column: String,
    /// Take first differences.
    #[arg(long)]
    pub difference: bool,
    /// Subtract the sample mean (after differencing).
    #[arg(long)]
    pub demean: bool,
}

impl DataArgs {
    fn transform(&self) -> Transform {
        Transform {
            difference: self.difference,
            demean: self.demean,
        }
    }

    fn load(&self) -> Result<Series> {
        Ok(ingest_csv(
            &self.data,
            &ColumnRef(self.column.clone()),
            self.transform(),
        )?)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct FitFlagArgs {
    /// AR order: `auto` or an integer.
    #[arg(long)]
    pub p: Option<String>,
    /// Threshold: `auto` or a positive number.
    #[arg(long)]
    pub zeta: Option<String>,
    /// Maximum number of timescales.
    #[arg(long)]
    pub qmax: Option<usize>,
    /// Interval family: `auto`, `all` or `random:M`.
    #[arg(long)]
    pub intervals: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl FitFlagArgs {
    fn flags(&self) -> FitFlags {
        FitFlags {
            p: self.p.clone(),
            zeta: self.zeta.clone(),
            qmax: self.qmax,
            intervals: self.intervals.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Preset name (M1..M9, primed variants) or a model JSON file.
    #[arg(long)]
    pub model: String,
    /// Number of observations.
    #[arg(long = "T")]
    pub t: usize,
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// `gaussian`, `gaussian:SIGMA`, `pareto:INDEX` or `cauchy`.
    #[arg(long)]
    pub innovation: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub allow_nonstationary: bool,
    /// Write CSV with header `t,x` instead of one value per line.
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub fit: FitFlagArgs,
    /// Write the fit report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Model JSON (fit report, AMAR or AR model), or `auto` / `two-scale`
    /// to fit on the training segment.
    #[arg(long)]
    pub model: String,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub fit: FitFlagArgs,
    /// Share of observations, taken from the end, used for testing.
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Short scale of the two-scale search.
    #[arg(long, default_value_t = 1)]
    pub short: usize,
    /// Largest long scale of the two-scale search.
    #[arg(long, default_value_t = 251)]
    pub long_max: usize,
    /// Evaluate on the original scale of the column.
    #[arg(long)]
    pub levels: bool,
    /// Write `t,actual,predicted` rows.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AmvarArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated component columns; all but `t` when omitted.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// `auto` for the union of univariate scale sets, or a list such as `1,10,11`.
    #[arg(long, default_value = "auto")]
    pub scales: String,
    #[arg(long)]
    pub difference: bool,
    #[arg(long)]
    pub demean: bool,
    #[command(flatten)]
    pub fit: FitFlagArgs,
    /// When set, fit on the leading share and report per-component RMSPE.
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Coefficients as CSV `scale,equation,regressor,coefficient`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub models: Vec<String>,
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub ts: Vec<usize>,
    #[arg(long, default_value_t = amar_core::evalbench::DEFAULT_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_TEST_LENGTH)]
    pub test_len: usize,
    #[arg(long)]
    pub innovation: Option<String>,
    #[command(flatten)]
    pub fit: FitFlagArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Path,
    Coeffs,
    Spectral,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    /// Series source for `path` and `coeffs`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "x")]
    pub column: String,
    #[arg(long)]
    pub difference: bool,
    #[arg(long)]
    pub demean: bool,
    /// Model for `spectral`, or for `path` without `--data`.
    #[arg(long)]
    pub model: Option<String>,
    /// Length of a simulated path, and the sample size for growing presets.
    #[arg(long = "T")]
    pub t: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SPECTRAL_POINTS)]
    pub points: usize,
    #[command(flatten)]
    pub fit: FitFlagArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StationarityArgs {
    /// Preset name or model JSON file.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub scales: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Vec<f64>,
    /// Sample size for growing presets.
    #[arg(long = "T")]
    pub t: Option<usize>,
}

pub fn run(cli: Cli) -> Result<()> {
    let config = Config::load(cli.config.as_deref())?;
    configure_threads(&config)?;
    match cli.command {
        Command::Simulate(a) => simulate_cmd(a, &config),
        Command::Fit(a) => fit_cmd(a, &config),
        Command::Forecast(a) => forecast_cmd(a, &config),
        Command::AmvarFit(a) => amvar_cmd(a, &config),
        Command::Bench(a) => bench_cmd(a, &config),
        Command::Plotdata(a) => plot_cmd(a, &config),
        Command::Stationarity(a) => stationarity_cmd(a),
    }
}

/// `AMAR_THREADS` overrides the config's `threads`.
fn configure_threads(config: &Config) -> Result<()> {
    let from_env = match std::env::var("AMAR_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|n| *n >= 1)
                .ok_or_else(|| {
                    Failure::Usage(format!(
                        "AMAR_THREADS must be a positive integer, got '{v}'"
                    ))
                })?,
        ),
        Err(_) => None,
    };
    if let Some(n) = from_env.or(config.threads) {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn log_seed(seed: u64) {
    eprintln!("seed: {seed}");
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)?;
    Ok(())
}

pub fn parse_innovation(s: &str) -> Result<Innovation> {
    let bad = || Failure::Usage(format!("unknown innovation '{s}'"));
    let (kind, arg) = match s.split_once(':') {
        Some((k, a)) => (k, Some(a.parse::<f64>().map_err(|_| bad())?)),
        None => (s, None),
    };
    let innovation = match (kind, arg) {
        ("gaussian", None) => Innovation::default(),
        ("gaussian", Some(sigma)) => Innovation::Gaussian { sigma },
        ("pareto", Some(index)) => Innovation::pareto(index),
        ("cauchy", None) => Innovation::cauchy(),
        _ => bail!(bad()),
    };
    innovation
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(innovation)
}

/// A preset name or the path of a JSON file holding an AMAR model, a fit
/// report or dense AR coefficients.
pub fn load_model(spec: &str, t: Option<usize>) -> Result<PresetModel> {
    if amar_core::evalbench::PRESET_NAMES.contains(&spec) {
        return Ok(preset(spec, t)?);
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!(Failure::Usage(format!(
            "'{spec}' is neither a preset nor a file"
        )));
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))?;
    if value.get("alpha").is_some() {
        let report: FitReport = serde_json::from_value(value)?;
        return Ok(PresetModel::Amar(AmarModel::new(
            report.scales,
            report.alpha,
        )?));
    }
    if value.get("scales").is_some() {
        return Ok(PresetModel::Amar(serde_json::from_value(value)?));
    }
    Ok(PresetModel::Ar(serde_json::from_value(value)?))
}

/// Scale form used for prediction; a fit report may hold no scales.
fn load_scale_model(spec: &str) -> Result<ScaleModel> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))?;
        if value.get("alpha").is_some() {
            let report: FitReport = serde_json::from_value(value)?;
            return Ok(report.scale_model());
        }
    }
    Ok(load_model(spec, None)?.amar()?.scale_model())
}

fn simulate_cmd(a: SimulateArgs, config: &Config) -> Result<()> {
    let seed = config::resolve_seed(a.seed, config);
    log_seed(seed);
    let model = load_model(&a.model, Some(a.t))?;
    let innovation = match &a.innovation {
        Some(s) => parse_innovation(s)?,
        None => match &model {
            PresetModel::Amar(m) => m.innovation(),
            PresetModel::Ar(_) => Innovation::default(),
        },
    };
    let beta = model.beta();
    let burn_in = a.burn_in.unwrap_or_else(|| default_burn_in(beta.len()));
    let spec = InnovationSpec::new(innovation, seed)?;
    let sim = simulate_ar(&beta, &spec, a.t, burn_in, a.allow_nonstationary)?;
    let mut out = output(a.out.as_deref())?;
    if a.csv {
        let labels: Vec<String> = (1..=a.t).map(|i| i.to_string()).collect();
        plotdata::write_rows(&mut out, &plotdata::path_rows(&labels, &sim.path))?;
    } else {
        for v in &sim.path {
            writeln!(out, "{v}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn print_report(out: &mut dyn Write, report: &FitReport) -> Result<()> {
    writeln!(out, "timescales      {:?}", report.scales)?;
    writeln!(out, "alpha           {:?}", report.alpha)?;
    writeln!(out, "q_hat           {}", report.q_hat())?;
    writeln!(out, "chosen p        {}", report.chosen_p)?;
    writeln!(out, "chosen zeta     {:.6}", report.chosen_zeta)?;
    match report.sic() {
        Some(s) => writeln!(out, "SIC             {s:.4}")?,
        None => writeln!(out, "SIC             -")?,
    }
    writeln!(out, "residual var    {:.6}", report.residual_variance)?;
    writeln!(out, "lag  beta_hat     beta_constrained")?;
    for row in plotdata::coeff_rows(report) {
        let mark = if row.is_scale_boundary == 1 { " *" } else { "" };
        writeln!(
            out,
            "{:>3}  {:>11.6}  {:>11.6}{mark}",
            row.lag, row.beta_hat, row.beta_constrained
        )?;
    }
    Ok(())
}

fn fit_cmd(a: FitArgs, config: &Config) -> Result<()> {
    let opts = config::fit_options(&a.fit.flags(), config)?;
    log_seed(opts.seed);
    let series = a.data.load()?;
    let report = amar_fit(&series.values, &opts)?;
    let mut out = io::stdout().lock();
    print_report(&mut out, &report)?;
    if let Some(p) = &a.json {
        write_json(p, &report)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ForecastSummary {
    scales: Vec<usize>,
    alpha: Vec<f64>,
    train: usize,
    test: usize,
    mspe: f64,
    rmspe: f64,
    hit_rate: f64,
}

#[derive(Serialize)]
struct PredictionRow<'a> {
    t: &'a str,
    actual: f64,
    predicted: f64,
}

pub fn split_point(n: usize, test_fraction: f64) -> Result<usize> {
    let test = ((n as f64) * test_fraction).round().max(1.0) as usize;
    if test >= n {
        bail!(Failure::Data(format!(
            "{n} observations cannot be split with test fraction {test_fraction}"
        )));
    }
    Ok(n - test)
}

fn forecast_cmd(a: ForecastArgs, config: &Config) -> Result<()> {
    let fraction = config::resolve_test_fraction(a.test_fraction, config)?;
    let series = a.data.load()?;
    let x = &series.values;
    let cut = split_point(x.len(), fraction)?;
    let (train, test) = x.split_at(cut);
    let model = match a.model.as_str() {
        "auto" => {
            let opts = config::fit_options(&a.fit.flags(), config)?;
            log_seed(opts.seed);
            amar_fit(train, &opts)?.scale_model()
        }
        "two-scale" => {
            let hi = a.long_max.min(train.len() / 2);
            best_two_scale(train, a.short, a.short + 1..=hi)?.model
        }
        path => load_scale_model(path)?,
    };
    let mut pred = rolling_predictions(&model, test, train)?;
    let mut actual = test.to_vec();
    if a.levels {
        for (i, (p, v)) in pred.iter_mut().zip(actual.iter_mut()).enumerate() {
            *p = series.meta.to_level(cut + i, *p);
            *v = series.meta.to_level(cut + i, *v);
        }
    }
    let m = mspe(&pred, &actual);
    let summary = ForecastSummary {
        scales: model.scales.clone(),
        alpha: model.alpha.clone(),
        train: train.len(),
        test: test.len(),
        mspe: m,
        rmspe: m.sqrt(),
        hit_rate: sign_agreement(&pred, &actual),
    };
    let mut out = io::stdout().lock();
    writeln!(out, "timescales  {:?}", summary.scales)?;
    writeln!(out, "alpha       {:?}", summary.alpha)?;
    writeln!(out, "train/test  {}/{}", summary.train, summary.test)?;
    writeln!(out, "MSPE        {:.8}", summary.mspe)?;
    writeln!(out, "RMSPE       {:.8}", summary.rmspe)?;
    writeln!(out, "hit rate    {:.4}", summary.hit_rate)?;
    if let Some(path) = &a.emit {
        let rows: Vec<PredictionRow> = series.labels[cut..]
            .iter()
            .zip(actual.iter().zip(&pred))
            .map(|(t, (&actual, &predicted))| PredictionRow {
                t,
                actual,
                predicted,
            })
            .collect();
        plotdata::write_rows(output(Some(path))?, &rows)?;
    }
    if let Some(p) = &a.json {
        write_json(p, &summary)?;
    }
    Ok(())
}

pub fn parse_scale_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("invalid timescale '{v}'")).into())
        })
        .collect()
}

#[derive(Serialize)]
struct CoefficientRow<'a> {
    scale: usize,
    equation: &'a str,
    regressor: &'a str,
    coefficient: f64,
}

fn amvar_cmd(a: AmvarArgs, config: &Config) -> Result<()> {
    let columns: Vec<ColumnRef> = a.columns.iter().cloned().map(ColumnRef).collect();
    let transform = Transform {
        difference: a.difference,
        demean: a.demean,
    };
    let series = ingest_csv_multi(&a.data, &columns, transform)?;
    let names: Vec<String> = series.iter().map(|s| s.meta.column.clone()).collect();
    let x: Vec<Vec<f64>> = series.into_iter().map(|s| s.values).collect();
    let n = x[0].len();
    let cut = match a.test_fraction {
        Some(f) => split_point(n, config::resolve_test_fraction(Some(f), config)?)?,
        None => n,
    };
    let train: Vec<Vec<f64>> = x.iter().map(|c| c[..cut].to_vec()).collect();
    let scales = if a.scales == "auto" {
        let opts = config::fit_options(&a.fit.flags(), config)?;
        log_seed(opts.seed);
        union_scale_selection(&train, &opts)?
    } else {
        parse_scale_list(&a.scales)?
    };
    if scales.is_empty() {
        bail!(Failure::Data(
            "no timescales selected for any component".into()
        ));
    }
    let fit = amvar_fit_given_scales(&train, &scales)?;
    let mut out = io::stdout().lock();
    writeln!(out, "components  {names:?}")?;
    writeln!(out, "timescales  {scales:?}")?;
    for (k, tau) in scales.iter().enumerate() {
        writeln!(out, "scale {tau}:")?;
        for row in &fit.model.coeff_mats[k] {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>11.6}")).collect();
            writeln!(out, "  {}", cells.join(" "))?;
        }
    }
    if cut < n {
        let pred = amvar_rolling_predictions(&fit.model, &x, cut)?;
        for (name, (p, c)) in names.iter().zip(pred.iter().zip(&x)) {
            writeln!(out, "RMSPE {name}: {:.8}", mspe(p, &c[cut..]).sqrt())?;
        }
    }
    if let Some(path) = &a.out {
        let mut rows = Vec::new();
        for (k, &scale) in scales.iter().enumerate() {
            for (i, eq) in names.iter().enumerate() {
                for (c, reg) in names.iter().enumerate() {
                    rows.push(CoefficientRow {
                        scale,
                        equation: eq,
                        regressor: reg,
                        coefficient: fit.model.coeff_mats[k][i][c],
                    });
                }
            }
        }
        plotdata::write_rows(output(Some(path))?, &rows)?;
    }
    if let Some(p) = &a.json {
        write_json(p, &fit)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BenchCsvRow<'a> {
    model: &'a str,
    #[serde(rename = "T")]
    t: usize,
    reps: usize,
    metric: &'a str,
    mean: f64,
    se: f64,
}

fn bench_cmd(a: BenchArgs, config: &Config) -> Result<()> {
    let fit = config::fit_options(&a.fit.flags(), config)?;
    let seed = fit.seed;
    log_seed(seed);
    let models: Vec<&str> = a.models.iter().map(String::as_str).collect();
    let mut cfg = BenchConfig::new(&models, &a.ts, a.reps, seed);
    cfg.fit = fit;
    cfg.test_len = a.test_len;
    cfg.innovation = a.innovation.as_deref().map(parse_innovation).transpose()?;
    let result = run_benchmark(&cfg)?;
    for rec in &result.replications {
        if let Err(e) = &rec.outcome {
            eprintln!("{} T={} rep {} failed: {e}", rec.model, rec.t, rec.rep);
        }
    }
    let mut rows = Vec::new();
    for row in &result.rows {
        for (metric, mean, se) in row.metrics() {
            rows.push(BenchCsvRow {
                model: &row.model,
                t: row.t,
                reps: row.reps,
                metric,
                mean,
                se,
            });
        }
    }
    plotdata::write_rows(output(a.out.as_deref())?, &rows)
}

fn plot_cmd(a: PlotArgs, config: &Config) -> Result<()> {
    let transform = Transform {
        difference: a.difference,
        demean: a.demean,
    };
    let load = || -> Result<Series> {
        let path = a
            .data
            .as_ref()
            .ok_or_else(|| Failure::Usage("this plot kind needs --data".into()))?;
        Ok(ingest_csv(path, &ColumnRef(a.column.clone()), transform)?)
    };
    let out = output(a.out.as_deref())?;
    match a.kind {
        PlotKind::Path if a.data.is_some() => {
            let s = load()?;
            plotdata::write_rows(out, &plotdata::path_rows(&s.labels, &s.values))
        }
        PlotKind::Path => {
            let (Some(spec), Some(t)) = (a.model.as_deref(), a.t) else {
                bail!(Failure::Usage(
                    "path plots need --data, or --model with --T".into()
                ));
            };
            let seed = config::resolve_seed(a.fit.seed, config);
            log_seed(seed);
            let model = load_model(spec, Some(t))?;
            let beta = model.beta();
            let spec = InnovationSpec::new(Innovation::default(), seed)?;
            let sim = simulate_ar(&beta, &spec, t, default_burn_in(beta.len()), false)?;
            let labels: Vec<String> = (1..=t).map(|i| i.to_string()).collect();
            plotdata::write_rows(out, &plotdata::path_rows(&labels, &sim.path))
        }
        PlotKind::Coeffs => {
            let opts = config::fit_options(&a.fit.flags(), config)?;
            log_seed(opts.seed);
            let report = amar_fit(&load()?.values, &opts)?;
            plotdata::write_rows(out, &plotdata::coeff_rows(&report))
        }
        PlotKind::Spectral => {
            let spec = a
                .model
                .as_deref()
                .ok_or_else(|| Failure::Usage("spectral plots need --model".into()))?;
            if a.points == 0 {
                bail!(Failure::Usage("--points must be >= 1".into()));
            }
            let beta = ArModel::new(load_model(spec, a.t)?.beta())?;
            plotdata::write_rows(out, &plotdata::spectral_rows(&beta, a.points)?)
        }
    }
}

fn stationarity_cmd(a: StationarityArgs) -> Result<()> {
    let model = match &a.model {
        Some(spec) => load_model(spec, a.t)?,
        None if !a.scales.is_empty() => {
            PresetModel::Amar(AmarModel::new(a.scales.clone(), a.alpha.clone())?)
        }
        None => bail!(Failure::Usage(
            "pass --model or --scales with --alpha".into()
        )),
    };
    let beta = ArModel::new(model.beta())?;
    let sufficient = match &model {
        PresetModel::Amar(m) => is_stationary_sufficient(m),
        PresetModel::Ar(b) => is_stationary_sufficient(&ar_to_amar(b)?),
    };
    let roots = check_roots(&beta, 0.0);
    let mut out = io::stdout().lock();
    writeln!(out, "sufficient        {sufficient}")?;
    writeln!(out, "exact             {}", roots.stationary)?;
    writeln!(out, "min root modulus  {:.10}", roots.min_root_modulus)?;
    if roots.ill_conditioned {
        writeln!(out, "warning           root computation is ill-conditioned")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn innovation_parsing() {
        assert_eq!(parse_innovation("gaussian").unwrap(), Innovation::default());
        assert_eq!(
            parse_innovation("pareto:3").unwrap(),
            Innovation::pareto(3.0)
        );
        assert_eq!(parse_innovation("cauchy").unwrap(), Innovation::cauchy());
        assert!(parse_innovation("pareto").is_err());
        assert!(parse_innovation("gaussian:-1").is_err());
    }

    #[test]
    fn split() {
        assert_eq!(split_point(10, 0.3).unwrap(), 7);
        assert_eq!(split_point(10, 0.01).unwrap(), 9);
        assert!(split_point(1, 0.5).is_err());
    }

    #[test]
    fn scale_list() {
        assert_eq!(parse_scale_list("1,10,11").unwrap(), vec![1, 10, 11]);
        assert!(parse_scale_list("1,x").is_err());
    }
}
