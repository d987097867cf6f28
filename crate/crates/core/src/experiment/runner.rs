use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::algorithm::{complete_theilsen, ols_outcome, AlgorithmSpec};
use super::config::{ExperimentConfig, InputSource, SweepParameter};
use crate::datagen::{gen_oi_family, gen_synthetic, read_dataset_csv, write_dataset_csv, SyntheticSpec};
use crate::dp_median::OutputRange;
use crate::dp_regression::{mos_release, MosOutcome, TractFamily};
use crate::estimators::{ols_fit, ols_standard_error, sufficient_stats};
use crate::metrics::{bound_from_errors, empirical_error_bound, output_cdf, ratio_cdf, Reference, TrialReport, Which};
use crate::{BudgetLedger, Dataset, Error, LedgerEntry, PredictionPair, RandomSeed, Result, TrialOutcome};

/// Version of the `summary.json` layout.
pub const SCHEMA_VERSION: u32 = 1;

/// One dataset of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    pub id: String,
    pub dataset: Dataset,
    pub truth: Option<PredictionPair>,
}

/// Datasets of a run, plus the family when the input is one.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub datasets: Vec<DatasetEntry>,
    pub family: Option<TractFamily>,
    pub default_range: OutputRange,
}

fn synthetic_seed(seed: u64, index: usize) -> RandomSeed {
    RandomSeed::new(seed).derive_str("synthetic").derive(index as u64)
}

fn synthetic_datasets(spec: &SyntheticSpec, count: usize, seed: u64) -> Result<Vec<DatasetEntry>> {
    (0..count)
        .map(|i| {
            let data = gen_synthetic(spec, &mut synthetic_seed(seed, i).rng())?;
            Ok(DatasetEntry {
                id: format!("synthetic-{i:04}"),
                dataset: data.dataset,
                truth: Some(data.truth),
            })
        })
        .collect()
}

pub fn load_inputs(config: &ExperimentConfig) -> Result<Inputs> {
    let oi_range = OutputRange::default();
    match &config.input {
        InputSource::Csv { path } => {
            let file = File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
            let dataset = read_dataset_csv(file, config.strict_csv)?;
            let id = path.file_stem().map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned());
            Ok(Inputs {
                datasets: vec![DatasetEntry { id, dataset, truth: None }],
                family: None,
                default_range: oi_range,
            })
        }
        InputSource::Synthetic { spec, datasets } => Ok(Inputs {
            datasets: synthetic_datasets(spec, *datasets, config.seed)?,
            family: None,
            default_range: OutputRange::new(-2.0, 2.0)?,
        }),
        InputSource::OiFamily { spec } => {
            let family = gen_oi_family(spec, RandomSeed::new(config.seed).derive_str("oi-family"))?;
            let datasets = family
                .tracts
                .iter()
                .map(|(id, d)| DatasetEntry {
                    id: id.clone(),
                    dataset: d.clone(),
                    truth: None,
                })
                .collect();
            Ok(Inputs {
                datasets,
                family: Some(family),
                default_range: oi_range,
            })
        }
    }
}

/// Stream of one trial, independent of scheduling.
pub fn trial_seed(seed: u64, dataset_id: &str, algorithm: &str, epsilon: f64, trial: usize) -> RandomSeed {
    RandomSeed::new(seed)
        .derive_str(dataset_id)
        .derive_str(algorithm)
        .derive(epsilon.to_bits())
        .derive(trial as u64)
}

/// OLS standard error at `x`, or zero when it is undefined.
pub fn standard_error_at(d: &Dataset, x: f64) -> f64 {
    ols_fit(d)
        .and_then(|fit| ols_standard_error(&fit, &sufficient_stats(d), x))
        .unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub dataset_id: String,
    pub algorithm: String,
    pub epsilon: f64,
    pub trial: usize,
    pub outcome: TrialOutcome,
    pub wall_seconds: f64,
}

/// Ledger of the first trial of one algorithm at one epsilon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerRecord {
    pub algorithm: String,
    pub epsilon: f64,
    pub ledger: BudgetLedger,
}

#[derive(Debug, Clone)]
pub struct FitResults {
    pub rows: Vec<TrialRow>,
    /// Reports with the epsilon they were run at.
    pub reports: Vec<(f64, TrialReport)>,
    pub ledgers: Vec<LedgerRecord>,
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    builder.build().map_err(|e| Error::Config(format!("worker pool: {e}")))
}

fn check_labels(config: &ExperimentConfig) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for a in &config.algorithms {
        if !seen.insert(a.label()) {
            return Err(Error::Config(format!("algorithm `{}` listed twice", a.label())));
        }
    }
    Ok(())
}

struct JobOutput {
    rows: Vec<TrialRow>,
    first_spends: Vec<LedgerEntry>,
}

/// Runs all trials of one algorithm on one dataset at one epsilon.
fn run_job(
    config: &ExperimentConfig,
    entry: &DatasetEntry,
    algo: &AlgorithmSpec,
    epsilon: f64,
    default_range: OutputRange,
) -> Result<JobOutput> {
    let label = algo.label();
    let total = algo.total_spend(epsilon, config.delta)?;
    let fixed = match algo {
        AlgorithmSpec::Ols {} => Some(ols_outcome(&entry.dataset)),
        AlgorithmSpec::Theilsen {} => Some(complete_theilsen(&entry.dataset)?.into()),
        _ => None,
    };
    let mut rows = Vec::with_capacity(config.trials);
    let mut first_spends = Vec::new();
    for trial in 0..config.trials {
        let start = Instant::now();
        let (outcome, spends) = match fixed {
            Some(o) => (o, Vec::new()),
            None => {
                let mut rng = trial_seed(config.seed, &entry.id, &label, epsilon, trial).rng();
                algo.run(&entry.dataset, epsilon, config.delta, default_range, &mut rng)?
            }
        };
        let wall_seconds = start.elapsed().as_secs_f64();
        BudgetLedger::with_total(total.clone()).record(&spends)?;
        if trial == 0 {
            first_spends = spends;
        }
        rows.push(TrialRow {
            dataset_id: entry.id.clone(),
            algorithm: label.clone(),
            epsilon,
            trial,
            outcome,
            wall_seconds,
        });
    }
    Ok(JobOutput { rows, first_spends })
}

/// MOS trials over the whole family at one epsilon.
fn run_mos(config: &ExperimentConfig, family: &TractFamily, epsilon: f64) -> Result<JobOutput> {
    let mut per_tract: Vec<Vec<TrialRow>> = vec![Vec::new(); family.tracts.len()];
    let mut first_spends = Vec::new();
    let total = AlgorithmSpec::Mos {}.total_spend(epsilon, config.delta)?;
    for trial in 0..config.trials {
        let start = Instant::now();
        let mut rng = trial_seed(config.seed, &family.state, "mos", epsilon, trial).rng();
        let release = mos_release(family, epsilon, &mut rng)?;
        let wall_seconds = start.elapsed().as_secs_f64();
        BudgetLedger::with_total(total.clone()).record(&release.spends)?;
        if trial == 0 {
            first_spends = release.spends;
        }
        for (i, (id, outcome)) in release.value.tracts.into_iter().enumerate() {
            per_tract[i].push(TrialRow {
                dataset_id: id,
                algorithm: "mos".into(),
                epsilon,
                trial,
                outcome: match outcome {
                    MosOutcome::Released(p) => p.into(),
                    MosOutcome::Suppressed => TrialOutcome::Failed,
                },
                wall_seconds,
            });
        }
    }
    Ok(JobOutput {
        rows: per_tract.into_iter().flatten().collect(),
        first_spends,
    })
}

/// Runs every trial of a fit configuration without touching the filesystem.
pub fn fit_results(config: &ExperimentConfig) -> Result<FitResults> {
    config.validate()?;
    check_labels(config)?;
    let inputs = load_inputs(config)?;
    let pool = thread_pool(config.workers)?;

    let mut jobs = Vec::new();
    for (a, algo) in config.algorithms.iter().enumerate() {
        for e in 0..config.epsilons.len() {
            if matches!(algo, AlgorithmSpec::Mos {}) {
                jobs.push((a, e, None));
            } else {
                jobs.extend((0..inputs.datasets.len()).map(|d| (a, e, Some(d))));
            }
        }
    }
    let outputs: Vec<JobOutput> = pool.install(|| {
        jobs.par_iter()
            .map(|&(a, e, d)| {
                let algo = &config.algorithms[a];
                let eps = config.epsilons[e];
                match d {
                    Some(d) => run_job(config, &inputs.datasets[d], algo, eps, inputs.default_range),
                    None => run_mos(config, inputs.family.as_ref().expect("validated"), eps),
                }
            })
            .collect::<Result<_>>()
    })?;

    let baselines: Vec<(PredictionPair, (f64, f64))> = inputs
        .datasets
        .iter()
        .map(|e| {
            let ols = ols_outcome(&e.dataset).prediction().unwrap_or(PredictionPair::new(f64::NAN, f64::NAN));
            (ols, (standard_error_at(&e.dataset, 0.25), standard_error_at(&e.dataset, 0.75)))
        })
        .collect();

    let dataset_order: BTreeMap<&str, usize> =
        inputs.datasets.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let mut rows = Vec::new();
    let mut ledgers = Vec::new();
    let mut grouped: BTreeMap<(usize, usize, usize), Vec<TrialOutcome>> = BTreeMap::new();
    let mut recorded = std::collections::BTreeSet::new();
    for (&(a, e, _), out) in jobs.iter().zip(outputs) {
        if recorded.insert((a, e)) {
            let algo = &config.algorithms[a];
            let eps = config.epsilons[e];
            ledgers.push(LedgerRecord {
                algorithm: algo.label(),
                epsilon: eps,
                ledger: BudgetLedger::with_total(algo.total_spend(eps, config.delta)?).record(&out.first_spends)?,
            });
        }
        for row in &out.rows {
            let d = dataset_order[row.dataset_id.as_str()];
            grouped.entry((a, e, d)).or_default().push(row.outcome);
        }
        rows.extend(out.rows.into_iter().map(|r| ((a, e, dataset_order[r.dataset_id.as_str()], r.trial), r)));
    }
    rows.sort_by_key(|(k, _)| *k);

    let reports = grouped
        .into_iter()
        .map(|((a, e, d), trials)| {
            let entry = &inputs.datasets[d];
            let (ols, sigma) = &baselines[d];
            (
                config.epsilons[e],
                TrialReport {
                    dataset_id: entry.id.clone(),
                    algorithm: config.algorithms[a].label(),
                    trials,
                    ols_baseline: *ols,
                    sigma_hat: *sigma,
                    truth: entry.truth,
                },
            )
        })
        .collect();
    Ok(FitResults {
        rows: rows.into_iter().map(|(_, r)| r).collect(),
        reports,
        ledgers,
    })
}

fn fmt_opt(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

#[derive(Serialize)]
struct AlgorithmSummary {
    algorithm: String,
    epsilon: f64,
    q: f64,
    datasets: usize,
    excluded_zero_standard_error: Vec<String>,
    failure_rate: f64,
    median_ratio: Option<f64>,
    fraction_ratio_below_one: f64,
}

#[derive(Serialize)]
struct LedgerLine {
    mechanism: String,
    count: usize,
    spend: crate::Spend,
}

#[derive(Serialize)]
struct LedgerSummary {
    algorithm: String,
    epsilon: f64,
    total: crate::Spend,
    spent: crate::Spend,
    entries: Vec<LedgerLine>,
}

fn compress_entries(entries: &[LedgerEntry]) -> Vec<LedgerLine> {
    let mut lines: Vec<LedgerLine> = Vec::new();
    for e in entries {
        match lines.last_mut() {
            Some(last) if last.mechanism == e.mechanism && last.spend == e.spend => last.count += 1,
            _ => lines.push(LedgerLine {
                mechanism: e.mechanism.clone(),
                count: 1,
                spend: e.spend.clone(),
            }),
        }
    }
    lines
}

fn ledger_summaries(records: &[LedgerRecord]) -> Vec<LedgerSummary> {
    records
        .iter()
        .map(|r| LedgerSummary {
            algorithm: r.algorithm.clone(),
            epsilon: r.epsilon,
            total: r.ledger.total().clone(),
            spent: r.ledger.spent().clone(),
            entries: compress_entries(r.ledger.entries()),
        })
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// The config as recorded in summaries: where files go and how many threads
/// ran do not affect results, so they are left out.
fn recorded_config(config: &ExperimentConfig) -> Result<serde_json::Value> {
    let mut v = serde_json::to_value(config)?;
    if let Some(map) = v.as_object_mut() {
        map.remove("out");
        map.remove("workers");
    }
    Ok(v)
}

fn timestamp(config: &ExperimentConfig) -> Option<String> {
    config
        .header_timestamp
        .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

/// Runs a fit and writes its files into `config.out`; returns the paths.
pub fn run_fit(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let results = fit_results(config)?;
    let out = &config.out;
    fs::create_dir_all(out)?;
    let mut files = Vec::new();

    let path = out.join("trials.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["dataset_id", "algorithm", "epsilon", "trial", "p25", "p75", "failed"])?;
    for r in &results.rows {
        let (p25, p75) = r.outcome.prediction().map_or((String::new(), String::new()), |p| (fmt_opt(p.p25), fmt_opt(p.p75)));
        w.write_record([
            r.dataset_id.clone(),
            r.algorithm.clone(),
            r.epsilon.to_string(),
            r.trial.to_string(),
            p25,
            p75,
            r.outcome.is_failure().to_string(),
        ])?;
    }
    w.flush()?;
    files.push(path);

    let path = out.join("timings.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["dataset_id", "algorithm", "epsilon", "trial", "wall_seconds"])?;
    for r in &results.rows {
        w.write_record([
            r.dataset_id.clone(),
            r.algorithm.clone(),
            r.epsilon.to_string(),
            r.trial.to_string(),
            format!("{:.9}", r.wall_seconds),
        ])?;
    }
    w.flush()?;
    files.push(path);

    let references: Vec<Reference> = if config.input.has_truth() {
        vec![Reference::Ols, Reference::Truth]
    } else {
        vec![Reference::Ols]
    };
    let path = out.join("errors.csv");
    let mut w = csv_writer(&path)?;
    w.write_record([
        "dataset_id", "algorithm", "epsilon", "q", "which", "reference", "c_hat", "sigma_hat", "ratio", "failure_rate",
    ])?;
    for (eps, r) in &results.reports {
        for &q in &config.q {
            for which in [Which::P25, Which::P75] {
                for &vs in &references {
                    let c = match empirical_error_bound(r, q, which, vs) {
                        Err(Error::AllFailures) => f64::INFINITY,
                        other => other?,
                    };
                    let sigma = r.sigma(which);
                    let ratio = if sigma > 0.0 { fmt_opt(c / sigma) } else { String::new() };
                    w.write_record([
                        r.dataset_id.clone(),
                        r.algorithm.clone(),
                        eps.to_string(),
                        q.to_string(),
                        serde_json::to_value(which)?.as_str().unwrap_or_default().to_string(),
                        serde_json::to_value(vs)?.as_str().unwrap_or_default().to_string(),
                        fmt_opt(c),
                        sigma.to_string(),
                        ratio,
                        r.failure_rate().to_string(),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    files.push(path);

    let mut summaries = Vec::new();
    for algo in &config.algorithms {
        for &eps in &config.epsilons {
            let label = algo.label();
            let reports: Vec<TrialReport> = results
                .reports
                .iter()
                .filter(|(e, r)| *e == eps && r.algorithm == label)
                .map(|(_, r)| r.clone())
                .collect();
            let failures: f64 = reports.iter().map(TrialReport::failure_rate).sum::<f64>() / reports.len().max(1) as f64;
            for &q in &config.q {
                let cdf = ratio_cdf(&reports, q, Which::P25, Reference::Ols)?;
                let path = out.join(format!("ratio_cdf_{label}_eps{eps}_q{q}.csv"));
                let mut w = csv_writer(&path)?;
                w.write_record(["ratio", "cdf"])?;
                for (ratio, frac) in &cdf.points {
                    w.write_record([fmt_opt(*ratio), frac.to_string()])?;
                }
                w.flush()?;
                files.push(path);
                summaries.push(AlgorithmSummary {
                    algorithm: label.clone(),
                    epsilon: eps,
                    q,
                    datasets: reports.len(),
                    failure_rate: failures,
                    median_ratio: cdf.median(),
                    fraction_ratio_below_one: cdf.at(1.0),
                    excluded_zero_standard_error: cdf.excluded,
                });
            }
        }
    }

    let path = out.join("output_cdf.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["dataset_id", "algorithm", "epsilon", "which", "value", "cdf"])?;
    for (eps, r) in &results.reports {
        for which in [Which::P25, Which::P75] {
            let name = serde_json::to_value(which)?.as_str().unwrap_or_default().to_string();
            for (v, frac) in output_cdf(&r.trials, which) {
                w.write_record([r.dataset_id.clone(), r.algorithm.clone(), eps.to_string(), name.clone(), fmt_opt(v), frac.to_string()])?;
            }
        }
    }
    w.flush()?;
    files.push(path);

    #[derive(Serialize)]
    struct Summary {
        schema_version: u32,
        #[serde(skip_serializing_if = "Option::is_none")]
        generated_at: Option<String>,
        command: &'static str,
        config: serde_json::Value,
        datasets: usize,
        algorithms: Vec<AlgorithmSummary>,
        ledger: Vec<LedgerSummary>,
    }
    let path = out.join("summary.json");
    let datasets = results.reports.iter().map(|(_, r)| r.dataset_id.as_str()).collect::<std::collections::BTreeSet<_>>().len();
    write_json(
        &path,
        &Summary {
            schema_version: SCHEMA_VERSION,
            generated_at: timestamp(config),
            command: "fit",
            config: recorded_config(config)?,
            datasets,
            algorithms: summaries,
            ledger: ledger_summaries(&results.ledgers),
        },
    )?;
    files.push(path);
    Ok(files)
}

/// Mean ratio for one algorithm at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub parameter: SweepParameter,
    pub value: f64,
    pub algorithm: String,
    pub epsilon: f64,
    pub q: f64,
    /// Mean over datasets of `C_true(q) / sigma_hat` at `x_new`.
    pub mean_ratio: f64,
    pub datasets_used: usize,
    pub failure_rate: f64,
}

fn apply_grid(spec: &SyntheticSpec, epsilons: &[f64], parameter: SweepParameter, value: f64) -> Result<(SyntheticSpec, Vec<f64>)> {
    let mut spec = *spec;
    let mut eps = epsilons.to_vec();
    match parameter {
        SweepParameter::N => {
            if value < 2.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!("n grid values must be integers >= 2, got {value}")));
            }
            spec.n = value as usize;
        }
        SweepParameter::SigmaX2 => spec.sigma_x2 = value,
        SweepParameter::SigmaE2 => spec.sigma_e2 = value,
        SweepParameter::XNew => spec.x_new = value,
        SweepParameter::Epsilon => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("epsilon grid values must be > 0, got {value}")));
            }
            eps = vec![value];
        }
    }
    spec.validate()?;
    Ok((spec, eps))
}

/// Runs a sweep without touching the filesystem.
pub fn sweep_results(config: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    check_labels(config)?;
    let sweep = config.sweep.as_ref().ok_or_else(|| Error::Config("no sweep section".into()))?;
    let InputSource::Synthetic { spec: base, .. } = &config.input else {
        return Err(Error::Config("sweeps need a synthetic input".into()));
    };
    let pool = thread_pool(config.workers)?;
    let range = OutputRange::new(-2.0, 2.0)?;
    let mut points = Vec::new();
    for &value in &sweep.values {
        let (spec, epsilons) = apply_grid(base, &config.epsilons, sweep.parameter, value)?;
        let datasets = synthetic_datasets(&spec, sweep.datasets, config.seed)?;
        let truth_x = spec.alpha * spec.x_new + spec.beta;
        let mut jobs = Vec::new();
        for a in 0..config.algorithms.len() {
            for &eps in &epsilons {
                jobs.extend((0..datasets.len()).map(|d| (a, eps, d)));
            }
        }
        let per_job: Vec<(Vec<f64>, f64)> = pool.install(|| {
            jobs.par_iter()
                .map(|&(a, eps, d)| {
                    let entry = &datasets[d];
                    let out = run_job(config, entry, &config.algorithms[a], eps, range)?;
                    let errors: Vec<f64> = out
                        .rows
                        .iter()
                        .map(|r| r.outcome.prediction().map_or(f64::INFINITY, |p| (p.predict_at(spec.x_new) - truth_x).abs()))
                        .collect();
                    let failures = out.rows.iter().filter(|r| r.outcome.is_failure()).count() as f64 / out.rows.len() as f64;
                    let sigma = standard_error_at(&entry.dataset, spec.x_new);
                    let ratios = config
                        .q
                        .iter()
                        .map(|&q| {
                            if !(sigma > 0.0) {
                                return Ok(f64::NAN);
                            }
                            Ok(match bound_from_errors(errors.clone(), q) {
                                Err(Error::AllFailures) => f64::INFINITY,
                                other => other?,
                            } / sigma)
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    Ok((ratios, failures))
                })
                .collect::<Result<_>>()
        })?;
        for a in 0..config.algorithms.len() {
            for &eps in &epsilons {
                let mine: Vec<&(Vec<f64>, f64)> = jobs
                    .iter()
                    .zip(&per_job)
                    .filter(|((ja, je, _), _)| *ja == a && *je == eps)
                    .map(|(_, r)| r)
                    .collect();
                let failure_rate = mine.iter().map(|r| r.1).sum::<f64>() / mine.len() as f64;
                for (qi, &q) in config.q.iter().enumerate() {
                    let used: Vec<f64> = mine.iter().map(|r| r.0[qi]).filter(|v| !v.is_nan()).collect();
                    points.push(SweepPoint {
                        parameter: sweep.parameter,
                        value,
                        algorithm: config.algorithms[a].label(),
                        epsilon: eps,
                        q,
                        mean_ratio: used.iter().sum::<f64>() / used.len() as f64,
                        datasets_used: used.len(),
                        failure_rate,
                    });
                }
            }
        }
    }
    Ok(points)
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let points = sweep_results(config)?;
    fs::create_dir_all(&config.out)?;
    let path = config.out.join("sweep.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["parameter", "value", "algorithm", "epsilon", "q", "mean_ratio", "datasets_used", "failure_rate"])?;
    for p in &points {
        w.write_record([
            serde_json::to_value(p.parameter)?.as_str().unwrap_or_default().to_string(),
            p.value.to_string(),
            p.algorithm.clone(),
            p.epsilon.to_string(),
            p.q.to_string(),
            fmt_opt(p.mean_ratio),
            p.datasets_used.to_string(),
            p.failure_rate.to_string(),
        ])?;
    }
    w.flush()?;
    #[derive(Serialize)]
    struct Summary<'a> {
        schema_version: u32,
        #[serde(skip_serializing_if = "Option::is_none")]
        generated_at: Option<String>,
        command: &'static str,
        config: serde_json::Value,
        points: &'a [SweepPoint],
    }
    let summary = config.out.join("summary.json");
    write_json(
        &summary,
        &Summary {
            schema_version: SCHEMA_VERSION,
            generated_at: timestamp(config),
            command: "sweep",
            config: recorded_config(config)?,
            points: &points,
        },
    )?;
    Ok(vec![path, summary])
}

/// Writes the configured input as CSV files plus a metadata file.
pub fn run_datagen(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    if matches!(config.input, InputSource::Csv { .. }) {
        return Err(Error::Config("datagen needs a synthetic or oi_family input".into()));
    }
    let inputs = load_inputs(config)?;
    fs::create_dir_all(&config.out)?;
    let mut files = Vec::new();
    for e in &inputs.datasets {
        let path = config.out.join(format!("{}.csv", e.id));
        write_dataset_csv(BufWriter::new(File::create(&path)?), &e.dataset)?;
        files.push(path);
    }
    #[derive(Serialize)]
    struct Meta<'a> {
        schema_version: u32,
        #[serde(skip_serializing_if = "Option::is_none")]
        generated_at: Option<String>,
        input: &'a InputSource,
        seed: u64,
        /// `state` when percentiles are ranked across the family.
        ranking: Option<&'static str>,
        datasets: Vec<DatasetMeta<'a>>,
    }
    #[derive(Serialize)]
    struct DatasetMeta<'a> {
        id: &'a str,
        n: usize,
        truth: Option<PredictionPair>,
    }
    let path = config.out.join("datasets.json");
    write_json(
        &path,
        &Meta {
            schema_version: SCHEMA_VERSION,
            generated_at: timestamp(config),
            input: &config.input,
            seed: config.seed,
            ranking: inputs.family.as_ref().map(|_| "state"),
            datasets: inputs
                .datasets
                .iter()
                .map(|e| DatasetMeta {
                    id: &e.id,
                    n: e.dataset.len(),
                    truth: e.truth,
                })
                .collect(),
        },
    )?;
    files.push(path);
    Ok(files)
}

/// Small dataset that every algorithm accepts, used for budget dry runs.
fn probe_dataset(min_points: usize) -> Result<Dataset> {
    let n = min_points.max(24);
    Dataset::from_pairs((0..n).map(|i| {
        let x = (i as f64 + 0.5) / n as f64;
        (x, 0.2 + 0.5 * x + if i % 2 == 0 { 0.05 } else { -0.05 })
    }))
}

/// Ledger entries each algorithm would record at each epsilon. Spends do not
/// depend on the data, so a probe dataset stands in for the real one.
pub fn planned_ledgers(config: &ExperimentConfig) -> Result<Vec<LedgerRecord>> {
    let mut records = Vec::new();
    for algo in &config.algorithms {
        algo.validate()?;
        let k = match algo {
            AlgorithmSpec::DpExpTheilsen { k, .. } | AlgorithmSpec::DpWideTheilsen { k, .. } | AlgorithmSpec::DpSsTheilsen { k, .. } => k.unwrap_or(0),
            _ => 0,
        };
        let probe = probe_dataset(k + 2)?;
        for &eps in &config.epsilons {
            let mut rng = RandomSeed::new(config.seed).derive_str("ledger").rng();
            let spends = match algo {
                AlgorithmSpec::Mos {} => {
                    let family = TractFamily::new("probe", vec![("probe".into(), probe.clone())]);
                    mos_release(&family, eps, &mut rng)?.spends
                }
                _ => algo.run(&probe, eps, config.delta, OutputRange::default(), &mut rng)?.1,
            };
            records.push(LedgerRecord {
                algorithm: algo.label(),
                epsilon: eps,
                ledger: BudgetLedger::with_total(algo.total_spend(eps, config.delta)?).record(&spends)?,
            });
        }
    }
    Ok(records)
}

/// Human-readable dry run of [`planned_ledgers`].
pub fn ledger_report(config: &ExperimentConfig) -> Result<String> {
    use std::fmt::Write as _;
    let mut text = String::new();
    for r in planned_ledgers(config)? {
        let status = if r.ledger.is_exhausted() { "exhausted" } else { "partial" };
        let _ = writeln!(text, "{} at epsilon {}: total {} [{status}]", r.algorithm, r.epsilon, r.ledger.total());
        for line in compress_entries(r.ledger.entries()) {
            let _ = writeln!(text, "  {} x{}: {}", line.mechanism, line.count, line.spend);
        }
    }
    Ok(text)
}
