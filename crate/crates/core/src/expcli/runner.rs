//! Seeded runs, per-run artifacts, aggregation over seeds and sweeps.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{self, EventLog};
use crate::error::{Error, Result};
use crate::metrics::{
    cross_group_delivery_share, interaction_gap, mean_over_runs, minority_share_by_topic, per_user_correlations,
    per_user_cross_group_visibility, professional_rec_ratio, recs_vs_incoming_edges, trend_test, GapSeries, PerUserRow,
    PerUserResponse, RatioSeries, ReceiverFilter, RecsVsInDegree, TimeSeries, TopicShareRow, TrendTest,
};
use crate::netgen::{
    complete_graph, composition_share, follower_composition, random_graph, sbm_graph, write_composition_csv,
    CompositionRow, DirectedGraph, Direction, RandomGraphParams,
};
use crate::population::{sample_population, GroupId, Population, Topic};
use crate::rng::{stream, Stream};

use super::config::{ExperimentConfig, GraphSpec, SweepSpec};
use super::io::{self, csv_writer, opt};
use super::svg::{self, Mark, Plot, Series};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Population and follow graph of one run.
#[derive(Debug, Clone)]
pub struct RunWorld {
    pub population: Population<f64>,
    pub graph: DirectedGraph,
}

pub fn build_world(config: &ExperimentConfig, seed: u64) -> Result<RunWorld> {
    let population = sample_population(&config.population, &mut stream(seed, Stream::Population))?;
    let n = population.len();
    let mut rng = stream(seed, Stream::Graph);
    let graph = match &config.graph {
        GraphSpec::Complete => complete_graph(n)?,
        GraphSpec::Random { p_edge } => random_graph(n, RandomGraphParams { p_edge: *p_edge }, &mut rng)?,
        GraphSpec::Sbm { .. } => sbm_graph(&population, config.graph.sbm_params().expect("sbm spec"), &mut rng)?,
        GraphSpec::EdgeList { path, n: graph_n } => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            DirectedGraph::read_edge_list(*graph_n, file)?
        }
    };
    if graph.node_count() != n {
        return Err(Error::config(
            "graph.n",
            format!("graph has {} nodes but population.n = {n}", graph.node_count()),
        ));
    }
    Ok(RunWorld { population, graph })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub response: PerUserResponse,
    pub covariate: String,
    pub rho: Option<f64>,
    pub p_value: Option<f64>,
    pub n: usize,
}

/// Scalar digest of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    /// Mean of the per-step ratio after burn-in.
    pub mean_ratio: Option<f64>,
    pub mean_ratio_per_item: Option<f64>,
    pub final_ratio_ma: Option<f64>,
    pub ratio_trend_slope: Option<f64>,
    pub mean_gap: Option<f64>,
    /// Share of minority-created professional recommendations delivered to majority users.
    pub cross_group_delivery_share: Option<f64>,
    /// Mean majority share among the followers of minority users.
    pub minority_majority_follower_share: Option<f64>,
    pub total_requests: u64,
    pub total_recs: usize,
    pub total_interactions: usize,
}

/// Every metric derived from one run.
#[derive(Debug, Clone)]
pub struct RunMetrics {
    pub seed: u64,
    pub ratio: RatioSeries,
    pub gap: GapSeries,
    pub topic_shares: Vec<TopicShareRow>,
    pub per_user: Vec<PerUserRow>,
    pub correlations: Vec<CorrelationRow>,
    pub composition: Vec<CompositionRow>,
    pub recs_vs_in: RecsVsInDegree,
    pub summary: RunSummary,
}

impl RunMetrics {
    pub fn compute(config: &ExperimentConfig, world: &RunWorld, log: &EventLog) -> Result<Self> {
        let (pop, graph, m) = (&world.population, &world.graph, &config.metrics);
        let ratio = professional_rec_ratio(log, pop, m)?;
        let gap = interaction_gap(log, pop, graph, config.engine.alpha.alpha, m)?;
        let topic_shares = ReceiverFilter::ALL
            .iter()
            .flat_map(|&f| minority_share_by_topic(log, pop, f, m.burn_in))
            .collect();
        let per_user = per_user_cross_group_visibility(log, pop, graph, m.burn_in);
        let correlations = correlation_rows(&per_user);
        let composition = follower_composition(graph, pop).unwrap_or_default();
        let recs_vs_in = recs_vs_incoming_edges(log, pop, graph, m.burn_in);
        let summary = RunSummary {
            seed: log.seed,
            mean_ratio: ratio.raw.mean(),
            mean_ratio_per_item: ratio.per_item_raw.mean(),
            final_ratio_ma: ratio.ma.last_defined(),
            ratio_trend_slope: ratio.raw.trend().ok().map(|l| l.slope),
            mean_gap: gap.raw.mean(),
            cross_group_delivery_share: cross_group_delivery_share(&per_user),
            minority_majority_follower_share: composition_share(&composition, GroupId::Minority, Direction::In)
                .map(|r| r.share_majority),
            total_requests: log.total_requests(),
            total_recs: log.recs.len(),
            total_interactions: log.total_interactions(),
        };
        Ok(Self { seed: log.seed, ratio, gap, topic_shares, per_user, correlations, composition, recs_vs_in, summary })
    }

    /// Writes the per-run metric CSVs into `dir`; returns file checksums.
    pub fn write(&self, dir: &Path) -> Result<BTreeMap<String, String>> {
        let mut files = BTreeMap::new();
        let mut put = |name: &str, sum: String| {
            files.insert(name.to_string(), sum);
        };
        put("ratio_prof.csv", io::write_csv(&dir.join("ratio_prof.csv"), |b| self.ratio.ma.write_csv(["t", "ratio_ma"], b))?);
        put("ratio_prof_raw.csv", io::write_csv(&dir.join("ratio_prof_raw.csv"), |b| self.ratio.raw.write_csv(["t", "ratio"], b))?);
        put(
            "ratio_prof_per_item.csv",
            io::write_csv(&dir.join("ratio_prof_per_item.csv"), |b| self.ratio.per_item_ma.write_csv(["t", "ratio_ma"], b))?,
        );
        put("int_gap.csv", io::write_csv(&dir.join("int_gap.csv"), |b| self.gap.ma.write_csv(["t", "gap_ma"], b))?);
        put("topic_shares.csv", io::write_csv(&dir.join("topic_shares.csv"), |b| write_topic_shares(&self.topic_shares, b))?);
        put(
            "per_user.csv",
            io::write_csv(&dir.join("per_user.csv"), |b| {
                let mut w = csv_writer(b);
                for row in &self.per_user {
                    w.serialize(row)?;
                }
                w.flush()?;
                Ok(())
            })?,
        );
        put("composition.csv", io::write_csv(&dir.join("composition.csv"), |b| write_composition_csv(&self.composition, b))?);
        put(
            "recs_vs_in.csv",
            io::write_csv(&dir.join("recs_vs_in.csv"), |b| {
                let mut w = csv_writer(b);
                for row in &self.recs_vs_in.rows {
                    w.serialize(row)?;
                }
                w.flush()?;
                Ok(())
            })?,
        );
        put(
            "recs_vs_in_fit.csv",
            io::write_csv(&dir.join("recs_vs_in_fit.csv"), |b| {
                let mut w = csv_writer(b);
                w.write_record(["topic", "group", "slope", "intercept", "n"])?;
                for f in &self.recs_vs_in.fits {
                    w.write_record([
                        f.topic.as_str().to_string(),
                        f.group.as_str().to_string(),
                        opt(f.line.map(|l| l.slope)),
                        opt(f.line.map(|l| l.intercept)),
                        f.line.map(|l| l.n.to_string()).unwrap_or_default(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            })?,
        );
        put("summary.json", io::write_json(&dir.join("summary.json"), &self.summary)?);
        write_correlations(dir, &self.correlations, &mut files)?;
        Ok(files)
    }
}

/// Correlations of every covariate under both responses.
pub fn correlation_rows(rows: &[PerUserRow]) -> Vec<CorrelationRow> {
    PerUserResponse::ALL
        .iter()
        .flat_map(|&response| {
            let used = rows.iter().filter(|r| response.value(r).is_some()).count();
            per_user_correlations(rows, response).into_iter().map(move |(name, r)| {
                let r = r.ok();
                CorrelationRow {
                    response,
                    covariate: name.to_string(),
                    rho: r.map(|r| r.rho),
                    p_value: r.map(|r| r.p_value),
                    n: used,
                }
            })
        })
        .collect()
}

/// `correlations.csv` holds the per-item response, `correlations_total.csv` the raw counts.
fn write_correlations(dir: &Path, rows: &[CorrelationRow], files: &mut BTreeMap<String, String>) -> Result<()> {
    for (name, response) in [("correlations.csv", PerUserResponse::RecsPerItem), ("correlations_total.csv", PerUserResponse::RecsTotal)] {
        let sum = io::write_csv(&dir.join(name), |b| {
            let mut w = csv_writer(b);
            w.write_record(["covariate", "rho", "p_value", "n"])?;
            for c in rows.iter().filter(|c| c.response == response) {
                w.write_record([c.covariate.clone(), opt(c.rho), opt(c.p_value), c.n.to_string()])?;
            }
            w.flush()?;
            Ok(())
        })?;
        files.insert(name.to_string(), sum);
    }
    Ok(())
}

fn write_topic_shares(rows: &[TopicShareRow], b: &mut Vec<u8>) -> csv::Result<()> {
    let mut w = csv_writer(b);
    w.write_record([
        "topic",
        "receiver",
        "recs",
        "recs_minority_created",
        "share_minority_created",
        "created",
        "created_minority",
        "creation_share_minority",
    ])?;
    for r in rows {
        w.write_record([
            r.topic.as_str().to_string(),
            r.receiver.as_str().to_string(),
            r.recs.to_string(),
            r.recs_minority_created.to_string(),
            opt(r.share_minority_created),
            r.created.to_string(),
            r.created_minority.to_string(),
            opt(r.creation_share_minority),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Everything a single seeded run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub world: RunWorld,
    pub log: EventLog,
    pub metrics: RunMetrics,
}

pub fn execute_run(config: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    let world = build_world(config, seed)?;
    let log = engine::run(&config.engine, &world.population, &world.graph, seed)?;
    let metrics = RunMetrics::compute(config, &world, &log)?;
    Ok(RunOutput { world, log, metrics })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunMeta {
    version: String,
    seed: u64,
    config_hash: String,
    config: ExperimentConfig,
}

fn write_logs(dir: &Path, out: &RunOutput) -> Result<BTreeMap<String, String>> {
    let mut files = BTreeMap::new();
    let (pop, graph, log) = (&out.world.population, &out.world.graph, &out.log);
    files.insert("population.csv".into(), io::write_csv(&dir.join("population.csv"), |b| pop.write_csv(b))?);
    files.insert("edges.csv".into(), io::write_csv(&dir.join("edges.csv"), |b| graph.write_edge_list(b))?);
    files.insert("content.csv".into(), io::write_csv(&dir.join("content.csv"), |b| log.write_content_csv(b))?);
    files.insert("recs.csv".into(), io::write_csv(&dir.join("recs.csv"), |b| log.write_recs_csv(b))?);
    files.insert("requests.csv".into(), io::write_csv(&dir.join("requests.csv"), |b| log.write_requests_csv(b))?);
    files.insert("ties.csv".into(), io::write_csv(&dir.join("ties.csv"), |b| log.write_tie_summary_csv(b))?);
    Ok(files)
}

pub fn run_dir_name(seed: u64) -> String {
    format!("run_{seed}")
}

/// Runs one seed and writes its directory. The event log is dropped before returning.
fn run_and_write(config: &ExperimentConfig, seed: u64) -> Result<(RunMetrics, BTreeMap<String, String>)> {
    let out = execute_run(config, seed)?;
    let dir = config.output_dir.join(run_dir_name(seed));
    io::create_dir(&dir)?;
    let meta = RunMeta { version: VERSION.into(), seed, config_hash: config.hash(), config: config.portable() };
    let mut files = BTreeMap::new();
    files.insert("meta.json".to_string(), io::write_json(&dir.join("meta.json"), &meta)?);
    if config.write_logs {
        files.extend(write_logs(&dir, &out)?);
    }
    files.extend(out.metrics.write(&dir)?);
    Ok((out.metrics, files))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRun {
    pub seed: u64,
    pub dir: String,
    pub status: String,
    pub error: Option<String>,
    pub files: BTreeMap<String, String>,
}

/// Reproducibility record of an experiment directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub status: String,
    pub runs: Vec<ManifestRun>,
    pub aggregates: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join("manifest.json");
        let bytes = io::read_bytes(&path)?;
        serde_json::from_slice(&bytes).map_err(|e| Error::Parse { path, message: e.to_string() })
    }
}

/// Aggregated result of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub output_dir: PathBuf,
    pub config_hash: String,
    /// Successful runs in seed order.
    pub runs: Vec<RunMetrics>,
    pub ratio_ma: TimeSeries,
    pub ratio_raw: TimeSeries,
    pub gap_ma: TimeSeries,
    /// Per-run trend slopes of the raw ratio and their t-test; `None` with fewer than two runs.
    pub trend: Option<TrendTest>,
    /// Per-user correlations over the minority users of all runs.
    pub pooled_correlations: Vec<CorrelationRow>,
    pub warnings: Vec<String>,
}

impl ExperimentSummary {
    /// Mean over runs of each run's time-averaged ratio.
    pub fn mean_ratio(&self) -> Option<f64> {
        mean_defined(self.runs.iter().map(|r| r.summary.mean_ratio))
    }

    pub fn mean_final_ratio(&self) -> Option<f64> {
        mean_defined(self.runs.iter().map(|r| r.summary.final_ratio_ma))
    }
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn topic_share_means(runs: &[RunMetrics]) -> Vec<(Topic, ReceiverFilter, Option<f64>, Option<f64>)> {
    let mut out = Vec::new();
    for receiver in ReceiverFilter::ALL {
        for topic in Topic::ALL {
            let rows = || runs.iter().flat_map(|r| &r.topic_shares).filter(|s| s.topic == topic && s.receiver == receiver);
            out.push((
                topic,
                receiver,
                mean_defined(rows().map(|s| s.share_minority_created)),
                mean_defined(rows().map(|s| s.creation_share_minority)),
            ));
        }
    }
    out
}

fn write_aggregates(dir: &Path, summary: &ExperimentSummary) -> Result<BTreeMap<String, String>> {
    let mut files = BTreeMap::new();
    files.insert("ratio_prof.csv".into(), io::write_csv(&dir.join("ratio_prof.csv"), |b| summary.ratio_ma.write_csv(["t", "ratio_ma"], b))?);
    files.insert("ratio_prof_raw.csv".into(), io::write_csv(&dir.join("ratio_prof_raw.csv"), |b| summary.ratio_raw.write_csv(["t", "ratio"], b))?);
    files.insert("int_gap.csv".into(), io::write_csv(&dir.join("int_gap.csv"), |b| summary.gap_ma.write_csv(["t", "gap_ma"], b))?);
    files.insert(
        "topic_shares.csv".into(),
        io::write_csv(&dir.join("topic_shares.csv"), |b| {
            let mut w = csv_writer(b);
            w.write_record(["topic", "receiver", "share_minority_created", "creation_share_minority"])?;
            for (topic, receiver, share, creation) in topic_share_means(&summary.runs) {
                w.write_record([topic.as_str().to_string(), receiver.as_str().to_string(), opt(share), opt(creation)])?;
            }
            w.flush()?;
            Ok(())
        })?,
    );
    files.insert(
        "runs.csv".into(),
        io::write_csv(&dir.join("runs.csv"), |b| {
            let mut w = csv_writer(b);
            for r in &summary.runs {
                w.serialize(&r.summary)?;
            }
            w.flush()?;
            Ok(())
        })?,
    );
    files.insert(
        "trend.csv".into(),
        io::write_csv(&dir.join("trend.csv"), |b| {
            let mut w = csv_writer(b);
            w.write_record(["runs", "mean_slope", "t", "p_value"])?;
            if let Some(tr) = &summary.trend {
                w.write_record([
                    tr.test.n.to_string(),
                    tr.test.mean.to_string(),
                    tr.test.t.to_string(),
                    tr.test.p_value.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })?,
    );
    write_correlations(dir, &summary.pooled_correlations, &mut files)?;
    Ok(files)
}

/// Runs every seed of `config` on a pool of `jobs` threads and writes the
/// experiment directory. If some runs fail, the manifest is written with
/// status `incomplete` and the first error is returned.
pub fn run_experiment(config: &ExperimentConfig, jobs: usize) -> Result<ExperimentSummary> {
    config.validate()?;
    let dir = &config.output_dir;
    io::create_dir(dir)?;
    let mut aggregates = BTreeMap::new();
    aggregates.insert("config.json".to_string(), io::write_json(&dir.join("config.json"), &config.portable())?);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))?;
    let results: Vec<(u64, Result<(RunMetrics, BTreeMap<String, String>)>)> =
        pool.install(|| config.seeds.par_iter().map(|&seed| (seed, run_and_write(config, seed))).collect());

    let mut runs = Vec::new();
    let mut manifest_runs = Vec::new();
    let mut first_error = None;
    for (seed, result) in results {
        let (status, error, files) = match result {
            Ok((metrics, files)) => {
                runs.push(metrics);
                ("complete", None, files)
            }
            Err(e) => {
                let msg = e.to_string();
                first_error.get_or_insert(e);
                ("failed", Some(msg), BTreeMap::new())
            }
        };
        manifest_runs.push(ManifestRun { seed, dir: run_dir_name(seed), status: status.into(), error, files });
    }

    let mut warnings = Vec::new();
    let ratio_ma = mean_over_runs(&runs.iter().map(|r| r.ratio.ma.clone()).collect::<Vec<_>>())?;
    let ratio_raw = mean_over_runs(&runs.iter().map(|r| r.ratio.raw.clone()).collect::<Vec<_>>())?;
    let gap_ma = mean_over_runs(&runs.iter().map(|r| r.gap.ma.clone()).collect::<Vec<_>>())?;
    let trend = if runs.len() >= 2 {
        match trend_test(&runs.iter().map(|r| r.ratio.raw.clone()).collect::<Vec<_>>()) {
            Ok(t) => Some(t),
            Err(e) => {
                warnings.push(format!("trend test undefined: {e}"));
                None
            }
        }
    } else {
        None
    };
    let pooled: Vec<PerUserRow> = runs.iter().flat_map(|r| r.per_user.iter().copied()).collect();
    let pooled_correlations = correlation_rows(&pooled);
    let mut summary = ExperimentSummary {
        output_dir: dir.clone(),
        config_hash: config.hash(),
        runs,
        ratio_ma,
        ratio_raw,
        gap_ma,
        trend,
        pooled_correlations,
        warnings,
    };
    aggregates.extend(write_aggregates(dir, &summary)?);
    let (svgs, svg_warnings) = render_svgs(dir)?;
    aggregates.extend(svgs);
    summary.warnings.extend(svg_warnings);

    let manifest = Manifest {
        version: VERSION.into(),
        config_hash: summary.config_hash.clone(),
        status: if first_error.is_some() { "incomplete" } else { "complete" }.into(),
        runs: manifest_runs,
        aggregates,
        warnings: summary.warnings.clone(),
    };
    io::write_json(&dir.join("manifest.json"), &manifest)?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}

/// One line of a sweep summary.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: String,
    pub output_dir: PathBuf,
    pub mean_final_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub trend: Option<TrendTest>,
}

impl SweepRow {
    /// Mean of the per-run trend slopes.
    pub fn trend_slope(&self) -> Option<f64> {
        self.trend.as_ref().map(|t| t.test.mean)
    }
}

fn dir_label(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

/// Runs one experiment per grid value under `base.output_dir`, all sharing
/// the base seeds, and writes `sweep_summary.csv`.
pub fn run_sweep(base: &ExperimentConfig, sweep: &SweepSpec, jobs: usize) -> Result<Vec<SweepRow>> {
    if sweep.values.is_empty() {
        return Err(Error::config("values", "sweep needs at least one value"));
    }
    io::create_dir(&base.output_dir)?;
    let mut rows = Vec::new();
    for value in &sweep.values {
        let mut config = sweep.apply(base, value)?;
        let label = value.label();
        config.output_dir = base.output_dir.join(format!("{}_{}", sweep.axis.as_str(), dir_label(&label)));
        let summary = run_experiment(&config, jobs)?;
        rows.push(SweepRow {
            axis_value: label,
            output_dir: config.output_dir,
            mean_final_ratio: summary.mean_final_ratio(),
            mean_ratio: summary.mean_ratio(),
            trend: summary.trend,
        });
    }
    io::write_csv(&base.output_dir.join("sweep_summary.csv"), |b| {
        let mut w = csv_writer(b);
        w.write_record(["axis_value", "mean_final_ratio", "trend_slope"])?;
        for r in &rows {
            w.write_record([r.axis_value.clone(), opt(r.mean_final_ratio), opt(r.trend_slope())])?;
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(rows)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Rebuilds a run from the logs in `log_dir` and recomputes its metrics,
/// writing the metric files to `out_dir` (default: `log_dir`).
pub fn recompute_metrics(log_dir: &Path, out_dir: Option<&Path>) -> Result<RunMetrics> {
    let meta_path = log_dir.join("meta.json");
    let meta: RunMeta = serde_json::from_slice(&io::read_bytes(&meta_path)?)
        .map_err(|e| Error::Parse { path: meta_path.clone(), message: e.to_string() })?;
    let config = meta.config;
    let population = Population::read_csv(open(&log_dir.join("population.csv"))?)?;
    let graph = DirectedGraph::read_edge_list(population.len(), open(&log_dir.join("edges.csv"))?)?;
    let log = EventLog {
        seed: meta.seed,
        steps: config.engine.steps,
        content: EventLog::read_content_csv(open(&log_dir.join("content.csv"))?)?,
        recs: EventLog::read_recs_csv(open(&log_dir.join("recs.csv"))?)?,
        requests: EventLog::read_requests_csv(open(&log_dir.join("requests.csv"))?)?,
        tie_summaries: Vec::new(),
    };
    if log.requests.len() != log.steps {
        return Err(Error::Integrity(format!("requests.csv has {} steps, config says {}", log.requests.len(), log.steps)));
    }
    if log.content.iter().enumerate().any(|(k, c)| c.content_id as usize != k) {
        return Err(Error::Integrity("content ids are not contiguous".into()));
    }
    log.check_invariants(&graph)?;
    let world = RunWorld { population, graph };
    let metrics = RunMetrics::compute(&config, &world, &log)?;
    let out = out_dir.unwrap_or(log_dir);
    io::create_dir(out)?;
    metrics.write(out)?;
    Ok(metrics)
}

fn read_series(path: &Path) -> Result<Option<TimeSeries>> {
    if !path.exists() {
        return Ok(None);
    }
    TimeSeries::read_csv(open(path)?).map(Some)
}

fn series_points(s: &TimeSeries) -> Vec<(f64, f64)> {
    s.defined().map(|(t, v)| (t as f64, v)).collect()
}

/// Professional-topic (in-degree, recs per item) points by creator group.
fn read_recs_vs_in(path: &Path) -> Result<Option<[Vec<(f64, f64)>; 2]>> {
    if !path.exists() {
        return Ok(None);
    }
    let mut r = csv::Reader::from_reader(open(path)?);
    let headers = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Integrity(format!("{}: missing column {name}", path.display())))
    };
    let (cg, ct, cd, cm) = (col("group")?, col("topic")?, col("in_degree")?, col("mean_recs_per_item")?);
    let mut out = [Vec::new(), Vec::new()];
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let bad = || Error::Integrity(format!("{}: malformed row", path.display()));
        if Topic::parse(rec.get(ct).ok_or_else(bad)?) != Some(Topic::Professional) {
            continue;
        }
        let group = GroupId::parse(rec.get(cg).ok_or_else(bad)?).ok_or_else(bad)?;
        let x: f64 = rec.get(cd).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let y: f64 = rec.get(cm).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        out[group.index()].push((x, y));
    }
    Ok(Some(out))
}

fn render_svgs(dir: &Path) -> Result<(BTreeMap<String, String>, Vec<String>)> {
    let mut files = BTreeMap::new();
    let mut warnings = Vec::new();
    let line_plots = [
        ("ratio_prof", "Professional recommendations, minority / majority", "ratio (moving average)", Some(1.0)),
        ("int_gap", "Interaction count, in-group minus cross-group", "gap (moving average)", Some(0.0)),
    ];
    for (stem, title, y_label, reference_y) in line_plots {
        let csv_name = format!("{stem}.csv");
        let Some(series) = read_series(&dir.join(&csv_name))? else {
            warnings.push(format!("{csv_name} missing; {stem}.svg skipped"));
            continue;
        };
        let plot = Plot {
            title: title.into(),
            x_label: "step".into(),
            y_label: y_label.into(),
            mark: Mark::Line,
            series: vec![Series::new(stem, series_points(&series))],
            reference_y,
        };
        match svg::render(&plot) {
            Some(text) => {
                files.insert(format!("{stem}.svg"), io::write_bytes(&dir.join(format!("{stem}.svg")), text.as_bytes())?);
            }
            None => warnings.push(format!("{csv_name} has no defined points; {stem}.svg skipped")),
        }
    }
    if let Some([majority, minority]) = read_recs_vs_in(&dir.join("recs_vs_in.csv"))? {
        let plot = Plot {
            title: "Professional recommendations per item vs followers".into(),
            x_label: "followers".into(),
            y_label: "recommendations per item".into(),
            mark: Mark::Scatter,
            series: vec![Series::new("majority", majority), Series::new("minority", minority)],
            reference_y: None,
        };
        match svg::render(&plot) {
            Some(text) => {
                files.insert("recs_vs_in.svg".into(), io::write_bytes(&dir.join("recs_vs_in.svg"), text.as_bytes())?);
            }
            None => warnings.push("recs_vs_in.csv has no professional rows; recs_vs_in.svg skipped".into()),
        }
    }
    Ok((files, warnings))
}

/// Renders the SVG plots for a metrics directory (an experiment root or a
/// single run directory). Warnings for skipped plots are returned and, when a
/// manifest is present, recorded in it.
pub fn render_metrics_dir(dir: &Path) -> Result<(Vec<String>, Vec<String>)> {
    if !dir.is_dir() {
        return Err(Error::io(dir, std::io::Error::new(std::io::ErrorKind::NotFound, "metrics directory not found")));
    }
    let (files, warnings) = render_svgs(dir)?;
    if dir.join("manifest.json").exists() {
        let mut manifest = Manifest::load(dir)?;
        manifest.aggregates.extend(files.clone());
        for w in &warnings {
            if !manifest.warnings.contains(w) {
                manifest.warnings.push(w.clone());
            }
        }
        io::write_json(&dir.join("manifest.json"), &manifest)?;
    }
    Ok((files.into_keys().collect(), warnings))
}
