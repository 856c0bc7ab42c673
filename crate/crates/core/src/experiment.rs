//! Evaluation protocol: sample reference times, score each predictor from
//! data before `t`, compare against links gained in `[t, t + future)`, and
//! aggregate over samples and parameter grids.
//!
//! Sampled times are shared by every predictor and parameter cell of a
//! window, so comparisons between predictors are paired.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{TemporalGraph, WindowConfig};
use crate::metrics::{self, EvaluationInput, Metric, MetricsReport, TauVariant};
use crate::pagerank::{pagerank_links, LinkMatrix, PageRankConfig, PageRankVector};
use crate::predictors::{
    activity_summary, ActivitySummary, PredictionInputs, Predictor, PredictorSpec, ScoreVector,
    Variant,
};

/// Draws `num_samples` reference times uniformly from
/// `[start + past, end - future]`, sorted ascending.
pub fn sample_times(
    graph: &TemporalGraph,
    past: f64,
    future: f64,
    num_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    WindowConfig::new(graph.start_time() + past, past, future)?;
    let lo = graph.start_time() + past;
    let hi = graph.end_time() - future;
    if lo > hi {
        let span = graph.end_time() - graph.start_time();
        return Err(Error::InfeasibleWindow {
            past,
            future,
            span,
            max_equal_window: span / 2.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times: Vec<f64> = (0..num_samples)
        .map(|_| lo + rng.random::<f64>() * (hi - lo))
        .map(|t: f64| t.clamp(lo, hi))
        .collect();
    times.sort_by(f64::total_cmp);
    Ok(times)
}

/// Per-reference-time state shared by all predictors evaluated at `t`:
/// the snapshot's link matrix, PageRank vectors per configuration,
/// activity summaries per decay rate, and the true and past window gains.
pub struct TimePoint<'g> {
    graph: &'g TemporalGraph,
    window: WindowConfig,
    links: LinkMatrix,
    pageranks: HashMap<(u64, u64, usize), PageRankVector>,
    summaries: HashMap<u64, ActivitySummary>,
    future_gain: Vec<f64>,
    past_gain: Vec<f64>,
}

impl<'g> TimePoint<'g> {
    /// Prepares evaluation at `window.t`; fails if either window leaves the
    /// dataset's time span.
    pub fn new(graph: &'g TemporalGraph, window: WindowConfig) -> Result<Self> {
        window.check_within(graph)?;
        let snapshot = graph.snapshot_at(window.t);
        let links = LinkMatrix::from_snapshot(&snapshot);
        let n = snapshot.node_count();
        let gain = |from: f64, to: f64| -> Vec<f64> {
            (0..n)
                .map(|node| graph.window_in_events(node, from, to).len() as f64)
                .collect()
        };
        Ok(Self {
            graph,
            future_gain: gain(window.t, window.future_end()),
            past_gain: gain(window.past_start(), window.t),
            window,
            links,
            pageranks: HashMap::new(),
            summaries: HashMap::new(),
        })
    }

    pub fn window(&self) -> WindowConfig {
        self.window
    }

    pub fn node_count(&self) -> usize {
        self.links.node_count()
    }

    /// Links each snapshot node receives in `[t, t + future)`.
    pub fn future_gain(&self) -> &[f64] {
        &self.future_gain
    }

    /// Links each snapshot node received in `[t - past, t)`.
    pub fn past_gain(&self) -> &[f64] {
        &self.past_gain
    }

    pub fn pagerank(&mut self, config: &PageRankConfig) -> Result<&PageRankVector> {
        let key = (
            config.alpha.to_bits(),
            config.tolerance.to_bits(),
            config.max_iterations,
        );
        if !self.pageranks.contains_key(&key) {
            let vector = pagerank_links(&self.links, config)?;
            self.pageranks.insert(key, vector);
        }
        Ok(&self.pageranks[&key])
    }

    pub fn summary(&mut self, gamma: f64) -> &ActivitySummary {
        let (graph, window) = (self.graph, self.window);
        self.summaries
            .entry(gamma.to_bits())
            .or_insert_with(|| activity_summary(graph, &window, gamma))
    }

    /// Scores every snapshot node with `spec`.
    pub fn scores(&mut self, spec: &PredictorSpec) -> Result<ScoreVector> {
        spec.validate()?;
        let gamma = spec.variant.gamma().unwrap_or(0.0);
        self.summary(gamma);
        if spec.variant.uses_pagerank() {
            self.pagerank(&spec.pagerank)?;
        }
        let pagerank = spec.variant.uses_pagerank().then(|| {
            let c = &spec.pagerank;
            &self.pageranks[&(c.alpha.to_bits(), c.tolerance.to_bits(), c.max_iterations)]
        });
        spec.score(PredictionInputs {
            summary: &self.summaries[&gamma.to_bits()],
            pagerank,
        })
    }

    pub fn evaluate(
        &mut self,
        spec: &PredictorSpec,
        top_n: usize,
        tau: TauVariant,
    ) -> Result<MetricsReport> {
        let scores = self.scores(spec)?;
        Ok(metrics::evaluate(EvaluationInput {
            predicted: &scores,
            true_future_gain: &self.future_gain,
            past_window_gain: &self.past_gain,
            top_n,
            tau,
        }))
    }
}

/// One full evaluation at reference time `t`, with the default tau.
pub fn run_once(
    graph: &TemporalGraph,
    t: f64,
    past: f64,
    future: f64,
    spec: &PredictorSpec,
    top_n: usize,
) -> Result<MetricsReport> {
    TimePoint::new(graph, WindowConfig::new(t, past, future)?)?.evaluate(
        spec,
        top_n,
        TauVariant::Gamma,
    )
}

/// Predictor families that a [`ParameterGrid`] can expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariantKind {
    M1,
    M2,
    M3,
    Pbp,
    PageRank,
    Recent,
}

impl FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "m1" => VariantKind::M1,
            "m2" => VariantKind::M2,
            "m3" => VariantKind::M3,
            "pbp" => VariantKind::Pbp,
            "pagerank" | "pr" => VariantKind::PageRank,
            "recent" | "recent-degree" => VariantKind::Recent,
            other => {
                return Err(Error::invalid(format!(
                    "unknown predictor {other:?} (expected m1, m2, m3, pbp, pagerank or recent)"
                )))
            }
        })
    }
}

/// Cartesian parameter grid. Each variant expands over the parameters it
/// uses only: `m1`/`m2` over gamma x alpha, `m3` over gamma x alpha x
/// delta, `pbp` over lambda, `pagerank` over alpha, `recent` once.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterGrid {
    pub variants: Vec<VariantKind>,
    pub gammas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ParameterGrid {
    fn default() -> Self {
        let pr = PageRankConfig::default();
        Self {
            variants: vec![
                VariantKind::M1,
                VariantKind::M2,
                VariantKind::M3,
                VariantKind::Pbp,
                VariantKind::PageRank,
            ],
            gammas: vec![0.1],
            alphas: vec![pr.alpha],
            deltas: vec![0.5],
            lambdas: vec![1.0],
            tolerance: pr.tolerance,
            max_iterations: pr.max_iterations,
        }
    }
}

impl ParameterGrid {
    pub fn expand(&self) -> Vec<PredictorSpec> {
        let spec = |variant, alpha| PredictorSpec {
            variant,
            pagerank: PageRankConfig {
                alpha,
                tolerance: self.tolerance,
                max_iterations: self.max_iterations,
            },
        };
        let default_alpha = self
            .alphas
            .first()
            .copied()
            .unwrap_or(PageRankConfig::default().alpha);
        let mut specs = Vec::new();
        for kind in &self.variants {
            match kind {
                VariantKind::M1 | VariantKind::M2 => {
                    for &gamma in &self.gammas {
                        for &alpha in &self.alphas {
                            let variant = if *kind == VariantKind::M1 {
                                Variant::M1 { gamma }
                            } else {
                                Variant::M2 { gamma }
                            };
                            specs.push(spec(variant, alpha));
                        }
                    }
                }
                VariantKind::M3 => {
                    for &gamma in &self.gammas {
                        for &alpha in &self.alphas {
                            for &delta in &self.deltas {
                                specs.push(spec(Variant::M3 { gamma, delta }, alpha));
                            }
                        }
                    }
                }
                VariantKind::Pbp => {
                    for &lambda in &self.lambdas {
                        specs.push(spec(Variant::Pbp { lambda }, default_alpha));
                    }
                }
                VariantKind::PageRank => {
                    for &alpha in &self.alphas {
                        specs.push(spec(Variant::PageRankOnly, alpha));
                    }
                }
                VariantKind::Recent => specs.push(spec(Variant::RecentDegree, default_alpha)),
            }
        }
        specs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub num_samples: usize,
    pub seed: u64,
    /// Window lengths in days; each is used as both past and future window.
    pub windows: Vec<f64>,
    pub top_n: usize,
    pub predictors: Vec<PredictorSpec>,
    pub tau: TauVariant,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            num_samples: 10,
            seed: 0,
            windows: vec![30.0],
            top_n: 100,
            predictors: ParameterGrid::default().expand(),
            tau: TauVariant::Gamma,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::invalid("num_samples must be >= 1"));
        }
        if self.top_n == 0 {
            return Err(Error::invalid("top_n must be >= 1"));
        }
        if self.windows.is_empty() {
            return Err(Error::invalid("at least one window is required"));
        }
        if self.predictors.is_empty() {
            return Err(Error::invalid("at least one predictor is required"));
        }
        for w in &self.windows {
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("window must be > 0, got {w}")));
            }
        }
        for spec in &self.predictors {
            spec.validate()?;
        }
        Ok(())
    }
}

/// One (window, predictor, sampled time) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub t: f64,
    pub past: f64,
    pub future: f64,
    pub spec: PredictorSpec,
    pub outcome: std::result::Result<MetricsReport, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricStats {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Runs contributing a value.
    pub count: usize,
    /// Runs where the metric was null or the run failed.
    pub excluded: usize,
}

impl MetricStats {
    /// Mean and sample standard deviation of the values; `None`s count as
    /// excluded.
    pub fn from_values(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let mut kept = Vec::new();
        let mut excluded = 0;
        for v in values {
            match v {
                Some(x) => kept.push(x),
                None => excluded += 1,
            }
        }
        if kept.is_empty() {
            return Self {
                excluded,
                ..Self::default()
            };
        }
        let n = kept.len() as f64;
        // shifting by the first value keeps constant inputs exact
        let anchor = kept[0];
        let mean = anchor + kept.iter().map(|x| x - anchor).sum::<f64>() / n;
        let std = if kept.len() > 1 {
            (kept.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            mean: Some(mean),
            std: Some(std),
            count: kept.len(),
            excluded,
        }
    }
}

/// Aggregate of one (window, predictor with parameters) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub window: f64,
    pub spec: PredictorSpec,
    pub precision: MetricStats,
    pub novelty: MetricStats,
    pub auc: MetricStats,
    pub tau: MetricStats,
}

impl CellSummary {
    fn from_rows(window: f64, spec: PredictorSpec, rows: &[RunRow]) -> Self {
        let stats = |pick: fn(&MetricsReport) -> Metric| {
            MetricStats::from_values(
                rows.iter()
                    .map(|r| r.outcome.as_ref().ok().and_then(|m| pick(m).ok())),
            )
        };
        Self {
            window,
            spec,
            precision: stats(|m| m.precision),
            novelty: stats(|m| m.novelty),
            auc: stats(|m| m.auc),
            tau: stats(|m| m.tau),
        }
    }

    pub fn named(&self) -> [(&'static str, MetricStats); 4] {
        [
            ("precision", self.precision),
            ("novelty", self.novelty),
            ("auc", self.auc),
            ("tau", self.tau),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Grouped by cell (windows in config order, then predictors in config
    /// order), runs within a cell by ascending `t`.
    pub rows: Vec<RunRow>,
    pub cells: Vec<CellSummary>,
}

/// Evaluates every predictor at every sampled time of every window.
///
/// Time points run in parallel on the current rayon pool; output order and
/// every value are independent of the pool size.
pub fn sweep(graph: &TemporalGraph, config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut tasks = Vec::new();
    for (wi, &window) in config.windows.iter().enumerate() {
        for (ti, t) in sample_times(graph, window, window, config.num_samples, config.seed)?
            .into_iter()
            .enumerate()
        {
            tasks.push((wi, ti, t));
        }
    }

    let mut keyed: Vec<((usize, usize, usize), RunRow)> = tasks
        .par_iter()
        .flat_map_iter(|&(wi, ti, t)| {
            let window = config.windows[wi];
            let mut point =
                WindowConfig::new(t, window, window).and_then(|w| TimePoint::new(graph, w));
            config
                .predictors
                .iter()
                .enumerate()
                .map(|(si, spec)| {
                    let outcome = match &mut point {
                        Ok(point) => point.evaluate(spec, config.top_n, config.tau),
                        Err(e) => Err(Error::invalid(e.to_string())),
                    };
                    let row = RunRow {
                        t,
                        past: window,
                        future: window,
                        spec: *spec,
                        outcome: outcome.map_err(|e| e.to_string()),
                    };
                    ((wi, si, ti), row)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    keyed.sort_by_key(|(key, _)| *key);

    let rows: Vec<RunRow> = keyed.into_iter().map(|(_, row)| row).collect();
    let per_cell = config.num_samples;
    let cells = rows
        .chunks(per_cell)
        .map(|chunk| CellSummary::from_rows(chunk[0].past, chunk[0].spec, chunk))
        .collect();
    Ok(SweepResult { rows, cells })
}

pub const CSV_HEADER: &str = "t,T_P,T_F,predictor,params,precision,novelty,auc,tau,flags";

fn metric_field(m: &Metric) -> String {
    match m {
        Ok(x) => x.to_string(),
        Err(_) => "NA".to_owned(),
    }
}

fn csv_safe(s: &str) -> String {
    s.replace([',', '\n', '\r'], " ")
}

/// One metrics row in the sweep CSV layout.
pub fn format_run_row(
    t: f64,
    past: f64,
    future: f64,
    spec: &PredictorSpec,
    outcome: &std::result::Result<MetricsReport, String>,
) -> String {
    let mut line = format!("{t},{past},{future},{},{},", spec.name(), spec.params());
    match outcome {
        Ok(report) => {
            let fields: Vec<String> = report
                .named()
                .iter()
                .map(|(_, m)| metric_field(m))
                .collect();
            let _ = write!(line, "{},{}", fields.join(","), report.flags());
        }
        Err(message) => {
            let _ = write!(line, "NA,NA,NA,NA,error={}", csv_safe(message));
        }
    }
    line
}

/// Writes per-run rows, each cell followed by its aggregate row. Aggregate
/// rows have `t = agg`, metric fields formatted `mean|std`, and flags
/// starting with `agg=mean|std`, followed by `excluded=<metric>:<count>`
/// for metrics that skipped runs.
pub fn write_csv<W: Write>(mut out: W, result: &SweepResult) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let mut rows = result.rows.iter();
    for cell in &result.cells {
        for row in rows.by_ref().take(cell_len(result)) {
            writeln!(
                out,
                "{}",
                format_run_row(row.t, row.past, row.future, &row.spec, &row.outcome)
            )?;
        }
        let mut flags = String::from("agg=mean|std");
        let mut fields = Vec::new();
        for (name, stats) in cell.named() {
            fields.push(match (stats.mean, stats.std) {
                (Some(m), Some(s)) => format!("{m}|{s}"),
                _ => "NA".to_owned(),
            });
            if stats.excluded > 0 {
                let _ = write!(flags, ";excluded={name}:{}", stats.excluded);
            }
        }
        writeln!(
            out,
            "agg,{w},{w},{},{},{},{flags}",
            cell.spec.name(),
            cell.spec.params(),
            fields.join(","),
            w = cell.window
        )?;
    }
    out.flush()
}

fn cell_len(result: &SweepResult) -> usize {
    if result.cells.is_empty() {
        0
    } else {
        result.rows.len() / result.cells.len()
    }
}

/// Content summary of a graph for run manifests.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DatasetFingerprint {
    pub nodes: usize,
    pub edges: usize,
    pub start_day: f64,
    pub end_day: f64,
    /// SHA-256 over every edge as `source\ttarget\t<time bits>\n`, in graph order.
    pub sha256: String,
}

pub fn fingerprint(graph: &TemporalGraph) -> DatasetFingerprint {
    let mut hasher = Sha256::new();
    for e in graph.edges() {
        hasher.update(graph.id(e.source as usize).as_bytes());
        hasher.update(b"\t");
        hasher.update(graph.id(e.target as usize).as_bytes());
        hasher.update(b"\t");
        hasher.update(e.time.to_bits().to_le_bytes());
        hasher.update(b"\n");
    }
    let digest = hasher.finalize();
    DatasetFingerprint {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        start_day: graph.start_time(),
        end_day: graph.end_time(),
        sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
    }
}
