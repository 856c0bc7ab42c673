mod args;
mod failure;
mod output;
mod sweep_config;

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use trendrank::experiment::{self, DatasetFingerprint, TimePoint, CSV_HEADER};
use trendrank::ingest::{self, ColumnMap, IngestConfig, SyntheticConfig, TimeUnit};
use trendrank::metrics::TauVariant;
use trendrank::pagerank::{pagerank, PageRankConfig};
use trendrank::predictors::{predict, rank};
use trendrank::{PredictorSpec, TemporalGraph, Variant, WindowConfig};

use args::{Cli, Command, PageRankOpts, PredictorOpts, TauArg, TimeUnitArg, VariantArg};
use failure::Failure;
use output::emit;
use sweep_config::SweepFile;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure {
                code: "threads",
                exit: 1,
                message: e.to_string(),
            })?;
    }
    match cli.command {
        Command::Ingest(a) => {
            let config = IngestConfig {
                rating_threshold: a.rating_threshold,
                min_actor_activity: a.min_activity,
                time_unit: match a.time_unit {
                    TimeUnitArg::EpochSeconds => TimeUnit::EpochSeconds,
                    TimeUnitArg::Days => TimeUnit::Days,
                },
                exclude_self_links: !a.keep_self_links,
                delimiter: ascii_delimiter(a.delimiter)?,
                has_header: a.header,
                columns: ColumnMap {
                    source: a.source_col,
                    target: a.target_col,
                    value: (!a.no_value).then_some(a.value_col),
                    timestamp: a.time_col,
                },
            };
            let list = ingest::parse_interactions(&a.input, &config)?;
            let mut bytes = Vec::new();
            ingest::write_edges(&mut bytes, &list).expect("writing to memory");
            emit(a.output.as_deref(), &bytes)
        }
        Command::Generate(a) => {
            let list = ingest::generate_synthetic(&SyntheticConfig {
                initial_nodes: a.initial_nodes,
                node_arrival_rate: a.arrival_rate,
                event_rate: a.event_rate,
                horizon: a.horizon,
                recency_weight: a.recency_weight,
                aging_rate: a.aging_rate,
                seed: a.seed,
            })?;
            let mut bytes = Vec::new();
            ingest::write_edges(&mut bytes, &list).expect("writing to memory");
            emit(a.output.as_deref(), &bytes)
        }
        Command::Pagerank(a) => {
            let graph = load(&a.input)?;
            let vector = pagerank(&graph.snapshot_at(a.at), &pagerank_config(&a.pagerank))?;
            let mut text = String::new();
            for node in rank(&vector.scores, vector.len()) {
                let _ = writeln!(text, "{}\t{}", graph.id(node), vector.scores[node]);
            }
            emit(a.output.as_deref(), text.as_bytes())
        }
        Command::Predict(a) => {
            let graph = load(&a.input)?;
            let spec = predictor_spec(&a.predictor);
            let scores = predict(&graph, a.predictor.t, a.predictor.tp, &spec)?;
            let n = a.top_n.unwrap_or(scores.len());
            let mut text = String::new();
            for (position, node) in rank(&scores.scores, n).into_iter().enumerate() {
                let _ = writeln!(
                    text,
                    "{}\t{}\t{}",
                    graph.id(node),
                    scores.scores[node],
                    position + 1
                );
            }
            emit(a.output.as_deref(), text.as_bytes())
        }
        Command::Evaluate(a) => {
            let graph = load(&a.input)?;
            let spec = predictor_spec(&a.predictor);
            let (t, tp, tf) = (a.predictor.t, a.predictor.tp, a.tf);
            let tau = match a.tau {
                TauArg::Gamma => TauVariant::Gamma,
                TauArg::B => TauVariant::B,
            };
            let report = TimePoint::new(&graph, WindowConfig::new(t, tp, tf)?)?
                .evaluate(&spec, a.top_n, tau)?;
            let text = format!(
                "{CSV_HEADER}\n{}\n",
                experiment::format_run_row(t, tp, tf, &spec, &Ok(report))
            );
            emit(a.output.as_deref(), text.as_bytes())
        }
        Command::Sweep(a) => {
            let mut file = SweepFile::load(&a.config)?;
            if let Some(out) = a.output {
                file.output = out;
            }
            let config = file.experiment()?;
            let graph = load(&file.input)?;
            let result = experiment::sweep(&graph, &config)?;

            let mut csv = Vec::new();
            experiment::write_csv(&mut csv, &result).expect("writing to memory");
            let manifest = Manifest {
                tool: "trendrank",
                version: env!("CARGO_PKG_VERSION"),
                config: &file,
                seed: file.seed,
                predictors: config.predictors.iter().map(|p| p.to_string()).collect(),
                cells: result.cells.len(),
                rows: result.rows.len(),
                dataset: experiment::fingerprint(&graph),
            };
            let json =
                serde_json::to_string_pretty(&manifest).expect("manifest is plain data") + "\n";
            let mut manifest_path = file.output.clone().into_os_string();
            manifest_path.push(".manifest.json");
            emit(Some(&file.output), &csv)?;
            emit(Some(Path::new(&manifest_path)), json.as_bytes())
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a SweepFile,
    seed: u64,
    /// Expanded predictor cells in output order.
    predictors: Vec<String>,
    cells: usize,
    rows: usize,
    dataset: DatasetFingerprint,
}

fn load(path: &Path) -> Result<TemporalGraph, Failure> {
    Ok(TemporalGraph::build(ingest::read_edge_file(path)?)?)
}

fn ascii_delimiter(c: char) -> Result<u8, Failure> {
    u8::try_from(c).ok().filter(u8::is_ascii).ok_or_else(|| {
        trendrank::Error::InvalidConfig(format!("delimiter must be one ASCII character, got {c:?}"))
            .into()
    })
}

fn pagerank_config(opts: &PageRankOpts) -> PageRankConfig {
    PageRankConfig {
        alpha: opts.alpha,
        tolerance: opts.tolerance,
        max_iterations: opts.max_iterations,
    }
}

fn predictor_spec(opts: &PredictorOpts) -> PredictorSpec {
    let gamma = opts.gamma;
    let variant = match opts.variant {
        VariantArg::M1 => Variant::M1 { gamma },
        VariantArg::M2 => Variant::M2 { gamma },
        VariantArg::M3 => Variant::M3 {
            gamma,
            delta: opts.delta,
        },
        VariantArg::Pbp => Variant::Pbp {
            lambda: opts.lambda,
        },
        VariantArg::Pagerank => Variant::PageRankOnly,
        VariantArg::Recent => Variant::RecentDegree,
    };
    PredictorSpec {
        variant,
        pagerank: pagerank_config(&opts.pagerank),
    }
}
