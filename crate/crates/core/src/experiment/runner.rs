use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ModelFamily, Representation, TemporalModel};
use crate::embed::{embed_series, fuse, BaseMethod};
use crate::error::{Error, Result};
use crate::eval::{
    align_protocol_with, edge_embedding, evaluate_scores, mean_gain, rank_models, train_logistic,
    GainTable, LabeledEdgeSet, MetricRecord, ProtocolSplit, RankTable,
};
use crate::models::{
    build_trg, build_tsg, build_wtrg, snapshot_graph, static_model, tsg_series, WeightedGraph,
};
use crate::series::{partition_epsilon, partition_tau, GraphTimeSeries};
use crate::stream::{parse_edge_stream, EdgeStream, NodeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSummary {
    pub tau_snapshots: usize,
    pub start_offset: usize,
    /// 1-based index of the hold-out tau-snapshot.
    pub test_snapshot: usize,
    pub epsilon: usize,
    pub tau_train_snapshots: usize,
    pub epsilon_train_snapshots: usize,
    pub positives: usize,
    pub negatives: usize,
    pub classifier_train_pairs: usize,
    pub classifier_test_pairs: usize,
}

/// A (model, method) cell that produced no record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellFailure {
    pub model: String,
    pub method: String,
    pub stage: String,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotCount {
    pub snapshot_index: usize,
    pub edge_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Gain of each epsilon model over each tau model and Static, for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodGain {
    pub method: String,
    pub table: GainTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dataset: String,
    pub config: ExperimentConfig,
    pub protocol: ProtocolSummary,
    /// One record per successful cell, in configured model then method order.
    pub records: Vec<MetricRecord>,
    pub failures: Vec<CellFailure>,
    /// Ranks models with a record for every configured method.
    pub rank_table: RankTable,
    pub gains: Vec<MethodGain>,
    /// Per model: temporal edges per training snapshot for SG, TSG and Static,
    /// arcs per reachability graph for WTRG and TRG.
    pub edge_counts: BTreeMap<String, Vec<SnapshotCount>>,
    /// Wall clock per stage; excluded from the deterministic report files.
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
    #[serde(skip)]
    pub total_seconds: f64,
}

impl ExperimentReport {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn record(&self, model: &str, method: &str) -> Option<&MetricRecord> {
        self.records
            .iter()
            .find(|r| r.model == model && r.method == method)
    }
}

struct Stopwatch {
    timings: Vec<StageTiming>,
    start: Instant,
    last: Instant,
}

impl Stopwatch {
    fn new() -> Self {
        let now = Instant::now();
        Self {
            timings: Vec::new(),
            start: now,
            last: now,
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings.push(StageTiming {
            stage: stage.to_owned(),
            seconds: (now - self.last).as_secs_f64(),
        });
        self.last = now;
    }
}

/// Classifier train and test pairs drawn from the labeled hold-out.
struct PairSplit {
    train: Vec<((NodeId, NodeId), bool)>,
    test: Vec<((NodeId, NodeId), bool)>,
}

fn split_pairs(labeled: &LabeledEdgeSet, fraction: f64, seed: u64) -> Result<PairSplit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = PairSplit {
        train: Vec::new(),
        test: Vec::new(),
    };
    for (pairs, label) in [(&labeled.positives, true), (&labeled.negatives, false)] {
        if pairs.len() < 2 {
            return Err(Error::Empty(format!(
                "{} {} pairs; the classifier needs two per class",
                pairs.len(),
                if label { "positive" } else { "negative" }
            )));
        }
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.shuffle(&mut rng);
        let cut = ((pairs.len() as f64 * fraction).round() as usize).clamp(1, pairs.len() - 1);
        split
            .train
            .extend(order[..cut].iter().map(|&i| (pairs[i], label)));
        split
            .test
            .extend(order[cut..].iter().map(|&i| (pairs[i], label)));
    }
    Ok(split)
}

/// Nodes active in either training window or the hold-out.
fn candidate_nodes(split: &ProtocolSplit) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = split
        .tau_series
        .edges()
        .chain(split.epsilon_series.edges())
        .chain(&split.test_snapshot.edges)
        .flat_map(|e| [e.src, e.dst])
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

fn series_for(model: TemporalModel, split: &ProtocolSplit) -> &GraphTimeSeries {
    match model.representation() {
        Representation::Tau => &split.tau_series,
        Representation::Epsilon => &split.epsilon_series,
    }
}

/// The static graphs a model contributes for embedding, oldest first.
pub fn build_model_graphs(
    model: TemporalModel,
    series: &GraphTimeSeries,
    config: &ExperimentConfig,
) -> Result<Vec<WeightedGraph>> {
    if series.is_empty() {
        return Err(Error::Empty(format!("{model} has no training snapshots")));
    }
    let universe = series.universe();
    Ok(match model.family() {
        ModelFamily::Snapshot => series
            .snapshots
            .iter()
            .map(|s| snapshot_graph(s, universe))
            .collect(),
        ModelFamily::Summary => {
            let params = config.tsg_params();
            match params.lag {
                Some(_) => tsg_series(series, &params)?,
                None => vec![build_tsg(series, &params)?],
            }
        }
        ModelFamily::WeightedReachability => {
            let opts = config.wtrg_options();
            series
                .snapshots
                .par_iter()
                .map(|s| build_wtrg(s, universe, opts))
                .collect()
        }
        ModelFamily::Reachability => series
            .snapshots
            .par_iter()
            .map(|s| build_trg(s, universe))
            .collect(),
        ModelFamily::Static => vec![static_model(series)],
    })
}

fn edge_count_profile(
    model: TemporalModel,
    series: &GraphTimeSeries,
    graphs: &[WeightedGraph],
) -> Vec<SnapshotCount> {
    match model.family() {
        ModelFamily::WeightedReachability | ModelFamily::Reachability => series
            .snapshots
            .iter()
            .zip(graphs)
            .map(|(s, g)| SnapshotCount {
                snapshot_index: s.index,
                edge_count: g.num_arcs(),
            })
            .collect(),
        _ => series
            .snapshots
            .iter()
            .map(|s| SnapshotCount {
                snapshot_index: s.index,
                edge_count: s.len(),
            })
            .collect(),
    }
}

fn run_cell(
    graphs: &[WeightedGraph],
    method: BaseMethod,
    config: &ExperimentConfig,
    pairs: &PairSplit,
) -> Result<(f64, f64, f64)> {
    let fusion = config.fusion_params();
    let dims = fusion.snapshot_dims(graphs.len(), config.embedding.dim)?;
    let mats = embed_series(graphs, method.name(), &dims, config.seeds.embedding)?;
    let z = fuse(&mats, &fusion)?;
    let features = |set: &[((NodeId, NodeId), bool)]| -> Result<(Vec<Vec<f64>>, Vec<bool>)> {
        let x = set
            .iter()
            .map(|&((i, j), _)| edge_embedding(&z, i, j))
            .collect::<Result<_>>()?;
        Ok((x, set.iter().map(|&(_, y)| y).collect()))
    };
    let (x_train, y_train) = features(&pairs.train)?;
    let (x_test, y_test) = features(&pairs.test)?;
    let model = train_logistic(&x_train, &y_train, &config.classifier)?;
    if !model.converged {
        log::warn!(
            "{method}: classifier stopped after {} iterations",
            model.iterations
        );
    }
    let probs: Vec<f64> = x_test.iter().map(|x| model.predict_proba(x)).collect();
    let s = evaluate_scores(&probs, &y_test)?;
    Ok((s.auc, s.acc, s.f1))
}

fn load_stream(config: &ExperimentConfig) -> Result<EdgeStream> {
    let stream = parse_edge_stream(&config.dataset.path, config.dataset.parse_options())?;
    if stream.skipped_lines > 0 {
        log::warn!("skipped {} malformed lines", stream.skipped_lines);
    }
    if stream.is_empty() {
        return Err(Error::Empty(format!(
            "{} holds no edges",
            config.dataset.path.display()
        )));
    }
    Ok(stream.canonicalize())
}

fn gain_tables(records: &[MetricRecord], methods: &[BaseMethod]) -> Vec<MethodGain> {
    let mut out = Vec::new();
    for m in methods {
        let present: Vec<TemporalModel> = TemporalModel::ALL
            .into_iter()
            .filter(|t| {
                records
                    .iter()
                    .any(|r| r.method == m.name() && r.model == t.name())
            })
            .collect();
        let variant = |t: &TemporalModel| format!("{}/{}", m.name(), t.name());
        let ours: Vec<String> = present
            .iter()
            .filter(|t| t.representation() == Representation::Epsilon)
            .map(variant)
            .collect();
        let baselines: Vec<String> = present
            .iter()
            .filter(|t| t.representation() == Representation::Tau)
            .map(variant)
            .collect();
        if ours.is_empty() || baselines.is_empty() {
            continue;
        }
        let ours: Vec<&str> = ours.iter().map(String::as_str).collect();
        let baselines: Vec<&str> = baselines.iter().map(String::as_str).collect();
        match mean_gain(records, &ours, &baselines) {
            Ok(table) => out.push(MethodGain {
                method: m.name().to_owned(),
                table,
            }),
            Err(e) => log::warn!("no gain table for {m}: {e}"),
        }
    }
    out
}

/// Runs the configured sweep. Config and dataset problems abort the run;
/// problems inside a (model, method) cell become [`CellFailure`]s.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut clock = Stopwatch::new();
    let stream = load_stream(config)?;
    clock.lap("load");
    run_with_clock(config, &stream, clock)
}

/// [`run_experiment`] on an in-memory stream; `dataset.path` is ignored.
pub fn run_on_stream(config: &ExperimentConfig, stream: &EdgeStream) -> Result<ExperimentReport> {
    config.validate_parameters()?;
    let stream = stream.clone().canonicalize();
    run_with_clock(config, &stream, Stopwatch::new())
}

fn run_with_clock(
    config: &ExperimentConfig,
    stream: &EdgeStream,
    mut clock: Stopwatch,
) -> Result<ExperimentReport> {
    let models = config.model_list()?;
    let methods = config.method_list()?;
    let dataset = config.dataset.display_name();

    let split = align_protocol_with(stream, &config.protocol.params())?;
    let candidates = candidate_nodes(&split);
    let labeled = LabeledEdgeSet::build(
        &split.test_snapshot,
        &candidates,
        stream.directed,
        config.seeds.sampling,
    )?;
    let pairs = split_pairs(
        &labeled,
        config.protocol.classifier_train_fraction,
        config.seeds.split,
    )?;
    let protocol = ProtocolSummary {
        tau_snapshots: split.tau_snapshots,
        start_offset: split.start_offset,
        test_snapshot: split.test_snapshot.index,
        epsilon: split.epsilon,
        tau_train_snapshots: split.tau_series.len(),
        epsilon_train_snapshots: split.epsilon_series.len(),
        positives: labeled.positives.len(),
        negatives: labeled.negatives.len(),
        classifier_train_pairs: pairs.train.len(),
        classifier_test_pairs: pairs.test.len(),
    };
    log::info!(
        "{dataset}: {} edges, {} tau-snapshots, test snapshot {}, epsilon {}",
        stream.len(),
        split.tau_snapshots,
        split.test_snapshot.index,
        split.epsilon
    );
    clock.lap("protocol");

    let graphs: Vec<Result<Vec<WeightedGraph>>> = models
        .par_iter()
        .map(|&m| build_model_graphs(m, series_for(m, &split), config))
        .collect();
    let mut edge_counts = BTreeMap::new();
    for (&m, g) in models.iter().zip(&graphs) {
        if let Ok(g) = g {
            edge_counts.insert(
                m.name().to_owned(),
                edge_count_profile(m, series_for(m, &split), g),
            );
        }
    }
    clock.lap("graphs");

    let cells: Vec<(usize, BaseMethod)> = (0..models.len())
        .flat_map(|i| methods.iter().map(move |&b| (i, b)))
        .collect();
    let outcomes: Vec<std::result::Result<MetricRecord, CellFailure>> = cells
        .par_iter()
        .map(|&(i, method)| {
            let model = models[i];
            let fail = |stage: &str, e: &Error| CellFailure {
                model: model.name().to_owned(),
                method: method.name().to_owned(),
                stage: stage.to_owned(),
                error: e.to_string(),
            };
            let g = graphs[i].as_ref().map_err(|e| fail("graphs", e))?;
            let (auc, acc, f1) =
                run_cell(g, method, config, &pairs).map_err(|e| fail("embed_evaluate", &e))?;
            Ok(MetricRecord {
                dataset: dataset.clone(),
                method: method.name().to_owned(),
                model: model.name().to_owned(),
                auc,
                acc,
                f1,
            })
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(f) => {
                log::error!(
                    "{} / {} failed during {}: {}",
                    f.model,
                    f.method,
                    f.stage,
                    f.error
                );
                failures.push(f);
            }
        }
    }
    clock.lap("embed_evaluate");

    let complete: Vec<MetricRecord> = records
        .iter()
        .filter(|r| {
            methods.iter().all(|m| {
                records
                    .iter()
                    .any(|o| o.model == r.model && o.method == m.name())
            })
        })
        .cloned()
        .collect();
    let rank_table = if complete.is_empty() {
        RankTable::default()
    } else {
        rank_models(&complete)?
    };
    let gains = gain_tables(&records, &methods);
    clock.lap("tables");

    let total_seconds = clock.start.elapsed().as_secs_f64();
    Ok(ExperimentReport {
        dataset,
        config: config.clone(),
        protocol,
        records,
        failures,
        rank_table,
        gains,
        edge_counts,
        timings: clock.timings,
        total_seconds,
    })
}

/// Edge-count profiles over the whole stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub dataset: String,
    pub tau: f64,
    pub epsilon: usize,
    pub dropped_edges: usize,
    pub profiles: BTreeMap<String, Vec<SnapshotCount>>,
}

/// Snapshot and WTRG edge counts for both representations over the full
/// stream. Epsilon is the hold-out size the protocol would pick, or the mean
/// non-empty tau-snapshot size when the stream is too short for it.
pub fn profile(config: &ExperimentConfig) -> Result<ProfileReport> {
    config.validate()?;
    let stream = load_stream(config)?;
    let tau_series = partition_tau(&stream, config.protocol.tau)?;
    let epsilon = match align_protocol_with(&stream, &config.protocol.params()) {
        Ok(split) => split.epsilon,
        Err(e) => {
            let counts: Vec<usize> = tau_series
                .snapshots
                .iter()
                .map(|s| s.len())
                .filter(|&c| c > 0)
                .collect();
            let mean =
                (counts.iter().sum::<usize>() as f64 / counts.len().max(1) as f64).round() as usize;
            log::warn!("protocol alignment failed ({e}); using the mean snapshot size {mean}");
            mean.max(1)
        }
    };
    let eps_series = partition_epsilon(&stream, epsilon)?;
    let mut profiles = BTreeMap::new();
    for model in [
        TemporalModel::SgTau,
        TemporalModel::SgEps,
        TemporalModel::WtrgTau,
        TemporalModel::WtrgEps,
    ] {
        let series = match model.representation() {
            Representation::Tau => &tau_series,
            Representation::Epsilon => &eps_series,
        };
        let graphs = match model.family() {
            ModelFamily::WeightedReachability => build_model_graphs(model, series, config)?,
            _ => Vec::new(),
        };
        profiles.insert(
            model.name().to_owned(),
            edge_count_profile(model, series, &graphs),
        );
    }
    Ok(ProfileReport {
        dataset: config.dataset.display_name(),
        tau: config.protocol.tau,
        epsilon,
        dropped_edges: eps_series.dropped_edges,
        profiles,
    })
}
