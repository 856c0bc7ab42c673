//! Timestamped edge store and strict-before snapshots.
//!
//! Times are real-valued days. Windows are half-open: the past window of a
//! reference time `t` is `[t - past, t)` and the future window is
//! `[t, t + future)`, so the two never share an event.

use crate::error::{Error, Result};

/// One directed link event `source -> target` at `time` days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalEdge {
    pub source: u32,
    pub target: u32,
    pub time: f64,
}

impl TemporalEdge {
    pub fn new(source: u32, target: u32, time: f64) -> Self {
        Self {
            source,
            target,
            time,
        }
    }
}

/// Edges together with the original identifiers of their endpoints.
///
/// `ids[i]` is the external name of node index `i`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeList {
    pub ids: Vec<String>,
    pub edges: Vec<TemporalEdge>,
}

impl EdgeList {
    /// Builds an edge list from `(source, target, time)` triples with string
    /// identifiers, registering ids in order of first appearance.
    pub fn from_named<S: AsRef<str>>(triples: impl IntoIterator<Item = (S, S, f64)>) -> Self {
        let mut registry = std::collections::HashMap::new();
        let mut list = EdgeList::default();
        let mut intern = |name: &str, list: &mut EdgeList| -> u32 {
            *registry.entry(name.to_owned()).or_insert_with(|| {
                list.ids.push(name.to_owned());
                (list.ids.len() - 1) as u32
            })
        };
        for (s, t, time) in triples {
            let source = intern(s.as_ref(), &mut list);
            let target = intern(t.as_ref(), &mut list);
            list.edges.push(TemporalEdge::new(source, target, time));
        }
        list
    }
}

/// Reference time plus past and future window lengths, all in days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConfig {
    pub t: f64,
    pub past: f64,
    pub future: f64,
}

impl WindowConfig {
    pub fn new(t: f64, past: f64, future: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::invalid(format!(
                "reference time must be finite, got {t}"
            )));
        }
        if !(past > 0.0 && past.is_finite()) {
            return Err(Error::invalid(format!(
                "past window must be > 0, got {past}"
            )));
        }
        if !(future > 0.0 && future.is_finite()) {
            return Err(Error::invalid(format!(
                "future window must be > 0, got {future}"
            )));
        }
        Ok(Self { t, past, future })
    }

    pub fn past_start(&self) -> f64 {
        self.t - self.past
    }

    pub fn future_end(&self) -> f64 {
        self.t + self.future
    }

    /// Checks that both windows lie inside the dataset's time span.
    pub fn check_within(&self, graph: &TemporalGraph) -> Result<()> {
        let (start, end) = (graph.start_time(), graph.end_time());
        if self.past_start() < start || self.future_end() > end {
            let span = end - start;
            return Err(Error::InfeasibleWindow {
                past: self.past,
                future: self.future,
                span,
                max_equal_window: span / 2.0,
            });
        }
        Ok(())
    }
}

/// Immutable time-sorted edge stream with a dense node registry.
///
/// Node indices are assigned in order of first appearance in the sorted
/// stream, so the nodes that exist before any time `t` always form the
/// index prefix `0..nodes_before(t)`.
#[derive(Debug, Clone)]
pub struct TemporalGraph {
    ids: Vec<String>,
    first_seen: Vec<f64>,
    edges: Vec<TemporalEdge>,
    in_offsets: Vec<usize>,
    in_times: Vec<f64>,
}

impl TemporalGraph {
    /// Builds the graph, sorting edges by time (ties by source id, then
    /// target id) and re-indexing nodes by first appearance.
    ///
    /// Repeated `a -> b` events are kept as separate edges.
    pub fn build(list: EdgeList) -> Result<Self> {
        let EdgeList { ids, mut edges } = list;
        if edges.is_empty() {
            return Err(Error::EmptyDataset("edge list is empty".into()));
        }
        for e in &edges {
            if e.source as usize >= ids.len() || e.target as usize >= ids.len() {
                return Err(Error::invalid(format!(
                    "edge {} -> {} references an unregistered node ({} ids)",
                    e.source,
                    e.target,
                    ids.len()
                )));
            }
            if !(e.time.is_finite() && e.time >= 0.0) {
                return Err(Error::invalid(format!(
                    "edge time must be finite and non-negative, got {}",
                    e.time
                )));
            }
        }

        edges.sort_by(|a, b| {
            a.time
                .total_cmp(&b.time)
                .then_with(|| ids[a.source as usize].cmp(&ids[b.source as usize]))
                .then_with(|| ids[a.target as usize].cmp(&ids[b.target as usize]))
        });

        const UNSEEN: u32 = u32::MAX;
        let mut remap = vec![UNSEEN; ids.len()];
        let mut new_ids = Vec::new();
        let mut first_seen = Vec::new();
        for e in &mut edges {
            for endpoint in [&mut e.source, &mut e.target] {
                let slot = &mut remap[*endpoint as usize];
                if *slot == UNSEEN {
                    *slot = new_ids.len() as u32;
                    new_ids.push(ids[*endpoint as usize].clone());
                    first_seen.push(e.time);
                }
                *endpoint = *slot;
            }
        }

        let n = new_ids.len();
        let mut in_offsets = vec![0usize; n + 1];
        for e in &edges {
            in_offsets[e.target as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut cursor = in_offsets.clone();
        let mut in_times = vec![0.0; edges.len()];
        // edges are time-sorted, so each node's slice comes out sorted
        for e in &edges {
            let slot = &mut cursor[e.target as usize];
            in_times[*slot] = e.time;
            *slot += 1;
        }

        Ok(Self {
            ids: new_ids,
            first_seen,
            edges,
            in_offsets,
            in_times,
        })
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn start_time(&self) -> f64 {
        self.edges[0].time
    }

    pub fn end_time(&self) -> f64 {
        self.edges[self.edges.len() - 1].time
    }

    /// Number of nodes that took part in at least one edge with time `< t`.
    pub fn nodes_before(&self, t: f64) -> usize {
        self.first_seen.partition_point(|&s| s < t)
    }

    /// Number of edges with time `< t`.
    pub fn edges_before(&self, t: f64) -> usize {
        self.edges.partition_point(|e| e.time < t)
    }

    /// All in-link event times of `node`, ascending.
    pub fn in_times(&self, node: usize) -> &[f64] {
        if node >= self.node_count() {
            return &[];
        }
        &self.in_times[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    /// In-link event times of `node` inside `[from, to)`, ascending.
    ///
    /// Unknown nodes and empty or inverted intervals yield an empty slice.
    pub fn window_in_events(&self, node: usize, from: f64, to: f64) -> &[f64] {
        if from.partial_cmp(&to).is_none_or(|o| o.is_gt()) {
            return &[];
        }
        let times = self.in_times(node);
        let lo = times.partition_point(|&x| x < from);
        let hi = times.partition_point(|&x| x < to);
        &times[lo..hi.max(lo)]
    }

    /// In-degree `k_n(t)`: in-link events of `node` strictly before `t`.
    pub fn in_degree_before(&self, node: usize, t: f64) -> usize {
        self.in_times(node).partition_point(|&x| x < t)
    }

    /// The network made of every edge with time strictly before `t`.
    pub fn snapshot_at(&self, t: f64) -> Snapshot {
        let edge_count = self.edges_before(t);
        let n = self.nodes_before(t);
        let prefix = &self.edges[..edge_count];

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_degree = vec![0u32; n];
        for e in prefix {
            out_offsets[e.source as usize + 1] += 1;
            in_degree[e.target as usize] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut cursor = out_offsets.clone();
        let mut out_targets = vec![0u32; edge_count];
        for e in prefix {
            let slot = &mut cursor[e.source as usize];
            out_targets[*slot] = e.target;
            *slot += 1;
        }
        for j in 0..n {
            out_targets[out_offsets[j]..out_offsets[j + 1]].sort_unstable();
        }

        Snapshot {
            time: t,
            node_count: n,
            out_offsets,
            out_targets,
            in_degree,
        }
    }
}

/// Network state strictly before a reference time.
///
/// Holds nodes `0..node_count()` of the parent graph. Out-adjacency keeps
/// repeated links; each node's targets are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    time: f64,
    node_count: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_degree: Vec<u32>,
}

impl Snapshot {
    /// Builds a snapshot directly from index edges over `node_count` nodes.
    /// Every edge is included regardless of its time.
    pub fn from_edges(node_count: usize, edges: &[(u32, u32)]) -> Self {
        let mut out_offsets = vec![0usize; node_count + 1];
        let mut in_degree = vec![0u32; node_count];
        for &(s, t) in edges {
            assert!((s as usize) < node_count && (t as usize) < node_count);
            out_offsets[s as usize + 1] += 1;
            in_degree[t as usize] += 1;
        }
        for i in 0..node_count {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut cursor = out_offsets.clone();
        let mut out_targets = vec![0u32; edges.len()];
        for &(s, t) in edges {
            out_targets[cursor[s as usize]] = t;
            cursor[s as usize] += 1;
        }
        for j in 0..node_count {
            out_targets[out_offsets[j]..out_offsets[j + 1]].sort_unstable();
        }
        Self {
            time: f64::INFINITY,
            node_count,
            out_offsets,
            out_targets,
            in_degree,
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Targets of `node`'s out-links, with multiplicity, ascending.
    pub fn out_links(&self, node: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[node]..self.out_offsets[node + 1]]
    }

    pub fn in_degree(&self, node: usize) -> u32 {
        self.in_degree[node]
    }

    pub fn in_degrees(&self) -> &[u32] {
        &self.in_degree
    }

    /// All `(source, target)` pairs, grouped by source.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.node_count)
            .flat_map(move |j| self.out_links(j).iter().map(move |&t| (j as u32, t)))
    }
}
