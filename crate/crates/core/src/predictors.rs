//! Node scores for future link gain.
//!
//! Every predictor reads only the snapshot at `t` and in-link events from
//! the past window `[t - past, t)`. The hybrid models multiply or mix a
//! structural centrality (PageRank) with a dynamic one, the decayed recent
//! activity
//!
//! ```text
//! a_n = sum over in-links of n at t_n in [t - past, t) of exp(gamma * (t_n - t))
//! ```
//!
//! With `gamma >= 0` and `t_n < t` each term lies in `(0, 1]`, so recent
//! links weigh most and `gamma = 0` counts links.
//!
//! | variant    | raw score                          | normalized |
//! |------------|------------------------------------|------------|
//! | `m1`       | `PR_n * a_n`                       | yes        |
//! | `m2`       | `PR_n * (1 + P_n)`                 | yes        |
//! | `m3`       | `delta * PR_n + (1 - delta) * P_n` | yes        |
//! | `pbp`      | `k_n(t) - lambda * k_n(t - past)`  | no         |
//! | `pagerank` | `PR_n`                             | yes        |
//! | `recent`   | `k_n(t) - k_n(t - past)`           | no         |
//!
//! `P_n = a_n / sum_m a_m` (all zero when nothing happened in the window).

use std::cmp::Ordering;
use std::fmt;

use crate::blocks;
use crate::error::{Error, Result};
use crate::graph::{TemporalGraph, WindowConfig};
use crate::pagerank::{PageRankConfig, PageRankVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    M1 { gamma: f64 },
    M2 { gamma: f64 },
    M3 { gamma: f64, delta: f64 },
    Pbp { lambda: f64 },
    PageRankOnly,
    RecentDegree,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::M1 { .. } => "m1",
            Variant::M2 { .. } => "m2",
            Variant::M3 { .. } => "m3",
            Variant::Pbp { .. } => "pbp",
            Variant::PageRankOnly => "pagerank",
            Variant::RecentDegree => "recent",
        }
    }

    pub fn uses_pagerank(&self) -> bool {
        matches!(
            self,
            Variant::M1 { .. } | Variant::M2 { .. } | Variant::M3 { .. } | Variant::PageRankOnly
        )
    }

    /// Decay rate the variant needs in its [`ActivitySummary`]. Variants
    /// that only count links accept a summary built with any rate.
    pub fn gamma(&self) -> Option<f64> {
        match *self {
            Variant::M1 { gamma } | Variant::M2 { gamma } | Variant::M3 { gamma, .. } => {
                Some(gamma)
            }
            _ => None,
        }
    }
}

/// A predictor variant plus the PageRank settings it uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorSpec {
    pub variant: Variant,
    pub pagerank: PageRankConfig,
}

impl PredictorSpec {
    pub fn new(variant: Variant, alpha: f64) -> Self {
        Self {
            variant,
            pagerank: PageRankConfig::with_alpha(alpha),
        }
    }

    pub fn name(&self) -> &'static str {
        self.variant.name()
    }

    /// Parameters as `key=value` pairs joined by `;`, e.g. `gamma=0.1;alpha=0.1`.
    pub fn params(&self) -> String {
        let alpha = self.pagerank.alpha;
        match self.variant {
            Variant::M1 { gamma } | Variant::M2 { gamma } => format!("gamma={gamma};alpha={alpha}"),
            Variant::M3 { gamma, delta } => format!("gamma={gamma};alpha={alpha};delta={delta}"),
            Variant::Pbp { lambda } => format!("lambda={lambda}"),
            Variant::PageRankOnly => format!("alpha={alpha}"),
            Variant::RecentDegree => String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be in [0, 1], got {x}")))
            }
        };
        if let Some(gamma) = self.variant.gamma() {
            if !(gamma >= 0.0 && gamma.is_finite()) {
                return Err(Error::invalid(format!(
                    "gamma must be finite and >= 0, got {gamma}"
                )));
            }
        }
        match self.variant {
            Variant::M3 { delta, .. } => unit("delta", delta)?,
            Variant::Pbp { lambda } => unit("lambda", lambda)?,
            _ => {}
        }
        if self.variant.uses_pagerank() {
            self.pagerank.validate()?;
        }
        Ok(())
    }
}

impl fmt::Display for PredictorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            f.write_str(self.name())
        } else {
            write!(f, "{}[{}]", self.name(), params)
        }
    }
}

/// Per-node prediction scores over the snapshot's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    /// The constant the raw scores were multiplied by to sum to one, if the
    /// variant normalizes.
    pub normalization: Option<f64>,
    /// Set when a normalizing variant produced an all-zero raw vector.
    pub degenerate: bool,
}

impl ScoreVector {
    pub fn raw(scores: Vec<f64>) -> Self {
        Self {
            scores,
            normalization: None,
            degenerate: false,
        }
    }

    /// Scales `raw` to sum to one. An all-zero input is returned as zeros
    /// with the degenerate flag set.
    pub fn normalized(mut raw: Vec<f64>) -> Self {
        let total = blocks::sum(&raw);
        if total > 0.0 {
            for x in &mut raw {
                *x /= total;
            }
            Self {
                scores: raw,
                normalization: Some(1.0 / total),
                degenerate: false,
            }
        } else {
            raw.iter_mut().for_each(|x| *x = 0.0);
            Self {
                scores: raw,
                normalization: None,
                degenerate: true,
            }
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Per-node in-link statistics for one reference time and past window.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivitySummary {
    pub gamma: f64,
    /// Decayed activity `a_n`.
    pub decayed: Vec<f64>,
    /// Links received in the past window, `k_n(t) - k_n(t - past)`.
    pub window_gain: Vec<u32>,
    /// `k_n(t)`.
    pub degree_now: Vec<u32>,
    /// `k_n(t - past)`.
    pub degree_before: Vec<u32>,
}

impl ActivitySummary {
    pub fn node_count(&self) -> usize {
        self.decayed.len()
    }

    /// `P_n = a_n / sum a`, or all zeros when the window saw no links.
    pub fn activity_probability(&self) -> Vec<f64> {
        let total = blocks::sum(&self.decayed);
        if total > 0.0 {
            self.decayed.iter().map(|a| a / total).collect()
        } else {
            vec![0.0; self.decayed.len()]
        }
    }
}

/// Builds the activity summary for the nodes of `snapshot_at(window.t)`.
pub fn activity_summary(
    graph: &TemporalGraph,
    window: &WindowConfig,
    gamma: f64,
) -> ActivitySummary {
    let t = window.t;
    let from = window.past_start();
    let n = graph.nodes_before(t);
    let mut summary = ActivitySummary {
        gamma,
        decayed: Vec::with_capacity(n),
        window_gain: Vec::with_capacity(n),
        degree_now: Vec::with_capacity(n),
        degree_before: Vec::with_capacity(n),
    };
    for node in 0..n {
        let times = graph.in_times(node);
        let before = times.partition_point(|&x| x < from);
        let now = times.partition_point(|&x| x < t).max(before);
        let decayed = times[before..now]
            .iter()
            .map(|&tn| (gamma * (tn - t)).exp())
            .sum();
        summary.decayed.push(decayed);
        summary.window_gain.push((now - before) as u32);
        summary.degree_now.push(now as u32);
        summary.degree_before.push(before as u32);
    }
    summary
}

/// Generic hybrid `structural_n * dynamic_n`, normalized to sum one.
pub fn hybrid_product(structural: &[f64], dynamic: &[f64]) -> ScoreVector {
    assert_eq!(
        structural.len(),
        dynamic.len(),
        "score vectors cover different node sets"
    );
    ScoreVector::normalized(structural.iter().zip(dynamic).map(|(s, d)| s * d).collect())
}

pub fn score_m1(summary: &ActivitySummary, pagerank: &PageRankVector) -> ScoreVector {
    hybrid_product(&pagerank.scores, &summary.decayed)
}

pub fn score_m2(summary: &ActivitySummary, pagerank: &PageRankVector) -> ScoreVector {
    assert_eq!(
        summary.node_count(),
        pagerank.len(),
        "score vectors cover different node sets"
    );
    let p = summary.activity_probability();
    ScoreVector::normalized(
        pagerank
            .scores
            .iter()
            .zip(&p)
            .map(|(pr, p)| pr * (1.0 + p))
            .collect(),
    )
}

pub fn score_m3(summary: &ActivitySummary, pagerank: &PageRankVector, delta: f64) -> ScoreVector {
    assert_eq!(
        summary.node_count(),
        pagerank.len(),
        "score vectors cover different node sets"
    );
    let p = summary.activity_probability();
    ScoreVector::normalized(
        pagerank
            .scores
            .iter()
            .zip(&p)
            .map(|(pr, p)| delta * pr + (1.0 - delta) * p)
            .collect(),
    )
}

/// Popularity baseline `k(t) - lambda * k(t - past)`; unnormalized.
pub fn score_pbp(summary: &ActivitySummary, lambda: f64) -> ScoreVector {
    ScoreVector::raw(
        summary
            .degree_now
            .iter()
            .zip(&summary.degree_before)
            .map(|(&now, &before)| now as f64 - lambda * before as f64)
            .collect(),
    )
}

pub fn score_pagerank(pagerank: &PageRankVector) -> ScoreVector {
    ScoreVector::normalized(pagerank.scores.clone())
}

pub fn score_recent_degree(summary: &ActivitySummary) -> ScoreVector {
    ScoreVector::raw(summary.window_gain.iter().map(|&k| k as f64).collect())
}

/// Inputs a predictor may read, all computed from data before `t`.
#[derive(Debug, Clone, Copy)]
pub struct PredictionInputs<'a> {
    pub summary: &'a ActivitySummary,
    pub pagerank: Option<&'a PageRankVector>,
}

pub trait Predictor {
    fn score(&self, inputs: PredictionInputs<'_>) -> Result<ScoreVector>;
}

impl Predictor for PredictorSpec {
    fn score(&self, inputs: PredictionInputs<'_>) -> Result<ScoreVector> {
        let summary = inputs.summary;
        let pagerank = || {
            inputs
                .pagerank
                .ok_or_else(|| Error::invalid(format!("{} needs a PageRank vector", self.name())))
        };
        if let Some(gamma) = self.variant.gamma() {
            if gamma.to_bits() != summary.gamma.to_bits() {
                return Err(Error::invalid(format!(
                    "{} expects an activity summary with gamma={gamma}, got {}",
                    self.name(),
                    summary.gamma
                )));
            }
        }
        Ok(match self.variant {
            Variant::M1 { .. } => score_m1(summary, pagerank()?),
            Variant::M2 { .. } => score_m2(summary, pagerank()?),
            Variant::M3 { delta, .. } => score_m3(summary, pagerank()?, delta),
            Variant::Pbp { lambda } => score_pbp(summary, lambda),
            Variant::PageRankOnly => score_pagerank(pagerank()?),
            Variant::RecentDegree => score_recent_degree(summary),
        })
    }
}

/// Scores every node of `snapshot_at(t)` using the past window `[t - past, t)`.
pub fn predict(
    graph: &TemporalGraph,
    t: f64,
    past: f64,
    spec: &PredictorSpec,
) -> Result<ScoreVector> {
    spec.validate()?;
    let window = WindowConfig::new(t, past, 1.0)?;
    let summary = activity_summary(graph, &window, spec.variant.gamma().unwrap_or(0.0));
    let pagerank = if spec.variant.uses_pagerank() {
        Some(crate::pagerank::pagerank(
            &graph.snapshot_at(t),
            &spec.pagerank,
        )?)
    } else {
        None
    };
    spec.score(PredictionInputs {
        summary: &summary,
        pagerank: pagerank.as_ref(),
    })
}

/// Orders by score descending, ties by ascending index.
fn by_score(scores: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b))
}

/// Indices of the `n` best-scored nodes, best first; ties go to the lower
/// index. Returns every node when `n` exceeds the node count.
pub fn rank(scores: &[f64], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    let cmp = by_score(scores);
    if n == 0 {
        return Vec::new();
    }
    if n < order.len() {
        order.select_nth_unstable_by(n - 1, &cmp);
        order.truncate(n);
    }
    order.sort_unstable_by(&cmp);
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeList;

    fn summary(decayed: Vec<f64>) -> ActivitySummary {
        let n = decayed.len();
        ActivitySummary {
            gamma: 0.1,
            decayed,
            window_gain: vec![0; n],
            degree_now: vec![0; n],
            degree_before: vec![0; n],
        }
    }

    fn pr(scores: Vec<f64>) -> PageRankVector {
        PageRankVector {
            scores,
            iterations: 1,
            residual: 0.0,
        }
    }

    fn star_graph() -> TemporalGraph {
        // hub "h" is old; "w" gets two links just before t = 100
        TemporalGraph::build(EdgeList::from_named([
            ("a", "h", 0.0),
            ("b", "h", 1.0),
            ("c", "h", 2.0),
            ("a", "w", 80.0),
            ("b", "w", 90.0),
            ("c", "w", 99.9999),
        ]))
        .unwrap()
    }

    #[test]
    fn single_event_ten_days_back() {
        let g = TemporalGraph::build(EdgeList::from_named([("a", "b", 90.0)])).unwrap();
        let w = WindowConfig::new(100.0, 30.0, 30.0).unwrap();
        let s = activity_summary(&g, &w, 0.1);
        assert!((s.decayed[1] - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert_eq!(s.decayed[0], 0.0);
    }

    #[test]
    fn zero_decay_counts_window_links() {
        let g = star_graph();
        let w = WindowConfig::new(100.0, 30.0, 30.0).unwrap();
        let s = activity_summary(&g, &w, 0.0);
        for n in 0..s.node_count() {
            assert_eq!(s.decayed[n], s.window_gain[n] as f64);
            assert_eq!(s.window_gain[n], s.degree_now[n] - s.degree_before[n]);
        }
        let w_idx = g.index_of("w").unwrap();
        assert_eq!(s.window_gain[w_idx], 3);
        assert_eq!(s.degree_now[g.index_of("h").unwrap()], 3);
        assert_eq!(s.window_gain[g.index_of("h").unwrap()], 0);
    }

    #[test]
    fn m1_raw_product() {
        let a = (-0.00001f64).exp() + (-1.0f64).exp();
        let s = summary(vec![a, 0.0]);
        let p = pr(vec![0.2, 0.8]);
        let v = score_m1(&s, &p);
        assert!((1.0 / v.normalization.unwrap() - 0.273_573_888_244_288_4).abs() < 1e-12);
        assert_eq!(v.scores, vec![1.0, 0.0]);
    }

    #[test]
    fn m1_is_linear_in_activity() {
        let v = score_m1(&summary(vec![1.0, 2.0]), &pr(vec![0.5, 0.5]));
        assert!((v.scores[1] - 2.0 * v.scores[0]).abs() < 1e-15);
    }

    #[test]
    fn m1_without_activity_is_degenerate() {
        let v = score_m1(&summary(vec![0.0, 0.0, 0.0]), &pr(vec![0.2, 0.3, 0.5]));
        assert!(v.degenerate);
        assert_eq!(v.scores, vec![0.0; 3]);
        assert_eq!(rank(&v.scores, 3), vec![0, 1, 2]);
    }

    #[test]
    fn m2_two_node_case() {
        let v = score_m2(&summary(vec![1.0, 0.0]), &pr(vec![0.5, 0.5]));
        assert!((v.scores[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((v.scores[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn m2_lets_an_active_weak_node_win() {
        // 0.3 * (1 + 0.9) = 0.57 > 0.5
        let weak_vs_hub = score_m2(&summary(vec![0.9, 0.0, 0.1]), &pr(vec![0.3, 0.5, 0.2]));
        assert_eq!(rank(&weak_vs_hub.scores, 1), vec![0]);
    }

    #[test]
    fn m3_mixture() {
        let s = summary(vec![1.0, 3.0]);
        let v = score_m3(&s, &pr(vec![0.6, 0.4]), 0.5);
        assert!((1.0 / v.normalization.unwrap() - 1.0).abs() < 1e-15);
        assert!((v.scores[0] - 0.425).abs() < 1e-15);
        assert!((v.scores[1] - 0.575).abs() < 1e-15);
    }

    #[test]
    fn pbp_endpoints() {
        let s = ActivitySummary {
            gamma: 0.0,
            decayed: vec![3.0],
            window_gain: vec![3],
            degree_now: vec![10],
            degree_before: vec![7],
        };
        assert_eq!(score_pbp(&s, 1.0).scores, vec![3.0]);
        assert_eq!(score_pbp(&s, 0.0).scores, vec![10.0]);
        assert_eq!(score_pbp(&s, 0.5).scores, vec![6.5]);
        assert_eq!(score_pbp(&s, 1.0), score_recent_degree(&s));
    }

    #[test]
    fn rank_orders_and_breaks_ties_by_index() {
        assert_eq!(rank(&[0.2, 0.5, 0.3], 2), vec![1, 2]);
        assert_eq!(rank(&[0.5, 0.5], 1), vec![0]);
        assert_eq!(rank(&[0.1, 0.3, 0.2], 10), vec![1, 2, 0]);
        assert_eq!(rank(&[1.0, 3.0, 3.0, 2.0, 3.0], 3), vec![1, 2, 4]);
        assert!(rank(&[1.0], 0).is_empty());
    }

    #[test]
    fn score_checks_inputs() {
        let s = summary(vec![1.0]);
        let spec = PredictorSpec::new(Variant::M1 { gamma: 0.1 }, 0.1);
        let missing = spec.score(PredictionInputs {
            summary: &s,
            pagerank: None,
        });
        assert!(missing.is_err());
        let wrong_gamma =
            PredictorSpec::new(Variant::M2 { gamma: 0.5 }, 0.1).score(PredictionInputs {
                summary: &s,
                pagerank: Some(&pr(vec![1.0])),
            });
        assert!(wrong_gamma.is_err());
    }

    #[test]
    fn validate_rejects_out_of_range() {
        assert!(PredictorSpec::new(
            Variant::M3 {
                gamma: 0.1,
                delta: 1.2
            },
            0.1
        )
        .validate()
        .is_err());
        assert!(PredictorSpec::new(Variant::Pbp { lambda: -0.1 }, 0.1)
            .validate()
            .is_err());
        assert!(PredictorSpec::new(Variant::M1 { gamma: -1.0 }, 0.1)
            .validate()
            .is_err());
        assert!(PredictorSpec::new(Variant::PageRankOnly, 2.0)
            .validate()
            .is_err());
        assert!(PredictorSpec::new(Variant::RecentDegree, 2.0)
            .validate()
            .is_ok());
    }

    #[test]
    fn spec_labels() {
        let spec = PredictorSpec::new(
            Variant::M3 {
                gamma: 0.1,
                delta: 0.3,
            },
            0.1,
        );
        assert_eq!(spec.params(), "gamma=0.1;alpha=0.1;delta=0.3");
        assert_eq!(spec.to_string(), "m3[gamma=0.1;alpha=0.1;delta=0.3]");
        assert_eq!(
            PredictorSpec::new(Variant::RecentDegree, 0.1).to_string(),
            "recent"
        );
    }

    #[test]
    fn predict_end_to_end_prefers_the_active_node() {
        let g = star_graph();
        let spec = PredictorSpec::new(Variant::M1 { gamma: 0.1 }, 0.1);
        let v = predict(&g, 100.0, 30.0, &spec).unwrap();
        let top = rank(&v.scores, 1)[0];
        assert_eq!(g.id(top), "w");
        let total: f64 = v.scores.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
