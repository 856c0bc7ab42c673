//! Accuracy of a predicted ranking against the links nodes actually gain.
//!
//! All lists here are top-`n` node index lists produced by
//! [`rank`](crate::predictors::rank). Metrics that can be undefined for a
//! given input (no novel nodes, no negatives, no comparable pairs) come back
//! as `Err(NullReason)` instead of a made-up number.

use std::collections::HashSet;
use std::fmt;

use crate::predictors::{rank, ScoreVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NullReason {
    NoNodes,
    /// Every true top node was already in the past top list.
    NoNovelItems,
    NoPositives,
    /// The true top list covers every node, so nothing can rank below it.
    NoNegatives,
    /// Every pair is tied in at least one of the two rankings.
    NoComparablePairs,
}

impl NullReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            NullReason::NoNodes => "no_nodes",
            NullReason::NoNovelItems => "no_novel_items",
            NullReason::NoPositives => "no_positives",
            NullReason::NoNegatives => "no_negatives",
            NullReason::NoComparablePairs => "no_comparable_pairs",
        }
    }
}

impl fmt::Display for NullReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type Metric = Result<f64, NullReason>;

/// How Kendall's tau treats tied pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauVariant {
    /// `(C - D) / (C + D)`: pairs tied in either ranking are left out
    /// entirely.
    #[default]
    Gamma,
    /// `(C - D) / sqrt((n0 - n1) (n0 - n2))` with tie corrections.
    B,
}

impl TauVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            TauVariant::Gamma => "gamma",
            TauVariant::B => "b",
        }
    }
}

impl std::str::FromStr for TauVariant {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gamma" => Ok(TauVariant::Gamma),
            "b" | "tau-b" => Ok(TauVariant::B),
            other => Err(crate::Error::InvalidConfig(format!(
                "unknown tau variant {other:?} (expected gamma or b)"
            ))),
        }
    }
}

/// `|predicted ∩ true| / n`.
pub fn precision(predicted_top: &[usize], true_top: &[usize], n: usize) -> Metric {
    if n == 0 {
        return Err(NullReason::NoNodes);
    }
    let truth: HashSet<usize> = true_top.iter().copied().collect();
    let hits = predicted_top.iter().filter(|i| truth.contains(i)).count();
    Ok(hits as f64 / n as f64)
}

/// Share of the novel true top nodes (those absent from `past_top`) that the
/// predicted list recovers.
pub fn novelty(predicted_top: &[usize], true_top: &[usize], past_top: &[usize]) -> Metric {
    let past: HashSet<usize> = past_top.iter().copied().collect();
    let novel: HashSet<usize> = true_top
        .iter()
        .copied()
        .filter(|i| !past.contains(i))
        .collect();
    if novel.is_empty() {
        return Err(NullReason::NoNovelItems);
    }
    let hits = predicted_top.iter().filter(|i| novel.contains(i)).count();
    Ok(hits as f64 / novel.len() as f64)
}

/// Probability that a true top node outscores a node outside the true top
/// list, counting ties as one half.
pub fn auc(scores: &[f64], true_top: &[usize]) -> Metric {
    let positive: HashSet<usize> = true_top.iter().copied().collect();
    if positive.is_empty() {
        return Err(NullReason::NoPositives);
    }
    let mut negatives: Vec<f64> = (0..scores.len())
        .filter(|i| !positive.contains(i))
        .map(|i| scores[i])
        .collect();
    if negatives.is_empty() {
        return Err(NullReason::NoNegatives);
    }
    negatives.sort_unstable_by(f64::total_cmp);

    // twice the credit, so ties stay integral
    let mut credit: u64 = 0;
    for &p in &positive {
        let s = scores[p];
        let below = negatives.partition_point(|&x| x < s);
        let not_above = negatives.partition_point(|&x| x <= s);
        credit += 2 * below as u64 + (not_above - below) as u64;
    }
    let pairs = positive.len() as u64 * negatives.len() as u64;
    Ok(credit as f64 / (2 * pairs) as f64)
}

/// Kendall rank correlation between two score vectors in `O(n log n)`
/// (Knight's merge-sort count).
pub fn kendall_tau(predicted: &[f64], truth: &[f64], variant: TauVariant) -> Metric {
    assert_eq!(
        predicted.len(),
        truth.len(),
        "score vectors cover different node sets"
    );
    let n = predicted.len();
    if n < 2 {
        return Err(NullReason::NoComparablePairs);
    }

    // `+ 0.0` folds -0.0 into 0.0 so `total_cmp` ties agree with `==`
    let predicted: Vec<f64> = predicted.iter().map(|x| x + 0.0).collect();
    let truth: Vec<f64> = truth.iter().map(|x| x + 0.0).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        predicted[a]
            .total_cmp(&predicted[b])
            .then(truth[a].total_cmp(&truth[b]))
    });

    let pairs = |run: u64| run * (run - 1) / 2;
    let tied_runs = |values: &mut dyn Iterator<Item = (f64, f64)>, joint: bool| -> u64 {
        let mut total = 0;
        let mut run = 0u64;
        let mut prev: Option<(f64, f64)> = None;
        for cur in values {
            let same = prev.is_some_and(|p| {
                p.0.total_cmp(&cur.0).is_eq() && (!joint || p.1.total_cmp(&cur.1).is_eq())
            });
            if same {
                run += 1;
            } else {
                total += if run > 0 { pairs(run) } else { 0 };
                run = 1;
            }
            prev = Some(cur);
        }
        total + if run > 0 { pairs(run) } else { 0 }
    };

    let ties_predicted = tied_runs(&mut order.iter().map(|&i| (predicted[i], 0.0)), false);
    let ties_joint = tied_runs(&mut order.iter().map(|&i| (predicted[i], truth[i])), true);

    let mut ys: Vec<f64> = order.iter().map(|&i| truth[i]).collect();
    let mut buffer = vec![0.0; n];
    let discordant = count_inversions(&mut ys, &mut buffer);
    let ties_truth = tied_runs(&mut ys.iter().map(|&y| (y, 0.0)), false);

    let total = pairs(n as u64);
    let comparable = total + ties_joint - ties_predicted - ties_truth;
    let concordant = comparable - discordant;
    let numerator = concordant as f64 - discordant as f64;

    match variant {
        TauVariant::Gamma => {
            if comparable == 0 {
                Err(NullReason::NoComparablePairs)
            } else {
                Ok(numerator / comparable as f64)
            }
        }
        TauVariant::B => {
            let denom = ((total - ties_predicted) as f64 * (total - ties_truth) as f64).sqrt();
            if denom == 0.0 {
                Err(NullReason::NoComparablePairs)
            } else {
                Ok(numerator / denom)
            }
        }
    }
}

/// Sorts `values` ascending and returns the number of strictly inverted pairs.
fn count_inversions(values: &mut [f64], buffer: &mut [f64]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left_buf, right_buf) = buffer.split_at_mut(mid);
    let mut inversions = {
        let (left, right) = values.split_at_mut(mid);
        count_inversions(left, left_buf) + count_inversions(right, right_buf)
    };

    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if values[j] < values[i] {
            buffer[k] = values[j];
            inversions += (mid - i) as u64;
            j += 1;
        } else {
            buffer[k] = values[i];
            i += 1;
        }
        k += 1;
    }
    buffer[k..k + mid - i].copy_from_slice(&values[i..mid]);
    k += mid - i;
    buffer[k..k + n - j].copy_from_slice(&values[j..n]);
    values.copy_from_slice(&buffer[..n]);
    inversions
}

/// Everything needed to score one prediction.
#[derive(Debug, Clone, Copy)]
pub struct EvaluationInput<'a> {
    pub predicted: &'a ScoreVector,
    /// Links each node receives in `[t, t + future)`.
    pub true_future_gain: &'a [f64],
    /// Links each node received in `[t - past, t)`.
    pub past_window_gain: &'a [f64],
    pub top_n: usize,
    pub tau: TauVariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub precision: Metric,
    pub novelty: Metric,
    pub auc: Metric,
    pub tau: Metric,
    /// The score vector was degenerate (all zero); rankings fell back to
    /// index order.
    pub degenerate: bool,
}

impl MetricsReport {
    /// Flags as `;`-separated tokens, e.g. `degenerate;novelty=no_novel_items`.
    pub fn flags(&self) -> String {
        let mut flags = Vec::new();
        if self.degenerate {
            flags.push("degenerate".to_owned());
        }
        for (name, metric) in self.named() {
            if let Err(reason) = metric {
                flags.push(format!("{name}={reason}"));
            }
        }
        flags.join(";")
    }

    pub fn named(&self) -> [(&'static str, Metric); 4] {
        [
            ("precision", self.precision),
            ("novelty", self.novelty),
            ("auc", self.auc),
            ("tau", self.tau),
        ]
    }
}

/// Ranks predicted, true and past lists at `min(top_n, nodes)` and computes
/// all four metrics. Tau runs over every node.
pub fn evaluate(input: EvaluationInput<'_>) -> MetricsReport {
    let scores = &input.predicted.scores;
    let nodes = scores.len();
    assert_eq!(
        nodes,
        input.true_future_gain.len(),
        "score vectors cover different node sets"
    );
    assert_eq!(
        nodes,
        input.past_window_gain.len(),
        "score vectors cover different node sets"
    );
    let n = input.top_n.min(nodes);

    let predicted_top = rank(scores, n);
    let true_top = rank(input.true_future_gain, n);
    let past_top = rank(input.past_window_gain, n);

    MetricsReport {
        precision: precision(&predicted_top, &true_top, n),
        novelty: if nodes == 0 {
            Err(NullReason::NoNodes)
        } else {
            novelty(&predicted_top, &true_top, &past_top)
        },
        auc: if nodes == 0 {
            Err(NullReason::NoNodes)
        } else {
            auc(scores, &true_top)
        },
        tau: kendall_tau(scores, input.true_future_gain, input.tau),
        degenerate: input.predicted.degenerate,
    }
}
