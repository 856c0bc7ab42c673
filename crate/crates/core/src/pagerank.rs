//! PageRank by matrix-free power iteration.
//!
//! Conventions: `alpha` is the probability of following a link and
//! `1 - alpha` the probability of jumping to a uniformly random node, so the
//! fixed point solves
//!
//! ```text
//! PR = alpha * S * PR + (1 - alpha) / N
//! ```
//!
//! where column `j` of `S` spreads `1 / l_j` over the `l_j` distinct targets
//! of node `j`, or `1 / N` over every node when `j` has no out-links.
//! Repeated links count once. Dangling columns are never materialized: their
//! total mass is added uniformly each iteration.

use rayon::prelude::*;

use crate::blocks::{self, BLOCK};
use crate::error::{Error, Result};
use crate::graph::Snapshot;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    /// Link-following probability in `[0, 1]`.
    pub alpha: f64,
    /// Stop once the L1 change between iterates drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            tolerance: 1e-10,
            max_iterations: 1000,
        }
    }
}

impl PageRankConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::invalid(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankVector {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl PageRankVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Column `j` of the dangling-corrected transition matrix as
/// `(row, value)` pairs sorted by row.
pub fn transition_column(snapshot: &Snapshot, j: usize) -> Vec<(usize, f64)> {
    let mut targets: Vec<usize> = snapshot.out_links(j).iter().map(|&t| t as usize).collect();
    targets.dedup();
    if targets.is_empty() {
        let n = snapshot.node_count();
        return (0..n).map(|i| (i, 1.0 / n as f64)).collect();
    }
    let share = 1.0 / targets.len() as f64;
    targets.into_iter().map(|i| (i, share)).collect()
}

/// Distinct-link structure of a snapshot in pull (in-neighbor) form.
///
/// Building it is the only `O(E log E)` step, so callers running PageRank
/// for several `alpha` values on one snapshot should build it once.
#[derive(Debug, Clone)]
pub struct LinkMatrix {
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    /// `1 / l_j`, or 0 for dangling nodes.
    inv_out_degree: Vec<f64>,
    dangling: Vec<u32>,
}

impl LinkMatrix {
    pub fn from_snapshot(snapshot: &Snapshot) -> Self {
        let n = snapshot.node_count();
        let mut inv_out_degree = vec![0.0; n];
        let mut dangling = Vec::new();
        let mut in_offsets = vec![0usize; n + 1];
        let distinct = |j: usize| {
            let links = snapshot.out_links(j);
            links
                .iter()
                .enumerate()
                .filter(move |&(k, t)| k == 0 || links[k - 1] != *t)
                .map(|(_, &t)| t)
        };
        for j in 0..n {
            let mut l = 0usize;
            for t in distinct(j) {
                in_offsets[t as usize + 1] += 1;
                l += 1;
            }
            if l == 0 {
                dangling.push(j as u32);
            } else {
                inv_out_degree[j] = 1.0 / l as f64;
            }
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0u32; in_offsets[n]];
        // sources are visited in ascending order, so each in-list is sorted
        for j in 0..n {
            for t in distinct(j) {
                let slot = &mut cursor[t as usize];
                in_sources[*slot] = j as u32;
                *slot += 1;
            }
        }
        Self {
            in_offsets,
            in_sources,
            inv_out_degree,
            dangling,
        }
    }

    pub fn node_count(&self) -> usize {
        self.inv_out_degree.len()
    }

    pub fn dangling_count(&self) -> usize {
        self.dangling.len()
    }

    fn in_sources(&self, i: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[i]..self.in_offsets[i + 1]]
    }
}

pub fn pagerank(snapshot: &Snapshot, config: &PageRankConfig) -> Result<PageRankVector> {
    pagerank_links(&LinkMatrix::from_snapshot(snapshot), config)
}

/// Power iteration from the uniform vector.
///
/// Work inside an iteration is split across the rayon pool, but every
/// reduction uses fixed blocks, so the result does not depend on the number
/// of workers.
pub fn pagerank_links(links: &LinkMatrix, config: &PageRankConfig) -> Result<PageRankVector> {
    config.validate()?;
    let n = links.node_count();
    if n == 0 {
        return Err(Error::EmptyDataset(
            "pagerank needs at least one node".into(),
        ));
    }
    let alpha = config.alpha;
    let nf = n as f64;
    if links.dangling.len() == n {
        // every column of the Google matrix is exactly uniform
        return Ok(PageRankVector {
            scores: vec![1.0 / nf; n],
            iterations: 1,
            residual: 0.0,
        });
    }

    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut flow = vec![0.0; n];
    let mut residual = f64::INFINITY;

    for iteration in 1..=config.max_iterations {
        flow.par_chunks_mut(BLOCK)
            .zip(rank.par_chunks(BLOCK))
            .zip(links.inv_out_degree.par_chunks(BLOCK))
            .for_each(|((f, r), inv)| {
                for ((f, r), inv) in f.iter_mut().zip(r).zip(inv) {
                    *f = r * inv;
                }
            });
        let dangling_mass: f64 = links
            .dangling
            .par_chunks(BLOCK)
            .map(|chunk| chunk.iter().map(|&j| rank[j as usize]).sum::<f64>())
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        let base = (1.0 - alpha) / nf + alpha * dangling_mass / nf;

        next.par_chunks_mut(BLOCK)
            .enumerate()
            .for_each(|(block, out)| {
                let offset = block * BLOCK;
                for (k, slot) in out.iter_mut().enumerate() {
                    let pulled: f64 = links
                        .in_sources(offset + k)
                        .iter()
                        .map(|&j| flow[j as usize])
                        .sum();
                    *slot = base + alpha * pulled;
                }
            });

        residual = blocks::l1_distance(&next, &rank);
        std::mem::swap(&mut rank, &mut next);
        if residual < config.tolerance {
            let total = blocks::sum(&rank);
            rank.par_iter_mut().for_each(|x| *x /= total);
            return Ok(PageRankVector {
                scores: rank,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: config.max_iterations,
        residual,
    })
}
