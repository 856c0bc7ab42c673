//! Synthetic evolving networks with recency-weighted preferential attachment.
//!
//! Nodes arrive as a Poisson process; link events form a second Poisson
//! process. Each event picks a uniformly random existing node as source and
//! draws the target with probability proportional to
//! [`attachment_weight`]: a mix of total in-degree and in-links decayed by
//! `exp(-aging_rate * age)`.
//!
//! Event times are integer seconds, reported as `seconds / 86400` days. The
//! random stream is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`, so output is reproducible across runs and platforms up
//! to the last-ulp behavior of the platform's `exp`/`ln`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::numbered_ids;
use crate::error::{Error, Result};
use crate::graph::{EdgeList, TemporalEdge};

const SECONDS_PER_DAY: f64 = 86_400.0;
/// Rescale decayed sums before `exp(aging * elapsed)` leaves f64 range.
const REBASE_LIMIT: f64 = 1e150;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    /// Nodes present at time zero.
    pub initial_nodes: usize,
    /// New nodes per day.
    pub node_arrival_rate: f64,
    /// Link events per day.
    pub event_rate: f64,
    /// Length of the generated history in days.
    pub horizon: f64,
    /// Weight of total degree versus decayed recent degree, in `[0, 1]`.
    pub recency_weight: f64,
    /// Per-day decay rate of past in-links, `>= 0`.
    pub aging_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            initial_nodes: 2,
            node_arrival_rate: 5.0,
            event_rate: 100.0,
            horizon: 300.0,
            recency_weight: 0.2,
            aging_rate: 0.1,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let rho = self.recency_weight;
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::invalid(format!(
                "recency weight must be in [0, 1], got {rho}"
            )));
        }
        if !(self.aging_rate >= 0.0 && self.aging_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "aging rate must be finite and >= 0, got {}",
                self.aging_rate
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        for (name, rate) in [
            ("node arrival rate", self.node_arrival_rate),
            ("event rate", self.event_rate),
        ] {
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} must be finite and >= 0, got {rate}"
                )));
            }
        }
        Ok(())
    }
}

/// Unnormalized probability that a node with `in_degree` past in-links and
/// decayed in-link mass `decayed` receives the next link.
///
/// The `+ 1` terms give every node, including newcomers, a nonzero chance.
pub fn attachment_weight(recency_weight: f64, in_degree: f64, decayed: f64) -> f64 {
    recency_weight * (in_degree + 1.0) + (1.0 - recency_weight) * (decayed + 1.0)
}

/// Generates a time-sorted synthetic edge list. Node `i` is named `n{i}`.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<EdgeList> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rho = config.recency_weight;
    let theta = config.aging_rate;

    let total_rate = (config.node_arrival_rate + config.event_rate) / SECONDS_PER_DAY;
    let arrival_share = if total_rate > 0.0 {
        config.node_arrival_rate / (config.node_arrival_rate + config.event_rate)
    } else {
        0.0
    };
    let horizon_secs = (config.horizon * SECONDS_PER_DAY).round() as u64;

    let mut nodes = config.initial_nodes;
    let mut decayed = DecayedMass::new(theta, nodes);
    // One slot per received link: sampling an entry is degree-proportional.
    let mut link_targets: Vec<u32> = Vec::new();
    let mut edges = Vec::new();

    let mut now: u64 = 0;
    while total_rate > 0.0 && now < horizon_secs {
        let u: f64 = rng.random();
        let gap = (-(1.0 - u).ln() / total_rate).ceil();
        if gap >= (horizon_secs - now) as f64 {
            break;
        }
        now += gap as u64;
        let day = now as f64 / SECONDS_PER_DAY;

        if rng.random::<f64>() < arrival_share {
            nodes += 1;
            decayed.grow(nodes);
            continue;
        }
        if nodes < 2 {
            continue;
        }

        let source = rng.random_range(0..nodes as u64) as u32;
        let mut target = source;
        for _ in 0..32 {
            target = draw_target(&mut rng, rho, nodes, &link_targets, &decayed, day);
            if target != source {
                break;
            }
        }
        if target == source {
            target = ((source as usize + 1) % nodes) as u32;
        }

        link_targets.push(target);
        decayed.add_link(target as usize, day);
        edges.push(TemporalEdge::new(source, target, day));
    }

    Ok(EdgeList {
        ids: numbered_ids(nodes),
        edges,
    })
}

fn draw_target(
    rng: &mut ChaCha8Rng,
    rho: f64,
    nodes: usize,
    link_targets: &[u32],
    decayed: &DecayedMass,
    day: f64,
) -> u32 {
    let degree_part = rho * (link_targets.len() + nodes) as f64;
    let uniform_part = (1.0 - rho) * nodes as f64;
    let recent_part = (1.0 - rho) * decayed.total(day);
    let u = rng.random::<f64>() * (degree_part + uniform_part + recent_part);

    if u < degree_part {
        let slot = rng.random_range(0..(link_targets.len() + nodes) as u64) as usize;
        if slot < nodes {
            slot as u32
        } else {
            link_targets[slot - nodes]
        }
    } else if u < degree_part + uniform_part {
        rng.random_range(0..nodes as u64) as u32
    } else {
        let mass = (u - degree_part - uniform_part) / (1.0 - rho);
        decayed.find(mass, day).min(nodes - 1) as u32
    }
}

/// Per-node `sum exp(-theta * (now - t_link))`, stored as
/// `exp(-theta * (now - reference)) * scaled[i]` in a Fenwick tree so that
/// both sampling and updates are logarithmic.
struct DecayedMass {
    theta: f64,
    reference: f64,
    scaled: Vec<f64>,
    tree: Vec<f64>,
}

impl DecayedMass {
    fn new(theta: f64, nodes: usize) -> Self {
        let mut mass = Self {
            theta,
            reference: 0.0,
            scaled: vec![0.0; nodes],
            tree: Vec::new(),
        };
        mass.rebuild(nodes.max(1).next_power_of_two());
        mass
    }

    fn capacity(&self) -> usize {
        self.tree.len() - 1
    }

    fn rebuild(&mut self, capacity: usize) {
        self.tree = vec![0.0; capacity + 1];
        for i in 1..=capacity {
            self.tree[i] += self.scaled.get(i - 1).copied().unwrap_or(0.0);
            let parent = i + (i & i.wrapping_neg());
            if parent <= capacity {
                let carry = self.tree[i];
                self.tree[parent] += carry;
            }
        }
    }

    fn grow(&mut self, nodes: usize) {
        self.scaled.resize(nodes, 0.0);
        if nodes > self.capacity() {
            self.rebuild(nodes.next_power_of_two());
        }
    }

    fn factor(&self, day: f64) -> f64 {
        (-self.theta * (day - self.reference)).exp()
    }

    fn total(&self, day: f64) -> f64 {
        let mut sum = 0.0;
        let mut i = self.capacity();
        while i > 0 {
            sum += self.tree[i];
            i &= i - 1;
        }
        sum * self.factor(day)
    }

    fn add_link(&mut self, node: usize, day: f64) {
        let mut weight = (self.theta * (day - self.reference)).exp();
        if weight > REBASE_LIMIT {
            let shrink = self.factor(day);
            for w in &mut self.scaled {
                *w *= shrink;
            }
            self.reference = day;
            self.rebuild(self.capacity());
            weight = 1.0;
        }
        self.scaled[node] += weight;
        let mut i = node + 1;
        while i <= self.capacity() {
            self.tree[i] += weight;
            i += i & i.wrapping_neg();
        }
    }

    /// Index whose cumulative decayed mass first exceeds `mass`.
    fn find(&self, mass: f64, day: f64) -> usize {
        let mut remaining = mass / self.factor(day);
        let mut pos = 0;
        let mut step = self.capacity();
        while step > 0 {
            let next = pos + step;
            if next <= self.capacity() && self.tree[next] <= remaining {
                pos = next;
                remaining -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}
