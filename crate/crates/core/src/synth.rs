//! Synthetic temporal graphs with bursty arrivals and drifting communities.
//!
//! Arrival times mix a uniform background with Poisson-placed bursts, so a
//! fixed time span holds very different edge counts from one window to the
//! next. Each burst is an event among its own random set of participants.
//! Outside bursts, each node has a community and a lognormal activity level, and both
//! are redrawn for a fraction of nodes at regular intervals. Endpoints are
//! picked in proportion to activity, and a share of new contacts repeats a
//! recent pair. Recent structure therefore predicts the next contacts better
//! than old structure does.

use std::collections::VecDeque;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Exp, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream::{EdgeStream, TemporalEdge};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub duration: f64,
    pub communities: usize,
    /// Share of edges that fall inside bursts.
    pub burst_fraction: f64,
    /// Expected number of bursts over the whole duration.
    pub bursts: f64,
    /// Mean length of a burst in time units.
    pub burst_width: f64,
    /// Share of nodes taking part in each burst; 0 lets bursts follow the
    /// background model.
    pub burst_nodes: f64,
    /// Probability that a fresh contact stays inside the source's community.
    pub intra_prob: f64,
    /// Probability that a contact repeats one of the last `memory` pairs.
    pub repeat_prob: f64,
    pub memory: usize,
    /// Number of membership reshuffles, spread evenly over the edge sequence
    /// so the graph changes per interaction rather than per time unit.
    pub drift_steps: usize,
    /// Share of nodes reassigned at each reshuffle.
    pub churn: f64,
    /// Log-scale spread of node activity; 0 makes every node equally active.
    pub activity_sigma: f64,
    /// Timestamps are rounded to this resolution.
    pub resolution: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            num_nodes: 300,
            num_edges: 10_000,
            duration: 1_000.0,
            communities: 8,
            burst_fraction: 0.6,
            bursts: 12.0,
            burst_width: 8.0,
            burst_nodes: 0.1,
            intra_prob: 0.85,
            repeat_prob: 0.3,
            memory: 200,
            drift_steps: 40,
            churn: 0.1,
            activity_sigma: 1.0,
            resolution: 0.001,
        }
    }
}

impl SyntheticParams {
    fn validate(&self) -> Result<()> {
        let prob = |x: f64| (0.0..=1.0).contains(&x);
        if self.num_nodes < 2 || self.communities == 0 || self.communities > self.num_nodes {
            return Err(Error::InvalidParameter(
                "need >= 2 nodes and 1..=num_nodes communities".into(),
            ));
        }
        if !(self.duration > 0.0
            && self.burst_width > 0.0
            && self.bursts >= 0.0
            && self.resolution > 0.0)
        {
            return Err(Error::InvalidParameter(
                "durations and counts must be positive".into(),
            ));
        }
        if ![
            self.burst_fraction,
            self.burst_nodes,
            self.intra_prob,
            self.repeat_prob,
            self.churn,
        ]
        .into_iter()
        .all(prob)
        {
            return Err(Error::InvalidParameter(
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Sorted arrival times, each tagged with its burst when it has one. Also
/// returns the number of bursts.
fn arrival_times(p: &SyntheticParams, rng: &mut ChaCha8Rng) -> (Vec<(f64, Option<usize>)>, usize) {
    let n_burst = (p.num_edges as f64 * p.burst_fraction).round() as usize;
    let mut times = Vec::with_capacity(p.num_edges);
    for _ in 0..p.num_edges - n_burst {
        times.push((rng.random_range(0.0..p.duration), None));
    }
    let mut count = 0;
    if n_burst > 0 {
        count = Poisson::new(p.bursts.max(1e-9))
            .map(|d| d.sample(rng) as usize)
            .unwrap_or(0)
            .max(1);
        let centres: Vec<f64> = (0..count)
            .map(|_| rng.random_range(0.0..p.duration))
            .collect();
        let width = Exp::new(1.0 / p.burst_width).expect("positive width");
        for _ in 0..n_burst {
            let b = rng.random_range(0..centres.len());
            let t = centres[b] + width.sample(rng);
            times.push((if t < p.duration { t } else { centres[b] }, Some(b)));
        }
    }
    for (t, _) in &mut times {
        // Dividing by an integral inverse keeps decimal resolutions exact
        // when printed (832 / 1000 is 0.832, 832 * 0.001 is not).
        *t = if p.resolution < 1.0 {
            let inv = (1.0 / p.resolution).round();
            (*t * inv).round() / inv
        } else {
            (*t / p.resolution).round() * p.resolution
        };
    }
    times.sort_by(|a, b| a.0.total_cmp(&b.0));
    (times, count)
}

struct Population {
    membership: Vec<usize>,
    activity: Vec<f64>,
    groups: Vec<Vec<usize>>,
    group_pickers: Vec<Option<WeightedIndex<f64>>>,
    picker: WeightedIndex<f64>,
}

impl Population {
    fn new(membership: Vec<usize>, activity: Vec<f64>, k: usize) -> Self {
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (v, &c) in membership.iter().enumerate() {
            groups[c].push(v);
        }
        let group_pickers = groups
            .iter()
            .map(|g| WeightedIndex::new(g.iter().map(|&v| activity[v])).ok())
            .collect();
        let picker = WeightedIndex::new(activity.iter().copied()).expect("positive activity");
        Self {
            membership,
            activity,
            groups,
            group_pickers,
            picker,
        }
    }

    fn partner(&self, u: usize, intra_prob: f64, rng: &mut ChaCha8Rng) -> usize {
        let c = self.membership[u];
        loop {
            let v = match &self.group_pickers[c] {
                Some(p) if self.groups[c].len() > 1 && rng.random_bool(intra_prob) => {
                    self.groups[c][p.sample(rng)]
                }
                _ => self.picker.sample(rng),
            };
            if v != u {
                return v;
            }
        }
    }
}

/// Generates an undirected, canonical stream.
pub fn planted_stream(params: &SyntheticParams, seed: u64) -> Result<EdgeStream> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.num_nodes;
    let k = params.communities;
    let spread = LogNormal::new(0.0, params.activity_sigma).expect("finite sigma");
    let activity: Vec<f64> = (0..n).map(|_| spread.sample(&mut rng)).collect();
    let mut pop = Population::new((0..n).map(|v| v % k).collect(), activity, k);

    let (times, bursts) = arrival_times(params, &mut rng);
    let per_burst = ((n as f64 * params.burst_nodes).round() as usize).min(n);
    let participants: Vec<Vec<usize>> = (0..bursts)
        .map(|_| rand::seq::index::sample(&mut rng, n, per_burst).into_vec())
        .collect();
    let step = (times.len() / (params.drift_steps + 1)).max(1);
    let mut recent: VecDeque<(usize, usize)> = VecDeque::with_capacity(params.memory + 1);
    let mut edges = Vec::with_capacity(times.len());

    for (m, (t, burst)) in times.into_iter().enumerate() {
        if params.drift_steps > 0 && m > 0 && m % step == 0 && m / step <= params.drift_steps {
            let (mut membership, mut activity) = (pop.membership.clone(), pop.activity.clone());
            for v in 0..n {
                if rng.random_bool(params.churn) {
                    membership[v] = rng.random_range(0..k);
                    activity[v] = spread.sample(&mut rng);
                }
            }
            pop = Population::new(membership, activity, k);
        }
        let event = burst.map(|b| &participants[b]).filter(|g| g.len() > 1);
        let pair = if !recent.is_empty() && rng.random_bool(params.repeat_prob) {
            recent[rng.random_range(0..recent.len())]
        } else if let Some(g) = event {
            let picks = rand::seq::index::sample(&mut rng, g.len(), 2);
            (g[picks.index(0)], g[picks.index(1)])
        } else {
            let u = pop.picker.sample(&mut rng);
            (u, pop.partner(u, params.intra_prob, &mut rng))
        };
        if params.memory > 0 {
            if recent.len() == params.memory {
                recent.pop_front();
            }
            recent.push_back(pair);
        }
        edges.push(TemporalEdge::new(pair.0, pair.1, t));
    }
    Ok(EdgeStream::from_edges(edges, n, false))
}

/// Writes `src dst time` lines.
pub fn write_edge_list<W: Write>(stream: &EdgeStream, mut out: W) -> Result<()> {
    let io = |e| Error::io("<edge list>", e);
    writeln!(out, "% src dst time").map_err(io)?;
    for e in &stream.edges {
        let name = |id| {
            stream
                .nodes
                .name(id)
                .map(str::to_owned)
                .unwrap_or_else(|| id.to_string())
        };
        writeln!(out, "{} {} {}", name(e.src), name(e.dst), e.time).map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{parse_edge_list, ParseOptions};

    #[test]
    fn deterministic_and_canonical() {
        let p = SyntheticParams {
            num_edges: 2_000,
            ..Default::default()
        };
        let a = planted_stream(&p, 1).unwrap();
        let b = planted_stream(&p, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.is_canonical());
        assert_eq!(a.len(), 2_000);
        assert!(a
            .edges
            .iter()
            .all(|e| e.src != e.dst && e.time >= 0.0 && e.time < p.duration + 1e-9));
        assert_ne!(a, planted_stream(&p, 2).unwrap());
    }

    #[test]
    fn edge_list_round_trips() {
        let p = SyntheticParams {
            num_edges: 300,
            num_nodes: 40,
            communities: 4,
            ..Default::default()
        };
        let s = planted_stream(&p, 3).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&s, &mut buf).unwrap();
        let parsed = parse_edge_list(&buf[..], ParseOptions::default()).unwrap();
        assert_eq!(parsed.len(), s.len());
        for (a, b) in parsed.edges.iter().zip(&s.edges) {
            assert_eq!(a.time, b.time);
            assert_eq!(parsed.nodes.name(a.src), s.nodes.name(b.src));
        }
    }

    #[test]
    fn rejects_bad_params() {
        let p = SyntheticParams {
            churn: 1.5,
            ..Default::default()
        };
        assert!(planted_stream(&p, 0).is_err());
    }
}
