//! Similarity self-join: every pair of unique passwords within edit distance `t`.
//!
//! Two strategies produce the same graph. `Naive` computes the full distance
//! for every pair and exists as the oracle. `Bucketed` groups passwords by
//! length, only pairs buckets whose lengths differ by at most `t`, and runs
//! the banded early-exit distance on the surviving pairs in parallel.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::metric::{levenshtein, BandedMatcher};

/// Default edge threshold.
pub const DEFAULT_THRESHOLD: u32 = 3;

/// Largest corpus [`verify_join`] accepts by default.
pub const DEFAULT_VERIFY_GUARD: usize = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JoinStrategy {
    Naive,
    #[default]
    Bucketed,
}

impl std::str::FromStr for JoinStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(JoinStrategy::Naive),
            "bucketed" => Ok(JoinStrategy::Bucketed),
            other => Err(Error::arg(format!("unknown join strategy `{other}`"))),
        }
    }
}

/// An undirected edge with `source < target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: u32,
    pub target: u32,
    pub distance: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Neighbor {
    pub id: u32,
    pub distance: u8,
}

/// Similarity graph over the unique passwords of a corpus.
///
/// Node `i` is record `i` of the corpus in canonical order. Adjacency lists
/// are sorted by neighbor id and each entry carries the exact distance, so a
/// graph built at `t` serves every smaller threshold through [`ThresholdView`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PasswordGraph {
    passwords: Vec<Vec<u8>>,
    frequencies: Vec<u64>,
    adjacency: Vec<Vec<Neighbor>>,
    edge_count: usize,
    threshold: u32,
}

impl PasswordGraph {
    /// Assembles a graph from an edge list. Edges must have `source < target`,
    /// be unique, and carry distances in `1..=threshold`.
    pub fn from_edges(
        passwords: Vec<Vec<u8>>,
        frequencies: Vec<u64>,
        edges: &[Edge],
        threshold: u32,
    ) -> Result<Self> {
        let n = passwords.len();
        if frequencies.len() != n {
            return Err(Error::arg("password and frequency tables differ in length"));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in edges {
            if e.source >= e.target || e.target as usize >= n {
                return Err(Error::arg(format!("invalid edge {}-{}", e.source, e.target)));
            }
            if e.distance == 0 || u32::from(e.distance) > threshold {
                return Err(Error::arg(format!(
                    "edge {}-{} has distance {} outside 1..={threshold}",
                    e.source, e.target, e.distance
                )));
            }
            adjacency[e.source as usize].push(Neighbor {
                id: e.target,
                distance: e.distance,
            });
            adjacency[e.target as usize].push(Neighbor {
                id: e.source,
                distance: e.distance,
            });
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|nb| nb.id);
            if list.windows(2).any(|w| w[0].id == w[1].id) {
                return Err(Error::arg("duplicate edge"));
            }
        }
        Ok(PasswordGraph {
            passwords,
            frequencies,
            adjacency,
            edge_count: edges.len(),
            threshold,
        })
    }

    pub fn node_count(&self) -> usize {
        self.passwords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn password(&self, id: usize) -> &[u8] {
        &self.passwords[id]
    }

    pub fn frequency(&self, id: usize) -> u64 {
        self.frequencies[id]
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.frequencies
    }

    pub fn total_accounts(&self) -> u64 {
        self.frequencies.iter().sum()
    }

    pub fn neighbors(&self, id: usize) -> &[Neighbor] {
        &self.adjacency[id]
    }

    /// All edges with `source < target`, ordered by `(source, target)`.
    pub fn edges(&self) -> Vec<Edge> {
        self.view(self.threshold)
            .expect("full view is always valid")
            .edges()
    }

    /// Restricts the graph to edges with distance at most `t`.
    pub fn view(&self, t: u32) -> Result<ThresholdView<'_>> {
        threshold_view(self, t)
    }

    /// The view at the build threshold.
    pub fn full_view(&self) -> ThresholdView<'_> {
        ThresholdView {
            base: self,
            threshold: self.threshold,
        }
    }
}

/// Edges of a [`PasswordGraph`] with distance at most `threshold`.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdView<'g> {
    base: &'g PasswordGraph,
    threshold: u32,
}

impl<'g> ThresholdView<'g> {
    pub fn graph(&self) -> &'g PasswordGraph {
        self.base
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn node_count(&self) -> usize {
        self.base.node_count()
    }

    pub fn neighbors(&self, id: usize) -> impl Iterator<Item = Neighbor> + 'g {
        let t = self.threshold;
        self.base.adjacency[id]
            .iter()
            .copied()
            .filter(move |nb| u32::from(nb.distance) <= t)
    }

    pub fn degree(&self, id: usize) -> usize {
        if self.threshold >= self.base.threshold {
            self.base.adjacency[id].len()
        } else {
            self.neighbors(id).count()
        }
    }

    pub fn edges(&self) -> Vec<Edge> {
        (0..self.node_count())
            .flat_map(|u| {
                self.neighbors(u)
                    .filter(move |nb| nb.id as usize > u)
                    .map(move |nb| Edge {
                        source: u as u32,
                        target: nb.id,
                        distance: nb.distance,
                    })
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        if self.threshold >= self.base.threshold {
            return self.base.edge_count;
        }
        (0..self.node_count()).map(|u| self.degree(u)).sum::<usize>() / 2
    }
}

pub fn threshold_view(graph: &PasswordGraph, t: u32) -> Result<ThresholdView<'_>> {
    if t > graph.threshold {
        return Err(Error::arg(format!(
            "view threshold {t} exceeds build threshold {}; rebuild the graph",
            graph.threshold
        )));
    }
    Ok(ThresholdView {
        base: graph,
        threshold: t,
    })
}

/// Counters gathered during a join.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JoinStats {
    /// Pairs for which a distance computation was started.
    pub distance_computations: u64,
}

/// Builds the similarity graph with edges at distance `1..=t`.
pub fn build_graph(corpus: &Corpus, t: u32, strategy: JoinStrategy) -> Result<PasswordGraph> {
    build_graph_with_stats(corpus, t, strategy).map(|(g, _)| g)
}

pub fn build_graph_with_stats(
    corpus: &Corpus,
    t: u32,
    strategy: JoinStrategy,
) -> Result<(PasswordGraph, JoinStats)> {
    if t == 0 {
        return Err(Error::arg(
            "threshold must be at least 1; use a threshold view of 0 for an edgeless graph",
        ));
    }
    if t > u32::from(u8::MAX) {
        return Err(Error::arg("threshold above 255 is not supported"));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if corpus.len() > u32::MAX as usize {
        return Err(Error::Resource("corpus exceeds 2^32 unique passwords".into()));
    }
    let passwords: Vec<Vec<u8>> = corpus.records().iter().map(|r| r.password.clone()).collect();
    let (edges, stats) = match strategy {
        JoinStrategy::Naive => naive_join(&passwords, t as usize),
        JoinStrategy::Bucketed => bucketed_join(&passwords, t as usize),
    };
    let frequencies = corpus.records().iter().map(|r| r.frequency).collect();
    let graph = PasswordGraph::from_edges(passwords, frequencies, &edges, t)?;
    Ok((graph, stats))
}

fn naive_join(passwords: &[Vec<u8>], t: usize) -> (Vec<Edge>, JoinStats) {
    let n = passwords.len();
    let mut edges = Vec::new();
    let mut computations = 0;
    for i in 0..n {
        for j in i + 1..n {
            computations += 1;
            let d = levenshtein(&passwords[i], &passwords[j]);
            if d <= t {
                edges.push(Edge {
                    source: i as u32,
                    target: j as u32,
                    distance: d as u8,
                });
            }
        }
    }
    (
        edges,
        JoinStats {
            distance_computations: computations,
        },
    )
}

fn bucketed_join(passwords: &[Vec<u8>], t: usize) -> (Vec<Edge>, JoinStats) {
    // Node ids sorted by (length, id); each length occupies one contiguous run.
    let mut by_len: Vec<u32> = (0..passwords.len() as u32).collect();
    by_len.sort_by_key(|&id| (passwords[id as usize].len(), id));
    let mut buckets: Vec<(usize, std::ops::Range<usize>)> = Vec::new();
    let mut start = 0;
    while start < by_len.len() {
        let len = passwords[by_len[start] as usize].len();
        let end = start + by_len[start..]
            .iter()
            .take_while(|&&id| passwords[id as usize].len() == len)
            .count();
        buckets.push((len, start..end));
        start = end;
    }

    let computations = AtomicU64::new(0);
    // One task per member of each bucket: compare against later members of the
    // same bucket and all members of longer buckets within `t`.
    let tasks: Vec<(usize, usize)> = buckets
        .iter()
        .enumerate()
        .flat_map(|(b, (_, range))| range.clone().map(move |pos| (b, pos)))
        .collect();

    let mut edges: Vec<Edge> = tasks
        .par_iter()
        .map_init(BandedMatcher::new, |matcher, &(b, pos)| {
            let id = by_len[pos];
            let pw = &passwords[id as usize];
            let len = buckets[b].0;
            let mut local = Vec::new();
            let mut count = 0u64;
            let mut visit = |other: u32, matcher: &mut BandedMatcher| {
                count += 1;
                if let Some(d) = matcher.distance_within(pw, &passwords[other as usize], t) {
                    if d > 0 {
                        local.push(Edge {
                            source: id.min(other),
                            target: id.max(other),
                            distance: d as u8,
                        });
                    }
                }
            };
            for &other in &by_len[pos + 1..buckets[b].1.end] {
                visit(other, matcher);
            }
            for (other_len, range) in &buckets[b + 1..] {
                if other_len - len > t {
                    break;
                }
                for &other in &by_len[range.clone()] {
                    visit(other, matcher);
                }
            }
            computations.fetch_add(count, Ordering::Relaxed);
            local
        })
        .flatten()
        .collect();
    edges.par_sort_unstable();
    (
        edges,
        JoinStats {
            distance_computations: computations.into_inner(),
        },
    )
}

/// Runs both strategies and reports whether their sorted edge lists match.
pub fn verify_join(corpus: &Corpus, t: u32) -> Result<bool> {
    verify_join_with_guard(corpus, t, DEFAULT_VERIFY_GUARD)
}

pub fn verify_join_with_guard(corpus: &Corpus, t: u32, guard: usize) -> Result<bool> {
    if corpus.len() > guard {
        return Err(Error::Resource(format!(
            "naive join over {} passwords exceeds the guard of {guard}",
            corpus.len()
        )));
    }
    let naive = build_graph(corpus, t, JoinStrategy::Naive)?;
    let bucketed = build_graph(corpus, t, JoinStrategy::Bucketed)?;
    Ok(naive.edges() == bucketed.edges())
}
