//! Structural statistics over a threshold view of the password graph.

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simjoin::ThresholdView;

/// Minimum number of retained samples for a power-law fit.
pub const DEFAULT_MIN_SAMPLES: usize = 50;

pub fn degree_sequence(view: &ThresholdView<'_>) -> Vec<usize> {
    (0..view.node_count()).map(|v| view.degree(v)).collect()
}

/// `(rank, degree)` pairs, highest degree first, ranks from 1. Equal degrees
/// keep node-id order.
pub fn degree_rank(view: &ThresholdView<'_>) -> Vec<(usize, usize)> {
    let mut degrees = degree_sequence(view);
    // stable sort keeps id order among ties
    degrees.sort_by(|a, b| b.cmp(a));
    degrees.into_iter().enumerate().map(|(i, d)| (i + 1, d)).collect()
}

/// Connected component of every node; ids are dense and numbered in order of
/// each component's smallest node.
pub fn connected_components(view: &ThresholdView<'_>) -> Vec<usize> {
    let n = view.node_count();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for nb in view.neighbors(u) {
                let v = nb.id as usize;
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    comp
}

// --- power law -------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub x_min: u64,
    pub sample_count: usize,
    pub log_likelihood: f64,
}

/// Hurwitz zeta `sum_{k>=0} (q + k)^(-s)` for `s > 1`, `q > 0`, via
/// Euler-Maclaurin summation after a short direct prefix.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const DIRECT: usize = 12;
    // B_{2j} / (2j)!
    const B: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
        -3617.0 / 10_670_622_842_880_000.0,
    ];
    let mut sum: f64 = (0..DIRECT).map(|k| (q + k as f64).powf(-s)).sum();
    let a = q + DIRECT as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) times a^(-s-2j+1)
    let mut factor = s * a.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        let term = b * factor;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let k = 2.0 * j as f64;
        factor *= (s + k + 1.0) * (s + k + 2.0) / (a * a);
    }
    sum
}

/// Discrete maximum-likelihood fit of `P(k) = k^(-r) / zeta(r, x_min)` to the
/// samples at or above `x_min`, requiring [`DEFAULT_MIN_SAMPLES`] of them.
pub fn fit_power_law(samples: &[u64], x_min: u64) -> Result<PowerLawFit> {
    fit_power_law_with(samples, x_min, DEFAULT_MIN_SAMPLES)
}

pub fn fit_power_law_with(samples: &[u64], x_min: u64, min_samples: usize) -> Result<PowerLawFit> {
    if x_min == 0 {
        return Err(Error::arg("x_min must be at least 1"));
    }
    if samples.contains(&0) {
        return Err(Error::arg("power-law samples must be positive"));
    }
    let kept: Vec<u64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    if kept.len() < min_samples.max(1) {
        return Err(Error::InsufficientData {
            retained: kept.len(),
            required: min_samples.max(1),
        });
    }
    if kept.iter().all(|&x| x == kept[0]) {
        return Err(Error::DegenerateFit);
    }
    let n = kept.len() as f64;
    let sum_ln: f64 = kept.iter().map(|&x| (x as f64).ln()).sum();
    let q = x_min as f64;
    let log_lik = |r: f64| -n * hurwitz_zeta(r, q).ln() - r * sum_ln;

    // The log-likelihood is concave in r; golden-section search on a
    // bracket that is widened until the maximum is interior.
    let mut lo = 1.0 + 1e-9;
    let mut hi = 4.0;
    while hi < 200.0 && log_lik(hi) > log_lik(hi * 0.999) {
        hi *= 2.0;
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (log_lik(c), log_lik(d));
    while hi - lo > 1e-10 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = log_lik(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = log_lik(d);
        }
    }
    let exponent = 0.5 * (lo + hi);
    Ok(PowerLawFit {
        exponent,
        x_min,
        sample_count: kept.len(),
        log_likelihood: log_lik(exponent),
    })
}

// --- communities -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    pub labels: Vec<usize>,
    pub community_count: usize,
    pub modularity: f64,
}

/// A community detection algorithm over a threshold view.
pub trait CommunityDetector {
    /// Raw labels; any integers, one per node.
    fn assign(&self, view: &ThresholdView<'_>, seed: u64) -> Vec<usize>;
}

/// Synchronous label propagation.
///
/// Initial labels are a seeded permutation of node ids. In each round every
/// node takes the most frequent label in its closed neighborhood, all nodes
/// updating from the previous round's labels; ties go to the smallest label.
/// Stops at a fixed point or after `max_rounds`.
#[derive(Debug, Clone)]
pub struct LabelPropagation {
    pub max_rounds: usize,
}

impl Default for LabelPropagation {
    fn default() -> Self {
        LabelPropagation { max_rounds: 100 }
    }
}

impl CommunityDetector for LabelPropagation {
    fn assign(&self, view: &ThresholdView<'_>, seed: u64) -> Vec<usize> {
        let n = view.node_count();
        let mut labels: Vec<usize> = (0..n).collect();
        labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut next = labels.clone();
        let mut votes: HashMap<usize, usize> = HashMap::new();
        for _ in 0..self.max_rounds {
            for v in 0..n {
                votes.clear();
                *votes.entry(labels[v]).or_insert(0) += 1;
                for nb in view.neighbors(v) {
                    *votes.entry(labels[nb.id as usize]).or_insert(0) += 1;
                }
                next[v] = votes
                    .iter()
                    .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                    .map(|(&label, _)| label)
                    .unwrap_or(labels[v]);
            }
            if next == labels {
                break;
            }
            std::mem::swap(&mut labels, &mut next);
        }
        labels
    }
}

/// Renumbers labels densely in order of first appearance by node id.
fn densify(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let dense = labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect();
    (dense, map.len())
}

pub fn detect_communities(view: &ThresholdView<'_>, seed: u64) -> CommunityAssignment {
    detect_communities_with(view, seed, &LabelPropagation::default())
}

/// Runs `detector` and splits any community that spans several components,
/// so the result always refines the connected components.
pub fn detect_communities_with<D: CommunityDetector + ?Sized>(
    view: &ThresholdView<'_>,
    seed: u64,
    detector: &D,
) -> CommunityAssignment {
    let raw = detector.assign(view, seed);
    let comps = connected_components(view);
    let mut map: HashMap<(usize, usize), usize> = HashMap::new();
    let labels: Vec<usize> = raw
        .iter()
        .zip(&comps)
        .map(|(&l, &c)| {
            let next = map.len();
            *map.entry((c, l)).or_insert(next)
        })
        .collect();
    let (labels, community_count) = densify(&labels);
    let modularity = modularity(view, &labels).expect("labels cover every node");
    CommunityAssignment {
        labels,
        community_count,
        modularity,
    }
}

/// Newman modularity `sum_c [ e_c / m - (deg_c / 2m)^2 ]`; zero for an edgeless view.
pub fn modularity(view: &ThresholdView<'_>, labels: &[usize]) -> Result<f64> {
    let n = view.node_count();
    if labels.len() != n {
        return Err(Error::arg(format!(
            "{} labels given for {n} nodes",
            labels.len()
        )));
    }
    let mut intra: HashMap<usize, f64> = HashMap::new();
    let mut degree: HashMap<usize, f64> = HashMap::new();
    let mut m2 = 0.0;
    for u in 0..n {
        for nb in view.neighbors(u) {
            m2 += 1.0;
            *degree.entry(labels[u]).or_insert(0.0) += 1.0;
            if labels[nb.id as usize] == labels[u] {
                *intra.entry(labels[u]).or_insert(0.0) += 1.0;
            }
        }
    }
    if m2 == 0.0 {
        return Ok(0.0);
    }
    let m = m2 / 2.0;
    let mut keys: Vec<usize> = degree.keys().copied().collect();
    keys.sort_unstable();
    Ok(keys
        .iter()
        .map(|c| {
            // each intra edge was seen from both endpoints
            let e_c = intra.get(c).copied().unwrap_or(0.0) / 2.0;
            let d_c = degree[c];
            e_c / m - (d_c / m2).powi(2)
        })
        .sum())
}
