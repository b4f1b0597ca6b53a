//! Minimal cracking dictionaries as dominating sets of the similarity graph.
//!
//! A dictionary whose closed neighborhood is the whole vertex set cracks
//! every account, so the smallest such dictionary is a minimum dominating
//! set. The problem is NP-hard; [`greedy_dominating_set`] scales and
//! [`exact_dominating_set`] is a budget-guarded exhaustive search used as an
//! oracle on small graphs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::attack::{Dictionary, DictionaryLabel};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::simjoin::ThresholdView;

/// Largest graph the exhaustive solver accepts by default.
pub const DEFAULT_EXACT_BUDGET: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominatingMethod {
    Greedy,
    Exact,
    /// Account-weighted greedy stopped at a coverage ratio.
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominatingSetResult {
    /// Members in selection order (greedy) or ascending id (exact).
    pub nodes: Vec<usize>,
    pub size: usize,
    pub method: DominatingMethod,
    pub covered_accounts: u64,
    pub arnautov_bound: Option<f64>,
    pub is_dominating: bool,
}

/// `n (1 + ln(k + 1)) / (k + 1)`: every `n`-vertex graph with minimum degree
/// `k` has a dominating set at most this large.
pub fn arnautov_bound(n: usize, min_degree: usize) -> f64 {
    let k1 = min_degree as f64 + 1.0;
    n as f64 * (1.0 + k1.ln()) / k1
}

/// True when the closed neighborhood of `nodes` covers every vertex.
pub fn is_dominating(view: &ThresholdView<'_>, nodes: &[usize]) -> bool {
    let mut covered = vec![false; view.node_count()];
    for &v in nodes {
        if v >= covered.len() {
            return false;
        }
        covered[v] = true;
        for nb in view.neighbors(v) {
            covered[nb.id as usize] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

fn min_degree(view: &ThresholdView<'_>) -> usize {
    (0..view.node_count()).map(|v| view.degree(v)).min().unwrap_or(0)
}

/// Coverage summary of an arbitrary node set.
pub fn evaluate_set(view: &ThresholdView<'_>, nodes: Vec<usize>, method: DominatingMethod) -> DominatingSetResult {
    finish(view, nodes, method)
}

fn finish(view: &ThresholdView<'_>, nodes: Vec<usize>, method: DominatingMethod) -> DominatingSetResult {
    let graph = view.graph();
    let mut covered = vec![false; view.node_count()];
    for &v in &nodes {
        covered[v] = true;
        for nb in view.neighbors(v) {
            covered[nb.id as usize] = true;
        }
    }
    let covered_accounts = covered
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(v, _)| graph.frequency(v))
        .sum();
    let is_dominating = covered.iter().all(|&c| c);
    let n = view.node_count();
    DominatingSetResult {
        size: nodes.len(),
        nodes,
        method,
        covered_accounts,
        arnautov_bound: (n > 0).then(|| arnautov_bound(n, min_degree(view))),
        is_dominating,
    }
}

/// Lazy max-heap greedy cover. `gain(v, covered)` must be non-increasing as
/// coverage grows. Ties go to the smaller node id, which is the higher
/// frequency and then the lexicographically smaller password.
fn greedy_cover<G, S>(view: &ThresholdView<'_>, gain: G, mut stop: S) -> Vec<usize>
where
    G: Fn(usize, &[bool]) -> u64,
    S: FnMut(&[bool]) -> bool,
{
    let n = view.node_count();
    let mut covered = vec![false; n];
    let mut heap: BinaryHeap<(u64, Reverse<usize>)> =
        (0..n).map(|v| (gain(v, &covered), Reverse(v))).collect();
    let mut picks = Vec::new();
    while !stop(&covered) {
        let Some((stale, Reverse(v))) = heap.pop() else {
            break;
        };
        let fresh = gain(v, &covered);
        if fresh == 0 {
            continue;
        }
        if fresh < stale {
            heap.push((fresh, Reverse(v)));
            continue;
        }
        picks.push(v);
        covered[v] = true;
        for nb in view.neighbors(v) {
            covered[nb.id as usize] = true;
        }
    }
    picks
}

/// Repeatedly picks the vertex whose closed neighborhood contains the most
/// uncovered vertices until every vertex is covered.
pub fn greedy_dominating_set(view: &ThresholdView<'_>) -> DominatingSetResult {
    let gain = |v: usize, covered: &[bool]| {
        u64::from(!covered[v]) + view.neighbors(v).filter(|nb| !covered[nb.id as usize]).count() as u64
    };
    let picks = greedy_cover(view, gain, |covered| covered.iter().all(|&c| c));
    let result = finish(view, picks, DominatingMethod::Greedy);
    assert!(result.is_dominating, "greedy cover must dominate");
    result
}

/// Minimum dominating set by exhaustive search over subsets in increasing
/// size. Refuses graphs with more than `node_budget` vertices (at most 63).
pub fn exact_dominating_set(view: &ThresholdView<'_>, node_budget: usize) -> Result<DominatingSetResult> {
    let n = view.node_count();
    if n > node_budget || n > 63 {
        return Err(Error::Resource(format!(
            "exact search over {n} vertices exceeds the budget of {}",
            node_budget.min(63)
        )));
    }
    if n == 0 {
        return Ok(finish(view, Vec::new(), DominatingMethod::Exact));
    }
    let masks: Vec<u64> = (0..n)
        .map(|v| view.neighbors(v).fold(1u64 << v, |m, nb| m | 1u64 << nb.id))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for k in 1..=n {
        // Gosper's hack enumerates k-subsets of n bits in increasing order.
        let mut set: u64 = (1u64 << k) - 1;
        while set <= full {
            let mut cover = 0u64;
            let mut bits = set;
            while bits != 0 {
                cover |= masks[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            if cover == full {
                let nodes = (0..n).filter(|&v| set >> v & 1 == 1).collect();
                return Ok(finish(view, nodes, DominatingMethod::Exact));
            }
            let low = set & set.wrapping_neg();
            let ripple = set + low;
            set = (((ripple ^ set) >> 2) / low) | ripple;
        }
    }
    unreachable!("the whole vertex set dominates")
}

/// Greedy dictionary maximizing newly covered account weight per pick,
/// stopping once `covered_accounts / total_accounts >= target_ratio`.
pub fn partial_dominating_dictionary(
    view: &ThresholdView<'_>,
    corpus: &Corpus,
    target_ratio: f64,
) -> Result<Dictionary> {
    if !(0.0..=1.0).contains(&target_ratio) {
        return Err(Error::arg(format!("target ratio {target_ratio} outside [0, 1]")));
    }
    if view.node_count() != corpus.len() {
        return Err(Error::arg("graph and corpus sizes differ"));
    }
    let total = corpus.total_accounts();
    let freq = |v: usize| corpus.frequency(v);
    let gain = |v: usize, covered: &[bool]| {
        let own = if covered[v] { 0 } else { freq(v) };
        own + view
            .neighbors(v)
            .filter(|nb| !covered[nb.id as usize])
            .map(|nb| freq(nb.id as usize))
            .sum::<u64>()
    };
    let stop = |covered: &[bool]| {
        let got: u64 = covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(v, _)| freq(v))
            .sum();
        got as f64 >= target_ratio * total as f64
    };
    let ordering = greedy_cover(view, gain, stop);
    Ok(Dictionary {
        ordering,
        label: DictionaryLabel::Custom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simjoin::{Edge, PasswordGraph};

    fn graph(n: usize, edges: &[(u32, u32)]) -> PasswordGraph {
        let edges: Vec<Edge> = edges
            .iter()
            .map(|&(a, b)| Edge {
                source: a.min(b),
                target: a.max(b),
                distance: 1,
            })
            .collect();
        PasswordGraph::from_edges(
            (0..n).map(|i| format!("p{i:03}").into_bytes()).collect(),
            vec![1; n],
            &edges,
            1,
        )
        .unwrap()
    }

    #[test]
    fn star_path_edgeless() {
        let star = graph(5, &[(2, 0), (2, 1), (2, 3), (2, 4)]);
        let r = greedy_dominating_set(&star.full_view());
        assert_eq!(r.nodes, vec![2]);
        assert!(r.is_dominating);

        let path = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(greedy_dominating_set(&path.full_view()).nodes, vec![1]);

        let empty = graph(4, &[]);
        let r = greedy_dominating_set(&empty.full_view());
        assert_eq!(r.size, 4);
        assert_eq!(r.arnautov_bound, Some(4.0));
    }

    #[test]
    fn exact_small() {
        let p4 = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let r = exact_dominating_set(&p4.full_view(), DEFAULT_EXACT_BUDGET).unwrap();
        assert_eq!(r.size, 2);
        assert!(r.is_dominating);
        assert_eq!(r.method, DominatingMethod::Exact);

        let mut k5 = Vec::new();
        for a in 0..5 {
            for b in a + 1..5 {
                k5.push((a, b));
            }
        }
        let k5 = graph(5, &k5);
        assert_eq!(exact_dominating_set(&k5.full_view(), 20).unwrap().size, 1);

        let big = graph(21, &[]);
        assert!(matches!(
            exact_dominating_set(&big.full_view(), DEFAULT_EXACT_BUDGET),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn bound_values() {
        assert_eq!(arnautov_bound(37, 0), 37.0);
        assert!((arnautov_bound(100, 3) - 59.657_359_027_997_266).abs() < 1e-9);
    }

    #[test]
    fn partial_examples() {
        // path a(5) - b(3) - c(2)
        let c = Corpus::from_counts(vec![("aa", 5), ("ab", 3), ("bb", 2)]).unwrap();
        let g = crate::simjoin::build_graph(&c, 1, crate::simjoin::JoinStrategy::Naive).unwrap();
        let v = g.full_view();
        assert!(partial_dominating_dictionary(&v, &c, 0.0).unwrap().is_empty());
        assert_eq!(partial_dominating_dictionary(&v, &c, 0.8).unwrap().ordering, vec![1]);
        let full = partial_dominating_dictionary(&v, &c, 1.0).unwrap();
        assert!(is_dominating(&v, &full.ordering));
        assert!(partial_dominating_dictionary(&v, &c, 1.5).is_err());
        assert!(partial_dominating_dictionary(&v, &c, -0.1).is_err());
    }
}
