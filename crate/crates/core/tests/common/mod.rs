#![allow(dead_code)]

use pwnet::corpus::Corpus;
use pwnet::simjoin::{Edge, PasswordGraph};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random corpus of distinct byte strings drawn from `alphabet`.
pub fn random_corpus<R: Rng>(rng: &mut R, n: usize, max_len: usize, alphabet: &[u8]) -> Corpus {
    let mut seen = std::collections::HashSet::new();
    while seen.len() < n {
        let len = rng.gen_range(1..=max_len);
        let pw: Vec<u8> = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
        seen.insert(pw);
    }
    Corpus::from_counts(seen.into_iter().map(|p| (p, rng.gen_range(1..=50)))).unwrap()
}

/// Graph with arbitrary edges and frequencies, labels `v000`, `v001`, ...
pub fn graph_from_edges(n: usize, edges: &[(usize, usize)], freqs: Vec<u64>) -> PasswordGraph {
    let mut list: Vec<Edge> = edges
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| Edge {
            source: a.min(b) as u32,
            target: a.max(b) as u32,
            distance: 1,
        })
        .collect();
    list.sort();
    list.dedup_by_key(|e| (e.source, e.target));
    PasswordGraph::from_edges(
        (0..n).map(|i| format!("v{i:03}").into_bytes()).collect(),
        freqs,
        &list,
        1,
    )
    .unwrap()
}

/// Erdos-Renyi style graph with edge probability `p`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> (PasswordGraph, Corpus) {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    // descending frequencies keep node ids in canonical corpus order
    let mut freqs: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=100)).collect();
    freqs.sort_unstable_by(|a, b| b.cmp(a));
    let corpus = Corpus::from_counts(
        freqs
            .iter()
            .enumerate()
            .map(|(i, &f)| (format!("v{i:03}").into_bytes(), f)),
    )
    .unwrap();
    let g = graph_from_edges(n, &edges, freqs);
    for v in 0..n {
        assert_eq!(g.password(v), corpus.password(v));
    }
    (g, corpus)
}
