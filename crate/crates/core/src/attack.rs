//! Statistical guessing model.
//!
//! A guess at password `p` is counted as compromising every account whose
//! password lies in the closed neighborhood `N[p]` of the similarity graph.
//! The maximum successful guesses of a dictionary prefix is the total account
//! frequency over the union of the closed neighborhoods of its entries.

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::simjoin::ThresholdView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DictionaryLabel {
    Frequency,
    Degree,
    NeighborhoodWeight,
    Custom,
}

impl DictionaryLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            DictionaryLabel::Frequency => "frequency",
            DictionaryLabel::Degree => "degree",
            DictionaryLabel::NeighborhoodWeight => "neighborhood_weight",
            DictionaryLabel::Custom => "custom",
        }
    }
}

/// A guess order over node ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dictionary {
    pub ordering: Vec<usize>,
    pub label: DictionaryLabel,
}

impl Dictionary {
    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }
}

fn check_consistent(view: &ThresholdView<'_>, corpus: &Corpus) -> Result<()> {
    if view.node_count() != corpus.len() {
        return Err(Error::arg(format!(
            "graph has {} nodes but corpus has {} passwords",
            view.node_count(),
            corpus.len()
        )));
    }
    Ok(())
}

/// Descending frequency. Node ids already follow the canonical corpus order,
/// so this is the identity permutation.
pub fn rank_by_frequency(corpus: &Corpus) -> Dictionary {
    Dictionary {
        ordering: (0..corpus.len()).collect(),
        label: DictionaryLabel::Frequency,
    }
}

/// Descending static degree; ties by frequency and then password bytes,
/// which is ascending node id.
pub fn rank_by_degree(view: &ThresholdView<'_>) -> Dictionary {
    let mut ordering: Vec<usize> = (0..view.node_count()).collect();
    let degree: Vec<usize> = ordering.iter().map(|&v| view.degree(v)).collect();
    ordering.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(a.cmp(&b)));
    Dictionary {
        ordering,
        label: DictionaryLabel::Degree,
    }
}

/// Account weight of a node's closed neighborhood, `sum_{u in N[v]} f(u)`.
pub fn neighborhood_weight(view: &ThresholdView<'_>, corpus: &Corpus, v: usize) -> u64 {
    corpus.frequency(v)
        + view
            .neighbors(v)
            .map(|nb| corpus.frequency(nb.id as usize))
            .sum::<u64>()
}

/// Descending closed-neighborhood account weight, canonical tiebreak.
///
/// One reading of combining a node's frequency with that of its neighbors.
pub fn rank_by_neighborhood_weight(view: &ThresholdView<'_>, corpus: &Corpus) -> Result<Dictionary> {
    check_consistent(view, corpus)?;
    let weight: Vec<u64> = (0..corpus.len())
        .map(|v| neighborhood_weight(view, corpus, v))
        .collect();
    let mut ordering: Vec<usize> = (0..corpus.len()).collect();
    ordering.sort_by(|&a, &b| weight[b].cmp(&weight[a]).then(a.cmp(&b)));
    Ok(Dictionary {
        ordering,
        label: DictionaryLabel::NeighborhoodWeight,
    })
}

fn check_ids(view: &ThresholdView<'_>, nodes: &[usize]) -> Result<()> {
    match nodes.iter().find(|&&v| v >= view.node_count()) {
        Some(v) => Err(Error::arg(format!("unknown node id {v}"))),
        None => Ok(()),
    }
}

/// `N[S]`: union of the closed neighborhoods of `nodes`, sorted ascending.
pub fn closed_neighborhood(view: &ThresholdView<'_>, nodes: &[usize]) -> Result<Vec<usize>> {
    check_ids(view, nodes)?;
    let mut seen = vec![false; view.node_count()];
    for &v in nodes {
        seen[v] = true;
        for nb in view.neighbors(v) {
            seen[nb.id as usize] = true;
        }
    }
    Ok(members(&seen))
}

fn members(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect()
}

/// `G_max` of the first `size` dictionary entries.
pub fn max_successful_guesses(
    view: &ThresholdView<'_>,
    corpus: &Corpus,
    dictionary: &Dictionary,
    size: usize,
) -> Result<u64> {
    check_consistent(view, corpus)?;
    if size == 0 || size > dictionary.len() {
        return Err(Error::arg(format!(
            "dictionary size {size} outside 1..={}",
            dictionary.len()
        )));
    }
    let covered = closed_neighborhood(view, &dictionary.ordering[..size])?;
    Ok(covered.iter().map(|&v| corpus.frequency(v)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub size: usize,
    pub gmax: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrackingCurve {
    pub label: DictionaryLabel,
    pub points: Vec<CurvePoint>,
}

/// Coverage after every prefix length `1..=len`, maintained as a running union.
pub fn cracking_curve(view: &ThresholdView<'_>, corpus: &Corpus, dictionary: &Dictionary) -> Result<CrackingCurve> {
    let schedule: Vec<usize> = (1..=dictionary.len()).collect();
    cracking_curve_at(view, corpus, dictionary, &schedule)
}

/// Coverage at the given strictly increasing prefix sizes.
pub fn cracking_curve_at(
    view: &ThresholdView<'_>,
    corpus: &Corpus,
    dictionary: &Dictionary,
    schedule: &[usize],
) -> Result<CrackingCurve> {
    check_consistent(view, corpus)?;
    check_ids(view, &dictionary.ordering)?;
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg("curve sizes must be strictly increasing"));
    }
    if let Some(&last) = schedule.last() {
        if schedule[0] == 0 || last > dictionary.len() {
            return Err(Error::arg(format!(
                "curve sizes must lie in 1..={}",
                dictionary.len()
            )));
        }
    }
    let total = corpus.total_accounts() as f64;
    let mut covered = vec![false; view.node_count()];
    let mut gmax = 0u64;
    let mut taken = 0;
    let mut points = Vec::with_capacity(schedule.len());
    for &size in schedule {
        for &v in &dictionary.ordering[taken..size] {
            for u in std::iter::once(v).chain(view.neighbors(v).map(|nb| nb.id as usize)) {
                if !covered[u] {
                    covered[u] = true;
                    gmax += corpus.frequency(u);
                }
            }
        }
        taken = size;
        points.push(CurvePoint {
            size,
            gmax,
            ratio: gmax as f64 / total,
        });
    }
    Ok(CrackingCurve {
        label: dictionary.label,
        points,
    })
}

/// Least fixpoint of closed-neighborhood expansion from `seeds`: every node
/// in a connected component that contains a seed. Sorted ascending.
pub fn closure_expand(view: &ThresholdView<'_>, seeds: &[usize]) -> Result<Vec<usize>> {
    check_ids(view, seeds)?;
    let mut seen = vec![false; view.node_count()];
    let mut stack: Vec<usize> = Vec::new();
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(u) = stack.pop() {
        for nb in view.neighbors(u) {
            let v = nb.id as usize;
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    Ok(members(&seen))
}
