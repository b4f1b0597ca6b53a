//! Unit-cost Levenshtein distance over bytes and neighborhood-size counting.
//!
//! The counting half works with a password of length `L` over an alphabet of
//! `N` symbols and asks how many candidates lie at edit distance `k`. Three
//! different numbers are produced and never reconciled:
//!
//! * [`analytic_candidate_count`]: the published closed forms for `k <= 2`,
//! * [`termwise_candidate_count`]: the sum of the individual edit-case terms,
//! * [`enumerate_exact_neighborhood`]: distinct strings found by brute force.
//!
//! For `k = 1` the first two agree. For `k = 2` they do not, and both count
//! edit scripts rather than distinct strings, so they exceed the brute-force
//! count.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default alphabet size: printable ASCII.
pub const DEFAULT_ALPHABET_SIZE: u64 = 95;

/// Default cap on the number of strings the brute-force enumeration may generate.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 5_000_000;

fn common_affix(a: &[u8], b: &[u8]) -> (usize, usize) {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let suffix = a[prefix..]
        .iter()
        .rev()
        .zip(b[prefix..].iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    (prefix, suffix)
}

/// Minimum number of single-byte insertions, deletions and substitutions
/// turning `a` into `b`.
pub fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    let (prefix, suffix) = common_affix(a, b);
    let a = &a[prefix..a.len() - suffix];
    let b = &b[prefix..b.len() - suffix];
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let above = row[j + 1];
            let sub = diag + usize::from(ca != cb);
            row[j + 1] = sub.min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[b.len()]
}

/// Reusable scratch space for thresholded distance computations.
///
/// Only the diagonal band of width `2t + 1` is evaluated and the scan stops
/// as soon as every cell in a row exceeds `t`.
#[derive(Debug, Default, Clone)]
pub struct BandedMatcher {
    prev: Vec<usize>,
    cur: Vec<usize>,
}

impl BandedMatcher {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `Some(d)` when `levenshtein(a, b) = d <= t`, otherwise `None`.
    pub fn distance_within(&mut self, a: &[u8], b: &[u8], t: usize) -> Option<usize> {
        if a.len().abs_diff(b.len()) > t {
            return None;
        }
        let (prefix, suffix) = common_affix(a, b);
        let a = &a[prefix..a.len() - suffix];
        let b = &b[prefix..b.len() - suffix];
        if a.is_empty() || b.is_empty() {
            // length gap already checked
            return Some(a.len().max(b.len()));
        }

        let (n, m) = (a.len(), b.len());
        let inf = t + 1;
        self.prev.clear();
        self.prev.resize(m + 1, inf);
        self.cur.clear();
        self.cur.resize(m + 1, inf);
        for (j, cell) in self.prev.iter_mut().enumerate().take(t.min(m) + 1) {
            *cell = j;
        }

        for i in 1..=n {
            let lo = i.saturating_sub(t).max(1);
            let hi = (i + t).min(m);
            self.cur[lo - 1] = if lo == 1 { i.min(inf) } else { inf };
            let mut row_min = self.cur[lo - 1];
            let ca = a[i - 1];
            for j in lo..=hi {
                let sub = self.prev[j - 1] + usize::from(ca != b[j - 1]);
                let v = sub.min(self.prev[j] + 1).min(self.cur[j - 1] + 1).min(inf);
                self.cur[j] = v;
                row_min = row_min.min(v);
            }
            if row_min > t {
                return None;
            }
            std::mem::swap(&mut self.prev, &mut self.cur);
        }
        let d = self.prev[m];
        (d <= t).then_some(d)
    }
}

/// Thresholded Levenshtein: the distance if it is at most `t`, else `None`.
pub fn bounded_levenshtein(a: &[u8], b: &[u8], t: usize) -> Option<usize> {
    BandedMatcher::new().distance_within(a, b, t)
}

fn binomial(n: i128, k: i128) -> i128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) / (i + 1))
}

fn checked(v: Option<i128>, what: &'static str) -> Result<u128> {
    let v = v.ok_or(Error::Overflow(what))?;
    u128::try_from(v).map_err(|_| Error::Overflow(what))
}

/// Closed-form candidate count `#Sp(k)` for `k` in `0..=2`:
///
/// * `k = 0`: `1`
/// * `k = 1`: `(2L + 1) N`
/// * `k = 2`: `(3/2 L^2 + 3/2 L + 1) N^2 - L N`, evaluated over the rationals
pub fn analytic_candidate_count(length: u64, alphabet: u64, radius: u32) -> Result<u128> {
    if alphabet == 0 {
        return Err(Error::arg("alphabet size must be at least 1"));
    }
    let l = i128::from(length);
    let n = i128::from(alphabet);
    match radius {
        0 => Ok(1),
        1 => checked(
            l.checked_mul(2)
                .and_then(|x| x.checked_add(1))
                .and_then(|x| x.checked_mul(n)),
            "#Sp(1)",
        ),
        2 => {
            // 2 * #Sp(2) = (3L^2 + 3L + 2) N^2 - 2 L N
            let numerator = l
                .checked_mul(l)
                .and_then(|l2| l2.checked_mul(3))
                .and_then(|x| x.checked_add(3 * l + 2))
                .and_then(|x| x.checked_mul(n))
                .and_then(|x| x.checked_mul(n))
                .and_then(|x| x.checked_sub(2 * l * n));
            let numerator = checked(numerator, "#Sp(2)")?;
            if numerator % 2 != 0 {
                return Err(Error::NonIntegral {
                    numerator,
                    denominator: 2,
                });
            }
            Ok(numerator / 2)
        }
        k => Err(Error::UnsupportedRadius(k)),
    }
}

/// Sum of the per-case edit counts.
///
/// For `k = 1`: insertion `C(L+1,1) N`, deletion `C(L,1)`, substitution
/// `C(L,1) (N-1)`. For `k = 2` the six listed cases: two insertions,
/// substitution with insertion, insertion with deletion, two substitutions,
/// deletion with substitution, two deletions. Binomials with negative or
/// too-small upper index are zero.
pub fn termwise_candidate_count(length: u64, alphabet: u64, radius: u32) -> Result<u128> {
    if alphabet == 0 {
        return Err(Error::arg("alphabet size must be at least 1"));
    }
    let l = i128::from(length);
    let n = i128::from(alphabet);
    let c = binomial;
    let total = match radius {
        0 => Some(1),
        1 => [
            c(l + 1, 1).checked_mul(n),
            Some(c(l, 1)),
            c(l, 1).checked_mul(n - 1),
        ]
        .into_iter()
        .try_fold(0i128, |acc, t| acc.checked_add(t?)),
        2 => [
            c(l + 2, 2).checked_mul(n * n),
            c(l, 1)
                .checked_mul(n - 1)
                .and_then(|x| x.checked_mul(c(l + 1, 1)))
                .and_then(|x| x.checked_mul(n)),
            c(l, 1)
                .checked_mul(c(l, 1))
                .and_then(|x| x.checked_mul(n)),
            c(l, 2).checked_mul((n - 1) * (n - 1)),
            c(l, 1)
                .checked_mul(c(l - 1, 1))
                .and_then(|x| x.checked_mul(n - 1)),
            Some(c(l, 2)),
        ]
        .into_iter()
        .try_fold(0i128, |acc, t| acc.checked_add(t?)),
        k => return Err(Error::UnsupportedRadius(k)),
    };
    checked(total, "termwise count")
}

/// Upper bound on the number of strings produced by `k` rounds of single edits.
fn closure_size_bound(length: usize, alphabet: usize, k: u32) -> u128 {
    let n = alphabet as u128 + 1;
    (0..k as u128).fold(1u128, |acc, i| {
        let l = length as u128 + i;
        acc.saturating_mul((2 * l + 1).saturating_mul(n))
    })
}

fn single_edits(s: &[u8], alphabet: &[u8], out: &mut HashSet<Vec<u8>>) {
    for i in 0..=s.len() {
        for &c in alphabet {
            let mut v = Vec::with_capacity(s.len() + 1);
            v.extend_from_slice(&s[..i]);
            v.push(c);
            v.extend_from_slice(&s[i..]);
            out.insert(v);
        }
    }
    for i in 0..s.len() {
        let mut del = s.to_vec();
        del.remove(i);
        out.insert(del);
        for &c in alphabet {
            if c != s[i] {
                let mut v = s.to_vec();
                v[i] = c;
                out.insert(v);
            }
        }
    }
}

/// Counts distinct strings over `alphabet` at distance exactly `k` from `p`.
///
/// Generates the `k`-fold single-edit closure of `p` and keeps the strings
/// whose true distance is `k`. Refuses when the closure could exceed `budget`.
pub fn enumerate_exact_neighborhood(p: &[u8], alphabet: &[u8], k: u32, budget: u128) -> Result<u128> {
    let mut symbols = alphabet.to_vec();
    symbols.sort_unstable();
    symbols.dedup();
    let bound = closure_size_bound(p.len(), symbols.len(), k);
    if bound > budget {
        return Err(Error::Resource(format!(
            "edit closure of radius {k} may reach {bound} strings, budget is {budget}"
        )));
    }
    let mut frontier: HashSet<Vec<u8>> = HashSet::from([p.to_vec()]);
    for _ in 0..k {
        let mut next = HashSet::new();
        for s in &frontier {
            single_edits(s, &symbols, &mut next);
        }
        frontier = next;
    }
    let k = k as usize;
    Ok(frontier.iter().filter(|s| levenshtein(s, p) == k).count() as u128)
}

/// The reference password used for a given `(L, N)` when none is supplied:
/// the first `L` symbols of the alphabet, cycling when `L > N`.
pub fn reference_password(alphabet: &[u8], length: usize) -> Vec<u8> {
    (0..length).map(|i| alphabet[i % alphabet.len()]).collect()
}

/// `N` distinct byte symbols: printable ASCII from the space character when
/// `N <= 95`, otherwise raw bytes from zero.
pub fn default_alphabet(size: usize) -> Vec<u8> {
    if size <= 95 {
        (0..size as u8).map(|i| b' ' + i).collect()
    } else {
        (0..size.min(256)).map(|i| i as u8).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodCountReport {
    pub length: u64,
    pub alphabet_size: u64,
    pub radius: u32,
    pub analytic_count: u128,
    pub termwise_count: u128,
    pub exact_distinct_count: Option<u128>,
}

/// Exhaustive counts are attempted only up to these sizes.
pub const EXACT_MAX_LENGTH: u64 = 2;
pub const EXACT_MAX_ALPHABET: u64 = 3;

impl NeighborhoodCountReport {
    /// Computes both formula counts; adds the brute-force count when
    /// `L <= 2` and `N <= 3`, or when an explicit password is supplied and the
    /// enumeration fits the budget.
    pub fn compute(length: u64, alphabet_size: u64, radius: u32, password: Option<&[u8]>) -> Result<Self> {
        let analytic_count = analytic_candidate_count(length, alphabet_size, radius)?;
        let termwise_count = termwise_candidate_count(length, alphabet_size, radius)?;
        if alphabet_size > 256 {
            return Ok(Self {
                length,
                alphabet_size,
                radius,
                analytic_count,
                termwise_count,
                exact_distinct_count: None,
            });
        }
        let alphabet = default_alphabet(alphabet_size as usize);
        let exact_distinct_count = match password {
            Some(p) => Some(enumerate_exact_neighborhood(
                p,
                &alphabet,
                radius,
                DEFAULT_ENUMERATION_BUDGET,
            )?),
            None if length <= EXACT_MAX_LENGTH && alphabet_size <= EXACT_MAX_ALPHABET => {
                let p = reference_password(&alphabet, length as usize);
                Some(enumerate_exact_neighborhood(
                    &p,
                    &alphabet,
                    radius,
                    DEFAULT_ENUMERATION_BUDGET,
                )?)
            }
            None => None,
        };
        Ok(Self {
            length,
            alphabet_size,
            radius,
            analytic_count,
            termwise_count,
            exact_distinct_count,
        })
    }
}

/// Flat `key=value` lines, one per field; an absent exact count prints `NA`.
impl fmt::Display for NeighborhoodCountReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "length={}", self.length)?;
        writeln!(f, "alphabet_size={}", self.alphabet_size)?;
        writeln!(f, "radius={}", self.radius)?;
        writeln!(f, "analytic_count={}", self.analytic_count)?;
        writeln!(f, "termwise_count={}", self.termwise_count)?;
        match self.exact_distinct_count {
            Some(v) => writeln!(f, "exact_distinct_count={v}"),
            None => writeln!(f, "exact_distinct_count=NA"),
        }
    }
}
