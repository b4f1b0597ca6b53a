//! Password corpora: ingestion, deduplication and summary statistics.
//!
//! Passwords are raw bytes. Two input dialects are understood: a plain list
//! with one entry per line, and the counted `uniq -c` style dump where every
//! line is `<spaces><count> <password>`. Either way the result is a [`Corpus`]
//! of unique passwords in canonical order: descending frequency, ties broken
//! by ascending byte order of the password.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PasswordRecord {
    pub password: Vec<u8>,
    pub frequency: u64,
}

/// Unique passwords with aggregated frequencies, in canonical order.
///
/// Node ids of every graph built from a corpus are indices into
/// [`Corpus::records`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    records: Vec<PasswordRecord>,
    total_accounts: u64,
}

impl Corpus {
    /// Builds a corpus from `(password, count)` pairs, summing duplicates.
    pub fn from_counts<I, P>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (P, u64)>,
        P: Into<Vec<u8>>,
    {
        let mut agg: HashMap<Vec<u8>, u64> = HashMap::new();
        for (password, count) in counts {
            if count == 0 {
                return Err(Error::arg("password frequency must be at least 1"));
            }
            let slot = agg.entry(password.into()).or_insert(0);
            *slot = slot
                .checked_add(count)
                .ok_or(Error::Overflow("password frequency"))?;
        }
        Self::from_map(agg)
    }

    fn from_map(agg: HashMap<Vec<u8>, u64>) -> Result<Self> {
        if agg.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut records: Vec<PasswordRecord> = agg
            .into_iter()
            .map(|(password, frequency)| PasswordRecord { password, frequency })
            .collect();
        records.sort_by(canonical_cmp);
        let total_accounts = records
            .iter()
            .try_fold(0u64, |acc, r| acc.checked_add(r.frequency))
            .ok_or(Error::Overflow("total accounts"))?;
        Ok(Corpus {
            records,
            total_accounts,
        })
    }

    pub fn records(&self) -> &[PasswordRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn unique_count(&self) -> usize {
        self.records.len()
    }

    pub fn total_accounts(&self) -> u64 {
        self.total_accounts
    }

    pub fn password(&self, id: usize) -> &[u8] {
        &self.records[id].password
    }

    pub fn frequency(&self, id: usize) -> u64 {
        self.records[id].frequency
    }

    /// Frequency of the empty password, if the source contained blank entries.
    pub fn empty_password_frequency(&self) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.password.is_empty())
            .map(|r| r.frequency)
    }

    /// Writes the corpus in the counted format accepted by [`parse_counted`].
    pub fn write_counted<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.records {
            write!(out, "{:>7} ", r.frequency)?;
            out.write_all(&r.password)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Canonical record order: descending frequency, then ascending bytes.
pub fn canonical_cmp(a: &PasswordRecord, b: &PasswordRecord) -> std::cmp::Ordering {
    b.frequency
        .cmp(&a.frequency)
        .then_with(|| a.password.cmp(&b.password))
}

/// Iterates over newline-terminated entries, stripping `\n` and a trailing `\r`.
/// A final newline does not produce an extra empty entry.
fn for_each_line<R: BufRead>(mut input: R, mut f: impl FnMut(usize, &[u8]) -> Result<()>) -> Result<usize> {
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = input.read_until(b'\n', &mut buf)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let mut line = buf.as_slice();
        if let Some(rest) = line.strip_suffix(b"\n") {
            line = rest;
        }
        if let Some(rest) = line.strip_suffix(b"\r") {
            line = rest;
        }
        f(line_no, line)?;
    }
    Ok(line_no)
}

/// Parses a plain list with one password per line. Blank lines are kept as
/// the empty password.
pub fn parse_plain<R: BufRead>(input: R) -> Result<Corpus> {
    let mut agg: HashMap<Vec<u8>, u64> = HashMap::new();
    let lines = for_each_line(input, |_, line| {
        *agg.entry(line.to_vec()).or_insert(0) += 1;
        Ok(())
    })?;
    if lines == 0 {
        return Err(Error::EmptyCorpus);
    }
    Corpus::from_map(agg)
}

/// How the count is separated from the password in a counted dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeparatorPolicy {
    /// Exactly one space follows the count; everything after it is the
    /// password, including any further leading spaces.
    #[default]
    SingleSpace,
    /// Any run of spaces or tabs separates the count from the password.
    Whitespace,
}

/// Parses the counted format, `^\s*<digits> <password>$`.
pub fn parse_counted<R: BufRead>(input: R, policy: SeparatorPolicy) -> Result<Corpus> {
    let mut agg: HashMap<Vec<u8>, u64> = HashMap::new();
    let lines = for_each_line(input, |line_no, line| {
        let (count, password) = split_counted(line, policy).map_err(|message| Error::Parse {
            line: line_no,
            message,
        })?;
        let slot = agg.entry(password.to_vec()).or_insert(0);
        *slot = slot.checked_add(count).ok_or(Error::Parse {
            line: line_no,
            message: "aggregated count overflows".into(),
        })?;
        Ok(())
    })?;
    if lines == 0 {
        return Err(Error::EmptyCorpus);
    }
    Corpus::from_map(agg)
}

fn split_counted(line: &[u8], policy: SeparatorPolicy) -> std::result::Result<(u64, &[u8]), String> {
    let start = line
        .iter()
        .position(|b| !matches!(b, b' ' | b'\t'))
        .ok_or_else(|| "missing count".to_string())?;
    let rest = &line[start..];
    let digits = rest.iter().take_while(|b| b.is_ascii_digit()).count();
    if digits == 0 {
        return Err("line does not start with a count".into());
    }
    // digits are ASCII, so this is valid UTF-8
    let count: u64 = std::str::from_utf8(&rest[..digits])
        .unwrap()
        .parse()
        .map_err(|_| "count out of range".to_string())?;
    if count == 0 {
        return Err("count must be at least 1".into());
    }
    let after = &rest[digits..];
    let password = match policy {
        SeparatorPolicy::SingleSpace => after
            .strip_prefix(b" ")
            .ok_or_else(|| "expected a single space after the count".to_string())?,
        SeparatorPolicy::Whitespace => {
            let skip = after.iter().take_while(|b| matches!(b, b' ' | b'\t')).count();
            if skip == 0 {
                return Err("expected whitespace after the count".into());
            }
            &after[skip..]
        }
    };
    Ok((count, password))
}

/// First `n` records in canonical order.
pub fn top_n(corpus: &Corpus, n: usize) -> Result<Corpus> {
    if n == 0 {
        return Err(Error::arg("top_n requires n >= 1"));
    }
    let records: Vec<PasswordRecord> = corpus.records.iter().take(n).cloned().collect();
    let total_accounts = records.iter().map(|r| r.frequency).sum();
    Ok(Corpus {
        records,
        total_accounts,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharClassCounts {
    pub lowercase: u64,
    pub uppercase: u64,
    pub digit: u64,
    pub other: u64,
}

impl CharClassCounts {
    pub fn total(&self) -> u64 {
        self.lowercase + self.uppercase + self.digit + self.other
    }

    fn add(&mut self, byte: u8) {
        match byte {
            b'a'..=b'z' => self.lowercase += 1,
            b'A'..=b'Z' => self.uppercase += 1,
            b'0'..=b'9' => self.digit += 1,
            _ => self.other += 1,
        }
    }
}

/// Histograms over unique passwords; frequencies are not used as weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub unique_count: usize,
    pub total_accounts: u64,
    pub length_histogram: BTreeMap<usize, u64>,
    pub charclass_histogram: CharClassCounts,
}

pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut length_histogram = BTreeMap::new();
    let mut classes = CharClassCounts::default();
    for r in corpus.records() {
        *length_histogram.entry(r.password.len()).or_insert(0) += 1;
        r.password.iter().for_each(|&b| classes.add(b));
    }
    Ok(CorpusStats {
        unique_count: corpus.unique_count(),
        total_accounts: corpus.total_accounts(),
        length_histogram,
        charclass_histogram: classes,
    })
}
