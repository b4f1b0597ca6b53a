//! Password similarity networks.
//!
//! A corpus of leaked passwords becomes a graph whose nodes are the unique
//! passwords and whose edges join pairs within a small Levenshtein distance.
//! On that graph the crate measures scale-free structure, simulates
//! frequency- and degree-ordered guessing attacks where a guess compromises
//! its whole closed neighborhood, and computes small cracking dictionaries
//! as dominating sets.
//!
//! ```
//! use pwnet::{corpus::Corpus, simjoin::{build_graph, JoinStrategy}, mindict::greedy_dominating_set};
//!
//! let corpus = Corpus::from_counts(vec![("password", 10), ("password1", 4), ("passw0rd", 2)]).unwrap();
//! let graph = build_graph(&corpus, 2, JoinStrategy::Bucketed).unwrap();
//! let dict = greedy_dominating_set(&graph.full_view());
//! assert_eq!(dict.nodes, vec![0]);
//! ```

pub mod attack;
pub mod corpus;
pub mod error;
pub mod export;
pub mod metric;
pub mod mindict;
pub mod netstats;
pub mod simjoin;

pub use error::{Error, ErrorClass, Result};
