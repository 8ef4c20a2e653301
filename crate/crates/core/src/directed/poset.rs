use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of an index in its poset. Ids follow the lexicographic order of
/// the labels, which is the tie-break order used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndexId(pub usize);

impl fmt::Display for IndexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Finite upward-directed partial order on labelled indices.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPoset {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
    covers: Vec<(IndexId, IndexId)>,
    rank: Vec<usize>,
    top: IndexId,
}

impl IndexPoset {
    /// Builds the reflexive-transitive closure of `pairs` (each `(a, b)`
    /// meaning `a ≤ b`) and checks antisymmetry and directedness.
    pub fn new<S: AsRef<str>>(labels: &[S], pairs: &[(S, S)]) -> Result<Self> {
        let mut sorted: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        sorted.sort();
        let unique: BTreeSet<&String> = sorted.iter().collect();
        if unique.len() != sorted.len() {
            return Err(Error::BadShape("duplicate index label".into()));
        }
        if sorted.is_empty() {
            return Err(Error::BadShape("empty index set".into()));
        }
        let n = sorted.len();
        let find = |l: &str| {
            sorted
                .binary_search_by(|x| x.as_str().cmp(l))
                .map_err(|_| Error::UnknownIndex(l.to_string()))
        };
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            let (a, b) = (find(a.as_ref())?, find(b.as_ref())?);
            leq[a][b] = true;
        }
        // Warshall closure
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::BadShape(format!(
                        "order is not antisymmetric: {} and {} are mutually below each other",
                        sorted[i], sorted[j]
                    )));
                }
            }
        }
        let tops: Vec<usize> = (0..n).filter(|&t| (0..n).all(|i| leq[i][t])).collect();
        let top = match tops.as_slice() {
            [t] => IndexId(*t),
            _ => {
                return Err(Error::BadShape(
                    "index set is not directed upward (no greatest element)".into(),
                ))
            }
        };
        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && leq[a][b] && !(0..n).any(|c| c != a && c != b && leq[a][c] && leq[c][b]) {
                    covers.push((IndexId(a), IndexId(b)));
                }
            }
        }
        // longest chain from a minimal element
        let mut rank = vec![0usize; n];
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b) in &covers {
                if rank[b.0] < rank[a.0] + 1 {
                    rank[b.0] = rank[a.0] + 1;
                    changed = true;
                }
            }
        }
        Ok(Self {
            labels: sorted,
            leq,
            covers,
            rank,
            top,
        })
    }

    /// Chain `labels[0] ≤ labels[1] ≤ …`.
    pub fn chain<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = labels.windows(2).map(|w| (w[0].as_ref(), w[1].as_ref())).collect();
        let labels: Vec<&str> = labels.iter().map(|s| s.as_ref()).collect();
        Self::new(&labels, &pairs)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = IndexId> + '_ {
        (0..self.len()).map(IndexId)
    }

    pub fn label(&self, i: IndexId) -> &str {
        &self.labels[i.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id(&self, label: &str) -> Result<IndexId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(IndexId)
            .ok_or_else(|| Error::UnknownIndex(label.to_string()))
    }

    pub fn leq(&self, a: IndexId, b: IndexId) -> bool {
        self.leq[a.0][b.0]
    }

    pub fn lt(&self, a: IndexId, b: IndexId) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn top(&self) -> IndexId {
        self.top
    }

    /// Covering pairs `(a, b)`: `a < b` with nothing strictly between.
    pub fn covers(&self) -> &[(IndexId, IndexId)] {
        &self.covers
    }

    pub fn covering_successors(&self, a: IndexId) -> impl Iterator<Item = IndexId> + '_ {
        self.covers.iter().filter(move |(s, _)| *s == a).map(|&(_, t)| t)
    }

    /// Length of the longest chain from a minimal element up to `a`.
    pub fn rank(&self, a: IndexId) -> usize {
        self.rank[a.0]
    }

    /// All ids ordered by rank, then label.
    pub fn bottom_up(&self) -> Vec<IndexId> {
        let mut ids: Vec<IndexId> = self.ids().collect();
        ids.sort_by_key(|&i| (self.rank(i), i));
        ids
    }

    pub fn up_set(&self, a: IndexId) -> Vec<IndexId> {
        self.ids().filter(|&b| self.leq(a, b)).collect()
    }

    pub fn minimal(&self) -> Vec<IndexId> {
        self.minimal_of(&self.ids().collect::<Vec<_>>())
    }

    /// Minimal elements of `set` in label order.
    pub fn minimal_of(&self, set: &[IndexId]) -> Vec<IndexId> {
        let mut out: Vec<IndexId> = set
            .iter()
            .copied()
            .filter(|&a| !set.iter().any(|&b| self.lt(b, a)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn minimal_upper_bounds(&self, a: IndexId, b: IndexId) -> Vec<IndexId> {
        let ub: Vec<IndexId> = self.ids().filter(|&c| self.leq(a, c) && self.leq(b, c)).collect();
        self.minimal_of(&ub)
    }

    /// `true` when `set` contains everything above each of its members.
    pub fn is_up_closed(&self, set: &BTreeSet<IndexId>) -> bool {
        set.iter()
            .all(|&a| self.ids().filter(|&b| self.leq(a, b)).all(|b| set.contains(&b)))
    }

    /// Triples `a < b < c`.
    pub fn composable_triples(&self) -> Vec<(IndexId, IndexId, IndexId)> {
        let mut out = Vec::new();
        for a in self.ids() {
            for b in self.ids().filter(|&b| self.lt(a, b)) {
                for c in self.ids().filter(|&c| self.lt(b, c)) {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    /// Covering pairs as label pairs, the form used in system files.
    pub fn cover_labels(&self) -> Vec<(String, String)> {
        self.covers
            .iter()
            .map(|&(a, b)| (self.label(a).to_string(), self.label(b).to_string()))
            .collect()
    }
}
