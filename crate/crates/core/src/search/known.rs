//! Known values of the shortest chain length and the sourcing policy used
//! whenever a bound needs `iota(n)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use super::{shortest_chain, SearchBudget};
use crate::chain::Nat;
use crate::error::{Error, Result};

/// Immutable `n -> iota(n)` lookup.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnownValuesTable {
    entries: BTreeMap<u64, u32>,
}

/// Parses the plain-text table format: one `n length` pair per line, `#`
/// starts a comment, blank lines are ignored, `n` strictly increasing.
pub fn load_known_values(source: &str) -> Result<KnownValuesTable> {
    let mut entries = BTreeMap::new();
    let mut previous: Option<u64> = None;
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::TableParse {
            line: line_no,
            message,
        };
        let mut fields = line.split_whitespace();
        let (Some(n), Some(len), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err(format!("expected `n length`, got {line:?}")));
        };
        let n: u64 = n.parse().map_err(|e| err(format!("bad n {n:?}: {e}")))?;
        let len: u32 = len
            .parse()
            .map_err(|e| err(format!("bad length {len:?}: {e}")))?;
        if n == 0 {
            return Err(err("n must be positive".into()));
        }
        if previous.is_some_and(|p| n <= p) {
            return Err(err(format!("n = {n} is not strictly increasing")));
        }
        previous = Some(n);
        entries.insert(n, len);
    }
    Ok(KnownValuesTable { entries })
}

impl KnownValuesTable {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u32)>) -> Self {
        KnownValuesTable {
            entries: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, n: u64) -> Option<u32> {
        self.entries.get(&n).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.entries.iter().map(|(&n, &l)| (n, l))
    }

    /// Compares every entry against the search oracle. Entries the search
    /// cannot settle within `budget` are skipped; a proven disagreement is a
    /// data-integrity error.
    pub fn cross_check(&self, budget: SearchBudget) -> Result<usize> {
        let mut checked = 0;
        for (n, len) in self.iter() {
            let r = shortest_chain(&Nat::from(n), budget);
            if !r.proven_optimal {
                continue;
            }
            if r.optimal_length != len {
                return Err(Error::Integrity {
                    n,
                    table: len,
                    search: r.optimal_length,
                });
            }
            checked += 1;
        }
        Ok(checked)
    }

    /// Serializes in the format accepted by [`load_known_values`].
    pub fn to_text(&self, header: &str) -> String {
        let mut out = String::new();
        for line in header.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        for (n, l) in self.iter() {
            out.push_str(&format!("{n} {l}\n"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IotaSource {
    Search,
    Table,
    FallbackUpper,
}

impl IotaSource {
    pub fn tag(self) -> &'static str {
        match self {
            IotaSource::Search => "search",
            IotaSource::Table => "table",
            IotaSource::FallbackUpper => "fallback-upper",
        }
    }
}

impl fmt::Display for IotaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A value of `iota(n)` (or an upper bound on it) with its provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Iota {
    pub value: u32,
    pub source: IotaSource,
}

/// Resolves `iota(n)`: proven search result first, then the table, then the
/// Brauer upper bound `2m` for `2^m + 1 <= n <= 2^(m+1)` (flagged).
#[derive(Debug)]
pub struct IotaOracle {
    table: Option<Arc<KnownValuesTable>>,
    budget: SearchBudget,
    cache: Mutex<HashMap<u64, Iota>>,
}

impl IotaOracle {
    pub fn new(table: Option<Arc<KnownValuesTable>>, budget: SearchBudget) -> Self {
        IotaOracle {
            table,
            budget,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn budget(&self) -> SearchBudget {
        self.budget
    }

    pub fn iota(&self, n: u64) -> Iota {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&n) {
            return *hit;
        }
        let r = shortest_chain(&Nat::from(n), self.budget);
        let found = if r.proven_optimal {
            Iota {
                value: r.optimal_length,
                source: IotaSource::Search,
            }
        } else if let Some(v) = self.table.as_ref().and_then(|t| t.get(n)) {
            Iota {
                value: v,
                source: IotaSource::Table,
            }
        } else {
            Iota {
                value: brauer_upper_iota(n),
                source: IotaSource::FallbackUpper,
            }
        };
        self.cache.lock().expect("cache lock").insert(n, found);
        found
    }
}

/// `2m` for `2^m + 1 <= n <= 2^(m+1)`; binary-method length below 3.
pub fn brauer_upper_iota(n: u64) -> u32 {
    match n {
        0 | 1 => 0,
        2 => 1,
        _ => 2 * (super::ceil_log2(n) - 1),
    }
}
