//! JSON chain documents.
//!
//! ```json
//! {
//!   "target": "15",
//!   "elements": ["1", "2", "3", "6", "12", "15"],
//!   "steps": [[0, 0], [0, 1], [2, 2], [3, 3], [2, 4]],
//!   "method": "halving-run"
//! }
//! ```
//!
//! Numbers are canonical decimal strings. Degree-d chains carry `degree` and
//! `blocks` instead of `steps`. Constructions add a `measurement` block and
//! search results a `search` block. Writing a parsed document reproduces the
//! input bytes exactly when the input was produced by [`ChainDocument::to_json`].

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AdditionChain, DegreeDChain, Nat, Step};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDocument {
    pub target: String,
    pub elements: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<usize>>>,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement: Option<Measurement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchMeta>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measurement {
    pub method: String,
    pub adjoined_count: usize,
    pub filler_count: usize,
    /// Exact decimal rendering of the bound the construction is checked against.
    pub bound: String,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchMeta {
    pub nodes_expanded: u64,
    pub proven_optimal: bool,
    pub star_only: bool,
}

/// A parsed document in typed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadedChain {
    Addition(AdditionChain),
    Degree(DegreeDChain),
}

impl ChainDocument {
    pub fn from_chain(chain: &AdditionChain, method: &str) -> Self {
        ChainDocument {
            target: chain.target().to_string(),
            elements: chain.elements().iter().map(|e| e.to_string()).collect(),
            steps: Some(chain.steps().iter().map(|s| [s.left, s.right]).collect()),
            degree: None,
            blocks: None,
            method: method.to_string(),
            measurement: None,
            search: None,
        }
    }

    pub fn from_degree_chain(chain: &DegreeDChain, method: &str) -> Self {
        ChainDocument {
            target: chain.target().to_string(),
            elements: chain.elements().iter().map(|e| e.to_string()).collect(),
            steps: None,
            degree: Some(chain.degree()),
            blocks: Some(chain.blocks().to_vec()),
            method: method.to_string(),
            measurement: None,
            search: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Converts to a typed chain. Fails only on malformed numbers or a
    /// missing/ambiguous provenance field; chain validity is not checked.
    pub fn to_chain(&self) -> Result<LoadedChain> {
        let target = parse_nat(&self.target)?;
        let elements = self
            .elements
            .iter()
            .map(|e| parse_nat(e))
            .collect::<Result<Vec<_>>>()?;
        match (&self.steps, &self.degree, &self.blocks) {
            (Some(steps), None, None) => {
                let steps = steps
                    .iter()
                    .map(|&[l, r]| Step { left: l, right: r })
                    .collect();
                Ok(LoadedChain::Addition(AdditionChain::from_parts(
                    elements, steps, target,
                )))
            }
            (None, Some(d), Some(blocks)) => {
                let chain = DegreeDChain::from_parts(elements, blocks.clone(), *d);
                if chain.elements().last() != Some(&target) {
                    return Err(Error::ChainFile(
                        "degree chain target differs from its last element".into(),
                    ));
                }
                Ok(LoadedChain::Degree(chain))
            }
            _ => Err(Error::ChainFile(
                "document needs either `steps` or both `degree` and `blocks`".into(),
            )),
        }
    }
}

/// Parses a canonical decimal string (no sign, no leading zeros).
pub fn parse_nat(s: &str) -> Result<Nat> {
    let canonical =
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(Error::ChainFile(format!("not a canonical decimal: {s:?}")));
    }
    Nat::from_str(s).map_err(|e| Error::ChainFile(format!("{s:?}: {e}")))
}
