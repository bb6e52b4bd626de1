//! Exact shortest addition chains by iterative deepening.
//!
//! For a target `n` the search tries lengths `D = lb, lb + 1, ...` starting
//! from a proven lower bound `lb`, and for each `D` runs a depth-first search
//! over strictly ascending chains. A length is declared optimal only after
//! every shorter length from `lb` upward was exhausted without a hit.
//!
//! Pruning:
//! * reachability: an element `x` at position `i` of a length-`D` chain must
//!   satisfy `x * 2^(D - i) >= n`, since each step at most doubles;
//! * canonical ascent: each new element exceeds the previous one, so every
//!   chain is enumerated once;
//! * the last step is resolved by a two-pointer scan instead of branching.
//!
//! Work above a split level is enumerated sequentially and the subtrees are
//! searched in parallel with `find_map_first`, so the returned witness is the
//! same for any worker count.

mod known;

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::chain::{AdditionChain, Nat};

pub use known::{load_known_values, Iota, IotaOracle, IotaSource, KnownValuesTable};

/// Resource limits for one search call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_depth: u32,
    pub max_nodes: u64,
    pub time_limit: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_depth: 14,
            max_nodes: 1_000_000_000,
            time_limit: Duration::from_secs(300),
        }
    }
}

impl SearchBudget {
    pub fn new(max_depth: u32, max_nodes: u64, time_limit: Duration) -> Self {
        assert!(max_depth > 0 && max_nodes > 0 && !time_limit.is_zero());
        SearchBudget {
            max_depth,
            max_nodes,
            time_limit,
        }
    }
}

/// Switches for the optional pruning rules. Both on by default; turning one
/// off must never change an optimal length, only the amount of work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Start deepening at the binary-weight lower bound rather than at
    /// `ceil(log2 n)`.
    pub weight_bound: bool,
    /// Resolve the final step with a two-pointer scan.
    pub last_step_scan: bool,
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            weight_bound: true,
            last_step_scan: true,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub n: Nat,
    pub optimal_length: u32,
    pub witness: AdditionChain,
    pub nodes_expanded: u64,
    pub proven_optimal: bool,
    pub star_only: bool,
}

pub fn shortest_chain(n: &Nat, budget: SearchBudget) -> SearchResult {
    search(n, budget, SearchOptions::default(), false)
}

pub fn shortest_star_chain(n: &Nat, budget: SearchBudget) -> SearchResult {
    search(n, budget, SearchOptions::default(), true)
}

/// Search with explicit pruning switches.
pub fn search(
    n: &Nat,
    budget: SearchBudget,
    options: SearchOptions,
    star_only: bool,
) -> SearchResult {
    assert!(*n >= Nat::from(1u32), "search target must be at least 1");
    let Some(target) = n.to_u64().filter(|&t| t < (1u64 << 62)) else {
        return fallback(n, 0, star_only);
    };
    if target == 1 {
        return SearchResult {
            n: n.clone(),
            optimal_length: 0,
            witness: AdditionChain::unit(),
            nodes_expanded: 0,
            proven_optimal: true,
            star_only,
        };
    }

    let start = Instant::now();
    let mut nodes = 0u64;
    let lb = if options.weight_bound {
        lower_bound(target)
    } else {
        ceil_log2(target)
    };
    for depth in lb..=budget.max_depth {
        let limits = Limits {
            deadline: start + budget.time_limit,
            max_nodes: budget.max_nodes.saturating_sub(nodes),
        };
        let outcome = run_depth(target, depth as usize, star_only, options, &limits);
        nodes += outcome.nodes;
        match outcome.kind {
            DepthOutcome::Found(elements) => {
                let witness =
                    AdditionChain::from_elements(elements.into_iter().map(Nat::from).collect())
                        .expect("search produces valid chains");
                return SearchResult {
                    n: n.clone(),
                    optimal_length: depth,
                    witness,
                    nodes_expanded: nodes,
                    proven_optimal: true,
                    star_only,
                };
            }
            DepthOutcome::Exhausted => {}
            DepthOutcome::Aborted => break,
        }
    }
    fallback(n, nodes, star_only)
}

/// Proven lower bound on the chain length for `n`: `lambda(n) + ceil(log2 nu(n))`
/// for binary weight `nu(n) <= 4`, and `lambda(n) + 3` for larger weights.
/// It dominates `ceil(log2 n)` and the real bound `log2 n - 1`.
pub fn lower_bound(n: u64) -> u32 {
    if n <= 1 {
        return 0;
    }
    let lambda = 63 - n.leading_zeros();
    let weight = n.count_ones() as u64;
    let by_weight = lambda + ceil_log2(weight).min(3);
    let real = real_lower_bound(n);
    by_weight.max(ceil_log2(n)).max(real)
}

/// Smallest integer strictly above `log2 n - 1`.
fn real_lower_bound(n: u64) -> u32 {
    // log2 n - 1 < L  <=>  n < 2^(L + 1)
    let mut l = 0u32;
    while l < 63 && (1u64 << (l + 1)) <= n {
        l += 1;
    }
    l
}

pub(crate) fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Left-to-right binary method; the upper bound returned when the search
/// cannot prove anything within budget.
pub fn binary_method_chain(n: &Nat) -> AdditionChain {
    let bits = n.bits();
    let mut elements = vec![Nat::from(1u32)];
    for b in (0..bits.saturating_sub(1)).rev() {
        let last = elements.last().unwrap() << 1u32;
        elements.push(last);
        if n.bit(b) {
            let last = elements.last().unwrap() + 1u32;
            elements.push(last);
        }
    }
    AdditionChain::from_elements(elements).expect("binary method chain is valid")
}

fn fallback(n: &Nat, nodes: u64, star_only: bool) -> SearchResult {
    let witness = binary_method_chain(n);
    SearchResult {
        n: n.clone(),
        optimal_length: witness.length() as u32,
        witness,
        nodes_expanded: nodes,
        proven_optimal: false,
        star_only,
    }
}

struct Limits {
    deadline: Instant,
    max_nodes: u64,
}

enum DepthOutcome {
    Found(Vec<u64>),
    Exhausted,
    Aborted,
}

struct Outcome {
    kind: DepthOutcome,
    nodes: u64,
}

/// Depth at which the tree is cut into independently searched subtrees.
const SPLIT_LEVEL: usize = 5;
const CHECK_INTERVAL: u64 = 1 << 12;

fn run_depth(n: u64, depth: usize, star: bool, opts: SearchOptions, limits: &Limits) -> Outcome {
    if (depth as u32) < 63 && (1u64 << depth) < n {
        return Outcome {
            kind: DepthOutcome::Exhausted,
            nodes: 0,
        };
    }
    let shared = Shared {
        abort: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
        found_at: AtomicUsize::new(usize::MAX),
        deadline: limits.deadline,
        max_nodes: limits.max_nodes,
    };

    if !opts.parallel || depth <= SPLIT_LEVEL + 2 {
        let mut dfs = Dfs::new(n, depth, star, opts.last_step_scan, &shared);
        dfs.chain[0] = 1;
        let found = dfs.descend(0);
        dfs.flush();
        return finish(found.then(|| dfs.chain[..=depth].to_vec()), &shared);
    }

    // Enumerate all surviving prefixes of length SPLIT_LEVEL, in the same
    // order a sequential search would visit them.
    let mut prefixes = Vec::new();
    {
        let mut dfs = Dfs::new(n, depth, star, opts.last_step_scan, &shared);
        dfs.chain[0] = 1;
        dfs.collect_prefixes(0, SPLIT_LEVEL, &mut prefixes);
        dfs.flush();
    }
    let found = prefixes
        .par_iter()
        .enumerate()
        .find_map_first(|(index, prefix)| {
            let mut dfs = Dfs::new(n, depth, star, opts.last_step_scan, &shared);
            dfs.index = index;
            if dfs.stopped() {
                return None;
            }
            dfs.chain[..prefix.len()].copy_from_slice(prefix);
            let hit = dfs.descend(prefix.len() - 1);
            dfs.flush();
            if hit {
                shared.found_at.fetch_min(index, Ordering::Relaxed);
            }
            hit.then(|| dfs.chain[..=depth].to_vec())
        });
    finish(found, &shared)
}

fn finish(found: Option<Vec<u64>>, shared: &Shared) -> Outcome {
    let nodes = shared.nodes.load(Ordering::Relaxed);
    let kind = match found {
        Some(chain) => DepthOutcome::Found(chain),
        None if shared.abort.load(Ordering::Relaxed) => DepthOutcome::Aborted,
        None => DepthOutcome::Exhausted,
    };
    Outcome { kind, nodes }
}

struct Shared {
    abort: AtomicBool,
    nodes: AtomicU64,
    /// Smallest prefix index known to contain a solution; subtrees with a
    /// larger index stop early.
    found_at: AtomicUsize,
    deadline: Instant,
    max_nodes: u64,
}

struct Dfs<'a> {
    n: u64,
    depth: usize,
    star: bool,
    last_step_scan: bool,
    chain: [u64; 64],
    index: usize,
    /// Candidate buffers, one per level, reused across siblings.
    buffers: Vec<Vec<u64>>,
    local_nodes: u64,
    shared: &'a Shared,
}

impl<'a> Dfs<'a> {
    fn new(n: u64, depth: usize, star: bool, last_step_scan: bool, shared: &'a Shared) -> Self {
        Dfs {
            n,
            depth,
            star,
            last_step_scan,
            chain: [0; 64],
            index: 0,
            buffers: vec![Vec::new(); depth + 1],
            local_nodes: 0,
            shared,
        }
    }

    fn flush(&mut self) {
        self.shared
            .nodes
            .fetch_add(self.local_nodes % CHECK_INTERVAL, Ordering::Relaxed);
        self.local_nodes = 0;
    }

    fn tick(&mut self) -> bool {
        self.local_nodes += 1;
        if self.local_nodes.is_multiple_of(CHECK_INTERVAL) {
            let total = self
                .shared
                .nodes
                .fetch_add(CHECK_INTERVAL, Ordering::Relaxed)
                + CHECK_INTERVAL;
            if total > self.shared.max_nodes || Instant::now() >= self.shared.deadline {
                self.shared.abort.store(true, Ordering::Relaxed);
            }
        }
        !self.stopped()
    }

    fn stopped(&self) -> bool {
        self.shared.abort.load(Ordering::Relaxed)
            || self.shared.found_at.load(Ordering::Relaxed) < self.index
    }

    /// Fills `buffers[i]` with the admissible values for position `i + 1`, in
    /// decreasing order.
    fn candidates(&mut self, i: usize) {
        let c = &self.chain;
        let last = c[i];
        let remaining = (self.depth - i - 1) as u32;
        // next element x needs x * 2^remaining >= n
        let min_next = if remaining >= 63 {
            1
        } else {
            self.n.div_ceil(1u64 << remaining)
        };
        let mut buf = std::mem::take(&mut self.buffers[i]);
        buf.clear();
        if self.star {
            for lo in (0..=i).rev() {
                let s = last + c[lo];
                if s < min_next {
                    break;
                }
                if s < self.n || (s == self.n && i + 1 == self.depth) {
                    buf.push(s);
                }
            }
        } else {
            for hi in (0..=i).rev() {
                let top = c[hi] * 2;
                if top <= last || top < min_next {
                    break;
                }
                for lo in (0..=hi).rev() {
                    let s = c[hi] + c[lo];
                    if s <= last || s < min_next {
                        break;
                    }
                    if s < self.n || (s == self.n && i + 1 == self.depth) {
                        buf.push(s);
                    }
                }
            }
            buf.sort_unstable_by(|a, b| b.cmp(a));
            buf.dedup();
        }
        self.buffers[i] = buf;
    }

    /// True when `n` is the sum of two elements of `chain[..=i]`.
    fn last_step(&self, i: usize) -> bool {
        let c = &self.chain[..=i];
        if self.star {
            let need = self.n.wrapping_sub(c[i]);
            return self.n > c[i] && c.binary_search(&need).is_ok();
        }
        let (mut lo, mut hi) = (0usize, i);
        while lo <= hi {
            let s = c[lo] + c[hi];
            if s == self.n {
                return true;
            }
            if s < self.n {
                lo += 1;
            } else {
                if hi == 0 {
                    break;
                }
                hi -= 1;
            }
        }
        false
    }

    /// Searches for completions of `chain[..=i]` to a length-`depth` chain
    /// ending at `n`.
    fn descend(&mut self, i: usize) -> bool {
        if !self.tick() {
            return false;
        }
        if i == self.depth {
            return self.chain[i] == self.n;
        }
        if self.last_step_scan && i + 1 == self.depth {
            if self.last_step(i) {
                self.chain[i + 1] = self.n;
                return true;
            }
            return false;
        }
        self.candidates(i);
        let buf = std::mem::take(&mut self.buffers[i]);
        let mut hit = false;
        for &s in &buf {
            self.chain[i + 1] = s;
            if self.descend(i + 1) {
                hit = true;
                break;
            }
            if self.stopped() {
                break;
            }
        }
        self.buffers[i] = buf;
        hit
    }

    fn collect_prefixes(&mut self, i: usize, level: usize, out: &mut Vec<Vec<u64>>) {
        if !self.tick() {
            return;
        }
        if i == level {
            out.push(self.chain[..=i].to_vec());
            return;
        }
        self.candidates(i);
        let buf = std::mem::take(&mut self.buffers[i]);
        for &s in &buf {
            self.chain[i + 1] = s;
            self.collect_prefixes(i + 1, level, out);
        }
        self.buffers[i] = buf;
    }
}
