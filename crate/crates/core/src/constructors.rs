//! Explicit chain constructions for `2^n`, `2^n + 1` and `2^n - 1`.
//!
//! Every constructor returns a validated chain. The `2^n - 1` constructors
//! also report how the length splits into the base sub-chain, the terms the
//! construction adjoins on purpose, and filler terms needed to reach the
//! target exactly.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::One;

use crate::chain::{
    chain_product, double_plus_one_extend, mersenne, pow2, AdditionChain, ChainBuilder,
    DegreeDChain, Nat,
};
use crate::error::{domain, Error, Result};
use crate::search::{shortest_chain, SearchBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Power,
    PowerPlusOne,
    HalvingRun,
    PrimeLadder,
    Backtrack,
    Pothole,
    FactorPothole,
    IteratedFactor,
    Degree,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Power,
        Method::PowerPlusOne,
        Method::HalvingRun,
        Method::PrimeLadder,
        Method::Backtrack,
        Method::Pothole,
        Method::FactorPothole,
        Method::IteratedFactor,
        Method::Degree,
    ];

    /// Constructions whose target is `2^n - 1` and which yield an ordinary
    /// addition chain.
    pub const MERSENNE: [Method; 6] = [
        Method::HalvingRun,
        Method::PrimeLadder,
        Method::Backtrack,
        Method::Pothole,
        Method::FactorPothole,
        Method::IteratedFactor,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Power => "power",
            Method::PowerPlusOne => "power-plus-one",
            Method::HalvingRun => "halving-run",
            Method::PrimeLadder => "prime-ladder",
            Method::Backtrack => "backtrack",
            Method::Pothole => "pothole",
            Method::FactorPothole => "factor-pothole",
            Method::IteratedFactor => "iterated-factor",
            Method::Degree => "degree",
        }
    }

    /// Smallest exponent the construction accepts.
    pub fn min_n(self) -> u64 {
        match self {
            Method::Power => 0,
            Method::PowerPlusOne => 1,
            Method::HalvingRun | Method::IteratedFactor => 2,
            Method::PrimeLadder | Method::Pothole | Method::Degree => 3,
            Method::Backtrack | Method::FactorPothole => 4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| domain("method", format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionOutcome {
    pub chain: AdditionChain,
    pub base_length: usize,
    pub adjoined_count: usize,
    pub filler_count: usize,
    pub method: Method,
}

impl ConstructionOutcome {
    fn new(chain: AdditionChain, base_length: usize, filler_count: usize, method: Method) -> Self {
        debug_assert!(chain.is_valid(), "{method} produced an invalid chain");
        let adjoined_count = chain.length() - base_length - filler_count;
        ConstructionOutcome {
            chain,
            base_length,
            adjoined_count,
            filler_count,
            method,
        }
    }

    pub fn length(&self) -> usize {
        self.chain.length()
    }
}

/// Runs a `2^n - 1` construction by tag with its default parameters.
pub fn construct(method: Method, n: u64) -> Result<ConstructionOutcome> {
    match method {
        Method::HalvingRun => halving_run_chain(n),
        Method::PrimeLadder => prime_ladder_chain(n),
        Method::Backtrack => backtrack_chain(n),
        Method::Pothole => pothole_chain(n),
        Method::FactorPothole => factor_pothole_chain(n),
        Method::IteratedFactor => iterated_factor_chain(n, None),
        Method::Power | Method::PowerPlusOne | Method::Degree => Err(domain(
            "construct",
            format!("{method} does not build an addition chain for 2^n - 1"),
        )),
    }
}

fn certified(elements: Vec<Nat>) -> AdditionChain {
    match AdditionChain::from_elements(elements) {
        Ok(c) => c,
        Err(report) => panic!("construction fault: {report}"),
    }
}

fn doubling(upto: u64) -> Vec<Nat> {
    (0..=upto).map(pow2).collect()
}

/// `1, 2, 4, ..., 2^n`.
pub fn power_chain(n: u64) -> AdditionChain {
    certified(doubling(n))
}

/// `1, 2, 4, ..., 2^n, 2^n + 1`.
pub fn power_plus_one_chain(n: u64) -> Result<AdditionChain> {
    if n < 1 {
        return Err(domain("power_plus_one_chain", "n must be at least 1"));
    }
    let mut xs = doubling(n);
    xs.push(pow2(n) + 1u32);
    Ok(certified(xs))
}

/// `1, 2, 3, 6, ..., 3 * 2^(n-2)`, then the earlier terms `3 * 2^(n-4)`,
/// `3 * 2^(n-6)`, ... and a final `+1` for odd `n`.
pub fn halving_run_chain(n: u64) -> Result<ConstructionOutcome> {
    if n < 2 {
        return Err(domain("halving_run_chain", "n must be at least 2"));
    }
    let three = Nat::from(3u32);
    let mut xs = vec![Nat::one(), Nat::from(2u32)];
    xs.extend((0..=n - 2).map(|j| &three << j));
    let base_length = xs.len() - 1;
    let mut acc = xs.last().cloned().expect("non-empty");
    let mut m = n as i64 - 4;
    while m >= 0 {
        acc += &three << m as u64;
        xs.push(acc.clone());
        m -= 2;
    }
    if n % 2 == 1 {
        acc += 1u32;
        xs.push(acc);
    }
    Ok(ConstructionOutcome::new(
        certified(xs),
        base_length,
        0,
        Method::HalvingRun,
    ))
}

/// Appends `2^e` for each exponent (in the given order) to the running total
/// starting at the last element.
fn add_powers(xs: &mut Vec<Nat>, exps: impl IntoIterator<Item = u64>) -> usize {
    let mut acc = xs.last().cloned().expect("non-empty");
    let mut added = 0;
    for e in exps {
        acc += pow2(e);
        xs.push(acc.clone());
        added += 1;
    }
    added
}

/// Exponents below `top` not yet used, largest first.
fn missing_exponents(top: u64, used: &[bool]) -> Vec<u64> {
    (0..top).rev().filter(|&e| !used[e as usize]).collect()
}

/// Primes up to `limit` by trial division (only small limits occur here).
fn small_primes(limit: u64) -> Vec<u64> {
    (2..=limit)
        .filter(|&p| (2..).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .collect()
}

/// `floor(log_p(n))` by integer comparison.
pub fn ilog(n: u64, p: u64) -> u32 {
    n.ilog(p)
}

/// Upper limit on the adjoined terms of [`prime_ladder_chain`]:
/// the sum of `floor(log_p n)` over primes `p <= (n-1)/2`.
pub fn ladder_budget(n: u64) -> u64 {
    small_primes((n.saturating_sub(1)) / 2)
        .into_iter()
        .map(|p| ilog(n, p) as u64)
        .sum()
}

/// Doubling to `2^(n-1)`, then `2^((n-1)/q)` for every prime power
/// `q <= n-1` with `p <= (n-1)/2`, then a largest-first binary filler.
pub fn prime_ladder_chain(n: u64) -> Result<ConstructionOutcome> {
    if n < 3 {
        return Err(domain("prime_ladder_chain", "n must be at least 3"));
    }
    let top = n - 1;
    let mut xs = doubling(top);
    let base_length = xs.len() - 1;
    let mut used = vec![false; n as usize];
    used[top as usize] = true;

    let mut exps = Vec::new();
    for p in small_primes(top / 2) {
        let mut q = p;
        while q <= top {
            let e = top / q;
            if !used[e as usize] {
                used[e as usize] = true;
                exps.push(e);
            }
            match q.checked_mul(p) {
                Some(next) => q = next,
                None => break,
            }
        }
    }
    exps.sort_unstable_by(|a, b| b.cmp(a));
    add_powers(&mut xs, exps);
    let fill = missing_exponents(top, &used);
    let filler = add_powers(&mut xs, fill);
    let out = ConstructionOutcome::new(certified(xs), base_length, filler, Method::PrimeLadder);
    assert!(out.adjoined_count as u64 <= ladder_budget(n));
    Ok(out)
}

/// `floor((n-1) / 2^j)`.
fn e(n: u64, j: u32) -> u64 {
    (n - 1) >> j
}

/// Doubling to `2^(n-1)`, then the tail terms `2^n - 2^e_j` reached by adding
/// the regulators `2^e_(j-1) - 2^e_j`, each built as a run of powers of two.
pub fn backtrack_chain(n: u64) -> Result<ConstructionOutcome> {
    if n < 4 {
        return Err(domain("backtrack_chain", "n must be at least 4"));
    }
    let l = n.ilog2();
    let mut b = ChainBuilder::new();
    let mut powers = vec![0usize];
    for _ in 1..n {
        let last = *powers.last().expect("non-empty");
        powers.push(b.add(last, last).0);
    }
    let base_length = b.length();

    let mut tail = powers[(n - 1) as usize];
    for j in 1..=l {
        let (lo, hi) = (e(n, j), e(n, j - 1));
        // 2^lo + 2^(lo+1) + ... + 2^(hi-1)
        let mut reg = powers[lo as usize];
        for k in lo + 1..hi {
            reg = b.add(reg, powers[k as usize]).0;
        }
        tail = b.add(tail, reg).0;
    }
    let mut filler = 0;
    if e(n, l) == 1 {
        b.add(tail, 0);
        filler = 1;
    }
    let chain = b.finish();
    assert_eq!(chain.target(), &mersenne(n));
    Ok(ConstructionOutcome::new(
        chain,
        base_length,
        filler,
        Method::Backtrack,
    ))
}

/// Doubling to `2^(n-1)`, then `2^e_j` for `j = 1..=floor(log2 n)`, then the
/// missing powers of two largest first.
pub fn pothole_chain(n: u64) -> Result<ConstructionOutcome> {
    if n < 3 {
        return Err(domain("pothole_chain", "n must be at least 3"));
    }
    let top = n - 1;
    let mut xs = doubling(top);
    let base_length = xs.len() - 1;
    let mut used = vec![false; n as usize];
    used[top as usize] = true;
    let exps: Vec<u64> = (1..=n.ilog2()).map(|j| e(n, j)).collect();
    for &x in &exps {
        used[x as usize] = true;
    }
    add_powers(&mut xs, exps);
    let filler = add_powers(&mut xs, missing_exponents(top, &used));
    Ok(ConstructionOutcome::new(
        certified(xs),
        base_length,
        filler,
        Method::Pothole,
    ))
}

/// `2^n - 1 = (2^(n/2) - 1)(2^(n/2) + 1)` with the first factor from
/// [`pothole_chain`]; odd `n` goes through `n - 1` and a doubling plus one.
pub fn factor_pothole_chain(n: u64) -> Result<ConstructionOutcome> {
    if n < 4 {
        return Err(domain("factor_pothole_chain", "n must be at least 4"));
    }
    if n % 2 == 1 {
        let inner = factor_pothole_chain(n - 1)?;
        let chain = double_plus_one_extend(&inner.chain);
        return Ok(ConstructionOutcome::new(
            chain,
            inner.base_length,
            inner.filler_count,
            Method::FactorPothole,
        ));
    }
    let k = n / 2;
    let first = if k < 3 {
        halving_run_chain(k)?
    } else {
        pothole_chain(k)?
    };
    let chain = chain_product(&first.chain, &power_plus_one_chain(k)?);
    Ok(ConstructionOutcome::new(
        chain,
        first.base_length,
        first.filler_count,
        Method::FactorPothole,
    ))
}

/// Exponents up to this are solved exactly in [`iterated_factor_chain`].
pub const SEARCH_BASE_MAX: u64 = 8;

fn searched_base(k: u64) -> &'static AdditionChain {
    static BASES: [OnceLock<AdditionChain>; SEARCH_BASE_MAX as usize + 1] =
        [const { OnceLock::new() }; SEARCH_BASE_MAX as usize + 1];
    BASES[k as usize].get_or_init(|| {
        let r = shortest_chain(&mersenne(k), SearchBudget::default());
        assert!(r.proven_optimal, "base case 2^{k} - 1 not settled");
        r.witness
    })
}

/// Recursive factoring: odd `k` becomes `2 * (k-1)/2 ...` via a doubling plus
/// one, even `k` is `(2^(k/2) - 1)(2^(k/2) + 1)`. Each halving uses one level
/// of depth `s` (default `floor(log2 n)`); exponents up to
/// [`SEARCH_BASE_MAX`] use an exact search, deeper leftovers
/// [`halving_run_chain`].
pub fn iterated_factor_chain(n: u64, s: Option<u32>) -> Result<ConstructionOutcome> {
    if n < 2 {
        return Err(domain("iterated_factor_chain", "n must be at least 2"));
    }
    let max_s = n.ilog2();
    let s = s.unwrap_or(max_s);
    if s < 1 || s > max_s {
        return Err(domain(
            "iterated_factor_chain",
            format!("s = {s} outside 1..={max_s}"),
        ));
    }
    let (chain, base_length) = iterate(n, s)?;
    Ok(ConstructionOutcome::new(
        chain,
        base_length,
        0,
        Method::IteratedFactor,
    ))
}

fn iterate(k: u64, depth: u32) -> Result<(AdditionChain, usize)> {
    if k <= SEARCH_BASE_MAX {
        let c = searched_base(k).clone();
        let len = c.length();
        return Ok((c, len));
    }
    if depth == 0 {
        let o = halving_run_chain(k)?;
        let len = o.length();
        return Ok((o.chain, len));
    }
    if k % 2 == 1 {
        let (inner, base) = iterate(k - 1, depth)?;
        return Ok((double_plus_one_extend(&inner), base));
    }
    let (half, base) = iterate(k / 2, depth - 1)?;
    Ok((chain_product(&half, &power_plus_one_chain(k / 2)?), base))
}

/// Degree `d = floor((n-1)/2)` chain for `2^n - 1` of length `n + 1`.
///
/// Odd `n`: doubling to `2^(n-1)`, then the blocks `{2^(n-2), ..., 2^d}`
/// and `{2^(d-1), ..., 1}`. Even `n` cannot be finished by two such blocks
/// (`2^(n-1) - 1` has `n - 1` set bits, two blocks cover at most `n - 2`), so
/// it uses `1, 2, 3, 6, ..., 3 * 2^(n-2)` and one block of the `d` terms
/// `3 * 4^i`.
pub fn degree_chain(n: u64) -> Result<DegreeDChain> {
    if n < 3 {
        return Err(domain("degree_chain", "n must be at least 3"));
    }
    let d = ((n - 1) / 2) as usize;
    let (elements, blocks) = if n % 2 == 1 {
        let mut xs = doubling(n - 1);
        let mut blocks: Vec<Vec<usize>> = (0..n as usize - 1).map(|i| vec![i]).collect();
        let high: Vec<usize> = (d..=n as usize - 2).collect();
        let low: Vec<usize> = (0..d).collect();
        for block in [high, low] {
            let sum: Nat = block.iter().map(|&i| &xs[i]).sum();
            let next = xs.last().expect("non-empty") + sum;
            xs.push(next);
            blocks.push(block);
        }
        (xs, blocks)
    } else {
        let three = Nat::from(3u32);
        let mut xs = vec![Nat::one(), Nat::from(2u32)];
        xs.extend((0..=n - 2).map(|j| &three << j));
        // index of 3 * 2^j is j + 2
        let mut blocks: Vec<Vec<usize>> = vec![vec![0], vec![0]];
        blocks.extend((3..xs.len()).map(|i| vec![i - 1]));
        let block: Vec<usize> = (0..d).map(|i| 2 * i + 2).collect();
        let sum: Nat = block.iter().map(|&i| &xs[i]).sum();
        let next = xs.last().expect("non-empty") + sum;
        xs.push(next);
        blocks.push(block);
        (xs, blocks)
    };
    let chain = DegreeDChain::from_parts(elements, blocks, d);
    let report = chain.validate();
    if !report.is_ok() {
        panic!("degree construction fault for n = {n}: {report}");
    }
    assert_eq!(chain.target(), &mersenne(n));
    assert_eq!(chain.length() as u64, n + 1);
    Ok(chain)
}
