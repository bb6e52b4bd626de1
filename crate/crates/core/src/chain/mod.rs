//! Addition chains and the certificates built on them.
//!
//! An [`AdditionChain`] stores its ascending element list together with the
//! index pair that produced every element after the leading `1`. Storing the
//! provenance as indices keeps validation at one big-integer addition per
//! step, even when elements run to thousands of bits.
//!
//! Chains are plain data and may be invalid (for instance when loaded from a
//! file); [`AdditionChain::validate`] is the single authority on validity.

mod builder;
mod degree;
mod equivalence;
pub mod file;

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

pub(crate) use builder::ChainBuilder;
pub use degree::{validate_degree_d, DegreeDChain};
pub use equivalence::{check_equivalence_witness, EquivalenceWitness};

/// Arbitrary-precision non-negative integer used for every chain element.
pub type Nat = BigUint;

/// `2^e` as a [`Nat`].
pub fn pow2(e: u64) -> Nat {
    Nat::one() << e
}

/// `2^e - 1` as a [`Nat`].
pub fn mersenne(e: u64) -> Nat {
    pow2(e) - 1u32
}

/// Summand indices of one chain step; `left <= right`, both pointing at
/// earlier elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub left: usize,
    pub right: usize,
}

impl Step {
    /// Builds a step with the indices put in canonical order.
    pub fn new(a: usize, b: usize) -> Self {
        Step {
            left: a.min(b),
            right: a.max(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Empty,
    FirstNotOne,
    StepCount { expected: usize, found: usize },
    StepOrder,
    StepIndexOutOfRange,
    NotIncreasing,
    WrongSum,
    TargetMismatch,
}

/// Outcome of a validity check: `None` when the chain is valid, otherwise the
/// first failing element index and what went wrong there.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub failure: Option<(usize, Violation)>,
}

impl ValidationReport {
    pub fn ok() -> Self {
        ValidationReport { failure: None }
    }

    fn fail(index: usize, violation: Violation) -> Self {
        ValidationReport {
            failure: Some((index, violation)),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }

    pub fn failing_index(&self) -> Option<usize> {
        self.failure.as_ref().map(|(i, _)| *i)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "ok"),
            Some((i, v)) => {
                let what = match v {
                    Violation::Empty => "chain has no elements".to_string(),
                    Violation::FirstNotOne => "first element is not 1".to_string(),
                    Violation::StepCount { expected, found } => {
                        format!("expected {expected} steps, found {found}")
                    }
                    Violation::StepOrder => "step has left index > right index".to_string(),
                    Violation::StepIndexOutOfRange => {
                        "step references an element that is not earlier".to_string()
                    }
                    Violation::NotIncreasing => "elements are not strictly increasing".to_string(),
                    Violation::WrongSum => {
                        "element is not the sum of its step summands".to_string()
                    }
                    Violation::TargetMismatch => "last element differs from target".to_string(),
                };
                write!(f, "invalid at index {i}: {what}")
            }
        }
    }
}

/// Ascending addition chain with per-step provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditionChain {
    elements: Vec<Nat>,
    steps: Vec<Step>,
    target: Nat,
}

impl AdditionChain {
    /// Assembles a chain without checking it. Use [`validate`](Self::validate)
    /// before trusting the result.
    pub fn from_parts(elements: Vec<Nat>, steps: Vec<Step>, target: Nat) -> Self {
        AdditionChain {
            elements,
            steps,
            target,
        }
    }

    /// The empty chain `[1]` for the target 1.
    pub fn unit() -> Self {
        AdditionChain::from_parts(vec![Nat::one()], Vec::new(), Nat::one())
    }

    /// Builds a chain from its elements alone, choosing for every element the
    /// summand pair with the largest possible larger summand.
    pub fn from_elements(elements: Vec<Nat>) -> std::result::Result<Self, ValidationReport> {
        if elements.is_empty() {
            return Err(ValidationReport::fail(0, Violation::Empty));
        }
        let mut steps = Vec::with_capacity(elements.len() - 1);
        for k in 1..elements.len() {
            match find_summands(&elements[..k], &elements[k]) {
                Some(step) => steps.push(step),
                None => return Err(ValidationReport::fail(k, Violation::WrongSum)),
            }
        }
        let target = elements.last().cloned().unwrap_or_default();
        let chain = AdditionChain::from_parts(elements, steps, target);
        let report = chain.validate();
        if report.is_ok() {
            Ok(chain)
        } else {
            Err(report)
        }
    }

    pub fn elements(&self) -> &[Nat] {
        &self.elements
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn target(&self) -> &Nat {
        &self.target
    }

    /// Number of elements after the leading 1.
    pub fn length(&self) -> usize {
        self.elements.len().saturating_sub(1)
    }

    pub fn last(&self) -> &Nat {
        self.elements
            .last()
            .expect("chain has at least one element")
    }

    pub fn validate(&self) -> ValidationReport {
        validate_chain(self)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// True when every step uses the immediately preceding element.
    pub fn is_star(&self) -> Result<bool> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(Error::Contract {
                op: "is_star",
                reason: report.to_string(),
            });
        }
        Ok(self.steps.iter().enumerate().all(|(i, s)| s.right == i))
    }

    /// Determiner/regulator decomposition of a star chain.
    pub fn star_view(&self) -> Result<StarView> {
        if !self.is_star()? {
            return Err(Error::Contract {
                op: "star_view",
                reason: "chain is not a star chain".into(),
            });
        }
        let determiners = self
            .steps
            .iter()
            .map(|s| self.elements[s.right].clone())
            .collect();
        let regulators = self
            .steps
            .iter()
            .map(|s| self.elements[s.left].clone())
            .collect();
        Ok(StarView {
            determiners,
            regulators,
        })
    }
}

/// Partition view of a star chain: generator `i` produces
/// `determiners[i] + regulators[i]`, and the determiner is always the
/// element just before the generated one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarView {
    pub determiners: Vec<Nat>,
    pub regulators: Vec<Nat>,
}

fn find_summands(prefix: &[Nat], value: &Nat) -> Option<Step> {
    // prefix is ascending when the chain is well formed; scan the larger
    // summand downwards and binary-search its partner.
    for hi in (0..prefix.len()).rev() {
        if &prefix[hi] * 2u32 < *value {
            break;
        }
        if prefix[hi] >= *value {
            continue;
        }
        let need = value - &prefix[hi];
        if let Ok(lo) = prefix[..=hi].binary_search(&need) {
            return Some(Step::new(lo, hi));
        }
    }
    None
}

pub fn validate_chain(chain: &AdditionChain) -> ValidationReport {
    let el = &chain.elements;
    if el.is_empty() {
        return ValidationReport::fail(0, Violation::Empty);
    }
    if !el[0].is_one() {
        return ValidationReport::fail(0, Violation::FirstNotOne);
    }
    for k in 1..el.len() {
        let Some(step) = chain.steps.get(k - 1) else {
            return ValidationReport::fail(
                k,
                Violation::StepCount {
                    expected: el.len() - 1,
                    found: chain.steps.len(),
                },
            );
        };
        if step.left > step.right {
            return ValidationReport::fail(k, Violation::StepOrder);
        }
        if step.right >= k {
            return ValidationReport::fail(k, Violation::StepIndexOutOfRange);
        }
        if el[k] <= el[k - 1] {
            return ValidationReport::fail(k, Violation::NotIncreasing);
        }
        if !is_sum(&el[k], &el[step.left], &el[step.right]) {
            return ValidationReport::fail(k, Violation::WrongSum);
        }
    }
    if chain.steps.len() != el.len() - 1 {
        return ValidationReport::fail(
            el.len(),
            Violation::StepCount {
                expected: el.len() - 1,
                found: chain.steps.len(),
            },
        );
    }
    if chain.target != el[el.len() - 1] {
        return ValidationReport::fail(el.len() - 1, Violation::TargetMismatch);
    }
    ValidationReport::ok()
}

fn is_sum(value: &Nat, a: &Nat, b: &Nat) -> bool {
    // cheap size test first, then the exact sum
    let vb = value.bits();
    let mb = a.bits().max(b.bits());
    if vb != mb && vb != mb + 1 {
        return false;
    }
    &(a + b) == value
}

/// Chain for `a * b` from chains for `a` and `b`: the chain for `a`, then
/// every later element of `b`'s chain scaled by `a`.
///
/// The appended elements are produced by addition through `b`'s steps, so no
/// big-integer multiplication is needed. Both inputs must be valid.
pub fn chain_product(a_chain: &AdditionChain, b_chain: &AdditionChain) -> AdditionChain {
    debug_assert!(a_chain.is_valid() && b_chain.is_valid());
    let offset = a_chain.elements.len();
    let a_last = offset - 1;
    let map = |j: usize| if j == 0 { a_last } else { offset + j - 1 };

    let mut elements = Vec::with_capacity(offset + b_chain.length());
    elements.extend(a_chain.elements.iter().cloned());
    let mut steps = a_chain.steps.clone();
    for s in &b_chain.steps {
        let (l, r) = (map(s.left), map(s.right));
        let value = &elements[l] + &elements[r];
        elements.push(value);
        steps.push(Step::new(l, r));
    }
    let target = a_chain.target() * b_chain.target();
    debug_assert_eq!(elements.last(), Some(&target));
    AdditionChain::from_parts(elements, steps, target)
}

/// Extends a chain for `m` to a chain for `2m + 1` by appending `2m` and
/// `2m + 1`.
pub fn double_plus_one_extend(chain: &AdditionChain) -> AdditionChain {
    let mut elements = chain.elements.clone();
    let mut steps = chain.steps.clone();
    let last = elements.len() - 1;
    let doubled = &elements[last] << 1u32;
    elements.push(doubled);
    steps.push(Step::new(last, last));
    let odd = &elements[last + 1] + 1u32;
    elements.push(odd.clone());
    steps.push(Step::new(0, last + 1));
    AdditionChain::from_parts(elements, steps, odd)
}

impl fmt::Display for AdditionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}
