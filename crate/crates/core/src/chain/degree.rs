use num_traits::One;

use super::{AdditionChain, Nat, Step, ValidationReport, Violation};

/// Generalized chain where each new element is the previous element plus a
/// block of between 1 and `degree` earlier elements (repeats allowed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeDChain {
    elements: Vec<Nat>,
    blocks: Vec<Vec<usize>>,
    degree: usize,
}

impl DegreeDChain {
    pub fn from_parts(elements: Vec<Nat>, blocks: Vec<Vec<usize>>, degree: usize) -> Self {
        DegreeDChain {
            elements,
            blocks,
            degree,
        }
    }

    pub fn elements(&self) -> &[Nat] {
        &self.elements
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn length(&self) -> usize {
        self.elements.len().saturating_sub(1)
    }

    pub fn target(&self) -> &Nat {
        self.elements.last().expect("non-empty chain")
    }

    pub fn validate(&self) -> ValidationReport {
        let el = &self.elements;
        if el.is_empty() {
            return ValidationReport::fail(0, Violation::Empty);
        }
        if !el[0].is_one() {
            return ValidationReport::fail(0, Violation::FirstNotOne);
        }
        if self.degree == 0 {
            return ValidationReport::fail(1.min(el.len()), Violation::StepOrder);
        }
        for k in 1..el.len() {
            let Some(block) = self.blocks.get(k - 1) else {
                return ValidationReport::fail(
                    k,
                    Violation::StepCount {
                        expected: el.len() - 1,
                        found: self.blocks.len(),
                    },
                );
            };
            if block.is_empty() || block.len() > self.degree {
                return ValidationReport::fail(k, Violation::StepOrder);
            }
            if block.iter().any(|&j| j >= k) {
                return ValidationReport::fail(k, Violation::StepIndexOutOfRange);
            }
            if el[k] <= el[k - 1] {
                return ValidationReport::fail(k, Violation::NotIncreasing);
            }
            let sum = block.iter().fold(el[k - 1].clone(), |acc, &j| acc + &el[j]);
            if sum != el[k] {
                return ValidationReport::fail(k, Violation::WrongSum);
            }
        }
        if self.blocks.len() != el.len() - 1 {
            return ValidationReport::fail(
                el.len(),
                Violation::StepCount {
                    expected: el.len() - 1,
                    found: self.blocks.len(),
                },
            );
        }
        ValidationReport::ok()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Degree-1 chains are exactly star chains.
    pub fn to_star_chain(&self) -> Option<AdditionChain> {
        if self.degree != 1 || !self.is_valid() {
            return None;
        }
        let steps = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| Step::new(b[0], i))
            .collect();
        Some(AdditionChain::from_parts(
            self.elements.clone(),
            steps,
            self.target().clone(),
        ))
    }

    /// Reads a star chain as a degree-1 chain.
    pub fn from_star_chain(chain: &AdditionChain) -> Option<DegreeDChain> {
        if !chain.is_star().ok()? {
            return None;
        }
        let blocks = chain.steps().iter().map(|s| vec![s.left]).collect();
        Some(DegreeDChain::from_parts(
            chain.elements().to_vec(),
            blocks,
            1,
        ))
    }
}

pub fn validate_degree_d(chain: &DegreeDChain) -> ValidationReport {
    chain.validate()
}
