use std::collections::HashMap;

use num_traits::One;

use super::{AdditionChain, Nat, Step};

/// Accumulates chain values in any order, deduplicating by value, and sorts
/// them into an ascending chain at the end.
///
/// Every inserted value is the sum of two values already present, so after
/// sorting each summand still precedes the value it produces.
#[derive(Debug)]
pub(crate) struct ChainBuilder {
    values: Vec<Nat>,
    derivations: Vec<(usize, usize)>,
    index: HashMap<Nat, usize>,
}

impl ChainBuilder {
    pub(crate) fn new() -> Self {
        let mut index = HashMap::new();
        index.insert(Nat::one(), 0);
        ChainBuilder {
            values: vec![Nat::one()],
            derivations: vec![(0, 0)],
            index,
        }
    }

    #[cfg(test)]
    pub(crate) fn value(&self, id: usize) -> &Nat {
        &self.values[id]
    }

    /// Inserts `values[a] + values[b]`. Returns its id and whether it was new.
    pub(crate) fn add(&mut self, a: usize, b: usize) -> (usize, bool) {
        let sum = &self.values[a] + &self.values[b];
        if let Some(&id) = self.index.get(&sum) {
            return (id, false);
        }
        let id = self.values.len();
        self.index.insert(sum.clone(), id);
        self.values.push(sum);
        self.derivations.push((a, b));
        (id, true)
    }

    /// Number of values beyond the leading 1.
    pub(crate) fn length(&self) -> usize {
        self.values.len() - 1
    }

    pub(crate) fn finish(self) -> AdditionChain {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&x, &y| self.values[x].cmp(&self.values[y]));
        let mut rank = vec![0usize; order.len()];
        for (pos, &id) in order.iter().enumerate() {
            rank[id] = pos;
        }
        let mut elements = Vec::with_capacity(order.len());
        let mut steps = Vec::with_capacity(order.len().saturating_sub(1));
        let mut values: Vec<Option<Nat>> = self.values.into_iter().map(Some).collect();
        for (pos, &id) in order.iter().enumerate() {
            elements.push(values[id].take().expect("each id visited once"));
            if pos > 0 {
                let (a, b) = self.derivations[id];
                steps.push(Step::new(rank[a], rank[b]));
            }
        }
        let target = elements.last().cloned().expect("non-empty");
        AdditionChain::from_parts(elements, steps, target)
    }
}
