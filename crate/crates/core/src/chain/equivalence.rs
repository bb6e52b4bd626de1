use num_bigint::{BigInt, Sign};
use num_traits::Signed;

use super::AdditionChain;
use crate::error::{Error, Result};

/// Witness that chain `a` is equivalent to chain `b`.
///
/// `sub_indices` lists the element indices of the complete sub-chain of `b`
/// (always `0..=t`). `stabilizers[i]` holds `(v, d)` for generator `i + 1`
/// of that sub-chain: `b`'s determiner there equals `a`'s determiner minus
/// `v`, and `b`'s regulator equals `a`'s regulator minus `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub sub_indices: Vec<usize>,
    pub stabilizers: Vec<(BigInt, BigInt)>,
}

impl EquivalenceWitness {
    /// Witness covering the first `stabilizers.len()` generators.
    pub fn prefix(stabilizers: Vec<(BigInt, BigInt)>) -> Self {
        EquivalenceWitness {
            sub_indices: (0..=stabilizers.len()).collect(),
            stabilizers,
        }
    }
}

/// Checks a supplied equivalence witness between two star chains.
///
/// The witness must account for every generator of `a`; a witness that
/// covers only part of `a` does not establish equivalence. When this returns
/// `Ok(true)` the sub-chain of `b` has as many generators as `a`, hence
/// `a.length() <= b.length()`.
pub fn check_equivalence_witness(
    a: &AdditionChain,
    b: &AdditionChain,
    w: &EquivalenceWitness,
) -> Result<bool> {
    let va = a.star_view()?;
    let vb = b.star_view()?;

    let t = w.stabilizers.len();
    if w.sub_indices.iter().any(|&i| i > b.length()) {
        return Err(Error::MalformedWitness(format!(
            "sub-chain index beyond chain of length {}",
            b.length()
        )));
    }
    if w.sub_indices.len() != t + 1 {
        return Err(Error::MalformedWitness(format!(
            "{} stabilizer pairs for a sub-chain of {} elements",
            t,
            w.sub_indices.len()
        )));
    }
    if t > a.length() {
        return Err(Error::MalformedWitness(format!(
            "witness has {t} generators but the equivalent chain only {}",
            a.length()
        )));
    }
    if w.sub_indices.iter().enumerate().any(|(pos, &i)| pos != i) {
        // not a complete (prefix) sub-chain
        return Ok(false);
    }
    if t < a.length() {
        return Ok(false);
    }

    for (i, (v, d)) in w.stabilizers.iter().enumerate() {
        if v.is_negative() || d.is_negative() {
            return Ok(false);
        }
        let a_det = BigInt::from_biguint(Sign::Plus, va.determiners[i].clone());
        let a_reg = BigInt::from_biguint(Sign::Plus, va.regulators[i].clone());
        let b_det = BigInt::from_biguint(Sign::Plus, vb.determiners[i].clone());
        let b_reg = BigInt::from_biguint(Sign::Plus, vb.regulators[i].clone());
        if b_det != a_det - v || b_reg != a_reg - d {
            return Ok(false);
        }
    }
    assert!(
        a.length() <= b.length(),
        "equivalent chains must satisfy length(a) <= length(b)"
    );
    Ok(true)
}
