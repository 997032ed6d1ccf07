//! Partition structures: for every `n` up to a grade bound `N` the relations
//! `P^n_1, ..., P^n_n` partition the injective `n`-tuples. Includes the
//! `E^n` reduct ("same label"), the induced action on labels, and the
//! combinatorics behind its surjectivity, kernel and orbit mixing.

mod action;
mod mixing;
mod realize;
mod reduct;

use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::fraisse::{ClassOracle, FraisseError};
use crate::structures::{
    for_each_tuple, free_amalgam, is_injective, Amalgam, FingerprintDiff, FinStructure, PartialMap, Signature, StructureError, Tuple,
};

pub use action::{class_action, compose_actions, kernel_check, preserves_labels, ClassAction};
pub use mixing::{disjoint_copies, mixing_witness, MixingWitness};
pub use realize::{realize_class_permutation, seed_member, RealizeCertificate};
pub use reduct::{en_reduct, en_signature, lift, EnReductOracle};

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error(transparent)]
    Fraisse(#[from] FraisseError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("not a member of the partition class at grade {grade}")]
    NotMember { grade: usize },
    #[error("label {label} of arity {n} sent to both {first} and {second}")]
    Conflict { n: usize, label: usize, first: usize, second: usize },
    #[error("labels {first} and {second} of arity {n} both sent to {image}")]
    NotInjective { n: usize, image: usize, first: usize, second: usize },
    #[error("E^{n} has {classes} classes, more than {n}")]
    TooManyClasses { n: usize, classes: usize },
    #[error("E^{n} is not an equivalence on injective tuples")]
    NotEquivalence { n: usize },
    #[error("types differ: {diff:?}")]
    TypeMismatch { diff: FingerprintDiff },
    #[error("incompatible input: {0}")]
    Incompatible(String),
    #[error("invalid class action: {0}")]
    InvalidAction(String),
}

/// The class of partition structures up to grade `N`.
#[derive(Clone, Debug)]
pub struct PartitionOracle {
    grade: usize,
    signature: Arc<Signature>,
}

impl PartitionOracle {
    pub fn new(grade: usize) -> Self {
        PartitionOracle {
            grade,
            signature: Arc::new(Signature::graded("P", grade)),
        }
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    /// Index of `P^n_i` in the signature.
    pub fn symbol(n: usize, i: usize) -> usize {
        n * (n - 1) / 2 + i - 1
    }

    /// The label `i` with `tuple ∈ P^n_i`, the first one if there are several.
    pub fn label(&self, s: &FinStructure, tuple: &[usize]) -> Option<usize> {
        let n = tuple.len();
        (1..=n).find(|&i| s.holds(Self::symbol(n, i), tuple))
    }

    fn label_count(s: &FinStructure, tuple: &[usize]) -> usize {
        let n = tuple.len();
        (1..=n).filter(|&i| s.holds(Self::symbol(n, i), tuple)).count()
    }

    /// A structure from a labelling function on injective tuples.
    pub fn from_labels(&self, size: usize, mut label: impl FnMut(&[usize]) -> usize) -> Result<FinStructure, PartitionError> {
        let mut s = FinStructure::new(Arc::clone(&self.signature), size);
        for n in 1..=self.grade {
            for t in (0..size).permutations(n) {
                let i = label(&t);
                if !(1..=n).contains(&i) {
                    return Err(PartitionError::InvalidAction(format!("label {i} for arity {n}")));
                }
                s.insert(Self::symbol(n, i), t)?;
            }
        }
        Ok(s)
    }

    /// Gives every unlabelled injective tuple the label 1.
    pub fn complete_lowest(&self, s: &mut FinStructure) {
        let all: Vec<usize> = (0..s.size()).collect();
        let mut missing = Vec::new();
        for n in 1..=self.grade {
            for_each_tuple(&all, n, |t| {
                if is_injective(t) && self.label(s, t).is_none() {
                    missing.push((Self::symbol(n, 1), t.to_vec()));
                }
                true
            });
        }
        for (symbol, t) in missing {
            s.insert(symbol, t).expect("tuple in range");
        }
    }

    fn new_injective(&self, size: usize, from: usize) -> Vec<Tuple> {
        (1..=self.grade)
            .flat_map(|n| (0..size).permutations(n))
            .filter(|t| t.iter().any(|&e| e >= from))
            .collect()
    }
}

impl ClassOracle for PartitionOracle {
    fn name(&self) -> String {
        format!("partition[N={}]", self.grade)
    }

    fn signature(&self) -> Arc<Signature> {
        Arc::clone(&self.signature)
    }

    fn is_member(&self, s: &FinStructure) -> bool {
        let size = s.size();
        for n in 1..=self.grade {
            let mut total = 0u128;
            for i in 1..=n {
                let rel = s.relation(Self::symbol(n, i));
                for t in rel {
                    if !is_injective(t) {
                        return false;
                    }
                    if (1..i).any(|j| s.holds(Self::symbol(n, j), t)) {
                        return false;
                    }
                }
                total += rel.len() as u128;
            }
            let injective: u128 = (0..n).map(|j| size.saturating_sub(j) as u128).product();
            if total != injective {
                return false;
            }
        }
        true
    }

    fn is_member_on(&self, s: &FinStructure, elements: &[usize]) -> bool {
        (1..=self.grade).all(|n| {
            for_each_tuple(elements, n, |t| Self::label_count(s, t) == usize::from(is_injective(t)))
        })
    }

    fn admissible(&self, _symbol: usize, tuple: &[usize]) -> bool {
        is_injective(tuple)
    }

    fn support_local(&self) -> bool {
        true
    }

    /// Free amalgam with every new injective tuple labelled 1.
    fn amalgamate(
        &self,
        a: &FinStructure,
        b: &FinStructure,
        f: &PartialMap,
        c: &FinStructure,
        g: &PartialMap,
    ) -> Result<Amalgam, FraisseError> {
        let mut am = free_amalgam(a, b, f, c, g)?;
        self.complete_lowest(&mut am.structure);
        Ok(am)
    }

    fn structures_over(&self, base: &FinStructure, extra: usize, cap: usize) -> Result<Vec<FinStructure>, FraisseError> {
        if !self.is_member(base) {
            return Ok(Vec::new());
        }
        let size = base.size() + extra;
        let tuples = self.new_injective(size, base.size());
        let count = tuples.iter().try_fold(1u128, |acc, t| acc.checked_mul(t.len() as u128));
        match count {
            Some(c) if c <= cap as u128 => {}
            other => {
                return Err(FraisseError::Resource {
                    what: format!("{} labellings over a base of size {}", self.name(), base.size()),
                    needed: other.unwrap_or(u128::MAX),
                    cap: cap as u128,
                })
            }
        }
        let mut out = Vec::new();
        let mut digits = vec![1usize; tuples.len()];
        loop {
            let mut s = base.grow(extra);
            for (t, &i) in tuples.iter().zip(&digits) {
                s.insert(Self::symbol(t.len(), i), t.clone())?;
            }
            out.push(s);
            let mut p = tuples.len();
            loop {
                if p == 0 {
                    return Ok(out);
                }
                p -= 1;
                digits[p] += 1;
                if digits[p] <= tuples[p].len() {
                    break;
                }
                digits[p] = 1;
            }
        }
    }
}
