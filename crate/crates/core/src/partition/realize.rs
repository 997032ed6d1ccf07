use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{class_action, en_reduct, lift, ClassAction, EnReductOracle, PartitionError, PartitionOracle};
use crate::fraisse::{extend_partial_iso, BackAndForthCertificate, ClassOracle, LimitApprox, LogEvent};
use crate::structures::{FinStructure, PartialMap};

/// A member on `N` elements using every label of every arity: the `j`-th
/// injective `n`-tuple in lexicographic order gets label `(j mod n) + 1`.
pub fn seed_member(oracle: &PartitionOracle) -> FinStructure {
    let size = oracle.grade();
    let mut s = FinStructure::new(oracle.signature(), size);
    for n in 1..=oracle.grade() {
        for (j, t) in (0..size).permutations(n).enumerate() {
            s.insert(PartitionOracle::symbol(n, j % n + 1), t).expect("in range");
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizeCertificate {
    pub grade: usize,
    pub sigma: ClassAction,
    pub depth: usize,
    pub seed: FinStructure,
    /// Construction log of the reduct approximation.
    pub log: Vec<LogEvent>,
    pub back_and_forth: BackAndForthCertificate,
    /// Action of the final map, read through labels inherited from the seed.
    pub induced: ClassAction,
    pub verdict: bool,
}

impl RealizeCertificate {
    /// Replays the log and re-checks every claim.
    pub fn verify(&self) -> Result<bool, PartitionError> {
        let p = PartitionOracle::new(self.grade);
        let r = EnReductOracle::new(self.grade);
        let current = LimitApprox::replay(&r, &self.log)?;
        if !self.back_and_forth.verify(&current) {
            return Ok(false);
        }
        let induced = read_action(&p, &self.seed, &current, &self.back_and_forth.map)?;
        Ok(induced == self.induced && self.verdict == (induced == self.sigma))
    }
}

fn read_action(p: &PartitionOracle, seed: &FinStructure, current: &FinStructure, map: &PartialMap) -> Result<ClassAction, PartitionError> {
    let seed_size = seed.size();
    let labelled = lift(p, current, |t| {
        if t.iter().all(|&e| e < seed_size) {
            p.label(seed, t)
        } else {
            None
        }
    })?;
    class_action(p, &labelled, map)
}

/// Realises a total label permutation `sigma` by a partial automorphism of the
/// reduct: a seed is glued to its `sigma`-relabelled copy, the shift onto the
/// copy is the starting map, and `depth` back-and-forth steps extend it.
pub fn realize_class_permutation(
    oracle: &PartitionOracle,
    sigma: &ClassAction,
    depth: usize,
) -> Result<(LimitApprox, RealizeCertificate), PartitionError> {
    if sigma.grade() != oracle.grade() || !sigma.is_total() {
        return Err(PartitionError::InvalidAction(format!(
            "need a total action of grade {}",
            oracle.grade()
        )));
    }
    let seed = seed_member(oracle);
    let n0 = seed.size();
    let mut copy = FinStructure::new(oracle.signature(), n0);
    for n in 1..=oracle.grade() {
        for i in 1..=n {
            let j = sigma.get(n, i).expect("total");
            for t in seed.relation(PartitionOracle::symbol(n, i)) {
                copy.insert(PartitionOracle::symbol(n, j), t.clone())?;
            }
        }
    }
    let empty = FinStructure::new(oracle.signature(), 0);
    let none = PartialMap::new();
    let joined = oracle.amalgamate(&empty, &seed, &none, &copy, &none)?;
    let start = joined.right.clone();

    let reduct_oracle = EnReductOracle::new(oracle.grade());
    let mut approx = LimitApprox::from_seed(&reduct_oracle, &en_reduct(oracle, &joined.structure)?)?;
    let certificate = extend_partial_iso(&reduct_oracle, &mut approx, &start, depth)?;
    let induced = read_action(oracle, &seed, &approx.current, &certificate.map)?;
    let verdict = induced == *sigma;
    Ok((
        approx.clone(),
        RealizeCertificate {
            grade: oracle.grade(),
            sigma: sigma.clone(),
            depth,
            seed,
            log: approx.log,
            back_and_forth: certificate,
            induced,
            verdict,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_uses_every_label() {
        let p = PartitionOracle::new(3);
        let s = seed_member(&p);
        assert!(p.is_member(&s));
        for n in 1..=3 {
            for i in 1..=n {
                assert!(!s.relation(PartitionOracle::symbol(n, i)).is_empty());
            }
        }
    }

    #[test]
    fn identity_is_realised() {
        let p = PartitionOracle::new(2);
        let (_, cert) = realize_class_permutation(&p, &ClassAction::identity(2), 1).unwrap();
        assert!(cert.verdict);
        assert!(cert.verify().unwrap());
    }

    #[test]
    fn swap_at_grade_two() {
        let p = PartitionOracle::new(2);
        let sigma = ClassAction::from_permutations(&[vec![1], vec![2, 1]]).unwrap();
        let (approx, cert) = realize_class_permutation(&p, &sigma, 2).unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.back_and_forth.steps.len(), 2);
        assert!(cert.verify().unwrap());
        assert!(approx.replays(&EnReductOracle::new(2)).unwrap());
    }
}
