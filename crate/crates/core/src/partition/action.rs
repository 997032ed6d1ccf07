use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{PartitionError, PartitionOracle};
use crate::structures::{is_partial_iso, FinStructure, PartialMap};

/// For each `n` up to the grade, a partial permutation of the labels `1..=n`.
///
/// JSON form: `{"1": [1], "2": [2, null]}` with 1-based images and `null`
/// where undefined.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, Vec<Option<usize>>>", into = "BTreeMap<String, Vec<Option<usize>>>")]
pub struct ClassAction {
    maps: Vec<Vec<Option<usize>>>,
}

impl ClassAction {
    /// The nowhere-defined action.
    pub fn empty(grade: usize) -> Self {
        ClassAction {
            maps: (1..=grade).map(|n| vec![None; n]).collect(),
        }
    }

    pub fn identity(grade: usize) -> Self {
        ClassAction {
            maps: (1..=grade).map(|n| (1..=n).map(Some).collect()).collect(),
        }
    }

    /// From one total permutation per arity, given as 1-based image lists.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let action = ClassAction {
            maps: perms.iter().map(|p| p.iter().map(|&j| Some(j)).collect()).collect(),
        };
        action.validate()?;
        if !action.is_total() {
            return Err(PartitionError::InvalidAction("permutations must be total".into()));
        }
        Ok(action)
    }

    /// Every total action of the given grade, in lexicographic order.
    pub fn all_total(grade: usize) -> Vec<ClassAction> {
        (1..=grade)
            .map(|n| (1..=n).permutations(n).collect::<Vec<_>>())
            .multi_cartesian_product()
            .map(|perms| ClassAction::from_permutations(&perms).expect("permutations"))
            .collect()
    }

    fn validate(&self) -> Result<(), PartitionError> {
        for (k, map) in self.maps.iter().enumerate() {
            let n = k + 1;
            if map.len() != n {
                return Err(PartitionError::InvalidAction(format!("arity {n} needs {n} entries")));
            }
            let defined: Vec<usize> = map.iter().flatten().copied().collect();
            if defined.iter().any(|&j| j == 0 || j > n) {
                return Err(PartitionError::InvalidAction(format!("label out of range for arity {n}")));
            }
            if !defined.iter().all_unique() {
                return Err(PartitionError::InvalidAction(format!("arity {n} is not injective")));
            }
        }
        Ok(())
    }

    pub fn grade(&self) -> usize {
        self.maps.len()
    }

    pub fn get(&self, n: usize, i: usize) -> Option<usize> {
        self.maps.get(n - 1)?.get(i - 1).copied().flatten()
    }

    pub fn is_total(&self) -> bool {
        self.maps.iter().all(|m| m.iter().all(Option::is_some))
    }

    /// Identity wherever defined.
    pub fn is_partial_identity(&self) -> bool {
        self.maps
            .iter()
            .all(|m| m.iter().enumerate().all(|(i, j)| j.is_none_or(|j| j == i + 1)))
    }

    /// Whether `other` agrees with `self` wherever `self` is defined.
    pub fn is_restriction_of(&self, other: &ClassAction) -> bool {
        self.grade() == other.grade()
            && self
                .maps
                .iter()
                .zip(&other.maps)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.is_none() || x == y))
    }

    /// Restriction to the labels where `other` is defined.
    pub fn restricted_to(&self, other: &ClassAction) -> ClassAction {
        ClassAction {
            maps: self
                .maps
                .iter()
                .zip(&other.maps)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| if y.is_some() { *x } else { None }).collect())
                .collect(),
        }
    }
}

impl TryFrom<BTreeMap<String, Vec<Option<usize>>>> for ClassAction {
    type Error = PartitionError;

    fn try_from(raw: BTreeMap<String, Vec<Option<usize>>>) -> Result<Self, Self::Error> {
        let grade = raw.len();
        let mut maps = Vec::with_capacity(grade);
        for n in 1..=grade {
            let map = raw
                .get(&n.to_string())
                .ok_or_else(|| PartitionError::InvalidAction(format!("missing arity {n}")))?;
            maps.push(map.clone());
        }
        let action = ClassAction { maps };
        action.validate()?;
        Ok(action)
    }
}

impl From<ClassAction> for BTreeMap<String, Vec<Option<usize>>> {
    fn from(a: ClassAction) -> Self {
        a.maps.into_iter().enumerate().map(|(k, m)| ((k + 1).to_string(), m)).collect()
    }
}

/// `alpha ∘ beta`, applying `beta` first.
pub fn compose_actions(alpha: &ClassAction, beta: &ClassAction) -> ClassAction {
    ClassAction {
        maps: alpha
            .maps
            .iter()
            .zip(&beta.maps)
            .map(|(a, b)| b.iter().map(|j| j.and_then(|j| a[j - 1])).collect())
            .collect(),
    }
}

/// The permutation of labels induced by `f` on injective tuples inside its domain.
pub fn class_action(oracle: &PartitionOracle, s: &FinStructure, f: &PartialMap) -> Result<ClassAction, PartitionError> {
    let domain = f.domain();
    for (x, y) in f.pairs() {
        if x >= s.size() || y >= s.size() {
            return Err(PartitionError::Incompatible(format!(
                "pair {x} -> {y} outside structure of size {}",
                s.size()
            )));
        }
    }
    let mut action = ClassAction::empty(oracle.grade());
    for n in 1..=oracle.grade() {
        let mut preimage: Vec<Option<usize>> = vec![None; n];
        for t in domain.iter().copied().permutations(n) {
            let image = f.apply(&t).expect("inside domain");
            let (Some(i), Some(j)) = (oracle.label(s, &t), oracle.label(s, &image)) else {
                return Err(PartitionError::NotMember { grade: oracle.grade() });
            };
            match action.maps[n - 1][i - 1] {
                Some(old) if old != j => {
                    return Err(PartitionError::Conflict {
                        n,
                        label: i,
                        first: old,
                        second: j,
                    })
                }
                _ => action.maps[n - 1][i - 1] = Some(j),
            }
            match preimage[j - 1] {
                Some(old) if old != i => {
                    return Err(PartitionError::NotInjective {
                        n,
                        image: j,
                        first: old,
                        second: i,
                    })
                }
                _ => preimage[j - 1] = Some(i),
            }
        }
    }
    Ok(action)
}

/// Whether `f` acts trivially on labels.
pub fn kernel_check(oracle: &PartitionOracle, s: &FinStructure, f: &PartialMap) -> Result<bool, PartitionError> {
    Ok(class_action(oracle, s, f)?.is_partial_identity())
}

/// Whether `f` preserves every `P^n_i` in both directions.
pub fn preserves_labels(s: &FinStructure, f: &PartialMap) -> bool {
    is_partial_iso(f, s, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pairs() -> (PartitionOracle, FinStructure) {
        // (0,1) and (1,0) labelled 1, (2,3) and (3,2) labelled 2, the rest 1
        let p = PartitionOracle::new(2);
        let s = p
            .from_labels(4, |t| if t.len() == 2 && t.iter().all(|&e| e >= 2) { 2 } else { 1 })
            .unwrap();
        (p, s)
    }

    #[test]
    fn identity_acts_trivially() {
        let (p, s) = two_pairs();
        let a = class_action(&p, &s, &PartialMap::identity(4)).unwrap();
        assert!(a.is_partial_identity());
        assert!(kernel_check(&p, &s, &PartialMap::identity(4)).unwrap());
    }

    #[test]
    fn moving_a_label_one_pair_to_a_label_two_pair() {
        let (p, s) = two_pairs();
        let f = PartialMap::from_pairs([(0, 2), (1, 3)]).unwrap();
        let a = class_action(&p, &s, &f).unwrap();
        assert_eq!(a.get(2, 1), Some(2));
        assert_eq!(a.get(2, 2), None);
        assert_eq!(a.get(1, 1), Some(1));
        assert!(!kernel_check(&p, &s, &f).unwrap());
    }

    #[test]
    fn conflicting_images_are_rejected() {
        let p = PartitionOracle::new(2);
        // (0,1) label 1 and (1,2) label 1, but (3,4) label 1 and (4,5) label 2
        let s = p
            .from_labels(6, |t| if t == [4, 5] { 2 } else { 1 })
            .unwrap();
        let f = PartialMap::from_pairs([(0, 3), (1, 4), (2, 5)]).unwrap();
        assert!(matches!(class_action(&p, &s, &f), Err(PartitionError::Conflict { .. })));
    }

    #[test]
    fn composition_of_partial_permutations() {
        let alpha = ClassAction::try_from(BTreeMap::from([
            ("1".to_string(), vec![Some(1)]),
            ("2".to_string(), vec![Some(2), None]),
        ]))
        .unwrap();
        let beta = ClassAction::try_from(BTreeMap::from([
            ("1".to_string(), vec![Some(1)]),
            ("2".to_string(), vec![None, Some(1)]),
        ]))
        .unwrap();
        let c = compose_actions(&alpha, &beta);
        assert_eq!(c.get(2, 2), Some(2));
        assert_eq!(c.get(2, 1), None);
        assert_eq!(compose_actions(&alpha, &ClassAction::identity(2)), alpha);
    }

    #[test]
    fn json_uses_null_for_undefined() {
        let a = ClassAction::try_from(BTreeMap::from([
            ("1".to_string(), vec![Some(1)]),
            ("2".to_string(), vec![Some(2), None]),
        ]))
        .unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"1":[1],"2":[2,null]}"#);
        assert!(serde_json::from_str::<ClassAction>(r#"{"1":[1],"2":[1,1]}"#).is_err());
    }

    #[test]
    fn twelve_total_actions_at_grade_three() {
        assert_eq!(ClassAction::all_total(3).len(), 12);
    }
}
