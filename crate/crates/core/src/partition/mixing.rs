use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{PartitionError, PartitionOracle};
use crate::fraisse::{ClassOracle, LimitApprox};
use crate::structures::{qf_type, FinStructure, TypeFingerprint};

/// `m` fresh tuples of the same type as `y`, pairwise disjoint and disjoint from `y`.
pub fn disjoint_copies(
    oracle: &PartitionOracle,
    approx: &mut LimitApprox,
    y: &[usize],
    m: usize,
) -> Result<Vec<Vec<usize>>, PartitionError> {
    if !y.iter().all_unique() {
        return Err(PartitionError::Incompatible("tuple entries must be distinct".into()));
    }
    let target = qf_type(&approx.current, y)?;
    let template = approx.current.induced(y);
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let right = approx.glue(oracle, &[], &template)?;
        let copy: Vec<usize> = (0..y.len()).map(|j| right.get(j).expect("total")).collect();
        debug_assert_eq!(qf_type(&approx.current, &copy)?, target);
        out.push(copy);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingWitness {
    pub y: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub d: Vec<usize>,
    /// Types of `(y, a)`, `(d, a)` and `(d, b)`; all equal.
    pub types: [TypeFingerprint; 3],
}

impl MixingWitness {
    pub fn holds_in(&self, s: &FinStructure) -> bool {
        let cat = |u: &[usize], v: &[usize]| [u, v].concat();
        let ok = |t: &[usize], fp: &TypeFingerprint| qf_type(s, t).is_ok_and(|x| x == *fp);
        self.types.iter().all_equal()
            && ok(&cat(&self.y, &self.a), &self.types[0])
            && ok(&cat(&self.d, &self.a), &self.types[1])
            && ok(&cat(&self.d, &self.b), &self.types[2])
    }
}

/// Finds `d` with `(y, a)`, `(d, a)` and `(d, b)` all of one type.
///
/// Inputs must have equal types, `(y, a)` must be injective, and an element
/// shared by `a` and `b` must occur at the same position in both.
pub fn mixing_witness(
    oracle: &PartitionOracle,
    approx: &mut LimitApprox,
    y: &[usize],
    a: &[usize],
    b: &[usize],
) -> Result<MixingWitness, PartitionError> {
    let s = &approx.current;
    let ty = qf_type(s, y)?;
    for other in [a, b] {
        if let Some(diff) = ty.first_difference(&qf_type(s, other)?) {
            return Err(PartitionError::TypeMismatch { diff });
        }
    }
    let ya = [y, a].concat();
    if !ya.iter().all_unique() {
        return Err(PartitionError::Incompatible("entries of (y, a) must be distinct".into()));
    }
    for (i, x) in a.iter().enumerate() {
        if let Some(j) = b.iter().position(|e| e == x) {
            if i != j {
                return Err(PartitionError::Incompatible(format!(
                    "element {x} is at position {i} in a but {j} in b"
                )));
            }
        }
    }
    let m = y.len();
    let base: Vec<usize> = a.iter().chain(b).copied().sorted().dedup().collect();
    let pos = |e: usize| base.iter().position(|&x| x == e).expect("in base");
    let mut ext = s.induced(&base).grow(m);
    let template = s.induced(&ya);
    for side in [a, b] {
        let place = |p: usize| if p < m { base.len() + p } else { pos(side[p - m]) };
        for (k, t) in template.facts() {
            ext.insert(k, t.iter().map(|&p| place(p)).collect())?;
        }
    }
    oracle.complete_lowest(&mut ext);
    if !oracle.is_member(&ext) {
        return Err(PartitionError::Incompatible("the forced extension leaves the class".into()));
    }
    let right = approx.glue(oracle, &base, &ext)?;
    let d: Vec<usize> = (0..m).map(|j| right.get(base.len() + j).expect("total")).collect();
    let s = &approx.current;
    let witness = MixingWitness {
        y: y.to_vec(),
        a: a.to_vec(),
        b: b.to_vec(),
        types: [
            qf_type(s, &ya)?,
            qf_type(s, &[&d[..], a].concat())?,
            qf_type(s, &[&d[..], b].concat())?,
        ],
        d,
    };
    if !witness.types.iter().all_equal() {
        return Err(PartitionError::Incompatible("constructed tuple has the wrong type".into()));
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled(p: &PartitionOracle, n: usize, two: &[[usize; 2]]) -> LimitApprox {
        let s = p.from_labels(n, |t| if t.len() == 2 && two.contains(&[t[0], t[1]]) { 2 } else { 1 }).unwrap();
        LimitApprox::from_seed(p, &s).unwrap()
    }

    #[test]
    fn no_copies_requested() {
        let p = PartitionOracle::new(2);
        let mut approx = labelled(&p, 2, &[]);
        assert!(disjoint_copies(&p, &mut approx, &[0, 1], 0).unwrap().is_empty());
    }

    #[test]
    fn two_fresh_label_one_pairs() {
        let p = PartitionOracle::new(2);
        let mut approx = labelled(&p, 2, &[[1, 0]]);
        let copies = disjoint_copies(&p, &mut approx, &[0, 1], 2).unwrap();
        assert_eq!(copies, vec![vec![2, 3], vec![4, 5]]);
        for c in &copies {
            assert_eq!(qf_type(&approx.current, c).unwrap(), qf_type(&approx.current, &[0, 1]).unwrap());
        }
    }

    #[test]
    fn single_points_mix_through_label_one() {
        let p = PartitionOracle::new(2);
        // y=0, a=1, b=2; (0,1) and (1,0) label 1; b's pairs with y labelled 2
        let mut approx = labelled(&p, 3, &[[0, 2], [2, 0]]);
        let w = mixing_witness(&p, &mut approx, &[0], &[1], &[2]).unwrap();
        let s = &approx.current;
        let d = w.d[0];
        assert!(d >= 3);
        for x in [1, 2] {
            assert_eq!(p.label(s, &[d, x]), Some(1));
            assert_eq!(p.label(s, &[x, d]), Some(1));
        }
        assert!(w.holds_in(s));
    }

    #[test]
    fn equal_a_and_b() {
        let p = PartitionOracle::new(2);
        let mut approx = labelled(&p, 4, &[[0, 1], [2, 3]]);
        let w = mixing_witness(&p, &mut approx, &[0, 1], &[2, 3], &[2, 3]).unwrap();
        assert!(w.holds_in(&approx.current));
        assert!(approx.replays(&p).unwrap());
    }

    #[test]
    fn type_mismatch_is_reported() {
        let p = PartitionOracle::new(2);
        let mut approx = labelled(&p, 4, &[[0, 1]]);
        assert!(matches!(
            mixing_witness(&p, &mut approx, &[0, 1], &[2, 3], &[2, 3]),
            Err(PartitionError::TypeMismatch { .. })
        ));
    }
}
