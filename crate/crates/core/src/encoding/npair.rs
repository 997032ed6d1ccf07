use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{EncodingError, GradedInnerSignature, H, LAMBDA, P, Q, RHO, S};
use crate::structures::{is_injective, FinStructure};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NPair {
    pub n: usize,
    /// `c_1, ..., c_n` in cycle order.
    pub cycle: Vec<usize>,
    /// The labelled sequence `a_1, ..., a_l`, possibly with repeats.
    pub labels: Vec<usize>,
}

impl NPair {
    pub fn elements(&self) -> Vec<usize> {
        self.cycle.iter().chain(&self.labels).copied().sorted().dedup().collect()
    }
}

/// Whether the set `{labels, cycle}` is an n-pair with cycle order `cycle`
/// labelling `labels`, where `n = cycle.len()` and `l = labels.len()`.
pub fn is_npair(e: &FinStructure, cycle: &[usize], labels: &[usize]) -> bool {
    let n = cycle.len();
    let l = labels.len();
    if n == 0 || l == 0 || l > n || !is_injective(cycle) {
        return false;
    }
    if !labels.iter().all(|&a| e.holds(P, &[a])) || !cycle.iter().all(|&c| e.holds(Q, &[c])) {
        return false;
    }
    for (i, &ci) in cycle.iter().enumerate() {
        if e.holds(LAMBDA, &[ci]) != (i == 0) || e.holds(RHO, &[ci]) != (i + 1 == l) {
            return false;
        }
        for (j, &cj) in cycle.iter().enumerate() {
            if e.holds(H, &[ci, cj]) != (j == (i + 1) % n) {
                return false;
            }
        }
    }
    let points: Vec<usize> = labels.iter().copied().sorted().dedup().collect();
    for (h, &ch) in cycle.iter().enumerate() {
        for (i, &ci) in cycle.iter().enumerate() {
            for &a in &points {
                for &b in &points {
                    let expected = h < l && i < l && labels[h] == a && labels[i] == b;
                    if e.holds(S, &[ch, ci, a, b]) != expected {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Every n-pair of `e` for the indices of `inner`.
///
/// Cycles are followed from each `λ`-element, and every choice of labels
/// offered by the diagonal facts `S(c_h, c_h, a, a)` is tried. One cycle may
/// therefore carry several n-pairs with different labels, and n-pairs may
/// share elements; each is recovered uniquely from its own element set.
pub fn find_npairs(e: &FinStructure, inner: &GradedInnerSignature) -> Result<Vec<NPair>, EncodingError> {
    let size = e.size();
    let mut successors: Vec<Vec<usize>> = vec![Vec::new(); size];
    for t in e.relation(H) {
        successors[t[0]].push(t[1]);
    }
    let mut diagonal: Vec<Vec<usize>> = vec![Vec::new(); size];
    for t in e.relation(S) {
        if t[0] == t[1] && t[2] == t[3] {
            diagonal[t[0]].push(t[2]);
        }
    }
    let mut found = Vec::new();
    for start in e.relation(LAMBDA).iter().map(|t| t[0]) {
        if !e.holds(Q, &[start]) {
            continue;
        }
        for sym in inner.symbols() {
            let mut cycles = Vec::new();
            let mut path = vec![start];
            extend_paths(e, &successors, sym.n, &mut path, &mut cycles);
            for cycle in cycles {
                let choices = cycle[..sym.arity].iter().map(|&c| diagonal[c].iter().copied());
                for labels in choices.multi_cartesian_product() {
                    if is_npair(e, &cycle, &labels) {
                        found.push(NPair {
                            n: sym.n,
                            cycle: cycle.clone(),
                            labels,
                        });
                    }
                }
            }
        }
    }
    Ok(found)
}

fn extend_paths(e: &FinStructure, successors: &[Vec<usize>], n: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *path.last().expect("nonempty");
    if path.len() == n {
        if e.holds(H, &[last, path[0]]) {
            out.push(path.clone());
        }
        return;
    }
    for &next in &successors[last] {
        if !path.contains(&next) && e.holds(Q, &[next]) && !e.holds(LAMBDA, &[next]) {
            path.push(next);
            extend_paths(e, successors, n, path, out);
            path.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{enc_signature, encode};

    fn two_cycle(e: &mut FinStructure, c1: usize, c2: usize, a: usize, b: usize) {
        for c in [c1, c2] {
            e.insert(Q, vec![c]).unwrap();
        }
        e.insert(H, vec![c1, c2]).unwrap();
        e.insert(H, vec![c2, c1]).unwrap();
        e.insert(LAMBDA, vec![c1]).unwrap();
        e.insert(RHO, vec![c2]).unwrap();
        let cs = [c1, c2];
        let ls = [a, b];
        for h in 0..2 {
            for i in 0..2 {
                e.insert(S, vec![cs[h], cs[i], ls[h], ls[i]]).unwrap();
            }
        }
    }

    #[test]
    fn single_gadget_is_recovered() {
        let inner = GradedInnerSignature::from_arities(&[2]).unwrap();
        let mut e = FinStructure::new(enc_signature(), 4);
        e.insert(P, vec![0]).unwrap();
        e.insert(P, vec![1]).unwrap();
        two_cycle(&mut e, 2, 3, 1, 0);
        let pairs = find_npairs(&e, &inner).unwrap();
        assert_eq!(pairs, vec![NPair { n: 2, cycle: vec![2, 3], labels: vec![1, 0] }]);
        assert!(is_npair(&e, &[2, 3], &[1, 0]));
        assert!(!is_npair(&e, &[3, 2], &[1, 0]));
    }

    #[test]
    fn cycle_without_lambda_is_not_a_pair() {
        let inner = GradedInnerSignature::from_arities(&[2]).unwrap();
        let mut e = FinStructure::new(enc_signature(), 4);
        e.insert(P, vec![0]).unwrap();
        e.insert(P, vec![1]).unwrap();
        two_cycle(&mut e, 2, 3, 0, 1);
        e.remove(LAMBDA, &[2]);
        assert!(find_npairs(&e, &inner).unwrap().is_empty());
    }

    #[test]
    fn cycles_sharing_an_element_are_separate_pairs() {
        let inner = GradedInnerSignature::from_arities(&[2]).unwrap();
        let mut e = FinStructure::new(enc_signature(), 5);
        e.insert(P, vec![0]).unwrap();
        e.insert(P, vec![1]).unwrap();
        two_cycle(&mut e, 2, 3, 0, 1);
        two_cycle(&mut e, 2, 4, 0, 1);
        let cycles: Vec<Vec<usize>> = find_npairs(&e, &inner).unwrap().into_iter().map(|p| p.cycle).collect();
        assert_eq!(cycles, vec![vec![2, 3], vec![2, 4]]);
    }

    #[test]
    fn one_cycle_with_two_labellings_gives_two_pairs() {
        let inner = GradedInnerSignature::from_arities(&[1]).unwrap();
        let mut e = FinStructure::new(enc_signature(), 3);
        e.insert(P, vec![0]).unwrap();
        e.insert(P, vec![1]).unwrap();
        for t in [vec![2], vec![2, 2]] {
            e.insert(Q, vec![2]).unwrap();
            e.insert(if t.len() == 1 { LAMBDA } else { H }, t).unwrap();
        }
        e.insert(RHO, vec![2]).unwrap();
        e.insert(S, vec![2, 2, 0, 0]).unwrap();
        e.insert(S, vec![2, 2, 1, 1]).unwrap();
        let labels: Vec<Vec<usize>> = find_npairs(&e, &inner).unwrap().into_iter().map(|p| p.labels).collect();
        assert_eq!(labels, vec![vec![0], vec![1]]);
    }

    #[test]
    fn repeated_label_and_unary_loop() {
        let inner = GradedInnerSignature::from_arities(&[1, 2]).unwrap();
        let mut s = FinStructure::new(inner.signature(), 1);
        s.insert(0, vec![0]).unwrap();
        s.insert(1, vec![0, 0]).unwrap();
        let e = encode(&s, &inner).unwrap();
        let pairs = find_npairs(&e, &inner).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].labels, vec![0]);
        assert!(e.holds(H, &[pairs[0].cycle[0], pairs[0].cycle[0]]));
        assert_eq!(pairs[1].labels, vec![0, 0]);
    }

    #[test]
    fn longer_cycle_does_not_count_for_a_shorter_index() {
        // R_2 and R_3 both binary: a 3-cycle gadget must not be read as an R_2 fact
        let inner = GradedInnerSignature::from_arities(&[2, 2]).unwrap();
        let mut s = FinStructure::new(inner.signature(), 2);
        s.insert(1, vec![0, 1]).unwrap();
        let e = encode(&s, &inner).unwrap();
        let pairs = find_npairs(&e, &inner).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].n, 3);
    }
}
