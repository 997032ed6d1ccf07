use super::{enc_signature, find_npairs, EncodingError, GradedInnerSignature, H, LAMBDA, P, Q, RHO, S};
use crate::structures::{FinStructure, Tuple};

/// Replaces every fact `R_n(ā)` of `s` by a fresh n-pair labelling `ā`.
///
/// The elements of `s` keep their numbers and satisfy `P`; the gadgets follow
/// in fact order.
pub fn encode(s: &FinStructure, inner: &GradedInnerSignature) -> Result<FinStructure, EncodingError> {
    if *s.signature() != *inner.signature() {
        return Err(EncodingError::SignatureMismatch);
    }
    let mut e = FinStructure::new(enc_signature(), s.size());
    for x in 0..s.size() {
        e.insert(P, vec![x])?;
    }
    let facts: Vec<(usize, Tuple)> = s.fact_list().into_iter().map(|(k, t)| (inner.symbols()[k].n, t)).collect();
    append_gadgets(&mut e, &facts)?;
    Ok(e)
}

/// Appends one fresh n-pair per `(n, labels)` entry.
pub(crate) fn append_gadgets(e: &mut FinStructure, facts: &[(usize, Tuple)]) -> Result<(), EncodingError> {
    let extra: usize = facts.iter().map(|(n, _)| n).sum();
    *e = e.grow(extra);
    let mut next = e.size() - extra;
    for (n, labels) in facts {
        let n = *n;
        let l = labels.len();
        let c: Vec<usize> = (next..next + n).collect();
        next += n;
        for i in 0..n {
            e.insert(Q, vec![c[i]])?;
            e.insert(H, vec![c[i], c[(i + 1) % n]])?;
        }
        e.insert(LAMBDA, vec![c[0]])?;
        e.insert(RHO, vec![c[l - 1]])?;
        for h in 0..l {
            for i in 0..l {
                #[cfg(not(feature = "fault-s-convention"))]
                e.insert(S, vec![c[h], c[i], labels[h], labels[i]])?;
                #[cfg(feature = "fault-s-convention")]
                e.insert(S, vec![c[h], c[i], labels[i], labels[h]])?;
            }
        }
    }
    Ok(())
}

pub(crate) struct Decoded {
    pub structure: FinStructure,
    /// `points[j]` is the element of the encoding that became `j`.
    pub points: Vec<usize>,
}

pub(crate) fn decode_parts(e: &FinStructure, inner: &GradedInnerSignature) -> Result<Decoded, EncodingError> {
    if *e.signature() != *enc_signature() {
        return Err(EncodingError::SignatureMismatch);
    }
    let points: Vec<usize> = e.relation(P).iter().map(|t| t[0]).collect();
    let mut position = vec![usize::MAX; e.size()];
    for (j, &x) in points.iter().enumerate() {
        position[x] = j;
    }
    let pairs = find_npairs(e, inner)?;
    let mut structure = FinStructure::new(inner.signature(), points.len());
    for pair in &pairs {
        let k = inner.index_of(pair.n).ok_or(EncodingError::UnknownIndex(pair.n))?;
        structure.insert(k, pair.labels.iter().map(|&a| position[a]).collect())?;
    }
    Ok(Decoded { structure, points })
}

/// The `P`-part, renumbered in increasing order, with `R_n(ā)` exactly when
/// some n-pair labels `ā`.
pub fn decode(e: &FinStructure, inner: &GradedInnerSignature) -> Result<FinStructure, EncodingError> {
    Ok(decode_parts(e, inner)?.structure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_structure() {
        let inner = GradedInnerSignature::from_arities(&[2]).unwrap();
        let s = FinStructure::new(inner.signature(), 0);
        let e = encode(&s, &inner).unwrap();
        assert_eq!(e.size(), 0);
        assert_eq!(e.tuple_count(), 0);
        assert_eq!(decode(&e, &inner).unwrap(), s);
    }

    #[test]
    fn one_binary_fact() {
        let inner = GradedInnerSignature::from_arities(&[2]).unwrap();
        let mut s = FinStructure::new(inner.signature(), 2);
        s.insert(0, vec![0, 1]).unwrap();
        let e = encode(&s, &inner).unwrap();
        assert_eq!(e.size(), 4);
        assert!(e.holds(P, &[0]) && e.holds(P, &[1]));
        assert!(e.holds(Q, &[2]) && e.holds(Q, &[3]));
        assert!(e.holds(H, &[2, 3]) && e.holds(H, &[3, 2]));
        assert!(e.holds(LAMBDA, &[2]) && e.holds(RHO, &[3]));
        let s_tuples: Vec<&Tuple> = e.relation(S).iter().collect();
        assert_eq!(s_tuples, vec![&vec![2, 2, 0, 0], &vec![2, 3, 0, 1], &vec![3, 2, 1, 0], &vec![3, 3, 1, 1]]);
        assert_eq!(decode(&e, &inner).unwrap(), s);
    }

    #[test]
    fn disjoint_facts_give_disjoint_gadgets() {
        let inner = GradedInnerSignature::from_arities(&[2]).unwrap();
        let mut s = FinStructure::new(inner.signature(), 4);
        s.insert(0, vec![0, 1]).unwrap();
        s.insert(0, vec![2, 3]).unwrap();
        let e = encode(&s, &inner).unwrap();
        assert_eq!(e.size(), 8);
        let pairs = find_npairs(&e, &inner).unwrap();
        assert_eq!(pairs[0].cycle, vec![4, 5]);
        assert_eq!(pairs[1].cycle, vec![6, 7]);
        assert_eq!(decode(&e, &inner).unwrap(), s);
    }

    #[test]
    fn no_q_elements_means_no_facts() {
        let inner = GradedInnerSignature::from_arities(&[1]).unwrap();
        let mut e = FinStructure::new(enc_signature(), 2);
        e.insert(P, vec![0]).unwrap();
        e.insert(P, vec![1]).unwrap();
        assert_eq!(decode(&e, &inner).unwrap().tuple_count(), 0);
    }

    #[test]
    fn two_gadgets_on_one_tuple_decode_to_one_fact() {
        let inner = GradedInnerSignature::from_arities(&[2]).unwrap();
        let mut e = FinStructure::new(enc_signature(), 2);
        e.insert(P, vec![0]).unwrap();
        e.insert(P, vec![1]).unwrap();
        append_gadgets(&mut e, &[(2, vec![0, 1]), (2, vec![0, 1])]).unwrap();
        let d = decode(&e, &inner).unwrap();
        assert_eq!(d.tuple_count(), 1);
        assert!(d.holds(0, &[0, 1]));
    }
}
