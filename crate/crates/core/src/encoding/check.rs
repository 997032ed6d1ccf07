use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::codec::{append_gadgets, decode_parts};
use super::{is_npair, EncodingError, GradedInnerSignature, NPair, H, LAMBDA, P, Q, RHO, S};
use crate::fraisse::ClassOracle;
use crate::structures::{free_amalgam, Amalgam, FinStructure, PartialMap, Tuple};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    /// Violations of the sort axioms, one line each.
    pub shape: Vec<String>,
    /// Why the gadgets could not be read, if they could not.
    pub malformed: Option<String>,
    /// Whether the decoded `P`-part lies in the inner class.
    pub inner_member: bool,
    pub pass: bool,
}

fn shape_violations(e: &FinStructure) -> Vec<String> {
    let mut out = Vec::new();
    let p = |x: usize| e.holds(P, &[x]);
    let q = |x: usize| e.holds(Q, &[x]);
    for x in 0..e.size() {
        if p(x) == q(x) {
            out.push(format!("element {x} must satisfy exactly one of P and Q"));
        }
    }
    for (sym, name) in [(LAMBDA, "lambda"), (RHO, "rho")] {
        for t in e.relation(sym) {
            if !q(t[0]) {
                out.push(format!("{name}({}) on a non-Q element", t[0]));
            }
        }
    }
    for t in e.relation(H) {
        if !q(t[0]) || !q(t[1]) {
            out.push(format!("H{t:?} leaves Q"));
        }
    }
    for t in e.relation(S) {
        if !q(t[0]) || !q(t[1]) || !p(t[2]) || !p(t[3]) {
            out.push(format!("S{t:?} has the wrong sorts"));
        }
    }
    out
}

/// Membership of `e` in the encoded class: the sort axioms hold, the gadgets
/// are readable, and the decoded `P`-part is accepted by `inner_oracle`.
pub fn class_membership(e: &FinStructure, inner: &GradedInnerSignature, inner_oracle: &dyn ClassOracle) -> MembershipReport {
    let shape = shape_violations(e);
    let (malformed, inner_member) = match decode_parts(e, inner) {
        Ok(d) => (None, inner_oracle.is_member(&d.structure)),
        Err(err) => (Some(err.to_string()), false),
    };
    let pass = shape.is_empty() && malformed.is_none() && inner_member;
    MembershipReport {
        shape,
        malformed,
        inner_member,
        pass,
    }
}

/// Compares `R_n` of the decoding with the extension of
/// `∃ȳ ({x̄, ȳ} is an n-pair labelling x̄)` over all `l(n)`-tuples of
/// `P`-elements, the witnesses found by an independent backtracking search.
pub fn ep_define_check(e: &FinStructure, inner: &GradedInnerSignature, n: usize) -> Result<bool, EncodingError> {
    let k = inner.index_of(n).ok_or(EncodingError::UnknownIndex(n))?;
    let l = inner.symbols()[k].arity;
    let decoded = decode_parts(e, inner)?;
    let lambdas: Vec<usize> = e.relation(LAMBDA).iter().map(|t| t[0]).collect();
    let succ: Vec<Vec<usize>> = {
        let mut v = vec![Vec::new(); e.size()];
        for t in e.relation(H) {
            v[t[0]].push(t[1]);
        }
        v
    };
    for x in (0..l).map(|_| decoded.points.iter().copied()).multi_cartesian_product() {
        let formula = lambdas.iter().any(|&y1| witness(e, &succ, n, &x, &mut vec![y1]));
        let local: Tuple = x.iter().map(|a| decoded.points.binary_search(a).expect("P-element")).collect();
        if formula != decoded.structure.holds(k, &local) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn witness(e: &FinStructure, succ: &[Vec<usize>], n: usize, x: &[usize], ys: &mut Vec<usize>) -> bool {
    if ys.len() == n {
        return is_npair(e, ys, x);
    }
    let last = *ys.last().expect("nonempty");
    for &y in &succ[last] {
        if !ys.contains(&y) {
            ys.push(y);
            if witness(e, succ, n, x, ys) {
                return true;
            }
            ys.pop();
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamReport {
    pub amalgam: Amalgam,
    /// Gadgets added so that the decoded `P`-part is an inner amalgam.
    pub completion: Vec<NPair>,
    /// n-pairs of the free part lying in neither the image of `B` nor of `C`.
    pub spanning: Vec<NPair>,
    /// Spanning n-pairs whose labelled tuple no other n-pair labels.
    pub spanning_new: Vec<NPair>,
    pub membership: MembershipReport,
    pub pass: bool,
}

/// Free amalgam of encoded members `b` and `c` over `a`, followed by a class
/// membership check.
///
/// If the decoded free amalgam leaves the inner class, the inner oracle's own
/// amalgam of the decoded parts supplies the missing facts, which are added as
/// fresh gadgets. The report lists every n-pair of the free part that is not
/// contained in one side, and separately those among them labelling a tuple
/// that nothing else labels. Passing requires membership and no spanning
/// n-pair at all.
pub fn free_amalgam_membership(
    a: &FinStructure,
    b: &FinStructure,
    f: &PartialMap,
    c: &FinStructure,
    g: &PartialMap,
    inner: &GradedInnerSignature,
    inner_oracle: &dyn ClassOracle,
) -> Result<AmalgamReport, EncodingError> {
    let mut am = free_amalgam(a, b, f, c, g)?;
    let free_size = am.structure.size();
    let decoded = decode_parts(&am.structure, inner)?;
    if !inner_oracle.is_member(&decoded.structure) {
        let completion_facts = inner_completion(a, b, f, c, g, &am, inner, inner_oracle, &decoded.structure, &decoded.points)?;
        append_gadgets(&mut am.structure, &completion_facts)?;
    }
    let pairs = super::find_npairs(&am.structure, inner)?;
    let left: BTreeSet<usize> = am.left.image_set();
    let right: BTreeSet<usize> = am.right.image_set();
    let (free, completion): (Vec<NPair>, Vec<NPair>) = pairs.into_iter().partition(|p| p.cycle[0] < free_size);
    let (spanning, inside): (Vec<NPair>, Vec<NPair>) = free.into_iter().partition(|p| {
        let els = p.elements();
        !els.iter().all(|x| left.contains(x)) && !els.iter().all(|x| right.contains(x))
    });
    let labelled: BTreeSet<(usize, &[usize])> = inside
        .iter()
        .chain(&completion)
        .map(|p| (p.n, p.labels.as_slice()))
        .collect();
    let spanning_new: Vec<NPair> = spanning
        .iter()
        .filter(|p| !labelled.contains(&(p.n, p.labels.as_slice())))
        .cloned()
        .collect();
    let membership = class_membership(&am.structure, inner, inner_oracle);
    let pass = membership.pass && spanning.is_empty();
    Ok(AmalgamReport {
        amalgam: am,
        completion,
        spanning,
        spanning_new,
        membership,
        pass,
    })
}

/// Facts `(n, labels)` of the inner amalgam missing from the decoded free
/// amalgam, in elements of the encoding.
#[allow(clippy::too_many_arguments)]
fn inner_completion(
    a: &FinStructure,
    b: &FinStructure,
    f: &PartialMap,
    c: &FinStructure,
    g: &PartialMap,
    am: &Amalgam,
    inner: &GradedInnerSignature,
    inner_oracle: &dyn ClassOracle,
    decoded: &FinStructure,
    points: &[usize],
) -> Result<Vec<(usize, Tuple)>, EncodingError> {
    let (da, db, dc) = (decode_parts(a, inner)?, decode_parts(b, inner)?, decode_parts(c, inner)?);
    let restrict = |map: &PartialMap, from: &[usize], to: &[usize]| -> Result<PartialMap, EncodingError> {
        let pairs = from.iter().enumerate().map(|(j, &x)| {
            let y = map.get(x).expect("total embedding");
            (j, to.binary_search(&y).expect("P maps to P"))
        });
        Ok(PartialMap::from_pairs(pairs)?)
    };
    let fp = restrict(f, &da.points, &db.points)?;
    let gp = restrict(g, &da.points, &dc.points)?;
    let inner_am = inner_oracle.amalgamate(&da.structure, &db.structure, &fp, &dc.structure, &gp)?;
    let mut place = vec![usize::MAX; inner_am.structure.size()];
    for (side, map, pts) in [(&inner_am.left, &am.left, &db.points), (&inner_am.right, &am.right, &dc.points)] {
        for (j, &x) in pts.iter().enumerate() {
            let into_inner = side.get(j).expect("total");
            place[into_inner] = map.get(x).expect("total");
        }
    }
    if place.contains(&usize::MAX) || place.len() != points.len() {
        return Err(EncodingError::Fraisse(crate::fraisse::FraisseError::Precondition(
            "inner amalgam adds points outside both sides".into(),
        )));
    }
    let mut out = Vec::new();
    for (k, t) in inner_am.structure.facts() {
        let mapped: Tuple = t.iter().map(|&x| place[x]).collect();
        let local: Tuple = mapped.iter().map(|x| points.binary_search(x).expect("P-element")).collect();
        if !decoded.holds(k, &local) {
            out.push((inner.symbols()[k].n, mapped));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{decode, enc_signature, encode};
    use crate::fraisse::FreeClass;

    fn setup() -> (GradedInnerSignature, FreeClass) {
        let inner = GradedInnerSignature::from_arities(&[1, 2, 2]).unwrap();
        let oracle = FreeClass::new(inner.signature());
        (inner, oracle)
    }

    fn sample(inner: &GradedInnerSignature) -> FinStructure {
        let mut s = FinStructure::new(inner.signature(), 3);
        s.insert(0, vec![2]).unwrap();
        s.insert(1, vec![0, 1]).unwrap();
        s.insert(2, vec![1, 1]).unwrap();
        s.insert(2, vec![1, 0]).unwrap();
        s
    }

    #[test]
    fn encodings_are_members() {
        let (inner, oracle) = setup();
        let e = encode(&sample(&inner), &inner).unwrap();
        let report = class_membership(&e, &inner, &oracle);
        assert!(report.pass, "{report:?}");
        let empty = FinStructure::new(enc_signature(), 0);
        assert!(class_membership(&empty, &inner, &oracle).pass);
    }

    #[test]
    fn inner_rejection_fails_membership() {
        let (inner, _) = setup();
        let rejects_r1 = crate::fraisse::FreeClass::new(inner.signature());
        struct NoR1(crate::fraisse::FreeClass);
        impl ClassOracle for NoR1 {
            fn name(&self) -> String {
                "no-R_1".into()
            }
            fn signature(&self) -> std::sync::Arc<crate::structures::Signature> {
                self.0.signature()
            }
            fn is_member(&self, s: &FinStructure) -> bool {
                s.relation(0).is_empty()
            }
        }
        let e = encode(&sample(&inner), &inner).unwrap();
        let report = class_membership(&e, &inner, &NoR1(rejects_r1));
        assert!(!report.pass && report.shape.is_empty() && !report.inner_member);
    }

    #[test]
    fn sort_violations_are_listed() {
        let (inner, oracle) = setup();
        let mut e = FinStructure::new(enc_signature(), 2);
        e.insert(P, vec![0]).unwrap();
        e.insert(Q, vec![1]).unwrap();
        e.insert(H, vec![0, 1]).unwrap();
        let report = class_membership(&e, &inner, &oracle);
        assert_eq!(report.shape.len(), 1);
        assert!(!report.pass);
    }

    #[test]
    fn ep_definition_matches_decoding() {
        let (inner, _) = setup();
        let e = encode(&sample(&inner), &inner).unwrap();
        for n in 1..=3 {
            assert!(ep_define_check(&e, &inner, n).unwrap());
        }
        assert!(ep_define_check(&FinStructure::new(enc_signature(), 0), &inner, 2).unwrap());
    }

    #[test]
    fn broken_gadget_is_dropped_on_both_sides() {
        let (inner, _) = setup();
        let s = sample(&inner);
        let mut e = encode(&s, &inner).unwrap();
        // the R_2 gadget occupies elements 4 and 5
        assert!(e.remove(H, &[5, 4]));
        let d = decode(&e, &inner).unwrap();
        assert!(!d.holds(1, &[0, 1]));
        assert_eq!(d.tuple_count(), s.tuple_count() - 1);
        for n in 1..=3 {
            assert!(ep_define_check(&e, &inner, n).unwrap());
        }
    }

    #[test]
    fn disjoint_union_over_empty() {
        let (inner, oracle) = setup();
        let b = encode(&sample(&inner), &inner).unwrap();
        let a = FinStructure::new(enc_signature(), 0);
        let none = PartialMap::new();
        let report = free_amalgam_membership(&a, &b, &none, &b, &none, &inner, &oracle).unwrap();
        assert!(report.pass && report.spanning.is_empty() && report.completion.is_empty());
        assert_eq!(report.amalgam.structure.size(), 2 * b.size());
    }

    #[test]
    fn gluing_along_the_p_part() {
        let (inner, oracle) = setup();
        let s = sample(&inner);
        let b = encode(&s, &inner).unwrap();
        let mut other = FinStructure::new(inner.signature(), 3);
        other.insert(1, vec![2, 0]).unwrap();
        let c = encode(&other, &inner).unwrap();
        let a = b.induced(&[0, 1, 2]);
        let id = PartialMap::identity(3);
        let report = free_amalgam_membership(&a, &b, &id, &c, &id, &inner, &oracle).unwrap();
        assert!(report.pass, "{report:?}");
        let d = decode(&report.amalgam.structure, &inner).unwrap();
        assert_eq!(d.tuple_count(), s.tuple_count() + 1);
    }

    #[test]
    fn partition_inner_class_is_completed_with_label_one() {
        use crate::encoding::PaddedClass;
        use crate::partition::PartitionOracle;
        let padded = PaddedClass::new(PartitionOracle::new(2)).unwrap();
        let inner = padded.inner().clone();
        let p = padded.raw();
        let point = inner.translate(&p.from_labels(1, |_| 1).unwrap()).unwrap();
        let pair = inner.translate(&p.from_labels(2, |t| if t == [1, 0] { 2 } else { 1 }).unwrap()).unwrap();
        let (a, b) = (encode(&point, &inner).unwrap(), encode(&pair, &inner).unwrap());
        assert!(class_membership(&b, &inner, &padded).pass);
        // the point and its R_1 gadget sit at 0 and 2 in b
        let f = PartialMap::from_pairs([(0, 0), (1, 2)]).unwrap();
        let report = free_amalgam_membership(&a, &b, &f, &b, &f, &inner, &padded).unwrap();
        assert!(report.pass, "{report:?}");
        // the two new points give two injective pairs, completed with label 1
        assert_eq!(report.completion.len(), 2);
        assert!(report.completion.iter().all(|p| p.n == 2));
    }
}
