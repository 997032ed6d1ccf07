use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;

use super::{PartitionError, PartitionOracle};
use crate::fraisse::{ClassOracle, FraisseError};
use crate::structures::{is_injective, Amalgam, FinStructure, PartialMap, Signature, Symbol, Tuple};

/// `E^1, ..., E^N` with `E^n` of arity `2n`.
pub fn en_signature(grade: usize) -> Signature {
    Signature::new((1..=grade).map(|n| Symbol::new(format!("E^{n}"), 2 * n)).collect()).expect("valid signature")
}

/// `E^n(x̄, ȳ)` iff `x̄` and `ȳ` are injective and carry the same label.
pub fn en_reduct(oracle: &PartitionOracle, s: &FinStructure) -> Result<FinStructure, PartitionError> {
    if !oracle.is_member(s) {
        return Err(PartitionError::NotMember { grade: oracle.grade() });
    }
    let mut e = FinStructure::new(Arc::new(en_signature(oracle.grade())), s.size());
    for n in 1..=oracle.grade() {
        for i in 1..=n {
            let class = s.relation(PartitionOracle::symbol(n, i));
            for x in class {
                for y in class {
                    let mut t = x.clone();
                    t.extend_from_slice(y);
                    e.insert(n - 1, t)?;
                }
            }
        }
    }
    Ok(e)
}

/// The classes of `E^n` on injective tuples, numbered by first appearance in
/// lexicographic order.
fn classes(e: &FinStructure, n: usize) -> Result<BTreeMap<Tuple, usize>, PartitionError> {
    let rel = e.relation(n - 1);
    let mut rep: BTreeMap<Tuple, usize> = BTreeMap::new();
    let mut sizes: Vec<usize> = Vec::new();
    for t in (0..e.size()).permutations(n) {
        let mut lo = t.clone();
        lo.extend(std::iter::repeat_n(0, n));
        let first = rel
            .range(lo..)
            .next()
            .filter(|u| u[..n] == t[..])
            .ok_or(PartitionError::NotEquivalence { n })?;
        let partner: Tuple = first[n..].to_vec();
        let class = match partner.cmp(&t) {
            std::cmp::Ordering::Less => *rep.get(&partner).ok_or(PartitionError::NotEquivalence { n })?,
            std::cmp::Ordering::Equal => {
                sizes.push(0);
                sizes.len() - 1
            }
            std::cmp::Ordering::Greater => return Err(PartitionError::NotEquivalence { n }),
        };
        sizes[class] += 1;
        rep.insert(t, class);
    }
    let expected: usize = sizes.iter().map(|s| s * s).sum();
    if rel.len() != expected {
        return Err(PartitionError::NotEquivalence { n });
    }
    for t in rel {
        match (rep.get(&t[..n]), rep.get(&t[n..])) {
            (Some(x), Some(y)) if x == y => {}
            _ => return Err(PartitionError::NotEquivalence { n }),
        }
    }
    if sizes.len() > n {
        return Err(PartitionError::TooManyClasses { n, classes: sizes.len() });
    }
    Ok(rep)
}

/// A partition structure whose reduct is `e`. Classes containing a tuple with a
/// `forced` label get that label; the others take the smallest labels still free.
pub fn lift(
    oracle: &PartitionOracle,
    e: &FinStructure,
    forced: impl Fn(&[usize]) -> Option<usize>,
) -> Result<FinStructure, PartitionError> {
    let mut labels_by_n = Vec::new();
    for n in 1..=oracle.grade() {
        let rep = classes(e, n)?;
        let count = rep.values().max().map_or(0, |m| m + 1);
        let mut label: Vec<Option<usize>> = vec![None; count];
        for (t, &class) in &rep {
            if let Some(l) = forced(t) {
                match label[class] {
                    Some(old) if old != l => {
                        return Err(PartitionError::Conflict {
                            n,
                            label: class + 1,
                            first: old,
                            second: l,
                        })
                    }
                    _ => label[class] = Some(l),
                }
            }
        }
        let taken: Vec<usize> = label.iter().flatten().copied().collect();
        if !is_injective(&taken) {
            return Err(PartitionError::InvalidAction(format!("forced labels merge classes of arity {n}")));
        }
        let mut free = (1..=n).filter(|l| !taken.contains(l));
        for slot in label.iter_mut() {
            if slot.is_none() {
                *slot = free.next();
            }
        }
        labels_by_n.push((rep, label));
    }
    oracle.from_labels(e.size(), |t| {
        let (rep, label) = &labels_by_n[t.len() - 1];
        label[rep[t]].expect("enough labels")
    })
}

/// The class of `E`-reducts of partition structures of a fixed grade.
#[derive(Clone, Debug)]
pub struct EnReductOracle {
    source: PartitionOracle,
    signature: Arc<Signature>,
}

impl EnReductOracle {
    pub fn new(grade: usize) -> Self {
        EnReductOracle {
            source: PartitionOracle::new(grade),
            signature: Arc::new(en_signature(grade)),
        }
    }

    pub fn source(&self) -> &PartitionOracle {
        &self.source
    }

    fn lift_err(e: PartitionError) -> FraisseError {
        FraisseError::Precondition(e.to_string())
    }
}

impl ClassOracle for EnReductOracle {
    fn name(&self) -> String {
        format!("en-reduct[N={}]", self.source.grade())
    }

    fn signature(&self) -> Arc<Signature> {
        Arc::clone(&self.signature)
    }

    fn is_member(&self, s: &FinStructure) -> bool {
        s.same_signature(&FinStructure::new(Arc::clone(&self.signature), 0))
            && (1..=self.source.grade()).all(|n| classes(s, n).is_ok())
    }

    fn admissible(&self, symbol: usize, tuple: &[usize]) -> bool {
        let n = symbol + 1;
        is_injective(&tuple[..n]) && is_injective(&tuple[n..])
    }

    /// Lifts both sides compatibly, amalgamates the partition structures and
    /// takes the reduct again.
    fn amalgamate(
        &self,
        a: &FinStructure,
        b: &FinStructure,
        f: &PartialMap,
        c: &FinStructure,
        g: &PartialMap,
    ) -> Result<Amalgam, FraisseError> {
        let p = &self.source;
        let b_lift = lift(p, b, |_| None).map_err(Self::lift_err)?;
        let f_img: Vec<usize> = (0..a.size())
            .map(|x| f.get(x).ok_or_else(|| FraisseError::Precondition("left map not total".into())))
            .collect::<Result<_, _>>()?;
        let a_lift = b_lift.induced(&f_img);
        let g_inv = g.inverse();
        let c_lift = lift(p, c, |t| {
            let pre: Option<Vec<usize>> = t.iter().map(|&z| g_inv.get(z).and_then(|x| f.get(x))).collect();
            pre.and_then(|u| p.label(&b_lift, &u))
        })
        .map_err(Self::lift_err)?;
        let am = p.amalgamate(&a_lift, &b_lift, f, &c_lift, g)?;
        let structure = en_reduct(p, &am.structure).map_err(Self::lift_err)?;
        Ok(Amalgam {
            structure,
            left: am.left,
            right: am.right,
        })
    }

    fn structures_over(&self, base: &FinStructure, extra: usize, cap: usize) -> Result<Vec<FinStructure>, FraisseError> {
        let Ok(base_lift) = lift(&self.source, base, |_| None) else {
            return Ok(Vec::new());
        };
        let mut out: Vec<FinStructure> = Vec::new();
        for s in self.source.structures_over(&base_lift, extra, cap)? {
            let r = en_reduct(&self.source, &s).map_err(Self::lift_err)?;
            if !out.contains(&r) {
                out.push(r);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraisse::{checked_amalgam, extensions_up_to_iso, members_up_to_iso, DEFAULT_ENUM_CAP};

    #[test]
    fn single_point_is_related_to_itself() {
        let p = PartitionOracle::new(1);
        let s = p.from_labels(1, |_| 1).unwrap();
        let e = en_reduct(&p, &s).unwrap();
        assert_eq!(e.relation(0).iter().collect::<Vec<_>>(), vec![&vec![0, 0]]);
    }

    #[test]
    fn same_label_both_ways_relates_the_pairs() {
        let p = PartitionOracle::new(2);
        let s = p.from_labels(2, |_| 1).unwrap();
        let e = en_reduct(&p, &s).unwrap();
        assert!(e.holds(1, &[0, 1, 1, 0]));
        let t = p.from_labels(2, |t| if t.len() == 1 || t == [0, 1] { 1 } else { 2 }).unwrap();
        let e = en_reduct(&p, &t).unwrap();
        assert!(!e.holds(1, &[0, 1, 1, 0]));
        assert!(e.holds(1, &[1, 0, 1, 0]));
    }

    #[test]
    fn lift_inverts_reduct_up_to_labels() {
        let p = PartitionOracle::new(2);
        let s = p.from_labels(3, |t| if t.len() == 2 && t[0] < t[1] { 2 } else { 1 }).unwrap();
        let e = en_reduct(&p, &s).unwrap();
        let forced = |t: &[usize]| p.label(&s, t);
        assert_eq!(lift(&p, &e, forced).unwrap(), s);
        let free = lift(&p, &e, |_| None).unwrap();
        assert_eq!(en_reduct(&p, &free).unwrap(), e);
    }

    #[test]
    fn reduct_class_amalgamates() {
        let r = EnReductOracle::new(2);
        for a_size in 0..=1 {
            for a in members_up_to_iso(&r, a_size, DEFAULT_ENUM_CAP).unwrap() {
                let exts = extensions_up_to_iso(&r, &a, 1, DEFAULT_ENUM_CAP).unwrap();
                let f = PartialMap::identity(a_size);
                for b in &exts {
                    for c in &exts {
                        let am = checked_amalgam(&r, &a, b, &f, c, &f).unwrap();
                        assert!(r.is_member(&am.structure));
                    }
                }
            }
        }
    }
}
