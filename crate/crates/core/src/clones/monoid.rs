use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{add_dummies, CloneError, FinOperation};

/// Unary operations closed under composition and containing the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionMonoid {
    d: usize,
    elements: Vec<FinOperation>,
}

impl FunctionMonoid {
    pub fn new(d: usize, elements: Vec<FinOperation>) -> Result<Self, CloneError> {
        let set: BTreeSet<FinOperation> = elements.into_iter().collect();
        if set.iter().any(|u| u.arity() != 1 || u.domain() != d) {
            return Err(CloneError::NotMonoid(format!("elements must be unary on {d} points")));
        }
        if !set.contains(&FinOperation::projection(d, 1, 0)) {
            return Err(CloneError::NotMonoid("identity missing".into()));
        }
        for u in &set {
            for v in &set {
                let uv = u.compose(std::slice::from_ref(v))?;
                if !set.contains(&uv) {
                    return Err(CloneError::NotMonoid(format!("{:?} ∘ {:?} missing", u.table(), v.table())));
                }
            }
        }
        Ok(FunctionMonoid {
            d,
            elements: set.into_iter().collect(),
        })
    }

    /// The monoid generated by `gens`.
    pub fn generate(d: usize, gens: &[FinOperation]) -> Result<Self, CloneError> {
        let mut set: BTreeSet<FinOperation> = BTreeSet::from([FinOperation::projection(d, 1, 0)]);
        let mut frontier: Vec<FinOperation> = set.iter().cloned().collect();
        while let Some(u) = frontier.pop() {
            for g in gens {
                let gu = g.compose(std::slice::from_ref(&u))?;
                if set.insert(gu.clone()) {
                    frontier.push(gu);
                }
            }
        }
        Self::new(d, set.into_iter().collect())
    }

    /// Every unary map on `d` points.
    pub fn full(d: usize) -> Self {
        let all = (0..d.pow(d as u32))
            .map(|code| FinOperation::from_fn(d, 1, |x| code / d.pow(x[0] as u32) % d))
            .collect();
        Self::new(d, all).expect("full transformation monoid")
    }

    pub fn domain(&self) -> usize {
        self.d
    }

    pub fn elements(&self) -> &[FinOperation] {
        &self.elements
    }

    pub fn contains(&self, u: &FinOperation) -> bool {
        self.elements.binary_search(u).is_ok()
    }
}

/// The clone generated by a monoid: operations arising from its members by
/// adding dummy variables, together with all projections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneHandle {
    pub monoid: FunctionMonoid,
}

impl CloneHandle {
    pub fn from_monoid(monoid: FunctionMonoid) -> Self {
        CloneHandle { monoid }
    }

    pub fn contains(&self, f: &FinOperation) -> bool {
        f.domain() == self.monoid.d && f.unary_core().is_some_and(|u| self.monoid.contains(&u))
    }

    /// Members of the given arity, sorted.
    pub fn members(&self, arity: usize) -> Vec<FinOperation> {
        let mut out: BTreeSet<FinOperation> = (0..arity).map(|i| FinOperation::projection(self.monoid.d, arity, i)).collect();
        for u in &self.monoid.elements {
            for i in 0..arity {
                out.insert(add_dummies(u, arity, &[i]).expect("valid position"));
            }
        }
        out.into_iter().collect()
    }
}

/// The extension of a monoid isomorphism to the clones the monoids generate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneIso {
    pub source: FunctionMonoid,
    pub target: FunctionMonoid,
    /// Images of the source monoid's members.
    pub unary: BTreeMap<FinOperation, FinOperation>,
}

impl CloneIso {
    /// Projections are fixed; an operation with core `u` at coordinate `i`
    /// goes to the one with core `ξ0(u)` at `i`; constants go to constants.
    pub fn apply(&self, f: &FinOperation) -> Option<FinOperation> {
        if f.is_projection().is_some() {
            return Some(f.clone());
        }
        let core = f.unary_core()?;
        let image = self.unary.get(&core)?;
        match f.essential_coordinates().first() {
            Some(&i) => add_dummies(image, f.arity(), &[i]).ok(),
            None => image.is_constant().map(|c| FinOperation::constant(f.domain(), f.arity(), c)),
        }
    }
}

/// Checks that `xi0` is a bijective, composition-preserving map `M -> N`
/// matching constants with constants in both directions, and returns its
/// extension to the generated clones.
pub fn extend_monoid_iso(
    source: &FunctionMonoid,
    target: &FunctionMonoid,
    xi0: &BTreeMap<FinOperation, FinOperation>,
) -> Result<CloneIso, CloneError> {
    if source.d != target.d {
        return Err(CloneError::NotIsomorphism("domains differ".into()));
    }
    if xi0.len() != source.elements.len() || source.elements.iter().any(|u| !xi0.contains_key(u)) {
        return Err(CloneError::NotIsomorphism("map is not defined on exactly the source monoid".into()));
    }
    let images: BTreeSet<&FinOperation> = xi0.values().collect();
    if images.len() != target.elements.len() || images.iter().any(|v| !target.contains(v)) {
        return Err(CloneError::NotIsomorphism("map is not a bijection onto the target monoid".into()));
    }
    for u in &source.elements {
        for v in &source.elements {
            let uv = u.compose(std::slice::from_ref(v))?;
            let lhs = &xi0[&uv];
            let rhs = xi0[u].compose(std::slice::from_ref(&xi0[v]))?;
            if *lhs != rhs {
                return Err(CloneError::NotIsomorphism(format!("fails on {:?} ∘ {:?}", u.table(), v.table())));
            }
        }
    }
    for (u, v) in xi0 {
        if u.is_constant().is_some() != v.is_constant().is_some() {
            let (constant, image) = if u.is_constant().is_some() { (u, v) } else { (v, u) };
            return Err(CloneError::ConstantsNotPreserved {
                constant: constant.clone(),
                image: image.clone(),
            });
        }
    }
    Ok(CloneIso {
        source: source.clone(),
        target: target.clone(),
        unary: xi0.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(values: &[usize]) -> FinOperation {
        FinOperation::unary(values.len(), values).unwrap()
    }

    #[test]
    fn identity_monoid_gives_projections() {
        let m = FunctionMonoid::new(2, vec![u(&[0, 1])]).unwrap();
        let c = CloneHandle::from_monoid(m);
        assert_eq!(c.members(2), vec![FinOperation::projection(2, 2, 0), FinOperation::projection(2, 2, 1)]);
        assert!(!c.contains(&FinOperation::constant(2, 2, 0)));
    }

    #[test]
    fn full_monoid_membership() {
        let c = CloneHandle::from_monoid(FunctionMonoid::full(2));
        assert_eq!(c.monoid.elements().len(), 4);
        assert!(c.contains(&FinOperation::constant(2, 2, 1)));
        assert!(c.contains(&FinOperation::projection(2, 3, 2)));
        assert!(!c.contains(&FinOperation::from_fn(2, 2, |x| x[0] ^ x[1])));
        assert_eq!(c.members(2).len(), 6);
        assert_eq!(c.members(3).len(), 8);
    }

    #[test]
    fn monoid_axioms() {
        assert!(FunctionMonoid::new(2, vec![u(&[1, 0])]).is_err());
        assert!(FunctionMonoid::new(3, vec![u(&[0, 1, 2]), u(&[1, 2, 0])]).is_err());
        assert_eq!(FunctionMonoid::generate(3, &[u(&[1, 2, 0])]).unwrap().elements().len(), 3);
        assert_eq!(FunctionMonoid::full(3).elements().len(), 27);
    }

    #[test]
    fn flip_conjugation_extends() {
        let m = FunctionMonoid::full(2);
        let flip = u(&[1, 0]);
        let xi0: BTreeMap<_, _> = m
            .elements()
            .iter()
            .map(|a| (a.clone(), flip.compose(&[a.compose(std::slice::from_ref(&flip)).unwrap()]).unwrap()))
            .collect();
        let xi = extend_monoid_iso(&m, &m, &xi0).unwrap();
        assert_eq!(xi.apply(&FinOperation::constant(2, 3, 0)), Some(FinOperation::constant(2, 3, 1)));
        let not_second = add_dummies(&flip, 2, &[1]).unwrap();
        assert_eq!(xi.apply(&not_second), Some(not_second));
        assert_eq!(xi.apply(&FinOperation::from_fn(2, 2, |x| x[0] & x[1])), None);
    }

    #[test]
    fn constant_matched_with_non_constant_is_rejected() {
        // {id, const 0} and {id, (0,0,2)} are isomorphic monoids of idempotents
        let m = FunctionMonoid::new(3, vec![u(&[0, 1, 2]), u(&[0, 0, 0])]).unwrap();
        let n = FunctionMonoid::new(3, vec![u(&[0, 1, 2]), u(&[0, 0, 2])]).unwrap();
        let xi0 = BTreeMap::from([(u(&[0, 1, 2]), u(&[0, 1, 2])), (u(&[0, 0, 0]), u(&[0, 0, 2]))]);
        assert!(matches!(extend_monoid_iso(&m, &n, &xi0), Err(CloneError::ConstantsNotPreserved { .. })));
    }
}
