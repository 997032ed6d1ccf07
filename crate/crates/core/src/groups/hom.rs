use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{FinGroup, GroupError};

/// A homomorphism given by the images of all source elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    pub map: Vec<usize>,
    pub target_order: usize,
}

impl GroupHom {
    /// Checks multiplicativity on every pair.
    pub fn new(source: &FinGroup, target: &FinGroup, map: Vec<usize>) -> Result<Self, GroupError> {
        if map.len() != source.order() || map.iter().any(|&y| y >= target.order()) {
            return Err(GroupError::NotHomomorphism("map has the wrong shape".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(GroupError::NotHomomorphism(format!("fails on ({a}, {b})")));
                }
            }
        }
        Ok(GroupHom {
            map,
            target_order: target.order(),
        })
    }

    pub fn identity(g: &FinGroup) -> Self {
        GroupHom {
            map: g.elements().collect(),
            target_order: g.order(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn source_order(&self) -> usize {
        self.map.len()
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.map.len()).filter(|&x| self.map[x] == 0).collect()
    }

    pub fn image(&self) -> Vec<usize> {
        let mut v = self.map.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().len() == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.target_order
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &GroupHom) -> GroupHom {
        GroupHom {
            map: first.map.iter().map(|&x| self.map[x]).collect(),
            target_order: self.target_order,
        }
    }

    pub fn inverse(&self) -> Option<GroupHom> {
        if !self.is_bijective() {
            return None;
        }
        let mut map = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            map[y] = x;
        }
        Some(GroupHom {
            map,
            target_order: self.map.len(),
        })
    }
}

/// Isomorphism invariants used to rule out isomorphism cheaply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    pub order: usize,
    /// Element order to number of elements of that order.
    pub order_profile: BTreeMap<usize, usize>,
    pub center: usize,
    pub abelianization: usize,
}

impl Invariants {
    pub fn of(g: &FinGroup) -> Self {
        let mut order_profile = BTreeMap::new();
        for x in g.elements() {
            *order_profile.entry(g.element_order(x)).or_insert(0) += 1;
        }
        Invariants {
            order: g.order(),
            order_profile,
            center: g.center().len(),
            abelianization: g.order() / g.derived_subgroup().len(),
        }
    }
}

/// An isomorphism `g -> h`, if there is one.
///
/// After invariant screening, generators of `g` are sent to elements of equal
/// order in every way; each assignment is extended along the Cayley graph and
/// kept if it is well defined and bijective.
pub fn find_isomorphism(g: &FinGroup, h: &FinGroup) -> Option<GroupHom> {
    if Invariants::of(g) != Invariants::of(h) {
        return None;
    }
    let gens = g.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&x| {
            let k = g.element_order(x);
            h.elements().filter(|&y| h.element_order(y) == k).collect()
        })
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    assign(g, h, &gens, &candidates, &mut images)
}

fn assign(g: &FinGroup, h: &FinGroup, gens: &[usize], candidates: &[Vec<usize>], images: &mut Vec<usize>) -> Option<GroupHom> {
    if images.len() == gens.len() {
        return extend(g, h, gens, images);
    }
    for &y in &candidates[images.len()] {
        if images.contains(&y) {
            continue;
        }
        images.push(y);
        if let Some(iso) = assign(g, h, gens, candidates, images) {
            return Some(iso);
        }
        images.pop();
    }
    None
}

fn extend(g: &FinGroup, h: &FinGroup, gens: &[usize], images: &[usize]) -> Option<GroupHom> {
    let mut map = vec![usize::MAX; g.order()];
    map[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let xs = g.mul(x, s);
            let image = h.mul(map[x], t);
            if map[xs] == usize::MAX {
                map[xs] = image;
                queue.push_back(xs);
            } else if map[xs] != image {
                return None;
            }
        }
    }
    let hom = GroupHom {
        map,
        target_order: h.order(),
    };
    hom.is_bijective().then_some(hom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{cyclic, direct_product};

    #[test]
    fn cyclic_groups() {
        let z6 = cyclic(6);
        let z2z3 = direct_product(&cyclic(2), &cyclic(3));
        let iso = find_isomorphism(&z6, &z2z3).unwrap();
        assert!(GroupHom::new(&z6, &z2z3, iso.map.clone()).is_ok());
        assert!(find_isomorphism(&cyclic(4), &direct_product(&cyclic(2), &cyclic(2))).is_none());
    }

    #[test]
    fn kernel_image_and_inverse() {
        let z4 = cyclic(4);
        let z2 = cyclic(2);
        let m = GroupHom::new(&z4, &z2, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(m.kernel(), vec![0, 2]);
        assert!(m.is_surjective() && !m.is_injective());
        assert!(m.inverse().is_none());
        assert!(GroupHom::new(&z4, &z2, vec![0, 1, 1, 0]).is_err());
        let id = GroupHom::identity(&z4);
        assert_eq!(id.inverse().unwrap(), id);
        assert_eq!(m.after(&id), m);
    }
}
