use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::StructureError;

/// A finite injective partial function on naturals.
///
/// Serialized as a sorted list of `[source, target]` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct PartialMap {
    forward: BTreeMap<usize, usize>,
}

impl PartialMap {
    pub fn new() -> Self {
        PartialMap::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self, StructureError> {
        let mut m = PartialMap::new();
        for (x, y) in pairs {
            m.insert(x, y)?;
        }
        Ok(m)
    }

    /// `i -> images[i]` for every index.
    pub fn from_images(images: &[usize]) -> Result<Self, StructureError> {
        PartialMap::from_pairs(images.iter().copied().enumerate())
    }

    pub fn identity(n: usize) -> Self {
        PartialMap {
            forward: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn identity_on(elements: &[usize]) -> Self {
        PartialMap {
            forward: elements.iter().map(|&e| (e, e)).collect(),
        }
    }

    /// Adds `x -> y`; rejects anything that would break functionality or injectivity.
    pub fn insert(&mut self, x: usize, y: usize) -> Result<(), StructureError> {
        if let Some(&old) = self.forward.get(&x) {
            if old == y {
                return Ok(());
            }
            return Err(StructureError::NotFunctional { element: x });
        }
        if self.forward.values().any(|&v| v == y) {
            return Err(StructureError::NotInjective { target: y });
        }
        self.forward.insert(x, y);
        Ok(())
    }

    pub fn with(&self, x: usize, y: usize) -> Result<Self, StructureError> {
        let mut m = self.clone();
        m.insert(x, y)?;
        Ok(m)
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.forward.get(&x).copied()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward.iter().map(|(&x, &y)| (x, y))
    }

    pub fn domain(&self) -> Vec<usize> {
        self.forward.keys().copied().collect()
    }

    /// Images listed in domain order.
    pub fn image(&self) -> Vec<usize> {
        self.forward.values().copied().collect()
    }

    pub fn image_set(&self) -> BTreeSet<usize> {
        self.forward.values().copied().collect()
    }

    pub fn contains_source(&self, x: usize) -> bool {
        self.forward.contains_key(&x)
    }

    pub fn is_total_on(&self, n: usize) -> bool {
        (0..n).all(|x| self.forward.contains_key(&x))
    }

    pub fn apply(&self, tuple: &[usize]) -> Option<Vec<usize>> {
        tuple.iter().map(|&x| self.get(x)).collect()
    }

    /// `self ∘ other`: apply `other` first. Defined where both steps are.
    pub fn compose(&self, other: &PartialMap) -> PartialMap {
        PartialMap {
            forward: other
                .forward
                .iter()
                .filter_map(|(&x, &y)| self.get(y).map(|z| (x, z)))
                .collect(),
        }
    }

    pub fn inverse(&self) -> PartialMap {
        PartialMap {
            forward: self.forward.iter().map(|(&x, &y)| (y, x)).collect(),
        }
    }

    pub fn restrict(&self, domain: &[usize]) -> PartialMap {
        PartialMap {
            forward: domain.iter().filter_map(|&x| self.get(x).map(|y| (x, y))).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().all(|(x, y)| x == y)
    }
}

impl TryFrom<Vec<(usize, usize)>> for PartialMap {
    type Error = StructureError;

    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self, Self::Error> {
        PartialMap::from_pairs(pairs)
    }
}

impl From<PartialMap> for Vec<(usize, usize)> {
    fn from(m: PartialMap) -> Self {
        m.forward.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_rejects_collisions() {
        let mut m = PartialMap::new();
        m.insert(0, 5).unwrap();
        assert!(matches!(m.insert(0, 6), Err(StructureError::NotFunctional { element: 0 })));
        assert!(matches!(m.insert(1, 5), Err(StructureError::NotInjective { target: 5 })));
        m.insert(0, 5).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn compose_applies_right_map_first() {
        let f = PartialMap::from_pairs([(1, 2)]).unwrap();
        let g = PartialMap::from_pairs([(0, 1), (3, 4)]).unwrap();
        let h = f.compose(&g);
        assert_eq!(h.pairs().collect::<Vec<_>>(), vec![(0, 2)]);
        assert_eq!(h.inverse().get(2), Some(0));
    }

    #[test]
    fn json_is_pair_list_and_rejects_non_injective() {
        let m = PartialMap::from_pairs([(2, 0), (0, 1)]).unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[0,1],[2,0]]");
        let bad: Result<PartialMap, _> = serde_json::from_str("[[0,1],[2,1]]");
        assert!(bad.is_err());
    }
}
