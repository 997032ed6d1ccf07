use std::collections::BTreeMap;

use super::{FinGroup, GroupError};

/// Default bound on the group order for exhaustive subgroup enumeration.
pub const DEFAULT_SUBGROUP_CAP: usize = 64;

impl FinGroup {
    /// Every subgroup, sorted by element list.
    ///
    /// Starts from the cyclic subgroups and closes under joining a subgroup
    /// with a cyclic subgroup; every subgroup is the join of its cyclic ones.
    pub fn subgroups(&self, cap: usize) -> Result<Vec<Vec<usize>>, GroupError> {
        if self.order() > cap {
            return Err(GroupError::TooLarge { order: self.order(), cap });
        }
        let mut cyclic: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for x in self.elements() {
            cyclic.entry(self.generate(&[x])).or_insert(x);
        }
        let cyclic: Vec<(Vec<usize>, usize)> = cyclic.into_iter().collect();
        let mut all: BTreeMap<Vec<usize>, Vec<usize>> = cyclic.iter().map(|(h, x)| (h.clone(), vec![*x])).collect();
        let mut frontier: Vec<(Vec<usize>, Vec<usize>)> = all.clone().into_iter().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (h, gens) in &frontier {
                let inside = self.indicator(h);
                for (_, x) in &cyclic {
                    if inside[*x] {
                        continue;
                    }
                    let mut more = gens.clone();
                    more.push(*x);
                    let k = self.generate(&more);
                    if !all.contains_key(&k) {
                        all.insert(k.clone(), more.clone());
                        next.push((k, more));
                    }
                }
            }
            frontier = next;
        }
        Ok(all.into_keys().collect())
    }

    pub fn normal_subgroups(&self, cap: usize) -> Result<Vec<Vec<usize>>, GroupError> {
        Ok(self.subgroups(cap)?.into_iter().filter(|h| self.is_normal(h)).collect())
    }

    /// Subgroups of the center, each of them central and hence normal.
    pub fn central_subgroups(&self, cap: usize) -> Result<Vec<Vec<usize>>, GroupError> {
        let center = self.indicator(&self.center());
        Ok(self
            .subgroups(cap)?
            .into_iter()
            .filter(|h| h.iter().all(|&x| center[x]))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use crate::groups::{catalogue_group, cyclic, symmetric};

    #[test]
    fn subgroup_counts() {
        assert_eq!(cyclic(4).subgroups(64).unwrap().len(), 3);
        assert_eq!(cyclic(12).subgroups(64).unwrap().len(), 6);
        assert_eq!(symmetric(3).subgroups(64).unwrap().len(), 6);
        assert_eq!(symmetric(4).subgroups(64).unwrap().len(), 30);
        assert_eq!(catalogue_group("Q8").unwrap().subgroups(64).unwrap().len(), 6);
        assert_eq!(catalogue_group("Z2^4").unwrap().subgroups(64).unwrap().len(), 67);
    }

    #[test]
    fn normal_and_central() {
        let s4 = symmetric(4);
        assert_eq!(s4.normal_subgroups(64).unwrap().len(), 4);
        assert_eq!(s4.central_subgroups(64).unwrap(), vec![vec![0]]);
        assert!(cyclic(65).subgroups(64).is_err());
    }
}
