use serde::{Deserialize, Serialize};

use super::{FinGroup, GroupError, GroupHom};

fn intersect_all<'a>(order: usize, sets: impl IntoIterator<Item = &'a Vec<usize>>) -> Vec<usize> {
    let mut count = vec![0usize; order];
    let mut k = 0;
    for s in sets {
        k += 1;
        for &x in s {
            count[x] += 1;
        }
    }
    (0..order).filter(|&x| count[x] == k).collect()
}

/// Normal subgroups `G_0, ..., G_N` of one group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetChain {
    pub subgroups: Vec<Vec<usize>>,
}

impl CosetChain {
    pub fn new(g: &FinGroup, subgroups: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        for h in &subgroups {
            if !g.is_normal(h) {
                return Err(GroupError::NotNormal(h.clone()));
            }
        }
        Ok(CosetChain { subgroups })
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    /// `∩_{i >= from} G_i`, the whole group when empty.
    pub fn intersection_from(&self, order: usize, from: usize) -> Vec<usize> {
        intersect_all(order, self.subgroups.iter().skip(from))
    }
}

/// Left translation on the cosets `G/G_i` for `i >= from`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetAction {
    pub from: usize,
    /// `(i, coset)` for every point, cosets as sorted element lists.
    pub points: Vec<(usize, Vec<usize>)>,
    /// For each group element, the permutation of point indices it induces.
    pub permutations: Vec<Vec<usize>>,
    pub kernel: Vec<usize>,
    pub faithful: bool,
}

pub fn coset_action(g: &FinGroup, chain: &CosetChain, from: usize) -> CosetAction {
    let mut points = Vec::new();
    let mut locate = Vec::new();
    for (i, h) in chain.subgroups.iter().enumerate().skip(from) {
        let cosets = g.left_cosets(h);
        let mut which = vec![0; g.order()];
        for (j, c) in cosets.iter().enumerate() {
            for &x in c {
                which[x] = points.len() + j;
            }
        }
        points.extend(cosets.into_iter().map(|c| (i, c)));
        locate.push(which);
    }
    let permutations: Vec<Vec<usize>> = g
        .elements()
        .map(|x| {
            points
                .iter()
                .map(|(i, coset)| locate[i - from][g.mul(x, coset[0])])
                .collect()
        })
        .collect();
    let kernel: Vec<usize> = g
        .elements()
        .filter(|&x| permutations[x].iter().enumerate().all(|(p, &q)| p == q))
        .collect();
    CosetAction {
        from,
        faithful: kernel.len() == 1,
        points,
        permutations,
        kernel,
    }
}

/// Elements fixing every point of `⋃_{i >= from} G/G_i`; checked against
/// `∩_{i >= from} G_i`.
pub fn stabilizer_of_union(action: &CosetAction, chain: &CosetChain, from: usize) -> Result<Vec<usize>, GroupError> {
    if from < action.from {
        return Err(GroupError::Precondition(format!("the action starts at level {}", action.from)));
    }
    let order = action.permutations.len();
    let stabilizer: Vec<usize> = (0..order)
        .filter(|&x| {
            action
                .points
                .iter()
                .enumerate()
                .all(|(p, (i, _))| *i < from || action.permutations[x][p] == p)
        })
        .collect();
    let expected = chain.intersection_from(order, from);
    if stabilizer != expected {
        return Err(GroupError::Inconsistent(format!("stabilizer {stabilizer:?} differs from {expected:?}")));
    }
    Ok(stabilizer)
}

/// The chain `G_0, G_1, ..., G_N` with `G_i` the preimage of `H_i ≤ G/F`
/// for `i >= 1`; `hs` are subgroups of the group returned by `g.quotient(f)`.
pub fn build_chain(g: &FinGroup, f: &[usize], hs: &[Vec<usize>], g0: &[usize]) -> Result<CosetChain, GroupError> {
    if !g.is_central(f) {
        return Err(GroupError::NotCentral(f.to_vec()));
    }
    if !g.is_normal(g0) {
        return Err(GroupError::NotNormal(g0.to_vec()));
    }
    if g.intersection(g0, f).len() != 1 {
        return Err(GroupError::Precondition("G_0 must meet F trivially".into()));
    }
    let (q, projection) = g.quotient(f)?;
    for h in hs {
        if !q.is_normal(h) {
            return Err(GroupError::NotNormal(h.clone()));
        }
    }
    if hs.is_empty() || intersect_all(q.order(), hs).len() != 1 {
        return Err(GroupError::Precondition("the H_i must have trivial intersection".into()));
    }
    let mut subgroups = vec![g0.to_vec()];
    for h in hs {
        let inside = q.indicator(h);
        subgroups.push(g.elements().filter(|&x| inside[projection.apply(x)]).collect());
    }
    let chain = CosetChain::new(g, subgroups)?;
    if chain.intersection_from(g.order(), 1) != f {
        return Err(GroupError::Inconsistent("preimages do not intersect in F".into()));
    }
    if chain.intersection_from(g.order(), 0).len() != 1 {
        return Err(GroupError::Inconsistent("chain has nontrivial intersection".into()));
    }
    Ok(chain)
}

/// Finite groups with homomorphisms `(from, to, map)` between them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InverseSystem {
    pub groups: Vec<FinGroup>,
    pub maps: Vec<(usize, usize, GroupHom)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncatedLimit {
    pub group: FinGroup,
    /// The compatible tuple behind each element, in element order.
    pub tuples: Vec<Vec<usize>>,
}

/// The subgroup of compatible tuples in the product of the system's groups.
pub fn truncated_limit(system: &InverseSystem, cap: usize) -> Result<TruncatedLimit, GroupError> {
    for (from, to, m) in &system.maps {
        let (Some(a), Some(b)) = (system.groups.get(*from), system.groups.get(*to)) else {
            return Err(GroupError::Precondition(format!("map {from} -> {to} outside the system")));
        };
        GroupHom::new(a, b, m.map.clone())?;
        if !m.is_surjective() {
            return Err(GroupError::Precondition(format!("map {from} -> {to} is not surjective")));
        }
    }
    let mut tuples = Vec::new();
    let mut current = Vec::with_capacity(system.groups.len());
    collect(system, &mut current, &mut tuples, cap)?;
    let n = tuples.len();
    let index: std::collections::BTreeMap<&Vec<usize>, usize> = tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut table = vec![0; n * n];
    for (a, s) in tuples.iter().enumerate() {
        for (b, t) in tuples.iter().enumerate() {
            let prod: Vec<usize> = system.groups.iter().enumerate().map(|(k, g)| g.mul(s[k], t[k])).collect();
            table[a * n + b] = *index
                .get(&prod)
                .ok_or_else(|| GroupError::Inconsistent("compatible tuples not closed".into()))?;
        }
    }
    Ok(TruncatedLimit {
        group: FinGroup::from_flat(n, table, None)?,
        tuples,
    })
}

fn collect(system: &InverseSystem, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: usize) -> Result<(), GroupError> {
    let k = current.len();
    if k == system.groups.len() {
        if out.len() >= cap {
            return Err(GroupError::TooLarge { order: out.len() + 1, cap });
        }
        out.push(current.clone());
        return Ok(());
    }
    for x in system.groups[k].elements() {
        current.push(x);
        let ok = system
            .maps
            .iter()
            .filter(|(a, b, _)| *a.max(b) == k)
            .all(|(a, b, m)| m.apply(current[*a]) == current[*b]);
        if ok {
            collect(system, current, out, cap)?;
        }
        current.pop();
    }
    Ok(())
}

/// The tower `G/K_0 <- G/K_1 <- ...` with `K_i = G_0 ∩ ... ∩ G_i`, and the
/// projections from `G`.
pub fn quotient_tower(g: &FinGroup, chain: &CosetChain) -> Result<(InverseSystem, Vec<GroupHom>), GroupError> {
    let mut groups = Vec::new();
    let mut projections: Vec<GroupHom> = Vec::new();
    let mut maps = Vec::new();
    for i in 0..chain.len() {
        let k = intersect_all(g.order(), chain.subgroups.iter().take(i + 1));
        let (q, p) = g.quotient(&k)?;
        if let Some(prev) = projections.last() {
            let mut map = vec![usize::MAX; q.order()];
            for x in g.elements() {
                map[p.apply(x)] = prev.apply(x);
            }
            let down = GroupHom::new(&q, &groups[i - 1], map)?;
            maps.push((i, i - 1, down));
        }
        groups.push(q);
        projections.push(p);
    }
    Ok((InverseSystem { groups, maps }, projections))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{catalogue_group, cyclic, find_isomorphism};

    #[test]
    fn regular_and_trivial_actions() {
        let g = catalogue_group("S3").unwrap();
        let regular = coset_action(&g, &CosetChain::new(&g, vec![vec![0]]).unwrap(), 0);
        assert!(regular.faithful);
        assert_eq!(regular.points.len(), 6);
        let whole: Vec<usize> = g.elements().collect();
        let point = coset_action(&g, &CosetChain::new(&g, vec![whole.clone()]).unwrap(), 0);
        assert_eq!(point.points.len(), 1);
        assert_eq!(point.kernel, whole);
    }

    #[test]
    fn kernel_is_the_intersection() {
        // S3 x Z2 with G_0 = A3 x {e}, G_1 = S3 x {e}
        let g = catalogue_group("S3xZ2").unwrap();
        let a3e = vec![0, 6, 8];
        let s3e = vec![0, 2, 4, 6, 8, 10];
        let chain = CosetChain::new(&g, vec![a3e.clone(), s3e]).unwrap();
        let action = coset_action(&g, &chain, 0);
        assert_eq!(action.kernel, a3e);
        assert_eq!(stabilizer_of_union(&action, &chain, 0).unwrap(), a3e);
        assert_eq!(stabilizer_of_union(&action, &chain, 2).unwrap().len(), 12);
    }

    #[test]
    fn preimage_chain_over_a_central_subgroup() {
        let g = catalogue_group("S3xZ2").unwrap();
        let f = vec![0, 1];
        let chain = build_chain(&g, &f, &[vec![0]], &[0]).unwrap();
        assert_eq!(chain.subgroups[1], f);
        let action = coset_action(&g, &chain, 0);
        assert!(action.faithful);
        assert_eq!(stabilizer_of_union(&action, &chain, 1).unwrap(), f);
        let with_trivial_f = build_chain(&g, &[0], &[vec![0]], &[0]).unwrap();
        assert_eq!(with_trivial_f.subgroups[1], vec![0]);
    }

    #[test]
    fn z4_over_z2() {
        let system = InverseSystem {
            groups: vec![cyclic(2), cyclic(4)],
            maps: vec![(1, 0, GroupHom::new(&cyclic(4), &cyclic(2), vec![0, 1, 0, 1]).unwrap())],
        };
        let lim = truncated_limit(&system, 1000).unwrap();
        assert!(find_isomorphism(&lim.group, &cyclic(4)).is_some());
        let single = InverseSystem { groups: vec![cyclic(3)], maps: vec![] };
        assert_eq!(truncated_limit(&single, 10).unwrap().group.order(), 3);
    }

    #[test]
    fn tower_of_s3_quotients() {
        let g = catalogue_group("S3").unwrap();
        let chain = CosetChain::new(&g, vec![g.derived_subgroup(), vec![0]]).unwrap();
        let (system, _) = quotient_tower(&g, &chain).unwrap();
        assert_eq!(system.groups[0].order(), 2);
        let lim = truncated_limit(&system, 1000).unwrap();
        assert!(find_isomorphism(&lim.group, &g).is_some());
    }
}
