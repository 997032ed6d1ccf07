//! Finite groups given by multiplication tables: subgroups, quotients,
//! complements of central subgroups, coset actions along chains of normal
//! subgroups, and inverse systems truncated at finite depth.
//!
//! Elements are the indices `0..order`, with `0` the identity. Subgroups and
//! other subsets are sorted index vectors.

mod catalogue;
mod chain;
mod hom;
mod split;
mod subgroups;

use std::collections::{BTreeMap, VecDeque};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalogue::{catalogue, catalogue_group, cyclic, dicyclic, direct_product, extra_groups, semidirect, symmetric, CatalogueEntry};
pub use chain::{
    build_chain, coset_action, quotient_tower, stabilizer_of_union, truncated_limit, CosetAction, CosetChain, InverseSystem,
    TruncatedLimit,
};
pub use hom::{find_isomorphism, GroupHom, Invariants};
pub use split::{find_complement, kappa, verify_splitting, Kappa, SplittingReport};
pub use subgroups::DEFAULT_SUBGROUP_CAP;

/// Default bound on group orders.
pub const DEFAULT_ORDER_CAP: usize = 4096;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("group order {order} exceeds the cap {cap}")]
    TooLarge { order: usize, cap: usize },
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("{0:?} is not a subgroup")]
    NotSubgroup(Vec<usize>),
    #[error("{0:?} is not normal")]
    NotNormal(Vec<usize>),
    #[error("{0:?} is not central")]
    NotCentral(Vec<usize>),
    #[error("{0:?} is not a complement")]
    NotComplement(Vec<usize>),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("no group named {0:?} in the catalogue")]
    UnknownGroup(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

/// A finite group as a multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FinGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    /// Present when the group was generated by permutations; sorted, identity first.
    permutations: Option<Vec<Vec<usize>>>,
}

impl std::fmt::Debug for FinGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FinGroup(order {})", self.order)
    }
}

impl FinGroup {
    /// Checks closure, identity, inverses and associativity, then renumbers so
    /// the identity is `0`.
    pub fn from_table(rows: &[Vec<usize>]) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        if rows.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(GroupError::InvalidTable("table is not square over 0..n".into()));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| rows[e][x] == x && rows[x][e] == x))
            .ok_or_else(|| GroupError::InvalidTable("no identity".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.swap(0, e);
        let mut position = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = position[rows[order[a]][order[b]]];
            }
        }
        Self::from_flat(n, table, None)
    }

    fn from_flat(n: usize, table: Vec<usize>, permutations: Option<Vec<Vec<usize>>>) -> Result<Self, GroupError> {
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            let row = &table[a * n..(a + 1) * n];
            if !row.iter().all_unique() {
                return Err(GroupError::InvalidTable(format!("row {a} repeats an entry")));
            }
            if (0..n).map(|b| table[b * n + a]).any(|x| x >= n) || !(0..n).map(|b| table[b * n + a]).all_unique() {
                return Err(GroupError::InvalidTable(format!("column {a} repeats an entry")));
            }
            inverse[a] = row.iter().position(|&x| x == 0).expect("latin row");
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b];
                for c in 0..n {
                    if table[ab * n + c] != table[a * n + table[b * n + c]] {
                        return Err(GroupError::InvalidTable(format!("({a}{b}){c} != {a}({b}{c})")));
                    }
                }
            }
        }
        Ok(FinGroup {
            order: n,
            table,
            inverse,
            permutations,
        })
    }

    /// Closure of permutations of `0..degree`, elements sorted lexicographically.
    pub fn from_permutations(degree: usize, generators: &[Vec<usize>], cap: usize) -> Result<Self, GroupError> {
        for g in generators {
            if g.len() != degree || !g.iter().all_unique() || g.iter().any(|&x| x >= degree) {
                return Err(GroupError::InvalidPermutation(format!("{g:?} on {degree} points")));
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut seen: BTreeMap<Vec<usize>, ()> = BTreeMap::from([(identity.clone(), ())]);
        let mut queue = VecDeque::from([identity]);
        while let Some(p) = queue.pop_front() {
            for g in generators {
                let q: Vec<usize> = p.iter().map(|&x| g[x]).collect();
                if !seen.contains_key(&q) {
                    if seen.len() >= cap {
                        return Err(GroupError::TooLarge { order: seen.len() + 1, cap });
                    }
                    seen.insert(q.clone(), ());
                    queue.push_back(q);
                }
            }
        }
        let perms: Vec<Vec<usize>> = seen.into_keys().collect();
        let index: BTreeMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let n = perms.len();
        let mut table = vec![0; n * n];
        for (a, p) in perms.iter().enumerate() {
            for (b, q) in perms.iter().enumerate() {
                // (pq)(x) = p(q(x)): apply q first
                let pq: Vec<usize> = q.iter().map(|&x| p[x]).collect();
                table[a * n + b] = index[&pq];
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| table[a * n + b] == 0).expect("group");
        }
        Ok(FinGroup {
            order: n,
            table,
            inverse,
            permutations: Some(perms),
        })
    }

    pub fn trivial() -> Self {
        FinGroup {
            order: 1,
            table: vec![0],
            inverse: vec![0],
            permutations: None,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `a^k` for `k >= 0`.
    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn permutations(&self) -> Option<&[Vec<usize>]> {
        self.permutations.as_deref()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// The subgroup generated by `gens`.
    pub fn generate(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order];
        inside[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&x| inside[x]).collect()
    }

    pub fn is_subgroup(&self, h: &[usize]) -> bool {
        let inside = self.indicator(h);
        !h.is_empty() && inside[0] && h.iter().all(|&a| inside[self.inv(a)] && h.iter().all(|&b| inside[self.mul(a, b)]))
    }

    pub fn is_normal(&self, h: &[usize]) -> bool {
        let inside = self.indicator(h);
        self.is_subgroup(h)
            && self
                .elements()
                .all(|g| h.iter().all(|&x| inside[self.mul(self.mul(g, x), self.inv(g))]))
    }

    pub fn center(&self) -> Vec<usize> {
        self.elements()
            .filter(|&z| self.elements().all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    pub fn is_central(&self, h: &[usize]) -> bool {
        let z = self.indicator(&self.center());
        self.is_subgroup(h) && h.iter().all(|&x| z[x])
    }

    /// The subgroup generated by all commutators.
    pub fn derived_subgroup(&self) -> Vec<usize> {
        let comms: Vec<usize> = self
            .elements()
            .flat_map(|a| self.elements().map(move |b| (a, b)))
            .map(|(a, b)| self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b)))
            .sorted()
            .dedup()
            .collect();
        self.generate(&comms)
    }

    pub fn intersection(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        let inside = self.indicator(b);
        a.iter().copied().filter(|&x| inside[x]).collect()
    }

    /// The product set `AB`, sorted.
    pub fn product_set(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.mul(x, y))
            .sorted()
            .dedup()
            .collect()
    }

    /// The left coset `gH`, sorted.
    pub fn left_coset(&self, g: usize, h: &[usize]) -> Vec<usize> {
        h.iter().map(|&x| self.mul(g, x)).sorted().collect()
    }

    /// Left cosets of `h` in order of their least element.
    pub fn left_cosets(&self, h: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for g in self.elements() {
            if !seen[g] {
                let c = self.left_coset(g, h);
                for &x in &c {
                    seen[x] = true;
                }
                out.push(c);
            }
        }
        out
    }

    pub(crate) fn indicator(&self, set: &[usize]) -> Vec<bool> {
        let mut v = vec![false; self.order];
        for &x in set {
            if x < self.order {
                v[x] = true;
            }
        }
        v
    }

    /// `G/N` with cosets numbered by least element, and the projection.
    pub fn quotient(&self, n: &[usize]) -> Result<(FinGroup, GroupHom), GroupError> {
        if !self.is_normal(n) {
            return Err(GroupError::NotNormal(n.to_vec()));
        }
        let cosets = self.left_cosets(n);
        let mut class = vec![0; self.order];
        for (i, c) in cosets.iter().enumerate() {
            for &x in c {
                class[x] = i;
            }
        }
        let k = cosets.len();
        let mut table = vec![0; k * k];
        for (i, ci) in cosets.iter().enumerate() {
            for (j, cj) in cosets.iter().enumerate() {
                table[i * k + j] = class[self.mul(ci[0], cj[0])];
            }
        }
        let q = FinGroup::from_flat(k, table, None)?;
        let projection = GroupHom::new(self, &q, class)?;
        Ok((q, projection))
    }

    /// The subgroup `h` as a group in its own right, with its inclusion.
    pub fn subgroup_group(&self, h: &[usize]) -> Result<(FinGroup, GroupHom), GroupError> {
        if !self.is_subgroup(h) {
            return Err(GroupError::NotSubgroup(h.to_vec()));
        }
        let position: BTreeMap<usize, usize> = h.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let k = h.len();
        let mut table = vec![0; k * k];
        for (i, &a) in h.iter().enumerate() {
            for (j, &b) in h.iter().enumerate() {
                table[i * k + j] = position[&self.mul(a, b)];
            }
        }
        let sub = FinGroup::from_flat(k, table, None)?;
        let inclusion = GroupHom::new(&sub, self, h.to_vec())?;
        Ok((sub, inclusion))
    }

    /// Minimal-looking generating set: greedily adds the element of largest
    /// order not yet generated.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![0];
        while span.len() < self.order {
            let inside = self.indicator(&span);
            let g = self
                .elements()
                .filter(|&x| !inside[x])
                .max_by_key(|&x| (self.element_order(x), std::cmp::Reverse(x)))
                .expect("proper span");
            gens.push(g);
            span = self.generate(&gens);
        }
        gens
    }
}

/// JSON form: a table, or permutations of `0..degree`, or a catalogue name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Table { table: Vec<Vec<usize>> },
    Permutations { degree: usize, generators: Vec<Vec<usize>> },
    Catalogue { catalogue: String },
}

impl GroupSpec {
    pub fn build(&self, cap: usize) -> Result<FinGroup, GroupError> {
        let g = match self {
            GroupSpec::Table { table } => FinGroup::from_table(table)?,
            GroupSpec::Permutations { degree, generators } => FinGroup::from_permutations(*degree, generators, cap)?,
            GroupSpec::Catalogue { catalogue } => catalogue_group(catalogue)?,
        };
        if g.order() > cap {
            return Err(GroupError::TooLarge { order: g.order(), cap });
        }
        Ok(g)
    }
}

impl Serialize for FinGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GroupSpec::Table { table: self.rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        GroupSpec::deserialize(d)?
            .build(DEFAULT_ORDER_CAP)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FinGroup {
        FinGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], 100).unwrap()
    }

    #[test]
    fn closure_sizes() {
        assert_eq!(FinGroup::from_permutations(2, &[vec![1, 0]], 10).unwrap().order(), 2);
        assert_eq!(s3().order(), 6);
        assert_eq!(FinGroup::from_permutations(4, &[], 10).unwrap().order(), 1);
        assert!(matches!(
            FinGroup::from_permutations(5, &[vec![1, 2, 3, 4, 0], vec![1, 0, 2, 3, 4]], 50),
            Err(GroupError::TooLarge { .. })
        ));
    }

    #[test]
    fn table_is_renumbered_around_the_identity() {
        // Z_2 written with the identity second
        let g = FinGroup::from_table(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.mul(1, 1), 0);
        assert!(FinGroup::from_table(&[vec![0, 1], vec![1, 1]]).is_err());
    }

    #[test]
    fn s3_structure() {
        let g = s3();
        assert!(!g.is_abelian());
        assert_eq!(g.center(), vec![0]);
        let a3 = g.derived_subgroup();
        assert_eq!(a3.len(), 3);
        assert!(g.is_normal(&a3));
        let (q, proj) = g.quotient(&a3).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(proj.kernel(), a3);
        assert!(matches!(g.quotient(&g.generate(&[1])), Err(GroupError::NotNormal(_))));
    }

    #[test]
    fn trivial_and_full_quotients() {
        let g = s3();
        let (whole, _) = g.quotient(&g.elements().collect::<Vec<_>>()).unwrap();
        assert_eq!(whole.order(), 1);
        let (copy, proj) = g.quotient(&[0]).unwrap();
        assert_eq!(copy.order(), 6);
        assert!(proj.is_bijective());
    }

    #[test]
    fn json_forms() {
        let g = s3();
        let text = serde_json::to_string(&g).unwrap();
        let back: FinGroup = serde_json::from_str(&text).unwrap();
        assert_eq!(back.rows(), g.rows());
        let from_perms: FinGroup = serde_json::from_str(r#"{"degree": 3, "generators": [[1,0,2],[1,2,0]]}"#).unwrap();
        assert_eq!(from_perms.order(), 6);
        let named: FinGroup = serde_json::from_str(r#"{"catalogue": "Q8"}"#).unwrap();
        assert_eq!(named.order(), 8);
    }
}
