use std::collections::BTreeMap;

use itertools::Itertools;

use super::{new_tuples, ClassOracle, FraisseError};
use crate::structures::{FinStructure, Tuple};

/// Default bound on the number of candidate structures an enumerator may visit.
pub const DEFAULT_ENUM_CAP: usize = 1 << 22;

/// Filters every way of adding tuples on the new elements through membership.
pub fn generic_structures_over(
    oracle: &(impl ClassOracle + ?Sized),
    base: &FinStructure,
    extra: usize,
    cap: usize,
) -> Result<Vec<FinStructure>, FraisseError> {
    let n = base.size() + extra;
    let sig = oracle.signature();
    let candidates: Vec<(usize, Tuple)> = (0..sig.len())
        .flat_map(|k| new_tuples(oracle, k, sig.arity(k), n, base.size()).into_iter().map(move |t| (k, t)))
        .collect();
    let bits = candidates.len();
    if bits >= 64 || (1u128 << bits) > cap as u128 {
        return Err(FraisseError::Resource {
            what: format!("{} structures over a base of size {}", oracle.name(), base.size()),
            needed: if bits >= 127 { u128::MAX } else { 1u128 << bits },
            cap: cap as u128,
        });
    }
    let start = base.grow(extra);
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << bits) {
        let mut s = start.clone();
        for (j, (k, t)) in candidates.iter().enumerate() {
            if mask >> j & 1 == 1 {
                s.insert(*k, t.clone())?;
            }
        }
        if oracle.is_member(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

/// The lexicographically least relabelling of `s` that fixes `0..fixed` pointwise.
pub fn canonical_form_over(s: &FinStructure, fixed: usize) -> FinStructure {
    let n = s.size();
    let mut best: Option<(Vec<(usize, Tuple)>, FinStructure)> = None;
    for perm in (fixed..n).permutations(n - fixed) {
        let mut map: Vec<usize> = (0..fixed).collect();
        map.extend(perm);
        let t = s.relabel(&map, n);
        let key = t.fact_list();
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, t));
        }
    }
    best.map(|(_, t)| t).unwrap_or_else(|| s.clone())
}

pub fn canonical_form(s: &FinStructure) -> FinStructure {
    canonical_form_over(s, 0)
}

fn reduce(structures: Vec<FinStructure>, fixed: usize) -> Vec<FinStructure> {
    let mut seen: BTreeMap<Vec<(usize, Tuple)>, FinStructure> = BTreeMap::new();
    for s in structures {
        let c = canonical_form_over(&s, fixed);
        seen.entry(c.fact_list()).or_insert(c);
    }
    seen.into_values().collect()
}

/// Members of the given size up to isomorphism, in canonical form and sorted.
pub fn members_up_to_iso(oracle: &dyn ClassOracle, size: usize, cap: usize) -> Result<Vec<FinStructure>, FraisseError> {
    let empty = FinStructure::new(oracle.signature(), 0);
    Ok(reduce(oracle.structures_over(&empty, size, cap)?, 0))
}

/// Members extending `base` by `extra` elements, up to isomorphism over `base`.
pub fn extensions_up_to_iso(
    oracle: &dyn ClassOracle,
    base: &FinStructure,
    extra: usize,
    cap: usize,
) -> Result<Vec<FinStructure>, FraisseError> {
    Ok(reduce(oracle.structures_over(base, extra, cap)?, base.size()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraisse::{LinearOrders, RandomGraph};

    #[test]
    fn graphs_up_to_isomorphism() {
        let g = RandomGraph::new();
        let counts: Vec<usize> = (0..=4)
            .map(|n| members_up_to_iso(&g, n, DEFAULT_ENUM_CAP).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11]);
    }

    #[test]
    fn one_linear_order_per_size() {
        let lo = LinearOrders::new();
        for n in 0..=4 {
            assert_eq!(members_up_to_iso(&lo, n, DEFAULT_ENUM_CAP).unwrap().len(), 1);
        }
    }

    #[test]
    fn extensions_of_an_edge_over_the_edge() {
        let g = RandomGraph::new();
        let edge = RandomGraph::graph(2, &[(0, 1)]);
        assert_eq!(g.one_point_extensions(&edge).unwrap().len(), 4);
        // attaching to 0 only and to 1 only are not isomorphic over the edge
        assert_eq!(extensions_up_to_iso(&g, &edge, 1, DEFAULT_ENUM_CAP).unwrap().len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        let g = RandomGraph::new();
        let empty = RandomGraph::graph(0, &[]);
        assert!(matches!(
            generic_structures_over(&g, &empty, 8, 1 << 10),
            Err(FraisseError::Resource { .. })
        ));
    }
}
