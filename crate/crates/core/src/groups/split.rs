use serde::{Deserialize, Serialize};

use super::{direct_product, find_isomorphism, FinGroup, GroupError, GroupHom};

/// The first complement of the normal subgroup `f` in subgroup order, and the
/// number of subgroups inspected.
fn search_complement(g: &FinGroup, f: &[usize], cap: usize) -> Result<(Option<Vec<usize>>, usize), GroupError> {
    if !g.is_normal(f) {
        return Err(GroupError::NotNormal(f.to_vec()));
    }
    let subgroups = g.subgroups(cap)?;
    let total = subgroups.len();
    let found = subgroups
        .into_iter()
        .find(|k| k.len() * f.len() == g.order() && g.intersection(k, f).len() == 1);
    Ok((found, total))
}

/// A subgroup `K` with `G = FK` and `F ∩ K = 1`, the first such in subgroup
/// order, if there is one.
pub fn find_complement(g: &FinGroup, f: &[usize], cap: usize) -> Result<Option<Vec<usize>>, GroupError> {
    Ok(search_complement(g, f, cap)?.0)
}

fn is_complement(g: &FinGroup, f: &[usize], k: &[usize]) -> bool {
    g.is_subgroup(k) && k.len() * f.len() == g.order() && g.intersection(k, f).len() == 1
}

/// `gF ↦` the unique element of `gF ∩ F'`, from `G/F` onto `F'`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Kappa {
    pub quotient: FinGroup,
    pub projection: GroupHom,
    pub complement: FinGroup,
    /// `F' -> G`.
    pub inclusion: GroupHom,
    /// `G/F -> F'`, an isomorphism.
    pub map: GroupHom,
}

pub fn kappa(g: &FinGroup, f: &[usize], complement: &[usize]) -> Result<Kappa, GroupError> {
    if !g.is_central(f) {
        return Err(GroupError::NotCentral(f.to_vec()));
    }
    if !is_complement(g, f, complement) {
        return Err(GroupError::NotComplement(complement.to_vec()));
    }
    let (quotient, projection) = g.quotient(f)?;
    let (sub, inclusion) = g.subgroup_group(complement)?;
    let mut map = vec![usize::MAX; quotient.order()];
    for (j, &x) in complement.iter().enumerate() {
        let coset = projection.apply(x);
        if map[coset] != usize::MAX {
            return Err(GroupError::Inconsistent(format!("coset {coset} meets the complement twice")));
        }
        map[coset] = j;
    }
    if map.contains(&usize::MAX) {
        return Err(GroupError::Inconsistent("a coset misses the complement".into()));
    }
    let map = GroupHom::new(&quotient, &sub, map).map_err(|e| GroupError::Inconsistent(e.to_string()))?;
    if !map.is_bijective() || !map.after(&projection).after(&inclusion).map.iter().enumerate().all(|(j, &y)| j == y) {
        return Err(GroupError::Inconsistent("kappa is not inverse to the projection on F'".into()));
    }
    Ok(Kappa {
        quotient,
        projection,
        complement: sub,
        inclusion,
        map,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub order: usize,
    pub f: Vec<usize>,
    pub complement: Option<Vec<usize>>,
    pub subgroups_searched: usize,
    /// `g ↦ (gF, g·κ(gF)⁻¹)` checked to be an isomorphism `G -> G/F × F`.
    pub isomorphism_verified: Option<bool>,
    /// Whether `G ≅ G/F × F` by exhaustive search.
    pub abstractly_isomorphic: bool,
    pub split: bool,
    pub agree: bool,
}

/// Decides whether the central subgroup `f` has a complement and compares
/// with a brute-force isomorphism test `G ≅? G/F × F`.
pub fn verify_splitting(g: &FinGroup, f: &[usize], cap: usize) -> Result<SplittingReport, GroupError> {
    if !g.is_central(f) {
        return Err(GroupError::NotCentral(f.to_vec()));
    }
    let (complement, searched) = search_complement(g, f, cap)?;
    let (quotient, projection) = g.quotient(f)?;
    let (fgroup, _) = g.subgroup_group(f)?;
    let target = direct_product(&quotient, &fgroup);
    let abstractly_isomorphic = find_isomorphism(g, &target).is_some();
    let isomorphism_verified = match &complement {
        None => None,
        Some(k) => {
            let kp = kappa(g, f, k)?;
            let map: Vec<usize> = g
                .elements()
                .map(|x| {
                    let coset = projection.apply(x);
                    let rep = kp.inclusion.apply(kp.map.apply(coset));
                    let in_f = g.mul(x, g.inv(rep));
                    coset * f.len() + f.binary_search(&in_f).expect("g·κ(gF)⁻¹ lies in F")
                })
                .collect();
            Some(GroupHom::new(g, &target, map).is_ok_and(|h| h.is_bijective()))
        }
    };
    let split = complement.is_some();
    Ok(SplittingReport {
        order: g.order(),
        f: f.to_vec(),
        complement,
        subgroups_searched: searched,
        isomorphism_verified,
        abstractly_isomorphic,
        split,
        agree: split == abstractly_isomorphic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{catalogue_group, cyclic, direct_product, DEFAULT_SUBGROUP_CAP};

    #[test]
    fn klein_four_splits_along_its_factors() {
        let g = direct_product(&cyclic(2), &cyclic(2));
        // (1,0) is index 2; (0,1) is index 1
        let first = vec![0, 2];
        assert_eq!(find_complement(&g, &first, 64).unwrap(), Some(vec![0, 1]));
        let k = kappa(&g, &first, &[0, 1]).unwrap();
        assert!(k.map.is_bijective());
    }

    #[test]
    fn z4_does_not_split() {
        let g = cyclic(4);
        assert_eq!(find_complement(&g, &[0, 2], 64).unwrap(), None);
        let r = verify_splitting(&g, &[0, 2], DEFAULT_SUBGROUP_CAP).unwrap();
        assert!(!r.split && !r.abstractly_isomorphic && r.agree);
    }

    #[test]
    fn s3_times_z2_splits_with_the_s3_factor() {
        let g = catalogue_group("S3xZ2").unwrap();
        let f = vec![0, 1];
        let k = find_complement(&g, &f, 64).unwrap().unwrap();
        assert_eq!(k, vec![0, 2, 4, 6, 8, 10]);
        let kp = kappa(&g, &f, &k).unwrap();
        assert_eq!(kp.quotient.order(), 6);
        let r = verify_splitting(&g, &f, 64).unwrap();
        assert!(r.split && r.isomorphism_verified == Some(true) && r.agree);
    }

    #[test]
    fn quaternion_center_does_not_split() {
        let g = catalogue_group("Q8").unwrap();
        let r = verify_splitting(&g, &g.center(), 64).unwrap();
        assert!(!r.split && r.agree);
        assert_eq!(r.subgroups_searched, 6);
    }

    #[test]
    fn preconditions() {
        let g = catalogue_group("S3").unwrap();
        let a3 = g.derived_subgroup();
        assert!(matches!(verify_splitting(&g, &a3, 64), Err(GroupError::NotCentral(_))));
        let z4 = cyclic(4);
        assert!(matches!(kappa(&z4, &[0, 2], &[0, 2]), Err(GroupError::NotComplement(_))));
    }
}
