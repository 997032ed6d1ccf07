use serde::{Deserialize, Serialize};

use super::search::check_embedding;
use super::{FinStructure, PartialMap, StructureError};

/// An amalgam `D` of `B` and `C` over `A` with its two injections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Amalgam {
    pub structure: FinStructure,
    /// `B -> D`
    pub left: PartialMap,
    /// `C -> D`
    pub right: PartialMap,
}

/// Glues `b` and `c` along the images of `a`: the domain is `b` followed by the
/// elements of `c` outside `g(a)` in increasing order, and the relations are
/// exactly the images of the relations of `b` and `c`.
pub fn free_amalgam(
    a: &FinStructure,
    b: &FinStructure,
    f: &PartialMap,
    c: &FinStructure,
    g: &PartialMap,
) -> Result<Amalgam, StructureError> {
    check_embedding(f, a, b).map_err(|d| StructureError::InvalidEmbedding(format!("left: {d:?}")))?;
    check_embedding(g, a, c).map_err(|d| StructureError::InvalidEmbedding(format!("right: {d:?}")))?;
    let right_images = glue_map(a, b, f, c, g);
    let size = b.size() + c.size() - a.size();
    let mut d = b.grow(size - b.size());
    for (k, t) in c.facts() {
        d.insert(k, t.iter().map(|&e| right_images[e]).collect())?;
    }
    Ok(Amalgam {
        structure: d,
        left: PartialMap::identity(b.size()),
        right: PartialMap::from_images(&right_images)?,
    })
}

/// Where each element of `c` lands in the glued domain.
pub(crate) fn glue_map(a: &FinStructure, b: &FinStructure, f: &PartialMap, c: &FinStructure, g: &PartialMap) -> Vec<usize> {
    let mut images = vec![usize::MAX; c.size()];
    for x in 0..a.size() {
        let (Some(gx), Some(fx)) = (g.get(x), f.get(x)) else {
            continue;
        };
        images[gx] = fx;
    }
    let mut next = b.size();
    for slot in images.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    images
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::structures::{is_embedding, validate, Signature, Symbol};

    fn graph(n: usize, edges: &[(usize, usize)]) -> FinStructure {
        let sig = Arc::new(Signature::new(vec![Symbol::new("E", 2)]).unwrap());
        let mut s = FinStructure::new(sig, n);
        for &(x, y) in edges {
            s.insert(0, vec![x, y]).unwrap();
            s.insert(0, vec![y, x]).unwrap();
        }
        s
    }

    #[test]
    fn empty_base_gives_disjoint_union() {
        let empty = graph(0, &[]);
        let b = graph(2, &[(0, 1)]);
        let c = graph(3, &[(1, 2)]);
        let am = free_amalgam(&empty, &b, &PartialMap::new(), &c, &PartialMap::new()).unwrap();
        assert_eq!(am.structure, graph(5, &[(0, 1), (3, 4)]));
        assert_eq!(am.right.image(), vec![2, 3, 4]);
    }

    #[test]
    fn equal_sides_glue_to_the_base() {
        let a = graph(2, &[(0, 1)]);
        let id = PartialMap::identity(2);
        let am = free_amalgam(&a, &a, &id, &a, &id).unwrap();
        assert_eq!(am.structure, a);
        assert_eq!(am.left, id);
        assert_eq!(am.right, id);
    }

    #[test]
    fn two_edges_at_a_shared_vertex_make_an_induced_path() {
        let point = graph(1, &[]);
        let edge = graph(2, &[(0, 1)]);
        let at_zero = PartialMap::from_images(&[0]).unwrap();
        let am = free_amalgam(&point, &edge, &at_zero, &edge, &at_zero).unwrap();
        let d = &am.structure;
        assert_eq!(d.size(), 3);
        assert!(d.holds(0, &[0, 1]) && d.holds(0, &[0, 2]));
        assert!(!d.holds(0, &[1, 2]) && !d.holds(0, &[2, 1]));
        assert!(validate(&d.to_doc()).is_pass());
        assert!(is_embedding(&am.left, &edge, d));
        assert!(is_embedding(&am.right, &edge, d));
    }

    #[test]
    fn invalid_embedding_is_an_error() {
        let point = graph(1, &[]);
        let edge = graph(2, &[(0, 1)]);
        let bad = PartialMap::from_images(&[5]).unwrap();
        assert!(free_amalgam(&point, &edge, &bad, &edge, &bad).is_err());
    }
}
