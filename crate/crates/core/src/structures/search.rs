//! Backtracking search for induced embeddings and partial isomorphisms.
//!
//! Elements of the source are assigned in increasing order and candidates are
//! tried in increasing order, so results come out lexicographically sorted by
//! their image vectors. Pruning uses per-position incidence counts only.

use serde::{Deserialize, Serialize};

use super::{FinStructure, PartialMap, StructureError, Tuple};

const UNSET: usize = usize::MAX;

/// Why a map fails to be an induced embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "defect", rename_all = "kebab-case")]
pub enum EmbeddingDefect {
    SignatureMismatch,
    NotTotal { missing: usize },
    SourceOutOfRange { element: usize },
    TargetOutOfRange { element: usize },
    /// A tuple of the source whose image is missing in the target.
    Forward { symbol: String, tuple: Tuple },
    /// A tuple of the target inside the image whose preimage is missing in the source.
    Backward { symbol: String, tuple: Tuple },
}

/// Tuples of a structure indexed by the elements they contain.
#[derive(Clone, Debug)]
pub struct Incidence {
    tuples: Vec<Vec<Tuple>>,
    by_element: Vec<Vec<(u32, u32)>>,
}

impl Incidence {
    pub fn new(s: &FinStructure) -> Self {
        let tuples: Vec<Vec<Tuple>> = (0..s.signature().len())
            .map(|k| s.relation(k).iter().cloned().collect())
            .collect();
        let mut by_element = vec![Vec::new(); s.size()];
        for (k, rel) in tuples.iter().enumerate() {
            for (idx, t) in rel.iter().enumerate() {
                for (p, &e) in t.iter().enumerate() {
                    if !t[..p].contains(&e) {
                        by_element[e].push((k as u32, idx as u32));
                    }
                }
            }
        }
        Incidence { tuples, by_element }
    }

    pub fn containing(&self, e: usize) -> impl Iterator<Item = (usize, &Tuple)> + '_ {
        self.by_element[e]
            .iter()
            .map(move |&(k, idx)| (k as usize, &self.tuples[k as usize][idx as usize]))
    }
}

/// Counts of tuples per (symbol, position) at each element; an injective
/// embedding can only send `v` to `w` if every count at `v` is at most the one at `w`.
fn degree_profile(s: &FinStructure) -> Vec<Vec<u32>> {
    let sig = s.signature();
    let mut offsets = Vec::with_capacity(sig.len());
    let mut width = 0;
    for k in 0..sig.len() {
        offsets.push(width);
        width += sig.arity(k);
    }
    let mut profile = vec![vec![0u32; width]; s.size()];
    for (k, t) in s.facts() {
        for (p, &e) in t.iter().enumerate() {
            profile[e][offsets[k] + p] += 1;
        }
    }
    profile
}

/// Checks that `f` is an induced embedding of `a` into `b`.
pub fn check_embedding(f: &PartialMap, a: &FinStructure, b: &FinStructure) -> Result<(), EmbeddingDefect> {
    if !a.same_signature(b) {
        return Err(EmbeddingDefect::SignatureMismatch);
    }
    let mut forward = vec![UNSET; a.size()];
    let mut inverse = vec![UNSET; b.size()];
    for (x, y) in f.pairs() {
        if x >= a.size() {
            return Err(EmbeddingDefect::SourceOutOfRange { element: x });
        }
        if y >= b.size() {
            return Err(EmbeddingDefect::TargetOutOfRange { element: y });
        }
        forward[x] = y;
        inverse[y] = x;
    }
    if let Some(missing) = forward.iter().position(|&y| y == UNSET) {
        return Err(EmbeddingDefect::NotTotal { missing });
    }
    let sig = a.signature();
    for k in 0..sig.len() {
        for t in a.relation(k) {
            let image: Tuple = t.iter().map(|&e| forward[e]).collect();
            if !b.holds(k, &image) {
                return Err(EmbeddingDefect::Forward {
                    symbol: sig.name(k).to_string(),
                    tuple: t.clone(),
                });
            }
        }
        for t in b.relation(k) {
            if t.iter().all(|&e| inverse[e] != UNSET) {
                let pre: Tuple = t.iter().map(|&e| inverse[e]).collect();
                if !a.holds(k, &pre) {
                    return Err(EmbeddingDefect::Backward {
                        symbol: sig.name(k).to_string(),
                        tuple: t.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

pub fn is_embedding(f: &PartialMap, a: &FinStructure, b: &FinStructure) -> bool {
    check_embedding(f, a, b).is_ok()
}

struct EmbeddingSearch<'a> {
    a: &'a FinStructure,
    b: &'a FinStructure,
    a_by_max: Vec<Vec<(usize, &'a Tuple)>>,
    b_incidence: Incidence,
    a_degree: Vec<Vec<u32>>,
    b_degree: Vec<Vec<u32>>,
    limit: usize,
}

impl<'a> EmbeddingSearch<'a> {
    fn new(a: &'a FinStructure, b: &'a FinStructure, limit: usize) -> Self {
        let mut a_by_max = vec![Vec::new(); a.size()];
        for (k, t) in a.facts() {
            let m = *t.iter().max().expect("arity at least one");
            a_by_max[m].push((k, t));
        }
        EmbeddingSearch {
            a,
            b,
            a_by_max,
            b_incidence: Incidence::new(b),
            a_degree: degree_profile(a),
            b_degree: degree_profile(b),
            limit,
        }
    }

    fn consistent(&self, v: usize, w: usize, assign: &[usize], inverse: &[usize]) -> bool {
        if self.a_degree[v]
            .iter()
            .zip(&self.b_degree[w])
            .any(|(da, db)| da > db)
        {
            return false;
        }
        let image_of = |e: usize| if e == v { w } else { assign[e] };
        for &(k, t) in &self.a_by_max[v] {
            let image: Tuple = t.iter().map(|&e| image_of(e)).collect();
            if !self.b.holds(k, &image) {
                return false;
            }
        }
        let preimage_of = |e: usize| if e == w { v } else { inverse[e] };
        for (k, t) in self.b_incidence.containing(w) {
            if t.iter().all(|&e| preimage_of(e) != UNSET) {
                let pre: Tuple = t.iter().map(|&e| preimage_of(e)).collect();
                if !self.a.holds(k, &pre) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&self, v: usize, assign: &mut Vec<usize>, inverse: &mut Vec<usize>, out: &mut Vec<PartialMap>) {
        if out.len() >= self.limit {
            return;
        }
        if v == self.a.size() {
            out.push(PartialMap::from_images(assign).expect("search keeps maps injective"));
            return;
        }
        for w in 0..self.b.size() {
            if inverse[w] != UNSET || !self.consistent(v, w, assign, inverse) {
                continue;
            }
            assign[v] = w;
            inverse[w] = v;
            self.run(v + 1, assign, inverse, out);
            assign[v] = UNSET;
            inverse[w] = UNSET;
            if out.len() >= self.limit {
                return;
            }
        }
    }
}

/// All induced embeddings of `a` into `b` (or the first `limit`), in
/// lexicographic order of their image vectors.
pub fn find_embeddings(
    a: &FinStructure,
    b: &FinStructure,
    limit: Option<usize>,
) -> Result<Vec<PartialMap>, StructureError> {
    if !a.same_signature(b) {
        return Err(StructureError::SignatureMismatch);
    }
    let limit = limit.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    if a.size() > b.size() || limit == 0 {
        return Ok(out);
    }
    let search = EmbeddingSearch::new(a, b, limit);
    let mut assign = vec![UNSET; a.size()];
    let mut inverse = vec![UNSET; b.size()];
    search.run(0, &mut assign, &mut inverse, &mut out);
    Ok(out)
}

/// The lexicographically least isomorphism, if any.
pub fn are_isomorphic(a: &FinStructure, b: &FinStructure) -> Result<Option<PartialMap>, StructureError> {
    if !a.same_signature(b) {
        return Err(StructureError::SignatureMismatch);
    }
    if a.size() != b.size() {
        return Ok(None);
    }
    let counts_match = (0..a.signature().len()).all(|k| a.relation(k).len() == b.relation(k).len());
    if !counts_match {
        return Ok(None);
    }
    Ok(find_embeddings(a, b, Some(1))?.into_iter().next())
}

pub fn automorphisms(s: &FinStructure) -> Vec<PartialMap> {
    find_embeddings(s, s, None).expect("same signature")
}

/// Whether `f` is an isomorphism between the substructure of `s` induced on
/// its domain and the substructure of `t` induced on its image.
pub fn is_partial_iso(f: &PartialMap, s: &FinStructure, t: &FinStructure) -> bool {
    if !s.same_signature(t) {
        return false;
    }
    let mut forward = vec![UNSET; s.size()];
    let mut inverse = vec![UNSET; t.size()];
    for (x, y) in f.pairs() {
        if x >= s.size() || y >= t.size() {
            return false;
        }
        forward[x] = y;
        inverse[y] = x;
    }
    for k in 0..s.signature().len() {
        let mut inside = 0usize;
        for tuple in s.relation(k) {
            if tuple.iter().all(|&e| forward[e] != UNSET) {
                inside += 1;
                let image: Tuple = tuple.iter().map(|&e| forward[e]).collect();
                if !t.holds(k, &image) {
                    return false;
                }
            }
        }
        let inside_t = t
            .relation(k)
            .iter()
            .filter(|tuple| tuple.iter().all(|&e| inverse[e] != UNSET))
            .count();
        if inside != inside_t {
            return false;
        }
    }
    true
}

/// Incremental partial-isomorphism checks between two fixed structures.
pub struct PartialIsoChecker<'a> {
    source: &'a FinStructure,
    target: &'a FinStructure,
    source_incidence: Incidence,
    target_incidence: Incidence,
}

impl<'a> PartialIsoChecker<'a> {
    pub fn new(source: &'a FinStructure, target: &'a FinStructure) -> Self {
        PartialIsoChecker {
            source,
            target,
            source_incidence: Incidence::new(source),
            target_incidence: Incidence::new(target),
        }
    }

    /// Assuming `f` is a partial isomorphism, whether `f ∪ {x -> y}` is one.
    pub fn can_extend(&self, f: &PartialMap, x: usize, y: usize) -> bool {
        if f.contains_source(x) {
            return f.get(x) == Some(y);
        }
        if f.pairs().any(|(_, v)| v == y) {
            return false;
        }
        let mut forward = vec![UNSET; self.source.size()];
        let mut inverse = vec![UNSET; self.target.size()];
        for (a, b) in f.pairs() {
            forward[a] = b;
            inverse[b] = a;
        }
        forward[x] = y;
        inverse[y] = x;
        for (k, t) in self.source_incidence.containing(x) {
            if t.iter().all(|&e| forward[e] != UNSET) {
                let image: Tuple = t.iter().map(|&e| forward[e]).collect();
                if !self.target.holds(k, &image) {
                    return false;
                }
            }
        }
        for (k, t) in self.target_incidence.containing(y) {
            if t.iter().all(|&e| inverse[e] != UNSET) {
                let pre: Tuple = t.iter().map(|&e| inverse[e]).collect();
                if !self.source.holds(k, &pre) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::structures::{Signature, Symbol};

    fn graph(n: usize, edges: &[(usize, usize)]) -> FinStructure {
        let sig = Arc::new(Signature::new(vec![Symbol::new("E", 2)]).unwrap());
        let mut s = FinStructure::new(sig, n);
        for &(x, y) in edges {
            s.insert(0, vec![x, y]).unwrap();
            s.insert(0, vec![y, x]).unwrap();
        }
        s
    }

    fn triangle() -> FinStructure {
        graph(3, &[(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn identity_is_an_embedding() {
        let k3 = triangle();
        assert!(is_embedding(&PartialMap::identity(3), &k3, &k3));
    }

    #[test]
    fn edge_into_triangle_every_injective_map_works() {
        let edge = graph(2, &[(0, 1)]);
        let k3 = triangle();
        let mut brute = 0;
        for x in 0..3 {
            for y in 0..3 {
                if x != y {
                    let f = PartialMap::from_images(&[x, y]).unwrap();
                    assert!(is_embedding(&f, &edge, &k3));
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, 6);
        let found = find_embeddings(&edge, &k3, None).unwrap();
        assert_eq!(found.len(), 6);
        assert_eq!(found[0].image(), vec![0, 1]);
        assert_eq!(found[5].image(), vec![2, 1]);
    }

    #[test]
    fn collapsing_map_is_rejected() {
        let edge = graph(2, &[(0, 1)]);
        let k3 = triangle();
        // PartialMap itself refuses non-injective maps; a partial one is not total.
        assert!(PartialMap::from_images(&[0, 0]).is_err());
        let partial = PartialMap::from_pairs([(0, 0)]).unwrap();
        assert_eq!(
            check_embedding(&partial, &edge, &k3),
            Err(EmbeddingDefect::NotTotal { missing: 1 })
        );
    }

    #[test]
    fn larger_source_has_no_embeddings() {
        assert!(find_embeddings(&triangle(), &graph(2, &[(0, 1)]), None).unwrap().is_empty());
    }

    #[test]
    fn point_into_four_isolated_points() {
        let point = graph(1, &[]);
        let four = graph(4, &[]);
        assert_eq!(find_embeddings(&point, &four, None).unwrap().len(), 4);
    }

    #[test]
    fn isomorphism_examples() {
        let k3 = triangle();
        assert_eq!(are_isomorphic(&k3, &k3).unwrap(), Some(PartialMap::identity(3)));

        let path = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(are_isomorphic(&k3, &path).unwrap(), None);

        // Two 2-element structures: a directed edge 0->1 vs 1->0. Only the swap works.
        let sig = Arc::new(Signature::new(vec![Symbol::new("R", 2)]).unwrap());
        let a = FinStructure::from_tuples(Arc::clone(&sig), 2, [(0, vec![0, 1])]).unwrap();
        let b = FinStructure::from_tuples(sig, 2, [(0, vec![1, 0])]).unwrap();
        let iso = are_isomorphic(&a, &b).unwrap().unwrap();
        assert_eq!(iso.image(), vec![1, 0]);
    }

    #[test]
    fn induced_condition_is_checked_backwards() {
        // Non-edge into an edge is not an induced embedding.
        let two = graph(2, &[]);
        let edge = graph(2, &[(0, 1)]);
        let f = PartialMap::identity(2);
        assert!(matches!(
            check_embedding(&f, &two, &edge),
            Err(EmbeddingDefect::Backward { .. })
        ));
    }

    #[test]
    fn partial_iso_checker_matches_full_check() {
        let path = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let checker = PartialIsoChecker::new(&path, &path);
        let f = PartialMap::from_pairs([(0, 3)]).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                if let Ok(g) = f.with(x, y) {
                    assert_eq!(checker.can_extend(&f, x, y), is_partial_iso(&g, &path, &path));
                }
            }
        }
    }
}
