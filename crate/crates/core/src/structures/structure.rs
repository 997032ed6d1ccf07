use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::json::StructureDoc;
use super::{Signature, StructureError};

pub type Tuple = Vec<usize>;

/// A finite relational structure on the domain `0..size`.
///
/// Relations are stored extensionally, one sorted tuple set per symbol in
/// signature order. Nothing is closed under symmetry implicitly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinStructure {
    signature: Arc<Signature>,
    size: usize,
    relations: Vec<BTreeSet<Tuple>>,
}

impl FinStructure {
    pub fn new(signature: Arc<Signature>, size: usize) -> Self {
        let relations = vec![BTreeSet::new(); signature.len()];
        FinStructure {
            signature,
            size,
            relations,
        }
    }

    pub fn from_tuples<I>(signature: Arc<Signature>, size: usize, tuples: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (usize, Tuple)>,
    {
        let mut s = FinStructure::new(signature, size);
        for (symbol, t) in tuples {
            s.insert(symbol, t)?;
        }
        Ok(s)
    }

    /// Adds a tuple; returns whether it was new.
    pub fn insert(&mut self, symbol: usize, tuple: Tuple) -> Result<bool, StructureError> {
        let sym = self
            .signature
            .symbols()
            .get(symbol)
            .ok_or_else(|| StructureError::UnknownSymbol(format!("#{symbol}")))?;
        if tuple.len() != sym.arity {
            return Err(StructureError::ArityMismatch {
                symbol: sym.name.clone(),
                expected: sym.arity,
                found: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|&&e| e >= self.size) {
            return Err(StructureError::OutOfRange {
                element: bad,
                size: self.size,
            });
        }
        Ok(self.relations[symbol].insert(tuple))
    }

    pub fn insert_named(&mut self, name: &str, tuple: Tuple) -> Result<bool, StructureError> {
        let symbol = self
            .signature
            .index_of(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        self.insert(symbol, tuple)
    }

    pub fn remove(&mut self, symbol: usize, tuple: &[usize]) -> bool {
        self.relations[symbol].remove(tuple)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation(&self, symbol: usize) -> &BTreeSet<Tuple> {
        &self.relations[symbol]
    }

    pub fn relation_named(&self, name: &str) -> Option<&BTreeSet<Tuple>> {
        self.signature.index_of(name).map(|i| &self.relations[i])
    }

    pub fn holds(&self, symbol: usize, tuple: &[usize]) -> bool {
        self.relations[symbol].contains(tuple)
    }

    pub fn holds_named(&self, name: &str, tuple: &[usize]) -> bool {
        self.signature
            .index_of(name)
            .is_some_and(|i| self.relations[i].contains(tuple))
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }

    /// All `(symbol, tuple)` facts in signature order, tuples sorted.
    pub fn facts(&self) -> impl Iterator<Item = (usize, &Tuple)> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(s, r)| r.iter().map(move |t| (s, t)))
    }

    /// All facts as an owned sorted list; equal lists mean equal structures
    /// over the same signature and size.
    pub fn fact_list(&self) -> Vec<(usize, Tuple)> {
        self.facts().map(|(k, t)| (k, t.clone())).collect()
    }

    pub fn same_signature(&self, other: &FinStructure) -> bool {
        Arc::ptr_eq(&self.signature, &other.signature) || self.signature == other.signature
    }

    /// Induced substructure on `elements`, renumbered so that `elements[j]` becomes `j`.
    pub fn induced(&self, elements: &[usize]) -> FinStructure {
        let mut position = vec![usize::MAX; self.size];
        for (j, &e) in elements.iter().enumerate() {
            position[e] = j;
        }
        let relations = self
            .relations
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|t| t.iter().all(|&e| position[e] != usize::MAX))
                    .map(|t| t.iter().map(|&e| position[e]).collect())
                    .collect()
            })
            .collect();
        FinStructure {
            signature: Arc::clone(&self.signature),
            size: elements.len(),
            relations,
        }
    }

    /// Image under an injective element map `map[old] = new` into a domain of `new_size`.
    pub fn relabel(&self, map: &[usize], new_size: usize) -> FinStructure {
        let relations = self
            .relations
            .iter()
            .map(|r| r.iter().map(|t| t.iter().map(|&e| map[e]).collect()).collect())
            .collect();
        FinStructure {
            signature: Arc::clone(&self.signature),
            size: new_size,
            relations,
        }
    }

    /// Same structure with `extra` isolated elements appended.
    pub fn grow(&self, extra: usize) -> FinStructure {
        FinStructure {
            signature: Arc::clone(&self.signature),
            size: self.size + extra,
            relations: self.relations.clone(),
        }
    }

    pub fn to_doc(&self) -> StructureDoc {
        StructureDoc::from_structure(self)
    }

    pub fn from_doc(doc: &StructureDoc) -> Result<FinStructure, StructureError> {
        doc.to_structure()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("structure documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<FinStructure, StructureError> {
        let doc: StructureDoc = serde_json::from_str(text)?;
        doc.to_structure()
    }
}

impl fmt::Debug for FinStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinStructure(size={}", self.size)?;
        for (s, r) in self.relations.iter().enumerate() {
            write!(f, ", {}={:?}", self.signature.name(s), r)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Symbol;

    fn graph_sig() -> Arc<Signature> {
        Arc::new(Signature::new(vec![Symbol::new("E", 2)]).unwrap())
    }

    #[test]
    fn insert_checks_arity_and_range() {
        let mut s = FinStructure::new(graph_sig(), 2);
        assert!(s.insert(0, vec![0, 1]).unwrap());
        assert!(!s.insert(0, vec![0, 1]).unwrap());
        assert!(matches!(
            s.insert(0, vec![0, 1, 1]),
            Err(StructureError::ArityMismatch { .. })
        ));
        assert!(matches!(
            s.insert(0, vec![0, 2]),
            Err(StructureError::OutOfRange { element: 2, .. })
        ));
    }

    #[test]
    fn induced_renumbers_in_list_order() {
        let s = FinStructure::from_tuples(graph_sig(), 3, [(0, vec![0, 2]), (0, vec![1, 2])]).unwrap();
        let sub = s.induced(&[2, 0]);
        assert_eq!(sub.size(), 2);
        assert!(sub.holds(0, &[1, 0]));
        assert_eq!(sub.tuple_count(), 1);
    }
}
