//! The JSON interchange format for structures:
//! `{"signature":[{"name":..,"arity":..}],"size":..,"relations":{name:[[..],..]}}`
//! with every symbol present and tuple lists sorted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FinStructure, Signature, StructureError, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDoc {
    pub signature: Vec<Symbol>,
    pub size: usize,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DuplicateSymbol,
    ZeroArity,
    UnknownSymbol,
    Arity,
    OutOfRange,
    DuplicateTuple,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::DuplicateSymbol => "duplicate-symbol",
            ViolationKind::ZeroArity => "zero-arity",
            ViolationKind::UnknownSymbol => "unknown-symbol",
            ViolationKind::Arity => "arity",
            ViolationKind::OutOfRange => "out-of-range",
            ViolationKind::DuplicateTuple => "duplicate-tuple",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub symbol: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            return write!(f, "pass");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} in {}: {}", v.kind.as_str(), v.symbol, v.detail)?;
        }
        Ok(())
    }
}

/// Checks a structure document against the structure invariants.
pub fn validate(doc: &StructureDoc) -> ValidationReport {
    let mut violations = Vec::new();
    let mut arities = BTreeMap::new();
    for s in &doc.signature {
        if s.arity == 0 {
            violations.push(Violation {
                kind: ViolationKind::ZeroArity,
                symbol: s.name.clone(),
                detail: "arity must be at least 1".into(),
            });
        }
        if arities.insert(s.name.as_str(), s.arity).is_some() {
            violations.push(Violation {
                kind: ViolationKind::DuplicateSymbol,
                symbol: s.name.clone(),
                detail: "symbol declared twice".into(),
            });
        }
    }
    for (name, tuples) in &doc.relations {
        let Some(&arity) = arities.get(name.as_str()) else {
            violations.push(Violation {
                kind: ViolationKind::UnknownSymbol,
                symbol: name.clone(),
                detail: "relation for undeclared symbol".into(),
            });
            continue;
        };
        let mut seen = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                violations.push(Violation {
                    kind: ViolationKind::Arity,
                    symbol: name.clone(),
                    detail: format!("tuple {t:?} has length {} but arity is {arity}", t.len()),
                });
            }
            if let Some(&e) = t.iter().find(|&&e| e >= doc.size) {
                violations.push(Violation {
                    kind: ViolationKind::OutOfRange,
                    symbol: name.clone(),
                    detail: format!("element {e} in {t:?} not below size {}", doc.size),
                });
            }
            if !seen.insert(t) {
                violations.push(Violation {
                    kind: ViolationKind::DuplicateTuple,
                    symbol: name.clone(),
                    detail: format!("tuple {t:?} listed twice"),
                });
            }
        }
    }
    ValidationReport { violations }
}

impl StructureDoc {
    pub fn from_structure(s: &FinStructure) -> StructureDoc {
        let sig = s.signature();
        let relations = (0..sig.len())
            .map(|k| (sig.name(k).to_string(), s.relation(k).iter().cloned().collect()))
            .collect();
        StructureDoc {
            signature: sig.symbols().to_vec(),
            size: s.size(),
            relations,
        }
    }

    pub fn to_structure(&self) -> Result<FinStructure, StructureError> {
        let report = validate(self);
        if !report.is_pass() {
            return Err(StructureError::Invalid(report));
        }
        let sig = Arc::new(Signature::new(self.signature.clone())?);
        let mut s = FinStructure::new(Arc::clone(&sig), self.size);
        for (name, tuples) in &self.relations {
            let k = sig.index_of(name).expect("validated");
            for t in tuples {
                s.insert(k, t.clone())?;
            }
        }
        Ok(s)
    }
}

impl Serialize for FinStructure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StructureDoc::from_structure(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FinStructure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = StructureDoc::deserialize(deserializer)?;
        doc.to_structure().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(json: &str) -> StructureDoc {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn empty_structure_over_empty_signature_passes() {
        let d = doc(r#"{"signature":[],"size":0,"relations":{}}"#);
        assert!(validate(&d).is_pass());
    }

    #[test]
    fn out_of_range_entry_is_reported() {
        let d = doc(r#"{"signature":[{"name":"E","arity":2}],"size":2,"relations":{"E":[[0,2]]}}"#);
        let r = validate(&d);
        assert!(r.has(ViolationKind::OutOfRange));
        assert_eq!(r.violations.len(), 1);
    }

    #[test]
    fn wrong_tuple_length_is_an_arity_violation() {
        let d = doc(r#"{"signature":[{"name":"E","arity":2}],"size":3,"relations":{"E":[[0,1,2]]}}"#);
        assert!(validate(&d).has(ViolationKind::Arity));
    }

    #[test]
    fn duplicates_and_unknown_symbols() {
        let d = doc(r#"{"signature":[{"name":"E","arity":2}],"size":2,"relations":{"E":[[0,1],[0,1]],"F":[[0]]}}"#);
        let r = validate(&d);
        assert!(r.has(ViolationKind::DuplicateTuple));
        assert!(r.has(ViolationKind::UnknownSymbol));
        assert!(FinStructure::from_doc(&d).is_err());
    }

    #[test]
    fn serialization_is_canonical() {
        let d = doc(r#"{"signature":[{"name":"E","arity":2}],"size":3,"relations":{"E":[[2,1],[0,1]]}}"#);
        let s = FinStructure::from_doc(&d).unwrap();
        assert_eq!(
            s.to_json(),
            r#"{"signature":[{"name":"E","arity":2}],"size":3,"relations":{"E":[[0,1],[2,1]]}}"#
        );
    }
}
