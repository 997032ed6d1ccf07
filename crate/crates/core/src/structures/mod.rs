//! Finite relational structures, embeddings, amalgams and quantifier-free types.

mod amalgam;
mod fingerprint;
mod json;
mod partial_map;
mod search;
mod signature;
mod structure;

use thiserror::Error;

pub use amalgam::{free_amalgam, Amalgam};
pub use fingerprint::{qf_type, FingerprintDiff, TypeFingerprint};
pub use json::{validate, StructureDoc, ValidationReport, Violation, ViolationKind};
pub use partial_map::PartialMap;
pub use search::{
    are_isomorphic, automorphisms, check_embedding, find_embeddings, is_embedding, is_partial_iso,
    EmbeddingDefect, Incidence, PartialIsoChecker,
};
pub use signature::{graded_name, parse_graded_name, Signature, Symbol};
pub use structure::{FinStructure, Tuple};


/// Calls `f` on every tuple over `elements` of the given arity, in
/// lexicographic order of positions, until it returns `false`. Returns
/// whether the walk finished.
pub fn for_each_tuple(elements: &[usize], arity: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if arity > 0 && elements.is_empty() {
        return true;
    }
    let mut pick = vec![0usize; arity];
    let mut t: Vec<usize> = vec![elements.first().copied().unwrap_or(0); arity];
    loop {
        if !f(&t) {
            return false;
        }
        let Some(slot) = pick.iter().rposition(|&j| j + 1 < elements.len()) else {
            return true;
        };
        pick[slot] += 1;
        t[slot] = elements[pick[slot]];
        for j in slot + 1..arity {
            pick[j] = 0;
            t[j] = elements[0];
        }
    }
}

/// Whether the entries of a short tuple are pairwise distinct.
pub fn is_injective(tuple: &[usize]) -> bool {
    tuple.iter().enumerate().all(|(i, x)| !tuple[..i].contains(x))
}

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("symbol {0} declared twice")]
    DuplicateSymbol(String),
    #[error("symbol {0} has arity zero")]
    ZeroArity(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("symbol {symbol} has arity {expected}, got a tuple of length {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("element {element} out of range for size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("structures have different signatures")]
    SignatureMismatch,
    #[error("partial map already sends {element} elsewhere")]
    NotFunctional { element: usize },
    #[error("partial map already hits {target}")]
    NotInjective { target: usize },
    #[error("not an embedding ({0})")]
    InvalidEmbedding(String),
    #[error("invalid structure: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
