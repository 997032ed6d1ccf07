//! Finite-language encoding of graded relational structures.
//!
//! A fact `R_n(a_1, ..., a_l)` over the `P`-part is represented by an
//! *n-pair*: `n` fresh `Q`-elements `c_1, ..., c_n` forming an `H`-cycle, with
//! `λ` marking `c_1`, `ρ` marking `c_l`, and `S`-tuples recording the labelled
//! sequence. The signature `{P, Q, λ, ρ, H, S}` is fixed whatever the inner
//! signature is.
//!
//! `S` follows a positional convention: `S(c_h, c_i, a, b)` holds exactly when
//! `h, i <= l`, `a = a_h` and `b = a_i`. The label at position `h` is then read
//! off the diagonal `S(c_h, c_h, a, a)`.

mod check;
mod codec;
mod npair;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fraisse::{ClassOracle, FraisseError};
use crate::structures::{Amalgam, FinStructure, PartialMap, Signature, StructureError, Symbol};

pub use check::{class_membership, ep_define_check, free_amalgam_membership, AmalgamReport, MembershipReport};
pub use codec::{decode, encode};
pub use npair::{find_npairs, is_npair, NPair};

pub const P: usize = 0;
pub const Q: usize = 1;
pub const LAMBDA: usize = 2;
pub const RHO: usize = 3;
pub const H: usize = 4;
pub const S: usize = 5;

#[derive(Debug, Error)]
pub enum EncodingError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Fraisse(#[from] FraisseError),
    #[error("R_{n} would have arity {arity} > {n}")]
    ArityTooLarge { n: usize, arity: usize },
    #[error("index {0} is used twice")]
    DuplicateIndex(usize),
    #[error("no relation R_{0} in the inner signature")]
    UnknownIndex(usize),
    #[error("structure is not over the expected signature")]
    SignatureMismatch,
}

/// The fixed language `P, Q, λ, ρ` (unary), `H` (binary), `S` (4-ary).
pub fn enc_signature() -> Arc<Signature> {
    let symbols = [("P", 1), ("Q", 1), ("lambda", 1), ("rho", 1), ("H", 2), ("S", 4)];
    Arc::new(Signature::new(symbols.iter().map(|&(n, a)| Symbol::new(n, a)).collect()).expect("valid"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerSymbol {
    /// Index `n`; an `n`-pair has `n` cycle elements.
    pub n: usize,
    /// `l(n) <= n`.
    pub arity: usize,
    /// Position of the symbol this one was padded from.
    pub source: usize,
}

/// Relation symbols `R_n` of arity `l(n) <= n`, sorted by `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<InnerSymbol>", into = "Vec<InnerSymbol>")]
pub struct GradedInnerSignature {
    symbols: Vec<InnerSymbol>,
    #[serde(skip)]
    signature: Arc<Signature>,
}

impl GradedInnerSignature {
    pub fn new(mut symbols: Vec<InnerSymbol>) -> Result<Self, EncodingError> {
        symbols.sort_by_key(|s| s.n);
        for pair in symbols.windows(2) {
            if pair[0].n == pair[1].n {
                return Err(EncodingError::DuplicateIndex(pair[0].n));
            }
        }
        for s in &symbols {
            if s.arity == 0 || s.arity > s.n {
                return Err(EncodingError::ArityTooLarge { n: s.n, arity: s.arity });
            }
        }
        let signature = Arc::new(Signature::new(
            symbols.iter().map(|s| Symbol::new(format!("R_{}", s.n), s.arity)).collect(),
        )?);
        Ok(GradedInnerSignature { symbols, signature })
    }

    /// Pads arities in order, each taking the smallest unused `n >= arity`.
    pub fn from_arities(arities: &[usize]) -> Result<Self, EncodingError> {
        let mut used: Vec<usize> = Vec::new();
        let mut symbols = Vec::new();
        for (source, &arity) in arities.iter().enumerate() {
            let n = (arity.max(1)..).find(|n| !used.contains(n)).expect("unbounded");
            used.push(n);
            symbols.push(InnerSymbol { n, arity, source });
        }
        Self::new(symbols)
    }

    pub fn symbols(&self) -> &[InnerSymbol] {
        &self.symbols
    }

    pub fn signature(&self) -> Arc<Signature> {
        Arc::clone(&self.signature)
    }

    /// Position of `R_n`.
    pub fn index_of(&self, n: usize) -> Option<usize> {
        self.symbols.iter().position(|s| s.n == n)
    }

    /// Rewrites a structure over the raw signature this one was padded from.
    pub fn translate(&self, raw: &FinStructure) -> Result<FinStructure, EncodingError> {
        let mut out = FinStructure::new(self.signature(), raw.size());
        for (k, s) in self.symbols.iter().enumerate() {
            if s.source >= raw.signature().len() || raw.signature().arity(s.source) != s.arity {
                return Err(EncodingError::SignatureMismatch);
            }
            for t in raw.relation(s.source) {
                out.insert(k, t.clone())?;
            }
        }
        Ok(out)
    }

    /// Inverse of [`translate`](Self::translate) onto the raw signature `raw`.
    pub fn untranslate(&self, s: &FinStructure, raw: &Arc<Signature>) -> Result<FinStructure, EncodingError> {
        if *s.signature() != *self.signature {
            return Err(EncodingError::SignatureMismatch);
        }
        let mut out = FinStructure::new(Arc::clone(raw), s.size());
        for (k, sym) in self.symbols.iter().enumerate() {
            if sym.source >= raw.len() || raw.arity(sym.source) != sym.arity {
                return Err(EncodingError::SignatureMismatch);
            }
            for t in s.relation(k) {
                out.insert(sym.source, t.clone())?;
            }
        }
        Ok(out)
    }
}

/// A class over a raw signature, read through its padded signature.
pub struct PaddedClass<O> {
    oracle: O,
    inner: GradedInnerSignature,
}

impl<O: ClassOracle> PaddedClass<O> {
    pub fn new(oracle: O) -> Result<Self, EncodingError> {
        let inner = pad_signature(&oracle.signature())?;
        Ok(PaddedClass { oracle, inner })
    }

    pub fn inner(&self) -> &GradedInnerSignature {
        &self.inner
    }

    pub fn raw(&self) -> &O {
        &self.oracle
    }

    fn down(&self, s: &FinStructure) -> Result<FinStructure, EncodingError> {
        self.inner.untranslate(s, &self.oracle.signature())
    }
}

impl<O: ClassOracle> ClassOracle for PaddedClass<O> {
    fn name(&self) -> String {
        format!("padded {}", self.oracle.name())
    }

    fn signature(&self) -> Arc<Signature> {
        self.inner.signature()
    }

    fn is_member(&self, s: &FinStructure) -> bool {
        self.down(s).is_ok_and(|r| self.oracle.is_member(&r))
    }

    fn amalgamate(
        &self,
        a: &FinStructure,
        b: &FinStructure,
        f: &PartialMap,
        c: &FinStructure,
        g: &PartialMap,
    ) -> Result<Amalgam, FraisseError> {
        let down = |s: &FinStructure| self.down(s).map_err(|e| FraisseError::Precondition(e.to_string()));
        let am = self.oracle.amalgamate(&down(a)?, &down(b)?, f, &down(c)?, g)?;
        let structure = self
            .inner
            .translate(&am.structure)
            .map_err(|e| FraisseError::Precondition(e.to_string()))?;
        Ok(Amalgam { structure, ..am })
    }
}

impl TryFrom<Vec<InnerSymbol>> for GradedInnerSignature {
    type Error = EncodingError;

    fn try_from(symbols: Vec<InnerSymbol>) -> Result<Self, Self::Error> {
        Self::new(symbols)
    }
}

impl From<GradedInnerSignature> for Vec<InnerSymbol> {
    fn from(s: GradedInnerSignature) -> Self {
        s.symbols
    }
}

/// Re-indexes the symbols of `raw` as `R_n` with `n >= arity`, assigning the
/// smallest unused admissible `n` in input order.
pub fn pad_signature(raw: &Signature) -> Result<GradedInnerSignature, EncodingError> {
    let arities: Vec<usize> = (0..raw.len()).map(|k| raw.arity(k)).collect();
    GradedInnerSignature::from_arities(&arities)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns(g: &GradedInnerSignature) -> Vec<(usize, usize, usize)> {
        g.symbols().iter().map(|s| (s.n, s.arity, s.source)).collect()
    }

    #[test]
    fn one_binary_symbol() {
        let raw = Signature::new(vec![Symbol::new("E", 2)]).unwrap();
        assert_eq!(ns(&pad_signature(&raw).unwrap()), vec![(2, 2, 0)]);
    }

    #[test]
    fn two_binary_symbols() {
        let g = GradedInnerSignature::from_arities(&[2, 2]).unwrap();
        assert_eq!(ns(&g), vec![(2, 2, 0), (3, 2, 1)]);
        assert_eq!(g.signature().name(1), "R_3");
    }

    #[test]
    fn two_unary_symbols() {
        let g = GradedInnerSignature::from_arities(&[1, 1]).unwrap();
        assert_eq!(ns(&g), vec![(1, 1, 0), (2, 1, 1)]);
    }

    #[test]
    fn later_small_arity_fills_a_gap() {
        let g = GradedInnerSignature::from_arities(&[2, 1]).unwrap();
        assert_eq!(ns(&g), vec![(1, 1, 1), (2, 2, 0)]);
    }

    #[test]
    fn arity_above_index_is_rejected() {
        let bad = GradedInnerSignature::new(vec![InnerSymbol { n: 1, arity: 2, source: 0 }]);
        assert!(matches!(bad, Err(EncodingError::ArityTooLarge { .. })));
    }

    #[test]
    fn translation_and_json() {
        let raw_sig = Arc::new(Signature::new(vec![Symbol::new("E", 2), Symbol::new("U", 1)]).unwrap());
        let g = pad_signature(&raw_sig).unwrap();
        let mut raw = FinStructure::new(raw_sig, 2);
        raw.insert(0, vec![0, 1]).unwrap();
        raw.insert(1, vec![1]).unwrap();
        let t = g.translate(&raw).unwrap();
        assert!(t.holds_named("R_1", &[1]));
        assert!(t.holds_named("R_2", &[0, 1]));
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<GradedInnerSignature>(&json).unwrap(), g);
    }
}
