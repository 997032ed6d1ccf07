//! Fraïssé classes: bounded axiom checks, saturated finite approximations of
//! the limit, and back-and-forth extension of partial isomorphisms.

mod axioms;
mod backforth;
mod enumerate;
mod limit;
mod oracles;

use std::sync::Arc;

use thiserror::Error;

use crate::structures::{
    free_amalgam, Amalgam, FingerprintDiff, FinStructure, PartialMap, Signature, StructureError, Tuple,
};

pub use axioms::{check_ap, check_hp, check_jep, search_amalgam, Axiom, AxiomReport, Counterexample};
pub use backforth::{extend_along, extend_partial_iso, BackAndForthCertificate, BnfStep, Direction, Target};
pub use enumerate::{
    canonical_form, canonical_form_over, extensions_up_to_iso, generic_structures_over, members_up_to_iso,
    DEFAULT_ENUM_CAP,
};
pub use limit::{age_types, count_orbits, saturate, type_census, LimitApprox, LogEvent, OrbitCount};
pub use oracles::{FreeClass, LinearOrders, NoIsolatedVertex, RandomGraph};

#[derive(Debug, Error)]
pub enum FraisseError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    Resource { what: String, needed: u128, cap: u128 },
    #[error("{class}: amalgam rejected ({reason}); certificate: {certificate}")]
    InvalidAmalgam {
        class: String,
        reason: String,
        certificate: String,
    },
    #[error("{class}: not a member: {structure}")]
    NotMember { class: String, structure: String },
    #[error("spans have different types: {diff:?}")]
    TypeMismatch { diff: FingerprintDiff },
    #[error("insufficient saturation: {before} orbits before the extra round, {after} after")]
    InsufficientSaturation { before: usize, after: usize },
    #[error("approximation saturated to base size {have}, need at least {need}")]
    BaseTooSmall { have: usize, need: usize },
    #[error("{0}")]
    Precondition(String),
}

/// A class of finite structures presented by membership, an amalgamation
/// strategy and an extension enumerator.
pub trait ClassOracle: Send + Sync {
    fn name(&self) -> String;

    fn signature(&self) -> Arc<Signature>;

    fn is_member(&self, s: &FinStructure) -> bool;

    /// Membership of the substructure induced on `elements`.
    fn is_member_on(&self, s: &FinStructure, elements: &[usize]) -> bool {
        self.is_member(&s.induced(elements))
    }

    /// Whether `tuple` may ever hold in `symbol` in some member. Tuples that are
    /// never admissible are skipped by the generic enumerators.
    fn admissible(&self, _symbol: usize, _tuple: &[usize]) -> bool {
        true
    }

    /// Whether a structure is a member as soon as its restriction to the
    /// support of every admissible tuple is. Blind searches then skip
    /// whole-prefix membership checks.
    fn support_local(&self) -> bool {
        false
    }

    /// Amalgam of `b` and `c` over `a`. The result need not keep `b` as a prefix;
    /// callers normalise it.
    fn amalgamate(
        &self,
        a: &FinStructure,
        b: &FinStructure,
        f: &PartialMap,
        c: &FinStructure,
        g: &PartialMap,
    ) -> Result<Amalgam, FraisseError> {
        Ok(free_amalgam(a, b, f, c, g)?)
    }

    /// Every member of size `base.size() + extra` whose substructure on the
    /// first `base.size()` elements is `base`, not reduced up to isomorphism.
    fn structures_over(&self, base: &FinStructure, extra: usize, cap: usize) -> Result<Vec<FinStructure>, FraisseError> {
        generic_structures_over(self, base, extra, cap)
    }

    /// One-point extensions of `base`; the new element is `base.size()`.
    fn one_point_extensions(&self, base: &FinStructure) -> Result<Vec<FinStructure>, FraisseError> {
        self.structures_over(base, 1, DEFAULT_ENUM_CAP)
    }
}

/// Amalgamates through the oracle, checks the result, and relabels it so that
/// `b` sits on the first `b.size()` elements with the identity as left map.
pub fn checked_amalgam(
    oracle: &dyn ClassOracle,
    a: &FinStructure,
    b: &FinStructure,
    f: &PartialMap,
    c: &FinStructure,
    g: &PartialMap,
) -> Result<Amalgam, FraisseError> {
    let am = oracle.amalgamate(a, b, f, c, g)?;
    let reject = |reason: String| FraisseError::InvalidAmalgam {
        class: oracle.name(),
        reason,
        certificate: serde_json::json!({
            "a": a, "b": b, "f": f, "c": c, "g": g, "amalgam": &am
        })
        .to_string(),
    };
    if !oracle.is_member(&am.structure) {
        return Err(reject("amalgam is not a member".into()));
    }
    if let Err(d) = crate::structures::check_embedding(&am.left, b, &am.structure) {
        return Err(reject(format!("left map: {d:?}")));
    }
    if let Err(d) = crate::structures::check_embedding(&am.right, c, &am.structure) {
        return Err(reject(format!("right map: {d:?}")));
    }
    for x in 0..a.size() {
        let via_b = f.get(x).and_then(|y| am.left.get(y));
        let via_c = g.get(x).and_then(|y| am.right.get(y));
        if via_b != via_c {
            return Err(reject(format!("square does not commute at {x}")));
        }
    }
    Ok(normalize_left(am, b.size()))
}

fn normalize_left(am: Amalgam, b_size: usize) -> Amalgam {
    if am.left.is_identity() && am.left.len() == b_size {
        return am;
    }
    let n = am.structure.size();
    let mut order: Vec<usize> = (0..b_size).map(|x| am.left.get(x).expect("total")).collect();
    let used = am.left.image_set();
    order.extend((0..n).filter(|e| !used.contains(e)));
    let mut map = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        map[old] = new;
    }
    let relabel = |m: &PartialMap| PartialMap::from_pairs(m.pairs().map(|(x, y)| (x, map[y]))).expect("bijection");
    Amalgam {
        structure: am.structure.relabel(&map, n),
        left: relabel(&am.left),
        right: relabel(&am.right),
    }
}

/// Admissible tuples of `symbol` over `0..n` that touch at least one element `>= from`.
pub(crate) fn new_tuples(oracle: &(impl ClassOracle + ?Sized), symbol: usize, arity: usize, n: usize, from: usize) -> Vec<Tuple> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut t = vec![0; arity];
    loop {
        if t.iter().any(|&e| e >= from) && oracle.admissible(symbol, &t) {
            out.push(t.clone());
        }
        let mut p = arity;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            t[p] += 1;
            if t[p] < n {
                break;
            }
            t[p] = 0;
        }
    }
}
