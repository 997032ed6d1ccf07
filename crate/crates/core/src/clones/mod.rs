//! Operations on a finite domain `{0, ..., d-1}`: essential coordinates,
//! clones generated by monoids of unary maps, polymorphisms of relational
//! structures, and checks that a map between clones respects composition.
//!
//! Coordinates are numbered from 0. An operation's table lists values in
//! lexicographic order of the arguments, the first argument most significant.

mod hom;
mod monoid;
mod poly;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hom::{check_clone_homomorphism, HomReport, HomViolation};
pub use monoid::{extend_monoid_iso, CloneHandle, CloneIso, FunctionMonoid};
pub use poly::{polymorphisms, r_gadget, DEFAULT_POLY_CAP};

#[derive(Debug, Error)]
pub enum CloneError {
    #[error("invalid operation: {0}")]
    InvalidOperation(String),
    #[error("invalid coordinate map {positions:?} into arity {arity}")]
    InvalidInjection { positions: Vec<usize>, arity: usize },
    #[error("{candidates} candidate operations exceed the cap {cap}")]
    TooMany { candidates: u128, cap: u128 },
    #[error("not a monoid: {0}")]
    NotMonoid(String),
    #[error("not a monoid isomorphism: {0}")]
    NotIsomorphism(String),
    #[error("constant {constant:?} and non-constant {image:?} are matched")]
    ConstantsNotPreserved { constant: FinOperation, image: FinOperation },
    #[error("map undefined on {0:?}")]
    Undefined(FinOperation),
}

/// A total operation `{0..d}^arity -> {0..d}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "OpDoc", into = "OpDoc")]
pub struct FinOperation {
    d: usize,
    arity: usize,
    table: Vec<usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct OpDoc {
    d: usize,
    arity: usize,
    table: Vec<usize>,
}

impl TryFrom<OpDoc> for FinOperation {
    type Error = CloneError;

    fn try_from(doc: OpDoc) -> Result<Self, Self::Error> {
        FinOperation::new(doc.d, doc.arity, doc.table)
    }
}

impl From<FinOperation> for OpDoc {
    fn from(f: FinOperation) -> Self {
        OpDoc {
            d: f.d,
            arity: f.arity,
            table: f.table,
        }
    }
}

impl FinOperation {
    pub fn new(d: usize, arity: usize, table: Vec<usize>) -> Result<Self, CloneError> {
        let expected = d.checked_pow(arity as u32).ok_or_else(|| CloneError::InvalidOperation("table too large".into()))?;
        if d == 0 || table.len() != expected {
            return Err(CloneError::InvalidOperation(format!(
                "table of length {} for d = {d}, arity {arity}",
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|&&v| v >= d) {
            return Err(CloneError::InvalidOperation(format!("value {v} outside 0..{d}")));
        }
        Ok(FinOperation { d, arity, table })
    }

    pub fn from_fn(d: usize, arity: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let table = (0..d.pow(arity as u32)).map(|i| f(&decode(d, arity, i))).collect();
        FinOperation::new(d, arity, table).expect("values in range")
    }

    pub fn projection(d: usize, arity: usize, i: usize) -> Self {
        Self::from_fn(d, arity, |x| x[i])
    }

    pub fn constant(d: usize, arity: usize, c: usize) -> Self {
        Self::from_fn(d, arity, |_| c)
    }

    /// A unary map from its list of values.
    pub fn unary(d: usize, values: &[usize]) -> Result<Self, CloneError> {
        Self::new(d, 1, values.to_vec())
    }

    pub fn domain(&self) -> usize {
        self.d
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn eval(&self, args: &[usize]) -> usize {
        self.table[encode(self.d, args)]
    }

    pub fn is_projection(&self) -> Option<usize> {
        (0..self.arity).find(|&i| *self == Self::projection(self.d, self.arity, i))
    }

    pub fn is_constant(&self) -> Option<usize> {
        let first = *self.table.first()?;
        self.table.iter().all(|&v| v == first).then_some(first)
    }

    /// `self(g_1, ..., g_n)`, all `g_i` of one arity.
    pub fn compose(&self, gs: &[FinOperation]) -> Result<FinOperation, CloneError> {
        if gs.len() != self.arity {
            return Err(CloneError::InvalidOperation(format!("{} inner operations for arity {}", gs.len(), self.arity)));
        }
        let m = gs.first().map_or(0, |g| g.arity);
        if gs.iter().any(|g| g.arity != m || g.d != self.d) {
            return Err(CloneError::InvalidOperation("inner operations differ in arity or domain".into()));
        }
        let table = (0..self.d.pow(m as u32))
            .map(|i| {
                let args: Vec<usize> = gs.iter().map(|g| g.table[i]).collect();
                self.eval(&args)
            })
            .collect();
        FinOperation::new(self.d, m, table)
    }

    /// Coordinates `i` such that two arguments differing only at `i` can give
    /// different values.
    pub fn essential_coordinates(&self) -> Vec<usize> {
        let d = self.d;
        (0..self.arity)
            .filter(|&i| {
                let stride = d.pow((self.arity - 1 - i) as u32);
                (0..self.table.len()).any(|idx| {
                    let digit = idx / stride % d;
                    digit + 1 < d && self.table[idx] != self.table[idx + stride]
                })
            })
            .collect()
    }

    /// The unary map `x ↦ self(x, ..., x)` restricted to the one essential
    /// coordinate; `None` unless essentially unary.
    pub fn unary_core(&self) -> Option<FinOperation> {
        let ess = self.essential_coordinates();
        if ess.len() > 1 {
            return None;
        }
        Some(FinOperation::from_fn(self.d, 1, |x| self.eval(&vec![x[0]; self.arity])))
    }
}

/// `(true, coordinates)` when `f` depends on at most one coordinate.
pub fn is_essentially_unary(f: &FinOperation) -> (bool, Vec<usize>) {
    let ess = f.essential_coordinates();
    (ess.len() <= 1, ess)
}

/// `g(x_0, ..., x_{k-1}) = f(x_{p_0}, x_{p_1}, ...)` for an injection `p` of
/// the coordinates of `f` into `0..k`.
pub fn add_dummies(f: &FinOperation, k: usize, positions: &[usize]) -> Result<FinOperation, CloneError> {
    let injective = positions.iter().enumerate().all(|(i, p)| !positions[..i].contains(p));
    if positions.len() != f.arity || positions.iter().any(|&p| p >= k) || !injective {
        return Err(CloneError::InvalidInjection {
            positions: positions.to_vec(),
            arity: k,
        });
    }
    Ok(FinOperation::from_fn(f.d, k, |x| {
        let args: Vec<usize> = positions.iter().map(|&p| x[p]).collect();
        f.eval(&args)
    }))
}

fn decode(d: usize, arity: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

fn encode(d: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &x| acc * d + x)
}
