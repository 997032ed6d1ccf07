use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::StructureError;

/// A relation symbol with a fixed positive arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// An ordered list of relation symbols with unique names.
///
/// Graded families `prefix^n_i` (one `n`-ary symbol for every `1 <= i <= n <= N`)
/// are ordinary symbols whose names follow a fixed scheme; [`Signature::graded`]
/// builds them and [`Signature::grade_bound`] recovers `N`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, StructureError> {
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if s.arity == 0 {
                return Err(StructureError::ZeroArity(s.name.clone()));
            }
            if !seen.insert(s.name.as_str()) {
                return Err(StructureError::DuplicateSymbol(s.name.clone()));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    /// The graded family `prefix^n_i` for `1 <= i <= n <= bound`, ordered by `n` then `i`.
    pub fn graded(prefix: &str, bound: usize) -> Self {
        let mut symbols = Vec::new();
        for n in 1..=bound {
            for i in 1..=n {
                symbols.push(Symbol::new(graded_name(prefix, n, i), n));
            }
        }
        Signature { symbols }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity(&self, symbol: usize) -> usize {
        self.symbols[symbol].arity
    }

    pub fn name(&self, symbol: usize) -> &str {
        &self.symbols[symbol].name
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// Concatenation; fails on a name clash.
    pub fn union(&self, other: &Signature) -> Result<Signature, StructureError> {
        let mut symbols = self.symbols.clone();
        symbols.extend(other.symbols.iter().cloned());
        Signature::new(symbols)
    }

    /// Largest `N` such that this signature contains the complete family
    /// `prefix^n_i` for all `n <= N`, and every `prefix^` symbol belongs to it.
    pub fn grade_bound(&self, prefix: &str) -> Option<usize> {
        let mut graded: Vec<(usize, usize, usize)> = Vec::new();
        for s in &self.symbols {
            if let Some((n, i)) = parse_graded_name(prefix, &s.name) {
                graded.push((n, i, s.arity));
            }
        }
        if graded.is_empty() {
            return None;
        }
        let bound = graded.iter().map(|g| g.0).max()?;
        let expected = bound * (bound + 1) / 2;
        let complete = graded.len() == expected
            && graded.iter().all(|&(n, i, arity)| arity == n && i >= 1 && i <= n);
        complete.then_some(bound)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, s) in self.symbols.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}/{}", s.name, s.arity)?;
        }
        write!(f, "}}")
    }
}

pub fn graded_name(prefix: &str, n: usize, i: usize) -> String {
    format!("{prefix}^{n}_{i}")
}

/// Inverse of [`graded_name`].
pub fn parse_graded_name(prefix: &str, name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix(prefix)?.strip_prefix('^')?;
    let (n, i) = rest.split_once('_')?;
    Some((n.parse().ok()?, i.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_nullary() {
        let dup = Signature::new(vec![Symbol::new("E", 2), Symbol::new("E", 1)]);
        assert!(matches!(dup, Err(StructureError::DuplicateSymbol(_))));
        let zero = Signature::new(vec![Symbol::new("c", 0)]);
        assert!(matches!(zero, Err(StructureError::ZeroArity(_))));
    }

    #[test]
    fn graded_family_round_trips_its_bound() {
        let sig = Signature::graded("P", 3);
        assert_eq!(sig.len(), 6);
        assert_eq!(sig.grade_bound("P"), Some(3));
        assert_eq!(parse_graded_name("P", "P^3_2"), Some((3, 2)));
        assert_eq!(sig.index_of("P^2_2"), Some(2));

        let partial = Signature::new(vec![Symbol::new("P^2_1", 2)]).unwrap();
        assert_eq!(partial.grade_bound("P"), None);
    }
}
