//! Quantifier-free types of tuples.
//!
//! A fingerprint records the equality pattern of a tuple (class indices in
//! order of first occurrence) and, for every symbol of arity `r`, one bit per
//! word in `classes^r` (lexicographic order) telling whether the relation holds
//! on the corresponding elements. Two tuples get equal fingerprints exactly when
//! mapping one onto the other position by position is a partial isomorphism.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FinStructure, StructureError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct TypeFingerprint {
    pattern: Vec<u8>,
    bits: Vec<Vec<bool>>,
}

/// The first place two fingerprints disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FingerprintDiff {
    Length { left: usize, right: usize },
    Pattern { position: usize, left: u8, right: u8 },
    Bit { symbol: usize, word: Vec<u8>, left: bool, right: bool },
}

impl TypeFingerprint {
    pub fn pattern(&self) -> &[u8] {
        &self.pattern
    }

    pub fn classes(&self) -> usize {
        self.pattern.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    pub fn symbol_bits(&self, symbol: usize) -> &[bool] {
        &self.bits[symbol]
    }

    /// Whether the relation `symbol` holds on the given word of class indices.
    pub fn holds(&self, symbol: usize, word: &[u8]) -> bool {
        self.bits[symbol][word_index(word, self.classes())]
    }

    /// Fingerprint of the tuple `u` with `u[i] = t[order[i]]`, where `t` is the
    /// tuple this fingerprint was computed from. `order` must be a permutation.
    pub fn permuted(&self, order: &[usize]) -> TypeFingerprint {
        assert_eq!(order.len(), self.pattern.len(), "order must permute the positions");
        let classes = self.classes();
        let mut old_to_new = vec![u8::MAX; classes];
        let mut new_to_old = Vec::with_capacity(classes);
        let mut pattern = Vec::with_capacity(order.len());
        for &p in order {
            let old = self.pattern[p];
            if old_to_new[old as usize] == u8::MAX {
                old_to_new[old as usize] = new_to_old.len() as u8;
                new_to_old.push(old);
            }
            pattern.push(old_to_new[old as usize]);
        }
        let bits = self
            .bits
            .iter()
            .map(|symbol_bits| {
                let arity = arity_from_len(symbol_bits.len(), classes);
                words(arity, classes)
                    .map(|w| {
                        let old: Vec<u8> = w.iter().map(|&c| new_to_old[c as usize]).collect();
                        symbol_bits[word_index(&old, classes)]
                    })
                    .collect()
            })
            .collect();
        TypeFingerprint { pattern, bits }
    }

    pub fn first_difference(&self, other: &TypeFingerprint) -> Option<FingerprintDiff> {
        if self.pattern.len() != other.pattern.len() {
            return Some(FingerprintDiff::Length {
                left: self.pattern.len(),
                right: other.pattern.len(),
            });
        }
        for (position, (&l, &r)) in self.pattern.iter().zip(&other.pattern).enumerate() {
            if l != r {
                return Some(FingerprintDiff::Pattern { position, left: l, right: r });
            }
        }
        let classes = self.classes();
        for (symbol, (lb, rb)) in self.bits.iter().zip(&other.bits).enumerate() {
            let arity = arity_from_len(lb.len(), classes);
            for (w, (&l, &r)) in words(arity, classes).zip(lb.iter().zip(rb)) {
                if l != r {
                    return Some(FingerprintDiff::Bit { symbol, word: w, left: l, right: r });
                }
            }
        }
        None
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TypeFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.pattern.iter().any(|&c| c >= 9);
        for (i, &c) in self.pattern.iter().enumerate() {
            if wide && i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", c as usize + 1)?;
        }
        for symbol_bits in &self.bits {
            write!(f, "|")?;
            for &b in symbol_bits {
                write!(f, "{}", if b { '1' } else { '0' })?;
            }
        }
        Ok(())
    }
}

impl From<TypeFingerprint> for String {
    fn from(t: TypeFingerprint) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for TypeFingerprint {
    type Error = String;

    fn try_from(text: String) -> Result<Self, Self::Error> {
        let mut parts = text.split('|');
        let head = parts.next().unwrap_or_default();
        let pattern: Option<Vec<u8>> = if head.contains('.') {
            head.split('.')
                .map(|c| c.parse::<u8>().ok().and_then(|v| v.checked_sub(1)))
                .collect()
        } else {
            head.chars()
                .map(|c| c.to_digit(10).and_then(|d| (d as u8).checked_sub(1)))
                .collect()
        };
        let pattern = pattern.ok_or_else(|| format!("bad fingerprint pattern {head:?}"))?;
        let bits = parts
            .map(|p| {
                p.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(format!("bad fingerprint bit {other:?}")),
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<bool>>, String>>()?;
        Ok(TypeFingerprint { pattern, bits })
    }
}

fn word_index(word: &[u8], classes: usize) -> usize {
    word.iter().fold(0, |acc, &c| acc * classes + c as usize)
}

fn arity_from_len(len: usize, classes: usize) -> usize {
    if classes <= 1 {
        // With one class every arity yields a single word; a zero-class tuple has none.
        return usize::from(len > 0);
    }
    let mut arity = 0;
    let mut n = 1;
    while n < len {
        n *= classes;
        arity += 1;
    }
    arity
}

/// All words of the given length over `0..classes`, lexicographically.
fn words(arity: usize, classes: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = classes.checked_pow(arity as u32).unwrap_or(0);
    (0..total).map(move |mut idx| {
        let mut w = vec![0u8; arity];
        for slot in w.iter_mut().rev() {
            *slot = (idx % classes) as u8;
            idx /= classes;
        }
        w
    })
}

/// Quantifier-free type of `tuple` in `s`.
pub fn qf_type(s: &FinStructure, tuple: &[usize]) -> Result<TypeFingerprint, StructureError> {
    if let Some(&bad) = tuple.iter().find(|&&e| e >= s.size()) {
        return Err(StructureError::OutOfRange {
            element: bad,
            size: s.size(),
        });
    }
    let mut span: Vec<usize> = Vec::new();
    let mut pattern = Vec::with_capacity(tuple.len());
    for &e in tuple {
        let class = match span.iter().position(|&x| x == e) {
            Some(c) => c,
            None => {
                span.push(e);
                span.len() - 1
            }
        };
        pattern.push(class as u8);
    }
    let classes = span.len();
    let sig = s.signature();
    let bits = (0..sig.len())
        .map(|k| {
            let arity = sig.arity(k);
            let rel = s.relation(k);
            if classes == 0 {
                return Vec::new();
            }
            if rel.is_empty() {
                return vec![false; classes.pow(arity as u32)];
            }
            words(arity, classes)
                .map(|w| {
                    let t: Vec<usize> = w.iter().map(|&c| span[c as usize]).collect();
                    rel.contains(&t)
                })
                .collect()
        })
        .collect();
    Ok(TypeFingerprint { pattern, bits })
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

    #[test]
    fn repeated_entry_has_single_class() {
        let g = graph(2, &[(0, 1)]);
        let t = qf_type(&g, &[1, 1]).unwrap();
        assert_eq!(t.pattern(), &[0, 0]);
        assert_eq!(t.symbol_bits(0), &[false]);
        assert_eq!(t.to_string(), "11|0");
    }

    #[test]
    fn edge_bits_in_both_directions() {
        let g = graph(2, &[(0, 1)]);
        let t = qf_type(&g, &[0, 1]).unwrap();
        assert_eq!(t.pattern(), &[0, 1]);
        // words 00, 01, 10, 11
        assert_eq!(t.symbol_bits(0), &[false, true, true, false]);
    }

    #[test]
    fn out_of_range_entry() {
        assert!(qf_type(&graph(2, &[]), &[0, 2]).is_err());
    }

    #[test]
    fn string_form_round_trips() {
        let g = graph(3, &[(0, 1)]);
        let t = qf_type(&g, &[2, 0, 1, 0]).unwrap();
        let back = TypeFingerprint::try_from(t.to_string()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn permuted_matches_direct_computation() {
        let sig = Arc::new(Signature::new(vec![Symbol::new("R", 2), Symbol::new("U", 1)]).unwrap());
        let s = FinStructure::from_tuples(sig, 3, [(0, vec![0, 1]), (0, vec![2, 2]), (1, vec![1])]).unwrap();
        let t = [0, 1, 2, 1];
        let base = qf_type(&s, &t).unwrap();
        let order = [3, 2, 0, 1];
        let u: Vec<usize> = order.iter().map(|&p| t[p]).collect();
        assert_eq!(base.permuted(&order), qf_type(&s, &u).unwrap());
    }

    #[test]
    fn difference_names_the_bit() {
        let g = graph(3, &[(0, 1)]);
        let a = qf_type(&g, &[0, 1]).unwrap();
        let b = qf_type(&g, &[0, 2]).unwrap();
        assert_eq!(
            a.first_difference(&b),
            Some(FingerprintDiff::Bit { symbol: 0, word: vec![0, 1], left: true, right: false })
        );
        assert_eq!(a.first_difference(&a), None);
    }
}
