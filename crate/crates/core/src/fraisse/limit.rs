use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{checked_amalgam, members_up_to_iso, ClassOracle, FraisseError};
use crate::structures::{qf_type, FinStructure, PartialMap, TypeFingerprint};

/// One step of the construction: glue `extension` onto the current structure,
/// identifying its first `base.len()` elements with `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum LogEvent {
    Amalgamate { base: Vec<usize>, extension: FinStructure },
}

/// A finite approximation of the limit of a class, with its construction log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitApprox {
    pub current: FinStructure,
    pub log: Vec<LogEvent>,
    pub fulfilled: BTreeSet<(TypeFingerprint, TypeFingerprint)>,
    /// Largest base size any saturation round has used.
    pub base_size: usize,
}

impl LimitApprox {
    pub fn new(oracle: &dyn ClassOracle) -> Self {
        LimitApprox {
            current: FinStructure::new(oracle.signature(), 0),
            log: Vec::new(),
            fulfilled: BTreeSet::new(),
            base_size: 0,
        }
    }

    pub fn from_seed(oracle: &dyn ClassOracle, seed: &FinStructure) -> Result<Self, FraisseError> {
        let mut approx = LimitApprox::new(oracle);
        approx.glue(oracle, &[], seed)?;
        Ok(approx)
    }

    pub fn size(&self) -> usize {
        self.current.size()
    }

    /// Applies and logs an amalgamation event; returns where the extension's
    /// elements ended up.
    pub fn glue(&mut self, oracle: &dyn ClassOracle, base: &[usize], extension: &FinStructure) -> Result<PartialMap, FraisseError> {
        let event = LogEvent::Amalgamate {
            base: base.to_vec(),
            extension: extension.clone(),
        };
        let (next, right) = apply(oracle, &self.current, &event)?;
        self.current = next;
        self.log.push(event);
        Ok(right)
    }

    /// Rebuilds the structure from the empty one by re-running the log.
    pub fn replay(oracle: &dyn ClassOracle, log: &[LogEvent]) -> Result<FinStructure, FraisseError> {
        let mut s = FinStructure::new(oracle.signature(), 0);
        for event in log {
            s = apply(oracle, &s, event)?.0;
        }
        Ok(s)
    }

    pub fn replays(&self, oracle: &dyn ClassOracle) -> Result<bool, FraisseError> {
        Ok(LimitApprox::replay(oracle, &self.log)? == self.current)
    }
}

fn apply(oracle: &dyn ClassOracle, current: &FinStructure, event: &LogEvent) -> Result<(FinStructure, PartialMap), FraisseError> {
    let LogEvent::Amalgamate { base, extension } = event;
    if let Some(&bad) = base.iter().find(|&&e| e >= current.size()) {
        return Err(FraisseError::Precondition(format!(
            "base element {bad} outside structure of size {}",
            current.size()
        )));
    }
    if !oracle.is_member(extension) {
        return Err(FraisseError::NotMember {
            class: oracle.name(),
            structure: extension.to_json(),
        });
    }
    let m = base.len();
    let a = current.induced(base);
    let f = PartialMap::from_images(base)?;
    let g = PartialMap::identity(m);
    let am = checked_amalgam(oracle, &a, current, &f, extension, &g)?;
    Ok((am.structure, am.right))
}

/// Adds, round by round, a realisation of every one-point extension of every
/// substructure of size at most `k` present at the start of the round.
/// Requests are keyed by type, so each is served once.
pub fn saturate(oracle: &dyn ClassOracle, approx: &mut LimitApprox, k: usize, rounds: usize) -> Result<(), FraisseError> {
    if !oracle.is_member(&approx.current) {
        return Err(FraisseError::NotMember {
            class: oracle.name(),
            structure: approx.current.to_json(),
        });
    }
    if rounds > 0 {
        approx.base_size = approx.base_size.max(k);
    }
    let mut extension_cache: BTreeMap<TypeFingerprint, Vec<(TypeFingerprint, FinStructure)>> = BTreeMap::new();
    for _ in 0..rounds {
        let n = approx.size();
        for size in 0..=k.min(n) {
            for base in (0..n).combinations(size) {
                let base_fp = qf_type(&approx.current, &base)?;
                if !extension_cache.contains_key(&base_fp) {
                    let exts = oracle
                        .one_point_extensions(&approx.current.induced(&base))?
                        .into_iter()
                        .map(|e| {
                            let all: Vec<usize> = (0..e.size()).collect();
                            Ok((qf_type(&e, &all)?, e))
                        })
                        .collect::<Result<Vec<_>, FraisseError>>()?;
                    extension_cache.insert(base_fp.clone(), exts);
                }
                for (ext_fp, ext) in &extension_cache[&base_fp] {
                    let key = (base_fp.clone(), ext_fp.clone());
                    if approx.fulfilled.contains(&key) {
                        continue;
                    }
                    if !realized_over(&approx.current, &base, ext_fp)? {
                        approx.glue(oracle, &base, ext)?;
                    }
                    approx.fulfilled.insert(key);
                }
            }
        }
    }
    Ok(())
}

fn realized_over(s: &FinStructure, base: &[usize], ext_fp: &TypeFingerprint) -> Result<bool, FraisseError> {
    let mut t = base.to_vec();
    t.push(0);
    for y in 0..s.size() {
        if base.contains(&y) {
            continue;
        }
        *t.last_mut().expect("nonempty") = y;
        if qf_type(s, &t)? == *ext_fp {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Distinct types of `k`-tuples with their lexicographically first representatives.
pub fn type_census(s: &FinStructure, k: usize) -> Result<BTreeMap<TypeFingerprint, Vec<usize>>, FraisseError> {
    let mut seen = BTreeMap::new();
    for t in (0..k).map(|_| 0..s.size()).multi_cartesian_product() {
        let fp = qf_type(s, &t)?;
        seen.entry(fp).or_insert(t);
    }
    if k == 0 {
        seen.insert(qf_type(s, &[])?, Vec::new());
    }
    Ok(seen)
}

/// Types of `k`-tuples read off the age alone: every member with at most `k`
/// elements, every `k`-tuple listing all of its elements. In a homogeneous
/// limit these are exactly the orbits on `k`-tuples.
pub fn age_types(oracle: &dyn ClassOracle, k: usize, cap: usize) -> Result<BTreeSet<TypeFingerprint>, FraisseError> {
    let mut out = BTreeSet::new();
    for m in 0..=k {
        for member in members_up_to_iso(oracle, m, cap)? {
            for t in (0..k).map(|_| 0..m).multi_cartesian_product() {
                if (0..m).all(|x| t.contains(&x)) {
                    out.insert(qf_type(&member, &t)?);
                }
            }
            if k == 0 {
                out.insert(qf_type(&member, &[])?);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCount {
    pub k: usize,
    pub count: usize,
    pub representatives: Vec<(TypeFingerprint, Vec<usize>)>,
    /// Size of the approximation after the extra stability round.
    pub checked_on: usize,
}

/// Number of orbits on `k`-tuples, read off as realised types, after checking
/// that one more saturation round does not change it.
pub fn count_orbits(oracle: &dyn ClassOracle, approx: &LimitApprox, k: usize) -> Result<OrbitCount, FraisseError> {
    if approx.base_size < k {
        return Err(FraisseError::BaseTooSmall {
            have: approx.base_size,
            need: k,
        });
    }
    let before = type_census(&approx.current, k)?;
    let mut probe = approx.clone();
    saturate(oracle, &mut probe, approx.base_size, 1)?;
    let after = type_census(&probe.current, k)?;
    if before.len() != after.len() {
        return Err(FraisseError::InsufficientSaturation {
            before: before.len(),
            after: after.len(),
        });
    }
    Ok(OrbitCount {
        k,
        count: before.len(),
        representatives: before.into_iter().collect(),
        checked_on: probe.size(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraisse::RandomGraph;

    #[test]
    fn zero_rounds_change_nothing() {
        let g = RandomGraph::new();
        let seed = RandomGraph::graph(2, &[(0, 1)]);
        let mut approx = LimitApprox::from_seed(&g, &seed).unwrap();
        let before = approx.clone();
        saturate(&g, &mut approx, 2, 0).unwrap();
        assert_eq!(approx, before);
    }

    #[test]
    fn seed_vertex_gets_neighbour_and_non_neighbour() {
        let g = RandomGraph::new();
        let mut approx = LimitApprox::from_seed(&g, &RandomGraph::graph(1, &[])).unwrap();
        saturate(&g, &mut approx, 1, 1).unwrap();
        let s = &approx.current;
        assert!((1..s.size()).any(|y| s.holds(0, &[0, y])));
        assert!((1..s.size()).any(|y| !s.holds(0, &[0, y])));
        assert!(approx.replays(&g).unwrap());
    }

    #[test]
    fn age_types_of_the_random_graph() {
        let g = RandomGraph::new();
        let counts: Vec<usize> = (1..=3).map(|k| age_types(&g, k, 1 << 16).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 3, 15]);
    }

    #[test]
    fn saturation_is_idempotent_on_fulfilled_requests() {
        let g = RandomGraph::new();
        let mut approx = LimitApprox::new(&g);
        saturate(&g, &mut approx, 1, 3).unwrap();
        let size = approx.size();
        let mut again = approx.clone();
        // all requests of every type already present were served
        saturate(&g, &mut again, 1, 1).unwrap();
        assert_eq!(again.size(), size);
    }

    #[test]
    fn orbit_count_needs_enough_base() {
        let g = RandomGraph::new();
        let approx = LimitApprox::new(&g);
        assert!(matches!(count_orbits(&g, &approx, 2), Err(FraisseError::BaseTooSmall { .. })));
    }

    #[test]
    fn random_graph_orbits() {
        let g = RandomGraph::new();
        let mut approx = LimitApprox::new(&g);
        saturate(&g, &mut approx, 2, 3).unwrap();
        assert_eq!(count_orbits(&g, &approx, 1).unwrap().count, 1);
        assert_eq!(count_orbits(&g, &approx, 2).unwrap().count, 3);
    }
}
