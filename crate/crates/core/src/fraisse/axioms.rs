//! Exhaustive bounded checks of the hereditary, joint-embedding and
//! amalgamation properties.
//!
//! The amalgamation check runs the oracle's own strategy and, independently, a
//! blind search for some amalgam; the two verdicts are compared per instance.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{checked_amalgam, extensions_up_to_iso, members_up_to_iso, ClassOracle, FraisseError, DEFAULT_ENUM_CAP};
use crate::structures::{for_each_tuple, FinStructure, PartialMap, Tuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Hp,
    Jep,
    Ap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub a: Option<FinStructure>,
    pub b: FinStructure,
    pub c: Option<FinStructure>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub class: String,
    pub bound: usize,
    pub instances: usize,
    /// Instances where the oracle's amalgam was missing or invalid (for HP: failures).
    pub oracle_failures: usize,
    /// Instances where the blind search found nothing.
    pub search_failures: usize,
    /// Instances where the two verdicts differ.
    pub disagreements: usize,
    pub counterexample: Option<Counterexample>,
    pub pass: bool,
}

/// Every substructure of every member up to `bound` elements is a member.
pub fn check_hp(oracle: &dyn ClassOracle, bound: usize) -> Result<AxiomReport, FraisseError> {
    let mut instances = 0;
    let mut failures = 0;
    let mut counterexample = None;
    for size in 0..=bound {
        for m in members_up_to_iso(oracle, size, DEFAULT_ENUM_CAP)? {
            for k in 0..size {
                for subset in (0..size).combinations(k) {
                    instances += 1;
                    if !oracle.is_member_on(&m, &subset) {
                        failures += 1;
                        if counterexample.is_none() {
                            counterexample = Some(Counterexample {
                                a: Some(m.induced(&subset)),
                                b: m.clone(),
                                c: None,
                                detail: format!("substructure on {subset:?} is not a member"),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(AxiomReport {
        axiom: Axiom::Hp,
        class: oracle.name(),
        bound,
        instances,
        oracle_failures: failures,
        search_failures: 0,
        disagreements: 0,
        counterexample,
        pass: failures == 0,
    })
}

struct Outcome {
    oracle: Result<(), String>,
    search: bool,
}

fn run_instance(oracle: &dyn ClassOracle, a: &FinStructure, b: &FinStructure, c: &FinStructure, prune: bool) -> Outcome {
    let f = PartialMap::identity(a.size());
    let oracle_result = checked_amalgam(oracle, a, b, &f, c, &f)
        .map(|_| ())
        .map_err(|e| e.to_string());
    let search = search_amalgam(oracle, a, b, &f, c, &f, prune).is_some();
    Outcome {
        oracle: oracle_result,
        search,
    }
}

fn summarize(
    axiom: Axiom,
    oracle: &dyn ClassOracle,
    bound: usize,
    triples: &[(&FinStructure, &FinStructure, &FinStructure)],
    outcomes: Vec<Outcome>,
) -> AxiomReport {
    let mut report = AxiomReport {
        axiom,
        class: oracle.name(),
        bound,
        instances: outcomes.len(),
        oracle_failures: 0,
        search_failures: 0,
        disagreements: 0,
        counterexample: None,
        pass: true,
    };
    for ((a, b, c), o) in triples.iter().zip(outcomes) {
        let detail = match (&o.oracle, o.search) {
            (Ok(()), true) => continue,
            (Err(e), true) => format!("oracle amalgam failed but search found one: {e}"),
            (Ok(()), false) => "search found no amalgam but the oracle did".to_string(),
            (Err(e), false) => format!("no amalgam: {e}"),
        };
        if o.oracle.is_err() {
            report.oracle_failures += 1;
        }
        if !o.search {
            report.search_failures += 1;
        }
        if o.oracle.is_ok() != o.search {
            report.disagreements += 1;
        }
        if report.counterexample.is_none() {
            report.counterexample = Some(Counterexample {
                a: Some((*a).clone()),
                b: (*b).clone(),
                c: Some((*c).clone()),
                detail,
            });
        }
    }
    report.pass = report.oracle_failures == 0 && report.search_failures == 0;
    report
}

/// Any two members up to `bound` elements embed into a common member.
pub fn check_jep(oracle: &dyn ClassOracle, bound: usize) -> Result<AxiomReport, FraisseError> {
    let prune = check_hp(oracle, bound)?.pass;
    let empty = FinStructure::new(oracle.signature(), 0);
    let mut members = Vec::new();
    for size in 0..=bound {
        members.extend(members_up_to_iso(oracle, size, DEFAULT_ENUM_CAP)?);
    }
    let triples: Vec<_> = (0..members.len())
        .flat_map(|i| (i..members.len()).map(move |j| (i, j)))
        .map(|(i, j)| (&empty, &members[i], &members[j]))
        .collect();
    let outcomes = triples
        .par_iter()
        .map(|&(a, b, c)| run_instance(oracle, a, b, c, prune))
        .collect();
    Ok(summarize(Axiom::Jep, oracle, bound, &triples, outcomes))
}

/// For all `A ⊆ B, C` up to `bound` elements (up to isomorphism over `A`,
/// unordered in `B, C`), an amalgam exists.
pub fn check_ap(oracle: &dyn ClassOracle, bound: usize) -> Result<AxiomReport, FraisseError> {
    let prune = check_hp(oracle, bound)?.pass;
    let mut groups: Vec<(FinStructure, Vec<FinStructure>)> = Vec::new();
    for a_size in 0..=bound {
        for a in members_up_to_iso(oracle, a_size, DEFAULT_ENUM_CAP)? {
            let mut over = Vec::new();
            for extra in 0..=bound - a_size {
                over.extend(extensions_up_to_iso(oracle, &a, extra, DEFAULT_ENUM_CAP)?);
            }
            groups.push((a, over));
        }
    }
    let triples: Vec<_> = groups
        .iter()
        .flat_map(|(a, over)| {
            (0..over.len()).flat_map(move |i| (i..over.len()).map(move |j| (a, &over[i], &over[j])))
        })
        .collect();
    let outcomes = triples
        .par_iter()
        .map(|&(a, b, c)| run_instance(oracle, a, b, c, prune))
        .collect();
    Ok(summarize(Axiom::Ap, oracle, bound, &triples, outcomes))
}

/// Looks for an amalgam of `b` and `c` over `a` without using the oracle's
/// strategy: first without identifying new points, then with ever larger
/// identifications, deciding the free tuples by depth-first search. With
/// `prune` (only sound for hereditary classes) partial assignments are
/// rejected as soon as a small substructure leaves the class.
///
/// Returns an amalgam with `b` on its first elements and the map `c -> D`.
pub fn search_amalgam(
    oracle: &dyn ClassOracle,
    a: &FinStructure,
    b: &FinStructure,
    f: &PartialMap,
    c: &FinStructure,
    g: &PartialMap,
    prune: bool,
) -> Option<(FinStructure, PartialMap)> {
    let mut fixed = vec![usize::MAX; c.size()];
    for x in 0..a.size() {
        fixed[g.get(x)?] = f.get(x)?;
    }
    let b_image = f.image_set();
    let b_new: Vec<usize> = (0..b.size()).filter(|e| !b_image.contains(e)).collect();
    let c_new: Vec<usize> = (0..c.size()).filter(|&z| fixed[z] == usize::MAX).collect();
    for k in 0..=b_new.len().min(c_new.len()) {
        for merged in c_new.iter().copied().combinations(k) {
            for targets in b_new.iter().copied().permutations(k) {
                let mut cmap = fixed.clone();
                for (&z, &t) in merged.iter().zip(&targets) {
                    cmap[z] = t;
                }
                let mut next = b.size();
                for &z in &c_new {
                    if cmap[z] == usize::MAX {
                        cmap[z] = next;
                        next += 1;
                    }
                }
                if let Some(d) = complete(oracle, b, c, &cmap, next, prune) {
                    let right = PartialMap::from_images(&cmap).ok()?;
                    return Some((d, right));
                }
            }
        }
    }
    None
}

type SupportGroup = (Vec<usize>, Vec<(usize, Tuple)>);

fn complete(oracle: &dyn ClassOracle, b: &FinStructure, c: &FinStructure, cmap: &[usize], size: usize, prune: bool) -> Option<FinStructure> {
    let sig = oracle.signature();
    let mut in_c = vec![usize::MAX; size];
    for (z, &e) in cmap.iter().enumerate() {
        in_c[e] = z;
    }
    // the two sides must agree where they overlap
    let overlap: Vec<usize> = (0..b.size()).filter(|&e| in_c[e] != usize::MAX).collect();
    let mut pre: Tuple = Vec::new();
    for k in 0..sig.len() {
        let agree = for_each_tuple(&overlap, sig.arity(k), |t| {
            pre.clear();
            pre.extend(t.iter().map(|&e| in_c[e]));
            b.holds(k, t) == c.holds(k, &pre)
        });
        if !agree {
            return None;
        }
    }
    let mut d = b.grow(size - b.size());
    for (k, t) in c.facts() {
        d.insert(k, t.iter().map(|&z| cmap[z]).collect()).ok()?;
    }
    let all: Vec<usize> = (0..size).collect();
    let mut by_support: BTreeMap<Vec<usize>, Vec<(usize, Tuple)>> = BTreeMap::new();
    for k in 0..sig.len() {
        for_each_tuple(&all, sig.arity(k), |t| {
            let within_b = t.iter().all(|&e| e < b.size());
            let within_c = t.iter().all(|&e| in_c[e] != usize::MAX);
            if !within_b && !within_c && oracle.admissible(k, t) {
                let support: Vec<usize> = t.iter().copied().sorted().dedup().collect();
                by_support.entry(support).or_default().push((k, t.to_vec()));
            }
            true
        });
    }
    let mut groups: Vec<SupportGroup> = by_support.into_iter().collect();
    groups.sort_by(|x, y| {
        let kx = (x.0.last(), x.0.len(), &x.0);
        let ky = (y.0.last(), y.0.len(), &y.0);
        kx.cmp(&ky)
    });
    // a group that is the last one below its top element closes the prefix
    // `0..=top`, which is then checked as a whole
    let groups: Vec<Group> = groups
        .iter()
        .enumerate()
        .map(|(i, (support, tuples))| {
            let top = *support.last().expect("nonempty support");
            let closes = groups.get(i + 1).is_none_or(|(s, _)| *s.last().expect("nonempty") > top);
            Group {
                support: support.clone(),
                tuples: tuples.clone(),
                prefix: (closes && !oracle.support_local()).then(|| (0..=top).collect()),
            }
        })
        .collect();
    let search = Dfs {
        oracle,
        groups: &groups,
        prune,
    };
    if search.run(&mut d, 0) {
        Some(d)
    } else {
        None
    }
}

struct Group {
    support: Vec<usize>,
    tuples: Vec<(usize, Tuple)>,
    prefix: Option<Vec<usize>>,
}

struct Dfs<'a> {
    oracle: &'a dyn ClassOracle,
    groups: &'a [Group],
    prune: bool,
}

impl Dfs<'_> {
    fn run(&self, d: &mut FinStructure, i: usize) -> bool {
        let Some(group) = self.groups.get(i) else {
            return self.oracle.is_member(d);
        };
        for mask in 0u64..(1u64 << group.tuples.len()) {
            for (j, (k, t)) in group.tuples.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    d.insert(*k, t.clone()).expect("tuple in range");
                }
            }
            let ok = !self.prune
                || (self.oracle.is_member_on(d, &group.support)
                    && group.prefix.as_ref().is_none_or(|p| self.oracle.is_member_on(d, p)));
            if ok && self.run(d, i + 1) {
                return true;
            }
            for (j, (k, t)) in group.tuples.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    d.remove(*k, t);
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraisse::{LinearOrders, NoIsolatedVertex, RandomGraph};

    #[test]
    fn graphs_are_hereditary() {
        assert!(check_hp(&RandomGraph::new(), 3).unwrap().pass);
    }

    #[test]
    fn deleting_an_endpoint_isolates_the_other() {
        let r = check_hp(&NoIsolatedVertex::new(), 2).unwrap();
        assert!(!r.pass);
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.b, RandomGraph::graph(2, &[(0, 1)]));
        assert_eq!(cx.a.unwrap().size(), 1);
    }

    #[test]
    fn linear_orders_amalgamate() {
        let lo = LinearOrders::new();
        let ap = check_ap(&lo, 3).unwrap();
        assert!(ap.pass, "{ap:?}");
        assert_eq!(ap.disagreements, 0);
        assert!(check_jep(&lo, 3).unwrap().pass);
    }

    #[test]
    fn graphs_amalgamate() {
        let ap = check_ap(&RandomGraph::new(), 3).unwrap();
        assert!(ap.pass && ap.disagreements == 0);
    }

    #[test]
    fn search_identifies_when_forced() {
        // over the empty base two single points of a one-element-only class must merge
        struct AtMostOne;
        impl ClassOracle for AtMostOne {
            fn name(&self) -> String {
                "at-most-one".into()
            }
            fn signature(&self) -> std::sync::Arc<crate::structures::Signature> {
                RandomGraph::new().signature()
            }
            fn is_member(&self, s: &FinStructure) -> bool {
                s.size() <= 1 && s.tuple_count() == 0
            }
        }
        let point = RandomGraph::graph(1, &[]);
        let empty = RandomGraph::graph(0, &[]);
        let e = PartialMap::new();
        let (d, right) = search_amalgam(&AtMostOne, &empty, &point, &e, &point, &e, false).unwrap();
        assert_eq!(d.size(), 1);
        assert_eq!(right.get(0), Some(0));
    }
}
