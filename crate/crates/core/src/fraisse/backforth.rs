use serde::{Deserialize, Serialize};

use super::{ClassOracle, FraisseError, LimitApprox};
use crate::structures::{is_partial_iso, qf_type, FinStructure, PartialIsoChecker, PartialMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forth,
    Back,
}

/// A requested step: put an element into the domain (`Forth`) or the image (`Back`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "direction", content = "element", rename_all = "kebab-case")]
pub enum Target {
    Forth(usize),
    Back(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BnfStep {
    pub direction: Direction,
    /// The element that was covered.
    pub element: usize,
    /// Its partner on the other side.
    pub partner: usize,
    /// Index of the log event that created the partner, if one was needed.
    pub event: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackAndForthCertificate {
    pub initial: PartialMap,
    pub steps: Vec<BnfStep>,
    pub map: PartialMap,
    /// Length of the approximation's log when the certificate was issued.
    pub log_len: usize,
}

impl BackAndForthCertificate {
    /// Every intermediate map is a partial isomorphism of `s`, and the steps
    /// build `map` from `initial`.
    pub fn verify(&self, s: &FinStructure) -> bool {
        let mut f = self.initial.clone();
        if !is_partial_iso(&f, s, s) {
            return false;
        }
        for step in &self.steps {
            let (x, y) = match step.direction {
                Direction::Forth => (step.element, step.partner),
                Direction::Back => (step.partner, step.element),
            };
            f = match f.with(x, y) {
                Ok(next) => next,
                Err(_) => return false,
            };
            if !is_partial_iso(&f, s, s) {
                return false;
            }
        }
        f == self.map
    }
}

fn check_start(approx: &LimitApprox, f: &PartialMap) -> Result<(), FraisseError> {
    let s = &approx.current;
    let domain = f.domain();
    let image = f.image();
    let left = qf_type(s, &domain)?;
    let right = qf_type(s, &image)?;
    match left.first_difference(&right) {
        Some(diff) => Err(FraisseError::TypeMismatch { diff }),
        None => Ok(()),
    }
}

/// Covers `element` on the given side, growing the approximation if no
/// existing partner works.
fn step(
    oracle: &dyn ClassOracle,
    approx: &mut LimitApprox,
    f: &mut PartialMap,
    direction: Direction,
    element: usize,
) -> Result<Option<BnfStep>, FraisseError> {
    let oriented = match direction {
        Direction::Forth => f.clone(),
        Direction::Back => f.inverse(),
    };
    if oriented.contains_source(element) {
        return Ok(None);
    }
    if element >= approx.size() {
        return Err(FraisseError::Precondition(format!(
            "element {element} outside approximation of size {}",
            approx.size()
        )));
    }
    let existing = {
        let s = &approx.current;
        let checker = PartialIsoChecker::new(s, s);
        (0..s.size()).find(|&y| checker.can_extend(&oriented, element, y))
    };
    let (partner, event) = match existing {
        Some(y) => (y, None),
        None => {
            let pairs: Vec<(usize, usize)> = oriented.pairs().collect();
            let mut source: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let base: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            source.push(element);
            let extension = approx.current.induced(&source);
            let right = approx.glue(oracle, &base, &extension)?;
            let y = right.get(base.len()).expect("total");
            (y, Some(approx.log.len() - 1))
        }
    };
    match direction {
        Direction::Forth => f.insert(element, partner)?,
        Direction::Back => f.insert(partner, element)?,
    }
    Ok(Some(BnfStep {
        direction,
        element,
        partner,
        event,
    }))
}

fn finish(approx: &LimitApprox, initial: PartialMap, steps: Vec<BnfStep>, f: PartialMap) -> Result<BackAndForthCertificate, FraisseError> {
    if !is_partial_iso(&f, &approx.current, &approx.current) {
        return Err(FraisseError::Precondition("extended map is not a partial isomorphism".into()));
    }
    Ok(BackAndForthCertificate {
        initial,
        steps,
        map: f,
        log_len: approx.log.len(),
    })
}

/// Runs the given forth/back requests in order.
pub fn extend_along(
    oracle: &dyn ClassOracle,
    approx: &mut LimitApprox,
    f: &PartialMap,
    targets: &[Target],
) -> Result<BackAndForthCertificate, FraisseError> {
    check_start(approx, f)?;
    let mut map = f.clone();
    let mut steps = Vec::new();
    for target in targets {
        let (direction, element) = match *target {
            Target::Forth(x) => (Direction::Forth, x),
            Target::Back(y) => (Direction::Back, y),
        };
        if let Some(s) = step(oracle, approx, &mut map, direction, element)? {
            steps.push(s);
        }
    }
    finish(approx, f.clone(), steps, map)
}

/// Alternates forth and back steps, each covering the least element not yet
/// in the domain (resp. image). Stops early once the map is total both ways.
pub fn extend_partial_iso(
    oracle: &dyn ClassOracle,
    approx: &mut LimitApprox,
    f: &PartialMap,
    steps: usize,
) -> Result<BackAndForthCertificate, FraisseError> {
    check_start(approx, f)?;
    let mut map = f.clone();
    let mut done = Vec::new();
    for i in 0..steps {
        let preferred = if i % 2 == 0 { Direction::Forth } else { Direction::Back };
        let other = match preferred {
            Direction::Forth => Direction::Back,
            Direction::Back => Direction::Forth,
        };
        let uncovered = |dir: Direction, map: &PartialMap| {
            (0..approx.size()).find(|&e| match dir {
                Direction::Forth => !map.contains_source(e),
                Direction::Back => !map.image_set().contains(&e),
            })
        };
        let choice = uncovered(preferred, &map)
            .map(|e| (preferred, e))
            .or_else(|| uncovered(other, &map).map(|e| (other, e)));
        let Some((direction, element)) = choice else {
            break;
        };
        if let Some(s) = step(oracle, approx, &mut map, direction, element)? {
            done.push(s);
        }
    }
    finish(approx, f.clone(), done, map)
}
