use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CloneError, FinOperation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomViolation {
    /// `ξ(π) ≠ π`.
    Projection { projection: FinOperation, image: FinOperation },
    /// `ξ(f(g_1, ..., g_n)) ≠ ξ(f)(ξ(g_1), ..., ξ(g_n))`.
    Composite {
        f: FinOperation,
        gs: Vec<FinOperation>,
        lhs: FinOperation,
        rhs: FinOperation,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomReport {
    /// Identities checked before stopping.
    pub checked: usize,
    pub violation: Option<HomViolation>,
    pub pass: bool,
}

/// Checks that `xi` respects composition on every composite `f(g_1, ..., g_n)`
/// of sample operations (all `g_i` of one arity) and fixes the projections
/// of every sample arity. Stops at the first violation.
///
/// Fails when `xi` is undefined on a sample or a composite.
pub fn check_clone_homomorphism(
    samples: &[FinOperation],
    xi: &dyn Fn(&FinOperation) -> Option<FinOperation>,
) -> Result<HomReport, CloneError> {
    let mut by_arity: BTreeMap<usize, Vec<&FinOperation>> = BTreeMap::new();
    for f in samples {
        by_arity.entry(f.arity()).or_default().push(f);
    }
    let apply = |f: &FinOperation| xi(f).ok_or_else(|| CloneError::Undefined(f.clone()));
    let images: BTreeMap<&FinOperation, FinOperation> = samples.iter().map(|f| Ok((f, apply(f)?))).collect::<Result<_, CloneError>>()?;
    let mut checked = 0;
    let fail = |checked, violation| HomReport {
        checked,
        violation: Some(violation),
        pass: false,
    };
    for f in samples {
        let n = f.arity();
        for inner in by_arity.values() {
            if n > 0 && inner.is_empty() {
                continue;
            }
            let mut pick = vec![0usize; n];
            loop {
                let gs: Vec<FinOperation> = pick.iter().map(|&i| inner[i].clone()).collect();
                if n > 0 {
                    let composite = f.compose(&gs)?;
                    let lhs = apply(&composite)?;
                    let xgs: Vec<FinOperation> = gs.iter().map(|g| images[g].clone()).collect();
                    let rhs = images[f].compose(&xgs)?;
                    checked += 1;
                    if lhs != rhs {
                        return Ok(fail(checked, HomViolation::Composite { f: f.clone(), gs, lhs, rhs }));
                    }
                }
                if !advance(&mut pick, inner.len()) {
                    break;
                }
            }
        }
    }
    let d = samples.first().map_or(0, FinOperation::domain);
    for &m in by_arity.keys() {
        for i in 0..m {
            let projection = FinOperation::projection(d, m, i);
            let image = apply(&projection)?;
            checked += 1;
            if image != projection {
                return Ok(fail(checked, HomViolation::Projection { projection, image }));
            }
        }
    }
    Ok(HomReport {
        checked,
        violation: None,
        pass: true,
    })
}

fn advance(pick: &mut [usize], base: usize) -> bool {
    for slot in pick.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clones::{extend_monoid_iso, CloneHandle, FunctionMonoid};

    fn flip_iso() -> (CloneHandle, crate::clones::CloneIso) {
        let m = FunctionMonoid::full(2);
        let flip = FinOperation::unary(2, &[1, 0]).unwrap();
        let xi0 = m
            .elements()
            .iter()
            .map(|a| (a.clone(), flip.compose(&[a.compose(std::slice::from_ref(&flip)).unwrap()]).unwrap()))
            .collect();
        let iso = extend_monoid_iso(&m, &m, &xi0).unwrap();
        (CloneHandle::from_monoid(m), iso)
    }

    #[test]
    fn flip_conjugation_is_a_clone_homomorphism() {
        let (clone, iso) = flip_iso();
        let samples: Vec<FinOperation> = (1..=3).flat_map(|k| clone.members(k)).collect();
        assert_eq!(samples.len(), 18);
        let report = check_clone_homomorphism(&samples, &|f| iso.apply(f)).unwrap();
        assert!(report.pass, "{report:?}");
        // 4·(4 + 6 + 8) + 6·(16 + 36 + 64) + 8·(64 + 216 + 512) compositions, 6 projections
        assert_eq!(report.checked, 72 + 696 + 6336 + 6);
    }

    #[test]
    fn swapping_projections_breaks_on_a_composite() {
        let p0 = FinOperation::projection(2, 2, 0);
        let p1 = FinOperation::projection(2, 2, 1);
        let f = FinOperation::from_fn(2, 2, |x| x[0] & (1 - x[1]));
        let swap = |g: &FinOperation| {
            Some(if *g == p0 {
                p1.clone()
            } else if *g == p1 {
                p0.clone()
            } else {
                g.clone()
            })
        };
        let report = check_clone_homomorphism(&[f.clone(), p0.clone(), p1.clone()], &swap).unwrap();
        assert!(!report.pass);
        match report.violation.unwrap() {
            HomViolation::Composite { f: outer, gs, lhs, rhs } => {
                assert_eq!(outer, f);
                // f(f, π0) is constant 0, but f(ξf, ξπ0) = f(f, π1) = f
                assert_eq!(gs, vec![f.clone(), p0]);
                assert_eq!(lhs, FinOperation::constant(2, 2, 0));
                assert_eq!(rhs, f);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undefined_composite_is_an_error() {
        let (_, iso) = flip_iso();
        let and = FinOperation::from_fn(2, 2, |x| x[0] & x[1]);
        let samples = vec![FinOperation::projection(2, 2, 0), and];
        assert!(matches!(check_clone_homomorphism(&samples, &|f| iso.apply(f)), Err(CloneError::Undefined(_))));
    }
}
