//! Extends conjugation by the flip of {0, 1} from the full unary monoid to
//! the clone it generates, and checks that it is a clone homomorphism.

use oligo::clones::{check_clone_homomorphism, extend_monoid_iso, CloneHandle, FinOperation, FunctionMonoid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = FunctionMonoid::full(2);
    let flip = FinOperation::unary(2, &[1, 0])?;
    let mut xi0 = Vec::new();
    for a in m.elements() {
        xi0.push((a.clone(), flip.compose(&[a.compose(std::slice::from_ref(&flip))?])?));
    }
    let xi = extend_monoid_iso(&m, &m, &xi0.into_iter().collect())?;
    let clone = CloneHandle::from_monoid(m);
    let samples: Vec<FinOperation> = (1..=3).flat_map(|k| clone.members(k)).collect();
    let report = check_clone_homomorphism(&samples, &|f| xi.apply(f))?;
    println!("{} operations of arity at most 3: homomorphism={}", samples.len(), report.pass);
    Ok(())
}
