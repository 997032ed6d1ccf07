//! Free amalgamation of encoded structures, including the one instance of
//! the exhaustive battery where an n-pair spans both sides.

use oligo::encoding::{encode, free_amalgam_membership, GradedInnerSignature};
use oligo::fraisse::FreeClass;
use oligo::structures::{FinStructure, PartialMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inner = GradedInnerSignature::from_arities(&[1, 2, 2])?;
    let oracle = FreeClass::new(inner.signature());
    let mut s = FinStructure::new(inner.signature(), 1);
    s.insert(2, vec![0, 0])?;
    let b = encode(&s, &inner)?;
    // The first two cycle elements, without the point they label.
    let a = b.induced(&[1, 2]);
    let f = PartialMap::from_images(&[1, 2])?;
    let report = free_amalgam_membership(&a, &b, &f, &b, &f, &inner, &oracle)?;
    println!(
        "amalgam of {} elements: member={} spanning n-pairs={} of which new={}",
        report.amalgam.structure.size(),
        report.membership.pass,
        report.spanning.len(),
        report.spanning_new.len()
    );
    for p in &report.spanning {
        println!("  {}-pair on cycle {:?} labels {:?}", p.n, p.cycle, p.labels);
    }
    Ok(())
}
