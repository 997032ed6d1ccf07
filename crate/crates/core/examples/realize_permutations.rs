//! Every permutation of the partition labels up to grade 3 is induced by a
//! back-and-forth automorphism of the reduct approximation.

use oligo::partition::{realize_class_permutation, ClassAction, PartitionOracle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let oracle = PartitionOracle::new(3);
    for sigma in ClassAction::all_total(3) {
        let (approx, certificate) = realize_class_permutation(&oracle, &sigma, 3)?;
        println!(
            "{sigma:?}: realized={} replayed={} on {} points with {} back-and-forth steps",
            certificate.verdict,
            certificate.verify()?,
            approx.size(),
            certificate.back_and_forth.steps.len()
        );
    }
    Ok(())
}
