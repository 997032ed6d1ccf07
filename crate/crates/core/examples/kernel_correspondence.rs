//! A partial isomorphism of an E-reduct lies in the kernel exactly when it
//! preserves every partition label.

use oligo::cli::battery::{labelled_members, partial_injections};
use oligo::partition::{en_reduct, kernel_check, preserves_labels, PartitionOracle};
use oligo::structures::is_partial_iso;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let oracle = PartitionOracle::new(2);
    let (mut maps, mut in_kernel, mut agree) = (0, 0, 0);
    for size in 0..=3 {
        for s in labelled_members(&oracle, size)? {
            let reduct = en_reduct(&oracle, &s)?;
            for f in partial_injections(size) {
                if !is_partial_iso(&f, &reduct, &reduct) {
                    continue;
                }
                let k = kernel_check(&oracle, &s, &f)?;
                maps += 1;
                in_kernel += usize::from(k);
                agree += usize::from(k == preserves_labels(&s, &f));
            }
        }
    }
    println!("{maps} partial isomorphisms, {in_kernel} in the kernel, {agree} agreements");
    Ok(())
}
