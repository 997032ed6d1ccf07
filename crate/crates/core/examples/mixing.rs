//! Witnesses `d` with `(y, a)`, `(d, a)` and `(d, b)` of one type, for every
//! compatible triple in a saturated approximation.

use oligo::cli::battery::compatible_triples;
use oligo::fraisse::{saturate, LimitApprox};
use oligo::partition::{mixing_witness, PartitionOracle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let oracle = PartitionOracle::new(2);
    let mut approx = LimitApprox::new(&oracle);
    saturate(&oracle, &mut approx, 2, 2)?;
    let triples = compatible_triples(&approx.current, 1)?;
    let mut verified = 0;
    for [y, a, b] in &triples {
        let mut local = approx.clone();
        let w = mixing_witness(&oracle, &mut local, y, a, b)?;
        verified += usize::from(w.holds_in(&local.current));
    }
    println!("{} compatible triples of single elements, {verified} witnessed", triples.len());
    Ok(())
}
