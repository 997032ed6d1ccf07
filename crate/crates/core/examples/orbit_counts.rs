//! Orbits on pairs, read off a saturated approximation of the limit and
//! compared with the types the age realises.

use oligo::fraisse::{age_types, count_orbits, saturate, ClassOracle, LimitApprox, RandomGraph, DEFAULT_ENUM_CAP};
use oligo::partition::PartitionOracle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let classes: Vec<(&str, Box<dyn ClassOracle>)> = vec![
        ("random graph", Box::new(RandomGraph::new())),
        ("partition N=2", Box::new(PartitionOracle::new(2))),
    ];
    for (name, oracle) in &classes {
        let mut approx = LimitApprox::new(oracle.as_ref());
        saturate(oracle.as_ref(), &mut approx, 2, 3)?;
        let orbits = count_orbits(oracle.as_ref(), &approx, 2)?;
        let types = age_types(oracle.as_ref(), 2, DEFAULT_ENUM_CAP)?;
        println!(
            "{name:<14} approximation of {} points: {} orbits on pairs, {} types in the age",
            approx.size(),
            orbits.count,
            types.len()
        );
    }
    Ok(())
}
