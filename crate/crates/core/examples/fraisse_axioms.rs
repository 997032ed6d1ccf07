//! HP, JEP and AP for a few classes, each cross-checked by blind search.

use oligo::fraisse::{check_ap, check_hp, check_jep, ClassOracle, LinearOrders, NoIsolatedVertex, RandomGraph};
use oligo::partition::PartitionOracle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bound = 3;
    let classes: Vec<(&str, Box<dyn ClassOracle>)> = vec![
        ("partition N=2", Box::new(PartitionOracle::new(2))),
        ("random graph", Box::new(RandomGraph::new())),
        ("linear orders", Box::new(LinearOrders::new())),
        ("no isolated vertex", Box::new(NoIsolatedVertex::new())),
    ];
    for (name, oracle) in &classes {
        for report in [
            check_hp(oracle.as_ref(), bound)?,
            check_jep(oracle.as_ref(), bound)?,
            check_ap(oracle.as_ref(), bound)?,
        ] {
            println!(
                "{name:<20} {:?}: pass={} instances={} disagreements={}",
                report.axiom, report.pass, report.instances, report.disagreements
            );
        }
    }
    Ok(())
}
