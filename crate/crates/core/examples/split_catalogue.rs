//! Splitting of every central subgroup across the catalogue of small groups.

use oligo::groups::{catalogue, verify_splitting, DEFAULT_SUBGROUP_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut disagreements = 0;
    for entry in catalogue() {
        let g = &entry.group;
        let central = g.central_subgroups(DEFAULT_SUBGROUP_CAP)?;
        let mut split = 0;
        for f in &central {
            let report = verify_splitting(g, f, DEFAULT_SUBGROUP_CAP)?;
            split += usize::from(report.split);
            if !report.agree {
                disagreements += 1;
                println!("  {}: F = {:?} split={} abstract={}", entry.name, f, report.split, report.abstractly_isomorphic);
            }
        }
        println!("{:<12} order {:>2}: {:>2} central subgroups, {:>2} split", entry.name, g.order(), central.len(), split);
    }
    println!("disagreements: {disagreements}");
    Ok(())
}
