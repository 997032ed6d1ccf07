//! Runs the group suite into a temporary directory and replays every
//! certificate it wrote.

use oligo::cli::{replay, run_suite, Suite, SuiteConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("oligo-certificates-{}", std::process::id()));
    let config = SuiteConfig {
        out: dir.clone(),
        ..SuiteConfig::default()
    };
    let summary = run_suite(Suite::Groups, &config)?;
    print!("{}", summary.table());
    for row in &summary.rows {
        let r = replay(&row.path)?;
        println!("replay {}: matches={} verdict={}", r.name, r.matches, r.verdict);
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
