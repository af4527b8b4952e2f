//! Build the position-fingerprint database over the study-case grid and
//! summarize the coverage zones (how many cells each access point serves).
//!
//! Run with: cargo run --example fingerprint_dataset

use std::collections::BTreeMap;

use mmwave_bm::engine::build_study_case;
use mmwave_bm::scenario::{build_fingerprint_dataset, GridSpec};
use mmwave_bm::LinkBudget;

fn main() -> anyhow::Result<()> {
    let scenario = build_study_case()?;
    let link = LinkBudget::default();
    let grid = GridSpec {
        resolution: 1.0,
        holdout_fraction: 0.2,
        seed: 7,
    };
    let (train, holdout) = build_fingerprint_dataset(&scenario, &link, &grid)?;
    println!(
        "fingerprint records: {} train, {} holdout ({} grid cells total)",
        train.len(),
        holdout.len(),
        100 * 100
    );

    let mut zones: BTreeMap<String, usize> = BTreeMap::new();
    for rec in train.iter().chain(&holdout) {
        *zones.entry(rec.label.to_string()).or_insert(0) += 1;
    }
    println!("\nzone sizes (best server per cell):");
    for (zone, count) in &zones {
        println!("  {zone:<8} {count:>6} cells");
    }
    let outage = 10_000 - train.len() - holdout.len();
    println!("  {:<8} {outage:>6} cells", "outage");
    Ok(())
}
