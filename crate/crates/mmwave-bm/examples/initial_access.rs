//! Compare the three initial-access protocols at a handful of UE positions:
//! slot cost, chosen access point, and achieved spectral efficiency.
//!
//! Run with: cargo run --example initial_access

use mmwave_bm::engine::build_study_case;
use mmwave_bm::protocols::{
    exhaustive_initial_access, hierarchical_initial_access, ml_initial_access, OraclePredictor,
};
use mmwave_bm::{FrameConfig, LinkBudget, Vec3};

fn main() -> anyhow::Result<()> {
    let scenario = build_study_case()?;
    let link = LinkBudget::default();
    let frame = FrameConfig::default();
    let oracle = OraclePredictor {
        scenario: &scenario,
        link: &link,
    };

    let positions = [
        ("open interior", Vec3::new(40.0, 57.0, 1.5)),
        ("north pocket (irs2 zone)", Vec3::new(45.0, 95.0, 1.5)),
        ("south pocket (irs1 zone)", Vec3::new(45.0, 10.0, 1.5)),
        ("east pocket (irs3 zone)", Vec3::new(95.0, 60.0, 1.5)),
    ];

    println!("{:<28} {:<13} {:>6} {:>10} {:>9}", "position", "protocol", "slots", "access", "se");
    for (name, ue) in positions {
        let decisions = [
            ("exhaustive", exhaustive_initial_access(&scenario, &link, &frame, ue)),
            (
                "hierarchical",
                hierarchical_initial_access(&scenario, &link, &frame, ue, 4)?,
            ),
            ("ml", ml_initial_access(&scenario, &link, &frame, &oracle, ue)),
        ];
        for (proto, d) in decisions {
            println!(
                "{:<28} {:<13} {:>6} {:>10} {:>9.3}",
                name,
                proto,
                d.slots_used,
                d.access.to_string(),
                d.achieved_se
            );
        }
    }
    Ok(())
}
