//! Initial-access overhead versus user count for all three protocols,
//! mirroring the linear-growth comparison: exhaustive pays a full two-hop
//! sweep per user, hierarchical a staged descent, ML a constant three slots.
//!
//! Run with: cargo run --example overhead_sweep

use mmwave_bm::engine::build_study_case;
use mmwave_bm::protocols::OraclePredictor;
use mmwave_bm::{overhead_sweep, FrameConfig, LinkBudget, ProtocolKind};

fn main() -> anyhow::Result<()> {
    let scenario = build_study_case()?;
    let link = LinkBudget::default();
    let frame = FrameConfig::default();
    let oracle = OraclePredictor {
        scenario: &scenario,
        link: &link,
    };
    let rows = overhead_sweep(
        &scenario,
        &link,
        &frame,
        Some(&oracle),
        &[
            ProtocolKind::Exhaustive,
            ProtocolKind::Hierarchical { fanout: 4 },
            ProtocolKind::Ml,
        ],
        &[10, 25, 50, 100],
        7,
    )?;
    println!(
        "{:<13} {:>6} {:>8} {:>10} {:>10}",
        "protocol", "users", "slots", "seconds", "mean se"
    );
    for row in rows {
        println!(
            "{:<13} {:>6} {:>8} {:>10.4} {:>10.3}",
            row.protocol, row.users, row.slots, row.total_seconds, row.mean_achieved_se
        );
    }
    Ok(())
}
