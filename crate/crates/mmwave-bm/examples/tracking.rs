//! Slot-by-slot beam tracking along a zone-crossing trajectory: genie upper
//! bound, conventional neighbor sweeps, and mobility-aware proactive
//! switching with linear position prediction.
//!
//! Run with: cargo run --release --example tracking

use mmwave_bm::engine::{build_study_case, TrackingSpec};
use mmwave_bm::mobility::{MobilityModel, PredictorSpec};
use mmwave_bm::protocols::OraclePredictor;
use mmwave_bm::{tracking_sim, FrameConfig, LinkBudget, Vec3};

fn main() -> anyhow::Result<()> {
    let scenario = build_study_case()?;
    let link = LinkBudget::default();
    let frame = FrameConfig::default();
    // Perfect environmental awareness for the walkthrough; swap in a model
    // from `train_classifier` to see the deployed behavior.
    let oracle = OraclePredictor {
        scenario: &scenario,
        link: &link,
    };
    let spec = TrackingSpec {
        start: Vec3::new(45.0, 5.0, 1.5),
        model: MobilityModel::ConstantVelocity {
            velocity: Vec3::new(0.0, 10.0, 0.0),
        },
        slots: 90_000,
        track_period: 100,
        predictor: PredictorSpec::LinearExtrapolation,
    };
    let report = tracking_sim(&scenario, &link, &frame, &oracle, &spec)?;

    println!(
        "trajectory: x = 45, y = 5 -> 95 at 10 m/s ({} slots of {} us)\n",
        report.total_slots, report.slot_us
    );
    println!(
        "{:<16} {:>9} {:>12} {:>12} {:>10}",
        "scheme", "mean se", "data slots", "train slots", "handovers"
    );
    for (name, s) in &report.summary {
        println!(
            "{:<16} {:>9.4} {:>12} {:>12} {:>10}",
            name, s.mean_se, s.data_slots, s.training_slots, s.handover_count
        );
    }
    println!("\nhandover events (mobility-aware):");
    for h in &report.handovers {
        println!(
            "  slot {:>6} (t = {:5.2} s): {} -> {}",
            h.slot,
            h.slot as f64 * report.slot_us * 1e-6,
            h.from,
            h.to
        );
    }
    Ok(())
}
