//! Train the access-point classifier on the study-case fingerprint database
//! and report holdout accuracy against the brute-force labeling oracle.
//!
//! Run with: cargo run --release --example train_classifier

use mmwave_bm::engine::{build_study_case, train_classifier};
use mmwave_bm::learning::TrainConfig;
use mmwave_bm::scenario::GridSpec;
use mmwave_bm::{LinkBudget, Vec3};

fn main() -> anyhow::Result<()> {
    let scenario = build_study_case()?;
    let link = LinkBudget::default();
    let grid = GridSpec {
        resolution: 1.0,
        holdout_fraction: 0.2,
        seed: 7,
    };
    let tc = TrainConfig {
        seed: 7,
        ..TrainConfig::default()
    };

    let start = std::time::Instant::now();
    let (model, accuracy) = train_classifier(&scenario, &link, &grid, &[64, 64], &tc)?;
    println!(
        "trained 3-64-64-{} classifier in {:.1} s; holdout accuracy {:.4}",
        model.output_dim(),
        start.elapsed().as_secs_f64(),
        accuracy
    );

    // Spot-check a few positions against the oracle.
    use mmwave_bm::scenario::label_position;
    use mmwave_bm::AccessPredictor;
    for ue in [
        Vec3::new(40.0, 57.0, 1.5),
        Vec3::new(45.0, 95.0, 1.5),
        Vec3::new(45.0, 10.0, 1.5),
        Vec3::new(95.0, 60.0, 1.5),
    ] {
        let predicted = model.predict(ue);
        let truth = label_position(&scenario, &link, ue).label;
        println!(
            "({:>4.1}, {:>4.1}): predicted {predicted}, oracle {truth}",
            ue.x, ue.y
        );
    }
    Ok(())
}
