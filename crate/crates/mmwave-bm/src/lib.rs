//! Slot-accurate simulator of beam management for IRS-assisted mmWave
//! networks.
//!
//! The crate models a single base station, a set of intelligent reflecting
//! surfaces and blocking obstacles, and compares four beam-management
//! strategies — exhaustive search, hierarchical search, position-fingerprint
//! classification, and mobility-prediction-assisted tracking — on overhead
//! and effective spectral efficiency. Everything is deterministic given a
//! seed; all randomness flows through seeded ChaCha streams.
//!
//! Start with [`engine::build_study_case`] for the canonical scenario, the
//! `examples/` directory for runnable end-to-end walkthroughs, or the
//! `mmwave-bm` binary for the CSV/JSON reporting pipeline.

pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod learning;
pub mod mobility;
pub mod protocols;
pub mod report;
pub mod scenario;

pub use channel::{Beam, LinkBudget, PhaseConfig};
pub use engine::{build_study_case, overhead_sweep, tracking_sim, ProtocolKind, TrackingSpec};
pub use geometry::{Obstacle, Vec3};
pub use protocols::{AccessPredictor, BMDecision, FrameConfig, OraclePredictor};
pub use scenario::{AccessPointId, Scenario};
