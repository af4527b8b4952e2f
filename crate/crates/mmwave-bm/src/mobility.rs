//! UE motion models, the historical trace cache, and the online position
//! predictors (closed-form linear extrapolation and a retrained delta
//! regressor) that feed proactive beam switching.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::MobilityError;
use crate::geometry::Vec3;
use crate::learning::{self, Dataset, MlpModel, OutputLayer, Targets, TrainConfig};

/// Snapshot of UE motion at one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub slot_index: u64,
}

/// How the UE moves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum MobilityModel {
    ConstantVelocity { velocity: Vec3 },
    Waypoint { points: Vec<Vec3>, speed: f64 },
    RandomWalk { step_std: f64, seed: u64 },
}

impl MobilityModel {
    pub fn validate(&self) -> Result<(), MobilityError> {
        match self {
            MobilityModel::ConstantVelocity { velocity } => {
                if !velocity.is_finite() {
                    return Err(MobilityError::InvalidModel("non-finite velocity".into()));
                }
            }
            MobilityModel::Waypoint { points, speed } => {
                if points.len() < 2 {
                    return Err(MobilityError::InvalidModel(
                        "waypoint list needs at least 2 points".into(),
                    ));
                }
                if !(*speed > 0.0) {
                    return Err(MobilityError::InvalidModel("speed must be positive".into()));
                }
            }
            MobilityModel::RandomWalk { step_std, .. } => {
                if !(*step_std >= 0.0) {
                    return Err(MobilityError::InvalidModel(
                        "step_std must be nonnegative".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Advance the motion state by `dt` seconds (one slot).
///
/// Waypoint motion moves at fixed speed along the polyline, turning at
/// vertices and stopping at the final point. Random-walk steps are seeded by
/// (model seed, slot index) so the trajectory is a pure function of inputs.
pub fn advance(model: &MobilityModel, state: &MotionState, dt: f64) -> MotionState {
    debug_assert!(dt > 0.0);
    match model {
        MobilityModel::ConstantVelocity { velocity } => MotionState {
            position: state.position.add(velocity.scale(dt)),
            velocity: *velocity,
            slot_index: state.slot_index + 1,
        },
        MobilityModel::Waypoint { points, speed } => {
            let (position, velocity) = advance_waypoint(points, *speed, state.position, dt);
            MotionState {
                position,
                velocity,
                slot_index: state.slot_index + 1,
            }
        }
        MobilityModel::RandomWalk { step_std, seed } => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ state.slot_index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let sigma = step_std * dt.sqrt();
            let step = Vec3::new(gaussian(&mut rng) * sigma, gaussian(&mut rng) * sigma, 0.0);
            MotionState {
                position: state.position.add(step),
                velocity: step.scale(1.0 / dt),
                slot_index: state.slot_index + 1,
            }
        }
    }
}

/// Box-Muller standard normal draw.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn advance_waypoint(points: &[Vec3], speed: f64, position: Vec3, dt: f64) -> (Vec3, Vec3) {
    // Locate the current position on the polyline: nearest segment, preferring
    // the later segment at a shared vertex so motion keeps going.
    let mut best: (usize, f64, f64) = (0, 0.0, f64::INFINITY); // (segment, t, residual)
    for i in 0..points.len() - 1 {
        let a = points[i];
        let b = points[i + 1];
        let ab = b.sub(a);
        let len2 = ab.dot(ab);
        let t = if len2 > 0.0 {
            (position.sub(a).dot(ab) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let residual = position.distance(a.add(ab.scale(t)));
        if residual < best.2 - 1e-12 || (residual < best.2 + 1e-12 && t < 1.0 - 1e-12) {
            best = (i, t, residual);
        }
    }
    let (mut seg, t, _) = best;
    let mut pos = points[seg].add(points[seg + 1].sub(points[seg]).scale(t));
    let mut remaining = speed * dt;
    loop {
        let target = points[seg + 1];
        let to_vertex = pos.distance(target);
        if remaining < to_vertex {
            let dir = pos.direction_to(target);
            return (pos.add(dir.scale(remaining)), dir.scale(speed));
        }
        remaining -= to_vertex;
        pos = target;
        if seg + 2 >= points.len() {
            // Final vertex: stop.
            return (pos, Vec3::new(0.0, 0.0, 0.0));
        }
        seg += 1;
    }
}

/// Bounded history of motion states ordered by slot index.
#[derive(Debug, Clone)]
pub struct TraceBuffer {
    capacity: usize,
    entries: VecDeque<MotionState>,
}

impl TraceBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 2, "a useful trace holds at least 2 entries");
        TraceBuffer {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, state: MotionState) -> Result<(), MobilityError> {
        if let Some(last) = self.entries.back() {
            if state.slot_index <= last.slot_index {
                return Err(MobilityError::NonMonotonicTrace);
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(state);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn last(&self) -> Option<&MotionState> {
        self.entries.back()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MotionState> {
        self.entries.iter()
    }
}

/// Least-squares straight-line fit of position vs. slot index over the whole
/// trace, extrapolated to `k` future samples spaced `step_slots` apart.
pub fn predict_linear(
    trace: &TraceBuffer,
    k: usize,
    step_slots: u64,
) -> Result<Vec<Vec3>, MobilityError> {
    if trace.len() < 2 {
        return Err(MobilityError::InsufficientHistory {
            have: trace.len(),
            need: 2,
        });
    }
    let n = trace.len() as f64;
    let t0 = trace.iter().next().unwrap().slot_index as f64;
    let mut st = 0.0;
    let mut stt = 0.0;
    let mut sp = Vec3::new(0.0, 0.0, 0.0);
    let mut stp = Vec3::new(0.0, 0.0, 0.0);
    for e in trace.iter() {
        let t = e.slot_index as f64 - t0;
        st += t;
        stt += t * t;
        sp = sp.add(e.position);
        stp = stp.add(e.position.scale(t));
    }
    let denom = n * stt - st * st;
    // All entries at the same slot cannot happen (strictly increasing), so
    // denom > 0 whenever len >= 2.
    let slope = stp.scale(n).sub(sp.scale(st)).scale(1.0 / denom);
    let intercept = sp.sub(slope.scale(st)).scale(1.0 / n);
    let last = trace.last().unwrap().slot_index as f64 - t0;
    Ok((1..=k)
        .map(|j| {
            let t = last + (j as u64 * step_slots) as f64;
            intercept.add(slope.scale(t))
        })
        .collect())
}

/// Configuration of the online-retrained delta regressor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressorSpec {
    /// Number of past deltas fed as input.
    pub window: usize,
    /// Retrain period in slots.
    pub retrain_every: u64,
    pub hidden: Vec<usize>,
    pub train: TrainConfig,
}

impl Default for RegressorSpec {
    fn default() -> Self {
        RegressorSpec {
            window: 3,
            retrain_every: 50,
            hidden: vec![16],
            train: TrainConfig {
                learning_rate: 0.05,
                epochs: 300,
                batch_size: 8,
                seed: 0,
                momentum: 0.9,
            },
        }
    }
}

/// Online learning module: a small regressor retrained every few slots on
/// sliding windows of position deltas drawn from the trace.
#[derive(Debug, Clone)]
pub struct OnlineRegressor {
    pub spec: RegressorSpec,
    pub model: Option<MlpModel>,
    pub last_trained_slot: Option<u64>,
}

impl OnlineRegressor {
    pub fn new(spec: RegressorSpec) -> Self {
        OnlineRegressor {
            spec,
            model: None,
            last_trained_slot: None,
        }
    }

    fn min_entries(&self) -> usize {
        self.spec.window + 2
    }

    /// Retrain from the trace if the retrain period elapsed. A call before
    /// the period has elapsed (or with too little history) leaves the state
    /// unchanged.
    pub fn update(&mut self, trace: &TraceBuffer) -> Result<(), MobilityError> {
        let last_slot = match trace.last() {
            Some(s) => s.slot_index,
            None => return Ok(()),
        };
        if trace.len() < self.min_entries() {
            return Ok(());
        }
        if let Some(prev) = self.last_trained_slot {
            if last_slot < prev + self.spec.retrain_every {
                return Ok(());
            }
        }
        let states: Vec<&MotionState> = trace.iter().collect();
        let deltas: Vec<Vec3> = states
            .windows(2)
            .map(|w| w[1].position.sub(w[0].position))
            .collect();
        let w = self.spec.window;
        let mut features = Vec::new();
        let mut targets = Vec::new();
        for i in 0..deltas.len() - w {
            let mut f = Vec::with_capacity(3 * w);
            for d in &deltas[i..i + w] {
                f.extend_from_slice(&[d.x, d.y, d.z]);
            }
            features.push(f);
            let t = deltas[i + w];
            targets.push(vec![t.x, t.y, t.z]);
        }
        let data = Dataset {
            features,
            targets: Targets::Values(targets),
        };
        let mut dims = vec![3 * w];
        dims.extend_from_slice(&self.spec.hidden);
        dims.push(3);
        let init = MlpModel::init(&dims, OutputLayer::Identity, self.spec.train.seed);
        let (model, _) = learning::train(&init, &data, &self.spec.train)
            .map_err(|e| MobilityError::InvalidModel(format!("regressor training failed: {e}")))?;
        self.model = Some(model);
        self.last_trained_slot = Some(last_slot);
        Ok(())
    }

    /// Roll the regressor forward `k` steps at the trace's cadence, feeding
    /// its own predictions back as inputs.
    pub fn predict(&self, trace: &TraceBuffer, k: usize) -> Result<Vec<Vec3>, MobilityError> {
        let model = self.model.as_ref().ok_or(MobilityError::InsufficientHistory {
            have: trace.len(),
            need: self.min_entries(),
        })?;
        if trace.len() < self.spec.window + 1 {
            return Err(MobilityError::InsufficientHistory {
                have: trace.len(),
                need: self.spec.window + 1,
            });
        }
        let states: Vec<&MotionState> = trace.iter().collect();
        let mut deltas: VecDeque<Vec3> = states
            .windows(2)
            .map(|w| w[1].position.sub(w[0].position))
            .collect();
        while deltas.len() > self.spec.window {
            deltas.pop_front();
        }
        let mut pos = trace.last().unwrap().position;
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let mut f = Vec::with_capacity(3 * self.spec.window);
            for d in &deltas {
                f.extend_from_slice(&[d.x, d.y, d.z]);
            }
            let pred = model
                .forward(&f)
                .map_err(|e| MobilityError::InvalidModel(e.to_string()))?;
            let d = Vec3::new(pred[0], pred[1], pred[2]);
            pos = pos.add(d);
            out.push(pos);
            deltas.pop_front();
            deltas.push_back(d);
        }
        Ok(out)
    }
}

/// Which predictor drives mobility awareness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum PredictorSpec {
    LinearExtrapolation,
    OnlineRegressor(RegressorSpec),
}

/// Runtime predictor state.
#[derive(Debug, Clone)]
pub enum Predictor {
    Linear,
    Regressor(OnlineRegressor),
}

impl Predictor {
    pub fn from_spec(spec: &PredictorSpec) -> Self {
        match spec {
            PredictorSpec::LinearExtrapolation => Predictor::Linear,
            PredictorSpec::OnlineRegressor(r) => Predictor::Regressor(OnlineRegressor::new(r.clone())),
        }
    }

    /// Give the predictor a chance to retrain on fresh history.
    pub fn update(&mut self, trace: &TraceBuffer) -> Result<(), MobilityError> {
        match self {
            Predictor::Linear => Ok(()),
            Predictor::Regressor(r) => r.update(trace),
        }
    }

    /// Predict `k` future positions at the trace's entry cadence
    /// (`step_slots` apart).
    pub fn predict(
        &self,
        trace: &TraceBuffer,
        k: usize,
        step_slots: u64,
    ) -> Result<Vec<Vec3>, MobilityError> {
        match self {
            Predictor::Linear => predict_linear(trace, k, step_slots),
            Predictor::Regressor(r) => r.predict(trace, k),
        }
    }
}
