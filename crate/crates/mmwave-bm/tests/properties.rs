//! Randomized property tests for the geometric and numeric invariants that
//! every higher-level result rests on.

use proptest::prelude::*;

use mmwave_bm::channel::{nearest_beam, se_bits, steering_vector, ula_sin};
use mmwave_bm::geometry::los_blocked;
use mmwave_bm::mobility::{advance, predict_linear, MobilityModel, MotionState, TraceBuffer};
use mmwave_bm::report::fmt_g17;
use mmwave_bm::{Obstacle, Vec3};

fn finite_coord() -> impl Strategy<Value = f64> {
    -500.0..500.0f64
}

fn vec3() -> impl Strategy<Value = Vec3> {
    (finite_coord(), finite_coord(), finite_coord()).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn obstacle() -> impl Strategy<Value = Obstacle> {
    (vec3(), 0.1..50.0f64, 0.1..50.0f64, 0.1..50.0f64).prop_map(|(c, dx, dy, dz)| {
        Obstacle::new(c, Vec3::new(c.x + dx, c.y + dy, c.z + dz)).unwrap()
    })
}

proptest! {
    /// Every steering-vector entry lies on the circle of radius 1/sqrt(n).
    #[test]
    fn steering_entries_unit_modulus(exp in 2u32..9, sin_az in -1.0..1.0f64) {
        let n = 1usize << exp;
        let v = steering_vector(n, sin_az).unwrap();
        let r = 1.0 / (n as f64).sqrt();
        for e in &v {
            prop_assert!((e.norm() - r).abs() < 1e-12);
        }
    }

    /// Spectral efficiency is nonnegative and monotone in SNR.
    #[test]
    fn se_monotone_in_snr(a in -80.0..60.0f64, delta in 0.0..60.0f64) {
        let lo = se_bits(a);
        let hi = se_bits(a + delta);
        prop_assert!(lo >= 0.0);
        prop_assert!(hi >= lo);
    }

    /// The array observes only the direction of arrival: translating both
    /// endpoints by the same offset leaves the observed sine unchanged.
    #[test]
    fn ula_sin_translation_invariant(from in vec3(), to in vec3(), offset in vec3(), az in -3.1..3.1f64) {
        prop_assume!(from.sub(to).norm() > 1e-6);
        let a = ula_sin(az, from, to);
        let b = ula_sin(az, from.add(offset), to.add(offset));
        prop_assert!((a - b).abs() < 1e-9);
    }

    /// nearest_beam returns a level-0 index whose grid sine is within half a
    /// codebook spacing of the request (except at the clamped edges).
    #[test]
    fn nearest_beam_within_half_spacing(exp in 2u32..9, sin_az in -1.0..1.0f64) {
        let n = 1usize << exp;
        let b = nearest_beam(n, sin_az);
        prop_assert!(b.codebook_index < n);
        prop_assert_eq!(b.level, 0);
        let spacing = 2.0 / n as f64;
        let interior = sin_az > -1.0 + spacing && sin_az < 1.0 - spacing;
        if interior {
            prop_assert!((b.sin_azimuth - sin_az).abs() <= spacing / 2.0 + 1e-12);
        }
    }

    /// Blockage is symmetric in the ray's endpoints.
    #[test]
    fn los_blockage_symmetric(a in vec3(), b in vec3(), obs in prop::collection::vec(obstacle(), 0..4)) {
        prop_assert_eq!(los_blocked(a, b, &obs), los_blocked(b, a, &obs));
    }

    /// Constant-velocity advancement composes: many small steps land exactly
    /// where one big step does (linear motion has no step-size error).
    #[test]
    fn constant_velocity_step_composition(start in vec3(), v in vec3(), steps in 1usize..50) {
        let model = MobilityModel::ConstantVelocity { velocity: v };
        let dt = 0.01;
        let mut st = MotionState { position: start, velocity: v, slot_index: 0 };
        for _ in 0..steps {
            st = advance(&model, &st, dt);
        }
        let direct = start.add(v.scale(dt * steps as f64));
        prop_assert!(st.position.distance(direct) < 1e-9 * (1.0 + direct.norm()));
        prop_assert_eq!(st.slot_index, steps as u64);
    }

    /// A waypoint walker never moves farther than speed * dt in one step.
    #[test]
    fn waypoint_speed_bound(speed in 0.5..20.0f64, dt in 0.001..0.5f64, frac in 0.0..1.0f64) {
        let points = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(10.0, 0.0, 0.0),
            Vec3::new(10.0, 10.0, 0.0),
        ];
        let model = MobilityModel::Waypoint { points: points.clone(), speed };
        let start = Vec3::new(10.0 * frac, 0.0, 0.0);
        let st = MotionState { position: start, velocity: Vec3::new(0.0, 0.0, 0.0), slot_index: 0 };
        let next = advance(&model, &st, dt);
        prop_assert!(next.position.distance(start) <= speed * dt + 1e-9);
    }

    /// Linear prediction reproduces a noiseless constant-velocity trace
    /// exactly, for any sampling cadence and horizon.
    #[test]
    fn linear_prediction_exact_on_lines(
        start in vec3(),
        v in vec3(),
        stride in 1u64..20,
        k in 1usize..8,
    ) {
        let mut trace = TraceBuffer::new(8);
        for i in 0..5u64 {
            let slot = i * stride;
            trace.push(MotionState {
                position: start.add(v.scale(slot as f64)),
                velocity: v,
                slot_index: slot,
            }).unwrap();
        }
        let preds = predict_linear(&trace, k, stride).unwrap();
        prop_assert_eq!(preds.len(), k);
        for (j, p) in preds.iter().enumerate() {
            let slot = (4 + (j as u64 + 1)) * stride;
            let truth = start.add(v.scale(slot as f64));
            let scale = 1.0 + truth.norm() + v.norm() * slot as f64;
            prop_assert!(p.distance(truth) < 1e-6 * scale);
        }
    }

    /// The 17-significant-digit formatter round-trips every f64 exactly.
    #[test]
    fn fmt_g17_round_trips(v in any::<f64>()) {
        prop_assume!(v.is_finite());
        let parsed: f64 = fmt_g17(v).parse().unwrap();
        prop_assert_eq!(parsed.to_bits(), v.to_bits());
    }

    /// The trace buffer keeps at most `capacity` entries, strictly ordered.
    #[test]
    fn trace_buffer_bounded_and_ordered(cap in 2usize..12, pushes in 1usize..40) {
        let mut trace = TraceBuffer::new(cap);
        for i in 0..pushes {
            trace.push(MotionState {
                position: Vec3::new(i as f64, 0.0, 0.0),
                velocity: Vec3::new(0.0, 0.0, 0.0),
                slot_index: i as u64,
            }).unwrap();
            prop_assert!(trace.len() <= cap);
        }
        let slots: Vec<u64> = trace.iter().map(|s| s.slot_index).collect();
        prop_assert!(slots.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(trace.last().unwrap().slot_index, pushes as u64 - 1);
    }
}
