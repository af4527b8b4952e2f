//! Basic 3D geometry: points, axis-aligned obstacles, and line-of-sight tests.

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;

/// A point or direction in 3D space, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn add(&self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(&self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn dot(&self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(*self).sqrt()
    }

    pub fn distance(&self, o: Vec3) -> f64 {
        self.sub(o).norm()
    }

    /// Unit vector from `self` toward `o`.
    pub fn direction_to(&self, o: Vec3) -> Vec3 {
        let d = o.sub(*self);
        let n = d.norm();
        d.scale(1.0 / n)
    }
}

/// An axis-aligned box blocker with strictly positive volume.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Obstacle {
    pub min_corner: Vec3,
    pub max_corner: Vec3,
}

impl Obstacle {
    pub fn new(min_corner: Vec3, max_corner: Vec3) -> Result<Self, ScenarioError> {
        if !min_corner.is_finite() || !max_corner.is_finite() {
            return Err(ScenarioError::InvalidObstacle(
                "corners must be finite".into(),
            ));
        }
        if min_corner.x >= max_corner.x
            || min_corner.y >= max_corner.y
            || min_corner.z >= max_corner.z
        {
            return Err(ScenarioError::InvalidObstacle(
                "min_corner must be strictly below max_corner on every axis".into(),
            ));
        }
        Ok(Obstacle {
            min_corner,
            max_corner,
        })
    }

    /// Containment test, inclusive of the boundary.
    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min_corner.x
            && p.x <= self.max_corner.x
            && p.y >= self.min_corner.y
            && p.y <= self.max_corner.y
            && p.z >= self.min_corner.z
            && p.z <= self.max_corner.z
    }
}

/// True when the segment from `a` to `b` intersects any obstacle (interior or
/// boundary). Slab-method segment/box clipping, exact for axis-aligned boxes.
pub fn los_blocked(a: Vec3, b: Vec3, obstacles: &[Obstacle]) -> bool {
    debug_assert!(a != b, "degenerate segment");
    obstacles.iter().any(|o| segment_hits_box(a, b, o))
}

fn segment_hits_box(a: Vec3, b: Vec3, o: &Obstacle) -> bool {
    let d = b.sub(a);
    let mut t_enter = 0.0f64;
    let mut t_exit = 1.0f64;
    for axis in 0..3 {
        let (p, v, lo, hi) = match axis {
            0 => (a.x, d.x, o.min_corner.x, o.max_corner.x),
            1 => (a.y, d.y, o.min_corner.y, o.max_corner.y),
            _ => (a.z, d.z, o.min_corner.z, o.max_corner.z),
        };
        if v == 0.0 {
            if p < lo || p > hi {
                return false;
            }
            // Parallel to this slab and inside it: no constraint.
            continue;
        }
        let mut t0 = (lo - p) / v;
        let mut t1 = (hi - p) / v;
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        t_enter = t_enter.max(t0);
        t_exit = t_exit.min(t1);
        if t_enter > t_exit {
            return false;
        }
    }
    true
}
