//! World description: node placement, blockage tests, access-point
//! candidates, and the brute-force fingerprint labeling oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::channel::{ideal_cascaded_snr_db, ideal_direct_snr_db, se_bits, LinkBudget};
use crate::error::ScenarioError;
use crate::geometry::{los_blocked, Obstacle, Vec3};

/// The serving base station: a horizontal half-wavelength ULA.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BsSpec {
    pub position: Vec3,
    pub array_elements: usize,
    pub boresight_azimuth: f64,
}

/// One reflecting surface, modeled as a horizontal linear aperture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrsSpec {
    pub id: usize,
    pub position: Vec3,
    pub surface_normal_azimuth: f64,
    pub elements: usize,
}

impl IrsSpec {
    /// A reflecting surface only serves points in the half-space its normal
    /// points into.
    pub fn in_front(&self, p: Vec3) -> bool {
        let n = Vec3::new(
            self.surface_normal_azimuth.cos(),
            self.surface_normal_azimuth.sin(),
            0.0,
        );
        p.sub(self.position).dot(n) > 0.0
    }
}

/// Rectangular service area bounds in the horizontal plane, meters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Area {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Area {
    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

/// Immutable world description. Validated once at construction; every
/// operation over it is a pure function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub bs: BsSpec,
    pub irss: Vec<IrsSpec>,
    pub obstacles: Vec<Obstacle>,
    pub area: Area,
    pub ue_height: f64,
}

impl Scenario {
    pub fn new(
        bs: BsSpec,
        irss: Vec<IrsSpec>,
        obstacles: Vec<Obstacle>,
        area: Area,
        ue_height: f64,
    ) -> Result<Self, ScenarioError> {
        if bs.array_elements == 0 || !bs.array_elements.is_power_of_two() {
            return Err(ScenarioError::InvalidScenario(format!(
                "bs elements must be a power of two, got {}",
                bs.array_elements
            )));
        }
        if area.x_min >= area.x_max || area.y_min >= area.y_max {
            return Err(ScenarioError::InvalidScenario("empty area".into()));
        }
        let mut ids: Vec<usize> = irss.iter().map(|i| i.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != irss.len() {
            return Err(ScenarioError::InvalidScenario(
                "IRS ids must be distinct".into(),
            ));
        }
        for irs in &irss {
            if irs.elements == 0 || !irs.elements.is_power_of_two() {
                return Err(ScenarioError::InvalidScenario(format!(
                    "irs{} elements must be a power of two, got {}",
                    irs.id, irs.elements
                )));
            }
            // Deployment assumption: the operator places IRSs with clear
            // backhaul sight of the BS.
            if los_blocked(bs.position, irs.position, &obstacles) {
                return Err(ScenarioError::InvalidScenario(format!(
                    "BS-IRS link obstructed for irs{}",
                    irs.id
                )));
            }
        }
        let mut irss = irss;
        irss.sort_by_key(|i| i.id);
        Ok(Scenario {
            bs,
            irss,
            obstacles,
            area,
            ue_height,
        })
    }

    pub fn irs(&self, id: usize) -> Option<&IrsSpec> {
        self.irss.iter().find(|i| i.id == id)
    }
}

/// The serving choice for a UE: the BS directly, a specific IRS, or nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AccessPointId {
    Direct,
    Irs(usize),
    Outage,
}

impl fmt::Display for AccessPointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccessPointId::Direct => write!(f, "direct"),
            AccessPointId::Irs(i) => write!(f, "irs{i}"),
            AccessPointId::Outage => write!(f, "outage"),
        }
    }
}

impl FromStr for AccessPointId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(AccessPointId::Direct),
            "outage" => Ok(AccessPointId::Outage),
            _ => s
                .strip_prefix("irs")
                .and_then(|rest| rest.parse::<usize>().ok())
                .map(AccessPointId::Irs)
                .ok_or_else(|| format!("unknown access point label `{s}`")),
        }
    }
}

/// Fingerprint grid parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: f64,
    pub holdout_fraction: f64,
    pub seed: u64,
}

/// One labeled sampling point of the fingerprint database.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerprintRecord {
    pub position: Vec3,
    pub label: AccessPointId,
    pub se_bits_per_hz: f64,
}

/// All access-point candidates at a position, with reachability.
///
/// Direct is listed first, then IRSs by ascending id. An IRS is reachable iff
/// both hops are unobstructed and the UE lies in front of its surface.
pub fn access_candidates(s: &Scenario, ue: Vec3) -> Vec<(AccessPointId, bool)> {
    let mut out = Vec::with_capacity(1 + s.irss.len());
    let direct = !los_blocked(s.bs.position, ue, &s.obstacles);
    out.push((AccessPointId::Direct, direct));
    for irs in &s.irss {
        let reachable = !los_blocked(s.bs.position, irs.position, &s.obstacles)
            && !los_blocked(irs.position, ue, &s.obstacles)
            && irs.in_front(ue);
        out.push((AccessPointId::Irs(irs.id), reachable));
    }
    out
}

/// Brute-force labeling oracle: evaluate the perfect-alignment spectral
/// efficiency of every reachable candidate and keep the argmax. Ties break
/// Direct first, then lowest IRS id; no reachable candidate means Outage.
pub fn label_position(s: &Scenario, link: &LinkBudget, ue: Vec3) -> FingerprintRecord {
    let mut best = (AccessPointId::Outage, 0.0f64);
    for (ap, reachable) in access_candidates(s, ue) {
        if !reachable {
            continue;
        }
        let snr = match ap {
            AccessPointId::Direct => ideal_direct_snr_db(&s.bs, link, ue),
            AccessPointId::Irs(id) => {
                ideal_cascaded_snr_db(&s.bs, link, s.irs(id).expect("validated id"), ue)
            }
            AccessPointId::Outage => unreachable!(),
        };
        let se = se_bits(snr.expect("positive distances inside the area"));
        if best.0 == AccessPointId::Outage || se > best.1 {
            best = (ap, se);
        }
    }
    FingerprintRecord {
        position: ue,
        label: best.0,
        se_bits_per_hz: best.1,
    }
}

/// Centers of the fingerprint grid cells at UE height, row-major in (y, x).
pub fn grid_points(s: &Scenario, resolution: f64) -> Vec<Vec3> {
    let nx = ((s.area.x_max - s.area.x_min) / resolution).round() as usize;
    let ny = ((s.area.y_max - s.area.y_min) / resolution).round() as usize;
    let mut pts = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            pts.push(Vec3::new(
                s.area.x_min + (ix as f64 + 0.5) * resolution,
                s.area.y_min + (iy as f64 + 0.5) * resolution,
                s.ue_height,
            ));
        }
    }
    pts
}

/// Build the fingerprint database over the grid and split it into train and
/// holdout sets. Outage points are dropped; the split is a seeded per-point
/// draw so the result is deterministic and order-independent.
pub fn build_fingerprint_dataset(
    s: &Scenario,
    link: &LinkBudget,
    g: &GridSpec,
) -> Result<(Vec<FingerprintRecord>, Vec<FingerprintRecord>), ScenarioError> {
    if !(g.resolution > 0.0) {
        return Err(ScenarioError::InvalidGrid(format!(
            "resolution must be positive, got {}",
            g.resolution
        )));
    }
    if !(g.holdout_fraction > 0.0 && g.holdout_fraction < 1.0) {
        return Err(ScenarioError::InvalidGrid(format!(
            "holdout_fraction must be in (0, 1), got {}",
            g.holdout_fraction
        )));
    }
    let pts = grid_points(s, g.resolution);
    if pts.len() < 100 {
        return Err(ScenarioError::InvalidGrid(format!(
            "grid has only {} points (need >= 100)",
            pts.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut train = Vec::new();
    let mut holdout = Vec::new();
    for p in pts {
        // One draw per grid point, consumed whether or not the point is kept,
        // so the split of a given point does not depend on other labels.
        let u: f64 = rng.gen();
        let rec = label_position(s, link, p);
        if rec.label == AccessPointId::Outage {
            continue;
        }
        if u < g.holdout_fraction {
            holdout.push(rec);
        } else {
            train.push(rec);
        }
    }
    let total = train.len() + holdout.len();
    if total < 100 {
        return Err(ScenarioError::InsufficientCoverage(total));
    }
    Ok((train, holdout))
}

/// Write fingerprint records as CSV (`x,y,z,label,se_bits_per_hz`).
/// Outage rows are never exported.
pub fn write_fingerprint_csv<W: std::io::Write>(
    records: &[FingerprintRecord],
    w: &mut W,
) -> std::io::Result<()> {
    use crate::report::fmt_g17;
    writeln!(w, "x,y,z,label,se_bits_per_hz")?;
    for r in records {
        if r.label == AccessPointId::Outage {
            continue;
        }
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_g17(r.position.x),
            fmt_g17(r.position.y),
            fmt_g17(r.position.z),
            r.label,
            fmt_g17(r.se_bits_per_hz)
        )?;
    }
    Ok(())
}

/// Parse a fingerprint CSV produced by [`write_fingerprint_csv`].
pub fn read_fingerprint_csv<R: std::io::BufRead>(
    r: R,
) -> Result<Vec<FingerprintRecord>, ScenarioError> {
    let mut out = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line.map_err(|e| ScenarioError::InvalidGrid(format!("read error: {e}")))?;
        if lineno == 0 {
            continue; // header
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(ScenarioError::InvalidGrid(format!(
                "line {}: expected 5 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| ScenarioError::InvalidGrid(format!("line {}: {e}", lineno + 1)))
        };
        out.push(FingerprintRecord {
            position: Vec3::new(num(fields[0])?, num(fields[1])?, num(fields[2])?),
            label: fields[3]
                .parse()
                .map_err(|e| ScenarioError::InvalidGrid(format!("line {}: {e}", lineno + 1)))?,
            se_bits_per_hz: num(fields[4])?,
        });
    }
    Ok(out)
}
