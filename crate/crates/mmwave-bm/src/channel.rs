//! Geometric mmWave link model: ULA steering vectors, DFT beam codebooks,
//! free-space path loss, IRS phase configurations, and one-hop / cascaded
//! two-hop SNR and spectral efficiency.
//!
//! Beam geometry is azimuth-only; node heights are folded into the 3D
//! distances used for path loss and element phases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::ChannelError;
use crate::geometry::{los_blocked, Vec3};
use crate::scenario::{BsSpec, IrsSpec, Scenario};

/// Speed of light, m/s.
const C: f64 = 299_792_458.0;

/// Transmit/noise powers and carrier for the whole network.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub carrier_ghz: f64,
    /// Per-element IRS reflection efficiency in dB (0 = lossless).
    #[serde(default)]
    pub irs_element_gain_db: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget {
            tx_power_dbm: 30.0,
            noise_power_dbm: -84.0,
            carrier_ghz: 28.0,
            irs_element_gain_db: 0.0,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.tx_power_dbm <= self.noise_power_dbm {
            return Err(ChannelError::InvalidLinkBudget(
                "tx power must exceed noise power".into(),
            ));
        }
        if !(24.0..=100.0).contains(&self.carrier_ghz) {
            return Err(ChannelError::InvalidLinkBudget(format!(
                "carrier {} GHz outside [24, 100]",
                self.carrier_ghz
            )));
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        C / (self.carrier_ghz * 1e9)
    }
}

/// One entry of a (possibly hierarchical) beam codebook.
///
/// `level` 0 is the narrowest (full DFT resolution); level L beams cover
/// 2^L adjacent level-0 directions. `sin_azimuth` may sit off the DFT grid
/// when a beam is steered geometrically toward a known position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    pub codebook_index: usize,
    pub sin_azimuth: f64,
    pub level: u32,
}

/// Per-element IRS phase shifts in radians, unit reflection amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub phases: Vec<f64>,
}

impl PhaseConfig {
    pub fn new(phases: Vec<f64>) -> Self {
        let phases = phases
            .into_iter()
            .map(|p| p.rem_euclid(2.0 * PI))
            .collect();
        PhaseConfig { phases }
    }
}

fn check_power_of_two(n: usize) -> Result<(), ChannelError> {
    if n == 0 || !n.is_power_of_two() {
        return Err(ChannelError::NotPowerOfTwo(n));
    }
    Ok(())
}

/// Half-wavelength ULA response: entry k = exp(i*pi*k*sin_az) / sqrt(n).
pub fn steering_vector(n: usize, sin_az: f64) -> Result<Vec<Complex64>, ChannelError> {
    if !(-1.0..=1.0).contains(&sin_az) {
        return Err(ChannelError::AngleOutOfRange(sin_az));
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok((0..n)
        .map(|k| Complex64::from_polar(scale, PI * k as f64 * sin_az))
        .collect())
}

/// DFT codebook at a given hierarchy level. Level L has n/2^L beams with
/// sin_azimuth = -1 + (2k+1) * 2^L / n; each beam covers exactly two children
/// at level L-1.
pub fn dft_codebook(n: usize, level: u32) -> Result<Vec<Beam>, ChannelError> {
    check_power_of_two(n)?;
    let max_level = n.trailing_zeros();
    if level > max_level {
        return Err(ChannelError::LevelOutOfRange { elements: n, level });
    }
    let count = n >> level;
    let width = (1u64 << level) as f64 / n as f64; // half-width in sin space
    Ok((0..count)
        .map(|k| Beam {
            codebook_index: k,
            sin_azimuth: -1.0 + (2 * k + 1) as f64 * width,
            level,
        })
        .collect())
}

/// Sector bounds of a codebook beam in sin space.
pub fn beam_sector(n: usize, beam: &Beam) -> (f64, f64) {
    let width = (1u64 << beam.level) as f64 * 2.0 / n as f64;
    let lo = -1.0 + beam.codebook_index as f64 * width;
    (lo, lo + width)
}

/// Linear power gain of an n-element ULA beam toward a true direction.
///
/// Level-0 beams use the exact Dirichlet-kernel pattern
/// |a(true)^H * sqrt(n) * a(beam)|^2; wider beams use the flat-sector
/// approximation n / 2^L inside the sector and 0 outside.
pub fn array_gain(n: usize, beam: &Beam, true_sin_az: f64) -> f64 {
    if beam.level == 0 {
        let delta = PI * (beam.sin_azimuth - true_sin_az);
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..n {
            let phi = delta * k as f64;
            re += phi.cos();
            im += phi.sin();
        }
        (re * re + im * im) / n as f64
    } else {
        let (lo, hi) = beam_sector(n, beam);
        if true_sin_az >= lo && true_sin_az < hi {
            (n >> beam.level) as f64
        } else {
            0.0
        }
    }
}

/// Free-space path loss: 32.4 + 20*log10(f_GHz) + 20*log10(d_m) dB.
pub fn fspl_db(d_m: f64, f_ghz: f64) -> Result<f64, ChannelError> {
    if d_m <= 0.0 {
        return Err(ChannelError::NonPositiveDistance(d_m));
    }
    Ok(32.4 + 20.0 * f_ghz.log10() + 20.0 * d_m.log10())
}

/// Sine of the arrival/departure angle at a horizontal ULA whose axis is
/// perpendicular to `boresight_azimuth`, toward `to` as seen from `from`.
pub fn ula_sin(boresight_azimuth: f64, from: Vec3, to: Vec3) -> f64 {
    let axis = Vec3::new(-boresight_azimuth.sin(), boresight_azimuth.cos(), 0.0);
    from.direction_to(to).dot(axis)
}

/// The level-0 codebook beam nearest a target direction.
pub fn nearest_beam(n: usize, sin_az: f64) -> Beam {
    let idx = (((sin_az + 1.0) * n as f64 / 2.0 - 0.5).round() as i64).clamp(0, n as i64 - 1);
    Beam {
        codebook_index: idx as usize,
        sin_azimuth: -1.0 + (2 * idx + 1) as f64 / n as f64,
        level: 0,
    }
}

/// A level-0 beam steered exactly at a target (off the DFT grid in general).
pub fn geometric_beam(n: usize, boresight_azimuth: f64, from: Vec3, to: Vec3) -> Beam {
    let s = ula_sin(boresight_azimuth, from, to);
    Beam {
        codebook_index: nearest_beam(n, s).codebook_index,
        sin_azimuth: s,
        level: 0,
    }
}

/// Element center positions of a half-wavelength-spaced linear IRS aperture,
/// laid along the surface tangent (perpendicular to the normal azimuth).
pub fn irs_element_positions(irs: &IrsSpec, wavelength_m: f64) -> Vec<Vec3> {
    let t = Vec3::new(
        -irs.surface_normal_azimuth.sin(),
        irs.surface_normal_azimuth.cos(),
        0.0,
    );
    let n = irs.elements;
    (0..n)
        .map(|m| {
            let offset = (m as f64 - (n as f64 - 1.0) / 2.0) * wavelength_m / 2.0;
            irs.position.add(t.scale(offset))
        })
        .collect()
}

/// Phase configuration that co-phases all element contributions at a target
/// UE position: phase_m = -(2*pi/lambda) * (d_bs,m + d_m,ue) mod 2*pi.
pub fn irs_optimal_phases(bs_pos: Vec3, irs: &IrsSpec, ue_pos: Vec3, f_ghz: f64) -> PhaseConfig {
    let lambda = C / (f_ghz * 1e9);
    let k = 2.0 * PI / lambda;
    let phases = irs_element_positions(irs, lambda)
        .iter()
        .map(|p| (-k * (bs_pos.distance(*p) + p.distance(ue_pos))).rem_euclid(2.0 * PI))
        .collect();
    PhaseConfig { phases }
}

/// The IRS's sweepable beam space: one optimal-phase configuration per
/// uniformly spaced departure direction (same sin grid as a level-0 DFT
/// codebook). The BS-side hop phase is compensated exactly from the known
/// deployment geometry.
pub fn irs_codebook(bs_pos: Vec3, irs: &IrsSpec, f_ghz: f64) -> Vec<(Beam, PhaseConfig)> {
    let lambda = C / (f_ghz * 1e9);
    let k = 2.0 * PI / lambda;
    let n = irs.elements;
    let elems = irs_element_positions(irs, lambda);
    (0..n)
        .map(|idx| {
            let s = -1.0 + (2 * idx + 1) as f64 / n as f64;
            let beam = Beam {
                codebook_index: idx,
                sin_azimuth: s,
                level: 0,
            };
            let phases = elems
                .iter()
                .enumerate()
                .map(|(m, p)| {
                    let centered = m as f64 - (n as f64 - 1.0) / 2.0;
                    (-k * bs_pos.distance(*p) + PI * centered * s).rem_euclid(2.0 * PI)
                })
                .collect();
            (beam, PhaseConfig { phases })
        })
        .collect()
}

/// Coherent combining amplitude |sum_m exp(i*(phi_m + psi_m))| where psi_m is
/// the exact two-hop propagation phase of element m.
fn irs_combining_amplitude(
    bs_pos: Vec3,
    irs: &IrsSpec,
    phases: &PhaseConfig,
    ue_pos: Vec3,
    f_ghz: f64,
) -> f64 {
    let lambda = C / (f_ghz * 1e9);
    let k = 2.0 * PI / lambda;
    let elems = irs_element_positions(irs, lambda);
    debug_assert_eq!(elems.len(), phases.phases.len());
    let mut re = 0.0;
    let mut im = 0.0;
    for (p, phi) in elems.iter().zip(&phases.phases) {
        let theta = phi + k * (bs_pos.distance(*p) + p.distance(ue_pos));
        re += theta.cos();
        im += theta.sin();
    }
    (re * re + im * im).sqrt()
}

/// SNR in dB of the direct BS->UE link with the given BS beam.
///
/// Returns -inf for a beam with zero gain toward the UE; errors when the link
/// is obstructed.
pub fn direct_snr_db(
    s: &Scenario,
    link: &LinkBudget,
    bs_beam: &Beam,
    ue: Vec3,
) -> Result<f64, ChannelError> {
    if los_blocked(s.bs.position, ue, &s.obstacles) {
        return Err(ChannelError::BlockedLink {
            from: "bs".into(),
            to: "ue".into(),
        });
    }
    let true_sin = ula_sin(s.bs.boresight_azimuth, s.bs.position, ue);
    let gain = array_gain(s.bs.array_elements, bs_beam, true_sin);
    if gain <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let d = s.bs.position.distance(ue);
    Ok(link.tx_power_dbm - fspl_db(d, link.carrier_ghz)? + 10.0 * gain.log10()
        - link.noise_power_dbm)
}

/// SNR in dB of the cascaded BS->IRS->UE link.
///
/// SNR = tx - fspl(d1) - fspl(d2) + 10*log10(bs gain toward IRS)
///     + 20*log10(combining amplitude) + element gain - noise.
/// With `irs_optimal_phases` the combining power gain is exactly N^2.
pub fn cascaded_snr_db(
    s: &Scenario,
    link: &LinkBudget,
    irs: &IrsSpec,
    phases: &PhaseConfig,
    bs_beam: &Beam,
    ue: Vec3,
) -> Result<f64, ChannelError> {
    if los_blocked(s.bs.position, irs.position, &s.obstacles) {
        return Err(ChannelError::BlockedLink {
            from: "bs".into(),
            to: format!("irs{}", irs.id),
        });
    }
    if los_blocked(irs.position, ue, &s.obstacles) || !irs.in_front(ue) {
        return Err(ChannelError::BlockedLink {
            from: format!("irs{}", irs.id),
            to: "ue".into(),
        });
    }
    let true_sin = ula_sin(s.bs.boresight_azimuth, s.bs.position, irs.position);
    let bs_gain = array_gain(s.bs.array_elements, bs_beam, true_sin);
    let amp = irs_combining_amplitude(s.bs.position, irs, phases, ue, link.carrier_ghz);
    if bs_gain <= 0.0 || amp <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let d1 = s.bs.position.distance(irs.position);
    let d2 = irs.position.distance(ue);
    Ok(link.tx_power_dbm - fspl_db(d1, link.carrier_ghz)? - fspl_db(d2, link.carrier_ghz)?
        + 10.0 * bs_gain.log10()
        + 20.0 * amp.log10()
        + link.irs_element_gain_db
        - link.noise_power_dbm)
}

/// Closed-form SNR of the direct link under perfect beam alignment (gain = N).
pub fn ideal_direct_snr_db(bs: &BsSpec, link: &LinkBudget, ue: Vec3) -> Result<f64, ChannelError> {
    let d = bs.position.distance(ue);
    Ok(link.tx_power_dbm - fspl_db(d, link.carrier_ghz)?
        + 10.0 * (bs.array_elements as f64).log10()
        - link.noise_power_dbm)
}

/// Closed-form SNR of the cascaded link under perfect alignment: BS gain N_BS
/// and coherent IRS combining gain N_I^2.
pub fn ideal_cascaded_snr_db(
    bs: &BsSpec,
    link: &LinkBudget,
    irs: &IrsSpec,
    ue: Vec3,
) -> Result<f64, ChannelError> {
    let d1 = bs.position.distance(irs.position);
    let d2 = irs.position.distance(ue);
    Ok(link.tx_power_dbm - fspl_db(d1, link.carrier_ghz)? - fspl_db(d2, link.carrier_ghz)?
        + 10.0 * (bs.array_elements as f64).log10()
        + 20.0 * (irs.elements as f64).log10()
        + link.irs_element_gain_db
        - link.noise_power_dbm)
}

/// Shannon spectral efficiency log2(1 + SNR) in bits/s/Hz.
pub fn se_bits(snr_db: f64) -> f64 {
    if snr_db == f64::NEG_INFINITY {
        return 0.0;
    }
    (1.0 + 10f64.powf(snr_db / 10.0)).log2()
}
