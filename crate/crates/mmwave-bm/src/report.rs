//! Deterministic result emission: 17-significant-digit number formatting and
//! the CSV/JSON report writers shared by the simulation entry points.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::EngineError;
use crate::scenario::AccessPointId;

/// Format a float with 17 significant digits so that writing and re-parsing
/// round-trips every f64 exactly and output is byte-stable across runs.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row of the overhead table: total initial-access cost for one protocol
/// at one user count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadRow {
    pub protocol: String,
    pub users: usize,
    pub total_seconds: f64,
    pub slots: u64,
    /// Mean achieved SE over the placed users (bits/s/Hz).
    pub mean_achieved_se: f64,
}

/// One row of the per-slot spectral-efficiency trace (long format: one row
/// per slot per scheme).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeTraceRow {
    pub slot: u64,
    pub scheme: String,
    pub se_bits_per_hz: f64,
}

/// A recorded handover (access-point switch).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverRecord {
    pub slot: u64,
    pub from: AccessPointId,
    pub to: AccessPointId,
    pub scheme: String,
}

/// Per-scheme aggregate of a tracking run. Data slots carry payload SE;
/// training slots (sweeps, probes, confirmations) score zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub mean_se: f64,
    pub data_slots: u64,
    pub training_slots: u64,
    pub outage_slots: u64,
    pub handover_count: usize,
}

/// Full structured report: config echo, seed, and every emitted table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SimReport {
    pub config_echo: String,
    pub seed: u64,
    pub slot_us: f64,
    pub total_slots: u64,
    pub overhead: Vec<OverheadRow>,
    pub se_trace: Vec<SeTraceRow>,
    pub handovers: Vec<HandoverRecord>,
    pub summary: BTreeMap<String, SchemeSummary>,
}

fn create(path: &Path) -> Result<std::fs::File, EngineError> {
    std::fs::File::create(path).map_err(|e| EngineError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn io_err(path: &Path, e: std::io::Error) -> EngineError {
    EngineError::Io {
        path: path.display().to_string(),
        source: e,
    }
}

/// Write every artifact of a report into `dir`: `overhead.csv`,
/// `se_trace.csv`, `handover.csv`, and `report.json`.
pub fn emit_report(r: &SimReport, dir: &Path) -> Result<(), EngineError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let path = dir.join("overhead.csv");
    let mut f = std::io::BufWriter::new(create(&path)?);
    (|| -> std::io::Result<()> {
        writeln!(f, "protocol,users,total_seconds,slots,mean_achieved_se")?;
        for row in &r.overhead {
            writeln!(
                f,
                "{},{},{},{},{}",
                row.protocol,
                row.users,
                fmt_g17(row.total_seconds),
                row.slots,
                fmt_g17(row.mean_achieved_se)
            )?;
        }
        f.flush()
    })()
    .map_err(|e| io_err(&path, e))?;

    let path = dir.join("se_trace.csv");
    let mut f = std::io::BufWriter::new(create(&path)?);
    (|| -> std::io::Result<()> {
        writeln!(f, "slot,scheme,se_bits_per_hz")?;
        for row in &r.se_trace {
            writeln!(f, "{},{},{}", row.slot, row.scheme, fmt_g17(row.se_bits_per_hz))?;
        }
        f.flush()
    })()
    .map_err(|e| io_err(&path, e))?;

    let path = dir.join("handover.csv");
    let mut f = std::io::BufWriter::new(create(&path)?);
    (|| -> std::io::Result<()> {
        writeln!(f, "slot,from,to,scheme")?;
        for row in &r.handovers {
            writeln!(f, "{},{},{},{}", row.slot, row.from, row.to, row.scheme)?;
        }
        f.flush()
    })()
    .map_err(|e| io_err(&path, e))?;

    let path = dir.join("report.json");
    let body = serde_json::to_string_pretty(r)
        .map_err(|e| io_err(&path, std::io::Error::new(std::io::ErrorKind::Other, e)))?;
    let mut f = std::io::BufWriter::new(create(&path)?);
    (|| -> std::io::Result<()> {
        f.write_all(body.as_bytes())?;
        writeln!(f)?;
        f.flush()
    })()
    .map_err(|e| io_err(&path, e))?;
    Ok(())
}

/// Re-read a `report.json` written by [`emit_report`].
pub fn read_report_json(path: &Path) -> Result<SimReport, EngineError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| EngineError::Config(format!("malformed report at {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_g17_round_trips_exactly() {
        for &v in &[
            0.0,
            1.0,
            -1.0,
            std::f64::consts::PI,
            1.0 / 3.0,
            1e-300,
            -2.2250738585072014e-308,
            12345.678901234567,
        ] {
            let s = fmt_g17(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s}");
        }
    }

    #[test]
    fn fmt_g17_is_stable() {
        assert_eq!(fmt_g17(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_g17(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn empty_report_emits_header_only_csvs_and_valid_json() {
        let dir = tempfile::tempdir().unwrap();
        let r = SimReport::default();
        emit_report(&r, dir.path()).unwrap();
        for (file, header) in [
            ("overhead.csv", "protocol,users,total_seconds,slots,mean_achieved_se"),
            ("se_trace.csv", "slot,scheme,se_bits_per_hz"),
            ("handover.csv", "slot,from,to,scheme"),
        ] {
            let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
            assert_eq!(text.trim_end(), header, "{file}");
        }
        let back = read_report_json(&dir.path().join("report.json")).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn report_json_round_trips_all_tables() {
        let mut r = SimReport {
            config_echo: "slot_us = 100.0".into(),
            seed: 7,
            slot_us: 100.0,
            total_slots: 1000,
            overhead: vec![OverheadRow {
                protocol: "exhaustive".into(),
                users: 100,
                total_seconds: 32_000.0 * 100.0 * 1e-6,
                slots: 32_000,
                mean_achieved_se: 10.123456789012345,
            }],
            se_trace: vec![SeTraceRow {
                slot: 0,
                scheme: "genie".into(),
                se_bits_per_hz: 1.0 / 3.0,
            }],
            handovers: vec![HandoverRecord {
                slot: 42,
                from: AccessPointId::Irs(1),
                to: AccessPointId::Direct,
                scheme: "mobility_aware".into(),
            }],
            summary: BTreeMap::new(),
        };
        r.summary.insert(
            "genie".into(),
            SchemeSummary {
                mean_se: 9.25,
                data_slots: 1000,
                training_slots: 0,
                outage_slots: 0,
                handover_count: 0,
            },
        );
        let dir = tempfile::tempdir().unwrap();
        emit_report(&r, dir.path()).unwrap();
        let back = read_report_json(&dir.path().join("report.json")).unwrap();
        assert_eq!(back, r);
        let hand = std::fs::read_to_string(dir.path().join("handover.csv")).unwrap();
        assert!(hand.contains("42,irs1,direct,mobility_aware"));
        // total_seconds = slots * slot_us * 1e-6 for the default slot length.
        let row = &back.overhead[0];
        assert_eq!(row.total_seconds, row.slots as f64 * 100.0 * 1e-6);
    }
}
